//! Ensemble and Kraus-matrix file formats.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "states": [
//!     { "prior": 0.5, "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]] },
//!     { "prior": 0.5, "ket": [[0.7071067811865476, 0], [0.7071067811865476, 0]] }
//!   ],
//!   "tolerance": 1e-9
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! lists. A Kraus file holds a single matrix in the same nested-list form.

use std::path::Path;

use serde_json::Value;

use crate::ensemble::{Ensemble, State};
use crate::error::Error;
use crate::matcore::{hermitian_eigen, vector_norm, Complex, ComplexMatrix, PSD_TOL};

const PRIOR_SUM_TOL: f64 = 1e-9;
const KET_RENORM_WARN: f64 = 1e-6;
const TRACE_TOL: f64 = 1e-10;

/// Parse failure with the path of the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct SpecError {
    pub field: String,
    pub message: String,
}

impl SpecError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedSpec {
    pub ensemble: Ensemble,
    /// Verification tolerance override carried by the file.
    pub tolerance: Option<f64>,
    pub warnings: Vec<String>,
}

fn number(v: &Value, field: &str) -> Result<f64, SpecError> {
    let x = v
        .as_f64()
        .ok_or_else(|| SpecError::new(field, format!("expected a number, found {v}")))?;
    if !x.is_finite() {
        return Err(SpecError::new(field, "number is not finite"));
    }
    Ok(x)
}

fn complex(v: &Value, field: &str) -> Result<Complex, SpecError> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Complex::new(number(re, &format!("{field}[0]"))?, number(im, &format!("{field}[1]"))?)),
        _ => Err(SpecError::new(field, format!("expected an [re, im] pair, found {v}"))),
    }
}

fn complex_list(v: &Value, field: &str) -> Result<Vec<Complex>, SpecError> {
    let items = v
        .as_array()
        .ok_or_else(|| SpecError::new(field, "expected a list of [re, im] pairs"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, z)| complex(z, &format!("{field}[{i}]")))
        .collect()
}

/// Parses a row-major nested list of `[re, im]` pairs.
pub fn parse_matrix(v: &Value, field: &str) -> Result<ComplexMatrix, SpecError> {
    let rows = v
        .as_array()
        .ok_or_else(|| SpecError::new(field, "expected a nested list of rows"))?;
    let rows: Vec<Vec<Complex>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| complex_list(row, &format!("{field}[{i}]")))
        .collect::<Result<_, _>>()?;
    ComplexMatrix::from_rows(&rows).map_err(|e| SpecError::new(field, e.to_string()))
}

/// Round to 12 decimals so sums like `0.6 + 0.5` read as `1.1` in diagnostics.
fn display_sum(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Parses an ensemble specification from JSON text.
pub fn parse_spec_str(text: &str) -> Result<ParsedSpec, SpecError> {
    let root: Value = serde_json::from_str(text).map_err(|e| SpecError::new("<document>", e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| SpecError::new("<document>", "expected a JSON object"))?;
    let dim_value = obj
        .get("dimension")
        .ok_or_else(|| SpecError::new("dimension", "missing"))?;
    let dim = dim_value
        .as_u64()
        .filter(|&d| d >= 1)
        .ok_or_else(|| SpecError::new("dimension", format!("expected a positive integer, found {dim_value}")))?
        as usize;
    let tolerance = match obj.get("tolerance") {
        None => None,
        Some(v) => {
            let t = number(v, "tolerance")?;
            if t <= 0.0 {
                return Err(SpecError::new("tolerance", "must be positive"));
            }
            Some(t)
        }
    };
    let entries = obj
        .get("states")
        .and_then(Value::as_array)
        .ok_or_else(|| SpecError::new("states", "expected a list of state entries"))?;
    if entries.is_empty() {
        return Err(SpecError::new("states", "no states given"));
    }

    let mut warnings = Vec::new();
    let mut states = Vec::with_capacity(entries.len());
    let mut priors = Vec::with_capacity(entries.len());
    for (idx, entry) in entries.iter().enumerate() {
        let base = format!("states[{idx}]");
        let entry = entry
            .as_object()
            .ok_or_else(|| SpecError::new(&base, "expected an object"))?;
        let prior_field = format!("{base}.prior");
        let prior = number(
            entry.get("prior").ok_or_else(|| SpecError::new(&prior_field, "missing"))?,
            &prior_field,
        )?;
        if prior <= 0.0 {
            return Err(SpecError::new(prior_field, format!("prior must be positive, found {prior}")));
        }
        priors.push(prior);

        let state = match (entry.get("ket"), entry.get("matrix")) {
            (Some(_), Some(_)) => return Err(SpecError::new(&base, "give either ket or matrix, not both")),
            (None, None) => return Err(SpecError::new(&base, "missing ket or matrix")),
            (Some(k), None) => {
                let field = format!("{base}.ket");
                let ket = complex_list(k, &field)?;
                if ket.len() != dim {
                    return Err(SpecError::new(
                        field,
                        format!("ket has {} entries, dimension is {dim}", ket.len()),
                    ));
                }
                let norm = vector_norm(&ket);
                if norm == 0.0 {
                    return Err(SpecError::new(field, "ket is zero"));
                }
                if (norm - 1.0).abs() > KET_RENORM_WARN {
                    warnings.push(format!("{field}: norm {norm} renormalized to 1"));
                }
                State::pure(ket.into_iter().map(|z| z / norm).collect()).map_err(|e| SpecError::new(field, e.to_string()))?
            }
            (None, Some(m)) => {
                let field = format!("{base}.matrix");
                let matrix = parse_matrix(m, &field)?;
                if matrix.rows() != dim || matrix.cols() != dim {
                    return Err(SpecError::new(
                        field,
                        format!("matrix is {}x{}, dimension is {dim}", matrix.rows(), matrix.cols()),
                    ));
                }
                let eig = hermitian_eigen(&matrix).map_err(|e| SpecError::new(&field, e.to_string()))?;
                let low = eig.min_eigenvalue();
                if low < -PSD_TOL * eig.max_eigenvalue().max(0.0) || (eig.max_eigenvalue() <= 0.0) {
                    return Err(SpecError::new(
                        field,
                        format!("matrix is not positive semidefinite (most negative eigenvalue {low:e})"),
                    ));
                }
                let tr = matrix.trace();
                if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
                    return Err(SpecError::new(field, format!("trace is {}, expected 1", tr.re)));
                }
                State::mixed(matrix.hermitian_part()).map_err(|e| SpecError::new(field, e.to_string()))?
            }
        };
        states.push(state);
    }

    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > PRIOR_SUM_TOL {
        return Err(SpecError::new("states", format!("priors sum to {}", display_sum(total))));
    }
    let priors = priors.iter().map(|p| p / total).collect();
    let ensemble = Ensemble::new(states, priors).map_err(|e| match e {
        Error::DimensionMismatch(m) => SpecError::new("states", m),
        other => SpecError::new("states", other.to_string()),
    })?;
    Ok(ParsedSpec {
        ensemble,
        tolerance,
        warnings,
    })
}

pub fn parse_spec(path: &Path) -> Result<ParsedSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::new(path.display().to_string(), e.to_string()))?;
    parse_spec_str(&text)
}

pub fn parse_kraus_str(text: &str) -> Result<ComplexMatrix, SpecError> {
    let root: Value = serde_json::from_str(text).map_err(|e| SpecError::new("<document>", e.to_string()))?;
    parse_matrix(&root, "kraus")
}

pub fn parse_kraus(path: &Path) -> Result<ComplexMatrix, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::new(path.display().to_string(), e.to_string()))?;
    parse_kraus_str(&text)
}

/// `[[[re, im], ...], ...]` form of a matrix.
pub fn matrix_to_json(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}
