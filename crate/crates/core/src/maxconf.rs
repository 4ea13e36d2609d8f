//! Maximum-confidence bounds and measurements in the left-system picture.
//!
//! For a pure state the bound is `p_j Tr(ρ_j ρ^{-1})`; for a mixed state it is
//! the largest eigenvalue of `p_j ρ^{-1/2} ρ_j ρ^{-1/2}`. Optimal effects are only
//! fixed up to a positive scale; [`complete_pom`] picks one common scale and
//! hands the remainder of the identity to an inconclusive outcome.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{rho_left, Ensemble};
use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eigen, support_inv_sqrt, support_inverse, ComplexMatrix, PSD_TOL, RANK_TOL,
};

/// Relative width of the eigenvalue window treated as the top eigenspace.
pub const TOP_EIGENSPACE_TOL: f64 = 1e-9;

/// Tolerance on `‖Σ Π + Π_fail − I‖_F` for a measurement to count as complete.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Outcome probabilities below this are treated as zero.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;

/// Trials per independently seeded chunk in [`simulate_measurement`].
pub const SIMULATION_CHUNK: usize = 1 << 16;

/// Cached left-picture quantities for one ensemble.
struct LeftPicture {
    rho: ComplexMatrix,
    inverse: ComplexMatrix,
    inv_sqrt: ComplexMatrix,
}

impl LeftPicture {
    fn new(ens: &Ensemble) -> Self {
        let rho = rho_left(ens);
        // ρ ⪰ p_j ρ_j with p_j > 0, so ρ always has support
        let inverse = support_inverse(&rho, RANK_TOL).expect("average state has support");
        let inv_sqrt = support_inv_sqrt(&rho, RANK_TOL).expect("average state has support");
        Self { rho, inverse, inv_sqrt }
    }

    /// `p_j ρ^{-1/2} ρ_j ρ^{-1/2}`.
    fn whitened(&self, ens: &Ensemble, j: usize) -> ComplexMatrix {
        let s = &self.inv_sqrt;
        s.matmul(ens.states()[j].density()).matmul(s).scale(ens.prior(j))
    }

    fn pure_bound(&self, ens: &Ensemble, j: usize) -> f64 {
        ens.prior(j) * ens.states()[j].density().trace_product(&self.inverse).re
    }

    fn eigen_bound(&self, ens: &Ensemble, j: usize) -> f64 {
        hermitian_eigen(&self.whitened(ens, j))
            .expect("whitened state is Hermitian")
            .max_eigenvalue()
    }

    fn bound(&self, ens: &Ensemble, j: usize) -> f64 {
        if ens.states()[j].is_pure() {
            self.pure_bound(ens, j)
        } else {
            self.eigen_bound(ens, j)
        }
    }

    fn optimal_effect(&self, ens: &Ensemble, j: usize) -> ComplexMatrix {
        let state = &ens.states()[j];
        if state.is_pure() {
            let inv = &self.inverse;
            inv.matmul(state.density()).matmul(inv).scale(ens.prior(j))
        } else {
            let top = hermitian_eigen(&self.whitened(ens, j))
                .expect("whitened state is Hermitian")
                .top_eigenspace_projector(TOP_EIGENSPACE_TOL);
            let s = &self.inv_sqrt;
            s.matmul(&top).matmul(s)
        }
        .hermitian_part()
    }

    fn confidence_of(&self, ens: &Ensemble, effect: &ComplexMatrix, j: usize) -> Result<f64> {
        let total = self.rho.trace_product(effect).re;
        if total <= MIN_OUTCOME_PROBABILITY {
            return Err(Error::ZeroProbability { probability: total });
        }
        let hit = ens.prior(j) * ens.states()[j].density().trace_product(effect).re;
        Ok(hit / total)
    }
}

fn check_label(ens: &Ensemble, j: usize) -> Result<()> {
    ens.state(j).map(|_| ())
}

fn check_effect_shape(ens: &Ensemble, effect: &ComplexMatrix) -> Result<()> {
    if effect.rows() != ens.dim() || effect.cols() != ens.dim() {
        return Err(Error::DimensionMismatch(format!(
            "effect is {}x{}, ensemble dimension is {}",
            effect.rows(),
            effect.cols(),
            ens.dim()
        )));
    }
    Ok(())
}

/// Largest achievable confidence `max_Π P(ρ_j | ω_j)` for state `j`.
pub fn max_confidence(ens: &Ensemble, j: usize) -> Result<f64> {
    check_label(ens, j)?;
    Ok(LeftPicture::new(ens).bound(ens, j))
}

/// Eigenvalue form of the bound, valid for pure and mixed states alike.
pub fn max_confidence_eigen(ens: &Ensemble, j: usize) -> Result<f64> {
    check_label(ens, j)?;
    Ok(LeftPicture::new(ens).eigen_bound(ens, j))
}

/// Bounds for every state label, in order.
pub fn max_confidences(ens: &Ensemble) -> Vec<f64> {
    let lp = LeftPicture::new(ens);
    (0..ens.len()).map(|j| lp.bound(ens, j)).collect()
}

/// Unnormalized optimal effect for state `j`.
///
/// Pure states give `ρ^{-1} p_j ρ_j ρ^{-1}`. Mixed states give
/// `ρ^{-1/2} P_max ρ^{-1/2}` with `P_max` the projector onto the top eigenspace
/// of `p_j ρ^{-1/2} ρ_j ρ^{-1/2}`.
pub fn optimal_effect(ens: &Ensemble, j: usize) -> Result<ComplexMatrix> {
    check_label(ens, j)?;
    Ok(LeftPicture::new(ens).optimal_effect(ens, j))
}

/// `P(ρ_j | Π) = p_j Tr(ρ_j Π) / Tr(ρ Π)`. The effect is assumed PSD.
pub fn confidence_of(ens: &Ensemble, effect: &ComplexMatrix, j: usize) -> Result<f64> {
    check_label(ens, j)?;
    check_effect_shape(ens, effect)?;
    LeftPicture::new(ens).confidence_of(ens, effect, j)
}

/// Outcome probability `Tr(ρ Π)` for the ensemble average.
pub fn outcome_probability(ens: &Ensemble, effect: &ComplexMatrix) -> f64 {
    rho_left(ens).trace_product(effect).re
}

/// A measurement effect tagged with the state label it identifies.
#[derive(Debug, Clone)]
pub struct Effect {
    pub label: usize,
    pub matrix: ComplexMatrix,
}

/// Probability operator measure: labelled effects plus an optional inconclusive element.
#[derive(Debug, Clone)]
pub struct Pom {
    pub effects: Vec<Effect>,
    pub fail: Option<ComplexMatrix>,
}

impl Pom {
    pub fn new(effects: Vec<Effect>, fail: Option<ComplexMatrix>) -> Result<Self> {
        let dim = effects
            .first()
            .map(|e| e.matrix.rows())
            .or_else(|| fail.as_ref().map(ComplexMatrix::rows))
            .ok_or_else(|| Error::InvalidArgument("measurement has no elements".into()))?;
        let all = effects.iter().map(|e| &e.matrix).chain(fail.as_ref());
        for m in all {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "effect is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Self { effects, fail })
    }

    /// Projective measurement `{|k⟩⟨k|}` labelled `0..n`.
    pub fn projective(vectors: &[Vec<crate::matcore::Complex>]) -> Result<Self> {
        let effects = vectors
            .iter()
            .enumerate()
            .map(|(label, v)| Effect {
                label,
                matrix: ComplexMatrix::projector(v),
            })
            .collect();
        Self::new(effects, None)
    }

    pub fn dim(&self) -> usize {
        self.effects
            .first()
            .map(|e| e.matrix.rows())
            .or_else(|| self.fail.as_ref().map(ComplexMatrix::rows))
            .unwrap_or(0)
    }

    pub fn effect_sum(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for e in &self.effects {
            acc += &e.matrix;
        }
        acc
    }

    /// `Σ effects + fail`.
    pub fn total(&self) -> ComplexMatrix {
        let mut acc = self.effect_sum();
        if let Some(f) = &self.fail {
            acc += f;
        }
        acc
    }

    /// `‖Σ effects + fail − I‖_F`.
    pub fn completeness_deviation(&self) -> f64 {
        (&self.total() - &ComplexMatrix::identity(self.dim())).frobenius_norm()
    }

    pub fn is_complete(&self) -> bool {
        self.completeness_deviation() <= COMPLETENESS_TOL
    }

    /// Smallest eigenvalue over all elements, fail included.
    pub fn min_element_eigenvalue(&self) -> f64 {
        self.effects
            .iter()
            .map(|e| &e.matrix)
            .chain(self.fail.as_ref())
            .map(|m| hermitian_eigen(m).map_or(f64::NEG_INFINITY, |e| e.min_eigenvalue()))
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks element positivity and `Σ effects ⪯ I`, plus completeness when a fail element is present.
    pub fn validate(&self) -> Result<()> {
        let low = self.min_element_eigenvalue();
        if low < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue: low });
        }
        let top = hermitian_eigen(&self.effect_sum())?.max_eigenvalue();
        if top > 1.0 + COMPLETENESS_TOL {
            return Err(Error::IncompletePom { deviation: top - 1.0 });
        }
        if self.fail.is_some() && !self.is_complete() {
            return Err(Error::IncompletePom {
                deviation: self.completeness_deviation(),
            });
        }
        Ok(())
    }
}

/// Completes the optimal effects into a measurement with a single common scale.
///
/// `Π_j = t D_j` with `t = 1/γ_max(Σ_j D_j)`; the inconclusive element
/// `Π_fail = I − Σ_j Π_j` absorbs the rest, including everything outside the
/// support of `ρ`.
pub fn complete_pom(ens: &Ensemble) -> Pom {
    let lp = LeftPicture::new(ens);
    let directions: Vec<ComplexMatrix> = (0..ens.len()).map(|j| lp.optimal_effect(ens, j)).collect();
    let mut sum = ComplexMatrix::zeros(ens.dim(), ens.dim());
    for d in &directions {
        sum += d;
    }
    let top = hermitian_eigen(&sum).expect("sum of Hermitian effects").max_eigenvalue();
    let t = 1.0 / top;
    let effects: Vec<Effect> = directions
        .into_iter()
        .enumerate()
        .map(|(label, d)| Effect {
            label,
            matrix: d.scale(t),
        })
        .collect();
    let fail = (&ComplexMatrix::identity(ens.dim()) - &sum.scale(t)).hermitian_part();
    Pom {
        effects,
        fail: Some(fail),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfidenceRecord {
    pub label: usize,
    pub bound: f64,
    /// `None` when the outcome never occurs.
    pub achieved: Option<f64>,
    pub outcome_probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfidenceReport {
    pub records: Vec<ConfidenceRecord>,
    pub inconclusive_probability: f64,
}

/// Bounds, achieved confidences and outcome probabilities of `pom` on `ens`.
pub fn confidence_report(ens: &Ensemble, pom: &Pom) -> Result<ConfidenceReport> {
    if pom.dim() != ens.dim() {
        return Err(Error::DimensionMismatch(format!(
            "measurement dimension {} on a {}-dimensional ensemble",
            pom.dim(),
            ens.dim()
        )));
    }
    let lp = LeftPicture::new(ens);
    let mut records = Vec::with_capacity(pom.effects.len());
    for e in &pom.effects {
        check_label(ens, e.label)?;
        let outcome_probability = lp.rho.trace_product(&e.matrix).re;
        let achieved = match lp.confidence_of(ens, &e.matrix, e.label) {
            Ok(v) => Some(v),
            Err(Error::ZeroProbability { .. }) => None,
            Err(err) => return Err(err),
        };
        records.push(ConfidenceRecord {
            label: e.label,
            bound: lp.bound(ens, e.label),
            achieved,
            outcome_probability,
        });
    }
    let inconclusive_probability = pom.fail.as_ref().map_or(0.0, |f| lp.rho.trace_product(f).re);
    Ok(ConfidenceReport {
        records,
        inconclusive_probability,
    })
}

/// Tally for one conclusive outcome of a simulated measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeTally {
    pub label: usize,
    pub count: u64,
    /// Trials where the prepared state carried this outcome's label.
    pub correct: u64,
    /// `correct / count`, absent when the outcome never occurred.
    pub conditional_frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    pub outcomes: Vec<OutcomeTally>,
    pub inconclusive_count: u64,
    pub inconclusive_frequency: f64,
}

fn inverse_cdf(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.len() - 1
}

/// Monte Carlo run of `trials` preparations followed by `pom`.
///
/// Trials are split into chunks of [`SIMULATION_CHUNK`]; chunk `c` draws from
/// `ChaCha8Rng::seed_from_u64(seed)` on stream `c`, so the counts depend only on
/// `(seed, trials)` and not on the thread pool. Each trial draws the state by
/// inverse CDF over the priors, then the outcome by inverse CDF over
/// `Tr(ρ_i Π_k)` in effect order with the fail element last.
pub fn simulate_measurement(ens: &Ensemble, pom: &Pom, trials: u64, seed: u64) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let fail = pom.fail.as_ref().ok_or(Error::IncompletePom {
        deviation: pom.completeness_deviation(),
    })?;
    if !pom.is_complete() {
        return Err(Error::IncompletePom {
            deviation: pom.completeness_deviation(),
        });
    }
    if pom.dim() != ens.dim() {
        return Err(Error::DimensionMismatch(format!(
            "measurement dimension {} on a {}-dimensional ensemble",
            pom.dim(),
            ens.dim()
        )));
    }
    for e in &pom.effects {
        check_label(ens, e.label)?;
    }
    // outcome_table[i][k]: probability of outcome k given state i; fail is last
    let outcome_table: Vec<Vec<f64>> = ens
        .states()
        .iter()
        .map(|s| {
            pom.effects
                .iter()
                .map(|e| &e.matrix)
                .chain(std::iter::once(fail))
                .map(|m| s.density().trace_product(m).re.max(0.0))
                .collect()
        })
        .collect();
    let n_out = pom.effects.len() + 1;
    let n_states = ens.len();
    let priors = ens.priors().to_vec();

    let chunks = trials.div_ceil(SIMULATION_CHUNK as u64);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let start = chunk * SIMULATION_CHUNK as u64;
            let len = (trials - start).min(SIMULATION_CHUNK as u64);
            let mut local = vec![0u64; n_out * n_states];
            for _ in 0..len {
                let i = inverse_cdf(&priors, rng.random::<f64>());
                let k = inverse_cdf(&outcome_table[i], rng.random::<f64>());
                local[k * n_states + i] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; n_out * n_states],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let outcomes = pom
        .effects
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let row = &counts[k * n_states..(k + 1) * n_states];
            let count: u64 = row.iter().sum();
            let correct = row[e.label];
            OutcomeTally {
                label: e.label,
                count,
                correct,
                conditional_frequency: (count > 0).then(|| correct as f64 / count as f64),
            }
        })
        .collect();
    let inconclusive_count: u64 = counts[(n_out - 1) * n_states..].iter().sum();
    Ok(SimulationReport {
        trials,
        seed,
        outcomes,
        inconclusive_count,
        inconclusive_frequency: inconclusive_count as f64 / trials as f64,
    })
}

/// Half-width of the `k`-sigma binomial band for success probability `p` over `n` trials.
pub fn binomial_band(p: f64, n: u64, k: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    k * (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}
