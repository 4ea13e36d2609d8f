//! Local filtering: Kraus transformations of an ensemble, the monotonicity of
//! the confidence bound under them, and the `ρ^{-1/2}` filter that both
//! precedes a maximum-confidence measurement and concentrates entanglement.

use serde::Serialize;

use crate::ensemble::{rho_left, BipartiteState, Ensemble, State};
use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigen, support_projector, ComplexMatrix, RANK_TOL};
use crate::maxconf::{max_confidence, MIN_OUTCOME_PROBABILITY};

/// Slack on `Tr(ρ A†A) ≤ 1`.
pub const KRAUS_NORM_TOL: f64 = 1e-10;

/// Tolerance used for the monotonicity and invariance verdicts.
pub const MONOTONICITY_TOL: f64 = 1e-9;

/// Single operation element `A`.
#[derive(Debug, Clone)]
pub struct KrausOperator {
    matrix: ComplexMatrix,
    rank: usize,
}

impl KrausOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidKraus(format!(
                "operator is {}x{}, expected square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidKraus("operator has non-finite entries".into()));
        }
        let rank = gram_rank(&matrix);
        Ok(Self { matrix, rank })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `A†A`.
    pub fn gram(&self) -> ComplexMatrix {
        self.matrix.adjoint().matmul(&self.matrix)
    }
}

/// Rank of `M` from the eigenvalues of `M†M` with the shared tolerance.
fn gram_rank(m: &ComplexMatrix) -> usize {
    if m.max_abs() == 0.0 {
        return 0;
    }
    hermitian_eigen(&m.adjoint().matmul(m))
        .map(|e| e.rank(RANK_TOL))
        .unwrap_or(0)
}

/// Ensemble after a successful filter outcome.
#[derive(Debug, Clone)]
pub struct KrausOutcome {
    pub ensemble: Ensemble,
    /// `Σ_k p_k Tr(ρ_k A†A)`.
    pub success_probability: f64,
}

/// `ρ_i' = A ρ_i A† / Tr(ρ_i A†A)` and `p_i' ∝ p_i Tr(ρ_i A†A)`, renormalized.
pub fn apply_kraus(ens: &Ensemble, kraus: &KrausOperator) -> Result<KrausOutcome> {
    if kraus.dim() != ens.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Kraus operator is {}x{}, ensemble dimension is {}",
            kraus.dim(),
            kraus.dim(),
            ens.dim()
        )));
    }
    let a = kraus.matrix();
    let gram = kraus.gram();
    let overall = rho_left(ens).trace_product(&gram).re;
    if overall > 1.0 + KRAUS_NORM_TOL {
        return Err(Error::InvalidKraus(format!("Tr(ρ A†A) = {overall} exceeds 1")));
    }
    let mut states = Vec::with_capacity(ens.len());
    let mut weights = Vec::with_capacity(ens.len());
    for (label, state) in ens.states().iter().enumerate() {
        let weight = state.density().trace_product(&gram).re;
        if weight <= MIN_OUTCOME_PROBABILITY {
            return Err(Error::AnnihilatedState { label, weight });
        }
        let next = match state.ket() {
            Some(ket) => {
                let v = a.apply(ket);
                let n = weight.sqrt();
                State::pure(v.into_iter().map(|z| z / n).collect())?
            }
            None => State::mixed(a.matmul(state.density()).matmul(&a.adjoint()).scale(1.0 / weight).hermitian_part())?,
        };
        states.push(next);
        weights.push(ens.prior(label) * weight);
    }
    let total: f64 = weights.iter().sum();
    let priors = weights.iter().map(|w| w / total).collect();
    Ok(KrausOutcome {
        ensemble: Ensemble::new(states, priors)?,
        success_probability: total,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityRecord {
    pub label: usize,
    pub before: f64,
    pub after: f64,
    /// Rank of `A` restricted to the support of `ρ`.
    pub rank_on_support: usize,
    pub support_dim: usize,
    /// `A` is invertible on the support of `ρ`.
    pub full_rank: bool,
    /// `after ≤ before`, with equality when `full_rank`, both within [`MONOTONICITY_TOL`].
    pub holds: bool,
}

/// Confidence bound for label `j` before and after the filter `A`.
pub fn monotonicity_check(ens: &Ensemble, kraus: &KrausOperator, j: usize) -> Result<MonotonicityRecord> {
    let before = max_confidence(ens, j)?;
    let outcome = apply_kraus(ens, kraus)?;
    let after = max_confidence(&outcome.ensemble, j)?;
    let support = support_projector(&rho_left(ens), RANK_TOL)?;
    let support_dim = support.trace().re.round() as usize;
    let rank_on_support = gram_rank(&kraus.matrix().matmul(&support));
    let full_rank = rank_on_support == support_dim;
    let mut holds = after <= before + MONOTONICITY_TOL;
    if full_rank {
        holds &= (after - before).abs() <= MONOTONICITY_TOL;
    }
    Ok(MonotonicityRecord {
        label: j,
        before,
        after,
        rank_on_support,
        support_dim,
        full_rank,
        holds,
    })
}

/// The `√λ_min ρ^{-1/2}` filter for a PSD operator `ρ` of unit trace.
struct Filter {
    kraus: KrausOperator,
    lambda_min: f64,
    support_dim: usize,
    fail_effect: ComplexMatrix,
}

fn filter_for(rho: &ComplexMatrix) -> Result<Filter> {
    let eig = hermitian_eigen(rho)?;
    let support = eig.support_indices(RANK_TOL);
    let lambda_min = support
        .iter()
        .map(|&k| eig.eigenvalues[k])
        .fold(f64::INFINITY, f64::min);
    if support.is_empty() {
        return Err(Error::NoSupport);
    }
    // A = √(p_succ/D) ρ^{-1/2} with p_succ = λ_min D
    let a = eig.spectral_sum(&support, |g| (lambda_min / g).sqrt());
    let kraus = KrausOperator::new(a)?;
    let fail_effect = (&ComplexMatrix::identity(rho.rows()) - &kraus.gram()).hermitian_part();
    Ok(Filter {
        kraus,
        lambda_min,
        support_dim: support.len(),
        fail_effect,
    })
}

/// First step of the two-step picture of a maximum-confidence measurement.
#[derive(Debug, Clone)]
pub struct FilterResult {
    pub kraus: KrausOperator,
    /// `λ_min · D`.
    pub success_probability: f64,
    pub lambda_min: f64,
    /// `D`, the rank of `ρ`.
    pub support_dim: usize,
    /// `I − A†A`; includes the orthocomplement of the support.
    pub fail_effect: ComplexMatrix,
    /// States `ρ^{-1/2} ρ_i ρ^{-1/2}` normalized, with renormalized priors.
    pub transformed: Ensemble,
    /// For pure-state ensembles: whether the projectors onto the transformed
    /// states resolve the identity on the support, so the second step is a
    /// plain projective measurement. `None` when some state is mixed.
    pub projective_second_step: Option<bool>,
}

pub fn two_step_filter(ens: &Ensemble) -> Result<FilterResult> {
    let rho = rho_left(ens);
    let filter = filter_for(&rho)?;
    let outcome = apply_kraus(ens, &filter.kraus)?;
    let projective_second_step = if ens.all_pure() {
        let support = support_projector(&rho, RANK_TOL)?;
        let mut sum = ComplexMatrix::zeros(ens.dim(), ens.dim());
        for s in outcome.ensemble.states() {
            sum += s.density();
        }
        Some((&sum - &support).frobenius_norm() <= MONOTONICITY_TOL)
    } else {
        None
    };
    Ok(FilterResult {
        kraus: filter.kraus,
        success_probability: filter.lambda_min * filter.support_dim as f64,
        lambda_min: filter.lambda_min,
        support_dim: filter.support_dim,
        fail_effect: filter.fail_effect,
        transformed: outcome.ensemble,
        projective_second_step,
    })
}

#[derive(Debug, Clone)]
pub struct ConcentrationResult {
    pub kraus: KrausOperator,
    /// `‖(A ⊗ I)|Ψ⟩‖²`, equal to `λ_min · D`.
    pub success_probability: f64,
    pub lambda_min: f64,
    pub schmidt_rank: usize,
    pub fail_effect: ComplexMatrix,
    pub post_state: BipartiteState,
}

/// Filters the left half so the post-selected state is maximally entangled on the Schmidt support.
pub fn concentrate(bs: &BipartiteState) -> Result<ConcentrationResult> {
    let filter = filter_for(&bs.left_marginal())?;
    if filter.support_dim < 2 {
        return Err(Error::ProductState);
    }
    let (post_state, success_probability) = bs.apply_left(filter.kraus.matrix())?;
    Ok(ConcentrationResult {
        kraus: filter.kraus,
        success_probability,
        lambda_min: filter.lambda_min,
        schmidt_rank: filter.support_dim,
        fail_effect: filter.fail_effect,
        post_state,
    })
}
