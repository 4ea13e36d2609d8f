//! The bipartite picture: a measurement on the left half of a purification
//! steers the right half to a conditional state that can never leave the
//! allowed subspace, and whose overlap with the preparation labels is the
//! confidence.

use crate::ensemble::{BipartiteState, SubspaceProjector};
use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigen, partial_trace_left, ComplexMatrix};
use crate::maxconf::{Pom, MIN_OUTCOME_PROBABILITY};

/// Right-system state conditioned on a left outcome.
#[derive(Debug, Clone)]
pub struct ConditionalRightState {
    pub state: ComplexMatrix,
    pub probability: f64,
}

/// `Tr_L(|Ψ⟩⟨Ψ| (Π ⊗ I))`, the unnormalized conditional right state.
fn steered(bs: &BipartiteState, effect: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (dl, dr) = (bs.dim_left(), bs.dim_right());
    if effect.rows() != dl || effect.cols() != dl {
        return Err(Error::DimensionMismatch(format!(
            "effect is {}x{}, left system has dimension {dl}",
            effect.rows(),
            effect.cols()
        )));
    }
    let lifted = effect.kron(&ComplexMatrix::identity(dr));
    let joint = bs.density().matmul(&lifted);
    Ok(partial_trace_left(&joint, dl, dr)?.hermitian_part())
}

/// `ρ_{R|j} = Tr_L(|Ψ⟩⟨Ψ|(Π⊗I)) / P(ω)` with `P(ω) = ⟨Ψ|(Π⊗I)|Ψ⟩`.
pub fn conditional_right_state(bs: &BipartiteState, effect: &ComplexMatrix) -> Result<ConditionalRightState> {
    let unnormalized = steered(bs, effect)?;
    let probability = unnormalized.trace().re;
    if probability <= MIN_OUTCOME_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    Ok(ConditionalRightState {
        state: unnormalized.scale(1.0 / probability),
        probability,
    })
}

/// Probability that the right system is found in the block `σ(j)` after the left outcome.
pub fn confidence_bipartite(bs: &BipartiteState, effect: &ComplexMatrix, j: usize) -> Result<f64> {
    let set = bs.index_set(j)?;
    let cond = conditional_right_state(bs, effect)?;
    Ok(set.iter().map(|&i| cond.state[(i, i)].re).sum())
}

/// Subspace-overlap form of the bound.
///
/// A singleton block `{i}` gives `⟨i|P_D|i⟩`; a larger block gives the largest
/// eigenvalue of `P_D Π_σ P_D`.
pub fn bound_bipartite(bs: &BipartiteState, pd: &SubspaceProjector, j: usize) -> Result<f64> {
    let set = bs.index_set(j)?;
    let p = pd.matrix();
    if p.rows() != bs.dim_right() {
        return Err(Error::DimensionMismatch(format!(
            "projector acts on {} dimensions, right system has {}",
            p.rows(),
            bs.dim_right()
        )));
    }
    if let [i] = set {
        return Ok(p[(*i, *i)].re);
    }
    let mut block = ComplexMatrix::zeros(p.rows(), p.cols());
    for &i in set {
        block[(i, i)] = crate::matcore::r(1.0);
    }
    let sandwiched = p.matmul(&block).matmul(p);
    Ok(hermitian_eigen(&sandwiched)?.max_eigenvalue())
}

/// `Tr((I − P_D) ρ (I − P_D))` for an arbitrary right-system operator.
pub fn leakage_of(pd: &SubspaceProjector, right_state: &ComplexMatrix) -> f64 {
    let q = pd.complement();
    q.matmul(right_state).matmul(&q).trace().re
}

/// Weight of the conditional right state outside the allowed subspace.
pub fn subspace_leakage(bs: &BipartiteState, pd: &SubspaceProjector, effect: &ComplexMatrix) -> Result<f64> {
    let cond = conditional_right_state(bs, effect)?;
    Ok(leakage_of(pd, &cond.state))
}

/// `‖Σ_j P(ω_j) ρ_{R|j} − Tr_L|Ψ⟩⟨Ψ|‖_F` over every element of `pom`, fail included.
///
/// Vanishes for complete measurements; for incomplete ones the deviation is
/// the missing part of the right marginal.
pub fn marginal_invariance(bs: &BipartiteState, pom: &Pom) -> Result<f64> {
    let dr = bs.dim_right();
    let mut acc = ComplexMatrix::zeros(dr, dr);
    for m in pom.effects.iter().map(|e| &e.matrix).chain(pom.fail.as_ref()) {
        acc += &steered(bs, m)?;
    }
    Ok((&acc - &bs.right_marginal()).frobenius_norm())
}
