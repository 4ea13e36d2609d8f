//! Seeded random instances for property suites.
//!
//! All generators take an explicit RNG; the `*_suite` helpers derive one
//! `ChaCha8Rng` per instance from `(seed, index)` so any single instance can be
//! regenerated in isolation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ensemble::{BipartiteState, Ensemble, State};
use crate::error::Result;
use crate::locc::KrausOperator;
use crate::matcore::{gram_schmidt, support_inv_sqrt, vector_norm, Complex, ComplexMatrix, RANK_TOL};
use crate::maxconf::{Effect, Pom};

/// RNG for instance `index` of a suite seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im)
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_ket<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex> {
    let v: Vec<Complex> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = vector_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Haar-distributed unitary: Gram-Schmidt on the columns of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    loop {
        let g = ginibre(rng, dim, dim);
        let cols: Vec<Vec<Complex>> = (0..dim).map(|j| g.column(j)).collect();
        let basis = gram_schmidt(&cols, 1e-8);
        if basis.len() == dim {
            let mut u = ComplexMatrix::zeros(dim, dim);
            for (j, b) in basis.iter().enumerate() {
                u.set_column(j, b);
            }
            return u;
        }
    }
}

/// Density operator of the given rank, `G G† / Tr(G G†)` with `G` Ginibre `dim×rank`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim, rank);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m.scale(1.0 / tr).hermitian_part()
}

/// Ensemble on a `dim`-dimensional space whose purification uses exactly `columns` right-basis states.
///
/// The columns are split into states of random rank (rank 1 as an explicit ket),
/// priors are uniform on `[0.1, 1]` before normalization.
pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R, dim: usize, columns: usize) -> Ensemble {
    let mut remaining = columns;
    let mut states = Vec::new();
    while remaining > 0 {
        let rank = rng.random_range(1..=dim.min(remaining));
        remaining -= rank;
        let state = if rank == 1 {
            State::pure(random_ket(rng, dim))
        } else {
            State::mixed(random_density(rng, dim, rank))
        };
        states.push(state.expect("random state is valid"));
    }
    let raw: Vec<f64> = states.iter().map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let priors = raw.iter().map(|p| p / total).collect();
    Ensemble::new(states, priors).expect("random ensemble is valid")
}

/// `count` ensembles with `dim ∈ {2,3,4}` and `columns ∈ {2..6}`.
pub fn ensemble_suite(seed: u64, count: usize) -> Vec<Ensemble> {
    (0..count as u64)
        .map(|k| {
            let mut rng = instance_rng(seed, k);
            let dim = rng.random_range(2..=4);
            let columns = rng.random_range(2..=6);
            random_ensemble(&mut rng, dim, columns)
        })
        .collect()
}

/// PSD effect `G G† / ‖G‖_F²` with `G` Ginibre `dim×k`, `k` random in `1..=dim`.
pub fn random_effect<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let k = rng.random_range(1..=dim);
    let g = ginibre(rng, dim, k);
    let n2 = g.frobenius_norm().powi(2);
    g.matmul(&g.adjoint()).scale(1.0 / n2).hermitian_part()
}

/// Complete measurement from `outcomes` random effects, normalized as
/// `S^{-1/2} E_k S^{-1/2}` with `S = Σ E_k`; the last element becomes the fail effect.
pub fn random_complete_pom<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Pom {
    assert!(outcomes >= 2, "need at least one effect and a fail element");
    loop {
        let raw: Vec<ComplexMatrix> = (0..outcomes).map(|_| random_effect(rng, dim)).collect();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &raw {
            sum += e;
        }
        let Ok(s) = support_inv_sqrt(&sum, RANK_TOL) else {
            continue;
        };
        // a rank-deficient sum would leave part of the identity uncovered
        if (&s.matmul(&sum).matmul(&s) - &ComplexMatrix::identity(dim)).frobenius_norm() > 1e-9 {
            continue;
        }
        let mut normalized: Vec<ComplexMatrix> =
            raw.iter().map(|e| s.matmul(e).matmul(&s).hermitian_part()).collect();
        let fail = normalized.pop();
        let effects = normalized
            .into_iter()
            .enumerate()
            .map(|(label, matrix)| Effect { label, matrix })
            .collect();
        return Pom { effects, fail };
    }
}

/// `A = diag(c) · U` with `U` Haar, `c_k ∈ [0.2, 1]` for the first `rank` entries and
/// zero otherwise, scaled so that `Tr(ρ A†A) = 1`.
pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R, rho: &ComplexMatrix, rank: usize) -> KrausOperator {
    let dim = rho.rows();
    loop {
        let u = haar_unitary(rng, dim);
        let c: Vec<f64> = (0..dim)
            .map(|k| if k < rank { rng.random_range(0.2..1.0) } else { 0.0 })
            .collect();
        let a = ComplexMatrix::diag(&c).matmul(&u);
        let weight = rho.trace_product(&a.adjoint().matmul(&a)).re;
        if weight < 1e-6 {
            continue;
        }
        return KrausOperator::new(a.scale(1.0 / weight.sqrt())).expect("square Kraus operator");
    }
}

/// Bipartite state with `dim_left = schmidt_rank` and `dim_right` columns, each its own index set.
pub fn random_bipartite<R: Rng + ?Sized>(rng: &mut R, schmidt_rank: usize, dim_right: usize) -> Result<BipartiteState> {
    let g = ginibre(rng, schmidt_rank, dim_right);
    let n = g.frobenius_norm();
    BipartiteState::with_singleton_sets(g.scale(1.0 / n))
}
