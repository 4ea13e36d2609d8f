//! Discrimination problems and their bipartite purifications.
//!
//! An [`Ensemble`] lists states with priors. [`purify`] turns it into a
//! [`BipartiteState`] whose right-system basis labels the preparation; the
//! right system is then confined to the span of its Schmidt vectors, which
//! [`allowed_subspace`] returns as a projector.

use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eigen, partial_trace_left, psd_eigen, support_inv_sqrt, svd, vector_norm, Complex, ComplexMatrix,
    RANK_TOL,
};

const PRIOR_SUM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;
const CONSISTENCY_TOL: f64 = 1e-8;

/// One density operator of an ensemble.
///
/// Pure states remember the ket they were built from so purification can
/// place it verbatim instead of an eigenvector with arbitrary phase.
#[derive(Debug, Clone)]
pub struct State {
    density: ComplexMatrix,
    ket: Option<Vec<Complex>>,
    rank: usize,
}

impl State {
    /// Pure state from a unit ket.
    pub fn pure(ket: Vec<Complex>) -> Result<Self> {
        if ket.is_empty() {
            return Err(Error::InvalidEnsemble("empty ket".into()));
        }
        if ket.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidEnsemble("ket has non-finite entries".into()));
        }
        let norm = vector_norm(&ket);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidEnsemble(format!("ket norm is {norm}, expected 1")));
        }
        Ok(Self {
            density: ComplexMatrix::projector(&ket),
            ket: Some(ket),
            rank: 1,
        })
    }

    /// General density operator: Hermitian, PSD, unit trace.
    pub fn mixed(density: ComplexMatrix) -> Result<Self> {
        if !density.is_finite() {
            return Err(Error::InvalidEnsemble("density matrix has non-finite entries".into()));
        }
        let eig = psd_eigen(&density)?;
        let tr = density.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidEnsemble(format!("density matrix trace is {tr}, expected 1")));
        }
        Ok(Self {
            density,
            ket: None,
            rank: eig.rank(RANK_TOL),
        })
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.density
    }

    pub fn ket(&self) -> Option<&[Complex]> {
        self.ket.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_pure(&self) -> bool {
        self.rank == 1
    }

    pub fn dim(&self) -> usize {
        self.density.rows()
    }
}

/// States `ρ_i` with strictly positive priors `p_i` summing to one.
#[derive(Debug, Clone)]
pub struct Ensemble {
    dim: usize,
    states: Vec<State>,
    priors: Vec<f64>,
}

impl Ensemble {
    pub fn new(states: Vec<State>, priors: Vec<f64>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidEnsemble("no states".into()));
        }
        if states.len() != priors.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} states but {} priors",
                states.len(),
                priors.len()
            )));
        }
        let dim = states[0].dim();
        if let Some((i, s)) = states.iter().enumerate().find(|(_, s)| s.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "state {i} has dimension {}, expected {dim}",
                s.dim()
            )));
        }
        if let Some((i, p)) = priors.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidEnsemble(format!("prior {i} is {p}; priors must be positive")));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidEnsemble(format!("priors sum to {total}")));
        }
        Ok(Self { dim, states, priors })
    }

    /// Convenience constructor for an ensemble of pure states.
    pub fn from_kets(kets: Vec<Vec<Complex>>, priors: Vec<f64>) -> Result<Self> {
        let states = kets.into_iter().map(State::pure).collect::<Result<_>>()?;
        Self::new(states, priors)
    }

    pub fn from_densities(densities: Vec<ComplexMatrix>, priors: Vec<f64>) -> Result<Self> {
        let states = densities.into_iter().map(State::mixed).collect::<Result<_>>()?;
        Self::new(states, priors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, j: usize) -> Result<&State> {
        self.states.get(j).ok_or(Error::LabelOutOfRange {
            label: j,
            count: self.states.len(),
        })
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn prior(&self, j: usize) -> f64 {
        self.priors[j]
    }

    pub fn all_pure(&self) -> bool {
        self.states.iter().all(State::is_pure)
    }
}

/// `ρ = Σ_i p_i ρ_i`, the reduced operator of the left system.
pub fn rho_left(ens: &Ensemble) -> ComplexMatrix {
    ens.states
        .iter()
        .zip(&ens.priors)
        .map(|(s, &p)| s.density.scale(p))
        .sum()
}

/// Pure bipartite state `|Ψ⟩ = Σ_{a,i} Ψ_{ai} |a⟩_L |i⟩_R` together with the
/// index sets assigning right-basis labels to ensemble labels.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    amplitudes: ComplexMatrix,
    index_sets: Vec<Vec<usize>>,
}

impl BipartiteState {
    pub fn new(amplitudes: ComplexMatrix, index_sets: Vec<Vec<usize>>) -> Result<Self> {
        let dim_right = amplitudes.cols();
        if amplitudes.rows() == 0 || dim_right == 0 {
            return Err(Error::InvalidBipartite("empty amplitude matrix".into()));
        }
        let norm2: f64 = amplitudes.entries().iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidBipartite(format!("squared norm is {norm2}, expected 1")));
        }
        let mut seen = vec![false; dim_right];
        for (j, set) in index_sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidBipartite(format!("index set {j} is empty")));
            }
            for &i in set {
                if i >= dim_right {
                    return Err(Error::InvalidBipartite(format!(
                        "index set {j} refers to column {i} of {dim_right}"
                    )));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidBipartite(format!("column {i} is claimed twice")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidBipartite(format!("column {i} belongs to no index set")));
        }
        Ok(Self {
            amplitudes,
            index_sets,
        })
    }

    /// Bipartite state with one index set per right-basis column.
    pub fn with_singleton_sets(amplitudes: ComplexMatrix) -> Result<Self> {
        let sets = (0..amplitudes.cols()).map(|i| vec![i]).collect();
        Self::new(amplitudes, sets)
    }

    pub fn dim_left(&self) -> usize {
        self.amplitudes.rows()
    }

    pub fn dim_right(&self) -> usize {
        self.amplitudes.cols()
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amplitudes
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.index_sets
    }

    pub fn index_set(&self, j: usize) -> Result<&[usize]> {
        self.index_sets
            .get(j)
            .map(Vec::as_slice)
            .ok_or(Error::LabelOutOfRange {
                label: j,
                count: self.index_sets.len(),
            })
    }

    /// Joint amplitude vector in the composite basis (`a·dim_right + i`).
    pub fn joint_vector(&self) -> Vec<Complex> {
        self.amplitudes.entries().to_vec()
    }

    /// `|Ψ⟩⟨Ψ|` on the composite space.
    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::projector(self.amplitudes.entries())
    }

    /// `Tr_R |Ψ⟩⟨Ψ| = Ψ Ψ†`.
    pub fn left_marginal(&self) -> ComplexMatrix {
        self.amplitudes.matmul(&self.amplitudes.adjoint())
    }

    /// `Tr_L |Ψ⟩⟨Ψ|`.
    pub fn right_marginal(&self) -> ComplexMatrix {
        partial_trace_left(&self.density(), self.dim_left(), self.dim_right())
            .expect("density has composite dimensions")
    }

    /// Applies `A ⊗ I` and renormalizes; returns the new state and `‖(A⊗I)|Ψ⟩‖²`.
    pub fn apply_left(&self, a: &ComplexMatrix) -> Result<(Self, f64)> {
        if a.cols() != self.dim_left() {
            return Err(Error::DimensionMismatch(format!(
                "operator with {} columns on a {}-dimensional left system",
                a.cols(),
                self.dim_left()
            )));
        }
        let out = a.matmul(&self.amplitudes);
        let weight: f64 = out.entries().iter().map(|z| z.norm_sqr()).sum();
        if weight <= 1e-14 {
            return Err(Error::ZeroProbability { probability: weight });
        }
        let out = out.scale(1.0 / weight.sqrt());
        Ok((Self::new(out, self.index_sets.clone())?, weight))
    }
}

/// Builds the purification of an ensemble.
///
/// Pure states occupy one column `√p_j |ψ_j⟩`. A mixed state occupies one
/// column `√β_i |β_i⟩` per nonzero eigenpair of `p_j ρ_j`. Columns are assigned
/// in ensemble order as contiguous blocks.
pub fn purify(ens: &Ensemble) -> BipartiteState {
    let mut columns: Vec<Vec<Complex>> = Vec::new();
    let mut index_sets = Vec::with_capacity(ens.len());
    for (state, &p) in ens.states.iter().zip(&ens.priors) {
        let start = columns.len();
        if let Some(ket) = state.ket() {
            let w = p.sqrt();
            columns.push(ket.iter().map(|z| z * w).collect());
        } else {
            let eig = hermitian_eigen(&state.density.scale(p)).expect("validated density operator");
            for k in eig.support_indices(RANK_TOL) {
                let w = eig.eigenvalues[k].sqrt();
                columns.push(eig.eigenvectors[k].iter().map(|z| z * w).collect());
            }
        }
        index_sets.push((start..columns.len()).collect());
    }
    let mut amplitudes = ComplexMatrix::zeros(ens.dim, columns.len());
    for (i, col) in columns.iter().enumerate() {
        amplitudes.set_column(i, col);
    }
    // The eigen-route columns carry norms accurate to ~1e-16; fold any residual
    // into a final rescale so the state is normalized to machine precision.
    let norm2: f64 = amplitudes.entries().iter().map(|z| z.norm_sqr()).sum();
    let amplitudes = amplitudes.scale(1.0 / norm2.sqrt());
    BipartiteState::new(amplitudes, index_sets).expect("purification of a valid ensemble")
}

/// Schmidt coefficients `λ_i` with matching left and right vectors.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<Vec<Complex>>,
    pub right_vectors: Vec<Vec<Complex>>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `Σ_i √λ_i |λ_i⟩_L (|λ_i⟩_R)^T` as a `dim_left × dim_right` amplitude matrix.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dl = self.left_vectors.first().map_or(0, Vec::len);
        let dr = self.right_vectors.first().map_or(0, Vec::len);
        let mut m = ComplexMatrix::zeros(dl, dr);
        for ((lam, l), rv) in self.coefficients.iter().zip(&self.left_vectors).zip(&self.right_vectors) {
            let s = lam.sqrt();
            for a in 0..dl {
                for i in 0..dr {
                    m[(a, i)] += l[a] * rv[i] * s;
                }
            }
        }
        m
    }
}

/// Schmidt decomposition from the singular values of the amplitude matrix.
pub fn schmidt(bs: &BipartiteState) -> SchmidtDecomposition {
    let (u, s, v) = svd(&bs.amplitudes);
    let top = s.first().map_or(0.0, |x| x * x);
    let mut out = SchmidtDecomposition {
        coefficients: Vec::new(),
        left_vectors: Vec::new(),
        right_vectors: Vec::new(),
    };
    for k in 0..s.len() {
        let lam = s[k] * s[k];
        if lam > RANK_TOL * top {
            out.coefficients.push(lam);
            out.left_vectors.push(u[k].clone());
            // Ψ = Σ s u v†, so the right Schmidt ket has amplitudes conj(v).
            out.right_vectors.push(v[k].iter().map(|z| z.conj()).collect());
        }
    }
    out
}

/// Orthogonal projector onto the allowed subspace of the right system.
#[derive(Debug, Clone)]
pub struct SubspaceProjector {
    matrix: ComplexMatrix,
    rank: usize,
}

impl SubspaceProjector {
    /// Projector `Σ_i |λ_i⟩_R⟨λ_i|` built from the right Schmidt vectors.
    pub fn from_schmidt(sd: &SchmidtDecomposition) -> Self {
        let dr = sd.right_vectors.first().map_or(0, Vec::len);
        let mut matrix = ComplexMatrix::zeros(dr, dr);
        for v in &sd.right_vectors {
            matrix += &ComplexMatrix::projector(v);
        }
        Self {
            matrix,
            rank: sd.rank(),
        }
    }

    pub fn from_matrix(matrix: ComplexMatrix, rank: usize) -> Self {
        Self { matrix, rank }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `I − P_D`, the projector onto the directions the right system may never occupy.
    pub fn complement(&self) -> ComplexMatrix {
        &ComplexMatrix::identity(self.dim()) - &self.matrix
    }

    pub fn idempotency_defect(&self) -> f64 {
        (&self.matrix.matmul(&self.matrix) - &self.matrix).frobenius_norm()
    }
}

/// `P_D = Tr_L(ρ_L^{-1/2} |Ψ⟩⟨Ψ| ρ_L^{-1/2})` with the support-restricted inverse square root.
pub fn allowed_subspace(bs: &BipartiteState, rho_l: &ComplexMatrix) -> Result<SubspaceProjector> {
    let (dl, dr) = (bs.dim_left(), bs.dim_right());
    if rho_l.rows() != dl || rho_l.cols() != dl {
        return Err(Error::DimensionMismatch(format!(
            "reduced operator is {}x{}, left system has dimension {dl}",
            rho_l.rows(),
            rho_l.cols()
        )));
    }
    let deviation = (rho_l - &bs.left_marginal()).frobenius_norm();
    if deviation > CONSISTENCY_TOL {
        return Err(Error::InconsistentMarginal { deviation });
    }
    let inv_sqrt = support_inv_sqrt(rho_l, RANK_TOL)?;
    let rank = hermitian_eigen(rho_l)?.rank(RANK_TOL);
    let filter = inv_sqrt.kron(&ComplexMatrix::identity(dr));
    let joint = bs.density();
    let filtered = filter.matmul(&joint).matmul(&filter);
    let matrix = partial_trace_left(&filtered, dl, dr)?.hermitian_part();
    Ok(SubspaceProjector { matrix, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{c, r};
    use std::f64::consts::FRAC_1_SQRT_2;

    /// The mixed/pure qubit pair: ρ_0 = q|0⟩⟨0| + (1−q)|1⟩⟨1|, ρ_1 = |+⟩⟨+|.
    fn worked(p: f64, q: f64) -> Ensemble {
        let states = vec![
            State::mixed(ComplexMatrix::diag(&[q, 1.0 - q])).unwrap(),
            State::pure(vec![r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)]).unwrap(),
        ];
        Ensemble::new(states, vec![p, 1.0 - p]).unwrap()
    }

    fn trine() -> Ensemble {
        let kets = (0..3)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                vec![r((t / 2.0).cos()), r((t / 2.0).sin())]
            })
            .collect();
        Ensemble::from_kets(kets, vec![1.0 / 3.0; 3]).unwrap()
    }

    #[test]
    fn rejects_bad_priors_and_states() {
        let k = vec![r(1.0), r(0.0)];
        assert!(Ensemble::from_kets(vec![k.clone(), k.clone()], vec![0.6, 0.5]).is_err());
        assert!(Ensemble::from_kets(vec![k.clone(), k.clone()], vec![1.0, 0.0]).is_err());
        assert!(State::pure(vec![r(1.0), r(1.0)]).is_err());
        assert!(matches!(
            State::mixed(ComplexMatrix::diag(&[1.5, -0.5])),
            Err(Error::NotPositive { .. })
        ));
        assert!(State::mixed(ComplexMatrix::diag(&[0.5, 0.4])).is_err());
        let mixed_dims = vec![
            State::pure(k).unwrap(),
            State::pure(vec![r(1.0), r(0.0), r(0.0)]).unwrap(),
        ];
        assert!(matches!(
            Ensemble::new(mixed_dims, vec![0.5, 0.5]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn purify_single_state() {
        let ens = Ensemble::from_kets(vec![vec![r(1.0), r(0.0)]], vec![1.0]).unwrap();
        let bs = purify(&ens);
        assert_eq!(bs.dim_right(), 1);
        assert_eq!(bs.amplitudes().column(0), vec![r(1.0), r(0.0)]);
        assert_eq!(bs.index_sets(), &[vec![0]]);
    }

    #[test]
    fn purify_two_pure_states() {
        let s = FRAC_1_SQRT_2;
        let ens = Ensemble::from_kets(vec![vec![r(1.0), r(0.0)], vec![r(s), r(s)]], vec![0.5, 0.5]).unwrap();
        let bs = purify(&ens);
        let col0 = bs.amplitudes().column(0);
        let col1 = bs.amplitudes().column(1);
        assert!((col0[0] - r(s)).norm() < 1e-15 && col0[1].norm() < 1e-15);
        assert!((col1[0] - r(0.5)).norm() < 1e-15 && (col1[1] - r(0.5)).norm() < 1e-15);
    }

    #[test]
    fn purify_worked_example_structure() {
        let (p, q) = (0.3, 0.8);
        let bs = purify(&worked(p, q));
        assert_eq!(bs.index_sets(), &[vec![0, 1], vec![2]]);
        let a = bs.amplitudes();
        // descending eigen order of p·diag(q, 1−q) with q > ½ matches the natural basis order
        assert!((a[(0, 0)].norm() - (p * q).sqrt()).abs() < 1e-14);
        assert!(a[(1, 0)].norm() < 1e-14);
        assert!((a[(1, 1)].norm() - (p * (1.0 - q)).sqrt()).abs() < 1e-14);
        assert!(a[(0, 1)].norm() < 1e-14);
        let w = ((1.0 - p) / 2.0).sqrt();
        assert!((a[(0, 2)] - r(w)).norm() < 1e-14 && (a[(1, 2)] - r(w)).norm() < 1e-14);
    }

    #[test]
    fn purification_reconstructs_weighted_states() {
        let ens = worked(0.4, 0.3);
        let bs = purify(&ens);
        for (j, set) in bs.index_sets().iter().enumerate() {
            let mut acc = ComplexMatrix::zeros(2, 2);
            for &i in set {
                acc += &ComplexMatrix::projector(&bs.amplitudes().column(i));
            }
            let target = ens.states()[j].density().scale(ens.prior(j));
            assert!((&acc - &target).frobenius_norm() < 1e-10);
        }
        let marginal = crate::matcore::partial_trace_right(&bs.density(), 2, 3).unwrap();
        assert!((&marginal - &rho_left(&ens)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn rho_left_trine_is_maximally_mixed() {
        // Σ_k ⅓ |ψ_k⟩⟨ψ_k| over three kets at 120° on the Bloch circle
        let rho = rho_left(&trine());
        assert!((&rho - &ComplexMatrix::identity(2).scale(0.5)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn rho_left_worked_example_half_half() {
        // ½·diag(½,½) + ½·½[[1,1],[1,1]] = [[½, ¼], [¼, ½]]
        let rho = rho_left(&worked(0.5, 0.5));
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.25], &[0.25, 0.5]]).unwrap();
        assert!((&rho - &expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn rho_left_single_state() {
        let d = ComplexMatrix::from_rows(&[vec![r(0.7), c(0.1, 0.2)], vec![c(0.1, -0.2), r(0.3)]]).unwrap();
        let ens = Ensemble::from_densities(vec![d.clone()], vec![1.0]).unwrap();
        assert!((&rho_left(&ens) - &d).frobenius_norm() < 1e-15);
    }

    #[test]
    fn schmidt_bell_and_product() {
        let bell = ComplexMatrix::identity(2).scale(FRAC_1_SQRT_2);
        let sd = schmidt(&BipartiteState::with_singleton_sets(bell.clone()).unwrap());
        assert_eq!(sd.rank(), 2);
        for lam in &sd.coefficients {
            assert!((lam - 0.5).abs() < 1e-14);
        }
        assert!((&sd.reconstruct() - &bell).frobenius_norm() < 1e-12);

        let product = ComplexMatrix::outer(&[r(0.6), c(0.0, 0.8)], &[r(1.0), r(0.0), r(0.0)]);
        let sd = schmidt(&BipartiteState::with_singleton_sets(product).unwrap());
        assert_eq!(sd.coefficients.len(), 1);
        assert!((sd.coefficients[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn schmidt_matches_rho_left_spectrum() {
        let ens = worked(0.5, 0.5);
        let sd = schmidt(&purify(&ens));
        let spectrum = hermitian_eigen(&rho_left(&ens)).unwrap();
        assert_eq!(sd.rank(), 2);
        for (lam, g) in sd.coefficients.iter().zip(&spectrum.eigenvalues) {
            assert!((lam - g).abs() < 1e-10);
        }
        // [[½,¼],[¼,½]] has eigenvalues ¾ and ¼
        assert!((sd.coefficients[0] - 0.75).abs() < 1e-12);
        assert!((sd.coefficients[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn allowed_subspace_bell_and_product() {
        let bell = BipartiteState::with_singleton_sets(ComplexMatrix::identity(2).scale(FRAC_1_SQRT_2)).unwrap();
        let pd = allowed_subspace(&bell, &bell.left_marginal()).unwrap();
        assert_eq!(pd.rank(), 2);
        assert!((pd.matrix() - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-12);

        let ens = Ensemble::from_kets(vec![vec![r(1.0), r(0.0)]], vec![1.0]).unwrap();
        let bs = purify(&ens);
        let pd = allowed_subspace(&bs, &rho_left(&ens)).unwrap();
        assert_eq!(pd.rank(), 1);
        assert!((pd.matrix() - &ComplexMatrix::diag(&[1.0])).frobenius_norm() < 1e-12);
    }

    #[test]
    fn allowed_subspace_worked_example_complement() {
        // block-basis purification, built by hand
        for &(p, q) in &[(0.5f64, 0.5f64), (0.2, 0.7), (0.8, 0.1)] {
            let s = FRAC_1_SQRT_2;
            let w = (1.0 - p).sqrt() * s;
            let amps = ComplexMatrix::from_real_rows(&[
                &[(p * q).sqrt(), 0.0, w],
                &[0.0, (p * (1.0 - q)).sqrt(), w],
            ])
            .unwrap();
            let bs = BipartiteState::new(amps, vec![vec![0, 1], vec![2]]).unwrap();
            let pd = allowed_subspace(&bs, &bs.left_marginal()).unwrap();
            let k = (1.0 - p + 2.0 * p * q * (1.0 - q)).powf(-0.5);
            let perp = [
                r(k * ((1.0 - p) * (1.0 - q)).sqrt()),
                r(k * ((1.0 - p) * q).sqrt()),
                r(-k * (2.0 * p * q * (1.0 - q)).sqrt()),
            ];
            let expected = &ComplexMatrix::identity(3) - &ComplexMatrix::projector(&perp);
            assert_eq!(pd.rank(), 2);
            assert!((pd.matrix() - &expected).frobenius_norm() < 1e-10, "p={p} q={q}");
        }
    }

    #[test]
    fn allowed_subspace_rejects_inconsistent_marginal() {
        let ens = worked(0.5, 0.5);
        let bs = purify(&ens);
        let wrong = ComplexMatrix::identity(2).scale(0.5);
        assert!(matches!(
            allowed_subspace(&bs, &wrong),
            Err(Error::InconsistentMarginal { .. })
        ));
    }

    #[test]
    fn bipartite_validation() {
        let amps = ComplexMatrix::identity(2).scale(FRAC_1_SQRT_2);
        assert!(BipartiteState::new(amps.clone(), vec![vec![0]]).is_err());
        assert!(BipartiteState::new(amps.clone(), vec![vec![0, 1], vec![1]]).is_err());
        assert!(BipartiteState::new(amps.scale(2.0), vec![vec![0], vec![1]]).is_err());
        assert!(BipartiteState::new(amps, vec![vec![1], vec![0]]).is_ok());
    }
}
