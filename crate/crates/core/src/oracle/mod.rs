//! Self-contained binary64 spectral reference used to cross-validate the
//! exact layer: cyclic Jacobi for symmetric matrices, eigenvalue clustering,
//! principal angles, curve extrapolation, and polynomial roots.

mod angles;
mod extrapolate;
mod jacobi;
mod roots;

pub use angles::{optimal_matching, principal_angles, procrustes_align, subspace_distance};
pub use extrapolate::{extrapolate_along_curve, ExtrapolationConfig, LimitBases};
pub use jacobi::{eigh_jacobi, hermitian_embedding, singular_values};
pub use roots::polynomial_roots;

use thiserror::Error;

/// Dense row-major matrix.
pub type Matrix = Vec<Vec<f64>>;

/// An orthonormal basis stored as a list of vectors.
pub type Basis = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("matrix is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("empty basis")]
    EmptyBasis,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("extrapolation failed: {0}")]
    Extrapolation(String),
}

/// One eigenvalue cluster: representative value, multiplicity and an
/// orthonormal basis of the corresponding invariant subspace.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
    pub basis: Basis,
}

/// Eigendecomposition of a symmetric matrix at a sample point.
#[derive(Clone, Debug)]
pub struct SpectralSample {
    pub point: Vec<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` pairs with `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Spectral norm of the input.
    pub norm: f64,
    /// max ‖Mq − λq‖.
    pub residual: f64,
    pub clusters: Vec<Cluster>,
}

impl SpectralSample {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }
}

/// Greedy gap clustering: adjacent eigenvalues closer than
/// `tau · (1 + ‖M‖)` are merged.
pub fn cluster_and_multiplicities(sample: &mut SpectralSample, tau: f64) {
    let tol = tau * (1.0 + sample.norm);
    cluster_with_tolerance(sample, tol);
}

pub(crate) fn cluster_with_tolerance(sample: &mut SpectralSample, tol: f64) {
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (k, &lam) in sample.eigenvalues.iter().enumerate() {
        let merge = k > 0 && (lam - sample.eigenvalues[k - 1]).abs() <= tol;
        if merge {
            members.last_mut().expect("nonempty").push(k);
        } else {
            members.push(vec![k]);
        }
    }
    for idx in members {
        let value = idx.iter().map(|&k| sample.eigenvalues[k]).sum::<f64>() / idx.len() as f64;
        let vecs: Vec<Vec<f64>> = idx.iter().map(|&k| sample.eigenvectors[k].clone()).collect();
        let basis = orthonormalize(&vecs, 1e-10);
        clusters.push(Cluster { value, multiplicity: idx.len(), basis });
    }
    sample.clusters = clusters;
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn mat_vec(m: &Matrix, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn frobenius(m: &Matrix) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Modified Gram–Schmidt applied twice; vectors whose residual norm falls
/// below `drop_tol` (relative to their original norm) are discarded.
pub fn orthonormalize(vectors: &[Vec<f64>], drop_tol: f64) -> Basis {
    let mut out: Basis = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let n = norm(&w);
        if n > drop_tol * n0 {
            out.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Gram matrix deviation ‖BᵀB − I‖_F.
pub fn gram_deviation(basis: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let g = dot(a, b) - if i == j { 1.0 } else { 0.0 };
            s += g * g;
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_of(m: &Matrix) -> SpectralSample {
        eigh_jacobi(m, &[]).unwrap()
    }

    #[test]
    fn clusters_split_on_gap() {
        let mut s = sample_of(&vec![vec![0.0, 0.0], vec![0.0, 5.0]]);
        cluster_and_multiplicities(&mut s, 1e-6);
        assert_eq!(s.multiplicities(), vec![1, 1]);
    }

    #[test]
    fn triple_eigenvalue_is_one_cluster() {
        let m = vec![vec![3.0, 0.0, 0.0], vec![0.0, 3.0, 0.0], vec![0.0, 0.0, 3.0]];
        let mut s = sample_of(&m);
        cluster_and_multiplicities(&mut s, 1e-6);
        assert_eq!(s.multiplicities(), vec![3]);
        assert!(gram_deviation(&s.clusters[0].basis) < 1e-12);
    }

    #[test]
    fn near_degenerate_pair_merges() {
        let m = vec![vec![0.0, 0.0, 0.0], vec![0.0, 1e-9, 0.0], vec![0.0, 0.0, 5.0]];
        let mut s = sample_of(&m);
        cluster_and_multiplicities(&mut s, 1e-6);
        assert_eq!(s.multiplicities(), vec![2, 1]);
        assert!(s.clusters[0].value.abs() < 1e-8);
        assert!((s.clusters[1].value - 5.0).abs() < 1e-12);
    }
}
