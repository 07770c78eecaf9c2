//! Real normal families: the split `L = A + B`, the symmetric doubling
//! `B₂ = [[0, −B], [B, 0]]`, anti-real characteristic planes at points, and
//! seeded generators of random skew and normal families.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::algebra::univariate::{char_poly_constant, squarefree_factorization};
use crate::algebra::{Field, Polynomial, Scalar, VarUniverse};
use crate::family::{FamilyError, MatrixFamily, Structure};
use crate::oracle::{
    cluster_and_multiplicities, dot, eigh_jacobi, gram_deviation, mat_vec, norm, orthonormalize, polynomial_roots,
    Basis, Cluster, Matrix, OracleError,
};
use crate::sampling;
pub use crate::sampling::cayley_orthogonal;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealNormalError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("the split requires a real family, got field {0:?}")]
    NotReal(Field),
    #[error("plane checks need a nonzero eigenvalue")]
    ZeroEigenvalue,
}

#[derive(Clone, Debug)]
pub struct SplitFamily {
    pub l: MatrixFamily,
    pub a: MatrixFamily,
    pub b: MatrixFamily,
    pub b2: MatrixFamily,
}

/// `A = (L + Lᵀ)/2`, `B = (L − Lᵀ)/2` and the doubling of `B`.
pub fn split_and_double(l: &MatrixFamily) -> Result<SplitFamily, RealNormalError> {
    if l.is_complex() {
        return Err(RealNormalError::NotReal(l.field()));
    }
    let n = l.n();
    let u = l.universe();
    let half = Scalar::from_ratio(1, 2);
    let e = l.entries();
    let a: Vec<Vec<Polynomial>> =
        (0..n).map(|i| (0..n).map(|j| (&e[i][j] + &e[j][i]).scale(&half)).collect()).collect();
    let b: Vec<Vec<Polynomial>> =
        (0..n).map(|i| (0..n).map(|j| (&e[i][j] - &e[j][i]).scale(&half)).collect()).collect();
    let zero = Polynomial::zero(u);
    let b2: Vec<Vec<Polynomial>> = (0..2 * n)
        .map(|i| {
            (0..2 * n)
                .map(|j| match (i < n, j < n) {
                    (true, false) => -&b[i][j - n],
                    (false, true) => b[i - n][j].clone(),
                    _ => zero.clone(),
                })
                .collect()
        })
        .collect();
    let split = SplitFamily {
        l: l.clone(),
        a: MatrixFamily::new(a, Structure::Symmetric, Field::Rational)?,
        b: MatrixFamily::new(b, Structure::Skew, Field::Rational)?,
        b2: MatrixFamily::new(b2, Structure::Symmetric, Field::Rational)?,
    };
    Ok(split)
}

impl SplitFamily {
    /// `A + B = L` entrywise.
    pub fn sum_identity_holds(&self) -> bool {
        let n = self.l.n();
        (0..n).all(|i| (0..n).all(|j| &(self.a.entry(i, j) + self.b.entry(i, j)) == self.l.entry(i, j)))
    }

    /// `B₂(u ⊕ v) = (−Bv) ⊕ Bu`, checked on the symbolic vector `(U, V)`.
    pub fn doubling_identity_holds(&self) -> bool {
        let n = self.l.n();
        let params = self.l.universe();
        let fibers: Vec<String> = (0..2 * n).map(|k| format!("W{k}")).collect();
        let Ok(fu) = params.with_fibers(fibers) else { return false };
        let p = params.param_count();
        let w: Vec<Polynomial> = (0..2 * n).map(|k| Polynomial::var(&fu, p + k)).collect();
        let apply = |m: &MatrixFamily, v: &[Polynomial]| -> Vec<Polynomial> {
            (0..m.n())
                .map(|i| {
                    (0..m.n()).fold(Polynomial::zero(&fu), |acc, j| {
                        &acc + &(&m.entry(i, j).embed(&fu).expect("embeds") * &v[j])
                    })
                })
                .collect()
        };
        let lhs = apply(&self.b2, &w);
        let bu = apply(&self.b, &w[..n]);
        let bv = apply(&self.b, &w[n..]);
        (0..n).all(|i| lhs[i] == -&bv[i] && lhs[n + i] == bu[i])
    }
}

#[derive(Clone, Debug)]
pub struct RealEigenspace {
    pub basis: Basis,
    pub eigenvalue: f64,
}

/// Anti-real characteristic plane `span(u, v)` on which `L` acts as
/// `[[a, −b], [b, a]]`.
#[derive(Clone, Debug)]
pub struct Plane {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug)]
pub struct ArcpDecomposition {
    pub point: Vec<f64>,
    pub real: Vec<RealEigenspace>,
    pub planes: Vec<Plane>,
    /// max ‖Lw − proj_plane(Lw)‖ over plane vectors, relative to 1 + ‖L‖.
    pub invariance: f64,
    /// max deviation of the restricted matrix from the similitude form.
    pub similitude: f64,
    pub gram_deviation: f64,
    /// Oracle spectrum of `B₂` at the point, ascending.
    pub b2_spectrum: Vec<f64>,
}

impl ArcpDecomposition {
    /// `a` for each real eigenspace dimension, `a ± ib` per plane.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for r in &self.real {
            out.extend(std::iter::repeat_n(Complex64::new(r.eigenvalue, 0.0), r.basis.len()));
        }
        for p in &self.planes {
            out.push(Complex64::new(p.a, p.b));
            out.push(Complex64::new(p.a, -p.b));
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.real.iter().map(|r| r.basis.len()).sum::<usize>() + 2 * self.planes.len()
    }
}

fn restrict(m: &Matrix, basis: &Basis) -> Matrix {
    let images: Vec<Vec<f64>> = basis.iter().map(|q| mat_vec(m, q)).collect();
    basis.iter().map(|p| images.iter().map(|img| dot(p, img)).collect()).collect()
}

fn combine(basis: &Basis, coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; basis[0].len()];
    for (q, c) in basis.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(q) {
            *o += c * x;
        }
    }
    out
}

/// Eigenspaces of `A` restricted to `span(basis)`.
fn refine_by(a: &Matrix, basis: &Basis, tau: f64) -> Result<Vec<Cluster>, OracleError> {
    // `A` is symmetric; rounding in the restriction is symmetrized away.
    let r = restrict(a, basis);
    let sym: Matrix = (0..r.len()).map(|i| (0..r.len()).map(|j| 0.5 * (r[i][j] + r[j][i])).collect()).collect();
    let mut s = eigh_jacobi(&sym, &[])?;
    cluster_and_multiplicities(&mut s, tau);
    Ok(s.clusters
        .into_iter()
        .map(|c| Cluster { value: c.value, multiplicity: c.multiplicity, basis: c.basis.iter().map(|w| combine(basis, w)).collect() })
        .collect())
}

fn matrix_norm_bound(m: &Matrix) -> f64 {
    m.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Real eigenspaces and anti-real characteristic planes of `L` at `point`.
pub fn arcp_extract(split: &SplitFamily, point: &[f64], tau: f64) -> Result<ArcpDecomposition, RealNormalError> {
    let n = split.l.n();
    let a = split.a.eval_f64(point);
    let b = split.b.eval_f64(point);
    let l = split.l.eval_f64(point);
    let mut s2 = eigh_jacobi(&split.b2.eval_f64(point), point)?;
    let b2_spectrum = s2.eigenvalues.clone();
    cluster_and_multiplicities(&mut s2, tau);
    let zero_tol = tau * (1.0 + s2.norm);

    let mut real = Vec::new();
    let mut planes = Vec::new();
    let mut used: Basis = Vec::new();
    for c in s2.clusters.iter().filter(|c| c.value > zero_tol) {
        let bval = c.value;
        let uparts: Vec<Vec<f64>> = c.basis.iter().map(|f| f[..n].to_vec()).collect();
        let fb = orthonormalize(&uparts, 1e-8);
        for block in refine_by(&a, &fb, tau)? {
            let mut rest = block.basis.clone();
            while let Some(u1) = rest.first().cloned() {
                let u1 = {
                    let nu = norm(&u1);
                    u1.iter().map(|x| x / nu).collect::<Vec<_>>()
                };
                let v1: Vec<f64> = mat_vec(&b, &u1).iter().map(|x| x / bval).collect();
                planes.push(Plane { u: u1.clone(), v: v1.clone(), a: block.value, b: bval });
                used.push(u1.clone());
                used.push(v1.clone());
                // Deflate span(u1, v1) from the remaining block.
                let mut projected = Vec::new();
                for w in &rest[1..] {
                    let mut w = w.clone();
                    for q in [&u1, &v1] {
                        let cq = dot(&w, q);
                        w.iter_mut().zip(q.iter()).for_each(|(x, y)| *x -= cq * y);
                    }
                    if norm(&w) > 1e-6 {
                        projected.push(w);
                    }
                }
                rest = orthonormalize(&projected, 1e-6);
            }
        }
    }
    // The kernel of B: the complement of all planes, refined by A.
    let mut kernel_seed: Vec<Vec<f64>> = used.clone();
    kernel_seed.extend((0..n).map(|k| (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect()));
    let completed = orthonormalize(&kernel_seed, 1e-8);
    let kernel: Basis = completed[used.len().min(completed.len())..].iter().filter(|w| norm(w) > 0.5).cloned().collect();
    if !kernel.is_empty() {
        for block in refine_by(&a, &kernel, tau)? {
            real.push(RealEigenspace { basis: block.basis, eigenvalue: block.value });
        }
    }

    let lnorm = 1.0 + matrix_norm_bound(&l);
    let mut invariance = 0.0f64;
    let mut similitude = 0.0f64;
    for p in &planes {
        let r = restrict(&l, &vec![p.u.clone(), p.v.clone()]);
        let target = [[p.a, -p.b], [p.b, p.a]];
        for i in 0..2 {
            for j in 0..2 {
                similitude = similitude.max((r[i][j] - target[i][j]).abs() / lnorm);
            }
        }
        for w in [&p.u, &p.v] {
            let lw = mat_vec(&l, w);
            let mut res = lw.clone();
            for q in [&p.u, &p.v] {
                let c = dot(&lw, q);
                res.iter_mut().zip(q.iter()).for_each(|(x, y)| *x -= c * y);
            }
            invariance = invariance.max(norm(&res) / lnorm);
        }
    }
    for r in &real {
        for w in &r.basis {
            let lw = mat_vec(&l, w);
            let res: Vec<f64> = lw.iter().zip(w).map(|(x, y)| x - r.eigenvalue * y).collect();
            invariance = invariance.max(norm(&res) / lnorm);
        }
    }
    let mut all: Basis = real.iter().flat_map(|r| r.basis.iter().cloned()).collect();
    for p in &planes {
        all.push(p.u.clone());
        all.push(p.v.clone());
    }
    Ok(ArcpDecomposition {
        point: point.to_vec(),
        real,
        planes,
        invariance,
        similitude,
        gram_deviation: gram_deviation(&all),
        b2_spectrum,
    })
}

/// Residuals of the four plane properties for a `B₂` eigenpair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneChecks {
    /// |⟨u, v⟩| and the component of `B·span(u, v)` outside the span.
    pub orthogonal_invariant: f64,
    /// ‖B₂(v ⊕ u) + b(v ⊕ u)‖.
    pub swapped_pair: f64,
    /// ‖B₂((−v) ⊕ u) − b((−v) ⊕ u)‖.
    pub rotated_pair: f64,
    /// Largest component of `J·E_b` outside `E_b`.
    pub j_invariance: f64,
}

impl PlaneChecks {
    pub fn max(&self) -> f64 {
        self.orthogonal_invariant.max(self.swapped_pair).max(self.rotated_pair).max(self.j_invariance)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

fn j_map(w: &[f64]) -> Vec<f64> {
    let n = w.len() / 2;
    let mut out = vec![0.0; 2 * n];
    for k in 0..n {
        out[k] = -w[n + k];
        out[n + k] = w[k];
    }
    out
}

fn off_span(w: &[f64], basis: &Basis) -> f64 {
    let mut r = w.to_vec();
    for q in basis {
        let c = dot(&r, q);
        r.iter_mut().zip(q.iter()).for_each(|(x, y)| *x -= c * y);
    }
    norm(&r)
}

/// Checks for a unit eigenvector `w = u ⊕ v` of `B₂` with eigenvalue `b`,
/// where `e_b` is an orthonormal basis of the full `b`-eigenspace.
/// Residuals are relative to `1 + ‖B‖`.
pub fn plane_invariant_checks(
    split: &SplitFamily,
    point: &[f64],
    b: f64,
    w: &[f64],
    e_b: &Basis,
) -> Result<PlaneChecks, RealNormalError> {
    if b == 0.0 {
        return Err(RealNormalError::ZeroEigenvalue);
    }
    let n = split.l.n();
    let bm = split.b.eval_f64(point);
    let b2 = split.b2.eval_f64(point);
    let scale = 1.0 + matrix_norm_bound(&bm);
    let (u, v) = (&w[..n], &w[n..]);
    let span = orthonormalize(&[u.to_vec(), v.to_vec()], 1e-12);
    let cos = dot(u, v).abs() / (norm(u) * norm(v)).max(f64::MIN_POSITIVE);
    let inv = [u, v].iter().map(|x| off_span(&mat_vec(&bm, x), &span)).fold(0.0, f64::max);
    let residual = |x: &[f64], lambda: f64| {
        let bx = mat_vec(&b2, x);
        norm(&bx.iter().zip(x).map(|(p, q)| p - lambda * q).collect::<Vec<_>>())
    };
    let swapped: Vec<f64> = v.iter().chain(u).copied().collect();
    let rotated: Vec<f64> = v.iter().map(|x| -x).chain(u.iter().copied()).collect();
    let j_inv = e_b.iter().map(|f| off_span(&j_map(f), e_b)).fold(0.0, f64::max);
    Ok(PlaneChecks {
        orthogonal_invariant: cos.max(inv / scale),
        swapped_pair: residual(&swapped, -b) / scale,
        rotated_pair: residual(&rotated, b) / scale,
        j_invariance: j_inv,
    })
}

/// max |λ_k + λ_{2n−1−k}| over the ascending spectrum.
pub fn spectrum_pairing_error(spectrum: &[f64]) -> f64 {
    let m = spectrum.len();
    (0..m).map(|k| (spectrum[k] + spectrum[m - 1 - k]).abs()).fold(0.0, f64::max)
}

/// Largest gap between the squared `B₂` eigenvalues and the doubled oracle
/// spectrum of `B·Bᵀ`.
pub fn squared_spectrum_error(split: &SplitFamily, point: &[f64]) -> Result<f64, RealNormalError> {
    let b = split.b.eval_f64(point);
    let n = b.len();
    let bbt: Matrix = (0..n).map(|i| (0..n).map(|j| dot(&b[i], &b[j])).collect()).collect();
    let s = eigh_jacobi(&bbt, point)?;
    let mut doubled: Vec<f64> = s.eigenvalues.iter().flat_map(|&x| [x, x]).collect();
    doubled.sort_by(f64::total_cmp);
    let mut sq: Vec<f64> = eigh_jacobi(&split.b2.eval_f64(point), point)?.eigenvalues.iter().map(|x| x * x).collect();
    sq.sort_by(f64::total_cmp);
    Ok(sq.iter().zip(&doubled).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Complex eigenvalues of `L` at an exact point, from the exact
/// characteristic polynomial (squarefree factors, then Aberth roots).
pub fn complex_eigenvalues(l: &MatrixFamily, point: &[Scalar]) -> Vec<Complex64> {
    let chi = char_poly_constant(&l.eval_exact(point));
    let mut out = Vec::new();
    for (k, f) in squarefree_factorization(&chi, 0).iter().enumerate() {
        let deg = f.degree_in(0) as usize;
        if deg == 0 {
            continue;
        }
        let coeffs: Vec<Complex64> = f
            .coefficients_in(0)
            .iter()
            .map(|c| c.constant_value().map_or(Complex64::new(0.0, 0.0), |s| s.to_c64()))
            .collect();
        for r in polynomial_roots(&coeffs) {
            out.extend(std::iter::repeat_n(r, k + 1));
        }
    }
    out
}

/// Greedy nearest matching of two eigenvalue multisets; returns the worst
/// matched distance (infinite on a size mismatch).
pub fn eigenvalue_match_error(got: &[Complex64], want: &[Complex64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    let mut free: Vec<bool> = vec![true; want.len()];
    let mut worst = 0.0f64;
    for g in got {
        let (idx, d) = want
            .iter()
            .enumerate()
            .filter(|(k, _)| free[*k])
            .map(|(k, w)| (k, (g - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("sizes agree");
        free[idx] = false;
        worst = worst.max(d);
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalKind {
    Skew,
    Normal,
}

/// `Oᵀ · D(x) · O` with `D` block diagonal of rotation–scaling blocks
/// `[[a, −b], [b, a]]` (and, for odd leftovers or by chance in the normal
/// case, real `1×1` blocks). Skew families have `a = 0`.
pub fn random_normal_family(seed: u64, index: u64, n: usize, params: &[&str], deg: u32, kind: NormalKind) -> MatrixFamily {
    let mut rng = sampling::rng(seed, 0x5ca1 + index);
    let u = VarUniverse::new(params.iter().copied(), std::iter::empty::<&str>()).expect("valid names");
    let zero = Polynomial::zero(&u);
    let mut d = vec![vec![zero.clone(); n]; n];
    let mut k = 0;
    while k < n {
        let real_block = k + 1 == n || (kind == NormalKind::Normal && rng.random_bool(0.25));
        if real_block {
            if kind == NormalKind::Normal {
                d[k][k] = sampling::random_polynomial(&mut rng, &u, deg);
            }
            k += 1;
            continue;
        }
        let a = if kind == NormalKind::Normal { sampling::random_polynomial(&mut rng, &u, deg) } else { zero.clone() };
        let mut b = sampling::random_polynomial(&mut rng, &u, deg);
        if b.is_zero() {
            b = Polynomial::var(&u, 0);
        }
        d[k][k] = a.clone();
        d[k + 1][k + 1] = a;
        d[k][k + 1] = -&b;
        d[k + 1][k] = b;
        k += 2;
    }
    let o = sampling::cayley_orthogonal(&mut rng, n);
    let entries = sampling::orthogonal_conjugate(&d, &o);
    let structure = if kind == NormalKind::Skew { Structure::Skew } else { Structure::Normal };
    MatrixFamily::new(entries, structure, Field::Rational).expect("orthogonal conjugate of a normal matrix is normal")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(rows: &[&[&str]], s: Structure) -> MatrixFamily {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        MatrixFamily::parse(&["x".to_string(), "y".to_string()], &rows, s, Field::Rational).unwrap()
    }

    #[test]
    fn split_of_rotation_scaling() {
        let l = fam(&[&["1", "2"], &["-2", "1"]], Structure::Normal);
        let s = split_and_double(&l).unwrap();
        assert_eq!(s.a.entry(0, 0).to_string(), "1");
        assert!(s.a.entry(0, 1).is_zero());
        assert_eq!(s.b.entry(0, 1).to_string(), "2");
        assert!(s.sum_identity_holds());
        assert!(s.doubling_identity_holds());
    }

    #[test]
    fn symmetric_input_has_no_planes() {
        let l = fam(&[&["x", "y"], &["y", "-x"]], Structure::Symmetric);
        let s = split_and_double(&l).unwrap();
        assert!(s.b2.entries().iter().flatten().all(Polynomial::is_zero));
        let d = arcp_extract(&s, &[0.3, 0.4], 1e-6).unwrap();
        assert!(d.planes.is_empty());
        assert_eq!(d.dimension(), 2);
    }

    #[test]
    fn rotation_scaling_plane() {
        let l = fam(&[&["x", "y"], &["-y", "x"]], Structure::Normal);
        let s = split_and_double(&l).unwrap();
        let d = arcp_extract(&s, &[0.5, 0.75], 1e-6).unwrap();
        assert_eq!(d.planes.len(), 1, "{d:?}");
        let p = &d.planes[0];
        assert!((p.a - 0.5).abs() < 1e-12 && (p.b - 0.75).abs() < 1e-12, "{p:?}");
        assert!(d.similitude < 1e-12 && d.invariance < 1e-12 && d.gram_deviation < 1e-12);
        let exact = complex_eigenvalues(&l, &[Scalar::from_ratio(1, 2), Scalar::from_ratio(3, 4)]);
        assert!(eigenvalue_match_error(&d.eigenvalues(), &exact) < 1e-12);
    }

    #[test]
    fn constant_skew_checks() {
        let l = fam(&[&["0", "3"], &["-3", "0"]], Structure::Skew);
        let s = split_and_double(&l).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // B·e₂ = 3e₁ and B·e₁ = −3e₂, so (e₂ ⊕ e₁)/√2 is a B₂-eigenvector for −3... use the +3 one.
        let w = vec![0.0, r, r, 0.0];
        let b2 = s.b2.eval_f64(&[0.0, 0.0]);
        let bw = mat_vec(&b2, &w);
        let lambda = dot(&bw, &w);
        assert!((lambda.abs() - 3.0).abs() < 1e-12);
        let mut sample = eigh_jacobi(&b2, &[]).unwrap();
        cluster_and_multiplicities(&mut sample, 1e-6);
        let e_b = sample.clusters.iter().find(|c| (c.value - lambda).abs() < 1e-9).unwrap().basis.clone();
        let checks = plane_invariant_checks(&s, &[0.0, 0.0], lambda, &w, &e_b).unwrap();
        assert!(checks.passes(1e-12), "{checks:?}");
        assert_eq!(plane_invariant_checks(&s, &[0.0, 0.0], 0.0, &w, &e_b), Err(RealNormalError::ZeroEigenvalue));
        assert!(spectrum_pairing_error(&sample.eigenvalues) < 1e-12);
        assert!(squared_spectrum_error(&s, &[0.0, 0.0]).unwrap() < 1e-12);
    }

    #[test]
    fn cayley_is_orthogonal() {
        let mut rng = sampling::rng(3, 0);
        let o = cayley_orthogonal(&mut rng, 4);
        for i in 0..4 {
            for j in 0..4 {
                let g = (0..4).fold(Scalar::zero(), |acc, k| &acc + &(&o[k][i] * &o[k][j]));
                assert_eq!(g, if i == j { Scalar::one() } else { Scalar::zero() });
            }
        }
    }

    #[test]
    fn random_families_have_the_requested_structure() {
        for idx in 0..4 {
            let f = random_normal_family(42, idx, 4, &["x", "y"], 2, NormalKind::Skew);
            assert_eq!(f.structure(), Structure::Skew);
            let g = random_normal_family(42, idx, 4, &["x"], 2, NormalKind::Normal);
            assert_eq!(g.structure(), Structure::Normal);
        }
    }
}
