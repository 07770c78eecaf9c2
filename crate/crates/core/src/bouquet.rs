//! The quadratic system `Q_{ij}(v) = (Mv)_i v_j − (Mv)_j v_i`, its generic
//! rank `d_L`, the maximal Fitting minors, and rank invariants at points.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::matrix::{nullspace, scalar_rank};
use crate::algebra::univariate::{char_poly_constant, squarefree_factorization, squarefree_part};
use crate::algebra::{bareiss_rank, determinant, AlgebraError, Monomial, Polynomial, Scalar, VarUniverse};
use crate::family::MatrixFamily;
use crate::oracle::{singular_values, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BouquetError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("d_L = 0: the family is a scalar operator")]
    ScalarOperator,
    #[error("fiber names must be {expected} distinct identifiers, got {got}")]
    FiberNames { expected: usize, got: usize },
}

/// Which part of a complex wedge coordinate a row carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowPart {
    Real,
    Re,
    Im,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowLabel {
    pub i: usize,
    pub j: usize,
    pub part: RowPart,
}

/// A quadratic form with coefficients on the basis `V_a V_b`, `a ≤ b`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm {
    pub coeffs: Vec<Polynomial>,
}

/// Index of `V_a V_b` (`a ≤ b`) in the monomial basis
/// `V₁², V₁V₂, …, V₁V_m, V₂², …`.
pub fn column_index(m: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * m - a * a.saturating_sub(1) / 2 + (b - a)
}

/// Inverse of [`column_index`].
pub fn column_pair(m: usize, col: usize) -> (usize, usize) {
    let mut k = col;
    for a in 0..m {
        let len = m - a;
        if k < len {
            return (a, a + k);
        }
        k -= len;
    }
    panic!("column {col} out of range for fiber dimension {m}");
}

#[derive(Clone, Debug)]
pub struct QuadSystem {
    pub params: Arc<VarUniverse>,
    /// Parameters followed by the real fiber coordinates.
    pub fiber_universe: Arc<VarUniverse>,
    /// Real fiber dimension (`n`, or `2n` for complex families).
    pub m: usize,
    pub rows: Vec<RowLabel>,
    pub quads: Vec<QuadForm>,
    pub d_l: usize,
    pub witness_rows: Vec<usize>,
    pub witness_cols: Vec<usize>,
}

impl QuadSystem {
    pub fn num_cols(&self) -> usize {
        self.m * (self.m + 1) / 2
    }

    pub fn coeff_matrix(&self) -> Vec<Vec<Polynomial>> {
        self.quads.iter().map(|q| q.coeffs.clone()).collect()
    }

    /// Row `k` as a polynomial in the fiber universe.
    pub fn quad_poly(&self, k: usize) -> Polynomial {
        form_to_poly(&self.quads[k].coeffs, self.m, &self.fiber_universe)
    }

    pub fn coeff_matrix_at(&self, point: &[Scalar]) -> Vec<Vec<Scalar>> {
        self.quads.iter().map(|q| q.coeffs.iter().map(|c| c.eval(point)).collect()).collect()
    }

    pub fn coeff_matrix_f64(&self, point: &[f64]) -> Matrix {
        self.quads.iter().map(|q| q.coeffs.iter().map(|c| c.eval_f64(point)).collect()).collect()
    }

    /// Exact rank of the specialized coefficient matrix.
    pub fn rank_at(&self, point: &[Scalar]) -> usize {
        scalar_rank(&self.coeff_matrix_at(point))
    }

    /// Exact value of every quadratic at `(point, w)`.
    pub fn values_at(&self, point: &[Scalar], w: &[Scalar]) -> Vec<Scalar> {
        self.coeff_matrix_at(point).iter().map(|row| eval_form(row, self.m, w)).collect()
    }

    /// Exact Jacobian rank of `v ↦ (Q_{ij}(v))` at `(point, w)`.
    pub fn jacobian_rank_at(&self, point: &[Scalar], w: &[Scalar]) -> usize {
        let c = self.coeff_matrix_at(point);
        let jac: Vec<Vec<Scalar>> = c.iter().map(|row| form_gradient(row, self.m, w)).collect();
        scalar_rank(&jac)
    }

    /// Numerical Jacobian rank: singular values above `1e-7 · gap` count.
    pub fn jacobian_rank_numeric(&self, point: &[f64], w: &[f64], gap: f64) -> usize {
        let c = self.coeff_matrix_f64(point);
        let jac: Matrix = c.iter().map(|row| form_gradient_f64(row, self.m, w)).collect();
        let threshold = 1e-7 * gap.max(f64::MIN_POSITIVE);
        singular_values(&jac).iter().filter(|&&s| s > threshold).count()
    }
}

fn form_to_poly(coeffs: &[Polynomial], m: usize, fu: &Arc<VarUniverse>) -> Polynomial {
    let p = fu.param_count();
    let mut out = Polynomial::zero(fu);
    for (col, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (a, b) = column_pair(m, col);
        let mut e = vec![0u32; fu.len()];
        e[p + a] += 1;
        e[p + b] += 1;
        let mono = Polynomial::monomial(fu, Monomial::from_exponents(e), Scalar::one());
        out = &out + &(&c.embed(fu).expect("parameters embed") * &mono);
    }
    out
}

/// `Σ c_ab w_a w_b`.
pub fn eval_form(coeffs: &[Scalar], m: usize, w: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (col, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (a, b) = column_pair(m, col);
        acc += &(c * &(&w[a] * &w[b]));
    }
    acc
}

pub fn eval_form_f64(coeffs: &[f64], m: usize, w: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(col, c)| {
            let (a, b) = column_pair(m, col);
            c * w[a] * w[b]
        })
        .sum()
}

/// Symmetric Gram matrix `S` with `q(w) = wᵀ S w`.
pub fn form_matrix_f64(coeffs: &[f64], m: usize) -> Matrix {
    let mut s = vec![vec![0.0; m]; m];
    for (col, &c) in coeffs.iter().enumerate() {
        let (a, b) = column_pair(m, col);
        if a == b {
            s[a][a] += c;
        } else {
            s[a][b] += 0.5 * c;
            s[b][a] += 0.5 * c;
        }
    }
    s
}

pub fn form_gradient(coeffs: &[Scalar], m: usize, w: &[Scalar]) -> Vec<Scalar> {
    let mut g = vec![Scalar::zero(); m];
    for (col, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (a, b) = column_pair(m, col);
        g[a] += &(c * &w[b]);
        g[b] += &(c * &w[a]);
    }
    g
}

pub fn form_gradient_f64(coeffs: &[f64], m: usize, w: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; m];
    for (col, &c) in coeffs.iter().enumerate() {
        let (a, b) = column_pair(m, col);
        g[a] += c * w[b];
        g[b] += c * w[a];
    }
    g
}

/// Default fiber names `V1, …, Vn`.
pub fn default_fibers(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("V{k}")).collect()
}

/// Expand the wedge quadratics of `family`. For complex families the fiber is
/// realified as `v = a + i·b` with coordinates `(a₁..a_n, b₁..b_n)`, and each
/// complex quadratic contributes its real and imaginary part as two rows.
pub fn wedge_quadratics(family: &MatrixFamily, fibers: Option<&[String]>) -> Result<QuadSystem, BouquetError> {
    let n = family.n();
    let names: Vec<String> = match fibers {
        Some(f) if f.len() == n => f.to_vec(),
        Some(f) => return Err(BouquetError::FiberNames { expected: n, got: f.len() }),
        None => default_fibers(n),
    };
    let complex = family.is_complex();
    let mut real_names = names.clone();
    if complex {
        real_names.extend(names.iter().map(|s| format!("{s}_im")));
    }
    let m = real_names.len();
    let params = family.universe().clone();
    let fu = VarUniverse::with_exceptional(
        params.params().to_vec(),
        real_names,
        params.exceptional().iter().cloned(),
    )?;
    let p = params.param_count();
    let v: Vec<Polynomial> = (0..n)
        .map(|k| {
            let re = Polynomial::var(&fu, p + k);
            if complex {
                &re + &Polynomial::var(&fu, p + n + k).scale(&Scalar::i())
            } else {
                re
            }
        })
        .collect();
    let entries: Vec<Vec<Polynomial>> = family
        .entries()
        .iter()
        .map(|r| r.iter().map(|e| e.embed(&fu).expect("parameters embed")).collect())
        .collect();
    let mv: Vec<Polynomial> = (0..n)
        .map(|i| {
            (0..n).fold(Polynomial::zero(&fu), |acc, j| {
                if entries[i][j].is_zero() { acc } else { &acc + &(&entries[i][j] * &v[j]) }
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut quads = Vec::new();
    let half = Scalar::from_ratio(1, 2);
    let minus_half_i = &Scalar::from_ratio(-1, 2) * &Scalar::i();
    for i in 0..n {
        for j in i + 1..n {
            let q = &(&mv[i] * &v[j]) - &(&mv[j] * &v[i]);
            if complex {
                let qc = q.conj();
                let re = (&q + &qc).scale(&half);
                let im = (&q - &qc).scale(&minus_half_i);
                rows.push(RowLabel { i, j, part: RowPart::Re });
                quads.push(extract_form(&re, m, &params));
                rows.push(RowLabel { i, j, part: RowPart::Im });
                quads.push(extract_form(&im, m, &params));
            } else {
                rows.push(RowLabel { i, j, part: RowPart::Real });
                quads.push(extract_form(&q, m, &params));
            }
        }
    }
    let mut sys = QuadSystem {
        params,
        fiber_universe: fu,
        m,
        rows,
        quads,
        d_l: 0,
        witness_rows: Vec::new(),
        witness_cols: Vec::new(),
    };
    generic_rank_dl(&mut sys);
    Ok(sys)
}

fn extract_form(q: &Polynomial, m: usize, params: &Arc<VarUniverse>) -> QuadForm {
    let p = params.param_count();
    let mut acc: Vec<Vec<(Monomial, Scalar)>> = vec![Vec::new(); m * (m + 1) / 2];
    for (mono, c) in q.terms() {
        let e = mono.exponents();
        let mut fiber_vars = Vec::new();
        for (k, &x) in e[p..].iter().enumerate() {
            for _ in 0..x {
                fiber_vars.push(k);
            }
        }
        debug_assert_eq!(fiber_vars.len(), 2, "wedge quadratics are homogeneous of degree 2");
        let col = column_index(m, fiber_vars[0], fiber_vars[1]);
        acc[col].push((Monomial::from_exponents(e[..p].to_vec()), c.clone()));
    }
    QuadForm { coeffs: acc.into_iter().map(|t| Polynomial::from_terms(params, t)).collect() }
}

/// Rank of the coefficient matrix over the parameter function field, with a
/// witness minor; stored into `q`.
///
/// No specialization exceeds the generic rank, and a nonzero minor of degree
/// at most `D_v` in each parameter cannot vanish on a product grid with
/// `D_v + 1` values per axis. The maximum point rank over such a grid is
/// therefore exact. Symbolic elimination is the fallback for large grids.
pub fn generic_rank_dl(q: &mut QuadSystem) -> usize {
    let mat = q.coeff_matrix();
    let (rank, rows, cols) = grid_rank(&mat).unwrap_or_else(|| {
        let w = bareiss_rank(&mat);
        (w.rank, w.rows, w.cols)
    });
    q.d_l = rank;
    q.witness_rows = rows;
    q.witness_cols = cols;
    rank
}

const GRID_RANK_LIMIT: usize = 50_000;

fn grid_value(k: usize) -> Scalar {
    // 0, 1, −1, 2, −2, …
    let m = k.div_ceil(2) as i64;
    Scalar::from_int(if k % 2 == 1 { m } else { -m })
}

fn grid_rank(mat: &[Vec<Polynomial>]) -> Option<(usize, Vec<usize>, Vec<usize>)> {
    let Some(first) = mat.first().and_then(|r| r.first()) else {
        return Some((0, Vec::new(), Vec::new()));
    };
    let k = first.universe().param_count();
    let full = mat.len().min(mat[0].len());
    // Row scaling leaves every rank unchanged and keeps evaluation integral.
    let scaled: Vec<Vec<Polynomial>> = mat
        .iter()
        .map(|r| {
            let den = r.iter().fold(num_bigint::BigInt::from(1), |acc, e| {
                num_integer::Integer::lcm(&acc, e.denominator_lcm().re().numer())
            });
            let den = Scalar::real(num_rational::BigRational::from_integer(den));
            r.iter().map(|e| e.scale(&den)).collect()
        })
        .collect();
    let mat = &scaled;
    let row_deg: Vec<Vec<u32>> =
        mat.iter().map(|r| (0..k).map(|v| r.iter().map(|e| e.degree_in(v)).max().unwrap_or(0)).collect()).collect();
    let bound = |size: usize| -> Vec<usize> {
        (0..k)
            .map(|v| {
                let mut d: Vec<u32> = row_deg.iter().map(|r| r[v]).collect();
                d.sort_unstable_by(|a, b| b.cmp(a));
                d.iter().take(size).sum::<u32>() as usize
            })
            .collect()
    };
    let rank_at = |p: &[Scalar]| {
        let m: Vec<Vec<Scalar>> = mat.iter().map(|r| r.iter().map(|e| e.eval(p)).collect()).collect();
        bareiss_rank(&m)
    };
    let start: Vec<Scalar> = (0..k).map(|v| Scalar::from_ratio(2 * v as i64 + 3, 7)).collect();
    let mut best = rank_at(&start);
    'grow: while best.rank < full {
        let degs = bound(best.rank + 1);
        let total = degs.iter().try_fold(1usize, |acc, d| acc.checked_mul(d + 1)).filter(|&t| t <= GRID_RANK_LIMIT)?;
        for flat in 0..total {
            let mut rem = flat;
            let p: Vec<Scalar> = degs
                .iter()
                .map(|d| {
                    let i = rem % (d + 1);
                    rem /= d + 1;
                    grid_value(i)
                })
                .collect();
            let w = rank_at(&p);
            if w.rank > best.rank {
                best = w;
                continue 'grow;
            }
        }
        break;
    }
    Some((best.rank, best.rows, best.cols))
}

/// `Σ_{i<j} e_i e_j`.
pub fn expected_d2(e: &[usize]) -> usize {
    let total: usize = e.iter().sum();
    let squares: usize = e.iter().map(|x| x * x).sum();
    (total * total - squares) / 2
}

/// One nonzero `d_L × d_L` minor: `det = factor · gens[gen]`.
#[derive(Clone, Debug)]
pub struct MinorEntry {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub gen: usize,
    pub factor: Scalar,
}

#[derive(Clone, Debug)]
pub struct FittingIdeal {
    pub d_l: usize,
    /// Distinct minors up to scalar, normalized, in enumeration order.
    pub gens: Vec<Polynomial>,
    pub minors: Vec<MinorEntry>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All `d_L × d_L` minors of the coefficient matrix, deduplicated up to scalars.
pub fn fitting_minors(q: &QuadSystem) -> Result<FittingIdeal, BouquetError> {
    let d = q.d_l;
    if d == 0 {
        return Err(BouquetError::ScalarOperator);
    }
    let mat = q.coeff_matrix();
    let row_sets = combinations(mat.len(), d);
    let col_sets = combinations(q.num_cols(), d);
    // Columns that are identically zero never contribute.
    let live_col: Vec<bool> = (0..q.num_cols()).map(|c| mat.iter().any(|r| !r[c].is_zero())).collect();
    let pairs: Vec<(usize, usize)> = (0..row_sets.len())
        .flat_map(|r| (0..col_sets.len()).map(move |c| (r, c)))
        .filter(|&(_, c)| col_sets[c].iter().all(|&k| live_col[k]))
        .collect();
    let dets: Vec<Option<Polynomial>> = pairs
        .par_iter()
        .map(|&(r, c)| {
            let sub: Vec<Vec<Polynomial>> =
                row_sets[r].iter().map(|&i| col_sets[c].iter().map(|&j| mat[i][j].clone()).collect()).collect();
            let det = determinant(sub);
            (!det.is_zero()).then_some(det)
        })
        .collect();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut gens = Vec::new();
    let mut minors = Vec::new();
    for (&(r, c), det) in pairs.iter().zip(dets) {
        let Some(det) = det else { continue };
        let norm = det.normalized();
        let factor = det.leading_coefficient().checked_div(&norm.leading_coefficient()).expect("nonzero");
        let key = norm.to_string();
        let gen = *index.entry(key).or_insert_with(|| {
            gens.push(norm);
            gens.len() - 1
        });
        minors.push(MinorEntry { rows: row_sets[r].clone(), cols: col_sets[c].clone(), gen, factor });
    }
    Ok(FittingIdeal { d_l: d, gens, minors })
}

impl FittingIdeal {
    /// Whether every generator vanishes at `point`, i.e. the specialized
    /// coefficient matrix drops rank.
    pub fn vanishes_at(&self, q: &QuadSystem, point: &[Scalar]) -> bool {
        q.rank_at(point) < self.d_l
    }

    /// Direct evaluation of the stored generators.
    pub fn gens_vanish_at(&self, point: &[Scalar]) -> bool {
        self.gens.iter().all(|g| g.eval(point).is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagVerdict {
    Diagonalizable,
    NotDiagonalizable,
    Scalar,
    Inconclusive,
}

/// Diagonalizability of a constant matrix.
///
/// Decided exactly by `χ̃(A) = 0` for the squarefree part `χ̃` of the
/// characteristic polynomial; at every rational eigenvalue the Jacobian rank
/// of `v ↦ Av ∧ v` at an eigenvector is cross-checked against
/// `n − geometric multiplicity` (equality holds iff the eigenvalue is
/// semisimple). A disagreement is reported as inconclusive.
pub fn diag_criterion(a: &[Vec<Scalar>]) -> DiagVerdict {
    let n = a.len();
    let is_scalar = (0..n).all(|i| (0..n).all(|j| if i == j { a[i][i] == a[0][0] } else { a[i][j].is_zero() }));
    if is_scalar {
        return DiagVerdict::Scalar;
    }
    let chi = char_poly_constant(a);
    let red = squarefree_part(&chi, 0);
    let exact = matrix_poly_is_zero(&red, a);

    let u = VarUniverse::new(Vec::<String>::new(), Vec::<String>::new()).expect("empty universe");
    let entries: Vec<Vec<Polynomial>> =
        a.iter().map(|r| r.iter().map(|c| Polynomial::constant(&u, c.clone())).collect()).collect();
    let fam = MatrixFamily::trusted(entries, crate::family::Structure::Symmetric, crate::algebra::Field::Gaussian);
    let consistent = match wedge_quadratics_real(&fam) {
        Some(q) => squarefree_factorization(&chi, 0)
            .iter()
            .flat_map(|f| rational_roots_linear(f))
            .all(|lambda| {
                let shifted: Vec<Vec<Scalar>> = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { &a[i][j] - &lambda } else { a[i][j].clone() }).collect())
                    .collect();
                let kernel = nullspace(&shifted, n);
                let geo = kernel.len();
                let jr = q.jacobian_rank_at(&[], &kernel[0]);
                let semisimple = jr == n - geo;
                // Semisimple at every eigenvalue iff diagonalizable.
                semisimple || !exact
            }),
        None => true,
    };
    match (exact, consistent) {
        (true, true) => DiagVerdict::Diagonalizable,
        (false, _) => DiagVerdict::NotDiagonalizable,
        (true, false) => DiagVerdict::Inconclusive,
    }
}

fn wedge_quadratics_real(fam: &MatrixFamily) -> Option<QuadSystem> {
    if fam.is_complex() {
        return None;
    }
    wedge_quadratics(fam, None).ok()
}

fn rational_roots_linear(f: &Polynomial) -> Option<Scalar> {
    if f.degree_in(0) != 1 {
        return None;
    }
    let c = f.coefficients_in(0);
    let c0 = c[0].constant_value().unwrap_or_else(Scalar::zero);
    let c1 = c[1].constant_value().expect("constant coefficient");
    Some(-&c0.checked_div(&c1).expect("nonzero"))
}

fn matrix_poly_is_zero(p: &Polynomial, a: &[Vec<Scalar>]) -> bool {
    let n = a.len();
    let coeffs = p.coefficients_in(0);
    let mut acc: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(); n]; n];
    for c in coeffs.iter().rev() {
        let cv = c.constant_value().unwrap_or_else(Scalar::zero);
        let mut next = vec![vec![Scalar::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Scalar::zero();
                for k in 0..n {
                    if !acc[i][k].is_zero() && !a[k][j].is_zero() {
                        s += &(&acc[i][k] * &a[k][j]);
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &cv;
        }
        acc = next;
    }
    acc.iter().flatten().all(Scalar::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::family::Structure;

    fn fam(params: &[&str], rows: &[&[&str]]) -> MatrixFamily {
        let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        MatrixFamily::parse(&params, &rows, Structure::Symmetric, Field::Rational).unwrap()
    }

    #[test]
    fn column_indexing_round_trips() {
        for m in 1..6 {
            for col in 0..m * (m + 1) / 2 {
                let (a, b) = column_pair(m, col);
                assert_eq!(column_index(m, a, b), col);
            }
        }
        assert_eq!(column_pair(3, 3), (1, 1));
    }

    #[test]
    fn kupa_quadratic_and_minors() {
        let f = fam(&["x", "y"], &[&["x^2", "x*y"], &["x*y", "y^2"]]);
        let fibers = vec!["X".to_string(), "Y".to_string()];
        let q = wedge_quadratics(&f, Some(&fibers)).unwrap();
        assert_eq!(q.d_l, 1);
        assert_eq!(q.quad_poly(0).to_string(), "x^2*X*Y - x*y*X^2 + x*y*Y^2 - y^2*X*Y");
        let fit = fitting_minors(&q).unwrap();
        let g: Vec<String> = fit.gens.iter().map(ToString::to_string).collect();
        assert_eq!(g, vec!["x*y", "x^2 - y^2"]);
    }

    #[test]
    fn rellich_minors() {
        let f = fam(&["x", "y"], &[&["x", "y"], &["y", "-x"]]);
        let fit = fitting_minors(&wedge_quadratics(&f, None).unwrap()).unwrap();
        let g: Vec<String> = fit.gens.iter().map(ToString::to_string).collect();
        assert_eq!(g, vec!["y", "x"]);
    }

    #[test]
    fn scalar_family_has_no_quadratics() {
        let f = fam(&["x"], &[&["x", "0"], &["0", "x"]]);
        let q = wedge_quadratics(&f, None).unwrap();
        assert_eq!(q.d_l, 0);
        assert!(matches!(fitting_minors(&q), Err(BouquetError::ScalarOperator)));
    }

    #[test]
    fn diagonal_ranks() {
        let f = fam(&["x", "y", "z"], &[&["x", "0", "0"], &["0", "y", "0"], &["0", "0", "z"]]);
        assert_eq!(wedge_quadratics(&f, None).unwrap().d_l, 3);
        let f2 = fam(&["x", "y"], &[&["x", "0"], &["0", "y"]]);
        let q2 = wedge_quadratics(&f2, None).unwrap();
        assert_eq!(q2.quad_poly(0).to_string(), "x*V1*V2 - y*V1*V2");
        let fit = fitting_minors(&q2).unwrap();
        assert_eq!(fit.gens[0].to_string(), "x - y");
    }

    #[test]
    fn expected_dimensions() {
        assert_eq!(expected_d2(&[1, 1]), 1);
        assert_eq!(expected_d2(&[1, 1, 1]), 3);
        assert_eq!(expected_d2(&[1; 5]), 10);
        assert_eq!(expected_d2(&[2, 2]), 4);
    }

    #[test]
    fn jacobian_rank_examples() {
        let f = fam(&["x", "y"], &[&["x^2", "x*y"], &["x*y", "y^2"]]);
        let q = wedge_quadratics(&f, None).unwrap();
        let s = |v: i64| Scalar::from_int(v);
        assert_eq!(q.jacobian_rank_at(&[s(1), s(0)], &[s(1), s(0)]), 1);
        assert_eq!(q.jacobian_rank_at(&[s(1), s(1)], &[s(1), s(1)]), 1);
        let id = fam(&["x"], &[&["3", "0"], &["0", "3"]]);
        let qi = wedge_quadratics(&id, None).unwrap();
        assert_eq!(qi.jacobian_rank_at(&[s(2)], &[s(1), s(5)]), 0);
    }

    #[test]
    fn diagonalizability() {
        let s = |v: i64| Scalar::from_int(v);
        assert_eq!(diag_criterion(&[vec![s(0), s(1)], vec![s(0), s(0)]]), DiagVerdict::NotDiagonalizable);
        assert_eq!(diag_criterion(&[vec![s(2), s(0)], vec![s(0), s(3)]]), DiagVerdict::Diagonalizable);
        assert_eq!(diag_criterion(&[vec![s(5), s(0)], vec![s(0), s(5)]]), DiagVerdict::Scalar);
        // Rotation: irrational (complex) eigenvalues, still diagonalizable over ℂ.
        assert_eq!(diag_criterion(&[vec![s(0), s(-1)], vec![s(1), s(0)]]), DiagVerdict::Diagonalizable);
        // Jordan block plus a simple eigenvalue.
        let j = vec![vec![s(2), s(1), s(0)], vec![s(0), s(2), s(0)], vec![s(0), s(0), s(7)]];
        assert_eq!(diag_criterion(&j), DiagVerdict::NotDiagonalizable);
    }
}
