//! Polynomial matrix families: structure verification, characteristic
//! polynomial, generic eigenvalue count, discriminant and coefficient ideals.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::univariate::{char_poly_constant, distinct_eigenvalue_count, monic_in, squarefree_factorization};
use crate::algebra::{
    bareiss_rank,
    determinant, gcd, parse_polynomial, resultant, AlgebraError, Field, Polynomial, Scalar, VarUniverse,
};
use crate::oracle::{hermitian_embedding, Matrix};
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Symmetric,
    Hermitian,
    Skew,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("matrix must be square and nonempty")]
    NotSquare,
    #[error("{structure:?} structure violated at entry ({row}, {col}): residual {residual}")]
    StructureViolation { structure: Structure, row: usize, col: usize, residual: String },
    #[error("{0:?} families over the Gaussian field must have real coefficients")]
    NonRealEntries(Structure),
    #[error("the symmetric pipeline needs a self-adjoint model; use the real-normal reduction for {0:?} families")]
    NotSelfAdjoint(Structure),
}

/// A verified `n × n` matrix of parameter polynomials.
#[derive(Clone, Debug)]
pub struct MatrixFamily {
    universe: Arc<VarUniverse>,
    entries: Vec<Vec<Polynomial>>,
    structure: Structure,
    field: Field,
}

impl MatrixFamily {
    /// Builds and verifies a family; entries must live in a parameter-only universe.
    pub fn new(entries: Vec<Vec<Polynomial>>, structure: Structure, field: Field) -> Result<Self, FamilyError> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(FamilyError::NotSquare);
        }
        let universe = entries[0][0].universe().clone();
        if entries.iter().flatten().any(|p| !Arc::ptr_eq(p.universe(), &universe) && p.universe() != &universe) {
            return Err(AlgebraError::UniverseMismatch.into());
        }
        if !universe.fibers().is_empty() {
            return Err(AlgebraError::InvalidUniverse("family entries must use parameters only".into()).into());
        }
        let fam = MatrixFamily { universe, entries, structure, field };
        fam.check_structure()?;
        Ok(fam)
    }

    /// Parses entry strings over the given parameter names.
    pub fn parse<S: AsRef<str>>(
        params: &[String],
        rows: &[Vec<S>],
        structure: Structure,
        field: Field,
    ) -> Result<Self, FamilyError> {
        let universe = VarUniverse::new(params.iter().cloned(), std::iter::empty::<String>())?;
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_polynomial(s.as_ref(), &universe, field)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(entries, structure, field)
    }

    /// Unverified constructor for derived families whose structure follows
    /// from construction (pullbacks, splits).
    pub(crate) fn trusted(entries: Vec<Vec<Polynomial>>, structure: Structure, field: Field) -> Self {
        let universe = entries[0][0].universe().clone();
        MatrixFamily { universe, entries, structure, field }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn universe(&self) -> &Arc<VarUniverse> {
        &self.universe
    }

    pub fn entries(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// True when the eigen-analysis runs on a real model of dimension `2n`
    /// (complex entries present).
    pub fn is_complex(&self) -> bool {
        self.entries.iter().flatten().any(|p| !p.has_real_coefficients())
    }

    /// Dimension of the real fiber model: `n`, or `2n` for complex families.
    pub fn real_dim(&self) -> usize {
        if self.is_complex() { 2 * self.n() } else { self.n() }
    }

    fn conj_transpose(&self) -> Vec<Vec<Polynomial>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| self.entries[j][i].conj()).collect()).collect()
    }

    fn check_structure(&self) -> Result<(), FamilyError> {
        let n = self.n();
        let violation = |row, col, residual: &Polynomial| FamilyError::StructureViolation {
            structure: self.structure,
            row: row + 1,
            col: col + 1,
            residual: residual.to_string(),
        };
        match self.structure {
            Structure::Symmetric | Structure::Skew => {
                if self.is_complex() {
                    return Err(FamilyError::NonRealEntries(self.structure));
                }
                for i in 0..n {
                    for j in i..n {
                        let r = if self.structure == Structure::Symmetric {
                            &self.entries[i][j] - &self.entries[j][i]
                        } else {
                            &self.entries[i][j] + &self.entries[j][i]
                        };
                        if !r.is_zero() {
                            return Err(violation(i, j, &r));
                        }
                    }
                }
            }
            Structure::Hermitian => {
                for i in 0..n {
                    for j in i..n {
                        let r = &self.entries[i][j] - &self.entries[j][i].conj();
                        if !r.is_zero() {
                            return Err(violation(i, j, &r));
                        }
                    }
                }
            }
            Structure::Normal => {
                let star = self.conj_transpose();
                let a = mat_mul(&self.entries, &star);
                let b = mat_mul(&star, &self.entries);
                for i in 0..n {
                    for j in 0..n {
                        let r = &a[i][j] - &b[i][j];
                        if !r.is_zero() {
                            return Err(violation(i, j, &r));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact value at a parameter point.
    pub fn eval_exact(&self, point: &[Scalar]) -> Vec<Vec<Scalar>> {
        self.entries.iter().map(|r| r.iter().map(|p| p.eval(point)).collect()).collect()
    }

    pub fn eval_f64(&self, point: &[f64]) -> Matrix {
        self.entries.iter().map(|r| r.iter().map(|p| p.eval_f64(point)).collect()).collect()
    }

    pub fn eval_c64(&self, point: &[f64]) -> Vec<Vec<Complex64>> {
        self.entries.iter().map(|r| r.iter().map(|p| p.eval_c64(point)).collect()).collect()
    }

    /// Real symmetric matrix whose invariant subspaces are the (realified)
    /// eigenspaces of the family at `point`.
    ///
    /// Complex normal families use `H + φK` with `H`, `K` the commuting
    /// Hermitian parts and `φ` irrational, so that joint eigenspaces are
    /// separated generically.
    pub fn oracle_matrix(&self, point: &[f64]) -> Result<Matrix, FamilyError> {
        let n = self.n();
        match self.structure {
            Structure::Symmetric => Ok(self.eval_f64(point)),
            Structure::Hermitian => {
                let c = self.eval_c64(point);
                if !self.is_complex() {
                    return Ok(c.iter().map(|r| r.iter().map(|z| z.re).collect()).collect());
                }
                let re = c.iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
                let im = c.iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
                Ok(hermitian_embedding(&re, &im))
            }
            Structure::Normal if self.field == Field::Gaussian && self.is_complex() => {
                const PHI: f64 = 0.618_033_988_749_894_9;
                let c = self.eval_c64(point);
                let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
                for i in 0..n {
                    for j in 0..n {
                        let h = (c[i][j] + c[j][i].conj()) * 0.5;
                        let k = (c[i][j] - c[j][i].conj()) * Complex64::new(0.0, -0.5);
                        g[i][j] = h + k * PHI;
                    }
                }
                let re = g.iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
                let im = g.iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
                Ok(hermitian_embedding(&re, &im))
            }
            s => Err(FamilyError::NotSelfAdjoint(s)),
        }
    }

    /// Real model acting on `ℝ^{real_dim}`; used for Rayleigh quotients.
    pub fn real_model(&self, point: &[f64]) -> Matrix {
        if !self.is_complex() {
            return self.eval_f64(point);
        }
        let c = self.eval_c64(point);
        let re = c.iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
        let im = c.iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
        hermitian_embedding(&re, &im)
    }

    /// Pullback along a chart map: `images[k]` is the k-th base parameter
    /// expressed in the chart universe.
    pub fn pullback(&self, images: &[Polynomial], chart: &Arc<VarUniverse>) -> MatrixFamily {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|p| p.compose(images, chart)).collect())
            .collect();
        MatrixFamily { universe: chart.clone(), entries, structure: self.structure, field: self.field }
    }

    /// Number of distinct eigenvalues at an exact parameter point.
    pub fn distinct_eigenvalues_at(&self, point: &[Scalar]) -> usize {
        distinct_eigenvalue_count(&self.eval_exact(point))
    }

    /// True for `a(x)·Id`.
    pub fn is_scalar(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (0..n).all(|j| if i == j { self.entries[i][i] == self.entries[0][0] } else { self.entries[i][j].is_zero() })
        })
    }
}

fn mat_mul(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]) -> Vec<Vec<Polynomial>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Polynomial::zero(a[0][0].universe());
                    for k in 0..n {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc = &acc + &(&a[i][k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Characteristic data of a family.
#[derive(Clone, Debug)]
pub struct SpectralSummary {
    /// Universe of `char_poly`: the parameters plus the auxiliary variable.
    pub t_universe: Arc<VarUniverse>,
    /// Index of the auxiliary variable in `t_universe`.
    pub t_var: usize,
    pub char_poly: Polynomial,
    pub reduced_char_poly: Polynomial,
    pub s_l: usize,
    /// Generic multiplicity tuple, ascending.
    pub multiplicities: Vec<usize>,
    pub disc_gens: Vec<Polynomial>,
    pub coeff_ideal_gens: Vec<Polynomial>,
}

/// Parameter universe extended by a fresh auxiliary variable (`T` unless taken).
pub fn char_universe(params: &Arc<VarUniverse>) -> Result<(Arc<VarUniverse>, usize), AlgebraError> {
    let mut name = String::from("T");
    while params.index_of(&name).is_some() {
        name.push('_');
    }
    let mut names: Vec<String> = params.params().to_vec();
    names.push(name);
    let u = VarUniverse::with_exceptional(names, Vec::<String>::new(), params.exceptional().iter().cloned())?;
    let idx = u.len() - 1;
    Ok((u, idx))
}

/// `det(T·Id − M)` by fraction-free elimination.
pub fn char_poly(family: &MatrixFamily) -> (Arc<VarUniverse>, usize, Polynomial) {
    let (tu, t) = char_universe(family.universe()).expect("fresh auxiliary name");
    let tv = Polynomial::var(&tu, t);
    let n = family.n();
    let rows: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = -&family.entry(i, j).embed(&tu).expect("parameters embed");
                    if i == j { &tv + &e } else { e }
                })
                .collect()
        })
        .collect();
    let chi = determinant(rows);
    (tu, t, chi)
}

/// Monic degree-`c` annihilator of `M` from the Krylov sequence of a constant
/// vector, accepted only if `p(M) = 0` holds exactly. Since `c` distinct
/// eigenvalues occur at `point`, such a `p` is the minimal polynomial, which
/// for a normal family is the squarefree part of `χ`.
fn krylov_minimal_poly(
    family: &MatrixFamily,
    tu: &Arc<VarUniverse>,
    t: usize,
    c: usize,
    point: &[Scalar],
) -> Option<Polynomial> {
    let n = family.n();
    let u = family.universe();
    let m = family.entries();
    let apply = |v: &[Polynomial]| -> Vec<Polynomial> {
        (0..n)
            .map(|i| {
                (0..n).fold(Polynomial::zero(u), |acc, k| {
                    if m[i][k].is_zero() || v[k].is_zero() {
                        acc
                    } else {
                        &acc + &(&m[i][k] * &v[k])
                    }
                })
            })
            .collect()
    };
    'seeds: for seed in 0..3usize {
        let b: Vec<Polynomial> =
            (0..n).map(|i| Polynomial::constant(u, Scalar::from_int(((i * (seed + 2)) % 7 + 1) as i64))).collect();
        let mut vs = vec![b];
        for _ in 0..c {
            let next = apply(vs.last().expect("nonempty"));
            vs.push(next);
        }
        let at: Vec<Vec<Scalar>> = (0..n).map(|i| (0..c).map(|j| vs[j][i].eval(point)).collect()).collect();
        let w = bareiss_rank(&at);
        if w.rank < c {
            continue;
        }
        let system = |replace: Option<usize>| -> Vec<Vec<Polynomial>> {
            w.rows
                .iter()
                .map(|&r| (0..c).map(|j| if replace == Some(j) { -&vs[c][r] } else { vs[j][r].clone() }).collect())
                .collect()
        };
        let den = determinant(system(None));
        let mut coeffs = Vec::with_capacity(c);
        for j in 0..c {
            match determinant(system(Some(j))).div_exact(&den) {
                Some(a) => coeffs.push(a),
                None => continue 'seeds,
            }
        }
        let id = |scale: &Polynomial| -> Vec<Vec<Polynomial>> {
            (0..n).map(|i| (0..n).map(|j| if i == j { scale.clone() } else { Polynomial::zero(u) }).collect()).collect()
        };
        let mut acc = id(&Polynomial::one(u));
        for a in coeffs.iter().rev() {
            let mut next = mat_mul(&acc, m);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] = &row[i] + a;
            }
            acc = next;
        }
        if acc.iter().any(|r| r.iter().any(|e| !e.is_zero())) {
            continue;
        }
        let tv = Polynomial::var(tu, t);
        let mut p = Polynomial::one(tu);
        for a in coeffs.iter().rev() {
            p = &(&p * &tv) + &a.embed(tu).expect("parameters embed");
        }
        return Some(p);
    }
    None
}

/// Characteristic polynomial, its squarefree part over the function field
/// (monic in `T`), and the generic number of distinct eigenvalues.
pub fn reduced_char_poly(family: &MatrixFamily) -> (Arc<VarUniverse>, usize, Polynomial, Polynomial, usize) {
    let (tu, t, chi) = char_poly(family);
    let n = family.n();
    // If some specialization already has n distinct roots, χ is squarefree.
    let mut rng = sampling::rng(0x5eed, 1);
    let point = sampling::random_point(&mut rng, family.universe().param_count(), 7, 5);
    if family.distinct_eigenvalues_at(&point) == n {
        return (tu, t, chi.clone(), chi, n);
    }
    let c = family.distinct_eigenvalues_at(&point);
    if let Some(reduced) = krylov_minimal_poly(family, &tu, t, c, &point) {
        return (tu, t, chi, reduced, c);
    }
    let g = gcd(&chi, &chi.derivative(t));
    let reduced = monic_in(&chi.div_exact(&g).expect("gcd divides"), t);
    let s = reduced.degree_in(t) as usize;
    (tu, t, chi, reduced, s)
}

/// Generators of the discriminant ideal: the (sign-corrected) resultant of
/// the reduced characteristic polynomial and its `T`-derivative. Empty when
/// `s_L ≤ 1`.
pub fn discriminant_ideal(reduced: &Polynomial, t: usize, params: &Arc<VarUniverse>) -> Vec<Polynomial> {
    let s = reduced.degree_in(t) as usize;
    if s <= 1 {
        return Vec::new();
    }
    // Integer coefficients keep the elimination free of rational gcds:
    // res(D·r, D·r') = D^(2s−1)·res(r, r').
    let den = reduced.denominator_lcm();
    let scaled = reduced.scale(&den);
    let r = resultant(&scaled, &scaled.derivative(t), t);
    let disc = if (s * (s - 1) / 2) % 2 == 1 { -&r } else { r };
    let lc = reduced.coefficients_in(t).pop().and_then(|c| c.constant_value()).expect("monic in T");
    let undo = (&lc * &den.pow(2 * s as u32 - 1)).inv().expect("nonzero");
    let disc = disc.scale(&undo);
    vec![project_to_params(&disc, params)]
}

fn project_to_params(p: &Polynomial, params: &Arc<VarUniverse>) -> Polynomial {
    p.embed(params).expect("T-free polynomial embeds into the parameter universe")
}

/// Distinct nonzero entries, in row-major order of first appearance.
pub fn coefficient_ideal(family: &MatrixFamily) -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = Vec::new();
    for p in family.entries().iter().flatten() {
        if !p.is_zero() && !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

/// Generic multiplicity tuple. At a point with `s_L` distinct eigenvalues no
/// branches merge, so the multiplicities there are the generic ones; the
/// symbolic squarefree factorization of `χ` is the fallback.
pub fn generic_multiplicities(family: &MatrixFamily, chi: &Polynomial, t: usize, s_l: usize) -> Vec<usize> {
    let n = family.n();
    if s_l == n {
        return vec![1; n];
    }
    let tally = |factors: &[Polynomial], var: usize| {
        let mut out = Vec::new();
        for (k, f) in factors.iter().enumerate() {
            for _ in 0..f.degree_in(var) {
                out.push(k + 1);
            }
        }
        out.sort_unstable();
        out
    };
    let mut rng = sampling::rng(0x5eed, 2);
    for _ in 0..200 {
        let point = sampling::random_point(&mut rng, family.universe().param_count(), 9, 7);
        let local = char_poly_constant(&family.eval_exact(&point));
        let factors = squarefree_factorization(&local, 0);
        let distinct: u32 = factors.iter().map(|f| f.degree_in(0)).sum();
        if distinct as usize == s_l {
            return tally(&factors, 0);
        }
    }
    tally(&squarefree_factorization(chi, t), t)
}

pub fn analyze(family: &MatrixFamily) -> SpectralSummary {
    let (t_universe, t_var, char_poly, reduced, s_l) = reduced_char_poly(family);
    let multiplicities = generic_multiplicities(family, &char_poly, t_var, s_l);
    let disc_gens = discriminant_ideal(&reduced, t_var, family.universe());
    SpectralSummary {
        t_universe,
        t_var,
        char_poly,
        reduced_char_poly: reduced,
        s_l,
        multiplicities,
        disc_gens,
        coeff_ideal_gens: coefficient_ideal(family),
    }
}

/// Entry-wise lookup table used by callers that need the family by name.
pub fn entry_strings(family: &MatrixFamily) -> Vec<Vec<String>> {
    family.entries().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

/// Exact membership test `point ∈ D_L` via distinct eigenvalue count.
pub fn on_discriminant(family: &MatrixFamily, s_l: usize, point: &[Scalar]) -> bool {
    family.distinct_eigenvalues_at(point) < s_l
}

/// Polynomials keyed by canonical string, for order-independent comparisons.
pub fn canonical_set(polys: &[Polynomial]) -> BTreeMap<String, Polynomial> {
    polys.iter().map(|p| {
        let n = p.normalized();
        (n.to_string(), n)
    }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(params: &[&str], rows: &[&[&str]], s: Structure) -> Result<MatrixFamily, FamilyError> {
        let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        MatrixFamily::parse(&params, &rows, s, Field::Rational)
    }

    #[test]
    fn kupa_is_symmetric() {
        let f = fam(&["x", "y"], &[&["x^2", "x*y"], &["x*y", "y^2"]], Structure::Symmetric).unwrap();
        let s = analyze(&f);
        assert_eq!(s.s_l, 2);
        assert_eq!(s.char_poly.to_string(), s.reduced_char_poly.to_string());
        assert_eq!(s.disc_gens.len(), 1);
        assert_eq!(s.disc_gens[0].to_string(), "x^4 + 2*x^2*y^2 + y^4");
        let c: Vec<String> = s.coeff_ideal_gens.iter().map(ToString::to_string).collect();
        assert_eq!(c, vec!["x^2", "x*y", "y^2"]);
    }

    #[test]
    fn non_normal_is_rejected_with_residual() {
        let err = fam(&["x", "y"], &[&["x", "y"], &["0", "x"]], Structure::Normal).unwrap_err();
        match err {
            FamilyError::StructureViolation { row, col, residual, .. } => {
                assert_eq!((row, col), (1, 1));
                assert_eq!(residual, "y^2");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn skew_accepts_any_entry() {
        assert!(fam(&["x", "y"], &[&["0", "x - y^2"], &["-x + y^2", "0"]], Structure::Skew).is_ok());
        assert!(fam(&["x"], &[&["x", "1"], &["-1", "0"]], Structure::Skew).is_err());
    }

    #[test]
    fn scalar_family_has_one_eigenvalue() {
        let f = fam(&["x"], &[&["x^2 + 1", "0"], &["0", "x^2 + 1"]], Structure::Symmetric).unwrap();
        let s = analyze(&f);
        assert_eq!(s.s_l, 1);
        assert!(s.disc_gens.is_empty());
        assert_eq!(s.multiplicities, vec![2]);
        assert_eq!(s.reduced_char_poly.to_string(), "-x^2 + T - 1");
    }

    #[test]
    fn rellich_discriminant() {
        let f = fam(&["x", "y"], &[&["x", "y"], &["y", "-x"]], Structure::Symmetric).unwrap();
        let s = analyze(&f);
        assert_eq!(s.disc_gens[0].to_string(), "4*x^2 + 4*y^2");
    }

    #[test]
    fn diagonal_three() {
        let f = fam(&["x", "y", "z"], &[&["x", "0", "0"], &["0", "y", "0"], &["0", "0", "z"]], Structure::Symmetric)
            .unwrap();
        assert_eq!(analyze(&f).s_l, 3);
    }

    #[test]
    fn hermitian_needs_conjugate_symmetry() {
        let params = vec!["x".to_string()];
        let ok = MatrixFamily::parse(&params, &[vec!["x", "i*x"], vec!["-i*x", "0"]], Structure::Hermitian, Field::Gaussian);
        assert!(ok.is_ok());
        let bad = MatrixFamily::parse(&params, &[vec!["x", "i*x"], vec!["i*x", "0"]], Structure::Hermitian, Field::Gaussian);
        assert!(bad.is_err());
    }
}
