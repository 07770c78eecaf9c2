//! Plücker sections on resolved charts, bouquet extraction at chart points,
//! labeled local frames over grids, and directional limit tests.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::matrix::scalar_rank;
use crate::algebra::Scalar;
use crate::bouquet::{form_gradient_f64, form_matrix_f64, FittingIdeal, QuadSystem};
use crate::family::{on_discriminant, FamilyError, MatrixFamily, SpectralSummary};
use crate::oracle::{
    cluster_and_multiplicities, dot, eigh_jacobi, extrapolate_along_curve, gram_deviation, mat_vec, norm,
    optimal_matching, orthonormalize, principal_angles, procrustes_align, subspace_distance, Basis,
    ExtrapolationConfig, LimitBases, Matrix, OracleError,
};
use crate::resolve::{ChartNode, ChartStatus};
use crate::sampling;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("chart {0:?} is not resolved")]
    Unresolved(Vec<usize>),
    #[error("all Plücker coordinates vanish at {0:?}")]
    PluckerVanishes(Vec<f64>),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("no convergent curve at {point:?} after {attempts} directions")]
    Extrapolation { point: Vec<f64>, attempts: usize },
}

#[derive(Clone, Debug)]
pub struct FrameConfig {
    pub tau_cluster: f64,
    pub tau_angle: f64,
    pub tau_residual: f64,
    pub vanish_tol: f64,
    /// Tolerance for agreement with extrapolated limits on the discriminant.
    pub tau_limit: f64,
    pub extrapolation: ExtrapolationConfig,
    pub rotations: usize,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            tau_cluster: 1e-6,
            tau_angle: 1e-8,
            tau_residual: 1e-8,
            vanish_tol: 1e-7,
            tau_limit: 1e-6,
            extrapolation: ExtrapolationConfig::default(),
            rotations: 12,
        }
    }
}

/// Weak Plücker coordinates of the quadratic space on one chart.
#[derive(Clone, Debug)]
pub struct PluckerSection {
    pub family: MatrixFamily,
    pub chart: ChartNode,
    pub quads: QuadSystem,
    pub s_l: usize,
    pub generic_multiplicities: Vec<usize>,
    coords: BTreeMap<(Vec<usize>, Vec<usize>), (usize, Scalar)>,
}

fn inversions(v: &[usize]) -> usize {
    (0..v.len()).map(|i| (i + 1..v.len()).filter(|&j| v[i] > v[j]).count()).sum()
}

impl PluckerSection {
    /// `fitting` may be `None` only for scalar families.
    pub fn new(
        family: &MatrixFamily,
        summary: &SpectralSummary,
        quads: &QuadSystem,
        fitting: Option<&FittingIdeal>,
        chart: &ChartNode,
    ) -> Result<Self, FrameError> {
        if !chart.status.is_resolved() {
            return Err(FrameError::Unresolved(chart.address.clone()));
        }
        let coords = match fitting {
            Some(f) => f.minors.iter().map(|m| ((m.rows.clone(), m.cols.clone()), (m.gen, m.factor.clone()))).collect(),
            None => BTreeMap::new(),
        };
        Ok(PluckerSection {
            family: family.clone(),
            chart: chart.clone(),
            quads: quads.clone(),
            s_l: summary.s_l,
            generic_multiplicities: summary.multiplicities.clone(),
            coords,
        })
    }

    pub fn d_l(&self) -> usize {
        self.quads.d_l
    }

    pub fn num_coords(&self) -> usize {
        self.coords.len()
    }

    /// Real fiber dimension.
    pub fn m(&self) -> usize {
        self.quads.m
    }

    pub fn weak_values(&self, p: &[Scalar]) -> Vec<Scalar> {
        self.chart.weak_gens.iter().map(|w| w.eval(p)).collect()
    }

    fn coordinate(&self, rows: &[usize], cols: &[usize], weak: &[Scalar]) -> Scalar {
        match self.coords.get(&(rows.to_vec(), cols.to_vec())) {
            Some((gen, factor)) => factor * &weak[*gen],
            None => Scalar::zero(),
        }
    }

    /// The limit quadratic space at a chart point, as `d_L` coefficient rows
    /// in reduced form on the columns of the largest nonvanishing coordinate.
    pub fn recovered_space(&self, p: &[Scalar]) -> Result<Vec<Vec<Scalar>>, FrameError> {
        let d = self.d_l();
        if d == 0 {
            return Ok(Vec::new());
        }
        let weak = self.weak_values(p);
        let best = self
            .coords
            .iter()
            .map(|((r, c), (g, f))| ((r, c), f * &weak[*g]))
            .filter(|(_, v)| !v.is_zero())
            .max_by(|a, b| a.1.to_c64().norm().total_cmp(&b.1.to_c64().norm()));
        let Some(((rows, c0), pivot)) = best else {
            return Err(FrameError::PluckerVanishes(p.iter().map(Scalar::to_f64).collect()));
        };
        let ncols = self.quads.num_cols();
        let mut out = vec![vec![Scalar::zero(); ncols]; d];
        for (k, row) in out.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                if c0.contains(&c) {
                    if c == c0[k] {
                        *slot = Scalar::one();
                    }
                    continue;
                }
                let mut unsorted = c0.clone();
                unsorted[k] = c;
                let mut sorted = unsorted.clone();
                sorted.sort_unstable();
                let v = self.coordinate(rows, &sorted, &weak);
                if v.is_zero() {
                    continue;
                }
                let v = v.checked_div(&pivot).expect("nonzero pivot");
                *slot = if inversions(&unsorted) % 2 == 1 { &Scalar::zero() - &v } else { v };
            }
        }
        Ok(out)
    }

    /// Rows of [`recovered_space`](Self::recovered_space) in binary64, each
    /// scaled to unit Euclidean norm. Complex coefficients are not expected
    /// here: the realified system has real coefficients.
    pub fn recovered_space_f64(&self, p: &[Scalar]) -> Result<Matrix, FrameError> {
        Ok(self
            .recovered_space(p)?
            .iter()
            .map(|row| {
                let v: Vec<f64> = row.iter().map(Scalar::to_f64).collect();
                let n = norm(&v);
                v.into_iter().map(|x| x / n).collect()
            })
            .collect())
    }

    /// Whether the recovered space equals the span of the quadratics
    /// evaluated at the base point (expected off the discriminant).
    pub fn matches_quadratics_at(&self, p: &[Scalar]) -> Result<bool, FrameError> {
        let x = self.chart.base_point(p);
        let mut stacked = self.recovered_space(p)?;
        stacked.extend(self.quads.coeff_matrix_at(&x));
        Ok(scalar_rank(&stacked) == self.d_l())
    }

    pub fn on_discriminant(&self, p: &[Scalar]) -> bool {
        on_discriminant(&self.family, self.s_l, &self.chart.base_point(p))
    }

    pub fn limit_uniqueness_check(&self, p: &[f64], directions: &[Vec<f64>], cfg: &FrameConfig) -> Result<f64, FrameError> {
        limit_spread(&self.family, &self.chart, self.s_l, p, directions, cfg)
    }
}

/// One component of a bouquet.
#[derive(Clone, Debug)]
pub struct Subspace {
    /// Dimension over the family's field.
    pub dim: usize,
    /// Orthonormal basis of the realified fiber subspace.
    pub basis: Basis,
    pub eigenvalue: f64,
    pub eigenvalue_im: f64,
    /// Largest principal angle to the oracle or extrapolated subspace.
    pub seed_angle: f64,
    /// max entry of `Bᵀ S_q B` over the recovered quadratics.
    pub vanishing: f64,
    /// max ‖M r − λ r‖ / (1 + ‖M‖).
    pub invariance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExtractionMethod {
    Oracle,
    Extrapolated { direction: Vec<f64>, attempts: usize, correction: f64 },
}

#[derive(Clone, Debug)]
pub struct BouquetAtPoint {
    pub point: Vec<Scalar>,
    pub point_f64: Vec<f64>,
    pub base_point: Vec<f64>,
    pub on_discriminant: bool,
    pub subspaces: Vec<Subspace>,
    pub method: ExtractionMethod,
    pub gram_deviation: f64,
    /// Whether the recovered space agrees with the evaluated quadratics
    /// (checked off the discriminant only).
    pub span_check: Option<bool>,
}

impl BouquetAtPoint {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.subspaces.iter().map(|s| s.dim).collect()
    }

    pub fn max_seed_angle(&self) -> f64 {
        self.subspaces.iter().map(|s| s.seed_angle).fold(0.0, f64::max)
    }

    pub fn max_vanishing(&self) -> f64 {
        self.subspaces.iter().map(|s| s.vanishing).fold(0.0, f64::max)
    }

    pub fn max_invariance(&self) -> f64 {
        self.subspaces.iter().map(|s| s.invariance).fold(0.0, f64::max)
    }
}

/// Direction `δ_j = cos(θ + 0.7 j)` with `θ = 15° + 30°·attempt`.
pub fn default_direction(k: usize, attempt: usize) -> Vec<f64> {
    let theta = (15.0 + 30.0 * attempt as f64).to_radians();
    (0..k).map(|j| (theta + 0.7 * j as f64).cos()).collect()
}

fn spectral_bases(family: &MatrixFamily, x: &[f64], tau: f64) -> Result<Vec<Basis>, FrameError> {
    let m = family.oracle_matrix(x)?;
    let mut sample = eigh_jacobi(&m, x)?;
    cluster_and_multiplicities(&mut sample, tau);
    Ok(sample.clusters.into_iter().map(|c| c.basis).collect())
}

/// Extrapolated limit bouquet at chart point `p` along `p + t·delta`.
pub fn chart_curve_limit(
    family: &MatrixFamily,
    chart: &ChartNode,
    s_l: usize,
    p: &[f64],
    delta: &[f64],
    cfg: &FrameConfig,
) -> Result<LimitBases, FrameError> {
    let lim = extrapolate_along_curve(
        |t| {
            let q: Vec<f64> = p.iter().zip(delta).map(|(a, d)| a + t * d).collect();
            let x = chart.base_point_f64(&q);
            let bases = spectral_bases(family, &x, cfg.tau_cluster).map_err(|e| OracleError::Extrapolation(e.to_string()))?;
            if bases.len() != s_l {
                return Err(OracleError::Extrapolation(format!("{} components at t = {t:e}, expected {s_l}", bases.len())));
            }
            Ok(bases)
        },
        &cfg.extrapolation,
    )?;
    Ok(lim)
}

/// Largest principal angle between limit bouquets approached along the
/// given chart directions, after optimal component matching. Structurally
/// different limits count as `π/2`.
pub fn limit_spread(
    family: &MatrixFamily,
    chart: &ChartNode,
    s_l: usize,
    p: &[f64],
    directions: &[Vec<f64>],
    cfg: &FrameConfig,
) -> Result<f64, FrameError> {
    let limits: Vec<LimitBases> = directions
        .iter()
        .map(|d| chart_curve_limit(family, chart, s_l, p, d, cfg))
        .collect::<Result<_, _>>()?;
    let mut worst = 0.0f64;
    for a in 0..limits.len() {
        for b in a + 1..limits.len() {
            let (la, lb) = (&limits[a].bases, &limits[b].bases);
            let Some(perm) = optimal_matching(la, lb) else {
                return Ok(std::f64::consts::FRAC_PI_2);
            };
            for (i, &j) in perm.iter().enumerate() {
                worst = worst.max(subspace_distance(&la[i], &lb[j])?);
            }
        }
    }
    Ok(worst)
}

/// Kernel of the Jacobian of the forms at `w`, of dimension `dim`, with the
/// ratio of the first excluded singular value to the largest.
fn jacobian_kernel(forms: &Matrix, m: usize, w: &[f64], dim: usize) -> Result<(Basis, f64), FrameError> {
    let jac: Matrix = forms.iter().map(|c| form_gradient_f64(c, m, w)).collect();
    let mut jtj = vec![vec![0.0; m]; m];
    for row in &jac {
        for i in 0..m {
            for j in 0..m {
                jtj[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            let s = 0.5 * (jtj[i][j] + jtj[j][i]);
            jtj[i][j] = s;
            jtj[j][i] = s;
        }
    }
    let sample = eigh_jacobi(&jtj, &[])?;
    let top = sample.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let gap = if dim < m && top > 0.0 { sample.eigenvalues[dim].max(0.0).sqrt() / top } else { 1.0 };
    Ok((sample.eigenvectors[..dim].to_vec(), gap))
}

fn vanishing_on(forms: &Matrix, m: usize, basis: &Basis) -> f64 {
    let mut worst = 0.0f64;
    for c in forms {
        let s = form_matrix_f64(c, m);
        for a in basis {
            let sa = mat_vec(&s, a);
            for b in basis {
                worst = worst.max(dot(&sa, b).abs());
            }
        }
    }
    worst
}

fn spectral_norm_bound(m: &Matrix) -> f64 {
    m.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn j_rotate(r: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; 2 * n];
    for k in 0..n {
        out[k] = -r[n + k];
        out[n + k] = r[k];
    }
    out
}

/// Sign/phase normal form used for ordering: first coordinate above 1e-12
/// in magnitude made positive.
fn sign_normalize(mut basis: Basis) -> Basis {
    for v in basis.iter_mut() {
        if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    basis
}

fn component_order(a: &Subspace, b: &Subspace) -> std::cmp::Ordering {
    a.dim.cmp(&b.dim).then_with(|| {
        for (x, y) in a.basis[0].iter().zip(&b.basis[0]) {
            let o = y.total_cmp(x);
            if (x - y).abs() > 1e-12 && o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Bouquet of the family at a chart point.
pub fn extract_bouquet_at_point(s: &PluckerSection, p: &[Scalar], cfg: &FrameConfig) -> Result<BouquetAtPoint, FrameError> {
    let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
    let x_exact = s.chart.base_point(p);
    let x: Vec<f64> = x_exact.iter().map(Scalar::to_f64).collect();
    let on_d = s.d_l() > 0 && on_discriminant(&s.family, s.s_l, &x_exact);
    let m = s.m();
    let forms = s.recovered_space_f64(p)?;

    let (seeds, method) = if !on_d {
        (spectral_bases(&s.family, &x, cfg.tau_cluster)?, ExtractionMethod::Oracle)
    } else {
        let k = pf.len();
        let mut found = None;
        for attempt in 0..cfg.rotations.max(1) {
            let delta = default_direction(k, attempt);
            let Ok(lim) = chart_curve_limit(&s.family, &s.chart, s.s_l, &pf, &delta, cfg) else { continue };
            if lim.bases.iter().all(|b| vanishing_on(&forms, m, b) <= cfg.vanish_tol) {
                found = Some((
                    lim.bases,
                    ExtractionMethod::Extrapolated { direction: delta, attempts: attempt + 1, correction: lim.correction },
                ));
                break;
            }
        }
        found.ok_or(FrameError::Extrapolation { point: pf.clone(), attempts: cfg.rotations.max(1) })?
    };

    let model = s.family.real_model(&x);
    let mnorm = spectral_norm_bound(&model);
    let complex = s.family.is_complex();
    let n = s.family.n();
    let mut subspaces = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let dim = seed.len();
        let basis = if forms.is_empty() {
            seed.clone()
        } else {
            let (kernel, gap) = jacobian_kernel(&forms, m, &seed[0], dim)?;
            if gap < 1e-8 { seed.clone() } else { orthonormalize(&kernel, 1e-8) }
        };
        let basis = sign_normalize(basis);
        let seed_angle = principal_angles(&seed, &basis)?.last().copied().unwrap_or(0.0);
        let (mut re, mut im) = (0.0, 0.0);
        for r in &basis {
            let mr = mat_vec(&model, r);
            re += dot(r, &mr);
            if complex {
                im += dot(&j_rotate(r, n), &mr);
            }
        }
        re /= dim as f64;
        im /= dim as f64;
        let invariance = basis
            .iter()
            .map(|r| {
                let mr = mat_vec(&model, r);
                let jr = if complex { j_rotate(r, n) } else { vec![0.0; m] };
                let res: Vec<f64> = (0..m).map(|k| mr[k] - re * r[k] - im * jr[k]).collect();
                norm(&res) / (1.0 + mnorm)
            })
            .fold(0.0, f64::max);
        subspaces.push(Subspace {
            dim: if complex { dim / 2 } else { dim },
            vanishing: vanishing_on(&forms, m, &basis),
            basis,
            eigenvalue: re,
            eigenvalue_im: im,
            seed_angle,
            invariance,
        });
    }
    subspaces.sort_by(component_order);
    let all: Basis = subspaces.iter().flat_map(|c| c.basis.iter().cloned()).collect();
    let span_check = if on_d || s.d_l() == 0 { None } else { Some(s.matches_quadratics_at(p)?) };
    Ok(BouquetAtPoint {
        point: p.to_vec(),
        point_f64: pf,
        base_point: x,
        on_discriminant: on_d,
        gram_deviation: gram_deviation(&all),
        subspaces,
        method,
        span_check,
    })
}

/// Axis-aligned grid in chart coordinates, the same count on every axis.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub count: usize,
}

impl GridSpec {
    pub fn square(k: usize, lo: f64, hi: f64, count: usize) -> Self {
        GridSpec { lo: vec![lo; k], hi: vec![hi; k], count }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn axes(&self) -> Vec<Vec<Scalar>> {
        self.lo.iter().zip(&self.hi).map(|(&a, &b)| sampling::grid_axis(a, b, self.count)).collect()
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let k = self.dim();
        let mut idx = vec![0; k];
        for a in (0..k).rev() {
            idx[a] = flat % self.count;
            flat /= self.count;
        }
        idx
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.count + i)
    }

    /// Exact points in raster order, last axis fastest.
    pub fn points(&self) -> Vec<Vec<Scalar>> {
        let axes = self.axes();
        let total = self.count.pow(self.dim() as u32);
        (0..total).map(|f| self.multi_index(f).iter().enumerate().map(|(a, &i)| axes[a][i].clone()).collect()).collect()
    }

    /// Labeling parent of a raster point: its predecessor along the last
    /// axis with a nonzero index.
    fn parent(&self, flat: usize) -> Option<usize> {
        let mut idx = self.multi_index(flat);
        let a = (0..idx.len()).rev().find(|&a| idx[a] > 0)?;
        idx[a] -= 1;
        Some(self.flat_index(&idx))
    }
}

#[derive(Clone, Debug)]
pub struct FrameReport {
    pub chart: Vec<usize>,
    /// Per point, components reordered so that index = label.
    pub points: Vec<BouquetAtPoint>,
    pub max_oracle_angle: f64,
    pub max_limit_angle: f64,
    pub max_vanishing: f64,
    pub max_invariance: f64,
    pub max_gram_deviation: f64,
    pub smoothness_frame: f64,
    pub smoothness_eigenvalue: f64,
    pub multiplicity_mismatches: usize,
    pub span_mismatches: usize,
    pub ambiguous: bool,
    pub failures: Vec<String>,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn projector(basis: &Basis) -> Vec<f64> {
    let m = basis[0].len();
    let mut p = vec![0.0; m * m];
    for v in basis {
        for i in 0..m {
            for j in 0..m {
                p[i * m + j] += v[i] * v[j];
            }
        }
    }
    p
}

/// Bouquets over a chart grid with consistent labels and continuous signs.
pub fn local_frame_and_eigenvalues(s: &PluckerSection, grid: &GridSpec, cfg: &FrameConfig) -> Result<FrameReport, FrameError> {
    let pts = grid.points();
    let mut bouquets: Vec<BouquetAtPoint> =
        pts.par_iter().map(|p| extract_bouquet_at_point(s, p, cfg)).collect::<Result<_, _>>()?;

    let mut ambiguous = false;
    let mut failures = Vec::new();
    for f in 1..bouquets.len() {
        let parent = grid.parent(f).expect("non-anchor point has a parent");
        let prev: Vec<Basis> = bouquets[parent].subspaces.iter().map(|c| c.basis.clone()).collect();
        let cur: Vec<Basis> = bouquets[f].subspaces.iter().map(|c| c.basis.clone()).collect();
        let Some(perm) = optimal_matching(&prev, &cur) else {
            ambiguous = true;
            failures.push(format!("component structure changes between grid points {parent} and {f}"));
            continue;
        };
        for i in 0..perm.len() {
            let mut ds: Vec<f64> = cur
                .iter()
                .filter(|c| c.len() == prev[i].len())
                .map(|c| subspace_distance(&prev[i], c).unwrap_or(std::f64::consts::FRAC_PI_2))
                .collect();
            ds.sort_by(f64::total_cmp);
            if ds.len() > 1 && ds[1] - ds[0] < 1e-9 {
                ambiguous = true;
            }
        }
        let old = std::mem::take(&mut bouquets[f].subspaces);
        let mut slots: Vec<Option<Subspace>> = old.into_iter().map(Some).collect();
        let mut reordered = Vec::with_capacity(perm.len());
        for (i, &j) in perm.iter().enumerate() {
            let mut c = slots[j].take().expect("permutation");
            c.basis = if c.basis.len() == 1 {
                let sgn = if dot(&c.basis[0], &prev[i][0]) < 0.0 { -1.0 } else { 1.0 };
                vec![c.basis[0].iter().map(|x| sgn * x).collect()]
            } else {
                procrustes_align(&c.basis, &prev[i])
            };
            reordered.push(c);
        }
        bouquets[f].subspaces = reordered;
    }
    if ambiguous && failures.is_empty() {
        failures.push("labeling ambiguity: two components within matching tolerance".into());
    }

    let mut max_oracle_angle = 0.0f64;
    let mut max_limit_angle = 0.0f64;
    let mut multiplicity_mismatches = 0;
    let mut span_mismatches = 0;
    let mut generic = s.generic_multiplicities.clone();
    generic.sort_unstable();
    for b in &bouquets {
        if b.on_discriminant {
            max_limit_angle = max_limit_angle.max(b.max_seed_angle());
        } else {
            max_oracle_angle = max_oracle_angle.max(b.max_seed_angle());
            let mut e = b.multiplicities();
            e.sort_unstable();
            if s.d_l() > 0 && e != generic {
                multiplicity_mismatches += 1;
            }
            if b.span_check == Some(false) {
                span_mismatches += 1;
            }
        }
        if b.multiplicities().iter().sum::<usize>() != s.family.n() {
            failures.push(format!("dimensions do not sum to n at {:?}", b.point_f64));
        }
    }
    let max_vanishing = bouquets.iter().map(BouquetAtPoint::max_vanishing).fold(0.0, f64::max);
    let max_invariance = bouquets.iter().map(BouquetAtPoint::max_invariance).fold(0.0, f64::max);
    let max_gram_deviation = bouquets.iter().map(|b| b.gram_deviation).fold(0.0, f64::max);

    let (mut smoothness_frame, mut smoothness_eigenvalue) = (0.0f64, 0.0f64);
    if grid.count >= 3 {
        for f in 0..bouquets.len() {
            let idx = grid.multi_index(f);
            for a in 0..grid.dim() {
                if idx[a] == 0 || idx[a] + 1 >= grid.count {
                    continue;
                }
                let h = (grid.hi[a] - grid.lo[a]) / (grid.count - 1) as f64;
                let mut lo = idx.clone();
                lo[a] -= 1;
                let mut hi = idx.clone();
                hi[a] += 1;
                let (bl, bc, bh) = (&bouquets[grid.flat_index(&lo)], &bouquets[f], &bouquets[grid.flat_index(&hi)]);
                if bl.subspaces.len() != bc.subspaces.len() || bh.subspaces.len() != bc.subspaces.len() {
                    continue;
                }
                for c in 0..bc.subspaces.len() {
                    let (pl, pc, ph) =
                        (projector(&bl.subspaces[c].basis), projector(&bc.subspaces[c].basis), projector(&bh.subspaces[c].basis));
                    let d2: f64 = pl.iter().zip(&pc).zip(&ph).map(|((l, c), h)| (l - 2.0 * c + h).powi(2)).sum::<f64>().sqrt();
                    smoothness_frame = smoothness_frame.max(d2 / (h * h));
                    let e = |b: &BouquetAtPoint| (b.subspaces[c].eigenvalue, b.subspaces[c].eigenvalue_im);
                    let (l, c0, r) = (e(bl), e(bc), e(bh));
                    let d2e = ((l.0 - 2.0 * c0.0 + r.0).powi(2) + (l.1 - 2.0 * c0.1 + r.1).powi(2)).sqrt();
                    smoothness_eigenvalue = smoothness_eigenvalue.max(d2e / (h * h));
                }
            }
        }
    }

    if max_oracle_angle > cfg.tau_angle {
        failures.push(format!("oracle angle {max_oracle_angle:.3e} exceeds {:.1e}", cfg.tau_angle));
    }
    if max_limit_angle > cfg.tau_limit {
        failures.push(format!("limit angle {max_limit_angle:.3e} exceeds {:.1e}", cfg.tau_limit));
    }
    if max_vanishing > cfg.vanish_tol {
        failures.push(format!("quadratic residual {max_vanishing:.3e} exceeds {:.1e}", cfg.vanish_tol));
    }
    if max_invariance > cfg.tau_residual {
        failures.push(format!("invariance residual {max_invariance:.3e} exceeds {:.1e}", cfg.tau_residual));
    }
    if max_gram_deviation > 1e-10 {
        failures.push(format!("Gram deviation {max_gram_deviation:.3e} exceeds 1e-10"));
    }
    if multiplicity_mismatches > 0 {
        failures.push(format!("{multiplicity_mismatches} generic points with non-generic multiplicities"));
    }
    if span_mismatches > 0 {
        failures.push(format!("{span_mismatches} points where the section disagrees with the quadratics"));
    }
    Ok(FrameReport {
        chart: s.chart.address.clone(),
        points: bouquets,
        max_oracle_angle,
        max_limit_angle,
        max_vanishing,
        max_invariance,
        max_gram_deviation,
        smoothness_frame,
        smoothness_eigenvalue,
        multiplicity_mismatches,
        span_mismatches,
        ambiguous,
        failures,
    })
}

/// Chart status check used before building sections for every leaf.
pub fn resolved_leaves(nodes: &[ChartNode]) -> impl Iterator<Item = &ChartNode> {
    nodes.iter().filter(|n| n.is_leaf() && !matches!(n.status, ChartStatus::Unresolved { .. } | ChartStatus::Inconclusive { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::bouquet::{fitting_minors, wedge_quadratics};
    use crate::family::{analyze, Structure};
    use crate::resolve::{CenterSpec, ChartTree, ResolveOptions};

    struct Setup {
        family: MatrixFamily,
        summary: SpectralSummary,
        quads: QuadSystem,
        fitting: FittingIdeal,
        tree: ChartTree,
    }

    fn setup(rows: &[&[&str]], blowup: bool) -> Setup {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        let family = MatrixFamily::parse(&["x".to_string(), "y".to_string()], &rows, Structure::Symmetric, Field::Rational).unwrap();
        let summary = analyze(&family);
        let quads = wedge_quadratics(&family, None).unwrap();
        let fitting = fitting_minors(&quads).unwrap();
        let mut tree = ChartTree::new(family.universe(), fitting.gens.clone(), Vec::<String>::new(), ResolveOptions::default());
        if blowup {
            tree.blowup(&CenterSpec { chart_path: vec![], vars: vec!["x".into(), "y".into()] }).unwrap();
        }
        Setup { family, summary, quads, fitting, tree }
    }

    fn section(s: &Setup, address: &[usize]) -> PluckerSection {
        let node = &s.tree.nodes[s.tree.find(address).unwrap()];
        PluckerSection::new(&s.family, &s.summary, &s.quads, Some(&s.fitting), node).unwrap()
    }

    fn q(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    const KUPA: &[&[&str]] = &[&["x^2", "x*y"], &["x*y", "y^2"]];

    #[test]
    fn kupa_chart_recovers_expected_quadratic() {
        let s = setup(KUPA, true);
        let sec = section(&s, &[0]);
        // At (u, v) = (1, 2): (1 − v²)·XY + v·(Y² − X²) = −3XY + 2Y² − 2X², up to scale.
        let space = sec.recovered_space(&[q(1), q(2)]).unwrap();
        assert_eq!(space.len(), 1);
        let row = &space[0];
        let ratio = row[1].checked_div(&row[0]).unwrap();
        assert_eq!(ratio, Scalar::from_ratio(3, 2));
        assert_eq!(row[2].checked_div(&row[0]).unwrap(), q(-1));
        // At the exceptional origin only XY survives.
        let space0 = sec.recovered_space(&[q(0), q(0)]).unwrap();
        assert!(space0[0][0].is_zero() && space0[0][2].is_zero() && !space0[0][1].is_zero());
        assert!(sec.matches_quadratics_at(&[q(1), q(2)]).unwrap());
    }

    #[test]
    fn kupa_bouquet_off_and_on_exceptional_set() {
        let s = setup(KUPA, true);
        let sec = section(&s, &[0]);
        let cfg = FrameConfig::default();
        let b = extract_bouquet_at_point(&sec, &[q(1), q(2)], &cfg).unwrap();
        assert!(!b.on_discriminant);
        let vals: Vec<f64> = b.subspaces.iter().map(|c| c.eigenvalue).collect();
        assert!(vals.iter().any(|v| (v - 5.0).abs() < 1e-12) && vals.iter().any(|v| v.abs() < 1e-12));
        assert!(b.max_seed_angle() < 1e-10);

        let b0 = extract_bouquet_at_point(&sec, &[q(0), q(0)], &cfg).unwrap();
        assert!(b0.on_discriminant);
        assert!(matches!(b0.method, ExtractionMethod::Extrapolated { .. }));
        for c in &b0.subspaces {
            let v = &c.basis[0];
            assert!(v[0].abs() < 1e-9 || v[1].abs() < 1e-9, "{v:?}");
        }
        assert!(b0.max_vanishing() < 1e-12);
    }

    #[test]
    fn kupa_frames_over_grid() {
        let s = setup(KUPA, true);
        let sec = section(&s, &[0]);
        let report = local_frame_and_eigenvalues(&sec, &GridSpec::square(2, -1.0, 1.0, 9), &FrameConfig::default()).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        for b in &report.points {
            let (u, v) = (b.point_f64[0], b.point_f64[1]);
            let mut got: Vec<f64> = b.subspaces.iter().map(|c| c.eigenvalue).collect();
            got.sort_by(f64::total_cmp);
            let mut want = vec![0.0, u * u * (1.0 + v * v)];
            want.sort_by(f64::total_cmp);
            assert!((got[0] - want[0]).abs() < 1e-10 && (got[1] - want[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn root_limits_depend_on_direction_before_blowup() {
        let s = setup(KUPA, false);
        let node = s.tree.root();
        let cfg = FrameConfig::default();
        let spread = limit_spread(&s.family, node, 2, &[0.0, 0.0], &[vec![1.0, 0.0], vec![1.0, 1.0]], &cfg).unwrap();
        assert!((spread - std::f64::consts::FRAC_PI_4).abs() < 1e-9, "{spread}");
        let after = setup(KUPA, true);
        let sec = section(&after, &[0]);
        let dirs: Vec<Vec<f64>> = (0..3).map(|a| default_direction(2, a)).collect();
        assert!(sec.limit_uniqueness_check(&[0.0, 1.0], &dirs, &cfg).unwrap() < 1e-6);
    }

    #[test]
    fn unresolved_chart_has_no_section() {
        let s = setup(KUPA, false);
        let err = PluckerSection::new(&s.family, &s.summary, &s.quads, Some(&s.fitting), s.tree.root()).unwrap_err();
        assert_eq!(err, FrameError::Unresolved(vec![]));
    }

    #[test]
    fn grid_parents_form_a_tree() {
        let g = GridSpec::square(2, 0.0, 1.0, 3);
        assert_eq!(g.parent(0), None);
        assert_eq!(g.parent(1), Some(0));
        assert_eq!(g.parent(3), Some(0));
        assert_eq!(g.parent(4), Some(3));
        assert_eq!(g.points().len(), 9);
    }
}
