//! Blowup chart trees over coordinate-subspace centers, weak transforms of a
//! generator list, and per-chart principality certification.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    gcd_all, ideal_contains_one, AlgebraError, GroebnerBudget, Polynomial, Scalar, UnitMembership, VarUniverse,
};
use crate::sampling;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolveError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("no chart at address {0:?}")]
    UnknownChart(Vec<usize>),
    #[error("chart {0:?} has already been blown up")]
    NotALeaf(Vec<usize>),
    #[error("a center needs at least two distinct variables, got {0:?}")]
    CenterTooSmall(Vec<String>),
    #[error("variable {var:?} is not a parameter of chart {chart:?}")]
    UnknownVariable { var: String, chart: Vec<usize> },
    #[error("depth cap {0} reached")]
    DepthCap(usize),
    #[error("all pulled generators vanish identically on the chart")]
    DegenerateChart,
}

/// A coordinate-subspace center `{x_c = 0 : c ∈ vars}` in the chart at `chart_path`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterSpec {
    #[serde(rename = "chart")]
    pub chart_path: Vec<usize>,
    #[serde(rename = "center")]
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub center: Vec<String>,
    pub pivot: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChartStatus {
    ResolvedCertified,
    ResolvedProbable { groebner_inconclusive: bool },
    Unresolved { witness: Vec<Scalar> },
    ScalarOperator,
    Inconclusive { reason: String },
}

impl ChartStatus {
    pub fn is_resolved(&self) -> bool {
        matches!(
            self,
            ChartStatus::ResolvedCertified | ChartStatus::ResolvedProbable { .. } | ChartStatus::ScalarOperator
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            ChartStatus::ResolvedCertified => "resolved_certified",
            ChartStatus::ResolvedProbable { .. } => "resolved_probable",
            ChartStatus::Unresolved { .. } => "unresolved",
            ChartStatus::ScalarOperator => "scalar_operator",
            ChartStatus::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// An exceptional divisor `{var = 0}` on a chart, with the order of the
/// local generator along it on every chart of the path since its creation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalRecord {
    pub var: String,
    pub orders: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct ChartNode {
    pub address: Vec<usize>,
    pub path: Vec<PathStep>,
    /// Chart parameters, exceptional coordinates flagged.
    pub universe: Arc<VarUniverse>,
    /// Base parameters as polynomials in the chart coordinates.
    pub to_base: Vec<Polynomial>,
    /// Parent parameters as polynomials in the chart coordinates (empty at the root).
    pub to_parent: Vec<Polynomial>,
    /// Parent center variable → chart variable.
    pub rename: BTreeMap<String, String>,
    pub exceptional: Vec<ExceptionalRecord>,
    pub pulled_minors: Vec<Polynomial>,
    pub local_generator: Polynomial,
    pub weak_gens: Vec<Polynomial>,
    pub status: ChartStatus,
    pub warnings: Vec<String>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

impl ChartNode {
    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Base point of an exact chart point.
    pub fn base_point(&self, point: &[Scalar]) -> Vec<Scalar> {
        self.to_base.iter().map(|p| p.eval(point)).collect()
    }

    pub fn base_point_f64(&self, point: &[f64]) -> Vec<f64> {
        self.to_base.iter().map(|p| p.eval_f64(point)).collect()
    }

    pub fn exceptional_indices(&self) -> Vec<usize> {
        (0..self.universe.param_count()).filter(|&k| self.universe.is_exceptional(self.universe.name(k))).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ResolveOptions {
    pub seed: u64,
    pub depth_cap: usize,
    pub budget: GroebnerBudget,
    pub samples: usize,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { seed: 42, depth_cap: 6, budget: GroebnerBudget::default(), samples: 2000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeVerdict {
    Resolved,
    Unresolved,
    Inconclusive,
    ScalarOperator,
}

#[derive(Clone, Debug)]
pub struct ChartTree {
    pub base: Arc<VarUniverse>,
    pub gens: Vec<Polynomial>,
    pub nodes: Vec<ChartNode>,
    pub options: ResolveOptions,
    reserved: BTreeSet<String>,
}

/// `g = gcd(pulled)` and the exact quotients.
pub fn weak_transform(pulled: &[Polynomial]) -> Result<(Polynomial, Vec<Polynomial>), ResolveError> {
    let g = gcd_all(pulled.iter()).ok_or(ResolveError::DegenerateChart)?;
    if g.is_zero() {
        return Err(ResolveError::DegenerateChart);
    }
    let weak = pulled.iter().map(|p| p.div_exact(&g).expect("gcd divides every generator")).collect();
    Ok((g, weak))
}

impl ChartTree {
    /// Root chart for `gens` over `base`. An empty generator list denotes a
    /// scalar operator. `reserved` names are never used for chart coordinates.
    pub fn new(
        base: &Arc<VarUniverse>,
        gens: Vec<Polynomial>,
        reserved: impl IntoIterator<Item = String>,
        options: ResolveOptions,
    ) -> Self {
        let to_base: Vec<Polynomial> = (0..base.param_count()).map(|k| Polynomial::var(base, k)).collect();
        let exceptional = base.exceptional().iter().map(|v| ExceptionalRecord { var: v.clone(), orders: Vec::new() }).collect();
        let mut root = ChartNode {
            address: Vec::new(),
            path: Vec::new(),
            universe: base.clone(),
            to_base,
            to_parent: Vec::new(),
            rename: BTreeMap::new(),
            exceptional,
            pulled_minors: gens.clone(),
            local_generator: Polynomial::one(base),
            weak_gens: Vec::new(),
            status: ChartStatus::ScalarOperator,
            warnings: Vec::new(),
            children: Vec::new(),
            parent: None,
        };
        finish_node(&mut root, &options);
        let mut reserved: BTreeSet<String> = reserved.into_iter().collect();
        reserved.extend(base.params().iter().cloned());
        ChartTree { base: base.clone(), gens, nodes: vec![root], options, reserved }
    }

    pub fn root(&self) -> &ChartNode {
        &self.nodes[0]
    }

    pub fn find(&self, address: &[usize]) -> Option<usize> {
        let mut idx = 0;
        for &k in address {
            idx = *self.nodes[idx].children.get(k)?;
        }
        Some(idx)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &ChartNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn verdict(&self) -> TreeVerdict {
        if self.gens.is_empty() {
            return TreeVerdict::ScalarOperator;
        }
        let mut inconclusive = false;
        for leaf in self.leaves() {
            match leaf.status {
                ChartStatus::Unresolved { .. } => return TreeVerdict::Unresolved,
                ChartStatus::Inconclusive { .. } => inconclusive = true,
                _ => {}
            }
        }
        if inconclusive { TreeVerdict::Inconclusive } else { TreeVerdict::Resolved }
    }

    fn fresh_names(&self, node: &ChartNode, count: usize) -> Vec<String> {
        const POOL: [&str; 6] = ["u", "v", "w", "s", "t", "r"];
        let depth = node.depth() + 1;
        let taken: BTreeSet<&str> = node.universe.params().iter().map(String::as_str).collect();
        let mut out = Vec::with_capacity(count);
        let letters = POOL.iter().map(|s| s.to_string()).chain(('a'..='z').map(String::from));
        for stem in letters {
            if out.len() == count {
                break;
            }
            let name = if depth == 1 { stem } else { format!("{stem}{depth}") };
            if name != "i" && !taken.contains(name.as_str()) && !self.reserved.contains(&name) {
                out.push(name);
            }
        }
        assert_eq!(out.len(), count, "ran out of fresh chart names");
        out
    }

    /// Blow up the leaf at `spec.chart_path` along `spec.vars`, creating one
    /// chart per pivot variable. Returns the new node indices.
    pub fn blowup(&mut self, spec: &CenterSpec) -> Result<Vec<usize>, ResolveError> {
        let idx = self.find(&spec.chart_path).ok_or_else(|| ResolveError::UnknownChart(spec.chart_path.clone()))?;
        let node = &self.nodes[idx];
        if !node.is_leaf() {
            return Err(ResolveError::NotALeaf(spec.chart_path.clone()));
        }
        let distinct: BTreeSet<&String> = spec.vars.iter().collect();
        if spec.vars.len() < 2 || distinct.len() != spec.vars.len() {
            return Err(ResolveError::CenterTooSmall(spec.vars.clone()));
        }
        for v in &spec.vars {
            if node.universe.index_of(v).is_none() {
                return Err(ResolveError::UnknownVariable { var: v.clone(), chart: spec.chart_path.clone() });
            }
        }
        if node.depth() >= self.options.depth_cap {
            return Err(ResolveError::DepthCap(self.options.depth_cap));
        }

        let mut warnings = Vec::new();
        if !center_in_zero_set(node, &spec.vars) {
            warnings.push(format!(
                "center {{{}}} is not contained in the zero set of the weak generators",
                spec.vars.join(", ")
            ));
        }
        let fresh = self.fresh_names(node, spec.vars.len());
        let rename: BTreeMap<String, String> = spec.vars.iter().cloned().zip(fresh).collect();

        let children: Vec<ChartNode> = spec
            .vars
            .par_iter()
            .enumerate()
            .map(|(k, pivot)| {
                let mut child = make_child(node, &spec.vars, pivot, &rename, &self.gens)?;
                child.address = spec.chart_path.iter().copied().chain([k]).collect();
                child.parent = Some(idx);
                child.warnings = warnings.clone();
                finish_node(&mut child, &self.options);
                Ok(child)
            })
            .collect::<Result<_, ResolveError>>()?;
        let mut ids = Vec::new();
        for c in children {
            self.nodes.push(c);
            ids.push(self.nodes.len() - 1);
        }
        self.nodes[idx].children = ids.clone();
        Ok(ids)
    }

    /// Apply a sequence of centers in order.
    pub fn run_sequence(&mut self, seq: &[CenterSpec]) -> Result<TreeVerdict, ResolveError> {
        for spec in seq {
            self.blowup(spec)?;
        }
        Ok(self.verdict())
    }

    /// Check sibling charts of `parent` against each other on their overlap
    /// at `points` random points: equal base points, and weak generators
    /// proportional with the common ratio `g_B / g_A`.
    pub fn overlap_check(&self, parent: usize, points: usize) -> OverlapReport {
        let kids = &self.nodes[parent].children;
        let mut report = OverlapReport::default();
        let mut rng = sampling::rng(self.options.seed, 0x0e71 + parent as u64);
        for a in 0..kids.len() {
            for b in 0..kids.len() {
                if a == b {
                    continue;
                }
                let (na, nb) = (&self.nodes[kids[a]], &self.nodes[kids[b]]);
                report.pairs += 1;
                let mut done = 0;
                let mut attempts = 0;
                while done < points && attempts < points * 20 {
                    attempts += 1;
                    let pa = sampling::random_point(&mut rng, na.universe.param_count(), 9, 7);
                    let Some(pb) = overlap_point(&self.nodes[parent], na, nb, &pa) else { continue };
                    done += 1;
                    report.points += 1;
                    if !overlap_consistent(na, nb, &pa, &pb) {
                        report.failures += 1;
                    }
                }
            }
        }
        report
    }

    /// Smallest coordinate subspace containing the rational common zeros of
    /// the weak generators found on the candidate grid; `None` unless it has
    /// codimension at least two.
    pub fn propose_center(&self, node: usize) -> Option<Vec<String>> {
        let n = &self.nodes[node];
        let k = n.universe.param_count();
        let zeros: Vec<Vec<Scalar>> = sampling::candidate_grid(k, 4096)
            .into_iter()
            .filter(|p| n.weak_gens.iter().all(|g| g.eval(p).is_zero()))
            .collect();
        if zeros.is_empty() {
            return None;
        }
        let vars: Vec<String> = (0..k)
            .filter(|&c| zeros.iter().all(|p| p[c].is_zero()))
            .map(|c| n.universe.name(c).to_string())
            .collect();
        (vars.len() >= 2).then_some(vars)
    }

    /// A copy of chart `node` whose pulled generators, weak transform and
    /// status are recomputed for `gens` (base polynomials).
    pub fn node_for_gens(&self, node: usize, gens: &[Polynomial]) -> ChartNode {
        let mut out = self.nodes[node].clone();
        out.pulled_minors = gens.iter().map(|g| g.compose(&out.to_base, &out.universe)).collect();
        out.weak_gens = Vec::new();
        out.warnings = Vec::new();
        for r in out.exceptional.iter_mut() {
            r.orders.pop();
        }
        finish_node(&mut out, &self.options);
        out
    }

    /// Every chart satisfies `g · weak_k = pulled_k` exactly.
    pub fn exactness_holds(&self) -> bool {
        self.nodes.iter().all(|n| {
            n.weak_gens.is_empty()
                || n.weak_gens.iter().zip(&n.pulled_minors).all(|(w, p)| &(&n.local_generator * w) == p)
        })
    }

    /// On children whose parent center lay in the parent's weak zero set, the
    /// local generator has positive order along the new exceptional variable.
    pub fn monotonicity_holds(&self) -> bool {
        self.nodes.iter().filter(|n| n.parent.is_some()).all(|n| {
            let parent = &self.nodes[n.parent.expect("checked")];
            let step = n.path.last().expect("non-root");
            if !center_in_zero_set(parent, &step.center) || n.weak_gens.is_empty() {
                return true;
            }
            let e = n.rename[&step.pivot].as_str();
            let idx = n.universe.index_of(e).expect("exceptional var");
            n.local_generator.order_in(idx) >= 1
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OverlapReport {
    pub pairs: usize,
    pub points: usize,
    pub failures: usize,
}

fn center_in_zero_set(node: &ChartNode, center: &[String]) -> bool {
    node.weak_gens.iter().all(|g| {
        center.iter().fold(g.clone(), |acc, v| {
            let idx = node.universe.index_of(v).expect("validated");
            acc.specialize(idx, &Scalar::zero())
        })
        .is_zero()
    })
}

fn make_child(
    parent: &ChartNode,
    center: &[String],
    pivot: &str,
    rename: &BTreeMap<String, String>,
    gens: &[Polynomial],
) -> Result<ChartNode, ResolveError> {
    let pu = &parent.universe;
    let params: Vec<String> =
        pu.params().iter().map(|p| rename.get(p).cloned().unwrap_or_else(|| p.clone())).collect();
    let new_exc = rename[pivot].clone();
    let mut exc: BTreeSet<String> = pu
        .exceptional()
        .iter()
        .filter(|v| v.as_str() != pivot)
        .map(|v| rename.get(v).cloned().unwrap_or_else(|| v.clone()))
        .collect();
    exc.insert(new_exc.clone());
    let universe = VarUniverse::with_exceptional(params, Vec::<String>::new(), exc)?;
    let pivot_var = Polynomial::var_named(&universe, &new_exc)?;
    let to_parent: Vec<Polynomial> = pu
        .params()
        .iter()
        .map(|p| {
            let name = rename.get(p).cloned().unwrap_or_else(|| p.clone());
            let v = Polynomial::var_named(&universe, &name).expect("renamed parameter");
            if p == pivot || !center.contains(p) { v } else { &pivot_var * &v }
        })
        .collect();
    let to_base: Vec<Polynomial> = parent.to_base.iter().map(|b| b.compose(&to_parent, &universe)).collect();
    let pulled: Vec<Polynomial> = gens.iter().map(|g| g.compose(&to_base, &universe)).collect();
    let mut exceptional: Vec<ExceptionalRecord> = parent
        .exceptional
        .iter()
        .filter(|r| r.var != pivot)
        .map(|r| ExceptionalRecord { var: rename.get(&r.var).cloned().unwrap_or_else(|| r.var.clone()), orders: r.orders.clone() })
        .collect();
    exceptional.push(ExceptionalRecord { var: new_exc, orders: Vec::new() });
    let mut path = parent.path.clone();
    path.push(PathStep { center: center.to_vec(), pivot: pivot.to_string() });
    Ok(ChartNode {
        address: Vec::new(),
        path,
        universe,
        to_base,
        to_parent,
        rename: rename.clone(),
        exceptional,
        pulled_minors: pulled,
        local_generator: Polynomial::one(&parent.universe),
        weak_gens: Vec::new(),
        status: ChartStatus::ScalarOperator,
        warnings: Vec::new(),
        children: Vec::new(),
        parent: None,
    })
}

fn finish_node(node: &mut ChartNode, options: &ResolveOptions) {
    if node.pulled_minors.is_empty() {
        node.local_generator = Polynomial::one(&node.universe);
        node.status = ChartStatus::ScalarOperator;
        return;
    }
    match weak_transform(&node.pulled_minors) {
        Ok((g, weak)) => {
            node.local_generator = g;
            node.weak_gens = weak;
            node.status = principality_status(&node.weak_gens, &node.universe, options, &node.address);
        }
        Err(_) => {
            node.local_generator = Polynomial::zero(&node.universe);
            node.status = ChartStatus::ScalarOperator;
            node.warnings.push("all pulled generators vanish: the family is scalar on this chart".into());
        }
    }
    let g = node.local_generator.clone();
    for r in node.exceptional.iter_mut() {
        let idx = node.universe.index_of(&r.var).expect("exceptional var in chart");
        r.orders.push(if g.is_zero() { 0 } else { g.order_in(idx) });
    }
}

/// Certify that the weak generators have no common real zero.
pub fn principality_status(
    weak: &[Polynomial],
    universe: &Arc<VarUniverse>,
    options: &ResolveOptions,
    address: &[usize],
) -> ChartStatus {
    let groebner = ideal_contains_one(weak, options.budget);
    if groebner.is_yes() {
        return ChartStatus::ResolvedCertified;
    }
    let stream = address.iter().fold(0x9e37u64, |h, &k| h.wrapping_mul(31).wrapping_add(k as u64 + 1));
    if let Some(w) = witness_search(weak, universe.param_count(), options.seed, stream, options.samples) {
        return ChartStatus::Unresolved { witness: w };
    }
    match groebner {
        UnitMembership::No { .. } => match numeric_real_zero(weak, universe.param_count(), options.seed, stream) {
            Some(approx) => match rationalize_zero(weak, &approx) {
                Some(w) => ChartStatus::Unresolved { witness: w },
                None => ChartStatus::Inconclusive {
                    reason: format!("numerical common real zero near {approx:?} without a rational witness"),
                },
            },
            None => ChartStatus::ResolvedProbable { groebner_inconclusive: false },
        },
        UnitMembership::Inconclusive { .. } => ChartStatus::ResolvedProbable { groebner_inconclusive: true },
        UnitMembership::Yes { .. } => unreachable!(),
    }
}

/// Candidate grid first, then seeded random rationals.
fn witness_search(weak: &[Polynomial], dim: usize, seed: u64, stream: u64, samples: usize) -> Option<Vec<Scalar>> {
    let is_zero = |p: &[Scalar]| weak.iter().all(|g| g.eval(p).is_zero());
    let grid = sampling::candidate_grid(dim, 2401);
    if let Some(p) = grid.par_iter().find_first(|p| is_zero(p)) {
        return Some(p.clone());
    }
    let mut rng = sampling::rng(seed, stream);
    let random: Vec<Vec<Scalar>> = (0..samples).map(|_| sampling::random_point(&mut rng, dim, 12, 6)).collect();
    random.par_iter().find_first(|p| is_zero(p)).cloned()
}

/// Levenberg–Marquardt on `Σ g_k²` from seeded starts; returns a point with
/// `max |g_k| ≤ 1e-12` if one is found.
fn numeric_real_zero(weak: &[Polynomial], dim: usize, seed: u64, stream: u64) -> Option<Vec<f64>> {
    if dim == 0 {
        return None;
    }
    let grads: Vec<Vec<Polynomial>> = weak.iter().map(|g| (0..dim).map(|k| g.derivative(k)).collect()).collect();
    let mut rng = sampling::rng(seed, stream ^ 0x1f);
    let starts: Vec<Vec<f64>> =
        (0..40).map(|_| sampling::random_point(&mut rng, dim, 20, 10).iter().map(Scalar::to_f64).collect()).collect();
    starts.par_iter().find_map_first(|start| {
        let mut x = start.clone();
        let mut mu = 1e-3;
        let resid = |x: &[f64]| weak.iter().map(|g| g.eval_f64(x)).collect::<Vec<_>>();
        let cost = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
        let mut r = resid(&x);
        for _ in 0..200 {
            let c = cost(&r);
            if c.sqrt() <= 1e-13 {
                break;
            }
            let jac: Vec<Vec<f64>> = grads.iter().map(|row| row.iter().map(|d| d.eval_f64(&x)).collect()).collect();
            let mut a = vec![vec![0.0; dim]; dim];
            let mut rhs = vec![0.0; dim];
            for (jr, rv) in jac.iter().zip(&r) {
                for i in 0..dim {
                    rhs[i] -= jr[i] * rv;
                    for j in 0..dim {
                        a[i][j] += jr[i] * jr[j];
                    }
                }
            }
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += mu * (1.0 + row[i]);
            }
            let Some(step) = solve_small(a, rhs) else { break };
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let rt = resid(&trial);
            if cost(&rt) < c {
                x = trial;
                r = rt;
                mu = (mu * 0.3).max(1e-15);
            } else {
                mu *= 10.0;
                if mu > 1e12 {
                    break;
                }
            }
        }
        let scale = 1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        (r.iter().all(|v| v.abs() <= 1e-12 * scale.powi(8)) && x.iter().all(|v| v.is_finite() && v.abs() < 1e6))
            .then_some(x)
    })
}

fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Continued-fraction rounding of each coordinate (denominators ≤ 1000),
/// accepted only if it is an exact common zero.
fn rationalize_zero(weak: &[Polynomial], approx: &[f64]) -> Option<Vec<Scalar>> {
    let p: Vec<Scalar> = approx.iter().map(|&x| best_rational(x, 1000)).collect();
    weak.iter().all(|g| g.eval(&p).is_zero()).then_some(p)
}

fn best_rational(x: f64, max_den: i64) -> Scalar {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 { Scalar::zero() } else { Scalar::from_ratio(h1, k1) }
}

/// Coordinates in chart `b` of the point `pa` of sibling chart `a`, if it lies
/// on their overlap.
pub fn overlap_point(parent: &ChartNode, a: &ChartNode, b: &ChartNode, pa: &[Scalar]) -> Option<Vec<Scalar>> {
    let x: Vec<Scalar> = a.to_parent.iter().map(|p| p.eval(pa)).collect();
    let step = b.path.last()?;
    let pu = &parent.universe;
    let t = pu.index_of(&step.pivot)?;
    if x[t].is_zero() {
        return None;
    }
    let out: Vec<Scalar> = (0..pu.param_count())
        .map(|k| {
            let name = pu.name(k);
            if k == t || !step.center.iter().any(|c| c == name) { x[k].clone() } else { x[k].checked_div(&x[t]).expect("nonzero") }
        })
        .collect();
    // Chart b lists its coordinates in the parent's parameter order.
    Some(out)
}

fn overlap_consistent(a: &ChartNode, b: &ChartNode, pa: &[Scalar], pb: &[Scalar]) -> bool {
    if a.base_point(pa) != b.base_point(pb) {
        return false;
    }
    let ga = a.local_generator.eval(pa);
    let gb = b.local_generator.eval(pb);
    if ga.is_zero() || gb.is_zero() {
        // Off the overlap's generic part; nothing to compare.
        return true;
    }
    let expected = gb.checked_div(&ga).expect("nonzero");
    a.weak_gens.iter().zip(&b.weak_gens).all(|(wa, wb)| {
        let va = wa.eval(pa);
        let vb = wb.eval(pb);
        &va == &(&expected * &vb)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_polynomial, Field};

    fn tree(params: &[&str], gens: &[&str]) -> ChartTree {
        let u = VarUniverse::new(params.iter().map(|s| s.to_string()), Vec::<String>::new()).unwrap();
        let gens = gens.iter().map(|g| parse_polynomial(g, &u, Field::Rational).unwrap()).collect();
        ChartTree::new(&u, gens, Vec::<String>::new(), ResolveOptions::default())
    }

    fn center(path: &[usize], vars: &[&str]) -> CenterSpec {
        CenterSpec { chart_path: path.to_vec(), vars: vars.iter().map(|s| s.to_string()).collect() }
    }

    #[test]
    fn kupa_root_is_unresolved_at_origin() {
        let t = tree(&["x", "y"], &["x*y", "x^2 - y^2"]);
        match &t.root().status {
            ChartStatus::Unresolved { witness } => assert!(witness.iter().all(Scalar::is_zero)),
            s => panic!("{s:?}"),
        }
        assert_eq!(t.propose_center(0), Some(vec!["x".to_string(), "y".to_string()]));
    }

    #[test]
    fn kupa_point_blowup() {
        let mut t = tree(&["x", "y"], &["x*y", "x^2 - y^2"]);
        let verdict = t.run_sequence(&[center(&[], &["x", "y"])]).unwrap();
        assert_eq!(verdict, TreeVerdict::Resolved);
        let c0 = &t.nodes[t.find(&[0]).unwrap()];
        let c1 = &t.nodes[t.find(&[1]).unwrap()];
        assert_eq!(c0.local_generator.to_string(), "u^2");
        assert_eq!(c1.local_generator.to_string(), "v^2");
        let w0: Vec<String> = c0.weak_gens.iter().map(ToString::to_string).collect();
        let w1: Vec<String> = c1.weak_gens.iter().map(ToString::to_string).collect();
        assert_eq!(w0, vec!["v", "-v^2 + 1"]);
        assert_eq!(w1, vec!["u", "u^2 - 1"]);
        assert_eq!(c0.status, ChartStatus::ResolvedCertified);
        assert_eq!(c1.status, ChartStatus::ResolvedCertified);
        assert!(t.exactness_holds());
        assert!(t.monotonicity_holds());
        let ov = t.overlap_check(0, 20);
        assert_eq!(ov.failures, 0);
        assert_eq!(ov.points, 40);
    }

    #[test]
    fn rellich_blowup_resolves() {
        let mut t = tree(&["x", "y"], &["y", "x"]);
        assert_eq!(t.run_sequence(&[center(&[], &["x", "y"])]).unwrap(), TreeVerdict::Resolved);
    }

    #[test]
    fn principal_root_needs_no_blowup() {
        let t = tree(&["x", "y"], &["x - y"]);
        assert_eq!(t.root().local_generator.to_string(), "x - y");
        assert_eq!(t.root().status, ChartStatus::ResolvedCertified);
    }

    #[test]
    fn off_center_blowup_extracts_nothing() {
        // Generators {x - 1, y} vanish only at (1, 0); the origin is off the zero set.
        let mut t = tree(&["x", "y"], &["x - 1", "y"]);
        t.blowup(&center(&[], &["x", "y"])).unwrap();
        let c0 = &t.nodes[1];
        assert_eq!(c0.local_generator.to_string(), "1");
        assert!(!c0.warnings.is_empty());
    }

    #[test]
    fn irrational_real_zero_is_not_certified() {
        let t = tree(&["x"], &["x^2 - 2"]);
        assert_eq!(t.root().status, ChartStatus::ResolvedCertified);
        let t2 = tree(&["x", "y"], &["x^2 - 2", "y"]);
        assert!(matches!(t2.root().status, ChartStatus::Inconclusive { .. }), "{:?}", t2.root().status);
    }

    #[test]
    fn complex_only_zeros_are_probable() {
        let t = tree(&["x", "y"], &["x^2 + 1", "y"]);
        assert_eq!(t.root().status, ChartStatus::ResolvedProbable { groebner_inconclusive: false });
    }

    #[test]
    fn errors_are_reported() {
        let mut t = tree(&["x", "y"], &["x*y", "x^2 - y^2"]);
        assert!(matches!(t.blowup(&center(&[], &["x"])), Err(ResolveError::CenterTooSmall(_))));
        assert!(matches!(t.blowup(&center(&[3], &["x", "y"])), Err(ResolveError::UnknownChart(_))));
        assert!(matches!(t.blowup(&center(&[], &["x", "z"])), Err(ResolveError::UnknownVariable { .. })));
        t.blowup(&center(&[], &["x", "y"])).unwrap();
        assert!(matches!(t.blowup(&center(&[], &["x", "y"])), Err(ResolveError::NotALeaf(_))));
    }

    #[test]
    fn second_level_names() {
        let mut t = tree(&["x", "y", "z"], &["x*y*z", "x^2 - y^2 + z^2"]);
        t.blowup(&center(&[], &["x", "y", "z"])).unwrap();
        t.blowup(&center(&[0], &["u", "v"])).unwrap();
        let deep = &t.nodes[t.find(&[0, 1]).unwrap()];
        assert_eq!(deep.universe.params(), &["u2".to_string(), "v2".to_string(), "w".to_string()]);
        assert!(t.exactness_holds());
    }
}
