use serde_json::{json, Map, Value};

use super::config::{ConfigError, JobConfig};
use super::json::canonical_string;
use crate::algebra::{GroebnerBudget, Polynomial, Scalar};
use crate::bouquet::{fitting_minors, wedge_quadratics, FittingIdeal, QuadSystem};
use crate::family::{analyze, canonical_set, MatrixFamily, SpectralSummary, Structure};
use crate::frames::{local_frame_and_eigenvalues, FrameConfig, FrameReport, GridSpec, PluckerSection};
use crate::oracle::{cluster_and_multiplicities, eigh_jacobi};
use crate::realnormal::{
    arcp_extract, complex_eigenvalues, eigenvalue_match_error, plane_invariant_checks, spectrum_pairing_error,
    split_and_double, squared_spectrum_error, SplitFamily,
};
use crate::resolve::{ChartNode, ChartStatus, ChartTree, ResolveError, ResolveOptions, TreeVerdict};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNRESOLVED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Resolve,
    Frames,
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Resolve => "resolve",
            Command::Frames => "frames",
            Command::Check => "check",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: Value,
    pub exit_code: i32,
    pub verdict: String,
}

impl RunOutcome {
    pub fn canonical(&self) -> String {
        canonical_string(&self.report)
    }
}

/// A symmetric-type family analyzed for the pipeline.
#[derive(Clone, Debug)]
pub struct Target {
    pub label: &'static str,
    pub family: MatrixFamily,
    pub summary: SpectralSummary,
    pub quads: QuadSystem,
    pub fitting: Option<FittingIdeal>,
}

impl Target {
    fn new(label: &'static str, family: MatrixFamily, fibers: Option<&[String]>) -> Result<Self, ConfigError> {
        let summary = analyze(&family);
        let quads = wedge_quadratics(&family, fibers).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let fitting = fitting_minors(&quads).ok();
        Ok(Target { label, family, summary, quads, fitting })
    }

    pub fn gens(&self) -> Vec<Polynomial> {
        self.fitting.as_ref().map(|f| f.gens.clone()).unwrap_or_default()
    }

    pub fn summary_json(&self) -> Value {
        let s = &self.summary;
        json!({
            "family": self.label,
            "n": self.family.n(),
            "structure": self.family.structure(),
            "s_l": s.s_l,
            "d_l": self.quads.d_l,
            "multiplicities": s.multiplicities,
            "char_poly": s.char_poly.to_string(),
            "reduced_char_poly": s.reduced_char_poly.to_string(),
            "discriminant": canonical_set(&s.disc_gens).keys().cloned().collect::<Vec<_>>(),
            "fitting": canonical_set(&self.gens()).keys().cloned().collect::<Vec<_>>(),
            "fitting_minors": self.fitting.as_ref().map_or(0, |f| f.minors.len()),
            "quadratics": (0..self.quads.quads.len()).map(|k| self.quads.quad_poly(k).to_string()).collect::<Vec<_>>(),
            "scalar_operator": self.quads.d_l == 0,
        })
    }
}

/// Parsed family, its symmetric targets and the generators driving the chart tree.
#[derive(Clone, Debug)]
pub struct Job {
    pub family: MatrixFamily,
    pub split: Option<SplitFamily>,
    pub targets: Vec<Target>,
    pub tree_gens: Vec<Polynomial>,
}

fn product_gens(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b.to_vec(),
        (_, true) => a.to_vec(),
        _ => {
            let prods: Vec<Polynomial> = a.iter().flat_map(|x| b.iter().map(move |y| (x * y).normalized())).collect();
            let mut seen = std::collections::BTreeSet::new();
            prods.into_iter().filter(|p| seen.insert(p.to_string())).collect()
        }
    }
}

pub fn prepare(cfg: &JobConfig) -> Result<Job, ConfigError> {
    cfg.validate()?;
    let family = MatrixFamily::parse(&cfg.params, &cfg.matrix, cfg.structure, cfg.field)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let real_path = matches!(cfg.structure, Structure::Skew) || (cfg.structure == Structure::Normal && !family.is_complex());
    if real_path {
        let split = split_and_double(&family).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let a = Target::new("A", split.a.clone(), cfg.fibers.as_deref())?;
        let b2 = Target::new("B2", split.b2.clone(), None)?;
        let tree_gens = product_gens(&a.gens(), &b2.gens());
        Ok(Job { family, split: Some(split), targets: vec![a, b2], tree_gens })
    } else {
        let l = Target::new("L", family.clone(), cfg.fibers.as_deref())?;
        let tree_gens = l.gens();
        Ok(Job { family, split: None, targets: vec![l], tree_gens })
    }
}

#[derive(Clone, Debug)]
struct Invariant {
    name: String,
    count: usize,
    failures: usize,
    worst: f64,
    tolerance: f64,
}

impl Invariant {
    fn new(name: &str, tolerance: f64) -> Self {
        Invariant { name: name.into(), count: 0, failures: 0, worst: 0.0, tolerance }
    }

    fn record(&mut self, value: f64) {
        self.count += 1;
        if !(value <= self.tolerance) {
            self.failures += 1;
        }
        if value.is_nan() || value > self.worst {
            self.worst = value;
        }
    }

    fn record_bool(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { 1.0 });
    }

    fn passed(&self) -> bool {
        self.failures == 0
    }

    fn json(&self) -> Value {
        json!({
            "name": self.name,
            "count": self.count,
            "failures": self.failures,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "passed": self.passed(),
        })
    }
}

fn scalars(v: &[Scalar]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn polys(v: &[Polynomial]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn node_json(tree: &ChartTree, idx: usize) -> Value {
    let n = &tree.nodes[idx];
    let mut m = Map::new();
    m.insert("address".into(), json!(n.address));
    m.insert("depth".into(), json!(n.depth()));
    m.insert("leaf".into(), json!(n.is_leaf()));
    m.insert(
        "path".into(),
        Value::Array(n.path.iter().map(|s| json!({"center": s.center, "pivot": s.pivot})).collect()),
    );
    m.insert("params".into(), json!(n.universe.params()));
    m.insert(
        "exceptional".into(),
        Value::Array(n.exceptional.iter().map(|r| json!({"var": r.var, "orders": r.orders})).collect()),
    );
    m.insert("to_base".into(), json!(polys(&n.to_base)));
    m.insert("local_generator".into(), json!(n.local_generator.to_string()));
    m.insert("weak_gens".into(), json!(polys(&n.weak_gens)));
    m.insert("status".into(), json!(n.status.label()));
    match &n.status {
        ChartStatus::Unresolved { witness } => {
            m.insert("witness".into(), json!(scalars(witness)));
            if n.is_leaf() {
                m.insert("proposed_center".into(), json!(tree.propose_center(idx)));
            }
        }
        ChartStatus::ResolvedProbable { groebner_inconclusive } => {
            m.insert("groebner_inconclusive".into(), json!(groebner_inconclusive));
        }
        ChartStatus::Inconclusive { reason } => {
            m.insert("reason".into(), json!(reason));
        }
        _ => {}
    }
    m.insert("warnings".into(), json!(n.warnings));
    Value::Object(m)
}

fn verdict_name(v: TreeVerdict) -> &'static str {
    match v {
        TreeVerdict::Resolved => "resolved",
        TreeVerdict::Unresolved => "unresolved",
        TreeVerdict::Inconclusive => "inconclusive",
        TreeVerdict::ScalarOperator => "scalar_operator",
    }
}

fn frame_json(label: &str, grid: &GridSpec, r: &FrameReport) -> Value {
    let samples: Vec<Value> = r
        .points
        .iter()
        .map(|b| {
            json!({
                "point": b.point_f64,
                "on_discriminant": b.on_discriminant,
                "method": match &b.method {
                    crate::frames::ExtractionMethod::Oracle => json!("oracle"),
                    crate::frames::ExtractionMethod::Extrapolated { direction, attempts, correction } =>
                        json!({"extrapolated": {"direction": direction, "attempts": attempts, "correction": correction}}),
                },
                "subspaces": b.subspaces.iter().map(|c| json!({
                    "dim": c.dim,
                    "eigenvalue": c.eigenvalue,
                    "eigenvalue_im": c.eigenvalue_im,
                    "basis": c.basis,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "chart": r.chart,
        "family": label,
        "grid": {"lo": grid.lo, "hi": grid.hi, "count": grid.count},
        "passed": r.passed(),
        "failures": r.failures,
        "max_oracle_angle": r.max_oracle_angle,
        "max_limit_angle": r.max_limit_angle,
        "max_vanishing": r.max_vanishing,
        "max_invariance": r.max_invariance,
        "max_gram_deviation": r.max_gram_deviation,
        "smoothness_frame": r.smoothness_frame,
        "smoothness_eigenvalue": r.smoothness_eigenvalue,
        "multiplicity_mismatches": r.multiplicity_mismatches,
        "span_mismatches": r.span_mismatches,
        "ambiguous": r.ambiguous,
        "samples": samples,
    })
}

fn finish(mut report: Map<String, Value>, verdict: &str, exit_code: i32, diagnostic: Option<String>) -> RunOutcome {
    report.insert("verdict".into(), json!(verdict));
    report.insert("exit_code".into(), json!(exit_code));
    if let Some(d) = diagnostic {
        report.insert("diagnostic".into(), json!(d));
    }
    RunOutcome { report: Value::Object(report), exit_code, verdict: verdict.into() }
}

/// Run `cmd` on `cfg` and assemble the report.
pub fn run(cmd: Command, cfg: &JobConfig) -> RunOutcome {
    let mut report = Map::new();
    report.insert("command".into(), json!(cmd.name()));
    report.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    let job = match prepare(cfg) {
        Ok(j) => j,
        Err(e) => return finish(report, "config_error", EXIT_CONFIG, Some(e.to_string())),
    };
    report.insert("summary".into(), Value::Array(job.targets.iter().map(Target::summary_json).collect()));
    let all_scalar = job.targets.iter().all(|t| t.quads.d_l == 0);
    if cmd == Command::Analyze {
        let verdict = if all_scalar { "scalar_operator" } else { "pass" };
        return finish(report, verdict, EXIT_PASS, None);
    }

    let options = ResolveOptions { seed: cfg.seed, depth_cap: cfg.depth_cap, budget: GroebnerBudget::default(), samples: 2000 };
    let mut reserved: Vec<String> = vec!["T".into(), "T_".into()];
    for t in &job.targets {
        reserved.extend(t.quads.fiber_universe.fibers().iter().cloned());
    }
    let mut tree = ChartTree::new(job.family.universe(), job.tree_gens.clone(), reserved, options);
    let mut diagnostic = None;
    if let Err(e) = tree.run_sequence(&cfg.resolution) {
        match e {
            ResolveError::DepthCap(_) => diagnostic = Some(e.to_string()),
            e => return finish(report, "config_error", EXIT_CONFIG, Some(e.to_string())),
        }
    }
    let tree_verdict = if diagnostic.is_some() { TreeVerdict::Unresolved } else { tree.verdict() };

    let mut invariants: Vec<Invariant> = Vec::new();
    let mut exact = Invariant::new("resolve.exactness", 0.0);
    exact.record_bool(tree.exactness_holds());
    let mut mono = Invariant::new("resolve.monotonicity", 0.0);
    mono.record_bool(tree.monotonicity_holds());
    let mut overlap = Invariant::new("resolve.overlap", 0.0);
    for idx in 0..tree.nodes.len() {
        if !tree.nodes[idx].children.is_empty() {
            let ov = tree.overlap_check(idx, 20);
            overlap.count += ov.points;
            overlap.failures += ov.failures;
            overlap.worst = overlap.worst.max(ov.failures as f64);
        }
    }
    invariants.extend([exact, mono, overlap]);
    report.insert(
        "resolution".into(),
        json!({
            "verdict": verdict_name(tree_verdict),
            "charts": (0..tree.nodes.len()).map(|i| node_json(&tree, i)).collect::<Vec<_>>(),
            "generators": polys(&tree.gens),
        }),
    );

    let tree_ok = matches!(tree_verdict, TreeVerdict::Resolved | TreeVerdict::ScalarOperator);
    if cmd == Command::Resolve {
        report.insert("invariants".into(), Value::Array(invariants.iter().map(Invariant::json).collect()));
        if !invariants.iter().all(Invariant::passed) {
            return finish(report, "fail", EXIT_FAIL, diagnostic);
        }
        return match tree_verdict {
            TreeVerdict::Resolved => finish(report, "pass", EXIT_PASS, diagnostic),
            TreeVerdict::ScalarOperator => finish(report, "scalar_operator", EXIT_PASS, diagnostic),
            v => finish(report, verdict_name(v), EXIT_UNRESOLVED, diagnostic),
        };
    }
    if !tree_ok {
        report.insert("invariants".into(), Value::Array(invariants.iter().map(Invariant::json).collect()));
        let msg = diagnostic.unwrap_or_else(|| "frames require every leaf chart to be resolved".into());
        return finish(report, verdict_name(tree_verdict), EXIT_UNRESOLVED, Some(msg));
    }

    let frame_cfg = FrameConfig {
        tau_cluster: cfg.tolerances.cluster,
        tau_angle: cfg.tolerances.angle,
        tau_residual: cfg.tolerances.residual,
        ..FrameConfig::default()
    };
    let mut fr_inv: Vec<Invariant> = vec![
        Invariant::new("frames.extraction", 0.0),
        Invariant::new("frames.oracle_angle", frame_cfg.tau_angle),
        Invariant::new("frames.limit_angle", frame_cfg.tau_limit),
        Invariant::new("frames.vanishing", frame_cfg.vanish_tol),
        Invariant::new("frames.invariance", frame_cfg.tau_residual),
        Invariant::new("frames.orthogonality", 1e-10),
        Invariant::new("frames.multiplicity", 0.0),
        Invariant::new("frames.span", 0.0),
        Invariant::new("frames.labeling", 0.0),
    ];
    let mut frames_json = Vec::new();
    let mut diagnostics = Vec::new();
    let leaves: Vec<usize> = (0..tree.nodes.len()).filter(|&i| tree.nodes[i].is_leaf()).collect();
    let mut grids: Vec<(usize, GridSpec)> = Vec::new();
    for &leaf in &leaves {
        let node = &tree.nodes[leaf];
        let (lo, hi, count) = cfg.grid.for_chart(&node.address);
        let grid = GridSpec::square(node.universe.param_count(), lo, hi, count);
        grids.push((leaf, grid.clone()));
        for t in &job.targets {
            let view: ChartNode =
                if job.targets.len() == 1 { node.clone() } else { tree.node_for_gens(leaf, &t.gens()) };
            let result = PluckerSection::new(&t.family, &t.summary, &t.quads, t.fitting.as_ref(), &view)
                .and_then(|s| local_frame_and_eigenvalues(&s, &grid, &frame_cfg));
            match result {
                Ok(r) => {
                    fr_inv[0].record(0.0);
                    for b in &r.points {
                        if b.on_discriminant {
                            fr_inv[2].record(b.max_seed_angle());
                        } else {
                            fr_inv[1].record(b.max_seed_angle());
                            if let Some(ok) = b.span_check {
                                fr_inv[7].record_bool(ok);
                            }
                        }
                        fr_inv[3].record(b.max_vanishing());
                        fr_inv[4].record(b.max_invariance());
                        fr_inv[5].record(b.gram_deviation);
                    }
                    fr_inv[6].count += r.points.len();
                    fr_inv[6].failures += r.multiplicity_mismatches;
                    fr_inv[6].worst = fr_inv[6].worst.max(r.multiplicity_mismatches as f64);
                    fr_inv[8].record_bool(!r.ambiguous);
                    frames_json.push(frame_json(t.label, &grid, &r));
                }
                Err(e) => {
                    fr_inv[0].record(1.0);
                    diagnostics.push(format!("chart {:?} family {}: {e}", node.address, t.label));
                }
            }
        }
    }
    report.insert("frames".into(), Value::Array(frames_json));
    let mut all: Vec<Invariant> = if cmd == Command::Check { invariants } else { Vec::new() };
    all.extend(fr_inv);

    if cmd == Command::Check {
        if let Some(split) = &job.split {
            let (inv, rn) = realnormal_suite(split, &tree, &grids, cfg);
            all.extend(inv);
            report.insert("realnormal".into(), rn);
        }
    }
    report.insert("invariants".into(), Value::Array(all.iter().map(Invariant::json).collect()));
    let diag = (!diagnostics.is_empty()).then(|| diagnostics.join("; "));
    if all.iter().all(Invariant::passed) {
        let verdict = if tree_verdict == TreeVerdict::ScalarOperator && all_scalar { "scalar_operator" } else { "pass" };
        finish(report, verdict, EXIT_PASS, diag)
    } else {
        finish(report, "fail", EXIT_FAIL, diag)
    }
}

fn realnormal_suite(
    split: &SplitFamily,
    tree: &ChartTree,
    grids: &[(usize, GridSpec)],
    cfg: &JobConfig,
) -> (Vec<Invariant>, Value) {
    let tol = cfg.tolerances.residual;
    let mut inv = vec![
        Invariant::new("realnormal.split_identity", 0.0),
        Invariant::new("realnormal.pairing", 1e-10),
        Invariant::new("realnormal.squared_spectrum", tol),
        Invariant::new("realnormal.invariance", tol),
        Invariant::new("realnormal.similitude", tol),
        Invariant::new("realnormal.decomposition", 1e-10),
        Invariant::new("realnormal.eigenvalues", tol),
        Invariant::new("realnormal.plane_checks", tol),
    ];
    inv[0].record_bool(split.sum_identity_holds() && split.doubling_identity_holds());
    let mut seen = std::collections::BTreeSet::new();
    let mut planes_total = 0usize;
    for (leaf, grid) in grids {
        let node = &tree.nodes[*leaf];
        for p in grid.points() {
            let x = node.base_point(&p);
            let key = scalars(&x).join(",");
            if !seen.insert(key) {
                continue;
            }
            let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
            let Ok(d) = arcp_extract(split, &xf, cfg.tolerances.cluster) else {
                inv[3].record(f64::INFINITY);
                continue;
            };
            planes_total += d.planes.len();
            inv[1].record(spectrum_pairing_error(&d.b2_spectrum));
            inv[2].record(squared_spectrum_error(split, &xf).unwrap_or(f64::INFINITY));
            inv[3].record(d.invariance);
            inv[4].record(d.similitude);
            inv[5].record(if d.dimension() == split.l.n() { d.gram_deviation } else { f64::INFINITY });
            let exact = complex_eigenvalues(&split.l, &x);
            let scale = 1.0 + exact.iter().map(|z| z.norm()).fold(0.0, f64::max);
            inv[6].record(eigenvalue_match_error(&d.eigenvalues(), &exact) / scale);
            if let Ok(mut s) = eigh_jacobi(&split.b2.eval_f64(&xf), &xf) {
                cluster_and_multiplicities(&mut s, cfg.tolerances.cluster);
                let zero_tol = cfg.tolerances.cluster * (1.0 + s.norm);
                for c in s.clusters.iter().filter(|c| c.value.abs() > zero_tol) {
                    for w in &c.basis {
                        let r = plane_invariant_checks(split, &xf, c.value, w, &c.basis).map_or(f64::INFINITY, |k| k.max());
                        inv[7].record(r);
                    }
                }
            }
        }
    }
    let summary = json!({
        "points": seen.len(),
        "planes": planes_total,
        "a_structure": split.a.structure(),
        "b_entries": split.b.entries().iter().map(|r| polys(r)).collect::<Vec<_>>(),
    });
    (inv, summary)
}
