use std::f64::consts::FRAC_PI_4;

use eigenbouquet::cli::{demo_config, prepare};
use eigenbouquet::frames::{limit_spread, FrameConfig};
use eigenbouquet::resolve::{ChartTree, ResolveOptions};

fn root_spread(name: &str, a: [f64; 2], b: [f64; 2]) -> f64 {
    let cfg = demo_config(name).unwrap();
    let job = prepare(&cfg).unwrap();
    let tree = ChartTree::new(job.family.universe(), job.tree_gens.clone(), Vec::<String>::new(), ResolveOptions::default());
    let t = &job.targets[0];
    limit_spread(&t.family, tree.root(), t.summary.s_l, &[0.0, 0.0], &[a.to_vec(), b.to_vec()], &FrameConfig::default())
        .unwrap()
}

#[test]
fn kupa_limit_depends_on_direction() {
    // Both axes give the pair {e1, e2}; the diagonal rotates it by π/4.
    assert!(root_spread("kupa", [1.0, 0.0], [0.0, 1.0]) < 1e-9);
    let spread = root_spread("kupa", [1.0, 0.0], [1.0, 1.0]);
    assert!((spread - FRAC_PI_4).abs() < 1e-9, "{spread}");
}

#[test]
fn rellich_axes_limits_differ_by_quarter_turn() {
    let spread = root_spread("rellich", [1.0, 0.0], [0.0, 1.0]);
    assert!((spread - FRAC_PI_4).abs() < 1e-9, "{spread}");
}

/// Strict form of the Rellich direction-dependence check. The eigenvector
/// along direction θ sits at angle θ/2, so x-axis vs diagonal measures π/8.
#[test]
#[ignore = "measures pi/8 on the diagonal; pi/4 is reached on the y-axis"]
fn rellich_diagonal_limit_is_quarter_turn() {
    let spread = root_spread("rellich", [1.0, 0.0], [1.0, 1.0]);
    assert!((spread - FRAC_PI_4).abs() < 1e-9, "{spread}");
}

#[test]
fn demos_prepare_expected_targets() {
    for (name, targets) in [("kupa", 1), ("rellich", 1), ("skew2", 2), ("diag3", 1)] {
        let job = prepare(&demo_config(name).unwrap()).unwrap();
        assert_eq!(job.targets.len(), targets, "{name}");
    }
}
