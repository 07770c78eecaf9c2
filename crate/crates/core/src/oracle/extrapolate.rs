use super::{optimal_matching, orthonormalize, procrustes_align, Basis, OracleError};

#[derive(Clone, Debug)]
pub struct ExtrapolationConfig {
    /// Decreasing curve parameters at which the family is sampled.
    pub radii: Vec<f64>,
    /// Number of Richardson levels; clipped to `radii.len() - 1`.
    pub order: usize,
}

impl Default for ExtrapolationConfig {
    fn default() -> Self {
        ExtrapolationConfig { radii: (3..=8).map(|k| 2f64.powi(-k)).collect(), order: 5 }
    }
}

/// Extrapolated limit subspaces along a curve.
#[derive(Clone, Debug)]
pub struct LimitBases {
    pub bases: Vec<Basis>,
    /// Frobenius norm of the last Richardson correction, maximised over components.
    pub correction: f64,
}

/// Sample the component subspaces at each radius, align each sample to the
/// previous one (component matching plus Procrustes), and extrapolate the
/// aligned bases entrywise to parameter 0 with a Neville–Richardson table.
pub fn extrapolate_along_curve<F>(mut sample: F, cfg: &ExtrapolationConfig) -> Result<LimitBases, OracleError>
where
    F: FnMut(f64) -> Result<Vec<Basis>, OracleError>,
{
    if cfg.radii.len() < 2 {
        return Err(OracleError::Extrapolation("need at least two radii".into()));
    }
    let mut sequence: Vec<Vec<Basis>> = Vec::with_capacity(cfg.radii.len());
    for &t in &cfg.radii {
        let current = sample(t)?;
        let aligned = match sequence.last() {
            None => current,
            Some(prev) => {
                let perm = optimal_matching(prev, &current).ok_or_else(|| {
                    OracleError::Extrapolation(format!("component structure changed at radius {t:e}"))
                })?;
                perm.iter().zip(prev).map(|(&j, p)| procrustes_align(&current[j], p)).collect()
            }
        };
        sequence.push(aligned);
    }

    let ncomp = sequence[0].len();
    let order = cfg.order.clamp(1, cfg.radii.len() - 1);
    let start = cfg.radii.len() - 1 - order;
    let ts = &cfg.radii[start..];
    let mut bases = Vec::with_capacity(ncomp);
    let mut correction = 0.0f64;
    for c in 0..ncomp {
        let flat: Vec<Vec<f64>> = sequence[start..].iter().map(|s| s[c].concat()).collect();
        let (top, lower) = neville_at_zero(ts, &flat);
        let diff: f64 = top.iter().zip(&lower).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        correction = correction.max(diff);
        let dim = sequence[0][c].len();
        let n = top.len() / dim;
        let vecs: Vec<Vec<f64>> = top.chunks(n).map(<[f64]>::to_vec).collect();
        let basis = orthonormalize(&vecs, 1e-8);
        if basis.len() != dim {
            return Err(OracleError::Extrapolation("limit basis lost rank".into()));
        }
        bases.push(basis);
    }
    Ok(LimitBases { bases, correction })
}

/// Neville tableau evaluated at 0. Returns the full-order value and the value
/// one level lower that shares the smallest parameter.
fn neville_at_zero(ts: &[f64], values: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let k = ts.len();
    let mut level: Vec<Vec<f64>> = values.to_vec();
    let mut lower = level[k - 1].clone();
    for width in 1..k {
        if width == k - 1 {
            lower = level[k - 1 - (width - 1)].clone();
        }
        let next: Vec<Vec<f64>> = (0..k - width)
            .map(|i| {
                let (ti, tj) = (ts[i], ts[i + width]);
                level[i]
                    .iter()
                    .zip(&level[i + 1])
                    .map(|(a, b)| (ti * b - tj * a) / (ti - tj))
                    .collect()
            })
            .collect();
        level = next;
    }
    (level.into_iter().next().expect("nonempty"), lower)
}
