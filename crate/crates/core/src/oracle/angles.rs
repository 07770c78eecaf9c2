use super::{dot, eigh_jacobi, singular_values, Basis, Matrix, OracleError};

/// Principal angles between `span(u)` and `span(w)`, ascending, in `[0, π/2]`.
///
/// Both cosines (from `uᵀw`) and sines (from the projection of the smaller
/// basis onto the complement of the larger) are computed; each angle uses
/// whichever of the two is better conditioned.
pub fn principal_angles(u: &[Vec<f64>], w: &[Vec<f64>]) -> Result<Vec<f64>, OracleError> {
    if u.is_empty() || w.is_empty() {
        return Err(OracleError::EmptyBasis);
    }
    let n = u[0].len();
    if u.iter().chain(w).any(|v| v.len() != n) {
        return Err(OracleError::Dimension("basis vectors differ in length".into()));
    }
    let r = u.len().min(w.len());
    let cross: Matrix = u.iter().map(|a| w.iter().map(|b| dot(a, b)).collect()).collect();
    let cosines = singular_values(&cross);

    let (big, small) = if u.len() >= w.len() { (u, w) } else { (w, u) };
    // Columns of the residual (I − P_big) small, laid out as rows of an n×r matrix.
    let residual: Vec<Vec<f64>> = small
        .iter()
        .map(|s| {
            let mut v = s.clone();
            for _ in 0..2 {
                for q in big {
                    let c = dot(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= c * qi;
                    }
                }
            }
            v
        })
        .collect();
    let as_matrix: Matrix = (0..n).map(|i| residual.iter().map(|col| col[i]).collect()).collect();
    let mut sines = singular_values(&as_matrix);
    sines.reverse();

    Ok((0..r)
        .map(|k| {
            let c = cosines.get(k).copied().unwrap_or(0.0).clamp(0.0, 1.0);
            let s = sines.get(k).copied().unwrap_or(1.0).clamp(0.0, 1.0);
            if c * c < 0.5 { c.acos() } else { s.asin() }
        })
        .collect())
}

/// Largest principal angle, or π/2 when the dimensions differ.
pub fn subspace_distance(u: &[Vec<f64>], w: &[Vec<f64>]) -> Result<f64, OracleError> {
    if u.len() != w.len() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    Ok(principal_angles(u, w)?.last().copied().unwrap_or(0.0))
}

/// Rotate `b` inside its span so that it is closest (Frobenius) to `reference`.
///
/// Returns `b · R` where `R` is the orthogonal polar factor of `bᵀ·reference`;
/// if that product is numerically singular the input is returned unchanged.
pub fn procrustes_align(b: &[Vec<f64>], reference: &[Vec<f64>]) -> Basis {
    let e = b.len();
    if e == 0 || reference.len() != e {
        return b.to_vec();
    }
    let m: Matrix = b.iter().map(|x| reference.iter().map(|y| dot(x, y)).collect()).collect();
    // MᵀM = V Σ² Vᵀ, R = M V Σ⁻¹ Vᵀ.
    let mtm: Matrix = (0..e)
        .map(|i| (0..e).map(|j| (0..e).map(|k| m[k][i] * m[k][j]).sum()).collect())
        .collect();
    let Ok(eig) = eigh_jacobi(&mtm, &[]) else { return b.to_vec() };
    if eig.eigenvalues.iter().any(|&l| l <= 1e-20) {
        return b.to_vec();
    }
    let mut inv_sqrt = vec![vec![0.0; e]; e];
    for (lam, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        let f = 1.0 / lam.sqrt();
        for i in 0..e {
            for j in 0..e {
                inv_sqrt[i][j] += f * v[i] * v[j];
            }
        }
    }
    let r: Matrix = (0..e)
        .map(|i| (0..e).map(|j| (0..e).map(|k| m[i][k] * inv_sqrt[k][j]).sum()).collect())
        .collect();
    let n = b[0].len();
    (0..e)
        .map(|j| (0..n).map(|t| (0..e).map(|i| b[i][t] * r[i][j]).sum()).collect())
        .collect()
}

/// Match `current` subspaces to `previous` ones by minimal total largest
/// principal angle among equal-dimension candidates (exhaustive for small
/// counts, greedy otherwise). Returns `perm` with `current[perm[k]]` matched
/// to `previous[k]`, or `None` if no dimension-consistent matching exists.
pub fn optimal_matching(previous: &[Basis], current: &[Basis]) -> Option<Vec<usize>> {
    let k = previous.len();
    if current.len() != k {
        return None;
    }
    let cost: Vec<Vec<f64>> = previous
        .iter()
        .map(|p| current.iter().map(|c| subspace_distance(p, c).unwrap_or(f64::INFINITY)).collect())
        .collect();
    let admissible = |i: usize, j: usize| previous[i].len() == current[j].len();
    if k <= 7 {
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut perm: Vec<usize> = (0..k).collect();
        permute(&mut perm, 0, &mut |p| {
            if (0..k).all(|i| admissible(i, p[i])) {
                let total: f64 = (0..k).map(|i| cost[i][p[i]]).sum();
                if best.as_ref().is_none_or(|(b, _)| total < *b) {
                    best = Some((total, p.to_vec()));
                }
            }
        });
        return best.map(|(_, p)| p);
    }
    let mut used = vec![false; k];
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let j = (0..k)
            .filter(|&j| !used[j] && admissible(i, j))
            .min_by(|&a, &b| cost[i][a].total_cmp(&cost[i][b]))?;
        used[j] = true;
        out.push(j);
    }
    Some(out)
}

fn permute(p: &mut Vec<usize>, start: usize, f: &mut impl FnMut(&[usize])) {
    if start == p.len() {
        f(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, f);
        p.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn identical_subspaces() {
        let u = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let a = principal_angles(&u, &u).unwrap();
        assert!(a.iter().all(|&t| t.abs() < 1e-15));
    }

    #[test]
    fn quarter_turn_lines() {
        let r = 1.0 / 2f64.sqrt();
        let a = principal_angles(&[vec![1.0, 0.0]], &[vec![r, r]]).unwrap();
        assert!((a[0] - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn tiny_angle_is_accurate() {
        let t: f64 = 1e-9;
        let a = principal_angles(&[vec![1.0, 0.0]], &[vec![t.cos(), t.sin()]]).unwrap();
        assert!((a[0] - t).abs() < 1e-20);
    }

    #[test]
    fn unequal_dimensions() {
        let u = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let w = vec![vec![0.0, 0.0, 1.0]];
        let a = principal_angles(&u, &w).unwrap();
        assert_eq!(a.len(), 1);
        assert!((a[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn procrustes_recovers_rotation() {
        let reference = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let t: f64 = 0.3;
        let rotated = vec![vec![t.cos(), t.sin(), 0.0], vec![-t.sin(), t.cos(), 0.0]];
        let aligned = procrustes_align(&rotated, &reference);
        for (a, r) in aligned.iter().zip(&reference) {
            for (x, y) in a.iter().zip(r) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn matching_swaps() {
        let a = vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]];
        let b = vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]];
        assert_eq!(optimal_matching(&a, &b), Some(vec![1, 0]));
    }
}
