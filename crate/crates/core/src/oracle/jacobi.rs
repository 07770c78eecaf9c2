use super::{dot, frobenius, mat_vec, norm, Matrix, OracleError, SpectralSample};

const MAX_SWEEPS: usize = 60;
const OFF_TOL: f64 = 1e-13;
const SYMMETRY_TOL: f64 = 1e-12;

fn off_diagonal(a: &Matrix) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius norm is at most `1e-13·‖M‖_F`.
/// The returned sample has ascending eigenvalues and no clusters yet; see
/// [`cluster_and_multiplicities`](super::cluster_and_multiplicities).
pub fn eigh_jacobi(m: &Matrix, point: &[f64]) -> Result<SpectralSample, OracleError> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(OracleError::Dimension("matrix is not square".into()));
    }
    let scale = frobenius(m);
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((m[i][j] - m[j][i]).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(OracleError::NotSymmetric(asym));
    }
    let mut a: Matrix = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (m[i][j] + m[j][i])).collect())
        .collect();
    let mut v: Matrix = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();

    let target = OFF_TOL * scale;
    let mut sweeps = 0;
    while off_diagonal(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(OracleError::NoConvergence { sweeps, off: off_diagonal(&a) });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k][k]).collect();
    let eigenvectors: Vec<Vec<f64>> = order.iter().map(|&k| (0..n).map(|i| v[i][k]).collect()).collect();
    let residual = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&lam, q)| {
            let mq = mat_vec(m, q);
            norm(&mq.iter().zip(q).map(|(x, y)| x - lam * y).collect::<Vec<_>>())
        })
        .fold(0.0, f64::max);
    let spectral = eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    Ok(SpectralSample {
        point: point.to_vec(),
        eigenvalues,
        eigenvectors,
        norm: spectral,
        residual,
        clusters: Vec::new(),
    })
}

/// Real symmetric embedding `[[Re, −Im], [Im, Re]]` of a Hermitian matrix
/// given by its real and imaginary parts.
pub fn hermitian_embedding(re: &Matrix, im: &Matrix) -> Matrix {
    let n = re.len();
    let mut out = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = re[i][j];
            out[i + n][j + n] = re[i][j];
            out[i][j + n] = -im[i][j];
            out[i + n][j] = im[i][j];
        }
    }
    out
}

/// Singular values (descending) by one-sided Jacobi on the columns of `a`,
/// i.e. Jacobi applied implicitly to the normal matrix `aᵀa`.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Vec::new();
    }
    // Work on the orientation with fewer columns.
    let mut cols: Vec<Vec<f64>> = if ncols <= nrows {
        (0..ncols).map(|j| (0..nrows).map(|i| a[i][j]).collect()).collect()
    } else {
        a.clone()
    };
    let k = cols.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let xp = *x;
                    let yq = *y;
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        let m = vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]];
        let s = eigh_jacobi(&m, &[]).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
        for (k, v) in s.eigenvectors.iter().enumerate() {
            assert!((v[k].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_one_at_sample_point() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let s = eigh_jacobi(&m, &[1.0, 2.0]).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-14);
        assert!((s.eigenvalues[1] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn swap_matrix() {
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let s = eigh_jacobi(&m, &[]).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-15 && (s.eigenvalues[1] - 1.0).abs() < 1e-15);
        let r = 1.0 / 2f64.sqrt();
        assert!((s.eigenvectors[0][0].abs() - r).abs() < 1e-15);
        assert!((s.eigenvectors[0][0] + s.eigenvectors[0][1]).abs() < 1e-15);
        assert!((s.eigenvectors[1][0] - s.eigenvectors[1][1]).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
        assert!(matches!(eigh_jacobi(&m, &[]), Err(OracleError::NotSymmetric(_))));
    }

    #[test]
    fn singular_values_of_rectangular() {
        let a = vec![vec![3.0, 0.0], vec![0.0, 4.0], vec![0.0, 0.0]];
        let sv = singular_values(&a);
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
    }
}
