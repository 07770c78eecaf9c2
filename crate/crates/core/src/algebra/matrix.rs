//! Fraction-free (Bareiss) elimination over exact rings, and plain Gaussian
//! elimination over the scalar field.

use super::{Polynomial, Scalar};

/// The slice of integral-domain arithmetic Bareiss elimination needs.
pub trait ExactRing: Clone {
    fn is_zero(&self) -> bool;
    fn mul(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Exact division; the caller guarantees divisibility.
    fn div_exact(&self, other: &Self) -> Self;
    /// Heuristic pivot cost; smaller is preferred.
    fn size(&self) -> usize;
}

impl ExactRing for Polynomial {
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Self {
        Polynomial::div_exact(self, other).expect("Bareiss division is exact")
    }
    fn size(&self) -> usize {
        self.num_terms()
    }
}

impl ExactRing for Scalar {
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Self {
        self.checked_div(other).expect("nonzero divisor")
    }
    fn size(&self) -> usize {
        1
    }
}

/// Result of a rank computation: the rank and a nonvanishing minor of that size.
#[derive(Clone, Debug)]
pub struct RankWitness<T> {
    pub rank: usize,
    /// Sorted row indices of the witness minor.
    pub rows: Vec<usize>,
    /// Sorted column indices of the witness minor.
    pub cols: Vec<usize>,
    /// Determinant of the witness minor (with rows/cols in sorted order);
    /// `None` when the rank is zero.
    pub det: Option<T>,
}

fn permutation_sign(order: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Rank by fraction-free elimination with full pivoting.
pub fn bareiss_rank<T: ExactRing>(matrix: &[Vec<T>]) -> RankWitness<T> {
    let nrows = matrix.len();
    let ncols = matrix.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<T>> = matrix.to_vec();
    let mut row_ids: Vec<usize> = (0..nrows).collect();
    let mut col_ids: Vec<usize> = (0..ncols).collect();
    let mut prev: Option<T> = None;
    let mut rank = 0;
    for k in 0..nrows.min(ncols) {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, v) in row.iter().enumerate().skip(k) {
                if !v.is_zero() && best.is_none_or(|(_, _, s)| v.size() < s) {
                    best = Some((i, j, v.size()));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        a.swap(k, pi);
        row_ids.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            col_ids.swap(k, pj);
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..ncols {
                let mut v = pivot_row[k].mul(&row[j]);
                if !lead.is_zero() {
                    v = v.sub(&lead.mul(&pivot_row[j]));
                }
                row[j] = match &prev {
                    Some(p) => v.div_exact(p),
                    None => v,
                };
            }
        }
        prev = Some(a[k][k].clone());
        rank += 1;
    }
    let rows_perm = row_ids[..rank].to_vec();
    let cols_perm = col_ids[..rank].to_vec();
    let flip = permutation_sign(&rows_perm) ^ permutation_sign(&cols_perm);
    let det = prev.map(|d| if flip { d.neg() } else { d });
    let mut rows = rows_perm;
    let mut cols = cols_perm;
    rows.sort_unstable();
    cols.sort_unstable();
    RankWitness { rank, rows, cols, det }
}

/// Determinant by Bareiss elimination with row pivoting.
pub fn determinant<T: ExactRing + ZeroLike>(mut a: Vec<Vec<T>>) -> T {
    let n = a.len();
    if n == 0 {
        return T::one_like(None);
    }
    let zero = a[0][0].zero_like();
    let mut negate = false;
    let mut prev: Option<T> = None;
    for k in 0..n {
        let Some(pi) = (k..n).filter(|&i| !a[i][k].is_zero()).min_by_key(|&i| a[i][k].size()) else {
            return zero;
        };
        if pi != k {
            a.swap(k, pi);
            negate = !negate;
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let mut v = pivot_row[k].mul(&row[j]);
                if !lead.is_zero() {
                    v = v.sub(&lead.mul(&pivot_row[j]));
                }
                row[j] = match &prev {
                    Some(p) => v.div_exact(p),
                    None => v,
                };
            }
        }
        prev = Some(a[k][k].clone());
    }
    let d = prev.expect("n > 0");
    if negate { d.neg() } else { d }
}

/// Construction of zero/one compatible with an existing element.
pub trait ZeroLike: Sized {
    fn zero_like(&self) -> Self;
    fn one_like(template: Option<&Self>) -> Self;
}

impl ZeroLike for Polynomial {
    fn zero_like(&self) -> Self {
        Polynomial::zero(self.universe())
    }
    fn one_like(template: Option<&Self>) -> Self {
        Polynomial::one(template.expect("polynomial determinant of an empty matrix needs a universe").universe())
    }
}

impl ZeroLike for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn one_like(_: Option<&Self>) -> Self {
        Scalar::one()
    }
}

/// Reduced row echelon form over the scalar field; returns the pivot columns.
pub fn rref(a: &mut [Vec<Scalar>]) -> Vec<usize> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pi) = (r..nrows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, pi);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for v in a[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &(p * &f);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn scalar_rank(a: &[Vec<Scalar>]) -> usize {
    let mut m = a.to_vec();
    rref(&mut m).len()
}

/// Basis of the right null space `{x : A x = 0}`.
pub fn nullspace(a: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Scalar::zero(); ncols];
            x[f] = Scalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -&m[r][f];
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_polynomial, Field, VarUniverse};

    #[test]
    fn rank_of_polynomial_matrices() {
        let u = VarUniverse::new(["x", "y"], []).unwrap();
        let p = |s: &str| parse_polynomial(s, &u, Field::Rational).unwrap();
        let row = vec![vec![p("-x*y"), p("x^2 - y^2"), p("x*y")]];
        assert_eq!(bareiss_rank(&row).rank, 1);
        let zero = vec![vec![p("0"), p("0")], vec![p("0"), p("0")]];
        let w = bareiss_rank(&zero);
        assert_eq!(w.rank, 0);
        assert!(w.det.is_none());
        let m = vec![vec![p("x"), p("y")], vec![p("y"), p("x")]];
        let w = bareiss_rank(&m);
        assert_eq!(w.rank, 2);
        assert_eq!(w.det.unwrap(), p("x^2 - y^2"));
    }

    #[test]
    fn witness_sign_matches_sorted_minor() {
        let u = VarUniverse::new(["x"], []).unwrap();
        let p = |s: &str| parse_polynomial(s, &u, Field::Rational).unwrap();
        // Pivoting picks the constant entries first; the witness must still be
        // reported with sorted indices and the matching sign.
        let m = vec![vec![p("x^2 + x"), p("1")], vec![p("2"), p("x")]];
        let w = bareiss_rank(&m);
        assert_eq!(w.det.unwrap(), determinant(m.clone()));
    }

    #[test]
    fn determinant_of_scalars() {
        let m = vec![
            vec![Scalar::from_int(2), Scalar::from_int(1), Scalar::from_int(0)],
            vec![Scalar::from_int(1), Scalar::from_int(3), Scalar::from_int(1)],
            vec![Scalar::from_int(0), Scalar::from_int(1), Scalar::from_int(4)],
        ];
        assert_eq!(determinant(m), Scalar::from_int(18));
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = vec![vec![Scalar::from_int(1), Scalar::from_int(2)], vec![Scalar::from_int(2), Scalar::from_int(4)]];
        let ns = nullspace(&a, 2);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![Scalar::from_int(-2), Scalar::from_int(1)]);
    }
}
