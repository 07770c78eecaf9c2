//! Exact univariate tools used on specialised (constant) matrices.

use std::sync::{Arc, OnceLock};

use super::gcd::gcd;
use super::matrix::determinant;
use super::{Polynomial, Scalar, VarUniverse};

/// The single-variable universe `{T}` used for characteristic polynomials of
/// constant matrices.
pub fn t_universe() -> Arc<VarUniverse> {
    static UNIVERSE: OnceLock<Arc<VarUniverse>> = OnceLock::new();
    UNIVERSE.get_or_init(|| VarUniverse::new(["T"], []).expect("valid")).clone()
}

/// `det(T·Id − M)` for a constant square matrix.
pub fn char_poly_constant(m: &[Vec<Scalar>]) -> Polynomial {
    let u = t_universe();
    let t = Polynomial::var(&u, 0);
    let n = m.len();
    let rows: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = Polynomial::constant(&u, -&m[i][j]);
                    if i == j { &t + &c } else { c }
                })
                .collect()
        })
        .collect();
    if n == 0 {
        return Polynomial::one(&u);
    }
    determinant(rows)
}

/// `p / gcd(p, p')`, made monic in its single variable.
pub fn squarefree_part(p: &Polynomial, var: usize) -> Polynomial {
    let g = gcd(p, &p.derivative(var));
    let q = p.div_exact(&g).expect("gcd divides");
    monic_in(&q, var)
}

pub fn monic_in(p: &Polynomial, var: usize) -> Polynomial {
    let coeffs = p.coefficients_in(var);
    match coeffs.last().and_then(Polynomial::constant_value) {
        Some(c) if !c.is_zero() => p.scale(&c.inv().expect("nonzero")),
        _ => p.clone(),
    }
}

/// Yun's squarefree factorization: `p = lc · Π factors[k]^(k+1)` with the
/// factors monic, squarefree and pairwise coprime (constant factors are
/// returned as 1).
pub fn squarefree_factorization(p: &Polynomial, var: usize) -> Vec<Polynomial> {
    let one = Polynomial::one(p.universe());
    if p.degree_in(var) == 0 {
        return Vec::new();
    }
    let dp = p.derivative(var);
    let a0 = gcd(p, &dp);
    let mut b = p.div_exact(&a0).expect("gcd divides");
    let mut c = dp.div_exact(&a0).expect("gcd divides");
    let mut d = &c - &b.derivative(var);
    let mut out = Vec::new();
    loop {
        let a = gcd(&b, &d);
        out.push(monic_in(&a, var));
        b = b.div_exact(&a).expect("gcd divides");
        if b.degree_in(var) == 0 {
            break;
        }
        c = d.div_exact(&a).expect("gcd divides");
        d = &c - &b.derivative(var);
    }
    while out.last().is_some_and(|f| *f == one) {
        out.pop();
    }
    out
}

/// Number of distinct (complex) eigenvalues of a constant matrix, exactly.
pub fn distinct_eigenvalue_count(m: &[Vec<Scalar>]) -> usize {
    let chi = char_poly_constant(m);
    squarefree_part(&chi, 0).degree_in(0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_polynomial, Field};

    #[test]
    fn yun_separates_multiplicities() {
        let u = t_universe();
        let p = parse_polynomial("(T - 1)*(T - 2)^2*(T + 3)^3", &u, Field::Rational).unwrap();
        let f = squarefree_factorization(&p, 0);
        assert_eq!(f.len(), 3);
        assert_eq!(f[0], parse_polynomial("T - 1", &u, Field::Rational).unwrap());
        assert_eq!(f[1], parse_polynomial("T - 2", &u, Field::Rational).unwrap());
        assert_eq!(f[2], parse_polynomial("T + 3", &u, Field::Rational).unwrap());
    }

    #[test]
    fn distinct_counts() {
        let m = |v: &[&[i64]]| -> Vec<Vec<Scalar>> {
            v.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect()
        };
        assert_eq!(distinct_eigenvalue_count(&m(&[&[1, 2], &[2, 4]])), 2);
        assert_eq!(distinct_eigenvalue_count(&m(&[&[3, 0, 0], &[0, 3, 0], &[0, 0, 3]])), 1);
        assert_eq!(distinct_eigenvalue_count(&m(&[&[0, 1], &[0, 0]])), 1);
    }
}
