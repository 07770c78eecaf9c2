//! Seeded samplers for rational points.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::sync::Arc;

use crate::algebra::matrix::rref;
use crate::algebra::{Field, Monomial, Polynomial, Scalar, VarUniverse};
use crate::family::{MatrixFamily, Structure};

/// Deterministic generator for a `(seed, stream)` pair; distinct streams give
/// independent sequences for different purposes under one user seed.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform `p/q` with `|p| ≤ num_bound`, `1 ≤ q ≤ den_bound`.
pub fn random_rational<R: Rng>(rng: &mut R, num_bound: i64, den_bound: i64) -> Scalar {
    let p = rng.random_range(-num_bound..=num_bound);
    let q = rng.random_range(1..=den_bound.max(1));
    Scalar::from_ratio(p, q)
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize, num_bound: i64, den_bound: i64) -> Vec<Scalar> {
    (0..dim).map(|_| random_rational(rng, num_bound, den_bound)).collect()
}

/// All points of `{0, ±1, ±1/2, ±2}^dim`, truncated to `limit` points.
pub fn candidate_grid(dim: usize, limit: usize) -> Vec<Vec<Scalar>> {
    let values = [
        Scalar::zero(),
        Scalar::one(),
        Scalar::from_int(-1),
        Scalar::from_ratio(1, 2),
        Scalar::from_ratio(-1, 2),
        Scalar::from_int(2),
        Scalar::from_int(-2),
    ];
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        if out.len() >= limit {
            break;
        }
        out.push(idx.iter().map(|&k| values[k].clone()).collect());
        let mut pos = 0;
        loop {
            if pos == dim {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < values.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
    out
}

/// Exact rational value of a finite `f64`.
pub fn scalar_from_f64(x: f64) -> Scalar {
    Scalar::real(BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0))))
}

/// `lo + (hi − lo)·k/(count − 1)` as exact rationals (decimal endpoints are
/// read exactly from their shortest representation).
pub fn grid_axis(lo: f64, hi: f64, count: usize) -> Vec<Scalar> {
    let lo_q = Scalar::real(Scalar::parse_decimal(&format!("{lo}")).unwrap_or_else(|| BigRational::from_float(lo).expect("finite")));
    let hi_q = Scalar::real(Scalar::parse_decimal(&format!("{hi}")).unwrap_or_else(|| BigRational::from_float(hi).expect("finite")));
    if count <= 1 {
        return vec![lo_q];
    }
    let span = &hi_q - &lo_q;
    (0..count)
        .map(|k| &lo_q + &(&span * &Scalar::from_ratio(k as i64, count as i64 - 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = grid_axis(-1.0, 1.0, 21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], Scalar::from_int(-1));
        assert_eq!(g[10], Scalar::zero());
        assert_eq!(g[11], Scalar::from_ratio(1, 10));
    }

    #[test]
    fn candidate_grid_covers_origin() {
        let g = candidate_grid(2, 1000);
        assert_eq!(g.len(), 49);
        assert!(g[0].iter().all(Scalar::is_zero));
    }

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<Scalar> = random_point(&mut rng(7, 1), 3, 5, 4);
        let b: Vec<Scalar> = random_point(&mut rng(7, 1), 3, 5, 4);
        assert_eq!(a, b);
    }
}

/// Random polynomial of total degree `≤ deg` with coefficients in `[−3, 3]`.
pub fn random_polynomial<R: Rng>(rng: &mut R, u: &Arc<VarUniverse>, deg: u32) -> Polynomial {
    let k = u.param_count();
    let mut terms = Vec::new();
    let monos: Vec<Vec<u32>> = (0..(deg as usize + 1).pow(k as u32))
        .map(|mut f| {
            (0..k)
                .map(|_| {
                    let e = (f % (deg as usize + 1)) as u32;
                    f /= deg as usize + 1;
                    e
                })
                .collect::<Vec<u32>>()
        })
        .filter(|e| e.iter().sum::<u32>() <= deg)
        .collect();
    for e in monos {
        if rng.random_bool(0.5) {
            let c = rng.random_range(-3i64..=3);
            if c != 0 {
                terms.push((Monomial::from_exponents(e), Scalar::from_int(c)));
            }
        }
    }
    Polynomial::from_terms(u, terms)
}

/// Exact rational orthogonal matrix `(I − S)(I + S)⁻¹` for a random
/// integer skew `S`.
pub fn cayley_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<Scalar>> {
    let mut s = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = Scalar::from_int(rng.random_range(-2i64..=2));
            s[j][i] = -&v;
            s[i][j] = v;
        }
    }
    let id = |i: usize, j: usize| if i == j { Scalar::one() } else { Scalar::zero() };
    let mut aug: Vec<Vec<Scalar>> =
        (0..n).map(|i| (0..n).map(|j| &id(i, j) + &s[i][j]).chain((0..n).map(|j| id(i, j))).collect()).collect();
    rref(&mut aug);
    let inv: Vec<Vec<Scalar>> = aug.iter().map(|r| r[n..].to_vec()).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(Scalar::zero(), |acc, k| &acc + &(&(&id(i, k) - &s[i][k]) * &inv[k][j]))
                })
                .collect()
        })
        .collect()
}

/// `Oᵀ · D · O`.
pub fn orthogonal_conjugate(d: &[Vec<Polynomial>], o: &[Vec<Scalar>]) -> Vec<Vec<Polynomial>> {
    let n = o.len();
    let zero = Polynomial::zero(d[0][0].universe());
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = zero.clone();
                    for p in 0..n {
                        for q in 0..n {
                            if d[p][q].is_zero() {
                                continue;
                            }
                            let c = &o[p][i] * &o[q][j];
                            if !c.is_zero() {
                                acc = &acc + &d[p][q].scale(&c);
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Symmetric family `Oᵀ·diag(λ)·O` with a known generic multiplicity
/// pattern and a rational point where two distinct branches meet, or a
/// dense random symmetric family with neither.
#[derive(Clone, Debug)]
pub struct PlantedFamily {
    pub family: MatrixFamily,
    pub pattern: Option<Vec<usize>>,
    pub collision: Option<Vec<Scalar>>,
}

const PARAM_NAMES: [&str; 3] = ["x", "y", "z"];

pub fn random_symmetric_family(seed: u64, index: u64, n: usize, k: usize, deg: u32) -> PlantedFamily {
    let mut rng = rng(seed, 0x5e3d + index);
    let u = VarUniverse::new(PARAM_NAMES[..k].iter().copied(), std::iter::empty::<&str>()).expect("valid names");
    if rng.random_bool(0.25) {
        let mut e = vec![vec![Polynomial::zero(&u); n]; n];
        for i in 0..n {
            for j in i..n {
                let p = random_polynomial(&mut rng, &u, deg);
                e[i][j] = p.clone();
                e[j][i] = p;
            }
        }
        let family = MatrixFamily::new(e, Structure::Symmetric, Field::Rational).expect("symmetric by construction");
        return PlantedFamily { family, pattern: None, collision: None };
    }
    let s = rng.random_range(2..=n);
    let mut pattern = vec![1usize; s];
    for _ in s..n {
        let c = rng.random_range(0..s);
        pattern[c] += 1;
    }
    let p = random_point(&mut rng, k, 2, 2);
    let branches: Vec<Polynomial> = loop {
        let cand: Vec<Polynomial> = (0..s)
            .map(|c| {
                let r = &random_polynomial(&mut rng, &u, deg) + &Polynomial::var(&u, c % k).scale(&Scalar::from_int(c as i64 + 1));
                let shift = if c == 0 { 0 } else { c as i64 - 1 };
                &(&r - &Polynomial::constant(&u, r.eval(&p))) + &Polynomial::constant(&u, Scalar::from_int(shift))
            })
            .collect();
        let distinct = (0..s).all(|a| (a + 1..s).all(|b| !(&cand[a] - &cand[b]).is_zero()));
        if distinct {
            break cand;
        }
    };
    let mut d = vec![vec![Polynomial::zero(&u); n]; n];
    let mut slot = 0;
    for (c, &m) in pattern.iter().enumerate() {
        for _ in 0..m {
            d[slot][slot] = branches[c].clone();
            slot += 1;
        }
    }
    let o = cayley_orthogonal(&mut rng, n);
    let family = MatrixFamily::new(orthogonal_conjugate(&d, &o), Structure::Symmetric, Field::Rational)
        .expect("orthogonal conjugate of a diagonal matrix is symmetric");
    PlantedFamily { family, pattern: Some(pattern), collision: Some(p) }
}
