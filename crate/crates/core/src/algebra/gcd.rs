//! Multivariate GCD by primitive-part recursion with a subresultant PRS in the
//! highest-index variable, plus the canonical normalization shared by every
//! module that deduplicates polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Polynomial, Scalar};

impl Polynomial {
    /// Canonical representative of the line `ℚ(i)^* · self`.
    ///
    /// Real-coefficient polynomials become primitive integer polynomials with
    /// positive leading coefficient (graded-lex); polynomials with non-real
    /// coefficients become monic.
    pub fn normalized(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        if !self.has_real_coefficients() {
            let inv = self.leading_coefficient().inv().expect("nonzero leading coefficient");
            return self.scale(&inv);
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for (_, c) in self.terms() {
            den_lcm = den_lcm.lcm(c.re().denom());
            num_gcd = num_gcd.gcd(c.re().numer());
        }
        let mut factor = BigRational::new(den_lcm, num_gcd);
        if self.leading_coefficient().re().is_negative() {
            factor = -factor;
        }
        self.scale(&Scalar::real(factor))
    }

    /// Same as [`normalized`](Self::normalized), additionally returning the
    /// scalar `c` with `normalized = c · self`.
    pub fn normalization_factor(&self) -> Scalar {
        if self.is_zero() {
            return Scalar::one();
        }
        let n = self.normalized();
        n.leading_coefficient()
            .checked_div(&self.leading_coefficient())
            .expect("nonzero leading coefficient")
    }
}

/// Greatest common divisor, normalized. `gcd(0, b)` is `b` normalized.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.universe());
    }
    let va = a.support_vars();
    let vb = b.support_vars();
    let main = *va.union(&vb).max().expect("non-constant");
    if !va.contains(&main) {
        return gcd(a, &content_in(b, main));
    }
    if !vb.contains(&main) {
        return gcd(&content_in(a, main), b);
    }
    let ca = content_in(a, main);
    let cb = content_in(b, main);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = subresultant_gcd(&pa, &pb, main);
    (&c * &g).normalized()
}

/// gcd of a list, folded left to right.
pub fn gcd_all<'a>(polys: impl IntoIterator<Item = &'a Polynomial>) -> Option<Polynomial> {
    let mut iter = polys.into_iter();
    let first = iter.next()?.normalized();
    Some(iter.fold(first, |g, p| if g.is_constant() && !g.is_zero() { g } else { gcd(&g, p) }))
}

/// Content with respect to `var`: gcd of the coefficients in that variable.
pub fn content_in(p: &Polynomial, var: usize) -> Polynomial {
    let coeffs = p.coefficients_in(var);
    let mut g = Polynomial::zero(p.universe());
    for c in coeffs.iter().rev().filter(|c| !c.is_zero()) {
        g = gcd(&g, c);
        if g.is_constant() {
            break;
        }
    }
    g
}

/// Primitive part with respect to `var`, normalized.
pub fn primitive_part_in(p: &Polynomial, var: usize) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_in(p, var);
    p.div_exact(&c).expect("content divides").normalized()
}

struct Uni {
    coeffs: Vec<Polynomial>,
}

impl Uni {
    fn from_poly(p: &Polynomial, var: usize) -> Self {
        let mut coeffs = p.coefficients_in(var);
        while coeffs.len() > 1 && coeffs.last().is_some_and(Polynomial::is_zero) {
            coeffs.pop();
        }
        Uni { coeffs }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Polynomial::is_zero)
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn lc(&self) -> &Polynomial {
        self.coeffs.last().expect("nonempty")
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(Polynomial::is_zero) {
            self.coeffs.pop();
        }
    }

    fn scale(&self, c: &Polynomial) -> Uni {
        Uni { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    fn div_exact(&self, c: &Polynomial) -> Uni {
        Uni {
            coeffs: self
                .coeffs
                .iter()
                .map(|a| a.div_exact(c).expect("subresultant division is exact"))
                .collect(),
        }
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) · a mod b`.
    fn prem(&self, b: &Uni) -> Uni {
        let mut r = Uni { coeffs: self.coeffs.clone() };
        let db = b.degree();
        let lcb = b.lc().clone();
        let mut steps = (self.degree() + 1).saturating_sub(db) as u32;
        while !r.is_zero() && r.degree() >= db {
            let shift = r.degree() - db;
            let lr = r.lc().clone();
            let mut next: Vec<Polynomial> = r.coeffs.iter().map(|a| a * &lcb).collect();
            for (k, bc) in b.coeffs.iter().enumerate() {
                next[k + shift] = &next[k + shift] - &(bc * &lr);
            }
            next.pop();
            if next.is_empty() {
                next.push(Polynomial::zero(lcb.universe()));
            }
            r = Uni { coeffs: next };
            r.trim();
            steps -= 1;
        }
        if steps > 0 {
            r = r.scale(&lcb.pow(steps));
        }
        r
    }
}

fn subresultant_gcd(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let universe = a.universe().clone();
    let (mut f, mut g) = {
        let ua = Uni::from_poly(a, var);
        let ub = Uni::from_poly(b, var);
        if ua.degree() >= ub.degree() { (ua, ub) } else { (ub, ua) }
    };
    let mut gg = Polynomial::one(&universe);
    let mut h = Polynomial::one(&universe);
    loop {
        let delta = (f.degree() - g.degree()) as u32;
        let r = f.prem(&g);
        if r.is_zero() {
            let p = Polynomial::from_coefficients_in(&universe, var, &g.coeffs);
            return primitive_part_in(&p, var);
        }
        if r.degree() == 0 {
            return Polynomial::one(&universe);
        }
        let divisor = &gg * &h.pow(delta);
        f = g;
        g = r.div_exact(&divisor);
        gg = f.lc().clone();
        h = if delta == 0 {
            h
        } else {
            gg.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant h update is exact")
        };
    }
}

/// Resultant with respect to `var` via the Sylvester determinant.
pub fn resultant(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let ca = Uni::from_poly(a, var);
    let cb = Uni::from_poly(b, var);
    let (m, n) = (ca.degree(), cb.degree());
    let size = m + n;
    let universe = a.universe();
    if size == 0 {
        return Polynomial::one(universe);
    }
    let mut rows = vec![vec![Polynomial::zero(universe); size]; size];
    for i in 0..n {
        for (k, c) in ca.coeffs.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in cb.coeffs.iter().rev().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    super::matrix::determinant(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_polynomial, Field, VarUniverse};
    use std::sync::Arc;

    fn p(u: &Arc<VarUniverse>, s: &str) -> Polynomial {
        parse_polynomial(s, u, Field::Rational).unwrap()
    }

    #[test]
    fn chart_factor_extraction() {
        let u = VarUniverse::new(["u", "v"], []).unwrap();
        assert_eq!(gcd(&p(&u, "u^2*v"), &p(&u, "u^2*(1 - v^2)")), p(&u, "u^2"));
    }

    #[test]
    fn linear_factor() {
        let u = VarUniverse::new(["x", "y"], []).unwrap();
        assert_eq!(gcd(&p(&u, "x^2 - y^2"), &p(&u, "x - y")), p(&u, "x - y"));
        let a = p(&u, "-3*x^2 + 3*y^2");
        assert_eq!(gcd(&a, &a), p(&u, "x^2 - y^2"));
    }

    #[test]
    fn coprime_and_zero() {
        let u = VarUniverse::new(["x", "y"], []).unwrap();
        assert_eq!(gcd(&p(&u, "x*y"), &p(&u, "x^2 - y^2")), p(&u, "1"));
        assert_eq!(gcd(&Polynomial::zero(&u), &p(&u, "-2*x")), p(&u, "x"));
    }

    #[test]
    fn normalization_of_rationals() {
        let u = VarUniverse::new(["x", "y"], []).unwrap();
        assert_eq!(p(&u, "-1/2*x + 3/4*y").normalized(), p(&u, "2*x - 3*y"));
    }

    #[test]
    fn deeper_common_factor() {
        let u = VarUniverse::new(["x", "y", "z"], []).unwrap();
        let f = p(&u, "x*y + z^2 - 1");
        let a = &f * &p(&u, "x^2 + y*z + 3");
        let b = &f * &p(&u, "x - 2*y*z^3");
        assert_eq!(gcd(&a, &b), f.normalized());
    }

    #[test]
    fn resultant_of_quadratic_and_derivative() {
        let u = VarUniverse::new(["x", "y", "T"], []).unwrap();
        let f = p(&u, "T^2 - (x^2 + y^2)*T");
        let r = resultant(&f, &f.derivative(2), 2);
        assert_eq!(r, p(&u, "-(x^2 + y^2)^2"));
    }
}
