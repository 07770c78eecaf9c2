//! Sparse multivariate polynomials with exact ℚ / ℚ(i) coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::{AlgebraError, Scalar, VarUniverse};

/// Exponent vector, ordered graded-lexicographically: total degree first,
/// then the first differing exponent (earlier variables dominate).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial over a [`VarUniverse`]. Zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct Polynomial {
    universe: Arc<VarUniverse>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_universe(&self.universe, &other.universe) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

pub(crate) fn same_universe(a: &Arc<VarUniverse>, b: &Arc<VarUniverse>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Polynomial {
    pub fn zero(universe: &Arc<VarUniverse>) -> Self {
        Polynomial { universe: universe.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(universe: &Arc<VarUniverse>, c: Scalar) -> Self {
        let mut p = Self::zero(universe);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(universe.len()), c);
        }
        p
    }

    pub fn one(universe: &Arc<VarUniverse>) -> Self {
        Self::constant(universe, Scalar::one())
    }

    pub fn from_int(universe: &Arc<VarUniverse>, v: i64) -> Self {
        Self::constant(universe, Scalar::from_int(v))
    }

    pub fn var(universe: &Arc<VarUniverse>, idx: usize) -> Self {
        let mut p = Self::zero(universe);
        p.terms.insert(Monomial::var(universe.len(), idx), Scalar::one());
        p
    }

    pub fn var_named(universe: &Arc<VarUniverse>, name: &str) -> Result<Self, AlgebraError> {
        let idx = universe
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(universe, idx))
    }

    pub fn monomial(universe: &Arc<VarUniverse>, m: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero(universe);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(universe: &Arc<VarUniverse>, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Self::zero(universe);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn universe(&self) -> &Arc<VarUniverse> {
        &self.universe
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Scalar {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_zero() {
            Some(Scalar::zero())
        } else if self.is_constant() {
            Some(self.leading_coefficient())
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Largest `k` with `var^k` dividing `self` (0 for the zero polynomial).
    pub fn order_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).min().unwrap_or(0)
    }

    pub fn support_vars(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    s.insert(i);
                }
            }
        }
        s
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(Scalar::is_real)
    }

    pub fn conj(&self) -> Self {
        Polynomial {
            universe: self.universe.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_universe(&self, other: &Polynomial) -> Result<(), AlgebraError> {
        if same_universe(&self.universe, &other.universe) {
            Ok(())
        } else {
            Err(AlgebraError::UniverseMismatch)
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_universe(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_universe(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_universe(other)?;
        let mut out = Polynomial::zero(&self.universe);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(&self.universe);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.universe);
        }
        Polynomial {
            universe: self.universe.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.universe);
        }
        Polynomial {
            universe: self.universe.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> Scalar {
        let mut acc = num_bigint::BigInt::from(1);
        for c in self.terms.values() {
            for part in [c.re(), c.im()] {
                acc = num_integer::Integer::lcm(&acc, part.denom());
            }
        }
        Scalar::real(num_rational::BigRational::from_integer(acc))
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        if d.is_zero() {
            return None;
        }
        if d.is_constant() {
            return Some(self.scale(&d.leading_coefficient().inv()?));
        }
        let (lm_d, lc_d) = d.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quo = Polynomial::zero(&self.universe);
        while let Some((lm_r, lc_r)) = rem.leading_term() {
            if !lm_d.divides(lm_r) {
                return None;
            }
            let qm = lm_d.quotient_of(lm_r);
            let qc = lc_r.checked_div(&lc_d)?;
            for (m, c) in &d.terms {
                rem.add_term(m.mul(&qm), &-(c * &qc));
            }
            quo.add_term(qm, &qc);
        }
        Some(quo)
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.universe);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), &(c * &Scalar::from_int(e as i64)));
        }
        out
    }

    /// Exact evaluation at a point given for every variable of the universe.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.universe.len(), "evaluation point has wrong arity");
        let mut powers: Vec<Vec<Scalar>> = point.iter().map(|v| vec![Scalar::one(), v.clone()]).collect();
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[i];
                while pw.len() <= e as usize {
                    let next = &pw[pw.len() - 1] * &pw[1];
                    pw.push(next);
                }
                t = &t * &pw[e as usize];
            }
            acc += &t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.universe.len(), "evaluation point has wrong arity");
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(c.to_f64(), |acc, (&e, &x)| if e == 0 { acc } else { acc * x.powi(e as i32) })
            })
            .sum()
    }

    pub fn eval_c64(&self, point: &[f64]) -> Complex64 {
        assert_eq!(point.len(), self.universe.len(), "evaluation point has wrong arity");
        self.terms
            .iter()
            .map(|(m, c)| {
                let mono = m.0.iter().zip(point).fold(1.0, |acc, (&e, &x)| if e == 0 { acc } else { acc * x.powi(e as i32) });
                c.to_c64() * mono
            })
            .sum()
    }

    /// Replace variable `var` by the constant `value`, staying in the same universe.
    pub fn specialize(&self, var: usize, value: &Scalar) -> Polynomial {
        let mut out = Polynomial::zero(&self.universe);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut exps = m.0.clone();
            exps[var] = 0;
            out.add_term(Monomial(exps), &(c * &value.pow(e)));
        }
        out
    }

    /// Composition: each variable named in `map` is replaced by its image; the
    /// remaining variables are matched by name in `target`.
    pub fn substitute(
        &self,
        map: &BTreeMap<String, Polynomial>,
        target: &Arc<VarUniverse>,
    ) -> Result<Polynomial, AlgebraError> {
        let mut images = Vec::with_capacity(self.universe.len());
        for idx in 0..self.universe.len() {
            let name = self.universe.name(idx);
            let img = match map.get(name) {
                Some(p) => {
                    if !same_universe(p.universe(), target) {
                        return Err(AlgebraError::UniverseMismatch);
                    }
                    p.clone()
                }
                None => Polynomial::var_named(target, name)?,
            };
            images.push(img);
        }
        for name in map.keys() {
            if self.universe.index_of(name).is_none() {
                return Err(AlgebraError::UnknownVariable(name.clone()));
            }
        }
        Ok(self.compose(&images, target))
    }

    /// Composition with one image per variable, all living in `target`.
    pub fn compose(&self, images: &[Polynomial], target: &Arc<VarUniverse>) -> Polynomial {
        assert_eq!(images.len(), self.universe.len());
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(target), p.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[i];
                while pw.len() <= e as usize {
                    let next = &pw[pw.len() - 1] * &pw[1];
                    pw.push(next);
                }
                t = &t * &pw[e as usize];
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, &tc);
            }
        }
        out
    }

    /// Re-express in another universe containing every variable in our support.
    pub fn embed(&self, target: &Arc<VarUniverse>) -> Result<Polynomial, AlgebraError> {
        if same_universe(&self.universe, target) {
            return Ok(self.clone());
        }
        let support = self.support_vars();
        let mut index_map = vec![usize::MAX; self.universe.len()];
        for &v in &support {
            let name = self.universe.name(v);
            index_map[v] = target
                .index_of(name)
                .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))?;
        }
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[index_map[i]] = k;
                }
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Coefficients with respect to `var`, indexed by degree.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Polynomial::zero(&self.universe); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut exps = m.0.clone();
            exps[var] = 0;
            out[e].add_term(Monomial(exps), c);
        }
        out
    }

    pub fn from_coefficients_in(universe: &Arc<VarUniverse>, var: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut out = Polynomial::zero(universe);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                let mut exps = m.0.clone();
                exps[var] += k as u32;
                out.add_term(Monomial(exps), v);
            }
        }
        out
    }

    fn fmt_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.universe.name(i).to_string()),
                _ => parts.push(format!("{}^{}", self.universe.name(i), e)),
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for Polynomial {
    /// Canonical text: terms in descending graded-lex order, parseable by
    /// [`parse_polynomial`](super::parse_polynomial).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (negative, mag) = if c.is_real() || num_traits::Zero::is_zero(c.re()) {
                if c.is_negative_like() { (true, -c) } else { (false, c.clone()) }
            } else {
                (false, c.clone())
            };
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            let mono = self.fmt_monomial(m);
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial universes differ")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial universes differ")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial universes differ")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Arc<VarUniverse> {
        VarUniverse::new(["x", "y"], []).unwrap()
    }

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![1, 1]);
        let c = Monomial(vec![0, 3]);
        assert!(a > b);
        assert!(c > a);
    }

    #[test]
    fn difference_of_squares() {
        let u = xy();
        let x = Polynomial::var(&u, 0);
        let y = Polynomial::var(&u, 1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.to_string(), "x^2 - y^2");
        assert!((&p + &(-&p)).is_zero());
        assert_eq!(&p * &Polynomial::one(&u), p);
    }

    #[test]
    fn exact_division() {
        let u = xy();
        let x = Polynomial::var(&u, 0);
        let y = Polynomial::var(&u, 1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.div_exact(&(&x - &y)), Some(&x + &y));
        assert_eq!(p.div_exact(&x), None);
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        let a = Polynomial::var(&xy(), 0);
        let b = Polynomial::var(&VarUniverse::new(["x"], []).unwrap(), 0);
        assert!(matches!(a.try_add(&b), Err(AlgebraError::UniverseMismatch)));
    }
}
