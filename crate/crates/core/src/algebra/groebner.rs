//! Buchberger's algorithm (graded-lex) specialised to deciding `1 ∈ I`.
//!
//! Every basis element carries cofactors expressing it in terms of the input
//! generators, so a positive answer comes with a verified Bézout certificate.

use std::collections::BTreeSet;

use super::{Monomial, Polynomial, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroebnerBudget {
    /// Maximum number of S-polynomial reductions.
    pub max_reductions: usize,
    /// Maximum total degree of any intermediate polynomial.
    pub max_degree: u32,
}

impl Default for GroebnerBudget {
    fn default() -> Self {
        GroebnerBudget { max_reductions: 10_000, max_degree: 40 }
    }
}

#[derive(Clone, Debug)]
pub enum UnitMembership {
    /// `1 = Σ cofactors[k] · gens[k]`, verified exactly.
    Yes { cofactors: Vec<Polynomial> },
    /// The reduced Gröbner basis differs from `{1}`.
    No { basis: Vec<Polynomial> },
    /// Budget exhausted before a decision.
    Inconclusive { reductions: usize },
}

impl UnitMembership {
    pub fn is_yes(&self) -> bool {
        matches!(self, UnitMembership::Yes { .. })
    }
}

struct Element {
    poly: Polynomial,
    cof: Vec<Polynomial>,
    lm: Monomial,
}

/// Decide whether the ideal generated by `gens` contains 1.
pub fn ideal_contains_one(gens: &[Polynomial], budget: GroebnerBudget) -> UnitMembership {
    let Some(first) = gens.iter().find(|g| !g.is_zero()) else {
        return UnitMembership::No { basis: Vec::new() };
    };
    let universe = first.universe().clone();
    let ngens = gens.len();
    let unit_cof = |k: usize, c: &Scalar| -> Vec<Polynomial> {
        (0..ngens)
            .map(|j| if j == k { Polynomial::constant(&universe, c.clone()) } else { Polynomial::zero(&universe) })
            .collect()
    };

    let mut basis: Vec<Element> = Vec::new();
    let mut reductions = 0usize;

    // Seed with the monic input generators.
    for (k, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let inv = g.leading_coefficient().inv().expect("nonzero");
        let poly = g.scale(&inv);
        let lm = poly.leading_term().expect("nonzero").0.clone();
        let elem = Element { poly, cof: unit_cof(k, &inv), lm };
        if elem.lm.is_one() {
            return certify(gens, elem.cof);
        }
        basis.push(elem);
    }

    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            push_pair(&basis, &mut pairs, i, j);
        }
    }

    while let Some(&pair) = pairs.iter().next() {
        pairs.remove(&pair);
        let (_, i, j) = pair;
        if reductions >= budget.max_reductions {
            return UnitMembership::Inconclusive { reductions };
        }
        reductions += 1;
        let (mut s, mut s_cof) = s_polynomial(&basis[i], &basis[j]);
        if !reduce(&mut s, &mut s_cof, &basis) {
            continue;
        }
        if s.total_degree() > budget.max_degree {
            return UnitMembership::Inconclusive { reductions };
        }
        let inv = s.leading_coefficient().inv().expect("nonzero");
        let poly = s.scale(&inv);
        let cof: Vec<Polynomial> = s_cof.iter().map(|c| c.scale(&inv)).collect();
        let lm = poly.leading_term().expect("nonzero").0.clone();
        if lm.is_one() {
            return certify(gens, cof);
        }
        basis.push(Element { poly, cof, lm });
        let new = basis.len() - 1;
        for i in 0..new {
            push_pair(&basis, &mut pairs, i, new);
        }
    }

    UnitMembership::No { basis: interreduce(basis.into_iter().map(|e| e.poly).collect()) }
}

fn push_pair(basis: &[Element], pairs: &mut BTreeSet<(u32, usize, usize)>, i: usize, j: usize) {
    // Buchberger's first criterion: coprime leading monomials reduce to zero.
    if basis[i].lm.coprime(&basis[j].lm) {
        return;
    }
    pairs.insert((basis[i].lm.lcm(&basis[j].lm).degree(), i, j));
}

fn s_polynomial(a: &Element, b: &Element) -> (Polynomial, Vec<Polynomial>) {
    let l = a.lm.lcm(&b.lm);
    let ma = a.lm.quotient_of(&l);
    let mb = b.lm.quotient_of(&l);
    let one = Scalar::one();
    let minus = Scalar::from_int(-1);
    let s = &a.poly.mul_term(&ma, &one) + &b.poly.mul_term(&mb, &minus);
    let cof = a
        .cof
        .iter()
        .zip(&b.cof)
        .map(|(ca, cb)| &ca.mul_term(&ma, &one) + &cb.mul_term(&mb, &minus))
        .collect();
    (s, cof)
}

/// Full reduction of `p` modulo `basis`, updating cofactors. Returns `false`
/// when `p` reduces to zero.
fn reduce(p: &mut Polynomial, cof: &mut [Polynomial], basis: &[Element]) -> bool {
    let universe = p.universe().clone();
    let mut rem = Polynomial::zero(&universe);
    while let Some((lm, lc)) = p.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
        match basis.iter().find(|e| e.lm.divides(&lm)) {
            Some(e) => {
                let q = e.lm.quotient_of(&lm);
                let neg = -&lc;
                *p = &*p + &e.poly.mul_term(&q, &neg);
                for (c, ec) in cof.iter_mut().zip(&e.cof) {
                    if !ec.is_zero() {
                        *c = &*c + &ec.mul_term(&q, &neg);
                    }
                }
            }
            None => {
                rem.add_term(lm.clone(), &lc);
                *p = &*p - &Polynomial::monomial(&universe, lm, lc);
            }
        }
    }
    *p = rem;
    !p.is_zero()
}

fn certify(gens: &[Polynomial], cofactors: Vec<Polynomial>) -> UnitMembership {
    let universe = gens[0].universe().clone();
    let mut total = Polynomial::zero(&universe);
    for (c, g) in cofactors.iter().zip(gens) {
        total = &total + &(c * g);
    }
    assert!(
        total == Polynomial::one(&universe),
        "Bézout certificate failed to verify: {total}"
    );
    UnitMembership::Yes { cofactors }
}

/// Reduced Gröbner basis from a (non-reduced) one.
fn interreduce(mut polys: Vec<Polynomial>) -> Vec<Polynomial> {
    polys.sort_by(|a, b| a.leading_term().map(|t| t.0).cmp(&b.leading_term().map(|t| t.0)));
    // Drop elements whose leading monomial is divisible by another's.
    let mut minimal: Vec<Polynomial> = Vec::new();
    for p in polys {
        let lm = p.leading_term().expect("nonzero").0.clone();
        if minimal.iter().any(|q| q.leading_term().expect("nonzero").0.divides(&lm)) {
            continue;
        }
        minimal.retain(|q| !lm.divides(q.leading_term().expect("nonzero").0));
        minimal.push(p);
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Element> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, q)| Element { poly: q.clone(), cof: Vec::new(), lm: q.leading_term().expect("nonzero").0.clone() })
            .collect();
        let mut p = minimal[k].clone();
        reduce(&mut p, &mut [], &others);
        let inv = p.leading_coefficient().inv().expect("nonzero");
        out.push(p.scale(&inv));
    }
    out.sort_by(|a, b| b.leading_term().map(|t| t.0).cmp(&a.leading_term().map(|t| t.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_polynomial, Field, VarUniverse};

    #[test]
    fn bezout_pair() {
        let u = VarUniverse::new(["v"], []).unwrap();
        let gens = vec![
            parse_polynomial("v", &u, Field::Rational).unwrap(),
            parse_polynomial("1 - v^2", &u, Field::Rational).unwrap(),
        ];
        assert!(ideal_contains_one(&gens, GroebnerBudget::default()).is_yes());
    }

    #[test]
    fn common_zero_at_origin() {
        let u = VarUniverse::new(["x", "y"], []).unwrap();
        let gens = vec![
            parse_polynomial("x*y", &u, Field::Rational).unwrap(),
            parse_polynomial("x^2 - y^2", &u, Field::Rational).unwrap(),
        ];
        match ideal_contains_one(&gens, GroebnerBudget::default()) {
            UnitMembership::No { basis } => assert!(!basis.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_generator() {
        let u = VarUniverse::new(["x"], []).unwrap();
        let gens = vec![Polynomial::one(&u)];
        assert!(ideal_contains_one(&gens, GroebnerBudget::default()).is_yes());
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let u = VarUniverse::new(["x", "y", "z"], []).unwrap();
        let gens: Vec<Polynomial> = ["x^2*y + z", "x*y^2 - 1", "y*z^2 - x"]
            .iter()
            .map(|s| parse_polynomial(s, &u, Field::Rational).unwrap())
            .collect();
        let budget = GroebnerBudget { max_reductions: 1, max_degree: 40 };
        assert!(matches!(ideal_contains_one(&gens, budget), UnitMembership::Inconclusive { .. }));
    }
}
