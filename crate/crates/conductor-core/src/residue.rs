//! Residue-field computations: Laurent polynomials and rational functions in
//! the reduction coordinate over `F_q`.
//!
//! These carry the beta-side of boundary valuations: the order of a residue at
//! one of the two branches of the special fiber.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{CoreError, CoreResult};
use crate::fq::{Fq, FqElem};

/// Laurent polynomial over F_q in one variable.
#[derive(Clone, PartialEq, Eq)]
pub struct ResiduePoly {
    fq: Arc<Fq>,
    terms: BTreeMap<i64, FqElem>,
}

impl ResiduePoly {
    pub fn zero(fq: &Arc<Fq>) -> Self {
        ResiduePoly {
            fq: fq.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(fq: &Arc<Fq>, c: FqElem, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        ResiduePoly {
            fq: fq.clone(),
            terms,
        }
    }

    pub fn from_terms(fq: &Arc<Fq>, it: impl IntoIterator<Item = (i64, FqElem)>) -> Self {
        let mut out = Self::zero(fq);
        for (e, c) in it {
            out.add_term(e, c);
        }
        out
    }

    pub fn add_term(&mut self, exp: i64, c: FqElem) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(|| FqElem::zero(&self.fq));
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn fq(&self) -> &Arc<Fq> {
        &self.fq
    }

    pub fn terms(&self) -> &BTreeMap<i64, FqElem> {
        &self.terms
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        ResiduePoly {
            fq: self.fq.clone(),
            terms: self.terms.iter().map(|(&e, c)| (e, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.fq);
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1.mul(c2));
            }
        }
        out
    }

    /// Formal derivative d/dx.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(&self.fq);
        for (&e, c) in &self.terms {
            let scalar = FqElem::from_int(&self.fq, e);
            out.add_term(e - 1, c.mul(&scalar));
        }
        out
    }

    /// Strips the x^min factor, returning an honest polynomial and the shift.
    pub fn strip_monomial(&self) -> (Self, i64) {
        match self.min_exp() {
            None => (self.clone(), 0),
            Some(m) => (
                ResiduePoly {
                    fq: self.fq.clone(),
                    terms: self.terms.iter().map(|(&e, c)| (e - m, c.clone())).collect(),
                },
                m,
            ),
        }
    }

    /// True when the polynomial (after stripping the monomial part) has no
    /// repeated roots in the algebraic closure: gcd(f, f') is constant.
    pub fn is_squarefree(&self) -> CoreResult<bool> {
        let (f, _) = self.strip_monomial();
        if f.is_zero() {
            return Err(CoreError::Domain("squarefree test of zero".into()));
        }
        if f.max_exp() == Some(0) {
            return Ok(true);
        }
        let fd = f.derivative();
        if fd.is_zero() {
            // f is a p-th power of something nonconstant
            return Ok(false);
        }
        let g = poly_gcd(&f, &fd);
        Ok(g.max_exp() == Some(0))
    }
}

/// Monic gcd of two (non-Laurent) polynomials over F_q.
fn poly_gcd(a: &ResiduePoly, b: &ResiduePoly) -> ResiduePoly {
    let (mut a, _) = a.strip_monomial();
    let (mut b, _) = b.strip_monomial();
    while !b.is_zero() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r.strip_monomial().0;
    }
    // normalize monic
    if let Some(e) = a.max_exp() {
        let lc = a.terms[&e].clone();
        let inv = lc.inv();
        let terms = a.terms.iter().map(|(&k, c)| (k, c.mul(&inv))).collect();
        a = ResiduePoly {
            fq: a.fq.clone(),
            terms,
        };
    }
    a
}

/// Exact quotient of non-Laurent polynomials; the remainder must vanish.
fn poly_div_exact(a: &ResiduePoly, b: &ResiduePoly) -> ResiduePoly {
    let db = b.max_exp().expect("division by zero poly");
    let lb_inv = b.terms[&db].inv();
    let mut r = a.clone();
    let mut q = ResiduePoly::zero(&a.fq);
    while let Some(dr) = r.max_exp() {
        if dr < db || r.is_zero() {
            break;
        }
        let c = r.terms[&dr].mul(&lb_inv);
        q.add_term(dr - db, c.clone());
        for (&e, bc) in &b.terms {
            r.add_term(e + dr - db, bc.mul(&c).neg());
        }
    }
    assert!(r.is_zero(), "non-exact residue polynomial division");
    q
}

fn poly_rem(a: &ResiduePoly, b: &ResiduePoly) -> ResiduePoly {
    let db = b.max_exp().expect("division by zero poly");
    let lb = b.terms[&db].clone();
    let lb_inv = lb.inv();
    let mut r = a.clone();
    while let Some(dr) = r.max_exp() {
        if dr < db {
            break;
        }
        let lr = r.terms[&dr].clone();
        let q = lr.mul(&lb_inv);
        for (&e, c) in &b.terms {
            r.add_term(e + dr - db, c.mul(&q).neg());
        }
    }
    r
}

/// Rational function in the reduction coordinate: numerator / denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueElem {
    pub num: ResiduePoly,
    pub den: ResiduePoly,
}

impl ResidueElem {
    pub fn from_poly(p: ResiduePoly) -> Self {
        let one = ResiduePoly::monomial(p.fq(), FqElem::one(p.fq()), 0);
        ResidueElem { num: p, den: one }
    }

    pub fn new(num: ResiduePoly, den: ResiduePoly) -> CoreResult<Self> {
        if den.is_zero() {
            return Err(CoreError::Domain("zero denominator residue".into()));
        }
        if num.is_zero() {
            let one = ResiduePoly::monomial(den.fq(), FqElem::one(den.fq()), 0);
            return Ok(ResidueElem { num, den: one });
        }
        // keep the representation reduced: cancel the polynomial gcd and the
        // common monomial part
        let g = poly_gcd(&num.strip_monomial().0, &den.strip_monomial().0);
        let (mut num, sn) = num.strip_monomial();
        let (mut den, sd) = den.strip_monomial();
        if g.max_exp() != Some(0) {
            num = poly_div_exact(&num, &g);
            den = poly_div_exact(&den, &g);
        }
        let shift = sn - sd;
        let num = ResiduePoly {
            fq: num.fq.clone(),
            terms: num.terms.iter().map(|(&e, c)| (e + shift, c.clone())).collect(),
        };
        Ok(ResidueElem { num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Order at the origin branch (ord(x) = +1) or at infinity (ord(x) = -1).
    pub fn order(&self, toward_infinity: bool) -> CoreResult<i64> {
        if self.num.is_zero() {
            return Err(CoreError::Domain("order of zero residue".into()));
        }
        if toward_infinity {
            Ok(-(self.num.max_exp().unwrap() - self.den.max_exp().unwrap()))
        } else {
            Ok(self.num.min_exp().unwrap() - self.den.min_exp().unwrap())
        }
    }
}

impl fmt::Debug for ResiduePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})u")?,
                _ => write!(f, "({c})u^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ResidueElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}
