//! Truncated Laurent series over `F_q` in fractional powers of the uniformizer:
//! the base field `K' = F_q((pi^(1/e)))` of a scenario.
//!
//! A `FieldElem` stores finitely many known terms `c_j * pi^(j/e)` together
//! with a precision cap: exponents at or beyond the cap are unknown. All
//! valuations are normalized so that `v(pi) = 1` and take values in `(1/e)Z`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{CoreError, CoreResult};
use crate::fq::{Fq, FqElem};
use crate::rat::Rat;

/// Valuation of a truncated series element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Val {
    /// Valuation read off the least known term.
    Finite(Rat),
    /// The element is exactly zero.
    Infinite,
    /// No terms are known; the valuation is only bounded below by the cap.
    BelowPrecision(Rat),
}

impl Val {
    pub fn known(&self) -> CoreResult<Rat> {
        match self {
            Val::Finite(v) => Ok(v.clone()),
            Val::Infinite => Err(CoreError::Domain("valuation of exact zero".into())),
            Val::BelowPrecision(b) => Err(CoreError::InsufficientPrecision(format!(
                "valuation only bounded below by {b}"
            ))),
        }
    }
}

/// Element of `F_q((pi^(1/e)))` with explicit precision tracking.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElem {
    fq: Arc<Fq>,
    /// Ramification index: exponents are integers j meaning pi^(j/e).
    ram: i64,
    /// Known nonzero terms, exponent -> coefficient. All exponents < prec.
    terms: BTreeMap<i64, FqElem>,
    /// Exponent cap: `None` means the element is exact.
    prec: Option<i64>,
}

impl FieldElem {
    pub fn zero(fq: &Arc<Fq>) -> Self {
        FieldElem {
            fq: fq.clone(),
            ram: 1,
            terms: BTreeMap::new(),
            prec: None,
        }
    }

    pub fn one(fq: &Arc<Fq>) -> Self {
        Self::monomial(fq, FqElem::one(fq), Rat::zero())
    }

    /// A single exact term `c * pi^exp`; `exp` must have denominator dividing
    /// some lattice, which becomes the element's ramification index.
    pub fn monomial(fq: &Arc<Fq>, c: FqElem, exp: Rat) -> Self {
        if c.is_zero() {
            return Self::zero(fq);
        }
        let den = exp.den().clone();
        let ram: i64 = den.try_into().expect("ramification index overflow");
        let num: i64 = exp.num().clone().try_into().expect("exponent overflow");
        let mut terms = BTreeMap::new();
        terms.insert(num, c);
        FieldElem {
            fq: fq.clone(),
            ram,
            terms,
            prec: None,
        }
    }

    pub fn from_int(fq: &Arc<Fq>, n: i64) -> Self {
        Self::monomial(fq, FqElem::from_int(fq, n), Rat::zero())
    }

    pub fn fq(&self) -> &Arc<Fq> {
        &self.fq
    }

    pub fn ram(&self) -> i64 {
        self.ram
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec.is_none()
    }

    /// True when no term is known (either exact zero or zero up to precision).
    pub fn no_known_terms(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn precision_exponent(&self) -> Option<Rat> {
        self.prec.map(|n| Rat::new(n, self.ram))
    }

    pub fn valuation(&self) -> Val {
        match self.terms.keys().next() {
            Some(&j) => Val::Finite(Rat::new(j, self.ram)),
            None => match self.prec {
                None => Val::Infinite,
                Some(n) => Val::BelowPrecision(Rat::new(n, self.ram)),
            },
        }
    }

    /// Leading coefficient c of c * pi^v + higher.
    pub fn leading_coeff(&self) -> CoreResult<FqElem> {
        self.terms
            .values()
            .next()
            .cloned()
            .ok_or_else(|| CoreError::InsufficientPrecision("no known leading term".into()))
    }

    /// Rewrites on a finer uniformizer lattice; `new_ram` must be a multiple.
    pub fn lift_ram(&self, new_ram: i64) -> Self {
        assert!(new_ram % self.ram == 0, "lift_ram to non-multiple");
        let k = new_ram / self.ram;
        if k == 1 {
            return self.clone();
        }
        FieldElem {
            fq: self.fq.clone(),
            ram: new_ram,
            terms: self.terms.iter().map(|(&j, c)| (j * k, c.clone())).collect(),
            prec: self.prec.map(|n| n * k),
        }
    }

    fn unify(&self, other: &Self) -> (Self, Self) {
        let l = num_integer::lcm(self.ram, other.ram);
        (self.lift_ram(l), other.lift_ram(l))
    }

    fn normalized(mut self) -> Self {
        if let Some(n) = self.prec {
            self.terms.retain(|&j, _| j < n);
        }
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.unify(other);
        for (&j, c) in &b.terms {
            let entry = a
                .terms
                .entry(j)
                .or_insert_with(|| FqElem::zero(&a.fq));
            *entry = entry.add(c);
        }
        a.prec = min_prec(a.prec, b.prec);
        a.normalized()
    }

    pub fn neg(&self) -> Self {
        FieldElem {
            fq: self.fq.clone(),
            ram: self.ram,
            terms: self.terms.iter().map(|(&j, c)| (j, c.neg())).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.unify(other);
        // exact zero annihilates regardless of the other factor's precision
        if a.is_exact_zero() || b.is_exact_zero() {
            return FieldElem::zero(&a.fq);
        }
        let mut terms: BTreeMap<i64, FqElem> = BTreeMap::new();
        for (&i, c) in &a.terms {
            for (&j, d) in &b.terms {
                let entry = terms
                    .entry(i + j)
                    .or_insert_with(|| FqElem::zero(&a.fq));
                *entry = entry.add(&c.mul(d));
            }
        }
        // N = min(N_a + v_b, N_b + v_a) in lattice units, using the cap as a
        // lower bound for an unknown valuation
        let va = a.terms.keys().next().copied().or(a.prec);
        let vb = b.terms.keys().next().copied().or(b.prec);
        let prec = match (a.prec, b.prec) {
            (None, None) => None,
            (pa, pb) => {
                let ca = pa.map(|n| n + vb.unwrap_or(0));
                let cb = pb.map(|n| n + va.unwrap_or(0));
                min_prec(ca, cb)
            }
        };
        FieldElem {
            fq: a.fq.clone(),
            ram: a.ram,
            terms,
            prec,
        }
        .normalized()
    }

    pub fn mul_fq(&self, c: &FqElem) -> Self {
        if c.is_zero() {
            return FieldElem::zero(&self.fq);
        }
        FieldElem {
            fq: self.fq.clone(),
            ram: self.ram,
            terms: self.terms.iter().map(|(&j, d)| (j, d.mul(c))).collect(),
            prec: self.prec,
        }
        .normalized()
    }

    /// Multiplies by pi^exp.
    pub fn shift(&self, exp: &Rat) -> Self {
        let den: i64 = exp.den().clone().try_into().expect("shift overflow");
        let l = num_integer::lcm(self.ram, den);
        let lifted = self.lift_ram(l);
        let num: i64 = exp.num().clone().try_into().expect("shift overflow");
        let delta = num * (l / den);
        FieldElem {
            fq: lifted.fq,
            ram: l,
            terms: lifted.terms.into_iter().map(|(j, c)| (j + delta, c)).collect(),
            prec: lifted.prec.map(|n| n + delta),
        }
    }

    /// Multiplicative inverse, truncated at relative precision `rel_cap`
    /// lattice units when the element is exact.
    pub fn inv(&self, default_rel_cap: i64) -> CoreResult<Self> {
        let lead = self
            .terms
            .iter()
            .next()
            .map(|(&j, c)| (j, c.clone()))
            .ok_or_else(|| CoreError::InsufficientPrecision("inverting element with no known leading term".into()))?;
        let (j0, c0) = lead;
        // x = c0 pi^(j0/e) (1 + u), v(u) > 0; inv = c0^-1 pi^(-j0/e) sum (-u)^k
        let rel_cap = match self.prec {
            Some(n) => n - j0,
            None => default_rel_cap.max(1) * self.ram,
        };
        let c0_inv = c0.inv();
        let unit = self.shift(&Rat::new(-j0, self.ram)).mul_fq(&c0_inv);
        // unit = 1 + u
        let mut u = unit.clone();
        let one = FieldElem::one(&self.fq).lift_ram(u.ram);
        u = u.sub(&one);
        let mut acc = FieldElem::one(&self.fq).lift_ram(u.ram);
        let mut pow = FieldElem::one(&self.fq).lift_ram(u.ram);
        if !u.no_known_terms() {
            let vu = *u.terms.keys().next().unwrap();
            assert!(vu > 0, "unit normalization failed");
            let steps = (rel_cap * u.ram / self.ram) / vu + 1;
            for _ in 0..steps {
                pow = pow.mul(&u).neg();
                acc = acc.add(&pow);
            }
        }
        let mut out = acc.mul_fq(&c0_inv).shift(&Rat::new(-j0, self.ram));
        let cap_units = rel_cap * out.ram / self.ram - j0 * out.ram / self.ram;
        out.prec = min_prec(out.prec, Some(cap_units));
        Ok(out.normalized())
    }

    /// The p-th root; Frobenius is bijective in characteristic p. Exponents
    /// not divisible by p force a finer lattice (ram multiplied by p).
    pub fn pth_root(&self) -> Self {
        let p = self.fq.p() as i64;
        let divisible = self.terms.keys().all(|j| j % p == 0) && self.prec.map_or(true, |n| n % p == 0);
        let (src, ram) = if divisible {
            (self.clone(), self.ram)
        } else {
            (self.clone(), self.ram * p)
        };
        let map_exp = |j: i64| if divisible { j / p } else { j };
        FieldElem {
            fq: src.fq.clone(),
            ram,
            terms: src
                .terms
                .iter()
                .map(|(&j, c)| (map_exp(j), c.frobenius_root()))
                .collect(),
            prec: src.prec.map(|n| {
                // v(root) = v(x)/p, and x known mod pi^(N/e) determines the
                // root mod pi^(N/(pe)); both conventions land on these units
                if divisible {
                    n / p
                } else {
                    n
                }
            }),
        }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = FieldElem::one(&self.fq);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The residue coefficient at exact valuation `at`: zero if the exponent
    /// is absent but above-precision, error if unknowable.
    pub fn coeff_at(&self, at: &Rat) -> CoreResult<FqElem> {
        let den: i64 = at.den().clone().try_into().unwrap();
        if self.ram % den != 0 {
            return Ok(FqElem::zero(&self.fq));
        }
        let j: i64 = at.num().clone().try_into().unwrap();
        let j = j * (self.ram / den);
        if let Some(n) = self.prec {
            if j >= n {
                return Err(CoreError::InsufficientPrecision(format!(
                    "coefficient at pi^{at} beyond cap"
                )));
            }
        }
        Ok(self
            .terms
            .get(&j)
            .cloned()
            .unwrap_or_else(|| FqElem::zero(&self.fq)))
    }

    /// Truncates to the given exponent cap (in v(pi)=1 units).
    pub fn truncate(&self, cap: &Rat) -> Self {
        let den: i64 = cap.den().clone().try_into().unwrap();
        let l = num_integer::lcm(self.ram, den);
        let lifted = self.lift_ram(l);
        let num: i64 = cap.num().clone().try_into().unwrap();
        let n = num * (l / den);
        FieldElem {
            fq: lifted.fq,
            ram: l,
            terms: lifted.terms,
            prec: min_prec(lifted.prec, Some(n)),
        }
        .normalized()
    }

    /// Exact equality of known data; `true` means same terms and same cap.
    pub fn same_series(&self, other: &Self) -> bool {
        let (a, b) = self.unify(other);
        a.terms == b.terms && a.prec == b.prec
    }

    /// Whether self - other is zero up to the joint precision cap.
    pub fn eq_up_to_prec(&self, other: &Self) -> bool {
        self.sub(other).no_known_terms()
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&j, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let e = Rat::new(j, self.ram);
            if e.is_zero() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "pi^{e}")?;
            } else {
                write!(f, "{c}*pi^{e}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(n) = self.prec {
            write!(f, " + O(pi^{})", Rat::new(n, self.ram))?;
        }
        Ok(())
    }
}
