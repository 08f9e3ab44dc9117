//! Laurent polynomials in the annulus coordinate with `FieldElem` coefficients:
//! the functions on a closed annulus that every cover in scope is built from.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{CoreError, CoreResult};
use crate::field::FieldElem;
use crate::fq::{Fq, FqElem};
use crate::rat::Rat;

/// Finite map `exponent -> coefficient`, coefficient exponents in xi.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    fq: Arc<Fq>,
    terms: BTreeMap<i64, FieldElem>,
}

impl LaurentPoly {
    pub fn zero(fq: &Arc<Fq>) -> Self {
        LaurentPoly {
            fq: fq.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(fq: &Arc<Fq>) -> Self {
        Self::monomial(fq, FieldElem::one(fq), 0)
    }

    /// c * xi^exp
    pub fn monomial(fq: &Arc<Fq>, c: FieldElem, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_exact_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly {
            fq: fq.clone(),
            terms,
        }
    }

    /// The coordinate xi itself.
    pub fn xi(fq: &Arc<Fq>) -> Self {
        Self::monomial(fq, FieldElem::one(fq), 1)
    }

    pub fn from_terms(fq: &Arc<Fq>, it: impl IntoIterator<Item = (i64, FieldElem)>) -> Self {
        let mut out = Self::zero(fq);
        for (e, c) in it {
            out.add_term(e, c);
        }
        out
    }

    pub fn add_term(&mut self, exp: i64, c: FieldElem) {
        if c.is_exact_zero() {
            return;
        }
        match self.terms.remove(&exp) {
            None => {
                self.terms.insert(exp, c);
            }
            Some(old) => {
                // an exactly-cancelled coefficient is dropped; a coefficient
                // that is only zero up to precision stays, so the unknown
                // surfaces as a precision error downstream
                let sum = old.add(&c);
                if !sum.is_exact_zero() {
                    self.terms.insert(exp, sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn fq(&self) -> &Arc<Fq> {
        &self.fq
    }

    pub fn terms(&self) -> &BTreeMap<i64, FieldElem> {
        &self.terms
    }

    pub fn coeff(&self, exp: i64) -> FieldElem {
        self.terms
            .get(&exp)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(&self.fq))
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
        LaurentPoly {
            fq: self.fq.clone(),
            terms: self.terms.iter().map(|(&e, c)| (e, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
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

    pub fn mul_scalar(&self, c: &FieldElem) -> Self {
        let mut out = Self::zero(&self.fq);
        for (&e, a) in &self.terms {
            out.add_term(e, a.mul(c));
        }
        out
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::one(&self.fq);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal derivative d/dxi.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(&self.fq);
        for (&e, c) in &self.terms {
            let scalar = FqElem::from_int(&self.fq, e);
            out.add_term(e - 1, c.mul_fq(&scalar));
        }
        out
    }

    /// Largest power of xi dividing the polynomial; (unit-shifted poly, shift).
    pub fn strip_xi(&self) -> (Self, i64) {
        match self.min_exp() {
            None => (self.clone(), 0),
            Some(m) => (
                LaurentPoly {
                    fq: self.fq.clone(),
                    terms: self.terms.iter().map(|(&e, c)| (e - m, c.clone())).collect(),
                },
                m,
            ),
        }
    }

    /// Coefficient valuations as envelope lines `(slope = exponent, offset =
    /// v(coeff))`; errors if any coefficient has only a precision bound.
    pub fn envelope_lines(&self) -> CoreResult<Vec<(Rat, Rat)>> {
        if self.is_zero() {
            return Err(CoreError::Domain("envelope of zero polynomial".into()));
        }
        let mut lines = Vec::new();
        for (&e, c) in &self.terms {
            let v = c.valuation().known().map_err(|_| {
                CoreError::InsufficientPrecision(format!(
                    "coefficient of xi^{e} has unknown valuation"
                ))
            })?;
            lines.push((Rat::int(e), v));
        }
        Ok(lines)
    }
}

/// Polynomial in y with LaurentPoly coefficients; used by the Monic cover kind.
#[derive(Clone, PartialEq, Eq)]
pub struct YPoly {
    fq: Arc<Fq>,
    /// Coefficient of y^i at index i; the top coefficient must be the constant 1.
    pub coeffs: Vec<LaurentPoly>,
}

impl YPoly {
    pub fn new(fq: &Arc<Fq>, coeffs: Vec<LaurentPoly>) -> CoreResult<Self> {
        if coeffs.len() < 2 {
            return Err(CoreError::Scenario("monic polynomial must have degree >= 1".into()));
        }
        let top = coeffs.last().unwrap();
        let is_monic = top.terms().len() == 1
            && top
                .terms()
                .get(&0)
                .map(|c| c.same_series(&FieldElem::one(fq)))
                .unwrap_or(false);
        if !is_monic {
            return Err(CoreError::Scenario("leading coefficient must be 1".into()));
        }
        Ok(YPoly {
            fq: fq.clone(),
            coeffs,
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn fq(&self) -> &Arc<Fq> {
        &self.fq
    }

    /// Formal derivative with respect to y.
    pub fn derivative_y(&self) -> Vec<LaurentPoly> {
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let scalar = FqElem::from_int(&self.fq, i as i64);
            out.push(c.mul_scalar(&FieldElem::monomial(&self.fq, scalar, Rat::zero())));
        }
        out
    }

    /// Resultant of P and dP/dy in the Laurent-polynomial coefficient ring,
    /// via a division-free determinant of the Sylvester matrix. The
    /// discriminant is this resultant up to a sign and the (unit) leading
    /// coefficient; for valuation purposes the sign is irrelevant.
    pub fn discriminant_resultant(&self) -> CoreResult<LaurentPoly> {
        let p = &self.coeffs;
        let q = self.derivative_y();
        let n = p.len() - 1;
        let m = q.len() - 1;
        if q.iter().all(|c| c.is_zero()) {
            return Err(CoreError::Domain("dP/dy vanishes identically".into()));
        }
        let size = n + m;
        let fq = &self.fq;
        let zero = LaurentPoly::zero(fq);
        let mut mat = vec![vec![zero.clone(); size]; size];
        for row in 0..m {
            for (k, c) in p.iter().enumerate() {
                mat[row][row + n - k] = c.clone();
            }
        }
        for row in 0..n {
            for (k, c) in q.iter().enumerate() {
                mat[m + row][row + m - k] = c.clone();
            }
        }
        Ok(det_division_free(fq, &mat))
    }
}

/// Determinant over the Laurent-polynomial ring by column-subset dynamic
/// programming (no divisions, exact).
fn det_division_free(fq: &Arc<Fq>, mat: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = mat.len();
    assert!(n <= 16, "determinant size out of supported range");
    // dp[s] = signed minor of rows 0..popcount(s) against column set s; the
    // parity of used columns below `col` gives the Laplace sign
    let mut dp: Vec<Option<LaurentPoly>> = vec![None; 1 << n];
    dp[0] = Some(LaurentPoly::one(fq));
    for s in 0usize..(1 << n) {
        let Some(cur) = dp[s].clone() else { continue };
        if cur.is_zero() && s != 0 {
            continue;
        }
        let row = (s as u32).count_ones() as usize;
        if row == n {
            continue;
        }
        for col in 0..n {
            if s & (1 << col) != 0 {
                continue;
            }
            let entry = &mat[row][col];
            if entry.is_zero() {
                continue;
            }
            let used_before = (s & ((1 << col) - 1)).count_ones();
            let contrib = if (row as u32 + used_before) % 2 == 0 {
                cur.mul(entry)
            } else {
                cur.mul(entry).neg()
            };
            let t = s | (1 << col);
            dp[t] = Some(match dp[t].take() {
                None => contrib,
                Some(acc) => acc.add(&contrib),
            });
        }
    }
    dp[(1 << n) - 1]
        .clone()
        .unwrap_or_else(|| LaurentPoly::zero(fq))
}

impl fmt::Debug for LaurentPoly {
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
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*xi")?,
                _ => write!(f, "({c})*xi^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn pi(fq: &Arc<Fq>, e: Rat) -> FieldElem {
        FieldElem::monomial(fq, FqElem::one(fq), e)
    }

    #[test]
    fn product_of_linear_factors() {
        let fq = Fq::new(5).unwrap();
        // (xi - pi)(xi - pi^2) = xi^2 - (pi + pi^2) xi + pi^3
        let f1 = LaurentPoly::xi(&fq).sub(&LaurentPoly::monomial(&fq, pi(&fq, rat!(1)), 0));
        let f2 = LaurentPoly::xi(&fq).sub(&LaurentPoly::monomial(&fq, pi(&fq, rat!(2)), 0));
        let prod = f1.mul(&f2);
        assert_eq!(prod.coeff(0).valuation().known().unwrap(), rat!(3));
        assert_eq!(prod.coeff(1).valuation().known().unwrap(), rat!(1));
        assert_eq!(prod.coeff(2).valuation().known().unwrap(), rat!(0));
    }

    #[test]
    fn derivative_in_char_p() {
        let fq = Fq::new(3).unwrap();
        // d/dxi (xi^3) = 3 xi^2 = 0 in char 3
        let f = LaurentPoly::xi(&fq).pow(3);
        assert!(f.derivative().is_zero());
        let g = LaurentPoly::xi(&fq).pow(2);
        assert!(!g.derivative().is_zero());
    }

    #[test]
    fn discriminant_of_quadratic() {
        // P = y^2 - xi over F_5: disc resultant = -4 xi (up to sign), v_t = t line
        let fq = Fq::new(5).unwrap();
        let p = YPoly::new(
            &fq,
            vec![
                LaurentPoly::xi(&fq).neg(),
                LaurentPoly::zero(&fq),
                LaurentPoly::one(&fq),
            ],
        )
        .unwrap();
        let d = p.discriminant_resultant().unwrap();
        // single xi^1 term with unit coefficient valuation 0
        assert_eq!(d.min_exp(), Some(1));
        assert_eq!(d.max_exp(), Some(1));
        assert_eq!(d.coeff(1).valuation().known().unwrap(), rat!(0));
    }

    #[test]
    fn discriminant_of_kummer_cubic() {
        // P = y^3 - xi over F_7: disc ~ 27 xi^2
        let fq = Fq::new(7).unwrap();
        let p = YPoly::new(
            &fq,
            vec![
                LaurentPoly::xi(&fq).neg(),
                LaurentPoly::zero(&fq),
                LaurentPoly::zero(&fq),
                LaurentPoly::one(&fq),
            ],
        )
        .unwrap();
        let d = p.discriminant_resultant().unwrap();
        assert_eq!(d.min_exp(), Some(2));
        assert_eq!(d.max_exp(), Some(2));
        assert_eq!(d.coeff(2).valuation().known().unwrap(), rat!(0));
    }
}
