//! Exact arithmetic in cyclotomic fields `Q(zeta_n)`.
//!
//! Values of characters and class functions live here. An element is a
//! rational-coefficient polynomial in `zeta_n` reduced modulo the n-th
//! cyclotomic polynomial, so equality and rationality tests are exact.

use std::fmt;

use crate::rat::Rat;

/// Element of Q(zeta_n): coefficients of 1, zeta, ..., zeta^(phi(n)-1).
#[derive(Clone, PartialEq, Eq)]
pub struct Cyc {
    n: u64,
    /// Length phi(n); reduced mod the cyclotomic polynomial Phi_n.
    coeffs: Vec<Rat>,
}

/// Monic integer coefficients of the n-th cyclotomic polynomial, constant
/// term first, computed by dividing x^n - 1 by all Phi_d, d | n, d < n.
fn cyclotomic_poly(n: u64) -> Vec<Rat> {
    let mut num = vec![Rat::zero(); n as usize + 1];
    num[0] = -Rat::one();
    num[n as usize] = Rat::one();
    for d in 1..n {
        if n % d != 0 {
            continue;
        }
        let phi_d = cyclotomic_poly(d);
        num = poly_div_exact(&num, &phi_d);
    }
    num
}

/// Exact division of polynomials over Q (remainder must vanish).
fn poly_div_exact(num: &[Rat], den: &[Rat]) -> Vec<Rat> {
    let mut rem: Vec<Rat> = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    let mut quot = vec![Rat::zero(); rem.len().saturating_sub(dd)];
    while rem.len() > dd {
        let dr = rem.len() - 1;
        let c = &rem[dr] / &lead;
        if !c.is_zero() {
            quot[dr - dd] = c.clone();
            for (i, dc) in den.iter().enumerate() {
                let idx = dr - dd + i;
                rem[idx] = &rem[idx] - &(&c * dc);
            }
        }
        rem.pop();
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

fn phi_degree(n: u64) -> usize {
    cyclotomic_poly(n).len() - 1
}

impl Cyc {
    pub fn zero(n: u64) -> Self {
        Cyc {
            n,
            coeffs: vec![Rat::zero(); phi_degree(n).max(1)],
        }
    }

    pub fn from_rat(n: u64, r: Rat) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[0] = r;
        c
    }

    /// zeta_n^k
    pub fn root_of_unity(n: u64, k: u64) -> Self {
        let k = (k % n) as usize;
        let mut raw = vec![Rat::zero(); k + 1];
        raw[k] = Rat::one();
        Self::reduce(n, raw)
    }

    fn reduce(n: u64, mut raw: Vec<Rat>) -> Self {
        let phi = cyclotomic_poly(n);
        let deg = phi.len() - 1;
        while raw.len() > deg {
            let dr = raw.len() - 1;
            let c = raw[dr].clone();
            if !c.is_zero() {
                for (i, pc) in phi.iter().enumerate() {
                    let idx = dr - deg + i;
                    raw[idx] = &raw[idx] - &(&c * pc);
                }
            }
            raw.pop();
        }
        raw.resize(deg.max(1), Rat::zero());
        Cyc { n, coeffs: raw }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rat(&self) -> Option<Rat> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::unify(self, other);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x + y)
            .collect();
        Cyc { n: a.n, coeffs }
    }

    pub fn neg(&self) -> Self {
        Cyc {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::unify(self, other);
        let mut raw = vec![Rat::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                raw[i + j] = &raw[i + j] + &(x * y);
            }
        }
        Self::reduce(a.n, raw)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Cyc {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugation: zeta -> zeta^(n-1).
    pub fn conj(&self) -> Self {
        self.galois(self.n - 1)
    }

    /// The Galois substitution zeta -> zeta^k (k coprime to n for a field
    /// automorphism; arbitrary k gives the evaluation map).
    pub fn galois(&self, k: u64) -> Self {
        let mut acc = Cyc::zero(self.n);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = Cyc::root_of_unity(self.n, (i as u64 * k) % self.n).scale(c);
            acc = acc.add(&term);
        }
        acc
    }

    /// Rewrites in Q(zeta_m) for n | m.
    pub fn embed(&self, m: u64) -> Self {
        assert!(m % self.n == 0, "embedding into non-multiple order");
        if m == self.n {
            return self.clone();
        }
        let k = m / self.n;
        let mut acc = Cyc::zero(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = Cyc::root_of_unity(m, i as u64 * k).scale(c);
            acc = acc.add(&term);
        }
        acc
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self) {
        if a.n == b.n {
            (a.clone(), b.clone())
        } else {
            let m = num_integer::lcm(a.n, b.n);
            (a.embed(m), b.embed(m))
        }
    }
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rat() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})z{}^{i}", self.n)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
