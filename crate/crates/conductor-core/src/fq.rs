//! Arithmetic in the finite field `F_q`, `q = p^m`.
//!
//! Elements are polynomials over `F_p` reduced modulo a fixed irreducible
//! monic polynomial of degree `m` (the lexicographically smallest one, so a
//! given `q` always names the same field). The residue field of every scenario
//! lives here; `q` is a scenario parameter and stays small, so schoolbook
//! arithmetic is plenty.

use std::fmt;
use std::sync::Arc;

use crate::error::CoreError;

/// Field descriptor shared by all elements of one scenario.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Fq {
    p: u64,
    m: u32,
    /// Coefficients of the modulus x^m + modulus[m-1] x^{m-1} + ... + modulus[0].
    modulus: Vec<u64>,
    /// A fixed generator of the multiplicative group.
    generator: Vec<u64>,
}

/// An element of `F_q`, owned by an `Arc<Fq>` context.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FqElem {
    ctx: Arc<Fq>,
    /// Coefficients c_0 + c_1 x + ..., length m, entries in [0, p).
    coeffs: Vec<u64>,
}

impl Fq {
    /// Builds `F_q` for a prime power `q`, or reports why it is not one.
    pub fn new(q: u64) -> Result<Arc<Fq>, CoreError> {
        let (p, m) = split_prime_power(q)
            .ok_or_else(|| CoreError::Scenario(format!("q = {q} is not a prime power")))?;
        let modulus = smallest_irreducible(p, m);
        let mut fq = Fq {
            p,
            m,
            modulus,
            generator: vec![0; m as usize],
        };
        let generator = find_generator(&fq);
        fq.generator = generator;
        Ok(Arc::new(fq))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.m)
    }

    pub fn degree(&self) -> u32 {
        self.m
    }
}

/// Decomposes q = p^m with p prime, m >= 1.
fn split_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut n = q;
    let mut p = 0u64;
    for d in 2..=q {
        if d * d > q {
            break;
        }
        if n % d == 0 {
            p = d;
            break;
        }
    }
    if p == 0 {
        return Some((q, 1)); // q itself prime
    }
    let mut m = 0u32;
    while n % p == 0 {
        n /= p;
        m += 1;
    }
    (n == 1).then_some((p, m))
}

/// Reduces a polynomial over F_p modulo the context modulus, in place.
fn reduce_mod(ctx: &Fq, poly: &mut Vec<u64>) {
    let m = ctx.m as usize;
    while poly.len() > m {
        let lead = poly.pop().unwrap();
        if lead == 0 {
            continue;
        }
        let deg = poly.len();
        for (i, c) in ctx.modulus.iter().enumerate() {
            let idx = deg - m + i;
            poly[idx] = (poly[idx] + (ctx.p - lead % ctx.p) * c) % ctx.p;
        }
    }
    poly.resize(m.max(1), 0);
}

fn poly_mul(ctx: &Fq, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % ctx.p;
        }
    }
    reduce_mod(ctx, &mut out);
    out
}

/// Tests irreducibility of a monic degree-m polynomial over F_p by trial
/// division against all monic polynomials of degree <= m/2.
fn is_irreducible(p: u64, modulus: &[u64], m: u32) -> bool {
    if m == 1 {
        return true;
    }
    let mut divisor = vec![0u64; m as usize / 2 + 2];
    fn rec(p: u64, modulus: &[u64], m: u32, divisor: &mut Vec<u64>, deg: usize, pos: usize) -> bool {
        if pos == deg {
            // monic degree-`deg` candidate assembled in divisor[0..deg], leading 1
            let mut cand: Vec<u64> = divisor[..deg].to_vec();
            cand.push(1);
            return !divides(p, modulus, &cand, m);
        }
        for c in 0..p {
            divisor[pos] = c;
            if !rec(p, modulus, m, divisor, deg, pos + 1) {
                return false;
            }
        }
        true
    }
    for deg in 1..=(m as usize / 2) {
        if !rec(p, modulus, m, &mut divisor, deg, 0) {
            return false;
        }
    }
    true
}

/// Whether `cand` divides x^m + modulus (full modulus polynomial) over F_p.
fn divides(p: u64, modulus: &[u64], cand: &[u64], _m: u32) -> bool {
    let mut rem: Vec<u64> = modulus.to_vec();
    rem.push(1); // the monic x^m term
    let dc = cand.len() - 1;
    while rem.len() > dc && rem.iter().any(|&c| c != 0) {
        let lead = *rem.last().unwrap();
        if lead == 0 {
            rem.pop();
            continue;
        }
        let shift = rem.len() - 1 - dc;
        for (i, &c) in cand.iter().enumerate() {
            rem[shift + i] = (rem[shift + i] + (p - (lead * c) % p)) % p;
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

/// The lexicographically smallest monic irreducible of degree m over F_p,
/// reported as its low coefficients (constant first).
fn smallest_irreducible(p: u64, m: u32) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    let mut coeffs = vec![0u64; m as usize];
    loop {
        if is_irreducible(p, &coeffs, m) {
            return coeffs;
        }
        // increment in base p, most significant at the high index
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            assert!(i < m as usize, "no irreducible found (impossible)");
        }
    }
}

fn find_generator(ctx: &Fq) -> Vec<u64> {
    let q = ctx.q();
    let order = q - 1;
    let prime_divisors = distinct_prime_divisors(order);
    // enumerate nonzero elements in lexicographic coefficient order
    let m = ctx.m as usize;
    let mut coeffs = vec![0u64; m];
    'outer: loop {
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < ctx.p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            if i == m {
                break 'outer;
            }
        }
        if prime_divisors
            .iter()
            .all(|&r| !poly_pow_is_one(ctx, &coeffs, order / r))
        {
            return coeffs.clone();
        }
    }
    panic!("no generator found in F_{}", q);
}

fn distinct_prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn poly_pow(ctx: &Fq, base: &[u64], mut exp: u64) -> Vec<u64> {
    let mut result = vec![0u64; ctx.m as usize];
    result[0] = 1;
    let mut base = base.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            result = poly_mul(ctx, &result, &base);
        }
        base = poly_mul(ctx, &base, &base);
        exp >>= 1;
    }
    result
}

fn poly_pow_is_one(ctx: &Fq, base: &[u64], exp: u64) -> bool {
    let r = poly_pow(ctx, base, exp);
    r[0] == 1 && r[1..].iter().all(|&c| c == 0)
}

impl FqElem {
    pub fn zero(ctx: &Arc<Fq>) -> Self {
        FqElem {
            ctx: ctx.clone(),
            coeffs: vec![0; ctx.m as usize],
        }
    }

    pub fn one(ctx: &Arc<Fq>) -> Self {
        Self::from_int(ctx, 1)
    }

    /// The image of an integer under Z -> F_p -> F_q.
    pub fn from_int(ctx: &Arc<Fq>, n: i64) -> Self {
        let p = ctx.p as i64;
        let c = n.rem_euclid(p) as u64;
        let mut coeffs = vec![0; ctx.m as usize];
        coeffs[0] = c;
        FqElem {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    /// The fixed multiplicative generator of this field.
    pub fn generator(ctx: &Arc<Fq>) -> Self {
        FqElem {
            ctx: ctx.clone(),
            coeffs: ctx.generator.clone(),
        }
    }

    pub fn ctx(&self) -> &Arc<Fq> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn assert_same_ctx(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx,
            "mixed finite field contexts"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_ctx(other);
        let p = self.ctx.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % p)
            .collect();
        FqElem {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        let p = self.ctx.p;
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FqElem {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_ctx(other);
        FqElem {
            ctx: self.ctx.clone(),
            coeffs: poly_mul(&self.ctx, &self.coeffs, &other.coeffs),
        }
    }

    pub fn pow(&self, exp: u64) -> Self {
        FqElem {
            ctx: self.ctx.clone(),
            coeffs: poly_pow(&self.ctx, &self.coeffs, exp),
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverting zero in F_q");
        self.pow(self.ctx.q() - 2)
    }

    /// The unique p-th root, `c^(p^(m-1))`.
    pub fn frobenius_root(&self) -> Self {
        let p = self.ctx.p;
        let m = self.ctx.m;
        let mut exp = 1u64;
        for _ in 0..m.saturating_sub(1) {
            exp *= p;
        }
        self.pow(exp)
    }

    /// A k-th root when one exists in F_q; used to split residue components.
    pub fn kth_root(&self, k: u64) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let order = self.ctx.q() - 1;
        let g = gcd(k, order);
        if !poly_pow_is_one(&self.ctx, &self.coeffs, order / g) {
            return None;
        }
        // brute force over powers of the generator
        let gen = FqElem::generator(&self.ctx);
        let mut x = FqElem::one(&self.ctx);
        for _ in 0..order {
            if x.pow(k) == *self {
                return Some(x);
            }
            x = x.mul(&gen);
        }
        None
    }

    /// Solves y^p - y = self when possible; `None` means the residue field is
    /// too small for this Artin-Schreier digit.
    pub fn artin_schreier_preimage(&self) -> Option<Self> {
        let p = self.ctx.p;
        // brute force: q is small by construction
        let mut candidate = FqElem::zero(&self.ctx);
        let one = FqElem::one(&self.ctx);
        for _ in 0..self.ctx.q() {
            if candidate.pow(p).sub(&candidate) == *self {
                return Some(candidate);
            }
            candidate = next_element(&candidate, &one);
        }
        None
    }

    /// Element of a primitive m-th root of unity, when m divides q - 1.
    pub fn primitive_root_of_unity(ctx: &Arc<Fq>, m: u64) -> Option<Self> {
        let order = ctx.q() - 1;
        if m == 0 || order % m != 0 {
            return None;
        }
        Some(FqElem::generator(ctx).pow(order / m))
    }
}

fn next_element(x: &FqElem, _one: &FqElem) -> FqElem {
    let p = x.ctx.p;
    let mut coeffs = x.coeffs.clone();
    for c in coeffs.iter_mut() {
        *c += 1;
        if *c < p {
            return FqElem {
                ctx: x.ctx.clone(),
                coeffs,
            };
        }
        *c = 0;
    }
    FqElem {
        ctx: x.ctx.clone(),
        coeffs,
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.m == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "x")?,
                1 => write!(f, "{c}x")?,
                _ if c == 1 => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
