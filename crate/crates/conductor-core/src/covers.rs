//! Galois covers of annuli: Kummer, Artin-Schreier, their compositum, and
//! generic monic covers; Artin-Schreier reduction, critical radii, and the
//! per-piece decomposition data (component orders, derivative orders).
//!
//! A cover is valid on a closed interval of radius exponents. Between
//! consecutive critical radii the pullback of the open annulus is a disjoint
//! union of annuli; the component count, per-component order and the order of
//! the derivative on each component drive every conductor identity downstream.

use std::sync::Arc;

use crate::annulus::{gauss_val, GaussValFun};
use crate::error::{CoreError, CoreResult};
use crate::field::FieldElem;
use crate::fq::{Fq, FqElem};
use crate::groups::{GroupDesc, GroupElem, Subgroup};
use crate::laurent::LaurentPoly;
use crate::plfun::PLFun;
use crate::rat::Rat;
use crate::residue::ResiduePoly;

#[derive(Clone)]
pub enum CoverKind {
    /// y^m = u(xi), gcd(m, p) = 1, u a unit on the annulus.
    Kummer { m: u64, u: LaurentPoly },
    /// z^p - z = g(xi).
    ArtinSchreier { g: LaurentPoly },
    /// The fiber product of the two, group Z/m x Z/p.
    Compositum { m: u64, u: LaurentPoly, g: LaurentPoly },
    /// Monic polynomial cover P(y) = 0; no class-function support.
    Monic { coeffs: Vec<LaurentPoly> },
}

#[derive(Clone)]
pub struct CoverSpec {
    pub kind: CoverKind,
    pub interval: (Rat, Rat),
    pub group: GroupDesc,
    /// Default precision cap in lattice units for truncating operations.
    pub precision: i64,
    fq: Arc<Fq>,
    /// Reduced Artin-Schreier function, set at validation time.
    g_red: Option<LaurentPoly>,
}

/// One open piece of the semi-stable decomposition.
#[derive(Clone, Debug)]
pub struct AnnulusPiece {
    /// Open interval between consecutive critical radii.
    pub interval: (Rat, Rat),
    pub components: Vec<PieceComponent>,
    pub delta_f: u64,
    pub(crate) ctx: PieceCtx,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceComponent {
    pub order: u64,
    pub derivative_order: i64,
}

impl AnnulusPiece {
    /// Total order of the derivative over this piece.
    pub fn sigma(&self) -> i64 {
        self.components.iter().map(|c| c.derivative_order).sum()
    }

    pub fn degree(&self) -> u64 {
        self.components.iter().map(|c| c.order).sum()
    }

    pub fn contains_interior(&self, t: &Rat) -> bool {
        *t > self.interval.0 && *t < self.interval.1
    }
}

/// Analysis data for one piece of an abelian cover, reused by the conductor
/// engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PieceCtx {
    pub kummer: Option<KummerPieceCtx>,
    pub artin_schreier: Option<AsPieceCtx>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct KummerPieceCtx {
    pub m: u64,
    /// Achieving exponent of u on the piece.
    pub ell0: i64,
    /// Number of components contributed by the Kummer part.
    pub gamma: u64,
    /// Order of each Kummer component, m / gamma.
    pub m1: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct AsPieceCtx {
    pub p: u64,
    /// Fierce (positive break) or split (the break vanishes on the piece).
    pub fierce: bool,
    /// Achieving exponent of g_red on the piece (fierce case).
    pub j0: i64,
    /// v(a_{j0}), so the break line is -(offset + j0 t).
    pub offset: Rat,
}

impl CoverSpec {
    pub fn kummer(
        fq: &Arc<Fq>,
        m: u64,
        u: LaurentPoly,
        interval: (Rat, Rat),
        precision: i64,
    ) -> CoreResult<Self> {
        Self::build(fq, CoverKind::Kummer { m, u }, interval, precision)
    }

    pub fn artin_schreier(
        fq: &Arc<Fq>,
        g: LaurentPoly,
        interval: (Rat, Rat),
        precision: i64,
    ) -> CoreResult<Self> {
        Self::build(fq, CoverKind::ArtinSchreier { g }, interval, precision)
    }

    pub fn compositum(
        fq: &Arc<Fq>,
        m: u64,
        u: LaurentPoly,
        g: LaurentPoly,
        interval: (Rat, Rat),
        precision: i64,
    ) -> CoreResult<Self> {
        Self::build(fq, CoverKind::Compositum { m, u, g }, interval, precision)
    }

    pub fn monic(
        fq: &Arc<Fq>,
        coeffs: Vec<LaurentPoly>,
        interval: (Rat, Rat),
        precision: i64,
    ) -> CoreResult<Self> {
        Self::build(fq, CoverKind::Monic { coeffs }, interval, precision)
    }

    fn build(
        fq: &Arc<Fq>,
        kind: CoverKind,
        interval: (Rat, Rat),
        precision: i64,
    ) -> CoreResult<Self> {
        if interval.0 >= interval.1 {
            return Err(CoreError::Scenario(format!(
                "need r < r', got [{}, {}]",
                interval.0, interval.1
            )));
        }
        if interval.0.is_negative() {
            return Err(CoreError::Scenario("annulus radii must be >= 0".into()));
        }
        let p = fq.p();
        let q = fq.q();
        let group;
        let mut g_red = None;
        match &kind {
            CoverKind::Kummer { m, u } => {
                validate_kummer(*m, p, q, u)?;
                group = GroupDesc::cyclic(*m);
            }
            CoverKind::ArtinSchreier { g } => {
                let (red, _, _) = as_reduce(g, precision)?;
                g_red = Some(red);
                group = GroupDesc::cyclic(p);
            }
            CoverKind::Compositum { m, u, g } => {
                validate_kummer(*m, p, q, u)?;
                let (red, _, _) = as_reduce(g, precision)?;
                g_red = Some(red);
                group = GroupDesc::new(vec![*m, p])?;
            }
            CoverKind::Monic { coeffs } => {
                let yp = crate::laurent::YPoly::new(fq, coeffs.clone())?;
                let disc = yp.discriminant_resultant()?;
                if disc.is_zero() {
                    return Err(CoreError::Scenario("monic cover with vanishing discriminant".into()));
                }
                group = GroupDesc::trivial();
            }
        }
        Ok(CoverSpec {
            kind,
            interval,
            group,
            precision,
            fq: fq.clone(),
            g_red,
        })
    }

    pub fn fq(&self) -> &Arc<Fq> {
        &self.fq
    }

    pub fn p(&self) -> u64 {
        self.fq.p()
    }

    pub fn degree(&self) -> u64 {
        match &self.kind {
            CoverKind::Kummer { m, .. } => *m,
            CoverKind::ArtinSchreier { .. } => self.p(),
            CoverKind::Compositum { m, .. } => m * self.p(),
            CoverKind::Monic { coeffs } => (coeffs.len() - 1) as u64,
        }
    }

    pub fn is_abelian(&self) -> bool {
        !matches!(self.kind, CoverKind::Monic { .. })
    }

    /// The reduced Artin-Schreier function, when the cover has one.
    pub fn reduced_as_function(&self) -> Option<&LaurentPoly> {
        self.g_red.as_ref()
    }

    pub(crate) fn kummer_part(&self) -> Option<(u64, &LaurentPoly)> {
        match &self.kind {
            CoverKind::Kummer { m, u } => Some((*m, u)),
            CoverKind::Compositum { m, u, .. } => Some((*m, u)),
            _ => None,
        }
    }

    /// The break function t -> max(0, -v_t(g_red)) over the base interval;
    /// identically zero when there is no (or a trivial) Artin-Schreier part.
    pub fn break_fun(&self) -> CoreResult<PLFun> {
        let (r, rp) = (&self.interval.0, &self.interval.1);
        let zero = PLFun::constant(r.clone(), rp.clone(), Rat::zero());
        match &self.g_red {
            None => Ok(zero),
            Some(g) if g.is_zero() => Ok(zero),
            Some(g) => {
                let gv = gauss_val(g, (r, rp))?;
                zero.max(&gv.fun.neg())
            }
        }
    }

    /// Radii in the open interval where the decomposition combinatorics change.
    pub fn critical_radii(&self) -> CoreResult<Vec<Rat>> {
        let (r, rp) = (&self.interval.0, &self.interval.1);
        let mut out: Vec<Rat> = Vec::new();
        match &self.kind {
            CoverKind::Kummer { u, .. } => {
                out.extend(interior_breakpoints(&gauss_val(u, (r, rp))?.fun));
            }
            CoverKind::ArtinSchreier { .. } => {
                out.extend(interior_breakpoints(&self.break_fun()?));
            }
            CoverKind::Compositum { u, .. } => {
                out.extend(interior_breakpoints(&gauss_val(u, (r, rp))?.fun));
                out.extend(interior_breakpoints(&self.break_fun()?));
            }
            CoverKind::Monic { coeffs } => {
                out.extend(monic_critical_radii(self, coeffs)?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Closed piece intervals delimited by the critical radii.
    pub fn piece_intervals(&self) -> CoreResult<Vec<(Rat, Rat)>> {
        let mut cuts = vec![self.interval.0.clone()];
        cuts.extend(self.critical_radii()?);
        cuts.push(self.interval.1.clone());
        Ok(cuts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect())
    }

    /// Semi-stable decomposition data: one `AnnulusPiece` per open piece.
    pub fn decompose(&self) -> CoreResult<Vec<AnnulusPiece>> {
        let mut out = Vec::new();
        for (a, b) in self.piece_intervals()? {
            let piece = match &self.kind {
                CoverKind::Monic { coeffs } => monic_piece(self, coeffs, (&a, &b))?,
                _ => abelian_piece(self, (&a, &b))?,
            };
            let total: u64 = piece.degree();
            if total != self.degree() {
                return Err(CoreError::ModelError(format!(
                    "component orders sum to {total}, expected {}",
                    self.degree()
                )));
            }
            out.push(piece);
        }
        Ok(out)
    }

    /// The piece whose open interval contains t; errors at critical radii.
    pub fn piece_containing(&self, t: &Rat) -> CoreResult<AnnulusPiece> {
        if *t < self.interval.0 || *t > self.interval.1 {
            return Err(CoreError::Domain(format!("radius {t} outside base interval")));
        }
        for c in self.critical_radii()? {
            if c == *t {
                return Err(CoreError::CriticalRadius(format!("t = {t}")));
            }
        }
        for piece in self.decompose()? {
            if *t >= piece.interval.0 && *t <= piece.interval.1 {
                return Ok(piece);
            }
        }
        Err(CoreError::ModelError("no piece found".into()))
    }

    /// Quotient cover X/H -> C for a subgroup of the (abelian) cover group.
    pub fn quotient(&self, h: &Subgroup) -> CoreResult<CoverSpec> {
        if !self.is_abelian() {
            return Err(CoreError::Domain("quotients need an abelian cover".into()));
        }
        let p = self.p();
        match &self.kind {
            CoverKind::Kummer { m, u } => {
                let hk = h.order();
                if m % hk != 0 {
                    return Err(CoreError::ModelError("subgroup order does not divide m".into()));
                }
                CoverSpec::kummer(&self.fq, m / hk, u.clone(), self.interval.clone(), self.precision)
            }
            CoverKind::ArtinSchreier { .. } => {
                if h.order() == 1 {
                    Ok(self.clone())
                } else {
                    // full AS quotient is the trivial cover y^1 = xi
                    CoverSpec::kummer(
                        &self.fq,
                        1,
                        LaurentPoly::xi(&self.fq),
                        self.interval.clone(),
                        self.precision,
                    )
                }
                .and_then(|c| {
                    if h.order() != 1 && h.order() != p {
                        Err(CoreError::ModelError("bad AS subgroup order".into()))
                    } else {
                        Ok(c)
                    }
                })
            }
            CoverKind::Compositum { m, u, g } => {
                // subgroups of Z/m x Z/p split as products of the projections
                let hk: Vec<&GroupElem> = h.elements.iter().filter(|e| e.0[1] == 0).collect();
                let has: Vec<&GroupElem> = h.elements.iter().filter(|e| e.0[0] == 0).collect();
                let k_ord = hk.len() as u64;
                let as_ord = has.len() as u64;
                if k_ord * as_ord != h.order() {
                    return Err(CoreError::ModelError(
                        "subgroup of a coprime product must split".into(),
                    ));
                }
                let m2 = m / k_ord;
                if as_ord == 1 {
                    if m2 == 1 {
                        CoverSpec::artin_schreier(&self.fq, g.clone(), self.interval.clone(), self.precision)
                    } else {
                        CoverSpec::compositum(
                            &self.fq,
                            m2,
                            u.clone(),
                            g.clone(),
                            self.interval.clone(),
                            self.precision,
                        )
                    }
                } else if m2 == 1 {
                    CoverSpec::kummer(
                        &self.fq,
                        1,
                        LaurentPoly::xi(&self.fq),
                        self.interval.clone(),
                        self.precision,
                    )
                } else {
                    CoverSpec::kummer(&self.fq, m2, u.clone(), self.interval.clone(), self.precision)
                }
            }
            CoverKind::Monic { .. } => unreachable!(),
        }
    }
}

fn validate_kummer(m: u64, p: u64, q: u64, u: &LaurentPoly) -> CoreResult<()> {
    if m == 0 {
        return Err(CoreError::Scenario("Kummer degree must be >= 1".into()));
    }
    if m % p == 0 {
        return Err(CoreError::Scenario(format!("Kummer degree {m} divisible by p = {p}")));
    }
    if (q - 1) % m != 0 {
        return Err(CoreError::ResidueFieldTooSmall(format!(
            "mu_{m} not contained in F_{q}"
        )));
    }
    if u.is_zero() {
        return Err(CoreError::Scenario("Kummer unit is zero".into()));
    }
    Ok(())
}

fn interior_breakpoints(f: &PLFun) -> Vec<Rat> {
    f.breakpoints[1..f.breakpoints.len().saturating_sub(1)].to_vec()
}

/// Artin-Schreier reduction: returns `(g_red, witness, dropped)` with
/// `g - P(witness) = g_red + dropped`, where `P(h) = h^p - h`, the dropped part
/// is a constant of positive valuation (or below the cap), and `g_red` has no
/// exponent divisible by p and no constant term.
pub fn as_reduce(
    g: &LaurentPoly,
    precision: i64,
) -> CoreResult<(LaurentPoly, LaurentPoly, FieldElem)> {
    let fq = g.fq().clone();
    let p = fq.p() as i64;
    let mut cur = g.clone();
    let mut witness = LaurentPoly::zero(&fq);

    // xi-direction: replace a * xi^(kp) by a^(1/p) * xi^k
    loop {
        let target = cur
            .terms()
            .keys()
            .find(|&&j| j != 0 && j % p == 0)
            .copied();
        let Some(j) = target else { break };
        let a = cur.coeff(j);
        let root = a.pth_root();
        let h = LaurentPoly::monomial(&fq, root.clone(), j / p);
        witness = witness.add(&h);
        // cur -= h^p - h
        cur = cur.sub(&LaurentPoly::monomial(&fq, root.pow(p as u64), j).sub(&h));
    }

    // constant term: pi-direction reduction, digit solving, tail dropping
    let mut dropped = FieldElem::zero(&fq);
    if !cur.coeff(0).is_exact_zero() {
        let (rest, w2, drop) = reduce_constant(&cur.coeff(0), precision)?;
        cur.add_term(0, cur.coeff(0).neg());
        if !rest.is_exact_zero() {
            return Err(CoreError::Scenario(
                "Artin-Schreier constant term is arithmetically ramified (negative \
                 valuation with exponent not divisible by p); not representable \
                 over a monomial extension of the base field"
                    .into(),
            ));
        }
        witness = witness.add(&w2);
        dropped = drop;
    }
    Ok((cur, witness, dropped))
}

/// Reduces a constant via Wittless digit surgery: returns (irreducible rest,
/// witness, dropped positive-valuation tail).
fn reduce_constant(
    a: &FieldElem,
    precision: i64,
) -> CoreResult<(FieldElem, LaurentPoly, FieldElem)> {
    let fq = a.fq().clone();
    let p = fq.p();
    let mut cur = a.clone();
    let mut witness = LaurentPoly::zero(&fq);
    loop {
        let val = match cur.valuation() {
            crate::field::Val::Infinite => break,
            crate::field::Val::BelowPrecision(_) => break,
            crate::field::Val::Finite(v) => v,
        };
        if val.is_negative() {
            // c pi^v with v < 0: replace by the p-th root when the exponent
            // allows it inside the current lattice
            let num: i64 = val.num().clone().try_into().unwrap();
            if num % (p as i64) != 0 {
                return Err(CoreError::Scenario("irreducible negative constant".into()));
            }
            let c = cur.coeff_at(&val)?;
            let root_val = Rat::new(num / p as i64, val.den().clone());
            let root = FieldElem::monomial(&fq, c.frobenius_root(), root_val);
            witness = witness.add(&LaurentPoly::monomial(&fq, root.clone(), 0));
            cur = cur.sub(&root.pow(p).sub(&root));
        } else if val.is_zero() {
            let c = cur.coeff_at(&Rat::zero())?;
            let d = c.artin_schreier_preimage().ok_or_else(|| {
                CoreError::ResidueFieldTooSmall(format!(
                    "y^{p} - y = {c} has no solution in F_{}",
                    fq.q()
                ))
            })?;
            let de = FieldElem::monomial(&fq, d, Rat::zero());
            witness = witness.add(&LaurentPoly::monomial(&fq, de.clone(), 0));
            cur = cur.sub(&de.pow(p).sub(&de));
        } else {
            // positive valuation: kill digits until the cap, then drop
            let cap = Rat::new(precision.max(1), 1);
            let mut guard = 0;
            while let crate::field::Val::Finite(v) = cur.valuation() {
                if v >= cap || guard > 4 * precision.max(8) {
                    break;
                }
                let c = cur.coeff_at(&v)?;
                let d = FieldElem::monomial(&fq, c.neg(), v.clone());
                witness = witness.add(&LaurentPoly::monomial(&fq, d.clone(), 0));
                cur = cur.sub(&d.pow(p).sub(&d));
                guard += 1;
            }
            return Ok((FieldElem::zero(&fq), witness, cur));
        }
        if cur.is_exact_zero() || cur.no_known_terms() {
            break;
        }
        // a negative-valuation rest that keeps resisting shows up as an error
        // above; anything else loops toward higher valuation and terminates
        if let crate::field::Val::Finite(v) = cur.valuation() {
            if v.is_negative() {
                let num: i64 = v.num().clone().try_into().unwrap();
                if num % (p as i64) != 0 {
                    return Ok((cur, witness, FieldElem::zero(&fq)));
                }
            }
        }
    }
    Ok((FieldElem::zero(&fq), witness, cur))
}

/// `P(h) = h^p - h` on Laurent polynomials; test oracle for the reduction.
pub fn wp_operator(h: &LaurentPoly) -> LaurentPoly {
    let p = h.fq().p();
    let mut hp = LaurentPoly::one(h.fq());
    for _ in 0..p {
        hp = hp.mul(h);
    }
    hp.sub(h)
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Builds the piece data for an abelian cover over one closed piece interval.
fn abelian_piece(cover: &CoverSpec, (a, b): (&Rat, &Rat)) -> CoreResult<AnnulusPiece> {
    let fq = cover.fq();
    let p = cover.p();
    let samples = interior_samples(a, b, 10);
    let mid = &samples[samples.len() / 2];

    let kummer = match cover.kummer_part() {
        None => None,
        Some((m, u)) => {
            let gv = gauss_val(u, (a, b))?;
            let ach = stable_achiever(&gv, &samples)?;
            let gamma = gcd_u64(m, ach.unsigned_abs());
            let m1 = m / gamma;
            if m1 % p == 0 {
                return Err(CoreError::ModelError("tame part divisible by p".into()));
            }
            if gamma > 1 {
                // the gamma components are rational only if the leading residue
                // coefficient has a gamma-th root in F_q
                let lead = u.coeff(ach).leading_coeff()?;
                if lead.kth_root(gamma).is_none() {
                    return Err(CoreError::ResidueFieldTooSmall(format!(
                        "Kummer residue {lead} has no {gamma}-th root in F_{}",
                        fq.q()
                    )));
                }
            }
            Some(KummerPieceCtx {
                m,
                ell0: ach,
                gamma,
                m1,
            })
        }
    };

    let artin_schreier = match cover.reduced_as_function() {
        None => None,
        Some(g) if g.is_zero() => Some(AsPieceCtx {
            p,
            fierce: false,
            j0: 0,
            offset: Rat::zero(),
        }),
        Some(g) => {
            let gv = gauss_val(g, (a, b))?;
            let env_mid = gv.fun.eval(mid)?;
            if env_mid.is_negative() {
                let j0 = stable_achiever(&gv, &samples)?;
                let offset = gv.poly.coeff(j0).valuation().known()?;
                // the reduced function is p-free away from the constant term
                debug_assert!(j0 != 0 && j0 % (p as i64) != 0);
                Some(AsPieceCtx {
                    p,
                    fierce: true,
                    j0,
                    offset,
                })
            } else {
                // positive valuation on the open piece: the cover splits here
                Some(AsPieceCtx {
                    p,
                    fierce: false,
                    j0: 0,
                    offset: Rat::zero(),
                })
            }
        }
    };

    let (gamma, m1) = kummer
        .as_ref()
        .map(|k| (k.gamma, k.m1))
        .unwrap_or((1, 1));
    let mut components = Vec::new();
    match &artin_schreier {
        Some(ctx) if ctx.fierce => {
            // gamma components of order m1 * p
            let sigma = (p * m1) as i64 - (p as i64 - 1) * m1 as i64 * ctx.j0 - 1;
            for _ in 0..gamma {
                components.push(PieceComponent {
                    order: m1 * p,
                    derivative_order: sigma,
                });
            }
        }
        Some(_) => {
            // split: gamma * p components of order m1
            for _ in 0..gamma * p {
                components.push(PieceComponent {
                    order: m1,
                    derivative_order: m1 as i64 - 1,
                });
            }
        }
        None => {
            for _ in 0..gamma {
                components.push(PieceComponent {
                    order: m1,
                    derivative_order: m1 as i64 - 1,
                });
            }
        }
    }
    let delta_f = components.len() as u64;
    Ok(AnnulusPiece {
        interval: (a.clone(), b.clone()),
        components,
        delta_f,
        ctx: PieceCtx {
            kummer,
            artin_schreier,
        },
    })
}

/// Interior sample radii of an open interval, endpoints excluded.
pub(crate) fn interior_samples(a: &Rat, b: &Rat, n: usize) -> Vec<Rat> {
    let width = b - a;
    (1..=n)
        .map(|k| a + &(&width * &Rat::new(k as i64, (n + 1) as i64)))
        .collect()
}

fn stable_achiever(gv: &GaussValFun, samples: &[Rat]) -> CoreResult<i64> {
    let mut found: Option<i64> = None;
    for t in samples {
        let ach = gv.achievers_at(t)?;
        if ach.len() != 1 {
            return Err(CoreError::ModelError(format!(
                "achiever not unique at sample radius {t}"
            )));
        }
        let i = *ach.iter().next().unwrap();
        match found {
            None => found = Some(i),
            Some(j) if j != i => {
                return Err(CoreError::ModelError(format!(
                    "achiever changed inside a piece: {j} vs {i} at {t}"
                )));
            }
            _ => {}
        }
    }
    found.ok_or_else(|| CoreError::ModelError("no samples".into()))
}

/// Critical radii of a monic cover: kinks of the coefficient envelopes, radii
/// where three Newton-polygon points align, and kinks of the discriminant
/// envelope, all restricted to the open interval.
fn monic_critical_radii(cover: &CoverSpec, coeffs: &[LaurentPoly]) -> CoreResult<Vec<Rat>> {
    let (r, rp) = (&cover.interval.0, &cover.interval.1);
    let mut out: Vec<Rat> = Vec::new();
    let mut envs: Vec<Option<PLFun>> = Vec::new();
    for c in coeffs {
        if c.is_zero() {
            envs.push(None);
        } else {
            let gv = gauss_val(c, (r, rp))?;
            out.extend(interior_breakpoints(&gv.fun));
            envs.push(Some(gv.fun));
        }
    }
    // collinearity events of triples (i, j, k)
    let idx: Vec<usize> = envs
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.as_ref().map(|_| i))
        .collect();
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            for c in b + 1..idx.len() {
                let (i, j, k) = (idx[a], idx[b], idx[c]);
                let (ei, ej, ek) = (
                    envs[i].as_ref().unwrap(),
                    envs[j].as_ref().unwrap(),
                    envs[k].as_ref().unwrap(),
                );
                // D(t) = (v_j - v_i)(k - i) - (v_k - v_i)(j - i)
                let d = ej
                    .add(&ei.neg())?
                    .scale(&Rat::int((k - i) as i64))
                    .add(&ek.add(&ei.neg())?.scale(&Rat::int((j - i) as i64)).neg())?;
                out.extend(pl_zeros(&d));
            }
        }
    }
    // discriminant envelope kinks
    let yp = crate::laurent::YPoly::new(cover.fq(), coeffs.to_vec())?;
    let disc = yp.discriminant_resultant()?;
    if !disc.is_zero() {
        out.extend(interior_breakpoints(&gauss_val(&disc, (r, rp))?.fun));
    }
    out.retain(|t| t > r && t < rp);
    out.sort();
    out.dedup();
    Ok(out)
}

/// Zeros of a PL function in the interior of its domain.
fn pl_zeros(f: &PLFun) -> Vec<Rat> {
    let mut out = Vec::new();
    for i in 0..f.breakpoints.len() - 1 {
        let (t0, v0) = (&f.breakpoints[i], &f.values[i]);
        let (t1, v1) = (&f.breakpoints[i + 1], &f.values[i + 1]);
        if v0.is_zero() {
            out.push(t0.clone());
        }
        if v0.is_negative() != v1.is_negative() && !v0.is_zero() && !v1.is_zero() {
            let tz = t0 + &(&(t1 - t0) * &(v0 / &(v0 - v1)));
            out.push(tz);
        }
    }
    if f.values.last().unwrap().is_zero() {
        out.push(f.breakpoints.last().unwrap().clone());
    }
    out
}

/// y-Newton polygon face over one piece: certified component data.
fn monic_piece(cover: &CoverSpec, coeffs: &[LaurentPoly], (a, b): (&Rat, &Rat)) -> CoreResult<AnnulusPiece> {
    let p = cover.p();
    let samples = interior_samples(a, b, 10);
    let structure = monic_faces_at(cover, coeffs, &samples[samples.len() / 2])?;
    // face structure must be stable across the piece
    for t in &samples {
        let s2 = monic_faces_at(cover, coeffs, t)?;
        if s2.iter().map(|f| (f.i0, f.i1)).collect::<Vec<_>>()
            != structure.iter().map(|f| (f.i0, f.i1)).collect::<Vec<_>>()
        {
            return Err(CoreError::ModelError(
                "Newton polygon structure changed inside a piece".into(),
            ));
        }
    }
    let mut components = Vec::new();
    for face in &structure {
        let len = (face.i1 - face.i0) as u64;
        let ell_f = face.ach0 - face.ach1;
        let gamma_f = gcd_u64(len, ell_f.unsigned_abs());
        let d_sub = len / gamma_f;
        if d_sub % p == 0 {
            return Err(CoreError::UnsupportedDecomposition(format!(
                "wild Newton face of order {d_sub} (p = {p})"
            )));
        }
        if gamma_f == 1 {
            components.push(PieceComponent {
                order: d_sub,
                derivative_order: d_sub as i64 - 1,
            });
            continue;
        }
        // the face polynomial must split into distinct roots over F_q
        let roots = face_poly_roots(cover, coeffs, face, d_sub, gamma_f, a, b)?;
        for _ in 0..roots {
            components.push(PieceComponent {
                order: d_sub,
                derivative_order: d_sub as i64 - 1,
            });
        }
    }
    let delta_f = components.len() as u64;
    Ok(AnnulusPiece {
        interval: (a.clone(), b.clone()),
        components,
        delta_f,
        ctx: PieceCtx {
            kummer: None,
            artin_schreier: None,
        },
    })
}

struct NewtonFace {
    i0: i64,
    i1: i64,
    /// Achieving xi-exponents of the endpoint coefficients.
    ach0: i64,
    ach1: i64,
}

fn monic_faces_at(cover: &CoverSpec, coeffs: &[LaurentPoly], t: &Rat) -> CoreResult<Vec<NewtonFace>> {
    let (r, rp) = (&cover.interval.0, &cover.interval.1);
    let mut pts: Vec<(i64, Rat, i64)> = Vec::new(); // (i, v_t(c_i), achiever)
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let gv = gauss_val(c, (r, rp))?;
        let ach = gv.achievers_at(t)?;
        pts.push((i as i64, gv.fun.eval(t)?, *ach.iter().next().unwrap()));
    }
    // lower hull in (i, v) with i ascending
    let mut hull: Vec<(i64, Rat, i64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let lhs = &(&b.1 - &a.1) * &Rat::int(p.0 - a.0);
            let rhs = &(&p.1 - &a.1) * &Rat::int(b.0 - a.0);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut faces = Vec::new();
    for w in hull.windows(2) {
        faces.push(NewtonFace {
            i0: w[0].0,
            i1: w[1].0,
            ach0: w[0].2,
            ach1: w[1].2,
        });
    }
    // zero-sections: y^i_min divides P
    if let Some(first) = hull.first() {
        for _ in 0..first.0 {
            faces.insert(
                0,
                NewtonFace {
                    i0: 0,
                    i1: 1,
                    ach0: 0,
                    ach1: 0,
                },
            );
        }
    }
    Ok(faces)
}

/// Distinct-root count of the face polynomial; errors when roots repeat or
/// are not rational over F_q.
fn face_poly_roots(
    cover: &CoverSpec,
    coeffs: &[LaurentPoly],
    face: &NewtonFace,
    d_sub: u64,
    gamma_f: u64,
    a: &Rat,
    b: &Rat,
) -> CoreResult<u64> {
    let fq = cover.fq();
    let mid = &(&(a + b) / &Rat::int(2));
    let (r, rp) = (&cover.interval.0, &cover.interval.1);
    // value of the face line at lattice point i (valuation that a coefficient
    // must match to contribute)
    let gv0 = gauss_val(&coeffs[face.i0 as usize], (r, rp))?;
    let gv1 = gauss_val(&coeffs[face.i1 as usize], (r, rp))?;
    let v0 = gv0.fun.eval(mid)?;
    let v1 = gv1.fun.eval(mid)?;
    let len = Rat::int(face.i1 - face.i0);
    let mut poly = ResiduePoly::zero(fq);
    for k in 0..=gamma_f {
        let i = face.i0 + (k * d_sub) as i64;
        let c = &coeffs[i as usize];
        if c.is_zero() {
            continue;
        }
        let gv = gauss_val(c, (r, rp))?;
        let vi = gv.fun.eval(mid)?;
        // on-face check: v_i == v0 + (v1 - v0) * (i - i0) / len
        let expect = &v0 + &(&(&v1 - &v0) * &(&Rat::int(i - face.i0) / &len));
        if vi == expect {
            let ach = *gv.achievers_at(mid)?.iter().next().unwrap();
            poly.add_term(k as i64, c.coeff(ach).leading_coeff()?);
        }
    }
    if !poly.is_squarefree()? {
        return Err(CoreError::UnsupportedDecomposition(
            "repeated residual factor on a Newton face".into(),
        ));
    }
    // count rational roots by brute force over F_q^x
    let q = fq.q();
    let mut count = 0u64;
    let mut x = FqElem::one(fq);
    let gen = FqElem::generator(fq);
    for _ in 0..(q - 1) {
        let mut acc = FqElem::zero(fq);
        for (&e, c) in poly.terms() {
            acc = acc.add(&c.mul(&x.pow(e as u64)));
        }
        if acc.is_zero() {
            count += 1;
        }
        x = x.mul(&gen);
    }
    if count != gamma_f {
        return Err(CoreError::ResidueFieldTooSmall(format!(
            "Newton face polynomial has {count}/{gamma_f} rational roots; enlarge q"
        )));
    }
    Ok(count)
}
