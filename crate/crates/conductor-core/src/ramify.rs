//! The conductor engine: Artin class functions from generator differences,
//! branch Swan class functions over intervals, the discriminant function, the
//! Swan conductor function of a character, and the theorem battery.
//!
//! For an abelian cover with a fierce boundary the normalized generator is
//! `b = z * pi^(-s(t))`; every automorphism difference `s(b) - b` is an exact
//! monomial, its alpha-valuation drives the Artin function, and its beta data
//! at the two branches drives the Swan functions. The diagonal of each branch
//! Swan function is pinned by an overdetermined consistency system against the
//! quotient covers' decomposition data, which is asserted on every call.

use serde::Serialize;

use crate::covers::{interior_samples, AnnulusPiece, CoverKind, CoverSpec};
use crate::error::{CoreError, CoreResult};
use crate::groups::{ClassFun, GroupElem};
use crate::laurent::YPoly;
use crate::plfun::PLFun;
use crate::rat::Rat;
use crate::annulus::gauss_val;

/// Which end of an interval a branch Swan function is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BranchSide {
    /// The t-branch of [t, t']: reduction coordinate order +1.
    Lower,
    /// The t'-branch: order -1.
    Upper,
}

/// Normalized boundary generator data at a radius, with the per-automorphism
/// difference valuations.
#[derive(Clone, Debug)]
pub struct GeneratorModel {
    pub radius: Rat,
    /// Gauss valuation of the generator coordinate: v_t(u)/m for the Kummer
    /// part, min(0, v_t(g_red))/p for the Artin-Schreier part.
    pub normalization: Rat,
    /// For each nontrivial automorphism: (v^alpha(s(b)-b), raw v^beta(s(b)-b)).
    pub differences: Vec<(GroupElem, Rat, i64)>,
    /// Reduction order of the generator at the lower branch; the upper branch
    /// negates it.
    pub beta_of_generator: i64,
}

/// Everything `verify_theorem` reports.
#[derive(Clone, Debug, Serialize)]
pub struct ConductorReport {
    pub sw_fun: PLFun,
    pub phi_vals: Vec<(Rat, Rat)>,
    pub continuity_check: bool,
    pub convexity_check: bool,
    pub integer_slope_check: bool,
    pub slope_check: bool,
    pub checks: Vec<CheckResult>,
    pub ledger: NearbyCyclesLedger,
}

impl ConductorReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub lhs: String,
    pub rhs: String,
    pub witness: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotComputed,
}

/// Numeric shadow of the nearby-cycles formula over the whole base interval.
#[derive(Clone, Debug, Serialize)]
pub struct NearbyCyclesLedger {
    pub sigma: i64,
    pub sigma_prime: i64,
    pub delta_f: u64,
    pub delta_f_prime: u64,
    /// Populated only for covers in the delta-known catalogue.
    pub lhs_sum: Option<i64>,
    pub rhs: i64,
}

fn ensure_abelian(cover: &CoverSpec) -> CoreResult<()> {
    if !cover.is_abelian() {
        return Err(CoreError::Domain(
            "class functions require an abelian cover kind".into(),
        ));
    }
    Ok(())
}

/// Nontrivial elements of the Artin-Schreier factor of the cover group.
fn as_factor_nonzero(cover: &CoverSpec) -> Vec<GroupElem> {
    let p = cover.p();
    match &cover.kind {
        CoverKind::ArtinSchreier { .. } => (1..p).map(|c| GroupElem(vec![c])).collect(),
        CoverKind::Compositum { .. } => (1..p).map(|c| GroupElem(vec![0, c])).collect(),
        _ => Vec::new(),
    }
}

/// Rejects fierce pieces whose Kummer part splits the boundary fiber: there
/// the single-orbit normalization `G' = G` behind the class-function formulas
/// fails, and silently mis-normalizing is worse than refusing.
fn ensure_single_orbit(_cover: &CoverSpec, piece: &AnnulusPiece) -> CoreResult<()> {
    let fierce = piece
        .ctx
        .artin_schreier
        .as_ref()
        .map(|a| a.fierce)
        .unwrap_or(false);
    if !fierce {
        return Ok(());
    }
    if let Some(k) = &piece.ctx.kummer {
        if k.gamma > 1 {
            return Err(CoreError::Domain(format!(
                "boundary fiber splits into {} orbits on ({}, {}); the \
                 normalized conductor formulas assume a single boundary orbit",
                k.gamma, piece.interval.0, piece.interval.1
            )));
        }
    }
    Ok(())
}

/// The break line -v_t(g_red) on a fierce piece, as (slope, offset of v_t).
fn fierce_break(piece: &AnnulusPiece) -> Option<(i64, Rat)> {
    piece
        .ctx
        .artin_schreier
        .as_ref()
        .filter(|a| a.fierce)
        .map(|a| (a.j0, a.offset.clone()))
}

/// Builds the generator model at a non-critical radius, running the
/// minimality battery for the recorded differences.
pub fn generator_model(cover: &CoverSpec, t: &Rat) -> CoreResult<GeneratorModel> {
    ensure_abelian(cover)?;
    let piece = cover.piece_containing(t)?;
    ensure_single_orbit(cover, &piece)?;
    generator_model_on_piece(cover, &piece, t)
}

/// The normalized Artin class function at a non-critical radius.
pub fn artin_classfun(cover: &CoverSpec, t: &Rat) -> CoreResult<ClassFun> {
    ensure_abelian(cover)?;
    let piece = cover.piece_containing(t)?;
    artin_classfun_on_piece(cover, &piece, t)
}

fn artin_classfun_on_piece(
    cover: &CoverSpec,
    piece: &AnnulusPiece,
    t: &Rat,
) -> CoreResult<ClassFun> {
    ensure_single_orbit(cover, piece)?;
    let group = &cover.group;
    let model = generator_model_on_piece(cover, piece, t)?;
    let order = Rat::int(group.order() as i64);
    let mut f = ClassFun::zero(group);
    let mut diag = Rat::zero();
    for (e, alpha, _) in &model.differences {
        let v = -(&order * alpha);
        if !v.is_zero() {
            f.set_rat(e, v.clone());
            diag += -v;
        }
    }
    f.set_rat(&group.identity(), diag);
    Ok(f)
}

/// Variant that reuses an already-derived piece, so radius sweeps stay
/// affordable.
fn generator_model_on_piece(
    cover: &CoverSpec,
    piece: &AnnulusPiece,
    t: &Rat,
) -> CoreResult<GeneratorModel> {
    let group = &cover.group;
    let p = cover.p() as i64;
    let m1 = piece.ctx.kummer.as_ref().map(|k| k.m1).unwrap_or(1) as i64;
    let (normalization, alpha_diff, beta_of_generator) = match fierce_break(piece) {
        Some((j0, offset)) => {
            let w = &offset + &(&Rat::int(j0) * t); // v_t(g_red) < 0
            (&w / &Rat::int(p), -(&w / &Rat::int(p)), m1 * j0)
        }
        None => {
            // tame or split boundary: all differences have valuation zero
            let s = match cover.kummer_part() {
                Some((m, u)) => {
                    let gv = gauss_val(u, (&cover.interval.0, &cover.interval.1))?;
                    &gv.fun.eval(t)? / &Rat::int(m as i64)
                }
                None => Rat::zero(),
            };
            (s, Rat::zero(), 0)
        }
    };
    let as_elems = as_factor_nonzero(cover);
    let mut differences = Vec::new();
    for e in group.elements() {
        if e == group.identity() {
            continue;
        }
        if as_elems.contains(&e) && fierce_break(piece).is_some() {
            // s(b) - b = c * pi^(-s_z): a nonzero constant times a pi power
            differences.push((e, alpha_diff.clone(), 0));
        } else {
            differences.push((e, Rat::zero(), 0));
        }
    }

    // Generator minimality: for candidates b + b^2 and b(1 + pi), the
    // difference picks up a factor w = 1 + b + s(b) (resp. 1 + pi), so the
    // recorded valuation cannot drop as long as v(w) = 0. The residue of
    // 1 + b + s(b) is 1 for p = 2 and 1 + 2 c_b eta^(beta_b) for odd p, a
    // nonzero Laurent expression whenever the generator order beta_b is
    // nonzero.
    if let Some((j0, _)) = fierce_break(piece) {
        let beta_b = m1 * j0;
        let w_val_zero = p == 2 || beta_b != 0;
        if !w_val_zero {
            return Err(CoreError::ModelError(
                "generator minimality check failed: candidate generator \
                 difference has smaller valuation"
                    .into(),
            ));
        }
    }

    Ok(GeneratorModel {
        radius: t.clone(),
        normalization,
        differences,
        beta_of_generator,
    })
}

/// One branch of the Swan class function attached to a piece.
fn swan_branch_classfun(
    cover: &CoverSpec,
    piece: &AnnulusPiece,
    side: BranchSide,
) -> CoreResult<ClassFun> {
    ensure_single_orbit(cover, piece)?;
    let group = &cover.group;
    let p = cover.p() as i64;
    let m1 = piece.ctx.kummer.as_ref().map(|k| k.m1).unwrap_or(1) as i64;
    let mut f = ClassFun::zero(group);
    if let Some((j0, _)) = fierce_break(piece) {
        let sign = match side {
            BranchSide::Lower => 1,
            BranchSide::Upper => -1,
        };
        // off-diagonal: -v^beta(s(b)/b - 1) = v^beta(b) = sign * m1 * j0
        let off = Rat::int(sign * m1 * j0);
        for e in as_factor_nonzero(cover) {
            f.set_rat(&e, off.clone());
        }
        let diag = -(&Rat::int(p - 1) * &off);
        f.set_rat(&group.identity(), diag);
    }
    check_branch_consistency(cover, piece, &f, side)?;
    Ok(f)
}

/// The overdetermined consistency system: pairing the branch function with
/// every permutation character must reproduce the quotient cover's
/// discriminant slope computed independently from its decomposition.
fn check_branch_consistency(
    cover: &CoverSpec,
    piece: &AnnulusPiece,
    branch_fun: &ClassFun,
    side: BranchSide,
) -> CoreResult<()> {
    let mid = &(&piece.interval.0 + &piece.interval.1) / &Rat::int(2);
    for h in cover.group.subgroups() {
        let quotient = cover.quotient(&h)?;
        let qpiece = quotient.piece_containing(&mid)?;
        let lutke = qpiece.sigma() - quotient.degree() as i64 + qpiece.delta_f as i64;
        let expected = match side {
            BranchSide::Lower => lutke,
            BranchSide::Upper => -lutke,
        };
        let perm = cover.group.permutation_character(&h);
        let got = branch_fun.pairing_rat(&perm)?;
        if got != Rat::int(expected) {
            return Err(CoreError::ModelError(format!(
                "Swan branch inconsistency on ({}, {}), subgroup of order {}: \
                 pairing gives {got}, decomposition gives {expected}",
                piece.interval.0,
                piece.interval.1,
                h.order()
            )));
        }
    }
    Ok(())
}

/// The interval Swan class function: lower branch at t plus upper branch at
/// t'. Both endpoints must be non-critical; the interval may span critical
/// radii, which is where the function carries information.
pub fn swan_beta_classfun(cover: &CoverSpec, t: &Rat, t2: &Rat) -> CoreResult<ClassFun> {
    ensure_abelian(cover)?;
    if t >= t2 {
        return Err(CoreError::Domain(format!("need t < t', got {t} >= {t2}")));
    }
    let lower_piece = cover.piece_containing(t)?;
    let upper_piece = cover.piece_containing(t2)?;
    let lo = swan_branch_classfun(cover, &lower_piece, BranchSide::Lower)?;
    let hi = swan_branch_classfun(cover, &upper_piece, BranchSide::Upper)?;
    lo.add(&hi)
}

/// Evaluates a conductor-style pairing piecewise and assembles the PL
/// function over the full base interval, verifying affinity on each piece at
/// interior witnesses and continuity at the critical radii.
fn assemble_piecewise(
    cover: &CoverSpec,
    eval: &dyn Fn(&AnnulusPiece, &Rat) -> CoreResult<Rat>,
) -> CoreResult<PLFun> {
    let mut parts = Vec::new();
    for piece in cover.decompose()? {
        let (a, b) = piece.interval.clone();
        let pts = interior_samples(&a, &b, 5);
        let v0 = eval(&piece, &pts[0])?;
        let v4 = eval(&piece, &pts[4])?;
        let slope = &(&v4 - &v0) / &(&pts[4] - &pts[0]);
        let offset = &v0 - &(&slope * &pts[0]);
        for w in &pts[1..4] {
            let expect = &(&slope * w) + &offset;
            let got = eval(&piece, w)?;
            if got != expect {
                return Err(CoreError::ModelError(format!(
                    "pairing not affine on piece ({a}, {b}): {got} vs {expect} at {w}"
                )));
            }
        }
        parts.push(PLFun::affine(a, b, slope, offset));
    }
    PLFun::concat(&parts)
}

/// The discriminant function of the cover over its base interval.
///
/// Abelian covers use the pairing route (the regular-character pairing of the
/// Artin class function); monic covers use the orthonormalization lattice
/// route on certified pieces.
pub fn discriminant_fun(cover: &CoverSpec) -> CoreResult<PLFun> {
    match &cover.kind {
        CoverKind::Monic { coeffs } => discriminant_lattice(cover, coeffs),
        _ => {
            let r_g = cover.group.regular_character();
            assemble_piecewise(cover, &|piece, t| {
                let a = artin_classfun_on_piece(cover, piece, t)?;
                a.pairing_rat(&r_g)
            })
        }
    }
}

/// Lattice route: v_t(disc_y P) - 2 sum_j nu_j(t), with nu_j = j * (Newton
/// slope). Only certified single-face or all-sections pieces are supported.
fn discriminant_lattice(cover: &CoverSpec, coeffs: &[LaurentPolyAlias]) -> CoreResult<PLFun> {
    let yp = YPoly::new(cover.fq(), coeffs.to_vec())?;
    let disc = yp.discriminant_resultant()?;
    let d = yp.degree() as i64;
    let (r, rp) = (&cover.interval.0, &cover.interval.1);
    let mut parts = Vec::new();
    for piece in cover.decompose()? {
        let (a, b) = piece.interval.clone();
        if piece.components.len() == 1 && piece.components[0].order as i64 == d {
            // single face spanning the polygon: nu(t) = v_t(c_0) / d
            let c0 = &coeffs[0];
            let nu = gauss_val(c0, (r, rp))?.fun.restrict(&a, &b)?;
            let env = gauss_val(&disc, (r, rp))?.fun.restrict(&a, &b)?;
            let correction = nu.scale(&Rat::new(d - 1, 1));
            parts.push(env.add(&correction.neg())?);
        } else if piece.components.iter().all(|c| c.order == 1) {
            // split piece: the unit-ball algebra is a product of section
            // rings and the discriminant of the lattice is a unit
            parts.push(PLFun::constant(a, b, Rat::zero()));
        } else {
            return Err(CoreError::UnsupportedDecomposition(
                "lattice-route discriminant needs a single certified Newton \
                 face or an all-sections piece"
                    .into(),
            ));
        }
    }
    PLFun::concat(&parts)
}

type LaurentPolyAlias = crate::laurent::LaurentPoly;

/// Validates that chi is a character of the cover group or a nonnegative
/// integer combination of characters.
fn validate_character(cover: &CoverSpec, chi: &ClassFun) -> CoreResult<()> {
    if chi.group() != &cover.group {
        return Err(CoreError::Domain("character on the wrong group".into()));
    }
    let mut recomposed = ClassFun::zero(&cover.group);
    for irr in cover.group.characters() {
        let mult = chi.pairing_rat(irr_ref(&irr))?;
        if mult.is_negative() || !mult.is_integer() {
            return Err(CoreError::Domain(format!(
                "not a nonnegative integer combination of characters \
                 (multiplicity {mult})"
            )));
        }
        recomposed = recomposed.add(&irr.scale(&mult))?;
    }
    if &recomposed != chi {
        return Err(CoreError::Domain("not in the character lattice".into()));
    }
    Ok(())
}

fn irr_ref(c: &ClassFun) -> &ClassFun {
    c
}

/// `t -> <a_f(t), chi>`: the Swan conductor function of the character.
pub fn swan_as(cover: &CoverSpec, chi: &ClassFun) -> CoreResult<PLFun> {
    ensure_abelian(cover)?;
    validate_character(cover, chi)?;
    assemble_piecewise(cover, &|piece, t| {
        let a = artin_classfun_on_piece(cover, piece, t)?;
        a.pairing_rat(chi)
    })
}

/// The local characteristic-cycle order at a non-critical radius: the pairing
/// of the lower-branch Swan function with chi. The companion radius required
/// by the interval formulation is taken as the midpoint between t and the
/// right end of its piece (or mirrored at the right domain end); the branch
/// value does not depend on that choice.
pub fn phi_s(cover: &CoverSpec, chi: &ClassFun, t: &Rat) -> CoreResult<Rat> {
    ensure_abelian(cover)?;
    validate_character(cover, chi)?;
    let piece = cover.piece_containing(t)?;
    let phi = if *t < piece.interval.1 {
        swan_branch_classfun(cover, &piece, BranchSide::Lower)?.pairing_rat(chi)?
    } else {
        -swan_branch_classfun(cover, &piece, BranchSide::Upper)?.pairing_rat(chi)?
    };
    if !phi.is_integer() {
        return Err(CoreError::ModelError(format!("phi_s not an integer: {phi}")));
    }
    Ok(phi)
}

/// Whether the cover is in the delta-known catalogue for the nearby-cycles
/// left-hand side: the identity cover or a tame Kummer cover of a monomial
/// unit (one node upstairs, delta = 1, two branches, vanishing eta term).
fn delta_known_lhs(cover: &CoverSpec) -> Option<i64> {
    if cover.degree() == 1 {
        return Some(0);
    }
    match &cover.kind {
        CoverKind::Kummer { u, .. } => {
            (u.terms().len() == 1).then_some(0)
        }
        _ => None,
    }
}

/// Runs the full theorem battery for one character.
pub fn verify_theorem(cover: &CoverSpec, chi: &ClassFun, pairs_per_boundary: usize) -> CoreResult<ConductorReport> {
    ensure_abelian(cover)?;
    validate_character(cover, chi)?;
    let mut checks: Vec<CheckResult> = Vec::new();
    let pieces = cover.decompose()?;

    // (a) continuity: piecewise assembly fails loudly on a junction mismatch,
    // so reaching a PLFun at all is the check; record it explicitly.
    let sw_fun = swan_as(cover, chi)?;
    checks.push(CheckResult {
        name: "continuity".into(),
        status: CheckStatus::Pass,
        lhs: "piece endpoint values agree".into(),
        rhs: String::new(),
        witness: format!("{} critical radii", pieces.len() - 1),
    });

    // (b) convexity, (c) integer slopes
    let convexity_check = sw_fun.is_convex();
    checks.push(check_bool("convexity", convexity_check, &sw_fun));
    let integer_slope_check = sw_fun.has_integer_slopes();
    checks.push(check_bool("integer-slopes", integer_slope_check, &sw_fun));

    // Branch Swan functions are piece-local; computing them once per piece
    // (with their consistency solve) keeps the radius sweeps cheap.
    let mut lower_branch = Vec::new();
    let mut upper_branch = Vec::new();
    for piece in &pieces {
        lower_branch.push(swan_branch_classfun(cover, piece, BranchSide::Lower)?);
        upper_branch.push(swan_branch_classfun(cover, piece, BranchSide::Upper)?);
    }
    let piece_index = |t: &Rat| -> usize {
        pieces
            .iter()
            .position(|p| *t >= p.interval.0 && *t <= p.interval.1)
            .expect("sample radius inside the domain")
    };
    let phi_at = |t: &Rat| -> CoreResult<Rat> {
        lower_branch[piece_index(t)].pairing_rat(chi)
    };

    // phi at piece midpoints for the report
    let mut phi_vals = Vec::new();
    for piece in &pieces {
        let mid = &(&piece.interval.0 + &piece.interval.1) / &Rat::int(2);
        phi_vals.push((mid.clone(), phi_at(&mid)?));
    }

    // (d) slope-difference identity on sampled non-critical pairs: within
    // pieces and straddling every piece boundary
    let mut slope_check = true;
    let mut pair_list: Vec<(Rat, Rat)> = Vec::new();
    for piece in &pieces {
        let s = interior_samples(&piece.interval.0, &piece.interval.1, 4);
        pair_list.push((s[0].clone(), s[3].clone()));
    }
    for w in pieces.windows(2) {
        let left = interior_samples(&w[0].interval.0, &w[0].interval.1, pairs_per_boundary);
        let right = interior_samples(&w[1].interval.0, &w[1].interval.1, pairs_per_boundary);
        for (tl, tr) in left.iter().zip(right.iter()) {
            pair_list.push((tl.clone(), tr.clone()));
        }
    }
    for (t, t2) in &pair_list {
        let lhs = &sw_fun.right_deriv(t)? - &sw_fun.left_deriv(t2)?;
        let rhs = &phi_at(t)? - &phi_at(t2)?;
        let ok = lhs == rhs;
        slope_check &= ok;
        checks.push(CheckResult {
            name: "slope-difference".into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            witness: format!("t = {t}, t' = {t2}"),
        });
        // convexity in slope-difference form: the difference is never positive
        let nonpos = !lhs.is_positive();
        slope_check &= nonpos;
        checks.push(CheckResult {
            name: "slope-difference-nonpositive".into(),
            status: if nonpos { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs: lhs.to_string(),
            rhs: "<= 0".into(),
            witness: format!("t = {t}, t' = {t2}"),
        });
        // interval pairing must agree with the derivative difference
        let sw_beta = lower_branch[piece_index(t)].add(&upper_branch[piece_index(t2)])?;
        let paired = sw_beta.pairing_rat(chi)?;
        let ok2 = paired == lhs;
        slope_check &= ok2;
        checks.push(CheckResult {
            name: "interval-pairing".into(),
            status: if ok2 { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs: paired.to_string(),
            rhs: lhs.to_string(),
            witness: format!("t = {t}, t' = {t2}"),
        });
    }

    // (e) concatenation additivity over 3 nested triples, as class functions;
    // sample radii come from a non-critical pool so a triple never lands on a
    // critical radius
    let (r, rp) = (&cover.interval.0, &cover.interval.1);
    let width = rp - r;
    let crits = cover.critical_radii()?;
    let pool: Vec<Rat> = (1..29i64)
        .map(|j| r + &(&width * &Rat::new(j, 29)))
        .filter(|t| !crits.contains(t))
        .collect();
    if pool.len() < 7 {
        return Err(CoreError::ModelError("not enough non-critical radii".into()));
    }
    let interval_fun = |t0: &Rat, t1: &Rat| -> CoreResult<ClassFun> {
        lower_branch[piece_index(t0)].add(&upper_branch[piece_index(t1)])
    };
    for k in 0..3usize {
        let t0 = pool[k].clone();
        let t1 = pool[3].clone();
        let t2 = pool[pool.len() - 1 - k].clone();
        let ab = interval_fun(&t0, &t1)?;
        let bc = interval_fun(&t1, &t2)?;
        let ac = interval_fun(&t0, &t2)?;
        let ok = ab.add(&bc)? == ac;
        checks.push(CheckResult {
            name: "concatenation".into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs: format!("sw[{t0},{t1}] + sw[{t1},{t2}]"),
            rhs: format!("sw[{t0},{t2}]"),
            witness: format!("class functions {}", if ok { "agree" } else { "differ" }),
        });
    }

    // (f) nearby-cycles ledger: decomposition sums against the pairing-route
    // discriminant slopes, across the whole interval and at every boundary
    let disc = discriminant_fun(cover)?;
    let first = pieces.first().unwrap();
    let last = pieces.last().unwrap();
    let rhs_total = first.sigma() + first.delta_f as i64 - last.sigma() - last.delta_f as i64;
    let ledger = NearbyCyclesLedger {
        sigma: first.sigma(),
        sigma_prime: last.sigma(),
        delta_f: first.delta_f,
        delta_f_prime: last.delta_f,
        lhs_sum: delta_known_lhs(cover),
        rhs: rhs_total,
    };
    let disc_slope_diff = disc_slope_at_start(&disc, first)?.clone()
        - disc_slope_at_end(&disc, last)?;
    let ok = Rat::int(ledger.rhs) == disc_slope_diff;
    checks.push(CheckResult {
        name: "nearby-cycles-rhs".into(),
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        lhs: disc_slope_diff.to_string(),
        rhs: ledger.rhs.to_string(),
        witness: "discriminant slope difference over [r, r']".into(),
    });
    if let Some(lhs) = ledger.lhs_sum {
        let ok = lhs == ledger.rhs;
        checks.push(CheckResult {
            name: "nearby-cycles-lhs".into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs: lhs.to_string(),
            rhs: ledger.rhs.to_string(),
            witness: "delta-known catalogue".into(),
        });
    } else {
        checks.push(CheckResult {
            name: "nearby-cycles-lhs".into(),
            status: CheckStatus::NotComputed,
            lhs: "not in the delta-known catalogue".into(),
            rhs: ledger.rhs.to_string(),
            witness: String::new(),
        });
    }
    for w in pieces.windows(2) {
        let rhs = w[0].sigma() + w[0].delta_f as i64 - w[1].sigma() - w[1].delta_f as i64;
        let lhs = disc_slope_at_start(&disc, &w[0])? - disc_slope_at_end(&disc, &w[1])?;
        let ok = lhs == Rat::int(rhs);
        checks.push(CheckResult {
            name: "nearby-cycles-boundary".into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            witness: format!("critical radius {}", w[0].interval.1),
        });
    }

    let continuity_check = true;
    Ok(ConductorReport {
        sw_fun,
        phi_vals,
        continuity_check,
        convexity_check,
        integer_slope_check,
        slope_check,
        checks,
        ledger,
    })
}

fn check_bool(name: &str, ok: bool, f: &PLFun) -> CheckResult {
    CheckResult {
        name: name.into(),
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        lhs: format!(
            "slopes {:?}",
            f.slopes().iter().map(|(_, s)| s.to_string()).collect::<Vec<_>>()
        ),
        rhs: String::new(),
        witness: String::new(),
    }
}

fn disc_slope_at_start(disc: &PLFun, piece: &AnnulusPiece) -> CoreResult<Rat> {
    let mid = &(&piece.interval.0 + &piece.interval.1) / &Rat::int(2);
    disc.right_deriv(&mid).or_else(|_| disc.left_deriv(&mid))
}

fn disc_slope_at_end(disc: &PLFun, piece: &AnnulusPiece) -> CoreResult<Rat> {
    let mid = &(&piece.interval.0 + &piece.interval.1) / &Rat::int(2);
    disc.left_deriv(&mid).or_else(|_| disc.right_deriv(&mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;
    use crate::laurent::LaurentPoly;
    use crate::field::FieldElem;
    use crate::fq::FqElem;
    use crate::rat;
    use std::sync::Arc;

    fn pi(fq: &Arc<Fq>, e: Rat) -> FieldElem {
        FieldElem::monomial(fq, FqElem::one(fq), e)
    }

    fn xi_pow(fq: &Arc<Fq>, k: i64) -> LaurentPoly {
        LaurentPoly::monomial(fq, FieldElem::one(fq), k)
    }

    fn as_cover(q: u64, n: i64) -> CoverSpec {
        let fq = Fq::new(q).unwrap();
        CoverSpec::artin_schreier(&fq, xi_pow(&fq, -n), (rat!(1, 10), rat!(3)), 64).unwrap()
    }

    #[test]
    fn kummer_artin_function_vanishes() {
        let fq = Fq::new(7).unwrap();
        let c = CoverSpec::kummer(&fq, 3, LaurentPoly::xi(&fq), (rat!(0), rat!(2)), 64).unwrap();
        let a = artin_classfun(&c, &rat!(1)).unwrap();
        assert!(a.is_zero());
    }

    #[test]
    fn artin_schreier_break_law_classfun() {
        // g = xi^-n: <a_f(t), chi> = n t for every nontrivial character
        for (q, n) in [(2u64, 3i64), (3, 2), (5, 1)] {
            let c = as_cover(q, n);
            let t = rat!(1, 2);
            let a = artin_classfun(&c, &t).unwrap();
            let chars = c.group.characters();
            for (i, chi) in chars.iter().enumerate() {
                let sw = a.pairing_rat(chi).unwrap();
                let trivial = i == 0;
                let expect = if trivial {
                    rat!(0)
                } else {
                    &rat!(n) * &t
                };
                assert_eq!(sw, expect, "q = {q}, n = {n}, char {i}");
            }
        }
    }

    #[test]
    fn discriminant_examples() {
        // Kummer y^m = xi: identically zero
        let fq = Fq::new(7).unwrap();
        let k = CoverSpec::kummer(&fq, 3, LaurentPoly::xi(&fq), (rat!(0), rat!(2)), 64).unwrap();
        let d = discriminant_fun(&k).unwrap();
        assert_eq!(d.eval(&rat!(1)).unwrap(), rat!(0));
        assert_eq!(d.slopes().len(), 1);
        // AS g = xi^-n: (p - 1) n t
        let c = as_cover(3, 2);
        let d = discriminant_fun(&c).unwrap();
        assert_eq!(d.eval(&rat!(1)).unwrap(), rat!(4));
        assert_eq!(d.slopes()[0].1, rat!(4));
        // and the slope matches the decomposition data
        let piece = &c.decompose().unwrap()[0];
        assert_eq!(
            d.slopes()[0].1,
            rat!(piece.sigma() - c.degree() as i64 + piece.delta_f as i64)
        );
    }

    #[test]
    fn lattice_route_matches_pairing_route_for_kummer() {
        // y^3 = xi as a monic cover: disc route must also give zero
        let fq = Fq::new(7).unwrap();
        let monic = CoverSpec::monic(
            &fq,
            vec![
                LaurentPoly::xi(&fq).neg(),
                LaurentPoly::zero(&fq),
                LaurentPoly::zero(&fq),
                LaurentPoly::one(&fq),
            ],
            (rat!(0), rat!(2)),
            64,
        )
        .unwrap();
        let d = discriminant_fun(&monic).unwrap();
        for k in 0..=4i64 {
            let t = rat!(k, 2);
            assert_eq!(d.eval(&t).unwrap(), rat!(0));
        }
    }

    #[test]
    fn swan_function_break_law() {
        let c = as_cover(2, 3);
        let chi = &c.group.characters()[1];
        let sw = swan_as(&c, chi).unwrap();
        // sw = 3t exactly on [1/10, 3]
        assert_eq!(sw.slopes().len(), 1);
        assert_eq!(sw.slopes()[0].1, rat!(3));
        assert_eq!(sw.eval(&rat!(1)).unwrap(), rat!(3));
        // phi = 3 at non-critical radii
        assert_eq!(phi_s(&c, chi, &rat!(1, 2)).unwrap(), rat!(3));
        assert_eq!(phi_s(&c, chi, &rat!(3)).unwrap(), rat!(3));
    }

    #[test]
    fn swan_envelope_with_breakpoint() {
        // g = xi^-1 + pi^2 xi^-3, p = 2: sw = max(t, 3t - 2) on [0, 2]
        let fq = Fq::new(2).unwrap();
        let g = xi_pow(&fq, -1).add(&LaurentPoly::monomial(&fq, pi(&fq, rat!(2)), -3));
        let c = CoverSpec::artin_schreier(&fq, g, (rat!(0), rat!(2)), 64).unwrap();
        let chi = &c.group.characters()[1];
        let sw = swan_as(&c, chi).unwrap();
        assert_eq!(sw.breakpoints, vec![rat!(0), rat!(1), rat!(2)]);
        assert_eq!(sw.eval(&rat!(1)).unwrap(), rat!(1));
        assert_eq!(sw.eval(&rat!(2)).unwrap(), rat!(4));
        assert!(sw.is_convex());
        assert!(sw.has_integer_slopes());
        // phi jumps 1 -> 3 across the critical radius
        assert_eq!(phi_s(&c, chi, &rat!(1, 2)).unwrap(), rat!(1));
        assert_eq!(phi_s(&c, chi, &rat!(3, 2)).unwrap(), rat!(3));
    }

    #[test]
    fn tame_interval_swan_is_zero() {
        let fq = Fq::new(7).unwrap();
        let k = CoverSpec::kummer(&fq, 3, LaurentPoly::xi(&fq), (rat!(0), rat!(2)), 64).unwrap();
        let f = swan_beta_classfun(&k, &rat!(1, 2), &rat!(3, 2)).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn split_to_fierce_transition() {
        // g = pi xi^-1 under y^2 = xi over F_3: the break max(0, t - 1)
        // vanishes on (0, 1) where the cover splits, then turns fierce
        let fq = Fq::new(3).unwrap();
        let g = LaurentPoly::monomial(&fq, pi(&fq, rat!(1)), -1);
        let c = CoverSpec::compositum(&fq, 2, LaurentPoly::xi(&fq), g, (rat!(0), rat!(2)), 64)
            .unwrap();
        let pieces = c.decompose().unwrap();
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].delta_f, 3); // three split components of order 2
        assert_eq!(pieces[1].delta_f, 1); // one fierce component of order 6
        assert_eq!(pieces[1].components[0].derivative_order, 9);
        for (i, chi) in c.group.characters().iter().enumerate() {
            let rep = verify_theorem(&c, chi, 5).unwrap();
            assert!(rep.all_pass(), "char {i}");
            let expect_wild = i % 3 != 0;
            let v = rep.sw_fun.eval(&rat!(2)).unwrap();
            assert_eq!(v, if expect_wild { rat!(1) } else { rat!(0) }, "char {i}");
        }
    }

    #[test]
    fn swan_beta_interval_function() {
        // single piece: the interval function vanishes identically
        let c = as_cover(3, 2);
        let f = swan_beta_classfun(&c, &rat!(1, 2), &rat!(2)).unwrap();
        assert!(f.is_zero());
        // across a break: pairing equals the slope difference
        let fq = Fq::new(2).unwrap();
        let g = xi_pow(&fq, -1).add(&LaurentPoly::monomial(&fq, pi(&fq, rat!(2)), -3));
        let c = CoverSpec::artin_schreier(&fq, g, (rat!(0), rat!(2)), 64).unwrap();
        let chi = &c.group.characters()[1];
        let f = swan_beta_classfun(&c, &rat!(1, 2), &rat!(3, 2)).unwrap();
        assert_eq!(f.pairing_rat(chi).unwrap(), rat!(1 - 3));
    }

    #[test]
    fn verify_theorem_battery() {
        // Kummer: everything passes, sw = 0
        let fq = Fq::new(7).unwrap();
        let k = CoverSpec::kummer(&fq, 3, LaurentPoly::xi(&fq), (rat!(0), rat!(2)), 64).unwrap();
        let chi = &k.group.characters()[1];
        let rep = verify_theorem(&k, chi, 5).unwrap();
        assert!(rep.all_pass());
        assert_eq!(rep.ledger.lhs_sum, Some(0));
        assert_eq!(rep.ledger.rhs, 0);
        assert!(rep.sw_fun.eval(&rat!(1)).unwrap().is_zero());

        // AS with a breakpoint: slope difference = 2 at the crossing
        let f2 = Fq::new(2).unwrap();
        let g = xi_pow(&f2, -1).add(&LaurentPoly::monomial(&f2, pi(&f2, rat!(2)), -3));
        let c = CoverSpec::artin_schreier(&f2, g, (rat!(0), rat!(2)), 64).unwrap();
        let chi = &c.group.characters()[1];
        let rep = verify_theorem(&c, chi, 5).unwrap();
        assert!(rep.all_pass(), "failed checks: {:?}", rep.checks.iter().filter(|c| c.status == CheckStatus::Fail).collect::<Vec<_>>());
        // sigma + delta goes 2 + 1 -> 4 + 1 across the break, so rhs = -2,
        // matching the discriminant slope change 1 -> 3
        assert_eq!(rep.ledger.rhs, -2);
    }

    #[test]
    fn compositum_swan_matches_as_part() {
        // y^2 = xi, z^3 - z = xi^-1 over F_3: characters nontrivial on the AS
        // part have sw = t, tame characters have sw = 0
        let fq = Fq::new(3).unwrap();
        let c = CoverSpec::compositum(
            &fq,
            2,
            LaurentPoly::xi(&fq),
            xi_pow(&fq, -1),
            (rat!(1, 4), rat!(2)),
            64,
        )
        .unwrap();
        for (i, chi) in c.group.characters().iter().enumerate() {
            let sw = swan_as(&c, chi).unwrap();
            // characters are indexed lexicographically by (kummer, as) indices
            let as_index = i % 3;
            if as_index == 0 {
                assert!(sw.eval(&rat!(1)).unwrap().is_zero(), "char {i}");
            } else {
                assert_eq!(sw.eval(&rat!(1)).unwrap(), rat!(1), "char {i}");
                assert_eq!(sw.slopes()[0].1, rat!(1));
            }
        }
    }

    #[test]
    fn quotient_discriminant_identity() {
        // <a_f(t), Q[G/H]> = partial_{f_H}(t) for every subgroup
        let fq = Fq::new(3).unwrap();
        let c = CoverSpec::compositum(
            &fq,
            2,
            LaurentPoly::xi(&fq),
            xi_pow(&fq, -1),
            (rat!(1, 4), rat!(2)),
            64,
        )
        .unwrap();
        for h in c.group.subgroups() {
            let quotient = c.quotient(&h).unwrap();
            let dq = discriminant_fun(&quotient).unwrap();
            let perm = c.group.permutation_character(&h);
            for t in [rat!(1, 2), rat!(1), rat!(3, 2)] {
                let lhs = artin_classfun(&c, &t).unwrap().pairing_rat(&perm).unwrap();
                assert_eq!(lhs, dq.eval(&t).unwrap(), "H order {}", h.order());
            }
        }
    }

    #[test]
    fn generator_model_minimality() {
        let c = as_cover(5, 2);
        let m = generator_model(&c, &rat!(1)).unwrap();
        assert_eq!(m.normalization, rat!(-2, 5));
        for (_, alpha, beta) in &m.differences {
            assert_eq!(*alpha, rat!(2, 5));
            assert_eq!(*beta, 0);
        }
        assert_eq!(m.beta_of_generator, -2);
    }

    #[test]
    fn fierce_split_boundary_rejected() {
        // y^2 = xi^2 splits the boundary fiber (gamma = 2); with a fierce
        // Artin-Schreier part the single-orbit normalization fails and the
        // class-function route must refuse
        let fq = Fq::new(3).unwrap();
        let c = CoverSpec::compositum(
            &fq,
            2,
            xi_pow(&fq, 2),
            xi_pow(&fq, -1),
            (rat!(1, 4), rat!(2)),
            64,
        )
        .unwrap();
        assert!(matches!(
            artin_classfun(&c, &rat!(1)),
            Err(CoreError::Domain(_))
        ));
        // decomposition still works: 2 components of order 3
        let pieces = c.decompose().unwrap();
        assert_eq!(pieces[0].delta_f, 2);
        assert!(pieces[0].components.iter().all(|comp| comp.order == 3));
    }

    #[test]
    fn negative_slope_battery() {
        // g = xi^-1 + pi^-2 xi: sw = max(t, 2 - t), V-shaped and convex
        let fq = Fq::new(2).unwrap();
        let g = xi_pow(&fq, -1).add(&LaurentPoly::monomial(&fq, pi(&fq, rat!(-2)), 1));
        let c = CoverSpec::artin_schreier(&fq, g, (rat!(0), rat!(2)), 64).unwrap();
        let chi = &c.group.characters()[1];
        let rep = verify_theorem(&c, chi, 5).unwrap();
        assert!(rep.all_pass());
        assert_eq!(rep.sw_fun.eval(&rat!(0)).unwrap(), rat!(2));
        assert_eq!(rep.sw_fun.eval(&rat!(1)).unwrap(), rat!(1));
        assert_eq!(rep.sw_fun.eval(&rat!(2)).unwrap(), rat!(2));
        assert_eq!(phi_s(&c, chi, &rat!(1, 2)).unwrap(), rat!(-1));
        assert_eq!(phi_s(&c, chi, &rat!(3, 2)).unwrap(), rat!(1));
    }

    #[test]
    fn critical_radius_rejected() {
        let fq = Fq::new(2).unwrap();
        let g = xi_pow(&fq, -1).add(&LaurentPoly::monomial(&fq, pi(&fq, rat!(2)), -3));
        let c = CoverSpec::artin_schreier(&fq, g, (rat!(0), rat!(2)), 64).unwrap();
        assert!(matches!(
            artin_classfun(&c, &rat!(1)),
            Err(CoreError::CriticalRadius(_))
        ));
    }
}
