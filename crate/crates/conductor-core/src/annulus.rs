//! Gauss valuations of Laurent polynomials as functions of the radius,
//! boundary valuation pairs, and zero counting on closed annuli.
//!
//! A radius t names the boundary circle where `v(xi) = t`; the Gauss valuation
//! is `v_t(sum a_i xi^i) = min_i (v(a_i) + i t)`, the lower envelope of one
//! affine line per monomial. On the branch of the smaller radius exponent the
//! reduction coordinate has order +1, on the other branch -1; zero counts fall
//! out of the achiever indices at the two ends.

use std::collections::BTreeSet;

use crate::error::{CoreError, CoreResult};
use crate::laurent::LaurentPoly;
use crate::plfun::PLFun;
use crate::rat::Rat;
use crate::residue::ResiduePoly;

/// Which boundary circle of the closed annulus `[r, r']`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// The circle of radius exponent r (the larger annulus radius); the
    /// reduction coordinate has order +1 here.
    Outer,
    /// The circle of radius exponent r'; the reduction coordinate has
    /// order -1 here.
    Inner,
}

/// The Gauss valuation of a fixed polynomial as a function of the radius.
#[derive(Clone, Debug)]
pub struct GaussValFun {
    pub poly: LaurentPoly,
    pub domain: (Rat, Rat),
    pub fun: PLFun,
    /// Achieving exponent on each open linearity segment, in domain order.
    /// Lines have pairwise distinct slopes, so each open segment has exactly
    /// one achiever; ties happen only at breakpoints.
    pub segment_achievers: Vec<i64>,
}

/// Boundary valuation pair `(v^alpha, v^beta)` of a function at one branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryVal {
    pub alpha: Rat,
    pub beta: i64,
    pub branch: Branch,
}

impl GaussValFun {
    /// The set of exponents achieving the minimum at radius t.
    pub fn achievers_at(&self, t: &Rat) -> CoreResult<BTreeSet<i64>> {
        let ft = self.fun.eval(t)?;
        let mut out = BTreeSet::new();
        for (line_slope, line_offset) in self.poly.envelope_lines()? {
            if &(&line_slope * t) + &line_offset == ft {
                out.insert(line_slope.to_i64().expect("integer exponent"));
            }
        }
        Ok(out)
    }

    /// The residue of `F * pi^(-v_t(F))` at radius t: the terms achieving the
    /// envelope, as a Laurent polynomial in the reduction coordinate.
    pub fn residue_at(&self, t: &Rat) -> CoreResult<ResiduePoly> {
        let mut out = ResiduePoly::zero(self.poly.fq());
        for i in self.achievers_at(t)? {
            let c = self.poly.coeff(i);
            // leading coefficient of a_i at its valuation v(a_i) = ft - i*t
            let lead = c.leading_coeff()?;
            out.add_term(i, lead);
        }
        Ok(out)
    }
}

/// Computes the Gauss valuation envelope of `poly` over `[r, r']`.
pub fn gauss_val(poly: &LaurentPoly, interval: (&Rat, &Rat)) -> CoreResult<GaussValFun> {
    let (r, rp) = interval;
    if r > rp {
        return Err(CoreError::Domain(format!("empty interval [{r}, {rp}]")));
    }
    if poly.is_zero() {
        return Err(CoreError::Domain("Gauss valuation of the zero polynomial".into()));
    }
    let lines = poly.envelope_lines()?;
    let fun = PLFun::lower_envelope(r, rp, &lines)?;
    // one achiever per open segment: evaluate at the midpoint
    let mut achievers = Vec::new();
    for w in fun.breakpoints.windows(2) {
        let mid = &(&w[0] + &w[1]) / &Rat::int(2);
        let fmid = fun.eval(&mid)?;
        let mut found = None;
        for (s, o) in &lines {
            if &(s * &mid) + o == fmid {
                found = Some(s.to_i64().expect("integer exponent"));
                break;
            }
        }
        achievers.push(found.expect("achiever must exist on segment"));
    }
    if fun.breakpoints.len() == 1 {
        // degenerate single-point domain
        let fmid = fun.values[0].clone();
        for (s, o) in &lines {
            if &(s * r) + o == fmid {
                achievers.push(s.to_i64().unwrap());
                break;
            }
        }
    }
    Ok(GaussValFun {
        poly: poly.clone(),
        domain: (r.clone(), rp.clone()),
        fun,
        segment_achievers: achievers,
    })
}

/// Boundary valuation `(alpha, beta)` of `poly` at one branch of `[r, r']`.
pub fn boundary_val(
    poly: &LaurentPoly,
    interval: (&Rat, &Rat),
    branch: Branch,
) -> CoreResult<BoundaryVal> {
    let gv = gauss_val(poly, interval)?;
    boundary_val_from(&gv, branch)
}

pub fn boundary_val_from(gv: &GaussValFun, branch: Branch) -> CoreResult<BoundaryVal> {
    let t = match branch {
        Branch::Outer => gv.domain.0.clone(),
        Branch::Inner => gv.domain.1.clone(),
    };
    let alpha = gv.fun.eval(&t)?;
    let ach = gv.achievers_at(&t)?;
    // verify the achieving coefficients have known leading terms
    for &i in &ach {
        gv.poly.coeff(i).leading_coeff()?;
    }
    let beta = match branch {
        Branch::Outer => *ach.iter().next().unwrap(),
        Branch::Inner => -*ach.iter().next_back().unwrap(),
    };
    Ok(BoundaryVal {
        alpha,
        beta,
        branch,
    })
}

/// Number of zeros of `poly` with valuation in the closed interval `[r, r']`,
/// counted with multiplicity, weighted by residue degree.
///
/// The count is the achiever-index drop across the interval. Zeros exactly on
/// a boundary circle are counted as inside; they are detected by a
/// multi-element achiever set at that end and accepted only when the boundary
/// residue is squarefree, i.e. all boundary zeros are simple.
pub fn count_zeros(poly: &LaurentPoly, interval: (&Rat, &Rat)) -> CoreResult<i64> {
    let gv = gauss_val(poly, interval)?;
    count_zeros_from(&gv)
}

pub fn count_zeros_from(gv: &GaussValFun) -> CoreResult<i64> {
    let (r, rp) = (&gv.domain.0, &gv.domain.1);
    for (t, branch) in [(r, "outer"), (rp, "inner")] {
        let ach = gv.achievers_at(t)?;
        if ach.len() > 1 {
            let res = gv.residue_at(t)?;
            if !res.is_squarefree()? {
                return Err(CoreError::BoundaryZeroAmbiguity(format!(
                    "repeated zero on the {branch} boundary circle t = {t}"
                )));
            }
        }
    }
    let a_outer = gv.achievers_at(r)?;
    let a_inner = gv.achievers_at(rp)?;
    Ok(a_outer.iter().next_back().unwrap() - a_inner.iter().next().unwrap())
}

/// Result of the zero-counting consistency identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KTheoryCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub ok: bool,
}

/// Checks the boundary-valuation zero count against an independent Newton
/// polygon face enumeration.
///
/// The left-hand side is the achiever-index drop (the sum of the two boundary
/// beta contributions, corrected for boundary zeros); the right-hand side
/// enumerates the faces of the Newton polygon of the coefficients and counts
/// root valuations inside the closed interval with lattice-length weights.
pub fn ktheory_check(poly: &LaurentPoly, interval: (&Rat, &Rat)) -> CoreResult<KTheoryCheck> {
    let lhs = count_zeros(poly, interval)?;
    let rhs = newton_zero_count(poly, interval)?;
    Ok(KTheoryCheck {
        lhs,
        rhs,
        ok: lhs == rhs,
    })
}

/// Root-valuation multiset of the Newton polygon: slopes of the lower convex
/// hull of `(i, v(a_i))`, each with horizontal length as multiplicity.
pub fn newton_slopes(poly: &LaurentPoly) -> CoreResult<Vec<(Rat, i64)>> {
    let mut pts: Vec<(i64, Rat)> = Vec::new();
    for (slope, offset) in poly.envelope_lines()? {
        pts.push((slope.to_i64().unwrap(), offset));
    }
    pts.sort_by(|a, b| a.0.cmp(&b.0));
    // monotone chain lower hull
    let mut hull: Vec<(i64, Rat)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // remove b if it is above or on segment a-p
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
    let mut out = Vec::new();
    for w in hull.windows(2) {
        let run = w[1].0 - w[0].0;
        let slope = &(&w[1].1 - &w[0].1) / &Rat::int(run);
        // root valuation = -slope of the Newton polygon face
        out.push((-slope, run));
    }
    Ok(out)
}

fn newton_zero_count(poly: &LaurentPoly, interval: (&Rat, &Rat)) -> CoreResult<i64> {
    let (r, rp) = interval;
    let mut count = 0;
    for (val, mult) in newton_slopes(poly)? {
        if &val >= r && &val <= rp {
            count += mult;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElem;
    use crate::fq::{Fq, FqElem};
    use crate::rat;
    use std::sync::Arc;

    fn pi(fq: &Arc<Fq>, e: Rat) -> FieldElem {
        FieldElem::monomial(fq, FqElem::one(fq), e)
    }

    fn xi_minus(fq: &Arc<Fq>, root: FieldElem) -> LaurentPoly {
        LaurentPoly::xi(fq).sub(&LaurentPoly::monomial(fq, root, 0))
    }

    #[test]
    fn gauss_val_of_xi() {
        let fq = Fq::new(2).unwrap();
        let gv = gauss_val(&LaurentPoly::xi(&fq), (&rat!(0), &rat!(1))).unwrap();
        assert_eq!(gv.fun.eval(&rat!(1, 2)).unwrap(), rat!(1, 2));
        assert_eq!(gv.segment_achievers, vec![1]);
    }

    #[test]
    fn gauss_val_breakpoint() {
        // F = pi + xi on [0, 2]: min(1, t), breakpoint at 1
        let fq = Fq::new(2).unwrap();
        let f = LaurentPoly::xi(&fq).add(&LaurentPoly::monomial(&fq, pi(&fq, rat!(1)), 0));
        let gv = gauss_val(&f, (&rat!(0), &rat!(2))).unwrap();
        assert_eq!(gv.fun.breakpoints, vec![rat!(0), rat!(1), rat!(2)]);
        assert_eq!(gv.segment_achievers, vec![1, 0]);
    }

    #[test]
    fn gauss_val_three_lines_vs_brute_force() {
        // F = xi^2 + pi xi + pi^3 on [0, 2]: envelope of {2t, 1+t, 3}
        let fq = Fq::new(5).unwrap();
        let f = LaurentPoly::from_terms(
            &fq,
            [
                (2, FieldElem::one(&fq)),
                (1, pi(&fq, rat!(1))),
                (0, pi(&fq, rat!(3))),
            ],
        );
        let gv = gauss_val(&f, (&rat!(0), &rat!(2))).unwrap();
        assert_eq!(gv.fun.breakpoints, vec![rat!(0), rat!(1), rat!(2)]);
        assert_eq!(gv.segment_achievers, vec![2, 1]);
        // brute-force min over exponents at 50 sample radii
        for k in 0..=50i64 {
            let t = rat!(2 * k, 50);
            let expected = [rat!(2) * t.clone(), rat!(1) + t.clone(), rat!(3)]
                .into_iter()
                .min()
                .unwrap();
            assert_eq!(gv.fun.eval(&t).unwrap(), expected);
        }
        // achiever sets at the breakpoints are the faces
        assert_eq!(
            gv.achievers_at(&rat!(1)).unwrap(),
            BTreeSet::from([1, 2])
        );
        assert_eq!(
            gv.achievers_at(&rat!(2)).unwrap(),
            BTreeSet::from([0, 1])
        );
    }

    #[test]
    fn boundary_vals_of_linear() {
        // F = xi - a with v(a) = 1/2 on [0, 1]
        let fq = Fq::new(2).unwrap();
        let f = xi_minus(&fq, pi(&fq, rat!(1, 2)));
        let outer = boundary_val(&f, (&rat!(0), &rat!(1)), Branch::Outer).unwrap();
        assert_eq!(outer.alpha, rat!(0));
        assert_eq!(outer.beta, 1);
        let inner = boundary_val(&f, (&rat!(0), &rat!(1)), Branch::Inner).unwrap();
        assert_eq!(inner.alpha, rat!(1, 2));
        assert_eq!(inner.beta, 0);
    }

    #[test]
    fn boundary_vals_of_monomial() {
        let fq = Fq::new(3).unwrap();
        let f = LaurentPoly::xi(&fq).pow(4);
        let outer = boundary_val(&f, (&rat!(1, 2), &rat!(2)), Branch::Outer).unwrap();
        let inner = boundary_val(&f, (&rat!(1, 2), &rat!(2)), Branch::Inner).unwrap();
        assert_eq!(outer.beta, 4);
        assert_eq!(inner.beta, -4);
        // constant pi: both betas zero, alpha = 1
        let c = LaurentPoly::monomial(&fq, pi(&fq, rat!(1)), 0);
        let o = boundary_val(&c, (&rat!(0), &rat!(1)), Branch::Outer).unwrap();
        let i = boundary_val(&c, (&rat!(0), &rat!(1)), Branch::Inner).unwrap();
        assert_eq!((o.alpha.clone(), o.beta), (rat!(1), 0));
        assert_eq!((i.alpha.clone(), i.beta), (rat!(1), 0));
    }

    #[test]
    fn count_zeros_examples() {
        let fq = Fq::new(5).unwrap();
        // (xi - pi)(xi - pi^2) on [1/2, 3] -> 2
        let f = xi_minus(&fq, pi(&fq, rat!(1))).mul(&xi_minus(&fq, pi(&fq, rat!(2))));
        assert_eq!(count_zeros(&f, (&rat!(1, 2), &rat!(3))).unwrap(), 2);
        // xi - pi^3 on [0, 1] -> 0
        let g = xi_minus(&fq, pi(&fq, rat!(3)));
        assert_eq!(count_zeros(&g, (&rat!(0), &rat!(1))).unwrap(), 0);
        // xi^5 is a unit on any annulus
        let h = LaurentPoly::xi(&fq).pow(5);
        assert_eq!(count_zeros(&h, (&rat!(1), &rat!(2))).unwrap(), 0);
    }

    #[test]
    fn boundary_zeros_counted_closed() {
        // roots at valuations {1/2, 1, 1, 5} on [1, 2]: the two roots of
        // valuation 1 sit on the outer boundary and count as inside
        let fq = Fq::new(5).unwrap();
        // distinct leading coefficients keep the boundary residue squarefree
        let roots = [
            pi(&fq, rat!(1, 2)),
            pi(&fq, rat!(1)),
            pi(&fq, rat!(1)).mul_fq(&FqElem::from_int(&fq, 2)),
            pi(&fq, rat!(5)),
        ];
        let mut f = LaurentPoly::one(&fq);
        for r in roots {
            f = f.mul(&xi_minus(&fq, r));
        }
        let chk = ktheory_check(&f, (&rat!(1), &rat!(2))).unwrap();
        assert_eq!(chk.lhs, 2);
        assert_eq!(chk.rhs, 2);
        assert!(chk.ok);
    }

    #[test]
    fn repeated_boundary_zero_is_ambiguous() {
        let fq = Fq::new(5).unwrap();
        let f = xi_minus(&fq, pi(&fq, rat!(1))).mul(&xi_minus(&fq, pi(&fq, rat!(1))));
        match count_zeros(&f, (&rat!(1), &rat!(2))) {
            Err(CoreError::BoundaryZeroAmbiguity(_)) => {}
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn ktheory_trivial_cases() {
        let fq = Fq::new(3).unwrap();
        let c = LaurentPoly::monomial(&fq, FieldElem::from_int(&fq, 2), 0);
        let chk = ktheory_check(&c, (&rat!(0), &rat!(2))).unwrap();
        assert_eq!((chk.lhs, chk.rhs), (0, 0));
        // negative-exponent unit
        let u = LaurentPoly::monomial(&fq, FieldElem::one(&fq), -3)
            .mul(&LaurentPoly::one(&fq).add(&LaurentPoly::monomial(&fq, pi(&fq, rat!(2)), 0)));
        let chk = ktheory_check(&u, (&rat!(0), &rat!(1))).unwrap();
        assert_eq!((chk.lhs, chk.rhs), (0, 0));
        assert!(chk.ok);
    }

    #[test]
    fn below_precision_coefficient_rejected() {
        // a coefficient that cancelled only up to its cap cannot feed an
        // envelope
        let fq = Fq::new(2).unwrap();
        let a = pi(&fq, rat!(1)).truncate(&rat!(4));
        let unknown = a.sub(&pi(&fq, rat!(1))); // zero up to O(pi^4)
        let mut f = LaurentPoly::xi(&fq);
        f.add_term(0, unknown);
        match gauss_val(&f, (&rat!(0), &rat!(1))) {
            Err(CoreError::InsufficientPrecision(_)) => {}
            other => panic!("expected precision error, got {other:?}"),
        }
    }

    #[test]
    fn fractional_valuation_roots_weighted() {
        // xi^2 - pi over F_3, e = 1: face of slope 1/2, two conjugate zeros
        let fq = Fq::new(3).unwrap();
        let f = LaurentPoly::from_terms(
            &fq,
            [(2, FieldElem::one(&fq)), (0, pi(&fq, rat!(1)).neg())],
        );
        assert_eq!(count_zeros(&f, (&rat!(0), &rat!(1))).unwrap(), 2);
        let chk = ktheory_check(&f, (&rat!(0), &rat!(1))).unwrap();
        assert!(chk.ok);
    }
}
