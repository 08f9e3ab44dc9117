//! Oracle tests for the conductor engine against closed forms: envelope
//! oracles for Swan functions, the reduction coset, the Lütkebohmert slope
//! identity, and the subgroup pairing battery.

use std::sync::Arc;

use conductor_core::annulus::gauss_val;
use conductor_core::covers::{as_reduce, wp_operator, CoverSpec};
use conductor_core::field::FieldElem;
use conductor_core::fq::{Fq, FqElem};
use conductor_core::groups::ClassFun;
use conductor_core::laurent::LaurentPoly;
use conductor_core::plfun::PLFun;
use conductor_core::ramify::{artin_classfun, discriminant_fun, phi_s, swan_as, verify_theorem};
use conductor_core::rat::Rat;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn pi_pow(fq: &Arc<Fq>, e: Rat) -> FieldElem {
    FieldElem::monomial(fq, FqElem::one(fq), e)
}

fn xi_pow(fq: &Arc<Fq>, k: i64) -> LaurentPoly {
    LaurentPoly::monomial(fq, FieldElem::one(fq), k)
}

/// Envelope oracle: sw of an AS character is max over reduced monomials of
/// -(v(a_j) + j t), computed here directly from the reduced function's terms
/// rather than through the conductor machinery.
fn envelope_oracle(g_red: &LaurentPoly, interval: (&Rat, &Rat)) -> PLFun {
    let zero = PLFun::constant(interval.0.clone(), interval.1.clone(), Rat::zero());
    if g_red.is_zero() {
        return zero;
    }
    let mut acc = zero;
    for (&j, c) in g_red.terms() {
        let v = c.valuation().known().unwrap();
        let line = PLFun::affine(
            interval.0.clone(),
            interval.1.clone(),
            Rat::int(-j),
            -v,
        );
        acc = acc.max(&line).unwrap();
    }
    acc
}

#[test]
fn break_law_grid_exact() {
    // sw = n t for g = xi^-n across p in {2, 3, 5}, n in {1, 2, 3, 7}
    let interval = (rat(1, 10), rat(3, 1));
    for p in [2u64, 3, 5] {
        let fq = Fq::new(p).unwrap();
        for n in [1i64, 2, 3, 7] {
            if n % p as i64 == 0 {
                continue;
            }
            let cover =
                CoverSpec::artin_schreier(&fq, xi_pow(&fq, -n), interval.clone(), 64).unwrap();
            let expected = PLFun::affine(interval.0.clone(), interval.1.clone(), Rat::int(n), Rat::zero());
            for chi in cover.group.characters().iter().skip(1) {
                let sw = swan_as(&cover, chi).unwrap();
                assert_eq!(sw, expected, "p = {p}, n = {n}");
            }
        }
    }
}

#[test]
fn reduction_preserves_swan_function() {
    // g = xi^-4 + xi^-3 over F_2: the reduced representative must give the
    // same Swan function as the envelope oracle applied to the reduction, and
    // the reduction witness must certify the coset
    let fq = Fq::new(2).unwrap();
    let g = xi_pow(&fq, -4).add(&xi_pow(&fq, -3));
    let interval = (rat(1, 10), rat(3, 1));
    let cover = CoverSpec::artin_schreier(&fq, g.clone(), interval.clone(), 64).unwrap();
    let (g_red, witness, dropped) = as_reduce(&g, 64).unwrap();
    assert!(dropped.is_exact_zero());
    assert!(g_red
        .add(&wp_operator(&witness))
        .sub(&g)
        .is_zero());
    let oracle = envelope_oracle(&g_red, (&interval.0, &interval.1));
    let chi = &cover.group.characters()[1];
    let sw = swan_as(&cover, chi).unwrap();
    assert_eq!(sw, oracle);
    // as_reduce is idempotent
    let (again, w2, _) = as_reduce(&g_red, 64).unwrap();
    assert!(again.sub(&g_red).is_zero());
    assert!(w2.is_zero());
}

#[test]
fn two_monomial_envelope() {
    // g = xi^-1 + pi^2 xi^-3, p = 2: sw = max(t, 3t - 2) on [0, 2]
    let fq = Fq::new(2).unwrap();
    let g = xi_pow(&fq, -1).add(&LaurentPoly::monomial(&fq, pi_pow(&fq, rat(2, 1)), -3));
    let cover = CoverSpec::artin_schreier(&fq, g.clone(), (rat(0, 1), rat(2, 1)), 64).unwrap();
    let chi = &cover.group.characters()[1];
    let sw = swan_as(&cover, chi).unwrap();
    let (g_red, _, _) = as_reduce(&g, 64).unwrap();
    let oracle = envelope_oracle(&g_red, (&rat(0, 1), &rat(2, 1)));
    assert_eq!(sw, oracle);
    assert_eq!(sw.breakpoints, vec![rat(0, 1), rat(1, 1), rat(2, 1)]);
    // phi jumps from 1 to 3
    assert_eq!(phi_s(&cover, chi, &rat(1, 2)).unwrap(), rat(1, 1));
    assert_eq!(phi_s(&cover, chi, &rat(7, 4)).unwrap(), rat(3, 1));
}

#[test]
fn lutkebohmert_slope_identity() {
    // For several covers: the slope of the discriminant on each piece equals
    // sigma - deg + delta computed by decompose()
    let f3 = Fq::new(3).unwrap();
    let f2 = Fq::new(2).unwrap();
    let covers: Vec<CoverSpec> = vec![
        CoverSpec::kummer(&Fq::new(7).unwrap(), 3, LaurentPoly::xi(&Fq::new(7).unwrap()), (rat(0, 1), rat(2, 1)), 64).unwrap(),
        CoverSpec::artin_schreier(&f3, xi_pow(&f3, -2), (rat(1, 10), rat(3, 1)), 64).unwrap(),
        CoverSpec::artin_schreier(
            &f2,
            xi_pow(&f2, -1).add(&LaurentPoly::monomial(&f2, pi_pow(&f2, rat(2, 1)), -3)),
            (rat(0, 1), rat(2, 1)),
            64,
        )
        .unwrap(),
        CoverSpec::compositum(&f3, 2, LaurentPoly::xi(&f3), xi_pow(&f3, -1), (rat(1, 4), rat(2, 1)), 64).unwrap(),
    ];
    for cover in &covers {
        let disc = discriminant_fun(cover).unwrap();
        for piece in cover.decompose().unwrap() {
            let mid = &(&piece.interval.0 + &piece.interval.1) / &Rat::int(2);
            let slope = disc.right_deriv(&mid).unwrap();
            let lutke = piece.sigma() - cover.degree() as i64 + piece.delta_f as i64;
            assert_eq!(slope, Rat::int(lutke));
        }
    }
}

#[test]
fn subgroup_pairing_battery() {
    // For every subgroup H: t -> <a_f(t), Q[G/H]> is continuous, convex, PL
    // with integer slopes, and equals the quotient-cover discriminant
    let fq = Fq::new(3).unwrap();
    let cover = CoverSpec::compositum(
        &fq,
        2,
        LaurentPoly::xi(&fq),
        xi_pow(&fq, -1).add(&LaurentPoly::monomial(&fq, pi_pow(&fq, rat(3, 1)), -5)),
        (rat(1, 4), rat(5, 2)),
        64,
    )
    .unwrap();
    for h in cover.group.subgroups() {
        let perm = cover.group.permutation_character(&h);
        let quotient = cover.quotient(&h).unwrap();
        let dq = discriminant_fun(&quotient).unwrap();
        // pointwise agreement at 7 radii per piece
        for piece in cover.decompose().unwrap() {
            for t in conductor_samples(&piece.interval.0, &piece.interval.1) {
                let lhs = artin_classfun(&cover, &t).unwrap().pairing_rat(&perm).unwrap();
                assert_eq!(lhs, dq.eval(&t).unwrap(), "subgroup order {}", h.order());
            }
        }
        assert!(dq.is_convex());
        assert!(dq.has_integer_slopes());
    }
}

fn conductor_samples(a: &Rat, b: &Rat) -> Vec<Rat> {
    let w = b - a;
    (1..=7)
        .map(|k| a + &(&w * &Rat::new(k, 8)))
        .collect()
}

#[test]
fn trivial_character_trivial_cover() {
    let fq = Fq::new(5).unwrap();
    let cover = CoverSpec::artin_schreier(&fq, xi_pow(&fq, -2), (rat(1, 10), rat(3, 1)), 64).unwrap();
    let trivial = cover.group.trivial_character();
    let sw = swan_as(&cover, &trivial).unwrap();
    assert!(sw.eval(&rat(1, 1)).unwrap().is_zero());
    assert_eq!(phi_s(&cover, &trivial, &rat(1, 2)).unwrap(), rat(0, 1));

    // identity cover: zero Artin class function
    let id = CoverSpec::kummer(&fq, 1, LaurentPoly::xi(&fq), (rat(0, 1), rat(1, 1)), 64).unwrap();
    let a = artin_classfun(&id, &rat(1, 2)).unwrap();
    assert!(a.is_zero());
}

#[test]
fn theorem_battery_three_monomials() {
    // g = xi^-1 + pi xi^-2 + pi^5 xi^-4 over F_3: the -2 exponent survives,
    // the -4 one too (not divisible by 3); breaks at envelope crossings
    let fq = Fq::new(3).unwrap();
    let g = xi_pow(&fq, -1)
        .add(&LaurentPoly::monomial(&fq, pi_pow(&fq, rat(1, 1)), -2))
        .add(&LaurentPoly::monomial(&fq, pi_pow(&fq, rat(5, 1)), -4));
    let cover = CoverSpec::artin_schreier(&fq, g.clone(), (rat(0, 1), rat(3, 1)), 64).unwrap();
    for chi in cover.group.characters().iter().skip(1) {
        let rep = verify_theorem(&cover, chi, 5).unwrap();
        assert!(rep.all_pass());
        let (g_red, _, _) = as_reduce(&g, 64).unwrap();
        let oracle = envelope_oracle(&g_red, (&rat(0, 1), &rat(3, 1)));
        assert_eq!(rep.sw_fun, oracle);
    }
}

#[test]
fn compositum_verify_battery() {
    let fq = Fq::new(4).unwrap();
    // y^3 = xi over F_4 (3 | q - 1), z^2 - z = xi^-1 + pi^2 xi^-3
    let g = xi_pow(&fq, -1).add(&LaurentPoly::monomial(&fq, pi_pow(&fq, rat(2, 1)), -3));
    let cover = CoverSpec::compositum(&fq, 3, LaurentPoly::xi(&fq), g, (rat(0, 1), rat(2, 1)), 64).unwrap();
    for chi in cover.group.characters() {
        let rep = verify_theorem(&cover, &chi, 5).unwrap();
        assert!(rep.all_pass());
    }
}

#[test]
fn four_monomial_ladder() {
    // g = xi^-1 + pi^2 xi^-3 + pi^6 xi^-5 + pi^12 xi^-7 over F_2:
    // sw = max(t, 3t-2, 5t-6, 7t-12) with breaks at t = 1, 2, 3
    let fq = Fq::new(2).unwrap();
    let g = xi_pow(&fq, -1)
        .add(&LaurentPoly::monomial(&fq, pi_pow(&fq, rat(2, 1)), -3))
        .add(&LaurentPoly::monomial(&fq, pi_pow(&fq, rat(6, 1)), -5))
        .add(&LaurentPoly::monomial(&fq, pi_pow(&fq, rat(12, 1)), -7));
    let cover = CoverSpec::artin_schreier(&fq, g.clone(), (rat(0, 1), rat(4, 1)), 64).unwrap();
    assert_eq!(
        cover.critical_radii().unwrap(),
        vec![rat(1, 1), rat(2, 1), rat(3, 1)]
    );
    let chi = &cover.group.characters()[1];
    let rep = verify_theorem(&cover, chi, 5).unwrap();
    assert!(rep.all_pass());
    let slopes: Vec<Rat> = rep.sw_fun.slopes().into_iter().map(|(_, s)| s).collect();
    assert_eq!(slopes, vec![rat(1, 1), rat(3, 1), rat(5, 1), rat(7, 1)]);
    let oracle = envelope_oracle(&g, (&rat(0, 1), &rat(4, 1)));
    assert_eq!(rep.sw_fun, oracle);
    // the full-interval ledger telescopes across all three breaks
    assert_eq!(rep.ledger.rhs, -6);
}

#[test]
fn kummer_negative_achiever() {
    // y^2 = xi^-3 over F_5: connected (gcd(2, 3) = 1), tame, zero conductors
    let fq = Fq::new(5).unwrap();
    let cover = CoverSpec::kummer(&fq, 2, xi_pow(&fq, -3), (rat(0, 1), rat(2, 1)), 64).unwrap();
    assert!(cover.critical_radii().unwrap().is_empty());
    let pieces = cover.decompose().unwrap();
    assert_eq!(pieces[0].delta_f, 1);
    assert_eq!(pieces[0].components[0].order, 2);
    assert_eq!(pieces[0].sigma(), 1);
    let disc = discriminant_fun(&cover).unwrap();
    assert!(disc.eval(&rat(1, 1)).unwrap().is_zero());
}

#[test]
fn larger_compositum_group() {
    // y^4 = xi and z^3 - z = xi^-2 over F_9: group Z/4 x Z/3, six subgroups
    let fq = Fq::new(9).unwrap();
    let cover = CoverSpec::compositum(
        &fq,
        4,
        LaurentPoly::xi(&fq),
        xi_pow(&fq, -2),
        (rat(1, 4), rat(2, 1)),
        64,
    )
    .unwrap();
    assert_eq!(cover.group.subgroups().len(), 6);
    let chars = cover.group.characters();
    // wild characters (nontrivial on the Z/3 factor) carry sw = 2t
    for (i, chi) in chars.iter().enumerate() {
        let sw = swan_as(&cover, chi).unwrap();
        let expect = if i % 3 == 0 { rat(0, 1) } else { rat(2, 1) };
        assert_eq!(sw.eval(&rat(1, 1)).unwrap(), expect, "char {i}");
    }
    // discriminant = sum of all character Swan functions
    let disc = discriminant_fun(&cover).unwrap();
    assert_eq!(disc.eval(&rat(1, 1)).unwrap(), rat(16, 1)); // 8 wild chars * 2
}

#[test]
fn nonprime_field_coefficients_in_fierce_path() {
    // coefficient g (a generator of F_4) on xi^-1: the break is still t
    let fq = Fq::new(4).unwrap();
    let coeff = FieldElem::monomial(&fq, conductor_core::fq::FqElem::generator(&fq), rat(0, 1));
    let g = LaurentPoly::monomial(&fq, coeff, -1);
    let cover = CoverSpec::artin_schreier(&fq, g, (rat(1, 10), rat(3, 1)), 64).unwrap();
    let chi = &cover.group.characters()[1];
    let sw = swan_as(&cover, chi).unwrap();
    assert_eq!(sw.eval(&rat(2, 1)).unwrap(), rat(2, 1));
}

#[test]
fn fierce_split_kummer_is_refused_not_mangled() {
    // y^2 = xi + pi splits past t = 1; with a fierce Artin-Schreier part the
    // class-function route must refuse with a domain error on that piece and
    // still answer on the connected piece
    let fq = Fq::new(3).unwrap();
    let u = LaurentPoly::xi(&fq).add(&LaurentPoly::monomial(&fq, pi_pow(&fq, rat(1, 1)), 0));
    let cover =
        CoverSpec::compositum(&fq, 2, u, xi_pow(&fq, -1), (rat(0, 1), rat(2, 1)), 64).unwrap();
    // gamma = 1 on (0, 1): fine
    assert!(artin_classfun(&cover, &rat(1, 2)).is_ok());
    // gamma = 2 on (1, 2): refused
    assert!(artin_classfun(&cover, &rat(3, 2)).is_err());
    // geometry still fully available
    let pieces = cover.decompose().unwrap();
    assert_eq!(pieces.len(), 2);
    assert_eq!(pieces[1].delta_f, 2);
}

#[test]
fn sums_of_characters_are_supported() {
    let fq = Fq::new(2).unwrap();
    let cover = CoverSpec::artin_schreier(&fq, xi_pow(&fq, -3), (rat(1, 10), rat(3, 1)), 64).unwrap();
    let chars = cover.group.characters();
    let rho: ClassFun = chars[0].add(&chars[1]).unwrap();
    let sw = swan_as(&cover, &rho).unwrap();
    // sw(triv + chi) = 0 + 3t
    assert_eq!(sw.eval(&rat(1, 1)).unwrap(), rat(3, 1));
    // the regular character gives the discriminant
    let disc = discriminant_fun(&cover).unwrap();
    let sw_reg = swan_as(&cover, &cover.group.regular_character()).unwrap();
    assert_eq!(sw_reg, disc);
}
