//! Exact computation of ramification invariants for finite covers of
//! rigid-analytic annuli over an equal-characteristic local field.
//!
//! The base field is `F_q((pi^(1/e)))` with the valuation normalized by
//! `v(pi) = 1`. A closed annulus is the locus `r <= v(xi) <= r'`; for a
//! rational radius `t` in that interval, the Gauss valuation
//! `v_t(sum a_i xi^i) = min_i (v(a_i) + i t)` is the exact piecewise-linear
//! lower envelope of one affine line per monomial.
//!
//! On top of that valuation theory the crate computes, for Kummer,
//! Artin-Schreier, compositum and monic covers of an annulus: critical radii
//! and the per-piece decomposition data (component orders and derivative
//! orders), boundary valuation pairs and zero counts, Artin and Swan class
//! functions on the Galois group with exact cyclotomic values, the
//! discriminant function, and the Swan conductor function of every character
//! together with its local slope invariant. A verification battery checks
//! continuity, convexity, integer slopes, slope-difference and concatenation
//! identities, and the per-piece slope formula `sigma - d + delta`.
//!
//! Everything is exact: rationals are arbitrary-precision fractions, residue
//! computations happen in `F_q`, character values in cyclotomic fields, and
//! truncated series carry explicit precision caps that surface as errors
//! instead of silently degrading.

pub mod error;
pub mod fq;
pub mod rat;
pub mod field;
pub mod plfun;
pub mod residue;
pub mod laurent;
pub mod annulus;
pub mod cyclotomic;
pub mod groups;
pub mod covers;
pub mod ramify;
