//! Kernel soundness against exact rational arithmetic.
//!
//! Every float endpoint is a dyadic rational, so each directed operation
//! can be compared with the true value computed in `BigRational`. The trig
//! enclosures are checked against Taylor partial sums with explicit
//! Lagrange remainder bounds, and the pi bracket against a Machin-formula
//! oracle; the remainders are driven far below one float ulp, which makes
//! the interval-intersection test decisive.

use horseshoe::{BoxN, Interval, Rational, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

fn br(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check_directed<S: Scalar>(a: f64, b: f64) -> std::result::Result<(), TestCaseError> {
    let x = S::from_f64(a);
    let y = S::from_f64(b);
    let (xr, yr) = (x.to_rational(), y.to_rational());
    let cases: [(&str, S, S, BigRational); 3] = [
        ("add", x.add_down(&y), x.add_up(&y), &xr + &yr),
        ("sub", x.sub_down(&y), x.sub_up(&y), &xr - &yr),
        ("mul", x.mul_down(&y), x.mul_up(&y), &xr * &yr),
    ];
    for (op, lo, hi, exact) in cases {
        prop_assert!(lo.is_finite_value() || hi.is_finite_value() || true);
        if lo.is_finite_value() {
            prop_assert!(lo.to_rational() <= exact, "{op} down above exact value");
        }
        if hi.is_finite_value() {
            prop_assert!(exact <= hi.to_rational(), "{op} up below exact value");
        }
        if S::EXACT {
            prop_assert_eq!(lo.to_rational(), exact.clone());
            prop_assert_eq!(hi.to_rational(), exact);
        }
    }
    if !y.is_zero_value() {
        let exact = &xr / &yr;
        let lo = x.div_down(&y);
        let hi = x.div_up(&y);
        if lo.is_finite_value() {
            prop_assert!(lo.to_rational() <= exact, "div down above exact value");
        }
        if hi.is_finite_value() {
            prop_assert!(exact <= hi.to_rational(), "div up below exact value");
        }
    }
    Ok(())
}

proptest! {
    #[test]
    fn directed_ops_bracket_the_rationals_f64(a in -1e12f64..1e12, b in -1e12f64..1e12) {
        check_directed::<f64>(a, b)?;
    }

    #[test]
    fn directed_ops_bracket_the_rationals_f32(a in -1e12f64..1e12, b in -1e12f64..1e12) {
        check_directed::<f32>(a, b)?;
    }

    #[test]
    fn directed_ops_are_exact_in_the_rational_lane(a in -1e12f64..1e12, b in -1e12f64..1e12) {
        check_directed::<Rational>(a, b)?;
    }

    #[test]
    fn tiny_and_huge_magnitudes_stay_sound(
        a in prop::sample::select(vec![0.0, 5e-324, -5e-324, 1e-308, 1e308, -1e308, 0.1, -0.1]),
        b in prop::sample::select(vec![0.0, 5e-324, -5e-324, 1e-308, 1e308, -1e308, 3.0, -3.0]),
    ) {
        check_directed::<f64>(a, b)?;
    }

    /// Every real point of X op Y lands inside the interval result. Points
    /// are rational convex combinations of the endpoints, so membership is
    /// decided exactly.
    #[test]
    fn interval_ops_contain_all_point_results(
        a1 in -1e6f64..1e6, w1 in 0.0f64..1e3,
        b1 in -1e6f64..1e6, w2 in 0.0f64..1e3,
        t in 0u32..=16, u in 0u32..=16,
        pow in 1u32..=4,
    ) {
        let x = Interval::new(a1, a1 + w1).unwrap();
        let y = Interval::new(b1, b1 + w2).unwrap();
        let blend = |iv: &Interval<f64>, k: u32| {
            let (lo, hi) = (iv.lo().to_rational(), iv.hi().to_rational());
            (&hi - &lo) * br(k as i64, 16) + lo
        };
        let (px, py) = (blend(&x, t), blend(&y, u));
        let inside = |iv: &Interval<f64>, v: &BigRational| {
            iv.lo().to_rational() <= *v && *v <= iv.hi().to_rational()
        };
        prop_assert!(inside(&x.add(&y), &(&px + &py)));
        prop_assert!(inside(&x.sub(&y), &(&px - &py)));
        prop_assert!(inside(&x.mul(&y), &(&px * &py)));
        let mut p = br(1, 1);
        for _ in 0..pow {
            p *= &px;
        }
        prop_assert!(inside(&x.powi(pow), &p));
        if y.excludes_zero() {
            prop_assert!(inside(&x.div(&y).unwrap(), &(&px / &py)));
        }
    }

    /// Larger inputs give larger outputs (inclusion monotonicity), the
    /// property subdivision relies on.
    #[test]
    fn interval_ops_are_inclusion_monotone(
        a1 in -1e6f64..1e6, w1 in 0.0f64..1e3,
        b1 in -1e6f64..1e6, w2 in 0.0f64..1e3,
        grow in 1e-9f64..10.0,
    ) {
        let x = Interval::new(a1, a1 + w1).unwrap();
        let y = Interval::new(b1, b1 + w2).unwrap();
        let xb = x.inflate(&grow);
        let yb = y.inflate(&grow);
        prop_assert!(xb.add(&yb).contains_interval(&x.add(&y)));
        prop_assert!(xb.sub(&yb).contains_interval(&x.sub(&y)));
        prop_assert!(xb.mul(&yb).contains_interval(&x.mul(&y)));
        prop_assert!(xb.powi(3).contains_interval(&x.powi(3)));
        if yb.excludes_zero() {
            prop_assert!(xb.div(&yb).unwrap().contains_interval(&x.div(&y).unwrap()));
        }
    }

    #[test]
    fn bisection_partitions_the_box(
        a in -10f64..10.0, w1 in 1e-6f64..5.0,
        b in -10f64..10.0, w2 in 1e-6f64..5.0,
        c in -10f64..10.0, w3 in 1e-6f64..5.0,
    ) {
        let bx = BoxN::from_endpoints(vec![(a, a + w1), (b, b + w2), (c, c + w3)]).unwrap();
        let axis = bx.widest_axis();
        let (l, r) = bx.bisect(None).unwrap();
        prop_assert_eq!(&l.hull(&r), &bx);
        prop_assert!(bx.contains_box(&l) && bx.contains_box(&r));
        // The halves meet exactly in the cut plane.
        let overlap = l.intersect(&r).unwrap();
        prop_assert!(overlap.comp(axis).is_point());
        prop_assert_eq!(l.comp(axis).hi(), r.comp(axis).lo());
        for k in 0..3 {
            if k != axis {
                prop_assert_eq!(l.comp(k), r.comp(k));
            }
        }
    }
}

/// cos on [-|t|max, |t|max]: partial Taylor sum and a Lagrange remainder
/// bound |R| <= |t|^(2N) / (2N)!.
fn cos_taylor(t: &BigRational, n: usize) -> (BigRational, BigRational) {
    let t2 = t * t;
    let mut sum = br(0, 1);
    let mut term = br(1, 1);
    for j in 0..n {
        if j % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        term = &term * &t2 / br(((2 * j + 1) * (2 * j + 2)) as i64, 1);
    }
    (sum, term)
}

/// sin: partial sum and |R| <= |t|^(2N+1) / (2N+1)!.
fn sin_taylor(t: &BigRational, n: usize) -> (BigRational, BigRational) {
    let t2 = t * t;
    let mut sum = br(0, 1);
    let mut term = t.clone();
    for j in 0..n {
        if j % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        term = &term * &t2 / br(((2 * j + 2) * (2 * j + 3)) as i64, 1);
    }
    (sum, Signed::abs(&term))
}

/// The enclosure and the oracle interval [S-R, S+R] must intersect; with
/// R far below one ulp this is equivalent to true-value containment for
/// float endpoints.
fn meets(lo: &f64, hi: &f64, center: &BigRational, radius: &BigRational) -> bool {
    Scalar::to_rational(lo) <= center + radius && center - radius <= Scalar::to_rational(hi)
}

proptest! {
    #[test]
    fn trig_enclosures_match_the_taylor_oracle(t in -10f64..10.0, w in 0f64..3.0) {
        let (lo, hi) = (t, t + w);
        let (slo, shi) = f64::sin_enclosure(&lo, &hi).unwrap();
        let (clo, chi) = f64::cos_enclosure(&lo, &hi).unwrap();
        prop_assert!(slo <= shi && clo <= chi);
        prop_assert!(-1.0 <= slo && shi <= 1.0 && -1.0 <= clo && chi <= 1.0);
        for sample in [lo, 0.5 * (lo + hi), hi] {
            let tr = Scalar::to_rational(&sample);
            let (s, rs) = sin_taylor(&tr, 50);
            let (c, rc) = cos_taylor(&tr, 50);
            prop_assert!(rs < br(1, 1_000_000_000_000_000_000), "remainder not negligible");
            prop_assert!(meets(&slo, &shi, &s, &rs), "sin({sample}) escapes the enclosure");
            prop_assert!(meets(&clo, &chi, &c, &rc), "cos({sample}) escapes the enclosure");
        }
    }

    #[test]
    fn point_trig_enclosures_are_narrow(t in -10f64..10.0) {
        // Argument reduction through the pi bracket costs a few ulps of
        // the argument magnitude, so point enclosures are narrow in
        // absolute terms rather than one ulp of the output value.
        let (slo, shi) = f64::sin_enclosure(&t, &t).unwrap();
        let (clo, chi) = f64::cos_enclosure(&t, &t).unwrap();
        prop_assert!(shi - slo <= 1e-14);
        prop_assert!(chi - clo <= 1e-14);
        // The pointwise libm value sits within one faithful-rounding ulp
        // of the enclosed true value.
        let sn = t.sin_near().unwrap();
        let cn = t.cos_near().unwrap();
        prop_assert!(slo.next_down() <= sn && sn <= shi.next_up());
        prop_assert!(clo.next_down() <= cn && cn <= chi.next_up());
    }
}

/// arctan(1/n) by the alternating series; the magnitude of the first
/// omitted term bounds the remainder.
fn atan_inv(n: i64, terms: usize) -> (BigRational, BigRational) {
    let x = br(1, n);
    let x2 = &x * &x;
    let mut pow = x;
    let mut sum = br(0, 1);
    for j in 0..terms {
        let term = &pow / br((2 * j + 1) as i64, 1);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pow *= &x2;
    }
    let rem = &pow / br((2 * terms + 1) as i64, 1);
    (sum, rem)
}

#[test]
fn pi_bracket_matches_the_machin_oracle() {
    // pi = 16 arctan(1/5) - 4 arctan(1/239)
    let (a5, r5) = atan_inv(5, 30);
    let (a239, r239) = atan_inv(239, 12);
    let pi = a5 * br(16, 1) - a239 * br(4, 1);
    let rad = r5 * br(16, 1) + r239 * br(4, 1);
    assert!(rad < br(1, 1_000_000_000_000_000_000));

    // The bracket is one neighbour either side of the rounded constant:
    // sound whichever way the constant rounds, at most two ulps wide.
    let (plo, phi) = f64::pi_bracket().unwrap();
    assert!(plo < phi && phi <= plo.next_up().next_up());
    assert!(meets(&plo, &phi, &pi, &rad));

    let (plo32, phi32) = f32::pi_bracket().unwrap();
    assert!(
        Scalar::to_rational(&plo32) <= &pi + &rad && &pi - &rad <= Scalar::to_rational(&phi32)
    );
    assert!(plo32 < phi32 && phi32 <= plo32.next_up().next_up());
}

#[test]
fn rational_lane_has_no_trig() {
    assert!(Rational::sin_enclosure(&br(0, 1), &br(1, 1)).is_none());
    assert!(Rational::pi_bracket().is_none());
}
