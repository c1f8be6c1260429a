//! Scalar abstraction: directed arithmetic over floats and exact rationals.
//!
//! Every interval operation in this library reduces to the directed scalar
//! ops defined here. For floats the `*_down` / `*_up` variants are correctly
//! rounded: they compute the round-to-nearest result together with its exact
//! error term (TwoSum for sums, an FMA residual for products and quotients)
//! and step one ulp outward only when the rounded result lies on the wrong
//! side of the true value. Exact results therefore stay exact, which the rest
//! of the library relies on (affine maps with dyadic coefficients evaluate
//! without any widening). In the subnormal range the residual tests lose
//! their exactness guarantee, so there the ops inflate unconditionally.
//!
//! `BigRational` implements the same trait with every operation exact; it is
//! the lane used when certificates must hold with no rounding slack at all.
//! Trigonometric enclosures exist only for the float lanes and report
//! themselves as unavailable on rationals.

use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Rounding direction for conversions and renderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

/// Scalar endpoint type: cloneable, totally ordered on its valid values,
/// with directed arithmetic.
///
/// `add_down(a, b) <= a + b <= add_up(a, b)` holds exactly (in the reals),
/// and likewise for `sub`, `mul`, `div`. Implementations where arithmetic is
/// exact set [`Scalar::EXACT`] and collapse both directions.
pub trait Scalar:
    Clone + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Whether arithmetic on this type is exact (no rounding at all).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    /// Closest representable value to `num/den` (exact where possible).
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact embedding of a finite f64 where the type allows it, otherwise
    /// the closest representable value.
    fn from_f64(x: f64) -> Self;
    /// Parse a decimal literal (optionally with exponent). Exact types parse
    /// exactly; floats round to nearest.
    fn from_decimal(text: &str) -> Option<Self>;

    /// False only for non-finite floats; exact types are always finite.
    fn is_finite_value(&self) -> bool;
    fn is_zero_value(&self) -> bool {
        *self == Self::zero()
    }

    fn neg(&self) -> Self;
    fn abs(&self) -> Self;

    fn add_down(&self, rhs: &Self) -> Self;
    fn add_up(&self, rhs: &Self) -> Self;
    fn sub_down(&self, rhs: &Self) -> Self;
    fn sub_up(&self, rhs: &Self) -> Self;
    fn mul_down(&self, rhs: &Self) -> Self;
    fn mul_up(&self, rhs: &Self) -> Self;
    /// Directed quotient; `rhs` must be nonzero.
    fn div_down(&self, rhs: &Self) -> Self;
    fn div_up(&self, rhs: &Self) -> Self;

    /// Round-to-nearest arithmetic for point (non-enclosure) evaluation.
    fn add_near(&self, rhs: &Self) -> Self;
    fn sub_near(&self, rhs: &Self) -> Self;
    fn mul_near(&self, rhs: &Self) -> Self;
    fn div_near(&self, rhs: &Self) -> Self;

    /// A value in `[min(a,b), max(a,b)]`, as central as the type allows.
    fn midpoint(&self, rhs: &Self) -> Self;

    /// Directed conversion to f64 (used for reporting and diagnostics).
    fn approx_f64(&self, dir: Round) -> f64;

    /// Exact conversion into a rational. Every valid scalar value here is a
    /// rational number (floats are dyadic), so this is lossless.
    fn to_rational(&self) -> BigRational;

    /// Enclosure of `{sin x : lo <= x <= hi}`; `None` if the type has no
    /// rigorous trig support.
    fn sin_enclosure(lo: &Self, hi: &Self) -> Option<(Self, Self)>;
    /// Enclosure of `{cos x : lo <= x <= hi}`.
    fn cos_enclosure(lo: &Self, hi: &Self) -> Option<(Self, Self)>;
    /// Round-to-nearest sine for point evaluation.
    fn sin_near(&self) -> Option<Self>;
    fn cos_near(&self) -> Option<Self>;
    /// Bracket `pi_lo <= pi <= pi_hi`, two ulps wide for floats (one
    /// neighbour either side of the rounded constant, whichever way the
    /// constant happens to round).
    fn pi_bracket() -> Option<(Self, Self)>;
    /// Round-to-nearest pi for point evaluation.
    fn pi_near() -> Option<Self>;
}

/// Float machinery shared by the f32 and f64 implementations.
trait FloatKernel: Float + FloatConst + FromPrimitive + fmt::Display + fmt::Debug {
    fn next_up_k(self) -> Self;
    fn next_down_k(self) -> Self;
    fn min_normal() -> Self {
        Self::min_positive_value()
    }
}

impl FloatKernel for f64 {
    fn next_up_k(self) -> Self {
        self.next_up()
    }
    fn next_down_k(self) -> Self {
        self.next_down()
    }
}

impl FloatKernel for f32 {
    fn next_up_k(self) -> Self {
        self.next_up()
    }
    fn next_down_k(self) -> Self {
        self.next_down()
    }
}

/// Saturate an overflowed round-to-nearest result so the stated direction
/// stays sound: a sum that rounds to +inf certainly exceeds the largest
/// finite value, so max_value is a valid lower bound and +inf the (useless
/// but sound) upper bound. Interval construction rejects non-finite
/// endpoints, so the infinity surfaces as an error rather than a bound.
fn saturate<F: FloatKernel>(rounded: F, dir: Round) -> F {
    match dir {
        Round::Down => {
            if rounded == F::infinity() {
                F::max_value()
            } else {
                rounded
            }
        }
        Round::Up => {
            if rounded == F::neg_infinity() {
                -F::max_value()
            } else {
                rounded
            }
        }
    }
}

/// TwoSum: rounded sum plus the sign of its exact error. Exact for all
/// finite inputs (sums never round in the subnormal range).
fn f_add<F: FloatKernel>(a: F, b: F, dir: Round) -> F {
    let s = a + b;
    if !s.is_finite() {
        return saturate(s, dir);
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    match dir {
        Round::Down => {
            if err < F::zero() {
                s.next_down_k()
            } else {
                s
            }
        }
        Round::Up => {
            if err > F::zero() {
                s.next_up_k()
            } else {
                s
            }
        }
    }
}

/// Magnitude floor below which FMA residuals of products and quotients are
/// no longer guaranteed exact: the residual of a product near magnitude `m`
/// is a multiple of roughly `m * eps^2`, which must stay representable
/// (at least the smallest subnormal). `min_normal / eps^2` leaves that much
/// headroom with a comfortable margin; below it the rounded result is
/// widened by one neighbour unconditionally, which is always sound for a
/// round-to-nearest result.
fn residual_floor<F: FloatKernel>() -> F {
    F::min_normal() / (F::epsilon() * F::epsilon())
}

/// Directed product via the FMA residual `a*b - p`, which is exact while
/// `p` stays well above the subnormal band. Near and inside that band the
/// residual may itself round (possibly to zero, losing its sign), so the
/// result is widened unconditionally there.
fn f_mul<F: FloatKernel>(a: F, b: F, dir: Round) -> F {
    let p = a * b;
    if !p.is_finite() {
        return saturate(p, dir);
    }
    if a == F::zero() || b == F::zero() {
        return F::zero();
    }
    if p.abs() < residual_floor::<F>() {
        return match dir {
            Round::Down => p.next_down_k(),
            Round::Up => p.next_up_k(),
        };
    }
    let err = a.mul_add(b, -p);
    match dir {
        Round::Down => {
            if err < F::zero() {
                p.next_down_k()
            } else {
                p
            }
        }
        Round::Up => {
            if err > F::zero() {
                p.next_up_k()
            } else {
                p
            }
        }
    }
}

/// Directed quotient. The residual `q*b - a` of a correctly rounded
/// division is exactly representable while both `q` and the product
/// `q*b` (whose magnitude is that of `a`) stay well above the subnormal
/// band, and its sign decides which neighbour of `q` bounds the true
/// quotient. Otherwise widen unconditionally.
fn f_div<F: FloatKernel>(a: F, b: F, dir: Round) -> F {
    debug_assert!(b != F::zero());
    let q = a / b;
    if !q.is_finite() {
        return saturate(q, dir);
    }
    if a == F::zero() {
        return F::zero();
    }
    if q.abs() < residual_floor::<F>() || a.abs() < residual_floor::<F>() {
        return match dir {
            Round::Down => q.next_down_k(),
            Round::Up => q.next_up_k(),
        };
    }
    let residual = q.mul_add(b, -a);
    if residual == F::zero() {
        return q;
    }
    let q_too_high = (residual > F::zero()) == (b > F::zero());
    match (q_too_high, dir) {
        (true, Round::Down) => q.next_down_k(),
        (false, Round::Up) => q.next_up_k(),
        _ => q,
    }
}

fn f_midpoint<F: FloatKernel>(a: F, b: F) -> F {
    let half = F::from_f64(0.5).unwrap();
    let m = (a + b) * half;
    if m.is_finite() {
        m
    } else {
        a * half + b * half
    }
}

/// One-ulp outward enclosure of a libm point evaluation. The standard
/// library's sin/cos are assumed faithful (within one ulp of the true
/// value), so widening by one ulp each way yields a rigorous bracket.
fn libm_enclosure<F: FloatKernel>(v: F) -> (F, F) {
    (v.next_down_k(), v.next_up_k())
}

/// Range enclosure of sin or cos over `[lo, hi]`.
///
/// Reduces by an integer multiple of an outward 2*pi bracket (the shift set
/// covers the true translated interval; periodicity makes the range over the
/// cover a superset of the range over the input), evaluates both reduced
/// endpoints with a one-ulp libm bracket, admits -1/+1 for every extremum
/// whose pi/2-multiple bracket meets the reduced interval, and clamps to
/// [-1, 1].
fn trig_range<F: FloatKernel>(lo: F, hi: F, is_sin: bool) -> (F, F) {
    debug_assert!(lo <= hi && lo.is_finite() && hi.is_finite());
    let one = F::one();
    let two = one + one;
    let pi_lo = F::PI().next_down_k();
    let pi_hi = F::PI().next_up_k();
    let two_pi_hi = pi_hi * two;

    // Spans at least one full period: range is exactly [-1, 1].
    if f_add(hi, -lo, Round::Down) >= two_pi_hi {
        return (-one, one);
    }

    let k = (lo / (F::PI() * two)).floor();
    let two_pi_lo = pi_lo * two;
    let (kt_lo, kt_hi) = if k >= F::zero() {
        (f_mul(k, two_pi_lo, Round::Down), f_mul(k, two_pi_hi, Round::Up))
    } else {
        (f_mul(k, two_pi_hi, Round::Down), f_mul(k, two_pi_lo, Round::Up))
    };
    let r_lo = f_add(lo, -kt_hi, Round::Down);
    let r_hi = f_add(hi, -kt_lo, Round::Up);

    let (e_lo, e_hi) = if is_sin {
        libm_enclosure(r_lo.sin())
    } else {
        libm_enclosure(r_lo.cos())
    };
    let (f_lo, f_hi) = if is_sin {
        libm_enclosure(r_hi.sin())
    } else {
        libm_enclosure(r_hi.cos())
    };
    let mut out_lo = e_lo.min(f_lo);
    let mut out_hi = e_hi.max(f_hi);

    // Extrema sit at multiples of pi/2: even multiples for cos, odd for sin.
    let half_pi_lo = pi_lo * F::from_f64(0.5).unwrap();
    let half_pi_hi = pi_hi * F::from_f64(0.5).unwrap();
    let m_min = (r_lo / F::FRAC_PI_2()).floor().to_i64().unwrap_or(0) - 1;
    let m_max = (r_hi / F::FRAC_PI_2()).ceil().to_i64().unwrap_or(0) + 1;
    if m_max - m_min <= 64 {
        for m in m_min..=m_max {
            let relevant = if is_sin { m.rem_euclid(2) == 1 } else { m.rem_euclid(2) == 0 };
            if !relevant {
                continue;
            }
            let mf = F::from_i64(m).unwrap();
            let (c_lo, c_hi) = if m >= 0 {
                (f_mul(mf, half_pi_lo, Round::Down), f_mul(mf, half_pi_hi, Round::Up))
            } else {
                (f_mul(mf, half_pi_hi, Round::Down), f_mul(mf, half_pi_lo, Round::Up))
            };
            if c_hi < r_lo || c_lo > r_hi {
                continue;
            }
            let peak_positive = if is_sin { m.rem_euclid(4) == 1 } else { m.rem_euclid(4) == 0 };
            if peak_positive {
                out_hi = one;
            } else {
                out_lo = -one;
            }
        }
    } else {
        return (-one, one);
    }

    (out_lo.max(-one), out_hi.min(one))
}

macro_rules! impl_scalar_float {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn zero() -> Self {
                0.0
            }
            fn one() -> Self {
                1.0
            }
            fn from_int(n: i64) -> Self {
                n as $t
            }
            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn from_decimal(text: &str) -> Option<Self> {
                text.parse::<$t>().ok().filter(|v| v.is_finite())
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn neg(&self) -> Self {
                -self
            }
            fn abs(&self) -> Self {
                (*self).abs()
            }

            fn add_down(&self, rhs: &Self) -> Self {
                f_add(*self, *rhs, Round::Down)
            }
            fn add_up(&self, rhs: &Self) -> Self {
                f_add(*self, *rhs, Round::Up)
            }
            fn sub_down(&self, rhs: &Self) -> Self {
                f_add(*self, -*rhs, Round::Down)
            }
            fn sub_up(&self, rhs: &Self) -> Self {
                f_add(*self, -*rhs, Round::Up)
            }
            fn mul_down(&self, rhs: &Self) -> Self {
                f_mul(*self, *rhs, Round::Down)
            }
            fn mul_up(&self, rhs: &Self) -> Self {
                f_mul(*self, *rhs, Round::Up)
            }
            fn div_down(&self, rhs: &Self) -> Self {
                f_div(*self, *rhs, Round::Down)
            }
            fn div_up(&self, rhs: &Self) -> Self {
                f_div(*self, *rhs, Round::Up)
            }

            fn add_near(&self, rhs: &Self) -> Self {
                self + rhs
            }
            fn sub_near(&self, rhs: &Self) -> Self {
                self - rhs
            }
            fn mul_near(&self, rhs: &Self) -> Self {
                self * rhs
            }
            fn div_near(&self, rhs: &Self) -> Self {
                self / rhs
            }

            fn midpoint(&self, rhs: &Self) -> Self {
                f_midpoint(*self, *rhs)
            }

            fn approx_f64(&self, _dir: Round) -> f64 {
                // f32 -> f64 widening is exact, f64 is the identity.
                *self as f64
            }

            fn to_rational(&self) -> BigRational {
                rational_from_f64(*self as f64).expect("finite by construction")
            }

            fn sin_enclosure(lo: &Self, hi: &Self) -> Option<(Self, Self)> {
                Some(trig_range(*lo, *hi, true))
            }
            fn cos_enclosure(lo: &Self, hi: &Self) -> Option<(Self, Self)> {
                Some(trig_range(*lo, *hi, false))
            }
            fn sin_near(&self) -> Option<Self> {
                Some((*self).sin())
            }
            fn cos_near(&self) -> Option<Self> {
                Some((*self).cos())
            }
            fn pi_bracket() -> Option<(Self, Self)> {
                let pi = <$t>::PI();
                Some((pi.next_down(), pi.next_up()))
            }
            fn pi_near() -> Option<Self> {
                Some(<$t>::PI())
            }
        }
    };
}

impl_scalar_float!(f64);
impl_scalar_float!(f32);

/// Exact conversion of a finite f64 into a rational (every finite float is
/// a dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    <BigRational as FromPrimitive>::from_f64(x)
}

/// Directed rational-to-f64: start from a nearby float and walk ulps until
/// the exact comparison lands on the requested side, then tighten one step.
fn rational_to_f64(r: &BigRational, dir: Round) -> f64 {
    let approx = r.to_f64().unwrap_or(0.0);
    let mut x = if approx.is_finite() {
        approx
    } else if approx > 0.0 {
        f64::MAX
    } else {
        f64::MIN
    };
    let cmp = |v: f64| -> std::cmp::Ordering {
        match rational_from_f64(v) {
            Some(q) => q.partial_cmp(r).unwrap(),
            // Walked off the finite range: treat infinities as outer bounds.
            None => {
                if v > 0.0 {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Less
                }
            }
        }
    };
    match dir {
        Round::Down => {
            while cmp(x) == std::cmp::Ordering::Greater {
                x = x.next_down();
            }
            loop {
                let y = x.next_up();
                if y.is_finite() && cmp(y) != std::cmp::Ordering::Greater {
                    x = y;
                } else {
                    break;
                }
            }
        }
        Round::Up => {
            while cmp(x) == std::cmp::Ordering::Less {
                x = x.next_up();
            }
            loop {
                let y = x.next_down();
                if y.is_finite() && cmp(y) != std::cmp::Ordering::Less {
                    x = y;
                } else {
                    break;
                }
            }
        }
    }
    x
}

/// Parse a decimal literal (sign, digits, optional fraction, optional
/// exponent) into an exact rational.
pub fn rational_from_decimal(text: &str) -> Option<BigRational> {
    use num_bigint::BigInt;
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    // Exact fraction syntax "p/q" is accepted as well.
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().ok()?;
        let den: BigInt = q.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (mantissa, neg) = match mantissa.strip_prefix('-') {
        Some(rest) => (rest, true),
        None => (mantissa.strip_prefix('+').unwrap_or(mantissa), false),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    if neg {
        num = -num;
    }
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let rational = if shift >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-shift) as usize))
    };
    Some(rational)
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn from_f64(x: f64) -> Self {
        rational_from_f64(x).expect("finite float embeds exactly")
    }
    fn from_decimal(text: &str) -> Option<Self> {
        rational_from_decimal(text)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn add_down(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn add_up(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_down(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn sub_up(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_down(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn mul_up(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_down(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn div_up(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn add_near(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_near(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_near(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_near(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn midpoint(&self, rhs: &Self) -> Self {
        (self + rhs) / BigRational::from_integer(2.into())
    }

    fn approx_f64(&self, dir: Round) -> f64 {
        rational_to_f64(self, dir)
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn sin_enclosure(_lo: &Self, _hi: &Self) -> Option<(Self, Self)> {
        None
    }
    fn cos_enclosure(_lo: &Self, _hi: &Self) -> Option<(Self, Self)> {
        None
    }
    fn sin_near(&self) -> Option<Self> {
        None
    }
    fn cos_near(&self) -> Option<Self> {
        None
    }
    fn pi_bracket() -> Option<(Self, Self)> {
        None
    }
    fn pi_near() -> Option<Self> {
        None
    }
}
