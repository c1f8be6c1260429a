//! Closed intervals and axis-aligned boxes with outward-rounded arithmetic.
//!
//! An [`Interval`] is a pair `lo <= hi` of finite scalars; a [`BoxN`] is a
//! product of intervals, one per axis. All arithmetic rounds outward through
//! the directed ops of [`Scalar`], so for every operation the set of true
//! results is contained in the returned interval. Degenerate (point)
//! intervals are valid; construction only rejects non-finite or inverted
//! endpoints.

use crate::error::{Error, Result};
use crate::scalar::{Round, Scalar};

/// Closed interval `[lo, hi]` with validated endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<S: Scalar> {
    lo: S,
    hi: S,
}

impl<S: Scalar> Interval<S> {
    /// Validated constructor: endpoints finite, `lo <= hi`.
    pub fn new(lo: S, hi: S) -> Result<Self> {
        if !lo.is_finite_value() || !hi.is_finite_value() {
            return Err(Error::NonFinite { context: "interval endpoint" });
        }
        if lo > hi {
            return Err(Error::Inverted);
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval `[v, v]`.
    pub fn point(v: S) -> Result<Self> {
        Self::new(v.clone(), v)
    }

    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    /// Upper bound on the true width `hi - lo`.
    pub fn width(&self) -> S {
        self.hi.sub_up(&self.lo)
    }

    pub fn midpoint(&self) -> S {
        self.lo.midpoint(&self.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &S) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed intervals intersect iff neither lies strictly beyond the other.
    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        if !self.intersects(other) {
            return None;
        }
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi <= other.hi { self.hi.clone() } else { other.hi.clone() };
        Some(Self { lo, hi })
    }

    pub fn hull(&self, other: &Self) -> Self {
        let lo = if self.lo <= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi >= other.hi { self.hi.clone() } else { other.hi.clone() };
        Self { lo, hi }
    }

    /// True iff the interval lies strictly on one side of zero.
    pub fn excludes_zero(&self) -> bool {
        let z = S::zero();
        self.hi < z || self.lo > z
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { lo: self.lo.add_down(&other.lo), hi: self.hi.add_up(&other.hi) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { lo: self.lo.sub_down(&other.hi), hi: self.hi.sub_up(&other.lo) }
    }

    pub fn neg(&self) -> Self {
        Self { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo = pairs[0].0.mul_down(pairs[0].1);
        let mut hi = pairs[0].0.mul_up(pairs[0].1);
        for (a, b) in &pairs[1..] {
            let d = a.mul_down(b);
            let u = a.mul_up(b);
            if d < lo {
                lo = d;
            }
            if u > hi {
                hi = u;
            }
        }
        Self { lo, hi }
    }

    /// Multiply by a point scalar.
    pub fn scale(&self, s: &S) -> Self {
        if *s >= S::zero() {
            Self { lo: self.lo.mul_down(s), hi: self.hi.mul_up(s) }
        } else {
            Self { lo: self.hi.mul_down(s), hi: self.lo.mul_up(s) }
        }
    }

    /// Translate by a point scalar.
    pub fn shift(&self, s: &S) -> Self {
        Self { lo: self.lo.add_down(s), hi: self.hi.add_up(s) }
    }

    /// Divide by an interval that excludes zero.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if !other.excludes_zero() {
            return Err(Error::NonFinite { context: "interval division by zero" });
        }
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo = pairs[0].0.div_down(pairs[0].1);
        let mut hi = pairs[0].0.div_up(pairs[0].1);
        for (a, b) in &pairs[1..] {
            let d = a.div_down(b);
            let u = a.div_up(b);
            if d < lo {
                lo = d;
            }
            if u > hi {
                hi = u;
            }
        }
        Ok(Self { lo, hi })
    }

    /// Integer power, with the even-power tightening at zero.
    pub fn powi(&self, n: u32) -> Self {
        if n == 0 {
            return Self { lo: S::one(), hi: S::one() };
        }
        if n == 1 {
            return self.clone();
        }
        let z = S::zero();
        if n % 2 == 1 {
            Self { lo: pow_signed(&self.lo, n, Round::Down), hi: pow_signed(&self.hi, n, Round::Up) }
        } else if self.lo >= z {
            Self { lo: pow_mag(&self.lo, n, Round::Down), hi: pow_mag(&self.hi, n, Round::Up) }
        } else if self.hi <= z {
            Self {
                lo: pow_mag(&self.hi.neg(), n, Round::Down),
                hi: pow_mag(&self.lo.neg(), n, Round::Up),
            }
        } else {
            let a = self.lo.neg();
            let m = if a >= self.hi { a } else { self.hi.clone() };
            Self { lo: z, hi: pow_mag(&m, n, Round::Up) }
        }
    }

    /// Clamp into `to`; monotone, selection-only (no rounding).
    pub fn clamp_to(&self, to: &Self) -> Self {
        let clamp1 = |v: &S| -> S {
            if *v < to.lo {
                to.lo.clone()
            } else if *v > to.hi {
                to.hi.clone()
            } else {
                v.clone()
            }
        };
        Self { lo: clamp1(&self.lo), hi: clamp1(&self.hi) }
    }

    /// Enclosure of sin over the interval.
    pub fn sin(&self) -> Result<Self> {
        match S::sin_enclosure(&self.lo, &self.hi) {
            Some((lo, hi)) => Ok(Self { lo, hi }),
            None => Err(Error::TrigUnsupported),
        }
    }

    /// Enclosure of cos over the interval.
    pub fn cos(&self) -> Result<Self> {
        match S::cos_enclosure(&self.lo, &self.hi) {
            Some((lo, hi)) => Ok(Self { lo, hi }),
            None => Err(Error::TrigUnsupported),
        }
    }

    /// Widen outward by a nonnegative amount on both sides.
    pub fn inflate(&self, by: &S) -> Self {
        debug_assert!(*by >= S::zero());
        Self { lo: self.lo.sub_down(by), hi: self.hi.add_up(by) }
    }

    /// Both endpoints as directed f64 (lo down, hi up).
    pub fn to_f64_outward(&self) -> (f64, f64) {
        (self.lo.approx_f64(Round::Down), self.hi.approx_f64(Round::Up))
    }
}

fn pow_mag<S: Scalar>(base: &S, n: u32, dir: Round) -> S {
    debug_assert!(*base >= S::zero());
    let mut acc = base.clone();
    for _ in 1..n {
        acc = match dir {
            Round::Down => acc.mul_down(base),
            Round::Up => acc.mul_up(base),
        };
    }
    acc
}

/// Odd power of a possibly negative base: the map is monotone, and for a
/// negative base the magnitude must round the opposite way before negation.
fn pow_signed<S: Scalar>(base: &S, n: u32, dir: Round) -> S {
    debug_assert!(n % 2 == 1);
    if *base >= S::zero() {
        pow_mag(base, n, dir)
    } else {
        let flipped = match dir {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        };
        pow_mag(&base.neg(), n, flipped).neg()
    }
}

/// Axis-aligned box: a product of intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxN<S: Scalar> {
    comps: Vec<Interval<S>>,
}

/// Which end of an axis a face sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl<S: Scalar> BoxN<S> {
    pub fn new(comps: Vec<Interval<S>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::DimMismatch { expected: 1, got: 0 });
        }
        Ok(Self { comps })
    }

    /// Box from `(lo, hi)` pairs.
    pub fn from_endpoints(pairs: Vec<(S, S)>) -> Result<Self> {
        let comps =
            pairs.into_iter().map(|(lo, hi)| Interval::new(lo, hi)).collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    /// Degenerate box at a point.
    pub fn from_point(p: &[S]) -> Result<Self> {
        let comps = p.iter().map(|v| Interval::point(v.clone())).collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    pub fn dims(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, axis: usize) -> &Interval<S> {
        &self.comps[axis]
    }

    pub fn comps(&self) -> &[Interval<S>] {
        &self.comps
    }

    pub fn into_comps(self) -> Vec<Interval<S>> {
        self.comps
    }

    pub fn set_comp(&mut self, axis: usize, iv: Interval<S>) {
        self.comps[axis] = iv;
    }

    /// Largest component width (upper bound).
    pub fn max_width(&self) -> S {
        let mut w = self.comps[0].width();
        for c in &self.comps[1..] {
            let cw = c.width();
            if cw > w {
                w = cw;
            }
        }
        w
    }

    /// Axis of largest width, lowest index on ties.
    pub fn widest_axis(&self) -> usize {
        let mut best = 0;
        let mut w = self.comps[0].width();
        for (i, c) in self.comps.iter().enumerate().skip(1) {
            let cw = c.width();
            if cw > w {
                w = cw;
                best = i;
            }
        }
        best
    }

    pub fn midpoint(&self) -> Vec<S> {
        self.comps.iter().map(|c| c.midpoint()).collect()
    }

    pub fn contains_point(&self, p: &[S]) -> bool {
        p.len() == self.dims() && self.comps.iter().zip(p).all(|(c, v)| c.contains(v))
    }

    pub fn contains_box(&self, other: &Self) -> bool {
        other.dims() == self.dims()
            && self.comps.iter().zip(&other.comps).all(|(a, b)| a.contains_interval(b))
    }

    pub fn intersects(&self, other: &Self) -> bool {
        other.dims() == self.dims()
            && self.comps.iter().zip(&other.comps).all(|(a, b)| a.intersects(b))
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        if other.dims() != self.dims() {
            return None;
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()?;
        Some(Self { comps })
    }

    pub fn hull(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dims(), other.dims());
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.hull(b)).collect();
        Self { comps }
    }

    /// Split along `axis` (widest if `None`) at the midpoint. The two halves
    /// share the midpoint hyperplane, so their union covers the box.
    pub fn bisect(&self, axis: Option<usize>) -> Result<(Self, Self)> {
        let axis = axis.unwrap_or_else(|| self.widest_axis());
        if axis >= self.dims() {
            return Err(Error::DimMismatch { expected: self.dims(), got: axis });
        }
        let c = &self.comps[axis];
        let mid = c.midpoint();
        // A point axis, or one so narrow the midpoint collapses onto an
        // endpoint, cannot be split further.
        if mid <= *c.lo() || mid >= *c.hi() {
            return Err(Error::DegenerateBox { axis });
        }
        let mut left = self.clone();
        let mut right = self.clone();
        left.comps[axis] = Interval::new(c.lo().clone(), mid.clone())?;
        right.comps[axis] = Interval::new(mid, c.hi().clone())?;
        Ok((left, right))
    }

    /// Degenerate face box at one end of `axis`.
    pub fn face(&self, axis: usize, side: Side) -> Result<Self> {
        if axis >= self.dims() {
            return Err(Error::DimMismatch { expected: self.dims(), got: axis });
        }
        let mut f = self.clone();
        let c = &self.comps[axis];
        f.comps[axis] = match side {
            Side::Left => Interval::point(c.lo().clone())?,
            Side::Right => Interval::point(c.hi().clone())?,
        };
        Ok(f)
    }

    /// Componentwise widening.
    pub fn inflate(&self, by: &S) -> Self {
        Self { comps: self.comps.iter().map(|c| c.inflate(by)).collect() }
    }

    /// Lower corner, for canonical ordering of result sets.
    pub fn lower_corner(&self) -> Vec<S> {
        self.comps.iter().map(|c| c.lo().clone()).collect()
    }
}

/// Lexicographic comparison of equal-length scalar tuples; total on valid
/// (finite) values.
pub fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) => continue,
            Some(ord) => return ord,
            None => return std::cmp::Ordering::Equal,
        }
    }
    std::cmp::Ordering::Equal
}
