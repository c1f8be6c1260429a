//! Oriented rectangles, affine charts, slabs, and crossing checks.
//!
//! An oriented rectangle is a nondegenerate box together with one
//! distinguished expansion axis; its left and right faces are the two
//! degenerate boxes at the ends of that axis. Slabs are the sub-rectangles
//! that cut across a reference rectangle in the expansion or transverse
//! directions, and a crossing of two oriented rectangles is certified by
//! exhibiting a sub-rectangle that is simultaneously a vertical slab of the
//! first and a horizontal slab of the second.

use crate::error::{Error, Result};
use crate::interval::{BoxN, Interval, Side};
use crate::scalar::Scalar;
use crate::Status;

/// A nondegenerate box with a distinguished expansion axis.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedRect<S: Scalar> {
    body: BoxN<S>,
    axis: usize,
}

impl<S: Scalar> OrientedRect<S> {
    /// Every axis must have positive width and `axis` must be in range.
    pub fn new(body: BoxN<S>, axis: usize) -> Result<Self> {
        if axis >= body.dims() {
            return Err(Error::DimMismatch { expected: body.dims(), got: axis });
        }
        for (i, c) in body.comps().iter().enumerate() {
            if c.is_point() {
                return Err(Error::DegenerateBox { axis: i });
            }
        }
        Ok(Self { body, axis })
    }

    pub fn body(&self) -> &BoxN<S> {
        &self.body
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn dims(&self) -> usize {
        self.body.dims()
    }

    /// Face at the low end of the expansion axis.
    pub fn left_face(&self) -> BoxN<S> {
        self.body.face(self.axis, Side::Left).expect("axis validated")
    }

    /// Face at the high end of the expansion axis.
    pub fn right_face(&self) -> BoxN<S> {
        self.body.face(self.axis, Side::Right).expect("axis validated")
    }
}

/// Diagonal affine chart `x -> offset + scale .* x` with strictly positive
/// scales, mapping a reference box onto a concrete one without reflection.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineChart<S: Scalar> {
    offset: Vec<S>,
    scale: Vec<S>,
}

impl<S: Scalar> AffineChart<S> {
    pub fn new(offset: Vec<S>, scale: Vec<S>) -> Result<Self> {
        if offset.len() != scale.len() || offset.is_empty() {
            return Err(Error::DimMismatch { expected: offset.len().max(1), got: scale.len() });
        }
        for v in offset.iter().chain(&scale) {
            if !v.is_finite_value() {
                return Err(Error::NonFinite { context: "chart coefficient" });
            }
        }
        if scale.iter().any(|s| *s <= S::zero()) {
            return Err(Error::InvalidMap { reason: "chart scale must be positive".into() });
        }
        Ok(Self { offset, scale })
    }

    /// Chart taking the unit box `[0,1]^n` onto `target`.
    pub fn onto(target: &BoxN<S>) -> Result<Self> {
        let offset = target.lower_corner();
        let scale = target.comps().iter().map(|c| c.hi().sub_near(c.lo())).collect::<Vec<_>>();
        Self::new(offset, scale)
    }

    pub fn dims(&self) -> usize {
        self.offset.len()
    }

    /// Enclosure of the forward image of a box.
    pub fn apply_box(&self, b: &BoxN<S>) -> Result<BoxN<S>> {
        if b.dims() != self.dims() {
            return Err(Error::DimMismatch { expected: self.dims(), got: b.dims() });
        }
        let comps = b
            .comps()
            .iter()
            .zip(self.scale.iter().zip(&self.offset))
            .map(|(c, (s, o))| c.scale(s).shift(o))
            .collect();
        BoxN::new(comps)
    }

    /// Enclosure of the preimage of a box (directed division by the scale).
    pub fn inverse_box(&self, b: &BoxN<S>) -> Result<BoxN<S>> {
        if b.dims() != self.dims() {
            return Err(Error::DimMismatch { expected: self.dims(), got: b.dims() });
        }
        let comps = b
            .comps()
            .iter()
            .zip(self.scale.iter().zip(&self.offset))
            .map(|(c, (s, o))| {
                let shifted = c.shift(&o.neg());
                Interval::new(shifted.lo().div_down(s), shifted.hi().div_up(s))
            })
            .collect::<Result<Vec<_>>>()?;
        BoxN::new(comps)
    }
}

/// `n` is a vertical slab of `m`: contained in `m`, same expansion axis,
/// and spanning the full expansion extent of `m`. Vertical slabs inherit the
/// full stretching direction and shrink only transversally.
pub fn is_vertical_slab<S: Scalar>(m: &OrientedRect<S>, n: &OrientedRect<S>) -> bool {
    m.dims() == n.dims()
        && m.axis() == n.axis()
        && m.body().contains_box(n.body())
        && n.body().comp(m.axis()) == m.body().comp(m.axis())
}

/// `n` is a horizontal slab of `m`: contained in `m`, same expansion axis,
/// spanning the full extent of every transverse axis of `m`.
pub fn is_horizontal_slab<S: Scalar>(m: &OrientedRect<S>, n: &OrientedRect<S>) -> bool {
    if m.dims() != n.dims() || m.axis() != n.axis() || !m.body().contains_box(n.body()) {
        return false;
    }
    (0..m.dims()).filter(|&i| i != m.axis()).all(|i| n.body().comp(i) == m.body().comp(i))
}

/// Outcome of a crossing check, with each clause recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingCertificate {
    pub status: Status,
    /// `e` is contained in both reference rectangles.
    pub contained: bool,
    /// `e` is a vertical slab of `a`.
    pub vertical_in_a: bool,
    /// `e` is a horizontal slab of `b`.
    pub horizontal_in_b: bool,
    /// Human-readable account of the first failing clause, if any.
    pub reason: Option<String>,
}

/// Certify that `e` witnesses a crossing of `a` over `b`: `e` must be a
/// vertical slab of `a` and a horizontal slab of `b`. The slab criteria are
/// sufficient for an axis-aligned crossing; a failure falsifies the witness,
/// not the existence of some other crossing.
pub fn check_crossing<S: Scalar>(
    e: &OrientedRect<S>,
    a: &OrientedRect<S>,
    b: &OrientedRect<S>,
) -> CrossingCertificate {
    let contained = a.body().contains_box(e.body()) && b.body().contains_box(e.body());
    let vertical_in_a = is_vertical_slab(a, e);
    let horizontal_in_b = is_horizontal_slab(b, e);
    let reason = if !contained {
        Some("e is not contained in both rectangles".to_string())
    } else if !vertical_in_a {
        Some("e is not a vertical slab of a: expansion extents differ or e pokes out".to_string())
    } else if !horizontal_in_b {
        Some("e is not a horizontal slab of b: a transverse extent differs".to_string())
    } else {
        None
    };
    CrossingCertificate {
        status: if reason.is_none() { Status::Certified } else { Status::Falsified },
        contained,
        vertical_in_a,
        horizontal_in_b,
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(pairs: Vec<(f64, f64)>, axis: usize) -> OrientedRect<f64> {
        OrientedRect::new(BoxN::from_endpoints(pairs).unwrap(), axis).unwrap()
    }

    #[test]
    fn construction_rejects_degenerate_axes() {
        let b = BoxN::from_endpoints(vec![(0.0, 1.0), (2.0, 2.0)]).unwrap();
        assert!(matches!(OrientedRect::new(b, 0), Err(Error::DegenerateBox { axis: 1 })));
        let c = BoxN::from_endpoints(vec![(0.0, 1.0)]).unwrap();
        assert!(OrientedRect::new(c, 3).is_err());
    }

    #[test]
    fn faces_sit_on_the_expansion_axis() {
        let r = rect(vec![(0.0, 1.0), (2.0, 5.0)], 1);
        let lf = r.left_face();
        assert!(lf.comp(1).is_point());
        assert_eq!(*lf.comp(1).lo(), 2.0);
        assert_eq!(*r.right_face().comp(1).lo(), 5.0);
    }

    #[test]
    fn chart_round_trip_is_tight() {
        let chart = AffineChart::new(vec![1.0, -2.0], vec![0.3, 7.0]).unwrap();
        let b = BoxN::from_endpoints(vec![(0.25, 0.5), (0.0, 1.0)]).unwrap();
        let fwd = chart.apply_box(&b).unwrap();
        let back = chart.inverse_box(&fwd).unwrap();
        assert!(back.contains_box(&b));
        for i in 0..2 {
            let slack = back.comp(i).width() - b.comp(i).width();
            assert!(slack.abs() < 1e-14, "round trip widened axis {i} by {slack}");
        }
    }

    #[test]
    fn chart_onto_unit_box() {
        let target = BoxN::from_endpoints(vec![(2.0, 3.0), (-1.0, 1.0)]).unwrap();
        let chart = AffineChart::onto(&target).unwrap();
        let unit = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        assert_eq!(chart.apply_box(&unit).unwrap(), target);
    }

    #[test]
    fn slab_predicates() {
        let outer = rect(vec![(0.0, 1.0), (0.0, 1.0)], 1);
        let vslab = rect(vec![(0.2, 0.4), (0.0, 1.0)], 1);
        let hslab = rect(vec![(0.0, 1.0), (0.6, 0.9)], 1);
        assert!(is_vertical_slab(&outer, &vslab));
        assert!(!is_horizontal_slab(&outer, &vslab));
        assert!(is_horizontal_slab(&outer, &hslab));
        assert!(!is_vertical_slab(&outer, &hslab));
        // The whole rectangle is both kinds of slab of itself.
        assert!(is_vertical_slab(&outer, &outer));
        assert!(is_horizontal_slab(&outer, &outer));
    }

    #[test]
    fn crossing_requires_both_slab_clauses() {
        let a = rect(vec![(0.0, 1.0), (0.0, 1.0)], 1);
        let b = rect(vec![(0.0, 1.0), (0.0, 1.0)], 1);
        let e = rect(vec![(0.2, 0.4), (0.0, 1.0)], 1);
        // e spans a vertically but is not a horizontal slab of b.
        let cert = check_crossing(&e, &a, &b);
        assert_eq!(cert.status, Status::Falsified);
        assert!(cert.vertical_in_a && !cert.horizontal_in_b);

        // The lower horizontal strip is horizontal in b but not vertical in a.
        let strip = rect(vec![(0.0, 1.0), (0.0, 1.0 / 3.0)], 1);
        let cert = check_crossing(&strip, &a, &b);
        assert_eq!(cert.status, Status::Falsified);
        assert!(!cert.vertical_in_a && cert.horizontal_in_b);
        assert!(cert.reason.as_deref().unwrap().contains("vertical"));

        // The full square crosses itself.
        let cert = check_crossing(&a, &a, &b);
        assert_eq!(cert.status, Status::Certified);
        assert!(cert.reason.is_none());
    }
}
