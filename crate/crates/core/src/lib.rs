//! Rigorous certification of covering relations and chaotic dynamics for
//! concrete maps on oriented rectangles.
//!
//! The library is organised bottom-up. `scalar` + `interval` provide the
//! outward-rounded arithmetic everything else is built on, generic over the
//! endpoint type: f64 and f32 for speed, `BigRational` when certificates
//! must be exact. `geometry` adds oriented rectangles, faces, slabs, and
//! crossing checks. `dynsys` defines the map families. `miranda` certifies
//! zeros and tracks zero branches, `covering` certifies stretching
//! relations, `symbolic` handles itineraries and periodic orbits, and
//! `cutting` is a discrete grid laboratory for separation arguments.

pub mod covering;
pub mod cutting;
pub mod dynsys;
pub mod error;
pub mod geometry;
pub mod interval;
pub mod miranda;
pub mod scalar;
pub mod symbolic;

pub use error::{Error, Result};
pub use interval::{BoxN, Interval, Side};
pub use scalar::{Round, Scalar};

/// Exact rational scalar (arbitrary precision).
pub use num_rational::BigRational as Rational;

/// Common status of a certification attempt. `Certified` and `Falsified`
/// are rigorous verdicts; `Inconclusive` means the criterion could not
/// decide at the precision or budget used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Certified,
    Falsified,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Certified => "certified",
            Status::Falsified => "falsified",
            Status::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Double-precision interval.
pub type Interval64 = Interval<f64>;
/// Single-precision interval.
pub type Interval32 = Interval<f32>;
/// Exact rational interval.
pub type IntervalQ = Interval<Rational>;
/// Double-precision box.
pub type Box64 = BoxN<f64>;
/// Exact rational box.
pub type BoxQ = BoxN<Rational>;
