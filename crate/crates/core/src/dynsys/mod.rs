//! Map families and their rigorous box evaluation.
//!
//! [`MapSpec`] is the closed set of map families the tools operate on:
//!
//! * `TrigExample`: the two-component trigonometric model map
//!   `(x, y) -> (1/2 + c cos(2 pi (k x + l (y - 1/2))),
//!               1/2 + d sin(2 pi (m x + y)))`
//!   whose first component folds the square when `c > 1/2` and whose second
//!   stays inside `[0,1]` when `d <= 1/2`.
//! * `AffineHorseshoe`: finitely many affine branches, each a diagonal
//!   affine map on its own strip domain. Branch handling on points and
//!   boxes is governed by [`EvalMode`].
//! * `Composition`: left-to-right composition of maps.
//! * `ClampedExtension`: project into a source box, apply the inner map,
//!   clamp into a target box; totalises a partially defined map.
//! * `Custom`: expression trees, one per output component.
//!
//! Box evaluation always returns an enclosure of the true image set of the
//! box (intersected with branch domains where modes say so).

pub mod expr;

use crate::error::{Error, Result};
use crate::interval::{BoxN, Interval};
use crate::scalar::Scalar;
pub use expr::{match_phase_form, parse, Expr, PhaseForm, TrigKind};

/// How strip (branch) domains are treated during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Points must lie in some branch domain; boxes must be contained in a
    /// single branch domain.
    Strict,
    /// Points outside every branch use the nearest branch's formula; boxes
    /// are clipped to each intersecting branch and the images hulled.
    #[default]
    Permissive,
}

/// Parameters of the trigonometric model map.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigParams<S: Scalar> {
    c: S,
    d: S,
    k: i64,
    l: i64,
    m: i64,
}

impl<S: Scalar> TrigParams<S> {
    /// Validated constructor. Requirements: `c > 1/2 >= d > 0`, `l*d > 1`
    /// (verified with downward rounding, so borderline parameter sets are
    /// rejected rather than accepted optimistically), `k >= l + 1 >= 2`,
    /// and `m >= 1`.
    pub fn new(c: S, d: S, k: i64, l: i64, m: i64) -> Result<Self> {
        let half = S::from_ratio(1, 2);
        if !c.is_finite_value() || !d.is_finite_value() {
            return Err(Error::NonFinite { context: "trig map parameter" });
        }
        if c <= half {
            return Err(Error::InvalidMap { reason: "require c > 1/2".into() });
        }
        if d <= S::zero() || d > half {
            return Err(Error::InvalidMap { reason: "require 0 < d <= 1/2".into() });
        }
        if l < 1 || S::from_int(l).mul_down(&d) <= S::one() {
            return Err(Error::InvalidMap { reason: "require l*d > 1".into() });
        }
        if k < l + 1 {
            return Err(Error::InvalidMap { reason: "require k >= l + 1".into() });
        }
        if m < 1 {
            return Err(Error::InvalidMap { reason: "require m >= 1".into() });
        }
        Ok(Self { c, d, k, l, m })
    }

    /// Unchecked constructor for experiments outside the validated range.
    pub fn new_unchecked(c: S, d: S, k: i64, l: i64, m: i64) -> Self {
        Self { c, d, k, l, m }
    }

    pub fn c(&self) -> &S {
        &self.c
    }
    pub fn d(&self) -> &S {
        &self.d
    }
    pub fn k(&self) -> i64 {
        self.k
    }
    pub fn l(&self) -> i64 {
        self.l
    }
    pub fn m(&self) -> i64 {
        self.m
    }

    fn eval_box(&self, b: &BoxN<S>) -> Result<BoxN<S>> {
        let (pi_lo, pi_hi) = S::pi_bracket().ok_or(Error::TrigUnsupported)?;
        let two = S::from_int(2);
        // Doubling a float is exact, so this is a one-ulp bracket of 2 pi.
        let two_pi = Interval::new(pi_lo.mul_down(&two), pi_hi.mul_up(&two))?;
        let x = b.comp(0);
        let y = b.comp(1);
        let phase_f = x
            .scale(&S::from_int(self.k))
            .add(&y.shift(&S::from_ratio(-1, 2)).scale(&S::from_int(self.l)));
        let f = phase_f.mul(&two_pi).cos()?.scale(&self.c).shift(&S::from_ratio(1, 2));
        let phase_g = x.scale(&S::from_int(self.m)).add(y);
        let g = phase_g.mul(&two_pi).sin()?.scale(&self.d).shift(&S::from_ratio(1, 2));
        BoxN::new(vec![f, g])
    }

    fn eval_point(&self, p: &[S]) -> Result<Vec<S>> {
        let pi = S::pi_near().ok_or(Error::TrigUnsupported)?;
        let two_pi = pi.mul_near(&S::from_int(2));
        let x = &p[0];
        let y = &p[1];
        let phase_f = S::from_int(self.k)
            .mul_near(x)
            .add_near(&S::from_int(self.l).mul_near(&y.sub_near(&S::from_ratio(1, 2))));
        let f = self
            .c
            .mul_near(&phase_f.mul_near(&two_pi).cos_near().ok_or(Error::TrigUnsupported)?)
            .add_near(&S::from_ratio(1, 2));
        let phase_g = S::from_int(self.m).mul_near(x).add_near(y);
        let g = self
            .d
            .mul_near(&phase_g.mul_near(&two_pi).sin_near().ok_or(Error::TrigUnsupported)?)
            .add_near(&S::from_ratio(1, 2));
        Ok(vec![f, g])
    }

    /// Phase form of a component (both components have one by shape).
    fn phase_form(&self, component: usize) -> Option<PhaseForm<S>> {
        match component {
            0 => Some(PhaseForm {
                base: S::from_ratio(1, 2),
                amp: self.c.abs(),
                kind: TrigKind::Cos,
                coeffs: vec![S::from_int(self.k), S::from_int(self.l)],
                constant: S::from_ratio(-self.l, 2),
            }),
            1 => Some(PhaseForm {
                base: S::from_ratio(1, 2),
                amp: self.d.abs(),
                kind: TrigKind::Sin,
                coeffs: vec![S::from_int(self.m), S::one()],
                constant: S::zero(),
            }),
            _ => None,
        }
    }
}

/// One affine branch: `x -> offset + diag .* x` on its strip domain.
#[derive(Clone, Debug, PartialEq)]
pub struct HorseshoeBranch<S: Scalar> {
    pub domain: BoxN<S>,
    pub offset: Vec<S>,
    pub diag: Vec<S>,
}

impl<S: Scalar> HorseshoeBranch<S> {
    fn image_of(&self, b: &BoxN<S>) -> BoxN<S> {
        let comps = b
            .comps()
            .iter()
            .zip(self.diag.iter().zip(&self.offset))
            .map(|(c, (d, o))| c.scale(d).shift(o))
            .collect();
        BoxN::new(comps).expect("dims validated at construction")
    }

    fn image_of_point(&self, p: &[S]) -> Vec<S> {
        p.iter()
            .zip(self.diag.iter().zip(&self.offset))
            .map(|(x, (d, o))| d.mul_near(x).add_near(o))
            .collect()
    }
}

/// Piecewise-affine horseshoe: finitely many branches on strip domains
/// whose interiors do not overlap.
#[derive(Clone, Debug, PartialEq)]
pub struct Horseshoe<S: Scalar> {
    branches: Vec<HorseshoeBranch<S>>,
    dims: usize,
}

impl<S: Scalar> Horseshoe<S> {
    pub fn new(branches: Vec<HorseshoeBranch<S>>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidMap { reason: "horseshoe needs at least one branch".into() });
        }
        let dims = branches[0].domain.dims();
        for br in &branches {
            if br.domain.dims() != dims || br.offset.len() != dims || br.diag.len() != dims {
                return Err(Error::DimMismatch { expected: dims, got: br.offset.len() });
            }
            for v in br.offset.iter().chain(&br.diag) {
                if !v.is_finite_value() {
                    return Err(Error::NonFinite { context: "branch coefficient" });
                }
            }
        }
        for i in 0..branches.len() {
            for j in i + 1..branches.len() {
                if let Some(overlap) = branches[i].domain.intersect(&branches[j].domain) {
                    let positive_measure = overlap.comps().iter().all(|c| !c.is_point());
                    if positive_measure {
                        return Err(Error::InvalidMap {
                            reason: format!("branch domains {i} and {j} overlap"),
                        });
                    }
                }
            }
        }
        Ok(Self { branches, dims })
    }

    /// The standard two-branch model on the unit cube: both strips cut
    /// across the last axis at heights [0, 1/3] and [2/3, 1]; the first
    /// branch contracts everything toward the origin corner, the second is
    /// the reflected branch fixing (3/4, ..., 3/4). Expansion factor 3 on
    /// the last axis, contraction 1/3 on the rest.
    pub fn canonical(dims: usize) -> Result<Self> {
        if dims < 2 {
            return Err(Error::DimMismatch { expected: 2, got: dims });
        }
        let exp = dims - 1;
        let unit = |_i: usize| (S::zero(), S::one());
        let mut dom0: Vec<(S, S)> = (0..dims).map(unit).collect();
        dom0[exp] = (S::zero(), S::from_ratio(1, 3));
        let mut dom1: Vec<(S, S)> = (0..dims).map(unit).collect();
        dom1[exp] = (S::from_ratio(2, 3), S::one());
        let mut offset0 = vec![S::zero(); dims];
        let mut diag0 = vec![S::from_ratio(1, 3); dims];
        offset0[exp] = S::zero();
        diag0[exp] = S::from_int(3);
        let mut offset1 = vec![S::one(); dims];
        let mut diag1 = vec![S::from_ratio(-1, 3); dims];
        offset1[exp] = S::from_int(3);
        diag1[exp] = S::from_int(-3);
        Ok(Self {
            branches: vec![
                HorseshoeBranch {
                    domain: BoxN::from_endpoints(dom0)?,
                    offset: offset0,
                    diag: diag0,
                },
                HorseshoeBranch {
                    domain: BoxN::from_endpoints(dom1)?,
                    offset: offset1,
                    diag: diag1,
                },
            ],
            dims,
        })
    }

    pub fn branches(&self) -> &[HorseshoeBranch<S>] {
        &self.branches
    }

    /// Index of the unique branch whose domain contains the box.
    pub fn branch_containing(&self, b: &BoxN<S>) -> Option<usize> {
        self.branches.iter().position(|br| br.domain.contains_box(b))
    }

    /// Evaluate one branch's formula over the whole box, ignoring domains.
    /// This is the single-branch extension used when a certification box
    /// has to poke slightly outside the strip it certifies in.
    pub fn eval_box_branch(&self, b: &BoxN<S>, branch: usize) -> Result<BoxN<S>> {
        if b.dims() != self.dims {
            return Err(Error::DimMismatch { expected: self.dims, got: b.dims() });
        }
        let br = self.branches.get(branch).ok_or(Error::DimMismatch {
            expected: self.branches.len(),
            got: branch,
        })?;
        Ok(br.image_of(b))
    }

    pub fn eval_point_branch(&self, p: &[S], branch: usize) -> Result<Vec<S>> {
        if p.len() != self.dims {
            return Err(Error::DimMismatch { expected: self.dims, got: p.len() });
        }
        let br = self.branches.get(branch).ok_or(Error::DimMismatch {
            expected: self.branches.len(),
            got: branch,
        })?;
        Ok(br.image_of_point(p))
    }

    fn eval_point(&self, p: &[S], mode: EvalMode) -> Result<Vec<S>> {
        if let Some(br) = self.branches.iter().find(|br| br.domain.contains_point(p)) {
            return Ok(br.image_of_point(p));
        }
        match mode {
            EvalMode::Strict => Err(Error::DomainError),
            EvalMode::Permissive => {
                // Nearest branch by max axis distance, lowest index on ties.
                let mut best = 0usize;
                let mut best_d: Option<S> = None;
                for (i, br) in self.branches.iter().enumerate() {
                    let mut d = S::zero();
                    for (axis, c) in br.domain.comps().iter().enumerate() {
                        let v = &p[axis];
                        let gap = if v < c.lo() {
                            c.lo().sub_up(v)
                        } else if v > c.hi() {
                            v.sub_up(c.hi())
                        } else {
                            S::zero()
                        };
                        if gap > d {
                            d = gap;
                        }
                    }
                    if best_d.as_ref().is_none_or(|bd| d < *bd) {
                        best_d = Some(d);
                        best = i;
                    }
                }
                Ok(self.branches[best].image_of_point(p))
            }
        }
    }

    fn eval_box(&self, b: &BoxN<S>, mode: EvalMode) -> Result<BoxN<S>> {
        match mode {
            EvalMode::Strict => {
                if let Some(i) = self.branch_containing(b) {
                    return Ok(self.branches[i].image_of(b));
                }
                if self.branches.iter().any(|br| br.domain.intersects(b)) {
                    Err(Error::StripStraddle)
                } else {
                    Err(Error::OutsideDomain)
                }
            }
            EvalMode::Permissive => {
                let mut acc: Option<BoxN<S>> = None;
                for br in &self.branches {
                    if let Some(clipped) = br.domain.intersect(b) {
                        let img = br.image_of(&clipped);
                        acc = Some(match acc {
                            Some(h) => h.hull(&img),
                            None => img,
                        });
                    }
                }
                acc.ok_or(Error::OutsideDomain)
            }
        }
    }
}

/// Clamped extension: project into `source`, apply `inner`, clamp into
/// `target`. Total on all of space; agrees with `inner` at points of
/// `source` whose image already lies in `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClampedExt<S: Scalar> {
    pub inner: MapSpec<S>,
    pub source: BoxN<S>,
    pub target: BoxN<S>,
}

/// A map specification: the closed set of families the tools understand.
#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec<S: Scalar> {
    TrigExample(TrigParams<S>),
    AffineHorseshoe(Horseshoe<S>),
    Composition(Vec<MapSpec<S>>),
    ClampedExtension(Box<ClampedExt<S>>),
    Custom(ExprMap<S>),
}

/// Custom map: one expression per output component.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprMap<S: Scalar> {
    exprs: Vec<Expr<S>>,
    dims_in: usize,
}

impl<S: Scalar> ExprMap<S> {
    pub fn new(exprs: Vec<Expr<S>>, dims_in: usize) -> Result<Self> {
        if exprs.is_empty() || dims_in == 0 {
            return Err(Error::DimMismatch { expected: 1, got: 0 });
        }
        for e in &exprs {
            if let Some(i) = e.max_var() {
                if i >= dims_in {
                    return Err(Error::DimMismatch { expected: dims_in, got: i });
                }
            }
        }
        Ok(Self { exprs, dims_in })
    }

    /// Parse one expression per line of `text` (blank lines skipped).
    pub fn parse_lines(text: &str, dims_in: usize) -> Result<Self> {
        let mut exprs = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            exprs.push(parse(line)?);
        }
        Self::new(exprs, dims_in)
    }

    pub fn exprs(&self) -> &[Expr<S>] {
        &self.exprs
    }
}

impl<S: Scalar> MapSpec<S> {
    pub fn dims_in(&self) -> usize {
        match self {
            MapSpec::TrigExample(_) => 2,
            MapSpec::AffineHorseshoe(h) => h.dims,
            MapSpec::Composition(maps) => maps[0].dims_in(),
            MapSpec::ClampedExtension(c) => c.source.dims(),
            MapSpec::Custom(m) => m.dims_in,
        }
    }

    pub fn dims_out(&self) -> usize {
        match self {
            MapSpec::TrigExample(_) => 2,
            MapSpec::AffineHorseshoe(h) => h.dims,
            MapSpec::Composition(maps) => maps.last().map(|m| m.dims_out()).unwrap_or(0),
            MapSpec::ClampedExtension(c) => c.target.dims(),
            MapSpec::Custom(m) => m.exprs.len(),
        }
    }

    /// Validate a composition chain's dimensions.
    pub fn compose(maps: Vec<MapSpec<S>>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::DimMismatch { expected: 1, got: 0 });
        }
        for w in maps.windows(2) {
            if w[0].dims_out() != w[1].dims_in() {
                return Err(Error::DimMismatch {
                    expected: w[1].dims_in(),
                    got: w[0].dims_out(),
                });
            }
        }
        Ok(MapSpec::Composition(maps))
    }

    /// Enclosure of the image of a box.
    pub fn eval_box(&self, b: &BoxN<S>, mode: EvalMode) -> Result<BoxN<S>> {
        if b.dims() != self.dims_in() {
            return Err(Error::DimMismatch { expected: self.dims_in(), got: b.dims() });
        }
        match self {
            MapSpec::TrigExample(t) => t.eval_box(b),
            MapSpec::AffineHorseshoe(h) => h.eval_box(b, mode),
            MapSpec::Composition(maps) => {
                let mut cur = b.clone();
                for m in maps {
                    cur = m.eval_box(&cur, mode)?;
                }
                Ok(cur)
            }
            MapSpec::ClampedExtension(c) => {
                let projected = BoxN::new(
                    b.comps()
                        .iter()
                        .zip(c.source.comps())
                        .map(|(x, s)| x.clamp_to(s))
                        .collect(),
                )?;
                let img = c.inner.eval_box(&projected, mode)?;
                BoxN::new(
                    img.comps()
                        .iter()
                        .zip(c.target.comps())
                        .map(|(x, t)| x.clamp_to(t))
                        .collect(),
                )
            }
            MapSpec::Custom(m) => {
                let comps =
                    m.exprs.iter().map(|e| e.eval_box(b)).collect::<Result<Vec<_>>>()?;
                BoxN::new(comps)
            }
        }
    }

    /// Round-to-nearest point evaluation (diagnostics and falsifiers; not
    /// an enclosure).
    pub fn eval_point(&self, p: &[S], mode: EvalMode) -> Result<Vec<S>> {
        if p.len() != self.dims_in() {
            return Err(Error::DimMismatch { expected: self.dims_in(), got: p.len() });
        }
        match self {
            MapSpec::TrigExample(t) => t.eval_point(p),
            MapSpec::AffineHorseshoe(h) => h.eval_point(p, mode),
            MapSpec::Composition(maps) => {
                let mut cur = p.to_vec();
                for m in maps {
                    cur = m.eval_point(&cur, mode)?;
                }
                Ok(cur)
            }
            MapSpec::ClampedExtension(c) => {
                let projected: Vec<S> = p
                    .iter()
                    .zip(c.source.comps())
                    .map(|(x, s)| {
                        if x < s.lo() {
                            s.lo().clone()
                        } else if x > s.hi() {
                            s.hi().clone()
                        } else {
                            x.clone()
                        }
                    })
                    .collect();
                let img = c.inner.eval_point(&projected, mode)?;
                Ok(img
                    .iter()
                    .zip(c.target.comps())
                    .map(|(x, t)| {
                        if x < t.lo() {
                            t.lo().clone()
                        } else if x > t.hi() {
                            t.hi().clone()
                        } else {
                            x.clone()
                        }
                    })
                    .collect())
            }
            MapSpec::Custom(m) => m.exprs.iter().map(|e| e.eval_point(p)).collect(),
        }
    }

    /// Rigorous point-image enclosure: evaluate the degenerate box.
    pub fn eval_point_enclosure(&self, p: &[S], mode: EvalMode) -> Result<BoxN<S>> {
        self.eval_box(&BoxN::from_point(p)?, mode)
    }

    /// Phase form of one output component, if the map has that shape.
    pub fn phase_form(&self, component: usize) -> Option<PhaseForm<S>> {
        match self {
            MapSpec::TrigExample(t) => t.phase_form(component),
            MapSpec::Custom(m) => {
                m.exprs.get(component).and_then(|e| match_phase_form(e, m.dims_in))
            }
            _ => None,
        }
    }

    /// The horseshoe inside, if this map is one.
    pub fn as_horseshoe(&self) -> Option<&Horseshoe<S>> {
        match self {
            MapSpec::AffineHorseshoe(h) => Some(h),
            _ => None,
        }
    }
}

/// A vector field abstraction for the zero-certification machinery: maps
/// from boxes in `R^n` to enclosures in `R^m`.
pub trait VectorField<S: Scalar> {
    fn dims_in(&self) -> usize;
    fn dims_out(&self) -> usize;
    fn eval_box(&self, b: &BoxN<S>) -> Result<BoxN<S>>;
    /// Round-to-nearest point evaluation for numeric (non-rigorous) probes.
    fn eval_point(&self, p: &[S]) -> Result<Vec<S>>;
}

/// `psi(x) - x` for fixed-point search. An optional pinned branch makes the
/// field use one horseshoe branch's formula everywhere, extending it past
/// the strip boundary (needed when the fixed point sits on the boundary of
/// the search region).
pub struct FixedPointField<'a, S: Scalar> {
    map: &'a MapSpec<S>,
    mode: EvalMode,
    branch: Option<usize>,
}

impl<'a, S: Scalar> FixedPointField<'a, S> {
    pub fn new(map: &'a MapSpec<S>, mode: EvalMode, branch: Option<usize>) -> Result<Self> {
        if map.dims_in() != map.dims_out() {
            return Err(Error::DimMismatch { expected: map.dims_in(), got: map.dims_out() });
        }
        if branch.is_some() && map.as_horseshoe().is_none() {
            return Err(Error::InvalidMap {
                reason: "branch pinning requires an affine horseshoe".into(),
            });
        }
        Ok(Self { map, mode, branch })
    }

    fn map_box(&self, b: &BoxN<S>) -> Result<BoxN<S>> {
        match (self.branch, self.map.as_horseshoe()) {
            (Some(i), Some(h)) => h.eval_box_branch(b, i),
            _ => self.map.eval_box(b, self.mode),
        }
    }

    fn map_point(&self, p: &[S]) -> Result<Vec<S>> {
        match (self.branch, self.map.as_horseshoe()) {
            (Some(i), Some(h)) => h.eval_point_branch(p, i),
            _ => self.map.eval_point(p, self.mode),
        }
    }
}

impl<S: Scalar> VectorField<S> for FixedPointField<'_, S> {
    fn dims_in(&self) -> usize {
        self.map.dims_in()
    }
    fn dims_out(&self) -> usize {
        self.map.dims_in()
    }
    fn eval_box(&self, b: &BoxN<S>) -> Result<BoxN<S>> {
        let img = self.map_box(b)?;
        let comps = img
            .comps()
            .iter()
            .zip(b.comps())
            .map(|(f, x)| f.sub(x))
            .collect();
        BoxN::new(comps)
    }
    fn eval_point(&self, p: &[S]) -> Result<Vec<S>> {
        let img = self.map_point(p)?;
        Ok(img.iter().zip(p).map(|(f, x)| f.sub_near(x)).collect())
    }
}

/// A custom expression system as a vector field (for direct zero search).
pub struct ExprField<'a, S: Scalar> {
    pub map: &'a MapSpec<S>,
    pub mode: EvalMode,
}

impl<S: Scalar> VectorField<S> for ExprField<'_, S> {
    fn dims_in(&self) -> usize {
        self.map.dims_in()
    }
    fn dims_out(&self) -> usize {
        self.map.dims_out()
    }
    fn eval_box(&self, b: &BoxN<S>) -> Result<BoxN<S>> {
        self.map.eval_box(b, self.mode)
    }
    fn eval_point(&self, p: &[S]) -> Result<Vec<S>> {
        self.map.eval_point(p, self.mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn trig_params_validation() {
        assert!(TrigParams::new(0.6, 0.5, 4, 3, 1).is_ok());
        // c too small.
        assert!(TrigParams::new(0.5, 0.5, 4, 3, 1).is_err());
        // l*d exactly 1 is rejected.
        assert!(TrigParams::new(0.6, 0.5, 4, 2, 1).is_err());
        // k must exceed l.
        assert!(TrigParams::new(0.6, 0.5, 3, 3, 1).is_err());
        assert!(TrigParams::new(0.6, 0.5, 4, 3, 0).is_err());
    }

    #[test]
    fn trig_second_component_spans_unit_interval_exactly() {
        let t = MapSpec::TrigExample(TrigParams::new(0.6f64, 0.5, 4, 3, 1).unwrap());
        let square = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let img = t.eval_box(&square, EvalMode::Permissive).unwrap();
        // The sine phase sweeps two full periods, so the second component
        // is exactly [0, 1]: all scaling here is by exact dyadics.
        assert_eq!(*img.comp(1).lo(), 0.0);
        assert_eq!(*img.comp(1).hi(), 1.0);
        // The first sweeps [1/2 - c, 1/2 + c] = [-0.1, 1.1].
        assert!(img.comp(0).lo() <= &-0.09999999999);
        assert!(img.comp(0).hi() >= &1.09999999999);
    }

    #[test]
    fn trig_point_eval_matches_formula() {
        let t = MapSpec::TrigExample(TrigParams::new(0.6f64, 0.5, 4, 3, 1).unwrap());
        let v = t.eval_point(&[0.0, 0.5], EvalMode::Permissive).unwrap();
        // cos(0) = 1 so f = 1.1; sin(pi) is a rounding hair away from 0.
        assert!((v[0] - 1.1).abs() < 1e-15);
        assert!((v[1] - 0.5).abs() < 1e-15);
        // And the rigorous enclosure of the same point contains the truth.
        let enc = t.eval_point_enclosure(&[0.0, 0.5], EvalMode::Permissive).unwrap();
        assert!(enc.comp(0).contains(&1.1));
        assert!(enc.comp(1).contains(&0.5));
    }

    #[test]
    fn canonical_horseshoe_is_exact_on_rationals() {
        let h = Horseshoe::<BigRational>::canonical(2).unwrap();
        let m = MapSpec::AffineHorseshoe(h);
        // The lower strip maps onto the full height.
        let s0 = BoxN::from_endpoints(vec![(q(0, 1), q(1, 1)), (q(0, 1), q(1, 3))]).unwrap();
        let img = m.eval_box(&s0, EvalMode::Strict).unwrap();
        assert_eq!(*img.comp(0).lo(), q(0, 1));
        assert_eq!(*img.comp(0).hi(), q(1, 3));
        assert_eq!(*img.comp(1).lo(), q(0, 1));
        assert_eq!(*img.comp(1).hi(), q(1, 1));
        // The upper strip maps onto the full height, reversed and shifted.
        let s1 = BoxN::from_endpoints(vec![(q(0, 1), q(1, 1)), (q(2, 3), q(1, 1))]).unwrap();
        let img = m.eval_box(&s1, EvalMode::Strict).unwrap();
        assert_eq!(*img.comp(0).lo(), q(2, 3));
        assert_eq!(*img.comp(0).hi(), q(1, 1));
        assert_eq!(*img.comp(1).lo(), q(0, 1));
        assert_eq!(*img.comp(1).hi(), q(1, 1));
    }

    #[test]
    fn strict_mode_errors() {
        let m = MapSpec::AffineHorseshoe(Horseshoe::<f64>::canonical(2).unwrap());
        let straddling = BoxN::from_endpoints(vec![(0.0, 1.0), (0.2, 0.8)]).unwrap();
        assert_eq!(m.eval_box(&straddling, EvalMode::Strict), Err(Error::StripStraddle));
        let outside = BoxN::from_endpoints(vec![(0.0, 1.0), (0.4, 0.6)]).unwrap();
        assert_eq!(m.eval_box(&outside, EvalMode::Strict), Err(Error::OutsideDomain));
        assert_eq!(m.eval_point(&[0.5, 0.5], EvalMode::Strict), Err(Error::DomainError));
        // Permissive point evaluation picks the nearest strip (the lower
        // one on ties) and permissive boxes hull the clipped strip images.
        assert!(m.eval_point(&[0.5, 0.5], EvalMode::Permissive).is_ok());
        // Strip 0 clipped to y in [0.2, 1/3] maps to y in [0.6, 1]; strip 1
        // clipped to [2/3, 0.8] also maps into [0.6, ~1]. The hull stops at
        // 0.6 rather than sweeping the whole height. In f64 the top edge
        // overshoots 1 by an ulp: 3 - 3*fl(2/3) really is above 1.
        let img = m.eval_box(&straddling, EvalMode::Permissive).unwrap();
        assert!((img.comp(1).lo() - 0.6).abs() < 1e-12);
        assert!(*img.comp(1).hi() >= 1.0 && *img.comp(1).hi() <= 1.0f64.next_up());
        assert!(m.eval_box(&outside, EvalMode::Permissive).is_err());
    }

    #[test]
    fn horseshoe_fixed_point_values() {
        let m = MapSpec::AffineHorseshoe(Horseshoe::<BigRational>::canonical(2).unwrap());
        let p = vec![q(0, 1), q(0, 1)];
        assert_eq!(m.eval_point(&p, EvalMode::Strict).unwrap(), p);
        let fp = vec![q(3, 4), q(3, 4)];
        assert_eq!(m.eval_point(&fp, EvalMode::Strict).unwrap(), fp);
        // The word-01 two-cycle: (9/10, 3/10) <-> (3/10, 9/10).
        let a = vec![q(9, 10), q(3, 10)];
        let b = vec![q(3, 10), q(9, 10)];
        assert_eq!(m.eval_point(&a, EvalMode::Strict).unwrap(), b);
        assert_eq!(m.eval_point(&b, EvalMode::Strict).unwrap(), a);
    }

    #[test]
    fn clamped_extension_stays_in_target() {
        let inner = MapSpec::AffineHorseshoe(Horseshoe::<f64>::canonical(2).unwrap());
        let square = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let lower = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0 / 3.0)]).unwrap();
        let ext = MapSpec::ClampedExtension(Box::new(ClampedExt {
            inner,
            source: lower,
            target: square.clone(),
        }));
        let wild = BoxN::from_endpoints(vec![(-5.0, 5.0), (-5.0, 5.0)]).unwrap();
        let img = ext.eval_box(&wild, EvalMode::Permissive).unwrap();
        assert!(square.contains_box(&img));
        // Inside the source, where the image is in the target, the
        // extension agrees with the inner map.
        let p = [0.3, 0.2];
        let inner2 = MapSpec::AffineHorseshoe(Horseshoe::<f64>::canonical(2).unwrap());
        assert_eq!(
            ext.eval_point(&p, EvalMode::Permissive).unwrap(),
            inner2.eval_point(&p, EvalMode::Permissive).unwrap()
        );
    }

    #[test]
    fn composition_chains_dimensions() {
        let a = MapSpec::AffineHorseshoe(Horseshoe::<f64>::canonical(2).unwrap());
        let b = MapSpec::AffineHorseshoe(Horseshoe::<f64>::canonical(3).unwrap());
        assert!(MapSpec::compose(vec![a.clone(), b]).is_err());
        let twice = MapSpec::compose(vec![a.clone(), a]).unwrap();
        let p = twice.eval_point(&[0.75, 0.75], EvalMode::Strict).unwrap();
        assert_eq!(p, vec![0.75, 0.75]);
    }

    #[test]
    fn fixed_point_field_subtracts_identity() {
        let m = MapSpec::AffineHorseshoe(Horseshoe::<BigRational>::canonical(2).unwrap());
        let f = FixedPointField::new(&m, EvalMode::Permissive, None).unwrap();
        let b = BoxN::from_endpoints(vec![
            (q(7, 10), q(4, 5)),
            (q(7, 10), q(4, 5)),
        ])
        .unwrap();
        let out = f.eval_box(&b).unwrap();
        // The fixed point (3/4, 3/4) lies inside, so 0 is in both components.
        assert!(out.comp(0).contains(&q(0, 1)));
        assert!(out.comp(1).contains(&q(0, 1)));
        assert_eq!(f.eval_point(&[q(3, 4), q(3, 4)]).unwrap(), vec![q(0, 1), q(0, 1)]);
    }

    #[test]
    fn custom_map_round_trip() {
        let m: MapSpec<f64> = MapSpec::Custom(
            ExprMap::parse_lines("x0 + x1\nx0 - x1", 2).unwrap(),
        );
        assert_eq!(m.dims_out(), 2);
        assert_eq!(m.eval_point(&[2.0, 1.0], EvalMode::Permissive).unwrap(), vec![3.0, 1.0]);
        let bad = ExprMap::<f64>::parse_lines("x0 + x5", 2);
        assert!(bad.is_err());
    }
}
