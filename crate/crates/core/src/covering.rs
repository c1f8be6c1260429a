//! Covering and stretching certification.
//!
//! An oriented rectangle stretches to another when every path joining the
//! source's two marked faces carries a sub-path whose image stays in the
//! target and joins the target's marked faces. That path-quantified
//! condition is not decidable from box evaluations alone, so this module
//! offers three sufficient criteria plus a sampling falsifier:
//!
//! * **Face covering**: the expansion component's range on one source face
//!   sits at or below the target interval and on the opposite face at or
//!   above it (either orientation), while the remaining components contract
//!   into the target. Strongest criterion, fails on maps that fold.
//! * **Boundary stretching**: the image of a compact slab lands in the
//!   target body with the slab's faces carried into the target's faces.
//! * **Phase separation**: for components of the form
//!   `a0 + c*trig(2*pi*L(x))` with affine `L`, a full-period gap between
//!   the phase ranges on the two faces forces every joining path to sweep
//!   the trig function through a complete period, so the component covers
//!   the full amplitude interval along every path. This is how folding maps
//!   that fail face covering are certified.
//!
//! `Inconclusive` means the tried criterion did not decide; `Falsified` is
//! reserved for rigorously proven violations (point enclosures strictly
//! outside the required ranges, or an amplitude interval too short to ever
//! cover the target).

use crate::dynsys::{EvalMode, MapSpec};
use crate::error::{Error, Result};
use crate::geometry::{is_horizontal_slab, OrientedRect};
use crate::interval::{BoxN, Interval, Side};
use crate::scalar::Scalar;
use crate::Status;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Which criterion produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StretchMethod {
    FaceCovering,
    Boundary,
    Slab,
    Phase,
    Sampled,
}

/// Face enclosures certifying one expansion direction.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceAxisEvidence<S: Scalar> {
    pub axis: usize,
    /// `false`: left face maps at-or-below the target, right face at-or-above.
    pub swapped: bool,
    pub left: Interval<S>,
    pub right: Interval<S>,
}

/// A rigorous point refutation: an enclosure of the map's value at a single
/// face point, lying strictly on the wrong side of the required bound.
#[derive(Clone, Debug, PartialEq)]
pub struct PointWitness<S: Scalar> {
    pub point: Vec<S>,
    pub side: Side,
    pub value: Interval<S>,
}

/// Proof that the face-covering sandwich fails on one axis in both
/// orientations.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceViolation<S: Scalar> {
    pub axis: usize,
    pub left: Interval<S>,
    pub right: Interval<S>,
    /// Refutes the straight orientation (left low / right high).
    pub straight: PointWitness<S>,
    /// Refutes the swapped orientation.
    pub swapped: PointWitness<S>,
}

/// Method-specific data backing a [`StretchCertificate`].
#[derive(Clone, Debug, PartialEq)]
pub enum StretchEvidence<S: Scalar> {
    FaceCovering {
        directions: Vec<usize>,
        axes: Vec<FaceAxisEvidence<S>>,
        /// Whole-box enclosures for the non-expansion components.
        contractions: Vec<(usize, Interval<S>)>,
        violation: Option<FaceViolation<S>>,
    },
    Boundary {
        swapped: bool,
        image: BoxN<S>,
        left_image: BoxN<S>,
        right_image: BoxN<S>,
    },
    Phase {
        left_phase: Interval<S>,
        right_phase: Interval<S>,
        /// Certified lower bound on the phase sweep, in periods.
        gap: S,
        mirrored: bool,
        /// Outward enclosure of the component's reachable interval.
        amplitude: Interval<S>,
    },
    Sampled {
        n_paths: usize,
        n_samples: usize,
        seed: u64,
        counterexample: Option<usize>,
    },
}

/// Outcome of one stretching check, with enough data to replay it.
#[derive(Clone, Debug, PartialEq)]
pub struct StretchCertificate<S: Scalar> {
    pub source: OrientedRect<S>,
    pub target: OrientedRect<S>,
    /// The compact subset whose image was controlled (defaults to the
    /// source body).
    pub k: BoxN<S>,
    pub method: StretchMethod,
    pub mode: EvalMode,
    pub status: Status,
    pub evidence: StretchEvidence<S>,
    pub reason: Option<String>,
}

impl<S: Scalar> StretchCertificate<S> {
    /// Re-run the stored method on the stored inputs and compare. The
    /// checkers are deterministic, so a healthy certificate reproduces
    /// itself field for field.
    pub fn replay(&self, psi: &MapSpec<S>) -> Result<bool> {
        let fresh = match (&self.method, &self.evidence) {
            (StretchMethod::FaceCovering, StretchEvidence::FaceCovering { directions, .. }) => {
                check_face_covering(psi, self.source.body(), self.target.body(), directions, self.mode)?
            }
            (StretchMethod::Boundary, _) => {
                check_boundary_stretching(psi, &self.source, &self.target, None, self.mode)?
            }
            (StretchMethod::Slab, _) => {
                let slab = OrientedRect::new(self.k.clone(), self.source.axis())?;
                check_boundary_stretching(psi, &self.source, &self.target, Some(&slab), self.mode)?
            }
            (StretchMethod::Phase, _) => {
                let axis = self.target.axis();
                let target = self.target.body().comp(axis).clone();
                check_phase_covering(psi, &self.source, &target, axis)?
            }
            (StretchMethod::Sampled, StretchEvidence::Sampled { n_paths, n_samples, seed, .. }) => {
                let verdict =
                    falsify_by_sampling(psi, &self.source, &self.target, *n_paths, *n_samples, *seed)?;
                certificate_from_sampling(&self.source, &self.target, *n_paths, *n_samples, *seed, &verdict)
            }
            _ => return Ok(false),
        };
        Ok(fresh == *self)
    }
}

/// Check the face-covering criterion: for each axis `j` in `directions`,
/// the enclosure of component `j` over the two `j`-faces of `r1` must
/// sandwich the target interval `[c_j, d_j]` (left at-or-below `c_j` and
/// right at-or-above `d_j`, or the swap); every other component's enclosure
/// over all of `r1` must land inside its target interval.
///
/// When the sandwich fails in both orientations, a deterministic lattice of
/// face points is searched for rigorous point refutations of both; only if
/// both are found is the certificate `Falsified`. Contraction failures are
/// reported `Inconclusive` (an enclosure that bulges out of the target does
/// not prove the true range does).
pub fn check_face_covering<S: Scalar>(
    psi: &MapSpec<S>,
    r1: &BoxN<S>,
    r2: &BoxN<S>,
    directions: &[usize],
    mode: EvalMode,
) -> Result<StretchCertificate<S>> {
    let n = r1.dims();
    if psi.dims_in() != n || psi.dims_out() != n || r2.dims() != n {
        return Err(Error::DimMismatch { expected: n, got: psi.dims_in().max(r2.dims()) });
    }
    for &j in directions {
        if j >= n {
            return Err(Error::DimMismatch { expected: n, got: j });
        }
    }
    let axis = directions.first().copied().unwrap_or(0);
    let source = OrientedRect::new(r1.clone(), axis)?;
    let target = OrientedRect::new(r2.clone(), axis)?;

    let mut axes = Vec::new();
    let mut violation = None;
    let mut reason = None;
    let mut status = Status::Certified;

    for &j in directions {
        let left_face = r1.face(j, Side::Left)?;
        let right_face = r1.face(j, Side::Right)?;
        let left = psi.eval_box(&left_face, mode)?.comp(j).clone();
        let right = psi.eval_box(&right_face, mode)?.comp(j).clone();
        let c = r2.comp(j).lo();
        let d = r2.comp(j).hi();

        let straight_ok = *left.hi() <= *c && *right.lo() >= *d;
        let swapped_ok = *left.lo() >= *d && *right.hi() <= *c;
        if straight_ok || swapped_ok {
            axes.push(FaceAxisEvidence { axis: j, swapped: !straight_ok, left, right });
            continue;
        }

        // Neither orientation certified: attempt rigorous refutation of both.
        let refute = refute_sandwich(psi, &left_face, &right_face, j, c, d, mode)?;
        match refute {
            (Some(straight), Some(swapped)) => {
                violation = Some(FaceViolation { axis: j, left, right, straight, swapped });
                status = Status::Falsified;
                break;
            }
            _ => {
                if status == Status::Certified {
                    status = Status::Inconclusive;
                    reason = Some(format!("face sandwich undecided on axis {j}"));
                }
            }
        }
    }

    let mut contractions = Vec::new();
    if status != Status::Falsified {
        let whole = psi.eval_box(r1, mode)?;
        for j in 0..n {
            if directions.contains(&j) {
                continue;
            }
            let enc = whole.comp(j).clone();
            if !r2.comp(j).contains_interval(&enc) && status == Status::Certified {
                status = Status::Inconclusive;
                reason = Some(format!("component {j} not contracted into the target"));
            }
            contractions.push((j, enc));
        }
    }

    Ok(StretchCertificate {
        source,
        target,
        k: r1.clone(),
        method: StretchMethod::FaceCovering,
        mode,
        status,
        evidence: StretchEvidence::FaceCovering {
            directions: directions.to_vec(),
            axes,
            contractions,
            violation,
        },
        reason,
    })
}

/// Refutations for the two sandwich orientations: straight, then swapped.
type RefutationPair<S> = (Option<PointWitness<S>>, Option<PointWitness<S>>);

/// Search deterministic face lattices for point enclosures refuting the two
/// sandwich orientations. Returns (straight refutation, swapped refutation).
///
/// The straight orientation (left face at-or-below `c`, right at-or-above
/// `d`) is refuted by a left-face point whose value is strictly above `c`
/// or a right-face point strictly below `d`; the swapped orientation
/// mirrors this.
fn refute_sandwich<S: Scalar>(
    psi: &MapSpec<S>,
    left_face: &BoxN<S>,
    right_face: &BoxN<S>,
    comp: usize,
    c: &S,
    d: &S,
    mode: EvalMode,
) -> Result<RefutationPair<S>> {
    let mut straight = None;
    let mut swapped = None;
    for (side, face) in [(Side::Left, left_face), (Side::Right, right_face)] {
        for p in face_lattice(face) {
            if straight.is_some() && swapped.is_some() {
                return Ok((straight, swapped));
            }
            let Ok(enc) = psi.eval_box(&BoxN::from_point(&p)?, mode) else {
                continue;
            };
            let v = enc.comp(comp);
            let above_c = *v.lo() > *c;
            let below_d = *v.hi() < *d;
            let refutes_straight = match side {
                Side::Left => above_c,
                Side::Right => below_d,
            };
            let refutes_swapped = match side {
                Side::Left => below_d,
                Side::Right => above_c,
            };
            if refutes_straight && straight.is_none() {
                straight =
                    Some(PointWitness { point: p.clone(), side, value: v.clone() });
            }
            if refutes_swapped && swapped.is_none() {
                swapped = Some(PointWitness { point: p, side, value: v.clone() });
            }
        }
    }
    Ok((straight, swapped))
}

/// Deterministic grid of points on a face box: evenly spaced (endpoints
/// included) along each non-degenerate axis, with the per-axis count chosen
/// so the total stays near a thousand points.
fn face_lattice<S: Scalar>(face: &BoxN<S>) -> Vec<Vec<S>> {
    let free: Vec<usize> =
        (0..face.dims()).filter(|&a| *face.comp(a).lo() < *face.comp(a).hi()).collect();
    if free.is_empty() {
        return vec![face.lower_corner()];
    }
    let per_axis = match free.len() {
        1 => 33,
        k => {
            let g = (1024f64.powf(1.0 / k as f64)).floor() as usize;
            g.clamp(2, 33)
        }
    };
    let base = face.lower_corner();
    let mut points = Vec::new();
    let mut counter = vec![0usize; free.len()];
    loop {
        let mut p = base.clone();
        for (slot, &a) in free.iter().enumerate() {
            let lo = face.comp(a).lo().clone();
            let hi = face.comp(a).hi().clone();
            let frac = S::from_ratio(counter[slot] as i64, (per_axis - 1) as i64);
            let mut coord = lo.add_near(&hi.sub_near(&lo).mul_near(&frac));
            if coord < lo {
                coord = lo;
            } else if coord > hi {
                coord = hi;
            }
            p[a] = coord;
        }
        points.push(p);
        let mut slot = free.len();
        loop {
            if slot == 0 {
                return points;
            }
            slot -= 1;
            counter[slot] += 1;
            if counter[slot] < per_axis {
                break;
            }
            counter[slot] = 0;
        }
    }
}

/// Check the boundary criterion for stretching: the image of the compact
/// set `K` (the body of `k` when given, else all of `x`) must land in the
/// target body, and the two faces of `K` transverse to the source axis must
/// map into the target's two marked faces (in either order; `swapped`
/// records which). Mapping into a face means the target-axis component
/// collapses onto the face value while the other components stay inside the
/// target.
pub fn check_boundary_stretching<S: Scalar>(
    psi: &MapSpec<S>,
    x: &OrientedRect<S>,
    y: &OrientedRect<S>,
    k: Option<&OrientedRect<S>>,
    mode: EvalMode,
) -> Result<StretchCertificate<S>> {
    let n = x.dims();
    if psi.dims_in() != n || psi.dims_out() != y.dims() {
        return Err(Error::DimMismatch { expected: n, got: psi.dims_in() });
    }
    if let Some(slab) = k {
        if !is_horizontal_slab(x, slab) {
            return Err(Error::NotASlab { kind: "horizontal" });
        }
    }
    let body = k.map(|s| s.body().clone()).unwrap_or_else(|| x.body().clone());
    let method = if k.is_some() { StretchMethod::Slab } else { StretchMethod::Boundary };

    let image = psi.eval_box(&body, mode)?;
    let left_image = psi.eval_box(&body.face(x.axis(), Side::Left)?, mode)?;
    let right_image = psi.eval_box(&body.face(x.axis(), Side::Right)?, mode)?;

    let inside = y.body().contains_box(&image);
    let straight = lands_in_face(&left_image, y, Side::Left)
        && lands_in_face(&right_image, y, Side::Right);
    let swapped = lands_in_face(&left_image, y, Side::Right)
        && lands_in_face(&right_image, y, Side::Left);

    let (status, reason) = if inside && (straight || swapped) {
        (Status::Certified, None)
    } else if !inside {
        (Status::Inconclusive, Some("image enclosure leaves the target body".to_string()))
    } else {
        (Status::Inconclusive, Some("face images do not collapse into the target faces".to_string()))
    };

    Ok(StretchCertificate {
        source: x.clone(),
        target: y.clone(),
        k: body,
        method,
        mode,
        status,
        evidence: StretchEvidence::Boundary { swapped: swapped && !straight, image, left_image, right_image },
        reason,
    })
}

fn lands_in_face<S: Scalar>(image: &BoxN<S>, y: &OrientedRect<S>, side: Side) -> bool {
    let e = y.axis();
    let val = match side {
        Side::Left => y.body().comp(e).lo(),
        Side::Right => y.body().comp(e).hi(),
    };
    let ec = image.comp(e);
    if !(*ec.lo() >= *val && *ec.hi() <= *val) {
        return false;
    }
    (0..image.dims()).filter(|&a| a != e).all(|a| y.body().comp(a).contains_interval(image.comp(a)))
}

/// Check the phase-separation criterion for a component of the form
/// `a0 + c * trig(2*pi*L(x))` with affine `L`.
///
/// Working in period units, let `P_l` and `P_r` enclose `L` over the two
/// marked faces of `x`. Any path joining the faces carries a continuous
/// phase from inside `P_l` to inside `P_r`, so it sweeps at least the
/// interval between them. If that sweep provably contains a full period,
/// the trig factor passes through both extremes along every path, hence the
/// component's image along every path covers `[a0 - c, a0 + c]`; whenever
/// that interval in turn covers `target`, stretching along the paths holds
/// in the `expansion_axis` component.
///
/// `Falsified` is returned only on the amplitude test: if
/// `[a0 - c, a0 + c]` provably fails to reach an endpoint of `target`, no
/// point of the rectangle ever maps beyond it, so no criterion can hold.
pub fn check_phase_covering<S: Scalar>(
    psi: &MapSpec<S>,
    x: &OrientedRect<S>,
    target: &Interval<S>,
    expansion_axis: usize,
) -> Result<StretchCertificate<S>> {
    if psi.dims_in() != x.dims() {
        return Err(Error::DimMismatch { expected: x.dims(), got: psi.dims_in() });
    }
    let form = psi
        .phase_form(expansion_axis)
        .ok_or(Error::NotPhaseForm { component: expansion_axis })?;

    let left_phase = form.phase_over(&x.left_face())?;
    let right_phase = form.phase_over(&x.right_face())?;

    let gap_straight = right_phase.lo().sub_down(left_phase.hi());
    let gap_mirrored = left_phase.lo().sub_down(right_phase.hi());
    let (gap, mirrored) =
        if gap_straight >= gap_mirrored { (gap_straight, false) } else { (gap_mirrored, true) };

    let amp_lo_out = form.base.sub_down(&form.amp);
    let amp_hi_out = form.base.add_up(&form.amp);
    let amp_lo_in = form.base.sub_up(&form.amp);
    let amp_hi_in = form.base.add_down(&form.amp);
    let amplitude = Interval::new(amp_lo_out.clone(), amp_hi_out.clone())?;

    // Amplitude refutation uses the outward bounds: even the widest reading
    // of the reachable interval misses the target endpoint.
    let amp_refuted = amp_hi_out < *target.hi() || amp_lo_out > *target.lo();
    // Certification uses the inward bounds: even the narrowest reading
    // covers the target.
    let amp_covers = amp_lo_in <= *target.lo() && amp_hi_in >= *target.hi();
    let full_period = gap >= S::one();

    let (status, reason) = if amp_refuted {
        (Status::Falsified, Some("amplitude interval cannot reach the target".to_string()))
    } else if full_period && amp_covers {
        (Status::Certified, None)
    } else if !full_period {
        (Status::Inconclusive, Some("phase gap smaller than one period".to_string()))
    } else {
        (Status::Inconclusive, Some("amplitude coverage of the target undecided".to_string()))
    };

    let mut target_body = x.body().clone();
    target_body.set_comp(expansion_axis, target.clone());
    Ok(StretchCertificate {
        source: x.clone(),
        target: OrientedRect::new(target_body, expansion_axis)?,
        k: x.body().clone(),
        method: StretchMethod::Phase,
        mode: EvalMode::Permissive,
        status,
        evidence: StretchEvidence::Phase { left_phase, right_phase, gap, mirrored, amplitude },
        reason,
    })
}

/// A sampled path along which no qualifying sub-path was found.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexamplePath<S: Scalar> {
    pub path_index: usize,
    pub points: Vec<Vec<S>>,
    pub images: Vec<Vec<S>>,
}

/// Verdict of [`falsify_by_sampling`].
#[derive(Clone, Debug, PartialEq)]
pub enum SamplingVerdict<S: Scalar> {
    CounterexamplePath(CounterexamplePath<S>),
    NoCounterexampleFound,
}

/// Probe the path-quantified stretching condition with a deterministic
/// pseudo-random family of paths joining the marked faces of `x`.
///
/// Path 0 is the straight midline; each further path moves linearly along
/// the source axis while every transverse coordinate follows a seeded
/// sinusoid (random center, amplitude, integer frequency 1..=3, and phase),
/// clamped into the rectangle. Each path is discretized at `n_samples`
/// points; a path passes if some maximal run of consecutive samples whose
/// images stay in the (slightly inflated) target has target-axis images
/// touching both target faces within the sample resolution (a base
/// fraction of the target width plus the largest observed per-axis image
/// step, so steep maps are not failed for granularity). The first path with
/// no passing run is returned as a counterexample.
///
/// This is a falsifier, not a verifier: tolerances are permissive (inflated
/// membership, relaxed face touching) precisely so that a configuration
/// certified by any rigorous criterion can never produce a counterexample
/// here, while grossly non-stretching maps are caught quickly.
pub fn falsify_by_sampling<S: Scalar>(
    psi: &MapSpec<S>,
    x: &OrientedRect<S>,
    y: &OrientedRect<S>,
    n_paths: usize,
    n_samples: usize,
    seed: u64,
) -> Result<SamplingVerdict<S>> {
    let n = x.dims();
    if psi.dims_in() != n || psi.dims_out() != y.dims() {
        return Err(Error::DimMismatch { expected: n, got: psi.dims_in() });
    }
    if n_paths == 0 || n_samples == 0 {
        return Err(Error::HypothesisFailed { reason: "need at least one path and sample".into() });
    }
    let n_samples = n_samples.max(4);
    let transverse: Vec<usize> = (0..n).filter(|&a| a != x.axis()).collect();

    // Sinusoid parameters drawn sequentially so the family is reproducible;
    // evaluation below is order-independent.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<Vec<(f64, f64, f64, f64)>> = Vec::with_capacity(n_paths);
    for path in 0..n_paths {
        if path == 0 {
            params.push(transverse.iter().map(|_| (0.5, 0.0, 1.0, 0.0)).collect());
        } else {
            params.push(
                transverse
                    .iter()
                    .map(|_| {
                        let center: f64 = rng.random();
                        let amp: f64 = rng.random::<f64>() * 0.5;
                        let freq: f64 = rng.random_range(1..=3) as f64;
                        let phase: f64 = rng.random();
                        (center, amp, freq, phase)
                    })
                    .collect(),
            );
        }
    }

    let failing = (0..n_paths)
        .into_par_iter()
        .map(|i| !path_passes(psi, x, y, &transverse, &params[i], n_samples))
        .collect::<Vec<bool>>();
    match failing.iter().position(|&f| f) {
        None => Ok(SamplingVerdict::NoCounterexampleFound),
        Some(i) => {
            let points = path_points(x, &transverse, &params[i], n_samples);
            let images = points
                .iter()
                .map(|p| psi.eval_point(p, EvalMode::Permissive).unwrap_or_else(|_| vec![]))
                .collect();
            Ok(SamplingVerdict::CounterexamplePath(CounterexamplePath {
                path_index: i,
                points,
                images,
            }))
        }
    }
}

fn path_points<S: Scalar>(
    x: &OrientedRect<S>,
    transverse: &[usize],
    params: &[(f64, f64, f64, f64)],
    n_samples: usize,
) -> Vec<Vec<S>> {
    let n = x.dims();
    let e = x.axis();
    (0..n_samples)
        .map(|i| {
            let t = i as f64 / (n_samples - 1) as f64;
            let mut p = vec![S::zero(); n];
            p[e] = coord_at(x.body().comp(e), t);
            for (slot, &a) in transverse.iter().enumerate() {
                let (center, amp, freq, phase) = params[slot];
                let s = center + amp * (std::f64::consts::TAU * (freq * t + phase)).sin();
                p[a] = coord_at(x.body().comp(a), s.clamp(0.0, 1.0));
            }
            p
        })
        .collect()
}

fn coord_at<S: Scalar>(range: &Interval<S>, frac: f64) -> S {
    let w = range.hi().sub_near(range.lo());
    let mut v = range.lo().add_near(&w.mul_near(&S::from_f64(frac)));
    if v < *range.lo() {
        v = range.lo().clone();
    } else if v > *range.hi() {
        v = range.hi().clone();
    }
    v
}

fn path_passes<S: Scalar>(
    psi: &MapSpec<S>,
    x: &OrientedRect<S>,
    y: &OrientedRect<S>,
    transverse: &[usize],
    params: &[(f64, f64, f64, f64)],
    n_samples: usize,
) -> bool {
    let e = y.axis();
    let points = path_points(x, transverse, params, n_samples);
    let images: Vec<Option<Vec<S>>> =
        points.iter().map(|p| psi.eval_point(p, EvalMode::Permissive).ok()).collect();

    // Sample resolution per axis: a base fraction of the target width plus
    // the largest image step between consecutive samples, so the tolerance
    // tracks how coarsely this particular path resolves the image. A
    // continuous crossing cannot slip between samples by more than this.
    let resolution = S::from_f64(4.0 / n_samples as f64);
    let tol: Vec<S> = (0..y.dims())
        .map(|a| {
            let mut step = S::zero();
            for w in images.windows(2) {
                if let (Some(p), Some(q)) = (&w[0], &w[1]) {
                    let d = q[a].sub_near(&p[a]).abs();
                    if d > step {
                        step = d;
                    }
                }
            }
            y.body().comp(a).width().mul_near(&resolution).add_near(&step)
        })
        .collect();
    let lo_touch = y.body().comp(e).lo().add_near(&tol[e]);
    let hi_touch = y.body().comp(e).hi().sub_near(&tol[e]);

    let in_target = |img: &Vec<S>| {
        (0..y.dims()).all(|a| {
            let r = y.body().comp(a);
            img[a] >= r.lo().sub_near(&tol[a]) && img[a] <= r.hi().add_near(&tol[a])
        })
    };

    let mut i = 0;
    while i < n_samples {
        match &images[i] {
            Some(img) if in_target(img) => {
                let mut min_e = img[e].clone();
                let mut max_e = img[e].clone();
                let mut j = i + 1;
                while j < n_samples {
                    match &images[j] {
                        Some(im) if in_target(im) => {
                            if im[e] < min_e {
                                min_e = im[e].clone();
                            }
                            if im[e] > max_e {
                                max_e = im[e].clone();
                            }
                            j += 1;
                        }
                        _ => break,
                    }
                }
                if min_e <= lo_touch && max_e >= hi_touch {
                    return true;
                }
                i = j;
            }
            _ => i += 1,
        }
    }
    false
}

/// Wrap a sampling verdict as a certificate for reporting. A counterexample
/// is only sample-level evidence, so the status is `Falsified` in name but
/// flagged through the method; callers treat sampled falsifications as
/// advisory.
pub fn certificate_from_sampling<S: Scalar>(
    x: &OrientedRect<S>,
    y: &OrientedRect<S>,
    n_paths: usize,
    n_samples: usize,
    seed: u64,
    verdict: &SamplingVerdict<S>,
) -> StretchCertificate<S> {
    let (status, counterexample, reason) = match verdict {
        SamplingVerdict::NoCounterexampleFound => (Status::Inconclusive, None, Some("no counterexample found; sampling cannot certify".to_string())),
        SamplingVerdict::CounterexamplePath(p) => {
            (Status::Falsified, Some(p.path_index), Some("sampled path admits no qualifying sub-path".to_string()))
        }
    };
    StretchCertificate {
        source: x.clone(),
        target: y.clone(),
        k: x.body().clone(),
        method: StretchMethod::Sampled,
        mode: EvalMode::Permissive,
        status,
        evidence: StretchEvidence::Sampled { n_paths, n_samples, seed, counterexample },
        reason,
    }
}
