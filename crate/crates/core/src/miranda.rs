//! Zero certification: sign-condition checks, zero search, and branch
//! tracking.
//!
//! The core test takes a box and a vector field of matching dimension and
//! inspects the field's `i`-th component on the two faces transverse to
//! axis `i`. If every component is strictly one-signed on its pair of
//! opposite faces, with opposite signs, the box must contain a zero of the
//! field. The check works with face enclosures, so a `Certified` outcome is
//! rigorous; `Inconclusive` means the face enclosures straddle zero at this
//! box, not that no zero exists.
//!
//! Zero search combines branch-and-prune bisection with that test. Sign
//! conditions often fail on a system whose zero has a rotated gradient, so
//! the search also tries a preconditioned system `G = A * F` with `A` the
//! inverse of a numeric midpoint Jacobian; `A` is certified nonsingular by
//! an exact rational determinant, which makes the zero sets of `F` and `G`
//! identical and a certificate for `G` a certificate for `F`.

use crate::dynsys::VectorField;
use crate::error::{Error, Result};
use crate::interval::{lex_cmp, BoxN, Interval, Side};
use crate::scalar::{Round, Scalar};
use crate::Status;
use num_rational::BigRational;
use num_traits::Zero;

/// Strict positivity that also rejects incomparable values: a NaN
/// tolerance or cell size must fail the precondition, not slip past it.
fn strictly_positive<S: Scalar>(v: &S) -> bool {
    v.partial_cmp(&S::zero()) == Some(std::cmp::Ordering::Greater)
}

/// Sign orientation of one component across its pair of opposite faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPattern {
    /// Strictly negative on the low face, strictly positive on the high.
    NegToPos,
    /// Strictly positive on the low face, strictly negative on the high.
    PosToNeg,
}

/// Face enclosures backing one axis of a sign-condition certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisEvidence<S: Scalar> {
    pub axis: usize,
    pub pattern: SignPattern,
    pub left: Interval<S>,
    pub right: Interval<S>,
}

/// Outcome of a sign-condition check on one box.
#[derive(Clone, Debug, PartialEq)]
pub struct MirandaOutcome<S: Scalar> {
    pub status: Status,
    /// Certified axes, in order; on `Inconclusive` the axes certified so far.
    pub evidence: Vec<AxisEvidence<S>>,
    /// For `Inconclusive`: first axis whose faces could not be one-signed.
    pub failed_axis: Option<usize>,
    /// For `Falsified`: component whose enclosure over the whole box
    /// excludes zero.
    pub excluded_component: Option<usize>,
}

/// Check the sign conditions on `b`. `pattern` fixes the orientation per
/// axis; `None` tries both orientations each axis. As a cheap falsification
/// step, a component whose enclosure over the whole box excludes zero
/// yields `Falsified`.
pub fn check_miranda<S: Scalar, F: VectorField<S>>(
    f: &F,
    b: &BoxN<S>,
    pattern: Option<&[SignPattern]>,
) -> Result<MirandaOutcome<S>> {
    let n = b.dims();
    if f.dims_in() != n || f.dims_out() != n {
        return Err(Error::DimMismatch { expected: n, got: f.dims_out() });
    }
    if let Some(p) = pattern {
        if p.len() != n {
            return Err(Error::DimMismatch { expected: n, got: p.len() });
        }
    }

    let whole = f.eval_box(b)?;
    for (i, c) in whole.comps().iter().enumerate() {
        if c.excludes_zero() {
            return Ok(MirandaOutcome {
                status: Status::Falsified,
                evidence: vec![],
                failed_axis: None,
                excluded_component: Some(i),
            });
        }
    }

    let zero = S::zero();
    let mut evidence = Vec::with_capacity(n);
    for axis in 0..n {
        let left = face_component_enclosure(f, &b.face(axis, Side::Left)?, axis)?;
        let right = face_component_enclosure(f, &b.face(axis, Side::Right)?, axis)?;
        let neg_to_pos = *left.hi() < zero && *right.lo() > zero;
        let pos_to_neg = *left.lo() > zero && *right.hi() < zero;
        let chosen = match pattern.map(|p| p[axis]) {
            Some(SignPattern::NegToPos) => neg_to_pos.then_some(SignPattern::NegToPos),
            Some(SignPattern::PosToNeg) => pos_to_neg.then_some(SignPattern::PosToNeg),
            None => {
                if neg_to_pos {
                    Some(SignPattern::NegToPos)
                } else if pos_to_neg {
                    Some(SignPattern::PosToNeg)
                } else {
                    None
                }
            }
        };
        match chosen {
            Some(p) => evidence.push(AxisEvidence { axis, pattern: p, left, right }),
            None => {
                return Ok(MirandaOutcome {
                    status: Status::Inconclusive,
                    evidence,
                    failed_axis: Some(axis),
                    excluded_component: None,
                });
            }
        }
    }
    Ok(MirandaOutcome { status: Status::Certified, evidence, failed_axis: None, excluded_component: None })
}

/// Box-evaluation budget when adaptively refining one face enclosure.
const FACE_SPLIT_BUDGET: usize = 4096;

/// Enclosure of component `comp` of `f` over `face`, adaptively bisecting
/// subboxes whose enclosure straddles zero and returning the hull of the
/// leaf enclosures. The hull is strictly one-signed exactly when every leaf
/// is, so the caller's sign test is unchanged; splitting merely recovers
/// correlation a single interval evaluation loses (on a preconditioned
/// system the componentwise dot product peaks at different face points per
/// term, which pushes an endpoint of the single-evaluation enclosure across
/// zero even when the true range is one-signed). Breadth-first order and a
/// fixed budget keep the result deterministic for certificate replay. Faces
/// that truly change sign exhaust the budget and report a straddling hull.
fn face_component_enclosure<S: Scalar, F: VectorField<S>>(
    f: &F,
    face: &BoxN<S>,
    comp: usize,
) -> Result<Interval<S>> {
    let zero = S::zero();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(face.clone());
    let mut evals = 0usize;
    let mut hull: Option<Interval<S>> = None;
    while let Some(bx) = queue.pop_front() {
        evals += 1;
        let enc = f.eval_box(&bx)?.comp(comp).clone();
        let one_signed = *enc.hi() < zero || *enc.lo() > zero;
        if !one_signed && evals < FACE_SPLIT_BUDGET {
            if let Ok((l, r)) = bx.bisect(None) {
                queue.push_back(l);
                queue.push_back(r);
                continue;
            }
        }
        hull = Some(match hull {
            Some(h) => h.hull(&enc),
            None => enc,
        });
    }
    Ok(hull.expect("a face always yields at least one leaf"))
}

/// The field `x -> A * F(x)` for a square matrix `A` over the scalars.
pub struct PreconditionedField<'a, S: Scalar, F: VectorField<S>> {
    inner: &'a F,
    matrix: &'a [Vec<S>],
}

impl<S: Scalar, F: VectorField<S>> VectorField<S> for PreconditionedField<'_, S, F> {
    fn dims_in(&self) -> usize {
        self.inner.dims_in()
    }
    fn dims_out(&self) -> usize {
        self.inner.dims_out()
    }
    fn eval_box(&self, b: &BoxN<S>) -> Result<BoxN<S>> {
        let fv = self.inner.eval_box(b)?;
        let comps = self
            .matrix
            .iter()
            .map(|row| {
                let mut acc = Interval::point(S::zero())?;
                for (a, c) in row.iter().zip(fv.comps()) {
                    acc = acc.add(&c.scale(a));
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        BoxN::new(comps)
    }
    fn eval_point(&self, p: &[S]) -> Result<Vec<S>> {
        let fv = self.inner.eval_point(p)?;
        Ok(self
            .matrix
            .iter()
            .map(|row| {
                let mut acc = S::zero();
                for (a, v) in row.iter().zip(&fv) {
                    acc = acc.add_near(&a.mul_near(v));
                }
                acc
            })
            .collect())
    }
}

/// Exact determinant of a square scalar matrix, via rational elimination.
/// Soundness anchor for preconditioning: nonzero determinant proves the
/// matrix nonsingular, so `A*F` and `F` have identical zero sets.
pub fn exact_determinant<S: Scalar>(matrix: &[Vec<S>]) -> BigRational {
    let n = matrix.len();
    let mut m: Vec<Vec<BigRational>> =
        matrix.iter().map(|row| row.iter().map(|v| v.to_rational()).collect()).collect();
    let mut det = BigRational::from_integer(1.into());
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(pr) = pivot_row else {
            return <BigRational as Zero>::zero();
        };
        if pr != col {
            m.swap(pr, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        let (upper, lower) = m.split_at_mut(col + 1);
        let prow = &upper[col];
        for row in lower.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot;
            for (c, cell) in row.iter_mut().enumerate().skip(col) {
                *cell -= &factor * &prow[c];
            }
        }
    }
    det
}

/// Numeric inverse via Gauss-Jordan with partial pivoting, in the scalar's
/// round-to-nearest arithmetic. Returns `None` when a pivot vanishes.
fn invert_matrix<S: Scalar>(a: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a.to_vec();
    let mut inv: Vec<Vec<S>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
    for col in 0..n {
        let mut pr = col;
        let mut best = m[col][col].abs();
        for (r, row) in m.iter().enumerate().skip(col + 1) {
            let v = row[col].abs();
            if v > best {
                best = v;
                pr = r;
            }
        }
        if best == S::zero() {
            return None;
        }
        m.swap(pr, col);
        inv.swap(pr, col);
        let pivot = m[col][col].clone();
        for c in 0..n {
            m[col][c] = m[col][c].div_near(&pivot);
            inv[col][c] = inv[col][c].div_near(&pivot);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r][col].clone();
            if factor == S::zero() {
                continue;
            }
            for c in 0..n {
                let t = factor.mul_near(&m[col][c]);
                m[r][c] = m[r][c].sub_near(&t);
                let t = factor.mul_near(&inv[col][c]);
                inv[r][c] = inv[r][c].sub_near(&t);
            }
        }
    }
    Some(inv)
}

/// Finite-difference Jacobian at the box midpoint (numeric, used only to
/// build a preconditioner whose validity is certified separately).
fn midpoint_jacobian<S: Scalar, F: VectorField<S>>(f: &F, b: &BoxN<S>) -> Option<Vec<Vec<S>>> {
    let n = b.dims();
    let mid = b.midpoint();
    let quarter = S::from_ratio(1, 4);
    let floor = S::from_ratio(1, 1 << 20);
    let mut jac = vec![vec![S::zero(); n]; n];
    for j in 0..n {
        let mut h = b.comp(j).width().mul_near(&quarter);
        if h < floor {
            h = floor.clone();
        }
        let mut hi_p = mid.clone();
        hi_p[j] = hi_p[j].add_near(&h);
        let mut lo_p = mid.clone();
        lo_p[j] = lo_p[j].sub_near(&h);
        let fv_hi = f.eval_point(&hi_p).ok()?;
        let fv_lo = f.eval_point(&lo_p).ok()?;
        let two_h = h.add_near(&h);
        for i in 0..n {
            jac[i][j] = fv_hi[i].sub_near(&fv_lo[i]).div_near(&two_h);
        }
    }
    Some(jac)
}

/// A certificate that a box contains a zero of the field: the sign-condition
/// evidence plus the preconditioner (if one was needed). Replayable.
#[derive(Clone, Debug, PartialEq)]
pub struct MirandaCertificate<S: Scalar> {
    /// The box the conditions were verified on.
    pub domain: BoxN<S>,
    pub evidence: Vec<AxisEvidence<S>>,
    /// Preconditioning matrix, when the certificate is for `A * F`.
    pub preconditioner: Option<Vec<Vec<S>>>,
    /// Exact determinant of the preconditioner (nonzero), as a witness.
    pub preconditioner_det: Option<BigRational>,
}

impl<S: Scalar> MirandaCertificate<S> {
    /// Recompute the certificate against `f` and verify it reproduces the
    /// same evidence with strict signs. Returns the recomputed outcome.
    pub fn replay<F: VectorField<S>>(&self, f: &F) -> Result<bool> {
        let pattern: Vec<SignPattern> = self.evidence.iter().map(|e| e.pattern).collect();
        let outcome = match &self.preconditioner {
            Some(m) => {
                if exact_determinant(m).is_zero() {
                    return Ok(false);
                }
                let pf = PreconditionedField { inner: f, matrix: m };
                check_miranda(&pf, &self.domain, Some(&pattern))?
            }
            None => check_miranda(f, &self.domain, Some(&pattern))?,
        };
        Ok(outcome.status == Status::Certified && outcome.evidence == self.evidence)
    }
}

/// One reported zero region.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroEnclosure<S: Scalar> {
    /// Enclosure of the zero (the certified box when certified).
    pub enclosure: BoxN<S>,
    pub status: Status,
    pub certificate: Option<MirandaCertificate<S>>,
    /// The certified box extends past the search region boundary.
    pub boundary_inflated: bool,
    /// The merged candidate cluster was much wider than the tolerance,
    /// suggesting a non-isolated zero or a zero curve.
    pub non_isolated: bool,
    /// For non-certified regions: why certification was not achieved.
    pub reason: Option<String>,
}

/// Result of a zero search over a box.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSearch<S: Scalar> {
    /// Zero regions, sorted by lower corner (lexicographic).
    pub enclosures: Vec<ZeroEnclosure<S>>,
    pub budget_exhausted: bool,
    /// Number of boxes taken off the work queue.
    pub boxes_processed: usize,
}

impl<S: Scalar> ZeroSearch<S> {
    pub fn certified(&self) -> impl Iterator<Item = &ZeroEnclosure<S>> {
        self.enclosures.iter().filter(|e| e.status == Status::Certified)
    }
}

/// Whether the field extends soundly outside the search region (needed to
/// inflate certification boxes past the region boundary).
pub trait ExtendsOutside {
    fn extends_outside(&self) -> bool {
        true
    }
}

/// Options for [`find_zeros`].
pub struct ZeroSearchOptions<S: Scalar> {
    /// Subdivision stops when a box's max width is at or below this.
    pub tol: S,
    /// Maximum number of boxes processed before giving up.
    pub max_boxes: usize,
    /// Allow certification boxes to poke past the search boundary (the
    /// field must be defined there; see module docs).
    pub allow_boundary_inflation: bool,
}

/// Branch-and-prune zero search with sign-condition certification.
///
/// Deterministic: breadth-first processing, widest-axis bisection with
/// lowest-index ties, candidate clusters merged by closed intersection and
/// reported in lower-corner lexicographic order. Subdivision runs to half
/// the tolerance so merged clusters respect the tolerance. Each cluster is
/// certified on its hull or on the hull inflated by the tolerance, plain
/// first, then preconditioned.
pub fn find_zeros<S: Scalar, F: VectorField<S>>(
    f: &F,
    search: &BoxN<S>,
    opts: &ZeroSearchOptions<S>,
) -> Result<ZeroSearch<S>> {
    let n = search.dims();
    if f.dims_in() != n || f.dims_out() != n {
        return Err(Error::DimMismatch { expected: n, got: f.dims_out() });
    }
    if !strictly_positive(&opts.tol) {
        return Err(Error::InvalidMap { reason: "tolerance must be positive".into() });
    }
    let split_tol = opts.tol.div_near(&S::from_int(2));

    let mut queue = std::collections::VecDeque::new();
    queue.push_back(search.clone());
    let mut candidates: Vec<BoxN<S>> = Vec::new();
    let mut processed = 0usize;
    let mut budget_exhausted = false;

    while let Some(b) = queue.pop_front() {
        if processed >= opts.max_boxes {
            budget_exhausted = true;
            candidates.push(b);
            candidates.extend(queue.drain(..));
            break;
        }
        processed += 1;
        match f.eval_box(&b) {
            Ok(enc) => {
                if enc.comps().iter().any(|c| c.excludes_zero()) {
                    continue;
                }
            }
            Err(Error::OutsideDomain) => continue,
            Err(Error::StripStraddle) | Err(Error::DomainError) => {
                // Cannot evaluate across the domain seam; fall through to
                // subdivision so the seam region shrinks to tolerance.
            }
            Err(other) => return Err(other),
        }
        if b.max_width() <= split_tol {
            candidates.push(b);
            continue;
        }
        match b.bisect(None) {
            Ok((l, r)) => {
                queue.push_back(l);
                queue.push_back(r);
            }
            // Resolution floor reached; keep as a candidate.
            Err(Error::DegenerateBox { .. }) => candidates.push(b),
            Err(other) => return Err(other),
        }
    }

    let clusters = merge_clusters(candidates);
    let four = S::from_int(4);
    let mut enclosures = Vec::new();
    for hull in clusters {
        let non_isolated = hull.max_width() > opts.tol.mul_near(&four);
        let enclosure = certify_cluster(f, &hull, search, opts);
        let mut record = enclosure;
        record.non_isolated = non_isolated;
        if budget_exhausted && record.status != Status::Certified {
            record.reason = Some("search budget exhausted before full refinement".into());
        }
        enclosures.push(record);
    }
    enclosures.sort_by(|a, b| lex_cmp(&a.enclosure.lower_corner(), &b.enclosure.lower_corner()));
    Ok(ZeroSearch { enclosures, budget_exhausted, boxes_processed: processed })
}

/// Merge candidate boxes whose closures intersect, via union-find, and
/// return the hull of each cluster.
pub(crate) fn merge_clusters<S: Scalar>(candidates: Vec<BoxN<S>>) -> Vec<BoxN<S>> {
    let n = candidates.len();
    if n == 0 {
        return vec![];
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for i in 0..n {
        for j in i + 1..n {
            if candidates[i].intersects(&candidates[j]) {
                let ri = find(&mut parent, i);
                let rj = find(&mut parent, j);
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut hulls: std::collections::BTreeMap<usize, BoxN<S>> = Default::default();
    for (i, cand) in candidates.iter().enumerate() {
        let root = find(&mut parent, i);
        hulls
            .entry(root)
            .and_modify(|h| *h = h.hull(cand))
            .or_insert_with(|| cand.clone());
    }
    hulls.into_values().collect()
}

pub(crate) fn certify_cluster<S: Scalar, F: VectorField<S>>(
    f: &F,
    hull: &BoxN<S>,
    search: &BoxN<S>,
    opts: &ZeroSearchOptions<S>,
) -> ZeroEnclosure<S> {
    let half_tol = opts.tol.div_near(&S::from_int(2));
    let inflated = hull.inflate(&half_tol);
    let inflated = if opts.allow_boundary_inflation {
        inflated
    } else {
        // Without boundary extension the inflated box must stay inside the
        // search region.
        inflated.intersect(search).unwrap_or_else(|| hull.clone())
    };

    let attempts: [&BoxN<S>; 2] = [hull, &inflated];
    let mut last_reason = String::from("sign conditions inconclusive");
    for (k, b) in attempts.iter().enumerate() {
        if k == 1 && inflated == *hull {
            break;
        }
        match check_miranda(f, b, None) {
            Ok(out) if out.status == Status::Certified => {
                return ZeroEnclosure {
                    enclosure: (*b).clone(),
                    status: Status::Certified,
                    certificate: Some(MirandaCertificate {
                        domain: (*b).clone(),
                        evidence: out.evidence,
                        preconditioner: None,
                        preconditioner_det: None,
                    }),
                    boundary_inflated: !search.contains_box(b),
                    non_isolated: false,
                    reason: None,
                };
            }
            Ok(_) => {}
            Err(_) => {
                last_reason = "field not evaluable on the certification box".into();
                continue;
            }
        }
        // Preconditioned attempt.
        if let Some(jac) = midpoint_jacobian(f, hull) {
            if let Some(inv) = invert_matrix(&jac) {
                let det = exact_determinant(&inv);
                if !det.is_zero() {
                    let pf = PreconditionedField { inner: f, matrix: &inv };
                    if let Ok(out) = check_miranda(&pf, b, None) {
                        if out.status == Status::Certified {
                            return ZeroEnclosure {
                                enclosure: (*b).clone(),
                                status: Status::Certified,
                                certificate: Some(MirandaCertificate {
                                    domain: (*b).clone(),
                                    evidence: out.evidence,
                                    preconditioner: Some(inv),
                                    preconditioner_det: Some(det),
                                }),
                                boundary_inflated: !search.contains_box(b),
                                non_isolated: false,
                                reason: None,
                            };
                        }
                    }
                }
            }
        }
    }
    ZeroEnclosure {
        enclosure: hull.clone(),
        status: Status::Inconclusive,
        certificate: None,
        boundary_inflated: false,
        non_isolated: false,
        reason: Some(last_reason),
    }
}

/// Fixed points of a map over `search`, as zeros of `psi(x) - x`.
///
/// When the map is an affine horseshoe and the search box lies inside one
/// strip, that branch's affine formula is pinned as the smooth extension,
/// so fixed points sitting exactly on the strip boundary (a corner of the
/// square, say) stay certifiable; everywhere else the map evaluates
/// permissively.
pub fn find_fixed_points<S: Scalar>(
    map: &crate::dynsys::MapSpec<S>,
    search: &BoxN<S>,
    opts: &ZeroSearchOptions<S>,
) -> Result<ZeroSearch<S>> {
    let branch = map.as_horseshoe().and_then(|h| h.branch_containing(search));
    let field = crate::dynsys::FixedPointField::new(map, crate::dynsys::EvalMode::Permissive, branch)?;
    find_zeros(&field, search, opts)
}

/// Sign evidence for one constrained axis of a branch-tracking run: the
/// paired component is strictly one-signed on both transverse faces, with
/// opposite signs.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSign<S: Scalar> {
    pub axis: usize,
    /// Index of the field component paired with this axis.
    pub component: usize,
    pub pattern: SignPattern,
    /// Hull of the refined enclosures on the low face.
    pub left: Interval<S>,
    /// Hull of the refined enclosures on the high face.
    pub right: Interval<S>,
}

/// Shared facet between two consecutive chain cells: a box degenerate on
/// `axis`, equal to the intersection of the two cells.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetWitness<S: Scalar> {
    pub axis: usize,
    pub facet: BoxN<S>,
}

/// A facet-adjacent chain of grid cells joining the two parameter faces.
/// Consecutive boxes share the facet recorded at the same index; the first
/// box touches the low parameter face and the last touches the high one.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchChain<S: Scalar> {
    pub boxes: Vec<BoxN<S>>,
    pub facets: Vec<FacetWitness<S>>,
    pub touches_lo: bool,
    pub touches_hi: bool,
}

/// Result of a branch-tracking run: the hypothesis evidence, grid shape,
/// and (when certified) a spanning chain of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTrack<S: Scalar> {
    pub lambda_axis: usize,
    /// Number of grid cells along each axis of the search box.
    pub grid: Vec<usize>,
    /// How many grid cells kept a zero-containing enclosure.
    pub retained: usize,
    pub status: Status,
    pub hypothesis: Vec<FaceSign<S>>,
    pub chain: Option<BranchChain<S>>,
    pub reason: Option<String>,
}

/// Refine `face` until the enclosure of component `comp` is strictly
/// one-signed on every piece, or give up once a straddling piece is
/// narrower than `tol` on its widest axis (or the budget runs out).
/// Returns the shared sign (`true` = negative) and the hull of all piece
/// enclosures, or `None` when the sign cannot be certified.
fn resolve_face_sign<S: Scalar, F: VectorField<S>>(
    f: &F,
    face: &BoxN<S>,
    comp: usize,
    tol: &S,
) -> Result<Option<(bool, Interval<S>)>> {
    let zero = S::zero();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(face.clone());
    let mut evals = 0usize;
    let mut hull: Option<Interval<S>> = None;
    let mut saw_neg = false;
    let mut saw_pos = false;
    let mut unresolved = false;
    while let Some(bx) = queue.pop_front() {
        evals += 1;
        let enc = f.eval_box(&bx)?.comp(comp).clone();
        if *enc.hi() < zero {
            saw_neg = true;
        } else if *enc.lo() > zero {
            saw_pos = true;
        } else if evals < FACE_SPLIT_BUDGET && bx.max_width() > *tol {
            if let Ok((l, r)) = bx.bisect(None) {
                queue.push_back(l);
                queue.push_back(r);
                continue;
            }
            unresolved = true;
        } else {
            unresolved = true;
        }
        hull = Some(match hull {
            Some(h) => h.hull(&enc),
            None => enc,
        });
        if saw_neg && saw_pos {
            return Ok(None);
        }
    }
    let hull = hull.expect("a face always yields at least one leaf");
    if unresolved || saw_neg == saw_pos {
        return Ok(None);
    }
    Ok(Some((saw_neg, hull)))
}

/// Track a connected branch of zeros of an `(N-1)`-component field across
/// the `lambda_axis` extent of an `N`-dimensional search box.
///
/// The components of `f` are paired with the non-parameter axes of `search`
/// in increasing axis order. Each pairing must satisfy a strict sign
/// condition: the component one-signed on the two faces transverse to its
/// axis, with opposite signs (either orientation). Those conditions are
/// verified first by interval face evaluation, adaptively refined down to
/// width `tol`; if any fails, the call errs with `HypothesisFailed`. The
/// conditions force a connected set of zeros joining the two parameter
/// faces, which the tracker encloses discretely.
///
/// The search box is then gridded at resolution `cell` (each axis split
/// into equal parts no wider than `cell`) and every cell whose field
/// enclosure contains zero in all components is retained. Retention is
/// complete: any cell meeting the true zero set is retained, so the
/// retained cells cover the connected branch and a facet-adjacent path
/// from the low to the high parameter face must exist among them. The
/// shortest such path (breadth-first, deterministic tie order) is returned
/// as the chain. `Inconclusive` is reported only when the grid would
/// exceed `max_cells`.
pub fn track_zero_branch<S: Scalar, F: VectorField<S> + Sync>(
    f: &F,
    search: &BoxN<S>,
    lambda_axis: usize,
    cell: &S,
    tol: &S,
    max_cells: usize,
) -> Result<BranchTrack<S>> {
    let n = search.dims();
    if f.dims_in() != n {
        return Err(Error::DimMismatch { expected: n, got: f.dims_in() });
    }
    if n < 2 || f.dims_out() != n - 1 {
        return Err(Error::DimMismatch { expected: n.saturating_sub(1), got: f.dims_out() });
    }
    if lambda_axis >= n {
        return Err(Error::DimMismatch { expected: n, got: lambda_axis });
    }
    let zero = S::zero();
    if !strictly_positive(cell) || !strictly_positive(tol) {
        return Err(Error::PreconditionFailed {
            reason: "cell size and tolerance must be positive".into(),
        });
    }

    // Strict sign hypotheses on the constrained axes.
    let mut hypothesis = Vec::with_capacity(n - 1);
    for axis in (0..n).filter(|&a| a != lambda_axis) {
        let component = axis - usize::from(axis > lambda_axis);
        let left = resolve_face_sign(f, &search.face(axis, Side::Left)?, component, tol)?;
        let right = resolve_face_sign(f, &search.face(axis, Side::Right)?, component, tol)?;
        let pattern = match (left, right) {
            (Some((true, l)), Some((false, r))) => {
                hypothesis.push(FaceSign {
                    axis,
                    component,
                    pattern: SignPattern::NegToPos,
                    left: l,
                    right: r,
                });
                continue;
            }
            (Some((false, l)), Some((true, r))) => {
                hypothesis.push(FaceSign {
                    axis,
                    component,
                    pattern: SignPattern::PosToNeg,
                    left: l,
                    right: r,
                });
                continue;
            }
            (Some(_), Some(_)) => "both faces carry the same sign",
            _ => "a face enclosure straddles zero at the refinement floor",
        };
        return Err(Error::HypothesisFailed {
            reason: format!("component {component} on axis {axis}: {pattern}"),
        });
    }

    // Grid shape: per-axis cell counts, then the budget gate.
    let mut grid = Vec::with_capacity(n);
    for k in 0..n {
        let width = search.comp(k).width();
        let count = if width == zero {
            1
        } else {
            let ratio = width.div_up(cell).approx_f64(Round::Up);
            if !ratio.is_finite() || ratio > max_cells as f64 {
                return Ok(budget_track(lambda_axis, hypothesis, max_cells));
            }
            (ratio.ceil() as usize).max(1)
        };
        grid.push(count);
    }
    let total = grid.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
    let total = match total {
        Some(t) if t <= max_cells => t,
        _ => return Ok(budget_track(lambda_axis, hypothesis, max_cells)),
    };

    // Exact tiling: adjacent cells share their endpoint scalar, so facet
    // adjacency and face contact are literal equalities, not tolerances.
    let mut endpoints: Vec<Vec<S>> = Vec::with_capacity(n);
    for (k, &count) in grid.iter().enumerate() {
        let iv = search.comp(k);
        let width = iv.width();
        let mut es = Vec::with_capacity(count + 1);
        for j in 0..=count {
            let e = if j == 0 {
                iv.lo().clone()
            } else if j == count {
                iv.hi().clone()
            } else {
                iv.lo()
                    .add_near(&width.mul_near(&S::from_int(j as i64)).div_near(&S::from_int(count as i64)))
            };
            es.push(e);
        }
        for w in es.windows(2) {
            // partial_cmp so a NaN endpoint fails the monotonicity check.
            if count > 1 && w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
                return Err(Error::PreconditionFailed {
                    reason: format!("cell size is below the grid resolution on axis {k}"),
                });
            }
        }
        endpoints.push(es);
    }

    let strides = {
        let mut s = vec![1usize; n];
        for k in (0..n - 1).rev() {
            s[k] = s[k + 1] * grid[k + 1];
        }
        s
    };
    let unflatten = |flat: usize| -> Vec<usize> {
        (0..n).map(|k| flat / strides[k] % grid[k]).collect()
    };
    let cell_box = |idx: &[usize]| -> BoxN<S> {
        let comps = (0..n)
            .map(|k| {
                Interval::new(endpoints[k][idx[k]].clone(), endpoints[k][idx[k] + 1].clone())
                    .expect("grid endpoints are ordered")
            })
            .collect();
        BoxN::new(comps).expect("cell dimension matches the search box")
    };

    // Retention: keep cells whose enclosure contains zero in every
    // component. Complete by inclusion monotonicity, so the retained set
    // covers the zero branch.
    use rayon::prelude::*;
    let retained: Vec<bool> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let bx = cell_box(&unflatten(flat));
            let img = f.eval_box(&bx)?;
            Ok(img.comps().iter().all(|c| !c.excludes_zero()))
        })
        .collect::<Result<_>>()?;
    let retained_count = retained.iter().filter(|&&r| r).count();

    // Shortest facet-adjacent path from the low to the high parameter face
    // through retained cells, breadth-first with a fixed neighbor order.
    let n_lambda = grid[lambda_axis];
    let mut parent: Vec<usize> = vec![usize::MAX; total];
    let mut visited = vec![false; total];
    let mut queue = std::collections::VecDeque::new();
    for flat in 0..total {
        if retained[flat] && unflatten(flat)[lambda_axis] == 0 {
            visited[flat] = true;
            queue.push_back(flat);
        }
    }
    let mut goal = None;
    'bfs: while let Some(flat) = queue.pop_front() {
        let idx = unflatten(flat);
        if idx[lambda_axis] == n_lambda - 1 {
            goal = Some(flat);
            break 'bfs;
        }
        for k in 0..n {
            for step in [-1i64, 1] {
                let j = idx[k] as i64 + step;
                if j < 0 || j >= grid[k] as i64 {
                    continue;
                }
                let nb = (flat as i64 + step * strides[k] as i64) as usize;
                if retained[nb] && !visited[nb] {
                    visited[nb] = true;
                    parent[nb] = flat;
                    queue.push_back(nb);
                }
            }
        }
    }

    let Some(goal) = goal else {
        return Ok(BranchTrack {
            lambda_axis,
            grid,
            retained: retained_count,
            status: Status::Inconclusive,
            hypothesis,
            chain: None,
            reason: Some("no retained chain joins the parameter faces at this resolution".into()),
        });
    };

    let mut flats = vec![goal];
    while parent[*flats.last().unwrap()] != usize::MAX {
        flats.push(parent[*flats.last().unwrap()]);
    }
    flats.reverse();
    let boxes: Vec<BoxN<S>> = flats.iter().map(|&f| cell_box(&unflatten(f))).collect();
    let mut facets = Vec::with_capacity(boxes.len().saturating_sub(1));
    for pair in flats.windows(2) {
        let (a, b) = (unflatten(pair[0]), unflatten(pair[1]));
        let axis = (0..n).find(|&k| a[k] != b[k]).expect("consecutive cells differ");
        let shared = endpoints[axis][a[axis].max(b[axis])].clone();
        let mut facet = cell_box(&a);
        facet.set_comp(axis, Interval::point(shared).expect("endpoint is finite"));
        facets.push(FacetWitness { axis, facet });
    }
    Ok(BranchTrack {
        lambda_axis,
        grid,
        retained: retained_count,
        status: Status::Certified,
        hypothesis,
        chain: Some(BranchChain { boxes, facets, touches_lo: true, touches_hi: true }),
        reason: None,
    })
}

fn budget_track<S: Scalar>(
    lambda_axis: usize,
    hypothesis: Vec<FaceSign<S>>,
    max_cells: usize,
) -> BranchTrack<S> {
    BranchTrack {
        lambda_axis,
        grid: vec![],
        retained: 0,
        status: Status::Inconclusive,
        hypothesis,
        chain: None,
        reason: Some(format!("grid would exceed the cell budget of {max_cells}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{EvalMode, ExprMap, FixedPointField, Horseshoe, MapSpec};

    struct Raw<S: Scalar> {
        map: MapSpec<S>,
    }
    impl<S: Scalar> VectorField<S> for Raw<S> {
        fn dims_in(&self) -> usize {
            self.map.dims_in()
        }
        fn dims_out(&self) -> usize {
            self.map.dims_out()
        }
        fn eval_box(&self, b: &BoxN<S>) -> Result<BoxN<S>> {
            self.map.eval_box(b, EvalMode::Permissive)
        }
        fn eval_point(&self, p: &[S]) -> Result<Vec<S>> {
            self.map.eval_point(p, EvalMode::Permissive)
        }
    }

    fn system(lines: &str, dims: usize) -> Raw<f64> {
        Raw { map: MapSpec::Custom(ExprMap::parse_lines(lines, dims).unwrap()) }
    }

    fn opts(tol: f64) -> ZeroSearchOptions<f64> {
        ZeroSearchOptions { tol, max_boxes: 100_000, allow_boundary_inflation: true }
    }

    #[test]
    fn separable_system_certifies_directly() {
        // Component i depends only on x_i: classic sign conditions hold.
        let f = system("x0 - 0.25\nx1 - 0.75", 2);
        let b = BoxN::from_endpoints(vec![(0.0, 1.0), (0.5, 1.0)]).unwrap();
        let out = check_miranda(&f, &b, None).unwrap();
        assert_eq!(out.status, Status::Certified);
        assert_eq!(out.evidence.len(), 2);
        assert_eq!(out.evidence[0].pattern, SignPattern::NegToPos);

        // Fixing the wrong orientation must refuse.
        let wrong = [SignPattern::PosToNeg, SignPattern::NegToPos];
        let out = check_miranda(&f, &b, Some(&wrong)).unwrap();
        assert_eq!(out.status, Status::Inconclusive);
        assert_eq!(out.failed_axis, Some(0));
    }

    #[test]
    fn no_zero_is_falsified() {
        let f = system("x0 - 2\nx1", 2);
        let b = BoxN::from_endpoints(vec![(0.0, 1.0), (-1.0, 1.0)]).unwrap();
        let out = check_miranda(&f, &b, None).unwrap();
        assert_eq!(out.status, Status::Falsified);
        assert_eq!(out.excluded_component, Some(0));
    }

    #[test]
    fn diagonal_gradient_needs_preconditioning() {
        // Circle-minus-diagonal: zero at (s, s) with s = sqrt(1/2). The
        // gradient there is diagonal, so raw sign conditions fail on any
        // axis-aligned box around it.
        let f = system("x0^2 + x1^2 - 1\nx0 - x1", 2);
        let b = BoxN::from_endpoints(vec![(0.5, 0.9), (0.5, 0.9)]).unwrap();
        let out = check_miranda(&f, &b, None).unwrap();
        assert_eq!(out.status, Status::Inconclusive);

        // The search still certifies it, via the preconditioner.
        let search = BoxN::from_endpoints(vec![(0.5, 0.9), (0.5, 0.9)]).unwrap();
        let zs = find_zeros(&f, &search, &opts(1e-6)).unwrap();
        assert!(!zs.budget_exhausted);
        assert_eq!(zs.certified().count(), 1);
        let z = zs.certified().next().unwrap();
        let s = 0.5f64.sqrt();
        assert!(z.enclosure.contains_point(&[s, s]));
        assert!(z.certificate.as_ref().unwrap().preconditioner.is_some());
        assert!(z.enclosure.max_width() < 1e-5);
    }

    #[test]
    fn certificates_replay() {
        let f = system("x0^2 + x1^2 - 1\nx0 - x1", 2);
        let search = BoxN::from_endpoints(vec![(0.5, 0.9), (0.5, 0.9)]).unwrap();
        let zs = find_zeros(&f, &search, &opts(1e-6)).unwrap();
        let cert = zs.certified().next().unwrap().certificate.clone().unwrap();
        assert!(cert.replay(&f).unwrap());
        // A tampered certificate fails replay.
        let mut bad = cert.clone();
        bad.evidence[0].pattern = match bad.evidence[0].pattern {
            SignPattern::NegToPos => SignPattern::PosToNeg,
            SignPattern::PosToNeg => SignPattern::NegToPos,
        };
        assert!(!bad.replay(&f).unwrap());
    }

    #[test]
    fn two_zeros_give_two_disjoint_enclosures() {
        // Zeros at x0 = 0.3 and 0.7 paired with x1 = 0.5.
        let f = system("(x0 - 0.3)*(x0 - 0.7)\nx1 - 0.5", 2);
        let search = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let zs = find_zeros(&f, &search, &opts(1e-4)).unwrap();
        assert_eq!(zs.certified().count(), 2);
        let encl: Vec<_> = zs.certified().collect();
        assert!(encl[0].enclosure.contains_point(&[0.3, 0.5]));
        assert!(encl[1].enclosure.contains_point(&[0.7, 0.5]));
        assert!(!encl[0].enclosure.intersects(&encl[1].enclosure));
        // Canonical order: sorted by lower corner.
        assert!(encl[0].enclosure.lower_corner()[0] < encl[1].enclosure.lower_corner()[0]);
    }

    #[test]
    fn zero_free_region_returns_empty() {
        let f = system("x0 - 5\nx1 - 5", 2);
        let search = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let zs = find_zeros(&f, &search, &opts(1e-4)).unwrap();
        assert!(zs.enclosures.is_empty());
        assert!(!zs.budget_exhausted);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let f = system("x0 - 0.25\nx1 - 0.75", 2);
        let search = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let zs = find_zeros(
            &f,
            &search,
            &ZeroSearchOptions { tol: 1e-9, max_boxes: 16, allow_boundary_inflation: true },
        )
        .unwrap();
        assert!(zs.budget_exhausted);
        assert!(!zs.enclosures.is_empty());
    }

    #[test]
    fn zero_curve_is_flagged_non_isolated() {
        // x0 = 0.5 is a whole line of zeros of (x0 - 0.5, 0-ish): use a
        // system whose second component vanishes identically on the line.
        let f = system("x0 - 0.5\n(x0 - 0.5)*x1", 2);
        let search = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let zs = find_zeros(&f, &search, &opts(0.01)).unwrap();
        assert!(zs.enclosures.iter().any(|e| e.non_isolated));
    }

    #[test]
    fn corner_fixed_point_certifies_with_boundary_inflation() {
        let m = MapSpec::AffineHorseshoe(Horseshoe::<f64>::canonical(2).unwrap());
        let field = FixedPointField::new(&m, EvalMode::Permissive, Some(0)).unwrap();
        let strip = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0 / 3.0)]).unwrap();
        let zs = find_zeros(&field, &strip, &opts(1e-9)).unwrap();
        assert_eq!(zs.certified().count(), 1);
        let z = zs.certified().next().unwrap();
        assert!(z.enclosure.contains_point(&[0.0, 0.0]));
        assert!(z.boundary_inflated);
        assert!(z.enclosure.max_width() <= 1e-9 * 4.0);
    }

    #[test]
    fn strip_fixed_points_match_the_affine_solve() {
        let m = MapSpec::AffineHorseshoe(Horseshoe::<f64>::canonical(2).unwrap());
        let third = 1.0 / 3.0;
        let cases = [
            (BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, third)]).unwrap(), [0.0, 0.0]),
            // Second strip: solve x = 1 - x/3, y = 3 - 3y.
            (BoxN::from_endpoints(vec![(0.0, 1.0), (2.0 * third, 1.0)]).unwrap(), [0.75, 0.75]),
        ];
        for (strip, point) in cases {
            let zs = find_fixed_points(&m, &strip, &opts(1e-10)).unwrap();
            assert_eq!(zs.certified().count(), 1);
            let z = zs.certified().next().unwrap();
            assert!(z.enclosure.contains_point(&point));
            assert!(z.enclosure.max_width() <= 1e-9);
        }
    }

    #[test]
    fn exact_determinant_detects_singular() {
        let singular = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(exact_determinant(&singular).is_zero());
        let regular = vec![vec![1.0, 2.0], vec![2.0, 5.0]];
        assert_eq!(regular[0][0], 1.0);
        assert!(!exact_determinant(&regular).is_zero());
        // Determinant is exact even where floats would cancel: the matrix
        // [[a, b], [a, b]] is singular for inexact a, b too.
        let tricky = vec![vec![0.1, 0.2], vec![0.1, 0.2]];
        assert!(exact_determinant(&tricky).is_zero());
    }

    #[test]
    fn refinement_is_monotone() {
        // Tighter tolerance yields enclosures contained in looser ones.
        let f = system("x0^2 + x1^2 - 1\nx0 - x1", 2);
        let search = BoxN::from_endpoints(vec![(0.5, 0.9), (0.5, 0.9)]).unwrap();
        let coarse = find_zeros(&f, &search, &opts(1e-3)).unwrap();
        let fine = find_zeros(&f, &search, &opts(1e-7)).unwrap();
        let cb = &coarse.certified().next().unwrap().enclosure;
        let fb = &fine.certified().next().unwrap().enclosure;
        assert!(fb.max_width() < cb.max_width());
        assert!(cb.inflate(&1e-3).contains_box(fb));
    }

    fn assert_chain_shape<S: Scalar>(track: &BranchTrack<S>, search: &BoxN<S>) {
        let chain = track.chain.as_ref().expect("certified track carries a chain");
        assert!(chain.touches_lo && chain.touches_hi);
        let lam = track.lambda_axis;
        let first = chain.boxes.first().unwrap();
        let last = chain.boxes.last().unwrap();
        assert_eq!(first.comp(lam).lo(), search.comp(lam).lo());
        assert_eq!(last.comp(lam).hi(), search.comp(lam).hi());
        assert_eq!(chain.facets.len(), chain.boxes.len() - 1);
        for (w, pair) in chain.facets.iter().zip(chain.boxes.windows(2)) {
            assert!(w.facet.comp(w.axis).is_point());
            assert!(pair[0].contains_box(&w.facet));
            assert!(pair[1].contains_box(&w.facet));
        }
    }

    #[test]
    fn straight_branch_tracks_exactly() {
        use crate::Rational;
        let map = MapSpec::<Rational>::Custom(ExprMap::parse_lines("x0 - 0.5", 2).unwrap());
        let f = Raw { map };
        let unit = BoxN::from_endpoints(vec![
            (Rational::from_int(0), Rational::from_int(1)),
            (Rational::from_int(0), Rational::from_int(1)),
        ])
        .unwrap();
        let cell = Rational::from_ratio(1, 32);
        let tol = Rational::from_ratio(1, 1024);
        let track = track_zero_branch(&f, &unit, 1, &cell, &tol, 1 << 20).unwrap();
        assert_eq!(track.status, Status::Certified);
        assert_eq!(track.grid, vec![32, 32]);
        assert_eq!(track.hypothesis.len(), 1);
        assert_eq!(track.hypothesis[0].pattern, SignPattern::NegToPos);
        assert_chain_shape(&track, &unit);

        // The shortest spanning path hugs x = 1/2: one cell per parameter
        // row, never leaving the column whose upper endpoint is the root.
        let chain = track.chain.unwrap();
        assert_eq!(chain.boxes.len(), 32);
        let half = Rational::from_ratio(1, 2);
        for b in &chain.boxes {
            assert!(b.comp(0).contains(&half));
        }
        assert!(chain.facets.iter().all(|w| w.axis == 1));
    }

    #[test]
    fn sine_branch_follows_the_curve() {
        let f = system("x0 - (0.5 + 0.3*sin(2*pi*x1))", 2);
        let unit = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let track = track_zero_branch(&f, &unit, 1, &(1.0 / 64.0), &1e-3, 1 << 20).unwrap();
        assert_eq!(track.status, Status::Certified);
        assert_eq!(track.grid, vec![64, 64]);
        assert_chain_shape(&track, &unit);

        // Every chain cell sits within the curve's reach of its parameter
        // midpoint: the cell is retained because the curve meets its
        // x-extent somewhere in its parameter range, and the curve moves at
        // most lip * cell/2 from the midpoint value within that range.
        let lip = 0.6 * std::f64::consts::PI;
        let cell = 1.0 / 64.0;
        for b in &track.chain.as_ref().unwrap().boxes {
            let mid = b.comp(1).midpoint();
            let curve = 0.5 + 0.3 * (2.0 * std::f64::consts::PI * mid).sin();
            let slack = lip * cell / 2.0 + 1e-9;
            assert!(
                curve >= b.comp(0).lo() - slack && curve <= b.comp(0).hi() + slack,
                "curve {curve} strays from cell {:?}",
                b.comp(0)
            );
        }
    }

    #[test]
    fn swapped_parameter_axis_tracks_too() {
        // Parameter on axis 0; the single component pairs with axis 1.
        let f = system("x1 - 0.5", 2);
        let unit = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let track = track_zero_branch(&f, &unit, 0, &(1.0 / 16.0), &1e-3, 1 << 20).unwrap();
        assert_eq!(track.status, Status::Certified);
        assert_eq!(track.hypothesis[0].axis, 1);
        assert_eq!(track.hypothesis[0].component, 0);
        assert_chain_shape(&track, &unit);
        for b in &track.chain.unwrap().boxes {
            assert!(b.comp(1).contains(&0.5));
        }
    }

    #[test]
    fn sign_hypothesis_failure_is_reported() {
        let f = system("x0 - 2", 2);
        let unit = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let err = track_zero_branch(&f, &unit, 1, &0.25, &1e-3, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::HypothesisFailed { .. }));
    }

    #[test]
    fn cell_budget_reports_inconclusive() {
        let f = system("x0 - 0.5", 2);
        let unit = BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let track = track_zero_branch(&f, &unit, 1, &(1.0 / 64.0), &1e-3, 100).unwrap();
        assert_eq!(track.status, Status::Inconclusive);
        assert!(track.chain.is_none());
        assert_eq!(track.hypothesis.len(), 1);
        assert!(track.reason.unwrap().contains("budget"));
    }
}
