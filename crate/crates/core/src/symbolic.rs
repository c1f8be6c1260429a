//! Symbol sequences and the chaos orchestrator.
//!
//! A map stretching each of `m` pairwise disjoint compact sets across the
//! same rectangle carries a copy of the full shift on `m` symbols: every
//! periodic sequence of symbols is realized by a periodic orbit visiting
//! the sets in that order. This module supplies the combinatorics (words,
//! shift, necklaces, the sequence metric), the orbit searcher pairing
//! branch-and-prune with the sign-condition certifier, and `chaos_report`,
//! which strings the pieces together: per-symbol stretching certificates,
//! a certified periodic orbit for every word up to a period bound, orbit
//! disjointness, and the entropy lower bound `log(m)`.

use crate::covering::StretchCertificate;
use crate::dynsys::{EvalMode, MapSpec, VectorField};
use crate::error::{Error, Result};
use crate::geometry::OrientedRect;
use crate::interval::{BoxN, Interval};
use crate::miranda::{certify_cluster, merge_clusters, ZeroEnclosure, ZeroSearchOptions};
use crate::scalar::Scalar;
use crate::Status;
use rayon::prelude::*;

/// A finite word over the alphabet `{0, .., m-1}`, read as one period of a
/// periodic bi-infinite sequence when the periodic flag is set and as a
/// finite window otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolWord {
    m: usize,
    letters: Vec<usize>,
    periodic: bool,
}

impl SymbolWord {
    pub fn new(m: usize, letters: Vec<usize>, periodic: bool) -> Result<Self> {
        if m < 2 {
            return Err(Error::HypothesisFailed {
                reason: "alphabet needs at least two symbols".into(),
            });
        }
        if letters.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&bad) = letters.iter().find(|&&l| l >= m) {
            return Err(Error::AlphabetMismatch { letter: bad, alphabet: m });
        }
        Ok(SymbolWord { m, letters, periodic })
    }

    /// One period of a periodic sequence.
    pub fn periodic(m: usize, letters: Vec<usize>) -> Result<Self> {
        Self::new(m, letters, true)
    }

    pub fn alphabet(&self) -> usize {
        self.m
    }
    pub fn letters(&self) -> &[usize] {
        &self.letters
    }
    pub fn len(&self) -> usize {
        self.letters.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Letter at bi-infinite index `i` (periodic extension). Only valid for
    /// periodic words.
    pub fn letter_at(&self, i: i64) -> usize {
        let k = self.letters.len() as i64;
        self.letters[i.rem_euclid(k) as usize]
    }

    /// The shift: cyclic left rotation for periodic words, a one-step index
    /// shift (dropping the first letter) for finite windows.
    pub fn shift(&self) -> Result<SymbolWord> {
        if self.periodic {
            let mut letters = self.letters.clone();
            letters.rotate_left(1);
            Ok(SymbolWord { m: self.m, letters, periodic: true })
        } else if self.letters.len() > 1 {
            Ok(SymbolWord { m: self.m, letters: self.letters[1..].to_vec(), periodic: false })
        } else {
            Err(Error::EmptyWord)
        }
    }

    /// All distinct rotations of a periodic word, starting with the word
    /// itself.
    pub fn rotations(&self) -> Vec<SymbolWord> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        for _ in 0..self.letters.len() {
            if !out.contains(&cur) {
                out.push(cur.clone());
            }
            let mut letters = cur.letters;
            letters.rotate_left(1);
            cur = SymbolWord { m: self.m, letters, periodic: self.periodic };
        }
        out
    }

    /// Whether this word is the lexicographically smallest among its
    /// rotations (the canonical necklace representative).
    pub fn is_necklace_representative(&self) -> bool {
        self.rotations().iter().all(|r| r.letters >= self.letters)
    }
}

impl std::fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Distance between two periodic sequences: the sum over all integer
/// indices of `|s1_i - s2_i| / m^(|i|+1)`, returned as the exact partial
/// sum over `|i| <= horizon` plus a rigorous tail enclosure
/// `[0, 2 / m^(horizon+1)]` (each omitted term is at most `(m-1)` over the
/// same power, and the two geometric tails sum to that bound).
pub fn seq_distance<S: Scalar>(
    s1: &SymbolWord,
    s2: &SymbolWord,
    horizon: u32,
) -> Result<Interval<S>> {
    if s1.m != s2.m {
        return Err(Error::AlphabetMismatch { letter: s2.m, alphabet: s1.m });
    }
    let m = Interval::point(S::from_int(s1.m as i64))?;
    let mut weight = Interval::point(S::one())?.div(&m)?;
    let mut sum = Interval::point(S::zero())?;
    for j in 0..=horizon as i64 {
        let mut count = (s1.letter_at(j) as i64 - s2.letter_at(j) as i64).abs();
        if j > 0 {
            count += (s1.letter_at(-j) as i64 - s2.letter_at(-j) as i64).abs();
        }
        if count > 0 {
            sum = sum.add(&weight.scale(&S::from_int(count)));
        }
        weight = weight.div(&m)?;
    }
    // weight now encloses m^-(horizon+2); the tail bound is 2/m^(horizon+1).
    let tail_hi = weight.scale(&S::from_int(2 * s1.m as i64));
    let tail = Interval::new(S::zero(), tail_hi.hi().clone())?;
    Ok(sum.add(&tail))
}

/// All length-`k` words over `m` symbols in lexicographic order, or only
/// the necklace representatives (lexicographically minimal rotations) when
/// `up_to_rotation` is set. Fails when `m^k` exceeds `cap`.
pub fn enumerate_periodic_words(
    m: usize,
    k: usize,
    up_to_rotation: bool,
    cap: usize,
) -> Result<Vec<SymbolWord>> {
    if m < 2 || k == 0 {
        return Err(Error::HypothesisFailed {
            reason: "word enumeration needs m >= 2 and k >= 1".into(),
        });
    }
    let mut total: usize = 1;
    for _ in 0..k {
        total = total
            .checked_mul(m)
            .filter(|&t| t <= cap)
            .ok_or(Error::BudgetExceeded { context: "periodic word enumeration", limit: cap })?;
    }
    let mut out = Vec::new();
    let mut letters = vec![0usize; k];
    loop {
        let w = SymbolWord { m, letters: letters.clone(), periodic: true };
        if !up_to_rotation || w.is_necklace_representative() {
            out.push(w);
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            letters[pos] += 1;
            if letters[pos] < m {
                break;
            }
            letters[pos] = 0;
        }
    }
}

/// The field `x -> psi^k(x) - x` driven by a symbol word, with the branch
/// of a piecewise map pinned per step so the field is a total, smooth
/// extension suitable for sign-condition certification even on boxes poking
/// past the symbol sets.
pub struct OrbitField<'a, S: Scalar> {
    psi: &'a MapSpec<S>,
    /// Per-letter pinned branch for piecewise maps, `None` for total maps.
    branches: Vec<Option<usize>>,
    word: &'a SymbolWord,
    dims: usize,
}

impl<'a, S: Scalar> OrbitField<'a, S> {
    /// Pin branches from the symbol sets: for a piecewise map, letter `i`
    /// uses the branch whose domain contains `ks[i]`.
    pub fn new(psi: &'a MapSpec<S>, word: &'a SymbolWord, ks: &[BoxN<S>]) -> Result<Self> {
        let dims = psi.dims_in();
        if psi.dims_out() != dims {
            return Err(Error::DimMismatch { expected: dims, got: psi.dims_out() });
        }
        let branches = match psi.as_horseshoe() {
            Some(h) => ks.iter().map(|k| h.branch_containing(k)).collect(),
            None => vec![None; ks.len()],
        };
        Ok(OrbitField { psi, branches, word, dims })
    }

    fn step_box(&self, b: &BoxN<S>, letter: usize) -> Result<BoxN<S>> {
        match (self.psi.as_horseshoe(), self.branches[letter]) {
            (Some(h), Some(branch)) => h.eval_box_branch(b, branch),
            _ => self.psi.eval_box(b, EvalMode::Permissive),
        }
    }

    fn step_point(&self, p: &[S], letter: usize) -> Result<Vec<S>> {
        match (self.psi.as_horseshoe(), self.branches[letter]) {
            (Some(h), Some(branch)) => h.eval_point_branch(p, branch),
            _ => self.psi.eval_point(p, EvalMode::Permissive),
        }
    }

    /// Enclosure of the `j`-step forward image under the pinned branches.
    pub fn forward(&self, b: &BoxN<S>, steps: usize) -> Result<BoxN<S>> {
        let mut cur = b.clone();
        for j in 0..steps {
            cur = self.step_box(&cur, self.word.letters()[j % self.word.len()])?;
        }
        Ok(cur)
    }
}

impl<S: Scalar> VectorField<S> for OrbitField<'_, S> {
    fn dims_in(&self) -> usize {
        self.dims
    }
    fn dims_out(&self) -> usize {
        self.dims
    }
    fn eval_box(&self, b: &BoxN<S>) -> Result<BoxN<S>> {
        let img = self.forward(b, self.word.len())?;
        let comps =
            (0..self.dims).map(|i| img.comp(i).sub(b.comp(i))).collect::<Vec<_>>();
        BoxN::new(comps)
    }
    fn eval_point(&self, p: &[S]) -> Result<Vec<S>> {
        let mut cur = p.to_vec();
        for j in 0..self.word.len() {
            cur = self.step_point(&cur, self.word.letters()[j])?;
        }
        Ok(cur.iter().zip(p).map(|(a, b)| a.sub_near(b)).collect())
    }
}

/// Containment evidence for one forward step of an orbit enclosure.
#[derive(Clone, Debug, PartialEq)]
pub struct StepEvidence<S: Scalar> {
    pub step: usize,
    pub letter: usize,
    /// Forward image enclosure before clipping to the symbol set.
    pub enclosure: BoxN<S>,
    /// The enclosure lies wholly inside `K_letter`.
    pub contained: bool,
    /// The reported orbit-point box was clipped to `K_letter` (true only
    /// when `contained` is false but the intersection is nonempty, which
    /// happens for orbit points on a symbol set's boundary).
    pub clipped: bool,
}

/// A certified periodic orbit for one symbol word.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord<S: Scalar> {
    pub word: SymbolWord,
    pub status: Status,
    /// One box per letter; box `j` encloses the `j`-th orbit point and lies
    /// inside `K_{word[j]}`.
    pub enclosures: Vec<BoxN<S>>,
    /// The sign-condition certification of the anchor point (index 0).
    pub anchor: ZeroEnclosure<S>,
    pub itinerary: Vec<StepEvidence<S>>,
    pub boxes_processed: usize,
    pub reason: Option<String>,
}

/// Search for a periodic orbit realizing `word`: a point of `K_{word[0]}`
/// whose forward images visit the symbol sets in word order and return to
/// it after one period.
///
/// Requires every per-symbol stretching certificate to be `Certified`
/// (under that hypothesis the orbit exists, so a non-certified outcome
/// always means insufficient resolution or budget, never absence).
/// Branch-and-prune over `K_{word[0]}`: a box is pruned when some
/// step-`j` clipped forward image misses `K_{word[j]}` or when the
/// one-period image excludes the box; surviving boxes are clustered and
/// certified through the sign conditions on `psi^k - id` with per-letter
/// pinned branches.
pub fn find_periodic_orbit<S: Scalar>(
    psi: &MapSpec<S>,
    certs: &[StretchCertificate<S>],
    word: &SymbolWord,
    opts: &ZeroSearchOptions<S>,
) -> Result<OrbitRecord<S>> {
    if word.alphabet() != certs.len() {
        return Err(Error::AlphabetMismatch { letter: certs.len(), alphabet: word.alphabet() });
    }
    for (i, c) in certs.iter().enumerate() {
        if c.status != Status::Certified {
            return Err(Error::PreconditionFailed {
                reason: format!("stretching certificate for symbol {i} is not certified"),
            });
        }
    }
    let ks: Vec<BoxN<S>> = certs.iter().map(|c| c.k.clone()).collect();
    search_orbit(psi, &ks, word, &ks[word.letters()[0]], opts)
}

/// The search body, over an explicit start region (used directly by
/// rotation derivation with a pre-located seed box).
fn search_orbit<S: Scalar>(
    psi: &MapSpec<S>,
    ks: &[BoxN<S>],
    word: &SymbolWord,
    start: &BoxN<S>,
    opts: &ZeroSearchOptions<S>,
) -> Result<OrbitRecord<S>> {
    let field = OrbitField::new(psi, word, ks)?;
    let split_tol = opts.tol.div_near(&S::from_int(2));
    let k = word.len();

    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start.clone());
    let mut candidates: Vec<BoxN<S>> = Vec::new();
    let mut processed = 0usize;
    let mut budget_exhausted = false;

    'boxes: while let Some(b) = queue.pop_front() {
        if processed >= opts.max_boxes {
            budget_exhausted = true;
            candidates.push(b);
            candidates.extend(queue.drain(..));
            break;
        }
        processed += 1;

        // Itinerary pruning: clip each forward image to its symbol set. A
        // true orbit point of this word survives every clip, so an empty
        // intersection rules the whole box out.
        let mut cur = b.clone();
        for j in 0..k {
            let letter = word.letters()[j];
            match cur.intersect(&ks[letter]) {
                Some(c) => match field.step_box(&c, letter) {
                    Ok(img) => cur = img,
                    Err(_) => {
                        // Not evaluable here; keep subdividing.
                        cur = c;
                        break;
                    }
                },
                None => continue 'boxes,
            }
        }
        if cur.intersect(&b).is_none() {
            continue;
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
            Err(Error::DegenerateBox { .. }) => candidates.push(b),
            Err(other) => return Err(other),
        }
    }

    let clusters = merge_clusters(candidates);
    let mut best: Option<ZeroEnclosure<S>> = None;
    for hull in clusters {
        let enc = certify_cluster(&field, &hull, start, opts);
        let better = match (&best, &enc.status) {
            (None, _) => true,
            (Some(b), Status::Certified) => b.status != Status::Certified
                || enc.enclosure.max_width() < b.enclosure.max_width(),
            _ => false,
        };
        if better {
            best = Some(enc);
        }
    }

    let Some(anchor) = best else {
        return Ok(OrbitRecord {
            word: word.clone(),
            status: Status::Inconclusive,
            enclosures: vec![],
            anchor: ZeroEnclosure {
                enclosure: start.clone(),
                status: Status::Inconclusive,
                certificate: None,
                boundary_inflated: false,
                non_isolated: false,
                reason: Some("search region exhausted without candidates".into()),
            },
            itinerary: vec![],
            boxes_processed: processed,
            reason: Some(if budget_exhausted {
                "budget exhausted before any candidate survived".into()
            } else {
                "no candidate box survived pruning at this resolution".into()
            }),
        });
    };

    let mut record = build_record(&field, word, ks, anchor, processed)?;
    if budget_exhausted && record.status != Status::Certified {
        record.reason = Some("search budget exhausted before full refinement".into());
    }
    Ok(record)
}

/// Assemble the orbit record: forward images of the certified anchor with
/// per-step containment evidence. Reported orbit-point boxes are clipped to
/// their symbol sets; the true orbit point lies in the clip because it lies
/// both in the forward enclosure and (by the stretching hypothesis that
/// guarantees this itinerary) in the symbol set.
fn build_record<S: Scalar>(
    field: &OrbitField<'_, S>,
    word: &SymbolWord,
    ks: &[BoxN<S>],
    anchor: ZeroEnclosure<S>,
    boxes_processed: usize,
) -> Result<OrbitRecord<S>> {
    let k = word.len();
    let mut status = anchor.status;
    let mut reason = if status == Status::Certified {
        None
    } else {
        anchor.reason.clone().or_else(|| Some("anchor certification failed".into()))
    };
    let mut enclosures = Vec::with_capacity(k);
    let mut itinerary = Vec::with_capacity(k);
    let mut cur = anchor.enclosure.clone();
    for step in 0..k {
        let letter = word.letters()[step];
        let contained = ks[letter].contains_box(&cur);
        let clip = cur.intersect(&ks[letter]);
        let clipped = !contained && clip.is_some();
        itinerary.push(StepEvidence {
            step,
            letter,
            enclosure: cur.clone(),
            contained,
            clipped,
        });
        let reported = match clip {
            Some(c) => c,
            None => {
                if status == Status::Certified {
                    status = Status::Inconclusive;
                    reason = Some(format!(
                        "step {step} enclosure misses its symbol set entirely"
                    ));
                }
                cur.clone()
            }
        };
        enclosures.push(reported.clone());
        if step + 1 < k {
            cur = field.step_box(&reported, letter)?;
        }
    }
    Ok(OrbitRecord { word: word.clone(), status, enclosures, anchor, itinerary, boxes_processed, reason })
}

/// Entropy lower bound carried by a full shift on `m` symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyBound {
    /// Exact form, e.g. `log(2)`.
    pub expression: String,
    /// Decimal value of the natural logarithm.
    pub decimal: f64,
}

/// Verdicts for every word of one period length.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodReport<S: Scalar> {
    pub k: usize,
    /// One record per length-`k` word, in lexicographic word order.
    pub orbits: Vec<OrbitRecord<S>>,
    pub certified: usize,
    pub necklaces: usize,
    /// Orbit enclosure sets of distinct necklaces are pairwise disjoint.
    pub disjoint: bool,
}

/// Everything `chaos_report` establishes.
#[derive(Clone, Debug, PartialEq)]
pub struct ChaosReport<S: Scalar> {
    pub m: usize,
    pub stretch: Vec<StretchCertificate<S>>,
    pub periods: Vec<PeriodReport<S>>,
    pub entropy: EntropyBound,
    pub status: Status,
}

/// Options for [`chaos_report`].
pub struct ChaosOptions<S: Scalar> {
    /// Subdivision tolerance for orbit searches.
    pub tol: S,
    /// Box budget per orbit search.
    pub max_boxes: usize,
    /// Cap on `m^k` when enumerating words.
    pub word_cap: usize,
}

/// Certify chaotic dynamics on `m = ks.len()` symbols: verify the per-symbol
/// stretching certificates, then certify one periodic orbit for every word
/// of every period up to `max_period`, and report the entropy bound
/// `log(m)`.
///
/// Orbit searches run once per necklace (rotations name the same orbit);
/// each rotation's record is then derived by re-certifying the anchor at
/// the corresponding forward enclosure, so every word gets its own
/// certified record. Distinct necklaces of the same period are checked for
/// pairwise disjoint orbit enclosures.
pub fn chaos_report<S: Scalar>(
    psi: &MapSpec<S>,
    x: &OrientedRect<S>,
    ks: &[OrientedRect<S>],
    max_period: usize,
    opts: &ChaosOptions<S>,
) -> Result<ChaosReport<S>> {
    let m = ks.len();
    if m < 2 {
        return Err(Error::HypothesisFailed {
            reason: "chaotic dynamics needs at least two symbol sets".into(),
        });
    }
    for i in 0..m {
        for j in i + 1..m {
            if ks[i].body().intersects(ks[j].body()) {
                return Err(Error::NotDisjoint { i, j });
            }
        }
    }

    let mut stretch = Vec::with_capacity(m);
    for (i, k) in ks.iter().enumerate() {
        let cert = symbol_stretch(psi, x, k)?;
        if cert.status != Status::Certified {
            return Err(Error::PreconditionFailed {
                reason: format!("stretching of symbol set {i} across the rectangle failed"),
            });
        }
        stretch.push(cert);
    }
    let k_boxes: Vec<BoxN<S>> = stretch.iter().map(|c| c.k.clone()).collect();

    let search_opts = ZeroSearchOptions {
        tol: opts.tol.clone(),
        max_boxes: opts.max_boxes,
        allow_boundary_inflation: true,
    };
    let mut periods = Vec::new();
    let mut all_certified = true;
    for k in 1..=max_period {
        let necklaces = enumerate_periodic_words(m, k, true, opts.word_cap)?;
        let necklace_records: Vec<Result<OrbitRecord<S>>> = necklaces
            .par_iter()
            .map(|w| search_orbit(psi, &k_boxes, w, &k_boxes[w.letters()[0]], &search_opts))
            .collect();

        let mut orbits: Vec<OrbitRecord<S>> = Vec::new();
        for rec in necklace_records {
            let rec = rec?;
            for (r, rotation) in rec.word.rotations().into_iter().enumerate() {
                if r == 0 {
                    orbits.push(rec.clone());
                } else {
                    orbits.push(derive_rotation(psi, &k_boxes, &rec, &rotation, r, &search_opts)?);
                }
            }
        }
        orbits.sort_by(|a, b| a.word.letters().cmp(b.word.letters()));

        let disjoint = necklace_disjointness(&orbits);
        let certified = orbits.iter().filter(|r| r.status == Status::Certified).count();
        if certified != orbits.len() || !disjoint {
            all_certified = false;
        }
        periods.push(PeriodReport { k, orbits, certified, necklaces: necklaces.len(), disjoint });
    }

    Ok(ChaosReport {
        m,
        stretch,
        periods,
        entropy: EntropyBound {
            expression: format!("log({m})"),
            decimal: (m as f64).ln(),
        },
        status: if all_certified { Status::Certified } else { Status::Inconclusive },
    })
}

/// Stretching certificate for one symbol set across the rectangle: the
/// boundary criterion on the slab, with the phase criterion as fallback.
/// Certify that one symbol set stretches the ambient rectangle across
/// itself: the boundary criterion restricted to the slab first, then the
/// phase criterion as a fallback for maps whose face images do not land
/// exactly on the target faces.
pub fn symbol_stretch<S: Scalar>(
    psi: &MapSpec<S>,
    x: &OrientedRect<S>,
    k: &OrientedRect<S>,
) -> Result<StretchCertificate<S>> {
    let boundary =
        crate::covering::check_boundary_stretching(psi, x, x, Some(k), EvalMode::Permissive);
    match boundary {
        Ok(cert) if cert.status == Status::Certified => return Ok(cert),
        _ => {}
    }
    let target = x.body().comp(x.axis()).clone();
    let mut phase = crate::covering::check_phase_covering(psi, k, &target, x.axis())?;
    // The phase criterion controls only the expansion component; the slab is
    // still the compact set carried forward.
    phase.k = k.body().clone();
    Ok(phase)
}

/// A rotated word is realized by the same orbit advanced by `offset`
/// steps. Re-certify its anchor directly at the forward enclosure instead
/// of searching the whole symbol set again.
fn derive_rotation<S: Scalar>(
    psi: &MapSpec<S>,
    ks: &[BoxN<S>],
    base: &OrbitRecord<S>,
    rotation: &SymbolWord,
    offset: usize,
    opts: &ZeroSearchOptions<S>,
) -> Result<OrbitRecord<S>> {
    if base.status != Status::Certified {
        let mut rec = base.clone();
        rec.word = rotation.clone();
        return Ok(rec);
    }
    let seed = base.enclosures[offset % base.enclosures.len()].inflate(&opts.tol);
    let seed = seed.intersect(&ks[rotation.letters()[0]]).unwrap_or(seed);
    search_orbit(psi, ks, rotation, &seed, opts)
}

/// Orbit enclosure sets of records with distinct necklace classes must not
/// overlap; records sharing a necklace (rotations) naturally do.
fn necklace_disjointness<S: Scalar>(orbits: &[OrbitRecord<S>]) -> bool {
    let classes: Vec<Vec<usize>> = orbits
        .iter()
        .map(|r| {
            r.word.rotations().iter().map(|w| w.letters().to_vec()).min().unwrap_or_default()
        })
        .collect();
    for i in 0..orbits.len() {
        for j in i + 1..orbits.len() {
            if classes[i] == classes[j] {
                continue;
            }
            for a in &orbits[i].enclosures {
                for b in &orbits[j].enclosures {
                    if a.intersects(b) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Verdict of a forward itinerary check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ItineraryVerdict {
    /// Every step's enclosure stayed inside its symbol set.
    Contained,
    /// First step whose enclosure left its symbol set.
    Escaped(usize),
    /// First step whose enclosure width blew past the heuristic threshold;
    /// the iteration is numerically meaningless from there on.
    Inflated(usize),
}

/// Diagnostic forward iteration of an enclosure against a symbol word.
#[derive(Clone, Debug, PartialEq)]
pub struct ItineraryCheck<S: Scalar> {
    pub verdict: ItineraryVerdict,
    pub steps: Vec<StepEvidence<S>>,
}

/// Iterate `start` forward `steps` times, checking each enclosure against
/// the symbol set named by the word (read cyclically). The inflation
/// threshold `10 * max(initial width, 1e-12) * rate^j`, with `rate` a
/// numeric estimate of the map's expansion, flags widths that outgrew any
/// useful meaning; it is a diagnostic, not a certificate.
pub fn verify_itinerary<S: Scalar>(
    psi: &MapSpec<S>,
    start: &BoxN<S>,
    word: &SymbolWord,
    ks: &[BoxN<S>],
    steps: usize,
) -> Result<ItineraryCheck<S>> {
    if word.alphabet() != ks.len() {
        return Err(Error::AlphabetMismatch { letter: ks.len(), alphabet: word.alphabet() });
    }
    let rate = expansion_estimate(psi, start);
    let floor = S::from_f64(1e-12);
    let base = if start.max_width() > floor { start.max_width() } else { floor };
    let ten = S::from_int(10);

    let mut evidence = Vec::new();
    let mut verdict = ItineraryVerdict::Contained;
    let mut cur = start.clone();
    let mut threshold = base.mul_near(&ten);
    for step in 0..steps {
        let letter = word.letter_at(step as i64);
        if cur.max_width() > threshold {
            verdict = ItineraryVerdict::Inflated(step);
            break;
        }
        let contained = ks[letter].contains_box(&cur);
        evidence.push(StepEvidence {
            step,
            letter,
            enclosure: cur.clone(),
            contained,
            clipped: false,
        });
        if !contained {
            verdict = ItineraryVerdict::Escaped(step);
            break;
        }
        cur = psi.eval_box(&cur, EvalMode::Permissive)?;
        threshold = threshold.mul_near(&rate);
    }
    Ok(ItineraryCheck { verdict, steps: evidence })
}

/// Crude expansion-rate estimate: the infinity norm of a finite-difference
/// Jacobian at the box midpoint, floored at one.
fn expansion_estimate<S: Scalar>(psi: &MapSpec<S>, b: &BoxN<S>) -> S {
    let n = b.dims();
    let mid = b.midpoint();
    let h = S::from_ratio(1, 1 << 12);
    let two_h = h.add_near(&h);
    let mut rate = S::one();
    let mut row_sums = vec![S::zero(); n];
    for j in 0..n {
        let mut hi_p = mid.clone();
        hi_p[j] = hi_p[j].add_near(&h);
        let mut lo_p = mid.clone();
        lo_p[j] = lo_p[j].sub_near(&h);
        let (Ok(f_hi), Ok(f_lo)) = (
            psi.eval_point(&hi_p, EvalMode::Permissive),
            psi.eval_point(&lo_p, EvalMode::Permissive),
        ) else {
            return S::from_int(2);
        };
        for i in 0..n {
            let d = f_hi[i].sub_near(&f_lo[i]).div_near(&two_h).abs();
            row_sums[i] = row_sums[i].add_near(&d);
        }
    }
    for s in row_sums {
        if s > rate {
            rate = s;
        }
    }
    rate
}
