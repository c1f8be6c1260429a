//! Discrete laboratory for separation arguments on masked grids.
//!
//! The space is a finite rectangular lattice with an active-cell mask;
//! adjacency is face sharing (2N neighbors, no diagonals), and the active
//! region must be connected. On that graph the module decides whether a
//! cell set `C` cuts every path between two disjoint sets `A` and `B`,
//! builds the constructive sign function `f = rho * mu` whose zero set is
//! exactly `C`, computes the sides of `A` and `B`, follows a connected
//! continuum at bounded distance, and intersects wall-cutting sets in a
//! cube. Everything is exact integer graph arithmetic: flood fills and
//! breadth-first distances, so verdicts carry explicit cell witnesses.
//!
//! Grid fixtures load from plain text: a header `dims: d1 x d2 x ...`
//! (`x` or `×`), then one character per active-mask cell in layer-major
//! order, axis 0 slowest, whitespace ignored. `.` is an active cell, `#`
//! a masked one, and an ASCII letter is an active cell that also belongs
//! to the set named by that letter.

use crate::error::{Error, Result};
use crate::interval::Side;
use std::collections::{BTreeMap, VecDeque};

/// Value stored at masked cells of the per-cell integer fields.
pub const UNSET: i64 = i64::MIN;

/// A finite lattice with face adjacency and a connected active region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpace {
    dims: Vec<usize>,
    strides: Vec<usize>,
    active: Vec<bool>,
    n_active: usize,
}

impl GridSpace {
    /// Build a space from per-axis resolutions and an activity predicate
    /// over cell coordinates. The active region must be nonempty and
    /// connected under face adjacency.
    pub fn new<P: Fn(&[usize]) -> bool>(dims: Vec<usize>, mask: P) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidGrid { reason: "dims must be nonempty and positive".into() });
        }
        let total = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).ok_or_else(|| {
            Error::InvalidGrid { reason: "grid size overflows".into() }
        })?;
        let strides = strides_of(&dims);
        let mut active = vec![false; total];
        let mut coords = vec![0usize; dims.len()];
        for (flat, slot) in active.iter_mut().enumerate() {
            unflatten_into(flat, &strides, &dims, &mut coords);
            *slot = mask(&coords);
        }
        let n_active = active.iter().filter(|&&a| a).count();
        let space = Self { dims, strides, active, n_active };
        space.check_connected()?;
        Ok(space)
    }

    /// Fully active rectangular grid.
    pub fn full(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, |_| true)
    }

    /// Parse a plain-text fixture; returns the space and the letter-tagged
    /// sets in name order.
    pub fn parse_fixture(text: &str) -> Result<(Self, BTreeMap<char, GridSet>)> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("").trim();
        let dims_part = header.strip_prefix("dims:").ok_or_else(|| Error::InvalidGrid {
            reason: "fixture must start with a `dims:` header".into(),
        })?;
        let dims: Vec<usize> = dims_part
            .split(['x', '×'])
            .map(|p| {
                p.trim().parse::<usize>().map_err(|_| Error::InvalidGrid {
                    reason: format!("bad dimension `{}` in fixture header", p.trim()),
                })
            })
            .collect::<Result<_>>()?;
        let body: Vec<char> =
            lines.flat_map(|l| l.chars()).filter(|c| !c.is_whitespace()).collect();
        let total: usize = dims.iter().product();
        if body.len() != total {
            return Err(Error::InvalidGrid {
                reason: format!("fixture body has {} cells, header implies {}", body.len(), total),
            });
        }
        for &ch in &body {
            if ch != '.' && ch != '#' && !ch.is_ascii_alphabetic() {
                return Err(Error::InvalidGrid {
                    reason: format!("unexpected fixture character `{ch}`"),
                });
            }
        }
        let strides = strides_of(&dims);
        let space = {
            let body = &body;
            let strides = &strides;
            Self::new(dims.clone(), move |coords| {
                body[flatten(coords, strides)] != '#'
            })?
        };
        let mut sets: BTreeMap<char, Vec<usize>> = BTreeMap::new();
        for (flat, &ch) in body.iter().enumerate() {
            if ch.is_ascii_alphabetic() {
                sets.entry(ch).or_default().push(flat);
            }
        }
        let sets = sets
            .into_iter()
            .map(|(ch, cells)| Ok((ch, GridSet::from_cells(&space, &cells)?)))
            .collect::<Result<_>>()?;
        Ok((space, sets))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Total lattice size, masked cells included.
    pub fn total(&self) -> usize {
        self.active.len()
    }

    pub fn active_count(&self) -> usize {
        self.n_active
    }

    pub fn is_active(&self, flat: usize) -> bool {
        self.active.get(flat).copied().unwrap_or(false)
    }

    pub fn coords(&self, flat: usize) -> Vec<usize> {
        let mut c = vec![0usize; self.dims.len()];
        unflatten_into(flat, &self.strides, &self.dims, &mut c);
        c
    }

    pub fn flatten(&self, coords: &[usize]) -> usize {
        flatten(coords, &self.strides)
    }

    /// Active face neighbors of a cell, ascending axis, low side first.
    pub fn neighbors(&self, flat: usize) -> Vec<usize> {
        let coords = self.coords(flat);
        let mut out = Vec::with_capacity(2 * self.dims.len());
        for (k, &ck) in coords.iter().enumerate() {
            if ck > 0 {
                let nb = flat - self.strides[k];
                if self.active[nb] {
                    out.push(nb);
                }
            }
            if ck + 1 < self.dims[k] {
                let nb = flat + self.strides[k];
                if self.active[nb] {
                    out.push(nb);
                }
            }
        }
        out
    }

    /// Active cells on one coordinate face of the lattice.
    pub fn wall(&self, axis: usize, side: Side) -> Result<GridSet> {
        if axis >= self.dims.len() {
            return Err(Error::DimMismatch { expected: self.dims.len(), got: axis });
        }
        let want = match side {
            Side::Left => 0,
            Side::Right => self.dims[axis] - 1,
        };
        let cells: Vec<usize> = (0..self.total())
            .filter(|&f| self.active[f] && self.coords(f)[axis] == want)
            .collect();
        GridSet::from_cells(self, &cells)
    }

    fn check_connected(&self) -> Result<()> {
        let Some(start) = self.active.iter().position(|&a| a) else {
            return Err(Error::EmptySet { context: "grid space has no active cells" });
        };
        let (visited, _) = bfs(self, [start], |_| true);
        let reached = visited.iter().filter(|&&v| v).count();
        if reached != self.n_active {
            return Err(Error::Disconnected);
        }
        Ok(())
    }
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn flatten(coords: &[usize], strides: &[usize]) -> usize {
    coords.iter().zip(strides).map(|(c, s)| c * s).sum()
}

fn unflatten_into(flat: usize, strides: &[usize], dims: &[usize], out: &mut [usize]) {
    for k in 0..dims.len() {
        out[k] = flat / strides[k] % dims[k];
    }
}

/// A subset of the active cells of one `GridSpace`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSet {
    members: Vec<bool>,
    count: usize,
}

impl GridSet {
    pub fn empty(space: &GridSpace) -> Self {
        Self { members: vec![false; space.total()], count: 0 }
    }

    /// Membership from explicit flat cell indices; every cell must be
    /// active.
    pub fn from_cells(space: &GridSpace, cells: &[usize]) -> Result<Self> {
        let mut set = Self::empty(space);
        for &c in cells {
            if !space.is_active(c) {
                return Err(Error::InvalidGrid {
                    reason: format!("cell {c} is masked or out of range"),
                });
            }
            if !set.members[c] {
                set.members[c] = true;
                set.count += 1;
            }
        }
        Ok(set)
    }

    /// Membership from a coordinate predicate, restricted to active cells.
    pub fn from_pred<P: Fn(&[usize]) -> bool>(space: &GridSpace, pred: P) -> Self {
        let mut set = Self::empty(space);
        for flat in 0..space.total() {
            if space.is_active(flat) && pred(&space.coords(flat)) {
                set.members[flat] = true;
                set.count += 1;
            }
        }
        set
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.members.get(flat).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Member cells in ascending flat order.
    pub fn cells(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&f| self.members[f]).collect()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let members: Vec<bool> =
            self.members.iter().zip(&other.members).map(|(&a, &b)| a && b).collect();
        let count = members.iter().filter(|&&m| m).count();
        Self { members, count }
    }

    pub fn is_disjoint_from(&self, other: &Self) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !(a && b))
    }

    fn first_common_cell(&self, other: &Self) -> Option<usize> {
        (0..self.members.len().min(other.members.len()))
            .find(|&f| self.members[f] && other.members[f])
    }

    fn check_fits(&self, space: &GridSpace) -> Result<()> {
        if self.members.len() != space.total() {
            return Err(Error::InvalidGrid {
                reason: "set was built for a grid of a different size".into(),
            });
        }
        Ok(())
    }
}

/// Breadth-first flood over active cells satisfying `allowed`, starting
/// from the given sources (sources failing `allowed` are skipped). Returns
/// visit flags and parent links (`usize::MAX` at roots and unvisited
/// cells). Sources are taken in the order given and neighbors in ascending
/// axis order, so the traversal is deterministic.
fn bfs<I, P>(space: &GridSpace, sources: I, allowed: P) -> (Vec<bool>, Vec<usize>)
where
    I: IntoIterator<Item = usize>,
    P: Fn(usize) -> bool,
{
    let mut visited = vec![false; space.total()];
    let mut parent = vec![usize::MAX; space.total()];
    let mut queue = VecDeque::new();
    for s in sources {
        if space.is_active(s) && allowed(s) && !visited[s] {
            visited[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(cell) = queue.pop_front() {
        for nb in space.neighbors(cell) {
            if !visited[nb] && allowed(nb) {
                visited[nb] = true;
                parent[nb] = cell;
                queue.push_back(nb);
            }
        }
    }
    (visited, parent)
}

fn backtrack(parent: &[usize], mut cell: usize) -> Vec<usize> {
    let mut path = vec![cell];
    while parent[cell] != usize::MAX {
        cell = parent[cell];
        path.push(cell);
    }
    path.reverse();
    path
}

/// Verdict of a cut test, with a violating path when the cut fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutOutcome {
    pub cut: bool,
    /// Ordered face-adjacent cells from an `a`-cell to a `b`-cell, all
    /// outside `c`; present exactly when `cut` is false.
    pub witness: Option<Vec<usize>>,
}

/// Does `c` cut every path between `a` and `b`?
///
/// True iff no face-adjacent cell path joins `a` to `b` while avoiding
/// `c`, decided by a flood fill from `a` minus `c` inside the active cells
/// minus `c`. `a` and `b` must be nonempty and disjoint; either may meet
/// `c`.
pub fn cuts(space: &GridSpace, a: &GridSet, b: &GridSet, c: &GridSet) -> Result<CutOutcome> {
    for s in [a, b, c] {
        s.check_fits(space)?;
    }
    if a.is_empty() {
        return Err(Error::EmptySet { context: "cut source set" });
    }
    if b.is_empty() {
        return Err(Error::EmptySet { context: "cut target set" });
    }
    if let Some(cell) = a.first_common_cell(b) {
        return Err(Error::SetsIntersect { cell });
    }
    let sources = a.cells().into_iter().filter(|&f| !c.contains(f));
    let (visited, parent) = bfs(space, sources, |f| !c.contains(f));
    let hit = (0..space.total()).find(|&f| visited[f] && b.contains(f));
    match hit {
        Some(cell) => Ok(CutOutcome { cut: false, witness: Some(backtrack(&parent, cell)) }),
        None => Ok(CutOutcome { cut: true, witness: None }),
    }
}

/// Graph distance from every active cell to the nearest cell of `c`
/// (multi-source breadth-first). Zero exactly on `c`; masked cells hold
/// [`UNSET`].
pub fn distance_field(space: &GridSpace, c: &GridSet) -> Result<Vec<i64>> {
    c.check_fits(space)?;
    if c.is_empty() {
        return Err(Error::EmptySet { context: "distance sources" });
    }
    let mut dist = vec![UNSET; space.total()];
    let mut queue = VecDeque::new();
    for f in c.cells() {
        dist[f] = 0;
        queue.push_back(f);
    }
    while let Some(cell) = queue.pop_front() {
        for nb in space.neighbors(cell) {
            if dist[nb] == UNSET {
                dist[nb] = dist[cell] + 1;
                queue.push_back(nb);
            }
        }
    }
    Ok(dist)
}

/// The three-valued reach function: `0` on `c`, `-1` on cells joined to
/// `a` by a path avoiding `c`, `+1` on every other active cell. Masked
/// cells hold [`UNSET`].
pub fn reach_mu(space: &GridSpace, a: &GridSet, c: &GridSet) -> Result<Vec<i64>> {
    a.check_fits(space)?;
    c.check_fits(space)?;
    if a.is_empty() {
        return Err(Error::EmptySet { context: "reach source set" });
    }
    let sources = a.cells().into_iter().filter(|&f| !c.contains(f));
    let (visited, _) = bfs(space, sources, |f| !c.contains(f));
    let mut mu = vec![UNSET; space.total()];
    for f in 0..space.total() {
        if !space.is_active(f) {
            continue;
        }
        mu[f] = if c.contains(f) {
            0
        } else if visited[f] {
            -1
        } else {
            1
        };
    }
    Ok(mu)
}

/// Validity verdict of a cut function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutVerdict {
    Valid,
    /// A cell of `a` with positive value or a cell of `b` with negative
    /// value.
    Invalid { cell: usize },
}

/// The sign function `f = rho * mu` and its verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutFunction {
    /// Per-cell values; masked cells hold [`UNSET`].
    pub values: Vec<i64>,
    pub verdict: CutVerdict,
}

/// Build `f = rho * mu` from the distance field to `c` and the reach
/// function of `a`, and judge it: `Valid` iff `f <= 0` on all of `a` and
/// `f >= 0` on all of `b`. By construction `f` vanishes exactly on `c`
/// (`rho > 0` and `mu != 0` elsewhere), so a `Valid` verdict is the
/// constructive face of the cut property and the verdict matches `cuts`
/// on every input.
pub fn cut_function(
    space: &GridSpace,
    a: &GridSet,
    b: &GridSet,
    c: &GridSet,
) -> Result<CutFunction> {
    if a.is_empty() {
        return Err(Error::EmptySet { context: "cut source set" });
    }
    if b.is_empty() {
        return Err(Error::EmptySet { context: "cut target set" });
    }
    if let Some(cell) = a.first_common_cell(b) {
        return Err(Error::SetsIntersect { cell });
    }
    let rho = distance_field(space, c)?;
    let mu = reach_mu(space, a, c)?;
    let values: Vec<i64> = rho
        .iter()
        .zip(&mu)
        .map(|(&r, &m)| if r == UNSET || m == UNSET { UNSET } else { r * m })
        .collect();
    let mut verdict = CutVerdict::Valid;
    for (f, &v) in values.iter().enumerate() {
        if (a.contains(f) && v > 0) || (b.contains(f) && v < 0) {
            verdict = CutVerdict::Invalid { cell: f };
            break;
        }
    }
    Ok(CutFunction { values, verdict })
}

/// The sides of `a` and `b`: `S_A` is the space minus every cell outside
/// `a` that a path from `b` can reach without entering `a`, and
/// symmetrically for `S_B`. Both contain their defining set, and the two
/// sides are always disjoint on a connected space.
pub fn side_of(space: &GridSpace, a: &GridSet, b: &GridSet) -> Result<(GridSet, GridSet)> {
    a.check_fits(space)?;
    b.check_fits(space)?;
    if a.is_empty() {
        return Err(Error::EmptySet { context: "side source set" });
    }
    if b.is_empty() {
        return Err(Error::EmptySet { context: "side target set" });
    }
    if let Some(cell) = a.first_common_cell(b) {
        return Err(Error::SetsIntersect { cell });
    }
    let side = |from: &GridSet, avoiding: &GridSet| -> GridSet {
        let sources = from.cells().into_iter().filter(|&f| !avoiding.contains(f));
        let (reached, _) = bfs(space, sources, |f| !avoiding.contains(f));
        let mut members = vec![false; space.total()];
        let mut count = 0;
        for f in 0..space.total() {
            if space.is_active(f) && !reached[f] {
                members[f] = true;
                count += 1;
            }
        }
        GridSet { members, count }
    };
    Ok((side(b, a), side(a, b)))
}

/// A path shadowing a connected continuum, with an optional cell
/// witnessing where the continuum meets a cutting set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearPath {
    /// Face-adjacent cells from `a` to `b`, each within `radius` of
    /// `gamma_set`.
    pub path: Vec<usize>,
    /// A cell of `gamma_set` on the cutting set when one exists, else
    /// within `radius` of it; `None` when no cutting set was supplied or
    /// the continuum stays farther away.
    pub crossing: Option<usize>,
}

/// Find a cell path from `a` to `b` inside the `radius`-neighborhood of a
/// connected set `gamma_set` that meets both. On a grid such a path
/// always exists (the neighborhood contains `gamma_set` itself, which
/// joins the two), so `None` signals only that the preconditions held
/// vacuously at radius zero on a degenerate instance. When a cutting set
/// `c` is supplied, the result also reports a cell of `gamma_set` on `c`
/// (or within `radius` of it when `gamma_set` only comes that close),
/// demonstrating that a continuum joining `a` to `b` must meet any set
/// that cuts them.
pub fn path_near_continuum(
    space: &GridSpace,
    gamma_set: &GridSet,
    a: &GridSet,
    b: &GridSet,
    radius: usize,
    c: Option<&GridSet>,
) -> Result<Option<NearPath>> {
    gamma_set.check_fits(space)?;
    a.check_fits(space)?;
    b.check_fits(space)?;
    if gamma_set.is_empty() {
        return Err(Error::PreconditionFailed { reason: "continuum set is empty".into() });
    }
    let gamma_cells = gamma_set.cells();
    let (within_gamma, _) = bfs(space, [gamma_cells[0]], |f| gamma_set.contains(f));
    if gamma_cells.iter().any(|&f| !within_gamma[f]) {
        return Err(Error::PreconditionFailed {
            reason: "continuum set is not connected".into(),
        });
    }
    if gamma_set.is_disjoint_from(a) || gamma_set.is_disjoint_from(b) {
        return Err(Error::PreconditionFailed {
            reason: "continuum set must meet both endpoint sets".into(),
        });
    }

    let near = distance_like(space, &gamma_cells);
    let in_ball = |f: usize| near[f] != UNSET && near[f] as usize <= radius;
    let sources = a.cells().into_iter().filter(|&f| in_ball(f));
    let (visited, parent) = bfs(space, sources, in_ball);
    let hit = (0..space.total()).find(|&f| visited[f] && b.contains(f));
    let Some(hit) = hit else {
        return Ok(None);
    };
    let path = backtrack(&parent, hit);

    let crossing = match c {
        Some(cset) if !cset.is_empty() => {
            cset.check_fits(space)?;
            let to_c = distance_field(space, cset)?;
            let on = gamma_cells.iter().copied().find(|&f| to_c[f] == 0);
            on.or_else(|| {
                gamma_cells.iter().copied().find(|&f| to_c[f] != UNSET && to_c[f] as usize <= radius)
            })
        }
        _ => None,
    };
    Ok(Some(NearPath { path, crossing }))
}

fn distance_like(space: &GridSpace, sources: &[usize]) -> Vec<i64> {
    let mut dist = vec![UNSET; space.total()];
    let mut queue = VecDeque::new();
    for &f in sources {
        if space.is_active(f) && dist[f] == UNSET {
            dist[f] = 0;
            queue.push_back(f);
        }
    }
    while let Some(cell) = queue.pop_front() {
        for nb in space.neighbors(cell) {
            if dist[nb] == UNSET {
                dist[nb] = dist[cell] + 1;
                queue.push_back(nb);
            }
        }
    }
    dist
}

/// Intersect one wall-cutting set per axis of a cube grid. Each `sets[i]`
/// is first verified to cut the pair of opposite walls transverse to axis
/// `i`; the plain cell intersection is then returned. The intersection
/// may be empty on a coarse grid; emptiness is reported, not forbidden.
pub fn intersect_cutting_sets(space: &GridSpace, sets: &[GridSet]) -> Result<GridSet> {
    if sets.len() != space.ndim() {
        return Err(Error::DimMismatch { expected: space.ndim(), got: sets.len() });
    }
    for (axis, set) in sets.iter().enumerate() {
        let lo = space.wall(axis, Side::Left)?;
        let hi = space.wall(axis, Side::Right)?;
        let outcome = cuts(space, &lo, &hi, set).map_err(|e| Error::PreconditionFailed {
            reason: format!("wall-pair check on axis {axis}: {e}"),
        })?;
        if !outcome.cut {
            return Err(Error::PreconditionFailed {
                reason: format!("set {axis} does not cut its wall pair"),
            });
        }
    }
    let mut result = sets[0].clone();
    for s in &sets[1..] {
        result = result.intersection(s);
    }
    Ok(result)
}
