//! Passage times and geodesics.
//!
//! `T(γ)` sums the times of every site of `γ`, endpoints included. Searches
//! run level by level: level `L` holds the sites at passage time exactly `L`,
//! open neighbours join the current level and closed neighbours the next one.
//! This is the two-tier (0/1) frontier expansion; each site is labelled once
//! and its label is final. Neighbours are scanned counterclockwise from `+x`
//! and a site keeps the first parent that reached it, which makes geodesics
//! reproducible.

use std::collections::{HashSet, VecDeque};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{ball0, boundary, neighbors, Radius, Region, SiteCoord, SECTOR_HALF_ANGLE};
use crate::tiles::TileGrid;

/// Window blow-up factor for point-to-point and point-to-line times.
pub const DEFAULT_MARGIN: u32 = 3;

/// Labels pack `level << 3 | parent direction`; direction 6 marks a source.
const UNSET: u16 = u16::MAX;
const SOURCE: u16 = 6;
/// Deepest level a label can hold.
const MAX_LEVEL: u32 = (UNSET >> 3) as u32 - 1;

/// Outcome of a passage-time query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassageResult {
    /// `None` when no path inside the confinement joins the two sets.
    pub value: Option<u32>,
    pub geodesic: Option<Vec<SiteCoord>>,
}

impl PassageResult {
    fn unreachable() -> Self {
        PassageResult {
            value: None,
            geodesic: None,
        }
    }

    pub fn is_reachable(&self) -> bool {
        self.value.is_some()
    }

    /// The value, or [`Error::Unreachable`].
    pub fn time(&self) -> Result<u32> {
        self.value.ok_or(Error::Unreachable)
    }
}

/// A time-minimising path of a reachable result.
pub fn geodesic_of(result: &PassageResult) -> Result<&[SiteCoord]> {
    result.geodesic.as_deref().ok_or(Error::Unreachable)
}

/// Sum of site times along `path`.
pub fn path_time(cfg: &Configuration, path: &[SiteCoord]) -> u32 {
    path.iter().map(|&s| cfg.time(s) as u32).sum()
}

/// One direction of a level-synchronous search.
struct Frontier<'a> {
    cfg: &'a Configuration,
    confinement: &'a Region,
    labels: TileGrid<u16>,
    level: u32,
    current: VecDeque<SiteCoord>,
    next: Vec<SiteCoord>,
    exhausted: bool,
    overflowed: bool,
}

impl<'a> Frontier<'a> {
    fn new(cfg: &'a Configuration, confinement: &'a Region, sources: &[SiteCoord]) -> Self {
        let bbox = confinement.bbox();
        let mut f = Frontier {
            cfg,
            confinement,
            labels: TileGrid::new(bbox, UNSET),
            level: 0,
            current: VecDeque::new(),
            next: Vec::new(),
            exhausted: false,
            overflowed: false,
        };
        for &a in sources {
            if f.labels.get(a) != UNSET {
                continue;
            }
            let t = cfg.time(a);
            f.labels.set(a, (t as u16) << 3 | SOURCE);
            if t == 0 {
                f.current.push_back(a);
            } else {
                f.next.push(a);
            }
        }
        f
    }

    #[inline]
    fn dist(&self, s: SiteCoord) -> Option<u32> {
        match self.labels.get(s) {
            UNSET => None,
            d => Some((d >> 3) as u32),
        }
    }

    /// Processes every site of the current level. `on_pop` sees each site as
    /// it is expanded and may stop the search by returning `true`.
    fn run_level(&mut self, on_pop: impl FnMut(&Self, SiteCoord) -> bool) -> Option<SiteCoord> {
        self.run_level_with(on_pop, |_, _| {})
    }

    /// As [`Frontier::run_level`], also reporting each newly labelled site
    /// with its final label.
    fn run_level_with(
        &mut self,
        mut on_pop: impl FnMut(&Self, SiteCoord) -> bool,
        mut on_label: impl FnMut(SiteCoord, u32),
    ) -> Option<SiteCoord> {
        let level = self.level;
        if level >= MAX_LEVEL {
            self.overflowed = true;
            self.exhausted = true;
            return None;
        }
        while let Some(x) = self.current.pop_front() {
            if on_pop(self, x) {
                return Some(x);
            }
            for (k, y) in neighbors(x).into_iter().enumerate() {
                if !self.confinement.contains(y) {
                    continue;
                }
                let slot = self.labels.entry(y);
                if *slot != UNSET {
                    continue;
                }
                let d = level + self.cfg.time(y) as u32;
                *slot = (d as u16) << 3 | ((k + 3) % 6) as u16;
                if d == level {
                    self.current.push_back(y);
                } else {
                    self.next.push(y);
                }
                on_label(y, d);
            }
        }
        self.current = std::mem::take(&mut self.next).into();
        self.level += 1;
        if self.current.is_empty() {
            self.exhausted = true;
        }
        None
    }

    fn check_overflow(&self) -> Result<()> {
        if self.overflowed {
            Err(Error::InvalidParameter(format!("passage time exceeds {MAX_LEVEL}")))
        } else {
            Ok(())
        }
    }

    fn path_to_source(&self, mut s: SiteCoord) -> Vec<SiteCoord> {
        let mut path = vec![s];
        loop {
            match self.labels.get(s) {
                UNSET => unreachable!("path through an unlabelled site"),
                l if l & 7 == SOURCE => break,
                l => {
                    let k = l & 7;
                    s = s.neighbor(k as usize);
                    path.push(s);
                }
            }
        }
        path
    }
}

/// Removes closed sub-walks so that no site repeats. Never increases the time.
pub fn simplify_walk(walk: &[SiteCoord]) -> Vec<SiteCoord> {
    let mut out: Vec<SiteCoord> = Vec::with_capacity(walk.len());
    let mut pos = std::collections::HashMap::new();
    for &s in walk {
        if let Some(&i) = pos.get(&s) {
            for t in out.drain(i + 1..) {
                pos.remove(&t);
            }
        } else {
            pos.insert(s, out.len());
            out.push(s);
        }
    }
    out
}

/// Minimal passage time from `sources` to any site accepted by `is_target`,
/// over paths inside `confinement`.
pub fn passage_time_to(
    cfg: &Configuration,
    sources: &[SiteCoord],
    is_target: &dyn Fn(SiteCoord) -> bool,
    confinement: &Region,
) -> Result<PassageResult> {
    if sources.is_empty() {
        return Err(Error::EmptySiteSet("A"));
    }
    if let Some(a) = sources.iter().find(|a| !confinement.contains(**a)) {
        return Err(Error::InvalidParameter(format!("source {a} outside confinement")));
    }
    let mut f = Frontier::new(cfg, confinement, sources);
    if f.current.is_empty() {
        f.level = 1;
        f.current = std::mem::take(&mut f.next).into();
    }
    while !f.current.is_empty() {
        if let Some(hit) = f.run_level(|_, x| is_target(x)) {
            let mut path = f.path_to_source(hit);
            path.reverse();
            return Ok(PassageResult {
                value: f.dist(hit),
                geodesic: Some(path),
            });
        }
    }
    f.check_overflow()?;
    Ok(PassageResult::unreachable())
}

/// `T(A, B)` over paths inside `confinement`.
pub fn passage_time(
    cfg: &Configuration,
    a: &[SiteCoord],
    b: &[SiteCoord],
    confinement: &Region,
) -> Result<PassageResult> {
    if b.is_empty() {
        return Err(Error::EmptySiteSet("B"));
    }
    if let Some(t) = b.iter().find(|t| !confinement.contains(**t)) {
        return Err(Error::InvalidParameter(format!("target {t} outside confinement")));
    }
    let targets: HashSet<SiteCoord> = b.iter().copied().collect();
    passage_time_to(cfg, a, &|s| targets.contains(&s), confinement)
}

/// `T(A, B)` by a search grown from both ends until the two labelled sets
/// certify optimality. Used for point-to-point times, where a one-sided
/// search would sweep the whole window.
pub fn passage_time_bidirectional(
    cfg: &Configuration,
    a: &[SiteCoord],
    b: &[SiteCoord],
    confinement: &Region,
) -> Result<PassageResult> {
    if a.is_empty() {
        return Err(Error::EmptySiteSet("A"));
    }
    if b.is_empty() {
        return Err(Error::EmptySiteSet("B"));
    }
    if let Some(s) = a.iter().chain(b).find(|s| !confinement.contains(**s)) {
        return Err(Error::InvalidParameter(format!("endpoint {s} outside confinement")));
    }
    let mut fa = Frontier::new(cfg, confinement, a);
    let mut fb = Frontier::new(cfg, confinement, b);
    // (cost, meeting site)
    let mut best: Option<(u32, SiteCoord)> = None;
    let offer = |best: &mut Option<(u32, SiteCoord)>, c: u32, x: SiteCoord| {
        if best.is_none_or(|(b, _)| c < b) {
            *best = Some((c, x));
        }
    };
    for &x in a {
        if let Some(db) = fb.dist(x) {
            offer(&mut best, fa.dist(x).unwrap() + db - cfg.time(x) as u32, x);
        }
    }

    // Labels are final when set, so a site labelled from both sides is
    // offered once, at its second labelling. A geodesic with no such site
    // costs at least done_a + done_b + 1 once each side has passed its
    // source level.
    let floor = |set: &[SiteCoord]| set.iter().map(|&s| cfg.time(s) as i64).max().unwrap_or(0);
    let (min_a, min_b) = (floor(a), floor(b));
    let mut done_a: i64 = -1;
    let mut done_b: i64 = -1;
    loop {
        let grow_a = if done_a < min_a || done_b < min_b {
            done_a < min_a && (done_a <= done_b || done_b >= min_b)
        } else {
            if best.is_some_and(|(c, _)| c as i64 <= done_a + done_b + 1) || fa.exhausted || fb.exhausted {
                break;
            }
            fa.current.len() + fa.next.len() <= fb.current.len() + fb.next.len()
        };
        let (me, other) = if grow_a { (&mut fa, &fb) } else { (&mut fb, &fa) };
        me.run_level_with(
            |_, _| false,
            |y, d| {
                if let Some(e) = other.dist(y) {
                    offer(&mut best, d + e - cfg.time(y) as u32, y);
                }
            },
        );
        if grow_a {
            done_a += 1;
        } else {
            done_b += 1;
        }
        if fa.exhausted && fb.exhausted {
            break;
        }
    }
    fa.check_overflow()?;
    fb.check_overflow()?;
    let Some((value, x)) = best else {
        return Ok(PassageResult::unreachable());
    };
    let mut walk = fa.path_to_source(x);
    walk.reverse();
    walk.extend(fb.path_to_source(x).into_iter().skip(1));
    Ok(PassageResult {
        value: Some(value),
        geodesic: Some(simplify_walk(&walk)),
    })
}

/// Full distance field from a source set, for inspection and tests.
pub struct DistanceField<'a> {
    inner: Frontier<'a>,
    sources: Vec<SiteCoord>,
}

impl<'a> DistanceField<'a> {
    pub fn compute(cfg: &'a Configuration, sources: &[SiteCoord], confinement: &'a Region) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::EmptySiteSet("source"));
        }
        if let Some(a) = sources.iter().find(|a| !confinement.contains(**a)) {
            return Err(Error::InvalidParameter(format!("source {a} outside confinement")));
        }
        let mut f = Frontier::new(cfg, confinement, sources);
        if f.current.is_empty() {
            f.level = 1;
            f.current = std::mem::take(&mut f.next).into();
        }
        while !f.current.is_empty() {
            f.run_level(|_, _| false);
        }
        f.check_overflow()?;
        Ok(DistanceField {
            inner: f,
            sources: sources.to_vec(),
        })
    }

    pub fn sources(&self) -> &[SiteCoord] {
        &self.sources
    }

    /// Minimal passage time from the sources, `None` if unreachable.
    pub fn dist(&self, s: SiteCoord) -> Option<u32> {
        if self.inner.confinement.contains(s) {
            self.inner.dist(s)
        } else {
            None
        }
    }

    pub fn parent(&self, s: SiteCoord) -> Option<SiteCoord> {
        match self.inner.labels.get(s) {
            UNSET => None,
            l if l & 7 == SOURCE => None,
            l => Some(s.neighbor((l & 7) as usize)),
        }
    }

    /// Source-to-`s` geodesic.
    pub fn path_to(&self, s: SiteCoord) -> Option<Vec<SiteCoord>> {
        self.dist(s)?;
        let mut p = self.inner.path_to_source(s);
        p.reverse();
        Some(p)
    }
}

/// True when `s ∈ ∂B(r)`: inside the closed ball with a neighbour outside.
#[inline]
pub fn on_ball_boundary(s: SiteCoord, r: Radius) -> bool {
    let n = s.norm4();
    n <= r.four_r_sq() && neighbors(s).iter().any(|t| t.norm4() > r.four_r_sq())
}

/// Largest confinement [`exhaustive_passage_time`] accepts.
pub const EXHAUSTIVE_MAX_SITES: usize = 64;

/// Minimum of `T(γ)` over every self-avoiding path from `a` to `b` inside the
/// confinement, found by depth-first enumeration with cost pruning.
///
/// An independent check on the level search, exponential in the region
/// size; the confinement may hold at most [`EXHAUSTIVE_MAX_SITES`] sites.
pub fn exhaustive_passage_time(
    cfg: &Configuration,
    a: &[SiteCoord],
    b: &[SiteCoord],
    confinement: &Region,
) -> Result<Option<u32>> {
    let sites: Vec<SiteCoord> = confinement.sites().collect();
    if sites.len() > EXHAUSTIVE_MAX_SITES {
        return Err(Error::InvalidParameter(format!(
            "exhaustive search takes at most {EXHAUSTIVE_MAX_SITES} sites, got {}",
            sites.len()
        )));
    }
    let index = |s: SiteCoord| sites.iter().position(|&t| t == s);
    let adj: Vec<Vec<usize>> = sites
        .iter()
        .map(|&s| neighbors(s).into_iter().filter_map(index).collect())
        .collect();
    let times: Vec<u32> = sites.iter().map(|&s| cfg.time(s) as u32).collect();
    let target: u64 = b.iter().filter_map(|&s| index(s)).fold(0, |m, i| m | 1 << i);

    let masks: Vec<u64> = adj.iter().map(|v| v.iter().fold(0, |m, &j| m | 1 << j)).collect();

    struct Search<'s> {
        adj: &'s [Vec<usize>],
        masks: &'s [u64],
        times: &'s [u32],
        target: u64,
        best: Option<u32>,
    }
    impl Search<'_> {
        /// Whether a target is reachable from `i` through unvisited sites.
        fn open_route(&self, i: usize, seen: u64) -> bool {
            let mut reach = self.masks[i] & !seen;
            let mut frontier = reach;
            while frontier != 0 {
                if reach & self.target != 0 {
                    return true;
                }
                let mut grown = 0;
                while frontier != 0 {
                    grown |= self.masks[frontier.trailing_zeros() as usize];
                    frontier &= frontier - 1;
                }
                frontier = grown & !seen & !reach;
                reach |= frontier;
            }
            reach & self.target != 0
        }

        fn go(&mut self, i: usize, seen: u64, cost: u32) {
            if self.best.is_some_and(|x| cost >= x) {
                return;
            }
            if self.target & 1 << i != 0 {
                self.best = Some(cost);
                return;
            }
            if !self.open_route(i, seen) {
                return;
            }
            for k in 0..self.adj[i].len() {
                let j = self.adj[i][k];
                if seen & 1 << j == 0 {
                    self.go(j, seen | 1 << j, cost + self.times[j]);
                }
            }
        }
    }

    let mut search = Search {
        adj: &adj,
        masks: &masks,
        times: &times,
        target,
        best: None,
    };
    for i in a.iter().filter_map(|&s| index(s)) {
        search.go(i, 1 << i, times[i]);
    }
    Ok(search.best)
}

fn window_for(cfg: &Configuration, n: u32, margin: u32) -> Result<Region> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    cfg.require_ball(Radius::from_int(n * margin))?;
    Ok(*cfg.region())
}

/// `a_{0,n}`: origin to `(n, 0)` inside the configuration region, which must
/// contain `ball(0, 3n)`.
pub fn point_to_point(cfg: &Configuration, n: u32) -> Result<PassageResult> {
    let window = window_for(cfg, n, DEFAULT_MARGIN)?;
    point_to_point_in(cfg, n, &window)
}

/// `a_{0,n}` inside an explicit confinement.
pub fn point_to_point_in(cfg: &Configuration, n: u32, confinement: &Region) -> Result<PassageResult> {
    let target = SiteCoord::new(n as i32, 0);
    passage_time_bidirectional(cfg, &[SiteCoord::ORIGIN], &[target], confinement)
}

/// `b_{0,n}`: origin to the half-plane `{x >= n}`; region must contain
/// `ball(0, 3n)`.
pub fn point_to_line(cfg: &Configuration, n: u32) -> Result<PassageResult> {
    let window = window_for(cfg, n, DEFAULT_MARGIN)?;
    point_to_line_in(cfg, n, &window)
}

pub fn point_to_line_in(cfg: &Configuration, n: u32, confinement: &Region) -> Result<PassageResult> {
    let x2 = 2 * n as i64;
    passage_time_to(cfg, &[SiteCoord::ORIGIN], &|s| s.x2() >= x2, confinement)
}

/// `c_n = T(0, ∂B(n))` inside `ball(0, n)`.
pub fn point_to_ball_boundary(cfg: &Configuration, n: u32) -> Result<PassageResult> {
    let r = Radius::from_int(n);
    cfg.require_ball(r)?;
    let conf = ball0(n);
    passage_time_to(cfg, &[SiteCoord::ORIGIN], &|s| on_ball_boundary(s, r), &conf)
}

/// `T(∂B(m), ∂B(n))` over paths in `annulus(m-1, n)`. Requires `1 <= m < n`.
pub fn annulus_time(cfg: &Configuration, m: u32, n: u32) -> Result<PassageResult> {
    if m < 1 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "annulus time needs 1 <= m < n, got m = {m}, n = {n}"
        )));
    }
    annulus_passage(cfg, m, n)
}

/// Same as [`annulus_time`] but also accepts `m == n`, where the value is the
/// cheapest single site of `∂B(m)`. Needed by the `k = 1` sandwich sum.
pub fn annulus_passage(cfg: &Configuration, m: u32, n: u32) -> Result<PassageResult> {
    if m < 1 || m > n {
        return Err(Error::InvalidParameter(format!(
            "needs 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    cfg.require_ball(Radius::from_int(n))?;
    let conf = annulus_confinement(m, n);
    let sources = boundary(&ball0(m));
    let r = Radius::from_int(n);
    passage_time_to(cfg, &sources, &|s| on_ball_boundary(s, r), &conf)
}

/// `annulus(m-1, n)`; it contains `∂B(m)` because a site within `m-1` of the
/// origin has all its neighbours inside `B(m)`.
pub fn annulus_confinement(m: u32, n: u32) -> Region {
    Region::Annulus {
        inner: Radius::from_int(m - 1),
        outer: Radius::from_int(n),
    }
}

/// The four boundary arcs of `sector(m, n)`: members with a neighbour in
/// `B(m)` (inner), outside `B(n)` (outer), or in the annulus beyond the ray
/// at `+π/10` (left) or `-π/10` (right).
#[derive(Debug, Clone, Default)]
pub struct SectorArcs {
    pub inner: Vec<SiteCoord>,
    pub outer: Vec<SiteCoord>,
    pub left: Vec<SiteCoord>,
    pub right: Vec<SiteCoord>,
}

pub fn sector_arcs(region: &Region) -> SectorArcs {
    let Region::Sector { inner, outer } = *region else {
        panic!("sector_arcs needs a sector region");
    };
    let mut arcs = SectorArcs::default();
    for s in region.sites() {
        let (mut i, mut o, mut l, mut r) = (false, false, false, false);
        for t in neighbors(s) {
            if region.contains(t) {
                continue;
            }
            let nt = t.norm4();
            if nt <= inner.four_r_sq() {
                i = true;
            } else if nt > outer.four_r_sq() {
                o = true;
            } else if t.arg() > 0.0 {
                l = true;
            } else {
                r = true;
            }
        }
        if i {
            arcs.inner.push(s);
        }
        if o {
            arcs.outer.push(s);
        }
        if l {
            arcs.left.push(s);
        }
        if r {
            arcs.right.push(s);
        }
    }
    arcs
}

/// Maximal number of disjoint closed crossing paths of `sector(m, n)`
/// (paths from the left arc to the right arc), obtained as the fewest closed
/// sites on a path inside the sector from its inner arc to its outer arc.
pub fn sector_crossing_count(cfg: &Configuration, m: u32, n: u32) -> Result<u32> {
    if m < 1 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "sector needs 1 <= m < n, got m = {m}, n = {n}"
        )));
    }
    cfg.require_ball(Radius::from_int(n))?;
    let region = Region::sector_r(Radius::from_int(m), Radius::from_int(n))?;
    let arcs = sector_arcs(&region);
    if arcs.inner.is_empty() || arcs.outer.is_empty() {
        return Ok(0);
    }
    let res = passage_time(cfg, &arcs.inner, &arcs.outer, &region)?;
    res.time()
}

/// Angular half-width of the sector, re-exported for callers building their
/// own crossing tests.
pub const fn sector_half_angle() -> f64 {
    SECTOR_HALF_ANGLE
}
