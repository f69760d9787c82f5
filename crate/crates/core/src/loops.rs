//! Interface loops on the honeycomb dual.
//!
//! A loop is traced by the usual hull walk. Its state is a pair `(L, k)`
//! with `L` open and `R = L + dir[k]` closed; the walker crosses the
//! honeycomb edge between them with `L` on its left. With `S = L + dir[k+1]`
//! the next state is `(S, k-1)` if `S` is open and `(L, k+1)` otherwise.
//! Open sites therefore lie inside counterclockwise loops and outside
//! clockwise ones.
//!
//! Dual points use doubled coordinates `X = 2x`, `Y = 2√3 y`, in which
//! lattice sites map to `(2u+v, 3v)` and triangle centers are integral.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{Radius, Region, SiteCoord};
use crate::tiles::TileGrid;
use crate::uf::UnionFind;

/// Triangle-center offsets of state `(L, k)` in doubled coordinates.
const CENTER_OFFSET: [(i64, i64); 6] = [(1, 1), (0, 2), (-1, 1), (-1, -1), (0, -2), (1, -1)];

/// A point of the plane in doubled coordinates (`X = 2x`, `Y = 2√3 y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualPoint {
    pub x: i64,
    pub y: i64,
}

impl DualPoint {
    pub fn of_site(s: SiteCoord) -> Self {
        let (x, y) = s.scaled();
        DualPoint { x, y }
    }

    /// Euclidean coordinates.
    pub fn planar(self) -> (f64, f64) {
        (self.x as f64 / 2.0, self.y as f64 / (2.0 * 3f64.sqrt()))
    }

    /// `12 |p|^2`, exact.
    pub fn q(self) -> i128 {
        3 * (self.x as i128).pow(2) + (self.y as i128).pow(2)
    }
}

/// Forward vertex of a walk state.
#[inline]
pub fn state_vertex(l: SiteCoord, k: u8) -> DualPoint {
    let (x, y) = l.scaled();
    let (dx, dy) = CENTER_OFFSET[k as usize];
    DualPoint { x: x + dx, y: y + dy }
}

#[inline]
fn step(cfg: &Configuration, l: SiteCoord, k: u8) -> (SiteCoord, u8) {
    let s = l.neighbor((k as usize + 1) % 6);
    if cfg.is_open(s) {
        (s, (k + 5) % 6)
    } else {
        (l, (k + 1) % 6)
    }
}

/// Visits each state of the loop through `(l, k)`, starting there.
pub fn walk_loop(cfg: &Configuration, l: SiteCoord, k: u8, mut visit: impl FnMut(SiteCoord, u8)) {
    debug_assert!(cfg.is_open(l) && !cfg.is_open(l.neighbor(k as usize)));
    let (mut cl, mut ck) = (l, k);
    loop {
        visit(cl, ck);
        (cl, ck) = step(cfg, cl, ck);
        if cl == l && ck == k {
            break;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Counterclockwise => "ccw",
            Orientation::Clockwise => "cw",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualBBox {
    pub min: DualPoint,
    pub max: DualPoint,
}

/// An oriented interface loop.
#[derive(Debug, Clone)]
pub struct InterfaceLoop {
    states: Vec<(SiteCoord, u8)>,
    vertices: Vec<DualPoint>,
    orientation: Orientation,
    twice_area: i128,
    bbox: DualBBox,
    artifact: bool,
}

impl InterfaceLoop {
    fn trace(cfg: &Configuration, l: SiteCoord, k: u8) -> Self {
        let region = cfg.region();
        let mut states = Vec::new();
        let mut artifact = true;
        walk_loop(cfg, l, k, |l, k| {
            states.push((l, k));
            artifact &= !region.contains(l.neighbor(k as usize));
        });
        let vertices: Vec<DualPoint> = states.iter().map(|&(l, k)| state_vertex(l, k)).collect();
        let twice_area: i128 = vertices
            .iter()
            .zip(vertices.iter().cycle().skip(1))
            .map(|(a, b)| a.x as i128 * b.y as i128 - b.x as i128 * a.y as i128)
            .sum();
        let orientation = if twice_area > 0 {
            Orientation::Counterclockwise
        } else {
            Orientation::Clockwise
        };
        let bbox = DualBBox {
            min: DualPoint {
                x: vertices.iter().map(|p| p.x).min().unwrap(),
                y: vertices.iter().map(|p| p.y).min().unwrap(),
            },
            max: DualPoint {
                x: vertices.iter().map(|p| p.x).max().unwrap(),
                y: vertices.iter().map(|p| p.y).max().unwrap(),
            },
        };
        InterfaceLoop {
            states,
            vertices,
            orientation,
            twice_area,
            bbox,
            artifact,
        }
    }

    pub fn vertices(&self) -> &[DualPoint] {
        &self.vertices
    }

    /// Walk states `(open site, direction to the closed site)`.
    pub fn states(&self) -> &[(SiteCoord, u8)] {
        &self.states
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Twice the signed area in doubled coordinates; positive iff counterclockwise.
    pub fn twice_signed_area(&self) -> i128 {
        self.twice_area
    }

    pub fn bbox(&self) -> DualBBox {
        self.bbox
    }

    /// Largest Euclidean `x` on the loop.
    pub fn max_x(&self) -> f64 {
        self.bbox.max.x as f64 / 2.0
    }

    /// Outer boundary of the whole region: every closed site it borders is
    /// padding.
    pub fn is_artifact(&self) -> bool {
        self.artifact
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn open_sites(&self) -> impl Iterator<Item = SiteCoord> + '_ {
        self.states.iter().map(|&(l, _)| l)
    }

    pub fn closed_sites(&self) -> impl Iterator<Item = SiteCoord> + '_ {
        self.states.iter().map(|&(l, k)| l.neighbor(k as usize))
    }

    fn min_vertex(&self) -> DualPoint {
        *self.vertices.iter().min().unwrap()
    }
}

/// Winding-number containment. Rejects points on the polyline.
pub fn surrounds(lp: &InterfaceLoop, p: DualPoint) -> Result<bool> {
    winding_number(&lp.vertices, p).map(|w| w != 0)
}

/// Containment of a lattice site, which never lies on a honeycomb edge.
pub fn surrounds_site(lp: &InterfaceLoop, s: SiteCoord) -> bool {
    surrounds(lp, DualPoint::of_site(s)).expect("sites are off the dual lattice")
}

/// Winding number of the closed polyline around `p`; rejects points on it.
pub fn winding_number(poly: &[DualPoint], p: DualPoint) -> Result<i32> {
    let mut w = 0;
    for (i, &a) in poly.iter().enumerate() {
        let b = poly[(i + 1) % poly.len()];
        let cross = (b.x - a.x) as i128 * (p.y - a.y) as i128 - (p.x - a.x) as i128 * (b.y - a.y) as i128;
        if cross == 0 && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y) {
            return Err(Error::InvalidParameter("point lies on the loop".into()));
        }
        if a.y <= p.y {
            if b.y > p.y && cross > 0 {
                w += 1;
            }
        } else if b.y <= p.y && cross < 0 {
            w -= 1;
        }
    }
    Ok(w)
}

/// All interface loops of a configuration with their nesting forest.
#[derive(Debug, Clone)]
pub struct LoopSet {
    loops: Vec<InterfaceLoop>,
    parent: Vec<Option<usize>>,
}

impl LoopSet {
    pub fn loops(&self) -> &[InterfaceLoop] {
        &self.loops
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    pub fn get(&self, i: usize) -> &InterfaceLoop {
        &self.loops[i]
    }

    /// Smallest loop strictly enclosing loop `i`.
    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Loop indices in deterministic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &InterfaceLoop)> {
        self.loops.iter().enumerate()
    }
}

/// Traces every interface loop of `cfg`, padding the outside with closed
/// sites. Loops come sorted by their lexicographically smallest vertex.
pub fn trace_loops(cfg: &Configuration) -> LoopSet {
    let region = *cfg.region();
    let bbox = region.bbox();
    let sites: Vec<SiteCoord> = region.sites().collect();
    let mut index = TileGrid::new(bbox, u32::MAX);
    for (i, &s) in sites.iter().enumerate() {
        index.set(s, i as u32);
    }
    let root = sites.len();
    let mut uf = UnionFind::new(sites.len() + 1);
    for (i, &s) in sites.iter().enumerate() {
        let open = cfg.is_open(s);
        for t in crate::lattice::neighbors(s) {
            if region.contains(t) {
                if cfg.is_open(t) == open {
                    uf.union(i, index.get(t) as usize);
                }
            } else if !open {
                uf.union(i, root);
            }
        }
    }
    let cluster = |uf: &mut UnionFind, s: SiteCoord| -> usize {
        if region.contains(s) {
            uf.find(index.get(s) as usize)
        } else {
            uf.find(root)
        }
    };

    let mut seen: TileGrid<u8> = TileGrid::new(bbox, 0);
    let mut loops = Vec::new();
    for &l in &sites {
        if !cfg.is_open(l) {
            continue;
        }
        for k in 0..6u8 {
            if cfg.is_open(l.neighbor(k as usize)) || seen.get(l) & (1 << k) != 0 {
                continue;
            }
            let lp = InterfaceLoop::trace(cfg, l, k);
            for &(sl, sk) in &lp.states {
                seen.set(sl, seen.get(sl) | (1 << sk));
            }
            loops.push(lp);
        }
    }
    loops.sort_by_key(|lp| lp.min_vertex());

    // Each loop is an edge of the cluster adjacency tree; the enclosed side
    // is the child. A loop's nesting parent is the outer boundary of its
    // parent-side cluster.
    let mut outer_of = std::collections::HashMap::new();
    let mut sides = Vec::with_capacity(loops.len());
    for (i, lp) in loops.iter().enumerate() {
        let (l, k) = lp.states[0];
        let open_c = cluster(&mut uf, l);
        let closed_c = cluster(&mut uf, l.neighbor(k as usize));
        let (child, parent) = match lp.orientation {
            Orientation::Counterclockwise => (open_c, closed_c),
            Orientation::Clockwise => (closed_c, open_c),
        };
        let prev = outer_of.insert(child, i);
        debug_assert!(prev.is_none(), "cluster with two outer boundaries");
        sides.push(parent);
    }
    let parent = sides.iter().map(|p| outer_of.get(p).copied()).collect();
    LoopSet { loops, parent }
}

/// Summary of one loop crossing the segment from the origin to `(n, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct CrossingLoop {
    pub crossings: u32,
    pub artifact: bool,
    /// Largest doubled `x` coordinate.
    pub max_x2: i64,
    /// Largest `12|p|^2` over the vertices.
    pub max_q: i128,
    /// Smallest `12|p|^2` over the polyline as `num / den`.
    pub min_q: (i128, i128),
}

impl CrossingLoop {
    pub fn separates(&self) -> bool {
        self.crossings % 2 == 1
    }

    /// Polyline strictly inside `{m < |x| < n}`.
    pub fn inside_annulus(&self, m: u32, n: u32) -> bool {
        let (num, den) = self.min_q;
        let m2 = 12 * (m as i128).pow(2);
        let n2 = 12 * (n as i128).pow(2);
        num > m2 * den && self.max_q < n2
    }
}

fn segment_min_q(a: DualPoint, b: DualPoint) -> (i128, i128) {
    let dot = |p: (i128, i128), q: (i128, i128)| 3 * p.0 * q.0 + p.1 * q.1;
    let pa = (a.x as i128, a.y as i128);
    let d = ((b.x - a.x) as i128, (b.y - a.y) as i128);
    let dd = dot(d, d);
    let t = -dot(pa, d);
    if t <= 0 {
        (a.q(), 1)
    } else if t >= dd {
        (b.q(), 1)
    } else {
        (dot(pa, pa) * dd - t * t, dd)
    }
}

/// `a < b` for fractions; a zero denominator in `b` stands for +infinity.
fn q_less(a: (i128, i128), b: (i128, i128)) -> bool {
    b.1 == 0 || a.0 * b.1 < b.0 * a.1
}

/// Traces only the loops crossing the axis segment from the origin to
/// `(n, 0)`, each once. Any loop surrounding exactly one of the two points
/// crosses this segment an odd number of times.
pub fn loops_crossing_segment(cfg: &Configuration, n: u32) -> Vec<CrossingLoop> {
    let region = cfg.region();
    let n = n as i32;
    let mut done: HashSet<i32> = HashSet::new();
    let mut out = Vec::new();
    for u in 0..n {
        let (a, b) = (SiteCoord::new(u, 0), SiteCoord::new(u + 1, 0));
        let (oa, ob) = (cfg.is_open(a), cfg.is_open(b));
        if oa == ob || done.contains(&u) {
            continue;
        }
        let (l, k) = if oa { (a, 0) } else { (b, 3) };
        let mut summary = CrossingLoop {
            crossings: 0,
            artifact: true,
            max_x2: i64::MIN,
            max_q: 0,
            min_q: (0, 0),
        };
        let mut first: Option<DualPoint> = None;
        let mut prev: Option<DualPoint> = None;
        walk_loop(cfg, l, k, |sl, sk| {
            let r = sl.neighbor(sk as usize);
            summary.artifact &= !region.contains(r);
            if sl.v == 0 && r.v == 0 {
                let cu = sl.u.min(r.u);
                if (0..n).contains(&cu) {
                    summary.crossings += 1;
                    done.insert(cu);
                }
            }
            let p = state_vertex(sl, sk);
            summary.max_x2 = summary.max_x2.max(p.x);
            summary.max_q = summary.max_q.max(p.q());
            if let Some(q) = prev {
                let s = segment_min_q(q, p);
                if q_less(s, summary.min_q) {
                    summary.min_q = s;
                }
            } else {
                first = Some(p);
            }
            prev = Some(p);
        });
        let s = segment_min_q(prev.unwrap(), first.unwrap());
        if q_less(s, summary.min_q) {
            summary.min_q = s;
        }
        out.push(summary);
    }
    out
}

/// Window blow-up factor for loop counts. Only loops crossing the segment
/// are traced, so a wide window is cheap.
pub const LOOP_MARGIN: u32 = 12;

/// `a'_{0,n}`: loops separating the origin from `(n, 0)`; region must
/// contain `ball(0, 12n)`.
pub fn separating_loop_count(cfg: &Configuration, n: u32) -> Result<u32> {
    require(cfg, n, LOOP_MARGIN * n)?;
    Ok(separating_loop_count_in(cfg, n))
}

/// `a'_{0,n}` on whatever window `cfg` covers.
pub fn separating_loop_count_in(cfg: &Configuration, n: u32) -> u32 {
    loops_crossing_segment(cfg, n)
        .iter()
        .filter(|c| !c.artifact && c.separates())
        .count() as u32
}

/// `b'_{0,n}`: loops surrounding the origin inside `{x < n}`; region must
/// contain `ball(0, 12n)`.
pub fn halfplane_separating_count(cfg: &Configuration, n: u32) -> Result<u32> {
    require(cfg, n, LOOP_MARGIN * n)?;
    Ok(halfplane_separating_count_in(cfg, n))
}

pub fn halfplane_separating_count_in(cfg: &Configuration, n: u32) -> u32 {
    let x2 = 2 * n as i64;
    loops_crossing_segment(cfg, n)
        .iter()
        .filter(|c| !c.artifact && c.separates() && c.max_x2 < x2)
        .count() as u32
}

/// Loops surrounding the origin whose polyline lies in `{m < |x| < n}`.
pub fn annulus_loop_count(cfg: &Configuration, m: u32, n: u32) -> Result<u32> {
    if m < 1 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "annulus needs 1 <= m < n, got m = {m}, n = {n}"
        )));
    }
    cfg.require_ball(Radius::from_int(n))?;
    Ok(loops_crossing_segment(cfg, n)
        .iter()
        .filter(|c| !c.artifact && c.separates() && c.inside_annulus(m, n))
        .count() as u32)
}

fn require(cfg: &Configuration, n: u32, r: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    cfg.require_ball(Radius::from_int(r))
}

/// CSV dump, one loop per line.
pub fn write_loops_csv<W: Write>(set: &LoopSet, mut w: W) -> Result<()> {
    writeln!(w, "index,orientation,vertices,min_x,max_x,min_y,max_y,artifact,parent")?;
    for (i, lp) in set.iter() {
        let (x0, y0) = lp.bbox.min.planar();
        let (x1, y1) = lp.bbox.max.planar();
        let parent = set.parent(i).map(|p| p.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{i},{},{},{x0},{x1},{y0},{y1},{},{parent}",
            lp.orientation,
            lp.len(),
            lp.artifact
        )?;
    }
    Ok(())
}

/// Region-level helper: trace loops of `cfg` restricted to `window`.
pub fn trace_loops_in(cfg: &Configuration, window: Region) -> Result<LoopSet> {
    Ok(trace_loops(&cfg.restricted(window)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ball0, hex_ring, neighbors};

    fn with_closed(region: Region, closed: &[SiteCoord]) -> Configuration {
        let set: HashSet<_> = closed.iter().copied().collect();
        Configuration::from_fn(region, |s| set.contains(&s) as u8)
    }

    #[test]
    fn all_open_ball_has_one_ccw_loop() {
        let set = trace_loops(&Configuration::all_open(ball0(8)));
        assert_eq!(set.len(), 1);
        let lp = set.get(0);
        assert_eq!(lp.orientation(), Orientation::Counterclockwise);
        assert!(lp.is_artifact());
        assert!(surrounds_site(lp, SiteCoord::ORIGIN));
        assert_eq!(set.parent(0), None);
    }

    #[test]
    fn single_closed_site_gives_hexagon() {
        let c = SiteCoord::new(3, 0);
        let set = trace_loops(&with_closed(ball0(8), &[c]));
        assert_eq!(set.len(), 2);
        let hex = set.iter().find(|(_, l)| l.len() == 6).unwrap();
        assert_eq!(hex.1.orientation(), Orientation::Clockwise);
        assert!(surrounds_site(hex.1, c));
        assert!(!surrounds_site(hex.1, SiteCoord::ORIGIN));
        assert!(!hex.1.is_artifact());
        let outer = set.iter().find(|(_, l)| l.len() != 6).unwrap();
        assert_eq!(outer.1.orientation(), Orientation::Counterclockwise);
        assert!(surrounds_site(outer.1, SiteCoord::ORIGIN));
        assert_eq!(set.parent(hex.0), Some(outer.0));
    }

    #[test]
    fn ring_around_origin() {
        let cfg = with_closed(ball0(8), &neighbors(SiteCoord::ORIGIN));
        let set = trace_loops(&cfg);
        let inner = set
            .iter()
            .find(|(_, l)| l.orientation() == Orientation::Counterclockwise && l.len() == 6)
            .expect("inner loop");
        assert!(surrounds_site(inner.1, SiteCoord::ORIGIN));
        let ring = set
            .iter()
            .find(|(_, l)| l.orientation() == Orientation::Clockwise)
            .expect("ring loop");
        assert_eq!(ring.1.len(), 18);
        assert_eq!(set.parent(inner.0), Some(ring.0));
        let big = with_closed(ball0(12), &neighbors(SiteCoord::ORIGIN));
        assert_eq!(separating_loop_count_in(&big, 4), 2);
        assert_eq!(halfplane_separating_count_in(&big, 4), 2);
    }

    #[test]
    fn surrounds_examples() {
        let c = SiteCoord::new(3, 0);
        let set = trace_loops(&with_closed(ball0(8), &[c]));
        let hex = set.loops().iter().find(|l| l.len() == 6).unwrap();
        assert!(surrounds(hex, DualPoint::of_site(c)).unwrap());
        assert!(!surrounds(hex, DualPoint::of_site(SiteCoord::ORIGIN)).unwrap());
        assert!(surrounds(hex, hex.vertices()[0]).is_err());
    }

    #[test]
    fn counts_on_hand_examples() {
        let open = Configuration::all_open(ball0(12));
        assert_eq!(separating_loop_count_in(&open, 4), 0);
        assert_eq!(halfplane_separating_count_in(&open, 4), 0);
        assert_eq!(annulus_loop_count(&open, 3, 8).unwrap(), 0);

        let single = with_closed(ball0(12), &[SiteCoord::new(2, 0)]);
        assert_eq!(separating_loop_count_in(&single, 4), 0);

        let ring1 = with_closed(ball0(12), &neighbors(SiteCoord::ORIGIN));
        assert_eq!(annulus_loop_count(&ring1, 3, 8).unwrap(), 0);

        let ring5 = with_closed(ball0(12), &hex_ring(5));
        assert_eq!(annulus_loop_count(&ring5, 3, 8).unwrap(), 2);

        assert!(separating_loop_count(&Configuration::all_open(ball0(47)), 4).is_err());
        assert_eq!(
            separating_loop_count(&Configuration::all_open(ball0(48)), 4).unwrap(),
            0
        );
        assert!(annulus_loop_count(&open, 8, 8).is_err());
    }

    #[test]
    fn edge_partition_and_orientation() {
        for idx in 0..100 {
            let cfg = Configuration::sample(ball0(32), 9, idx).unwrap();
            let set = trace_loops(&cfg);
            let mut edges = HashSet::new();
            for (_, lp) in set.iter() {
                for &st in lp.states() {
                    assert!(edges.insert(st), "edge traversed twice");
                }
                let (l, k) = lp.states()[0];
                let inside_open = surrounds_site(lp, l);
                let inside_closed = surrounds_site(lp, l.neighbor(k as usize));
                assert_ne!(inside_open, inside_closed);
                assert_eq!(inside_open, lp.orientation() == Orientation::Counterclockwise);
                assert_eq!(
                    lp.twice_signed_area() > 0,
                    lp.orientation() == Orientation::Counterclockwise
                );
            }
            let mut expected = 0;
            for s in cfg.region().sites().filter(|&s| cfg.is_open(s)) {
                for (k, t) in neighbors(s).into_iter().enumerate() {
                    if !cfg.is_open(t) {
                        expected += 1;
                        assert!(edges.contains(&(s, k as u8)));
                    }
                }
            }
            assert_eq!(expected, edges.len());
        }
    }

    #[test]
    fn nesting_alternates_and_contains() {
        for idx in 0..30 {
            let cfg = Configuration::sample(ball0(24), 4, idx).unwrap();
            let set = trace_loops(&cfg);
            for (i, lp) in set.iter() {
                if let Some(p) = set.parent(i) {
                    let par = set.get(p);
                    assert_ne!(par.orientation(), lp.orientation());
                    assert!(par.twice_signed_area().abs() > lp.twice_signed_area().abs());
                    for v in lp.vertices().iter().step_by(7) {
                        assert!(surrounds(par, *v).unwrap());
                    }
                } else {
                    assert_eq!(lp.orientation(), Orientation::Counterclockwise);
                }
            }
        }
    }

    #[test]
    fn segment_tracing_matches_full_trace() {
        for idx in 0..40 {
            let cfg = Configuration::sample(ball0(30), 21, idx).unwrap();
            let set = trace_loops(&cfg);
            for n in [3u32, 7, 10] {
                let x = SiteCoord::new(n as i32, 0);
                let want = set
                    .loops()
                    .iter()
                    .filter(|l| !l.is_artifact() && surrounds_site(l, SiteCoord::ORIGIN) != surrounds_site(l, x))
                    .count() as u32;
                assert_eq!(separating_loop_count_in(&cfg, n), want);
                let half = set
                    .loops()
                    .iter()
                    .filter(|l| {
                        !l.is_artifact() && surrounds_site(l, SiteCoord::ORIGIN) && l.bbox().max.x < 2 * n as i64
                    })
                    .count() as u32;
                let b = halfplane_separating_count_in(&cfg, n);
                assert_eq!(b, half);
                assert!(b <= separating_loop_count_in(&cfg, n));
            }
        }
    }

    #[test]
    fn segment_distance_is_exact() {
        let a = DualPoint { x: -4, y: 6 };
        let b = DualPoint { x: 4, y: 6 };
        let (num, den) = segment_min_q(a, b);
        assert_eq!(num, 36 * den);
        assert_eq!(
            segment_min_q(DualPoint { x: 1, y: 1 }, DualPoint { x: 3, y: 1 }),
            (4, 1)
        );
    }

    #[test]
    fn csv_dump_has_one_line_per_loop() {
        let set = trace_loops(&with_closed(ball0(8), &[SiteCoord::new(3, 0)]));
        let mut buf = Vec::new();
        write_loops_csv(&set, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("index,orientation"));
    }
}
