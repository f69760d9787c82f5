//! Closed circuits, open-cluster hops and loop chains.
//!
//! Circuits surrounding a point are found through the parity of crossings
//! with a ray leaving that point just above the `+x` axis: an edge crosses
//! the ray iff one end sits on the axis at `u >= 1` and the other on the row
//! `v = 1` (both relative to the point). A closed walk with odd parity winds
//! an odd number of times around the point, and one of its simple pieces is
//! a circuit around it.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::fpp::{annulus_confinement, on_ball_boundary, DistanceField};
use crate::lattice::{ball0, boundary, neighbors, Radius, Region, SiteCoord};
use crate::loops::{trace_loops, winding_number, DualPoint, LoopSet, Orientation};
use crate::uf::UnionFind;

/// Largest outer radius accepted by the exhaustive circuit oracle.
pub const BRUTE_FORCE_MAX_N: u32 = 8;
/// Largest `n` accepted by [`separating_circuit_count_point`].
pub const POINT_ORACLE_MAX_N: u32 = 6;

/// A closed lattice circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    sites: Vec<SiteCoord>,
    encloses_origin: bool,
}

impl Circuit {
    fn new(sites: Vec<SiteCoord>) -> Self {
        let mut c = Circuit {
            sites,
            encloses_origin: false,
        };
        c.encloses_origin = !c.sites.contains(&SiteCoord::ORIGIN) && c.encloses(SiteCoord::ORIGIN);
        c
    }

    pub fn sites(&self) -> &[SiteCoord] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn encloses_origin(&self) -> bool {
        self.encloses_origin
    }

    /// Whether the polygon through the site centers winds around `p`.
    /// `p` must not be one of the circuit's sites.
    pub fn encloses(&self, p: SiteCoord) -> bool {
        let poly: Vec<DualPoint> = self.sites.iter().map(|&s| DualPoint::of_site(s)).collect();
        winding_number(&poly, DualPoint::of_site(p)).expect("site off the circuit") != 0
    }

    /// Checks that the sites are distinct, closed, cyclically adjacent, and
    /// lie in `within`.
    pub fn validate(&self, cfg: &Configuration, within: &Region) -> Result<()> {
        let n = self.sites.len();
        if n < 3 {
            return Err(Error::Precondition("circuit shorter than 3".into()));
        }
        let distinct: HashSet<_> = self.sites.iter().collect();
        if distinct.len() != n {
            return Err(Error::Precondition("circuit repeats a site".into()));
        }
        for (i, &s) in self.sites.iter().enumerate() {
            if cfg.is_open(s) {
                return Err(Error::Precondition(format!("circuit site {s} is open")));
            }
            if !within.contains(s) {
                return Err(Error::Precondition(format!("circuit site {s} outside its region")));
            }
            if !s.is_adjacent(self.sites[(i + 1) % n]) {
                return Err(Error::Precondition("circuit has a gap".into()));
            }
        }
        Ok(())
    }
}

#[inline]
fn crosses_ray(a: SiteCoord, b: SiteCoord, center: SiteCoord) -> bool {
    let (a, b) = (
        SiteCoord::new(a.u - center.u, a.v - center.v),
        SiteCoord::new(b.u - center.u, b.v - center.v),
    );
    (a.v == 0 && a.u >= 1 && b.v == 1) || (b.v == 0 && b.u >= 1 && a.v == 1)
}

/// A simple cycle inside `sites` winding around `center`, if one exists.
/// `center` must not belong to `sites`.
pub fn odd_cycle(sites: &HashSet<SiteCoord>, center: SiteCoord) -> Option<Vec<SiteCoord>> {
    let mut order: Vec<SiteCoord> = sites.iter().copied().collect();
    order.sort();
    let mut visited: HashSet<SiteCoord> = HashSet::new();
    for &start in &order {
        if visited.contains(&start) {
            continue;
        }
        let mut parent: HashMap<(SiteCoord, bool), (SiteCoord, bool)> = HashMap::new();
        let mut queue = VecDeque::from([(start, false)]);
        parent.insert((start, false), (start, false));
        while let Some((s, p)) = queue.pop_front() {
            visited.insert(s);
            for t in neighbors(s) {
                if !sites.contains(&t) {
                    continue;
                }
                let node = (t, p ^ crosses_ray(s, t, center));
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(node) {
                    e.insert((s, p));
                    queue.push_back(node);
                }
            }
        }
        if parent.contains_key(&(start, true)) {
            let mut walk = vec![start];
            let mut node = (start, true);
            while node != (start, false) {
                node = parent[&node];
                walk.push(node.0);
            }
            walk.reverse();
            return Some(odd_piece(&walk, center));
        }
    }
    None
}

/// Splits a closed walk of odd ray parity until a simple odd cycle remains.
fn odd_piece(walk: &[SiteCoord], center: SiteCoord) -> Vec<SiteCoord> {
    let mut out = vec![walk[0]];
    let mut parity = vec![false];
    let mut pos = HashMap::from([(walk[0], 0usize)]);
    for &x in &walk[1..] {
        let last = *out.last().unwrap();
        let p = parity.last().unwrap() ^ crosses_ray(last, x, center);
        if let Some(&i) = pos.get(&x) {
            if p ^ parity[i] {
                return out[i..].to_vec();
            }
            for s in out.drain(i + 1..) {
                pos.remove(&s);
            }
            parity.truncate(i + 1);
        } else {
            pos.insert(x, out.len());
            out.push(x);
            parity.push(p);
        }
    }
    unreachable!("walk parity was not odd")
}

fn check_annulus(cfg: &Configuration, m: u32, n: u32) -> Result<()> {
    if m < 1 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "needs 1 <= m < n, got m = {m}, n = {n}"
        )));
    }
    cfg.require_ball(Radius::from_int(n))
}

/// Disjoint closed circuits surrounding the origin in `annulus(m-1, n)`,
/// peeled off the level sets of the distance field grown from `∂B(m)`.
/// The `j`-th circuit uses closed sites at distance exactly `j` that border
/// the region at distance `< j`.
pub fn peel_circuits(cfg: &Configuration, m: u32, n: u32) -> Result<Vec<Circuit>> {
    check_annulus(cfg, m, n)?;
    let conf = annulus_confinement(m, n);
    let sources = boundary(&ball0(m));
    let field = DistanceField::compute(cfg, &sources, &conf)?;
    let rn = Radius::from_int(n);
    let outer = ball0(n);
    let total = outer
        .sites()
        .filter(|&s| on_ball_boundary(s, rn))
        .filter_map(|s| field.dist(s))
        .min()
        .ok_or(Error::Unreachable)?;
    let source_set: HashSet<SiteCoord> = sources.iter().copied().collect();

    let mut circuits = Vec::with_capacity(total as usize);
    for j in 1..=total {
        let wall: HashSet<SiteCoord> = conf
            .sites()
            .filter(|&s| {
                !cfg.is_open(s)
                    && field.dist(s) == Some(j)
                    && (source_set.contains(&s) || neighbors(s).iter().any(|&t| field.dist(t).is_some_and(|d| d < j)))
            })
            .collect();
        let flood = flood_from(SiteCoord::ORIGIN, &outer, |s| !wall.contains(&s))
            .ok_or_else(|| Error::Precondition(format!("level {j} does not enclose the origin")))?;
        let rim: HashSet<SiteCoord> = flood
            .iter()
            .flat_map(|&s| neighbors(s))
            .filter(|t| !flood.contains(t))
            .collect();
        debug_assert!(rim.is_subset(&wall));
        let cycle = odd_cycle(&rim, SiteCoord::ORIGIN)
            .ok_or_else(|| Error::Precondition(format!("level {j} rim has no circuit")))?;
        let c = Circuit::new(cycle);
        c.validate(cfg, &conf)?;
        if !c.encloses_origin() {
            return Err(Error::Precondition(format!("level {j} circuit misses the origin")));
        }
        circuits.push(c);
    }
    let mut used = HashSet::new();
    for c in &circuits {
        for &s in c.sites() {
            if !used.insert(s) {
                return Err(Error::Precondition("peeled circuits intersect".into()));
            }
        }
    }
    Ok(circuits)
}

/// Maximal number of disjoint closed circuits surrounding the origin in
/// `annulus(m-1, n)`.
pub fn max_disjoint_circuits(cfg: &Configuration, m: u32, n: u32) -> Result<u32> {
    Ok(peel_circuits(cfg, m, n)?.len() as u32)
}

/// Connected component of `start` among sites of `world` accepted by
/// `passable`; `None` if it reaches a site with a neighbour outside `world`.
fn flood_from(start: SiteCoord, world: &Region, passable: impl Fn(SiteCoord) -> bool) -> Option<HashSet<SiteCoord>> {
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for t in neighbors(s) {
            if !world.contains(t) {
                return None;
            }
            if passable(t) && seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    Some(seen)
}

/// One step of the innermost-first circuit search.
#[derive(Debug, Clone)]
pub struct NestedCircuit {
    pub circuit: Circuit,
    /// The circuit together with every site it encloses.
    pub disk: HashSet<SiteCoord>,
}

/// Disjoint closed circuits around `center`, innermost first. Each circuit
/// is taken from the rim of the region reachable from `center` through open
/// sites, sites accepted by `passable`, and everything already enclosed, so
/// every later circuit must surround it. The search ends when that region
/// touches the edge of `world` or swallows `stop_at`.
pub fn innermost_circuits(
    cfg: &Configuration,
    world: &Region,
    center: SiteCoord,
    passable: &dyn Fn(SiteCoord) -> bool,
    stop_at: Option<SiteCoord>,
) -> Vec<NestedCircuit> {
    let mut consumed: HashSet<SiteCoord> = HashSet::new();
    let mut out = Vec::new();
    while let Some(flood) = flood_from(center, world, |s| {
        cfg.is_open(s) || passable(s) || consumed.contains(&s)
    }) {
        if stop_at.is_some_and(|x| flood.contains(&x)) {
            break;
        }
        let rim: HashSet<SiteCoord> = flood
            .iter()
            .flat_map(|&s| neighbors(s))
            .filter(|t| !flood.contains(t))
            .collect();
        let cycle = odd_cycle(&rim, center).expect("rim of a bounded region holds a circuit");
        let circuit = Circuit::new(cycle);
        let on: HashSet<SiteCoord> = circuit.sites().iter().copied().collect();
        let mut disk = consumed.clone();
        disk.extend(world.sites().filter(|&s| on.contains(&s) || circuit.encloses(s)));
        consumed = disk.clone();
        out.push(NestedCircuit { circuit, disk });
    }
    out
}

/// Exact maximal number of disjoint closed circuits surrounding the origin
/// in `annulus(m-1, n)` for `n <= 8`, by the innermost-first search. Taking
/// the innermost available circuit never hurts: any optimal family can swap
/// its innermost member for it.
pub fn brute_force_circuits(cfg: &Configuration, m: u32, n: u32) -> Result<u32> {
    check_annulus(cfg, m, n)?;
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::InvalidParameter(format!(
            "exhaustive search needs n <= {BRUTE_FORCE_MAX_N}"
        )));
    }
    let hole = Radius::from_int(m - 1).four_r_sq();
    let found = innermost_circuits(cfg, &ball0(n), SiteCoord::ORIGIN, &|s| s.norm4() <= hole, None);
    Ok(found.len() as u32)
}

/// Exact maximal number of disjoint closed circuits separating the origin
/// from `(n, 0)`, for `n <= 6`. Circuits are searched in the whole region
/// of `cfg`, which must contain `ball(0, 3n)`; separating circuits can be
/// much wider than `n`, so a generous region is advisable.
pub fn separating_circuit_count_point(cfg: &Configuration, n: u32) -> Result<u32> {
    if n == 0 || n > POINT_ORACLE_MAX_N {
        return Err(Error::InvalidParameter(format!("needs 1 <= n <= {POINT_ORACLE_MAX_N}")));
    }
    cfg.require_ball(Radius::from_int(3 * n))?;
    let window = *cfg.region();
    let o = SiteCoord::ORIGIN;
    let x = SiteCoord::new(n as i32, 0);
    let around_o = innermost_circuits(cfg, &window, o, &|s| s == x, Some(x));
    let around_x = innermost_circuits(cfg, &window, x, &|s| s == o, Some(o));
    let mut best = around_o.len().max(around_x.len());
    for (i, a) in around_o.iter().enumerate() {
        for (j, b) in around_x.iter().enumerate() {
            if a.disk.is_disjoint(&b.disk) {
                best = best.max(i + j + 2);
            }
        }
    }
    Ok(best as u32)
}

/// A passage quantity that may be undefined; the value falls back to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hops {
    pub value: u32,
    pub exists: bool,
}

/// Open clusters of an annulus and the one-closed-site hops between them.
#[derive(Debug, Clone)]
pub struct ClusterGraph {
    pub clusters: Vec<Vec<SiteCoord>>,
    /// Sorted pairs `(a, b)` with `a < b`.
    pub hop_edges: Vec<(usize, usize)>,
    pub inner_mark: Vec<bool>,
    pub outer_mark: Vec<bool>,
}

impl ClusterGraph {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.clusters.len()];
        for &(a, b) in &self.hop_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Clusters of open sites of `annulus(m-1, n)`.
pub fn build_cluster_graph(cfg: &Configuration, m: u32, n: u32) -> Result<ClusterGraph> {
    check_annulus(cfg, m, n)?;
    let conf = annulus_confinement(m, n);
    let open: Vec<SiteCoord> = conf.sites().filter(|&s| cfg.is_open(s)).collect();
    let index: HashMap<SiteCoord, usize> = open.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut uf = UnionFind::new(open.len());
    for (i, &s) in open.iter().enumerate() {
        for t in neighbors(s) {
            if let Some(&j) = index.get(&t) {
                uf.union(i, j);
            }
        }
    }
    let mut label: HashMap<usize, usize> = HashMap::new();
    let mut clusters: Vec<Vec<SiteCoord>> = Vec::new();
    let mut cluster_of = vec![0usize; open.len()];
    for (i, &s) in open.iter().enumerate() {
        let root = uf.find(i);
        let next = clusters.len();
        let c = *label.entry(root).or_insert(next);
        if c == clusters.len() {
            clusters.push(Vec::new());
        }
        clusters[c].push(s);
        cluster_of[i] = c;
    }
    let mut edges = HashSet::new();
    for s in conf.sites().filter(|&s| !cfg.is_open(s)) {
        let mut touching: Vec<usize> = neighbors(s)
            .iter()
            .filter_map(|t| index.get(t).map(|&i| cluster_of[i]))
            .collect();
        touching.sort_unstable();
        touching.dedup();
        for (a, &ca) in touching.iter().enumerate() {
            for &cb in &touching[a + 1..] {
                edges.insert((ca, cb));
            }
        }
    }
    let mut hop_edges: Vec<_> = edges.into_iter().collect();
    hop_edges.sort_unstable();
    let rm = Radius::from_int(m);
    let rn = Radius::from_int(n);
    let mut inner_mark = vec![false; clusters.len()];
    let mut outer_mark = vec![false; clusters.len()];
    for (c, sites) in clusters.iter().enumerate() {
        inner_mark[c] = sites.iter().any(|&s| on_ball_boundary(s, rm));
        outer_mark[c] = sites.iter().any(|&s| on_ball_boundary(s, rn));
    }
    Ok(ClusterGraph {
        clusters,
        hop_edges,
        inner_mark,
        outer_mark,
    })
}

/// `T'`: fewest hops from an inner-marked to an outer-marked cluster.
pub fn cluster_hops(cfg: &Configuration, m: u32, n: u32) -> Result<Hops> {
    let g = build_cluster_graph(cfg, m, n)?;
    let adj = g.adjacency();
    let mut dist = vec![u32::MAX; g.clusters.len()];
    let mut queue = VecDeque::new();
    for (c, &inner) in g.inner_mark.iter().enumerate() {
        if inner {
            dist[c] = 0;
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        if g.outer_mark[c] {
            return Ok(Hops {
                value: dist[c],
                exists: true,
            });
        }
        for &d in &adj[c] {
            if dist[d] == u32::MAX {
                dist[d] = dist[c] + 1;
                queue.push_back(d);
            }
        }
    }
    Ok(Hops {
        value: 0,
        exists: false,
    })
}

/// `T'`, taken as 0 when no cluster sequence exists.
pub fn cluster_hop_time(cfg: &Configuration, m: u32, n: u32) -> Result<u32> {
    Ok(cluster_hops(cfg, m, n)?.value)
}

/// Where a loop sits relative to the terminals of a chain search.
struct LoopTouch {
    meets_inner: bool,
    meets_outer: bool,
    inside: bool,
}

fn loop_touch(set: &LoopSet, i: usize, m: u32, n: u32) -> LoopTouch {
    let rm = Radius::from_int(m).four_r_sq();
    let rn = Radius::from_int(n).four_r_sq();
    let lp = set.get(i);
    let mut t = LoopTouch {
        meets_inner: false,
        meets_outer: false,
        inside: true,
    };
    for s in lp.open_sites().chain(lp.closed_sites()) {
        let q = s.norm4();
        if q <= rm {
            t.meets_inner = true;
            t.inside = false;
        } else if q > rn {
            t.meets_outer = true;
            t.inside = false;
        }
    }
    t
}

/// `T''` on a given loop set: the cheapest chain from a loop meeting
/// `B(m)` to one meeting the outside of `B(n)`, through loops lying in
/// `B(n) \ B(m)`. A counterclockwise loop may hop at cost 1 to any loop
/// sharing one of its closed neighbours; a clockwise loop moves at cost 0
/// to its nesting parent, the smallest counterclockwise loop around it.
pub fn chain_time_on(set: &LoopSet, m: u32, n: u32) -> Hops {
    let touch: Vec<LoopTouch> = (0..set.len()).map(|i| loop_touch(set, i, m, n)).collect();
    let mut by_closed: HashMap<SiteCoord, Vec<usize>> = HashMap::new();
    for (i, lp) in set.iter() {
        for r in lp.closed_sites() {
            let v = by_closed.entry(r).or_default();
            if v.last() != Some(&i) {
                v.push(i);
            }
        }
    }
    let mut dist = vec![u32::MAX; set.len()];
    let mut deque = VecDeque::new();
    for (i, t) in touch.iter().enumerate() {
        if t.meets_inner {
            dist[i] = 0;
            deque.push_back(i);
        }
    }
    let mut done = vec![false; set.len()];
    while let Some(i) = deque.pop_front() {
        if done[i] {
            continue;
        }
        done[i] = true;
        if touch[i].meets_outer {
            return Hops {
                value: dist[i],
                exists: true,
            };
        }
        let lp = set.get(i);
        let mut relax = |j: usize, cost: u32, deque: &mut VecDeque<usize>| {
            if !(touch[j].inside || touch[j].meets_outer) {
                return;
            }
            let d = dist[i] + cost;
            if d < dist[j] {
                dist[j] = d;
                if cost == 0 {
                    deque.push_front(j);
                } else {
                    deque.push_back(j);
                }
            }
        };
        match lp.orientation() {
            Orientation::Clockwise => {
                if let Some(p) = set.parent(i) {
                    relax(p, 0, &mut deque);
                }
            }
            Orientation::Counterclockwise => {
                let mut targets: Vec<usize> = lp
                    .closed_sites()
                    .flat_map(|r| by_closed[&r].iter().copied())
                    .filter(|&j| j != i)
                    .collect();
                targets.sort_unstable();
                targets.dedup();
                for j in targets {
                    relax(j, 1, &mut deque);
                }
            }
        }
    }
    Hops {
        value: 0,
        exists: false,
    }
}

/// Loops of the configuration seen through the `annulus(m-1, n)` window.
pub fn window_loops(cfg: &Configuration, m: u32, n: u32) -> Result<LoopSet> {
    check_annulus(cfg, m, n)?;
    Ok(trace_loops(&cfg.restricted(annulus_confinement(m, n))?))
}

/// `T''` with loops traced in the `annulus(m-1, n)` window; 0 when no chain
/// exists.
pub fn chain_time(cfg: &Configuration, m: u32, n: u32) -> Result<u32> {
    Ok(chain_hops(cfg, m, n)?.value)
}

pub fn chain_hops(cfg: &Configuration, m: u32, n: u32) -> Result<Hops> {
    Ok(chain_time_on(&window_loops(cfg, m, n)?, m, n))
}

/// The three chain times of the subadditivity check, all read off the loops
/// of the `annulus(0, 2^j)` window so that a chain can be split.
pub fn chain_split_terms(cfg: &Configuration, i: u32, j: u32) -> Result<[u32; 3]> {
    if i == 0 || i >= j || j >= 31 {
        return Err(Error::InvalidParameter(format!(
            "needs 0 < i < j, got i = {i}, j = {j}"
        )));
    }
    let (a, b) = (1u32 << i, 1u32 << j);
    let set = window_loops(cfg, 1, b)?;
    Ok([
        chain_time_on(&set, 1, b).value,
        chain_time_on(&set, 1, a).value,
        chain_time_on(&set, a, b).value,
    ])
}

/// `T''(1, 2^j) <= T''(1, 2^i) + T''(2^i, 2^j) + 1`.
pub fn chain_subadditivity_check(cfg: &Configuration, i: u32, j: u32) -> Result<bool> {
    let [whole, left, right] = chain_split_terms(cfg, i, j)?;
    Ok(whole <= left + right + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpp::annulus_time;
    use crate::lattice::hex_ring;

    fn with_closed(region: Region, closed: &[SiteCoord]) -> Configuration {
        let set: HashSet<_> = closed.iter().copied().collect();
        Configuration::from_fn(region, |s| set.contains(&s) as u8)
    }

    #[test]
    fn ray_parity_finds_rings() {
        for r in 1..5 {
            let ring: HashSet<_> = hex_ring(r).into_iter().collect();
            let cyc = odd_cycle(&ring, SiteCoord::ORIGIN).unwrap();
            assert_eq!(cyc.len(), 6 * r as usize);
            assert!(Circuit::new(cyc).encloses_origin());
            assert!(odd_cycle(&ring, SiteCoord::new(3 * r as i32 + 1, 0)).is_none());
        }
        let arc: HashSet<_> = hex_ring(3).into_iter().filter(|s| s.v != 0 || s.u < 0).collect();
        assert!(odd_cycle(&arc, SiteCoord::ORIGIN).is_none());
    }

    #[test]
    fn examples_on_rings() {
        let open = Configuration::all_open(ball0(8));
        assert_eq!(max_disjoint_circuits(&open, 2, 6).unwrap(), 0);
        assert_eq!(brute_force_circuits(&open, 2, 6).unwrap(), 0);

        let ring = with_closed(ball0(8), &hex_ring(3));
        assert_eq!(max_disjoint_circuits(&ring, 2, 6).unwrap(), 1);
        assert_eq!(brute_force_circuits(&ring, 2, 6).unwrap(), 1);
        assert_eq!(annulus_time(&ring, 2, 6).unwrap().value, Some(1));

        let closed = Configuration::all_closed(ball0(8));
        let t = annulus_time(&closed, 2, 6).unwrap().value.unwrap();
        assert_eq!(max_disjoint_circuits(&closed, 2, 6).unwrap(), t);
        assert_eq!(brute_force_circuits(&closed, 2, 6).unwrap(), t);
        assert!(brute_force_circuits(&closed, 2, 9).is_err());
        assert!(max_disjoint_circuits(&closed, 3, 3).is_err());
    }

    #[test]
    fn cluster_graph_examples() {
        let open = Configuration::all_open(ball0(8));
        let g = build_cluster_graph(&open, 2, 8).unwrap();
        assert_eq!(g.clusters.len(), 1);
        assert!(g.inner_mark[0] && g.outer_mark[0]);
        assert_eq!(cluster_hops(&open, 2, 8).unwrap(), Hops { value: 0, exists: true });

        let ring = with_closed(ball0(8), &hex_ring(4));
        let g = build_cluster_graph(&ring, 2, 8).unwrap();
        assert_eq!(g.clusters.len(), 2);
        assert_eq!(g.hop_edges, vec![(0, 1)]);
        assert_eq!(cluster_hop_time(&ring, 2, 8).unwrap(), 1);

        let closed = Configuration::all_closed(ball0(8));
        let g = build_cluster_graph(&closed, 2, 8).unwrap();
        assert!(g.clusters.is_empty());
        assert_eq!(
            cluster_hops(&closed, 2, 8).unwrap(),
            Hops {
                value: 0,
                exists: false
            }
        );
    }

    #[test]
    fn chain_examples() {
        let open = Configuration::all_open(ball0(8));
        assert_eq!(chain_hops(&open, 2, 8).unwrap(), Hops { value: 0, exists: true });
        let ring = with_closed(ball0(8), &hex_ring(4));
        assert_eq!(chain_hops(&ring, 2, 8).unwrap(), Hops { value: 1, exists: true });
        assert!(chain_subadditivity_check(&open, 1, 3).unwrap());
    }

    #[test]
    fn nested_double_ring_subadditivity() {
        let mut closed = hex_ring(2);
        closed.extend(hex_ring(6));
        let cfg = with_closed(ball0(8), &closed);
        let [whole, left, right] = chain_split_terms(&cfg, 2, 3).unwrap();
        assert_eq!(whole, 2);
        assert!(left + right >= 2);
        assert!(chain_subadditivity_check(&cfg, 2, 3).unwrap());
    }

    #[test]
    fn separating_count_examples() {
        let open = Configuration::all_open(ball0(12));
        assert_eq!(separating_circuit_count_point(&open, 4).unwrap(), 0);
        let ring = with_closed(ball0(12), &neighbors(SiteCoord::ORIGIN));
        assert_eq!(separating_circuit_count_point(&ring, 4).unwrap(), 1);
        assert!(separating_circuit_count_point(&ring, 7).is_err());
    }
}
