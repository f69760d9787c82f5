//! Circuit/passage-time duality and the cluster and chain relations on
//! seeded random configurations.

use std::collections::{HashMap, HashSet};

use fppsim::circuits::{
    brute_force_circuits, build_cluster_graph, chain_subadditivity_check, cluster_hops, max_disjoint_circuits,
    peel_circuits, separating_circuit_count_point,
};
use fppsim::fpp::{annulus_time, point_to_point};
use fppsim::lattice::{ball0, neighbors, Radius, Region, SiteCoord};
use fppsim::loops::{winding_number, DualPoint};
use fppsim::Configuration;

#[test]
fn duality_on_small_annuli() {
    for (m, n) in [(2u32, 6u32), (2, 8), (3, 8)] {
        for idx in 0..200 {
            let cfg = Configuration::sample(ball0(n), 1, idx).unwrap();
            let t = annulus_time(&cfg, m, n).unwrap().value.unwrap();
            let peeled = max_disjoint_circuits(&cfg, m, n).unwrap();
            let brute = brute_force_circuits(&cfg, m, n).unwrap();
            assert_eq!((t, peeled), (brute, brute), "({m},{n}) sample {idx}");
        }
    }
}

#[test]
fn peeled_circuits_are_structurally_sound() {
    for idx in 0..30 {
        let cfg = Configuration::sample(ball0(40), 2, idx).unwrap();
        let circuits = peel_circuits(&cfg, 5, 40).unwrap();
        assert_eq!(circuits.len() as u32, annulus_time(&cfg, 5, 40).unwrap().value.unwrap());
        let conf = Region::annulus_r(Radius::from_int(4), Radius::from_int(40)).unwrap();
        let mut used = HashSet::new();
        for c in &circuits {
            c.validate(&cfg, &conf).unwrap();
            assert!(c.encloses_origin());
            for &s in c.sites() {
                assert!(used.insert(s));
            }
        }
    }
}

fn surrounds_origin(cycle: &[SiteCoord]) -> bool {
    let poly: Vec<DualPoint> = cycle.iter().map(|&s| DualPoint::of_site(s)).collect();
    winding_number(&poly, DualPoint::of_site(SiteCoord::ORIGIN)).unwrap() != 0
}

/// Every simple cycle of closed sites in `sites`, as bit masks.
fn closed_cycles(cfg: &Configuration, sites: &[SiteCoord]) -> Vec<(u64, Vec<SiteCoord>)> {
    let closed: Vec<SiteCoord> = sites.iter().copied().filter(|&s| !cfg.is_open(s)).collect();
    assert!(closed.len() <= 64);
    let idx: HashMap<SiteCoord, usize> = closed.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    fn go(
        start: usize,
        path: &mut Vec<usize>,
        mask: u64,
        closed: &[SiteCoord],
        idx: &HashMap<SiteCoord, usize>,
        seen: &mut HashSet<u64>,
        out: &mut Vec<(u64, Vec<SiteCoord>)>,
    ) {
        let last = closed[*path.last().unwrap()];
        for t in neighbors(last) {
            let Some(&j) = idx.get(&t) else { continue };
            if j == start && path.len() >= 3 {
                if seen.insert(mask) {
                    out.push((mask, path.iter().map(|&k| closed[k]).collect()));
                }
            } else if j > start && mask & (1 << j) == 0 {
                path.push(j);
                go(start, path, mask | (1 << j), closed, idx, seen, out);
                path.pop();
            }
        }
    }
    for s in 0..closed.len() {
        go(s, &mut vec![s], 1 << s, &closed, &idx, &mut seen, &mut out);
    }
    out
}

fn max_packing(sets: &[u64]) -> u32 {
    fn go(sets: &[u64], used: u64) -> u32 {
        let Some((first, rest)) = sets.split_first() else {
            return 0;
        };
        let skip = go(rest, used);
        if first & used == 0 {
            skip.max(1 + go(rest, used | first))
        } else {
            skip
        }
    }
    let minimal: Vec<u64> = sets
        .iter()
        .copied()
        .filter(|&s| !sets.iter().any(|&t| t != s && t & s == t))
        .collect();
    go(&minimal, 0)
}

#[test]
fn innermost_search_matches_cycle_enumeration() {
    // (outer radius, closed with probability 3/4 rather than 5/8, samples)
    for (n, dense, samples) in [(3u32, true, 25u64), (3, false, 400)] {
        let m = 2;
        let conf = Region::annulus_r(Radius::from_int(m - 1), Radius::from_int(n)).unwrap();
        let sites: Vec<SiteCoord> = conf.sites().collect();
        let mut nontrivial = 0;
        for idx in 0..samples {
            let a = Configuration::sample(ball0(n), 3, idx).unwrap();
            let b = Configuration::sample(ball0(n), 3, idx + 10_000).unwrap();
            let c = Configuration::sample(ball0(n), 3, idx + 20_000).unwrap();
            let cfg = Configuration::from_fn(ball0(n), |s| {
                if dense {
                    a.time(s) | b.time(s)
                } else {
                    a.time(s) | (b.time(s) & c.time(s))
                }
            });
            let cycles: Vec<u64> = closed_cycles(&cfg, &sites)
                .into_iter()
                .filter(|(_, c)| surrounds_origin(c))
                .map(|(mask, _)| mask)
                .collect();
            let want = max_packing(&cycles);
            nontrivial += (want > 0) as u32;
            assert_eq!(brute_force_circuits(&cfg, m, n).unwrap(), want, "n {n} sample {idx}");
        }
        assert!(nontrivial >= 5, "n {n}: only {nontrivial} instances with circuits");
    }
}

#[test]
fn annulus_time_bounded_by_cluster_hops() {
    let mut defined = 0;
    for idx in 0..200 {
        let (m, n) = (2 + (idx % 3) as u32, 8 + (idx % 5) as u32);
        let cfg = Configuration::sample(ball0(n), 4, idx).unwrap();
        let hops = cluster_hops(&cfg, m, n).unwrap();
        if hops.exists {
            defined += 1;
            assert!(annulus_time(&cfg, m, n).unwrap().value.unwrap() <= hops.value);
        } else {
            assert_eq!(hops.value, 0);
        }
    }
    assert!(defined > 100);
}

#[test]
fn cluster_graph_is_a_partition() {
    for idx in 0..40 {
        let cfg = Configuration::sample(ball0(20), 5, idx).unwrap();
        let g = build_cluster_graph(&cfg, 3, 20).unwrap();
        let conf = Region::annulus_r(Radius::from_int(2), Radius::from_int(20)).unwrap();
        let mut owner = HashMap::new();
        for (c, sites) in g.clusters.iter().enumerate() {
            for &s in sites {
                assert!(cfg.is_open(s));
                assert!(owner.insert(s, c).is_none());
            }
        }
        let open: usize = conf.sites().filter(|&s| cfg.is_open(s)).count();
        assert_eq!(owner.len(), open);
        for (&s, &c) in &owner {
            for t in neighbors(s) {
                if let Some(&d) = owner.get(&t) {
                    assert_eq!(c, d, "adjacent open sites split");
                }
            }
        }
        let edges: HashSet<_> = g.hop_edges.iter().copied().collect();
        for s in conf.sites().filter(|&s| !cfg.is_open(s)) {
            let cs: HashSet<usize> = neighbors(s).iter().filter_map(|t| owner.get(t).copied()).collect();
            for &a in &cs {
                for &b in &cs {
                    if a < b {
                        assert!(edges.contains(&(a, b)));
                    }
                }
            }
        }
        assert!(g.hop_edges.iter().all(|&(a, b)| a < b));
    }
}

#[test]
fn point_time_close_to_circuit_count() {
    for idx in 0..100 {
        let cfg = Configuration::sample(ball0(40), 6, idx).unwrap();
        let a = point_to_point(&cfg, 4).unwrap().value.unwrap();
        let c = separating_circuit_count_point(&cfg, 4).unwrap();
        assert!(a.abs_diff(c) <= 2, "sample {idx}: a = {a}, circuits = {c}");
    }
}

#[test]
fn chain_subadditivity_on_random_configurations() {
    for idx in 0..60 {
        let cfg = Configuration::sample(ball0(64), 7, idx).unwrap();
        for (i, j) in [(1u32, 3u32), (2, 4), (3, 6), (2, 6)] {
            assert!(chain_subadditivity_check(&cfg, i, j).unwrap(), "sample {idx} ({i},{j})");
        }
    }
}
