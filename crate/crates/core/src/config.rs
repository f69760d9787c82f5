//! Bernoulli(1/2) site times with counter-based, order-independent sampling.
//!
//! A sampled site's bit is a pure function of `(master_seed, sample_index,
//! site)`: each absolute 64×64 tile is one ChaCha8 stream keyed by the seed
//! pair, with the tile coordinates as the stream id. Tiles are generated on
//! first access, so a configuration over a large window only pays for the
//! part an algorithm actually visits, and the same sample index yields the
//! same bits in every window that contains a site.
//!
//! Time 0 is an open site, time 1 a closed one. Sites outside the region read
//! as closed.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::{Arc, OnceLock};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{Radius, Region, SiteCoord};
use crate::tiles::{TileLayout, TILE_SHIFT};

type TileBits = [u64; 64];

/// Where a configuration's times came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Sampled { master_seed: u64, sample_index: u64 },
    Synthetic,
}

#[derive(Debug)]
struct BitStore {
    layout: TileLayout,
    tiles: Vec<OnceLock<Box<TileBits>>>,
    key: Option<[u8; 32]>,
}

impl BitStore {
    fn seeded(region: &Region, master_seed: u64, sample_index: u64) -> Self {
        let layout = TileLayout::covering(region.bbox());
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&sample_index.to_le_bytes());
        key[16..].copy_from_slice(b"fppsim-site-bits");
        BitStore {
            layout,
            tiles: (0..layout.tile_count()).map(|_| OnceLock::new()).collect(),
            key: Some(key),
        }
    }

    fn literal(region: &Region) -> Self {
        let layout = TileLayout::covering(region.bbox());
        BitStore {
            layout,
            tiles: (0..layout.tile_count()).map(|_| OnceLock::new()).collect(),
            key: None,
        }
    }

    fn generate(&self, index: usize) -> Box<TileBits> {
        let mut bits = Box::new([0u64; 64]);
        if let Some(key) = self.key {
            let (tu, tv) = self.layout.tile_coords(index);
            let mut rng = ChaCha8Rng::from_seed(key);
            rng.set_stream(((tu as u32 as u64) << 32) | tv as u32 as u64);
            for w in bits.iter_mut() {
                *w = rng.next_u64();
            }
        }
        bits
    }

    #[inline]
    fn bit(&self, s: SiteCoord) -> Option<bool> {
        let t = self.layout.tile_of(s)?;
        let tile = self.tiles[t].get_or_init(|| self.generate(t));
        let off = TileLayout::offset(s);
        Some((tile[off >> TILE_SHIFT] >> (off & 63)) & 1 == 1)
    }
}

/// A finite region with a {0,1} time on every site.
#[derive(Debug, Clone)]
pub struct Configuration {
    region: Region,
    store: Arc<BitStore>,
    provenance: Provenance,
}

impl Configuration {
    /// Independent fair bits over `region`.
    pub fn sample(region: Region, master_seed: u64, sample_index: u64) -> Result<Self> {
        if region.is_empty() {
            return Err(Error::InvalidParameter("cannot sample an empty region".into()));
        }
        Ok(Configuration {
            store: Arc::new(BitStore::seeded(&region, master_seed, sample_index)),
            region,
            provenance: Provenance::Sampled {
                master_seed,
                sample_index,
            },
        })
    }

    /// Builds a configuration from an explicit site → time map covering
    /// `region` exactly.
    pub fn from_literal(region: Region, assignment: &HashMap<SiteCoord, u8>) -> Result<Self> {
        let mut covered = 0usize;
        for s in region.sites() {
            match assignment.get(&s) {
                Some(0) | Some(1) => covered += 1,
                Some(t) => return Err(Error::AssignmentMismatch(format!("time {t} at {s} is not 0 or 1"))),
                None => return Err(Error::AssignmentMismatch(format!("missing site {s}"))),
            }
        }
        if covered != assignment.len() {
            let extra = assignment.keys().find(|s| !region.contains(**s)).copied();
            return Err(Error::AssignmentMismatch(format!(
                "site {} lies outside the region",
                extra.unwrap_or_default()
            )));
        }
        Ok(Self::from_fn(region, |s| assignment[&s]))
    }

    /// Literal configuration with times given by `f` on every region site.
    pub fn from_fn(region: Region, mut f: impl FnMut(SiteCoord) -> u8) -> Self {
        let store = BitStore::literal(&region);
        let mut words: HashMap<usize, Box<TileBits>> = HashMap::new();
        for s in region.sites() {
            if f(s) != 0 {
                let t = store.layout.tile_of(s).expect("site inside its bounding box");
                let off = TileLayout::offset(s);
                words.entry(t).or_insert_with(|| Box::new([0u64; 64]))[off >> TILE_SHIFT] |= 1 << (off & 63);
            }
        }
        for (t, bits) in words {
            let _ = store.tiles[t].set(bits);
        }
        Configuration {
            region,
            store: Arc::new(store),
            provenance: Provenance::Synthetic,
        }
    }

    pub fn all_open(region: Region) -> Self {
        Self::from_fn(region, |_| 0)
    }

    pub fn all_closed(region: Region) -> Self {
        Self::from_fn(region, |_| 1)
    }

    /// Same times, but every site outside `region` reads as closed.
    /// `region` must lie within the current one.
    pub fn restricted(&self, region: Region) -> Result<Self> {
        let nested = match (self.region, region) {
            (Region::Ball { center: c0, radius: r0 }, Region::Ball { center: c, radius: r }) => c == c0 && r <= r0,
            (Region::Ball { center, radius: r0 }, Region::Annulus { outer, .. } | Region::Sector { outer, .. }) => {
                center == SiteCoord::ORIGIN && outer <= r0
            }
            _ => false,
        };
        if nested {
            return Ok(Configuration {
                region,
                store: Arc::clone(&self.store),
                provenance: self.provenance,
            });
        }
        if let Some(bad) = region.sites().find(|s| !self.region.contains(*s)) {
            return Err(Error::RegionTooSmall(format!(
                "restriction leaves the configuration region at {bad}"
            )));
        }
        Ok(Configuration {
            region,
            store: Arc::clone(&self.store),
            provenance: self.provenance,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `t(s)`; sites outside the region are closed padding.
    #[inline]
    pub fn time(&self, s: SiteCoord) -> u8 {
        if !self.region.contains(s) {
            return 1;
        }
        match self.store.bit(s) {
            Some(b) => b as u8,
            None => 1,
        }
    }

    #[inline]
    pub fn is_open(&self, s: SiteCoord) -> bool {
        self.time(s) == 0
    }

    /// Alias of [`Configuration::time`].
    pub fn time_at(&self, s: SiteCoord) -> u8 {
        self.time(s)
    }

    /// Fails unless `ball(0, r)` lies inside the region.
    pub fn require_ball(&self, r: Radius) -> Result<()> {
        if self.region.contains_ball(r) {
            Ok(())
        } else {
            Err(Error::RegionTooSmall(format!(
                "configuration region does not contain ball(0, {})",
                r.value()
            )))
        }
    }

    /// 64-bit digest of the region and every site time in row-major order.
    pub fn digest(&self) -> u64 {
        let mut h = Sha256::new();
        h.update(encode_region(&self.region));
        let mut byte = 0u8;
        let mut nbits = 0;
        for s in self.region.sites() {
            byte |= self.time(s) << nbits;
            nbits += 1;
            if nbits == 8 {
                h.update([byte]);
                byte = 0;
                nbits = 0;
            }
        }
        h.update([byte, nbits]);
        let out = h.finalize();
        u64::from_le_bytes(out[..8].try_into().unwrap())
    }

    /// Raw fixture dump: header (magic, region, provenance, site count) and
    /// the times packed LSB-first in row-major site order, little-endian.
    pub fn write_raw<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(RAW_MAGIC)?;
        w.write_all(&encode_region(&self.region))?;
        let (flag, seed, idx) = match self.provenance {
            Provenance::Sampled {
                master_seed,
                sample_index,
            } => (1u8, master_seed, sample_index),
            Provenance::Synthetic => (0, 0, 0),
        };
        w.write_all(&[flag])?;
        w.write_all(&seed.to_le_bytes())?;
        w.write_all(&idx.to_le_bytes())?;
        let sites: Vec<SiteCoord> = self.region.sites().collect();
        w.write_all(&(sites.len() as u64).to_le_bytes())?;
        let mut packed = vec![0u8; sites.len().div_ceil(8)];
        for (i, s) in sites.iter().enumerate() {
            packed[i / 8] |= self.time(*s) << (i % 8);
        }
        w.write_all(&packed)?;
        Ok(())
    }

    pub fn read_raw<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != RAW_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let region = decode_region(&mut r)?;
        let flag = read_u8(&mut r)?;
        let seed = read_u64(&mut r)?;
        let idx = read_u64(&mut r)?;
        let count = read_u64(&mut r)? as usize;
        let sites: Vec<SiteCoord> = region.sites().collect();
        if count != sites.len() {
            return Err(Error::Format(format!(
                "site count {count} != region size {}",
                sites.len()
            )));
        }
        let mut packed = vec![0u8; count.div_ceil(8)];
        r.read_exact(&mut packed)?;
        let times: HashMap<SiteCoord, u8> = sites
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, (packed[i / 8] >> (i % 8)) & 1))
            .collect();
        let mut cfg = Self::from_fn(region, |s| times[&s]);
        if flag == 1 {
            cfg.provenance = Provenance::Sampled {
                master_seed: seed,
                sample_index: idx,
            };
        }
        Ok(cfg)
    }
}

const RAW_MAGIC: &[u8; 5] = b"FPPC\x01";

fn encode_region(r: &Region) -> Vec<u8> {
    let mut out = Vec::with_capacity(25);
    match *r {
        Region::Ball { center, radius } => {
            out.push(0);
            out.extend(center.u.to_le_bytes());
            out.extend(center.v.to_le_bytes());
            out.extend(radius.four_r_sq().to_le_bytes());
            out.extend(0u64.to_le_bytes());
        }
        Region::Annulus { inner, outer } | Region::Sector { inner, outer } => {
            out.push(if matches!(r, Region::Annulus { .. }) { 1 } else { 2 });
            out.extend([0u8; 8]);
            out.extend(inner.four_r_sq().to_le_bytes());
            out.extend(outer.four_r_sq().to_le_bytes());
        }
        Region::Rect { u0, u1, v0, v1 } => {
            out.push(3);
            for x in [u0, u1, v0, v1] {
                out.extend(x.to_le_bytes());
            }
            out.extend([0u8; 8]);
        }
    }
    out
}

fn decode_region<R: Read>(r: &mut R) -> Result<Region> {
    let kind = read_u8(r)?;
    let mut body = [0u8; 24];
    r.read_exact(&mut body)?;
    let i32_at = |k: usize| i32::from_le_bytes(body[k..k + 4].try_into().unwrap());
    let u64_at = |k: usize| u64::from_le_bytes(body[k..k + 8].try_into().unwrap());
    match kind {
        0 => Ok(Region::Ball {
            center: SiteCoord::new(i32_at(0), i32_at(4)),
            radius: Radius::from_four_r_sq(u64_at(8)),
        }),
        1 => Region::annulus_r(Radius::from_four_r_sq(u64_at(8)), Radius::from_four_r_sq(u64_at(16))),
        2 => Region::sector_r(Radius::from_four_r_sq(u64_at(8)), Radius::from_four_r_sq(u64_at(16))),
        3 => Region::rect(i32_at(0), i32_at(4), i32_at(8), i32_at(12)),
        k => Err(Error::Format(format!("unknown region kind {k}"))),
    }
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ball0, SiteCoord};

    #[test]
    fn literal_corners() {
        let r = ball0(3);
        assert!(r.sites().all(|s| Configuration::all_open(r).time(s) == 0));
        assert!(r.sites().all(|s| Configuration::all_closed(r).time(s) == 1));
    }

    #[test]
    fn partial_and_extraneous_assignments_rejected() {
        let r = ball0(3);
        let mut a: HashMap<SiteCoord, u8> = r.sites().map(|s| (s, 0)).collect();
        a.remove(&SiteCoord::new(1, 0));
        assert!(Configuration::from_literal(r, &a).is_err());
        let mut a: HashMap<SiteCoord, u8> = r.sites().map(|s| (s, 0)).collect();
        a.insert(SiteCoord::new(40, 0), 0);
        assert!(Configuration::from_literal(r, &a).is_err());
        let mut a: HashMap<SiteCoord, u8> = r.sites().map(|s| (s, 0)).collect();
        a.insert(SiteCoord::new(0, 0), 2);
        assert!(Configuration::from_literal(r, &a).is_err());
    }

    #[test]
    fn padding_and_literal_lookup() {
        let r = ball0(3);
        let mut a: HashMap<SiteCoord, u8> = r.sites().map(|s| (s, 0)).collect();
        a.insert(SiteCoord::new(2, 0), 1);
        let cfg = Configuration::from_literal(r, &a).unwrap();
        assert_eq!(cfg.time(SiteCoord::new(2, 0)), 1);
        assert_eq!(cfg.time(SiteCoord::new(1, 0)), 0);
        assert_eq!(cfg.time(SiteCoord::new(100, -40)), 1);
        assert_eq!(cfg.provenance(), Provenance::Synthetic);
    }

    #[test]
    fn sampling_is_deterministic_and_index_sensitive() {
        let r = ball0(12);
        let a = Configuration::sample(r, 42, 3).unwrap();
        let b = Configuration::sample(r, 42, 3).unwrap();
        let c = Configuration::sample(r, 42, 4).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert!(r.sites().all(|s| a.time(s) == b.time(s)));
        assert!(r.sites().any(|s| a.time(s) != c.time(s)));
    }

    #[test]
    fn sampling_is_coupled_across_windows() {
        let small = Configuration::sample(ball0(64), 9, 1).unwrap();
        let big = Configuration::sample(ball0(128), 9, 1).unwrap();
        assert!(ball0(64).sites().all(|s| small.time(s) == big.time(s)));
    }

    #[test]
    fn empirical_mean_is_one_half() {
        let r = ball0(64);
        let (mut ones, mut total) = (0u64, 0u64);
        for i in 0..100 {
            let cfg = Configuration::sample(r, 2024, i).unwrap();
            for s in r.sites() {
                ones += cfg.time(s) as u64;
                total += 1;
            }
        }
        let mean = ones as f64 / total as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn chi_square_and_neighbour_covariance() {
        let r = ball0(300);
        let cfg = Configuration::sample(r, 77, 0).unwrap();
        let (mut n1, mut n) = (0f64, 0f64);
        let (mut sxy, mut sx, mut sy, mut pairs) = (0f64, 0f64, 0f64, 0f64);
        for s in r.sites() {
            let t = cfg.time(s) as f64;
            n1 += t;
            n += 1.0;
            let w = s.neighbor(0);
            if r.contains(w) {
                let tw = cfg.time(w) as f64;
                sxy += t * tw;
                sx += t;
                sy += tw;
                pairs += 1.0;
            }
        }
        assert!(n >= 1e5);
        let n0 = n - n1;
        let e = n / 2.0;
        let chi2 = (n1 - e).powi(2) / e + (n0 - e).powi(2) / e;
        // 1 degree of freedom, significance 1e-6
        assert!(chi2 < 23.93, "chi2 {chi2}");
        let cov = sxy / pairs - (sx / pairs) * (sy / pairs);
        let sigma = 0.25 / pairs.sqrt();
        assert!(cov.abs() < 3.0 * sigma, "cov {cov} sigma {sigma}");
    }

    #[test]
    fn raw_dump_round_trip() {
        let r = ball0(9);
        let cfg = Configuration::sample(r, 5, 6).unwrap();
        let mut buf = Vec::new();
        cfg.write_raw(&mut buf).unwrap();
        let back = Configuration::read_raw(&buf[..]).unwrap();
        assert_eq!(back.digest(), cfg.digest());
        assert_eq!(back.provenance(), cfg.provenance());
        buf[0] = b'X';
        assert!(Configuration::read_raw(&buf[..]).is_err());
    }

    #[test]
    fn restriction_pads_outside() {
        let cfg = Configuration::all_open(ball0(10));
        let inner = cfg.restricted(ball0(4)).unwrap();
        assert_eq!(inner.time(SiteCoord::new(4, 0)), 0);
        assert_eq!(inner.time(SiteCoord::new(5, 0)), 1);
        assert!(inner.restricted(ball0(5)).is_err());
    }
}
