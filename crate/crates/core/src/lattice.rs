//! Triangular-lattice geometry.
//!
//! Sites use axial coordinates `(u, v)` embedded at `(u + v/2, v·√3/2)`, so
//! nearest neighbours sit at unit distance and the row `v = 0` is the real
//! axis. Every radius comparison is done on the integer `4·|pos|²`, which is
//! `(2u + v)² + 3v²`, so region membership never depends on floating point.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Axial neighbour offsets, counterclockwise starting from `+x`.
pub const DIRECTIONS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// A site of the triangular lattice in axial coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SiteCoord {
    pub u: i32,
    pub v: i32,
}

impl SiteCoord {
    pub const ORIGIN: SiteCoord = SiteCoord { u: 0, v: 0 };

    pub const fn new(u: i32, v: i32) -> Self {
        SiteCoord { u, v }
    }

    /// Planar embedding.
    pub fn pos(self) -> (f64, f64) {
        (self.u as f64 + self.v as f64 / 2.0, self.v as f64 * 3f64.sqrt() / 2.0)
    }

    /// Integer-scaled embedding `(2x, 2√3·y)`; shared with the honeycomb dual.
    pub fn scaled(self) -> (i64, i64) {
        (2 * self.u as i64 + self.v as i64, 3 * self.v as i64)
    }

    /// `4·|pos|²`, exact.
    pub fn norm4(self) -> u64 {
        let a = 2 * self.u as i64 + self.v as i64;
        let b = self.v as i64;
        (a * a + 3 * b * b) as u64
    }

    /// Twice the embedded x-coordinate, exact.
    pub fn x2(self) -> i64 {
        2 * self.u as i64 + self.v as i64
    }

    pub fn offset(self, d: (i32, i32)) -> SiteCoord {
        SiteCoord::new(self.u + d.0, self.v + d.1)
    }

    pub fn neighbor(self, k: usize) -> SiteCoord {
        self.offset(DIRECTIONS[k % 6])
    }

    /// Graph (hexagonal) distance from the origin.
    pub fn hex_distance(self) -> u32 {
        let (u, v) = (self.u as i64, self.v as i64);
        ((u.abs() + v.abs() + (u + v).abs()) / 2) as u32
    }

    /// Direction index `k` with `other == self.neighbor(k)`.
    pub fn direction_to(self, other: SiteCoord) -> Option<usize> {
        let d = (other.u - self.u, other.v - self.v);
        DIRECTIONS.iter().position(|&x| x == d)
    }

    pub fn is_adjacent(self, other: SiteCoord) -> bool {
        self.direction_to(other).is_some()
    }

    pub fn arg(self) -> f64 {
        let (x, y) = self.pos();
        y.atan2(x)
    }
}

impl fmt::Display for SiteCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

/// The six neighbours of `s`, counterclockwise starting from `(u+1, v)`.
pub fn neighbors(s: SiteCoord) -> [SiteCoord; 6] {
    std::array::from_fn(|k| s.neighbor(k))
}

/// A closed Euclidean radius, stored as the exact integer bound on `4·r²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radius {
    four_r_sq: u64,
}

impl Radius {
    pub fn from_int(r: u32) -> Self {
        Radius {
            four_r_sq: 4 * (r as u64) * (r as u64),
        }
    }

    /// Radius whose square is `four_r_sq / 4`.
    pub fn from_four_r_sq(four_r_sq: u64) -> Self {
        Radius { four_r_sq }
    }

    /// Converts a real radius. Values of `4r²` within 1e-9 (relative) of an
    /// integer snap to it, so `√3` really means `√3`.
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "radius must be finite and >= 0, got {r}"
            )));
        }
        let x = 4.0 * r * r;
        if x > 1e15 {
            return Err(Error::InvalidParameter(format!("radius {r} too large")));
        }
        let k = x.round();
        let four_r_sq = if (x - k).abs() <= 1e-9 * x.max(1.0) {
            k
        } else {
            x.floor()
        };
        Ok(Radius {
            four_r_sq: four_r_sq as u64,
        })
    }

    pub fn four_r_sq(self) -> u64 {
        self.four_r_sq
    }

    pub fn value(self) -> f64 {
        (self.four_r_sq as f64 / 4.0).sqrt()
    }

    /// Largest integer `k` with `k <= r`.
    fn floor_int(self) -> i64 {
        let mut k = self.value().floor() as i64;
        while 4 * (k + 1) * (k + 1) <= self.four_r_sq as i64 {
            k += 1;
        }
        while k > 0 && 4 * k * k > self.four_r_sq as i64 {
            k -= 1;
        }
        k
    }
}

/// Half-width of a sector, in radians.
pub const SECTOR_HALF_ANGLE: f64 = PI / 10.0;

/// A finite site set with O(1) membership and row-major enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Closed ball `{ s : |pos(s) - pos(center)| <= r }`.
    Ball { center: SiteCoord, radius: Radius },
    /// `ball(0, outer) \ ball(0, inner)`.
    Annulus { inner: Radius, outer: Radius },
    /// Sites of the annulus with `|arg| < π/10`.
    Sector { inner: Radius, outer: Radius },
    /// Axial parallelogram `u0..=u1, v0..=v1`, used for test fixtures.
    Rect { u0: i32, u1: i32, v0: i32, v1: i32 },
}

/// Axial bounding box (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBox {
    pub u0: i32,
    pub u1: i32,
    pub v0: i32,
    pub v1: i32,
}

impl BBox {
    pub fn contains(&self, s: SiteCoord) -> bool {
        s.u >= self.u0 && s.u <= self.u1 && s.v >= self.v0 && s.v <= self.v1
    }
}

impl Region {
    pub fn ball_at(center: SiteCoord, r: f64) -> Result<Self> {
        Ok(Region::Ball {
            center,
            radius: Radius::new(r)?,
        })
    }

    pub fn annulus_r(inner: Radius, outer: Radius) -> Result<Self> {
        if inner >= outer {
            return Err(Error::InvalidParameter(format!(
                "annulus needs m < n, got m = {}, n = {}",
                inner.value(),
                outer.value()
            )));
        }
        Ok(Region::Annulus { inner, outer })
    }

    pub fn sector_r(inner: Radius, outer: Radius) -> Result<Self> {
        if inner >= outer {
            return Err(Error::InvalidParameter(format!(
                "sector needs m < n, got m = {}, n = {}",
                inner.value(),
                outer.value()
            )));
        }
        if inner.four_r_sq() < 4 {
            return Err(Error::InvalidParameter("sector needs m >= 1".into()));
        }
        Ok(Region::Sector { inner, outer })
    }

    pub fn rect(u0: i32, u1: i32, v0: i32, v1: i32) -> Result<Self> {
        if u0 > u1 || v0 > v1 {
            return Err(Error::InvalidParameter("empty rectangle".into()));
        }
        Ok(Region::Rect { u0, u1, v0, v1 })
    }

    #[inline]
    pub fn contains(&self, s: SiteCoord) -> bool {
        match *self {
            Region::Ball { center, radius } => {
                let d = SiteCoord::new(s.u - center.u, s.v - center.v);
                d.norm4() <= radius.four_r_sq
            }
            Region::Annulus { inner, outer } => {
                let n = s.norm4();
                n > inner.four_r_sq && n <= outer.four_r_sq
            }
            Region::Sector { inner, outer } => {
                let n = s.norm4();
                n > inner.four_r_sq && n <= outer.four_r_sq && in_sector_angle(s)
            }
            Region::Rect { u0, u1, v0, v1 } => s.u >= u0 && s.u <= u1 && s.v >= v0 && s.v <= v1,
        }
    }

    /// Bounding box; every member lies inside it.
    pub fn bbox(&self) -> BBox {
        let disk = |c: SiteCoord, r: Radius| {
            let k = r.floor_int() as i32;
            // |v|·√3/2 <= r  and  |u + v/2| <= r
            let vr = ((2 * k) as f64 / 3f64.sqrt()).floor() as i32 + 1;
            BBox {
                u0: c.u - k - vr / 2 - 1,
                u1: c.u + k + vr / 2 + 1,
                v0: c.v - vr,
                v1: c.v + vr,
            }
        };
        match *self {
            Region::Ball { center, radius } => disk(center, radius),
            Region::Annulus { outer, .. } | Region::Sector { outer, .. } => disk(SiteCoord::ORIGIN, outer),
            Region::Rect { u0, u1, v0, v1 } => BBox { u0, u1, v0, v1 },
        }
    }

    /// Members in row-major order (`v` ascending, then `u` ascending).
    pub fn sites(&self) -> impl Iterator<Item = SiteCoord> + '_ {
        let b = self.bbox();
        (b.v0..=b.v1).flat_map(move |v| {
            (b.u0..=b.u1)
                .map(move |u| SiteCoord::new(u, v))
                .filter(move |s| self.contains(*s))
        })
    }

    pub fn len(&self) -> usize {
        self.sites().count()
    }

    pub fn is_empty(&self) -> bool {
        self.sites().next().is_none()
    }

    /// Upper bound on the Euclidean distance of any member from the origin.
    pub fn max_norm(&self) -> f64 {
        match *self {
            Region::Ball { center, radius } => {
                let (x, y) = center.pos();
                (x * x + y * y).sqrt() + radius.value()
            }
            Region::Annulus { outer, .. } | Region::Sector { outer, .. } => outer.value(),
            Region::Rect { .. } => self
                .sites()
                .map(|s| (s.norm4() as f64 / 4.0).sqrt())
                .fold(0.0, f64::max),
        }
    }

    /// True when `ball(0, r)` is a subset of this region.
    pub fn contains_ball(&self, r: Radius) -> bool {
        match *self {
            Region::Ball { center, radius } if center == SiteCoord::ORIGIN => radius >= r,
            _ => Region::Ball {
                center: SiteCoord::ORIGIN,
                radius: r,
            }
            .sites()
            .all(|s| self.contains(s)),
        }
    }
}

fn in_sector_angle(s: SiteCoord) -> bool {
    // No lattice site lies on the rays arg = ±π/10, so the float test is safe.
    let (x, y) = s.pos();
    x > 0.0 && y.abs() < SECTOR_HALF_ANGLE.tan() * x
}

/// `B(center, r)`.
pub fn ball(center: SiteCoord, r: f64) -> Result<Region> {
    Region::ball_at(center, r)
}

/// `B(0, r)` with an integer radius.
pub fn ball0(r: u32) -> Region {
    Region::Ball {
        center: SiteCoord::ORIGIN,
        radius: Radius::from_int(r),
    }
}

/// `A(m, n) = B(n) \ B(m)`.
pub fn annulus(m: f64, n: f64) -> Result<Region> {
    Region::annulus_r(Radius::new(m)?, Radius::new(n)?)
}

/// `R(m, n)`: annulus sites with `|arg| < π/10`. Requires `1 <= m < n`.
pub fn sector(m: f64, n: f64) -> Result<Region> {
    Region::sector_r(Radius::new(m)?, Radius::new(n)?)
}

/// Sites of `reg` having a neighbour outside `reg`.
pub fn boundary(reg: &Region) -> Vec<SiteCoord> {
    reg.sites()
        .filter(|&s| neighbors(s).iter().any(|&t| !reg.contains(t)))
        .collect()
}

/// Sites of the hexagonal ring at graph distance `r` from the origin.
pub fn hex_ring(r: u32) -> Vec<SiteCoord> {
    if r == 0 {
        return vec![SiteCoord::ORIGIN];
    }
    let r = r as i32;
    let mut out = Vec::with_capacity(6 * r as usize);
    let mut s = SiteCoord::new(r, 0);
    for k in 0..6 {
        let d = DIRECTIONS[(k + 2) % 6];
        for _ in 0..r {
            out.push(s);
            s = s.offset(d);
        }
    }
    out
}
