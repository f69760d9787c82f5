//! Sparse 64×64 tiling of a region's bounding box.
//!
//! Tiles are aligned to absolute lattice coordinates (multiples of 64), so a
//! tile's identity does not depend on which region it was allocated for.

use crate::lattice::{BBox, SiteCoord};

pub const TILE_SHIFT: u32 = 6;
pub const TILE: i32 = 1 << TILE_SHIFT;
pub const TILE_AREA: usize = (TILE * TILE) as usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileLayout {
    tu0: i32,
    tv0: i32,
    ntu: usize,
    ntv: usize,
}

impl TileLayout {
    pub fn covering(b: BBox) -> Self {
        let tu0 = b.u0 >> TILE_SHIFT;
        let tv0 = b.v0 >> TILE_SHIFT;
        let ntu = ((b.u1 >> TILE_SHIFT) - tu0 + 1) as usize;
        let ntv = ((b.v1 >> TILE_SHIFT) - tv0 + 1) as usize;
        TileLayout { tu0, tv0, ntu, ntv }
    }

    pub fn tile_count(&self) -> usize {
        self.ntu * self.ntv
    }

    #[inline]
    pub fn tile_of(&self, s: SiteCoord) -> Option<usize> {
        let tu = (s.u >> TILE_SHIFT) - self.tu0;
        let tv = (s.v >> TILE_SHIFT) - self.tv0;
        if tu < 0 || tv < 0 || tu as usize >= self.ntu || tv as usize >= self.ntv {
            None
        } else {
            Some(tv as usize * self.ntu + tu as usize)
        }
    }

    /// Absolute tile coordinates of tile `index`.
    pub fn tile_coords(&self, index: usize) -> (i32, i32) {
        (
            self.tu0 + (index % self.ntu) as i32,
            self.tv0 + (index / self.ntu) as i32,
        )
    }

    #[inline]
    pub fn offset(s: SiteCoord) -> usize {
        (((s.v & (TILE - 1)) << TILE_SHIFT) | (s.u & (TILE - 1))) as usize
    }
}

/// Lazily allocated per-site storage with a default value.
#[derive(Debug, Clone)]
pub struct TileGrid<T: Copy> {
    layout: TileLayout,
    tiles: Vec<Option<Box<[T]>>>,
    default: T,
}

impl<T: Copy> TileGrid<T> {
    pub fn new(bbox: BBox, default: T) -> Self {
        let layout = TileLayout::covering(bbox);
        TileGrid {
            layout,
            tiles: vec![None; layout.tile_count()],
            default,
        }
    }

    #[inline]
    pub fn get(&self, s: SiteCoord) -> T {
        match self.layout.tile_of(s) {
            Some(t) => match &self.tiles[t] {
                Some(tile) => tile[TileLayout::offset(s)],
                None => self.default,
            },
            None => self.default,
        }
    }

    /// Panics if `s` lies outside the bounding box the grid was built for.
    #[inline]
    pub fn set(&mut self, s: SiteCoord, value: T) {
        *self.entry(s) = value;
    }

    /// Mutable slot for `s`, allocating its tile. Panics outside the grid.
    #[inline]
    pub fn entry(&mut self, s: SiteCoord) -> &mut T {
        let t = self
            .layout
            .tile_of(s)
            .unwrap_or_else(|| panic!("site {s} outside tile grid"));
        let default = self.default;
        let tile = self.tiles[t].get_or_insert_with(|| vec![default; TILE_AREA].into_boxed_slice());
        &mut tile[TileLayout::offset(s)]
    }

    pub fn allocated_tiles(&self) -> usize {
        self.tiles.iter().filter(|t| t.is_some()).count()
    }
}
