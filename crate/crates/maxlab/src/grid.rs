//! Regular grid description shared by raster domains and scalar fields.

use crate::error::{MaxlabError, Result};
use crate::geom::{Rect, Vec2};
use serde::{Deserialize, Serialize};

/// A uniform cell grid. Values live at cell centers
/// `origin + ((i + 1/2) h, (j + 1/2) h)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec2,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(origin: Vec2, h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0) {
            return Err(MaxlabError::Parameter("grid spacing must be positive".into()));
        }
        if nx < 8 || ny < 8 {
            return Err(MaxlabError::Parameter("grid must be at least 8 cells per axis".into()));
        }
        Ok(GridSpec { origin, h, nx, ny })
    }

    /// Square grid covering `window` with `n` cells per axis. The window is
    /// stretched to a square so the spacing is isotropic.
    pub fn covering(window: Rect, n: usize) -> Result<Self> {
        let extent = window.width().max(window.height());
        let h = extent / n as f64;
        GridSpec::new(window.lo, h, n, n)
    }

    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell whose center is nearest to `p`, clamped to the grid.
    pub fn nearest_cell(&self, p: Vec2) -> (usize, usize) {
        let fi = (p.x - self.origin.x) / self.h - 0.5;
        let fj = (p.y - self.origin.y) / self.h - 0.5;
        let i = fi.round().clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = fj.round().clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }

    pub fn extent(&self) -> Rect {
        Rect::new(
            self.origin,
            Vec2::new(
                self.origin.x + self.nx as f64 * self.h,
                self.origin.y + self.ny as f64 * self.h,
            ),
        )
    }

    /// Fractional cell coordinates of `p` on the cell-center lattice.
    pub fn frac_coords(&self, p: Vec2) -> (f64, f64) {
        (
            (p.x - self.origin.x) / self.h - 0.5,
            (p.y - self.origin.y) / self.h - 0.5,
        )
    }
}

/// Range of lattice indices `i` with `origin + (i + 1/2) h` in `[lo, hi]`,
/// over the unbounded lattice (indices may be negative or exceed the grid).
pub fn lattice_range(origin: f64, h: f64, lo: f64, hi: f64) -> (i64, i64) {
    let a = ((lo - origin) / h - 0.5).ceil() as i64;
    let b = ((hi - origin) / h - 0.5).floor() as i64;
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_range_counts_centers() {
        // centers at 0.5, 1.5, 2.5, ... for origin 0, h 1
        let (a, b) = lattice_range(0.0, 1.0, 0.0, 3.0);
        assert_eq!((a, b), (0, 2));
        let (a, b) = lattice_range(0.0, 1.0, -1.2, 0.6);
        assert_eq!((a, b), (-1, 0));
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new(Vec2::ZERO, 0.0, 16, 16).is_err());
        assert!(GridSpec::new(Vec2::ZERO, 0.1, 4, 16).is_err());
    }
}
