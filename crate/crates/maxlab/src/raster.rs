//! Rasterized domains: bit mask plus an exact Euclidean distance transform.
//!
//! The transform is the two-pass per-axis lower-envelope method on squared
//! distances, computed once at construction. Everything outside the grid
//! counts as complement, which is handled by a one-cell complement border.

use crate::error::{MaxlabError, Result};
use crate::geom::Vec2;
use crate::grid::GridSpec;
use std::io::Read;
use std::path::Path;

#[derive(Clone, Debug)]
pub struct RasterDomain {
    pub grid: GridSpec,
    inside: Vec<bool>,
    /// Distance from each inside cell center to the complement, with the
    /// boundary placed at cell edges (half-cell correction).
    dist: Vec<f64>,
    /// Nearest complement cell (grid indices) for each cell.
    site: Vec<(i32, i32)>,
}

impl RasterDomain {
    pub fn from_predicate(grid: GridSpec, f: impl Fn(Vec2) -> bool) -> Result<Self> {
        let mut inside = vec![false; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                inside[grid.idx(i, j)] = f(grid.center(i, j));
            }
        }
        Self::from_mask(grid, inside)
    }

    pub fn from_mask(grid: GridSpec, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != grid.len() {
            return Err(MaxlabError::Parameter("mask length does not match grid".into()));
        }
        if !inside.iter().any(|&b| b) {
            return Err(MaxlabError::Parameter("raster mask has no inside cells".into()));
        }
        let (dist, site) = edt(&grid, &inside);
        Ok(RasterDomain { grid, inside, dist, site })
    }

    /// Portable graymap, P2 (ASCII) or P5 (binary); pixel > 0 means inside.
    /// Row 0 of the file maps to the top of the grid.
    pub fn from_pgm(path: &Path, origin: Vec2, h: f64) -> Result<Self> {
        let mut raw = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut raw)?;
        let (magic, w, hgt, _maxval, pixels) = parse_pgm(&raw)?;
        let _ = magic;
        let grid = GridSpec::new(origin, h, w, hgt)?;
        let mut inside = vec![false; grid.len()];
        for j in 0..hgt {
            for i in 0..w {
                // flip vertically: file row 0 is the top row
                inside[grid.idx(i, hgt - 1 - j)] = pixels[j * w + i] > 0;
            }
        }
        Self::from_mask(grid, inside)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let (fi, fj) = self.grid.frac_coords(p);
        let i = fi.round();
        let j = fj.round();
        if i < 0.0 || j < 0.0 || i >= self.grid.nx as f64 || j >= self.grid.ny as f64 {
            return false;
        }
        self.inside[self.grid.idx(i as usize, j as usize)]
    }

    pub fn cell_inside(&self, i: usize, j: usize) -> bool {
        self.inside[self.grid.idx(i, j)]
    }

    /// Mutation hook: bias every stored distance. Used by the harness to
    /// verify that the geometric invariant checks detect a broken metric.
    pub fn with_distance_bias(mut self, bias: f64) -> RasterDomain {
        for d in &mut self.dist {
            *d = (*d + bias).max(0.0);
        }
        self
    }

    /// Distance to the complement at the nearest cell center; error <= h.
    pub fn distance(&self, p: Vec2) -> f64 {
        let (i, j) = self.grid.nearest_cell(p);
        self.dist[self.grid.idx(i, j)]
    }

    /// Nearest complement cell center; `|p - b|` matches the distance within
    /// one grid cell.
    pub fn nearest_site(&self, p: Vec2) -> Vec2 {
        let (i, j) = self.grid.nearest_cell(p);
        let (si, sj) = self.site[self.grid.idx(i, j)];
        Vec2::new(
            self.grid.origin.x + (si as f64 + 0.5) * self.grid.h,
            self.grid.origin.y + (sj as f64 + 0.5) * self.grid.h,
        )
    }

    /// Second-minimizer check: true when a neighboring cell points at a
    /// complement site farther than `h` from ours but at a similar distance.
    pub fn unique_contact(&self, p: Vec2) -> bool {
        let (i, j) = self.grid.nearest_cell(p);
        let idx = self.grid.idx(i, j);
        let own = self.site[idx];
        let own_d = self.dist[idx];
        let h = self.grid.h;
        let neighbors = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
        for (di, dj) in neighbors {
            let ni = i as i64 + di;
            let nj = j as i64 + dj;
            if ni < 0 || nj < 0 || ni >= self.grid.nx as i64 || nj >= self.grid.ny as i64 {
                continue;
            }
            let nidx = self.grid.idx(ni as usize, nj as usize);
            let s = self.site[nidx];
            let site_gap = (((s.0 - own.0) as f64).powi(2) + ((s.1 - own.1) as f64).powi(2)).sqrt() * h;
            if site_gap > 2.0 * h {
                let c = self.grid.center(i, j);
                let alt = Vec2::new(
                    self.grid.origin.x + (s.0 as f64 + 0.5) * h,
                    self.grid.origin.y + (s.1 as f64 + 0.5) * h,
                );
                if (c.dist(alt) - h / 2.0 - own_d).abs() <= h {
                    return false;
                }
            }
        }
        true
    }
}

/// Exact EDT on cell centers. Returns per-cell distance to the complement
/// (half-cell corrected, floored at h/2) and the nearest complement cell.
/// Out-of-grid cells count as complement via a virtual border ring.
fn edt(grid: &GridSpec, inside: &[bool]) -> (Vec<f64>, Vec<(i32, i32)>) {
    let nx = grid.nx as i64;
    let ny = grid.ny as i64;
    let inf = f64::INFINITY;

    // pass 1: per column, nearest complement row (border rows -1 and ny are complement)
    let mut grow = vec![0i64; (nx * ny) as usize];
    let mut g = vec![inf; (nx * ny) as usize];
    for i in 0..nx {
        let mut last = -1i64; // virtual complement below
        for j in 0..ny {
            let idx = (j * nx + i) as usize;
            if !inside[idx] {
                last = j;
            }
            g[idx] = (j - last) as f64;
            grow[idx] = last;
        }
        let mut next = ny; // virtual complement above
        for j in (0..ny).rev() {
            let idx = (j * nx + i) as usize;
            if !inside[idx] {
                next = j;
            }
            if ((next - j) as f64) < g[idx] {
                g[idx] = (next - j) as f64;
                grow[idx] = next;
            }
        }
    }

    // pass 2: per row, lower envelope of parabolas (x - i)^2 + g(i)^2,
    // extended with two virtual columns at -1 and nx with g = 0.
    let mut dist = vec![0.0; (nx * ny) as usize];
    let mut site = vec![(0i32, 0i32); (nx * ny) as usize];
    let m = (nx + 2) as usize;
    let mut v = vec![0usize; m];
    let mut z = vec![0.0f64; m + 1];
    let mut fvals = vec![0.0f64; m];
    let mut frows = vec![0i64; m];
    for j in 0..ny {
        // candidate columns: -1, 0..nx-1, nx
        for q in 0..m {
            let col = q as i64 - 1;
            if col < 0 || col >= nx {
                fvals[q] = 0.0;
                frows[q] = j;
            } else {
                let idx = (j * nx + col) as usize;
                fvals[q] = g[idx] * g[idx];
                frows[q] = grow[idx];
            }
        }
        let mut k = 0usize;
        v[0] = 0;
        z[0] = -inf;
        z[1] = inf;
        for q in 1..m {
            if fvals[q].is_infinite() {
                continue;
            }
            let qf = q as f64;
            loop {
                let p = v[k] as f64;
                let s = ((fvals[q] + qf * qf) - (fvals[v[k]] + p * p)) / (2.0 * qf - 2.0 * p);
                if s <= z[k] {
                    if k == 0 {
                        v[0] = q;
                        z[0] = -inf;
                        z[1] = inf;
                        break;
                    }
                    k -= 1;
                } else {
                    k += 1;
                    v[k] = q;
                    z[k] = s;
                    z[k + 1] = inf;
                    break;
                }
            }
        }
        let mut k2 = 0usize;
        for i in 0..nx {
            let q = (i + 1) as f64; // position in extended coordinates
            while z[k2 + 1] < q {
                k2 += 1;
            }
            let best = v[k2];
            let dx = q - best as f64;
            let d2 = dx * dx + fvals[best];
            let idx = (j * nx + i) as usize;
            let d = d2.sqrt() * grid.h;
            dist[idx] = (d - grid.h / 2.0).max(grid.h / 2.0);
            let scol = best as i64 - 1;
            site[idx] = (scol as i32, frows[best] as i32);
        }
    }
    (dist, site)
}

fn parse_pgm(raw: &[u8]) -> Result<(u8, usize, usize, u32, Vec<u32>)> {
    let mut pos = 0usize;
    let mut next_token = |raw: &[u8]| -> Result<String> {
        // skip whitespace and comments
        loop {
            while pos < raw.len() && raw[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < raw.len() && raw[pos] == b'#' {
                while pos < raw.len() && raw[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < raw.len() && !raw[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(MaxlabError::Parse("unexpected end of pgm header".into()));
        }
        Ok(String::from_utf8_lossy(&raw[start..pos]).into_owned())
    };

    let magic = next_token(raw)?;
    let kind = match magic.as_str() {
        "P2" => 2u8,
        "P5" => 5u8,
        _ => return Err(MaxlabError::Parse(format!("unsupported pnm magic {magic}"))),
    };
    let w: usize = next_token(raw)?.parse().map_err(|_| MaxlabError::Parse("bad width".into()))?;
    let h: usize = next_token(raw)?.parse().map_err(|_| MaxlabError::Parse("bad height".into()))?;
    let maxval: u32 = next_token(raw)?.parse().map_err(|_| MaxlabError::Parse("bad maxval".into()))?;
    let mut pixels = Vec::with_capacity(w * h);
    if kind == 2 {
        for _ in 0..w * h {
            pixels.push(
                next_token(raw)?
                    .parse()
                    .map_err(|_| MaxlabError::Parse("bad pixel".into()))?,
            );
        }
    } else {
        pos += 1; // single whitespace after maxval
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        if raw.len() < pos + w * h * bytes_per {
            return Err(MaxlabError::Parse("truncated pgm payload".into()));
        }
        for t in 0..w * h {
            let v = if bytes_per == 1 {
                raw[pos + t] as u32
            } else {
                ((raw[pos + 2 * t] as u32) << 8) | raw[pos + 2 * t + 1] as u32
            };
            pixels.push(v);
        }
    }
    Ok((kind, w, h, maxval, pixels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn disk_raster(n: usize) -> RasterDomain {
        let grid = GridSpec::new(Vec2::new(-1.0, -1.0), 2.0 / n as f64, n, n).unwrap();
        RasterDomain::from_predicate(grid, |p| p.norm() < 1.0).unwrap()
    }

    #[test]
    fn edt_matches_analytic_disk_distance() {
        let r = disk_raster(256);
        let h = r.grid.h;
        for &(x, y) in &[(0.0, 0.0), (0.3, 0.2), (-0.5, 0.1), (0.0, 0.7)] {
            let p = Vec2::new(x, y);
            let exact = 1.0 - p.norm();
            if exact < 3.0 * h {
                continue;
            }
            assert!(
                (r.distance(p) - exact).abs() <= 2.0 * h,
                "p=({x},{y}) got {} want {exact}",
                r.distance(p)
            );
        }
    }

    #[test]
    fn site_is_consistent_with_distance() {
        let r = disk_raster(128);
        let h = r.grid.h;
        let p = Vec2::new(0.4, 0.1);
        let b = r.nearest_site(p);
        assert!((p.dist(b) - r.distance(p)).abs() <= h);
        assert!(b.norm() >= 1.0 - h, "site should be in the complement band");
    }

    #[test]
    fn pgm_roundtrip_p2() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        let mut f = std::fs::File::create(&path).unwrap();
        // 8x8 with a 4x4 inside block
        writeln!(f, "P2").unwrap();
        writeln!(f, "8 8").unwrap();
        writeln!(f, "255").unwrap();
        for j in 0..8 {
            for i in 0..8 {
                let v = if (2..6).contains(&i) && (2..6).contains(&j) { 255 } else { 0 };
                write!(f, "{v} ").unwrap();
            }
            writeln!(f).unwrap();
        }
        drop(f);
        let r = RasterDomain::from_pgm(&path, Vec2::ZERO, 1.0).unwrap();
        assert!(r.contains(Vec2::new(3.5, 3.5)));
        assert!(!r.contains(Vec2::new(0.5, 0.5)));
    }

    #[test]
    fn border_counts_as_complement() {
        let grid = GridSpec::new(Vec2::ZERO, 1.0, 16, 16).unwrap();
        let r = RasterDomain::from_predicate(grid, |_| true).unwrap();
        // center cell of a fully-inside mask: distance limited by the grid border
        let d = r.distance(Vec2::new(8.0, 8.0));
        assert!(d <= 8.5 && d >= 7.0, "d = {d}");
    }
}
