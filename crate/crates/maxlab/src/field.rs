//! Grid-sampled functions with extend-by-zero semantics, ball and sphere
//! quadrature, finite-difference gradients, and L^p / W^{1,1} norms.

use crate::domain::Domain;
use crate::error::{MaxlabError, Result};
use crate::geom::Vec2;
use crate::grid::{lattice_range, GridSpec};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default node count for full-circle sphere quadrature.
pub const N_THETA: usize = 4096;

/// Generators for test functions f in L^p.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunctionSpec {
    Constant {
        c: f64,
    },
    GaussianBumpSum {
        centers: Vec<Vec2>,
        widths: Vec<f64>,
        amplitudes: Vec<f64>,
    },
    BoxIndicator {
        lo: Vec2,
        hi: Vec2,
    },
    /// |x - center|^{-exponent} capped at `cutoff`.
    RadialSingular {
        center: Vec2,
        exponent: f64,
        cutoff: f64,
    },
}

impl TestFunctionSpec {
    pub fn eval(&self, p: Vec2) -> f64 {
        match self {
            TestFunctionSpec::Constant { c } => *c,
            TestFunctionSpec::GaussianBumpSum { centers, widths, amplitudes } => {
                let mut v = 0.0;
                for ((&c, &w), &a) in centers.iter().zip(widths).zip(amplitudes) {
                    let r2 = (p - c).norm_sq();
                    v += a * (-r2 / (2.0 * w * w)).exp();
                }
                v
            }
            TestFunctionSpec::BoxIndicator { lo, hi } => {
                if p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunctionSpec::RadialSingular { center, exponent, cutoff } => {
                let r = p.dist(*center);
                if r == 0.0 {
                    *cutoff
                } else {
                    r.powf(-exponent).min(*cutoff)
                }
            }
        }
    }

    /// Structural checks against the domain and the target integrability.
    pub fn validate(&self, dom: &Domain, p_exponent: f64) -> Result<()> {
        match self {
            TestFunctionSpec::BoxIndicator { lo, hi } => {
                if lo.x >= hi.x || lo.y >= hi.y {
                    return Err(MaxlabError::Parameter("box indicator has empty box".into()));
                }
                let mid = (*lo + *hi) * 0.5;
                let corners = [*lo, *hi, Vec2::new(lo.x, hi.y), Vec2::new(hi.x, lo.y), mid];
                if !corners.iter().any(|&c| dom.contains(c)) {
                    return Err(MaxlabError::Parameter("box indicator does not meet the domain".into()));
                }
            }
            TestFunctionSpec::RadialSingular { exponent, .. } => {
                // finite L^p needs s < n/p, n = 2
                if *exponent >= 2.0 / p_exponent {
                    return Err(MaxlabError::Parameter(format!(
                        "radial exponent {exponent} too singular for L^{p_exponent}"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// A ball-average value with its resolution flag.
#[derive(Clone, Copy, Debug)]
pub struct Averaged {
    pub value: f64,
    /// Set when the requested radius is below 3h.
    pub low_res: bool,
}

/// A function on a grid over a domain, zero outside the domain.
///
/// Generator values are stored at every cell center; the zero extension is
/// applied at evaluation time through the domain membership of the query
/// point, so interpolation does not smear across the boundary.
#[derive(Clone, Debug)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub domain: Arc<Domain>,
    /// raw generator samples at all cell centers
    values: Vec<f64>,
    /// values masked to cells whose center lies in the domain
    masked: Vec<f64>,
    /// per-row prefix sums of `masked` (row-major, nx+1 entries per row)
    prefix: Vec<f64>,
    /// per-row prefix sums of `|masked|`
    prefix_abs: Vec<f64>,
}

impl ScalarField {
    pub fn from_fn(grid: GridSpec, domain: Arc<Domain>, f: impl Fn(Vec2) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values[grid.idx(i, j)] = f(grid.center(i, j));
            }
        }
        Self::from_values(grid, domain, values)
    }

    pub fn from_spec(grid: GridSpec, domain: Arc<Domain>, spec: &TestFunctionSpec) -> Self {
        Self::from_fn(grid, domain, |p| spec.eval(p))
    }

    pub fn from_values(grid: GridSpec, domain: Arc<Domain>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len());
        assert!(values.iter().all(|v| v.is_finite()), "field values must be finite");
        let mut masked = vec![0.0; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let idx = grid.idx(i, j);
                if domain.contains(grid.center(i, j)) {
                    masked[idx] = values[idx];
                }
            }
        }
        let mut prefix = vec![0.0; (grid.nx + 1) * grid.ny];
        let mut prefix_abs = vec![0.0; (grid.nx + 1) * grid.ny];
        for j in 0..grid.ny {
            let row = j * (grid.nx + 1);
            for i in 0..grid.nx {
                let v = masked[grid.idx(i, j)];
                prefix[row + i + 1] = prefix[row + i] + v;
                prefix_abs[row + i + 1] = prefix_abs[row + i] + v.abs();
            }
        }
        ScalarField { grid, domain, values, masked, prefix, prefix_abs }
    }

    /// Field with the same grid and domain, values produced per cell.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        ScalarField::from_values(self.grid.clone(), self.domain.clone(), values)
    }

    pub fn cell_value(&self, i: usize, j: usize) -> f64 {
        self.masked[self.grid.idx(i, j)]
    }

    /// Bilinear interpolation of the raw samples, zero outside the domain.
    pub fn eval(&self, p: Vec2) -> f64 {
        if !self.domain.contains(p) {
            return 0.0;
        }
        self.interp_raw(p)
    }

    /// Bilinear interpolation without the domain mask (smooth generators only).
    pub fn interp_raw(&self, p: Vec2) -> f64 {
        let (fx, fy) = self.grid.frac_coords(p);
        let i0 = fx.floor();
        let j0 = fy.floor();
        let tx = fx - i0;
        let ty = fy - j0;
        let sample = |i: i64, j: i64| -> f64 {
            if i < 0 || j < 0 || i >= self.grid.nx as i64 || j >= self.grid.ny as i64 {
                0.0
            } else {
                self.values[self.grid.idx(i as usize, j as usize)]
            }
        };
        let i0 = i0 as i64;
        let j0 = j0 as i64;
        let v00 = sample(i0, j0);
        let v10 = sample(i0 + 1, j0);
        let v01 = sample(i0, j0 + 1);
        let v11 = sample(i0 + 1, j0 + 1);
        v00 * (1.0 - tx) * (1.0 - ty)
            + v10 * tx * (1.0 - ty)
            + v01 * (1.0 - tx) * ty
            + v11 * tx * ty
    }

    /// Mean of f over B(x, r) by cell-center inclusion counting. Cells beyond
    /// the grid or outside the domain contribute zero but still count toward
    /// the ball area, consistent with the zero extension.
    pub fn ball_average(&self, x: Vec2, r: f64) -> Averaged {
        self.ball_average_impl(x, r, false)
    }

    /// Same as `ball_average` on |f|.
    pub fn ball_average_abs(&self, x: Vec2, r: f64) -> Averaged {
        self.ball_average_impl(x, r, true)
    }

    fn ball_average_impl(&self, x: Vec2, r: f64, absolute: bool) -> Averaged {
        assert!(r > 0.0, "ball radius must be positive");
        let g = &self.grid;
        let (j_lo, j_hi) = lattice_range(g.origin.y, g.h, x.y - r, x.y + r);
        let mut sum = 0.0;
        let mut count: i64 = 0;
        let prefix = if absolute { &self.prefix_abs } else { &self.prefix };
        for j in j_lo..=j_hi {
            let yc = g.origin.y + (j as f64 + 0.5) * g.h;
            let dy = yc - x.y;
            let w2 = r * r - dy * dy;
            if w2 < 0.0 {
                continue;
            }
            let w = w2.sqrt();
            let (i_lo, i_hi) = lattice_range(g.origin.x, g.h, x.x - w, x.x + w);
            if i_hi < i_lo {
                continue;
            }
            count += i_hi - i_lo + 1;
            if j >= 0 && (j as usize) < g.ny {
                let a = i_lo.clamp(0, g.nx as i64);
                let b = (i_hi + 1).clamp(0, g.nx as i64);
                if b > a {
                    let row = (j as usize) * (g.nx + 1);
                    sum += prefix[row + b as usize] - prefix[row + a as usize];
                }
            }
        }
        let value = if count > 0 { sum / count as f64 } else { 0.0 };
        Averaged { value, low_res: r < 3.0 * g.h }
    }

    /// Mean of f over the axis-parallel square Q(x, r) of half-side r.
    pub fn square_average_abs(&self, x: Vec2, r: f64) -> Averaged {
        assert!(r > 0.0);
        let g = &self.grid;
        let (j_lo, j_hi) = lattice_range(g.origin.y, g.h, x.y - r, x.y + r);
        let (i_lo, i_hi) = lattice_range(g.origin.x, g.h, x.x - r, x.x + r);
        let mut sum = 0.0;
        let mut count: i64 = 0;
        for j in j_lo..=j_hi {
            if i_hi < i_lo {
                continue;
            }
            count += i_hi - i_lo + 1;
            if j >= 0 && (j as usize) < g.ny {
                let a = i_lo.clamp(0, g.nx as i64);
                let b = (i_hi + 1).clamp(0, g.nx as i64);
                if b > a {
                    let row = (j as usize) * (g.nx + 1);
                    sum += self.prefix_abs[row + b as usize] - self.prefix_abs[row + a as usize];
                }
            }
        }
        let value = if count > 0 { sum / count as f64 } else { 0.0 };
        Averaged { value, low_res: r < 3.0 * g.h }
    }

    /// Integral of weight(theta, y) f(y) over the circle of radius r about x,
    /// composite trapezoid over `n_theta` equispaced angles. Nodes outside the
    /// domain contribute zero.
    pub fn sphere_integral(
        &self,
        x: Vec2,
        r: f64,
        n_theta: usize,
        weight: impl Fn(f64, Vec2) -> f64,
    ) -> f64 {
        let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
        let mut sum = 0.0;
        for t in 0..n_theta {
            let theta = t as f64 * dtheta;
            let y = x + Vec2::from_angle(theta) * r;
            let fv = self.eval(y);
            if fv != 0.0 {
                sum += weight(theta, y) * fv;
            }
        }
        sum * r * dtheta
    }

    /// Integral of weight(theta, y) f(y) over angular intervals of the circle,
    /// trapezoid rule per interval.
    pub fn sphere_integral_intervals(
        &self,
        x: Vec2,
        r: f64,
        intervals: &[(f64, f64)],
        nodes_per_interval: usize,
        weight: impl Fn(f64, Vec2) -> f64,
    ) -> f64 {
        let mut total = 0.0;
        for &(lo, hi) in intervals {
            if hi <= lo {
                continue;
            }
            let n = nodes_per_interval.max(2);
            let dt = (hi - lo) / (n - 1) as f64;
            let mut sum = 0.0;
            for t in 0..n {
                let theta = lo + t as f64 * dt;
                let y = x + Vec2::from_angle(theta) * r;
                let fv = self.eval(y);
                let w = if fv != 0.0 { weight(theta, y) * fv } else { 0.0 };
                let trap = if t == 0 || t == n - 1 { 0.5 } else { 1.0 };
                sum += trap * w;
            }
            total += sum * r * dt;
        }
        total
    }

    /// Centered finite differences of the raw samples; the generator is
    /// assumed smooth across the domain boundary.
    pub fn gradient_fd(&self, p: Vec2) -> Result<Vec2> {
        let h = self.grid.h;
        let e = self.grid.extent();
        if p.x - h < e.lo.x || p.x + h > e.hi.x || p.y - h < e.lo.y || p.y + h > e.hi.y {
            return Err(MaxlabError::GridEdge(p.x, p.y));
        }
        let gx = (self.interp_raw(Vec2::new(p.x + h, p.y)) - self.interp_raw(Vec2::new(p.x - h, p.y)))
            / (2.0 * h);
        let gy = (self.interp_raw(Vec2::new(p.x, p.y + h)) - self.interp_raw(Vec2::new(p.x, p.y - h)))
            / (2.0 * h);
        Ok(Vec2::new(gx, gy))
    }

    /// (sum |F|^p h^2)^{1/p} over cells in the domain; sup over cells for
    /// p = infinity. Summation order is fixed (row-major) for determinism.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_infinite() {
            let mut m = 0.0f64;
            for &v in &self.masked {
                m = m.max(v.abs());
            }
            return Ok(m);
        }
        if p < 1.0 {
            return Err(MaxlabError::Parameter(format!("lp_norm requires p >= 1, got {p}")));
        }
        let h2 = self.grid.h * self.grid.h;
        let mut sum = 0.0;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let c = self.grid.center(i, j);
                if self.domain.contains(c) {
                    sum += self.masked[self.grid.idx(i, j)].abs().powf(p) * h2;
                }
            }
        }
        Ok(sum.powf(1.0 / p))
    }

    /// ||f||_{L^1} + || |grad f| ||_{L^1} with gradients from raw samples at
    /// interior cells of the domain.
    pub fn w11_norm(&self) -> f64 {
        let h2 = self.grid.h * self.grid.h;
        let mut grad_sum = 0.0;
        for j in 1..self.grid.ny - 1 {
            for i in 1..self.grid.nx - 1 {
                let c = self.grid.center(i, j);
                if !self.domain.contains(c) {
                    continue;
                }
                let gx = (self.values[self.grid.idx(i + 1, j)] - self.values[self.grid.idx(i - 1, j)])
                    / (2.0 * self.grid.h);
                let gy = (self.values[self.grid.idx(i, j + 1)] - self.values[self.grid.idx(i, j - 1)])
                    / (2.0 * self.grid.h);
                grad_sum += gx.hypot(gy) * h2;
            }
        }
        self.lp_norm(1.0).expect("p = 1 is valid") + grad_sum
    }

    /// Pointwise linear combination a f + b g on a shared grid.
    pub fn lin_comb(&self, a: f64, other: &ScalarField, b: f64) -> ScalarField {
        assert_eq!(self.grid.len(), other.grid.len());
        let values: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        ScalarField::from_values(self.grid.clone(), self.domain.clone(), values)
    }

    /// CSV dump (x, y, value) of the masked samples.
    pub fn dump_csv(&self, w: &mut impl std::io::Write) -> Result<()> {
        writeln!(w, "x,y,value")?;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let c = self.grid.center(i, j);
                writeln!(w, "{:.9e},{:.9e},{:.12e}", c.x, c.y, self.masked[self.grid.idx(i, j)])?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::unit_square;
    use std::f64::consts::PI;

    fn disk_field(n: usize, f: impl Fn(Vec2) -> f64) -> ScalarField {
        let dom = Arc::new(Domain::disk(Vec2::ZERO, 1.0));
        let grid = GridSpec::new(Vec2::new(-1.0, -1.0), 2.0 / n as f64, n, n).unwrap();
        ScalarField::from_fn(grid, dom, f)
    }

    #[test]
    fn ball_average_of_one_is_one() {
        let f = disk_field(256, |_| 1.0);
        let a = f.ball_average(Vec2::new(0.1, 0.0), 0.5);
        assert!(!a.low_res);
        assert!((a.value - 1.0).abs() < 1e-12, "got {}", a.value);
    }

    #[test]
    fn ball_average_of_linear_is_center_value() {
        let f = disk_field(512, |p| 0.3 + 2.0 * p.x - p.y);
        let x = Vec2::new(0.05, -0.1);
        let a = f.ball_average(x, 0.4);
        // symmetric counting cancels the linear part up to O(h/r)
        assert!((a.value - (0.3 + 2.0 * x.x - x.y)).abs() < 2e-2, "got {}", a.value);
    }

    #[test]
    fn ball_average_half_indicator_is_half() {
        let x = Vec2::new(0.0, 0.0);
        let f = disk_field(512, |p| if p.y > 0.0 { 1.0 } else { 0.0 });
        let a = f.ball_average(x, 0.5);
        assert!((a.value - 0.5).abs() < 5e-3, "got {}", a.value);
    }

    #[test]
    fn ball_average_flags_low_resolution() {
        let f = disk_field(64, |_| 1.0);
        assert!(f.ball_average(Vec2::ZERO, 2.5 * f.grid.h).low_res);
        assert!(!f.ball_average(Vec2::ZERO, 3.5 * f.grid.h).low_res);
    }

    #[test]
    fn sphere_integral_circumference() {
        let f = disk_field(256, |_| 1.0);
        let r = 0.5;
        let v = f.sphere_integral(Vec2::ZERO, r, N_THETA, |_, _| 1.0);
        assert!((v - 2.0 * PI * r).abs() / (2.0 * PI * r) < 1e-6, "got {v}");
    }

    #[test]
    fn sphere_integral_quarter_arc_weight() {
        let f = disk_field(256, |_| 1.0);
        let r = 0.5;
        let v = f.sphere_integral(Vec2::ZERO, r, N_THETA, |theta, _| {
            if theta <= PI / 2.0 {
                1.0
            } else {
                0.0
            }
        });
        assert!((v - PI * r / 2.0).abs() / (PI * r / 2.0) < 2e-3, "got {v}");
    }

    #[test]
    fn sphere_integral_half_plane_segment_oracle() {
        // f = 1 on the half-plane; circle of radius r around x with delta < r.
        // Oracle: arc inside { y > 0 } has measure r (pi + 2 asin(delta / r)).
        let dom = Arc::new(Domain::unit_upper_half_plane());
        let grid = GridSpec::new(Vec2::new(-2.0, -0.5), 4.0 / 512.0, 512, 512).unwrap();
        let f = ScalarField::from_fn(grid, dom, |_| 1.0);
        let x = Vec2::new(0.0, 0.4);
        let r = 1.0;
        let oracle = r * (PI + 2.0 * (0.4f64 / r).asin());
        let v = f.sphere_integral(x, r, N_THETA, |_, _| 1.0);
        assert!((v - oracle).abs() / oracle < 1e-3, "got {v} want {oracle}");
    }

    #[test]
    fn gradient_fd_examples() {
        let f = disk_field(512, |p| p.x);
        let g = f.gradient_fd(Vec2::new(0.2, 0.1)).unwrap();
        assert!(g.dist(Vec2::new(1.0, 0.0)) < 1e-10);

        let f = disk_field(512, |p| p.norm_sq() / 2.0);
        let g = f.gradient_fd(Vec2::new(0.3, 0.4)).unwrap();
        assert!(g.dist(Vec2::new(0.3, 0.4)) < 1e-4, "got ({}, {})", g.x, g.y);

        let dom = Arc::new(Domain::unit_upper_half_plane());
        let grid = GridSpec::new(Vec2::new(-2.0, -0.5), 4.0 / 256.0, 256, 256).unwrap();
        let dist = ScalarField::from_fn(grid, dom.clone(), |p| p.y.max(0.0));
        let g = dist.gradient_fd(Vec2::new(0.0, 1.0)).unwrap();
        assert!(g.dist(Vec2::new(0.0, 1.0)) < 1e-10);
    }

    #[test]
    fn gradient_fd_at_edge_errors() {
        let f = disk_field(64, |p| p.x);
        let e = f.grid.extent();
        assert!(f.gradient_fd(Vec2::new(e.lo.x + 0.1 * f.grid.h, 0.0)).is_err());
    }

    #[test]
    fn lp_norm_examples() {
        // constant on the unit square (area 1): ||c||_2 = |c|
        let dom = Arc::new(unit_square());
        let grid = GridSpec::new(Vec2::ZERO, 1.0 / 512.0, 512, 512).unwrap();
        let f = ScalarField::from_fn(grid.clone(), dom.clone(), |_| -3.0);
        assert!((f.lp_norm(2.0).unwrap() - 3.0).abs() < 1e-9);

        // box of area A in L^1
        let b = TestFunctionSpec::BoxIndicator { lo: Vec2::new(0.1, 0.2), hi: Vec2::new(0.6, 0.5) };
        let f = ScalarField::from_spec(grid.clone(), dom.clone(), &b);
        let area = 0.5 * 0.3;
        let perimeter = 2.0 * (0.5 + 0.3);
        assert!((f.lp_norm(1.0).unwrap() - area).abs() < grid.h * perimeter);

        assert!(f.lp_norm(0.5).is_err());

        // sup norm
        let g = ScalarField::from_fn(grid, dom, |p| p.x);
        let m = g.lp_norm(f64::INFINITY).unwrap();
        assert!(m <= 1.0 && m > 0.99);
    }

    #[test]
    fn lp_norm_radial_singular_matches_radial_quadrature() {
        // independent oracle: 2 pi int f(rho)^p rho drho by fine midpoint rule
        let dom = Arc::new(Domain::disk(Vec2::ZERO, 1.0));
        let grid = GridSpec::new(Vec2::new(-1.0, -1.0), 2.0 / 512.0, 512, 512).unwrap();
        let spec = TestFunctionSpec::RadialSingular { center: Vec2::ZERO, exponent: 0.5, cutoff: 50.0 };
        spec.validate(&dom, 2.0).unwrap();
        let f = ScalarField::from_spec(grid, dom, &spec);
        let p = 2.0;
        let m = 2_000_000;
        let mut oracle = 0.0;
        for t in 0..m {
            let rho = (t as f64 + 0.5) / m as f64; // radii in (0, 1)
            let fv = rho.powf(-0.5).min(50.0);
            oracle += fv.powf(p) * rho;
        }
        oracle *= 2.0 * PI / m as f64;
        let oracle = oracle.powf(1.0 / p);
        let got = f.lp_norm(p).unwrap();
        assert!((got - oracle).abs() / oracle < 0.01, "got {got} want {oracle}");
    }

    #[test]
    fn w11_norm_examples() {
        let dom = Arc::new(unit_square());
        let grid = GridSpec::new(Vec2::ZERO, 1.0 / 512.0, 512, 512).unwrap();
        // constant: c |Omega|
        let f = ScalarField::from_fn(grid.clone(), dom.clone(), |_| 2.0);
        assert!((f.w11_norm() - 2.0).abs() < 0.02);
        // f = x1: 1/2 + 1
        let f = ScalarField::from_fn(grid.clone(), dom.clone(), |p| p.x);
        assert!((f.w11_norm() - 1.5).abs() < 0.01, "got {}", f.w11_norm());
    }

    #[test]
    fn w11_norm_gaussian_matches_radial_oracle() {
        let dom = Arc::new(unit_square());
        let grid = GridSpec::new(Vec2::ZERO, 1.0 / 512.0, 512, 512).unwrap();
        let (a, s) = (1.0, 0.05);
        let c = Vec2::new(0.5, 0.5);
        let spec = TestFunctionSpec::GaussianBumpSum {
            centers: vec![c],
            widths: vec![s],
            amplitudes: vec![a],
        };
        let f = ScalarField::from_spec(grid, dom, &spec);
        // radial quadrature oracle for ||f||_1 + ||grad f||_1
        let m = 1_000_000;
        let rmax = 0.5;
        let (mut i0, mut i1) = (0.0, 0.0);
        for t in 0..m {
            let rho = rmax * (t as f64 + 0.5) / m as f64;
            let g = a * (-rho * rho / (2.0 * s * s)).exp();
            i0 += g * rho;
            i1 += (rho / (s * s)) * g * rho;
        }
        let scale = 2.0 * PI * rmax / m as f64;
        let oracle = (i0 + i1) * scale;
        let got = f.w11_norm();
        assert!((got - oracle).abs() / oracle < 0.01, "got {got} want {oracle}");
    }

    #[test]
    fn evaluation_outside_domain_is_zero() {
        let f = disk_field(64, |_| 5.0);
        assert_eq!(f.eval(Vec2::new(2.0, 0.0)), 0.0);
        assert_eq!(f.eval(Vec2::new(1.0001, 0.0)), 0.0);
        assert!(f.eval(Vec2::new(0.2, 0.2)) > 4.9);
    }

    #[test]
    fn linearity_of_quadratures() {
        let f = disk_field(128, |p| (3.0 * p.x).sin());
        let g = disk_field(128, |p| p.y * p.y);
        let fg = f.lin_comb(2.0, &g, -1.5);
        let x = Vec2::new(0.1, 0.2);
        let r = 0.4;
        let lhs = fg.ball_average(x, r).value;
        let rhs = 2.0 * f.ball_average(x, r).value - 1.5 * g.ball_average(x, r).value;
        assert!((lhs - rhs).abs() < 1e-12);
        let lhs = fg.sphere_integral(x, r, 512, |_, _| 1.0);
        let rhs = 2.0 * f.sphere_integral(x, r, 512, |_, _| 1.0)
            - 1.5 * g.sphere_integral(x, r, 512, |_, _| 1.0);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_the_integrand() {
        let f = disk_field(128, |p| p.x.abs());
        let g = disk_field(128, |p| p.x.abs() + 0.3);
        let x = Vec2::new(-0.1, 0.3);
        assert!(f.ball_average(x, 0.3).value <= g.ball_average(x, 0.3).value);
        assert!(
            f.sphere_integral(x, 0.3, 512, |_, _| 1.0)
                <= g.sphere_integral(x, 0.3, 512, |_, _| 1.0)
        );
    }

    #[test]
    fn quadrature_error_halves_with_h() {
        // against the half-plane circular-segment oracle
        let dom = Arc::new(Domain::unit_upper_half_plane());
        let x = Vec2::new(0.0, 0.4);
        let r = 1.0;
        let oracle = r * (PI + 2.0 * (0.4f64 / r).asin());
        let mut errs = Vec::new();
        for (n, nt) in [(128usize, 1024usize), (256, 2048), (512, 4096)] {
            let grid = GridSpec::new(Vec2::new(-2.0, -0.5), 4.0 / n as f64, n, n).unwrap();
            let f = ScalarField::from_fn(grid, dom.clone(), |_| 1.0);
            errs.push((f.sphere_integral(x, r, nt, |_, _| 1.0) - oracle).abs());
        }
        // refinement should cut the error by at least 1.8x per halving
        for w in errs.windows(2) {
            assert!(w[1] < w[0] / 1.8 + 1e-9, "errors {errs:?}");
        }
    }
}
