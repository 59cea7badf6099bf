//! The maximal and averaging operators: the local fractional maximal
//! function, the constrained/unconstrained classification, the linear
//! boundary-ball average, the weighted spherical average, and the cube
//! analogues.

use crate::error::{MaxlabError, Result};
use crate::field::{ScalarField, N_THETA};
use crate::geom::Vec2;

/// Smoothness index for the maximal operators, alpha in [0, n) with n = 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&alpha) {
            return Err(MaxlabError::Parameter(format!(
                "maximal operator index must lie in [0, 2), got {alpha}"
            )));
        }
        Ok(Alpha(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Default radius discretization of the sup.
pub const N_R: usize = 256;

#[derive(Clone, Copy, Debug)]
pub struct MaximalResult {
    pub value: f64,
    /// Radius attaining the (refined) discrete sup.
    pub argmax_radius: f64,
    /// True when the sup is attained at the boundary radius, within the
    /// quadrature band.
    pub constrained: bool,
    pub low_res: bool,
}

/// A value together with the resolution and contact flags that propagate
/// through the operator formulas.
#[derive(Clone, Copy, Debug, Default)]
pub struct Flagged {
    pub value: f64,
    pub low_res: bool,
    pub non_unique_contact: bool,
}

fn golden_section_max(mut lo: f64, mut hi: f64, phi: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - (hi - lo) * INV_PHI;
    let mut d = lo + (hi - lo) * INV_PHI;
    let mut fc = phi(c);
    let mut fd = phi(d);
    for _ in 0..40 {
        if fc < fd {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) * INV_PHI;
            fd = phi(d);
        } else {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) * INV_PHI;
            fc = phi(c);
        }
    }
    let r = 0.5 * (lo + hi);
    (r, phi(r))
}

/// sup over r in (0, delta(x)] of r^alpha times the ball average of |f|,
/// discretized on `n_r` radii with one golden-section refinement.
pub fn local_fractional_maximal(
    f: &ScalarField,
    x: Vec2,
    alpha: Alpha,
    n_r: usize,
) -> Result<MaximalResult> {
    let delta = f.domain.distance(x)?;
    let a = alpha.get();
    let phi = |r: f64| r.powf(a) * f.ball_average_abs(x, r).value;
    let mut best = f64::NEG_INFINITY;
    let mut best_i = 1usize;
    for i in 1..=n_r {
        let r = delta * i as f64 / n_r as f64;
        let v = phi(r);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = delta * (best_i.saturating_sub(1).max(1) as f64 - 1.0).max(0.5) / n_r as f64;
    let hi = delta * (best_i + 1).min(n_r) as f64 / n_r as f64;
    let (r_ref, v_ref) = golden_section_max(lo, hi, phi);
    let (value, argmax_radius) = if v_ref > best { (v_ref, r_ref) } else { (best, delta * best_i as f64 / n_r as f64) };

    // boundary-radius candidate and its quadrature band
    let boundary_value = phi(delta);
    let tau_c = 2.0 * (f.grid.h / delta) * boundary_value.abs() + 1e-12;
    let constrained = value - boundary_value <= tau_c;
    Ok(MaximalResult {
        value,
        argmax_radius,
        constrained,
        low_res: delta < 3.0 * f.grid.h,
    })
}

/// The linear boundary-ball average: delta(x)^alpha times the average of f
/// over B(x, delta(x)).
pub fn averaging_a(f: &ScalarField, x: Vec2, alpha: f64) -> Result<Flagged> {
    let delta = f.domain.distance(x)?;
    let avg = f.ball_average(x, delta);
    Ok(Flagged {
        value: delta.powf(alpha) * avg.value,
        low_res: avg.low_res,
        non_unique_contact: false,
    })
}

/// The weighted spherical average over the boundary sphere, with weight
/// |y - b_x| / delta(x) and surface-measure normalization.
pub fn weighted_spherical_b(f: &ScalarField, x: Vec2, alpha: f64) -> Result<Flagged> {
    weighted_spherical_b_nt(f, x, alpha, N_THETA)
}

pub fn weighted_spherical_b_nt(
    f: &ScalarField,
    x: Vec2,
    alpha: f64,
    n_theta: usize,
) -> Result<Flagged> {
    let contact = f.domain.nearest_boundary(x)?;
    let delta = contact.delta;
    let b = contact.b;
    let integral = f.sphere_integral(x, delta, n_theta, |_, y| y.dist(b) / delta);
    let surface = 2.0 * std::f64::consts::PI * delta;
    Ok(Flagged {
        value: delta.powf(alpha - 1.0) * integral / surface,
        low_res: delta < 3.0 * f.grid.h,
        non_unique_contact: !contact.unique,
    })
}

/// Realized constants for the derivative bound on the boundary-ball average:
/// compares |grad A_alpha f| against |A_{alpha-1} f| + B_alpha f.
#[derive(Clone, Copy, Debug)]
pub struct DerivativeBound {
    /// |grad A_alpha f (x)| by centered differences.
    pub lhs: f64,
    /// |A_{alpha-1} f(x)| + B_alpha f(x).
    pub rhs: f64,
    /// lhs / rhs, defined as 0 when rhs vanishes.
    pub ratio: f64,
    pub low_res: bool,
    pub non_unique_contact: bool,
}

pub fn derivative_bound_check(f: &ScalarField, x: Vec2, alpha: f64) -> Result<DerivativeBound> {
    let h = f.grid.h;
    let mut grad = Vec2::ZERO;
    let mut low_res = false;
    for (axis, e) in [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)].into_iter().enumerate() {
        let plus = averaging_a(f, x + e * h, alpha)?;
        let minus = averaging_a(f, x - e * h, alpha)?;
        low_res |= plus.low_res || minus.low_res;
        let d = (plus.value - minus.value) / (2.0 * h);
        if axis == 0 {
            grad.x = d;
        } else {
            grad.y = d;
        }
    }
    let a_lower = averaging_a(f, x, alpha - 1.0)?;
    let b = weighted_spherical_b(f, x, alpha)?;
    let lhs = grad.norm();
    let rhs = a_lower.value.abs() + b.value;
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(DerivativeBound {
        lhs,
        rhs,
        ratio,
        low_res: low_res || a_lower.low_res || b.low_res,
        non_unique_contact: b.non_unique_contact,
    })
}

/// Cube analogue of the local fractional maximal function: axis-parallel
/// squares Q(x, r) constrained to the domain via the sup-norm distance.
pub fn cube_maximal(f: &ScalarField, x: Vec2, alpha: Alpha, n_r: usize) -> Result<MaximalResult> {
    let r_max = f.domain.sup_norm_distance(x)?;
    let a = alpha.get();
    let phi = |r: f64| r.powf(a) * f.square_average_abs(x, r).value;
    let mut best = f64::NEG_INFINITY;
    let mut best_i = 1usize;
    for i in 1..=n_r {
        let r = r_max * i as f64 / n_r as f64;
        let v = phi(r);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = r_max * (best_i as f64 - 1.0).max(0.5) / n_r as f64;
    let hi = r_max * (best_i + 1).min(n_r) as f64 / n_r as f64;
    let (r_ref, v_ref) = golden_section_max(lo, hi, phi);
    let (value, argmax_radius) = if v_ref > best { (v_ref, r_ref) } else { (best, r_max * best_i as f64 / n_r as f64) };
    let boundary_value = phi(r_max);
    let tau_c = 2.0 * (f.grid.h / r_max) * boundary_value.abs() + 1e-12;
    Ok(MaximalResult {
        value,
        argmax_radius,
        constrained: value - boundary_value <= tau_c,
        low_res: r_max < 3.0 * f.grid.h,
    })
}

/// Nodes per face of the square boundary quadrature.
pub const N_FACE: usize = 1024;

/// Cube analogue of the weighted spherical average: weight |y - b| / r over
/// the boundary of Q(x, r_max), normalized by its perimeter. The quadrature
/// square is pulled one cell inside the sup so the boundary-touching face
/// stays in the open set.
pub fn cube_b1(f: &ScalarField, x: Vec2) -> Result<Flagged> {
    cube_b1_nodes(f, x, N_FACE)
}

pub fn cube_b1_nodes(f: &ScalarField, x: Vec2, nodes_per_face: usize) -> Result<Flagged> {
    let r_max = f.domain.sup_norm_distance(x)?;
    let h = f.grid.h;
    let low_res = r_max < 3.0 * h;
    let r = (r_max - h).max(0.5 * r_max);
    let contact = f.domain.nearest_boundary(x)?;
    let b = contact.b;
    let ds = 2.0 * r / nodes_per_face as f64;
    let mut sum = 0.0;
    for t in 0..nodes_per_face {
        let s = -r + (t as f64 + 0.5) * ds;
        for y in [
            Vec2::new(x.x + s, x.y - r),
            Vec2::new(x.x + s, x.y + r),
            Vec2::new(x.x - r, x.y + s),
            Vec2::new(x.x + r, x.y + s),
        ] {
            let fv = f.eval(y);
            if fv != 0.0 {
                sum += (y.dist(b) / r) * fv * ds;
            }
        }
    }
    Ok(Flagged {
        value: sum / (8.0 * r),
        low_res,
        non_unique_contact: !contact.unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn disk_field(n: usize, f: impl Fn(Vec2) -> f64) -> ScalarField {
        let dom = Arc::new(Domain::disk(Vec2::ZERO, 1.0));
        let grid = GridSpec::new(Vec2::new(-1.0, -1.0), 2.0 / n as f64, n, n).unwrap();
        ScalarField::from_fn(grid, dom, f)
    }

    fn half_plane_field(n: usize, f: impl Fn(Vec2) -> f64) -> ScalarField {
        let dom = Arc::new(Domain::unit_upper_half_plane());
        let grid = GridSpec::new(Vec2::new(-2.0, -0.5), 4.0 / n as f64, n, n).unwrap();
        ScalarField::from_fn(grid, dom, f)
    }

    #[test]
    fn constant_on_disk_is_constrained_with_boundary_radius() {
        let f = disk_field(512, |_| 1.0);
        let x = Vec2::new(0.25, 0.0);
        let m = local_fractional_maximal(&f, x, Alpha::new(1.0).unwrap(), N_R).unwrap();
        assert!((m.value - 0.75).abs() < 5e-3, "value {}", m.value);
        assert!((m.argmax_radius - 0.75).abs() < 0.75 * 2e-2);
        assert!(m.constrained && !m.low_res);
    }

    #[test]
    fn alpha_zero_constant_is_one_and_constrained() {
        let f = disk_field(256, |_| 1.0);
        let m = local_fractional_maximal(&f, Vec2::new(0.1, 0.2), Alpha::new(0.0).unwrap(), N_R)
            .unwrap();
        assert!((m.value - 1.0).abs() < 1e-9);
        assert!(m.constrained, "every radius attains the sup");
    }

    #[test]
    fn narrow_bump_is_unconstrained_matches_brute_force() {
        let x = Vec2::new(0.1, 0.05);
        let w = 0.02;
        let f = disk_field(512, |p| (-(p - x).norm_sq() / (2.0 * w * w)).exp());
        let delta = f.domain.distance(x).unwrap();
        let m = local_fractional_maximal(&f, x, Alpha::new(0.0).unwrap(), N_R).unwrap();
        // independent oracle: dense radius sweep at N_r = 10^4
        let mut oracle = f64::NEG_INFINITY;
        let mut oracle_r = 0.0;
        for i in 1..=10_000 {
            let r = delta * i as f64 / 10_000.0;
            let v = f.ball_average_abs(x, r).value;
            if v > oracle {
                oracle = v;
                oracle_r = r;
            }
        }
        assert!((m.value - oracle).abs() / oracle < 1e-3, "{} vs {oracle}", m.value);
        assert!(m.argmax_radius < 0.3 * delta, "r* = {} delta = {delta}", m.argmax_radius);
        assert!(oracle_r < 0.3 * delta);
        assert!(!m.constrained);
    }

    #[test]
    fn averaging_a_examples() {
        let f = half_plane_field(512, |_| 1.0);
        let a = averaging_a(&f, Vec2::new(0.0, 0.6), 1.0).unwrap();
        assert!((a.value - 0.6).abs() < 5e-3, "got {}", a.value);
        let a = averaging_a(&f, Vec2::new(0.3, 1.1), 0.0).unwrap();
        assert!((a.value - 1.0).abs() < 5e-3);

        let f = disk_field(512, |_| 1.0);
        let a = averaging_a(&f, Vec2::new(0.5, 0.0), 2.0).unwrap();
        assert!((a.value - 0.25).abs() < 5e-3, "got {}", a.value);
    }

    #[test]
    fn weighted_b_half_plane_closed_form() {
        // (1/2pi) int_0^{2pi} 2 |sin(beta/2)| dbeta = 4/pi
        let f = half_plane_field(512, |_| 1.0);
        let target = 4.0 / PI;
        for &(x, y) in &[(0.0, 0.6), (-0.7, 1.1), (0.8, 0.9)] {
            let b = weighted_spherical_b(&f, Vec2::new(x, y), 1.0).unwrap();
            assert!(!b.non_unique_contact);
            assert!(
                (b.value - target).abs() < 1e-3,
                "x=({x},{y}) got {} want {target}",
                b.value
            );
        }
    }

    #[test]
    fn weighted_b_disk_matches_half_plane_value() {
        // the weight depends only on the angle to b_x, so the value agrees
        let f = disk_field(512, |_| 1.0);
        let b = weighted_spherical_b(&f, Vec2::new(0.5, 0.0), 1.0).unwrap();
        assert!((b.value - 4.0 / PI).abs() < 1e-3, "got {}", b.value);
    }

    #[test]
    fn weighted_b_zero_function() {
        let f = half_plane_field(128, |_| 0.0);
        let b = weighted_spherical_b(&f, Vec2::new(0.0, 1.0), 1.0).unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn weighted_b_flags_non_unique_contact() {
        let f = disk_field(256, |_| 1.0);
        let b = weighted_spherical_b(&f, Vec2::ZERO, 1.0).unwrap();
        assert!(b.non_unique_contact);
    }

    #[test]
    fn positive_homogeneity_exact() {
        let f = disk_field(128, |p| (4.0 * p.x).cos() + 1.5);
        let g = f.map(|v| 3.0 * v);
        let x = Vec2::new(0.2, -0.1);
        let a = Alpha::new(1.0).unwrap();
        let mf = local_fractional_maximal(&f, x, a, 64).unwrap();
        let mg = local_fractional_maximal(&g, x, a, 64).unwrap();
        assert!((mg.value - 3.0 * mf.value).abs() < 1e-12 * mg.value.abs().max(1.0));
    }

    #[test]
    fn sublinearity_sampled() {
        let f = disk_field(128, |p| (3.0 * p.y).sin().abs());
        let g = disk_field(128, |p| (p.x + 0.2).abs());
        let sum = f.lin_comb(1.0, &g, 1.0);
        let a = Alpha::new(1.0).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.3, 0.1), (-0.2, -0.4)] {
            let p = Vec2::new(x, y);
            let ms = local_fractional_maximal(&sum, p, a, 64).unwrap().value;
            let mf = local_fractional_maximal(&f, p, a, 64).unwrap().value;
            let mg = local_fractional_maximal(&g, p, a, 64).unwrap().value;
            let tol = 2.0 * (f.grid.h) * (mf + mg).abs() + 1e-9;
            assert!(ms <= mf + mg + tol, "{ms} vs {mf} + {mg}");
        }
    }

    #[test]
    fn maximal_dominates_boundary_average() {
        let f = disk_field(256, |p| (2.0 * p.x).cos().abs() + 0.1);
        let a = Alpha::new(1.0).unwrap();
        for &(x, y) in &[(0.0, 0.3), (0.4, 0.1), (-0.3, -0.3)] {
            let p = Vec2::new(x, y);
            let m = local_fractional_maximal(&f, p, a, N_R).unwrap();
            let delta = f.domain.distance(p).unwrap();
            let boundary = delta * f.ball_average_abs(p, delta).value;
            let tol = 2.0 * (f.grid.h / delta) * boundary.abs() + 1e-12;
            assert!(m.value >= boundary - tol);
            // the dichotomy: equality within the band iff constrained
            assert_eq!(m.constrained, m.value - boundary <= tol);
        }
    }

    #[test]
    fn dilation_scaling_on_disk() {
        let lambda = 2.0;
        let w = 0.15;
        let c = Vec2::new(0.2, 0.1);
        let f = disk_field(512, |p| (-(p - c).norm_sq() / (2.0 * w * w)).exp());
        let dom2 = Arc::new(Domain::disk(Vec2::ZERO, lambda));
        let grid2 = GridSpec::new(Vec2::new(-lambda, -lambda), 2.0 * lambda / 512.0, 512, 512).unwrap();
        let f2 = ScalarField::from_fn(grid2, dom2, |p| {
            (-(p * (1.0 / lambda) - c).norm_sq() / (2.0 * w * w)).exp()
        });
        let a = Alpha::new(1.0).unwrap();
        let x = Vec2::new(0.1, -0.2);
        let m1 = local_fractional_maximal(&f, x, a, N_R).unwrap();
        let m2 = local_fractional_maximal(&f2, x * lambda, a, N_R).unwrap();
        let want = lambda.powf(a.get()) * m1.value;
        assert!(
            (m2.value - want).abs() / want < 2e-2,
            "got {} want {want}",
            m2.value
        );
    }

    #[test]
    fn derivative_bound_constant_half_plane() {
        let f = half_plane_field(512, |_| 1.0);
        let d = derivative_bound_check(&f, Vec2::new(0.2, 0.8), 1.0).unwrap();
        assert!((d.lhs - 1.0).abs() < 2e-2, "lhs {}", d.lhs);
        assert!(d.rhs >= 1.0, "rhs {}", d.rhs);
        assert!(d.ratio <= 1.0);
    }

    #[test]
    fn derivative_bound_zero_function() {
        let f = half_plane_field(128, |_| 0.0);
        let d = derivative_bound_check(&f, Vec2::new(0.0, 1.0), 1.0).unwrap();
        assert_eq!((d.lhs, d.rhs, d.ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn derivative_bound_stable_under_refinement() {
        let make = |n: usize| {
            disk_field(n, |p| {
                (-(p - Vec2::new(0.2, -0.1)).norm_sq() / (2.0 * 0.15 * 0.15)).exp()
                    + 0.5 * (-(p - Vec2::new(-0.3, 0.2)).norm_sq() / (2.0 * 0.1 * 0.1)).exp()
            })
        };
        let x = Vec2::new(0.1, 0.25);
        let d1 = derivative_bound_check(&make(256), x, 1.0).unwrap();
        let d2 = derivative_bound_check(&make(512), x, 1.0).unwrap();
        assert!(d1.ratio <= 5.0 && d2.ratio <= 5.0);
        assert!(
            (d1.ratio - d2.ratio).abs() <= 0.1 * d2.ratio.max(0.05),
            "{} vs {}",
            d1.ratio,
            d2.ratio
        );
    }

    #[test]
    fn cube_maximal_constant_half_plane() {
        let f = half_plane_field(512, |_| 1.0);
        let m = cube_maximal(&f, Vec2::new(0.0, 0.5), Alpha::new(1.0).unwrap(), N_R).unwrap();
        assert!((m.value - 0.5).abs() < 5e-3, "value {}", m.value);
        assert!((m.argmax_radius - 0.5).abs() < 1e-2);
        assert!(m.constrained);
    }

    #[test]
    fn cube_b1_bounded_for_smooth_f() {
        let f = half_plane_field(512, |p| (-(p - Vec2::new(0.0, 1.0)).norm_sq()).exp());
        let b = cube_b1(&f, Vec2::new(0.0, 0.8)).unwrap();
        assert!(b.value.is_finite() && b.value >= 0.0 && b.value < 2.0);
    }
}
