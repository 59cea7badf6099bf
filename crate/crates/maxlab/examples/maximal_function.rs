//! The local fractional maximal function M_alpha on a disk: pointwise
//! values, the argmax radius, and the constrained/unconstrained split.
//! Also verifies the closed-form weighted spherical average B_1(1) = 4/pi.

use std::f64::consts::PI;
use std::sync::Arc;

use maxlab::domain::Domain;
use maxlab::field::{ScalarField, TestFunctionSpec};
use maxlab::geom::{Rect, Vec2};
use maxlab::grid::GridSpec;
use maxlab::maximal::{self, Alpha};

fn main() -> maxlab::Result<()> {
    let dom = Arc::new(Domain::disk(Vec2::ZERO, 1.0));
    let grid = GridSpec::covering(dom.sample_window(), 384)?;
    let spec = TestFunctionSpec::GaussianBumpSum {
        centers: vec![Vec2::new(0.3, 0.1), Vec2::new(-0.4, -0.2)],
        widths: vec![0.2, 0.35],
        amplitudes: vec![1.0, 0.6],
    };
    let f = ScalarField::from_spec(grid.clone(), dom.clone(), &spec);

    let alpha = Alpha::new(1.0)?;
    println!("{:>14} {:>12} {:>12} {:>12}", "x", "M_1 f", "argmax r", "constrained");
    for &(px, py) in &[(0.0, 0.0), (0.3, 0.1), (-0.5, 0.3), (0.7, 0.0), (0.0, -0.85)] {
        let x = Vec2::new(px, py);
        let m = maximal::local_fractional_maximal(&f, x, alpha, 256)?;
        println!(
            "({px:+.2}, {py:+.2})  {:12.6} {:12.6} {:>12}",
            m.value, m.argmax_radius, m.constrained
        );
    }

    // f = 1 on the upper half-plane: the boundary-sphere average with
    // chord weight |y - b_x| / delta integrates to 4/pi, independent of x
    let hp = Arc::new(Domain::unit_upper_half_plane());
    let hp_grid = GridSpec::covering(Rect::new(Vec2::new(-2.0, -0.5), Vec2::new(2.0, 3.5)), 512)?;
    let one = ScalarField::from_fn(hp_grid, hp, |_| 1.0);
    let mut worst = 0.0f64;
    for i in 0..20 {
        // boundary spheres of these points stay inside the grid window
        let x = Vec2::new(-0.5 + 0.05 * i as f64, 0.2 + 0.05 * i as f64);
        let b = maximal::weighted_spherical_b(&one, x, 1.0)?;
        worst = worst.max((b.value - 4.0 / PI).abs());
    }
    println!("\nB_1(1) on the half-plane: target {:.8}, max deviation {worst:.2e}", 4.0 / PI);

    // the derivative bound |grad A_alpha f| <= |A_{alpha-1} f| + B_alpha f
    let x = Vec2::new(0.2, -0.1);
    let d = maximal::derivative_bound_check(&f, x, 1.5)?;
    println!(
        "derivative identity at ({:+.1}, {:+.1}): lhs {:.6}, rhs {:.6}, ratio {:.4}",
        x.x, x.y, d.lhs, d.rhs, d.ratio
    );
    Ok(())
}
