//! The cube-based spherical operator has no uniform L^p bound: on thin
//! boxes 2 delta x delta^s over the half-plane boundary, the far-field
//! norm ratio grows like delta^{-1/2} as delta -> 0 (s = 2, p = 2),
//! while the ball-based operator stays bounded on the same family.

use std::sync::Arc;

use maxlab::domain::Domain;
use maxlab::field::{ScalarField, TestFunctionSpec};
use maxlab::geom::{Rect, Vec2};
use maxlab::grid::GridSpec;
use maxlab::harness::fields::{b_norm_ratio, map_over};
use maxlab::maximal;

fn box_field(delta: f64, s: f64, n: usize) -> maxlab::Result<ScalarField> {
    let dom = Arc::new(Domain::unit_upper_half_plane());
    let grid = GridSpec::covering(Rect::new(Vec2::new(-0.5, 0.0), Vec2::new(0.5, 1.0)), n)?;
    let spec = TestFunctionSpec::BoxIndicator {
        lo: Vec2::new(-delta, 0.0),
        hi: Vec2::new(delta, delta.powf(s)),
    };
    Ok(ScalarField::from_spec(grid, dom, &spec))
}

/// ||B^cube f||_p / ||f||_p over the far field {x2 >= 0.05}. The strip
/// below contains every box of the ladder, so the sampled region does not
/// change with delta.
fn cube_far_field_ratio(f: &ScalarField, p: f64, stride: usize) -> maxlab::Result<f64> {
    let m = map_over(f, stride, |x| {
        if x.y < 0.05 {
            return None;
        }
        maximal::cube_b1_nodes(f, x, 256).ok().map(|b| b.value)
    });
    Ok(m.lp_norm(p) / f.lp_norm(p)?)
}

fn main() -> maxlab::Result<()> {
    let (s, p, n) = (2.0, 2.0, 2048);
    let h = 1.0 / n as f64;

    println!("box 2 delta x delta^{s}, p = {p}, grid {n}^2, far field x2 >= 0.05");
    println!("{:>10} {:>14} {:>14} {:>10}", "delta", "cube ratio", "ball ratio", "growth");
    let mut prev: Option<f64> = None;
    for &delta in &[0.125f64, 0.0625, 0.03125] {
        if delta.powf(s) < 2.0 * h {
            println!("{delta:>10.5}  box thinner than two cells, skipped");
            continue;
        }
        let f = box_field(delta, s, n)?;
        let cube = cube_far_field_ratio(&f, p, 32)?;
        let ball = b_norm_ratio(&f, 1.0, p, 32, 256)?;
        let growth = prev.map(|q| cube / q);
        prev = Some(cube);
        match growth {
            Some(g) => println!("{delta:>10.5} {cube:>14.6} {ball:>14.6} {g:>10.4}"),
            None => println!("{delta:>10.5} {cube:>14.6} {ball:>14.6} {:>10}", "-"),
        }
    }
    println!("\ngrowth per halving should approach sqrt(2) = {:.4};", 2.0f64.sqrt());
    println!("the ball column stays bounded as delta -> 0.");
    Ok(())
}
