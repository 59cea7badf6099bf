//! Decomposition of the boundary sphere at x into chord-law sectors S_j:
//! the arcs partition the circle, the pieces reassemble the weighted
//! spherical average, and the shell index tracks log2 of the distance.

use std::f64::consts::PI;
use std::sync::Arc;

use maxlab::decomp;
use maxlab::domain::Domain;
use maxlab::field::ScalarField;
use maxlab::geom::{Rect, Vec2};
use maxlab::grid::GridSpec;

fn main() -> maxlab::Result<()> {
    let dom = Domain::unit_upper_half_plane();
    let x = Vec2::new(0.0, 0.4);
    let delta = dom.distance(x)?;
    println!("x = (0, 0.4), delta = {delta}, shell k = {}", decomp::shell_index(&dom, x)?);

    // sector arcs: j = 0 is one merged outer arc, j >= 1 splits into two
    // symmetric arcs; together they cover the full circle exactly once
    let mut covered = 0.0;
    println!("\n{:>3} {:>10} {:>14}", "j", "arcs", "angular measure");
    for j in 0..=8u32 {
        let sector = decomp::angular_sector(&dom, x, j)?;
        let measure = sector.angular_measure();
        covered += measure;
        println!("{j:>3} {:>10} {measure:>14.8}", sector.intervals.len());
    }
    // the tail beyond j_max has measure 2^{1-j_max} * small, so a long sum
    // closes the circle
    for j in 9..=40u32 {
        covered += decomp::angular_sector(&dom, x, j)?.angular_measure();
    }
    println!("sum over j <= 40: {covered:.10}  (2 pi = {:.10})", 2.0 * PI);

    // chord law: |y - b_x| = 2 delta sin(beta/2) places y in sector
    // j = floor(-log2(chord ratio / 2))
    for &ratio in &[1.5, 0.9, 0.4, 0.11] {
        println!("chord ratio {ratio:<5} -> sector j = {}", decomp::chord_sector_index(ratio));
    }

    // S_jk(1) against the closed-form arc length, and the reconstruction
    // of B_alpha from the weighted pieces
    // the grid extends below the boundary so the smooth generator can be
    // interpolated on boundary-hugging arcs (eval still masks by domain)
    let dom = Arc::new(dom);
    let grid = GridSpec::covering(Rect::new(Vec2::new(-2.5, -0.5), Vec2::new(2.5, 4.5)), 512)?;
    let one = ScalarField::from_fn(grid, dom.clone(), |_| 1.0);
    let k = decomp::shell_of_delta(delta);
    println!("\n{:>3} {:>14} {:>14}", "j", "S_jk(1)", "arc closed form");
    for j in 1..=6u32 {
        let s = decomp::s_jk(&one, x, j, k)?;
        let arc = decomp::angular_sector(&one.domain, x, j)?.arc_length();
        println!("{j:>3} {:>14.8} {arc:>14.8}", s.value);
    }
    let rec = decomp::reconstruct_b(&one, x, 1.0, 12)?;
    println!("reconstruction sum {:.6}, B / sum = {:.4}", rec.sum, rec.ratio_to_b);
    Ok(())
}
