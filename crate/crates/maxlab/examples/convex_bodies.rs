//! The convex body E(y) = {x : |x - y| <= delta_ext(x)} and its boundary
//! P(y). On the disk, P(y) is an ellipse with foci at the center and y;
//! this extracts it, checks the conic residual, and verifies supporting
//! lines and membership. Writes convex_bodies.svg.

use std::path::Path;

use maxlab::decomp;
use maxlab::domain::Domain;
use maxlab::geom::{Rect, Vec2};
use maxlab::harness::svg::SvgCanvas;

fn main() -> maxlab::Result<()> {
    let dom = Domain::disk(Vec2::ZERO, 1.0);
    let y = Vec2::new(0.3, 0.1);
    let window = Rect::new(Vec2::new(-1.1, -1.1), Vec2::new(1.1, 1.1));
    let probe = decomp::extract_p(&dom, y, window, 512)?;
    println!(
        "extracted {} boundary points, closed = {}, node spacing h = {:.2e}",
        probe.points.len(),
        probe.closed,
        probe.h
    );

    // on the disk, x in P(y) satisfies |x| + |x - y| = 1 (ellipse)
    let mut worst = 0.0f64;
    for &p in &probe.points {
        worst = worst.max((p.norm() + p.dist(y) - 1.0).abs());
    }
    println!("max conic residual |x| + |x - y| - 1: {worst:.2e} ({:.2} h)", worst / probe.h);

    // supporting lines: the tangent at x is orthogonal to b_x - y and
    // bisects the angle between x -> y and x -> b_x
    for idx in [0, probe.points.len() / 3, 2 * probe.points.len() / 3] {
        let rep = decomp::supporting_line_check(&dom, &probe, idx)?;
        println!(
            "idx {idx:>4}: orthogonality err {:.4} deg, bisection err {:.4} deg, one-sided = {}",
            rep.orthogonality_err_deg, rep.bisection_err_deg, rep.one_sided
        );
    }

    // membership is exact: midpoints of boundary chords lie inside E(y)
    let inside = decomp::e_membership(&dom, y, Vec2::new(0.1, 0.0));
    let outside = decomp::e_membership(&dom, y, Vec2::new(0.0, 0.95));
    println!("E(y) membership: (0.1, 0) -> {inside}, (0, 0.95) -> {outside}");

    // piece table: arc length of each P_j^k piece over the extracted boundary
    println!("\n{:>3} {:>4} {:>12} {:>12}", "j", "k", "length", "inv-dist");
    for e in decomp::piece_table(&dom, &probe)? {
        println!("{:>3} {:>4} {:>12.6} {:>12.6}", e.j, e.k, e.length, e.inv_dist);
    }

    let mut canvas = SvgCanvas::new(window, 480.0);
    let circle: Vec<Vec2> = (0..=256)
        .map(|i| Vec2::from_angle(2.0 * std::f64::consts::PI * i as f64 / 256.0))
        .collect();
    canvas.polyline(&circle, "#888", 1.0, true);
    canvas.polyline(&probe.points, "#c33", 1.5, probe.closed);
    canvas.dot(y, 3.0, "#33c");
    canvas.label(y + Vec2::new(0.04, 0.0), "y");
    canvas.save(Path::new("convex_bodies.svg"))?;
    println!("\nwrote convex_bodies.svg");
    Ok(())
}
