//! Distance-function geometry on a few domains: distance to the complement,
//! nearest boundary points, distance gradients, and the curvature-bound
//! radius, including a rasterized domain driven by the exact distance
//! transform.

use maxlab::domain::Domain;
use maxlab::geom::{Rect, Vec2};
use maxlab::grid::GridSpec;
use maxlab::raster::RasterDomain;

fn main() -> maxlab::Result<()> {
    let domains = [
        ("disk", Domain::disk(Vec2::ZERO, 1.0)),
        ("half-plane", Domain::unit_upper_half_plane()),
        (
            "ball-complement",
            Domain::BallComplement {
                center: Vec2::ZERO,
                radius: 1.0,
            },
        ),
    ];
    let x = Vec2::new(0.3, 0.4);
    println!("point x = ({}, {})", x.x, x.y);
    for (name, dom) in &domains {
        if !dom.contains(x) {
            println!("{name:>16}: x outside");
            continue;
        }
        let contact = dom.nearest_boundary(x)?;
        let grad = dom.grad_distance(x)?;
        println!(
            "{name:>16}: delta = {:.6}, b = ({:+.4}, {:+.4}), grad delta = {:?}",
            contact.delta, contact.b.x, contact.b.y, grad
        );
    }

    // curvature-bound radius: the disk admits interior tangent balls up to
    // its own radius, the punctured disk admits none at the punctures
    let disk = Domain::disk(Vec2::ZERO, 1.0);
    let punctured = Domain::PuncturedDisk { levels: 4 };
    println!(
        "curvature radius: disk {:.4}, punctured disk {:.4}",
        disk.curvature_radius(400)?,
        punctured.curvature_radius(400)?
    );

    // rasterized disk: the exact distance transform tracks the analytic
    // distance to within a cell
    let n = 256;
    let grid = GridSpec::covering(
        Rect::new(Vec2::new(-1.05, -1.05), Vec2::new(1.05, 1.05)),
        n,
    )?;
    let raster = Domain::Raster(RasterDomain::from_predicate(grid, |p| p.norm() < 1.0)?);
    let h = 2.1 / n as f64;
    let mut worst = 0.0f64;
    for &(px, py) in &[(0.0, 0.0), (0.5, 0.2), (-0.3, -0.6), (0.0, 0.9)] {
        let p = Vec2::new(px, py);
        let err = (raster.distance(p)? - (1.0 - p.norm())).abs();
        worst = worst.max(err);
        println!("raster delta({px:+.1}, {py:+.1}) error = {err:.2e}");
    }
    println!("worst raster error {worst:.2e} vs cell size {h:.2e}");
    Ok(())
}
