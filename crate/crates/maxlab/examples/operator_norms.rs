//! Operator-norm surrogates for the weighted spherical average B_alpha:
//! the L^p ratio on a family of dilated disks scales like lambda^{1/2}
//! for alpha = 3/2, and is dilation-invariant for alpha = 1.

use std::sync::Arc;

use maxlab::domain::Domain;
use maxlab::field::{ScalarField, TestFunctionSpec};
use maxlab::geom::Vec2;
use maxlab::grid::GridSpec;
use maxlab::harness::fields::b_norm_ratio;

fn ratio_on_disk(lambda: f64, alpha: f64, p: f64) -> maxlab::Result<f64> {
    let dom = Arc::new(Domain::disk(Vec2::ZERO, lambda));
    let grid = GridSpec::covering(dom.sample_window(), 256)?;
    // a bump that dilates with the domain, so only the operator scales
    let spec = TestFunctionSpec::GaussianBumpSum {
        centers: vec![Vec2::new(0.25 * lambda, -0.1 * lambda)],
        widths: vec![0.3 * lambda],
        amplitudes: vec![1.0],
    };
    let f = ScalarField::from_spec(grid, dom, &spec);
    b_norm_ratio(&f, alpha, p, 4, 512)
}

fn main() -> maxlab::Result<()> {
    let lambdas = [0.5, 1.0, 2.0, 4.0];
    let p = 2.0;

    println!("alpha = 1.5, p = {p}: expect ratio ~ C lambda^(1/2)");
    println!("{:>8} {:>14} {:>16}", "lambda", "||B f|| / ||f||", "ratio / sqrt(l)");
    let mut logs = Vec::new();
    for &l in &lambdas {
        let r = ratio_on_disk(l, 1.5, p)?;
        logs.push((l.log2(), r.log2()));
        println!("{l:>8.2} {r:>14.6} {:>16.6}", r / l.sqrt());
    }
    // least-squares slope of log r against log lambda
    let n = logs.len() as f64;
    let (sx, sy): (f64, f64) = logs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (sxx, sxy): (f64, f64) = logs
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x * x, b + x * y));
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    println!("fitted dilation exponent: {slope:.4} (target 0.5)");

    println!("\nalpha = 1.0, p = {p}: expect dilation invariance");
    for &l in &lambdas {
        println!("{l:>8.2} {:>14.6}", ratio_on_disk(l, 1.0, p)?);
    }
    Ok(())
}
