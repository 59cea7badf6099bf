//! Domains and geometric queries: distance to the complement, nearest
//! boundary points, the distance gradient, and the curvature-bound radius.

use crate::error::{MaxlabError, Result};
use crate::geom::{point_segment_distance, Rect, Vec2};
use crate::raster::RasterDomain;
use crate::sampling;

/// Non-uniqueness tolerance for nearest boundary points on analytic domains.
pub const TAU_B: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolygonSide {
    Interior,
    Exterior,
}

/// An open set with non-empty complement.
#[derive(Clone, Debug)]
pub enum Domain {
    Disk {
        center: Vec2,
        radius: f64,
    },
    /// `{ x : n . x > offset }` for a unit inward normal `n`.
    HalfPlane {
        inward_normal: Vec2,
        offset: f64,
    },
    /// `{ x : |x - center| > radius }`.
    BallComplement {
        center: Vec2,
        radius: f64,
    },
    /// Interior or exterior of a convex polygon (counter-clockwise vertices).
    ConvexPolygon {
        vertices: Vec<Vec2>,
        side: PolygonSide,
    },
    /// Unit disk minus the origin and the dyadic points (0, 2^-k), k = 1..levels.
    /// Satisfies an interior ball condition but no uniform curvature bound.
    PuncturedDisk {
        levels: u32,
    },
    /// `{ (x, y) : x < y }`.
    DiagonalHalfPlane,
    Raster(RasterDomain),
}

/// Output of the nearest-boundary query.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryContact {
    /// Distance to the complement.
    pub delta: f64,
    /// A minimizing complement point; lexicographically smallest on ties.
    pub b: Vec2,
    /// False when a second minimizer exists within tolerance.
    pub unique: bool,
}

impl Domain {
    pub fn disk(center: Vec2, radius: f64) -> Self {
        Domain::Disk { center, radius }
    }

    pub fn half_plane(inward_normal: Vec2, offset: f64) -> Self {
        Domain::HalfPlane { inward_normal: inward_normal.normalized(), offset }
    }

    pub fn unit_upper_half_plane() -> Self {
        Domain::half_plane(Vec2::new(0.0, 1.0), 0.0)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            Domain::Disk { center, radius } => p.dist(*center) < *radius,
            Domain::HalfPlane { inward_normal, offset } => inward_normal.dot(p) > *offset,
            Domain::BallComplement { center, radius } => p.dist(*center) > *radius,
            Domain::ConvexPolygon { vertices, side } => {
                let inside = polygon_contains(vertices, p);
                match side {
                    PolygonSide::Interior => inside == PolyLoc::StrictInside,
                    PolygonSide::Exterior => inside == PolyLoc::StrictOutside,
                }
            }
            Domain::PuncturedDisk { levels } => {
                if p.norm() >= 1.0 {
                    return false;
                }
                if p == Vec2::ZERO {
                    return false;
                }
                for k in 1..=*levels {
                    if p == Vec2::new(0.0, 0.5f64.powi(k as i32)) {
                        return false;
                    }
                }
                true
            }
            Domain::DiagonalHalfPlane => p.x < p.y,
            Domain::Raster(r) => r.contains(p),
        }
    }

    /// delta(x) = dist(x, complement). Errors when x is outside the domain.
    pub fn distance(&self, p: Vec2) -> Result<f64> {
        if !self.contains(p) {
            return Err(MaxlabError::OutsideDomain(p.x, p.y));
        }
        Ok(match self {
            Domain::Disk { center, radius } => radius - p.dist(*center),
            Domain::HalfPlane { inward_normal, offset } => inward_normal.dot(p) - offset,
            Domain::BallComplement { center, radius } => p.dist(*center) - radius,
            Domain::ConvexPolygon { vertices, .. } => {
                polygon_boundary_query(vertices, p).0
            }
            Domain::PuncturedDisk { levels } => {
                let mut d = (1.0 - p.norm()).min(p.norm());
                for k in 1..=*levels {
                    d = d.min(p.dist(Vec2::new(0.0, 0.5f64.powi(k as i32))));
                }
                d
            }
            Domain::DiagonalHalfPlane => (p.y - p.x) / std::f64::consts::SQRT_2,
            Domain::Raster(r) => r.distance(p),
        })
    }

    /// Nearest boundary point with tie-breaking and a uniqueness flag.
    pub fn nearest_boundary(&self, p: Vec2) -> Result<BoundaryContact> {
        if !self.contains(p) {
            return Err(MaxlabError::OutsideDomain(p.x, p.y));
        }
        Ok(match self {
            Domain::Disk { center, radius } => {
                let v = p - *center;
                let d = v.norm();
                if d <= TAU_B {
                    // full rotational symmetry: every boundary point minimizes
                    BoundaryContact {
                        delta: *radius - d,
                        b: *center + Vec2::new(-*radius, 0.0),
                        unique: false,
                    }
                } else {
                    BoundaryContact {
                        delta: *radius - d,
                        b: *center + v * (*radius / d),
                        unique: true,
                    }
                }
            }
            Domain::HalfPlane { inward_normal, offset } => {
                let delta = inward_normal.dot(p) - offset;
                BoundaryContact { delta, b: p - *inward_normal * delta, unique: true }
            }
            Domain::BallComplement { center, radius } => {
                let v = p - *center;
                let d = v.norm();
                BoundaryContact {
                    delta: d - radius,
                    b: *center + v * (*radius / d),
                    unique: true,
                }
            }
            Domain::ConvexPolygon { vertices, .. } => {
                let (delta, b, unique) = polygon_boundary_query(vertices, p);
                BoundaryContact { delta, b, unique }
            }
            Domain::PuncturedDisk { levels } => {
                let mut candidates: Vec<(f64, Vec2)> = Vec::new();
                let n = p.norm();
                // outer circle
                if n <= TAU_B {
                    candidates.push((1.0 - n, Vec2::new(-1.0, 0.0)));
                } else {
                    candidates.push((1.0 - n, p * (1.0 / n)));
                }
                candidates.push((n, Vec2::ZERO));
                for k in 1..=*levels {
                    let q = Vec2::new(0.0, 0.5f64.powi(k as i32));
                    candidates.push((p.dist(q), q));
                }
                contact_from_candidates(&candidates)
            }
            Domain::DiagonalHalfPlane => {
                let m = (p.x + p.y) / 2.0;
                BoundaryContact {
                    delta: (p.y - p.x) / std::f64::consts::SQRT_2,
                    b: Vec2::new(m, m),
                    unique: true,
                }
            }
            Domain::Raster(r) => BoundaryContact {
                delta: r.distance(p),
                b: r.nearest_site(p),
                unique: r.unique_contact(p),
            },
        })
    }

    /// Unit gradient of the distance function, `None` where the nearest
    /// boundary point is not unique.
    pub fn grad_distance(&self, p: Vec2) -> Result<Option<Vec2>> {
        let c = self.nearest_boundary(p)?;
        if !c.unique {
            return Ok(None);
        }
        Ok(Some((p - c.b).normalized()))
    }

    /// True for variants whose complement is convex (uniform curvature bound
    /// holds with R = infinity).
    pub fn complement_is_convex(&self) -> bool {
        matches!(
            self,
            Domain::HalfPlane { .. }
                | Domain::BallComplement { .. }
                | Domain::DiagonalHalfPlane
                | Domain::ConvexPolygon { side: PolygonSide::Exterior, .. }
        )
    }

    /// Largest R such that B(b_x + R (x - b_x)/delta(x), R) stays inside the
    /// domain for every sampled x. Infinity for convex complements; estimates
    /// decrease toward zero under sample refinement for the punctured example.
    pub fn curvature_radius(&self, sample_count: usize) -> Result<f64> {
        if self.complement_is_convex() {
            return Ok(f64::INFINITY);
        }
        let window = self.sample_window();
        let pts = sampling::interior_points(self, window, sample_count);
        if pts.is_empty() {
            return Err(MaxlabError::Config("curvature sampling produced no interior points".into()));
        }
        let scale = window.width().max(window.height());
        let feasible = |r: f64| -> bool {
            for &x in &pts {
                let c = match self.nearest_boundary(x) {
                    Ok(c) => c,
                    Err(_) => return false,
                };
                let u = (x - c.b) * (1.0 / c.delta);
                let center = c.b + u * r;
                if !self.contains(center) {
                    return false;
                }
                match self.distance(center) {
                    Ok(d) => {
                        if d < r * (1.0 - 1e-6) {
                            return false;
                        }
                    }
                    Err(_) => return false,
                }
            }
            true
        };
        let mut hi = scale;
        if feasible(hi) {
            // grow until infeasible or clearly unbounded
            for _ in 0..20 {
                hi *= 2.0;
                if !feasible(hi) {
                    break;
                }
            }
            if feasible(hi) {
                return Ok(f64::INFINITY);
            }
        }
        let mut lo = 0.0f64;
        while hi - lo > 1e-3 * hi.max(1e-12) {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Largest r with the sup-norm square Q(x, r) inside the domain.
    /// Closed forms for the flat-boundary variants used by the cube operators.
    pub fn sup_norm_distance(&self, p: Vec2) -> Result<f64> {
        if !self.contains(p) {
            return Err(MaxlabError::OutsideDomain(p.x, p.y));
        }
        match self {
            Domain::HalfPlane { inward_normal, offset } => {
                let n = *inward_normal;
                let d = n.dot(p) - offset;
                // min over complement of the sup-norm distance to the half-plane boundary
                Ok(d / (n.x.abs() + n.y.abs()))
            }
            Domain::DiagonalHalfPlane => Ok((p.y - p.x) / 2.0),
            Domain::Disk { center, radius } => {
                // largest square centered at p whose corners stay in the disk
                let mut lo = 0.0f64;
                let mut hi = *radius;
                for _ in 0..60 {
                    let r = 0.5 * (lo + hi);
                    let corners_ok = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
                        .iter()
                        .all(|&(sx, sy): &(f64, f64)| {
                            (p + Vec2::new(sx * r, sy * r)).dist(*center) < *radius
                        });
                    if corners_ok {
                        lo = r;
                    } else {
                        hi = r;
                    }
                }
                Ok(lo)
            }
            _ => Err(MaxlabError::Parameter(
                "sup-norm distance is only defined for the cube-operator domains".into(),
            )),
        }
    }

    /// Canonical window for sampling and rasterization. Unbounded variants
    /// get a fixed representative window.
    pub fn sample_window(&self) -> Rect {
        match self {
            Domain::Disk { center, radius } => Rect::new(
                *center - Vec2::new(*radius, *radius),
                *center + Vec2::new(*radius, *radius),
            ),
            Domain::HalfPlane { inward_normal, offset } => {
                let b = *inward_normal * *offset;
                Rect::new(b + Vec2::new(-2.0, 0.0), b + Vec2::new(2.0, 4.0))
            }
            Domain::BallComplement { center, radius } => Rect::new(
                *center - Vec2::new(3.0 * radius, 3.0 * radius),
                *center + Vec2::new(3.0 * radius, 3.0 * radius),
            ),
            Domain::ConvexPolygon { vertices, side } => {
                let mut lo = vertices[0];
                let mut hi = vertices[0];
                for v in vertices {
                    lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
                    hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
                }
                match side {
                    PolygonSide::Interior => Rect::new(lo, hi),
                    PolygonSide::Exterior => {
                        let c = (lo + hi) * 0.5;
                        let r = (hi - lo).norm();
                        Rect::new(c - Vec2::new(2.0 * r, 2.0 * r), c + Vec2::new(2.0 * r, 2.0 * r))
                    }
                }
            }
            Domain::PuncturedDisk { .. } => {
                Rect::new(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0))
            }
            Domain::DiagonalHalfPlane => Rect::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0)),
            Domain::Raster(r) => r.grid.extent(),
        }
    }

    /// Diameter for bounded variants, None otherwise.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            Domain::Disk { radius, .. } => Some(2.0 * radius),
            Domain::PuncturedDisk { .. } => Some(2.0),
            Domain::ConvexPolygon { vertices, side: PolygonSide::Interior } => {
                let mut d = 0.0f64;
                for a in vertices {
                    for b in vertices {
                        d = d.max(a.dist(*b));
                    }
                }
                Some(d)
            }
            Domain::Raster(r) => {
                let e = r.grid.extent();
                Some((e.hi - e.lo).norm())
            }
            _ => None,
        }
    }
}

#[derive(PartialEq, Eq, Clone, Copy, Debug)]
enum PolyLoc {
    StrictInside,
    OnBoundary,
    StrictOutside,
}

fn polygon_contains(vertices: &[Vec2], p: Vec2) -> PolyLoc {
    let n = vertices.len();
    let mut loc = PolyLoc::StrictInside;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = (b - a).cross(p - a);
        if c < 0.0 {
            return PolyLoc::StrictOutside;
        }
        if c == 0.0 {
            loc = PolyLoc::OnBoundary;
        }
    }
    loc
}

/// Distance to the polygon boundary, nearest point, uniqueness flag.
fn polygon_boundary_query(vertices: &[Vec2], p: Vec2) -> (f64, Vec2, bool) {
    let n = vertices.len();
    let mut best = f64::INFINITY;
    let mut second = f64::INFINITY;
    let mut bp = vertices[0];
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let (d, q) = point_segment_distance(p, a, b);
        if d < best - TAU_B {
            second = best;
            best = d;
            bp = q;
        } else if (d - best).abs() <= TAU_B {
            // same distance: tie unless it is the shared vertex of two edges
            if q.dist(bp) > TAU_B {
                second = d;
                if q.lex_le(bp) {
                    bp = q;
                }
            }
        } else if d < second {
            second = d;
        }
    }
    (best, bp, second - best > TAU_B)
}

fn contact_from_candidates(candidates: &[(f64, Vec2)]) -> BoundaryContact {
    let mut best = f64::INFINITY;
    for &(d, _) in candidates {
        best = best.min(d);
    }
    let mut minimizers: Vec<Vec2> = candidates
        .iter()
        .filter(|&&(d, _)| d - best <= TAU_B)
        .map(|&(_, b)| b)
        .collect();
    minimizers.sort_by(|a, b| {
        a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap())
    });
    BoundaryContact {
        delta: best,
        b: minimizers[0],
        unique: minimizers.len() == 1,
    }
}

/// Unit square (0,1)^2 as a convex-polygon interior.
pub fn unit_square() -> Domain {
    Domain::ConvexPolygon {
        vertices: vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ],
        side: PolygonSide::Interior,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_plane_distance_and_projection() {
        let d = Domain::unit_upper_half_plane();
        let x = Vec2::new(3.0, 0.7);
        assert!((d.distance(x).unwrap() - 0.7).abs() < 1e-12);
        let c = d.nearest_boundary(x).unwrap();
        assert!(c.unique);
        assert!(c.b.dist(Vec2::new(3.0, 0.0)) < 1e-12);
        let g = d.grad_distance(x).unwrap().unwrap();
        assert!(g.dist(Vec2::new(0.0, 1.0)) < 1e-12);
    }

    #[test]
    fn disk_distance_and_tie_break() {
        let d = Domain::disk(Vec2::ZERO, 1.0);
        assert!((d.distance(Vec2::new(0.25, 0.0)).unwrap() - 0.75).abs() < 1e-12);
        let c = d.nearest_boundary(Vec2::new(0.5, 0.0)).unwrap();
        assert!(c.unique && c.b.dist(Vec2::new(1.0, 0.0)) < 1e-12);
        let g = d.grad_distance(Vec2::new(0.5, 0.0)).unwrap().unwrap();
        assert!(g.dist(Vec2::new(-1.0, 0.0)) < 1e-12);
        // center: all of the circle minimizes
        let c0 = d.nearest_boundary(Vec2::ZERO).unwrap();
        assert!(!c0.unique);
        assert!(c0.b.dist(Vec2::new(-1.0, 0.0)) < 1e-12);
        assert!(d.grad_distance(Vec2::ZERO).unwrap().is_none());
    }

    #[test]
    fn ball_complement_distance() {
        let d = Domain::BallComplement { center: Vec2::ZERO, radius: 1.0 };
        assert!((d.distance(Vec2::new(2.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(d.distance(Vec2::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn outside_point_is_a_domain_error() {
        let d = Domain::disk(Vec2::ZERO, 1.0);
        assert!(matches!(
            d.distance(Vec2::new(2.0, 0.0)),
            Err(MaxlabError::OutsideDomain(_, _))
        ));
    }

    #[test]
    fn square_interior_distance() {
        let d = unit_square();
        let p = Vec2::new(0.3, 0.5);
        assert!((d.distance(p).unwrap() - 0.3).abs() < 1e-12);
        let c = d.nearest_boundary(p).unwrap();
        assert!(c.unique && c.b.dist(Vec2::new(0.0, 0.5)) < 1e-12);
        // center of the square is equidistant to all four edges
        let cc = d.nearest_boundary(Vec2::new(0.5, 0.5)).unwrap();
        assert!(!cc.unique);
        assert!(cc.b.dist(Vec2::new(0.0, 0.5)) < 1e-12, "lexicographic tie-break");
    }

    #[test]
    fn curvature_radius_disk_is_radius() {
        let d = Domain::disk(Vec2::ZERO, 0.8);
        let r = d.curvature_radius(200).unwrap();
        assert!((r - 0.8).abs() < 0.8 * 5e-3, "r = {r}");
    }

    #[test]
    fn curvature_radius_half_plane_is_infinite() {
        let d = Domain::unit_upper_half_plane();
        assert!(d.curvature_radius(50).unwrap().is_infinite());
    }

    #[test]
    fn curvature_radius_punctured_disk_decays() {
        let d = Domain::PuncturedDisk { levels: 20 };
        let r1 = d.curvature_radius(50).unwrap();
        let r2 = d.curvature_radius(400).unwrap();
        let r3 = d.curvature_radius(3000).unwrap();
        assert!(r1 >= r2 - 1e-9 && r2 >= r3 - 1e-9, "{r1} {r2} {r3}");
        assert!(r3 < 0.1, "estimates should collapse toward zero, got {r3}");
    }

    #[test]
    fn curvature_radius_monotone_in_sample_count() {
        let d = Domain::PuncturedDisk { levels: 10 };
        let mut prev = f64::INFINITY;
        for n in [25, 50, 100, 200, 800] {
            let r = d.curvature_radius(n).unwrap();
            assert!(r <= prev + 1e-9, "n={n} r={r} prev={prev}");
            prev = r;
        }
    }

    #[test]
    fn diagonal_half_plane_geometry() {
        let d = Domain::DiagonalHalfPlane;
        let p = Vec2::new(0.0, 1.0);
        assert!((d.distance(p).unwrap() - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
        assert!((d.sup_norm_distance(p).unwrap() - 0.5).abs() < 1e-12);
        let c = d.nearest_boundary(p).unwrap();
        assert!(c.b.dist(Vec2::new(0.5, 0.5)) < 1e-12);
    }

    #[test]
    fn raster_vs_analytic_agreement() {
        use crate::grid::GridSpec;
        let analytic = Domain::disk(Vec2::ZERO, 1.0);
        let n = 256;
        let grid = GridSpec::new(Vec2::new(-1.0, -1.0), 2.0 / n as f64, n, n).unwrap();
        let raster = Domain::Raster(
            RasterDomain::from_predicate(grid, |p| analytic.contains(p)).unwrap(),
        );
        let h = 2.0 / n as f64;
        let pts = sampling::interior_points(&analytic, analytic.sample_window(), 500);
        for p in pts {
            let da = analytic.distance(p).unwrap();
            if da < 3.0 * h {
                continue;
            }
            let dr = raster.distance(p).unwrap();
            assert!((da - dr).abs() <= 2.0 * h, "p=({},{}) {da} vs {dr}", p.x, p.y);
        }
    }

    #[test]
    fn distance_is_one_lipschitz() {
        let doms = [Domain::disk(Vec2::ZERO, 1.0), Domain::unit_upper_half_plane(), unit_square()];
        for d in &doms {
            let pts = sampling::interior_points(d, d.sample_window(), 200);
            for (i, &a) in pts.iter().enumerate() {
                for &b in pts.iter().skip(i + 1).take(20) {
                    let da = d.distance(a).unwrap();
                    let db = d.distance(b).unwrap();
                    assert!((da - db).abs() <= a.dist(b) + 1e-12);
                }
            }
        }
    }
}
