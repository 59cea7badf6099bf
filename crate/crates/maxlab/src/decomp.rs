//! Angular/scale decomposition of the weighted spherical average and its
//! dual geometry: dyadic shells, chord-law sectors, the sector integrals
//! S_j^k, the convex bodies E(y) with boundaries P(y), and the measure and
//! operator-norm estimators built on them.

use crate::domain::Domain;
use crate::error::{MaxlabError, Result};
use crate::field::ScalarField;
use crate::geom::{Rect, Vec2};
use crate::maximal::Flagged;

/// Largest sector index tracked by the chord classification; finer chords
/// are sub-grid at the default resolutions.
pub const J_MAX_DEFAULT: u32 = 12;

/// Dyadic shell index: the unique k with 2^k <= delta < 2^{k+1}.
pub fn shell_of_delta(delta: f64) -> i32 {
    delta.log2().floor() as i32
}

pub fn shell_index(dom: &Domain, x: Vec2) -> Result<i32> {
    Ok(shell_of_delta(dom.distance(x)?))
}

/// Distance to the complement, extended by zero outside the domain; this is
/// the continuous extension of the interior distance function.
pub fn delta_ext(dom: &Domain, x: Vec2) -> f64 {
    if dom.contains(x) {
        dom.distance(x).unwrap_or(0.0)
    } else {
        0.0
    }
}

/// Angular sector of the boundary sphere at chord scale 2^{-j}.
#[derive(Clone, Debug)]
pub struct SectorSpec {
    pub x: Vec2,
    pub j: u32,
    pub delta: f64,
    pub b: Vec2,
    /// Absolute angle intervals (lo, hi) around x, hi > lo.
    pub intervals: Vec<(f64, f64)>,
    pub non_unique_contact: bool,
}

impl SectorSpec {
    /// Total angular measure of the sector.
    pub fn angular_measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// Total arc length on the boundary sphere.
    pub fn arc_length(&self) -> f64 {
        self.delta * self.angular_measure()
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        let tau = 2.0 * std::f64::consts::PI;
        self.intervals.iter().any(|&(lo, hi)| {
            let t = (theta - lo).rem_euclid(tau);
            t <= hi - lo
        })
    }
}

/// Half-angle bounds for sector j: the chord law |y - b_x| = 2 delta
/// sin(beta/2) turns the chord band (2^{-j}, 2^{-j+1}] into an angle band.
pub fn sector_angle_band(j: u32) -> (f64, f64) {
    if j == 0 {
        (std::f64::consts::FRAC_PI_3, std::f64::consts::PI)
    } else {
        let lo = 2.0 * (2f64.powi(-(j as i32) - 1)).asin();
        let hi = 2.0 * (2f64.powi(-(j as i32))).asin();
        (lo, hi)
    }
}

pub fn angular_sector(dom: &Domain, x: Vec2, j: u32) -> Result<SectorSpec> {
    let contact = dom.nearest_boundary(x)?;
    let phi = (contact.b - x).angle();
    let (lo, hi) = sector_angle_band(j);
    let intervals = if j == 0 {
        // the two outer arcs join across the antipode of b_x
        vec![(phi + lo, phi + 2.0 * std::f64::consts::PI - lo)]
    } else {
        vec![(phi + lo, phi + hi), (phi - hi, phi - lo)]
    };
    Ok(SectorSpec {
        x,
        j,
        delta: contact.delta,
        b: contact.b,
        intervals,
        non_unique_contact: !contact.unique,
    })
}

/// Sector index of a chord ratio |y - b_x| / delta(x) in (0, 2].
pub fn chord_sector_index(ratio: f64) -> u32 {
    if ratio > 1.0 {
        0
    } else {
        (((-ratio.log2()).floor() as i64) + 1).clamp(1, 63) as u32
    }
}

/// S_j^k f(x): the unnormalized surface integral of f over the sector
/// omega_j(x), gated by membership of x in the shell Omega_k.
pub fn s_jk(f: &ScalarField, x: Vec2, j: u32, k: i32) -> Result<Flagged> {
    let sector = angular_sector(&f.domain, x, j)?;
    let low_res = sector.delta < 3.0 * f.grid.h;
    if shell_of_delta(sector.delta) != k {
        return Ok(Flagged {
            value: 0.0,
            low_res,
            non_unique_contact: sector.non_unique_contact,
        });
    }
    // resolve each interval against both the grid and the arc geometry
    let max_len = sector
        .intervals
        .iter()
        .map(|(lo, hi)| hi - lo)
        .fold(0.0, f64::max);
    let nodes = ((max_len * sector.delta / f.grid.h).ceil() as usize * 2).clamp(16, 1024);
    let value = f.sphere_integral_intervals(x, sector.delta, &sector.intervals, nodes, |_, _| 1.0);
    Ok(Flagged {
        value,
        low_res,
        non_unique_contact: sector.non_unique_contact,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct Reconstruction {
    /// Sum over j = 1..j_max of 2^{k(alpha-n)-j} S_j^k f(x) at k = shell(x).
    pub sum: f64,
    /// Weighted spherical average divided by the sum; 0 when the sum vanishes.
    pub ratio_to_b: f64,
    pub low_res: bool,
    pub non_unique_contact: bool,
}

/// Reassembles the weighted spherical average from the sector integrals and
/// reports the ratio against the direct quadrature.
pub fn reconstruct_b(f: &ScalarField, x: Vec2, alpha: f64, j_max: u32) -> Result<Reconstruction> {
    let k = shell_index(&f.domain, x)?;
    let scale = 2f64.powf(k as f64 * (alpha - 2.0));
    let mut sum = 0.0;
    let mut low_res = false;
    let mut non_unique = false;
    for j in 1..=j_max {
        let term = s_jk(f, x, j, k)?;
        low_res |= term.low_res;
        non_unique |= term.non_unique_contact;
        sum += scale * 2f64.powi(-(j as i32)) * term.value;
    }
    let b = crate::maximal::weighted_spherical_b(f, x, alpha)?;
    let ratio_to_b = if sum == 0.0 { 0.0 } else { b.value / sum };
    Ok(Reconstruction {
        sum,
        ratio_to_b,
        low_res: low_res || b.low_res,
        non_unique_contact: non_unique,
    })
}

/// Membership in the convex body E(y) = {x : |x - y| <= delta(x)}.
pub fn e_membership(dom: &Domain, y: Vec2, x: Vec2) -> bool {
    x.dist(y) <= delta_ext(dom, x)
}

/// Extracted boundary P(y) of the convex body E(y): an angularly ordered
/// polyline of the zero level set of g(x) = |x - y| - delta(x).
#[derive(Clone, Debug)]
pub struct ConvexBodyProbe {
    pub y: Vec2,
    pub points: Vec<Vec2>,
    /// True when the polyline closes up inside the extraction window.
    pub closed: bool,
    /// Node spacing of the extraction grid (max of the two directions).
    pub h: f64,
    pub low_res: bool,
}

impl ConvexBodyProbe {
    /// Consecutive polyline segments, dropping window-exit chords.
    pub fn segments(&self) -> Vec<(Vec2, Vec2)> {
        let n = self.points.len();
        if n < 2 {
            return Vec::new();
        }
        let cutoff = 6.0 * self.h;
        let last = if self.closed { n } else { n - 1 };
        (0..last)
            .map(|i| (self.points[i], self.points[(i + 1) % n]))
            .filter(|(a, b)| a.dist(*b) <= cutoff)
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.segments().iter().map(|(a, b)| a.dist(*b)).sum()
    }
}

pub fn extract_p(dom: &Domain, y: Vec2, window: Rect, n: usize) -> Result<ConvexBodyProbe> {
    if !dom.contains(y) {
        return Err(MaxlabError::OutsideDomain(y.x, y.y));
    }
    let g = |p: Vec2| p.dist(y) - delta_ext(dom, p);
    let dx = window.width() / (n - 1) as f64;
    let dy = window.height() / (n - 1) as f64;
    let node = |i: usize, j: usize| window.lo + Vec2::new(i as f64 * dx, j as f64 * dy);
    let vals: Vec<f64> = (0..n * n)
        .map(|idx| g(node(idx % n, idx / n)))
        .collect();
    let bisect = |mut a: Vec2, mut b: Vec2| {
        let (mut ga, _gb) = (g(a), g(b));
        for _ in 0..30 {
            let m = (a + b) * 0.5;
            let gm = g(m);
            if (gm <= 0.0) == (ga <= 0.0) {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        (a + b) * 0.5
    };
    let mut pts = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let ga = vals[j * n + i];
            if i + 1 < n {
                let gb = vals[j * n + i + 1];
                if (ga <= 0.0) != (gb <= 0.0) {
                    pts.push(bisect(node(i, j), node(i + 1, j)));
                }
            }
            if j + 1 < n {
                let gb = vals[(j + 1) * n + i];
                if (ga <= 0.0) != (gb <= 0.0) {
                    pts.push(bisect(node(i, j), node(i, j + 1)));
                }
            }
        }
    }
    // E(y) is convex with y interior, so P(y) is a graph over the angle at y
    pts.sort_by(|a, b| {
        (*a - y)
            .angle()
            .partial_cmp(&(*b - y).angle())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let h = dx.max(dy);
    let closed = pts.len() >= 3
        && pts
            .iter()
            .zip(pts.iter().cycle().skip(1))
            .take(pts.len())
            .all(|(a, b)| a.dist(*b) <= 6.0 * h);
    Ok(ConvexBodyProbe {
        y,
        points: pts,
        closed,
        h,
        low_res: dom.distance(y)? < 3.0 * h,
    })
}

/// Supporting-line diagnostics at one extracted boundary point.
#[derive(Clone, Copy, Debug)]
pub struct SupportReport {
    pub tangent: Vec2,
    /// Angle between the tangent and the normal candidate b_x - y, in
    /// degrees away from 90.
    pub orthogonality_err_deg: f64,
    /// Difference of the two line-vector angles the tangent makes with
    /// y - x and b_x - x, in degrees.
    pub bisection_err_deg: f64,
    pub one_sided: bool,
    /// Largest crossing of the supporting line by other extracted points.
    pub max_violation: f64,
    pub non_unique_contact: bool,
}

pub fn supporting_line_check(
    dom: &Domain,
    probe: &ConvexBodyProbe,
    idx: usize,
) -> Result<SupportReport> {
    let n = probe.points.len();
    if n < 3 {
        return Err(MaxlabError::Parameter(
            "supporting line needs at least 3 extracted points".into(),
        ));
    }
    let x = probe.points[idx];
    let prev = probe.points[(idx + n - 1) % n];
    let next = probe.points[(idx + 1) % n];
    let cutoff = 6.0 * probe.h;
    let tangent = if x.dist(prev) <= cutoff && x.dist(next) <= cutoff {
        (next - prev).normalized()
    } else if x.dist(next) <= cutoff {
        (next - x).normalized()
    } else {
        (x - prev).normalized()
    };
    let contact = dom.nearest_boundary(x)?;
    let b = contact.b;
    let deg = 180.0 / std::f64::consts::PI;
    let orth = crate::geom::line_vector_angle(tangent, b - probe.y);
    let orthogonality_err_deg = (orth - std::f64::consts::FRAC_PI_2).abs() * deg;
    let a1 = crate::geom::line_vector_angle(tangent, probe.y - x);
    let a2 = crate::geom::line_vector_angle(tangent, b - x);
    let bisection_err_deg = (a1 - a2).abs() * deg;
    // one-sided test: everything stays on the y-side of the tangent line
    let normal = tangent.perp();
    let sign = (probe.y - x).dot(normal).signum();
    let mut max_violation: f64 = 0.0;
    for p in &probe.points {
        let s = sign * (*p - x).dot(normal);
        if s < -max_violation {
            max_violation = -s;
        }
    }
    Ok(SupportReport {
        tangent,
        orthogonality_err_deg,
        bisection_err_deg,
        one_sided: max_violation <= 2.0 * probe.h,
        max_violation,
        non_unique_contact: !contact.unique,
    })
}

/// Sector index of an extracted point x relative to the probe center, by
/// the exact chord test on |y - b_x| / delta(x).
pub fn sector_index_at(dom: &Domain, y: Vec2, x: Vec2) -> Result<u32> {
    let contact = dom.nearest_boundary(x)?;
    Ok(chord_sector_index(y.dist(contact.b) / contact.delta))
}

/// Arc length of the piece P_j^k(y): the extracted-boundary points lying in
/// shell k whose chord ratio to y selects sector j.
pub fn p_jk_measure(dom: &Domain, probe: &ConvexBodyProbe, j: u32, k: i32) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in probe.segments() {
        let m = (a + b) * 0.5;
        if !dom.contains(m) {
            continue;
        }
        let contact = dom.nearest_boundary(m)?;
        if shell_of_delta(contact.delta) == k
            && chord_sector_index(probe.y.dist(contact.b) / contact.delta) == j
        {
            total += a.dist(b);
        }
    }
    Ok(total)
}

/// Integral of |x - y|^{1-n} over P_j(y) (all shells), n = 2.
pub fn rough_integral(dom: &Domain, probe: &ConvexBodyProbe, j: u32) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in probe.segments() {
        let m = (a + b) * 0.5;
        if !dom.contains(m) {
            continue;
        }
        let contact = dom.nearest_boundary(m)?;
        if chord_sector_index(probe.y.dist(contact.b) / contact.delta) == j {
            total += a.dist(b) / m.dist(probe.y);
        }
    }
    Ok(total)
}

/// Aggregated piece data for one (sector, shell) pair of a probe.
#[derive(Clone, Copy, Debug)]
pub struct PieceEntry {
    pub j: u32,
    pub k: i32,
    /// Arc length of the piece P_j^k(y).
    pub length: f64,
    /// Integral of |x - y|^{-1} over the piece.
    pub inv_dist: f64,
}

/// Classifies every probe segment once and aggregates by (sector, shell);
/// equivalent to calling p_jk_measure / rough_integral over the full sweep.
pub fn piece_table(dom: &Domain, probe: &ConvexBodyProbe) -> Result<Vec<PieceEntry>> {
    let mut table: std::collections::BTreeMap<(u32, i32), (f64, f64)> =
        std::collections::BTreeMap::new();
    for (a, b) in probe.segments() {
        let m = (a + b) * 0.5;
        if !dom.contains(m) {
            continue;
        }
        let contact = dom.nearest_boundary(m)?;
        let j = chord_sector_index(probe.y.dist(contact.b) / contact.delta);
        let k = shell_of_delta(contact.delta);
        let len = a.dist(b);
        let e = table.entry((j, k)).or_insert((0.0, 0.0));
        e.0 += len;
        e.1 += len / m.dist(probe.y);
    }
    Ok(table
        .into_iter()
        .map(|((j, k), (length, inv_dist))| PieceEntry { j, k, length, inv_dist })
        .collect())
}

/// Nonemptiness of the piece P_j^k(y), which characterizes y in A_j^k.
pub fn ajk_nonempty(dom: &Domain, probe: &ConvexBodyProbe, j: u32, k: i32) -> Result<bool> {
    Ok(p_jk_measure(dom, probe, j, k)? > 0.0)
}

#[derive(Clone, Copy, Debug)]
pub struct L1Probe {
    /// h^2-sum of S_j^k f_eps over the grid, f_eps a normalized small-ball
    /// indicator at y.
    pub integral: f64,
    /// integral / 2^{k(n-1)+j}: the absolute operator-norm surrogate.
    pub ratio_general: f64,
    /// integral / (2^j * sum of neighboring piece measures): the dual form.
    pub ratio_dual: f64,
    pub low_res: bool,
}

/// L^1 -> L^1 probe for S_j^k: integrates the sector operator applied to a
/// normalized indicator of B(y, eps), eps = 4h on the probe grid.
pub fn opnorm_l1_probe(
    f_eps: &ScalarField,
    probe: &ConvexBodyProbe,
    j: u32,
    k: i32,
) -> Result<L1Probe> {
    let dom = &f_eps.domain;
    let grid = &f_eps.grid;
    let h = grid.h;
    let eps = 4.0 * h;
    let y = probe.y;
    let mut integral = 0.0;
    let mut low_res = false;
    for jj in 0..grid.ny {
        for ii in 0..grid.nx {
            let x = grid.center(ii, jj);
            if !dom.contains(x) {
                continue;
            }
            let delta = dom.distance(x)?;
            if shell_of_delta(delta) != k {
                continue;
            }
            // the sector integral can only see the bump when the boundary
            // sphere passes through its support
            if (x.dist(y) - delta).abs() > eps + 2.0 * h {
                continue;
            }
            let s = s_jk(f_eps, x, j, k)?;
            low_res |= s.low_res;
            integral += s.value * h * h;
        }
    }
    let mut neighbor_measure = 0.0;
    for dj in -1i64..=1 {
        let jn = j as i64 + dj;
        if jn < 0 {
            continue;
        }
        for dk in -1i32..=1 {
            neighbor_measure += p_jk_measure(dom, probe, jn as u32, k + dk)?;
        }
    }
    let denom = 2f64.powi(j as i32) * neighbor_measure;
    Ok(L1Probe {
        integral,
        ratio_general: integral / 2f64.powi(k + j as i32),
        ratio_dual: if denom == 0.0 { 0.0 } else { integral / denom },
        low_res,
    })
}

/// L^inf -> L^inf probe: sup over the samples of S_j^k f(x) / 2^{(n-1)(k-j)}.
pub fn opnorm_linf_probe(f: &ScalarField, samples: &[Vec2], j: u32, k: i32) -> Result<f64> {
    let mut sup = 0.0f64;
    for &x in samples {
        let s = s_jk(f, x, j, k)?;
        sup = sup.max(s.value);
    }
    Ok(sup / 2f64.powi(k - j as i32))
}

/// Curvature-annulus diagnostics at one point of the boundary sphere.
#[derive(Clone, Copy, Debug)]
pub struct AnnulusReport {
    /// delta (1 - delta/R)(1 - cos beta), or delta (1 - cos beta) when the
    /// complement is convex.
    pub lhs: f64,
    /// Distance from y to the domain boundary.
    pub rhs: f64,
    pub ok: bool,
    pub non_unique_contact: bool,
}

pub fn annulus_check(dom: &Domain, x: Vec2, y: Vec2, r_curv: f64, tol: f64) -> Result<AnnulusReport> {
    let contact = dom.nearest_boundary(x)?;
    let delta = contact.delta;
    if (x.dist(y) - delta).abs() > 1e-6 * delta {
        return Err(MaxlabError::Parameter(
            "annulus check expects y on the boundary sphere of x".into(),
        ));
    }
    let beta = crate::geom::angle_between(contact.b - x, y - x);
    let lhs = if dom.complement_is_convex() {
        delta * (1.0 - beta.cos())
    } else {
        delta * (1.0 - delta / r_curv) * (1.0 - beta.cos())
    };
    let rhs = delta_ext(dom, y);
    Ok(AnnulusReport {
        lhs,
        rhs,
        ok: lhs <= rhs + tol,
        non_unique_contact: !contact.unique,
    })
}
