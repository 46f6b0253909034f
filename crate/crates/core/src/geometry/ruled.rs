//! Ruled-surface detection: the longest edge of a sampled hull, and the scan
//! over the order-parameter family `O(Θ) = cos(Θ/2) X + sin(Θ/2) Y`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hull::{convex_hull, ConvexHull3, HullKind};
use crate::error::{Error, Result};
use crate::types::ExpectationPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuledSurfaceReport {
    pub d_max: f64,
    /// Vertex indices of the longest edge, when there is one.
    pub edge: Option<(usize, usize)>,
    /// Endpoints of that edge.
    pub segment: Option<[ExpectationPoint; 2]>,
    pub theta_star: Option<f64>,
    /// `(Θ, d_max(Θ))` pairs of a scan.
    pub curve: Vec<(f64, f64)>,
}

/// Longest edge of the hull's edge graph.
///
/// Defined for solids and for planar hulls (polygon sides); lower-dimensional
/// hulls are an error.
pub fn d_max(hull: &ConvexHull3) -> Result<RuledSurfaceReport> {
    match hull.kind {
        HullKind::Solid | HullKind::Planar => {}
        HullKind::Linear => return Err(Error::DegenerateHull("linear")),
        HullKind::Point => return Err(Error::DegenerateHull("point")),
        HullKind::Empty => return Err(Error::DegenerateHull("empty")),
    }
    let mut best = (0.0, (0, 0));
    for &(i, j) in &hull.edges {
        let d = hull.vertices[i].distance(&hull.vertices[j]);
        if d > best.0 {
            best = (d, (i, j));
        }
    }
    let (i, j) = best.1;
    Ok(RuledSurfaceReport {
        d_max: best.0,
        edge: Some((i, j)),
        segment: Some([hull.vertices[i], hull.vertices[j]]),
        theta_star: None,
        curve: Vec::new(),
    })
}

/// `n` uniform angles in `[0, π)`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| PI * k as f64 / n as f64).collect()
}

/// The cloud `(XX, Z, ⟨O(Θ)⟩)` from `(XX, Z, X, Y)` quadruples.
pub fn project(base: &[[f64; 4]], theta: f64) -> Vec<ExpectationPoint> {
    let (s, c) = (0.5 * theta).sin_cos();
    base.iter().map(|q| ExpectationPoint::new(q[0], q[1], c * q[2] + s * q[3])).collect()
}

fn scan_one(base: &[[f64; 4]], theta: f64) -> Result<(f64, Option<RuledSurfaceReport>)> {
    let hull = convex_hull(&project(base, theta))?;
    match d_max(&hull) {
        Ok(r) => Ok((r.d_max, Some(r))),
        Err(Error::DegenerateHull(_)) => Ok((0.0, None)),
        Err(e) => Err(e),
    }
}

fn check_thetas(thetas: &[f64]) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("empty Θ grid".into()));
    }
    // Θ = π (pure Y) is accepted alongside [0, π)
    if let Some(t) = thetas.iter().find(|t| !(0.0..=PI).contains(*t)) {
        return Err(Error::InvalidArgument(format!("Θ = {t} outside [0, π]")));
    }
    Ok(())
}

/// `d_max` of the projected cloud for every `Θ` (in parallel), with the
/// maximizing angle. Angles whose hull is lower-dimensional record `0`.
pub fn theta_scan(base: &[[f64; 4]], thetas: &[f64]) -> Result<RuledSurfaceReport> {
    check_thetas(thetas)?;
    let results: Vec<(f64, Option<RuledSurfaceReport>)> =
        thetas.par_iter().map(|&t| scan_one(base, t)).collect::<Result<_>>()?;
    let mut best = 0;
    for (k, r) in results.iter().enumerate() {
        if r.0 > results[best].0 {
            best = k;
        }
    }
    let curve: Vec<(f64, f64)> = thetas.iter().zip(&results).map(|(&t, r)| (t, r.0)).collect();
    let (edge, segment) = match &results[best].1 {
        Some(r) => (r.edge, r.segment),
        None => (None, None),
    };
    Ok(RuledSurfaceReport { d_max: results[best].0, edge, segment, theta_star: Some(thetas[best]), curve })
}

/// [`theta_scan`] followed by a golden-section search within one grid step
/// of the coarse maximum. The curve keeps the coarse grid.
pub fn theta_scan_refined(base: &[[f64; 4]], thetas: &[f64], iterations: usize) -> Result<RuledSurfaceReport> {
    let mut report = theta_scan(base, thetas)?;
    if thetas.len() < 2 {
        return Ok(report);
    }
    let star = report.theta_star.expect("scan sets theta_star");
    let mut sorted = thetas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let step = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min).max(1e-12);
    let (mut lo, mut hi) = ((star - step).max(0.0), (star + step).min(PI));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = scan_one(base, x1)?;
    let mut f2 = scan_one(base, x2)?;
    for _ in 0..iterations {
        if f1.0 >= f2.0 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = scan_one(base, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = scan_one(base, x2)?;
        }
    }
    let (x, f) = if f1.0 >= f2.0 { (x1, f1) } else { (x2, f2) };
    if f.0 > report.d_max {
        report.d_max = f.0;
        report.theta_star = Some(x);
        if let Some(r) = f.1 {
            report.edge = r.edge;
            report.segment = r.segment;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::types::SeededRng;

    fn pt(a: f64, b: f64, c: f64) -> ExpectationPoint {
        ExpectationPoint::new(a, b, c)
    }

    #[test]
    fn unit_square_diagonal_is_not_an_edge() {
        let sq = [pt(0.0, 0.0, 0.5), pt(1.0, 0.0, 0.5), pt(1.0, 1.0, 0.5), pt(0.0, 1.0, 0.5)];
        let r = d_max(&convex_hull(&sq).unwrap()).unwrap();
        assert!((r.d_max - 1.0).abs() < 1e-15);
        let line = [pt(0.0, 0.0, 0.0), pt(1.0, 0.0, 0.0), pt(2.0, 0.0, 0.0), pt(3.0, 0.0, 0.0)];
        assert!(matches!(d_max(&convex_hull(&line).unwrap()), Err(Error::DegenerateHull(_))));
    }

    #[test]
    fn cube_longest_edge_is_a_side() {
        let pts: Vec<_> = (0..8).map(|k| pt((k & 1) as f64, (k >> 1 & 1) as f64, 2.0 * (k >> 2 & 1) as f64)).collect();
        let r = d_max(&convex_hull(&pts).unwrap()).unwrap();
        assert_eq!(r.d_max, 2.0);
        let [a, b] = r.segment.unwrap();
        assert_eq!(a.distance(&b), r.d_max);
    }

    fn sphere_cloud(points: &[[f64; 3]]) -> f64 {
        let pts: Vec<_> = points.iter().map(|v| pt(v[0], v[1], v[2])).collect();
        d_max(&convex_hull(&pts).unwrap()).unwrap().d_max
    }

    #[test]
    fn smooth_body_has_short_edges() {
        // evenly spread samples: the longest edge tracks the spacing sqrt(4π/n)
        let lattice: Vec<[f64; 3]> = crate::types::Direction3::sphere_grid(10_000).iter().map(|d| d.components()).collect();
        let d = sphere_cloud(&lattice);
        assert!(d < 0.1, "{d}");

        // i.i.d. samples leave larger gaps but still shrink with n
        let mut rng = SeededRng::new(1).rng();
        let mut random = |n: usize| -> Vec<[f64; 3]> {
            (0..n)
                .map(|_| {
                    let v: [f64; 3] = std::array::from_fn(|_| rng.sample(rand_distr::StandardNormal));
                    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    [v[0] / r, v[1] / r, v[2] / r]
                })
                .collect()
        };
        let coarse = sphere_cloud(&random(1_000));
        let fine = sphere_cloud(&random(10_000));
        assert!(fine < 0.5 * coarse, "{coarse} -> {fine}");
    }

    #[test]
    fn grid_excludes_pi() {
        let g = theta_grid(64);
        assert_eq!(g.len(), 64);
        assert_eq!(g[0], 0.0);
        assert!(g[63] < PI);
        assert!(theta_scan(&[[0.0; 4]], &[]).is_err());
        assert!(theta_scan(&[[0.0; 4]], &[4.0]).is_err());
    }

    #[test]
    fn flat_projection_records_zero() {
        // a cloud on a line stays on a line for every Θ
        let base: Vec<[f64; 4]> = (0..10).map(|k| [k as f64, 2.0 * k as f64, 1.0, 0.0]).collect();
        let r = theta_scan(&base, &[0.0, PI]).unwrap();
        assert_eq!(r.curve, vec![(0.0, 0.0), (PI, 0.0)]);
    }
}
