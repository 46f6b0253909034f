use crate::error::{Error, Result};

/// Least-squares slope of `ln y` against `ln x`.
///
/// Each point is `(x, y)` with `x = d⟨XX⟩/d⟨Z⟩ + 1` (or any other control
/// distance) and `y` the order parameter. For `y ∝ x^β` the slope is `β`.
pub fn critical_exponent_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 5 {
        return Err(Error::InvalidArgument(format!("need at least 5 points, got {}", points.len())));
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::Domain(format!("exponent fit needs positive finite data, got ({x}, {y})")));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all x values coincide".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{pfeuty_magnetization, pfeuty_point, Branch};

    #[test]
    fn exact_power_laws() {
        for beta in [0.125, 0.5, 2.0] {
            let pts: Vec<(f64, f64)> = (1..=10).map(|k| (0.01 * k as f64, 3.0 * (0.01 * k as f64).powf(beta))).collect();
            assert!((critical_exponent_fit(&pts).unwrap() - beta).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let pts = vec![(1.0, 1.0); 4];
        assert!(critical_exponent_fit(&pts).is_err());
        let mut pts: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64, k as f64)).collect();
        pts[2].1 = 0.0;
        assert!(critical_exponent_fit(&pts).is_err());
    }

    // Along the exact branch the tangent plane normal is (1, h, 0), so the
    // slope d⟨XX⟩/d⟨Z⟩ equals -h and slope + 1 = 1 - h.
    #[test]
    fn pfeuty_window_gives_one_eighth() {
        let hs: Vec<f64> = (0..=18).map(|k| 0.9 + 0.005 * k as f64).collect();
        let pts: Vec<_> = hs.iter().map(|&h| pfeuty_point(h, Branch::Plus).unwrap()).collect();
        let mut data = Vec::new();
        for w in pts.windows(2).zip(hs.windows(2)) {
            let (p, h) = w;
            let slope = (p[1].a - p[0].a) / (p[1].b - p[0].b);
            let mid = 0.5 * (h[0] + h[1]);
            data.push((slope + 1.0, pfeuty_magnetization(mid).unwrap()));
        }
        let beta = critical_exponent_fit(&data).unwrap();
        assert!((beta - 0.125).abs() < 0.02, "{beta}");
    }
}
