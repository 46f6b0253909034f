use std::f64::consts::PI;

use super::Branch;
use crate::error::{Error, Result};
use crate::quad;
use crate::types::ExpectationPoint;

const QUAD_TOL: f64 = 1e-13;

fn check_field(h: f64) -> Result<()> {
    if h.is_finite() && h >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("transverse field must be finite and >= 0, got {h}")))
    }
}

// 1 + h² - 2h cos k written without cancellation near h = 1, k = 0
fn dispersion_sq(h: f64, k: f64) -> f64 {
    let s = (0.5 * k).sin();
    (1.0 - h) * (1.0 - h) + 4.0 * h * s * s
}

/// Ground-state energy per site of the infinite chain
/// `H = -Σ X_i X_{i+1} - h Σ Z_i`:
/// `e(h) = -(1/2π) ∫_{-π}^{π} sqrt(1 + h² - 2h cos k) dk`.
pub fn pfeuty_energy(h: f64) -> Result<f64> {
    check_field(h)?;
    let (v, _) = quad::integrate(|k| dispersion_sq(h, k).sqrt(), 0.0, PI, QUAD_TOL);
    Ok(-v / PI)
}

/// `⟨Z⟩ = -de/dh`, evaluated from the analytic derivative of the integrand.
pub fn pfeuty_transverse(h: f64) -> Result<f64> {
    check_field(h)?;
    let integrand = |k: f64| {
        let r = dispersion_sq(h, k).sqrt();
        if r == 0.0 {
            0.0
        } else {
            (h - k.cos()) / r
        }
    };
    let (v, _) = quad::integrate(integrand, 0.0, PI, QUAD_TOL);
    Ok(v / PI)
}

/// Spontaneous magnetization `(1 - h²)^{1/8}` below the critical field, zero above.
pub fn pfeuty_magnetization(h: f64) -> Result<f64> {
    check_field(h)?;
    Ok(if h < 1.0 { (1.0 - h * h).powf(0.125) } else { 0.0 })
}

/// Point of the infinite-chain set at `B_x = 0`, `J = 1`, `B_z = h`.
///
/// `⟨XX⟩` follows from `e = -⟨XX⟩ - h⟨Z⟩`. The `Plus`/`Minus` branches carry
/// the spontaneous magnetization and trace the border of the ruled surface.
pub fn pfeuty_point(h: f64, branch: Branch) -> Result<ExpectationPoint> {
    let e = pfeuty_energy(h)?;
    let z = pfeuty_transverse(h)?;
    let x = branch.sign() * pfeuty_magnetization(h)?;
    Ok(ExpectationPoint::new(-e - h * z, z, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_and_critical_values() {
        assert!((pfeuty_energy(0.0).unwrap() + 1.0).abs() < 1e-14);
        assert!((pfeuty_energy(1.0).unwrap() + 4.0 / PI).abs() < 1e-12);
        assert!((pfeuty_transverse(1.0).unwrap() - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn paramagnetic_asymptote() {
        let h = 1e4;
        let e = pfeuty_energy(h).unwrap();
        // e = -h - 1/(4h) + O(h^-3)
        assert!((e + h + 0.25 / h).abs() < 1e-9, "{e}");
    }

    #[test]
    fn transverse_matches_finite_difference() {
        for h in [0.2, 0.5, 0.9, 1.5] {
            let step = 1e-5;
            let fd = -(pfeuty_energy(h + step).unwrap() - pfeuty_energy(h - step).unwrap()) / (2.0 * step);
            assert!((fd - pfeuty_transverse(h).unwrap()).abs() < 1e-8, "h={h}");
        }
    }

    #[test]
    fn branches() {
        let p = pfeuty_point(0.0, Branch::Plus).unwrap();
        assert!((p.a - 1.0).abs() < 1e-13 && p.b.abs() < 1e-13 && (p.c - 1.0).abs() < 1e-15);
        let p = pfeuty_point(0.5, Branch::Plus).unwrap();
        assert!((p.c - 0.75f64.powf(0.125)).abs() < 1e-15);
        assert!((p.c - 0.964_7).abs() < 1e-4);
        for h in [0.1, 0.7, 0.99] {
            let plus = pfeuty_point(h, Branch::Plus).unwrap();
            let minus = pfeuty_point(h, Branch::Minus).unwrap();
            assert_eq!(plus.c, -minus.c);
            assert_eq!(pfeuty_point(h, Branch::Symmetric).unwrap().c, 0.0);
        }
        for b in [Branch::Plus, Branch::Minus, Branch::Symmetric] {
            assert_eq!(pfeuty_point(1.0, b).unwrap().c, 0.0);
        }
        assert!(pfeuty_energy(-0.1).is_err());
    }
}
