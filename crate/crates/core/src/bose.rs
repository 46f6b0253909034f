//! Ideal Bose gas in three dimensions with a `U(1)`-breaking source,
//! `H = ∫ d³x (1/2m) ∇ψ†∇ψ - v (ψ + ψ†)`, at density `ρ = 1` and `m = 1`.
//!
//! With `y = -βμ ≥ 0` and `λ = sqrt(2π/T)`:
//! `ρ = ψ² + λ⁻³ F_{3/2}(y)`, `ψ = v/|μ|`,
//! `S = λ⁻³ [5/2 F_{5/2}(y) + y F_{3/2}(y)]`, `E_kin = 3/2 T λ⁻³ F_{5/2}(y)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{polylog_f, zeta};
use crate::spin::Branch;
use crate::types::ExpectationPoint;

pub use crate::special::polylog_f as polylog;

const DENSITY: f64 = 1.0;
const ROOT_TOL: f64 = 1e-12;
const MAX_ROOT_ITERATIONS: usize = 400;

/// Source strength and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoseParams {
    pub v: f64,
    pub t: f64,
}

impl BoseParams {
    pub fn new(v: f64, t: f64) -> Self {
        Self { v, t }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v.is_finite() && self.t.is_finite()) || self.v < 0.0 || self.t <= 0.0 {
            return Err(Error::InvalidArgument(format!("need v >= 0 and T > 0, got {self:?}")));
        }
        Ok(())
    }
}

/// Equilibrium state at fixed density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoseState {
    pub t: f64,
    pub v: f64,
    /// Chemical potential, `≤ 0`.
    pub mu: f64,
    /// Thermal wavelength.
    pub lambda: f64,
    /// `|⟨ψ⟩|`.
    pub psi: f64,
    /// Sign of `⟨ψ⟩` (`+1`, `-1`, or `0` for the symmetric mixture).
    pub sign: f64,
    /// Entropy density.
    pub s: f64,
    /// Kinetic energy density.
    pub ekin: f64,
}

impl BoseState {
    /// `(E_kin, S, ⟨ψ⟩)` with the sign of the branch applied.
    pub fn point(&self) -> ExpectationPoint {
        ExpectationPoint::new(self.ekin, self.s, self.sign * self.psi)
    }

    /// `ψ² + λ⁻³ F_{3/2}(-βμ) - ρ`.
    pub fn density_residual(&self) -> Result<f64> {
        let y = -self.mu / self.t;
        Ok(self.psi * self.psi + self.lambda.powi(-3) * polylog_f(1.5, y.max(0.0))? - DENSITY)
    }
}

pub fn thermal_wavelength(t: f64) -> f64 {
    (2.0 * PI / t).sqrt()
}

/// `T_c(ρ) = 2π (ρ / ζ(3/2))^{2/3}`.
pub fn bose_tc(rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidArgument(format!("density must be positive, got {rho}")));
    }
    Ok(2.0 * PI * (rho / zeta(1.5)?).powf(2.0 / 3.0))
}

fn state_from(t: f64, v: f64, y: f64, psi: f64, sign: f64) -> Result<BoseState> {
    let lambda = thermal_wavelength(t);
    let l3 = lambda.powi(-3);
    let f52 = polylog_f(2.5, y)?;
    let f32 = polylog_f(1.5, y)?;
    Ok(BoseState {
        t,
        v,
        mu: -y * t,
        lambda,
        psi,
        sign,
        s: l3 * (2.5 * f52 + y * f32),
        ekin: 1.5 * t * l3 * f52,
    })
}

/// Root of a decreasing function of `u = ln y` by bisection with Newton steps.
fn solve_decreasing<G>(g: G, mut lo: f64, mut hi: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<(f64, f64)>,
{
    let (glo, _) = g(lo)?;
    let (ghi, _) = g(hi)?;
    if !(glo > 0.0 && ghi < 0.0) {
        return Err(Error::Bracketing(format!("no sign change on [{lo}, {hi}]: {glo}, {ghi}")));
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..MAX_ROOT_ITERATIONS {
        let (value, slope) = g(u)?;
        if value.abs() < ROOT_TOL {
            return Ok(u);
        }
        if value > 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let newton = u - value / slope;
        u = if slope < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-15 * u.abs().max(1.0) {
            let (value, _) = g(u)?;
            if value.abs() < ROOT_TOL {
                return Ok(u);
            }
            return Err(Error::Bracketing(format!("interval collapsed with residual {value:.3e}")));
        }
    }
    Err(Error::Bracketing("root search did not converge".into()))
}

fn bracket<G>(g: &G) -> Result<(f64, f64)>
where
    G: Fn(f64) -> Result<(f64, f64)>,
{
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g(lo)?.0 <= 0.0 {
        lo -= 4.0;
        if lo < -700.0 {
            return Err(Error::Bracketing("density stays below target as mu -> 0".into()));
        }
    }
    while g(hi)?.0 >= 0.0 {
        hi += 2.0;
        if hi > 7.0 {
            return Err(Error::Bracketing("density stays above target as mu -> -inf".into()));
        }
    }
    Ok((lo, hi))
}

/// Chemical potential at fixed density for `v > 0`, and the resulting state.
pub fn solve_mu(params: BoseParams) -> Result<BoseState> {
    params.validate()?;
    if params.v == 0.0 {
        return Err(Error::InvalidArgument("v = 0 is handled by bose_v0_branch".into()));
    }
    let (t, v) = (params.t, params.v);
    let l3 = thermal_wavelength(t).powi(-3);
    // residual and its derivative with respect to u = ln y; dF_σ/dy = -F_{σ-1}
    let g = |u: f64| -> Result<(f64, f64)> {
        let y = u.exp();
        let psi = v / (y * t);
        let value = psi * psi + l3 * polylog_f(1.5, y)? - DENSITY;
        let slope = -2.0 * psi * psi - l3 * y * polylog_f(0.5, y)?;
        Ok((value, slope))
    };
    let (lo, hi) = bracket(&g)?;
    let u = solve_decreasing(g, lo, hi)?;
    let y = u.exp();
    state_from(t, v, y, v / (y * t), 1.0)
}

/// The `v → 0` limit. Above `T_c` the state is unique with `ψ = 0`; below it
/// `μ = 0` and the branch picks `⟨ψ⟩ = ±sqrt(1 - λ⁻³ ζ(3/2))` (or their
/// symmetric mixture).
pub fn bose_v0_branch(t: f64, branch: Branch) -> Result<BoseState> {
    BoseParams::new(0.0, t).validate()?;
    let l3 = thermal_wavelength(t).powi(-3);
    let normal = l3 * zeta(1.5)?;
    if normal >= DENSITY {
        let g = |u: f64| -> Result<(f64, f64)> {
            let y = u.exp();
            Ok((l3 * polylog_f(1.5, y)? - DENSITY, -l3 * y * polylog_f(0.5, y)?))
        };
        let y = if normal == DENSITY {
            0.0
        } else {
            // F_{3/2}(y) ≈ ζ(3/2) - 2 sqrt(π y) puts the root near this value
            let guess = ((normal - DENSITY) / (2.0 * l3 * PI.sqrt())).powi(2).max(1e-300);
            let mut lo = guess.ln() - 2.0;
            while g(lo)?.0 <= 0.0 {
                lo -= 4.0;
            }
            let mut hi = lo + 4.0;
            while g(hi)?.0 >= 0.0 {
                hi += 2.0;
            }
            solve_decreasing(g, lo, hi)?.exp()
        };
        return state_from(t, 0.0, y, 0.0, 0.0);
    }
    let psi = (DENSITY - normal).sqrt();
    state_from(t, 0.0, 0.0, psi, branch.sign())
}

/// State for a signed source: `v < 0` mirrors `v > 0` in `⟨ψ⟩`, and `v = 0`
/// gives the symmetric mixture.
pub fn bose_state(v: f64, t: f64) -> Result<BoseState> {
    if v == 0.0 {
        return bose_v0_branch(t, Branch::Symmetric);
    }
    let mut s = solve_mu(BoseParams::new(v.abs(), t))?;
    s.sign = v.signum();
    s.v = v;
    Ok(s)
}

/// Momentum-shell flow at fixed density: `T → T e^{2s}`, `v → v e^{7s/2}`.
pub fn rg_flow(params: BoseParams, s: f64) -> BoseParams {
    BoseParams { v: params.v * (3.5 * s).exp(), t: params.t * (2.0 * s).exp() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_temperature() {
        let tc = bose_tc(1.0).unwrap();
        assert!((tc - 3.312_502_009_395_621).abs() < 1e-12, "{tc}");
        assert!((bose_tc(8.0).unwrap() - 4.0 * tc).abs() < 1e-12);
        assert!(bose_tc(1e-12).unwrap() < 1e-6);
        assert!(bose_tc(0.0).is_err());
    }

    // Independent root finder: plain bisection on μ itself.
    fn bisect_mu(v: f64, t: f64) -> f64 {
        let l3 = thermal_wavelength(t).powi(-3);
        let g = |mu: f64| (v / mu).powi(2) + l3 * polylog_f(1.5, -mu / t).unwrap() - 1.0;
        let (mut lo, mut hi) = (-100.0 * t, -1e-300);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn matches_independent_root_find() {
        for (v, t) in [(0.1, 5.0), (0.5, 2.0), (1e-3, 1.0), (2.0, 8.0)] {
            let s = solve_mu(BoseParams::new(v, t)).unwrap();
            let mu = bisect_mu(v, t);
            assert!((s.mu - mu).abs() < 1e-9 * mu.abs().max(1e-3), "v={v} T={t}: {} vs {mu}", s.mu);
            assert!(s.density_residual().unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn vanishing_source_limits() {
        let tc = bose_tc(1.0).unwrap();
        for t in [0.5 * tc, 0.9 * tc, 1.1 * tc, 2.0 * tc] {
            let a = solve_mu(BoseParams::new(1e-8, t)).unwrap();
            let b = bose_v0_branch(t, Branch::Plus).unwrap();
            assert!((a.psi - b.psi).abs() < 1e-3, "T={t}: {} vs {}", a.psi, b.psi);
        }
        let above = bose_v0_branch(1.5 * tc, Branch::Plus).unwrap();
        assert_eq!(above.psi, 0.0);
        assert!(above.density_residual().unwrap().abs() < 1e-10);
        let at = bose_v0_branch(tc, Branch::Plus).unwrap();
        assert!(at.psi < 1e-6);
    }

    #[test]
    fn condensate_branches() {
        let tc = bose_tc(1.0).unwrap();
        let t = 0.5 * tc;
        let plus = bose_v0_branch(t, Branch::Plus).unwrap();
        let minus = bose_v0_branch(t, Branch::Minus).unwrap();
        let mixed = bose_v0_branch(t, Branch::Symmetric).unwrap();
        // ψ² = 1 - (T/T_c)^{3/2}
        assert!((plus.psi * plus.psi - (1.0 - 0.5f64.powf(1.5))).abs() < 1e-12);
        assert_eq!(plus.point().c, -minus.point().c);
        assert_eq!(mixed.point().c, 0.0);
        assert_eq!(plus.s, mixed.s);
        let cold = bose_v0_branch(1e-4, Branch::Plus).unwrap();
        assert!((cold.psi - 1.0).abs() < 1e-6 && cold.s < 1e-6 && cold.ekin < 1e-9);
    }

    // dE = T dS along v = 0 at fixed density.
    #[test]
    fn thermodynamic_consistency() {
        for t in [1.0, 2.5, 4.0, 6.0] {
            let dt = 1e-5;
            let a = bose_v0_branch(t - dt, Branch::Symmetric).unwrap();
            let b = bose_v0_branch(t + dt, Branch::Symmetric).unwrap();
            let ratio = (b.ekin - a.ekin) / (b.s - a.s);
            assert!((ratio - t).abs() < 1e-5 * t, "T={t}: {ratio}");
        }
    }

    #[test]
    fn monotone_in_source_and_temperature() {
        let mut last = 0.0;
        for k in 1..=20 {
            let psi = solve_mu(BoseParams::new(0.05 * k as f64, 2.0)).unwrap().psi;
            assert!(psi > last);
            last = psi;
        }
        let mut last = 0.0;
        for k in 1..=20 {
            let s = solve_mu(BoseParams::new(0.1, 0.4 * k as f64)).unwrap().s;
            assert!(s > last);
            last = s;
        }
    }

    #[test]
    fn flow_is_a_group() {
        let p = BoseParams::new(0.3, 1.7);
        assert_eq!(rg_flow(p, 0.0), p);
        let beta_ratio = (1.0 / rg_flow(BoseParams::new(1.0, 1.0), 1.0).t) / 1.0;
        assert!((beta_ratio - (-2.0f64).exp()).abs() < 1e-16);
        let a = rg_flow(rg_flow(p, 0.4), -1.1);
        let b = rg_flow(p, -0.7);
        assert!((a.t - b.t).abs() < 1e-15 * b.t && (a.v - b.v).abs() < 1e-15 * b.v);
    }
}
