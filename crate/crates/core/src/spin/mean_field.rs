//! Separable two-site states.
//!
//! Linear functionals over the separable set are extremized by pure product
//! states `|a⟩⊗|b⟩`, so the optimization runs over two Bloch vectors. The
//! functional involves only x and z components; for fixed `b` the optimal `a`
//! is the unit vector along its local field, which lies in the x–z plane. Each
//! spin is therefore parameterized by one polar angle.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BlochVector, GroundStateResult, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::types::{ExpectationPoint, SeededRng, SpinParams};

const GRAD_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 200;
const MAX_NEWTON: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldResult {
    pub ground: GroundStateResult,
    pub a: BlochVector,
    pub b: BlochVector,
}

struct Functional {
    j: f64,
    hz: f64,
    hx: f64,
}

impl Functional {
    fn new(p: &SpinParams) -> Self {
        Self { j: p.j, hz: 0.5 * p.bz, hx: 0.5 * p.bx }
    }

    fn energy(&self, ta: f64, tb: f64) -> f64 {
        let (sa, ca) = ta.sin_cos();
        let (sb, cb) = tb.sin_cos();
        -self.j * sa * sb - self.hz * (ca + cb) - self.hx * (sa + sb)
    }

    fn gradient(&self, ta: f64, tb: f64) -> [f64; 2] {
        let (sa, ca) = ta.sin_cos();
        let (sb, cb) = tb.sin_cos();
        [
            -self.j * ca * sb + self.hz * sa - self.hx * ca,
            -self.j * sa * cb + self.hz * sb - self.hx * cb,
        ]
    }

    fn hessian(&self, ta: f64, tb: f64) -> [[f64; 2]; 2] {
        let (sa, ca) = ta.sin_cos();
        let (sb, cb) = tb.sin_cos();
        let off = -self.j * ca * cb;
        [
            [self.j * sa * sb + self.hz * ca + self.hx * sa, off],
            [off, self.j * sa * sb + self.hz * cb + self.hx * sb],
        ]
    }

    /// Angle of the unit vector along the local field felt by one spin.
    fn best_response(&self, other: f64) -> Option<f64> {
        let fx = self.j * other.sin() + self.hx;
        let fz = self.hz;
        (fx.hypot(fz) > 0.0).then(|| fx.atan2(fz))
    }

    fn point(&self, ta: f64, tb: f64) -> ExpectationPoint {
        let (sa, ca) = ta.sin_cos();
        let (sb, cb) = tb.sin_cos();
        ExpectationPoint::new(sa * sb, 0.5 * (ca + cb), 0.5 * (sa + sb))
    }
}

fn norm2(g: [f64; 2]) -> f64 {
    g[0].hypot(g[1])
}

/// Local minimization from one start: self-consistent sweeps, then Newton
/// steps with a backtracking line search.
fn descend(f: &Functional, mut ta: f64, mut tb: f64) -> (f64, f64, bool) {
    for _ in 0..MAX_SWEEPS {
        if let Some(t) = f.best_response(tb) {
            ta = t;
        }
        if let Some(t) = f.best_response(ta) {
            tb = t;
        }
        if norm2(f.gradient(ta, tb)) < GRAD_TOL {
            return (ta, tb, true);
        }
    }
    for _ in 0..MAX_NEWTON {
        let g = f.gradient(ta, tb);
        if norm2(g) < GRAD_TOL {
            return (ta, tb, true);
        }
        let h = f.hessian(ta, tb);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let mut step = if h[0][0] > 0.0 && det > 0.0 {
            [-(h[1][1] * g[0] - h[0][1] * g[1]) / det, -(h[0][0] * g[1] - h[1][0] * g[0]) / det]
        } else {
            [-g[0], -g[1]]
        };
        let e0 = f.energy(ta, tb);
        let slope = g[0] * step[0] + g[1] * step[1];
        let mut accepted = false;
        for _ in 0..60 {
            let (na, nb) = (ta + step[0], tb + step[1]);
            if f.energy(na, nb) <= e0 + 1e-4 * slope {
                ta = na;
                tb = nb;
                accepted = true;
                break;
            }
            step = [0.5 * step[0], 0.5 * step[1]];
        }
        if !accepted {
            break;
        }
    }
    let ok = norm2(f.gradient(ta, tb)) < GRAD_TOL;
    (ta, tb, ok)
}

/// Extreme point of the separable two-site set for the functional
/// `e(a, b) = -J a_x b_x - B_z (a_z + b_z)/2 - B_x (a_x + b_x)/2`.
///
/// Runs `restarts` quasi-random starts and keeps the best. At `B_x = 0` an
/// ordered optimum and its mirror image are both optimal; the result then has
/// `degeneracy = 2` and reports their mixture (`⟨X⟩ = 0`).
pub fn mean_field_extreme(params: SpinParams, restarts: usize, rng: SeededRng) -> Result<MeanFieldResult> {
    params.validate()?;
    if restarts < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 restarts, got {restarts}")));
    }
    let f = Functional::new(&params);
    let mut r = rng.rng();
    let offset: [f64; 2] = [r.random(), r.random()];
    // additive recurrence with the plastic-number constants
    const ALPHA: [f64; 2] = [0.754_877_666_246_692_7, 0.569_840_290_998_053_3];
    let tau = std::f64::consts::TAU;

    let mut best: Option<(f64, f64, f64, bool)> = None;
    for i in 0..restarts {
        let u = ((offset[0] + ALPHA[0] * i as f64).fract(), (offset[1] + ALPHA[1] * i as f64).fract());
        let (ta, tb, ok) = descend(&f, tau * u.0 - std::f64::consts::PI, tau * u.1 - std::f64::consts::PI);
        let e = f.energy(ta, tb);
        let better = match best {
            None => true,
            Some((be, _, _, bok)) => e < be - 1e-14 || (ok && !bok && e <= be + 1e-14),
        };
        if better {
            best = Some((e, ta, tb, ok));
        }
    }
    let (energy, ta, tb, ok) = best.expect("restarts >= 8");
    let mut point = f.point(ta, tb);
    if !ok {
        return Err(Error::OptimizerNoConvergence {
            iterations: MAX_SWEEPS + MAX_NEWTON,
            best_energy: energy,
            best_point: point,
        });
    }

    let a = BlochVector::from_polar(ta);
    let b = BlochVector::from_polar(tb);
    let mut degeneracy = 1;
    if params.bx == 0.0 && (a.x.abs() > 1e-8 || b.x.abs() > 1e-8) {
        // mirror (a_x, b_x) -> (-a_x, -b_x) has the same energy
        debug_assert!((f.energy(-ta, -tb) - energy).abs() < DEGENERACY_TOL);
        degeneracy = 2;
        point.c = 0.0;
    }

    Ok(MeanFieldResult {
        ground: GroundStateResult { energy_per_site: energy, point, gap: None, degeneracy },
        a,
        b,
    })
}
