//! Support points: the state maximizing `n·p` over a model's set, obtained
//! from the ground or Gibbs state of the Hamiltonian whose couplings are the
//! components of `n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bose::bose_state;
use crate::classical::{gibbs_observables, ClassicalParams, CylinderSpec};
use crate::error::{Error, Result};
use crate::spin::{chain_ground, chain_ground_with_probe, mean_field_extreme, two_spin_ground, Branch, ChainSpec};
use crate::types::{Direction3, ExpectationPoint, SeededRng, SpinParams};

/// Model evaluator used by [`support_point`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Backend {
    Spin0d,
    Spin1d { chain: ChainSpec },
    #[serde(rename = "spinMF")]
    SpinMf { restarts: usize, rng: SeededRng },
    Classical2d { cylinder: CylinderSpec },
    Bose3d,
}

impl Backend {
    /// The backend for the `index`-th item of a sweep; only the mean-field
    /// optimizer draws random numbers and gets its own stream.
    pub fn for_item(self, index: usize) -> Self {
        match self {
            Backend::SpinMf { restarts, rng } => Backend::SpinMf { restarts, rng: rng.substream(index as u64) },
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportResult {
    pub point: ExpectationPoint,
    /// Number of degenerate optimal states found; above one the supporting
    /// plane touches the set in more than a point.
    pub degeneracy: usize,
}

impl SupportResult {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy > 1
    }
}

/// Support point with its degeneracy.
///
/// Spin directions are `(J, B_z, B_x)`. The classical set needs `n_S > 0`
/// and is evaluated at `T = 1`, `J = n_zz / (2 n_S)`, `h = n_z / n_S`; the
/// Bose set needs `n_S > 0` and `n_E < 0`, giving `T = -n_S / n_E` and
/// `v = -n_ψ / (2 n_E)`.
pub fn support_detail(direction: &Direction3, backend: &Backend) -> Result<SupportResult> {
    let [n0, n1, n2] = direction.components();
    match *backend {
        Backend::Spin0d => {
            // one bond per two sites: halve the fields so the pair energy is
            // twice the per-site functional
            let g = two_spin_ground(SpinParams::new(n0, 0.5 * n1, 0.5 * n2))?;
            Ok(SupportResult { point: g.point, degeneracy: g.degeneracy })
        }
        Backend::Spin1d { chain } => {
            let g = chain_ground(chain, SpinParams::from_direction(direction))?;
            Ok(SupportResult { point: g.point, degeneracy: g.degeneracy })
        }
        Backend::SpinMf { restarts, rng } => {
            let r = mean_field_extreme(SpinParams::from_direction(direction), restarts, rng)?;
            Ok(SupportResult { point: r.ground.point, degeneracy: r.ground.degeneracy })
        }
        Backend::Classical2d { cylinder } => {
            if !(n1 > 0.0) {
                return Err(Error::UnsupportedDirection(format!(
                    "classical support points need a positive entropy component, got {n1}"
                )));
            }
            let params = ClassicalParams::new(n0 / (2.0 * n1), n2 / n1, 1.0);
            let g = gibbs_observables(cylinder, params)?;
            Ok(SupportResult { point: g.point(), degeneracy: 1 })
        }
        Backend::Bose3d => {
            if !(n1 > 0.0 && n0 < 0.0) {
                return Err(Error::UnsupportedDirection(format!(
                    "Bose support points need n_S > 0 and n_E < 0, got ({n0}, {n1}, {n2})"
                )));
            }
            let t = -n1 / n0;
            let v = -n2 / (2.0 * n0);
            let s = bose_state(v, t)?;
            // at v = 0 below T_c the plane touches both condensate branches
            let degeneracy = if v == 0.0 && s.psi > 0.0 { 2 } else { 1 };
            Ok(SupportResult { point: s.point(), degeneracy })
        }
    }
}

/// The extreme point of `backend`'s set along `direction`.
pub fn support_point(direction: &Direction3, backend: &Backend) -> Result<ExpectationPoint> {
    Ok(support_detail(direction, backend)?.point)
}

#[derive(Debug)]
pub struct SweepEntry {
    pub direction: Direction3,
    pub result: Result<SupportResult>,
}

/// Support points for every direction, evaluated in parallel and returned
/// in input order. Failures are kept per entry.
pub fn surface_sweep(backend: &Backend, directions: &[Direction3]) -> Vec<SweepEntry> {
    directions
        .par_iter()
        .enumerate()
        .map(|(i, d)| SweepEntry { direction: *d, result: support_detail(d, &backend.for_item(i)) })
        .collect()
}

/// Symmetry-broken ground states `B_x = ±eps` of the chain at coupling `j`
/// for each transverse field, as `(XX, Z, X, Y)` with `Y = 0`.
pub fn spin_branch_points(chain: ChainSpec, j: f64, bz: &[f64], eps: f64) -> Result<Vec<[f64; 4]>> {
    let mut out = Vec::with_capacity(2 * bz.len());
    for &b in bz {
        for branch in [Branch::Plus, Branch::Minus] {
            let g = chain_ground_with_probe(chain, SpinParams::new(j, b, 0.0), branch, eps)?;
            out.push([g.point.a, g.point.b, g.point.c, 0.0]);
        }
    }
    Ok(out)
}
