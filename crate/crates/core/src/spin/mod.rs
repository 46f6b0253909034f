//! Extreme points of the spin-1/2 expectation sets `(⟨XX⟩, ⟨Z⟩, ⟨X⟩)`.
//!
//! * [`two_spin_ground`]: all states of two spins.
//! * [`chain_ground`]: finite Ising chains, a stand-in for the infinite chain,
//!   backed by the exact [`pfeuty_energy`] / [`pfeuty_point`] solution at zero
//!   longitudinal field.
//! * [`mean_field_extreme`]: separable two-site states.
//! * [`fibonacci_degeneracy`] / [`top_plane_edge`]: the degenerate classical
//!   point `J = -1, B_x = 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::ExpectationPoint;

mod chain;
mod exponent;
mod fibonacci;
mod mean_field;
mod pfeuty;
mod two_spin;

pub use chain::{chain_ground, chain_ground_with_probe};
pub use exponent::critical_exponent_fit;
pub use fibonacci::{fibonacci_degeneracy, fibonacci_number, top_plane_edge};
pub use mean_field::{mean_field_extreme, MeanFieldResult};
pub use pfeuty::{pfeuty_energy, pfeuty_magnetization, pfeuty_point, pfeuty_transverse};
pub use two_spin::two_spin_ground;

/// Eigenvalues closer than this to the minimum count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Default size of the `B_x = ±ε` probe used to select a broken branch.
pub const PROBE_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            "open" | "obc" => Ok(Boundary::Open),
            other => Err(Error::InvalidArgument(format!("unknown boundary `{other}`"))),
        }
    }
}

/// A finite chain of `sites` spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainSpec {
    pub sites: usize,
    pub boundary: Boundary,
}

impl ChainSpec {
    pub const MAX_SITES: usize = 22;

    pub fn new(sites: usize, boundary: Boundary) -> Result<Self> {
        if !(2..=Self::MAX_SITES).contains(&sites) {
            return Err(Error::InvalidArgument(format!(
                "chain length {sites} outside 2..={}",
                Self::MAX_SITES
            )));
        }
        Ok(Self { sites, boundary })
    }

    pub fn periodic(sites: usize) -> Result<Self> {
        Self::new(sites, Boundary::Periodic)
    }

    pub fn open(sites: usize) -> Result<Self> {
        Self::new(sites, Boundary::Open)
    }

    /// Nearest-neighbour bonds. A periodic chain has one bond per site; for
    /// two sites the bond between them is counted twice.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.sites;
        match self.boundary {
            Boundary::Open => (0..n - 1).map(|i| (i, i + 1)).collect(),
            Boundary::Periodic => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        }
    }
}

/// Ground state energy and its expectation point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateResult {
    pub energy_per_site: f64,
    pub point: ExpectationPoint,
    /// `E_1 - E_0`; `None` when the solver has no notion of excited states.
    pub gap: Option<f64>,
    pub degeneracy: usize,
}

/// A single-spin Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn from_polar(theta: f64) -> Self {
        Self { x: theta.sin(), y: 0.0, z: theta.cos() }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Which side of a ruled surface to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
    Symmetric,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
            Branch::Symmetric => 0.0,
        }
    }
}
