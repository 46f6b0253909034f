//! Shared domain types: expectation-value points, model tags and their axes,
//! spin parameters, unit directions and seeded random streams.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in a three-observable expectation space.
///
/// Which observable sits on which axis depends on the model, see
/// [`ModelTag::axis_labels`]. Spin observables are per site / per bond.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ExpectationPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ExpectationPoint {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }

    pub fn dot(&self, n: &Direction3) -> f64 {
        let [x, y, z] = n.components();
        self.a * x + self.b * y + self.c * z
    }

    pub fn distance(&self, other: &Self) -> f64 {
        ((self.a - other.a).powi(2) + (self.b - other.b).powi(2) + (self.c - other.c).powi(2)).sqrt()
    }
}

/// The models whose expectation-value sets can be generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    /// Two spins (all two-qubit states).
    Spin0d,
    /// Infinite translation-invariant chain.
    Spin1d,
    /// Separable two-site states (mean field).
    #[serde(rename = "spinMF")]
    SpinMf,
    /// Classical square-lattice Ising model at finite temperature.
    Classical2d,
    /// Ideal Bose gas in three dimensions.
    Bose3d,
}

impl ModelTag {
    pub const ALL: [ModelTag; 5] = [
        ModelTag::Spin0d,
        ModelTag::Spin1d,
        ModelTag::SpinMf,
        ModelTag::Classical2d,
        ModelTag::Bose3d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Spin0d => "spin0d",
            ModelTag::Spin1d => "spin1d",
            ModelTag::SpinMf => "spinMF",
            ModelTag::Classical2d => "classical2d",
            ModelTag::Bose3d => "bose3d",
        }
    }

    pub fn axis_labels(self) -> [&'static str; 3] {
        match self {
            ModelTag::Spin0d | ModelTag::Spin1d | ModelTag::SpinMf => ["XX", "Z", "X"],
            ModelTag::Classical2d => ["zz", "S", "z"],
            ModelTag::Bose3d => ["Ekin", "S", "psi"],
        }
    }

    pub fn is_spin(self) -> bool {
        matches!(self, ModelTag::Spin0d | ModelTag::Spin1d | ModelTag::SpinMf)
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

/// Axis names for a model given by its textual tag.
pub fn axis_labels(model_tag: &str) -> Result<[&'static str; 3]> {
    Ok(model_tag.parse::<ModelTag>()?.axis_labels())
}

/// Parameters of `H = -J Σ X_i X_{i+1} - B_z Σ Z_i - B_x Σ X_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinParams {
    pub j: f64,
    pub bz: f64,
    pub bx: f64,
}

impl SpinParams {
    pub fn new(j: f64, bz: f64, bx: f64) -> Self {
        Self { j, bz, bx }
    }

    pub fn validate(&self) -> Result<()> {
        if self.j.is_finite() && self.bz.is_finite() && self.bx.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("non-finite spin parameters {self:?}")))
        }
    }

    /// Energy functional per site evaluated at a point `(XX, Z, X)`.
    pub fn energy_of(&self, p: &ExpectationPoint) -> f64 {
        -self.j * p.a - self.bz * p.b - self.bx * p.c
    }

    /// The parameters whose ground state is the support point along `n`.
    pub fn from_direction(n: &Direction3) -> Self {
        let [j, bz, bx] = n.components();
        Self { j, bz, bx }
    }
}

/// A unit vector in expectation space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction3 {
    n: [f64; 3],
}

impl Direction3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "direction ({x}, {y}, {z}) cannot be normalized"
            )));
        }
        Ok(Self { n: [x / norm, y / norm, z / norm] })
    }

    pub fn components(&self) -> [f64; 3] {
        self.n
    }

    /// Roughly uniform directions on the sphere (Fibonacci lattice).
    pub fn sphere_grid(count: usize) -> Vec<Direction3> {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..count)
            .map(|i| {
                let y = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let r = (1.0 - y * y).max(0.0).sqrt();
                let phi = golden * i as f64;
                // components are already unit length up to rounding
                Direction3::new(r * phi.cos(), y, r * phi.sin()).expect("unit vector")
            })
            .collect()
    }
}

/// Seed plus stream id; equal pairs reproduce identical draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededRng {
    pub seed: u64,
    pub stream: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// A child stream; used to give every work item its own generator.
    pub fn substream(&self, index: u64) -> Self {
        let mixed = self
            .stream
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .rotate_left(17)
            ^ index.wrapping_add(0xD1B5_4A32_D192_ED03);
        Self { seed: self.seed, stream: mixed }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn axis_labels_per_model() {
        assert_eq!(axis_labels("spin1d").unwrap(), ["XX", "Z", "X"]);
        assert_eq!(axis_labels("classical2d").unwrap(), ["zz", "S", "z"]);
        assert_eq!(axis_labels("bose3d").unwrap(), ["Ekin", "S", "psi"]);
        assert_eq!(axis_labels("spinMF").unwrap(), ["XX", "Z", "X"]);
        assert!(matches!(axis_labels("spin2d"), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn direction_is_normalized() {
        let d = Direction3::new(3.0, 0.0, 4.0).unwrap();
        let [x, y, z] = d.components();
        assert!((x * x + y * y + z * z - 1.0).abs() < 1e-12);
        assert!(Direction3::new(0.0, 0.0, 0.0).is_err());
        for d in Direction3::sphere_grid(50) {
            let [x, y, z] = d.components();
            assert!((x * x + y * y + z * z - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seeded_streams_reproduce() {
        let a: Vec<u64> = (0..8).map(|_| 0).scan(SeededRng::with_stream(7, 3).rng(), |r, _| Some(r.random())).collect();
        let b: Vec<u64> = (0..8).map(|_| 0).scan(SeededRng::with_stream(7, 3).rng(), |r, _| Some(r.random())).collect();
        let c: Vec<u64> = (0..8).map(|_| 0).scan(SeededRng::with_stream(7, 4).rng(), |r, _| Some(r.random())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
