use nalgebra::{DMatrix, SymmetricEigen};

use super::{Branch, ChainSpec, GroundStateResult, DEGENERACY_TOL};
use crate::error::Result;
use crate::lanczos::{self, LanczosOptions};
use crate::types::{ExpectationPoint, SpinParams};

/// Largest Hilbert space dimension diagonalized densely.
const DENSE_LIMIT: usize = 128;
/// Highest number of degenerate ground vectors collected.
const MAX_DEGENERACY: usize = 8;
/// Rough memory budget (in f64 entries) for the Krylov basis.
const KRYLOV_BUDGET: usize = 1 << 25;

/// Transverse-field Ising chain in the `Z` basis. Bit `i` set means `Z_i = -1`.
struct IsingChain {
    sites: usize,
    bond_masks: Vec<usize>,
    params: SpinParams,
    diag: Vec<f64>,
}

impl IsingChain {
    fn new(spec: &ChainSpec, params: SpinParams) -> Self {
        let n = spec.sites;
        let bond_masks = spec.bonds().into_iter().map(|(i, j)| (1 << i) | (1 << j)).collect();
        let diag = (0..1usize << n)
            .map(|s| {
                let down = s.count_ones() as f64;
                -params.bz * (n as f64 - 2.0 * down)
            })
            .collect();
        Self { sites: n, bond_masks, params, diag }
    }

    fn dim(&self) -> usize {
        1 << self.sites
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let j = self.params.j;
        let bx = self.params.bx;
        for s in 0..x.len() {
            let mut acc = self.diag[s] * x[s];
            if j != 0.0 {
                for &m in &self.bond_masks {
                    acc -= j * x[s ^ m];
                }
            }
            if bx != 0.0 {
                for i in 0..self.sites {
                    acc -= bx * x[s ^ (1 << i)];
                }
            }
            y[s] = acc;
        }
    }

    /// Per-site / per-bond expectation values of a real normalized state.
    fn observables(&self, psi: &[f64]) -> ExpectationPoint {
        let n = self.sites as f64;
        let mut z = 0.0;
        let mut x = 0.0;
        let mut xx = 0.0;
        for (s, &amp) in psi.iter().enumerate() {
            if amp == 0.0 {
                continue;
            }
            let down = s.count_ones() as f64;
            z += amp * amp * (n - 2.0 * down);
            for i in 0..self.sites {
                x += amp * psi[s ^ (1 << i)];
            }
            for &m in &self.bond_masks {
                xx += amp * psi[s ^ m];
            }
        }
        ExpectationPoint::new(xx / self.bond_masks.len() as f64, z / n, x / n)
    }

    fn dense_block(&self, indices: &[usize]) -> DMatrix<f64> {
        let mut lookup = vec![usize::MAX; self.dim()];
        for (k, &s) in indices.iter().enumerate() {
            lookup[s] = k;
        }
        let mut m = DMatrix::zeros(indices.len(), indices.len());
        let mut unit = vec![0.0; self.dim()];
        let mut col = vec![0.0; self.dim()];
        for (k, &s) in indices.iter().enumerate() {
            unit[s] = 1.0;
            self.apply(&unit, &mut col);
            unit[s] = 0.0;
            for (t, &v) in col.iter().enumerate() {
                if v != 0.0 && lookup[t] != usize::MAX {
                    m[(lookup[t], k)] = v;
                }
            }
        }
        m
    }
}

/// Lowest eigenpairs (full-space vectors) in one symmetry sector.
fn sector_lowest(
    chain: &IsingChain,
    parity: Option<u32>,
    count: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let dim = chain.dim();
    let in_sector = |s: usize| parity.is_none_or(|p| s.count_ones() % 2 == p);
    let indices: Vec<usize> = (0..dim).filter(|&s| in_sector(s)).collect();

    if indices.len() <= DENSE_LIMIT {
        let eig = SymmetricEigen::new(chain.dense_block(&indices));
        let mut order: Vec<usize> = (0..indices.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let e0 = eig.eigenvalues[order[0]];
        let degenerate = order.iter().filter(|&&k| eig.eigenvalues[k] - e0 < DEGENERACY_TOL).count();
        return Ok(order
            .into_iter()
            .take(count.max(degenerate + 1))
            .map(|k| {
                let mut v = vec![0.0; dim];
                for (r, &s) in indices.iter().enumerate() {
                    v[s] = eig.eigenvectors[(r, k)];
                }
                (eig.eigenvalues[k], v)
            })
            .collect());
    }

    let opts = LanczosOptions {
        krylov_dim: (KRYLOV_BUDGET / dim).clamp(20, 32),
        ..LanczosOptions::default()
    };
    let project = |v: &mut [f64]| {
        if parity.is_some() {
            for (s, x) in v.iter_mut().enumerate() {
                if !in_sector(s) {
                    *x = 0.0;
                }
            }
        }
    };
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::new();
    // keep deflating while the newest vector is still degenerate with the lowest
    while pairs.len() < count.max(1) || pairs.len() < MAX_DEGENERACY {
        let deflate: Vec<Vec<f64>> = pairs.iter().map(|p| p.1.clone()).collect();
        if deflate.len() >= indices.len() {
            break;
        }
        let p = lanczos::lowest(|x, y| chain.apply(x, y), dim, &deflate, project, &opts)?;
        let degenerate_with_first = pairs.first().is_some_and(|f| p.value - f.0 < DEGENERACY_TOL);
        pairs.push((p.value, p.vector));
        if pairs.len() >= count && !degenerate_with_first {
            break;
        }
    }
    Ok(pairs)
}

/// Ground state of `H = -J Σ X_i X_{i+1} - B_z Σ Z_i - B_x Σ X_i` on a finite chain.
///
/// Sectors up to dimension 128 are diagonalized densely, larger ones with
/// restarted Lanczos at residual `1e-10`. At `B_x = 0` the two parity sectors
/// are solved separately, so every returned state has `⟨X⟩ = 0`; degenerate
/// ground spaces are reported through the equal mixture of the ground vectors
/// found.
pub fn chain_ground(spec: ChainSpec, params: SpinParams) -> Result<GroundStateResult> {
    params.validate()?;
    let chain = IsingChain::new(&spec, params);
    let mut pairs = if params.bx == 0.0 {
        let mut all = sector_lowest(&chain, Some(0), 2)?;
        all.extend(sector_lowest(&chain, Some(1), 2)?);
        all
    } else {
        sector_lowest(&chain, None, 2)?
    };
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let e0 = pairs[0].0;
    let ground: Vec<&(f64, Vec<f64>)> = pairs.iter().filter(|p| p.0 - e0 < DEGENERACY_TOL).collect();
    let gap = pairs.get(1).map(|p| (p.0 - e0).max(0.0));

    let weight = 1.0 / ground.len() as f64;
    let mut point = ExpectationPoint::default();
    for (_, v) in &ground {
        let p = chain.observables(v);
        point.a += weight * p.a;
        point.b += weight * p.b;
        point.c += weight * p.c;
    }

    Ok(GroundStateResult {
        energy_per_site: e0 / spec.sites as f64,
        point,
        gap,
        degeneracy: ground.len(),
    })
}

/// [`chain_ground`] with the longitudinal field shifted by `±eps` to pick a
/// symmetry-broken branch (no shift for [`Branch::Symmetric`]).
pub fn chain_ground_with_probe(
    spec: ChainSpec,
    params: SpinParams,
    branch: Branch,
    eps: f64,
) -> Result<GroundStateResult> {
    let shifted = SpinParams { bx: params.bx + branch.sign() * eps, ..params };
    chain_ground(spec, shifted)
}
