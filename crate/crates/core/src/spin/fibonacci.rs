//! The classical point `J = -1, B_x = 2, B_z = 0`.
//!
//! In the `X` basis `H_TP = Σ x_j x_{j+1} - 2 Σ x_j` is diagonal. Its ground
//! configurations are those without two neighbouring down spins (and, on an
//! open chain, with both end spins up), so their number grows like the
//! Fibonacci sequence. A weak perturbation `α Σ X_j + β Σ Z_j` projected onto
//! this subspace selects points on the edge of the flat top face of the set.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Boundary, ChainSpec, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::lanczos::{self, LanczosOptions};
use crate::types::ExpectationPoint;

const MAX_FIBONACCI_SITES: usize = 24;
const MAX_TOP_PLANE_SITES: usize = 20;
const DENSE_LIMIT: usize = 512;

fn spin(cfg: usize, i: usize) -> i64 {
    if cfg >> i & 1 == 1 {
        -1
    } else {
        1
    }
}

/// `H_TP` of a configuration in the `X` basis (bit set = `x_j = -1`), times one.
fn top_plane_energy(cfg: usize, bonds: &[(usize, usize)], sites: usize) -> i64 {
    let bond: i64 = bonds.iter().map(|&(i, j)| spin(cfg, i) * spin(cfg, j)).sum();
    let field: i64 = (0..sites).map(|i| spin(cfg, i)).sum();
    bond - 2 * field
}

/// `F_k` with `F_1 = F_2 = 1`.
pub fn fibonacci_number(k: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..k {
        (a, b) = (b, a + b);
    }
    a
}

/// Number of minimal-energy configurations of `H_TP`, counted with a
/// (min, +) transfer matrix along the chain.
///
/// Open chains give `F_N` (`F_1 = F_2 = 1`), periodic chains the Lucas
/// numbers `L_N = F_{N-1} + F_{N+1}`.
pub fn fibonacci_degeneracy(spec: ChainSpec) -> Result<u64> {
    let n = spec.sites;
    if n > MAX_FIBONACCI_SITES {
        return Err(Error::InvalidArgument(format!("at most {MAX_FIBONACCI_SITES} sites, got {n}")));
    }
    let values = [1i64, -1];
    // (energy, count) with lowest energy kept
    let merge = |acc: &mut (i64, u64), e: i64, c: u64| {
        if e < acc.0 {
            *acc = (e, c);
        } else if e == acc.0 {
            acc.1 += c;
        }
    };
    // a periodic ring of two sites carries its bond twice, matching `bonds()`
    let periodic = spec.boundary == Boundary::Periodic;
    let mut total = (i64::MAX, 0u64);
    let first_choices: Vec<Option<usize>> = if periodic { vec![Some(0), Some(1)] } else { vec![None] };
    for first in first_choices {
        // state[k]: best (energy, count) for partial chains ending in values[k]
        let mut state: [(i64, u64); 2] = [(i64::MAX, 0); 2];
        for (k, &v) in values.iter().enumerate() {
            if first.is_none_or(|f| f == k) {
                state[k] = (-2 * v, 1);
            }
        }
        for _ in 1..n {
            let mut next = [(i64::MAX, 0u64); 2];
            for (k, &v) in values.iter().enumerate() {
                for (p, &u) in values.iter().enumerate() {
                    if state[p].1 == 0 {
                        continue;
                    }
                    merge(&mut next[k], state[p].0 + u * v - 2 * v, state[p].1);
                }
            }
            state = next;
        }
        for (k, &v) in values.iter().enumerate() {
            if state[k].1 == 0 {
                continue;
            }
            let closing = first.map_or(0, |f| values[f] * v);
            merge(&mut total, state[k].0 + closing, state[k].1);
        }
    }
    Ok(total.1)
}

/// Ground configurations of `H_TP`, in increasing order.
fn ground_subspace(spec: &ChainSpec) -> Vec<usize> {
    let bonds = spec.bonds();
    let n = spec.sites;
    let mut min = i64::MAX;
    let mut configs = Vec::new();
    for cfg in 0..1usize << n {
        let e = top_plane_energy(cfg, &bonds, n);
        if e < min {
            min = e;
            configs.clear();
        }
        if e == min {
            configs.push(cfg);
        }
    }
    configs
}

/// Point on the edge of the top face selected by the perturbation
/// `α Σ X_j + β Σ Z_j`, projected onto the ground subspace of `H_TP`.
///
/// The result depends only on the direction of `(α, β)`. Degenerate
/// projected ground spaces are reported through their equal mixture.
pub fn top_plane_edge(alpha: f64, beta: f64, spec: ChainSpec) -> Result<ExpectationPoint> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha * alpha + beta * beta == 0.0 {
        return Err(Error::InvalidArgument(format!("need a non-zero perturbation, got ({alpha}, {beta})")));
    }
    if spec.sites > MAX_TOP_PLANE_SITES {
        return Err(Error::SubspaceOverflow(format!(
            "{} sites exceeds the {MAX_TOP_PLANE_SITES}-site limit",
            spec.sites
        )));
    }
    // scale out the magnitude so the tolerances see a unit-size operator
    let norm = alpha.hypot(beta);
    let (alpha, beta) = (alpha / norm, beta / norm);

    let n = spec.sites;
    let bonds = spec.bonds();
    let configs = ground_subspace(&spec);
    let index: HashMap<usize, usize> = configs.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let dim = configs.len();

    let magnetization: Vec<f64> =
        configs.iter().map(|&c| (0..n).map(|i| spin(c, i) as f64).sum()).collect();
    // single flips that stay inside the subspace
    let neighbours: Vec<Vec<usize>> = configs
        .iter()
        .map(|&c| (0..n).filter_map(|i| index.get(&(c ^ (1 << i))).copied()).collect())
        .collect();

    let apply = |x: &[f64], y: &mut [f64]| {
        for k in 0..dim {
            let mut acc = alpha * magnetization[k] * x[k];
            for &l in &neighbours[k] {
                acc += beta * x[l];
            }
            y[k] = acc;
        }
    };

    let ground: Vec<Vec<f64>> = if dim <= DENSE_LIMIT {
        let mut m = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = alpha * magnetization[k];
            for &l in &neighbours[k] {
                m[(l, k)] = beta;
            }
        }
        let eig = SymmetricEigen::new(m);
        let e0 = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        (0..dim)
            .filter(|&k| eig.eigenvalues[k] - e0 < DEGENERACY_TOL)
            .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect()
    } else {
        let opts = LanczosOptions::default();
        let mut found: Vec<lanczos::EigenPair> = Vec::new();
        loop {
            let deflate: Vec<Vec<f64>> = found.iter().map(|p| p.vector.clone()).collect();
            let p = lanczos::lowest(apply, dim, &deflate, |_: &mut [f64]| {}, &opts)?;
            let degenerate = found.first().is_none_or(|f| p.value - f.value < DEGENERACY_TOL);
            if !degenerate {
                break;
            }
            found.push(p);
            if found.len() >= 8 {
                break;
            }
        }
        found.into_iter().map(|p| p.vector).collect()
    };

    let weight = 1.0 / ground.len() as f64;
    let mut point = ExpectationPoint::default();
    for psi in &ground {
        let (mut xx, mut z, mut x) = (0.0, 0.0, 0.0);
        for (k, &c) in configs.iter().enumerate() {
            let p = psi[k] * psi[k];
            x += p * magnetization[k];
            xx += p * bonds.iter().map(|&(i, j)| (spin(c, i) * spin(c, j)) as f64).sum::<f64>();
            for &l in &neighbours[k] {
                z += psi[k] * psi[l];
            }
        }
        point.a += weight * xx / bonds.len() as f64;
        point.b += weight * z / n as f64;
        point.c += weight * x / n as f64;
    }
    Ok(point)
}
