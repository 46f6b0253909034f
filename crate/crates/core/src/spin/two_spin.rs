use nalgebra::{Matrix2, Matrix4, SymmetricEigen};

use super::{GroundStateResult, DEGENERACY_TOL};
use crate::error::Result;
use crate::types::{ExpectationPoint, SpinParams};

fn kron(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Matrix4<f64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Exact ground state of
/// `H = -J X⊗X - B_z (Z⊗I + I⊗Z) - B_x (X⊗I + I⊗X)`.
///
/// A degenerate ground space is reported through its equal mixture, so at
/// `B_x = 0` the symmetric point (`⟨X⟩ = 0`) comes out. Use a small `B_x` to
/// select a branch.
pub fn two_spin_ground(params: SpinParams) -> Result<GroundStateResult> {
    params.validate()?;
    let id = Matrix2::identity();
    let x = Matrix2::new(0.0, 1.0, 1.0, 0.0);
    let z = Matrix2::new(1.0, 0.0, 0.0, -1.0);

    let xx = kron(&x, &x);
    let z_sum = kron(&z, &id) + kron(&id, &z);
    let x_sum = kron(&x, &id) + kron(&id, &x);
    let h = -params.j * xx - params.bz * z_sum - params.bx * x_sum;

    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &k| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[k]));
    let e0 = eig.eigenvalues[order[0]];
    let ground: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| eig.eigenvalues[i] - e0 < DEGENERACY_TOL)
        .collect();
    let gap = eig.eigenvalues[order[1]] - e0;

    let weight = 1.0 / ground.len() as f64;
    let mut point = ExpectationPoint::default();
    for &i in &ground {
        let v = eig.eigenvectors.column(i);
        point.a += weight * (v.transpose() * xx * v)[0];
        point.b += weight * 0.5 * (v.transpose() * z_sum * v)[0];
        point.c += weight * 0.5 * (v.transpose() * x_sum * v)[0];
    }

    Ok(GroundStateResult {
        energy_per_site: e0 / 2.0,
        point,
        gap: Some(gap.max(0.0)),
        degeneracy: ground.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(p: ExpectationPoint, q: [f64; 3], tol: f64) -> bool {
        (p.a - q[0]).abs() < tol && (p.b - q[1]).abs() < tol && (p.c - q[2]).abs() < tol
    }

    #[test]
    fn field_aligned_product_state() {
        let r = two_spin_ground(SpinParams::new(0.0, 1.0, 0.0)).unwrap();
        assert!(close(r.point, [0.0, 1.0, 0.0], 1e-12));
        assert_eq!(r.degeneracy, 1);
    }

    #[test]
    fn x_polarized_with_positive_probe() {
        let r = two_spin_ground(SpinParams::new(1.0, 0.0, 1e-9)).unwrap();
        assert!(close(r.point, [1.0, 0.0, 1.0], 1e-9));
    }

    #[test]
    fn degenerate_ground_space_reports_symmetric_point() {
        let r = two_spin_ground(SpinParams::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(r.degeneracy, 2);
        assert!(close(r.point, [1.0, 0.0, 0.0], 1e-12));
    }

    // In the even-parity block {|00>, |11>} the Hamiltonian is
    // -(2 B_z σz + J σx), so ⟨Z⟩ = 2B_z/r and ⟨XX⟩ = J/r with r = sqrt(4B_z² + J²).
    #[test]
    fn coupled_case_matches_closed_form() {
        let r = two_spin_ground(SpinParams::new(1.0, 1.0, 0.0)).unwrap();
        let root = 5f64.sqrt();
        assert!(close(r.point, [1.0 / root, 2.0 / root, 0.0], 1e-12), "{:?}", r.point);
        assert!((r.energy_per_site + root / 2.0).abs() < 1e-12);
        assert!((r.gap.unwrap() - (root - 1.0)).abs() < 1e-12);
    }
}
