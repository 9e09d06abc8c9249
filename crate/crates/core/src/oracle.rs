//! Independent reference propagator.
//!
//! The generator is assembled from Kronecker products in Lindblad form
//! (jump operators √Γ₁₂ |1⟩⟨2| and √Γ₂₃ |2⟩⟨3|) instead of the term-by-term
//! dissipator used by [`crate::liouville`]. Each time slice is advanced by
//! the exact exponential of a constant generator, the fourth-order Magnus
//! approximation built from the superoperator at the two Gauss points.

use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked into the build
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c64, DenseMatrix, Mat3};
use crate::liouville::{build_hamiltonian, Drive, HamiltonianParams};
use crate::model::{DecayRates, DensityMatrix};

fn transpose(m: &Mat3) -> Mat3 {
    Mat3::from_fn(|i, j| m[(j, i)])
}

fn conj(m: &Mat3) -> Mat3 {
    Mat3::from_fn(|i, j| m[(i, j)].conj())
}

/// Superoperator for row-major vec(ρ), using vec(AρB) = (A ⊗ Bᵀ) vec(ρ).
pub fn kronecker_superoperator(p: &HamiltonianParams, g: &DecayRates) -> DenseMatrix {
    let h = build_hamiltonian(p);
    let id = Mat3::identity();
    let unitary = DenseMatrix::kron3(&h, &id)
        .add(&DenseMatrix::kron3(&id, &transpose(&h)).scale(c64(-1.0, 0.0)))
        .scale(c64(0.0, -1.0));
    let mut l = unitary;
    for (rate, lower, upper) in [(g.gamma_12, 0, 1), (g.gamma_23, 1, 2)] {
        if rate == 0.0 {
            continue;
        }
        let c = Mat3::unit(lower, upper).scale_re(rate.sqrt());
        let cdc = c.adjoint() * c;
        let jump = DenseMatrix::kron3(&c, &conj(&c));
        let anti = DenseMatrix::kron3(&cdc, &id).add(&DenseMatrix::kron3(&id, &transpose(&cdc))).scale(c64(-0.5, 0.0));
        l = l.add(&jump).add(&anti);
    }
    l
}

/// Evolves ρ from `t_start` to `t_end` on slices of length at most `slice`,
/// exponentiating `h(L₁ + L₂)/2 + (√3 h²/12)[L₂, L₁]` per slice, where L₁, L₂
/// are the superoperators at the Gauss points of the slice.
pub fn propagate_oracle<D: Drive + ?Sized>(
    rho0: &DensityMatrix,
    t_start: f64,
    t_end: f64,
    drive: &D,
    g: &DecayRates,
    slice: f64,
) -> Result<DensityMatrix> {
    if !(slice > 0.0) {
        return Err(Error::domain("slice must be positive"));
    }
    if !(t_end > t_start) {
        return Err(Error::domain("oracle needs t_end > t_start"));
    }
    let n = ((t_end - t_start) / slice - 1e-9).ceil().max(1.0) as usize;
    let dt = (t_end - t_start) / n as f64;
    let mut v = rho0.matrix().to_vec9().to_vec();
    let offset = 0.5 * dt / 3.0f64.sqrt();
    let commutator_weight = c64(3.0f64.sqrt() * dt * dt / 12.0, 0.0);
    for k in 0..n {
        let mid = t_start + (k as f64 + 0.5) * dt;
        let l1 = kronecker_superoperator(&drive.params_at(mid - offset), g);
        let l2 = kronecker_superoperator(&drive.params_at(mid + offset), g);
        let comm = l2.matmul(&l1).add(&l1.matmul(&l2).scale(c64(-1.0, 0.0)));
        let omega = l1.add(&l2).scale(c64(0.5 * dt, 0.0)).add(&comm.scale(commutator_weight));
        v = omega.expm().matvec(&v);
    }
    Ok(DensityMatrix::from_raw(Mat3::from_vec9(&v)))
}

/// Oracle states at each of `times` (ascending), starting from `rho0` at
/// `times[0]`.
pub fn oracle_states<D: Drive + ?Sized>(
    rho0: &DensityMatrix,
    times: &[f64],
    drive: &D,
    g: &DecayRates,
    slice: f64,
) -> Result<Vec<DensityMatrix>> {
    let mut out = Vec::with_capacity(times.len());
    let mut rho = *rho0;
    if times.is_empty() {
        return Ok(out);
    }
    out.push(rho);
    for w in times.windows(2) {
        rho = propagate_oracle(&rho, w[0], w[1], drive, g, slice)?;
        out.push(rho);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::angular;
    use crate::liouville::superoperator;

    #[test]
    fn kronecker_and_term_by_term_generators_agree() {
        let p = HamiltonianParams { omega_780: 1.1, omega_480: 2.3, delta_780: -0.4, delta_480: 0.8 };
        let g = DecayRates { gamma_12: 0.6, gamma_23: 0.25 };
        let a = kronecker_superoperator(&p, &g);
        let b = superoperator(&p, &g);
        for i in 0..9 {
            for j in 0..9 {
                assert!((a[(i, j)] - b[(i, j)]).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn zero_generator_is_identity() {
        let rho = DensityMatrix::from_pure([c64(0.6, 0.0), c64(0.0, 0.8), c64(0.0, 0.0)]).unwrap();
        let out = propagate_oracle(&rho, 0.0, 1e-9, &HamiltonianParams::default(), &DecayRates::none(), 1e-12).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn constant_two_level_drive_matches_rabi_formula() {
        let w = angular(220e6);
        let p = HamiltonianParams { omega_780: w, ..Default::default() };
        for t in [0.3e-9, 1.7e-9, 4.4e-9] {
            let out = propagate_oracle(&DensityMatrix::ground(), 0.0, t, &p, &DecayRates::none(), 1e-12).unwrap();
            let exact = (0.5 * w * t).sin().powi(2);
            assert!((out.populations()[1] - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_nonpositive_slice() {
        let r = propagate_oracle(
            &DensityMatrix::ground(),
            0.0,
            1.0,
            &HamiltonianParams::default(),
            &DecayRates::none(),
            0.0,
        );
        assert!(r.is_err());
    }
}
