//! Thermal velocity classes along the probe axis.

use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked into the build
use num_traits::Float;

use crate::error::{Error, Result};
use crate::liouville::Trajectory;
use crate::model::{LaserField, VaporParams};

/// Quadrature nodes (m/s) and normalized weights of the 1-D Maxwell–Boltzmann
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl VelocityGrid {
    /// Single class at rest with unit weight.
    pub fn at_rest() -> Self {
        Self { nodes: alloc::vec![0.0], weights: alloc::vec![1.0] }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Number of nodes and half-width (in most-probable speeds) of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSettings {
    pub n_points: usize,
    pub span: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self { n_points: 201, span: 4.0 }
    }
}

/// Uniform nodes over ±`span`·v_p with weights ∝ exp(−v²/v_p²).
pub fn velocity_grid(vapor: &VaporParams, n_points: usize, span: f64) -> Result<VelocityGrid> {
    vapor.validate()?;
    if n_points < 3 || n_points.is_multiple_of(2) {
        return Err(Error::domain("velocity grid needs an odd number of points, at least 3"));
    }
    if !(span > 0.0 && span.is_finite()) {
        return Err(Error::domain("velocity span must be positive"));
    }
    let vp = vapor.most_probable_speed();
    let half = (n_points / 2) as i64;
    let step = span * vp / half as f64;
    // k·step with symmetric integer k keeps ±v exact mirror images
    let nodes: Vec<f64> = (-half..=half).map(|k| k as f64 * step).collect();
    let raw: Vec<f64> = nodes.iter().map(|v| (-(v * v) / (vp * vp)).exp()).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    Ok(VelocityGrid { nodes, weights })
}

/// Detunings seen by an atom moving with velocity `v` along the probe axis:
/// Δ_eff = Δ_lab − k·v·cos θ.
pub fn shifted_detunings(v: f64, probe: &LaserField, coupling: &LaserField) -> (f64, f64) {
    let shift = |f: &LaserField| f.detuning - f.wavenumber() * v * f.propagation_angle.cos();
    (shift(probe), shift(coupling))
}

/// Weighted sum `Σ w_i x_i(t)` of per-class trajectories, accumulated in
/// class order.
pub fn ensemble_average(trajectories: &[Trajectory], grid: &VelocityGrid) -> Result<Trajectory> {
    if trajectories.len() != grid.len() || trajectories.is_empty() {
        return Err(Error::Shape(alloc::format!(
            "{} trajectories for {} velocity classes",
            trajectories.len(),
            grid.len()
        )));
    }
    let times = &trajectories[0].times;
    if trajectories.iter().any(|t| t.times != *times) {
        return Err(Error::Shape("trajectories are sampled on different time grids".into()));
    }
    let n = times.len();
    let mut avg = Trajectory {
        times: times.clone(),
        im_rho21: alloc::vec![0.0; n],
        rho11: alloc::vec![0.0; n],
        rho22: alloc::vec![0.0; n],
        rho33: alloc::vec![0.0; n],
        ..Trajectory::default()
    };
    let mut report = None;
    for (traj, &w) in trajectories.iter().zip(&grid.weights) {
        accumulate(&mut avg.im_rho21, &traj.im_rho21, w);
        accumulate(&mut avg.rho11, &traj.rho11, w);
        accumulate(&mut avg.rho22, &traj.rho22, w);
        accumulate(&mut avg.rho33, &traj.rho33, w);
        avg.stats.add(&traj.stats);
        if let Some(r) = traj.invariants {
            report = Some(report.map_or(r, |acc: crate::model::InvariantReport| acc.merge(&r)));
        }
    }
    avg.invariants = report;
    Ok(avg)
}

fn accumulate(acc: &mut [f64], x: &[f64], w: f64) {
    for (a, v) in acc.iter_mut().zip(x) {
        *a += w * v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TAU;

    fn traj(values: [f64; 3], times: [f64; 3]) -> Trajectory {
        Trajectory {
            times: times.to_vec(),
            im_rho21: values.iter().map(|v| -v).collect(),
            rho11: values.iter().map(|v| 1.0 - v).collect(),
            rho22: values.to_vec(),
            rho33: values.iter().map(|v| 0.5 * v).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn weights_are_normalized_and_mirror_symmetric() {
        let g = velocity_grid(&VaporParams::rb85_default(), 201, 4.0).unwrap();
        assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for k in 0..g.len() {
            let m = g.len() - 1 - k;
            assert_eq!(g.nodes[k], -g.nodes[m]);
            assert_eq!(g.weights[k], g.weights[m]);
        }
        assert_eq!(g.nodes[100], 0.0);
        let vp = VaporParams::rb85_default().most_probable_speed();
        assert!((g.nodes[200] - 4.0 * vp).abs() < 1e-9);
    }

    #[test]
    fn weights_follow_maxwell_boltzmann_ratio() {
        let vapor = VaporParams::rb85_default();
        let vp = vapor.most_probable_speed();
        let g = velocity_grid(&vapor, 21, 3.0).unwrap();
        let w0 = g.weights[10];
        for (v, w) in g.nodes.iter().zip(&g.weights) {
            assert!((w / w0 - (-(v * v) / (vp * vp)).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_rejects_bad_input() {
        let vapor = VaporParams::rb85_default();
        assert!(velocity_grid(&vapor, 4, 4.0).is_err());
        assert!(velocity_grid(&vapor, 1, 4.0).is_err());
        assert!(velocity_grid(&vapor, 5, 0.0).is_err());
        let mut cold = vapor.clone();
        cold.temperature = -1.0;
        assert!(matches!(velocity_grid(&cold, 5, 4.0), Err(Error::Domain(_))));
    }

    #[test]
    fn atoms_at_rest_see_lab_detunings() {
        let probe = LaserField { detuning: 3.0, ..LaserField::probe_default() };
        let coupling = LaserField { detuning: -7.0, ..LaserField::coupling_default() };
        assert_eq!(shifted_detunings(0.0, &probe, &coupling), (3.0, -7.0));
    }

    #[test]
    fn doppler_shifts_at_100_m_per_s() {
        let (dp, dc) = shifted_detunings(100.0, &LaserField::probe_default(), &LaserField::coupling_default());
        assert!((dp / TAU / 1e6 + 128.205128).abs() < 1e-5, "{}", dp / TAU);
        assert!((dc / TAU / 1e6 - 206.044972).abs() < 1e-5, "{}", dc / TAU);
    }

    #[test]
    fn identical_classes_average_to_themselves() {
        let g = velocity_grid(&VaporParams::rb85_default(), 5, 2.0).unwrap();
        let one = traj([0.1, 0.4, 0.2], [0.0, 1.0, 2.0]);
        let all = alloc::vec![one.clone(); 5];
        let avg = ensemble_average(&all, &g).unwrap();
        for (a, b) in avg.rho22.iter().zip(&one.rho22) {
            assert!((a - b).abs() < 1e-15);
        }
        let single = ensemble_average(&[one.clone()], &VelocityGrid::at_rest()).unwrap();
        assert_eq!(single.rho22, one.rho22);
        assert_eq!(single.im_rho21, one.im_rho21);
    }

    #[test]
    fn two_class_convex_combination() {
        let grid = VelocityGrid { nodes: alloc::vec![-1.0, 1.0], weights: alloc::vec![0.25, 0.75] };
        let a = traj([0.0, 0.2, 0.8], [0.0, 1.0, 2.0]);
        let b = traj([1.0, 0.6, 0.4], [0.0, 1.0, 2.0]);
        let avg = ensemble_average(&[a, b], &grid).unwrap();
        let close = |a: &[f64], b: [f64; 3]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(&avg.rho22, [0.75, 0.5, 0.5]));
        assert!(close(&avg.rho33, [0.375, 0.25, 0.25]));
        assert!(close(&avg.im_rho21, [-0.75, -0.5, -0.5]));
    }

    #[test]
    fn mismatched_time_grids_are_rejected() {
        let grid = VelocityGrid { nodes: alloc::vec![-1.0, 1.0], weights: alloc::vec![0.5, 0.5] };
        let a = traj([0.0; 3], [0.0, 1.0, 2.0]);
        let b = traj([0.0; 3], [0.0, 1.0, 2.5]);
        assert!(matches!(ensemble_average(&[a.clone(), b], &grid), Err(Error::Shape(_))));
        assert!(matches!(ensemble_average(&[a], &grid), Err(Error::Shape(_))));
    }
}
