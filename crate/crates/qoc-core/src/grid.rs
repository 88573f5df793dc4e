//! Shifted time discretizations: states live on the N+1 grid points
//! `t_i = i dt`, controls on the N interval midpoints `t_i + dt/2`. Control
//! sample `i` governs the whole interval `[t_i, t_{i+1}]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{invalid_param, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, n_steps: usize) -> Result<Self> {
        if !t_final.is_finite() || t_final <= 0.0 {
            return Err(invalid_param!("t_final must be positive, got {t_final}"));
        }
        if n_steps == 0 {
            return Err(invalid_param!("n_steps must be at least 1"));
        }
        Ok(TimeGrid { t_final, n_steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    /// i-th state-grid point, i in 0..=n_steps.
    pub fn state_time(&self, i: usize) -> f64 {
        i as f64 * self.dt()
    }

    /// i-th control-grid point (interval midpoint), i in 0..n_steps.
    pub fn control_time(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dt()
    }

    pub fn state_times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|i| self.state_time(i)).collect()
    }

    pub fn control_times(&self) -> Vec<f64> {
        (0..self.n_steps).map(|i| self.control_time(i)).collect()
    }
}

/// Piecewise-constant real control samples on the midpoint grid, one row of
/// N samples per control operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField {
    grid: TimeGrid,
    samples: Vec<Vec<f64>>,
}

impl ControlField {
    pub fn new(grid: TimeGrid, samples: Vec<Vec<f64>>) -> Result<Self> {
        for (j, row) in samples.iter().enumerate() {
            if row.len() != grid.n_steps() {
                return Err(invalid_param!(
                    "control {j} has {} samples, grid has {} steps",
                    row.len(),
                    grid.n_steps()
                ));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(invalid_param!("control {j} contains non-finite samples"));
            }
        }
        Ok(ControlField { grid, samples })
    }

    pub fn zeros(grid: TimeGrid, n_controls: usize) -> Self {
        let n = grid.n_steps();
        ControlField {
            grid,
            samples: vec![vec![0.0; n]; n_controls],
        }
    }

    /// Constant amplitude on every control.
    pub fn constant(grid: TimeGrid, n_controls: usize, amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(invalid_param!("amplitude must be finite"));
        }
        let n = grid.n_steps();
        Ok(ControlField {
            grid,
            samples: vec![vec![amplitude; n]; n_controls],
        })
    }

    /// Build each control by sampling a function of the midpoint time.
    pub fn from_fn(grid: TimeGrid, n_controls: usize, f: impl Fn(usize, f64) -> f64) -> Self {
        let samples = (0..n_controls)
            .map(|j| {
                (0..grid.n_steps())
                    .map(|i| f(j, grid.control_time(i)))
                    .collect()
            })
            .collect();
        ControlField { grid, samples }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_controls(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self, control: usize) -> &[f64] {
        &self.samples[control]
    }

    pub fn samples_mut(&mut self, control: usize) -> &mut [f64] {
        &mut self.samples[control]
    }

    pub fn all_samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// Control vector (one value per control operator) at step index `i`.
    pub fn values_at(&self, i: usize) -> Vec<f64> {
        self.samples.iter().map(|row| row[i]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|row| row.iter())
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_degenerate_inputs() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(-1.0, 10).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::new(f64::NAN, 10).is_err());
    }

    #[test]
    fn grids_are_interleaved() {
        let g = TimeGrid::new(1.0, 4).unwrap();
        assert_eq!(g.dt(), 0.25);
        let st = g.state_times();
        let ct = g.control_times();
        assert_eq!(st.len(), 5);
        assert_eq!(ct.len(), 4);
        for i in 0..4 {
            assert!(st[i] < ct[i] && ct[i] < st[i + 1]);
            assert!((ct[i] - 0.5 * (st[i] + st[i + 1])).abs() < 1e-15);
        }
    }

    #[test]
    fn field_validates_sample_count_and_finiteness() {
        let g = TimeGrid::new(1.0, 4).unwrap();
        assert!(ControlField::new(g.clone(), vec![vec![0.0; 3]]).is_err());
        assert!(ControlField::new(g.clone(), vec![vec![f64::INFINITY; 4]]).is_err());
        assert!(ControlField::new(g, vec![vec![0.1; 4], vec![-0.2; 4]]).is_ok());
    }
}
