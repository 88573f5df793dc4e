//! Spectral penalties and frequency-domain filtering of control updates.
//!
//! A filter is a nonnegative kernel spectrum `K(omega)` sampled on the
//! discrete frequency grid conjugate to the control grid, plus a penalty
//! weight `alpha`. The quadratic penalty on an update `du` is the discrete
//! form `sum_k K_k |du_k|^2 domega / 2pi`; enforcing it during optimization
//! amounts to dividing the update by `1 + alpha K` in frequency space — one
//! forward and one inverse transform per sweep.
//!
//! Transform convention (this fixes what a kernel specification means):
//! unitary DFT over the N midpoint samples, frequency bins
//! `omega_k = 2 pi k / T` for `k <= N/2` and `2 pi (k - N) / T` above.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::grid::TimeGrid;
use crate::math;
use crate::{invalid_param, Result};

/// One frequency band of a kernel specification: `value` applies where
/// `omega_min <= |omega| <= omega_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub omega_min: f64,
    pub omega_max: f64,
    pub value: f64,
}

/// Kernel spectrum sampled on the control grid's frequency bins, with its
/// penalty weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFilter {
    kappa: Vec<f64>,
    alpha: f64,
    t_final: f64,
}

impl SpectralFilter {
    /// Sample a band specification on the frequency grid of `grid`. Bands
    /// are applied in order; the last band covering a bin wins. Uncovered
    /// bins get kernel value 0 (no penalty there).
    pub fn from_bands(grid: &TimeGrid, bands: &[Band], alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(invalid_param!("filter weight alpha must be positive"));
        }
        for b in bands {
            if !b.value.is_finite() || b.value < 0.0 {
                return Err(invalid_param!(
                    "kernel values must be nonnegative, got {}",
                    b.value
                ));
            }
            if b.omega_min.is_nan() || b.omega_min < 0.0 || b.omega_max < b.omega_min {
                return Err(invalid_param!(
                    "band [{}, {}] is not a valid nonnegative frequency range",
                    b.omega_min,
                    b.omega_max
                ));
            }
        }
        let n = grid.n_steps();
        let mut kappa = vec![0.0; n];
        for (k, kv) in kappa.iter_mut().enumerate() {
            let omega = bin_frequency(k, n, grid.t_final());
            let abs_omega = omega.abs();
            for b in bands {
                if abs_omega >= b.omega_min && abs_omega <= b.omega_max {
                    *kv = b.value;
                }
            }
        }
        Ok(SpectralFilter {
            kappa,
            alpha,
            t_final: grid.t_final(),
        })
    }

    /// Use explicit kernel samples; they must be nonnegative and symmetric
    /// under `omega -> -omega` (bin k paired with bin N - k).
    pub fn from_samples(grid: &TimeGrid, kappa: Vec<f64>, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(invalid_param!("filter weight alpha must be positive"));
        }
        let n = grid.n_steps();
        if kappa.len() != n {
            return Err(invalid_param!(
                "kernel has {} samples, control grid has {n}",
                kappa.len()
            ));
        }
        for (k, &v) in kappa.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid_param!("kernel value at bin {k} must be >= 0"));
            }
            let mirror = (n - k) % n;
            if (v - kappa[mirror]).abs() > 1e-12 * v.abs().max(1.0) {
                return Err(invalid_param!(
                    "kernel must be symmetric in +-omega (bins {k} and {mirror} differ)"
                ));
            }
        }
        Ok(SpectralFilter {
            kappa,
            alpha,
            t_final: grid.t_final(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kappa
    }

    pub fn n_bins(&self) -> usize {
        self.kappa.len()
    }

    fn check_grid(&self, samples: usize) -> Result<()> {
        if samples != self.kappa.len() {
            return Err(invalid_param!(
                "update has {samples} samples, filter was built for {}",
                self.kappa.len()
            ));
        }
        Ok(())
    }
}

/// Signed frequency of DFT bin `k` out of `n` over duration `t_final`.
pub fn bin_frequency(k: usize, n: usize, t_final: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    if 2 * k <= n {
        two_pi * k as f64 / t_final
    } else {
        two_pi * (k as f64 - n as f64) / t_final
    }
}

/// Unitary DFT (sign -1 forward, +1 inverse) via a precomputed twiddle
/// table; O(N^2) is plenty at the grid sizes in scope.
fn dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let step = sign * 2.0 * core::f64::consts::PI / n as f64;
    let twiddle: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(math::cos(step * k as f64), math::sin(step * k as f64)))
        .collect();
    let scale = 1.0 / math::sqrt(n as f64);
    let mut out = vec![Complex64::ZERO; n];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::ZERO;
        for (j, &xj) in x.iter().enumerate() {
            acc += xj * twiddle[(k * j) % n];
        }
        *o = acc * scale;
    }
    out
}

fn real_spectrum(du: &[f64]) -> Vec<Complex64> {
    let x: Vec<Complex64> = du.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft(&x, false)
}

/// Quadratic penalty `sum_k K_k |du~_k|^2 domega / 2pi` of an update; zero
/// exactly when the update lives where the kernel vanishes.
pub fn spectral_penalty(filter: &SpectralFilter, delta_u: &[f64]) -> Result<f64> {
    filter.check_grid(delta_u.len())?;
    let spec = real_spectrum(delta_u);
    // domega / 2pi = 1 / T
    let weight = 1.0 / filter.t_final;
    Ok(spec
        .iter()
        .zip(&filter.kappa)
        .map(|(z, &k)| k * z.norm_sqr() * weight)
        .sum())
}

/// Frequency-domain solution of the constrained update equation: divide the
/// raw update by `1 + alpha K(omega)` and transform back. Linear and
/// contractive; reduces out-of-band content monotonically in alpha.
pub fn filtered_update(filter: &SpectralFilter, raw_update: &[f64]) -> Result<Vec<f64>> {
    filter.check_grid(raw_update.len())?;
    filtered_update_composite(core::slice::from_ref(filter), raw_update)
}

fn filtered_update_composite(filters: &[SpectralFilter], raw_update: &[f64]) -> Result<Vec<f64>> {
    let n = raw_update.len();
    let mut spec = real_spectrum(raw_update);
    for (k, z) in spec.iter_mut().enumerate() {
        let mut denom = 1.0;
        for f in filters {
            denom += f.alpha * f.kappa[k];
        }
        *z /= denom;
    }
    let back = dft(&spec, true);
    // The kernel is symmetric in +-omega, so the output of a real input is
    // real up to roundoff.
    let mut out = Vec::with_capacity(n);
    for z in back {
        debug_assert!(z.im.abs() < 1e-10 * z.re.abs().max(1.0));
        out.push(z.re);
    }
    Ok(out)
}

/// One or more filters enforced together; the composite denominator is
/// `1 + sum_i alpha_i K_i(omega)`, letting different weights emphasize one
/// constraint over another.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralConstraint {
    filters: Vec<SpectralFilter>,
}

impl SpectralConstraint {
    pub fn new(filters: Vec<SpectralFilter>) -> Result<Self> {
        if filters.is_empty() {
            return Err(invalid_param!(
                "spectral constraint needs at least one filter"
            ));
        }
        let n = filters[0].n_bins();
        if filters.iter().any(|f| f.n_bins() != n) {
            return Err(invalid_param!("all filters must share one control grid"));
        }
        Ok(SpectralConstraint { filters })
    }

    pub fn single(filter: SpectralFilter) -> Self {
        SpectralConstraint {
            filters: vec![filter],
        }
    }

    pub fn filters(&self) -> &[SpectralFilter] {
        &self.filters
    }

    pub fn filter_update(&self, raw_update: &[f64]) -> Result<Vec<f64>> {
        self.filters[0].check_grid(raw_update.len())?;
        filtered_update_composite(&self.filters, raw_update)
    }

    /// Total alpha-weighted penalty of an applied update.
    pub fn weighted_penalty(&self, delta_u: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for f in &self.filters {
            total += f.alpha * spectral_penalty(f, delta_u)?;
        }
        Ok(total)
    }
}

/// Fraction of discrete spectral power of `samples` lying in bins where
/// `predicate(|omega|)` holds; used to measure out-of-band content.
pub fn spectral_power_fraction(
    grid: &TimeGrid,
    samples: &[f64],
    predicate: impl Fn(f64) -> bool,
) -> f64 {
    let spec = real_spectrum(samples);
    let n = samples.len();
    let mut selected = 0.0;
    let mut total = 0.0;
    for (k, z) in spec.iter().enumerate() {
        let p = z.norm_sqr();
        total += p;
        if predicate(bin_frequency(k, n, grid.t_final()).abs()) {
            selected += p;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        selected / total
    }
}
