//! Prebuilt Lindblad generators for the recurring physical settings used by
//! tests, benchmarks and example configurations.
//!
//! All models are written directly in the frame of the control Hamiltonian
//! with real control amplitudes; there is no carrier/envelope separation —
//! the shaped quantities are the controls themselves.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::cmatrix::{pauli, CMatrix};
use crate::quantum::{Channel, LindbladGenerator, OperatorMatrix};
use crate::{invalid_param, Result};

/// Named model with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// H0 = (omega/2) sz, control sx, decay channel (|0><1|, gamma).
    TwoLevelDamping { omega: f64, gamma: f64 },
    /// H0 = (omega/2) sz, control sx, dephasing channel (sz, gamma_phi).
    TwoLevelDephasing { omega: f64, gamma_phi: f64 },
    /// Three levels; controls couple 0<->2 and 1<->2; decay from the upper
    /// level into both ground states.
    LambdaDecay {
        omega1: f64,
        omega2: f64,
        gamma0: f64,
        gamma1: f64,
    },
    /// n >= 3 levels with anharmonicity; nearest-neighbor ladder control;
    /// per-level decay (|k-1><k|, k gamma), or flat gamma per level when
    /// `flat_decay` is set.
    AnharmonicLadder {
        levels: usize,
        omega: f64,
        anharmonicity: f64,
        gamma: f64,
        flat_decay: bool,
    },
    /// H0 = J sz x sz + local splittings; controls sx on each qubit; local
    /// dephasing on both qubits at the same rate.
    TwoQubitDephasing {
        coupling: f64,
        omega1: f64,
        omega2: f64,
        gamma_phi: f64,
    },
}

fn hermitian(m: CMatrix) -> OperatorMatrix {
    OperatorMatrix::hermitian(m).expect("model operators are Hermitian by construction")
}

fn check_rate(name: &str, rate: f64) -> Result<()> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(invalid_param!("{name} must be >= 0, got {rate}"));
    }
    Ok(())
}

/// Channels with zero rate are dropped: they contribute nothing to the
/// dynamics and a zero-rate model should compare equal to the closed one.
fn push_channel(channels: &mut Vec<Channel>, operator: OperatorMatrix, rate: f64) {
    if rate > 0.0 {
        channels.push(Channel { operator, rate });
    }
}

/// Instantiate the generator for a model.
pub fn build_model(spec: &ModelSpec) -> Result<LindbladGenerator> {
    match spec {
        ModelSpec::TwoLevelDamping { omega, gamma } => {
            check_rate("gamma", *gamma)?;
            let drift = hermitian(pauli::sigma_z().scale(Complex64::new(0.5 * omega, 0.0)));
            let mut channels = vec![];
            push_channel(
                &mut channels,
                OperatorMatrix::general(CMatrix::unit(2, 0, 1)),
                *gamma,
            );
            LindbladGenerator::new(drift, vec![hermitian(pauli::sigma_x())], channels)
        }
        ModelSpec::TwoLevelDephasing { omega, gamma_phi } => {
            check_rate("gamma_phi", *gamma_phi)?;
            let drift = hermitian(pauli::sigma_z().scale(Complex64::new(0.5 * omega, 0.0)));
            let mut channels = vec![];
            push_channel(&mut channels, hermitian(pauli::sigma_z()), *gamma_phi);
            LindbladGenerator::new(drift, vec![hermitian(pauli::sigma_x())], channels)
        }
        ModelSpec::LambdaDecay {
            omega1,
            omega2,
            gamma0,
            gamma1,
        } => {
            check_rate("gamma0", *gamma0)?;
            check_rate("gamma1", *gamma1)?;
            let drift = hermitian(CMatrix::diag(&[0.0, *omega1, *omega2]));
            let mut pump = CMatrix::zeros(3);
            pump[(0, 2)] = Complex64::ONE;
            pump[(2, 0)] = Complex64::ONE;
            let mut stokes = CMatrix::zeros(3);
            stokes[(1, 2)] = Complex64::ONE;
            stokes[(2, 1)] = Complex64::ONE;
            let mut channels = vec![];
            push_channel(
                &mut channels,
                OperatorMatrix::general(CMatrix::unit(3, 0, 2)),
                *gamma0,
            );
            push_channel(
                &mut channels,
                OperatorMatrix::general(CMatrix::unit(3, 1, 2)),
                *gamma1,
            );
            LindbladGenerator::new(drift, vec![hermitian(pump), hermitian(stokes)], channels)
        }
        ModelSpec::AnharmonicLadder {
            levels,
            omega,
            anharmonicity,
            gamma,
            flat_decay,
        } => {
            if *levels < 3 {
                return Err(invalid_param!(
                    "anharmonic ladder needs at least 3 levels, got {levels}"
                ));
            }
            check_rate("gamma", *gamma)?;
            let n = *levels;
            let energies: Vec<f64> = (0..n)
                .map(|k| {
                    let k = k as f64;
                    omega * k + 0.5 * anharmonicity * k * (k - 1.0)
                })
                .collect();
            let drift = hermitian(CMatrix::diag(&energies));
            let mut ladder = CMatrix::zeros(n);
            for k in 0..n - 1 {
                let g = crate::math::sqrt((k + 1) as f64);
                ladder[(k, k + 1)] = Complex64::new(g, 0.0);
                ladder[(k + 1, k)] = Complex64::new(g, 0.0);
            }
            let mut channels = vec![];
            for k in 1..n {
                let rate = if *flat_decay {
                    *gamma
                } else {
                    k as f64 * gamma
                };
                push_channel(
                    &mut channels,
                    OperatorMatrix::general(CMatrix::unit(n, k - 1, k)),
                    rate,
                );
            }
            LindbladGenerator::new(drift, vec![hermitian(ladder)], channels)
        }
        ModelSpec::TwoQubitDephasing {
            coupling,
            omega1,
            omega2,
            gamma_phi,
        } => {
            check_rate("gamma_phi", *gamma_phi)?;
            let ident = CMatrix::identity(2);
            let sz = pauli::sigma_z();
            let sx = pauli::sigma_x();
            let z1 = sz.kron(&ident);
            let z2 = ident.kron(&sz);
            let mut h0 = sz.kron(&sz).scale(Complex64::new(*coupling, 0.0));
            h0.axpy(Complex64::new(0.5 * omega1, 0.0), &z1);
            h0.axpy(Complex64::new(0.5 * omega2, 0.0), &z2);
            let mut channels = vec![];
            push_channel(&mut channels, hermitian(z1), *gamma_phi);
            push_channel(&mut channels, hermitian(z2), *gamma_phi);
            LindbladGenerator::new(
                hermitian(h0),
                vec![hermitian(sx.kron(&ident)), hermitian(ident.kron(&sx))],
                channels,
            )
        }
    }
}

/// Indices of the computational subspace used by gate functionals.
pub fn logical_subspace(spec: &ModelSpec) -> Vec<usize> {
    match spec {
        ModelSpec::TwoLevelDamping { .. } | ModelSpec::TwoLevelDephasing { .. } => vec![0, 1],
        ModelSpec::LambdaDecay { .. } => vec![0, 1],
        ModelSpec::AnharmonicLadder { .. } => vec![0, 1],
        ModelSpec::TwoQubitDephasing { .. } => vec![0, 1, 2, 3],
    }
}
