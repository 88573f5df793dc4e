//! Time propagation under piecewise-constant controls.
//!
//! The master equation is turned into a linear ODE on Liouville space:
//! states are vectorized row-major (`vec(rho)` is literally the matrix
//! storage), so a superoperator is a d^2 x d^2 complex matrix with
//! `vec(A rho B) = (A kron B^T) vec(rho)`. Each control interval has its own
//! exact step propagator `exp(L dt)`; no ODE integrator tolerance enters
//! anywhere.
//!
//! Co-states propagate backward under the Hilbert-Schmidt adjoint of the
//! generator, which in this representation is simply the conjugate transpose
//! of the forward step matrix. That choice makes the pairing
//! `Tr{sigma^dag(t) rho(t)}` exactly constant along the grid — the contract
//! that turns the backward trajectory into a usable gradient.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::grid::{ControlField, TimeGrid};
use crate::quantum::{purity, DensityOperator, LindbladGenerator};
use crate::{invalid_param, Error, Result};

/// Precomputed Liouville-space pieces of a generator: the full superoperator
/// at control values `u` is `drift + sum_j u_j * control_j + dissipator`,
/// assembled by cheap axpys.
#[derive(Debug, Clone)]
pub struct LiouvilleSpace {
    dim: usize,
    l_drift: CMatrix,
    l_controls: Vec<CMatrix>,
    l_diss: CMatrix,
}

/// Superoperator of the commutator part `-i [H, .]`.
fn hamiltonian_superop(h: &CMatrix) -> CMatrix {
    let d = h.dim();
    let ident = CMatrix::identity(d);
    let mut s = h.kron(&ident);
    s = s.sub(&ident.kron(&h.transpose()));
    s.scale(Complex64::new(0.0, -1.0))
}

impl LiouvilleSpace {
    pub fn new(gen: &LindbladGenerator) -> Self {
        let d = gen.dim();
        let ident = CMatrix::identity(d);
        let l_drift = hamiltonian_superop(gen.drift().matrix());
        let l_controls = gen
            .controls()
            .iter()
            .map(|hj| hamiltonian_superop(hj.matrix()))
            .collect();
        let mut l_diss = CMatrix::zeros(d * d);
        for ch in gen.channels() {
            if ch.rate == 0.0 {
                continue;
            }
            let a = ch.operator.matrix();
            let a_dag_a = a.adjoint().matmul(a);
            let jump = a.kron(&a.adjoint().transpose());
            let left = a_dag_a.kron(&ident);
            let right = ident.kron(&a_dag_a.transpose());
            let g = Complex64::new(ch.rate, 0.0);
            l_diss.axpy(g, &jump);
            l_diss.axpy(g * -0.5, &left);
            l_diss.axpy(g * -0.5, &right);
        }
        LiouvilleSpace {
            dim: d,
            l_drift,
            l_controls,
            l_diss,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_controls(&self) -> usize {
        self.l_controls.len()
    }

    /// Full superoperator at the given control values.
    pub fn matrix(&self, u: &[f64]) -> Result<CMatrix> {
        if u.len() != self.l_controls.len() {
            return Err(Error::ControlCountMismatch {
                expected: self.l_controls.len(),
                found: u.len(),
            });
        }
        let mut l = self.l_drift.add(&self.l_diss);
        for (uj, lj) in u.iter().zip(&self.l_controls) {
            if !uj.is_finite() {
                return Err(Error::NonFinite("control value"));
            }
            l.axpy(Complex64::new(*uj, 0.0), lj);
        }
        Ok(l)
    }

    /// Exact step propagator `exp(L(u) dt)`.
    pub fn step(&self, u: &[f64], dt: f64) -> Result<CMatrix> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(invalid_param!("dt must be positive, got {dt}"));
        }
        let l = self.matrix(u)?;
        crate::expm::expm(&l.scale(Complex64::new(dt, 0.0)))
    }

    /// One step propagator per control interval of `field`.
    pub(crate) fn step_propagators(&self, field: &ControlField) -> Result<Vec<CMatrix>> {
        if field.n_controls() != self.l_controls.len() {
            return Err(Error::ControlCountMismatch {
                expected: self.l_controls.len(),
                found: field.n_controls(),
            });
        }
        let dt = field.grid().dt();
        let n = field.grid().n_steps();
        let mut props = Vec::with_capacity(n);
        for i in 0..n {
            props.push(self.step(&field.values_at(i), dt)?);
        }
        Ok(props)
    }
}

/// Exact per-interval propagator for a generator at fixed control values.
///
/// The resulting map is trace-preserving and completely positive up to
/// roundoff; see [`trace_preservation_defect`] and [`choi_min_eigenvalue`]
/// for the diagnostics used by the test suites.
pub fn step_propagator(gen: &LindbladGenerator, u: &[f64], dt: f64) -> Result<CMatrix> {
    LiouvilleSpace::new(gen).step(u, dt)
}

/// How far a superoperator is from preserving the trace: the largest
/// deviation of the trace of a mapped matrix unit from its input trace.
pub fn trace_preservation_defect(prop: &CMatrix) -> f64 {
    let dd = prop.dim();
    let d = int_sqrt(dd);
    let mut worst: f64 = 0.0;
    for k in 0..d {
        for l in 0..d {
            let col = k * d + l;
            let mut s = Complex64::ZERO;
            for i in 0..d {
                s += prop[(i * d + i, col)];
            }
            let expected = if k == l { 1.0 } else { 0.0 };
            worst = worst.max((s - Complex64::new(expected, 0.0)).norm());
        }
    }
    worst
}

/// Minimum eigenvalue of the Choi matrix of a superoperator; complete
/// positivity means this is nonnegative (up to roundoff).
pub fn choi_min_eigenvalue(prop: &CMatrix) -> f64 {
    let dd = prop.dim();
    let d = int_sqrt(dd);
    // Choi block (i, j) is the image of the matrix unit E_ij.
    let mut choi = CMatrix::zeros(dd);
    for i in 0..d {
        for j in 0..d {
            let mut unit = vec![Complex64::ZERO; dd];
            unit[i * d + j] = Complex64::ONE;
            let image = prop.matvec(&unit);
            for a in 0..d {
                for b in 0..d {
                    choi[(i * d + a, j * d + b)] = image[a * d + b];
                }
            }
        }
    }
    choi.min_hermitian_eigenvalue()
}

fn int_sqrt(n: usize) -> usize {
    let mut r = 1usize;
    while r * r < n {
        r += 1;
    }
    r
}

/// States (or co-states) on every point of the state grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Vec<DensityOperator>,
}

impl Trajectory {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &DensityOperator {
        &self.states[i]
    }

    /// State at t = T for forward trajectories (t = 0 sits at index 0; for
    /// backward trajectories the supplied terminal condition sits at index
    /// `n_steps`).
    pub fn final_state(&self) -> &DensityOperator {
        self.states.last().unwrap()
    }

    pub fn initial_state(&self) -> &DensityOperator {
        &self.states[0]
    }
}

/// Forward propagation of a physical state under the equation of motion
/// `d rho/dt = -i[H(u), rho] + L_D(rho)` with piecewise-constant controls.
///
/// Every stored state is checked Hermitian and trace-one within 1e-10.
pub fn propagate_forward(
    gen: &LindbladGenerator,
    field: &ControlField,
    rho0: &DensityOperator,
) -> Result<Trajectory> {
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho0.dim(),
        });
    }
    let space = LiouvilleSpace::new(gen);
    let props = space.step_propagators(field)?;
    let mut states = Vec::with_capacity(props.len() + 1);
    states.push(rho0.clone());
    let mut v = rho0.matrix().data().to_vec();
    for p in &props {
        v = p.matvec(&v);
        let m = CMatrix::from_vec(gen.dim(), v.clone())?;
        let defect = m.hermiticity_defect();
        if defect > 1e-10 {
            return Err(Error::NotHermitian { defect });
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::NotTraceOne { trace: tr });
        }
        states.push(DensityOperator::algebraic(m));
    }
    Ok(Trajectory {
        grid: field.grid().clone(),
        states,
    })
}

/// Backward propagation of a co-state from its terminal condition at t = T
/// down to t = 0, under the Hilbert-Schmidt adjoint of the forward
/// generator. `states[i]` holds the co-state at grid point `t_i`.
pub fn propagate_backward(
    gen: &LindbladGenerator,
    field: &ControlField,
    sigma_final: &DensityOperator,
) -> Result<Trajectory> {
    if sigma_final.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: sigma_final.dim(),
        });
    }
    let space = LiouvilleSpace::new(gen);
    let props = space.step_propagators(field)?;
    let n = props.len();
    let mut vecs: Vec<Vec<Complex64>> = vec![Vec::new(); n + 1];
    vecs[n] = sigma_final.matrix().data().to_vec();
    for k in (0..n).rev() {
        vecs[k] = props[k].matvec_adjoint(&vecs[k + 1]);
    }
    let mut states = Vec::with_capacity(n + 1);
    for v in vecs {
        let m = CMatrix::from_vec(gen.dim(), v)?;
        let defect = m.hermiticity_defect();
        if defect > 1e-10 {
            return Err(Error::NotHermitian { defect });
        }
        states.push(DensityOperator::algebraic(m));
    }
    Ok(Trajectory {
        grid: field.grid().clone(),
        states,
    })
}

/// One observables row per state-grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRow {
    pub t: f64,
    pub populations: Vec<f64>,
    pub purity: f64,
    pub fidelity: Option<f64>,
}

/// Populations, purity and (optionally) overlap fidelity with a fixed target
/// along a trajectory.
pub fn observables(traj: &Trajectory, target: Option<&DensityOperator>) -> Vec<ObservableRow> {
    traj.states()
        .iter()
        .enumerate()
        .map(|(i, rho)| ObservableRow {
            t: traj.grid().state_time(i),
            populations: rho.populations(),
            purity: purity(rho),
            fidelity: target.map(|tgt| rho.matrix().hs_inner(tgt.matrix()).re),
        })
        .collect()
}
