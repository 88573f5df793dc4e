//! Figures of merit and terminal co-state construction.
//!
//! Gate objectives can be certified with three different basis-state sets:
//! the full set of d^2 matrix units, a reduced set of three states
//! (non-degenerate mixture, uniform-superposition projector, maximally mixed
//! state), or d + 1 states (the canonical projectors plus the phase state).
//! All three take the value 1 exactly when the dynamics restricted to the
//! logical subspace is conjugation by the target, and all three are built
//! here with per-term normalizations chosen so the optimum is exactly 1.

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::quantum::{embed_operator, validate_logical_indices, DensityOperator, OperatorMatrix};
use crate::{invalid_param, Error, Result};

/// Which basis-state set certifies a gate objective.
///
/// `DPlus2` augments the d+1 set with the maximally mixed state so that
/// non-unital errors stay visible; it is an opt-in configuration variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisStrategy {
    FullBasis,
    Reduced3,
    DPlus1,
    DPlus2,
}

impl BasisStrategy {
    /// Number of basis states for logical dimension `d`.
    pub fn state_count(&self, d: usize) -> usize {
        match self {
            BasisStrategy::FullBasis => d * d,
            BasisStrategy::Reduced3 => 3,
            BasisStrategy::DPlus1 => d + 1,
            BasisStrategy::DPlus2 => d + 2,
        }
    }
}

/// Gate target with its basis strategy, weights, and embedding of the
/// logical subspace into the system's Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct GateObjective {
    target: OperatorMatrix,
    logical: Vec<usize>,
    strategy: BasisStrategy,
    weights: Option<Vec<f64>>,
}

impl GateObjective {
    /// `target` is a unitary on the logical subspace picked out by the
    /// strictly increasing `logical` indices of the full space.
    pub fn new(
        target: OperatorMatrix,
        logical: Vec<usize>,
        strategy: BasisStrategy,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let defect = target.matrix().unitarity_defect();
        if defect > 1e-10 {
            return Err(Error::NotUnitary { defect });
        }
        if target.dim() != logical.len() {
            return Err(Error::DimensionMismatch {
                expected: logical.len(),
                found: target.dim(),
            });
        }
        if let Some(w) = &weights {
            if strategy == BasisStrategy::FullBasis {
                return Err(invalid_param!(
                    "weights are not supported for the full-basis strategy"
                ));
            }
            let m = strategy.state_count(target.dim());
            if w.len() != m {
                return Err(invalid_param!(
                    "expected {m} weights for this strategy, got {}",
                    w.len()
                ));
            }
            if w.iter().any(|&x| !x.is_finite() || x <= 0.0) {
                return Err(invalid_param!("weights must be positive and finite"));
            }
            let sum: f64 = w.iter().sum();
            if (sum - m as f64).abs() > 1e-9 {
                return Err(invalid_param!(
                    "weights must sum to the basis-state count {m}, got {sum}"
                ));
            }
        }
        Ok(GateObjective {
            target,
            logical,
            strategy,
            weights,
        })
    }

    pub fn logical_dim(&self) -> usize {
        self.target.dim()
    }

    pub fn strategy(&self) -> BasisStrategy {
        self.strategy
    }

    pub fn target(&self) -> &OperatorMatrix {
        &self.target
    }

    pub fn logical_indices(&self) -> &[usize] {
        &self.logical
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    fn weight(&self, j: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[j])
    }

    /// Target embedded into the full space (zero outside the subspace).
    pub fn embedded_target(&self, full_dim: usize) -> Result<CMatrix> {
        validate_logical_indices(&self.logical, full_dim)?;
        embed_operator(self.target.matrix(), &self.logical, full_dim)
    }
}

/// The control target: a single state transfer or a gate.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlObjective {
    StateToState {
        initial: DensityOperator,
        target: DensityOperator,
    },
    Gate(GateObjective),
}

impl ControlObjective {
    pub fn state_to_state(initial: DensityOperator, target: DensityOperator) -> Result<Self> {
        if initial.dim() != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: initial.dim(),
                found: target.dim(),
            });
        }
        Ok(ControlObjective::StateToState { initial, target })
    }
}

/// Ordered basis states with their Hilbert-Schmidt norms `Tr{rho^dag rho}`
/// (equal to `Tr{rho^2}` for the Hermitian members).
#[derive(Debug, Clone)]
pub struct BasisSet {
    states: Vec<DensityOperator>,
    norms: Vec<f64>,
    strategy: BasisStrategy,
    logical_dim: usize,
}

impl BasisSet {
    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn strategy(&self) -> BasisStrategy {
        self.strategy
    }

    pub fn logical_dim(&self) -> usize {
        self.logical_dim
    }
}

/// Overlap fidelity `Re Tr{rho_final rho_target}` between two states.
///
/// Equals 1 exactly when both are the same pure state. The trace is real for
/// Hermitian arguments; any imaginary residue is roundoff.
pub fn state_fidelity(final_state: &DensityOperator, target: &DensityOperator) -> Result<f64> {
    if final_state.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            found: final_state.dim(),
        });
    }
    // Tr{rho sigma} = <rho^dag, sigma> = <rho, sigma> for Hermitian rho.
    let overlap = final_state.matrix().adjoint().hs_inner(target.matrix());
    debug_assert!(overlap.im.abs() < 1e-12 * overlap.re.abs().max(1.0));
    Ok(overlap.re)
}

fn identity_indices(d: usize) -> Vec<usize> {
    (0..d).collect()
}

/// All d^2 matrix units E_kl in row-major (k, l) order, embedded on the
/// given logical indices. Off-diagonal units are not physical states; they
/// are admitted as the algebraic basis of Liouville space.
pub fn full_basis(d: usize) -> BasisSet {
    full_basis_embedded(d, &identity_indices(d), d).unwrap()
}

pub fn full_basis_embedded(d: usize, logical: &[usize], full_dim: usize) -> Result<BasisSet> {
    validate_logical_indices(logical, full_dim)?;
    let mut states = Vec::with_capacity(d * d);
    let mut norms = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            states.push(DensityOperator::algebraic(CMatrix::unit(
                full_dim, logical[k], logical[l],
            )));
            norms.push(1.0);
        }
    }
    Ok(BasisSet {
        states,
        norms,
        strategy: BasisStrategy::FullBasis,
        logical_dim: d,
    })
}

/// Mixed state with the strictly decreasing spectrum
/// `lambda_i = 2(d + 1 - i) / (d (d + 1))`, i = 1..d: non-degenerate
/// eigenvalues that pin down the computational basis.
fn basis_fixing_state(d: usize, logical: &[usize], full_dim: usize) -> DensityOperator {
    let mut m = CMatrix::zeros(full_dim);
    let denom = (d * (d + 1)) as f64;
    for (i, &ix) in logical.iter().enumerate() {
        let lam = 2.0 * (d - i) as f64 / denom;
        m[(ix, ix)] = Complex64::new(lam, 0.0);
    }
    DensityOperator::algebraic(m)
}

/// Rank-one projector onto the uniform superposition of the logical basis:
/// sensitive to any relative phase between basis states.
fn phase_state(d: usize, logical: &[usize], full_dim: usize) -> DensityOperator {
    let mut m = CMatrix::zeros(full_dim);
    let v = Complex64::new(1.0 / d as f64, 0.0);
    for &i in logical {
        for &j in logical {
            m[(i, j)] = v;
        }
    }
    DensityOperator::algebraic(m)
}

/// Maximally mixed state on the logical subspace: detects departures from
/// unitality.
fn unital_state(d: usize, logical: &[usize], full_dim: usize) -> DensityOperator {
    let mut m = CMatrix::zeros(full_dim);
    for &i in logical {
        m[(i, i)] = Complex64::new(1.0 / d as f64, 0.0);
    }
    DensityOperator::algebraic(m)
}

/// The three-state set: basis-fixing mixture, phase state, maximally mixed.
pub fn reduced3_basis(d: usize) -> BasisSet {
    reduced3_basis_embedded(d, &identity_indices(d), d).unwrap()
}

pub fn reduced3_basis_embedded(d: usize, logical: &[usize], full_dim: usize) -> Result<BasisSet> {
    validate_logical_indices(logical, full_dim)?;
    let states = alloc::vec![
        basis_fixing_state(d, logical, full_dim),
        phase_state(d, logical, full_dim),
        unital_state(d, logical, full_dim),
    ];
    let norms = states
        .iter()
        .map(|s| s.matrix().hs_inner(s.matrix()).re)
        .collect();
    Ok(BasisSet {
        states,
        norms,
        strategy: BasisStrategy::Reduced3,
        logical_dim: d,
    })
}

/// The d + 1 set: canonical projectors plus the phase state.
pub fn dplus1_basis(d: usize) -> BasisSet {
    basis_for_strategy(BasisStrategy::DPlus1, d, &identity_indices(d), d).unwrap()
}

/// The d + 2 variant: d + 1 set plus the maximally mixed state.
pub fn dplus2_basis(d: usize) -> BasisSet {
    basis_for_strategy(BasisStrategy::DPlus2, d, &identity_indices(d), d).unwrap()
}

/// Basis set for any strategy, embedded on logical indices of a possibly
/// larger space.
pub fn basis_for_strategy(
    strategy: BasisStrategy,
    d: usize,
    logical: &[usize],
    full_dim: usize,
) -> Result<BasisSet> {
    if d < 2 {
        return Err(invalid_param!("logical dimension must be at least 2"));
    }
    match strategy {
        BasisStrategy::FullBasis => full_basis_embedded(d, logical, full_dim),
        BasisStrategy::Reduced3 => reduced3_basis_embedded(d, logical, full_dim),
        BasisStrategy::DPlus1 | BasisStrategy::DPlus2 => {
            validate_logical_indices(logical, full_dim)?;
            let mut states: Vec<DensityOperator> = (0..d)
                .map(|k| DensityOperator::basis_state(full_dim, logical[k]))
                .collect();
            states.push(phase_state(d, logical, full_dim));
            if strategy == BasisStrategy::DPlus2 {
                states.push(unital_state(d, logical, full_dim));
            }
            let norms = states
                .iter()
                .map(|s| s.matrix().hs_inner(s.matrix()).re)
                .collect();
            Ok(BasisSet {
                states,
                norms,
                strategy,
                logical_dim: d,
            })
        }
    }
}

/// Basis set matching a gate objective inside a `full_dim` system.
pub fn basis_for_gate(gate: &GateObjective, full_dim: usize) -> Result<BasisSet> {
    basis_for_strategy(
        gate.strategy(),
        gate.logical_dim(),
        gate.logical_indices(),
        full_dim,
    )
}

/// Gate fidelity from the forward-propagated images of the basis states.
///
/// For the full matrix-unit basis this is
/// `Re (1/d) sum_j Tr{O rho_j O^dag D(rho_j)}`; the sum is real for
/// Hermiticity-preserving maps and the imaginary residue is checked. The
/// reduced strategies use per-term normalization by `Tr{rho_j^2}` (and
/// optional weights summing to the state count), so a perfect gate scores
/// exactly 1 in every strategy.
pub fn gate_fidelity(
    gate: &GateObjective,
    basis: &BasisSet,
    evolved: &[DensityOperator],
) -> Result<f64> {
    if evolved.len() != basis.len() {
        return Err(invalid_param!(
            "strategy expects {} evolved states, got {}",
            basis.len(),
            evolved.len()
        ));
    }
    let full_dim = basis.states()[0].dim();
    let o_full = gate.embedded_target(full_dim)?;
    let o_dag = o_full.adjoint();
    let d = gate.logical_dim() as f64;
    match gate.strategy() {
        BasisStrategy::FullBasis => {
            let mut total = Complex64::ZERO;
            for (rho_j, evolved_j) in basis.states().iter().zip(evolved) {
                // Tr{O rho O^dag D(rho)} = <O rho^dag O^dag, D(rho)>_HS
                let target_image_dag = o_full.matmul(&rho_j.matrix().adjoint()).matmul(&o_dag);
                total += target_image_dag.hs_inner(evolved_j.matrix());
            }
            total /= d;
            if total.im.abs() > 1e-10 * total.re.abs().max(1.0) {
                return Err(invalid_param!(
                    "gate fidelity has imaginary residue {:e}; dynamics is not Hermiticity-preserving",
                    total.im
                ));
            }
            Ok(total.re)
        }
        _ => {
            let m = basis.len() as f64;
            let mut total = 0.0;
            for (j, (rho_j, evolved_j)) in basis.states().iter().zip(evolved).enumerate() {
                let target_image = o_full.matmul(rho_j.matrix()).matmul(&o_dag);
                let term = target_image.hs_inner(evolved_j.matrix()).re;
                total += gate.weight(j) * term / basis.norms()[j];
            }
            Ok(total / m)
        }
    }
}

/// Terminal co-states seeding the backward propagation, chosen as the
/// derivative of the figure of merit with respect to each final state so
/// that the pairing yields the exact functional gradient.
pub fn target_costates(
    objective: &ControlObjective,
    basis: Option<&BasisSet>,
    full_dim: usize,
) -> Result<Vec<DensityOperator>> {
    match objective {
        ControlObjective::StateToState { target, .. } => Ok(alloc::vec![target.clone()]),
        ControlObjective::Gate(gate) => {
            let basis = basis.ok_or_else(|| {
                invalid_param!("gate objectives need a basis set for co-state construction")
            })?;
            let o_full = gate.embedded_target(full_dim)?;
            let o_dag = o_full.adjoint();
            let d = gate.logical_dim() as f64;
            let m = basis.len() as f64;
            let mut out = Vec::with_capacity(basis.len());
            for (j, rho_j) in basis.states().iter().enumerate() {
                let sigma = match gate.strategy() {
                    // d/drho of Re (1/d) Tr{O rho_j O^dag D(rho_j)}.
                    BasisStrategy::FullBasis => o_full
                        .matmul(&rho_j.matrix().adjoint())
                        .matmul(&o_dag)
                        .scale(Complex64::new(1.0 / d, 0.0)),
                    _ => o_full
                        .matmul(rho_j.matrix())
                        .matmul(&o_dag)
                        .scale(Complex64::new(gate.weight(j) / (m * basis.norms()[j]), 0.0)),
                };
                out.push(DensityOperator::algebraic(sigma));
            }
            Ok(out)
        }
    }
}

/// Initial conditions for the forward propagations of an objective.
pub fn initial_states(
    objective: &ControlObjective,
    basis: Option<&BasisSet>,
) -> Result<Vec<DensityOperator>> {
    match objective {
        ControlObjective::StateToState { initial, .. } => Ok(alloc::vec![initial.clone()]),
        ControlObjective::Gate(_) => {
            let basis = basis.ok_or_else(|| invalid_param!("gate objectives need a basis set"))?;
            Ok(basis.states().to_vec())
        }
    }
}

/// Figure of merit from the final propagated states, dispatching on the
/// objective kind.
pub fn objective_fidelity(
    objective: &ControlObjective,
    basis: Option<&BasisSet>,
    finals: &[DensityOperator],
) -> Result<f64> {
    match objective {
        ControlObjective::StateToState { target, .. } => {
            if finals.len() != 1 {
                return Err(invalid_param!(
                    "state-to-state objective expects 1 final state, got {}",
                    finals.len()
                ));
            }
            state_fidelity(&finals[0], target)
        }
        ControlObjective::Gate(gate) => {
            let basis = basis.ok_or_else(|| invalid_param!("gate objectives need a basis set"))?;
            gate_fidelity(gate, basis, finals)
        }
    }
}

/// Human-readable objective label used in logs.
pub fn objective_label(objective: &ControlObjective) -> String {
    match objective {
        ControlObjective::StateToState { .. } => String::from("state-to-state"),
        ControlObjective::Gate(g) => match g.strategy() {
            BasisStrategy::FullBasis => String::from("gate (full basis)"),
            BasisStrategy::Reduced3 => String::from("gate (3 states)"),
            BasisStrategy::DPlus1 => String::from("gate (d+1 states)"),
            BasisStrategy::DPlus2 => String::from("gate (d+2 states)"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::pauli::*;
    use crate::rng;
    use alloc::vec;

    fn conjugate_by(v: &CMatrix, basis: &BasisSet) -> Vec<DensityOperator> {
        let v_dag = v.adjoint();
        basis
            .states()
            .iter()
            .map(|s| DensityOperator::algebraic(v.matmul(s.matrix()).matmul(&v_dag)))
            .collect()
    }

    fn gate(target: CMatrix, strategy: BasisStrategy) -> GateObjective {
        let d = target.dim();
        GateObjective::new(
            OperatorMatrix::unitary(target).unwrap(),
            (0..d).collect(),
            strategy,
            None,
        )
        .unwrap()
    }

    #[test]
    fn state_fidelity_examples() {
        let zero = DensityOperator::basis_state(2, 0);
        let one = DensityOperator::basis_state(2, 1);
        let mixed = DensityOperator::maximally_mixed(2);
        assert!((state_fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(state_fidelity(&zero, &one).unwrap().abs() < 1e-15);
        assert!((state_fidelity(&mixed, &zero).unwrap() - 0.5).abs() < 1e-15);
        assert!(state_fidelity(&zero, &DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn full_basis_is_matrix_units_in_row_major_order() {
        let b = full_basis(2);
        assert_eq!(b.len(), 4);
        let expected = [(0, 0), (0, 1), (1, 0), (1, 1)];
        for (s, &(k, l)) in b.states().iter().zip(&expected) {
            assert!(s.matrix().max_abs_diff(&CMatrix::unit(2, k, l)) < 1e-15);
        }
        assert_eq!(full_basis(3).len(), 9);
    }

    #[test]
    fn reduced3_basis_members() {
        let b = reduced3_basis(2);
        assert_eq!(b.len(), 3);
        let rho_basis = b.states()[0].matrix();
        assert!(rho_basis.max_abs_diff(&CMatrix::diag(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-15);
        let rho_phase = b.states()[1].matrix();
        assert!(
            rho_phase.max_abs_diff(&CMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap()) < 1e-15
        );
        for d in [2usize, 3, 5] {
            let b = reduced3_basis(d);
            let unital = b.states()[2].matrix();
            for e in unital.hermitian_eigenvalues() {
                assert!((e - 1.0 / d as f64).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn basis_fixing_spectrum_is_decreasing_and_sums_to_one_exactly() {
        // Rational check: sum_i 2 (d + 1 - i) = d (d + 1) exactly.
        for d in 2usize..=8 {
            let mut num_sum = 0u64;
            let mut prev = u64::MAX;
            for i in 1..=d as u64 {
                let num = 2 * (d as u64 + 1 - i);
                assert!(num < prev, "spectrum must be strictly decreasing");
                prev = num;
                num_sum += num;
            }
            assert_eq!(num_sum, (d * (d + 1)) as u64);
            let tr = reduced3_basis(d).states()[0].matrix().trace().re;
            assert!((tr - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dplus1_counts_and_members() {
        assert_eq!(dplus1_basis(2).len(), 3);
        assert_eq!(dplus1_basis(4).len(), 5);
        let b = dplus1_basis(2);
        assert!(b.states()[0].matrix().max_abs_diff(&CMatrix::unit(2, 0, 0)) < 1e-15);
        assert!(b.states()[1].matrix().max_abs_diff(&CMatrix::unit(2, 1, 1)) < 1e-15);
        assert!(
            b.states()[2]
                .matrix()
                .max_abs_diff(&CMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap())
                < 1e-15
        );
        assert_eq!(dplus2_basis(2).len(), 4);
    }

    #[test]
    fn perfect_gate_scores_one_in_every_strategy() {
        let mut r = rng::Rng::new(71);
        for d in [2usize, 3, 4] {
            let o = rng::haar_unitary(d, &mut r);
            for strategy in [
                BasisStrategy::FullBasis,
                BasisStrategy::Reduced3,
                BasisStrategy::DPlus1,
                BasisStrategy::DPlus2,
            ] {
                let g = gate(o.clone(), strategy);
                let basis = basis_for_gate(&g, d).unwrap();
                let evolved = conjugate_by(&o, &basis);
                let f = gate_fidelity(&g, &basis, &evolved).unwrap();
                assert!((f - 1.0).abs() < 1e-12, "strategy {strategy:?} d {d}: {f}");
            }
        }
    }

    #[test]
    fn global_phase_cancels() {
        let mut r = rng::Rng::new(73);
        let o = rng::haar_unitary(3, &mut r);
        let phase = Complex64::new(0.0, 0.77).exp();
        let v = o.scale(phase);
        for strategy in [
            BasisStrategy::FullBasis,
            BasisStrategy::Reduced3,
            BasisStrategy::DPlus1,
        ] {
            let g = gate(o.clone(), strategy);
            let basis = basis_for_gate(&g, 3).unwrap();
            let evolved = conjugate_by(&v, &basis);
            let f = gate_fidelity(&g, &basis, &evolved).unwrap();
            assert!((f - 1.0).abs() < 1e-12, "{strategy:?}: {f}");
        }
    }

    #[test]
    fn depolarizing_full_basis_value() {
        // Fully depolarizing qubit map: every input X -> Tr{X} I/2.
        let g = gate(CMatrix::identity(2), BasisStrategy::FullBasis);
        let basis = basis_for_gate(&g, 2).unwrap();
        let evolved: Vec<DensityOperator> = basis
            .states()
            .iter()
            .map(|s| {
                let tr = s.matrix().trace();
                DensityOperator::algebraic(CMatrix::identity(2).scale(tr * 0.5))
            })
            .collect();
        let f = gate_fidelity(&g, &basis, &evolved).unwrap();
        assert!((f - 0.5).abs() < 1e-12, "{f}");
    }

    #[test]
    fn sigma_z_error_against_identity_reduced3() {
        // Direct evaluation: basis and unital states are diagonal (score 1),
        // the phase state is flipped to an orthogonal projector (score 0).
        let g = gate(CMatrix::identity(2), BasisStrategy::Reduced3);
        let basis = basis_for_gate(&g, 2).unwrap();
        let evolved = conjugate_by(&sigma_z(), &basis);
        let f = gate_fidelity(&g, &basis, &evolved).unwrap();
        assert!((f - 2.0 / 3.0).abs() < 1e-12, "{f}");
    }

    #[test]
    fn haar_random_wrong_unitaries_score_below_one() {
        let mut r = rng::Rng::new(79);
        for d in [2usize, 3, 4] {
            let o = rng::haar_unitary(d, &mut r);
            for _ in 0..34 {
                let v = rng::haar_unitary(d, &mut r);
                for strategy in [
                    BasisStrategy::FullBasis,
                    BasisStrategy::Reduced3,
                    BasisStrategy::DPlus1,
                ] {
                    let g = gate(o.clone(), strategy);
                    let basis = basis_for_gate(&g, d).unwrap();
                    let evolved = conjugate_by(&v, &basis);
                    let f = gate_fidelity(&g, &basis, &evolved).unwrap();
                    assert!(f < 1.0 - 1e-6, "{strategy:?} d {d}: {f}");
                }
            }
        }
    }

    #[test]
    fn strategies_agree_at_the_optimum() {
        let mut r = rng::Rng::new(83);
        for d in [2usize, 4] {
            let o = rng::haar_unitary(d, &mut r);
            let mut values = vec![];
            for strategy in [
                BasisStrategy::FullBasis,
                BasisStrategy::Reduced3,
                BasisStrategy::DPlus1,
            ] {
                let g = gate(o.clone(), strategy);
                let basis = basis_for_gate(&g, d).unwrap();
                let evolved = conjugate_by(&o, &basis);
                values.push(gate_fidelity(&g, &basis, &evolved).unwrap());
            }
            for v in &values {
                assert!((v - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn costates_for_state_to_state_is_target() {
        let objective = ControlObjective::state_to_state(
            DensityOperator::basis_state(2, 0),
            DensityOperator::basis_state(2, 1),
        )
        .unwrap();
        let cs = target_costates(&objective, None, 2).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].matrix().max_abs_diff(&CMatrix::unit(2, 1, 1)) < 1e-15);
    }

    #[test]
    fn costates_conjugate_and_normalize() {
        // O = sx on |0><0| with M = 3 (d+1 strategy) and unit weight:
        // sigma = |1><1| / 3.
        let g = gate(sigma_x(), BasisStrategy::DPlus1);
        let basis = basis_for_gate(&g, 2).unwrap();
        let cs = target_costates(&ControlObjective::Gate(g), Some(&basis), 2).unwrap();
        let expected = CMatrix::unit(2, 1, 1).scale(Complex64::new(1.0 / 3.0, 0.0));
        assert!(cs[0].matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn costates_scale_with_weights() {
        let weights = vec![2.0, 0.5, 0.5];
        let g = GateObjective::new(
            OperatorMatrix::unitary(sigma_x()).unwrap(),
            vec![0, 1],
            BasisStrategy::Reduced3,
            Some(weights.clone()),
        )
        .unwrap();
        let basis = basis_for_gate(&g, 2).unwrap();
        let unweighted = GateObjective::new(
            OperatorMatrix::unitary(sigma_x()).unwrap(),
            vec![0, 1],
            BasisStrategy::Reduced3,
            None,
        )
        .unwrap();
        let cs_w = target_costates(&ControlObjective::Gate(g), Some(&basis), 2).unwrap();
        let cs_u = target_costates(&ControlObjective::Gate(unweighted), Some(&basis), 2).unwrap();
        for ((w, cw), cu) in weights.iter().zip(&cs_w).zip(&cs_u) {
            let rescaled = cu.matrix().scale(Complex64::new(*w, 0.0));
            assert!(cw.matrix().max_abs_diff(&rescaled) < 1e-15);
        }
    }

    #[test]
    fn weight_validation() {
        let make = |weights: Option<Vec<f64>>, strategy| {
            GateObjective::new(
                OperatorMatrix::unitary(sigma_x()).unwrap(),
                vec![0, 1],
                strategy,
                weights,
            )
        };
        assert!(make(Some(vec![1.0, 1.0, 1.0]), BasisStrategy::Reduced3).is_ok());
        assert!(make(Some(vec![1.0, 1.0]), BasisStrategy::Reduced3).is_err());
        assert!(make(Some(vec![2.0, 1.0, 1.0]), BasisStrategy::Reduced3).is_err());
        assert!(make(Some(vec![-1.0, 3.0, 1.0]), BasisStrategy::Reduced3).is_err());
        assert!(make(Some(vec![1.0; 4]), BasisStrategy::FullBasis).is_err());
    }

    #[test]
    fn gate_target_must_be_unitary() {
        let r = GateObjective::new(
            OperatorMatrix::general(CMatrix::diag(&[1.0, 0.5])),
            vec![0, 1],
            BasisStrategy::Reduced3,
            None,
        );
        assert!(matches!(r, Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn evolved_count_must_match_strategy() {
        let g = gate(sigma_x(), BasisStrategy::Reduced3);
        let basis = basis_for_gate(&g, 2).unwrap();
        let too_few = vec![DensityOperator::maximally_mixed(2)];
        assert!(gate_fidelity(&g, &basis, &too_few).is_err());
    }

    #[test]
    fn embedded_subspace_gate_ignores_spectator_level() {
        // Qubit gate on levels {0, 1} of a 3-level system; the dynamics acts
        // as sx on the subspace and arbitrarily on level 2.
        let o = sigma_x();
        let g = GateObjective::new(
            OperatorMatrix::unitary(o).unwrap(),
            vec![0, 1],
            BasisStrategy::Reduced3,
            None,
        )
        .unwrap();
        let basis = basis_for_gate(&g, 3).unwrap();
        let mut v = CMatrix::zeros(3);
        v[(0, 1)] = Complex64::ONE;
        v[(1, 0)] = Complex64::ONE;
        v[(2, 2)] = Complex64::new(0.0, 1.0); // spectator phase
        let evolved = conjugate_by(&v, &basis);
        let f = gate_fidelity(&g, &basis, &evolved).unwrap();
        assert!((f - 1.0).abs() < 1e-12, "{f}");
    }
}
