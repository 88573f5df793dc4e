//! Value types for states, operators and Lindblad generators, plus the
//! primitive algebra shared by every other module.
//!
//! Units: hbar = 1 throughout. Hamiltonians are angular frequencies, channel
//! rates are inverse times, and time is whatever unit makes those two
//! consistent.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::{invalid_param, Error, Result};

/// Tolerance for algebraic identities (Hermiticity, traces).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance for spectra (eigenvalue positivity).
pub const SPECTRUM_TOL: f64 = 1e-10;

/// A d x d density operator, or a co-state derived from one.
///
/// Three construction levels reflect the three uses:
/// - [`DensityOperator::new`]: physical state (Hermitian, trace one,
///   positive semidefinite);
/// - [`DensityOperator::co_state`]: Hermitian only — backward-propagated
///   adjoint states carry target-derived normalizations, so their trace is
///   unconstrained;
/// - [`DensityOperator::algebraic`]: no checks — the full d^2 matrix-unit
///   basis used by the gate functional contains non-Hermitian elements that
///   are propagated as plain operators.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: CMatrix,
}

impl DensityOperator {
    /// Validated physical state.
    pub fn new(mat: CMatrix) -> Result<Self> {
        let defect = mat.hermiticity_defect();
        if defect > ALGEBRA_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > ALGEBRA_TOL || tr.im.abs() > ALGEBRA_TOL {
            return Err(Error::NotTraceOne { trace: tr.re });
        }
        let min_eig = mat.min_hermitian_eigenvalue();
        if min_eig < -SPECTRUM_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min_eig,
            });
        }
        Ok(DensityOperator { mat })
    }

    /// Hermitian co-state; trace and positivity unconstrained.
    pub fn co_state(mat: CMatrix) -> Result<Self> {
        let defect = mat.hermiticity_defect();
        if defect > ALGEBRA_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(DensityOperator { mat })
    }

    /// Unchecked carrier for algebraic basis elements (e.g. matrix units).
    pub fn algebraic(mat: CMatrix) -> Self {
        DensityOperator { mat }
    }

    /// Pure state |k><k|.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        DensityOperator {
            mat: CMatrix::unit(dim, k, k),
        }
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            mat: CMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Real diagonal (populations) of the state.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }
}

/// A d x d operator (Hamiltonian, channel operator, gate target) with an
/// optional Hermiticity guarantee checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    mat: CMatrix,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Hermitian operator; fails if the defect exceeds tolerance.
    pub fn hermitian(mat: CMatrix) -> Result<Self> {
        let defect = mat.hermiticity_defect();
        if defect > ALGEBRA_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(OperatorMatrix {
            mat,
            hermitian: true,
        })
    }

    /// General operator, no structural guarantee.
    pub fn general(mat: CMatrix) -> Self {
        OperatorMatrix {
            mat,
            hermitian: false,
        }
    }

    /// Unitary operator; fails if `U^dag U` deviates from identity.
    pub fn unitary(mat: CMatrix) -> Result<Self> {
        let defect = mat.unitarity_defect();
        if defect > SPECTRUM_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(OperatorMatrix {
            mat,
            hermitian: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }
}

/// One dissipative channel: operator A and nonnegative rate gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub operator: OperatorMatrix,
    pub rate: f64,
}

/// Drift Hamiltonian, control Hamiltonians and dissipative channels: the
/// full generator of the Markovian master equation
/// `d rho/dt = -i [H0 + sum_j u_j H_j, rho] + sum_k gamma_k D_k(rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    drift: OperatorMatrix,
    controls: Vec<OperatorMatrix>,
    channels: Vec<Channel>,
}

impl LindbladGenerator {
    pub fn new(
        drift: OperatorMatrix,
        controls: Vec<OperatorMatrix>,
        channels: Vec<Channel>,
    ) -> Result<Self> {
        let dim = drift.dim();
        for c in &controls {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
        }
        for ch in &channels {
            if ch.operator.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: ch.operator.dim(),
                });
            }
            if !ch.rate.is_finite() || ch.rate < 0.0 {
                return Err(invalid_param!("channel rate must be >= 0, got {}", ch.rate));
            }
        }
        Ok(LindbladGenerator {
            drift,
            controls,
            channels,
        })
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    pub fn drift(&self) -> &OperatorMatrix {
        &self.drift
    }

    pub fn controls(&self) -> &[OperatorMatrix] {
        &self.controls
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Hamiltonian at the given control values: H0 + sum_j u_j H_j.
    pub fn hamiltonian(&self, u: &[f64]) -> Result<CMatrix> {
        if u.len() != self.controls.len() {
            return Err(Error::ControlCountMismatch {
                expected: self.controls.len(),
                found: u.len(),
            });
        }
        let mut h = self.drift.matrix().clone();
        for (uj, hj) in u.iter().zip(&self.controls) {
            h.axpy(Complex64::new(*uj, 0.0), hj.matrix());
        }
        Ok(h)
    }
}

/// Hilbert-Schmidt inner product Tr{a^dag b}.
pub fn hilbert_schmidt_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.matrix().hs_inner(b.matrix()))
}

/// Purity Tr{rho^2} of a state; lies in [1/d, 1] for physical states.
pub fn purity(rho: &DensityOperator) -> f64 {
    // For Hermitian rho, Tr{rho^2} = Tr{rho^dag rho} = ||rho||_HS^2.
    rho.matrix().hs_inner(rho.matrix()).re
}

/// Dissipator applied to a state:
/// `sum_k gamma_k (A_k rho A_k^dag - 1/2 {A_k^dag A_k, rho})`.
///
/// Hermitian and traceless for Hermitian input. Channels with zero rate are
/// skipped.
pub fn apply_dissipator(gen: &LindbladGenerator, rho: &DensityOperator) -> Result<OperatorMatrix> {
    if gen.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho.dim(),
        });
    }
    Ok(OperatorMatrix::general(dissipator_matrix(
        gen,
        rho.matrix(),
    )))
}

pub(crate) fn dissipator_matrix(gen: &LindbladGenerator, rho: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(gen.dim());
    for ch in gen.channels() {
        if ch.rate == 0.0 {
            continue;
        }
        let a = ch.operator.matrix();
        let a_dag = a.adjoint();
        let jump = a.matmul(rho).matmul(&a_dag);
        let a_dag_a = a_dag.matmul(a);
        let anti = a_dag_a.anticommutator(rho);
        out.axpy(Complex64::new(ch.rate, 0.0), &jump);
        out.axpy(Complex64::new(-0.5 * ch.rate, 0.0), &anti);
    }
    out
}

/// Full Liouvillian applied to a state:
/// `-i [H0 + sum_j u_j H_j, rho] + dissipator(rho)`.
pub fn apply_liouvillian(
    gen: &LindbladGenerator,
    u: &[f64],
    rho: &DensityOperator,
) -> Result<OperatorMatrix> {
    if gen.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho.dim(),
        });
    }
    let h = gen.hamiltonian(u)?;
    let mut out = h.commutator(rho.matrix()).scale(Complex64::new(0.0, -1.0));
    out = out.add(&dissipator_matrix(gen, rho.matrix()));
    Ok(OperatorMatrix::general(out))
}

/// Embed a logical-subspace operator into the full Hilbert space, placing
/// entry (k, l) of `op` at (indices[k], indices[l]) and zero elsewhere.
pub fn embed_operator(op: &CMatrix, indices: &[usize], full_dim: usize) -> Result<CMatrix> {
    if op.dim() != indices.len() {
        return Err(Error::DimensionMismatch {
            expected: indices.len(),
            found: op.dim(),
        });
    }
    for &ix in indices {
        if ix >= full_dim {
            return Err(invalid_param!(
                "logical index {ix} out of range for dimension {full_dim}"
            ));
        }
    }
    let mut out = CMatrix::zeros(full_dim);
    for (k, &ik) in indices.iter().enumerate() {
        for (l, &il) in indices.iter().enumerate() {
            out[(ik, il)] = op[(k, l)];
        }
    }
    Ok(out)
}

/// Validate that logical indices are strictly increasing and in range.
pub fn validate_logical_indices(indices: &[usize], full_dim: usize) -> Result<()> {
    if indices.is_empty() {
        return Err(invalid_param!("logical subspace must be nonempty"));
    }
    for w in indices.windows(2) {
        if w[1] <= w[0] {
            return Err(invalid_param!(
                "logical indices must be strictly increasing, got {:?}",
                indices.to_vec()
            ));
        }
    }
    if *indices.last().unwrap() >= full_dim {
        return Err(invalid_param!(
            "logical index {} out of range for dimension {full_dim}",
            indices.last().unwrap()
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::pauli::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn decay_channel(gamma: f64) -> Channel {
        // A = |0><1|
        Channel {
            operator: OperatorMatrix::general(CMatrix::unit(2, 0, 1)),
            rate: gamma,
        }
    }

    fn damping_generator(gamma: f64) -> LindbladGenerator {
        LindbladGenerator::new(
            OperatorMatrix::hermitian(CMatrix::zeros(2)).unwrap(),
            vec![],
            vec![decay_channel(gamma)],
        )
        .unwrap()
    }

    #[test]
    fn hs_inner_identity() {
        let i2 = OperatorMatrix::hermitian(CMatrix::identity(2)).unwrap();
        let v = hilbert_schmidt_inner(&i2, &i2).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hs_inner_orthogonal_paulis() {
        let sx = OperatorMatrix::hermitian(sigma_x()).unwrap();
        let sy = OperatorMatrix::hermitian(sigma_y()).unwrap();
        assert!(hilbert_schmidt_inner(&sx, &sy).unwrap().norm() < 1e-15);
    }

    #[test]
    fn hs_inner_projector_picks_diagonal() {
        let p0 = OperatorMatrix::hermitian(CMatrix::unit(2, 0, 0)).unwrap();
        let rho = OperatorMatrix::hermitian(CMatrix::diag(&[0.3, 0.7])).unwrap();
        let v = hilbert_schmidt_inner(&p0, &rho).unwrap();
        assert!((v - c(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hs_inner_rejects_dimension_mismatch() {
        let a = OperatorMatrix::hermitian(CMatrix::identity(2)).unwrap();
        let b = OperatorMatrix::hermitian(CMatrix::identity(3)).unwrap();
        assert!(matches!(
            hilbert_schmidt_inner(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hs_inner_is_conjugate_symmetric() {
        let mut rng = crate::rng::Rng::new(3);
        for _ in 0..10 {
            let a = OperatorMatrix::general(crate::rng::ginibre(3, &mut rng));
            let b = OperatorMatrix::general(crate::rng::ginibre(3, &mut rng));
            let ab = hilbert_schmidt_inner(&a, &b).unwrap();
            let ba = hilbert_schmidt_inner(&b, &a).unwrap();
            assert!((ab - ba.conj()).norm() < 1e-12 * ab.norm().max(1.0));
        }
    }

    #[test]
    fn dissipator_output_is_hermitian_for_hermitian_input() {
        let mut rng = crate::rng::Rng::new(21);
        for _ in 0..10 {
            let gen = LindbladGenerator::new(
                OperatorMatrix::hermitian(CMatrix::zeros(3)).unwrap(),
                vec![],
                vec![
                    Channel {
                        operator: OperatorMatrix::general(crate::rng::ginibre(3, &mut rng)),
                        rate: rng.uniform(),
                    },
                    Channel {
                        operator: OperatorMatrix::general(crate::rng::ginibre(3, &mut rng)),
                        rate: rng.uniform(),
                    },
                ],
            )
            .unwrap();
            let rho = DensityOperator::new(crate::rng::random_density(3, &mut rng)).unwrap();
            let d = apply_dissipator(&gen, &rho).unwrap();
            assert!(d.matrix().hermiticity_defect() < 1e-12);
            assert!(d.matrix().trace().norm() < 1e-12);
        }
    }

    #[test]
    fn hs_inner_with_self_is_real_nonnegative() {
        let mut rng = crate::rng::Rng::new(5);
        for _ in 0..20 {
            let g = crate::rng::ginibre(3, &mut rng);
            let a = OperatorMatrix::general(g);
            let v = hilbert_schmidt_inner(&a, &a).unwrap();
            assert!(v.im.abs() < 1e-12 * v.re.max(1.0));
            assert!(v.re >= 0.0);
        }
    }

    #[test]
    fn purity_examples() {
        let pure = DensityOperator::basis_state(2, 0);
        assert!((purity(&pure) - 1.0).abs() < 1e-15);
        let mixed = DensityOperator::maximally_mixed(2);
        assert!((purity(&mixed) - 0.5).abs() < 1e-15);
        let rho = DensityOperator::new(CMatrix::diag(&[0.75, 0.25])).unwrap();
        assert!((purity(&rho) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn purity_in_range_for_random_states() {
        let mut rng = crate::rng::Rng::new(9);
        for dim in [2usize, 3, 4] {
            for _ in 0..20 {
                let rho = DensityOperator::new(crate::rng::random_density(dim, &mut rng)).unwrap();
                let p = purity(&rho);
                assert!(p >= 1.0 / dim as f64 - 1e-10 && p <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn dissipator_decay_from_excited() {
        let gen = damping_generator(1.0);
        let rho = DensityOperator::basis_state(2, 1);
        let d = apply_dissipator(&gen, &rho).unwrap();
        let expected = CMatrix::diag(&[1.0, -1.0]);
        assert!(d.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn dissipator_dark_state() {
        let gen = damping_generator(1.0);
        let rho = DensityOperator::basis_state(2, 0);
        let d = apply_dissipator(&gen, &rho).unwrap();
        assert!(d.matrix().max_abs() < 1e-15);
    }

    #[test]
    fn dissipator_coherence_decays_at_half_rate() {
        let gen = damping_generator(1.0);
        let rho = DensityOperator::algebraic(CMatrix::unit(2, 0, 1));
        let d = apply_dissipator(&gen, &rho).unwrap();
        let expected = CMatrix::unit(2, 0, 1).scale(c(-0.5, 0.0));
        assert!(d.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn liouvillian_commuting_drift_gives_zero() {
        let gen = LindbladGenerator::new(
            OperatorMatrix::hermitian(sigma_z()).unwrap(),
            vec![],
            vec![],
        )
        .unwrap();
        let rho = DensityOperator::maximally_mixed(2);
        let l = apply_liouvillian(&gen, &[], &rho).unwrap();
        assert!(l.matrix().max_abs() < 1e-15);
    }

    #[test]
    fn liouvillian_control_commutator() {
        let gen = LindbladGenerator::new(
            OperatorMatrix::hermitian(CMatrix::zeros(2)).unwrap(),
            vec![OperatorMatrix::hermitian(sigma_x()).unwrap()],
            vec![],
        )
        .unwrap();
        let rho = DensityOperator::basis_state(2, 0);
        let l = apply_liouvillian(&gen, &[core::f64::consts::PI], &rho).unwrap();
        // -i pi [sx, |0><0|] = -i pi (|1><0| - |0><1|)
        let mut expected = CMatrix::zeros(2);
        expected[(1, 0)] = c(0.0, -core::f64::consts::PI);
        expected[(0, 1)] = c(0.0, core::f64::consts::PI);
        assert!(l.matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn liouvillian_reduces_to_dissipator() {
        let gen = damping_generator(1.0);
        let rho = DensityOperator::basis_state(2, 1);
        let l = apply_liouvillian(&gen, &[], &rho).unwrap();
        assert!(l.matrix().max_abs_diff(&CMatrix::diag(&[1.0, -1.0])) < 1e-15);
    }

    #[test]
    fn liouvillian_rejects_control_count_mismatch() {
        let gen = damping_generator(1.0);
        let rho = DensityOperator::basis_state(2, 1);
        assert!(matches!(
            apply_liouvillian(&gen, &[0.5], &rho),
            Err(Error::ControlCountMismatch { .. })
        ));
    }

    #[test]
    fn liouvillian_output_traceless_and_hermitian_on_random_input() {
        let mut rng = crate::rng::Rng::new(17);
        for _ in 0..20 {
            let h0 = crate::rng::random_hermitian(3, 1.0, &mut rng);
            let h1 = crate::rng::random_hermitian(3, 1.0, &mut rng);
            let a = crate::rng::ginibre(3, &mut rng);
            let gen = LindbladGenerator::new(
                OperatorMatrix::hermitian(h0).unwrap(),
                vec![OperatorMatrix::hermitian(h1).unwrap()],
                vec![Channel {
                    operator: OperatorMatrix::general(a),
                    rate: rng.uniform(),
                }],
            )
            .unwrap();
            let rho = DensityOperator::new(crate::rng::random_density(3, &mut rng)).unwrap();
            let out = apply_liouvillian(&gen, &[rng.uniform_in(-1.0, 1.0)], &rho).unwrap();
            assert!(out.matrix().trace().norm() < 1e-12);
            assert!(out.matrix().hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn density_operator_validation() {
        assert!(DensityOperator::new(CMatrix::diag(&[0.5, 0.5])).is_ok());
        assert!(matches!(
            DensityOperator::new(CMatrix::diag(&[0.6, 0.6])),
            Err(Error::NotTraceOne { .. })
        ));
        assert!(matches!(
            DensityOperator::new(CMatrix::diag(&[1.5, -0.5])),
            Err(Error::NotPositive { .. })
        ));
        let mut non_herm = CMatrix::zeros(2);
        non_herm[(0, 0)] = c(1.0, 0.0);
        non_herm[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(
            DensityOperator::new(non_herm.clone()),
            Err(Error::NotHermitian { .. })
        ));
        // The same matrix is fine as an algebraic carrier.
        let _ = DensityOperator::algebraic(non_herm);
    }

    #[test]
    fn generator_rejects_negative_rate() {
        let r = LindbladGenerator::new(
            OperatorMatrix::hermitian(CMatrix::zeros(2)).unwrap(),
            vec![],
            vec![Channel {
                operator: OperatorMatrix::general(CMatrix::unit(2, 0, 1)),
                rate: -0.1,
            }],
        );
        assert!(r.is_err());
    }

    #[test]
    fn embed_operator_places_entries() {
        let op = sigma_x();
        let full = embed_operator(&op, &[0, 2], 3).unwrap();
        assert_eq!(full[(0, 2)], c(1.0, 0.0));
        assert_eq!(full[(2, 0)], c(1.0, 0.0));
        assert_eq!(full[(1, 1)], c(0.0, 0.0));
    }
}
