//! Lie-algebra rank test for the bilinear control system and basis-state
//! connectivity.
//!
//! The test answers reachability for *closed-system* (Hamiltonian) dynamics
//! only: full rank of the Lie closure of drift and control Hamiltonians over
//! traceless skew-Hermitian matrices means every unitary on the Hilbert
//! space can be generated. It says nothing conclusive about open systems,
//! where dissipation rates and competing timescales can block or enable
//! transitions regardless of the Hamiltonian algebra; the report text states
//! this caveat explicitly.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::quantum::OperatorMatrix;
use crate::{Error, Result};

/// Rank-revealing threshold for new Lie directions.
const RANK_TOL: f64 = 1e-10;

/// Outcome of the Lie closure computation.
#[derive(Debug, Clone, PartialEq)]
pub struct LieClosureReport {
    /// Dimension of the real Lie algebra generated by the drift and
    /// controls (global-phase direction projected out).
    pub generated_dimension: usize,
    /// d^2 - 1, the dimension of the traceless skew-Hermitian algebra.
    pub full_dimension: usize,
    pub controllable: bool,
    /// Depth of nested commutators taken before the closure stabilized.
    pub generations: usize,
    /// True when the depth cap stopped the iteration before stabilizing;
    /// reported distinctly from a converged closure.
    pub depth_capped: bool,
}

impl LieClosureReport {
    /// The open-system caveat attached to every report.
    pub fn caveat() -> &'static str {
        "Full Lie rank certifies closed-system (Hamiltonian) controllability only. \
         For open-system dynamics this criterion is not sufficient: dissipation \
         rates and competing timescales affect what is reachable, and purity \
         changes are invisible to the Hamiltonian algebra."
    }
}

/// Connectivity of computational basis states through nonzero matrix
/// elements of any generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport {
    pub dim: usize,
    /// Edges (i, j), i < j, present when any generator couples i and j.
    pub edges: Vec<(usize, usize)>,
    /// Connected components, each sorted, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
}

/// Traceless skew-Hermitian representative i (H - Tr(H)/d I) of a
/// Hamiltonian.
fn skew_traceless(h: &CMatrix) -> CMatrix {
    let d = h.dim();
    let mut out = h.scale(Complex64::new(0.0, 1.0));
    let shift = out.trace() / d as f64;
    for i in 0..d {
        out[(i, i)] -= shift;
    }
    out
}

/// Real Hilbert-Schmidt inner product on the space of matrices viewed as a
/// real vector space.
fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.hs_inner(b).re
}

/// Orthonormalize `candidate` against `basis` (twice, for numerical
/// stability); returns the normalized new direction if its residual exceeds
/// the rank threshold.
fn new_direction(basis: &[CMatrix], candidate: &CMatrix) -> Option<CMatrix> {
    let norm = candidate.frobenius_norm();
    if norm < 1e-14 {
        return None;
    }
    let mut v = candidate.scale(Complex64::new(1.0 / norm, 0.0));
    for _ in 0..2 {
        for b in basis {
            let coeff = real_inner(b, &v);
            v.axpy(Complex64::new(-coeff, 0.0), b);
        }
    }
    let residual = v.frobenius_norm();
    if residual <= RANK_TOL {
        return None;
    }
    Some(v.scale(Complex64::new(1.0 / residual, 0.0)))
}

fn check_hermitian(ops: &[&OperatorMatrix]) -> Result<usize> {
    let dim = ops[0].dim();
    for op in ops {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
        let defect = op.matrix().hermiticity_defect();
        if defect > 1e-12 * op.matrix().max_abs().max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
    }
    Ok(dim)
}

struct Closure {
    basis: Vec<CMatrix>,
    generations: usize,
    depth_capped: bool,
    full_dimension: usize,
}

fn lie_closure(h0: &OperatorMatrix, controls: &[OperatorMatrix]) -> Result<Closure> {
    let mut all: Vec<&OperatorMatrix> = vec![h0];
    all.extend(controls.iter());
    let dim = check_hermitian(&all)?;
    let full_dimension = dim * dim - 1;

    let generators: Vec<CMatrix> = all.iter().map(|op| skew_traceless(op.matrix())).collect();
    let mut basis: Vec<CMatrix> = Vec::new();
    let mut fresh: Vec<CMatrix> = Vec::new();
    for g in &generators {
        if let Some(v) = new_direction(&basis, g) {
            basis.push(v.clone());
            fresh.push(v);
        }
    }

    let depth_cap = 2 * dim * dim;
    let mut generations = 0;
    let mut depth_capped = false;
    while !fresh.is_empty() && basis.len() < full_dimension {
        if generations >= depth_cap {
            depth_capped = true;
            break;
        }
        generations += 1;
        let mut next_fresh = Vec::new();
        for x in &fresh {
            for g in &generators {
                let c = g.commutator(x);
                if let Some(v) = new_direction(&basis, &c) {
                    basis.push(v.clone());
                    next_fresh.push(v);
                }
            }
        }
        fresh = next_fresh;
    }
    Ok(Closure {
        basis,
        generations,
        depth_capped,
        full_dimension,
    })
}

/// Dimension of the Lie algebra generated by nested commutators of the
/// drift and control Hamiltonians, compared against full rank d^2 - 1.
///
/// Works in the real vector space of traceless skew-Hermitian matrices;
/// candidates enter the basis through rank-revealing orthonormalization
/// with threshold 1e-10. The iteration commutes each generator with every
/// newly found direction until nothing new appears (left-nested brackets
/// span the generated algebra) or the depth cap `2 d^2` is hit.
pub fn lie_rank(h0: &OperatorMatrix, controls: &[OperatorMatrix]) -> Result<LieClosureReport> {
    let closure = lie_closure(h0, controls)?;
    let generated_dimension = closure.basis.len();
    Ok(LieClosureReport {
        generated_dimension,
        full_dimension: closure.full_dimension,
        controllable: generated_dimension == closure.full_dimension,
        generations: closure.generations,
        depth_capped: closure.depth_capped,
    })
}

/// Orthonormal basis (traceless skew-Hermitian matrices) of the generated
/// Lie algebra; mainly a diagnostic, and the handle for closure-idempotence
/// checks.
pub fn lie_closure_basis(h0: &OperatorMatrix, controls: &[OperatorMatrix]) -> Result<Vec<CMatrix>> {
    Ok(lie_closure(h0, controls)?.basis)
}

/// Graph over computational basis states with an edge wherever any
/// generator has a matrix element of magnitude above 1e-12 between the
/// pair; reports edges and connected components.
pub fn connectivity_graph(
    h0: &OperatorMatrix,
    controls: &[OperatorMatrix],
) -> Result<ConnectivityReport> {
    let mut all: Vec<&OperatorMatrix> = vec![h0];
    all.extend(controls.iter());
    let dim = check_hermitian(&all)?;

    let mut edges = Vec::new();
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let coupled = all.iter().any(|op| op.matrix()[(i, j)].norm() > 1e-12);
            if coupled {
                edges.push((i, j));
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for i in 0..dim {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    let mut components: Vec<Vec<usize>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    components.sort_by_key(|g| g[0]);
    Ok(ConnectivityReport {
        dim,
        edges,
        components,
    })
}

/// Brute-force closure: enumerate every left-nested commutator of the
/// generators up to the given depth (no pruning), then measure the rank of
/// the whole collection through the eigenvalues of its real Gram matrix.
///
/// Exponential in depth; it exists as the independent oracle for
/// [`lie_rank`] in the test suites.
pub fn lie_rank_brute_force(
    h0: &OperatorMatrix,
    controls: &[OperatorMatrix],
    depth: usize,
) -> Result<usize> {
    let mut all: Vec<&OperatorMatrix> = vec![h0];
    all.extend(controls.iter());
    check_hermitian(&all)?;

    let generators: Vec<CMatrix> = all.iter().map(|op| skew_traceless(op.matrix())).collect();
    let mut collected: Vec<CMatrix> = Vec::new();
    let mut level: Vec<CMatrix> = generators.clone();
    collected.extend(level.iter().cloned());
    for _ in 1..depth {
        let mut next = Vec::new();
        for x in &level {
            for g in &generators {
                next.push(g.commutator(x));
            }
        }
        collected.extend(next.iter().cloned());
        level = next;
    }
    // Normalize nonzero elements so the Gram spectrum has a sane scale.
    let normalized: Vec<CMatrix> = collected
        .into_iter()
        .filter_map(|m| {
            let n = m.frobenius_norm();
            (n > 1e-13).then(|| m.scale(Complex64::new(1.0 / n, 0.0)))
        })
        .collect();
    if normalized.is_empty() {
        return Ok(0);
    }
    let m = normalized.len();
    let mut gram = CMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = Complex64::new(real_inner(&normalized[i], &normalized[j]), 0.0);
        }
    }
    let eigs = gram.hermitian_eigenvalues();
    let max_eig = eigs.last().copied().unwrap_or(0.0);
    Ok(eigs
        .iter()
        .filter(|&&e| e > 1e-9 * max_eig.max(1.0))
        .count())
}

/// Serialize the closure report plus connectivity as a human-readable
/// summary line (used by logs; the machine-readable form lives in the CLI).
pub fn report_summary(report: &LieClosureReport) -> String {
    format!(
        "Lie closure: {}/{} directions after {} generations{} -> {}",
        report.generated_dimension,
        report.full_dimension,
        report.generations,
        if report.depth_capped {
            " (depth cap hit)"
        } else {
            ""
        },
        if report.controllable {
            "controllable (closed system)"
        } else {
            "not controllable"
        }
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::pauli::*;
    use crate::rng;

    fn herm(m: CMatrix) -> OperatorMatrix {
        OperatorMatrix::hermitian(m).unwrap()
    }

    #[test]
    fn qubit_with_transverse_control_is_controllable() {
        let report = lie_rank(&herm(sigma_z()), &[herm(sigma_x())]).unwrap();
        assert_eq!(report.generated_dimension, 3);
        assert_eq!(report.full_dimension, 3);
        assert!(report.controllable);
        assert!(!report.depth_capped);
        let brute = lie_rank_brute_force(&herm(sigma_z()), &[herm(sigma_x())], 6).unwrap();
        assert_eq!(brute, 3);
    }

    #[test]
    fn commuting_generators_are_not_controllable() {
        let report = lie_rank(&herm(sigma_z()), &[herm(sigma_z())]).unwrap();
        assert_eq!(report.generated_dimension, 1);
        assert!(!report.controllable);
        let brute = lie_rank_brute_force(&herm(sigma_z()), &[herm(sigma_z())], 6).unwrap();
        assert_eq!(brute, 1);
    }

    #[test]
    fn two_qubit_ising_with_local_x_closes_on_six_directions() {
        // ZZ drift with local X controls generates only
        // span{XI, IX, ZZ, YZ, ZY, YY}: every cross bracket lands back in
        // the set ([XI,ZZ] ~ YZ, [IX,YZ] ~ YY, [ZZ,YZ] ~ XI, ...) and the
        // mixed brackets [YZ,ZY] and [YY,ZZ] vanish identically. Nothing of
        // weight one in Y or Z ever appears, so the system is not
        // controllable; full su(4) additionally needs local splittings in
        // the drift (see the coupled-qubit model tests).
        let h0 = herm(sigma_z().kron(&sigma_z()));
        let cx1 = herm(sigma_x().kron(&CMatrix::identity(2)));
        let cx2 = herm(CMatrix::identity(2).kron(&sigma_x()));
        let report = lie_rank(&h0, &[cx1.clone(), cx2.clone()]).unwrap();
        assert_eq!(report.generated_dimension, 6);
        assert_eq!(report.full_dimension, 15);
        assert!(!report.controllable);
        assert!(!report.depth_capped);
        let brute = lie_rank_brute_force(&h0, &[cx1, cx2], 6).unwrap();
        assert_eq!(brute, report.generated_dimension);
    }

    #[test]
    fn two_qubit_ising_with_local_splittings_reaches_full_rank() {
        // Adding local Z terms to the drift breaks the so(4)-like closure
        // and yields the full 15-dimensional algebra.
        let ident = CMatrix::identity(2);
        let mut h0 = sigma_z().kron(&sigma_z());
        h0.axpy(Complex64::new(0.5, 0.0), &sigma_z().kron(&ident));
        h0.axpy(Complex64::new(0.3, 0.0), &ident.kron(&sigma_z()));
        let cx1 = herm(sigma_x().kron(&ident));
        let cx2 = herm(ident.kron(&sigma_x()));
        let report = lie_rank(&herm(h0.clone()), &[cx1.clone(), cx2.clone()]).unwrap();
        assert_eq!(report.generated_dimension, 15);
        assert!(report.controllable);
        let brute = lie_rank_brute_force(&herm(h0), &[cx1, cx2], 6).unwrap();
        assert_eq!(brute, 15);
    }

    #[test]
    fn closure_is_idempotent() {
        // Feeding the closure's own basis back in as generators adds no new
        // directions, even when the original set was not closed.
        for (h0, controls) in [
            (sigma_z(), vec![sigma_x()]),
            (
                sigma_z().kron(&sigma_z()),
                vec![sigma_x().kron(&CMatrix::identity(2))],
            ),
        ] {
            let controls: Vec<OperatorMatrix> = controls.into_iter().map(herm).collect();
            let basis = lie_closure_basis(&herm(h0), &controls).unwrap();
            // Basis elements are skew-Hermitian iH; hand them back as the
            // Hermitian generators H = -i X.
            let hermitianized: Vec<OperatorMatrix> = basis
                .iter()
                .map(|x| herm(x.scale(Complex64::new(0.0, -1.0))))
                .collect();
            let again = lie_rank(&hermitianized[0], &hermitianized[1..]).unwrap();
            assert_eq!(again.generated_dimension, basis.len());
        }
    }

    #[test]
    fn dimension_invariant_under_unitary_conjugation() {
        let mut r = rng::Rng::new(55);
        for _ in 0..5 {
            let u = rng::haar_unitary(3, &mut r);
            let u_dag = u.adjoint();
            let h0 = rng::random_hermitian(3, 1.0, &mut r);
            let h1 = rng::random_hermitian(3, 1.0, &mut r);
            let before = lie_rank(&herm(h0.clone()), &[herm(h1.clone())])
                .unwrap()
                .generated_dimension;
            let conj = |m: &CMatrix| -> CMatrix { u.matmul(m).matmul(&u_dag) };
            let after = lie_rank(&herm(conj(&h0)), &[herm(conj(&h1))])
                .unwrap()
                .generated_dimension;
            assert_eq!(before, after);
        }
    }

    #[test]
    fn adding_controls_never_reduces_dimension() {
        let mut r = rng::Rng::new(61);
        let h0 = rng::random_hermitian(3, 1.0, &mut r);
        let h1 = rng::random_hermitian(3, 1.0, &mut r);
        let h2 = rng::random_hermitian(3, 1.0, &mut r);
        let small = lie_rank(&herm(h0.clone()), &[herm(h1.clone())])
            .unwrap()
            .generated_dimension;
        let large = lie_rank(&herm(h0), &[herm(h1), herm(h2)])
            .unwrap()
            .generated_dimension;
        assert!(large >= small);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let bad = OperatorMatrix::general(CMatrix::unit(2, 0, 1));
        assert!(matches!(
            lie_rank(&bad, &[]),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn connectivity_single_component_for_sx() {
        let rep = connectivity_graph(&herm(CMatrix::zeros(2)), &[herm(sigma_x())]).unwrap();
        assert_eq!(rep.components.len(), 1);
        assert_eq!(rep.components[0], alloc::vec![0, 1]);
    }

    #[test]
    fn connectivity_diagonal_generators_are_isolated() {
        let rep =
            connectivity_graph(&herm(sigma_z()), &[herm(CMatrix::diag(&[0.3, -0.7]))]).unwrap();
        assert_eq!(rep.components.len(), 2);
        assert!(rep.edges.is_empty());
    }

    #[test]
    fn connectivity_lambda_system() {
        // Couplings 0 <-> 2 and 1 <-> 2: one component through the shared
        // upper level.
        let mut c02 = CMatrix::zeros(3);
        c02[(0, 2)] = Complex64::ONE;
        c02[(2, 0)] = Complex64::ONE;
        let mut c12 = CMatrix::zeros(3);
        c12[(1, 2)] = Complex64::ONE;
        c12[(2, 1)] = Complex64::ONE;
        let rep = connectivity_graph(&herm(CMatrix::zeros(3)), &[herm(c02), herm(c12)]).unwrap();
        assert_eq!(rep.components.len(), 1);
        assert_eq!(rep.components[0], alloc::vec![0, 1, 2]);
        assert_eq!(rep.edges, alloc::vec![(0, 2), (1, 2)]);
    }
}
