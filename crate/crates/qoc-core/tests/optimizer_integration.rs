//! Cross-module integration: gate objectives driven through the full
//! optimizer, spectral constraints inside the loop, and consistency of the
//! three gate-fidelity certificates on an optimized field.

use num_complex::Complex64;
use qoc_core::cmatrix::pauli;
use qoc_core::functionals::{BasisStrategy, ControlObjective, GateObjective};
use qoc_core::krotov::{
    evaluate_objective, krotov_iterate, KrotovOptions, LambdaAdaptation, NullClock, ShapeFunction,
};
use qoc_core::models::{build_model, ModelSpec};
use qoc_core::spectral::{Band, SpectralConstraint, SpectralFilter};
use qoc_core::{CMatrix, ControlField, OperatorMatrix, TimeGrid};

fn dephasing_qubit() -> qoc_core::LindbladGenerator {
    build_model(&ModelSpec::TwoLevelDephasing {
        omega: 1.0,
        gamma_phi: 1e-4,
    })
    .unwrap()
}

fn gate_objective(strategy: BasisStrategy, weights: Option<Vec<f64>>) -> ControlObjective {
    // Target: bit flip on the qubit.
    ControlObjective::Gate(
        GateObjective::new(
            OperatorMatrix::unitary(pauli::sigma_x()).unwrap(),
            vec![0, 1],
            strategy,
            weights,
        )
        .unwrap(),
    )
}

fn resonant_guess(grid: TimeGrid) -> ControlField {
    let t_final = grid.t_final();
    ControlField::from_fn(grid, 1, move |_, t| {
        0.25 * (std::f64::consts::PI * t / t_final).sin().powi(2) * t.sin()
    })
}

#[test]
fn gate_optimization_reaches_goal_with_each_strategy() {
    let gen = dephasing_qubit();
    let grid = TimeGrid::new(6.0, 300).unwrap();
    for strategy in [
        BasisStrategy::FullBasis,
        BasisStrategy::Reduced3,
        BasisStrategy::DPlus1,
        BasisStrategy::DPlus2,
    ] {
        let objective = gate_objective(strategy, None);
        let mut options = KrotovOptions::new(1.0, 300, 0.99);
        options.lambda_adaptation = LambdaAdaptation::HalveOnNonMonotone;
        let rec = krotov_iterate(
            &gen,
            &objective,
            &resonant_guess(grid.clone()),
            &options,
            None,
            &NullClock,
        )
        .unwrap();
        assert!(
            rec.converged,
            "{strategy:?}: F = {} after {} iterations ({})",
            rec.final_fidelity(),
            rec.n_iterations(),
            rec.reason
        );
        assert!(rec.monotone, "{strategy:?} lost monotonicity");
    }
}

#[test]
fn certificates_agree_on_an_optimized_field() {
    // Optimize hard against the reduced certificate, then check that the
    // other two certificates also rate the result highly.
    let gen = dephasing_qubit();
    let grid = TimeGrid::new(6.0, 300).unwrap();
    let mut options = KrotovOptions::new(1.0, 600, 0.9995);
    options.lambda_adaptation = LambdaAdaptation::HalveOnNonMonotone;
    let rec = krotov_iterate(
        &gen,
        &gate_objective(BasisStrategy::Reduced3, None),
        &resonant_guess(grid),
        &options,
        None,
        &NullClock,
    )
    .unwrap();
    assert!(rec.converged, "F = {}", rec.final_fidelity());
    for strategy in [BasisStrategy::FullBasis, BasisStrategy::DPlus1] {
        let f = evaluate_objective(&gen, &gate_objective(strategy, None), &rec.field).unwrap();
        assert!(
            f > 0.995,
            "{strategy:?} rates the reduced-certificate optimum at {f}"
        );
    }
}

#[test]
fn weighted_costates_still_converge_to_the_same_gate() {
    let gen = dephasing_qubit();
    let grid = TimeGrid::new(6.0, 300).unwrap();
    let mut options = KrotovOptions::new(1.0, 400, 0.99);
    options.lambda_adaptation = LambdaAdaptation::HalveOnNonMonotone;
    let rec = krotov_iterate(
        &gen,
        &gate_objective(BasisStrategy::Reduced3, Some(vec![1.5, 1.0, 0.5])),
        &resonant_guess(grid),
        &options,
        None,
        &NullClock,
    )
    .unwrap();
    assert!(rec.converged, "F = {}", rec.final_fidelity());
    // The unweighted certificate agrees that the gate is implemented.
    let unweighted = evaluate_objective(
        &gen,
        &gate_objective(BasisStrategy::Reduced3, None),
        &rec.field,
    )
    .unwrap();
    assert!(unweighted > 0.985, "unweighted rating {unweighted}");
}

#[test]
fn spectral_constraint_inside_the_loop_confines_updates() {
    let gen = dephasing_qubit();
    let grid = TimeGrid::new(6.0, 300).unwrap();
    let filter = SpectralFilter::from_bands(
        &grid,
        &[Band {
            omega_min: 3.0,
            omega_max: f64::MAX,
            value: 1.0,
        }],
        100.0,
    )
    .unwrap();
    let constraint = SpectralConstraint::single(filter);
    let mut options = KrotovOptions::new(1.0, 400, 0.99);
    options.shape = ShapeFunction::FlatWithRamps { ramp_fraction: 0.1 };
    options.lambda_adaptation = LambdaAdaptation::HalveOnNonMonotone;
    let objective = ControlObjective::state_to_state(
        qoc_core::DensityOperator::basis_state(2, 0),
        qoc_core::DensityOperator::basis_state(2, 1),
    )
    .unwrap();
    let guess = resonant_guess(grid.clone());
    let rec = krotov_iterate(
        &gen,
        &objective,
        &guess,
        &options,
        Some(&constraint),
        &NullClock,
    )
    .unwrap();
    assert!(rec.converged, "F = {}", rec.final_fidelity());
    assert!(!rec.spectral_warning, "plateau shape is compatible");
    // Per-iteration penalties were recorded.
    assert!(rec.iterations[1..].iter().any(|s| s.spectral_penalty > 0.0));
    let out_of_band =
        qoc_core::spectral::spectral_power_fraction(&grid, rec.field.samples(0), |w| w > 3.0);
    assert!(out_of_band < 0.01, "out-of-band fraction {out_of_band}");
}

#[test]
fn sin_squared_shape_with_constraint_raises_the_warning() {
    let gen = dephasing_qubit();
    let grid = TimeGrid::new(6.0, 200).unwrap();
    let filter = SpectralFilter::from_bands(
        &grid,
        &[Band {
            omega_min: 3.0,
            omega_max: f64::MAX,
            value: 1.0,
        }],
        50.0,
    )
    .unwrap();
    let constraint = SpectralConstraint::single(filter);
    let mut options = KrotovOptions::new(1.0, 10, 0.999);
    options.shape = ShapeFunction::SinSquared;
    let objective = ControlObjective::state_to_state(
        qoc_core::DensityOperator::basis_state(2, 0),
        qoc_core::DensityOperator::basis_state(2, 1),
    )
    .unwrap();
    let rec = krotov_iterate(
        &gen,
        &objective,
        &resonant_guess(grid),
        &options,
        Some(&constraint),
        &NullClock,
    )
    .unwrap();
    // The warning is raised and monotonicity is logged, not asserted.
    assert!(rec.spectral_warning);
}

#[test]
fn full_basis_units_propagate_through_the_optimizer() {
    // The full-basis path drives non-Hermitian matrix units through the
    // dynamics; the functional must stay real and the optimizer healthy.
    let gen = dephasing_qubit();
    let grid = TimeGrid::new(6.0, 150).unwrap();
    let objective = gate_objective(BasisStrategy::FullBasis, None);
    let guess = resonant_guess(grid);
    let f = evaluate_objective(&gen, &objective, &guess).unwrap();
    assert!(f.is_finite());
    assert!((0.0..=1.0 + 1e-9).contains(&f));
}

#[test]
fn embedded_gate_on_ladder_subspace_optimizes() {
    // Qubit flip on the two lowest levels of a 4-level anharmonic ladder;
    // leakage into the upper levels is penalized by the functional itself.
    let gen = build_model(&ModelSpec::AnharmonicLadder {
        levels: 4,
        omega: 1.0,
        anharmonicity: -0.5,
        gamma: 1e-4,
        flat_decay: false,
    })
    .unwrap();
    let flip = {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = Complex64::ONE;
        m[(1, 0)] = Complex64::ONE;
        m
    };
    let objective = ControlObjective::Gate(
        GateObjective::new(
            OperatorMatrix::unitary(flip).unwrap(),
            vec![0, 1],
            BasisStrategy::DPlus1,
            None,
        )
        .unwrap(),
    );
    let grid = TimeGrid::new(16.0, 640).unwrap();
    let t_final = grid.t_final();
    let guess = ControlField::from_fn(grid, 1, move |_, t| {
        0.15 * (std::f64::consts::PI * t / t_final).sin().powi(2) * t.sin()
    });
    let mut options = KrotovOptions::new(1.0, 400, 0.95);
    options.lambda_adaptation = LambdaAdaptation::HalveOnNonMonotone;
    let rec = krotov_iterate(&gen, &objective, &guess, &options, None, &NullClock).unwrap();
    assert!(
        rec.converged,
        "F = {} after {} iterations ({})",
        rec.final_fidelity(),
        rec.n_iterations(),
        rec.reason
    );
    assert!(rec.monotone);
}
