//! Declarative run configuration: one JSON document describing the system,
//! grid, objective, guess pulse, optimizer options and output location.
//!
//! Matrices are nested arrays of `[re, im]` pairs, row-major. Paths inside a
//! config resolve relative to the config file's directory. Parsing is
//! strict: unknown fields are rejected so that typos fail loudly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qoc_core::controllability;
use qoc_core::functionals::{BasisStrategy, ControlObjective, GateObjective};
use qoc_core::krotov::{KrotovOptions, LambdaAdaptation, ShapeFunction};
use qoc_core::models::{build_model, logical_subspace, ModelSpec};
use qoc_core::spectral::{Band, SpectralConstraint, SpectralFilter};
use qoc_core::{
    CMatrix, Channel, ControlField, DensityOperator, LindbladGenerator, OperatorMatrix, TimeGrid,
};

use crate::{CliError, CliResult};

fn cfg_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Complex matrix as rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixData(pub Vec<Vec<[f64; 2]>>);

impl MatrixData {
    pub fn to_cmatrix(&self) -> CliResult<CMatrix> {
        let n = self.0.len();
        if n == 0 {
            return Err(cfg_err("matrix must be nonempty"));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in &self.0 {
            if row.len() != n {
                return Err(cfg_err(format!(
                    "matrix must be square: {n} rows but a row of length {}",
                    row.len()
                )));
            }
            for &[re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    return Err(cfg_err("matrix entries must be finite"));
                }
                data.push(qoc_core::num_complex::Complex64::new(re, im));
            }
        }
        CMatrix::from_vec(n, data).map_err(|e| cfg_err(e.to_string()))
    }

    pub fn from_cmatrix(m: &CMatrix) -> Self {
        let n = m.dim();
        MatrixData(
            (0..n)
                .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    TwoLevelDamping {
        omega: f64,
        gamma: f64,
    },
    TwoLevelDephasing {
        omega: f64,
        gamma_phi: f64,
    },
    LambdaDecay {
        #[serde(default)]
        omega1: f64,
        #[serde(default)]
        omega2: f64,
        gamma0: f64,
        gamma1: f64,
    },
    AnharmonicLadder {
        levels: usize,
        omega: f64,
        anharmonicity: f64,
        gamma: f64,
        #[serde(default)]
        flat_decay: bool,
    },
    TwoQubitDephasing {
        coupling: f64,
        omega1: f64,
        omega2: f64,
        gamma_phi: f64,
    },
}

impl ModelConfig {
    pub fn to_spec(&self) -> ModelSpec {
        match *self {
            ModelConfig::TwoLevelDamping { omega, gamma } => {
                ModelSpec::TwoLevelDamping { omega, gamma }
            }
            ModelConfig::TwoLevelDephasing { omega, gamma_phi } => {
                ModelSpec::TwoLevelDephasing { omega, gamma_phi }
            }
            ModelConfig::LambdaDecay {
                omega1,
                omega2,
                gamma0,
                gamma1,
            } => ModelSpec::LambdaDecay {
                omega1,
                omega2,
                gamma0,
                gamma1,
            },
            ModelConfig::AnharmonicLadder {
                levels,
                omega,
                anharmonicity,
                gamma,
                flat_decay,
            } => ModelSpec::AnharmonicLadder {
                levels,
                omega,
                anharmonicity,
                gamma,
                flat_decay,
            },
            ModelConfig::TwoQubitDephasing {
                coupling,
                omega1,
                omega2,
                gamma_phi,
            } => ModelSpec::TwoQubitDephasing {
                coupling,
                omega1,
                omega2,
                gamma_phi,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub operator: MatrixData,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatricesConfig {
    pub drift: MatrixData,
    #[serde(default)]
    pub controls: Vec<MatrixData>,
    #[serde(default)]
    pub channels: Vec<ChannelConfig>,
}

/// System description: a named model or explicit matrices (exactly one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<MatricesConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_final: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisName {
    #[serde(rename = "full")]
    Full,
    #[serde(rename = "reduced3")]
    Reduced3,
    #[serde(rename = "dplus1")]
    DPlus1,
    #[serde(rename = "dplus2")]
    DPlus2,
}

impl BasisName {
    fn to_strategy(self) -> BasisStrategy {
        match self {
            BasisName::Full => BasisStrategy::FullBasis,
            BasisName::Reduced3 => BasisStrategy::Reduced3,
            BasisName::DPlus1 => BasisStrategy::DPlus1,
            BasisName::DPlus2 => BasisStrategy::DPlus2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveConfig {
    StateToState {
        initial: MatrixData,
        target: MatrixData,
    },
    Gate {
        target: MatrixData,
        basis: BasisName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        /// Indices of the logical subspace; defaults to the model's logical
        /// subspace, or the whole space for explicit matrices.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        logical: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GuessConfig {
    /// Constant amplitude.
    Constant { amplitude: f64 },
    /// Gaussian bump `a exp(-(t - center)^2 / (2 width^2))`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// sin^2-windowed sinusoid `a sin^2(pi t / T) sin(frequency t + phase)`.
    WindowedSine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Samples from a pulse CSV (column `u_<k>` for control k).
    File { path: String },
}

/// One guess for all controls, or one per control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GuessSpec {
    One(GuessConfig),
    PerControl(Vec<GuessConfig>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    #[default]
    SinSquared,
    FlatRamps {
        ramp_fraction: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AdaptationConfig {
    #[default]
    Fixed,
    HalveOnNonMonotone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsConfig {
    pub lambda: f64,
    pub max_iterations: usize,
    pub fidelity_goal: f64,
    #[serde(default)]
    pub delta_f_tolerance: f64,
    #[serde(default)]
    pub shape: ShapeConfig,
    #[serde(default)]
    pub lambda_adaptation: AdaptationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub alpha: f64,
    pub bands: Vec<BandConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FilterSpec {
    One(FilterConfig),
    Many(Vec<FilterConfig>),
}

/// The full run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Seed for randomized utilities; recorded for reproducibility.
    #[serde(default)]
    pub seed: u64,
    pub system: SystemConfig,
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<MatrixData>,
    /// Optional target for the observables fidelity column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_state: Option<MatrixData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guess: Option<GuessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_filter: Option<FilterSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

/// A parsed config plus the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| cfg_err(format!("cannot parse config {}: {e}", path.display())))?;
        let base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(LoadedConfig { config, base_dir })
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn grid(&self) -> CliResult<TimeGrid> {
        TimeGrid::new(self.config.grid.t_final, self.config.grid.n_steps)
            .map_err(|e| cfg_err(e.to_string()))
    }

    /// Build the Lindblad generator, plus the model spec when one was named
    /// (used to default the logical subspace).
    pub fn generator(&self) -> CliResult<(LindbladGenerator, Option<ModelSpec>)> {
        let sys = &self.config.system;
        match (&sys.model, &sys.matrices) {
            (Some(_), Some(_)) => Err(cfg_err("specify either a model or matrices, not both")),
            (None, None) => Err(cfg_err("system needs a model or explicit matrices")),
            (Some(m), None) => {
                let spec = m.to_spec();
                let gen = build_model(&spec).map_err(|e| cfg_err(e.to_string()))?;
                Ok((gen, Some(spec)))
            }
            (None, Some(mats)) => {
                let drift = OperatorMatrix::hermitian(mats.drift.to_cmatrix()?)
                    .map_err(|e| cfg_err(format!("drift: {e}")))?;
                let controls = mats
                    .controls
                    .iter()
                    .enumerate()
                    .map(|(j, m)| {
                        OperatorMatrix::hermitian(m.to_cmatrix()?)
                            .map_err(|e| cfg_err(format!("control {j}: {e}")))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                let channels = mats
                    .channels
                    .iter()
                    .map(|c| {
                        Ok(Channel {
                            operator: OperatorMatrix::general(c.operator.to_cmatrix()?),
                            rate: c.rate,
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                let gen = LindbladGenerator::new(drift, controls, channels)
                    .map_err(|e| cfg_err(e.to_string()))?;
                Ok((gen, None))
            }
        }
    }

    pub fn objective(
        &self,
        gen: &LindbladGenerator,
        model: Option<&ModelSpec>,
    ) -> CliResult<ControlObjective> {
        let obj = self
            .config
            .objective
            .as_ref()
            .ok_or_else(|| cfg_err("this command needs an `objective` section"))?;
        match obj {
            ObjectiveConfig::StateToState { initial, target } => {
                let initial = DensityOperator::new(initial.to_cmatrix()?)
                    .map_err(|e| cfg_err(format!("objective initial state: {e}")))?;
                let target = DensityOperator::new(target.to_cmatrix()?)
                    .map_err(|e| cfg_err(format!("objective target state: {e}")))?;
                if initial.dim() != gen.dim() {
                    return Err(cfg_err(format!(
                        "objective states have dimension {}, system has {}",
                        initial.dim(),
                        gen.dim()
                    )));
                }
                ControlObjective::state_to_state(initial, target)
                    .map_err(|e| cfg_err(e.to_string()))
            }
            ObjectiveConfig::Gate {
                target,
                basis,
                weights,
                logical,
            } => {
                let target_m = target.to_cmatrix()?;
                let logical = match logical {
                    Some(ix) => ix.clone(),
                    None => match model {
                        Some(spec) => logical_subspace(spec),
                        None => (0..gen.dim()).collect(),
                    },
                };
                if *logical.iter().max().unwrap_or(&0) >= gen.dim() {
                    return Err(cfg_err(format!(
                        "logical indices {logical:?} exceed system dimension {}",
                        gen.dim()
                    )));
                }
                let target_op = OperatorMatrix::unitary(target_m)
                    .map_err(|e| cfg_err(format!("gate target: {e}")))?;
                let gate =
                    GateObjective::new(target_op, logical, basis.to_strategy(), weights.clone())
                        .map_err(|e| cfg_err(e.to_string()))?;
                Ok(ControlObjective::Gate(gate))
            }
        }
    }

    /// The initial state for bare propagation.
    pub fn initial_state(&self, gen: &LindbladGenerator) -> CliResult<DensityOperator> {
        let m = self
            .config
            .initial_state
            .as_ref()
            .ok_or_else(|| cfg_err("propagation needs an `initial_state`"))?;
        let rho = DensityOperator::new(m.to_cmatrix()?)
            .map_err(|e| cfg_err(format!("initial_state: {e}")))?;
        if rho.dim() != gen.dim() {
            return Err(cfg_err(format!(
                "initial_state has dimension {}, system has {}",
                rho.dim(),
                gen.dim()
            )));
        }
        Ok(rho)
    }

    pub fn target_state(&self, gen: &LindbladGenerator) -> CliResult<Option<DensityOperator>> {
        match &self.config.target_state {
            None => Ok(None),
            Some(m) => {
                let rho = DensityOperator::new(m.to_cmatrix()?)
                    .map_err(|e| cfg_err(format!("target_state: {e}")))?;
                if rho.dim() != gen.dim() {
                    return Err(cfg_err(format!(
                        "target_state has dimension {}, system has {}",
                        rho.dim(),
                        gen.dim()
                    )));
                }
                Ok(Some(rho))
            }
        }
    }

    fn guess_list(&self, n_controls: usize) -> CliResult<Vec<GuessConfig>> {
        match &self.config.guess {
            None => Ok(vec![GuessConfig::Constant { amplitude: 0.0 }; n_controls]),
            Some(GuessSpec::One(g)) => Ok(vec![g.clone(); n_controls]),
            Some(GuessSpec::PerControl(gs)) => {
                if gs.len() != n_controls {
                    return Err(cfg_err(format!(
                        "guess list has {} entries, system has {} controls",
                        gs.len(),
                        n_controls
                    )));
                }
                Ok(gs.clone())
            }
        }
    }

    /// Materialize the guess on a grid, scaling parametric amplitudes by
    /// `amplitude_scale` (used by duration scans to conserve pulse area).
    pub fn guess_field(
        &self,
        grid: &TimeGrid,
        n_controls: usize,
        amplitude_scale: f64,
    ) -> CliResult<ControlField> {
        let guesses = self.guess_list(n_controls)?;
        let n = grid.n_steps();
        let t_final = grid.t_final();
        let mut samples: Vec<Vec<f64>> = Vec::with_capacity(n_controls);
        for (c, g) in guesses.iter().enumerate() {
            let row: Vec<f64> = match g {
                GuessConfig::Constant { amplitude } => {
                    vec![amplitude * amplitude_scale; n]
                }
                GuessConfig::Gaussian {
                    amplitude,
                    center,
                    width,
                } => {
                    if *width <= 0.0 {
                        return Err(cfg_err("gaussian guess width must be positive"));
                    }
                    (0..n)
                        .map(|i| {
                            let t = grid.control_time(i);
                            let z = (t - center) / width;
                            amplitude * amplitude_scale * (-0.5 * z * z).exp()
                        })
                        .collect()
                }
                GuessConfig::WindowedSine {
                    amplitude,
                    frequency,
                    phase,
                } => (0..n)
                    .map(|i| {
                        let t = grid.control_time(i);
                        let window = (std::f64::consts::PI * t / t_final).sin().powi(2);
                        amplitude * amplitude_scale * window * (frequency * t + phase).sin()
                    })
                    .collect(),
                GuessConfig::File { path } => {
                    if amplitude_scale != 1.0 {
                        return Err(cfg_err(
                            "file guesses cannot be amplitude-rescaled in a scan; use a parametric guess",
                        ));
                    }
                    let full = self.resolve(path);
                    let pulse = crate::output::read_pulse_csv(&full)?;
                    if pulse.len() <= c {
                        return Err(cfg_err(format!(
                            "pulse file {} has {} control columns, need at least {}",
                            full.display(),
                            pulse.len(),
                            c + 1
                        )));
                    }
                    if pulse[c].len() != n {
                        return Err(cfg_err(format!(
                            "pulse file {} has {} samples, grid has {n}",
                            full.display(),
                            pulse[c].len()
                        )));
                    }
                    pulse[c].clone()
                }
            };
            samples.push(row);
        }
        ControlField::new(grid.clone(), samples).map_err(|e| cfg_err(e.to_string()))
    }

    pub fn krotov_options(&self) -> CliResult<KrotovOptions> {
        let o = self
            .config
            .options
            .as_ref()
            .ok_or_else(|| cfg_err("this command needs an `options` section"))?;
        let shape = match &o.shape {
            ShapeConfig::SinSquared => ShapeFunction::SinSquared,
            ShapeConfig::FlatRamps { ramp_fraction } => ShapeFunction::FlatWithRamps {
                ramp_fraction: *ramp_fraction,
            },
        };
        let options = KrotovOptions {
            lambda: o.lambda,
            max_iterations: o.max_iterations,
            fidelity_goal: o.fidelity_goal,
            delta_f_tolerance: o.delta_f_tolerance,
            shape,
            lambda_adaptation: match o.lambda_adaptation {
                AdaptationConfig::Fixed => LambdaAdaptation::Fixed,
                AdaptationConfig::HalveOnNonMonotone => LambdaAdaptation::HalveOnNonMonotone,
            },
            amplitude_limit: o.amplitude_limit,
        };
        options.validate().map_err(|e| cfg_err(e.to_string()))?;
        Ok(options)
    }

    pub fn spectral_constraint(&self, grid: &TimeGrid) -> CliResult<Option<SpectralConstraint>> {
        let specs: Vec<&FilterConfig> = match &self.config.spectral_filter {
            None => return Ok(None),
            Some(FilterSpec::One(f)) => vec![f],
            Some(FilterSpec::Many(fs)) => fs.iter().collect(),
        };
        let mut filters = Vec::with_capacity(specs.len());
        for f in specs {
            let bands: Vec<Band> = f
                .bands
                .iter()
                .map(|b| Band {
                    omega_min: b.omega_min,
                    omega_max: b.omega_max,
                    value: b.value,
                })
                .collect();
            filters.push(
                SpectralFilter::from_bands(grid, &bands, f.alpha)
                    .map_err(|e| cfg_err(e.to_string()))?,
            );
        }
        SpectralConstraint::new(filters)
            .map(Some)
            .map_err(|e| cfg_err(e.to_string()))
    }

    pub fn t_list(&self) -> CliResult<Vec<f64>> {
        let list = self
            .config
            .t_list
            .as_ref()
            .ok_or_else(|| cfg_err("scan needs a `t_list`"))?;
        qoc_core::krotov::validate_t_list(list).map_err(|e| cfg_err(e.to_string()))?;
        Ok(list.clone())
    }

    /// Controllability inputs: drift and controls as Hermitian operators.
    pub fn hamiltonian_parts(
        &self,
    ) -> CliResult<(OperatorMatrix, Vec<OperatorMatrix>, LindbladGenerator)> {
        let (gen, _) = self.generator()?;
        Ok((gen.drift().clone(), gen.controls().to_vec(), gen))
    }
}

/// Run the controllability analysis for a loaded config.
pub fn controllability_reports(
    loaded: &LoadedConfig,
) -> CliResult<(
    controllability::LieClosureReport,
    controllability::ConnectivityReport,
)> {
    let (drift, controls, _) = loaded.hamiltonian_parts()?;
    let lie = controllability::lie_rank(&drift, &controls)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let conn = controllability::connectivity_graph(&drift, &controls)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok((lie, conn))
}
