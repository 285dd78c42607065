use serde::{Deserialize, Serialize};

use crate::dynamics::{InitialCondition, PiecewiseFn};

/// Experiment definition read from `--config`. The `experiment` key must match
/// the subcommand being run; unknown keys are rejected everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Experiment {
    Simulate(SimulateConfig),
    VerifyIdentity(IdentityConfig),
    VerifyCoupling(CouplingConfig),
    ColourPosition(ColourConfig),
    Density(DensityConfig),
    Fluctuations(FluctuationConfig),
    Classify(ClassifyConfig),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Simulate(_) => "simulate",
            Experiment::VerifyIdentity(_) => "verify-identity",
            Experiment::VerifyCoupling(_) => "verify-coupling",
            Experiment::ColourPosition(_) => "colour-position",
            Experiment::Density(_) => "density",
            Experiment::Fluctuations(_) => "fluctuations",
            Experiment::Classify(_) => "classify",
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub ic: InitialCondition,
    /// Number of labels simulated.
    pub n: usize,
    pub horizon: f64,
    /// Right wall on particle 1 as `[t, value, jump]` breakpoints; absent = no wall.
    #[serde(default)]
    pub wall: Option<PiecewiseFn>,
    /// 1 writes the full trajectory; more writes final positions per replica.
    #[serde(default = "one")]
    pub replicas: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            ic: InitialCondition::step(),
            n: 10,
            horizon: 10.0,
            wall: None,
            replicas: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityCase {
    pub ic: InitialCondition,
    #[serde(default)]
    pub wall: Option<PiecewiseFn>,
    pub n: usize,
    pub horizon: f64,
    pub s: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityConfig {
    pub cases: Vec<IdentityCase>,
    #[serde(default = "default_identity_samples")]
    pub samples: usize,
}

fn default_identity_samples() -> usize {
    10_000
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self {
            cases: vec![IdentityCase {
                ic: InitialCondition::step(),
                wall: Some(PiecewiseFn::zero()),
                n: 1,
                horizon: 1.0,
                s: vec![-1, 0],
            }],
            samples: default_identity_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathwiseConfig {
    /// Number of random (initial condition, seed) pairs.
    pub cases: usize,
    pub max_n: usize,
    pub max_horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftCase {
    /// `(label, shift)` pairs.
    pub shifts: Vec<(usize, i64)>,
    pub horizon: f64,
    pub s: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OnePointCase {
    pub ic: InitialCondition,
    pub n: usize,
    pub horizon: f64,
    pub s: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    #[serde(default)]
    pub pathwise: Option<PathwiseConfig>,
    #[serde(default)]
    pub shifted_minimum: Vec<ShiftCase>,
    #[serde(default)]
    pub one_point: Vec<OnePointCase>,
    #[serde(default = "default_identity_samples")]
    pub samples: usize,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            pathwise: Some(PathwiseConfig {
                cases: 200,
                max_n: 6,
                max_horizon: 4.0,
            }),
            shifted_minimum: vec![ShiftCase {
                shifts: vec![(1, 0), (2, -2)],
                horizon: 1.0,
                s: 0,
            }],
            one_point: vec![OnePointCase {
                ic: InitialCondition::HalfPeriodic { d: 2.0 },
                n: 3,
                horizon: 2.0,
                s: vec![-3, -2, -1],
            }],
            samples: default_identity_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColourConfig {
    pub sequences: usize,
    pub max_len: usize,
    pub window: (i64, i64),
    pub exchange_max_width: i64,
    pub pi_cases: usize,
    pub pi_max_n: usize,
}

impl Default for ColourConfig {
    fn default() -> Self {
        Self {
            sequences: 10_000,
            max_len: 12,
            window: (-6, 6),
            exchange_max_width: 8,
            pi_cases: 1_000,
            pi_max_n: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockProbe {
    /// Tagged label.
    pub label: usize,
    /// Sites counted on each side of the tagged particle.
    pub window: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    /// Half-periodic spacing; 1 is step.
    pub d: f64,
    pub horizon: f64,
    pub replicas: usize,
    pub bin_width: u64,
    #[serde(default)]
    pub wall: Option<PiecewiseFn>,
    /// Margin around profile kinks, in units of `T^{2/3}` sites.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub shock_probe: Option<ShockProbe>,
}

fn default_margin() -> f64 {
    3.0
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            d: 2.0,
            horizon: 100.0,
            replicas: 50,
            bin_width: 10,
            wall: None,
            margin: default_margin(),
            shock_probe: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluctuationConfig {
    pub ic: InitialCondition,
    #[serde(default)]
    pub wall: Option<PiecewiseFn>,
    pub alpha: f64,
    pub xi: f64,
    pub horizon: f64,
    pub samples: usize,
    /// Also sample the wall-only and initial-data-only components and report the
    /// product-form discrepancy.
    #[serde(default)]
    pub decoupling: bool,
    /// Levels `s` at which `P(S ≥ s)` is reported.
    #[serde(default)]
    pub tail_levels: Vec<f64>,
}

impl Default for FluctuationConfig {
    fn default() -> Self {
        Self {
            ic: InitialCondition::step(),
            wall: None,
            alpha: 0.25,
            xi: 0.0,
            horizon: 100.0,
            samples: 1_000,
            decoupling: false,
            tail_levels: vec![1.0, 2.0, 3.0, 4.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub d: f64,
    pub alpha: Vec<f64>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            d: 1.0,
            alpha: vec![0.05, 0.1, 0.105, 1.0 / 9.0, 0.25],
        }
    }
}
