//! JSON configuration schemas for the batch commands. Every document is
//! schema-validated on load: unknown keys are rejected, and scheme pieces
//! are resolved against the library's id registry before anything runs.

use serde::Deserialize;

use varreg_core::discrepancy::Discrepancy;
use varreg_core::point::Point;
use varreg_core::regularizers::Regularizer;
use varreg_core::scheme::{ForwardOp, Scheme};
use varreg_core::solvers::SolverConfig;
use varreg_core::Matrix;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum ForwardSpec {
    Identity { dim: usize },
    Linear { matrix: Vec<Vec<f64>> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub forward: ForwardSpec,
    /// Discrepancy id: `sqnorm`, `pnorm:p`, `bregman1:J`, `bregman2:J`,
    /// `mismatch2d`, `kl`.
    pub discrepancy: String,
    /// Regularizer id: `sqnorm`, `l1`, `abs_shift`.
    pub regularizer: String,
}

impl SchemeSpec {
    pub fn build(&self) -> Result<Scheme, String> {
        let forward = match &self.forward {
            ForwardSpec::Identity { dim } => {
                if *dim == 0 {
                    return Err("forward dimension must be positive".into());
                }
                ForwardOp::identity(*dim)
            }
            ForwardSpec::Linear { matrix } => {
                let m = Matrix::from_rows(matrix).map_err(|e| e.to_string())?;
                ForwardOp::linear(m)
            }
        };
        let dim = forward.out_dim();
        let discrepancy = Discrepancy::from_id(&self.discrepancy, dim)
            .ok_or_else(|| format!("unknown discrepancy id '{}'", self.discrepancy))?;
        let regularizer = Regularizer::from_id(&self.regularizer)
            .ok_or_else(|| format!("unknown regularizer id '{}'", self.regularizer))?;
        Scheme::new(forward, discrepancy, regularizer).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub xtol: Option<f64>,
    pub ftol: Option<f64>,
    pub grid_points: Option<usize>,
    pub bracket: Option<[f64; 2]>,
    pub max_iter: Option<usize>,
}

impl SolverSpec {
    pub fn build(&self) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            xtol: self.xtol.unwrap_or(d.xtol),
            ftol: self.ftol.unwrap_or(d.ftol),
            grid_points: self.grid_points.unwrap_or(d.grid_points),
            bracket: self.bracket.map(|b| (b[0], b[1])).unwrap_or(d.bracket),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            max_minimizers: d.max_minimizers,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ProblemKind {
    Tikhonov,
    Ivanov,
    Morozov,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub problem: ProblemKind,
    pub scheme: SchemeSpec,
    pub y: Vec<f64>,
    /// alpha, tau or delta, depending on the problem kind.
    pub parameter: f64,
    #[serde(default)]
    pub solver: SolverSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure1Config {
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_xrange")]
    pub xrange: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_alphas() -> Vec<f64> {
    vec![0.5, 1.0, 1.5]
}

fn default_xrange() -> [f64; 2] {
    [-1.5, 1.5]
}

fn default_samples() -> usize {
    301
}

impl Default for Figure1Config {
    fn default() -> Self {
        Figure1Config {
            alphas: default_alphas(),
            xrange: default_xrange(),
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosscheckConfig {
    pub scheme: SchemeSpec,
    pub y: Vec<f64>,
    pub alpha: Option<f64>,
    pub tau: Option<f64>,
    pub delta: Option<f64>,
    /// When set, additionally verify that the Ivanov/Morozov solution at
    /// the configured levels is *not* a Tikhonov minimizer for any of these
    /// weights (the converse implication genuinely fails).
    pub converse_alphas: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: SolverSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `y_n = y + 2^-n * direction`, n = 1..=length.
    Dyadic { direction: Vec<f64>, length: usize },
    /// `y_n = y + (1/n) * direction`, n = 1..=length.
    Harmonic { direction: Vec<f64>, length: usize },
}

impl SequenceSpec {
    pub fn build(
        &self,
        limit: &Point,
    ) -> Result<varreg_core::convergence::DataSequence, String> {
        let (dir, len, term) = match self {
            SequenceSpec::Dyadic { direction, length } => {
                (direction, *length, f64_dyadic as fn(usize) -> f64)
            }
            SequenceSpec::Harmonic { direction, length } => {
                (direction, *length, f64_harmonic as fn(usize) -> f64)
            }
        };
        let dir = Point::from_slice(dir).map_err(|e| e.to_string())?;
        if dir.dim() != limit.dim() {
            return Err("sequence direction dimension does not match y".into());
        }
        varreg_core::convergence::DataSequence::from_fn(limit.clone(), len, |n| {
            limit.axpy(term(n), &dir)
        })
        .map_err(|e| e.to_string())
    }
}

fn f64_dyadic(n: usize) -> f64 {
    2f64.powi(-(n as i32))
}

fn f64_harmonic(n: usize) -> f64 {
    1.0 / n as f64
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum RuleSpec {
    /// `alpha = sqrt(misfit)`, floored at `alpha_min`.
    Sqrt { alpha_min: Option<f64> },
    Constant { alpha: f64 },
}

impl RuleSpec {
    pub fn build(&self) -> varreg_core::convergence::ParameterRule {
        match self {
            RuleSpec::Sqrt { alpha_min } => varreg_core::convergence::ParameterRule::SqrtMisfit {
                alpha_min: alpha_min.unwrap_or(varreg_core::convergence::DEFAULT_ALPHA_MIN),
            },
            RuleSpec::Constant { alpha } => {
                varreg_core::convergence::ParameterRule::Constant { alpha: *alpha }
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "experiment", rename_all = "snake_case")]
pub enum ConvergeConfig {
    R2 {
        scheme: SchemeSpec,
        y: Vec<f64>,
        sequence: SequenceSpec,
        alpha: f64,
        tol: Option<f64>,
        #[serde(default)]
        solver: SolverSpec,
    },
    R3 {
        scheme: SchemeSpec,
        x_exact: Vec<f64>,
        /// Dyadic levels `2^-n` for n = 1..=count.
        levels: usize,
        rule: RuleSpec,
        tol: Option<f64>,
        reg_tol: Option<f64>,
        #[serde(default)]
        solver: SolverSpec,
        seed: Option<u64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "task", rename_all = "snake_case")]
pub enum KlConfig {
    /// Tabulate the spike family against the constant baseline.
    Counterexample {
        n_list: Vec<u64>,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    /// Random positive step pairs through the entropy-to-norm inequality.
    Borwein {
        trials: usize,
        seed: Option<u64>,
    },
    /// Divergence-implies-pairing probe on a built-in family.
    Rho2Probe {
        family: FamilySpec,
        length: usize,
        tol: Option<f64>,
    },
}

fn default_eps() -> f64 {
    1.0
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
pub enum FamilySpec {
    /// Constants `1 + 2^-n` against the baseline one.
    Shrinking,
    /// The spike counterexample along `n = 2^k`, k = 3...
    Spike,
}

/// Parse with precise diagnostics; unknown fields are configuration errors.
pub fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("config error: {e}"))
}
