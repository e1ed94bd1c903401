//! Fully resolved run configuration, serialisable to and from JSON.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use radplan_core::nonlinearity::NonlinearityPair;
use radplan_core::planning::{build_model, PlanningModel};
use radplan_core::radial::{Coefficient, GridConfig, RadialProblem};
use radplan_core::sim::SimConfig;

use crate::expr::Expr;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Classify,
    Model,
    Simulate,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Classify => "classify",
            Command::Model => "model",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemSpec {
    /// The production-planning model.
    Model {
        dim: usize,
        sigma: Vec<f64>,
        alpha: f64,
        u0: f64,
    },
    /// Coefficients as expressions in `r` and a named nonlinearity pair.
    Custom {
        dim: usize,
        a: String,
        b: String,
        pair: String,
        u0: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_max: f64,
    pub n_grid: usize,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub max_iter: usize,
    pub blowup_cap: f64,
}

impl GridSpec {
    pub fn to_grid_config(&self) -> GridConfig {
        let mut g = GridConfig::new(self.r_max, self.n_grid);
        g.tol_abs = self.tol_abs;
        g.tol_rel = self.tol_rel;
        g.max_iter = self.max_iter;
        g.blowup_cap = self.blowup_cap;
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub horizon: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub y0: Vec<f64>,
    /// Number of equal transversality intervals on `[0, horizon]`.
    pub probes: usize,
    pub scalings: Vec<f64>,
}

impl SimSpec {
    pub fn to_sim_config(&self) -> SimConfig {
        SimConfig::new(
            self.horizon,
            self.dt,
            self.n_paths,
            self.seed,
            self.y0.clone(),
        )
        .with_uniform_probes(self.probes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub problem: ProblemSpec,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSpec>,
    /// Radii for `classify`; decades `1 ..= 1e15` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_radii: Option<Vec<f64>>,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    /// SHA-256 of the compact JSON form without `out`, hex encoded, so the
    /// same computation hashes the same wherever it is written.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serialises");
        if let Some(map) = value.as_object_mut() {
            map.remove("out");
        }
        let bytes = serde_json::to_vec(&value).expect("config serialises");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn dim(&self) -> usize {
        match &self.problem {
            ProblemSpec::Model { dim, .. } | ProblemSpec::Custom { dim, .. } => *dim,
        }
    }

    pub fn model(&self) -> Result<(PlanningModel, RadialProblem), CliError> {
        match &self.problem {
            ProblemSpec::Model {
                dim,
                sigma,
                alpha,
                u0,
            } => Ok(build_model(*dim, sigma, *alpha, *u0)?),
            ProblemSpec::Custom { .. } => Err(CliError::Usage(format!(
                "`{}` needs model parameters (--sigma/--alpha), not --a/--b coefficients",
                self.command.as_str()
            ))),
        }
    }

    pub fn problem(&self) -> Result<RadialProblem, CliError> {
        match &self.problem {
            ProblemSpec::Model { .. } => Ok(self.model()?.1),
            ProblemSpec::Custom {
                dim,
                a,
                b,
                pair,
                u0,
            } => {
                let a_expr: Expr = a.parse()?;
                let b_expr: Expr = b.parse()?;
                let pair: NonlinearityPair = pair.parse()?;
                Ok(RadialProblem::new(
                    *dim,
                    Coefficient::new(a.clone(), move |r| a_expr.eval(r)),
                    Coefficient::new(b.clone(), move |r| b_expr.eval(r)),
                    pair,
                    *u0,
                )?)
            }
        }
    }
}
