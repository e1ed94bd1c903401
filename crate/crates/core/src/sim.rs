//! Euler–Maruyama simulation of the inventory dynamics
//! `dy_i = p_i(y) dt + σ_i dw_i` under feedback policies, with the
//! discounted quadratic cost `∫ (|p|² + |y|²) e^{-αt} dt` accumulated
//! along each path.
//!
//! Path `k` draws its noise from ChaCha8 stream `k` of the run seed, so a
//! given `(seed, config)` reproduces every number bit for bit and
//! different policies see identical noise path by path.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planning::{PlanningModel, PolicyField};

/// Fraction of truncated paths above which an estimate is flagged invalid.
pub const MAX_TRUNCATED_FRACTION: f64 = 0.01;

pub trait FeedbackPolicy: Send + Sync {
    fn name(&self) -> String;

    /// Writes `p(y)` into `out`; an error marks the path as truncated.
    fn control(&self, y: &[f64], out: &mut [f64]) -> Result<()>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPolicy;

impl FeedbackPolicy for ZeroPolicy {
    fn name(&self) -> String {
        "zero".into()
    }

    fn control(&self, _y: &[f64], out: &mut [f64]) -> Result<()> {
        out.iter_mut().for_each(|p| *p = 0.0);
        Ok(())
    }
}

/// `max{0, s p*(y)}` for the feedback field `p*`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledPolicy<'a> {
    pub field: &'a PolicyField,
    pub scale: f64,
}

impl FeedbackPolicy for ScaledPolicy<'_> {
    fn name(&self) -> String {
        format!("{}*p*", self.scale)
    }

    fn control(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        self.field.optimal_control_into(y, out)?;
        for p in out.iter_mut() {
            *p = (self.scale * *p).max(0.0);
        }
        Ok(())
    }
}

/// Diffusion coefficients and discount rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dynamics {
    pub sigma: Vec<f64>,
    pub alpha: f64,
}

impl From<&PlanningModel> for Dynamics {
    fn from(model: &PlanningModel) -> Self {
        Self {
            sigma: model.sigma().to_vec(),
            alpha: model.alpha(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub horizon: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub y0: Vec<f64>,
    /// Times at which states are recorded; snapped to the step grid.
    #[serde(default)]
    pub probe_times: Vec<f64>,
}

impl SimConfig {
    pub fn new(horizon: f64, dt: f64, n_paths: usize, seed: u64, y0: Vec<f64>) -> Self {
        Self {
            horizon,
            dt,
            n_paths,
            seed,
            y0,
            probe_times: Vec::new(),
        }
    }

    pub fn with_probes(mut self, probe_times: Vec<f64>) -> Self {
        self.probe_times = probe_times;
        self
    }

    /// `count + 1` equally spaced probes on `[0, horizon]`.
    pub fn with_uniform_probes(self, count: usize) -> Self {
        let h = self.horizon;
        let times = (0..=count)
            .map(|k| h * k as f64 / count.max(1) as f64)
            .collect();
        self.with_probes(times)
    }

    pub fn steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }

    /// Step actually used: `horizon / steps()`.
    pub fn step(&self) -> f64 {
        self.horizon / self.steps() as f64
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid(
                "horizon",
                format!("{} must be positive", self.horizon),
            ));
        }
        if !(self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(Error::invalid(
                "dt",
                format!("{} must lie in (0, horizon]", self.dt),
            ));
        }
        if self.n_paths == 0 {
            return Err(Error::invalid("n_paths", "must be at least 1"));
        }
        if self.y0.len() != dim {
            return Err(Error::invalid(
                "y0",
                format!("has {} components, expected {dim}", self.y0.len()),
            ));
        }
        if self.y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("y0", "must be finite"));
        }
        if self.probe_times.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::invalid("probe_times", "must be nondecreasing"));
        }
        if let Some(t) = self
            .probe_times
            .iter()
            .find(|&&t| !(0.0..=self.horizon).contains(&t))
        {
            return Err(Error::invalid(
                "probe_times",
                format!("{t} lies outside [0, horizon]"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    /// Left-endpoint sum of `(|p|² + |y|²) e^{-αt} dt` up to the horizon.
    pub cost: f64,
    /// Undiscounted integrand at the horizon.
    pub last_integrand: f64,
    /// Time at which the policy could no longer be evaluated.
    pub truncated_at: Option<f64>,
    /// States at the probes reached, concatenated.
    pub snapshots: Vec<f64>,
}

impl PathRecord {
    pub fn truncated(&self) -> bool {
        self.truncated_at.is_some()
    }

    pub fn snapshot(&self, probe: usize, dim: usize) -> Option<&[f64]> {
        self.snapshots.get(probe * dim..(probe + 1) * dim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub policy: String,
    pub dim: usize,
    pub alpha: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Probe times after snapping to the step grid.
    pub probe_times: Vec<f64>,
    pub paths: Vec<PathRecord>,
}

impl Ensemble {
    pub fn truncated_count(&self) -> usize {
        self.paths.iter().filter(|p| p.truncated()).count()
    }
}

fn run_path(
    policy: &dyn FeedbackPolicy,
    dynamics: &Dynamics,
    cfg: &SimConfig,
    probe_steps: &[usize],
    index: usize,
) -> PathRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let steps = cfg.steps();
    let dt = cfg.step();
    let sqrt_dt = dt.sqrt();
    let dim = cfg.y0.len();
    let mut y = cfg.y0.clone();
    let mut p = vec![0.0; dim];
    let mut snapshots = Vec::with_capacity(probe_steps.len() * dim);
    let mut next_probe = 0;
    let mut cost = 0.0;
    let mut last_integrand = 0.0;
    let mut truncated_at = None;

    for k in 0..=steps {
        while next_probe < probe_steps.len() && probe_steps[next_probe] == k {
            snapshots.extend_from_slice(&y);
            next_probe += 1;
        }
        if policy.control(&y, &mut p).is_err() {
            truncated_at = Some(k as f64 * dt);
            break;
        }
        let integrand: f64 = p.iter().chain(&y).map(|v| v * v).sum();
        if k == steps {
            last_integrand = integrand;
            break;
        }
        cost += integrand * (-dynamics.alpha * k as f64 * dt).exp() * dt;
        for i in 0..dim {
            let xi: f64 = StandardNormal.sample(&mut rng);
            y[i] += p[i] * dt + dynamics.sigma[i] * sqrt_dt * xi;
        }
    }

    PathRecord {
        cost,
        last_integrand,
        truncated_at,
        snapshots,
    }
}

/// Simulates `cfg.n_paths` independent paths; results are in path order.
pub fn simulate_paths(
    policy: &dyn FeedbackPolicy,
    dynamics: &Dynamics,
    cfg: &SimConfig,
) -> Result<Ensemble> {
    let dim = dynamics.sigma.len();
    cfg.validate(dim)?;
    if !(dynamics.alpha > 0.0) {
        return Err(Error::invalid("alpha", "must be positive"));
    }
    let dt = cfg.step();
    let probe_steps: Vec<usize> = cfg
        .probe_times
        .iter()
        .map(|t| (t / dt).round() as usize)
        .collect();
    let paths: Vec<PathRecord> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| run_path(policy, dynamics, cfg, &probe_steps, i))
        .collect();
    Ok(Ensemble {
        policy: policy.name(),
        dim,
        alpha: dynamics.alpha,
        horizon: cfg.horizon,
        dt,
        probe_times: probe_steps.iter().map(|&k| k as f64 * dt).collect(),
        paths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_used: usize,
    pub n_truncated: usize,
    /// `e^{-αT} mean(last integrand) / α`: the neglected tail if the
    /// integrand stayed at its final level.
    pub truncation_bound: f64,
    pub discount_at_horizon: f64,
    /// False when more than 1% of paths were truncated.
    pub valid: bool,
}

fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64, usize) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::INFINITY, 1);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt(), n)
}

/// Mean and standard error of the quadratic discounted cost over
/// non-truncated paths.
pub fn discounted_cost(ensemble: &Ensemble) -> CostEstimate {
    let used = ensemble.paths.iter().filter(|p| !p.truncated());
    let (mean, stderr, n_used) = mean_stderr(used.clone().map(|p| p.cost));
    let last_mean = if n_used == 0 {
        f64::NAN
    } else {
        used.map(|p| p.last_integrand).sum::<f64>() / n_used as f64
    };
    let discount_at_horizon = (-ensemble.alpha * ensemble.horizon).exp();
    let n_truncated = ensemble.truncated_count();
    CostEstimate {
        mean,
        stderr,
        n_used,
        n_truncated,
        truncation_bound: discount_at_horizon * last_mean / ensemble.alpha,
        discount_at_horizon,
        valid: n_used > 0
            && (n_truncated as f64) <= MAX_TRUNCATED_FRACTION * ensemble.paths.len() as f64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalitySeries {
    pub times: Vec<f64>,
    /// Estimates of `E[e^{-αt} 2|σ|² ln u(|y(t)|)]`.
    pub estimates: Vec<f64>,
    /// Paths contributing at each probe.
    pub counts: Vec<usize>,
    /// Largest fraction of paths lost to truncation at any probe.
    pub truncated_fraction: f64,
}

impl TransversalitySeries {
    /// `|final| / max |estimate|`.
    pub fn final_over_max(&self) -> f64 {
        let max = self.estimates.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        match self.estimates.last() {
            Some(last) if max > 0.0 => last.abs() / max,
            _ => 0.0,
        }
    }
}

/// Transversality estimates at `probe_times`, which must be probes
/// recorded in `ensemble`.
pub fn transversality_check(
    field: &PolicyField,
    ensemble: &Ensemble,
    probe_times: &[f64],
) -> Result<TransversalitySeries> {
    let dim = ensemble.dim;
    let mut estimates = Vec::with_capacity(probe_times.len());
    let mut counts = Vec::with_capacity(probe_times.len());
    let mut truncated_fraction: f64 = 0.0;
    for &t in probe_times {
        let slot = ensemble
            .probe_times
            .iter()
            .position(|&s| (s - t).abs() <= 0.5 * ensemble.dt)
            .ok_or_else(|| {
                Error::invalid(
                    "probe_times",
                    format!("{t} was not recorded by the simulation"),
                )
            })?;
        let discount = (-ensemble.alpha * ensemble.probe_times[slot]).exp();
        let (mut sum, mut count) = (0.0, 0usize);
        for path in &ensemble.paths {
            let Some(y) = path.snapshot(slot, dim) else {
                continue;
            };
            match field.utility(y) {
                Ok(u) => {
                    sum += discount * u;
                    count += 1;
                }
                Err(Error::OutOfReach { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        truncated_fraction =
            truncated_fraction.max(1.0 - count as f64 / ensemble.paths.len() as f64);
        estimates.push(if count > 0 {
            sum / count as f64
        } else {
            f64::NAN
        });
        counts.push(count);
    }
    Ok(TransversalitySeries {
        times: probe_times.to_vec(),
        estimates,
        counts,
        truncated_fraction,
    })
}

/// Mean and standard error of per-path cost differences `a - b`,
/// over paths valid in both ensembles.
pub fn paired_difference(a: &Ensemble, b: &Ensemble) -> Result<(f64, f64)> {
    if a.paths.len() != b.paths.len() {
        return Err(Error::invalid("ensembles", "path counts differ"));
    }
    let diffs: Vec<f64> = a
        .paths
        .iter()
        .zip(&b.paths)
        .filter(|(p, q)| !p.truncated() && !q.truncated())
        .map(|(p, q)| p.cost - q.cost)
        .collect();
    let (mean, stderr, _) = mean_stderr(diffs.iter().copied());
    Ok((mean, stderr))
}

pub fn pooled_stderr(a: &CostEstimate, b: &CostEstimate) -> f64 {
    a.stderr.hypot(b.stderr)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRow {
    pub scaling: f64,
    pub policy: String,
    pub cost: CostEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyTable {
    /// Sorted by mean cost, ascending; invalid rows last.
    pub rows: Vec<PolicyRow>,
}

impl PolicyTable {
    pub fn get(&self, scaling: f64) -> Option<&PolicyRow> {
        self.rows.iter().find(|r| r.scaling == scaling)
    }

    pub fn all_valid(&self) -> bool {
        self.rows.iter().all(|r| r.cost.valid)
    }
}

/// Costs of `s p*` for each scaling under common random numbers; `s = 0`
/// runs the zero policy, which needs no field evaluation.
pub fn compare_policies(
    field: &PolicyField,
    cfg: &SimConfig,
    scalings: &[f64],
) -> Result<PolicyTable> {
    if !scalings.contains(&0.0) || !scalings.contains(&1.0) {
        return Err(Error::invalid("scalings", "must include 0 and 1"));
    }
    let dynamics = Dynamics::from(field.model());
    let mut rows = Vec::with_capacity(scalings.len());
    for &scale in scalings {
        let ensemble = if scale == 0.0 {
            simulate_paths(&ZeroPolicy, &dynamics, cfg)?
        } else {
            simulate_paths(&ScaledPolicy { field, scale }, &dynamics, cfg)?
        };
        rows.push(PolicyRow {
            scaling: scale,
            policy: ensemble.policy.clone(),
            cost: discounted_cost(&ensemble),
        });
    }
    rows.sort_by(|a, b| {
        b.cost
            .valid
            .cmp(&a.cost.valid)
            .then(a.cost.mean.total_cmp(&b.cost.mean))
            .then(a.scaling.total_cmp(&b.scaling))
    });
    Ok(PolicyTable { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub cost_mean: f64,
    pub cost_stderr: f64,
    pub truncation_bound: f64,
    pub valid: bool,
    pub transversality_series: Vec<(f64, f64)>,
    /// Policy name → (cost mean, cost stderr).
    pub per_policy: BTreeMap<String, (f64, f64)>,
}

/// Runs `p*` with transversality probes and the scaled-policy comparison.
pub fn simulate_report(
    field: &PolicyField,
    cfg: &SimConfig,
    scalings: &[f64],
) -> Result<SimReport> {
    let dynamics = Dynamics::from(field.model());
    let ensemble = simulate_paths(&ScaledPolicy { field, scale: 1.0 }, &dynamics, cfg)?;
    let cost = discounted_cost(&ensemble);
    let series = transversality_check(field, &ensemble, &ensemble.probe_times.clone())?;
    let table = compare_policies(field, cfg, scalings)?;
    Ok(SimReport {
        cost_mean: cost.mean,
        cost_stderr: cost.stderr,
        truncation_bound: cost.truncation_bound,
        valid: cost.valid,
        transversality_series: series.times.into_iter().zip(series.estimates).collect(),
        per_policy: table
            .rows
            .into_iter()
            .map(|r| (r.policy, (r.cost.mean, r.cost.stderr)))
            .collect(),
    })
}
