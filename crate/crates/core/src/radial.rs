//! Radial solutions of `(r^{N-1} u')' = r^{N-1} (a(r) h(u) + b(r) g(u))`,
//! `u(0) = u0`, `u'(0) = 0`.
//!
//! Two independent routes share one uniform grid:
//! * [`picard_solve`] iterates the integral form
//!   `u_n = u0 + T[a h(u_{n-1}) + b g(u_{n-1})]` with
//!   `T[φ](r) = ∫_0^r t^{1-N} ∫_0^t s^{N-1} φ(s) ds dt`;
//! * [`ode_oracle`] integrates the second-order ODE with classical RK4,
//!   starting off the origin with the series `u ≈ u0 + φ(0) r² / (2N)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{BlowUp, Error, Result};
use crate::nonlinearity::{validate_pair, NonlinearityPair, ScalarFn, ValidationReport};

/// A radial coefficient `r -> a(r)` with a human-readable label.
#[derive(Clone)]
pub struct Coefficient {
    label: String,
    f: ScalarFn,
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coefficient({})", self.label)
    }
}

impl Coefficient {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone)]
pub struct RadialProblem {
    dim: usize,
    a: Coefficient,
    b: Coefficient,
    pair: NonlinearityPair,
    u0: f64,
}

impl RadialProblem {
    /// Any `N >= 1` is accepted; the integral operator is well defined there.
    pub fn new(
        dim: usize,
        a: Coefficient,
        b: Coefficient,
        pair: NonlinearityPair,
        u0: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("N", "dimension must be at least 1"));
        }
        if !(u0.is_finite() && u0 >= pair.s0()) {
            return Err(Error::invalid(
                "u0",
                format!("{u0} must be finite and >= s0 = {}", pair.s0()),
            ));
        }
        Ok(Self {
            dim,
            a,
            b,
            pair,
            u0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn pair(&self) -> &NonlinearityPair {
        &self.pair
    }

    pub fn a(&self) -> &Coefficient {
        &self.a
    }

    pub fn b(&self) -> &Coefficient {
        &self.b
    }

    /// Same problem with a different initial value.
    pub fn with_u0(&self, u0: f64) -> Result<Self> {
        Self::new(
            self.dim,
            self.a.clone(),
            self.b.clone(),
            self.pair.clone(),
            u0,
        )
    }

    /// `a(r) h(u) + b(r) g(u)`.
    #[inline]
    pub fn source(&self, r: f64, u: f64) -> f64 {
        self.a.eval(r) * self.pair.h(u) + self.b.eval(r) * self.pair.g(u)
    }

    /// Checks the nonlinearity pair and that `a, b >= 0` on `samples` radii
    /// of `[0, r_max]`.
    pub fn validate(&self, r_max: f64, samples: usize) -> Result<ValidationReport> {
        let s_max = (10.0 * self.u0).max(10.0 * self.pair.s0());
        let report = validate_pair(&self.pair, 64, s_max)?;
        let samples = samples.max(2);
        for k in 0..samples {
            let r = r_max * k as f64 / (samples - 1) as f64;
            for (name, c) in [("a", &self.a), ("b", &self.b)] {
                let v = c.eval(r);
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        what: format!("coefficient {name}({r})"),
                        at: r,
                    });
                }
                if v < 0.0 {
                    return Err(Error::invalid(
                        "coefficient",
                        format!("{name}({r}) = {v} is negative"),
                    ));
                }
            }
        }
        Ok(report)
    }

    /// Whether `a` and `b` are nondecreasing on `samples` radii of `[0, r_max]`.
    pub fn coefficients_nondecreasing(&self, r_max: f64, samples: usize) -> bool {
        let samples = samples.max(2);
        let radii: Vec<f64> = (0..samples)
            .map(|k| r_max * k as f64 / (samples - 1) as f64)
            .collect();
        [&self.a, &self.b].iter().all(|c| {
            radii
                .windows(2)
                .all(|w| c.eval(w[1]) >= c.eval(w[0]) - 1e-14 * c.eval(w[0]).abs())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub r_max: f64,
    pub n_points: usize,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub max_iter: usize,
    pub blowup_cap: f64,
    /// RK4 substeps per grid cell in [`ode_oracle`].
    pub oracle_refine: usize,
}

impl GridConfig {
    pub fn new(r_max: f64, n_points: usize) -> Self {
        Self {
            r_max,
            n_points,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(Error::invalid(
                "r_max",
                format!("{} must be positive", self.r_max),
            ));
        }
        if self.n_points < 3 {
            return Err(Error::invalid("n_points", format!("{} < 3", self.n_points)));
        }
        if !(self.tol_abs > 0.0 && self.tol_rel > 0.0) {
            return Err(Error::invalid(
                "tolerance",
                "tol_abs and tol_rel must be positive",
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        if !(self.blowup_cap > 0.0) {
            return Err(Error::invalid("blowup_cap", "must be positive"));
        }
        if self.oracle_refine == 0 {
            return Err(Error::invalid("oracle_refine", "must be at least 1"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        self.r_max / (self.n_points - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.r_max, self.n_points)
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            r_max: 1.0,
            n_points: 2001,
            tol_abs: 1e-13,
            tol_rel: 1e-13,
            max_iter: 10_000,
            blowup_cap: 1e12,
            oracle_refine: 10,
        }
    }
}

pub fn uniform_grid(r_max: f64, n_points: usize) -> Vec<f64> {
    let step = r_max / (n_points - 1) as f64;
    (0..n_points)
        .map(|i| {
            if i + 1 == n_points {
                r_max
            } else {
                i as f64 * step
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Picard,
    RungeKutta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
    /// Largest pointwise decrease `u_{n-1} - u_n` seen between successive
    /// Picard iterates (zero or negative when the scheme stayed monotone).
    pub max_decrease: f64,
}

impl RadialSolution {
    pub fn u0(&self) -> f64 {
        self.u[0]
    }

    pub fn r_max(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Linear interpolation of `(u, u')` at radius `r`.
    pub fn interpolate(&self, r: f64) -> Result<(f64, f64)> {
        let r_max = self.r_max();
        if !(r >= 0.0 && r <= r_max) {
            return Err(Error::OutOfReach { radius: r, r_max });
        }
        let step = self.step();
        let i = ((r / step) as usize).min(self.grid.len() - 2);
        let w = ((r - self.grid[i]) / step).clamp(0.0, 1.0);
        let u = self.u[i] + w * (self.u[i + 1] - self.u[i]);
        let du = self.du[i] + w * (self.du[i + 1] - self.du[i]);
        Ok((u, du))
    }

    /// Sup-norm distance to another solution on the same grid.
    pub fn sup_distance(&self, other: &RadialSolution) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_uniform(grid: &[f64]) -> Result<f64> {
    let n = grid.len();
    if n < 2 {
        return Err(Error::invalid("grid", "needs at least two radii"));
    }
    if grid[0] != 0.0 {
        return Err(Error::invalid("grid", "must start at r = 0"));
    }
    let r_max = grid[n - 1];
    let step = r_max / (n - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::invalid("grid", "must be increasing"));
    }
    let slack = 1e-9 * r_max;
    if let Some(i) = (0..n).find(|&i| (grid[i] - i as f64 * step).abs() > slack) {
        return Err(Error::invalid("grid", format!("not uniform at index {i}")));
    }
    Ok(step)
}

/// Precomputed weights for `T[φ]` on a uniform grid.
///
/// The inner integral `I(t) = ∫_0^t s^{N-1} φ(s) ds` integrates the
/// piecewise-linear interpolant of `φ` against the exact weight `s^{N-1}`;
/// the outer integral of `t^{1-N} I(t)` is the composite trapezoid rule with
/// the integrand set to its limit 0 at `t = 0`.
#[derive(Debug, Clone)]
pub struct NestedIntegrator {
    step: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    inv_pow: Vec<f64>,
}

/// `outer[i] = T[φ](r_i)`, `scaled_inner[i] = r_i^{1-N} I(r_i)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NestedValues {
    pub outer: Vec<f64>,
    pub scaled_inner: Vec<f64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

impl NestedIntegrator {
    pub fn new(grid: &[f64], dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("N", "dimension must be at least 1"));
        }
        let step = check_uniform(grid)?;
        let n = grid.len();
        let p = dim - 1;
        let binom: Vec<f64> = (0..=p).map(|k| binomial(p, k)).collect();
        let mut left = Vec::with_capacity(n - 1);
        let mut right = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            // ∫_{s_j}^{s_j+Δ} s^p (1-τ) ds and ∫ s^p τ ds with s = s_j + Δτ,
            // expanded binomially so every term is nonnegative.
            let s = j as f64 * step;
            let (mut wl, mut wr) = (0.0, 0.0);
            for (k, c) in binom.iter().enumerate().take(p + 1) {
                let term = c * s.powi((p - k) as i32) * step.powi(k as i32 + 1);
                wl += term / ((k + 1) * (k + 2)) as f64;
                wr += term / (k + 2) as f64;
            }
            left.push(wl);
            right.push(wr);
        }
        let inv_pow = grid
            .iter()
            .enumerate()
            .map(|(i, &r)| if i == 0 { 0.0 } else { r.powi(1 - dim as i32) })
            .collect();
        Ok(Self {
            step,
            left,
            right,
            inv_pow,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pow.is_empty()
    }

    /// Fills `out`; errors if `phi` holds a non-finite value.
    pub fn apply(&self, phi: &[f64], out: &mut NestedValues) -> Result<()> {
        let n = self.len();
        if phi.len() != n {
            return Err(Error::invalid(
                "phi",
                format!("length {} != grid length {n}", phi.len()),
            ));
        }
        if let Some(i) = phi.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: format!("integrand at grid index {i}"),
                at: i as f64 * self.step,
            });
        }
        out.outer.clear();
        out.scaled_inner.clear();
        out.outer.push(0.0);
        out.scaled_inner.push(0.0);
        let (mut inner, mut outer, mut prev) = (0.0, 0.0, 0.0);
        for j in 0..n - 1 {
            inner += self.left[j] * phi[j] + self.right[j] * phi[j + 1];
            let scaled = self.inv_pow[j + 1] * inner;
            outer += 0.5 * self.step * (prev + scaled);
            prev = scaled;
            out.outer.push(outer);
            out.scaled_inner.push(scaled);
        }
        Ok(())
    }
}

/// `T[φ](r_i) = ∫_0^{r_i} t^{1-N} ∫_0^t s^{N-1} φ(s) ds dt` on a uniform grid.
pub fn nested_integral(phi: &[f64], dim: usize, grid: &[f64]) -> Result<Vec<f64>> {
    let integ = NestedIntegrator::new(grid, dim)?;
    let mut out = NestedValues::default();
    integ.apply(phi, &mut out)?;
    if let Some(i) = out.outer.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: format!("nested integral at grid index {i}"),
            at: grid[i],
        });
    }
    Ok(out.outer)
}

fn fill_source(problem: &RadialProblem, grid: &[f64], u: &[f64], phi: &mut [f64]) -> Result<()> {
    for (i, (&r, &ui)) in grid.iter().zip(u).enumerate() {
        let v = problem.source(r, ui);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: format!("a h(u) + b g(u) at grid index {i} (u = {ui})"),
                at: r,
            });
        }
        phi[i] = v;
    }
    Ok(())
}

/// Successive approximation `u_n = u0 + T[a h(u_{n-1}) + b g(u_{n-1})]`
/// starting from `u_0 ≡ u0`.
///
/// Stops when `‖u_n - u_{n-1}‖∞ <= tol_abs + tol_rel ‖u_n‖∞`. Running out of
/// iterations yields a solution with `converged == false`; exceeding
/// `blowup_cap` anywhere is an [`Error::BlowUp`].
pub fn picard_solve(problem: &RadialProblem, cfg: &GridConfig) -> Result<RadialSolution> {
    cfg.validate()?;
    let grid = cfg.grid();
    let integ = NestedIntegrator::new(&grid, problem.dim())?;
    let n = grid.len();
    let u0 = problem.u0();

    let mut u = vec![u0; n];
    let mut next = vec![u0; n];
    let mut phi = vec![0.0; n];
    let mut vals = NestedValues::default();
    let mut max_decrease = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iter {
        iterations += 1;
        fill_source(problem, &grid, &u, &mut phi)?;
        integ.apply(&phi, &mut vals)?;
        let mut change: f64 = 0.0;
        let mut sup: f64 = 0.0;
        for i in 0..n {
            let v = u0 + vals.outer[i];
            if !(v <= cfg.blowup_cap) {
                return Err(Error::BlowUp(BlowUp {
                    method: Method::Picard,
                    radius: grid[i],
                    iteration: iterations,
                    cap: cfg.blowup_cap,
                }));
            }
            max_decrease = max_decrease.max(u[i] - v);
            change = change.max((v - u[i]).abs());
            sup = sup.max(v.abs());
            next[i] = v;
        }
        std::mem::swap(&mut u, &mut next);
        if change <= cfg.tol_abs + cfg.tol_rel * sup {
            converged = true;
            break;
        }
    }

    // u' = r^{1-N} ∫_0^r s^{N-1} φ(u(s)) ds at the final iterate.
    fill_source(problem, &grid, &u, &mut phi)?;
    integ.apply(&phi, &mut vals)?;
    Ok(RadialSolution {
        grid,
        du: vals.scaled_inner,
        u,
        iterations,
        converged,
        method: Method::Picard,
        max_decrease,
    })
}

/// Classical RK4 for `u'' = a h(u) + b g(u) - (N-1) u' / r` with
/// `cfg.oracle_refine` substeps per grid cell.
pub fn ode_oracle(problem: &RadialProblem, cfg: &GridConfig) -> Result<RadialSolution> {
    cfg.validate()?;
    let grid = cfg.grid();
    let n = grid.len();
    let refine = cfg.oracle_refine;
    let h = cfg.step() / refine as f64;
    let dim_m1 = (problem.dim() - 1) as f64;
    let u0 = problem.u0();

    let rhs = |r: f64, u: f64, v: f64| -> (f64, f64) { (v, problem.source(r, u) - dim_m1 * v / r) };

    let mut out_u = Vec::with_capacity(n);
    let mut out_du = Vec::with_capacity(n);
    out_u.push(u0);
    out_du.push(0.0);

    let phi0 = problem.source(0.0, u0);
    if !phi0.is_finite() {
        return Err(Error::NonFinite {
            what: "a h(u0) + b g(u0)".into(),
            at: 0.0,
        });
    }
    let nd = problem.dim() as f64;
    // Series start avoids the (N-1)/r singularity at the origin.
    let mut u = u0 + phi0 * h * h / (2.0 * nd);
    let mut v = phi0 * h / nd;
    let mut step_index = 1;
    let total = (n - 1) * refine;
    let blowup = |r: f64, step: usize| {
        Error::BlowUp(BlowUp {
            method: Method::RungeKutta,
            radius: r,
            iteration: step,
            cap: cfg.blowup_cap,
        })
    };
    if refine == 1 {
        out_u.push(u);
        out_du.push(v);
    }
    while step_index < total {
        let r = step_index as f64 * h;
        let (k1u, k1v) = rhs(r, u, v);
        let (k2u, k2v) = rhs(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = rhs(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = rhs(r + h, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        step_index += 1;
        let r_new = step_index as f64 * h;
        if !(u <= cfg.blowup_cap) || !v.is_finite() {
            return Err(blowup(r_new, step_index));
        }
        if step_index % refine == 0 {
            out_u.push(u);
            out_du.push(v);
        }
    }

    Ok(RadialSolution {
        grid,
        u: out_u,
        du: out_du,
        iterations: total,
        converged: true,
        method: Method::RungeKutta,
        max_decrease: 0.0,
    })
}

/// Max over interior grid points of
/// `|D_c(r^{N-1} u') - r^{N-1} (a h(u) + b g(u))| / max(1, r^{N-1} (a h(u) + b g(u)))`
/// with `D_c` the centered difference.
pub fn residual(problem: &RadialProblem, sol: &RadialSolution) -> f64 {
    let n = sol.len();
    if n < 3 {
        return 0.0;
    }
    let p = problem.dim() as i32 - 1;
    let step = sol.step();
    let flux: Vec<f64> = sol
        .grid
        .iter()
        .zip(&sol.du)
        .map(|(&r, &du)| if p == 0 { du } else { r.powi(p) * du })
        .collect();
    (1..n - 1)
        .map(|i| {
            let r = sol.grid[i];
            let lhs = (flux[i + 1] - flux[i - 1]) / (2.0 * step);
            let rhs = r.powi(p) * problem.source(r, sol.u[i]);
            (lhs - rhs).abs() / rhs.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_problem(dim: usize) -> RadialProblem {
        let pair = NonlinearityPair::power(1.0, 1.0, 1.0).unwrap();
        RadialProblem::new(
            dim,
            Coefficient::constant(1.0),
            Coefficient::zero(),
            pair,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn nested_integral_zero_and_constant() {
        let grid = uniform_grid(1.0, 101);
        let zeros = nested_integral(&vec![0.0; 101], 3, &grid).unwrap();
        assert!(zeros.iter().all(|&v| v == 0.0));
        // φ ≡ 1: T[1](r) = r²/(2N); the weights make this exact.
        for dim in 1..=6 {
            let out = nested_integral(&vec![1.0; 101], dim, &grid).unwrap();
            let exact = 1.0 / (2.0 * dim as f64);
            assert!((out[100] - exact).abs() < 1e-14, "N = {dim}: {}", out[100]);
        }
    }

    #[test]
    fn nested_integral_monomial() {
        // φ(s) = s², N = 3: ∫_0^1 t^{-2} t^5/5 dt = 1/20
        let grid = uniform_grid(1.0, 2001);
        let phi: Vec<f64> = grid.iter().map(|r| r * r).collect();
        let out = nested_integral(&phi, 3, &grid).unwrap();
        assert!((out[2000] - 0.05).abs() < 1e-7, "{}", out[2000]);
    }

    #[test]
    fn nested_integral_rejects_bad_input() {
        let grid = uniform_grid(1.0, 11);
        let mut phi = vec![1.0; 11];
        phi[4] = f64::NAN;
        let err = nested_integral(&phi, 3, &grid).unwrap_err();
        assert!(matches!(err, Error::NonFinite { ref what, .. } if what.contains("index 4")));
        let skewed = vec![0.0, 0.1, 0.3, 0.4];
        assert!(nested_integral(&[1.0; 4], 3, &skewed).is_err());
        assert!(nested_integral(&[1.0; 3], 3, &grid).is_err());
    }

    #[test]
    fn trivial_problem_is_a_fixed_point() {
        let pair = NonlinearityPair::model_log();
        let p = RadialProblem::new(3, Coefficient::zero(), Coefficient::zero(), pair, 2.0).unwrap();
        let sol = picard_solve(&p, &GridConfig::new(1.0, 101)).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.iterations, 1);
        assert!(sol.u.iter().all(|&u| u == 2.0));
        assert!(sol.du.iter().all(|&d| d == 0.0));
        let rk = ode_oracle(&p, &GridConfig::new(1.0, 101)).unwrap();
        assert!(rk.u.iter().all(|&u| u == 2.0) && rk.du.iter().all(|&d| d == 0.0));
        assert_eq!(residual(&p, &sol), 0.0);
    }

    #[test]
    fn u0_at_s0_without_a_stays_put() {
        let pair = NonlinearityPair::model_log();
        let p = RadialProblem::new(
            3,
            Coefficient::zero(),
            Coefficient::constant(2.0),
            pair,
            1.0,
        )
        .unwrap();
        let sol = picard_solve(&p, &GridConfig::new(3.0, 301)).unwrap();
        assert!(sol.u.iter().all(|&u| u == 1.0));
    }

    #[test]
    fn linear_case_matches_sinh() {
        let p = linear_problem(3);
        let cfg = GridConfig::new(1.0, 2001);
        let exact = |r: f64| if r == 0.0 { 1.0 } else { r.sinh() / r };
        for sol in [
            picard_solve(&p, &cfg).unwrap(),
            ode_oracle(&p, &cfg).unwrap(),
        ] {
            assert!(sol.converged);
            let err = sol
                .grid
                .iter()
                .zip(&sol.u)
                .map(|(&r, &u)| (u - exact(r)).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-7, "{:?}: {err}", sol.method);
            assert!((sol.u[2000] - 1.175_201_193_643_801_4).abs() < 1e-7);
        }
        let sol = picard_solve(&p, &cfg).unwrap();
        assert!(residual(&p, &sol) <= 1e-5);
    }

    #[test]
    fn one_dimensional_problem_runs() {
        // N = 1, a ≡ 1, h = u, g = u - 1: u'' = u, u(0) = 1 -> cosh
        let p = linear_problem(1);
        let cfg = GridConfig::new(1.0, 1001);
        let pic = picard_solve(&p, &cfg).unwrap();
        let rk = ode_oracle(&p, &cfg).unwrap();
        assert!((pic.u[1000] - 1f64.cosh()).abs() < 1e-6);
        assert!((rk.u[1000] - 1f64.cosh()).abs() < 1e-9);
        assert!((pic.du[1000] - 1f64.sinh()).abs() < 1e-6);
    }

    #[test]
    fn iteration_cap_flags_non_convergence() {
        let p = linear_problem(3);
        let cfg = GridConfig {
            max_iter: 2,
            ..GridConfig::new(2.0, 101)
        };
        let sol = picard_solve(&p, &cfg).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 2);
    }

    #[test]
    fn cubic_growth_blows_up() {
        let pair = NonlinearityPair::power(3.0, 1.0, 1.0).unwrap();
        let p = RadialProblem::new(
            3,
            Coefficient::constant(1.0),
            Coefficient::constant(1.0),
            pair,
            1.0,
        )
        .unwrap();
        let cfg = GridConfig::new(3f64.sqrt() + 1.0, 2001);
        let Err(Error::BlowUp(pic)) = picard_solve(&p, &cfg) else {
            panic!("expected blow-up")
        };
        let Err(Error::BlowUp(rk)) = ode_oracle(&p, &cfg) else {
            panic!("expected blow-up")
        };
        assert_eq!(pic.method, Method::Picard);
        assert!(
            rk.radius < cfg.r_max && pic.radius >= rk.radius - 0.05,
            "{pic:?} {rk:?}"
        );
    }

    #[test]
    fn interpolation_and_reach() {
        let p = linear_problem(3);
        let sol = picard_solve(&p, &GridConfig::new(1.0, 1001)).unwrap();
        let (u, du) = sol.interpolate(0.5).unwrap();
        assert!((u - 0.5f64.sinh() / 0.5).abs() < 1e-6);
        assert!(du > 0.0);
        assert!(matches!(
            sol.interpolate(1.5),
            Err(Error::OutOfReach { .. })
        ));
        assert_eq!(sol.interpolate(1.0).unwrap().0, sol.u[1000]);
    }

    #[test]
    fn validation_catches_negative_coefficients() {
        let pair = NonlinearityPair::model_log();
        let p = RadialProblem::new(
            3,
            Coefficient::new("1-r", |r| 1.0 - r),
            Coefficient::zero(),
            pair.clone(),
            1.0,
        )
        .unwrap();
        assert!(p.validate(2.0, 50).is_err());
        assert!(p.validate(0.9, 50).is_ok());
        assert!(RadialProblem::new(
            3,
            Coefficient::zero(),
            Coefficient::zero(),
            pair.clone(),
            0.5
        )
        .is_err());
        assert!(
            RadialProblem::new(0, Coefficient::zero(), Coefficient::zero(), pair, 1.0).is_err()
        );
    }
}
