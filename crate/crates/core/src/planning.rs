//! The stochastic production-planning model.
//!
//! Inventories follow `dy_i = p_i dt + σ_i dw_i` and the cost is
//! `E ∫ (|p|² + |y|²) e^{-αt} dt`. The HJB equation
//! `-2|σ|² Δz + |∇z|² + 4αz = 4|x|²` becomes, with `z = -2|σ|² ln u`,
//!
//! ```text
//! Δu = (|x|²/|σ|⁴) u + (2α/|σ|²) u ln u,
//! ```
//!
//! so the radial solver applies with `h(u) = u`, `g(u) = u ln u`, `s0 = 1`.
//! The feedback rates are `p*_i = max{0, -z_{x_i}/2}`.

use serde::{Deserialize, Serialize};

use crate::analysis::{BoundsReport, G_ZERO_TOL};
use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearityPair;
use crate::radial::{Coefficient, RadialProblem, RadialSolution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningModel {
    dim: usize,
    sigma: Vec<f64>,
    alpha: f64,
    u0: f64,
    sigma_sq: f64,
    sigma_4: f64,
}

/// Validates the parameters and returns the model with its radial problem.
pub fn build_model(
    dim: usize,
    sigma: &[f64],
    alpha: f64,
    u0: f64,
) -> Result<(PlanningModel, RadialProblem)> {
    let model = PlanningModel::new(dim, sigma, alpha, u0)?;
    let problem = model.radial_problem()?;
    Ok((model, problem))
}

impl PlanningModel {
    pub fn new(dim: usize, sigma: &[f64], alpha: f64, u0: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("N", "need at least one good"));
        }
        if sigma.len() != dim {
            return Err(Error::invalid(
                "sigma",
                format!("has {} components, expected N = {dim}", sigma.len()),
            ));
        }
        if let Some(i) = sigma.iter().position(|s| !(s.is_finite() && *s != 0.0)) {
            return Err(Error::invalid(
                "sigma",
                format!("component {i} is {} (must be nonzero)", sigma[i]),
            ));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("{alpha} must be positive")));
        }
        if !(u0 >= 1.0 && u0.is_finite()) {
            return Err(Error::invalid("u0", format!("{u0} must be >= 1")));
        }
        let sigma_sq: f64 = sigma.iter().map(|s| s * s).sum();
        Ok(Self {
            dim,
            sigma: sigma.to_vec(),
            alpha,
            u0,
            sigma_sq,
            sigma_4: sigma_sq * sigma_sq,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn sigma_4(&self) -> f64 {
        self.sigma_4
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.dim, &self.sigma, alpha, self.u0)
    }

    pub fn radial_problem(&self) -> Result<RadialProblem> {
        let s4 = self.sigma_4;
        RadialProblem::new(
            self.dim,
            Coefficient::new(format!("r^2/{s4}"), move |r| r * r / s4),
            Coefficient::constant(2.0 * self.alpha / self.sigma_sq),
            NonlinearityPair::model_log(),
            self.u0,
        )
    }

    /// `H(s) = ln(ln s + 1) - ln(ln u0 + 1)`.
    pub fn closed_h(&self, s: f64) -> Result<f64> {
        if !(s >= self.u0) {
            return Err(Error::invalid(
                "s",
                format!("{s} is below u0 = {}", self.u0),
            ));
        }
        Ok((s.ln() + 1.0).ln() - (self.u0.ln() + 1.0).ln())
    }

    /// `H^{-1}(y) = exp((1 + ln u0) e^y - 1)`.
    pub fn closed_h_inv(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::invalid("y", format!("{y} must be nonnegative")));
        }
        let v = ((1.0 + self.u0.ln()) * y.exp() - 1.0).exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Range {
                y,
                h_infinity: f64::INFINITY,
            })
        }
    }

    /// `P̄(r) = r⁴ / (4(N+2)|σ|⁴) + α r² / (N |σ|²)`.
    pub fn closed_p_bar(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let n = self.dim as f64;
        Ok(r.powi(4) / (4.0 * (n + 2.0) * self.sigma_4) + self.alpha * r * r / (n * self.sigma_sq))
    }

    /// `P̲(r)`: `r⁴/(4(N+2)|σ|⁴)` when `u0 = 1`, otherwise
    /// `min{h(u0), g(u0)} P̄(r) = min{u0, u0 ln u0} P̄(r)`.
    ///
    /// The `u0 != 1` constant follows the general definition of `m`; a
    /// printed variant with `min{1, u0 ln u0}` is not used.
    pub fn closed_p_under(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let g0 = self.u0 * self.u0.ln();
        if g0.abs() <= G_ZERO_TOL {
            let n = self.dim as f64;
            Ok(self.u0 * r.powi(4) / (4.0 * (n + 2.0) * self.sigma_4))
        } else {
            Ok(self.u0.min(g0) * self.closed_p_bar(r)?)
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if r >= 0.0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid("r", format!("{r} must be nonnegative")))
        }
    }
}

/// Value function and feedback rates reconstructed from a radial profile.
#[derive(Debug, Clone)]
pub struct PolicyField {
    model: PlanningModel,
    solution: RadialSolution,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl PolicyField {
    /// `solution` must start from the model's `u0`.
    pub fn new(model: PlanningModel, solution: RadialSolution) -> Result<Self> {
        if solution.u0() != model.u0() {
            return Err(Error::invalid(
                "solution",
                format!(
                    "starts at u0 = {}, model has u0 = {}",
                    solution.u0(),
                    model.u0()
                ),
            ));
        }
        Ok(Self { model, solution })
    }

    pub fn model(&self) -> &PlanningModel {
        &self.model
    }

    pub fn solution(&self) -> &RadialSolution {
        &self.solution
    }

    pub fn r_max(&self) -> f64 {
        self.solution.r_max()
    }

    fn check_state(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.model.dim {
            return Err(Error::invalid(
                "x",
                format!("has {} components, expected {}", x.len(), self.model.dim),
            ));
        }
        Ok(norm(x))
    }

    /// `(z, z')` at radius `r`.
    pub fn radial_value(&self, r: f64) -> Result<(f64, f64)> {
        let (u, du) = self.solution.interpolate(r)?;
        let s2 = 2.0 * self.model.sigma_sq;
        Ok((-s2 * u.ln(), -s2 * du / u))
    }

    /// `z(x) = -2|σ|² ln u(|x|)`.
    pub fn value_function(&self, x: &[f64]) -> Result<f64> {
        let r = self.check_state(x)?;
        Ok(self.radial_value(r)?.0)
    }

    /// `∇z(x) = z'(|x|) x / |x|`, zero at the origin.
    pub fn grad_z(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = self.check_state(x)?;
        let (_, dz) = self.radial_value(r)?;
        if r == 0.0 {
            return Ok(vec![0.0; x.len()]);
        }
        Ok(x.iter().map(|xi| dz * xi / r).collect())
    }

    /// `p*_i = max{0, |σ|² (u'/u) x_i / |x|}`.
    pub fn optimal_control(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut p = vec![0.0; x.len()];
        self.optimal_control_into(x, &mut p)?;
        Ok(p)
    }

    /// Allocation-free variant of [`optimal_control`](Self::optimal_control).
    pub fn optimal_control_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let r = self.check_state(x)?;
        if r == 0.0 {
            out.iter_mut().for_each(|p| *p = 0.0);
            return Ok(());
        }
        let (u, du) = self.solution.interpolate(r)?;
        let scale = self.model.sigma_sq * du / (u * r);
        for (p, xi) in out.iter_mut().zip(x) {
            *p = (scale * xi).max(0.0);
        }
        Ok(())
    }

    /// `U(y) = 2|σ|² ln u(|y|) = -z(y)`.
    pub fn utility(&self, y: &[f64]) -> Result<f64> {
        Ok(-self.value_function(y)?)
    }
}

/// `F(p) = p·∇z + |p|²`.
pub fn hamiltonian(grad_z: &[f64], p: &[f64]) -> f64 {
    grad_z.iter().zip(p).map(|(g, q)| q * g + q * q).sum()
}

/// Clamped minimiser of `F` over `p >= 0`.
pub fn clamped_argmin(grad_z: &[f64]) -> Vec<f64> {
    grad_z.iter().map(|g| (-0.5 * g).max(0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PGrid {
    pub points_per_axis: usize,
    /// Box is `[0, p*_i + width]` on each axis.
    pub width: f64,
}

impl Default for PGrid {
    fn default() -> Self {
        Self {
            points_per_axis: 201,
            width: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgminReport {
    pub grad_z: Vec<f64>,
    pub p_star: Vec<f64>,
    pub clamp_active: bool,
    pub f_at_p_star: f64,
    /// `-¼ Σ min(∂_i z, 0)²`, which is `-¼|∇z|²` when no clamp is active.
    pub expected_minimum: f64,
    pub value_error: f64,
    pub grid_minimum: f64,
    /// Largest distance from `p*` to a grid minimiser, in cells of that axis.
    pub cells_off: f64,
    pub passed: bool,
}

/// Brute-force minimisation of `F` over `p >= 0` near `p*`.
///
/// Up to two dimensions the full box is searched; beyond that, every
/// 2-D section through `p*` spanned by consecutive axes.
pub fn hamiltonian_argmin_check(
    field: &PolicyField,
    x: &[f64],
    grid: &PGrid,
) -> Result<ArgminReport> {
    let grad = field.grad_z(x)?;
    argmin_for_gradient(&grad, grid)
}

pub fn argmin_for_gradient(grad: &[f64], grid: &PGrid) -> Result<ArgminReport> {
    if grid.points_per_axis < 3 || !(grid.width > 0.0) {
        return Err(Error::invalid(
            "p_grid",
            "need >= 3 points per axis and positive width",
        ));
    }
    if grad.is_empty() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::invalid("grad_z", "must be nonempty and finite"));
    }
    let p_star = clamped_argmin(grad);
    let clamp_active = grad.iter().any(|&g| g > 0.0);
    let f_at_p_star = hamiltonian(grad, &p_star);
    let expected_minimum = -0.25 * grad.iter().map(|g| g.min(0.0).powi(2)).sum::<f64>();

    let n = grid.points_per_axis;
    let cell: Vec<f64> = p_star
        .iter()
        .map(|p| (p + grid.width) / (n - 1) as f64)
        .collect();
    let node = |axis: usize, k: usize| k as f64 * cell[axis];

    let sections: Vec<Vec<usize>> = match grad.len() {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1]],
        d => (0..d - 1).map(|i| vec![i, i + 1]).collect(),
    };

    let mut grid_minimum = f64::INFINITY;
    let mut cells_off: f64 = 0.0;
    let mut p = p_star.clone();
    for axes in &sections {
        let (mut best, mut best_idx) = (f64::INFINITY, vec![0; axes.len()]);
        let total = n.pow(axes.len() as u32);
        for flat in 0..total {
            let mut rest = flat;
            for &axis in axes {
                p[axis] = node(axis, rest % n);
                rest /= n;
            }
            let f = hamiltonian(grad, &p);
            if f < best {
                best = f;
                let mut rest = flat;
                for slot in best_idx.iter_mut() {
                    *slot = rest % n;
                    rest /= n;
                }
            }
        }
        for (&axis, &k) in axes.iter().zip(&best_idx) {
            cells_off = cells_off.max((node(axis, k) - p_star[axis]).abs() / cell[axis]);
            p[axis] = p_star[axis];
        }
        grid_minimum = grid_minimum.min(best);
    }

    let value_error = (f_at_p_star - expected_minimum).abs();
    let passed =
        cells_off <= 1.0 + 1e-9 && value_error <= 1e-10 && f_at_p_star <= grid_minimum + 1e-12;
    Ok(ArgminReport {
        grad_z: grad.to_vec(),
        p_star,
        clamp_active,
        f_at_p_star,
        expected_minimum,
        value_error,
        grid_minimum,
        cells_off,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjbReport {
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max: f64,
    pub mean: f64,
}

/// `|-2|σ|² Δz + z'² + 4αz - 4r²|` on every grid radius.
///
/// `z''` is the centred difference of the analytic `z'`; at the origin
/// `Δz = N z''(0)` with `z''(0) ≈ z'(Δ)/Δ`.
pub fn hjb_residual_profile(field: &PolicyField) -> HjbReport {
    let sol = &field.solution;
    let model = &field.model;
    let s2 = 2.0 * model.sigma_sq;
    let n = sol.len();
    let step = sol.step();
    let dim = model.dim as f64;
    let z: Vec<f64> = sol.u.iter().map(|u| -s2 * u.ln()).collect();
    let dz: Vec<f64> = sol
        .u
        .iter()
        .zip(&sol.du)
        .map(|(u, du)| -s2 * du / u)
        .collect();

    let residuals: Vec<f64> = (0..n)
        .map(|i| {
            let r = sol.grid[i];
            let laplacian = if i == 0 {
                dim * dz[1] / step
            } else {
                let d2 = if i + 1 < n {
                    (dz[i + 1] - dz[i - 1]) / (2.0 * step)
                } else if n >= 3 {
                    (3.0 * dz[i] - 4.0 * dz[i - 1] + dz[i - 2]) / (2.0 * step)
                } else {
                    (dz[i] - dz[i - 1]) / step
                };
                d2 + (dim - 1.0) * dz[i] / r
            };
            (-s2 * laplacian + dz[i] * dz[i] + 4.0 * model.alpha * z[i] - 4.0 * r * r).abs()
        })
        .collect();
    summarize(sol.grid.clone(), residuals)
}

fn summarize(radii: Vec<f64>, residuals: Vec<f64>) -> HjbReport {
    let max = residuals.iter().copied().fold(0.0, f64::max);
    let mean = residuals.iter().sum::<f64>() / residuals.len().max(1) as f64;
    HjbReport {
        radii,
        residuals,
        max,
        mean,
    }
}

/// Residuals at arbitrary radii, interpolated linearly from the grid profile.
pub fn hjb_residual(field: &PolicyField, radii: &[f64]) -> Result<HjbReport> {
    let profile = hjb_residual_profile(field);
    let step = field.solution.step();
    let r_max = field.r_max();
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r >= 0.0 && r <= r_max) {
            return Err(Error::OutOfReach { radius: r, r_max });
        }
        let k = ((r / step).floor() as usize).min(profile.residuals.len() - 2);
        let w = (r - profile.radii[k]) / step;
        out.push((1.0 - w) * profile.residuals[k] + w * profile.residuals[k + 1]);
    }
    Ok(summarize(radii.to_vec(), out))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTransfer {
    /// `2|σ|² ln u0 <= -z(r) <= 2|σ|² ln C̄1` on the grid.
    pub f1_holds: bool,
    /// `-z'(r) <= (2|σ|²/u0) C̄2 (r + 1)` on the grid.
    pub f2_holds: bool,
    pub worst_margin: f64,
}

pub fn bound_transfer(field: &PolicyField, bounds: &BoundsReport) -> BoundTransfer {
    let s2 = 2.0 * field.model.sigma_sq;
    let u0 = field.model.u0;
    let sol = &field.solution;
    let upper = s2 * bounds.c1.ln();
    let (mut f1, mut f2, mut worst) = (true, true, f64::INFINITY);
    for i in 0..sol.len() {
        let minus_z = s2 * sol.u[i].ln();
        let minus_dz = s2 * sol.du[i] / sol.u[i];
        let tol = 1e-9 * minus_z.abs().max(1.0);
        let m1 = (minus_z - s2 * u0.ln()).min(upper - minus_z);
        let m2 = s2 / u0 * bounds.c2 * (sol.grid[i] + 1.0) - minus_dz;
        f1 &= m1 >= -tol;
        f2 &= m2 >= -tol;
        worst = worst.min(m1).min(m2);
    }
    BoundTransfer {
        f1_holds: f1,
        f2_holds: f2,
        worst_margin: worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_bounds, p_bar, p_under};
    use crate::nonlinearity::HTransform;
    use crate::radial::{picard_solve, GridConfig};

    fn field(u0: f64, r_max: f64, n: usize) -> PolicyField {
        let (model, problem) = build_model(3, &[1.0, 1.0, 1.0], 1.0, u0).unwrap();
        let sol = picard_solve(&problem, &GridConfig::new(r_max, n)).unwrap();
        PolicyField::new(model, sol).unwrap()
    }

    #[test]
    fn model_coefficients() {
        let (m, p) = build_model(3, &[1.0, 1.0, 1.0], 1.0, 1.0).unwrap();
        assert_eq!(m.sigma_sq(), 3.0);
        assert!((p.a().eval(3.0) - 1.0).abs() < 1e-15);
        assert!((p.b().eval(0.0) - 2.0 / 3.0).abs() < 1e-15);
        let (_, p1) = build_model(1, &[2.0], 0.5, 1.0).unwrap();
        assert!((p1.a().eval(4.0) - 1.0).abs() < 1e-15);
        assert!((p1.b().eval(7.0) - 0.25).abs() < 1e-15);
        assert!(build_model(2, &[1.0, 0.0], 1.0, 1.0).is_err());
        assert!(build_model(2, &[1.0], 1.0, 1.0).is_err());
        assert!(build_model(1, &[1.0], 0.0, 1.0).is_err());
        assert!(build_model(1, &[1.0], 1.0, 0.5).is_err());
    }

    #[test]
    fn closed_forms() {
        let (m, p) = build_model(3, &[1.0, 1.0, 1.0], 1.0, 1.0).unwrap();
        assert!((m.closed_h(1f64.exp()).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(m.closed_h_inv(0.0).unwrap(), 1.0);
        assert!((m.closed_p_bar(1.0).unwrap() - 7.0 / 60.0).abs() < 1e-15);
        assert!((m.closed_p_under(1.0).unwrap() - 1.0 / 180.0).abs() < 1e-15);
        assert!(m.closed_h(0.5).is_err() && m.closed_h_inv(-1.0).is_err());
        assert!(matches!(m.closed_h_inv(50.0), Err(Error::Range { .. })));
        for r in [0.3, 2.0, 7.5] {
            let pb = m.closed_p_bar(r).unwrap();
            assert!((p_bar(&p, r).unwrap() - pb).abs() <= 1e-9 * pb);
        }

        let (m2, p2) = build_model(2, &[1.0, 2.0], 0.7, 3.0).unwrap();
        let ht = HTransform::new(p2.pair().clone(), 3.0).unwrap();
        for s in [3.0, 5.0, 60.0] {
            assert!((m2.closed_h(s).unwrap() - ht.eval(s).unwrap()).abs() < 1e-11);
        }
        for r in [0.5, 4.0] {
            let pu = m2.closed_p_under(r).unwrap();
            assert!((p_under(&p2, r).unwrap() - pu).abs() <= 1e-9 * pu);
        }
    }

    #[test]
    fn value_function_and_controls() {
        let f = field(1.0, 2.0, 801);
        assert_eq!(f.value_function(&[0.0; 3]).unwrap(), 0.0);
        assert_eq!(f.optimal_control(&[0.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(f.value_function(&[0.5, 0.0, 0.0]).unwrap() < 0.0);
        let p = f.optimal_control(&[-1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p, vec![0.0; 3]);
        let x = [1.0, 0.0, 0.0];
        let p = f.optimal_control(&x).unwrap();
        let (u, du) = f.solution().interpolate(1.0).unwrap();
        assert!((p[0] - 3.0 * du / u).abs() < 1e-14 && p[1] == 0.0);
        let g = f.grad_z(&x).unwrap();
        assert!((p[0] + g[0] / 2.0).abs() < 1e-14);
        assert!(f.value_function(&[3.0, 0.0, 0.0]).is_err());
        assert!(f.value_function(&[1.0, 0.0]).is_err());

        let e = field(1f64.exp(), 1.0, 101);
        assert!((e.value_function(&[0.0; 3]).unwrap() + 6.0).abs() < 1e-14);
    }

    #[test]
    fn argmin_trivial_cases() {
        let r = argmin_for_gradient(&[0.0, 0.0, 0.0], &PGrid::default()).unwrap();
        assert_eq!(r.f_at_p_star, 0.0);
        assert!(r.passed);
        let r = argmin_for_gradient(&[-2.0, 0.0, 0.0], &PGrid::default()).unwrap();
        assert_eq!(r.p_star, vec![1.0, 0.0, 0.0]);
        assert!((r.f_at_p_star + 1.0).abs() < 1e-15 && r.passed);
        let r = argmin_for_gradient(&[1.5, -0.4], &PGrid::default()).unwrap();
        assert!(r.clamp_active && r.passed, "{r:?}");
    }

    #[test]
    fn hjb_residual_is_small_and_second_order() {
        let coarse = hjb_residual_profile(&field(1.0, 2.0, 1001));
        let fine = hjb_residual_profile(&field(1.0, 2.0, 2001));
        assert!(fine.max < 1e-3);
        let ratio = coarse.max / fine.max;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
        let at = hjb_residual(&field(1.0, 2.0, 1001), &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(at.residuals.len(), 3);
    }

    #[test]
    fn constant_profile_residual_vanishes_only_at_origin() {
        let (model, _) = build_model(3, &[1.0, 1.0, 1.0], 1.0, 1.0).unwrap();
        let flat = RadialProblem::new(
            3,
            Coefficient::zero(),
            Coefficient::zero(),
            NonlinearityPair::model_log(),
            1.0,
        )
        .unwrap();
        let sol = picard_solve(&flat, &GridConfig::new(1.0, 11)).unwrap();
        let f = PolicyField::new(model, sol).unwrap();
        let rep = hjb_residual(&f, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(rep.residuals[0], 0.0);
        assert!((rep.residuals[1] - 1.0).abs() < 1e-12 && (rep.residuals[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_transfer_to_value_function() {
        let f = field(1.0, 1.0, 1001);
        let problem = f.model().radial_problem().unwrap();
        let ht = HTransform::new(problem.pair().clone(), 1.0).unwrap();
        let bounds = check_bounds(&problem, f.solution(), &ht).unwrap();
        let t = bound_transfer(&f, &bounds);
        assert!(t.f1_holds && t.f2_holds, "{t:?}");
    }
}
