//! Envelope functions, asymptotic classification, and numerical checks of
//! the a-priori estimates on computed radial solutions.
//!
//! With `m(s) = a(s) h(u0)` when `g(u0) = 0` and
//! `m(s) = (a(s) + b(s)) min{h(u0), g(u0)}` otherwise:
//!
//! ```text
//! P̄(r) = T[a + b](r),   P̲(r) = T[m](r),
//! u0 + P̲(r) <= u(r) <= H^{-1}(P̄(r)).
//! ```
//!
//! `P̲(∞) = ∞` forces a large solution and `P̄(∞) < ∞` a bounded one; the
//! remaining case is reported as [`Classification::Inconclusive`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::HTransform;
use crate::quadrature::{
    from_half_line, integrate, integrate_to_infinity, to_half_line, Tolerance,
};
use crate::radial::{nested_integral, uniform_grid, RadialProblem, RadialSolution};

/// `|g(u0)|` below which the first branch of `m` is taken.
pub const G_ZERO_TOL: f64 = 1e-12;

/// Pointwise slack of the envelope checks, relative to `max(1, |u|)`.
pub const ENVELOPE_TOL: f64 = 1e-5;

pub fn m_function(problem: &RadialProblem, s: f64) -> f64 {
    let pair = problem.pair();
    let u0 = problem.u0();
    let (h0, g0) = (pair.h(u0), pair.g(u0));
    if g0.abs() <= G_ZERO_TOL {
        problem.a().eval(s) * h0
    } else {
        (problem.a().eval(s) + problem.b().eval(s)) * h0.min(g0)
    }
}

fn coefficient_sum(problem: &RadialProblem, s: f64) -> f64 {
    problem.a().eval(s) + problem.b().eval(s)
}

/// `P̄` on every radius of a uniform grid.
pub fn p_bar_profile(problem: &RadialProblem, grid: &[f64]) -> Result<Vec<f64>> {
    let phi: Vec<f64> = grid.iter().map(|&s| coefficient_sum(problem, s)).collect();
    nested_integral(&phi, problem.dim(), grid)
}

/// `P̲` on every radius of a uniform grid.
pub fn p_under_profile(problem: &RadialProblem, grid: &[f64]) -> Result<Vec<f64>> {
    let phi: Vec<f64> = grid.iter().map(|&s| m_function(problem, s)).collect();
    nested_integral(&phi, problem.dim(), grid)
}

const ENVELOPE_INTERVALS: usize = 4000;

fn richardson(problem: &RadialProblem, r: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::invalid("r", format!("{r} must be nonnegative")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let value = |intervals: usize| -> Result<f64> {
        let grid = uniform_grid(r, intervals + 1);
        let phi: Vec<f64> = grid.iter().map(|&s| weight(s)).collect();
        Ok(nested_integral(&phi, problem.dim(), &grid)?[intervals])
    };
    let coarse = value(ENVELOPE_INTERVALS)?;
    let fine = value(2 * ENVELOPE_INTERVALS)?;
    // second-order trapezoid error, so one Richardson step
    Ok(fine + (fine - coarse) / 3.0)
}

pub fn p_bar(problem: &RadialProblem, r: f64) -> Result<f64> {
    richardson(problem, r, |s| coefficient_sum(problem, s))
}

pub fn p_under(problem: &RadialProblem, r: f64) -> Result<f64> {
    richardson(problem, r, |s| m_function(problem, s))
}

/// `∫_0^R t^{1-N} ∫_0^t s^{N-1} w(s) ds dt` by nested adaptive quadrature,
/// for radii far beyond any practical grid.
struct NestedQuadrature<'a> {
    dim: usize,
    weight: Box<dyn Fn(f64) -> f64 + 'a>,
    tol: Tolerance,
}

impl<'a> NestedQuadrature<'a> {
    fn new(dim: usize, weight: impl Fn(f64) -> f64 + 'a) -> Self {
        Self {
            dim,
            weight: Box::new(weight),
            tol: Tolerance::new(1e-300, 1e-12).with_pieces(4),
        }
    }

    fn inner_integrand(&self, s: f64) -> Result<f64> {
        let v = s.powi(self.dim as i32 - 1) * (self.weight)(s);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what: "coefficient".into(),
                at: s,
            })
        }
    }

    fn inner(&self, from: f64, to: f64) -> Result<f64> {
        Ok(integrate(|s| self.inner_integrand(s), from, to, self.tol)?.value)
    }

    /// Values at increasing `radii`, accumulated interval by interval.
    fn values_at(&self, radii: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(radii.len());
        let (mut lo, mut inner_lo, mut outer) = (0.0, 0.0, 0.0);
        for &hi in radii {
            if hi < lo {
                return Err(Error::invalid("radii", "must be increasing"));
            }
            let base = inner_lo;
            let start = lo;
            let inc = integrate(
                |t| {
                    if t == 0.0 {
                        return Ok(0.0);
                    }
                    let i_t = base + self.inner(start, t)?;
                    Ok(t.powi(1 - self.dim as i32) * i_t)
                },
                lo,
                hi,
                self.tol,
            )?;
            outer += inc.value;
            inner_lo += self.inner(lo, hi)?;
            lo = hi;
            out.push(outer);
        }
        Ok(out)
    }

    /// The full integral over `[0, ∞)`, both levels on the mapped unit interval.
    fn at_infinity(&self) -> Result<f64> {
        let mapped_inner = |x: f64| -> Result<f64> {
            let (s, jac) = to_half_line(0.0, x);
            let v = self.inner_integrand(s)?;
            Ok(if v == 0.0 { 0.0 } else { v * jac })
        };
        let q = integrate_to_infinity(
            |t| {
                if t == 0.0 {
                    return Ok(0.0);
                }
                let x = from_half_line(0.0, t);
                let i_t = integrate(&mapped_inner, 0.0, x, self.tol)?.value;
                Ok(t.powi(1 - self.dim as i32) * i_t)
            },
            0.0,
            Tolerance::new(1e-300, 1e-11).with_pieces(8),
        )?;
        Ok(q.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Large,
    Bounded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    /// `+∞` when the probes show unbounded growth.
    pub p_under_estimate: f64,
    pub p_bar_estimate: f64,
    pub classification: Classification,
    pub probe_radii: Vec<f64>,
    pub p_under_series: Vec<f64>,
    pub p_bar_series: Vec<f64>,
}

/// Probes `10^0 ..= 10^15`; long enough for `1/r` tails to pass the plateau test.
pub fn default_probes() -> Vec<f64> {
    decade_probes(0, 15)
}

/// Radii `10^k` for `k` in `lo..=hi`.
pub fn decade_probes(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 10f64.powi(k)).collect()
}

fn last_increments(series: &[f64]) -> (f64, f64) {
    let n = series.len();
    (series[n - 2] - series[n - 3], series[n - 1] - series[n - 2])
}

/// Large if `P̲` still grows tenfold over the last decade of probes;
/// Bounded if the last two increments of `P̄` are below `1e-10 P̄`.
pub fn classify(problem: &RadialProblem, probes: &[f64]) -> Result<AsymptoticReport> {
    if probes.len() < 4 {
        return Err(Error::invalid("probe_schedule", "needs at least 4 probes"));
    }
    if probes.windows(2).any(|w| !(w[1] > w[0])) || !(probes[0] > 0.0) {
        return Err(Error::invalid(
            "probe_schedule",
            "must be positive and strictly increasing",
        ));
    }
    let last = probes[probes.len() - 1];
    if last / probes[0] < 1e3 * (1.0 - 1e-12) {
        return Err(Error::invalid(
            "probe_schedule",
            "must span at least three decades",
        ));
    }

    let p_bar_series =
        NestedQuadrature::new(problem.dim(), |s| coefficient_sum(problem, s)).values_at(probes)?;
    let p_under_series =
        NestedQuadrature::new(problem.dim(), |s| m_function(problem, s)).values_at(probes)?;

    let n = probes.len();
    let decade_back = probes
        .iter()
        .rposition(|&r| r <= last / 10.0 * (1.0 + 1e-12))
        .unwrap_or(0);
    let under_last = p_under_series[n - 1];
    let large = under_last > 0.0 && under_last >= 10.0 * p_under_series[decade_back];

    let (prev_inc, last_inc) = last_increments(&p_bar_series);
    let bar_last = p_bar_series[n - 1];
    let bounded = prev_inc <= 1e-10 * bar_last && last_inc <= 1e-10 * bar_last;

    let classification = if large {
        Classification::Large
    } else if bounded {
        Classification::Bounded
    } else {
        Classification::Inconclusive
    };
    let p_bar_estimate = if bounded || last_inc < prev_inc {
        bar_last
    } else {
        f64::INFINITY
    };
    let p_under_estimate = if large { f64::INFINITY } else { under_last };

    Ok(AsymptoticReport {
        p_under_estimate,
        p_bar_estimate,
        classification,
        probe_radii: probes.to_vec(),
        p_under_series,
        p_bar_series,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// `u0 <= u <= C̄1` on the grid, with `C̄1 = H^{-1}(P̄(r_max))`.
    pub a1_holds: bool,
    pub c1: f64,
    /// `0 <= u' <= C̄2 (r + 1)` with `C̄2 = sup(a + b) (h(u(r_max)) + g(u(r_max)))`.
    pub a2_holds: bool,
    pub c2: f64,
    pub lower_envelope_holds: bool,
    pub upper_envelope_holds: bool,
    /// Smallest slack over all four checks; negative means a violation.
    pub worst_margin: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub a2_margin: f64,
    /// Radii where `H^{-1}(P̄)` left the representable range (bound taken as +∞).
    pub unbounded_from: Option<f64>,
    pub tolerance: f64,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.a1_holds && self.a2_holds && self.lower_envelope_holds && self.upper_envelope_holds
    }
}

fn inverse_or_infinite(ht: &HTransform, y: f64) -> Result<f64> {
    match ht.inverse(y) {
        Ok(v) => Ok(v),
        Err(Error::Range { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Evaluates the envelope and derivative estimates at every grid point.
pub fn check_bounds(
    problem: &RadialProblem,
    sol: &RadialSolution,
    ht: &HTransform,
) -> Result<BoundsReport> {
    if ht.u0() != problem.u0() {
        return Err(Error::invalid(
            "ht",
            "H must be built with the problem's u0",
        ));
    }
    let grid = &sol.grid;
    let p_bar = p_bar_profile(problem, grid)?;
    let p_under = p_under_profile(problem, grid)?;
    let u0 = problem.u0();
    let pair = problem.pair();
    let n = grid.len();

    let (mut lower_margin, mut upper_margin, mut a2_margin) =
        (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut lower_ok = true;
    let mut upper_ok = true;
    let mut a2_ok = true;
    let mut a1_ok = true;
    let mut unbounded_from = None;

    let u_end = sol.u[n - 1];
    let sup_ab = grid
        .iter()
        .map(|&r| coefficient_sum(problem, r))
        .fold(0.0, f64::max);
    let c2 = sup_ab * (pair.h(u_end) + pair.g(u_end));
    let c1 = inverse_or_infinite(ht, p_bar[n - 1])?;

    for i in 0..n {
        let u = sol.u[i];
        let tol = ENVELOPE_TOL * u.abs().max(1.0);

        let lower = u - (u0 + p_under[i]);
        lower_margin = lower_margin.min(lower);
        lower_ok &= lower >= -tol;

        let envelope = inverse_or_infinite(ht, p_bar[i])?;
        if envelope.is_infinite() && unbounded_from.is_none() {
            unbounded_from = Some(grid[i]);
        }
        let upper = envelope - u;
        upper_margin = upper_margin.min(upper);
        upper_ok &= upper >= -tol;

        a1_ok &= u >= u0 - tol && u <= c1 + tol;

        let du = sol.du[i];
        let a2 = (c2 * (grid[i] + 1.0) - du).min(du);
        a2_margin = a2_margin.min(a2);
        a2_ok &= a2 >= -tol;
    }

    Ok(BoundsReport {
        a1_holds: a1_ok,
        c1,
        a2_holds: a2_ok,
        c2,
        lower_envelope_holds: lower_ok,
        upper_envelope_holds: upper_ok,
        worst_margin: lower_margin.min(upper_margin).min(a2_margin),
        lower_margin,
        upper_margin,
        a2_margin,
        unbounded_from,
        tolerance: ENVELOPE_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub coefficients_nondecreasing: bool,
    /// Smallest centered second difference quotient over interior points.
    pub min_second_difference: f64,
    pub first_violation: Option<f64>,
    pub tolerance: f64,
    pub convex: bool,
    /// `2 (u(Δ) - u0) / Δ²`, the second difference with `u` reflected evenly.
    pub u2_origin: f64,
    /// `(a(0) h(u0) + b(0) g(u0)) / N`.
    pub u2_origin_expected: f64,
    pub origin_error: f64,
}

pub fn check_convexity(problem: &RadialProblem, sol: &RadialSolution) -> ConvexityReport {
    let n = sol.len();
    let step = sol.step();
    let scale = sol.u.iter().map(|u| u.abs()).fold(0.0, f64::max);
    let tolerance = 1e-8 * scale;
    let mut min_second_difference = f64::INFINITY;
    let mut first_violation = None;
    for i in 1..n - 1 {
        let d2 = (sol.u[i + 1] - 2.0 * sol.u[i] + sol.u[i - 1]) / (step * step);
        min_second_difference = min_second_difference.min(d2);
        if d2 < -tolerance && first_violation.is_none() {
            first_violation = Some(sol.grid[i]);
        }
    }
    let u2_origin = 2.0 * (sol.u[1] - sol.u[0]) / (step * step);
    let u2_origin_expected = problem.source(0.0, problem.u0()) / problem.dim() as f64;
    ConvexityReport {
        coefficients_nondecreasing: problem.coefficients_nondecreasing(sol.r_max(), n.min(2001)),
        min_second_difference,
        first_violation,
        tolerance,
        convex: first_violation.is_none(),
        u2_origin,
        u2_origin_expected,
        origin_error: (u2_origin - u2_origin_expected).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitStatus {
    /// Both sides finite and computed.
    Finite,
    /// `∫ r (a + b) dr` and `P̄` both diverge.
    Divergent,
    /// The right side diverges while `P̄` appears to settle.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitIdentity {
    /// `lim P̄(r)` from the nested double integral.
    pub lhs: f64,
    /// `(1 / (N - 2)) ∫_0^∞ r (a(r) + b(r)) dr`.
    pub rhs: f64,
    pub status: LimitStatus,
    pub radii: Vec<f64>,
    pub p_bar_series: Vec<f64>,
    pub moment_series: Vec<f64>,
}

impl LimitIdentity {
    pub fn relative_gap(&self) -> f64 {
        if self.lhs == self.rhs {
            return 0.0;
        }
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(f64::MIN_POSITIVE)
    }
}

/// Tail increment of `∫ r (a + b)` below which the moment counts as convergent.
const MOMENT_TAIL: f64 = 1e-12;

/// Both sides of `lim_{r→∞} P̄(r) = (1/(N-2)) ∫_0^∞ r (a + b) dr` for `N >= 3`.
///
/// `radii` (increasing) drive the tail test: the moment integral is taken
/// piece by piece over them and counts as convergent once the last piece
/// adds less than `1e-12` relative.
pub fn limit_identity(problem: &RadialProblem, radii: &[f64]) -> Result<LimitIdentity> {
    let dim = problem.dim();
    if dim < 3 {
        return Err(Error::UnsupportedDimension { dim, min: 3 });
    }
    if radii.len() < 3 || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::invalid(
            "r_max_schedule",
            "needs >= 3 positive increasing radii",
        ));
    }
    let tol = Tolerance::new(1e-300, 1e-13).with_pieces(4);
    let moment = |r: f64| -> Result<f64> {
        let v = r * coefficient_sum(problem, r);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what: "r (a + b)".into(),
                at: r,
            })
        }
    };
    let mut moment_series = Vec::with_capacity(radii.len());
    let (mut lo, mut acc, mut last_inc) = (0.0, 0.0, 0.0);
    for &hi in radii {
        last_inc = integrate(moment, lo, hi, tol)?.value;
        acc += last_inc;
        moment_series.push(acc);
        lo = hi;
    }
    let envelope = NestedQuadrature::new(dim, |s| coefficient_sum(problem, s));
    let p_bar_series = envelope.values_at(radii)?;
    let scale = 1.0 / (dim - 2) as f64;

    if last_inc <= MOMENT_TAIL * acc.max(1.0) {
        let rhs = scale
            * integrate_to_infinity(moment, 0.0, Tolerance::new(1e-300, 1e-13).with_pieces(8))?
                .value;
        let lhs = envelope.at_infinity()?;
        return Ok(LimitIdentity {
            lhs,
            rhs,
            status: LimitStatus::Finite,
            radii: radii.to_vec(),
            p_bar_series,
            moment_series,
        });
    }

    let (prev, last) = last_increments(&p_bar_series);
    let settling = last < 0.5 * prev;
    Ok(LimitIdentity {
        lhs: if settling {
            p_bar_series[p_bar_series.len() - 1]
        } else {
            f64::INFINITY
        },
        rhs: f64::INFINITY,
        status: if settling {
            LimitStatus::Inconclusive
        } else {
            LimitStatus::Divergent
        },
        radii: radii.to_vec(),
        p_bar_series,
        moment_series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::NonlinearityPair;
    use crate::radial::{picard_solve, Coefficient, GridConfig};

    fn model(dim: usize, sigma_sq: f64, alpha: f64, u0: f64) -> RadialProblem {
        let s4 = sigma_sq * sigma_sq;
        RadialProblem::new(
            dim,
            Coefficient::new("r^2/|σ|^4", move |r| r * r / s4),
            Coefficient::constant(2.0 * alpha / sigma_sq),
            NonlinearityPair::model_log(),
            u0,
        )
        .unwrap()
    }

    fn zero_problem() -> RadialProblem {
        RadialProblem::new(
            3,
            Coefficient::zero(),
            Coefficient::zero(),
            NonlinearityPair::model_log(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn m_branches() {
        let p = model(3, 3.0, 1.0, 1.0);
        assert!((m_function(&p, 2.0) - 4.0 / 9.0).abs() < 1e-15);
        // h(u0) = 2, g(u0) = 3 with a = b = 1
        let pair =
            NonlinearityPair::custom("hg", 1.0, |u| 2.0 * u / 3.0, |u| 3.0 * (u - 1.0) / 2.0)
                .unwrap();
        let q = RadialProblem::new(
            3,
            Coefficient::constant(1.0),
            Coefficient::constant(1.0),
            pair,
            3.0,
        )
        .unwrap();
        assert!((m_function(&q, 0.7) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn model_envelopes_at_one() {
        let p = model(3, 3.0, 1.0, 1.0);
        assert!((p_bar(&p, 1.0).unwrap() - 7.0 / 60.0).abs() < 1e-12);
        assert!((p_under(&p, 1.0).unwrap() - 1.0 / 180.0).abs() < 1e-13);
        let z = zero_problem();
        assert_eq!(p_bar(&z, 3.0).unwrap(), 0.0);
        assert_eq!(p_under(&z, 3.0).unwrap(), 0.0);
        assert_eq!(p_bar(&p, 0.0).unwrap(), 0.0);
        assert!(p_bar(&p, -1.0).is_err());
    }

    #[test]
    fn nested_quadrature_agrees_with_grid_route() {
        let p = model(3, 3.0, 1.0, 1.0);
        let adaptive = NestedQuadrature::new(3, |s| coefficient_sum(&p, s))
            .values_at(&[0.5, 1.0, 4.0])
            .unwrap();
        for (&r, v) in [0.5f64, 1.0, 4.0].iter().zip(adaptive) {
            let exact = r.powi(4) / (4.0 * 5.0 * 9.0) + r * r / 9.0;
            assert!((v - exact).abs() <= 1e-11 * exact, "{r}: {v} vs {exact}");
            assert!((p_bar(&p, r).unwrap() - exact).abs() <= 1e-10 * exact);
        }
    }

    #[test]
    fn classify_cases() {
        let probes = default_probes();
        let large = classify(&model(3, 3.0, 1.0, 1.0), &probes).unwrap();
        assert_eq!(large.classification, Classification::Large);
        assert!(large.p_under_estimate.is_infinite());

        let decay = RadialProblem::new(
            3,
            Coefficient::new("exp(-r)", |r| (-r).exp()),
            Coefficient::new("exp(-r)", |r| (-r).exp()),
            NonlinearityPair::model_log(),
            2.0,
        )
        .unwrap();
        let bounded = classify(&decay, &probes).unwrap();
        assert_eq!(bounded.classification, Classification::Bounded);
        assert!(
            (bounded.p_bar_estimate - 2.0).abs() < 1e-9,
            "{}",
            bounded.p_bar_estimate
        );

        let zero = classify(&zero_problem(), &probes).unwrap();
        assert_eq!(zero.classification, Classification::Bounded);
        assert_eq!(zero.p_bar_estimate, 0.0);

        // P̲ settles but P̄ keeps creeping: 1/(1+r)^2 in N = 3 gives P̄ ~ ln r.
        let slow = RadialProblem::new(
            3,
            Coefficient::new("(1+r)^-2", |r| (1.0 + r).powi(-2)),
            Coefficient::zero(),
            NonlinearityPair::model_log(),
            1.0,
        )
        .unwrap();
        assert_eq!(
            classify(&slow, &probes).unwrap().classification,
            Classification::Inconclusive
        );

        assert!(classify(&zero_problem(), &[1.0, 10.0, 100.0]).is_err());
        assert!(classify(&zero_problem(), &[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn bounds_on_the_model() {
        let p = model(3, 3.0, 1.0, 1.0);
        let sol = picard_solve(&p, &GridConfig::new(1.0, 1001)).unwrap();
        let ht = HTransform::new(p.pair().clone(), 1.0).unwrap();
        let report = check_bounds(&p, &sol, &ht).unwrap();
        assert!(report.all_hold(), "{report:?}");
        // Upper envelope in closed form: exp(e^{P̄} - 1).
        let closed = (f64::exp(7.0 / 60.0) - 1.0).exp();
        assert!((report.c1 - closed).abs() < 1e-6);
        assert!(sol.u[1000] < closed);
    }

    #[test]
    fn trivial_bounds_hold_with_equality() {
        let p = zero_problem().with_u0(2.0).unwrap();
        let sol = picard_solve(&p, &GridConfig::new(1.0, 101)).unwrap();
        let ht = HTransform::new(p.pair().clone(), 2.0).unwrap();
        let report = check_bounds(&p, &sol, &ht).unwrap();
        assert!(report.all_hold());
        assert_eq!(report.lower_margin, 0.0);
        assert_eq!(report.upper_margin, 0.0);
    }

    #[test]
    fn sinh_convexity_at_origin() {
        let pair = NonlinearityPair::power(1.0, 1.0, 1.0).unwrap();
        let p = RadialProblem::new(
            3,
            Coefficient::constant(1.0),
            Coefficient::zero(),
            pair,
            1.0,
        )
        .unwrap();
        let sol = picard_solve(&p, &GridConfig::new(2.0, 2001)).unwrap();
        let c = check_convexity(&p, &sol);
        assert!(c.convex && c.coefficients_nondecreasing);
        assert!((c.u2_origin_expected - 1.0 / 3.0).abs() < 1e-15);
        assert!(c.origin_error < 1e-6, "{c:?}");
        let z = zero_problem();
        let flat = picard_solve(&z, &GridConfig::new(1.0, 51)).unwrap();
        assert_eq!(check_convexity(&z, &flat).min_second_difference, 0.0);
    }

    #[test]
    fn limit_identity_examples() {
        let radii = decade_probes(0, 12);
        let exp = RadialProblem::new(
            3,
            Coefficient::new("exp(-r)", |r| (-r).exp()),
            Coefficient::zero(),
            NonlinearityPair::model_log(),
            1.0,
        )
        .unwrap();
        let li = limit_identity(&exp, &radii).unwrap();
        assert_eq!(li.status, LimitStatus::Finite);
        assert!(
            (li.rhs - 1.0).abs() < 1e-10 && (li.lhs - 1.0).abs() < 1e-6,
            "{li:?}"
        );

        let quartic = RadialProblem::new(
            4,
            Coefficient::new("(1+r)^-4", |r| (1.0 + r).powi(-4)),
            Coefficient::zero(),
            NonlinearityPair::model_log(),
            1.0,
        )
        .unwrap();
        let li = limit_identity(&quartic, &radii).unwrap();
        assert!((li.rhs - 1.0 / 12.0).abs() < 1e-10, "{li:?}");
        assert!(li.relative_gap() < 1e-6, "{li:?}");

        let z = limit_identity(&zero_problem(), &radii).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));

        let growing = model(3, 3.0, 1.0, 1.0);
        let li = limit_identity(&growing, &decade_probes(0, 6)).unwrap();
        assert_eq!(li.status, LimitStatus::Divergent);
        assert!(li.lhs.is_infinite() && li.rhs.is_infinite());

        let flat = model(2, 3.0, 1.0, 1.0);
        assert!(matches!(
            limit_identity(&flat, &radii),
            Err(Error::UnsupportedDimension { dim: 2, .. })
        ));
    }
}
