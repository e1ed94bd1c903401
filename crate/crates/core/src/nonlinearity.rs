//! The nonlinearities `h`, `g` of `Δu = a(|x|) h(u) + b(|x|) g(u)` and the
//! integral `H(s) = ∫_{u0}^{s} dt / (h(t) + g(t))` with its inverse.
//!
//! Admissible pairs satisfy:
//! * `h` continuous, nondecreasing, `h(0) = 0`, `h > 0` on `(0, ∞)`;
//! * `g` continuous with a zero `s0 > 0`, negative on `(0, s0)`, positive and
//!   nondecreasing on `(s0, ∞)`, and `g(0+) = 0`.
//!
//! Whether `H(∞)` diverges decides if solutions exist on all of `[0, ∞)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PairKind {
    /// `h(u) = u`, `g(u) = u ln u`, `s0 = 1`.
    ModelLog,
    /// `h(u) = u^p`, `g(u) = u^q - s0^q`.
    Power {
        p: f64,
        q: f64,
    },
    Custom(String),
}

#[derive(Clone)]
pub struct NonlinearityPair {
    kind: PairKind,
    s0: f64,
    h: ScalarFn,
    g: ScalarFn,
}

impl fmt::Debug for NonlinearityPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearityPair")
            .field("kind", &self.kind)
            .field("s0", &self.s0)
            .finish()
    }
}

impl NonlinearityPair {
    pub fn model_log() -> Self {
        Self {
            kind: PairKind::ModelLog,
            s0: 1.0,
            h: Arc::new(|u| u),
            g: Arc::new(|u| if u == 0.0 { 0.0 } else { u * u.ln() }),
        }
    }

    /// `h(u) = u^p`, `g(u) = u^q - s0^q`. Mostly useful to produce pairs for
    /// which `H(∞)` is finite.
    pub fn power(p: f64, q: f64, s0: f64) -> Result<Self> {
        for (name, v) in [("power exponent p", p), ("power exponent q", q), ("s0", s0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("{v} must be positive and finite"),
                ));
            }
        }
        let shift = s0.powf(q);
        Ok(Self {
            kind: PairKind::Power { p, q },
            s0,
            h: Arc::new(move |u| if u <= 0.0 { 0.0 } else { u.powf(p) }),
            g: Arc::new(move |u| u.max(0.0).powf(q) - shift),
        })
    }

    pub fn custom<H, G>(name: impl Into<String>, s0: f64, h: H, g: G) -> Result<Self>
    where
        H: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(s0.is_finite() && s0 > 0.0) {
            return Err(Error::invalid(
                "s0",
                format!("{s0} must be positive and finite"),
            ));
        }
        Ok(Self {
            kind: PairKind::Custom(name.into()),
            s0,
            h: Arc::new(h),
            g: Arc::new(g),
        })
    }

    pub fn kind(&self) -> &PairKind {
        &self.kind
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    #[inline]
    pub fn h(&self, s: f64) -> f64 {
        (self.h)(s)
    }

    #[inline]
    pub fn g(&self, s: f64) -> f64 {
        (self.g)(s)
    }

    /// Canonical name, parseable back through [`FromStr`] for built-in kinds.
    pub fn name(&self) -> String {
        match &self.kind {
            PairKind::ModelLog => "model-log".to_string(),
            PairKind::Power { p, q } => format!("power:{p},{q},{}", self.s0),
            PairKind::Custom(name) => name.clone(),
        }
    }
}

impl FromStr for NonlinearityPair {
    type Err = Error;

    /// Accepts `model-log` and `power:p,q,s0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "model-log" {
            return Ok(Self::model_log());
        }
        if let Some(args) = s.strip_prefix("power:") {
            let parts: Vec<f64> = args
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::invalid("pair", format!("bad number in '{s}': {e}")))?;
            if let [p, q, s0] = parts[..] {
                return Self::power(p, q, s0);
            }
            return Err(Error::invalid(
                "pair",
                format!("'{s}' needs exactly p,q,s0"),
            ));
        }
        Err(Error::invalid(
            "pair",
            format!("unknown nonlinearity '{s}' (expected model-log or power:p,q,s0)"),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    HVanishesAtZero,
    HPositive,
    HNondecreasing,
    GVanishesAtS0,
    GNegativeBelowS0,
    GPositiveAboveS0,
    GNondecreasingAboveS0,
    /// `g(0+) = 0`. Reported but not required; see [`ConditionCheck::blocking`].
    GVanishesAtOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub passed: bool,
    pub first_violation: Option<f64>,
    /// Non-blocking checks do not affect [`ValidationReport::is_admissible`].
    pub blocking: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub s0: f64,
    pub samples: usize,
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.blocking)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, condition: Condition) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.condition == condition)
    }

    /// `Ok(())` when admissible, otherwise a validation error listing failures.
    pub fn require(&self) -> Result<()> {
        if self.is_admissible() {
            return Ok(());
        }
        let failed: Vec<String> = self
            .failures()
            .filter(|c| c.blocking)
            .map(|c| match c.first_violation {
                Some(s) => format!("{:?} (first violation at s = {s})", c.condition),
                None => format!("{:?}", c.condition),
            })
            .collect();
        Err(Error::Validation(failed.join(", ")))
    }
}

fn sample(f: &ScalarFn, s: f64, which: &str) -> Result<f64> {
    let v = f(s);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            what: format!("{which}(s)"),
            at: s,
        })
    }
}

fn first_failure<'a>(
    points: impl IntoIterator<Item = &'a (f64, f64)>,
    ok: impl Fn(f64) -> bool,
) -> Option<f64> {
    points.into_iter().find(|(_, v)| !ok(*v)).map(|(s, _)| *s)
}

fn first_decrease(points: &[(f64, f64)]) -> Option<f64> {
    points
        .windows(2)
        .find(|w| w[1].1 < w[0].1 - 1e-14 * w[0].1.abs())
        .map(|w| w[1].0)
}

/// Samples the admissibility conditions on `(0, s_max]`.
///
/// A quarter of the samples fall in `(0, s0)`, the rest in `(s0, s_max]`;
/// `s0` itself is always tested.
pub fn validate_pair(
    pair: &NonlinearityPair,
    sample_count: usize,
    s_max: f64,
) -> Result<ValidationReport> {
    if sample_count < 8 {
        return Err(Error::invalid(
            "sample_count",
            format!("{sample_count} < 8"),
        ));
    }
    let s0 = pair.s0;
    if !(s_max > s0) {
        return Err(Error::invalid(
            "s_max",
            format!("{s_max} must exceed s0 = {s0}"),
        ));
    }

    let below_n = (sample_count / 4).max(2);
    let above_n = sample_count - below_n;
    let below: Vec<f64> = (1..=below_n)
        .map(|k| s0 * k as f64 / (below_n + 1) as f64)
        .collect();
    let above: Vec<f64> = (1..=above_n)
        .map(|k| s0 + (s_max - s0) * k as f64 / above_n as f64)
        .collect();

    let h_zero = sample(&pair.h, 0.0, "h")?;
    let mut h_pts = Vec::with_capacity(sample_count + 1);
    for &s in below.iter().chain(std::iter::once(&s0)).chain(above.iter()) {
        h_pts.push((s, sample(&pair.h, s, "h")?));
    }
    let g_below = below
        .iter()
        .map(|&s| sample(&pair.g, s, "g").map(|v| (s, v)))
        .collect::<Result<Vec<_>>>()?;
    let g_above = above
        .iter()
        .map(|&s| sample(&pair.g, s, "g").map(|v| (s, v)))
        .collect::<Result<Vec<_>>>()?;
    let g_s0 = sample(&pair.g, s0, "g")?;

    let scale = h_pts.iter().map(|(_, v)| v.abs()).fold(1.0, f64::max);
    let zero_tol = 1e-12 * scale;

    let origin_probe = s0 * 1e-12;
    let g_origin = sample(&pair.g, origin_probe, "g")?;

    let mut checks = vec![
        ConditionCheck {
            condition: Condition::HVanishesAtZero,
            passed: h_zero.abs() <= zero_tol,
            first_violation: (h_zero.abs() > zero_tol).then_some(0.0),
            blocking: true,
        },
        {
            let v = first_failure(&h_pts, |h| h > 0.0);
            ConditionCheck {
                condition: Condition::HPositive,
                passed: v.is_none(),
                first_violation: v,
                blocking: true,
            }
        },
        {
            let mut with_zero = vec![(0.0, h_zero)];
            with_zero.extend_from_slice(&h_pts);
            let v = first_decrease(&with_zero);
            ConditionCheck {
                condition: Condition::HNondecreasing,
                passed: v.is_none(),
                first_violation: v,
                blocking: true,
            }
        },
        ConditionCheck {
            condition: Condition::GVanishesAtS0,
            passed: g_s0.abs() <= zero_tol,
            first_violation: (g_s0.abs() > zero_tol).then_some(s0),
            blocking: true,
        },
        {
            let v = first_failure(&g_below, |g| g < 0.0);
            ConditionCheck {
                condition: Condition::GNegativeBelowS0,
                passed: v.is_none(),
                first_violation: v,
                blocking: true,
            }
        },
        {
            let v = first_failure(&g_above, |g| g > 0.0);
            ConditionCheck {
                condition: Condition::GPositiveAboveS0,
                passed: v.is_none(),
                first_violation: v,
                blocking: true,
            }
        },
        {
            let v = first_decrease(&g_above);
            ConditionCheck {
                condition: Condition::GNondecreasingAboveS0,
                passed: v.is_none(),
                first_violation: v,
                blocking: true,
            }
        },
    ];
    let origin_ok = g_origin.abs() <= 1e-6 * scale;
    checks.push(ConditionCheck {
        condition: Condition::GVanishesAtOrigin,
        passed: origin_ok,
        first_violation: (!origin_ok).then_some(origin_probe),
        blocking: false,
    });

    Ok(ValidationReport {
        s0,
        samples: h_pts.len(),
        checks,
    })
}

/// Integration cutoff for deciding whether `H(∞)` is finite.
const H_CUTOFF: f64 = 1e12;
/// Per-decade increment below which the tail is declared convergent.
const H_TAIL_INCREMENT: f64 = 1e-14;

fn h_tolerance() -> Tolerance {
    Tolerance::new(1e-300, 1e-13)
}

/// `H(s) = ∫_{u0}^{s} dt / (h(t) + g(t))` for a fixed lower limit `u0`.
#[derive(Debug, Clone)]
pub struct HTransform {
    pair: NonlinearityPair,
    u0: f64,
    h_infinity: f64,
    /// `(s, H(s))` at `u0 · 10^k` up to the cutoff.
    decades: Vec<(f64, f64)>,
}

impl HTransform {
    pub fn new(pair: NonlinearityPair, u0: f64) -> Result<Self> {
        if !(u0.is_finite() && u0 >= pair.s0) {
            return Err(Error::invalid(
                "u0",
                format!("{u0} must be >= s0 = {}", pair.s0),
            ));
        }
        let at_u0 = pair.h(u0) + pair.g(u0);
        if !(at_u0 > 0.0) {
            return Err(Error::Domain {
                t: u0,
                value: at_u0,
            });
        }

        let mut ht = Self {
            pair,
            u0,
            h_infinity: f64::INFINITY,
            decades: vec![(u0, 0.0)],
        };
        let cutoff = H_CUTOFF.max(10.0 * u0);
        let mut increments = Vec::new();
        let (mut s, mut acc) = (u0, 0.0);
        while s < cutoff {
            let next = (10.0 * s).min(cutoff);
            let inc = ht.piece(s, next)?;
            acc += inc;
            increments.push(inc);
            ht.decades.push((next, acc));
            s = next;
        }
        let last = increments[increments.len() - 1];
        let prev = if increments.len() > 1 {
            increments[increments.len() - 2]
        } else {
            f64::INFINITY
        };
        if last < H_TAIL_INCREMENT && last <= prev {
            let ratio = last / prev;
            let tail = if ratio < 1.0 {
                last * ratio / (1.0 - ratio)
            } else {
                0.0
            };
            ht.h_infinity = acc + tail;
        }
        Ok(ht)
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn pair(&self) -> &NonlinearityPair {
        &self.pair
    }

    /// `+∞` when condition O holds operationally, else the finite limit.
    pub fn h_infinity(&self) -> f64 {
        self.h_infinity
    }

    fn integrand(&self, t: f64) -> Result<f64> {
        let denom = self.pair.h(t) + self.pair.g(t);
        if denom > 0.0 {
            Ok(1.0 / denom)
        } else {
            Err(Error::Domain { t, value: denom })
        }
    }

    fn piece(&self, a: f64, b: f64) -> Result<f64> {
        Ok(integrate(|t| self.integrand(t), a, b, h_tolerance())?.value)
    }

    /// `H(s)`, exactly zero at `s = u0`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= self.u0) {
            return Err(Error::invalid(
                "s",
                format!("{s} is below u0 = {}", self.u0),
            ));
        }
        if s == self.u0 {
            return Ok(0.0);
        }
        let idx = self.decades.partition_point(|&(b, _)| b <= s);
        let (mut base, mut acc) = self.decades[idx - 1];
        // Past the table: keep stepping by decades.
        while 10.0 * base < s {
            acc += self.piece(base, 10.0 * base)?;
            base *= 10.0;
        }
        Ok(acc + self.piece(base, s)?)
    }

    /// `H^{-1}(y)` by bracket expansion over decades, then bisection.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::invalid("y", format!("{y} must be nonnegative")));
        }
        if y == 0.0 {
            return Ok(self.u0);
        }
        if y >= self.h_infinity {
            return Err(Error::Range {
                y,
                h_infinity: self.h_infinity,
            });
        }

        let idx = self.decades.partition_point(|&(_, h)| h < y);
        let (mut lo, mut h_lo, mut hi) = if idx < self.decades.len() {
            let (lo, h_lo) = self.decades[idx - 1];
            (lo, h_lo, self.decades[idx].0)
        } else {
            let (mut lo, mut h_lo) = self.decades[self.decades.len() - 1];
            loop {
                let hi = 10.0 * lo;
                if !hi.is_finite() || hi > f64::MAX / 10.0 {
                    return Err(Error::Range {
                        y,
                        h_infinity: self.h_infinity,
                    });
                }
                let h_hi = h_lo + self.piece(lo, hi)?;
                if h_hi >= y {
                    break (lo, h_lo, hi);
                }
                lo = hi;
                h_lo = h_hi;
            }
        };

        while hi - lo > 4.0 * f64::EPSILON * hi {
            let mid = if hi > 4.0 * lo {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            let h_mid = h_lo + self.piece(lo, mid)?;
            if h_mid < y {
                lo = mid;
                h_lo = h_mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_log_passes_validation() {
        let pair = NonlinearityPair::model_log();
        let report = validate_pair(&pair, 64, 50.0).unwrap();
        assert!(report.is_admissible(), "{report:?}");
        assert!(report.checks.iter().all(|c| c.passed));
        assert!(pair.g(0.5) < 0.0 && pair.g(2.0) > 0.0);
        assert!((pair.g(2.0) - 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn shifted_linear_pair_is_admissible() {
        let pair = NonlinearityPair::custom("linear", 1.0, |u| u, |u| u - 1.0).unwrap();
        let report = validate_pair(&pair, 32, 10.0).unwrap();
        assert!(report.is_admissible());
        // g(0+) = -1, reported without blocking
        let origin = report.check(Condition::GVanishesAtOrigin).unwrap();
        assert!(!origin.passed && !origin.blocking);
    }

    #[test]
    fn wrong_zero_is_rejected() {
        let pair = NonlinearityPair::custom("bad", 1.0, |u| u, |u| u + 1.0).unwrap();
        let report = validate_pair(&pair, 32, 10.0).unwrap();
        assert!(!report.is_admissible());
        let c = report.check(Condition::GVanishesAtS0).unwrap();
        assert_eq!(c.first_violation, Some(1.0));
        assert!(matches!(report.require(), Err(Error::Validation(_))));
    }

    #[test]
    fn decreasing_h_reports_first_sample() {
        let pair = NonlinearityPair::custom("bump", 1.0, |u| u * (-u).exp(), |u| u - 1.0).unwrap();
        let report = validate_pair(&pair, 16, 5.0).unwrap();
        let c = report.check(Condition::HNondecreasing).unwrap();
        assert!(!c.passed);
        assert!(c.first_violation.unwrap() > 1.0);
    }

    #[test]
    fn non_finite_sample_is_an_error() {
        let pair = NonlinearityPair::custom(
            "pole",
            1.0,
            |u| u,
            |u| {
                if u > 3.0 {
                    f64::NAN
                } else {
                    u - 1.0
                }
            },
        )
        .unwrap();
        let err = validate_pair(&pair, 16, 5.0).unwrap_err();
        assert!(matches!(err, Error::NonFinite { at, .. } if at > 3.0));
    }

    #[test]
    fn validation_preconditions() {
        let pair = NonlinearityPair::model_log();
        assert!(validate_pair(&pair, 4, 10.0).is_err());
        assert!(validate_pair(&pair, 16, 0.5).is_err());
    }

    #[test]
    fn names_round_trip() {
        for name in ["model-log", "power:3,1,1", "power:2,1.5,0.5"] {
            let pair: NonlinearityPair = name.parse().unwrap();
            let again: NonlinearityPair = pair.name().parse().unwrap();
            assert_eq!(pair.kind(), again.kind());
            assert_eq!(pair.s0(), again.s0());
        }
        assert!("power:1,2".parse::<NonlinearityPair>().is_err());
        assert!("quadratic".parse::<NonlinearityPair>().is_err());
        let p: NonlinearityPair = "power:3,1,1".parse().unwrap();
        assert_eq!(p.g(1.0), 0.0);
        assert_eq!(p.h(2.0), 8.0);
    }

    #[test]
    fn model_log_h_matches_closed_form() {
        let ht = HTransform::new(NonlinearityPair::model_log(), 1.0).unwrap();
        assert!(ht.h_infinity().is_infinite());
        assert_eq!(ht.eval(1.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((ht.eval(e).unwrap() - 2f64.ln()).abs() < 1e-12);
        for s in [1.001, 2.0, 37.0, 1e3, 1e6] {
            let exact = (1.0 + f64::ln(s)).ln();
            assert!(
                (ht.eval(s).unwrap() - exact).abs() <= 1e-9 * exact,
                "s = {s}"
            );
        }
    }

    #[test]
    fn model_log_inverse() {
        let ht = HTransform::new(NonlinearityPair::model_log(), 1.0).unwrap();
        assert_eq!(ht.inverse(0.0).unwrap(), 1.0);
        let e = std::f64::consts::E;
        assert!((ht.inverse(2f64.ln()).unwrap() - e).abs() < 1e-12);
        // beyond f64 range: exp(e^7 - 1) overflows
        assert!(matches!(ht.inverse(7.0), Err(Error::Range { .. })));
    }

    #[test]
    fn cubic_pair_has_finite_h_infinity() {
        let pair = NonlinearityPair::power(3.0, 1.0, 1.0).unwrap();
        let ht = HTransform::new(pair, 1.0).unwrap();
        let h_inf = ht.h_infinity();
        assert!(h_inf.is_finite());
        // Oracle: ∫_1^X dt/(t^3+t-1) on [1, 1e4] plus the tail bound ∫_X^∞ t^{-3} = 1/(2X^2).
        let head = integrate(
            |t| Ok(1.0 / (t * t * t + t - 1.0)),
            1.0,
            1e4,
            Tolerance::new(1e-15, 1e-14),
        )
        .unwrap()
        .value;
        let tail_upper = 0.5 / 1e8;
        assert!(
            h_inf >= head - 1e-12 && h_inf <= head + tail_upper,
            "{h_inf} vs {head}"
        );
        assert!(h_inf < 10.0);
        assert!(matches!(ht.inverse(10.0), Err(Error::Range { .. })));
        let s = ht.inverse(0.5 * h_inf).unwrap();
        assert!((ht.eval(s).unwrap() - 0.5 * h_inf).abs() < 1e-10);
    }

    #[test]
    fn domain_errors() {
        // h + g turns negative above t = 2
        let pair = NonlinearityPair::custom(
            "neg",
            1.0,
            |u| u,
            |u| if u > 2.0 { -10.0 * u } else { u - 1.0 },
        )
        .unwrap();
        let ht = HTransform::new(pair.clone(), 1.0);
        assert!(matches!(ht, Err(Error::Domain { .. })));
        assert!(HTransform::new(pair, 0.5).is_err());
    }
}
