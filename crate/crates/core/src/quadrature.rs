//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Integrands are fallible so callers can abort on domain violations
//! (for instance a non-positive `h + g`) at the first offending node.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
    /// Number of equal pieces the interval is cut into before adapting.
    pub initial_pieces: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    pub fn with_pieces(mut self, pieces: usize) -> Self {
        self.initial_pieces = pieces.max(1);
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-14,
            rel: 1e-12,
            max_intervals: 4000,
            initial_pieces: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(f, center)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        kron += w * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Ok((value, error))
}

fn checked<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            what: "integrand".into(),
            at: x,
        })
    }
}

/// Integrates `f` over `[a, b]`; `a == b` returns exactly zero.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quad>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Quad {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        let q = integrate(f, b, a, tol)?;
        return Ok(Quad {
            value: -q.value,
            ..q
        });
    }

    let pieces = tol.initial_pieces.max(1);
    let mut heap = BinaryHeap::with_capacity(pieces * 4);
    let width = (b - a) / pieces as f64;
    let mut evaluations = 0;
    for k in 0..pieces {
        let lo = a + width * k as f64;
        let hi = if k + 1 == pieces { b } else { lo + width };
        let (value, error) = kronrod(&mut f, lo, hi)?;
        evaluations += 15;
        heap.push(Segment {
            a: lo,
            b: hi,
            value,
            error,
        });
    }

    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Quad {
                value,
                error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        // Interval can no longer be split in floating point.
        if heap.len() + 2 > tol.max_intervals || mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            let (value, error) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
            // Accept results that are within a modest factor of the request.
            if error <= 100.0 * tol.abs.max(tol.rel * value.abs()) {
                return Ok(Quad {
                    value,
                    error,
                    evaluations,
                });
            }
            return Err(Error::Quadrature {
                a,
                b,
                estimate: error,
            });
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod(&mut f, lo, hi)?;
            evaluations += 15;
            heap.push(Segment {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
}

/// Map `x in [0, 1)` onto `t in [a, inf)` via `t = a + x / (1 - x)`.
#[inline]
pub fn to_half_line(a: f64, x: f64) -> (f64, f64) {
    let one_minus = 1.0 - x;
    (a + x / one_minus, 1.0 / (one_minus * one_minus))
}

/// Inverse of [`to_half_line`].
#[inline]
pub fn from_half_line(a: f64, t: f64) -> f64 {
    let s = t - a;
    s / (1.0 + s)
}

/// Integrates `f` over `[a, inf)` after mapping onto the unit interval.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, tol: Tolerance) -> Result<Quad>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate(
        |x| {
            let (t, jac) = to_half_line(a, x);
            let v = f(t)?;
            // Integrands decaying faster than the Jacobian grows vanish at x -> 1.
            if v == 0.0 {
                Ok(0.0)
            } else {
                Ok(v * jac)
            }
        },
        0.0,
        1.0,
        tol,
    )
}
