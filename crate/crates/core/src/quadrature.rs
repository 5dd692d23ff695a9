//! Cumulative quadrature on uniform radial grids.
//!
//! Every iterated integral in this crate has the shape
//!
//! ```text
//!     g(τ) = ∫_0^τ h^p(s) f(s) ds / h^p(τ),      U(t) = ∫_t^r g(τ) dτ
//! ```
//!
//! for some radial warping `h`. The inner integral is accumulated panel by
//! panel with 5-point Gauss-Legendre applied to the cubic Hermite interpolants
//! of `h` and `f`, which stays exact for the polynomial weights `s^p` near the
//! origin. The outer integral uses the endpoint-corrected trapezoid rule
//!
//! ```text
//!     ∫_a^b F ≈ (b-a)/2 · (F(a) + F(b)) + (b-a)²/12 · (F'(a) - F'(b))
//! ```
//!
//! which is fourth order. The derivative is available in closed form because
//! `g` satisfies `g' = f - p (h'/h) g`.

use crate::error::{Error, Result};

/// Forward cumulative integral `I[i] = ∫_{x_0}^{x_i} F` from node values and derivatives.
pub fn cumulative_hermite(values: &[f64], derivs: &[f64], step: f64) -> Vec<f64> {
    debug_assert_eq!(values.len(), derivs.len());
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..values.len() {
        acc += hermite_panel(values[i - 1], values[i], derivs[i - 1], derivs[i], step);
        out.push(acc);
    }
    out
}

/// Backward cumulative integral `T[i] = ∫_{x_i}^{x_last} F`.
pub fn tail_hermite(values: &[f64], derivs: &[f64], step: f64) -> Vec<f64> {
    debug_assert_eq!(values.len(), derivs.len());
    let n = values.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n.saturating_sub(1)).rev() {
        acc += hermite_panel(values[i], values[i + 1], derivs[i], derivs[i + 1], step);
        out[i] = acc;
    }
    out
}

/// Nodes and weights of the 5-point Gauss-Legendre rule on `[-1, 1]`.
const GAUSS_LEGENDRE_5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Cubic Hermite interpolant on one panel at relative position `s ∈ [0, 1]`.
#[inline]
fn cubic_hermite(fa: f64, fb: f64, da: f64, db: f64, width: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * fa
        + (s3 - 2.0 * s2 + s) * width * da
        + (-2.0 * s3 + 3.0 * s2) * fb
        + (s3 - s2) * width * db
}

#[inline]
fn hermite_panel(fa: f64, fb: f64, da: f64, db: f64, step: f64) -> f64 {
    0.5 * step * (fa + fb) + step * step / 12.0 * (da - db)
}

/// Plain forward cumulative trapezoid rule.
pub fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * step * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Cubic Hermite interpolation on a uniform grid starting at `origin`.
pub fn hermite_interpolate(origin: f64, step: f64, values: &[f64], derivs: &[f64], x: f64) -> f64 {
    let n = values.len();
    if n == 1 {
        return values[0];
    }
    let pos = (x - origin) / step;
    let i = (pos.floor().max(0.0) as usize).min(n - 2);
    let s = pos - i as f64;
    if s == 0.0 {
        return values[i];
    }
    if s == 1.0 {
        return values[i + 1];
    }
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * values[i] + h10 * step * derivs[i] + h01 * values[i + 1] + h11 * step * derivs[i + 1]
}

/// Linear interpolation on a uniform grid starting at `origin`.
pub fn linear_interpolate(origin: f64, step: f64, values: &[f64], x: f64) -> f64 {
    let n = values.len();
    if n == 1 {
        return values[0];
    }
    let pos = (x - origin) / step;
    let i = (pos.floor().max(0.0) as usize).min(n - 2);
    let s = pos - i as f64;
    values[i] + s * (values[i + 1] - values[i])
}

/// Pairwise summation with a fixed split order, so the result depends only on
/// the order of `xs` and never on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// A uniform grid on `[0, r]` carrying a warping `h` and its derivative.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub step: f64,
    pub t: Vec<f64>,
    pub h: Vec<f64>,
    pub hp: Vec<f64>,
}

/// `g = ∫_0^τ h^p f / h^p(τ)` on the grid together with `g'`.
#[derive(Debug, Clone)]
pub struct AveragedProfile {
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
}

impl RadialGrid {
    /// Samples `warp(t) = (h(t), h'(t))` at `cells + 1` uniform nodes on `[0, radius]`.
    pub fn sample<F>(radius: f64, cells: usize, mut warp: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<(f64, f64)>,
    {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        if cells < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 cells, got {cells}")));
        }
        let step = radius / cells as f64;
        let mut t = Vec::with_capacity(cells + 1);
        let mut h = Vec::with_capacity(cells + 1);
        let mut hp = Vec::with_capacity(cells + 1);
        for i in 0..=cells {
            let ti = if i == cells { radius } else { i as f64 * step };
            let (hi, hpi) = warp(ti)?;
            t.push(ti);
            h.push(hi);
            hp.push(hpi);
        }
        h[0] = 0.0;
        Ok(RadialGrid { step, t, h, hp })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn radius(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// Weighted running average `g(τ) = ∫_0^τ h^p f ds / h^p(τ)`.
    ///
    /// `f` is given as node values and derivatives; `None` means `f ≡ 1`.
    /// For a non-integer power the weight is not smooth at the origin, so on
    /// `[0, t_series]` the cumulative integral uses the expansion
    /// `h^p ≈ s^p (1 + p·c0·s²/6)` with `c0 = h'''(0)`.
    pub fn averaged(
        &self,
        p: f64,
        f: Option<(&[f64], &[f64])>,
        c0: f64,
        t_series: f64,
    ) -> Result<AveragedProfile> {
        if !(p > -1.0) {
            return Err(Error::InvalidArgument(format!("weight power must exceed -1, got {p}")));
        }
        let n = self.len();
        let (fv, fd): (Vec<f64>, Vec<f64>) = match f {
            Some((v, d)) => (v.to_vec(), d.to_vec()),
            None => (vec![1.0; n], vec![0.0; n]),
        };
        let integer_power = p >= 0.0 && p.fract() == 0.0;
        let pi = p as i32;
        let pow = |x: f64| if integer_power { x.powi(pi) } else { x.powf(p) };

        let mut cumulative = vec![0.0; n];
        let start = if integer_power {
            0
        } else {
            let mut last = 0;
            for (i, (c, &s)) in cumulative.iter_mut().zip(&self.t).enumerate().skip(1) {
                if s > t_series {
                    break;
                }
                *c = fv[0] * (s.powf(p + 1.0) / (p + 1.0) + p * c0 * s.powf(p + 3.0) / (6.0 * (p + 3.0)));
                last = i;
            }
            last
        };
        // Gauss-Legendre on each panel with h and f from their cubic Hermite
        // interpolants; exact whenever h^p f is a polynomial of degree <= 9.
        let mut acc = cumulative[start];
        for i in (start + 1)..n {
            let a = self.t[i - 1];
            let width = self.t[i] - a;
            let mut panel = 0.0;
            for (x, wgt) in GAUSS_LEGENDRE_5 {
                let s = 0.5 * (x + 1.0);
                let h = cubic_hermite(self.h[i - 1], self.h[i], self.hp[i - 1], self.hp[i], width, s);
                let fx = cubic_hermite(fv[i - 1], fv[i], fd[i - 1], fd[i], width, s);
                panel += wgt * pow(h) * fx;
            }
            acc += 0.5 * width * panel;
            cumulative[i] = acc;
        }
        let mut g = vec![0.0; n];
        let mut dg = vec![0.0; n];
        dg[0] = fv[0] / (p + 1.0);
        for i in 1..n {
            let hpow = pow(self.h[i]);
            if !(hpow > 0.0) || !hpow.is_finite() {
                return Err(Error::QuadratureUnderflow(format!(
                    "h^{p} = {hpow} at t = {}",
                    self.t[i]
                )));
            }
            g[i] = cumulative[i] / hpow;
            dg[i] = fv[i] - p * self.hp[i] / self.h[i] * g[i];
        }
        Ok(AveragedProfile { g, dg })
    }
}
