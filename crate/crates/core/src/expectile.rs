//! Expectiles, their Kusuoka representation, dual norm and higher-order
//! variant.
//!
//! With `η = (1 − α)/α` the expectile is the maximum over `γ ∈ [0, 1 − η]` of
//! the two-atom spectral risks `(1 − γ) E Y + γ AVaR_{a(γ)}(Y)` with
//! `a(γ) = 1 − γη / ((1 − γ)(1 − η))`. Writing `Q(a) = ∫_a^1 F⁻¹` every
//! objective below becomes piecewise linear in `γ`, so maxima are taken
//! exactly over breakpoints instead of by iterative search.

use crate::distribution::DiscreteDistribution;
use crate::error::{check_range, Result};
use crate::spectral::KusuokaMixture;

// Levels computed in floating point may leave [0, 1] by rounding; beyond this
// slack a γ is treated as infeasible.
const LEVEL_SLACK: f64 = 1e-12;

/// Expectile parameters; `eta = (1 − alpha)/alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectileParams {
    pub alpha: f64,
    pub eta: f64,
}

impl ExpectileParams {
    /// Accepts `alpha ∈ (0, 1)`.
    pub fn new(alpha: f64) -> Result<Self> {
        check_range("alpha", alpha, "(0, 1)", alpha > 0.0 && alpha < 1.0)?;
        Ok(Self {
            alpha,
            eta: (1.0 - alpha) / alpha,
        })
    }

    /// Accepts `alpha ∈ [1/2, 1)`, where the expectile is a risk measure.
    pub fn risk(alpha: f64) -> Result<Self> {
        check_range("alpha", alpha, "[0.5, 1)", (0.5..1.0).contains(&alpha))?;
        Self::new(alpha)
    }

    /// `a(γ) = 1 − γη / ((1 − γ)(1 − η))`; requires `η < 1`.
    pub fn tail_level(&self, gamma: f64) -> f64 {
        1.0 - gamma * self.eta / ((1.0 - gamma) * (1.0 - self.eta))
    }

    /// The Kusuoka measure `(1 − γ) δ₀ + γ δ_{a(γ)}` for `γ ∈ [0, 1 − η]`.
    pub fn kusuoka_member(&self, gamma: f64) -> Result<KusuokaMixture> {
        check_range(
            "gamma",
            gamma,
            "[0, 1 - eta]",
            (0.0..=1.0 - self.eta).contains(&gamma),
        )?;
        if gamma == 0.0 || self.eta >= 1.0 {
            return Ok(KusuokaMixture::expectation());
        }
        let a = self.tail_level(gamma).clamp(0.0, 1.0 - f64::EPSILON);
        KusuokaMixture::from_weights(&[(0.0, 1.0 - gamma), (a, gamma)])
    }
}

/// The expectile `e_α(Y)`: the root of
/// `α E(Y − x)₊ = (1 − α) E(x − Y)₊`.
///
/// The identity is piecewise linear in `x` between atoms, so the root is
/// located by scanning atoms and finished by exact inversion on one segment.
pub fn expectile(alpha: f64, d: &DiscreteDistribution) -> Result<f64> {
    let params = ExpectileParams::new(alpha)?;
    Ok(expectile_unchecked(params.alpha, d))
}

pub(crate) fn expectile_unchecked(alpha: f64, d: &DiscreteDistribution) -> f64 {
    if d.is_constant() {
        return d.essinf();
    }
    let values = d.values();
    let probs = d.probs();
    let n = values.len();
    // suffix sums make the upper moments exact on each segment
    let mut upper_mass = vec![0.0; n + 1];
    let mut upper_first = vec![0.0; n + 1];
    for i in (0..n).rev() {
        upper_mass[i] = upper_mass[i + 1] + probs[i];
        upper_first[i] = upper_first[i + 1] + probs[i] * values[i];
    }
    let mut lower_mass = 0.0;
    let mut lower_first = 0.0;
    for k in 0..n {
        lower_mass += probs[k];
        lower_first += probs[k] * values[k];
        let (um, u) = (upper_first[k + 1], upper_mass[k + 1]);
        let h_here = alpha * (um - u * values[k]) - (1.0 - alpha) * (lower_mass * values[k] - lower_first);
        if h_here <= 0.0 {
            return values[k];
        }
        if k + 1 < n {
            let next = values[k + 1];
            let h_next = alpha * (um - u * next) - (1.0 - alpha) * (lower_mass * next - lower_first);
            if h_next <= 0.0 {
                let x = (alpha * um + (1.0 - alpha) * lower_first)
                    / (alpha * u + (1.0 - alpha) * lower_mass);
                return x.clamp(values[k], next);
            }
        }
    }
    d.esssup()
}

fn q(d: &DiscreteDistribution, level: f64) -> f64 {
    d.upper_quantile_integral(level.clamp(0.0, 1.0))
}

fn feasible(level: f64) -> bool {
    (-LEVEL_SLACK..=1.0 + LEVEL_SLACK).contains(&level)
}

fn max_over(points: impl IntoIterator<Item = f64>, f: impl Fn(f64) -> Option<f64>) -> f64 {
    points
        .into_iter()
        .filter_map(f)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `γ` values where `a(γ)` meets a cumulative probability of `d`.
fn tail_breakpoints(p: &ExpectileParams, d: &DiscreteDistribution, upper: f64) -> Vec<f64> {
    let ratio = (1.0 - p.eta) / p.eta;
    d.cumulative()
        .iter()
        .map(|&c| {
            let k = (1.0 - c) * ratio;
            k / (1.0 + k)
        })
        .filter(|&g| g > 0.0 && g < upper)
        .collect()
}

/// `e_α(Y) = max_γ (1 − γ) E Y + γ AVaR_{a(γ)}(Y)`.
///
/// Evaluated as `(1 − γ)(E Y + (1 − η)/η · Q(a(γ)))`, which is linear in
/// `γ` between the points where `a(γ)` crosses a cumulative probability.
pub fn expectile_kusuoka(alpha: f64, d: &DiscreteDistribution) -> Result<f64> {
    let p = ExpectileParams::risk(alpha)?;
    if p.eta >= 1.0 {
        return Ok(d.mean());
    }
    Ok(kusuoka_unchecked(&p, d))
}

fn kusuoka_unchecked(p: &ExpectileParams, d: &DiscreteDistribution) -> f64 {
    let mean = d.mean();
    let ratio = (1.0 - p.eta) / p.eta;
    let top = 1.0 - p.eta;
    let mut points = tail_breakpoints(p, d, top);
    points.extend([0.0, top]);
    max_over(points, |g| {
        if g == 0.0 {
            return Some(mean);
        }
        let a = p.tail_level(g);
        feasible(a).then(|| (1.0 - g) * (mean + ratio * q(d, a)))
    })
}

/// `sup_β (1 − β) AVaR_β(|Z|) + β η ‖Z‖_∞`.
///
/// The objective is piecewise linear in `β` with kinks at the cumulative
/// probabilities of `|Z|`; the value at `β → 1` is `η ‖Z‖_∞`.
pub fn expectile_dual_norm(alpha: f64, z: &DiscreteDistribution) -> Result<f64> {
    let p = ExpectileParams::risk(alpha)?;
    let a = z.abs();
    let sup = a.esssup();
    let mut best = a.mean().max(p.eta * sup);
    for &c in a.cumulative() {
        if c < 1.0 {
            best = best.max(a.upper_quantile_integral(c) + c * p.eta * sup);
        }
    }
    Ok(best)
}

/// The higher-order expectile `(e_α)_β(Y)` as the maximum over `γ` of the
/// truncated two-atom Kusuoka measures.
///
/// For `γ < (1 − β)(1 − η)` the truncation keeps both atoms:
/// `(1 − γ)/(1 − β) · (Q(β/(1 − γ)) + (1 − η)/η · Q(a(γ)))`. Otherwise it
/// collapses to `AVaR_{1 − (1 − β)η/(1 − γ)}`. Both pieces are linear in `γ`
/// between level crossings, so the maximum is taken over those crossings,
/// the branch boundary and the endpoints.
pub fn higher_order_expectile(alpha: f64, beta: f64, d: &DiscreteDistribution) -> Result<f64> {
    let p = ExpectileParams::risk(alpha)?;
    check_range("beta", beta, "[0, 1)", (0.0..1.0).contains(&beta))?;
    Ok(higher_order_unchecked(&p, beta, d))
}

fn higher_order_unchecked(p: &ExpectileParams, beta: f64, d: &DiscreteDistribution) -> f64 {
    let top = 1.0 - p.eta;
    let split = (1.0 - beta) * top;
    let collapsed = |g: f64| -> Option<f64> {
        let level = 1.0 - (1.0 - beta) * p.eta / (1.0 - g);
        feasible(level).then(|| {
            let level = level.clamp(0.0, 1.0);
            if level >= 1.0 {
                d.esssup()
            } else {
                q(d, level) / (1.0 - level)
            }
        })
    };
    let mut candidates: Vec<f64> = d
        .cumulative()
        .iter()
        .filter(|&&c| c < 1.0)
        .map(|&c| 1.0 - (1.0 - beta) * p.eta / (1.0 - c))
        .filter(|&g| g > split && g < top)
        .collect();
    candidates.extend([split, top]);
    let mut best = max_over(candidates, collapsed);

    if p.eta < 1.0 && split > 0.0 {
        let ratio = (1.0 - p.eta) / p.eta;
        let two_atom = |g: f64| -> Option<f64> {
            let b = beta / (1.0 - g);
            let a = if g == 0.0 { 1.0 } else { p.tail_level(g) };
            (feasible(a) && feasible(b))
                .then(|| (1.0 - g) / (1.0 - beta) * (q(d, b) + ratio * q(d, a)))
        };
        let mut points = tail_breakpoints(p, d, split);
        points.extend(
            d.cumulative()
                .iter()
                .filter(|&&c| c > beta)
                .map(|&c| 1.0 - beta / c)
                .filter(|&g| g > 0.0 && g < split),
        );
        points.extend([0.0, split]);
        best = best.max(max_over(points, two_atom));
    }
    best
}

/// Every `γ` at which the objective of [`higher_order_expectile`] may change
/// slope, together with the endpoints of `[0, 1 − η]`.
pub fn higher_order_gamma_points(alpha: f64, beta: f64, d: &DiscreteDistribution) -> Result<Vec<f64>> {
    let p = ExpectileParams::risk(alpha)?;
    check_range("beta", beta, "[0, 1)", (0.0..1.0).contains(&beta))?;
    let top = 1.0 - p.eta;
    let split = (1.0 - beta) * top;
    let mut points = vec![0.0, top, split];
    if p.eta < 1.0 {
        points.extend(tail_breakpoints(&p, d, split));
    }
    for &c in d.cumulative() {
        if c > beta && c < 1.0 {
            points.push(1.0 - beta / c);
        }
        if c < 1.0 {
            points.push(1.0 - (1.0 - beta) * p.eta / (1.0 - c));
        }
    }
    points.retain(|&g| (0.0..=top).contains(&g));
    points.sort_by(f64::total_cmp);
    points.dedup();
    Ok(points)
}
