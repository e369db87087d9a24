//! Higher-order risk measures
//!
//! ```text
//! R_β(Y) = inf_t  t + ‖(Y − t)₊‖ / (1 − β)
//! ```
//!
//! for a monotone norm `‖·‖` described by a [`NormSpec`], together with the
//! closed forms available for spectral norms.
//!
//! The objective `g(t)` is convex. For spectral and `L¹`/`L^∞` norms it is
//! piecewise linear with kinks at atoms of `Y`, and the minimum is found
//! exactly by scanning atoms. For a finite supremum of spectral norms the
//! scan also visits intersections of the linear pieces. The remaining norms
//! use golden-section search.

use crate::distribution::DiscreteDistribution;
use crate::error::{check_range, Result, RiskError};
use crate::expectile::expectile_unchecked;
use crate::optimize::{expand_left, golden_section};
use crate::spectral::{spectral_risk, KusuokaMixture};

/// Absolute tolerance in `t` for iterative minimization, relative to the
/// scale of the distribution.
pub const MINIMIZER_TOLERANCE: f64 = 1e-10;

/// Width of the window around a derivative breakpoint inside which
/// [`Derivative::near_breakpoint`] is set.
pub const BREAKPOINT_WINDOW: f64 = 1e-9;

// Relative tie tolerance when picking the smallest exact minimizer.
const TIE: f64 = 1e-12;

/// A monotone norm on random variables, applied to the law of `|Y|`.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    /// `(E|Y|^p)^{1/p}` for `p ∈ [1, ∞]`.
    Holder(f64),
    /// `R_σ(|Y|)`.
    Spectral(KusuokaMixture),
    /// `e_α(|Y|)` for `α ∈ [1/2, 1)`.
    Expectile(f64),
    /// `max_j R_{σ_j}(|Y|)` over a finite family.
    KusuokaSup(Vec<KusuokaMixture>),
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NormSpec::Holder(p) => check_range("p", *p, "[1, inf]", *p >= 1.0),
            NormSpec::Spectral(_) => Ok(()),
            NormSpec::Expectile(a) => {
                check_range("alpha", *a, "[0.5, 1)", (0.5..1.0).contains(a))
            }
            NormSpec::KusuokaSup(family) if family.is_empty() => Err(RiskError::EmptyMixture),
            NormSpec::KusuokaSup(_) => Ok(()),
        }
    }

    /// True when `t ↦ ‖(Y − t)₊‖` is piecewise linear with kinks at atoms.
    pub fn is_piecewise_linear(&self) -> bool {
        match self {
            NormSpec::Holder(p) => *p == 1.0 || p.is_infinite(),
            NormSpec::Spectral(_) => true,
            NormSpec::Expectile(_) | NormSpec::KusuokaSup(_) => false,
        }
    }

    /// The equivalent spectral mixture for `L¹` and spectral norms.
    pub fn as_mixture(&self) -> Option<KusuokaMixture> {
        match self {
            NormSpec::Holder(p) if *p == 1.0 => Some(KusuokaMixture::expectation()),
            NormSpec::Spectral(m) => Some(m.clone()),
            _ => None,
        }
    }
}

/// Outcome of minimizing the higher-order objective.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherOrderResult {
    pub value: f64,
    /// Smallest minimizer; `-inf` when the infimum is only approached as
    /// `t → −∞` (`L^p`, `1 < p < ∞`, at `β = 0`).
    pub t_star: f64,
    pub beta: f64,
    /// `u_β` of the spectral density; present for spectral norms only.
    pub u_beta: Option<f64>,
}

/// One row of a minimizer curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub beta: f64,
    pub t_star: f64,
    pub value: f64,
}

/// `dR_β/dβ = (R_β − t*(β))/(1 − β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    /// `β` lies within [`BREAKPOINT_WINDOW`] of a jump of `t*`.
    pub near_breakpoint: bool,
}

fn check_beta(beta: f64) -> Result<()> {
    check_range("beta", beta, "[0, 1)", (0.0..1.0).contains(&beta))
}

/// Norm of a non-negative law; skips the `|·|` transform.
pub(crate) fn norm_nonnegative(n: &NormSpec, d: &DiscreteDistribution) -> f64 {
    match n {
        NormSpec::Holder(p) => d.lp_norm(*p).unwrap_or(f64::NAN),
        NormSpec::Spectral(m) => spectral_risk(m, d),
        NormSpec::Expectile(a) => expectile_unchecked(*a, d),
        NormSpec::KusuokaSup(family) => family
            .iter()
            .map(|m| spectral_risk(m, d))
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// `‖Y‖`, evaluated on the law of `|Y|`.
pub fn norm_value(n: &NormSpec, d: &DiscreteDistribution) -> Result<f64> {
    n.validate()?;
    Ok(norm_nonnegative(n, &d.abs()))
}

/// The regret `𝒱(Y) = ‖Y₊‖ / (1 − β)`, which equals the objective at `t = 0`.
pub fn regret(n: &NormSpec, beta: f64, d: &DiscreteDistribution) -> Result<f64> {
    n.validate()?;
    check_beta(beta)?;
    Ok(norm_nonnegative(n, &d.excess_over(0.0)) / (1.0 - beta))
}

/// `g(t) = t + ‖(Y − t)₊‖ / (1 − β)`.
pub fn objective(n: &NormSpec, beta: f64, d: &DiscreteDistribution, t: f64) -> Result<f64> {
    n.validate()?;
    check_beta(beta)?;
    Ok(objective_unchecked(n, beta, d, t))
}

pub(crate) fn objective_unchecked(n: &NormSpec, beta: f64, d: &DiscreteDistribution, t: f64) -> f64 {
    t + norm_nonnegative(n, &d.excess_over(t)) / (1.0 - beta)
}

/// `R_β(Y)` by minimizing `g` over `t`.
///
/// Every supported norm dominates `E|·|`, so for `t ≤ essinf` the slope of
/// `g` is at most `1 − 1/(1 − β) ≤ 0`, except for `L^p` with `1 < p < ∞`.
/// The search therefore runs over `[essinf, esssup]`, extended downwards for
/// those `L^p` norms until the minimum is bracketed.
pub fn higher_order_risk(n: &NormSpec, beta: f64, d: &DiscreteDistribution) -> Result<HigherOrderResult> {
    n.validate()?;
    check_beta(beta)?;
    let u_beta = match n {
        NormSpec::Spectral(m) => Some(m.u_beta_unchecked(beta)),
        _ => None,
    };
    let result = |value: f64, t_star: f64| HigherOrderResult {
        value,
        t_star,
        beta,
        u_beta,
    };
    if d.is_constant() {
        return Ok(result(d.essinf(), d.essinf()));
    }
    let g = |t: f64| objective_unchecked(n, beta, d, t);
    let (lo, hi) = (d.essinf(), d.esssup());
    let tol = MINIMIZER_TOLERANCE * d.span().max(lo.abs()).max(hi.abs()).max(1.0);

    if n.is_piecewise_linear() {
        let (t, v) = smallest_minimizer(d.values().iter().map(|&t| (t, g(t))));
        return Ok(result(v, t));
    }
    match n {
        NormSpec::KusuokaSup(family) => {
            let (t, v) = kusuoka_sup_minimum(family, beta, d);
            Ok(result(v, t))
        }
        NormSpec::Holder(_) => {
            if beta == 0.0 {
                // ‖·‖_p ≥ ‖·‖₁ makes g ≥ E Y, approached only as t → −∞
                return Ok(result(d.mean(), f64::NEG_INFINITY));
            }
            let lower = expand_left(g, lo, d.span(), 1100).unwrap_or(f64::MIN);
            let (t, v) = golden_section(g, lower, hi, tol);
            Ok(result(v, t))
        }
        _ => {
            // at β = 0 the objective is flat below essinf; prefer its edge
            let (t, v) = golden_section(g, lo, hi, tol);
            let at_lo = g(lo);
            let (t, v) = if at_lo <= v + TIE * v.abs().max(1.0) { (lo, at_lo) } else { (t, v) };
            Ok(result(v, t))
        }
    }
}

fn smallest_minimizer(points: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let points: Vec<(f64, f64)> = points.collect();
    let min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let slack = TIE * min.abs().max(1.0);
    points
        .into_iter()
        .filter(|p| p.1 <= min + slack)
        .fold((f64::INFINITY, min), |best, p| if p.0 < best.0 { (p.0, best.1) } else { best })
}

/// Exact minimum of `t + max_j R_{σ_j}((Y − t)₊)/(1 − β)`: each member is
/// linear between atoms, so the minimum lies at an atom or where two members
/// cross.
fn kusuoka_sup_minimum(family: &[KusuokaMixture], beta: f64, d: &DiscreteDistribution) -> (f64, f64) {
    let member = |m: &KusuokaMixture, t: f64| spectral_risk(m, &d.excess_over(t));
    let g = |t: f64| {
        t + family
            .iter()
            .map(|m| member(m, t))
            .fold(f64::NEG_INFINITY, f64::max)
            / (1.0 - beta)
    };
    let values = d.values();
    let mut candidates: Vec<f64> = values.to_vec();
    for w in values.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ends: Vec<(f64, f64)> = family.iter().map(|m| (member(m, a), member(m, b))).collect();
        for i in 0..ends.len() {
            for j in i + 1..ends.len() {
                let da = ends[i].0 - ends[j].0;
                let db = ends[i].1 - ends[j].1;
                if da * db < 0.0 {
                    let s = da / (da - db);
                    candidates.push(a + s * (b - a));
                }
            }
        }
    }
    smallest_minimizer(candidates.into_iter().map(|t| (t, g(t))))
}

/// Closed form for spectral norms: `R_β = R_{σ_β}` and `t* = F⁻¹(u_β)`.
pub fn higher_order_spectral_closed(
    m: &KusuokaMixture,
    beta: f64,
    d: &DiscreteDistribution,
) -> Result<HigherOrderResult> {
    let truncation = m.truncate(beta)?;
    Ok(HigherOrderResult {
        value: spectral_risk(&truncation.mixture, d),
        t_star: d.quantile_unchecked(truncation.u_beta),
        beta,
        u_beta: Some(truncation.u_beta),
    })
}

/// `VaR_{u_β}(Y) + (1 − β)⁻¹ ∫_{VaR_{u_β}}^∞ Σ(F(y)) dy` with
/// `Σ(u) = ∫_u^1 σ`; the integrand is constant between atoms.
pub fn survival_representation(m: &KusuokaMixture, beta: f64, d: &DiscreteDistribution) -> Result<f64> {
    let u = m.u_beta(beta)?;
    let var = d.quantile_unchecked(u);
    let values = d.values();
    let cumulative = d.cumulative();
    let mut integral = 0.0;
    for k in 0..values.len() - 1 {
        if values[k] >= var {
            let tail = 1.0 - m.cumulative_sigma(cumulative[k]);
            integral += (values[k + 1] - values[k]) * tail.max(0.0);
        }
    }
    Ok(var + integral / (1.0 - beta))
}

/// `essinf Y + ∫_{essinf}^{esssup} Σ_β(F(y)) dy` with
/// `Σ_β(u) = min(1, Σ(u)/(1 − β))`.
pub fn survival_representation_bounded(
    m: &KusuokaMixture,
    beta: f64,
    d: &DiscreteDistribution,
) -> Result<f64> {
    check_beta(beta)?;
    let values = d.values();
    let cumulative = d.cumulative();
    let mut integral = 0.0;
    for k in 0..values.len() - 1 {
        let tail = ((1.0 - m.cumulative_sigma(cumulative[k])) / (1.0 - beta)).clamp(0.0, 1.0);
        integral += (values[k + 1] - values[k]) * tail;
    }
    Ok(d.essinf() + integral)
}

/// Per-level minimization results; `betas` must be ascending in `[0, 1)`.
pub fn minimizer_curve(n: &NormSpec, d: &DiscreteDistribution, betas: &[f64]) -> Result<Vec<CurvePoint>> {
    if betas.windows(2).any(|w| w[0] > w[1]) {
        return Err(RiskError::UnsortedLevels);
    }
    betas
        .iter()
        .map(|&beta| {
            higher_order_risk(n, beta, d).map(|r| CurvePoint {
                beta,
                t_star: r.t_star,
                value: r.value,
            })
        })
        .collect()
}

/// Levels where the minimizer `t*(β)` jumps, so that `R_β` has a kink.
///
/// Known exactly for `L¹` and spectral norms, where `t* = F⁻¹(u_β)` jumps
/// when `u_β` passes a cumulative probability. Empty for norms whose `t*`
/// is continuous or not characterized.
pub fn derivative_breakpoints(n: &NormSpec, d: &DiscreteDistribution) -> Vec<f64> {
    let Some(m) = n.as_mixture() else {
        return Vec::new();
    };
    let cumulative = d.cumulative();
    let mut out: Vec<f64> = cumulative[..cumulative.len() - 1]
        .iter()
        .map(|&c| m.cumulative_sigma(c))
        .filter(|&b| b > 0.0 && b < 1.0)
        .collect();
    out.dedup();
    out
}

/// `dR_β/dβ = (R_β − t*(β))/(1 − β)` for `β ∈ (0, 1)`.
pub fn risk_derivative(n: &NormSpec, d: &DiscreteDistribution, beta: f64) -> Result<Derivative> {
    check_range("beta", beta, "(0, 1)", beta > 0.0 && beta < 1.0)?;
    let r = higher_order_risk(n, beta, d)?;
    let near_breakpoint = derivative_breakpoints(n, d)
        .iter()
        .any(|&b| (b - beta).abs() <= BREAKPOINT_WINDOW);
    Ok(Derivative {
        value: (r.value - r.t_star) / (1.0 - beta),
        near_breakpoint,
    })
}

/// `f(β) = (1 − β) R_β(Y)`, concave in `β`.
pub fn weighted_value(n: &NormSpec, d: &DiscreteDistribution, beta: f64) -> Result<f64> {
    Ok((1.0 - beta) * higher_order_risk(n, beta, d)?.value)
}
