//! Spectral risk measures represented by finite Kusuoka mixtures.
//!
//! A [`KusuokaMixture`] `Σᵢ wᵢ δ_{αᵢ}` stands for the spectral risk measure
//! `R(Y) = Σᵢ wᵢ AVaR_{αᵢ}(Y)` whose spectral function is the step function
//!
//! ```text
//! σ(u) = Σᵢ wᵢ · 1{u ≥ αᵢ} / (1 − αᵢ).
//! ```
//!
//! Working with finite mixtures keeps every operation here exact: the
//! `β`-quantile `u_β` of the density `σ` is the inverse of a piecewise linear
//! map, and truncating `σ` at `u_β` yields another finite mixture.

use crate::distribution::DiscreteDistribution;
use crate::error::{check_range, Result, RiskError};

/// Tolerance on the weight sum accepted by [`KusuokaMixture::new`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Tolerance on `∫σ = 1` for spectral functions assembled from steps.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

// u_β is snapped onto a level αᵢ when closer than this; keeps the boundary
// atom on the point-mass side of the truncation.
const SNAP: f64 = 1e-13;

/// Finite probability measure `Σ wᵢ δ_{αᵢ}` on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KusuokaMixture {
    alphas: Vec<f64>,
    weights: Vec<f64>,
}

/// Result of truncating a mixture at risk level `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub mixture: KusuokaMixture,
    pub u_beta: f64,
    /// Mass of the point `δ_{u_β}` before any renormalization.
    pub p0: f64,
}

/// Level above which the truncated mixture collapses to a single AVaR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseInfo {
    pub threshold_beta: f64,
    pub alpha_tilde: f64,
}

impl KusuokaMixture {
    /// Weights must sum to one within [`WEIGHT_SUM_TOLERANCE`].
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        validate(pairs)?;
        let sum: f64 = pairs.iter().map(|&(_, w)| w).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(RiskError::ProbabilitySum {
                sum,
                tolerance: WEIGHT_SUM_TOLERANCE,
            });
        }
        Ok(Self::build(pairs.to_vec()))
    }

    /// Accepts arbitrary positive weights and renormalizes them.
    pub fn from_weights(pairs: &[(f64, f64)]) -> Result<Self> {
        validate(pairs)?;
        Ok(Self::build(pairs.to_vec()))
    }

    /// `AVaR_α` as a one-atom mixture.
    pub fn avar_level(alpha: f64) -> Result<Self> {
        Self::new(&[(alpha, 1.0)])
    }

    /// `σ ≡ 1`, the expectation.
    pub fn expectation() -> Self {
        Self {
            alphas: vec![0.0],
            weights: vec![1.0],
        }
    }

    fn build(mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut alphas: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            match alphas.last() {
                Some(&last) if last == a => *weights.last_mut().unwrap() += w,
                _ => {
                    alphas.push(a);
                    weights.push(w);
                }
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum != 1.0 {
            for w in &mut weights {
                *w /= sum;
            }
        }
        Self { alphas, weights }
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.alphas.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn max_alpha(&self) -> f64 {
        *self.alphas.last().unwrap()
    }

    /// Spectral function `σ(u)` for `u ∈ [0, 1)`.
    pub fn sigma(&self, u: f64) -> Result<f64> {
        check_range("u", u, "[0, 1)", (0.0..1.0).contains(&u))?;
        Ok(self
            .atoms()
            .filter(|&(a, _)| u >= a)
            .map(|(a, w)| w / (1.0 - a))
            .sum())
    }

    /// `∫₀ᵘ σ(v) dv = Σᵢ wᵢ (u − αᵢ)₊ / (1 − αᵢ)` for `u ∈ [0, 1]`.
    pub fn cumulative_sigma(&self, u: f64) -> f64 {
        self.atoms()
            .map(|(a, w)| w * (u - a).max(0.0) / (1.0 - a))
            .sum()
    }

    /// The `β`-quantile of the density `σ`: the smallest `u` with
    /// `∫₀ᵘ σ = β`, by exact inversion of the piecewise linear integral.
    pub fn u_beta(&self, beta: f64) -> Result<f64> {
        check_range("beta", beta, "[0, 1)", (0.0..1.0).contains(&beta))?;
        Ok(self.u_beta_unchecked(beta))
    }

    pub(crate) fn u_beta_unchecked(&self, beta: f64) -> f64 {
        if beta <= 0.0 {
            return self.alphas[0];
        }
        let n = self.alphas.len();
        let mut slope = 0.0;
        let mut level = 0.0; // ∫₀^{αₖ} σ
        for k in 0..n {
            slope += self.weights[k] / (1.0 - self.alphas[k]);
            let start = self.alphas[k];
            let end = if k + 1 < n { self.alphas[k + 1] } else { 1.0 };
            let next_level = level + slope * (end - start);
            if beta <= next_level || k + 1 == n {
                let mut u = start + (beta - level) / slope;
                if k + 1 < n && (beta == next_level || (end - u).abs() <= SNAP) {
                    u = end;
                }
                return u.clamp(start, 1.0 - f64::EPSILON);
            }
            level = next_level;
        }
        unreachable!("mixture has at least one atom")
    }

    /// Mixture of the truncated spectral function
    /// `σ_β(u) = 1{u ≥ u_β} σ(u) / (1 − β)`:
    /// mass `p₀` at `u_β` plus `wᵢ / (1 − β)` for every `αᵢ > u_β`.
    pub fn truncate(&self, beta: f64) -> Result<Truncation> {
        check_range("beta", beta, "[0, 1)", (0.0..1.0).contains(&beta))?;
        let u = self.u_beta_unchecked(beta);
        let below: f64 = self
            .atoms()
            .filter(|&(a, _)| a <= u)
            .map(|(a, w)| w / (1.0 - a))
            .sum();
        let p0 = (1.0 - u) / (1.0 - beta) * below;
        let mut pairs = vec![(u, p0)];
        pairs.extend(
            self.atoms()
                .filter(|&(a, _)| a > u)
                .map(|(a, w)| (a, w / (1.0 - beta))),
        );
        Ok(Truncation {
            mixture: Self::build(pairs),
            u_beta: u,
            p0,
        })
    }

    pub fn collapse_info(&self) -> CollapseInfo {
        let total: f64 = self.atoms().map(|(a, w)| w / (1.0 - a)).sum();
        let weighted: f64 = self.atoms().map(|(a, w)| a * w / (1.0 - a)).sum();
        CollapseInfo {
            threshold_beta: (1.0 - (1.0 - self.max_alpha()) * total).max(0.0),
            alpha_tilde: weighted / total,
        }
    }

    /// Re-expresses a non-decreasing step function `s(u) = Σₖ Jₖ 1{u ≥ aₖ}`
    /// given as `(aₖ, Jₖ)` as a mixture (`wₖ = Jₖ (1 − aₖ)`).
    ///
    /// Fails with [`RiskError::Normalization`] when `∫ s ≠ 1` beyond
    /// [`NORMALIZATION_TOLERANCE`].
    pub fn from_spectral_steps(steps: &[(f64, f64)]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(steps.len());
        for &(a, jump) in steps {
            check_range("alpha", a, "[0, 1)", (0.0..1.0).contains(&a))?;
            if jump < -NORMALIZATION_TOLERANCE {
                return Err(RiskError::NonPositiveWeight { alpha: a, weight: jump });
            }
            if jump > 0.0 {
                pairs.push((a, jump * (1.0 - a)));
            }
        }
        let integral: f64 = pairs.iter().map(|&(_, w)| w).sum();
        if pairs.is_empty() || (integral - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(RiskError::Normalization { integral });
        }
        Ok(Self::build(pairs))
    }

    /// The spectral function `σ_μ(u) = σ(u) · ∫ 1{u_β ≤ u} μ(dβ)/(1 − β)`
    /// for a finite measure `μ` on risk levels, as a mixture.
    ///
    /// The weight integrates over `{β : u_β ≤ u}`; this is the reading of the
    /// comparison weight that makes `σ_μ` a density.
    pub fn weaken_order(&self, mu: &KusuokaMixture) -> Result<Self> {
        let thresholds: Vec<(f64, f64)> = mu
            .atoms()
            .map(|(b, q)| (self.u_beta_unchecked(b), q / (1.0 - b)))
            .collect();
        let mut points: Vec<f64> = self
            .alphas
            .iter()
            .copied()
            .chain(thresholds.iter().map(|&(u, _)| u))
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();

        let value_at = |u: f64| -> f64 {
            let weight: f64 = thresholds
                .iter()
                .filter(|&&(ub, _)| u >= ub)
                .map(|&(_, c)| c)
                .sum();
            let sigma: f64 = self
                .atoms()
                .filter(|&(a, _)| u >= a)
                .map(|(a, w)| w / (1.0 - a))
                .sum();
            sigma * weight
        };
        let mut steps = Vec::with_capacity(points.len());
        let mut previous = 0.0;
        for &a in &points {
            let v = value_at(a);
            steps.push((a, v - previous));
            previous = v;
        }
        Self::from_spectral_steps(&steps)
    }
}

fn validate(pairs: &[(f64, f64)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(RiskError::EmptyMixture);
    }
    for &(alpha, weight) in pairs {
        check_range("alpha", alpha, "[0, 1)", (0.0..1.0).contains(&alpha))?;
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(RiskError::NonPositiveWeight { alpha, weight });
        }
    }
    Ok(())
}

/// Average value-at-risk `AVaR_α(Y) = (1 − α)⁻¹ ∫_α^1 F⁻¹(u) du`.
///
/// The atom straddling level `α` enters with its fractional mass;
/// `AVaR₀` is the mean and `AVaR₁` the essential supremum.
pub fn avar(alpha: f64, d: &DiscreteDistribution) -> Result<f64> {
    check_range("alpha", alpha, "[0, 1]", (0.0..=1.0).contains(&alpha))?;
    Ok(avar_unchecked(alpha, d))
}

pub(crate) fn avar_unchecked(alpha: f64, d: &DiscreteDistribution) -> f64 {
    if alpha >= 1.0 {
        return d.esssup();
    }
    if alpha <= 0.0 {
        return d.mean();
    }
    d.upper_quantile_integral(alpha) / (1.0 - alpha)
}

/// `R_σ(Y) = Σᵢ wᵢ AVaR_{αᵢ}(Y) = ∫₀¹ σ(u) F⁻¹(u) du`.
pub fn spectral_risk(m: &KusuokaMixture, d: &DiscreteDistribution) -> f64 {
    m.atoms().map(|(a, w)| w * avar_unchecked(a, d)).sum()
}
