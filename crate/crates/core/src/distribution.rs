//! Finite discrete distributions.
//!
//! A [`DiscreteDistribution`] is a sorted list of atoms `(value, probability)`
//! with strictly increasing values and strictly positive probabilities summing
//! to one. It carries the cdf, the left-continuous quantile function
//! `F⁻¹(u) = inf{x : F(x) ≥ u}`, partial moments and the law-level transforms
//! (negation, absolute value, positive parts) every other module is built on.

use std::cmp::Ordering;

use crate::error::{check_range, Result, RiskError};

/// Which side of the threshold a partial moment integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `E (t − Y)₊^r`
    Lower,
    /// `E (Y − t)₊^r`
    Upper,
}

/// Mean together with the essential infimum and supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub essinf: f64,
    pub esssup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
    /// `cumulative[i] = P(Y ≤ values[i])`, the last entry is exactly 1.
    cumulative: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution from raw `(value, weight)` pairs.
    ///
    /// Atoms are sorted, equal values merged and the weights renormalized by
    /// their sum, so arbitrary positive sample weights are accepted.
    pub fn from_atoms(pairs: &[(f64, f64)]) -> Result<Self> {
        validate_pairs(pairs)?;
        Ok(Self::build(pairs.to_vec()))
    }

    /// Builds a distribution from `(value, probability)` pairs whose
    /// probabilities must already sum to one within `tolerance`.
    pub fn from_probabilities(pairs: &[(f64, f64)], tolerance: f64) -> Result<Self> {
        validate_pairs(pairs)?;
        let sum: f64 = pairs.iter().map(|&(_, p)| p).sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(RiskError::ProbabilitySum { sum, tolerance });
        }
        Ok(Self::build(pairs.to_vec()))
    }

    /// The point mass at `c`.
    pub fn point(c: f64) -> Result<Self> {
        Self::from_atoms(&[(c, 1.0)])
    }

    /// Equal weights on the given values (repeated values accumulate weight).
    pub fn uniform(values: &[f64]) -> Result<Self> {
        let pairs: Vec<_> = values.iter().map(|&v| (v, 1.0)).collect();
        Self::from_atoms(&pairs)
    }

    fn build(mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            // -0.0 and 0.0 are the same atom
            let v = if v == 0.0 { 0.0 } else { v };
            match values.last() {
                Some(&last) if last == v => *probs.last_mut().unwrap() += p,
                _ => {
                    values.push(v);
                    probs.push(p);
                }
            }
        }
        let sum: f64 = probs.iter().sum();
        // Already normalized to working precision: keep the bits so that
        // re-reading a written distribution is the identity.
        let slack = 4.0 * probs.len() as f64 * f64::EPSILON;
        if (sum - 1.0).abs() > slack {
            for p in &mut probs {
                *p /= sum;
            }
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc.min(1.0));
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Self {
            values,
            probs,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Cumulative probabilities `P(Y ≤ yᵢ)` at each atom.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn essinf(&self) -> f64 {
        self.values[0]
    }

    pub fn esssup(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn span(&self) -> f64 {
        self.esssup() - self.essinf()
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(v, p)| v * p).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    pub fn summary(&self) -> Summary {
        Summary {
            mean: self.mean(),
            essinf: self.essinf(),
            esssup: self.esssup(),
        }
    }

    /// Left-continuous generalized inverse `inf{x : F(x) ≥ u}`.
    ///
    /// `quantile(0)` is the essential infimum, `quantile(1)` the supremum.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_range("u", u, "[0, 1]", (0.0..=1.0).contains(&u))?;
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        let idx = self.cumulative.partition_point(|&c| c < u);
        self.values[idx.min(self.values.len() - 1)]
    }

    /// Right-continuous cdf `P(Y ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `P(Y > x) = 1 − cdf(x)`.
    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// `E (t − Y)₊^r` or `E (Y − t)₊^r`.
    ///
    /// Only strictly positive parts contribute, so `r = 0` yields `P(Y < t)`
    /// (resp. `P(Y > t)`).
    pub fn partial_moment(&self, t: f64, r: f64, side: Side) -> Result<f64> {
        check_range("r", r, "[0, ∞)", r >= 0.0)?;
        Ok(self
            .atoms()
            .map(|(y, p)| {
                let gap = match side {
                    Side::Lower => t - y,
                    Side::Upper => y - t,
                };
                if gap > 0.0 {
                    p * gap.powf(r)
                } else {
                    0.0
                }
            })
            .sum())
    }

    /// `(E|Y|^p)^{1/p}`; `p = f64::INFINITY` gives `max |yᵢ|`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_range("p", p, "[1, ∞]", p >= 1.0)?;
        if p.is_infinite() {
            return Ok(self.values.iter().fold(0.0, |m, v| m.max(v.abs())));
        }
        if p == 1.0 {
            return Ok(self.atoms().map(|(v, q)| q * v.abs()).sum());
        }
        // scale by the largest magnitude to keep |y|^p representable
        let scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Ok(0.0);
        }
        let s: f64 = self.atoms().map(|(v, q)| q * (v.abs() / scale).powf(p)).sum();
        Ok(scale * s.powf(1.0 / p))
    }

    /// Law of `−Y`.
    pub fn negate(&self) -> Self {
        self.map(|y| -y)
    }

    /// Law of `|Y|`.
    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// Law of `Y + c`.
    pub fn shift(&self, c: f64) -> Self {
        self.map(|y| y + c)
    }

    /// Law of `λY`.
    pub fn scale(&self, lambda: f64) -> Self {
        self.map(|y| lambda * y)
    }

    /// Law of `(Y − t)₊`.
    pub fn excess_over(&self, t: f64) -> Self {
        self.map(|y| (y - t).max(0.0))
    }

    /// Law of `(t − Y)₊`.
    pub fn shortfall_below(&self, t: f64) -> Self {
        self.map(|y| (t - y).max(0.0))
    }

    /// Law of `f(Y)`; atoms that collide under `f` are merged.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        let pairs: Vec<_> = self.atoms().map(|(v, p)| (f(v), p)).collect();
        Self::build(pairs)
    }

    /// `∫_a^1 F⁻¹(u) du`, computed exactly over the quantile steps.
    pub fn upper_quantile_integral(&self, a: f64) -> f64 {
        let mut lower: f64 = 0.0;
        let mut total = 0.0;
        for (&v, &c) in self.values.iter().zip(&self.cumulative) {
            let from = lower.max(a);
            if c > from {
                total += (c - from) * v;
            }
            lower = c;
        }
        total
    }

    /// Law of `f(F_X⁻¹(U), F_Y⁻¹(U))` for a single uniform `U`, i.e. the
    /// comonotone coupling of `self` and `other`.
    pub fn comonotone_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Self {
        let mut breaks: Vec<f64> = self
            .cumulative
            .iter()
            .chain(other.cumulative.iter())
            .copied()
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut pairs = Vec::with_capacity(breaks.len());
        let mut lower = 0.0;
        for &c in &breaks {
            let width = c - lower;
            if width > 0.0 {
                let mid = 0.5 * (lower + c);
                pairs.push((
                    f(self.quantile_unchecked(mid), other.quantile_unchecked(mid)),
                    width,
                ));
            }
            lower = c;
        }
        Self::build(pairs)
    }
}

fn validate_pairs(pairs: &[(f64, f64)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(RiskError::EmptyDistribution);
    }
    for &(value, prob) in pairs {
        if !value.is_finite() {
            return Err(RiskError::NonFiniteValue(value));
        }
        if !prob.is_finite() {
            return Err(RiskError::NonFiniteValue(prob));
        }
        if prob.partial_cmp(&0.0) != Some(Ordering::Greater) {
            return Err(RiskError::NonPositiveProbability { value, prob });
        }
    }
    Ok(())
}
