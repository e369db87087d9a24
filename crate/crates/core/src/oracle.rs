//! Brute-force reference computations.
//!
//! Each function here evaluates a defining formula directly, by grid search
//! or greedy allocation, without using the closed forms of the other
//! modules. Tests compare both sides at tolerances derived from the grid
//! resolution.

use crate::distribution::DiscreteDistribution;
use crate::dominance::{norm_slack, DominanceVerdict, Evidence, Outcome, DOMINANCE_TOLERANCE};
use crate::error::{check_range, Result, RiskError};
use crate::higher_order::{objective_unchecked, NormSpec};
use crate::optimize::{golden_section, grid_point};

/// Equally spaced grid `lo + (hi − lo)·i/(points − 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) || points < 2 {
            return Err(RiskError::InvalidGrid(format!(
                "need finite lo < hi and at least 2 points, got [{lo}, {hi}] with {points}"
            )));
        }
        Ok(Self { lo, hi, points })
    }

    pub fn point(&self, i: usize) -> f64 {
        grid_point(self.lo, self.hi, i, self.points)
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.point(i))
    }

    fn require_cover(&self, lo: f64, hi: f64) -> Result<()> {
        if self.lo <= lo && self.hi >= hi {
            Ok(())
        } else {
            Err(RiskError::InvalidGrid(format!(
                "grid [{}, {}] does not cover [{lo}, {hi}]",
                self.lo, self.hi
            )))
        }
    }

    /// Index of the smallest `f` value, first on ties.
    fn argmin(&self, f: impl Fn(f64) -> f64) -> (usize, f64) {
        (0..self.points).fold((0, f64::INFINITY), |best, i| {
            let v = f(self.point(i));
            if v < best.1 {
                (i, v)
            } else {
                best
            }
        })
    }

    /// Grid minimum followed by golden-section search between the grid
    /// neighbours of the argmin.
    fn refined_min(&self, f: impl Fn(f64) -> f64) -> (f64, f64) {
        let (k, v) = self.argmin(&f);
        let lo = self.point(k.saturating_sub(1));
        let hi = self.point((k + 1).min(self.points - 1));
        let (t, w) = golden_section(&f, lo, hi, 1e-13 * self.hi.abs().max(self.lo.abs()).max(1.0));
        if w < v {
            (t, w)
        } else {
            (self.point(k), v)
        }
    }
}

/// `min_t t + ‖(Y − t)₊‖/(1 − β)` over the grid, refined around the best
/// grid point.
///
/// The grid must cover `[essinf − span, esssup]`.
pub fn grid_min_higher_order(n: &NormSpec, beta: f64, d: &DiscreteDistribution, g: &GridSpec) -> Result<f64> {
    n.validate()?;
    check_range("beta", beta, "[0, 1)", (0.0..1.0).contains(&beta))?;
    g.require_cover(d.essinf() - d.span(), d.esssup())?;
    Ok(g.refined_min(|t| objective_unchecked(n, beta, d, t)).1)
}

/// `sup { E[Y Z] : 0 ≤ Z ≤ 1/(1 − β), E Z = 1 }` by filling the largest
/// atoms with the maximal density first.
pub fn dual_avar_sup(beta: f64, d: &DiscreteDistribution) -> Result<f64> {
    check_range("beta", beta, "[0, 1)", (0.0..1.0).contains(&beta))?;
    let cap = 1.0 / (1.0 - beta);
    let mut remaining = 1.0;
    let mut value = 0.0;
    for (y, p) in d.atoms().collect::<Vec<_>>().into_iter().rev() {
        if remaining <= 0.0 {
            break;
        }
        let mass = (p * cap).min(remaining);
        value += y * mass;
        remaining -= mass;
    }
    Ok(value)
}

/// `E ℓ_α(Y − x)` with `ℓ_α(z) = α z₊² + (1 − α) z₋²`.
pub fn expectile_loss(alpha: f64, d: &DiscreteDistribution, x: f64) -> f64 {
    d.atoms()
        .map(|(y, p)| {
            let z = y - x;
            p * if z >= 0.0 { alpha * z * z } else { (1.0 - alpha) * z * z }
        })
        .sum()
}

/// Minimizer of the asymmetric quadratic loss over the grid, refined by
/// golden-section search.
///
/// The grid must cover `[essinf, esssup]`.
pub fn loss_argmin_expectile(alpha: f64, d: &DiscreteDistribution, g: &GridSpec) -> Result<f64> {
    check_range("alpha", alpha, "(0, 1)", alpha > 0.0 && alpha < 1.0)?;
    g.require_cover(d.essinf(), d.esssup())?;
    Ok(g.refined_min(|x| expectile_loss(alpha, d, x)).0)
}

/// Checks `‖(t − X)₊‖ ≥ ‖(t − Y)₊‖` at every grid point.
///
/// The grid must cover the joint support widened by its span on both sides.
pub fn dense_dominance_sweep(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    n: &NormSpec,
    g: &GridSpec,
) -> Result<DominanceVerdict> {
    n.validate()?;
    let lo = x.essinf().min(y.essinf());
    let hi = x.esssup().max(y.esssup());
    g.require_cover(lo - (hi - lo), hi + (hi - lo))?;
    let (k, margin) = g.argmin(|t| norm_slack(n, x, y, t));
    let violated = margin < -DOMINANCE_TOLERANCE;
    Ok(DominanceVerdict {
        outcome: if violated { Outcome::No } else { Outcome::Yes },
        witness: violated.then(|| g.point(k)),
        margin,
        levels: Vec::new(),
        evidence: Evidence::Necessary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{avar, KusuokaMixture};

    fn u4() -> DiscreteDistribution {
        DiscreteDistribution::uniform(&[1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1.0, 0.0, 10).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1).is_err());
        let g = GridSpec::new(-30.0, 30.0, 12001).unwrap();
        assert_eq!(g.spacing(), 0.005);
        assert!(g.iter().any(|t| t == 2.5));
        let narrow = GridSpec::new(0.0, 1.0, 11).unwrap();
        assert!(grid_min_higher_order(&NormSpec::Holder(1.0), 0.5, &u4(), &narrow).is_err());
    }

    #[test]
    fn grid_min_examples() {
        let g = GridSpec::new(-10.0, 10.0, 2001).unwrap();
        let c = DiscreteDistribution::point(1.5).unwrap();
        for n in [NormSpec::Holder(1.0), NormSpec::Expectile(0.8), NormSpec::Holder(f64::INFINITY)] {
            assert!((grid_min_higher_order(&n, 0.4, &c, &g).unwrap() - 1.5).abs() < 1e-12);
        }
        let v = grid_min_higher_order(&NormSpec::Holder(1.0), 0.5, &u4(), &g).unwrap();
        assert!((v - 3.5).abs() < 1e-8);
        let m = KusuokaMixture::new(&[(0.0, 0.5), (0.5, 0.5)]).unwrap();
        let v = grid_min_higher_order(&NormSpec::Spectral(m), 0.5, &u4(), &g).unwrap();
        assert!((v - 3.75).abs() < 1e-8);
    }

    #[test]
    fn dual_examples() {
        let d = u4();
        assert_eq!(dual_avar_sup(0.0, &d).unwrap(), 2.5);
        assert_eq!(dual_avar_sup(0.5, &d).unwrap(), 3.5);
        assert_eq!(dual_avar_sup(0.75, &d).unwrap(), 4.0);
        for i in 0..100 {
            let b = i as f64 / 100.0;
            assert!((dual_avar_sup(b, &d).unwrap() - avar(b, &d).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_examples() {
        let g = GridSpec::new(-10.0, 10.0, 2001).unwrap();
        let d = DiscreteDistribution::uniform(&[1.0, 2.0, 6.0]).unwrap();
        assert!((loss_argmin_expectile(0.5, &d, &g).unwrap() - 3.0).abs() < 1e-6);
        let b = DiscreteDistribution::uniform(&[0.0, 1.0]).unwrap();
        assert!((loss_argmin_expectile(0.75, &b, &g).unwrap() - 0.75).abs() < 1e-6);
        let c = DiscreteDistribution::point(-2.0).unwrap();
        assert!((loss_argmin_expectile(0.9, &c, &g).unwrap() + 2.0).abs() < 1e-6);
    }

    #[test]
    fn sweep_examples() {
        let g = GridSpec::new(-30.0, 30.0, 12001).unwrap();
        let x = DiscreteDistribution::uniform(&[0.0, 4.0]).unwrap();
        let y = DiscreteDistribution::uniform(&[1.0, 3.0]).unwrap();
        let n = NormSpec::Holder(1.0);
        assert!(dense_dominance_sweep(&x, &x, &n, &g).unwrap().holds());
        assert!(dense_dominance_sweep(&x, &y, &n, &g).unwrap().holds());
        let v = dense_dominance_sweep(&y, &x, &n, &g).unwrap();
        assert_eq!(v.outcome, Outcome::No);
        assert!(v.witness.is_some());
    }
}
