//! Stochastic dominance between two finite distributions.
//!
//! `X ≼ Y` in the order induced by a monotone norm means
//! `‖(t − X)₊‖ ≥ ‖(t − Y)₊‖` for every `t`. Equivalently the risk profiles
//! satisfy `R_β(−X) ≥ R_β(−Y)` for every `β ∈ [0, 1)`, and it suffices to
//! check that inequality at finitely many levels determined by where the
//! minimizer curves `t_{−X}(β)` and `t_{−Y}(β)` cross.
//!
//! Every check reports the minimal slack of its defining inequality as the
//! `margin`. Checks that are exact in finite arithmetic answer yes or no;
//! checks relying on iterative search answer undetermined when the margin
//! lies in `[−DOMINANCE_TOLERANCE, 0)`.

use crate::distribution::{DiscreteDistribution, Side};
use crate::error::{check_range, Result};
use crate::higher_order::{higher_order_risk, higher_order_spectral_closed, norm_nonnegative, NormSpec};
use crate::optimize::golden_section;
use crate::spectral::{spectral_risk, KusuokaMixture};

/// Slack below which an inequality counts as violated.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

/// Smallest risk level examined in place of `β = 0`.
pub const LOWER_LEVEL: f64 = 1e-9;

/// Largest risk level examined in place of `β → 1`.
pub const UPPER_LEVEL: f64 = 1.0 - 1e-6;

/// Default `β` grid spacing for norms without exact critical levels.
pub const DEFAULT_RESOLUTION: f64 = 1e-2;

const BISECTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Yes,
    No,
    Undetermined,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Yes => "yes",
            Outcome::No => "no",
            Outcome::Undetermined => "undetermined",
        }
    }
}

/// What a yes from the checked levels establishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evidence {
    /// The checked points suffice for the relation.
    Complete,
    /// The relation holds at the checked points only, a necessary condition.
    Necessary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceVerdict {
    pub outcome: Outcome,
    /// Point (`t`, `x` or `β`) with the smallest slack.
    pub witness: Option<f64>,
    pub margin: f64,
    /// Risk levels examined; empty for pointwise `t` checks.
    pub levels: Vec<f64>,
    pub evidence: Evidence,
}

impl DominanceVerdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Yes
    }
}

/// Crossing levels of the minimizer curves `t_{−X}` and `t_{−Y}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalLevels {
    /// Levels where `t_{−X} − t_{−Y}` turns from positive to negative: local
    /// minima of `(1 − β)(R_β(−X) − R_β(−Y))`.
    pub betas: Vec<f64>,
    /// Levels where the difference turns from negative to positive.
    pub gammas: Vec<f64>,
    pub endpoints: (f64, f64),
}

impl CriticalLevels {
    /// `betas` together with both endpoints, ascending.
    pub fn test_levels(&self) -> Vec<f64> {
        let mut levels = vec![self.endpoints.0];
        levels.extend(self.betas.iter().copied());
        levels.push(self.endpoints.1);
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        levels
    }
}

/// Minimum of `slack` over `points`, ties resolved to the first point.
fn min_slack(points: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    points
        .into_iter()
        .fold((f64::NAN, f64::INFINITY), |best, p| if p.1 < best.1 { p } else { best })
}

fn verdict(exact: bool, point: f64, margin: f64, levels: Vec<f64>, evidence: Evidence) -> DominanceVerdict {
    let outcome = if margin < -DOMINANCE_TOLERANCE {
        Outcome::No
    } else if !exact && margin < 0.0 {
        Outcome::Undetermined
    } else {
        Outcome::Yes
    };
    DominanceVerdict {
        outcome,
        witness: (outcome != Outcome::Yes && point.is_finite()).then_some(point),
        margin,
        levels,
        evidence,
    }
}

fn union_of_atoms(x: &DiscreteDistribution, y: &DiscreteDistribution) -> Vec<f64> {
    let mut points: Vec<f64> = x.values().iter().chain(y.values()).copied().collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// `F_X(x) ≥ F_Y(x)` for all `x`, checked at every atom of either law.
pub fn first_order(x: &DiscreteDistribution, y: &DiscreteDistribution) -> DominanceVerdict {
    let (point, margin) = min_slack(union_of_atoms(x, y).into_iter().map(|t| (t, x.cdf(t) - y.cdf(t))));
    verdict(true, point, margin, Vec::new(), Evidence::Complete)
}

/// `E(x − X)₊^{p−1} ≥ E(x − Y)₊^{p−1}` for all `x`.
///
/// Order 1 compares distribution functions and order 2 compares piecewise
/// linear functions, both exactly at the atoms. Other orders add a search
/// inside each gap between atoms and on geometric probes to the right.
pub fn p_order(x: &DiscreteDistribution, y: &DiscreteDistribution, p: f64) -> Result<DominanceVerdict> {
    check_range("p", p, "[1, inf)", p >= 1.0 && p.is_finite())?;
    if p == 1.0 {
        return Ok(first_order(x, y));
    }
    let r = p - 1.0;
    let slack = |t: f64| {
        x.partial_moment(t, r, Side::Lower).unwrap() - y.partial_moment(t, r, Side::Lower).unwrap()
    };
    let atoms = union_of_atoms(x, y);
    let (mut point, mut margin) = min_slack(atoms.iter().map(|&t| (t, slack(t))));
    if p == 2.0 {
        return Ok(verdict(true, point, margin, Vec::new(), Evidence::Complete));
    }

    let scale = atoms.last().unwrap() - atoms[0];
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut consider = |t: f64, s: f64| {
        if s < margin {
            point = t;
            margin = s;
        }
    };
    const SUBGRID: usize = 16;
    for w in atoms.windows(2) {
        let (a, b) = (w[0], w[1]);
        let grid: Vec<(f64, f64)> = (0..=SUBGRID)
            .map(|i| {
                let t = a + (b - a) * i as f64 / SUBGRID as f64;
                (t, slack(t))
            })
            .collect();
        let (k, _) = grid
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, g)| if g.1 < best.1 { (i, g.1) } else { best });
        let lo = grid[k.saturating_sub(1)].0;
        let hi = grid[(k + 1).min(SUBGRID)].0;
        let (t, s) = golden_section(slack, lo, hi, 1e-10 * scale);
        consider(t, s);
    }
    let top = *atoms.last().unwrap();
    for j in -4..=40 {
        let t = top + scale * 2f64.powi(j);
        consider(t, tail_slack(x, y, r, top, t));
    }
    Ok(verdict(false, point, margin, Vec::new(), Evidence::Complete))
}

/// `E(t − X)^r − E(t − Y)^r` for `t` beyond every atom, written as
/// `s^r Σ pᵢ ((1 + wᵢ)^r − 1) − …` with `s = t − top`, `wᵢ = (top − xᵢ)/s`
/// so the leading terms cancel analytically.
fn tail_slack(x: &DiscreteDistribution, y: &DiscreteDistribution, r: f64, top: f64, t: f64) -> f64 {
    let s = t - top;
    let part = |d: &DiscreteDistribution| -> f64 {
        d.atoms()
            .map(|(v, p)| p * (r * ((top - v) / s).ln_1p()).exp_m1())
            .sum()
    };
    s.powf(r) * (part(x) - part(y))
}

/// `(F_X^{(k)}(x), F_Y^{(k)}(x))` with `F^{(k)}(x) = E(x − ·)₊^{k−1}/(k − 1)!`,
/// the `(k−1)`-fold repeated integral of the distribution function.
pub fn integer_order_integrals(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    k: u32,
    at: f64,
) -> Result<(f64, f64)> {
    check_range("k", k as f64, "[2, inf)", k >= 2)?;
    let r = (k - 1) as f64;
    let factorial: f64 = (1..k).map(|i| i as f64).product();
    Ok((
        x.partial_moment(at, r, Side::Lower)? / factorial,
        y.partial_moment(at, r, Side::Lower)? / factorial,
    ))
}

/// `‖(t − X)₊‖_σ ≥ ‖(t − Y)₊‖_σ` for all `t`.
///
/// Both sides are linear in `t` between atoms, vanish below the smallest
/// atom and differ by a constant above the largest, so the atoms and one
/// probe beyond each end decide the relation.
pub fn spectral_order(x: &DiscreteDistribution, y: &DiscreteDistribution, m: &KusuokaMixture) -> DominanceVerdict {
    let mut points = union_of_atoms(x, y);
    let width = (points.last().unwrap() - points[0]).max(1.0);
    points.push(points[0] - width);
    points.push(points[points.len() - 2] + width);
    let slack = |t: f64| spectral_risk(m, &x.shortfall_below(t)) - spectral_risk(m, &y.shortfall_below(t));
    let (point, margin) = min_slack(points.into_iter().map(|t| (t, slack(t))));
    verdict(true, point, margin, Vec::new(), Evidence::Complete)
}

/// `R_β(−X) − R_β(−Y)`, exact for norms with a spectral closed form.
fn profile_gap(n: &NormSpec, beta: f64, nx: &DiscreteDistribution, ny: &DiscreteDistribution) -> Result<f64> {
    Ok(match n.as_mixture() {
        Some(m) => {
            higher_order_spectral_closed(&m, beta, nx)?.value - higher_order_spectral_closed(&m, beta, ny)?.value
        }
        None => higher_order_risk(n, beta, nx)?.value - higher_order_risk(n, beta, ny)?.value,
    })
}

fn profile_verdict(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    n: &NormSpec,
    levels: Vec<f64>,
    evidence: Evidence,
) -> Result<DominanceVerdict> {
    n.validate()?;
    let (nx, ny) = (x.negate(), y.negate());
    let mut slack = Vec::with_capacity(levels.len());
    for &beta in &levels {
        slack.push((beta, profile_gap(n, beta, &nx, &ny)?));
    }
    let (point, margin) = min_slack(slack);
    Ok(verdict(n.as_mixture().is_some(), point, margin, levels, evidence))
}

/// `R_β(−X) ≥ R_β(−Y)` at the given levels; a yes is necessary evidence only.
pub fn risk_profile_order(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    n: &NormSpec,
    betas: &[f64],
) -> Result<DominanceVerdict> {
    for &b in betas {
        check_range("beta", b, "[0, 1)", (0.0..1.0).contains(&b))?;
    }
    profile_verdict(x, y, n, betas.to_vec(), Evidence::Necessary)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Sign pattern of `t_{−X} − t_{−Y}` turned into local minima (`betas`) and
/// maxima (`gammas`) of the weighted profile difference.
///
/// `segments` holds `(left, right, sign)` for consecutive intervals covering
/// `[LOWER_LEVEL, UPPER_LEVEL]`.
fn classify(segments: &[(f64, f64, f64)]) -> CriticalLevels {
    let mut betas = Vec::new();
    let mut gammas = Vec::new();
    for w in segments.windows(2) {
        let (s0, s1) = (w[0].2, w[1].2);
        let at = w[0].1;
        if (s0 > 0.0 && s1 <= 0.0) || (s0 >= 0.0 && s1 < 0.0) {
            betas.push(at);
        } else if (s0 < 0.0 && s1 >= 0.0) || (s0 <= 0.0 && s1 > 0.0) {
            gammas.push(at);
        }
    }
    // identical curves on a stretch: add one interior level per run
    let mut i = 0;
    while i < segments.len() {
        if segments[i].2 == 0.0 {
            let start = segments[i].0;
            while i < segments.len() && segments[i].2 == 0.0 {
                i += 1;
            }
            let end = segments[i - 1].1;
            if start > LOWER_LEVEL || end < UPPER_LEVEL {
                betas.push(0.5 * (start + end));
            }
        } else {
            i += 1;
        }
    }
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    CriticalLevels {
        betas,
        gammas,
        endpoints: (LOWER_LEVEL, UPPER_LEVEL),
    }
}

fn spectral_segments(m: &KusuokaMixture, nx: &DiscreteDistribution, ny: &DiscreteDistribution) -> Vec<(f64, f64, f64)> {
    let mut cuts: Vec<f64> = nx
        .cumulative()
        .iter()
        .chain(ny.cumulative())
        .map(|&c| m.cumulative_sigma(c))
        .filter(|&b| b > LOWER_LEVEL && b < UPPER_LEVEL)
        .collect();
    cuts.push(LOWER_LEVEL);
    cuts.push(UPPER_LEVEL);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let u = m.u_beta_unchecked(0.5 * (w[0] + w[1]));
            (w[0], w[1], sign(nx.quantile_unchecked(u) - ny.quantile_unchecked(u)))
        })
        .collect()
}

/// Crossings of the minimizer curves of `−X` and `−Y`.
///
/// For `L¹` and spectral norms the curves `t = F⁻¹(u_β)` are step functions
/// whose jumps sit at the images of cumulative probabilities, and the
/// crossings are exact. Other norms are sampled on a grid of the given
/// resolution and each sign change is refined by bisection.
pub fn critical_levels(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    n: &NormSpec,
    resolution: f64,
) -> Result<CriticalLevels> {
    n.validate()?;
    check_range("resolution", resolution, "(0, 1)", resolution > 0.0 && resolution < 1.0)?;
    let (nx, ny) = (x.negate(), y.negate());
    if let Some(m) = n.as_mixture() {
        return Ok(classify(&spectral_segments(&m, &nx, &ny)));
    }
    let gap = |beta: f64| -> Result<f64> {
        Ok(higher_order_risk(n, beta, &nx)?.t_star - higher_order_risk(n, beta, &ny)?.t_star)
    };
    let steps = ((UPPER_LEVEL - LOWER_LEVEL) / resolution).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| crate::optimize::grid_point(LOWER_LEVEL, UPPER_LEVEL, i, steps + 1))
        .collect();
    let mut signs = Vec::with_capacity(grid.len());
    for &b in &grid {
        signs.push(sign(gap(b)?));
    }
    // segments are the grid cells, with sign changes moved to the refined
    // crossing inside the cell
    let mut segments: Vec<(f64, f64, f64)> = Vec::new();
    let mut left = grid[0];
    for i in 0..grid.len() - 1 {
        let (s0, s1) = (signs[i], signs[i + 1]);
        if s0 == s1 {
            continue;
        }
        let (mut lo, mut hi) = (grid[i], grid[i + 1]);
        while hi - lo > BISECTION_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if sign(gap(mid)?) == s0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cross = 0.5 * (lo + hi);
        segments.push((left, cross, s0));
        left = cross;
    }
    segments.push((left, UPPER_LEVEL, *signs.last().unwrap()));
    Ok(classify(&segments))
}

/// Decides `X ≼ Y` by checking the risk profiles at the critical levels.
pub fn verify_dominance(x: &DiscreteDistribution, y: &DiscreteDistribution, n: &NormSpec) -> Result<DominanceVerdict> {
    verify_dominance_with(x, y, n, DEFAULT_RESOLUTION)
}

pub fn verify_dominance_with(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    n: &NormSpec,
    resolution: f64,
) -> Result<DominanceVerdict> {
    let levels = critical_levels(x, y, n, resolution)?.test_levels();
    profile_verdict(x, y, n, levels, Evidence::Complete)
}

/// Verdicts for orders `p` and `p′`; `(yes, no)` would contradict the
/// implication from order `p` to every higher order.
pub fn order_implication_check(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    p: f64,
    p_prime: f64,
) -> Result<(DominanceVerdict, DominanceVerdict)> {
    check_range("p_prime", p_prime, "(p, inf)", p_prime > p)?;
    Ok((p_order(x, y, p)?, p_order(x, y, p_prime)?))
}

/// `‖(t − X)₊‖ − ‖(t − Y)₊‖`, the slack of the defining inequality at `t`.
pub fn norm_slack(n: &NormSpec, x: &DiscreteDistribution, y: &DiscreteDistribution, t: f64) -> f64 {
    norm_nonnegative(n, &x.shortfall_below(t)) - norm_nonnegative(n, &y.shortfall_below(t))
}
