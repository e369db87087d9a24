//! Seeded random instances shared by the integration suites.
//!
//! Values lie on the half-integer lattice in `[-10, 10]` so that dense
//! grids with spacing `0.005` contain every atom; probabilities are drawn
//! uniformly from the simplex.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riskorder::oracle::GridSpec;
use riskorder::{DiscreteDistribution, KusuokaMixture};

pub const DEFAULT_SEED: u64 = 0x5EED_0001;

/// Largest number of atoms in a random distribution.
pub const MAX_ATOMS: usize = 12;

/// Grid covering `[-30, 30]` with spacing `0.005`; contains every lattice
/// value and covers any support in `[-10, 10]` widened by its span.
pub fn wide_grid() -> GridSpec {
    GridSpec::new(-30.0, 30.0, 12001).expect("valid grid")
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    /// Uses `RISKORDER_SEED` when set, otherwise `DEFAULT_SEED`, and prints
    /// the seed so failures can be replayed.
    pub fn from_env(suite: &str) -> Self {
        let seed = std::env::var("RISKORDER_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_SEED);
        println!("{suite}: seed {seed}");
        Self::new(seed)
    }

    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Weights drawn uniformly from the simplex.
    pub fn simplex(&mut self, n: usize) -> Vec<f64> {
        let e: Vec<f64> = (0..n).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let total: f64 = e.iter().sum();
        e.into_iter().map(|x| x / total).collect()
    }

    /// Distinct lattice values `k/2` in `[-10, 10]`.
    pub fn lattice_values(&mut self, n: usize) -> Vec<f64> {
        let mut values: Vec<f64> = Vec::with_capacity(n);
        while values.len() < n {
            let v = self.rng.gen_range(-20i32..=20) as f64 / 2.0;
            if !values.contains(&v) {
                values.push(v);
            }
        }
        values
    }

    pub fn distribution_with(&mut self, atoms: usize) -> DiscreteDistribution {
        let values = self.lattice_values(atoms);
        let probs = self.simplex(atoms);
        let pairs: Vec<(f64, f64)> = values.into_iter().zip(probs).collect();
        DiscreteDistribution::from_atoms(&pairs).expect("valid random distribution")
    }

    /// Between 1 and [`MAX_ATOMS`] atoms.
    pub fn distribution(&mut self) -> DiscreteDistribution {
        let n = 1 + self.below(MAX_ATOMS);
        self.distribution_with(n)
    }

    /// Between 2 and [`MAX_ATOMS`] atoms.
    pub fn nonconstant(&mut self) -> DiscreteDistribution {
        let n = 2 + self.below(MAX_ATOMS - 1);
        self.distribution_with(n)
    }

    /// Levels in `[0, 0.95)` with weights from the simplex; `alpha = 0` is
    /// drawn with probability one quarter.
    pub fn mixture_with(&mut self, atoms: usize) -> KusuokaMixture {
        let weights = self.simplex(atoms);
        let pairs: Vec<(f64, f64)> = weights
            .into_iter()
            .map(|w| {
                let alpha = if self.below(4) == 0 { 0.0 } else { 0.95 * self.uniform() };
                (alpha, w)
            })
            .collect();
        KusuokaMixture::from_weights(&pairs).expect("valid random mixture")
    }

    /// Between 1 and 4 atoms.
    pub fn mixture(&mut self) -> KusuokaMixture {
        let n = 1 + self.below(4);
        self.mixture_with(n)
    }

    /// Uniform in `[0, 0.95)`, exactly zero with probability one tenth.
    pub fn beta(&mut self) -> f64 {
        if self.below(10) == 0 {
            0.0
        } else {
            0.95 * self.uniform()
        }
    }

    /// A pair `(X, Y)` where `X` is `Y` after a few lattice moves: mean
    /// preserving spreads and downward shifts (which keep `X ≼ Y` under
    /// every monotone norm) and occasional upward shifts (which may not).
    pub fn spread_pair(&mut self) -> (DiscreteDistribution, DiscreteDistribution) {
        let n = 1 + self.below(8);
        let y = self.distribution_with(n);
        let mut atoms: Vec<(f64, f64)> = y.atoms().collect();
        let moves = 1 + self.below(3);
        for _ in 0..moves {
            let k = self.below(atoms.len());
            let (v, p) = atoms[k];
            let q = p * (0.1 + 0.8 * self.uniform());
            match self.below(5) {
                0 => {
                    let a = 0.5 * (1 + self.below(4)) as f64;
                    if v - a >= -10.0 {
                        atoms[k].1 -= q;
                        atoms.push((v - a, q));
                    }
                }
                1 => {
                    let a = 0.5 * (1 + self.below(2)) as f64;
                    if v + a <= 10.0 {
                        atoms[k].1 -= q;
                        atoms.push((v + a, q));
                    }
                }
                _ => {
                    let a = 0.5 * (1 + self.below(6)) as f64;
                    let b = 0.5 * (1 + self.below(6)) as f64;
                    if v - a >= -10.0 && v + b <= 10.0 {
                        atoms[k].1 -= q;
                        atoms.push((v - a, q * b / (a + b)));
                        atoms.push((v + b, q * a / (a + b)));
                    }
                }
            }
        }
        let x = DiscreteDistribution::from_atoms(&atoms).expect("valid spread");
        (x, y)
    }

    /// Half spread pairs, half independent draws.
    pub fn dominance_pair(&mut self) -> (DiscreteDistribution, DiscreteDistribution) {
        if self.below(2) == 0 {
            self.spread_pair()
        } else {
            let x = self.distribution();
            let y = self.distribution();
            (x, y)
        }
    }
}
