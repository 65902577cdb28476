//! Shaking and blending operators on key vectors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RkoError};
use crate::keys::{clamp_key, RandomKeyVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShakeConfig {
    pub beta_min: f64,
    pub beta_max: f64,
}

impl Default for ShakeConfig {
    fn default() -> Self {
        Self {
            beta_min: 0.1,
            beta_max: 0.3,
        }
    }
}

impl ShakeConfig {
    pub fn new(beta_min: f64, beta_max: f64) -> Result<Self> {
        let cfg = Self { beta_min, beta_max };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fixed perturbation rate.
    pub fn fixed(beta: f64) -> Result<Self> {
        Self::new(beta, beta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_min > 0.0 && self.beta_min <= self.beta_max && self.beta_max <= 1.0) {
            return Err(RkoError::config(format!(
                "shake rates must satisfy 0 < beta_min <= beta_max <= 1, got [{}, {}]",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }

    /// Upper bound on the number of moves a shake may apply.
    pub fn max_moves(&self, dimension: usize) -> usize {
        (self.beta_max * dimension as f64).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShakeMove {
    /// Exchange keys `i` and `j`.
    Swap(usize, usize),
    /// Exchange key `i` with key `i + 1`.
    SwapNeighbor(usize),
    /// Replace key `i` by its complement.
    Mirror(usize),
    /// Replace key `i` by a fresh uniform value.
    Random(usize),
}

impl ShakeMove {
    fn sample<R: Rng + ?Sized>(dimension: usize, rng: &mut R) -> Self {
        let i = rng.gen_range(0..dimension);
        match rng.gen_range(0..4) {
            0 => {
                let j = if dimension < 2 {
                    i
                } else {
                    // uniform over indices other than i
                    let j = rng.gen_range(0..dimension - 1);
                    if j >= i {
                        j + 1
                    } else {
                        j
                    }
                };
                ShakeMove::Swap(i, j)
            }
            1 => ShakeMove::SwapNeighbor(i),
            2 => ShakeMove::Mirror(i),
            _ => ShakeMove::Random(i),
        }
    }

    /// Apply the move in place. Degenerate swaps (dimension < 2) are no-ops.
    pub fn apply<R: Rng + ?Sized>(self, v: &mut RandomKeyVector, rng: &mut R) {
        let n = v.len();
        match self {
            ShakeMove::Swap(i, j) => {
                if i != j && i < n && j < n {
                    v.swap(i, j);
                }
            }
            ShakeMove::SwapNeighbor(i) => {
                if i + 1 < n {
                    v.swap(i, i + 1);
                }
            }
            ShakeMove::Mirror(i) => {
                let k = v[i];
                v.set(i, 1.0 - k);
            }
            ShakeMove::Random(i) => {
                let k = rng.gen::<f64>();
                v.set(i, k);
            }
        }
    }
}

/// Perturbs a copy of `vector` with `ceil(beta * n)` random moves, where
/// `beta` is drawn uniformly from the configured range. Indices are sampled
/// with replacement, so a move may revisit a key.
pub fn shake<R: Rng + ?Sized>(
    vector: &RandomKeyVector,
    config: &ShakeConfig,
    rng: &mut R,
) -> RandomKeyVector {
    let n = vector.len();
    let beta = config.beta_min + (config.beta_max - config.beta_min) * rng.gen::<f64>();
    let moves = ((beta * n as f64).ceil() as usize).max(1);
    let mut out = vector.clone();
    for _ in 0..moves {
        ShakeMove::sample(n, rng).apply(&mut out, rng);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendConfig {
    /// Probability of inheriting from the first parent.
    pub rho: f64,
    /// Probability of resetting a key to a fresh random value.
    pub mu: f64,
    /// `+1` copies the second parent's key, `-1` its complement.
    pub factor: i8,
}

impl BlendConfig {
    pub fn new(rho: f64, mu: f64, factor: i8) -> Result<Self> {
        let cfg = Self { rho, mu, factor };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) || !(0.0..=1.0).contains(&self.mu) {
            return Err(RkoError::config("blend rho and mu must lie in [0, 1]"));
        }
        if self.factor != 1 && self.factor != -1 {
            return Err(RkoError::config("blend factor must be +1 or -1"));
        }
        Ok(())
    }
}

/// Biased uniform-crossover of two parents.
pub fn blend<R: Rng + ?Sized>(
    a: &RandomKeyVector,
    b: &RandomKeyVector,
    config: &BlendConfig,
    rng: &mut R,
) -> Result<RandomKeyVector> {
    if a.len() != b.len() {
        return Err(RkoError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let keys = a.keys().iter().zip(b.keys()).map(|(&ka, &kb)| {
        if rng.gen::<f64>() < config.mu {
            rng.gen::<f64>()
        } else if rng.gen::<f64>() < config.rho {
            ka
        } else if config.factor < 0 {
            clamp_key(1.0 - kb)
        } else {
            kb
        }
    });
    RandomKeyVector::from_clamped(keys)
}
