//! Random-key vectors: the problem-independent search representation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RkoError};

/// Largest value a key may hold after clamping.
pub const KEY_MAX: f64 = 1.0 - 1e-9;

/// Clamp an arbitrary real into the key range `[0, 1)`.
#[inline]
pub fn clamp_key(x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        0.0
    } else if x >= 1.0 {
        KEY_MAX
    } else {
        x
    }
}

/// Fixed-length vector of keys, each in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RandomKeyVector(Vec<f64>);

impl RandomKeyVector {
    /// Draws every key independently and uniformly from `[0, 1)`.
    pub fn random<R: Rng + ?Sized>(dimension: usize, rng: &mut R) -> Result<Self> {
        if dimension == 0 {
            return Err(RkoError::InvalidDimension(0));
        }
        Ok(Self((0..dimension).map(|_| rng.gen::<f64>()).collect()))
    }

    /// Wraps existing keys, rejecting any outside `[0, 1)`.
    pub fn from_keys(keys: Vec<f64>) -> Result<Self> {
        if keys.is_empty() {
            return Err(RkoError::InvalidDimension(0));
        }
        if let Some((index, &value)) = keys
            .iter()
            .enumerate()
            .find(|(_, k)| !(0.0..1.0).contains(*k))
        {
            return Err(RkoError::KeyOutOfRange { index, value });
        }
        Ok(Self(keys))
    }

    /// Builds a vector from arbitrary reals, clamping each into range.
    pub fn from_clamped<I: IntoIterator<Item = f64>>(values: I) -> Result<Self> {
        let keys: Vec<f64> = values.into_iter().map(clamp_key).collect();
        if keys.is_empty() {
            return Err(RkoError::InvalidDimension(0));
        }
        Ok(Self(keys))
    }

    pub fn keys(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Sets key `index`, clamping the value into range.
    pub fn set(&mut self, index: usize, value: f64) {
        self.0[index] = clamp_key(value);
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.0.swap(i, j);
    }
}

impl std::ops::Index<usize> for RandomKeyVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl TryFrom<Vec<f64>> for RandomKeyVector {
    type Error = RkoError;

    fn try_from(keys: Vec<f64>) -> Result<Self> {
        Self::from_keys(keys)
    }
}

impl From<RandomKeyVector> for Vec<f64> {
    fn from(v: RandomKeyVector) -> Self {
        v.0
    }
}

/// Euclidean distance between two key sequences.
///
/// Accepts raw slices so that values outside the key range can be compared.
pub fn similarity_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(RkoError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// A key vector together with its decoded cost.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSolution {
    vector: RandomKeyVector,
    cost: f64,
    decoded_at: u64,
}

impl EvaluatedSolution {
    /// `decoded_at` is the decoder-call ordinal that produced `cost`.
    pub fn new(vector: RandomKeyVector, cost: f64, decoded_at: u64) -> Result<Self> {
        if !cost.is_finite() {
            return Err(RkoError::DecoderFailure {
                call: decoded_at,
                cost,
            });
        }
        Ok(Self {
            vector,
            cost,
            decoded_at,
        })
    }

    pub fn vector(&self) -> &RandomKeyVector {
        &self.vector
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn decoded_at(&self) -> u64 {
        self.decoded_at
    }

    pub fn into_vector(self) -> RandomKeyVector {
        self.vector
    }
}
