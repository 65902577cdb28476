//! Shared elite pool.
//!
//! The pool keeps at most `capacity` distinct solutions sorted by cost. Once
//! full, a newcomer only enters by evicting the closest (in key space) member
//! that is strictly worse than it, so the pool size stays constant.

use std::sync::{PoisonError, RwLock};

use rand::Rng;

use crate::error::{Result, RkoError};
use crate::keys::{similarity_distance, EvaluatedSolution};

pub const DEFAULT_POOL_CAPACITY: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Accepted,
    RejectedDuplicate,
    RejectedWorse,
}

#[derive(Debug)]
pub struct ElitePool {
    capacity: usize,
    entries: RwLock<Vec<EvaluatedSolution>>,
}

impl ElitePool {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(RkoError::config("pool capacity must be at least 1"));
        }
        Ok(Self {
            capacity,
            entries: RwLock::new(Vec::with_capacity(capacity)),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.read().is_empty()
    }

    /// Minimum-cost member.
    pub fn best(&self) -> Option<EvaluatedSolution> {
        self.read().first().cloned()
    }

    pub fn best_cost(&self) -> Option<f64> {
        self.read().first().map(EvaluatedSolution::cost)
    }

    /// Copy of all members, cost ascending.
    pub fn snapshot(&self) -> Vec<EvaluatedSolution> {
        self.read().clone()
    }

    pub fn random_member<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<EvaluatedSolution> {
        let entries = self.read();
        if entries.is_empty() {
            None
        } else {
            Some(entries[rng.gen_range(0..entries.len())].clone())
        }
    }

    pub fn insert(&self, candidate: EvaluatedSolution) -> InsertOutcome {
        let mut entries = self
            .entries
            .write()
            .unwrap_or_else(PoisonError::into_inner);

        if entries
            .iter()
            .any(|e| e.vector().keys() == candidate.vector().keys())
        {
            return InsertOutcome::RejectedDuplicate;
        }

        if entries.len() >= self.capacity {
            // Only members strictly worse than the candidate can be evicted.
            let victim = entries
                .iter()
                .enumerate()
                .filter(|(_, e)| e.cost() > candidate.cost())
                .map(|(i, e)| {
                    let d = similarity_distance(e.vector().keys(), candidate.vector().keys())
                        .unwrap_or(f64::INFINITY);
                    (i, d)
                })
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match victim {
                Some((i, _)) => {
                    entries.remove(i);
                }
                None => return InsertOutcome::RejectedWorse,
            }
        }

        let pos = entries.partition_point(|e| e.cost() <= candidate.cost());
        entries.insert(pos, candidate);
        InsertOutcome::Accepted
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Vec<EvaluatedSolution>> {
        self.entries.read().unwrap_or_else(PoisonError::into_inner)
    }
}
