use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;

use super::Transition;
use crate::error::{Error, Result};

/// Bounded FIFO experience store.
#[derive(Debug, Clone)]
pub struct ReplayMemory {
    buf: VecDeque<Transition>,
    capacity: usize,
}

impl ReplayMemory {
    pub fn new(capacity: usize) -> Self {
        Self { buf: VecDeque::with_capacity(capacity.min(1 << 16)), capacity: capacity.max(1) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Appends, evicting the oldest transition when full.
    pub fn push(&mut self, tr: Transition) {
        if self.buf.len() == self.capacity {
            self.buf.pop_front();
        }
        self.buf.push_back(tr);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.buf.iter()
    }

    /// `size` distinct transitions drawn uniformly. Requires strictly more
    /// stored transitions than requested.
    pub fn sample_minibatch<R: Rng>(&self, size: usize, rng: &mut R) -> Result<Vec<&Transition>> {
        if self.buf.len() <= size {
            return Err(Error::InsufficientSamples { available: self.buf.len(), requested: size });
        }
        Ok(index::sample(rng, self.buf.len(), size).into_iter().map(|i| &self.buf[i]).collect())
    }

    /// Number of stored transitions per action index.
    pub fn action_counts(&self, kappa: usize) -> Vec<usize> {
        let mut counts = vec![0; kappa];
        for t in &self.buf {
            if t.action < kappa {
                counts[t.action] += 1;
            }
        }
        counts
    }
}
