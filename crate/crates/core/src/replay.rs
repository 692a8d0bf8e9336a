//! Experience buffers, prioritized sampling and importance-sampling
//! corrections.

use std::fmt::Write as _;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::game::Player;
use crate::seed::Rng;

pub const DEFAULT_CAPACITY: usize = 2500;
pub const DEFAULT_BATCH: usize = 30;

/// One self-play state as stored for training.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperienceTuple {
    pub player: Player,
    /// Features of every legal action, in legal-action order.
    pub features: Vec<FeatureVector>,
    /// Visit-count distribution of the expert search.
    pub expert: Vec<f64>,
    /// Total plies of the episode; set when the episode ends.
    pub duration: Option<u32>,
    pub priority: f64,
    /// Truncated exploration-policy correction (1 when unused).
    pub cee_factor: f64,
    /// Insertion sequence number, assigned by the buffer (first is 1).
    pub seq: u64,
}

impl ExperienceTuple {
    pub fn new(player: Player, features: Vec<FeatureVector>, expert: Vec<f64>) -> Self {
        ExperienceTuple {
            player,
            features,
            expert,
            duration: None,
            priority: 1.0,
            cee_factor: 1.0,
            seq: 0,
        }
    }
}

/// Complete binary tree whose leaves hold `p_i^alpha` and whose internal
/// nodes hold the sum of their children.
#[derive(Debug, Clone)]
pub struct SumTree {
    capacity: usize,
    base: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(capacity: usize) -> Self {
        let base = capacity.max(1).next_power_of_two();
        SumTree {
            capacity,
            base,
            nodes: vec![0.0; 2 * base],
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn get(&self, leaf: usize) -> f64 {
        self.nodes[self.base + leaf]
    }

    /// Sets a leaf and recomputes its ancestors from their children, so sums
    /// never accumulate drift.
    pub fn set(&mut self, leaf: usize, value: f64) {
        assert!(leaf < self.capacity, "leaf {leaf} out of range");
        let mut i = self.base + leaf;
        self.nodes[i] = value;
        while i > 1 {
            i /= 2;
            self.nodes[i] = self.nodes[2 * i] + self.nodes[2 * i + 1];
        }
    }

    /// Leaf whose cumulative interval contains `mass` in `[0, total)`.
    /// Never returns a zero-valued leaf while the total is positive.
    pub fn find(&self, mut mass: f64) -> usize {
        let mut i = 1;
        while i < self.base {
            let left = self.nodes[2 * i];
            let right = self.nodes[2 * i + 1];
            if left > 0.0 && (mass < left || right <= 0.0) {
                i *= 2;
            } else {
                mass -= left;
                i = 2 * i + 1;
            }
        }
        i - self.base
    }

    /// Largest absolute difference between any internal node and the sum of
    /// its children.
    pub fn max_inconsistency(&self) -> f64 {
        (1..self.base)
            .map(|i| (self.nodes[i] - self.nodes[2 * i] - self.nodes[2 * i + 1]).abs())
            .fold(0.0, f64::max)
    }
}

/// A sampled buffer slot and the probability it was drawn with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampled {
    pub index: usize,
    pub probability: f64,
}

/// FIFO experience buffer with an attached sum tree over priorities.
#[derive(Debug, Clone)]
pub struct ExperienceBuffer {
    capacity: usize,
    alpha: f64,
    slots: Vec<ExperienceTuple>,
    next_slot: usize,
    next_seq: u64,
    tree: SumTree,
}

impl ExperienceBuffer {
    pub fn new(capacity: usize, alpha: f64) -> Self {
        assert!(capacity > 0, "buffer capacity must be positive");
        ExperienceBuffer {
            capacity,
            alpha,
            slots: Vec::with_capacity(capacity),
            next_slot: 0,
            next_seq: 1,
            tree: SumTree::new(capacity),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tuple(&self, index: usize) -> &ExperienceTuple {
        &self.slots[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExperienceTuple> {
        self.slots.iter()
    }

    pub fn tree(&self) -> &SumTree {
        &self.tree
    }

    pub fn max_priority(&self) -> Option<f64> {
        self.slots.iter().map(|t| t.priority).reduce(f64::max)
    }

    pub fn mean_priority(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.slots.iter().map(|t| t.priority).sum::<f64>() / self.len() as f64)
    }

    /// Appends `tuple`, evicting the oldest entry when full. The new tuple
    /// gets the maximum priority among the remaining entries, or 1 when
    /// there are none. Returns the slot index.
    pub fn add(&mut self, mut tuple: ExperienceTuple) -> usize {
        let slot = self.next_slot;
        let full = self.slots.len() == self.capacity;
        if full {
            // The slot being overwritten holds the oldest entry.
            self.tree.set(slot, 0.0);
            self.slots[slot].priority = f64::NEG_INFINITY;
        }
        let max = self
            .slots
            .iter()
            .map(|t| t.priority)
            .filter(|p| p.is_finite())
            .reduce(f64::max)
            .unwrap_or(1.0);
        tuple.priority = max;
        tuple.seq = self.next_seq;
        self.next_seq += 1;
        if full {
            self.slots[slot] = tuple;
        } else {
            self.slots.push(tuple);
        }
        self.tree.set(slot, max.powf(self.alpha));
        self.next_slot = (slot + 1) % self.capacity;
        slot
    }

    pub fn set_priority(&mut self, index: usize, priority: f64) -> Result<()> {
        if !priority.is_finite() || priority < 0.0 {
            return Err(Error::NonFinite("priority"));
        }
        self.slots[index].priority = priority;
        self.tree.set(index, priority.powf(self.alpha));
        Ok(())
    }

    /// `n` uniform draws with replacement.
    pub fn sample_uniform(&self, n: usize, rng: &mut Rng) -> Result<Vec<Sampled>> {
        if self.is_empty() {
            return Err(Error::EmptyBuffer);
        }
        let p = 1.0 / self.len() as f64;
        Ok((0..n)
            .map(|_| Sampled {
                index: rng.random_range(0..self.len()),
                probability: p,
            })
            .collect())
    }

    /// `P(i)` of slot `index` under prioritized sampling.
    pub fn probability(&self, index: usize) -> f64 {
        let total = self.tree.total();
        if total > 0.0 {
            self.tree.get(index) / total
        } else {
            1.0 / self.len() as f64
        }
    }

    /// `n` prioritized draws with replacement, `P(i) = p_i^a / sum_k p_k^a`.
    /// Falls back to uniform when every priority is zero.
    pub fn per_sample(&self, n: usize, rng: &mut Rng) -> Result<Vec<Sampled>> {
        if self.is_empty() {
            return Err(Error::EmptyBuffer);
        }
        let total = self.tree.total();
        if total <= 0.0 {
            return self.sample_uniform(n, rng);
        }
        Ok((0..n)
            .map(|_| {
                let index = self.tree.find(rng.random::<f64>() * total);
                Sampled {
                    index,
                    probability: self.tree.get(index) / total,
                }
            })
            .collect())
    }

    /// Refreshes a tuple's priority after it was used for an update.
    pub fn per_update_priority(&mut self, index: usize, expert: &[f64], apprentice: &[f64]) -> Result<f64> {
        let p = abs_difference(expert, apprentice)?;
        self.set_priority(index, p)?;
        Ok(p)
    }

    /// One line per tuple in insertion order: `seq T priority M...`.
    pub fn dump(&self) -> String {
        let mut tuples: Vec<&ExperienceTuple> = self.slots.iter().collect();
        tuples.sort_by_key(|t| t.seq);
        let mut out = String::new();
        for t in tuples {
            let dur = t.duration.map_or("-".to_string(), |d| d.to_string());
            let m: Vec<String> = t.expert.iter().map(|x| format!("{x:?}")).collect();
            let _ = writeln!(out, "{} {} {:?} {}", t.seq, dur, t.priority, m.join(" "));
        }
        out
    }
}

/// `sum_a |M(a) - pi(a)|`.
pub fn abs_difference(expert: &[f64], apprentice: &[f64]) -> Result<f64> {
    if expert.len() != apprentice.len() {
        return Err(Error::SupportMismatch(expert.len(), apprentice.len()));
    }
    Ok(expert.iter().zip(apprentice).map(|(m, p)| (m - p).abs()).sum())
}

/// `(1 / (N P(i)))^beta`, divided by the batch maximum.
pub fn per_is_ratios(probabilities: &[f64], buffer_len: usize, beta: f64) -> Result<Vec<f64>> {
    if probabilities.iter().any(|&p| p <= 0.0) {
        return Err(Error::ZeroProbability);
    }
    let raw: Vec<f64> = probabilities
        .iter()
        .map(|&p| (1.0 / (buffer_len as f64 * p)).powf(beta))
        .collect();
    let max = raw.iter().copied().fold(0.0, f64::max);
    Ok(raw.into_iter().map(|r| r / max).collect())
}

/// Exponentially weighted moving average of episode durations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DurationTracker {
    u: f64,
    estimate: f64,
    updates: u64,
}

impl DurationTracker {
    pub const DECAY: f64 = 0.95;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, duration: u32) {
        self.u = Self::DECAY * self.u + 1.0;
        self.estimate += (duration as f64 - self.estimate) / self.u;
        self.updates += 1;
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Moving-average duration, once at least one episode was recorded.
    pub fn estimate(&self) -> Option<f64> {
        (self.updates > 0).then_some(self.estimate)
    }
}

/// Episode-duration ratio `T_hat / T` of a finalized tuple.
pub fn wed_ratio(tracker: &DurationTracker, tuple: &ExperienceTuple) -> Result<f64> {
    let duration = tuple.duration.ok_or(Error::Unfinalized)?;
    let estimate = tracker
        .estimate()
        .ok_or_else(|| Error::InvalidConfig("duration tracker has no episodes".into()))?;
    Ok(estimate / duration as f64)
}

/// Ordinary importance sampling, `sum rho_k x_k / n`.
pub fn is_estimate(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(samples.iter().map(|(r, x)| r * x).sum::<f64>() / samples.len() as f64)
}

/// Weighted importance sampling, `sum rho_k x_k / sum rho_k`.
pub fn wis_estimate(samples: &[(f64, f64)]) -> Result<f64> {
    let total: f64 = samples.iter().map(|(r, _)| r).sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    Ok(samples.iter().map(|(r, x)| r * x).sum::<f64>() / total)
}
