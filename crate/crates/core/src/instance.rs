//! Raw and normalized interdiction instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::matroid::{Matroid, MatroidSpec, PartKind};

/// An instance as read from input, over input indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawInstance {
    pub matroid: MatroidSpec,
    pub weights: Vec<i64>,
    /// `None` is an uninterdictable element.
    pub costs: Vec<Option<u64>>,
    pub capacity: u64,
    /// Blocker target weight.
    pub target: Option<i64>,
    /// Planar dual of a graphic instance, edge `j` matching primal edge `j`.
    pub dual_graph: Option<Multigraph>,
}

impl RawInstance {
    pub fn new(matroid: MatroidSpec, weights: Vec<i64>, costs: Vec<Option<u64>>, capacity: u64) -> Self {
        Self {
            matroid,
            weights,
            costs,
            capacity,
            target: None,
            dual_graph: None,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Cost used in place of infinity: larger than any affordable total.
    pub fn inf_cost(&self) -> u64 {
        let finite: u64 = self.costs.iter().flatten().sum();
        finite.max(self.capacity) + 1
    }

    pub fn check(&self) -> Result<()> {
        let m = self.matroid.len();
        if self.weights.len() != m || self.costs.len() != m {
            return Err(Error::InvalidInstance(format!(
                "matroid has {m} elements but {} weights and {} costs were given",
                self.weights.len(),
                self.costs.len()
            )));
        }
        self.matroid.validate()?;
        if let Some(d) = &self.dual_graph {
            if d.num_edges() != m {
                return Err(Error::InvalidInstance(format!(
                    "dual graph has {} edges, expected {m}",
                    d.num_edges()
                )));
            }
        }
        Ok(())
    }

    pub fn normalize(&self) -> Result<Instance> {
        Instance::from_raw(self)
    }
}

/// Normalized instance: weights ascend within each part and every cost is
/// at least one. Index `i` here is input element `perm[i]`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub matroid: Matroid,
    pub weights: Vec<i64>,
    pub costs: Vec<u64>,
    pub capacity: u64,
    pub perm: Vec<usize>,
    /// Input indices of zero-cost elements, removed during normalization.
    pub free: Vec<usize>,
    /// Removing the free elements already lowers the rank.
    pub free_reduces_rank: bool,
    pub original_len: usize,
    pub target: Option<i64>,
    pub inf_cost: u64,
}

impl Instance {
    pub fn from_raw(raw: &RawInstance) -> Result<Instance> {
        raw.check()?;
        let inf = raw.inf_cost();
        let cost_of = |e: usize| raw.costs[e].unwrap_or(inf);
        let (matroid, perm) = Matroid::from_spec(&raw.matroid, |e| cost_of(e) > 0, |e| raw.weights[e])?;
        let free: Vec<usize> = (0..raw.len()).filter(|&e| cost_of(e) == 0).collect();
        let free_reduces_rank = !free.is_empty() && matroid.rank() < raw.matroid.full_rank();
        Ok(Instance {
            weights: perm.iter().map(|&e| raw.weights[e]).collect(),
            costs: perm.iter().map(|&e| cost_of(e)).collect(),
            matroid,
            capacity: raw.capacity,
            perm,
            free,
            free_reduces_rank,
            original_len: raw.len(),
            target: raw.target,
            inf_cost: inf,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.matroid.rank()
    }

    pub fn weight(&self, set: &[usize]) -> i64 {
        set.iter().map(|&e| self.weights[e]).sum()
    }

    pub fn cost(&self, set: &[usize]) -> u64 {
        set.iter().map(|&e| self.costs[e]).sum()
    }

    pub fn mask(&self, set: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        set.iter().for_each(|&e| mask[e] = true);
        mask
    }

    pub fn lex_min_basis(&self, x: &[usize]) -> Option<Vec<usize>> {
        self.matroid.lex_min_basis(&self.mask(x))
    }

    /// F(X): weight of the lex-min basis avoiding `x`, `None` when none exists.
    pub fn value(&self, x: &[usize]) -> Option<i64> {
        self.lex_min_basis(x).map(|b| self.weight(&b))
    }

    /// Input indices of a normalized set, sorted.
    pub fn to_original(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&e| self.perm[e]).collect();
        out.sort_unstable();
        out
    }

    /// Normalized indices of an input set; free elements are dropped.
    pub fn from_original(&self, set: &[usize]) -> Vec<usize> {
        let mut inv = vec![usize::MAX; self.original_len];
        self.perm.iter().enumerate().for_each(|(i, &e)| inv[e] = i);
        let mut out: Vec<usize> = set.iter().map(|&e| inv[e]).filter(|&i| i != usize::MAX).collect();
        out.sort_unstable();
        out
    }

    /// Whether weights ascend inside every part.
    pub fn is_sorted_per_part(&self) -> bool {
        self.matroid
            .parts()
            .iter()
            .all(|p| self.weights[p.range.clone()].windows(2).all(|w| w[0] <= w[1]))
    }

    pub fn is_graphic_only(&self) -> bool {
        self.matroid
            .parts()
            .iter()
            .all(|p| matches!(p.kind, PartKind::Graphic { .. }))
    }

    pub fn is_uniform_only(&self) -> bool {
        self.matroid
            .parts()
            .iter()
            .all(|p| matches!(p.kind, PartKind::Uniform { .. }))
    }

    /// Keeps `{e : keep[e]}`; indices stay in order so the result is still
    /// normalized.
    pub fn restrict(&self, keep: &[bool]) -> Instance {
        let (matroid, map) = self.matroid.restrict(keep);
        Instance {
            weights: map.iter().map(|&e| self.weights[e]).collect(),
            costs: map.iter().map(|&e| self.costs[e]).collect(),
            perm: map.iter().map(|&e| self.perm[e]).collect(),
            matroid,
            capacity: self.capacity,
            free: self.free.clone(),
            free_reduces_rank: self.free_reduces_rank,
            original_len: self.original_len,
            target: self.target,
            inf_cost: self.inf_cost,
        }
    }
}
