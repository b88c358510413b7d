//! Dynamic-programming upper bounds on the interdiction gain.
//!
//! `f(i, r, s)` bounds how much the minimum basis weight can still grow by
//! interdicting elements `>= i` with `r` capacity left, given state `s`
//! summarizing the interdictions before `i`. Tables are optionally
//! strengthened with the exact interdiction pattern of the first `p`
//! elements and may be built on rounded costs.

mod delta;
mod table;

pub use delta::DeltaOracle;
pub use table::{build_table, table_bytes, BoundTable, Step, TableBuilder};

use crate::instance::Instance;
use crate::matroid::{Matroid, PartKind};

/// Unbounded gain: interdiction may destroy every basis.
pub const INF: i64 = i64::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
enum StateKind {
    /// Number of elements of the part interdicted so far.
    Counter,
    /// Graphic parts need no state.
    Single,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PartStates {
    offset: usize,
    size: usize,
    kind: StateKind,
}

/// Disjoint union of the per-part state sets. The state of an interdiction
/// set lives in the part of its largest element; states of earlier parts act
/// as the initial state of later ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    parts: Vec<PartStates>,
    num_states: usize,
}

impl StateSpace {
    pub fn for_matroid(m: &Matroid) -> Self {
        let mut parts = Vec::with_capacity(m.parts().len());
        let mut offset = 0;
        for part in m.parts() {
            let (size, kind) = match part.kind {
                PartKind::Uniform { .. } => (part.range.len() + 1, StateKind::Counter),
                PartKind::Graphic { .. } => (1, StateKind::Single),
            };
            parts.push(PartStates { offset, size, kind });
            offset += size;
        }
        Self {
            parts,
            num_states: offset.max(1),
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// State of the empty interdiction set.
    pub fn initial(&self) -> usize {
        0
    }

    /// State after interdicting an element of part `part` from state `s`.
    #[inline]
    pub fn transition(&self, part: usize, s: usize) -> usize {
        let ps = &self.parts[part];
        let local = if s < ps.offset {
            0
        } else if s < ps.offset + ps.size {
            s - ps.offset
        } else {
            return s;
        };
        match ps.kind {
            StateKind::Counter => ps.offset + (local + 1).min(ps.size - 1),
            StateKind::Single => ps.offset,
        }
    }

    /// Interdictions counted inside `part` by state `s`; `None` when `s`
    /// belongs to a later part and so cannot occur at this part's elements.
    #[inline]
    pub fn local_count(&self, part: usize, s: usize) -> Option<usize> {
        let ps = &self.parts[part];
        if s < ps.offset {
            Some(0)
        } else if s < ps.offset + ps.size {
            Some(s - ps.offset)
        } else {
            None
        }
    }

    /// State of an interdiction set, folding `transition` over it in order.
    pub fn phi(&self, m: &Matroid, x: &[usize]) -> usize {
        let mut sorted = x.to_vec();
        sorted.sort_unstable();
        sorted
            .into_iter()
            .fold(self.initial(), |s, e| self.transition(m.part_index(e), s))
    }
}

/// Floors costs and ceils the capacity by `k`. Every set feasible before is
/// feasible after, so bounds computed on the result stay valid.
pub fn round_costs(inst: &Instance, k: u64) -> Instance {
    assert!(k >= 1, "rounding factor must be positive");
    let mut out = inst.clone();
    if k > 1 {
        out.costs.iter_mut().for_each(|c| *c /= k);
        out.capacity = inst.capacity.div_ceil(k);
    }
    out
}

/// `F(∅) + f_p(1, C, φ(∅), ∅)`, or [`INF`].
pub fn root_bound(inst: &Instance, table: &BoundTable) -> i64 {
    match (inst.value(&[]), table.root()) {
        (None, _) | (_, INF) => INF,
        (Some(f0), gain) => f0.saturating_add(gain),
    }
}

/// Sum of two non-negative gains where [`INF`] absorbs.
#[inline]
pub(crate) fn add_gain(a: i64, b: i64) -> i64 {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b)
    }
}
