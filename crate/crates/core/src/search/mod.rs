//! Branch and bound for interdiction and minimum-cost blockers.

mod dyn_interdict;
mod engine;
mod greedy;
pub mod preprocess;

use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, RawInstance};

pub use dyn_interdict::DynInterdict;
pub use engine::{solve_blocker_with, solve_interdiction_with, Hooks};
pub use greedy::greedy_lower_bound;

/// How bound tables are produced alongside the search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Tables are built on a second thread and picked up as they finish.
    #[default]
    Parallel,
    /// One thread alternates between search and table building with a
    /// doubling time slice.
    Interleaved,
    /// All tables are built before the search starts.
    BoundsFirst,
    NoBounds,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parallel" => Ok(Mode::Parallel),
            "interleaved" => Ok(Mode::Interleaved),
            "bounds-first" => Ok(Mode::BoundsFirst),
            "no-bounds" => Ok(Mode::NoBounds),
            _ => Err(Error::InvalidInstance(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub time_limit: Option<Duration>,
    pub mode: Mode,
    /// Largest number of prefix bits a table may use.
    pub max_prefix_bits: usize,
    /// Bytes any single table may occupy.
    pub memory_budget: u128,
    /// Cost rounding factor for the tables.
    pub round_k: u64,
    pub greedy: bool,
    pub preprocess: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_limit: None,
            mode: Mode::Parallel,
            max_prefix_bits: 16,
            memory_budget: 1 << 30,
            round_k: 1,
            greedy: true,
            preprocess: true,
        }
    }
}

/// Counters from one run; serialized as the `--stats-json` document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
    /// One past the last element that may be interdicted, over the reduced
    /// instance.
    pub mbar: usize,
    /// Largest prefix-bit count of a table consulted by the search.
    pub p_used: Option<usize>,
    pub root_lb: Option<i64>,
    pub root_ub: Option<i64>,
    /// `None` for an unbounded value.
    pub value: Option<i64>,
    pub optimal: bool,
    pub cpu_seconds: f64,
}

impl SearchStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

/// Result of a solve, in input indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub interdicted: Vec<usize>,
    /// Follower basis; `None` when the interdiction destroys every basis.
    pub basis: Option<Vec<usize>>,
    /// Objective value; `None` when the leader can destroy every basis.
    pub value: Option<i64>,
    pub cost: u64,
    pub proven_optimal: bool,
    pub rank_reducible: bool,
    pub stats: SearchStats,
}

pub fn solve_interdiction(inst: &Instance, cfg: &SolverConfig) -> Result<Solution> {
    solve_interdiction_with(inst, cfg, Hooks::default())
}

pub fn solve_blocker(inst: &Instance, target: i64, cfg: &SolverConfig) -> Result<Solution> {
    solve_blocker_with(inst, target, cfg, Hooks::default())
}

/// Smallest budget whose interdiction optimum reaches `target`, found by
/// bisection over the budget.
pub fn solve_blocker_by_bisection(inst: &Instance, target: i64, cfg: &SolverConfig) -> Result<Solution> {
    let at = |cap: u64| {
        let mut i = inst.clone();
        i.capacity = cap;
        solve_interdiction(&i, cfg)
    };
    let reaches = |s: &Solution| s.value.is_none_or(|v| v >= target);
    let first = at(0)?;
    if reaches(&first) {
        return Ok(first);
    }
    let finite: u64 = inst.costs.iter().filter(|&&c| c < inst.inf_cost).sum();
    let hi_cap = inst
        .matroid
        .min_cost_cocircuit(&inst.costs, None)
        .map_or(finite, |(_, c)| c.min(finite));
    let (mut lo, mut hi) = (0u64, hi_cap);
    let mut best = at(hi)?;
    if !reaches(&best) {
        return Err(Error::Unreachable(target));
    }
    let mut exact = first.proven_optimal && best.proven_optimal;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let s = at(mid)?;
        exact &= s.proven_optimal;
        if reaches(&s) {
            hi = mid;
            best = s;
        } else {
            lo = mid;
        }
    }
    best.proven_optimal = exact;
    Ok(best)
}

/// Minimizes, over affordable `X`, the heaviest basis containing `X`, by
/// interdiction on the dual matroid. `value = None` means the optimal `X`
/// is contained in no basis.
pub fn solve_inclusion_interdiction(raw: &RawInstance, cfg: &SolverConfig) -> Result<Solution> {
    let dual = RawInstance {
        matroid: raw.matroid.dual(raw.dual_graph.as_ref())?,
        weights: raw.weights.clone(),
        costs: raw.costs.clone(),
        capacity: raw.capacity,
        target: None,
        dual_graph: None,
    };
    let inst = dual.normalize()?;
    let mut sol = solve_interdiction(&inst, cfg)?;
    let total: i64 = raw.weights.iter().sum();
    sol.value = sol.value.map(|v| total - v);
    sol.basis = sol.basis.map(|b| {
        let mut inb = vec![false; raw.len()];
        b.iter().for_each(|&e| inb[e] = true);
        (0..raw.len()).filter(|&e| !inb[e]).collect()
    });
    sol.stats.value = sol.value;
    Ok(sol)
}

/// CPU time consumed by the calling thread.
pub fn thread_cpu_time() -> Duration {
    cpu_clock(libc::CLOCK_THREAD_CPUTIME_ID)
}

/// CPU time consumed by the whole process.
pub fn process_cpu_time() -> Duration {
    cpu_clock(libc::CLOCK_PROCESS_CPUTIME_ID)
}

fn cpu_clock(clock: libc::clockid_t) -> Duration {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid, writable timespec.
    let rc = unsafe { libc::clock_gettime(clock, &mut ts) };
    if rc != 0 {
        return Duration::ZERO;
    }
    Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32)
}
