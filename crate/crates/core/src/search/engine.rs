use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use super::dyn_interdict::DynInterdict;
use super::greedy::greedy_lower_bound;
use super::preprocess::{rank_reducing_set, reduce, unreduced, Reduced};
use super::{thread_cpu_time, Mode, SearchStats, Solution, SolverConfig};
use crate::bounds::{add_gain, BoundTable, StateSpace, Step, TableBuilder, INF};
use crate::error::{Error, Result};
use crate::instance::Instance;

const STACK_BYTES: usize = 512 << 20;
const FIRST_SLICE: Duration = Duration::from_millis(10);
const MAX_PREFIX_BITS: usize = 40;

/// Callbacks for observing a run. Sets are reported in input indices.
#[derive(Default)]
pub struct Hooks<'a> {
    pub on_node: Option<&'a mut (dyn FnMut(&[usize]) + Send)>,
    pub on_incumbent: Option<&'a mut (dyn FnMut(Option<i64>, u64) + Send)>,
}

struct Shared {
    generation: AtomicUsize,
    table: Mutex<Option<Arc<BoundTable>>>,
    stop: AtomicBool,
}

struct Interleave {
    builder: TableBuilder,
    slice: Duration,
    switch_at: Instant,
    done: bool,
}

enum Source {
    None,
    Fixed,
    Shared { shared: Arc<Shared>, seen: usize },
    Interleaved(Box<Interleave>),
}

struct Reader {
    source: Source,
    table: Option<Arc<BoundTable>>,
    deadline: Option<Instant>,
}

impl Reader {
    fn refresh(&mut self) {
        if let Source::Shared { shared, seen } = &mut self.source {
            let g = shared.generation.load(Ordering::Acquire);
            if g != *seen {
                *seen = g;
                self.table = shared.table.lock().unwrap().clone();
            }
        }
    }

    /// Gives the interleaved builder its slice when the search slice is over.
    fn tick(&mut self) {
        let Source::Interleaved(il) = &mut self.source else { return };
        if il.done || Instant::now() < il.switch_at {
            return;
        }
        let end = Instant::now() + il.slice;
        let end = self.deadline.map_or(end, |d| d.min(end));
        loop {
            match il.builder.step(&mut || Instant::now() >= end) {
                Step::Finished(t) => self.table = Some(Arc::new(t)),
                Step::Paused => break,
                Step::Exhausted(_) => {
                    il.done = true;
                    break;
                }
            }
            if Instant::now() >= end {
                break;
            }
        }
        il.slice *= 2;
        il.switch_at = Instant::now() + il.slice;
    }
}

fn publish(shared: &Shared, t: BoundTable) {
    *shared.table.lock().unwrap() = Some(Arc::new(t));
    shared.generation.fetch_add(1, Ordering::Release);
}

enum Goal {
    Interdict {
        cap: u64,
        best: i64,
        witness: Option<Vec<usize>>,
    },
    Blocker {
        target: i64,
        best_cost: u64,
    },
}

struct Engine<'a, 'h> {
    inst: &'a Instance,
    useful: &'a [bool],
    last_useful: Option<usize>,
    suffix_min: Vec<u64>,
    space: StateSpace,
    k: u64,
    d: DynInterdict,
    states: Vec<usize>,
    xbits: u64,
    reader: Reader,
    goal: Goal,
    best_x: Vec<usize>,
    best_y: Option<Vec<usize>>,
    nodes: u64,
    prunes: u64,
    p_used: Option<usize>,
    deadline: Option<Instant>,
    timed_out: bool,
    halt: bool,
    hooks: Hooks<'h>,
}

impl Engine<'_, '_> {
    fn bound(&mut self, e: usize, r: u64) -> i64 {
        self.reader.refresh();
        let Some(t) = self.reader.table.as_deref() else { return INF };
        let p = t.prefix_bits();
        self.p_used = self.p_used.max(Some(p));
        let mask = if p == 0 { 0 } else { (self.xbits & ((1u64 << p) - 1)) as usize };
        t.get(e, mask, *self.states.last().unwrap(), r)
    }

    fn count(&mut self) {
        self.nodes += 1;
        if self.nodes & 0xFF == 0 {
            self.reader.tick();
        }
        if self.nodes & 0x3FFF == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
            self.halt = true;
        }
        if let Some(h) = self.hooks.on_node.as_mut() {
            h(&self.inst.to_original(self.d.interdicted()));
        }
    }

    fn take(&mut self, e: usize) {
        let s = *self.states.last().unwrap();
        self.states.push(self.space.transition(self.inst.matroid.part_index(e), s));
        if e < 64 {
            self.xbits |= 1 << e;
        }
    }

    fn untake(&mut self, e: usize) {
        self.states.pop();
        if e < 64 {
            self.xbits &= !(1 << e);
        }
    }

    fn record(&mut self) {
        self.best_x = self.inst.to_original(self.d.interdicted());
        self.best_y = Some(self.inst.to_original(&self.d.basis()));
        if let Some(h) = self.hooks.on_incumbent.as_mut() {
            h(Some(self.d.weight()), self.d.cost());
        }
    }

    fn interdict_node(&mut self, i: usize) {
        if self.halt {
            return;
        }
        self.count();
        let Goal::Interdict { cap, best, .. } = self.goal else { unreachable!() };
        let w = self.d.weight();
        let mut best = best;
        if w > best {
            best = w;
            if let Goal::Interdict { best: b, .. } = &mut self.goal {
                *b = w;
            }
            self.record();
        }
        let Some(e) = self.d.cursor() else { return };
        let residual = cap - self.d.cost();
        if i == self.inst.rank() || self.last_useful.is_none_or(|l| e > l) || self.suffix_min[e] > residual {
            return;
        }
        let b = self.bound(e, residual / self.k);
        if b != INF && add_gain(b, w) <= best {
            self.prunes += 1;
            return;
        }
        if self.useful[e] && self.inst.costs[e] <= residual {
            if !self.d.interdict(self.inst) {
                let mut x = self.d.interdicted().to_vec();
                x.push(e);
                if let Goal::Interdict { witness, .. } = &mut self.goal {
                    *witness = Some(x);
                }
                self.halt = true;
                return;
            }
            self.take(e);
            self.interdict_node(i);
            self.untake(e);
            if self.halt {
                return;
            }
            self.d.uninterdict(self.inst);
        }
        self.d.skip(self.inst);
        self.interdict_node(i + 1);
        if self.halt {
            return;
        }
        self.d.unskip();
    }

    fn blocker_node(&mut self, i: usize) {
        if self.halt {
            return;
        }
        self.count();
        let Goal::Blocker { target, best_cost } = self.goal else { unreachable!() };
        let w = self.d.weight();
        let cx = self.d.cost();
        if w >= target {
            if cx <= best_cost {
                self.goal = Goal::Blocker { target, best_cost: cx };
                self.record();
            }
            return;
        }
        let Some(e) = self.d.cursor() else { return };
        if i == self.inst.rank() || self.last_useful.is_none_or(|l| e > l) || cx >= best_cost {
            return;
        }
        let room = best_cost - 1 - cx;
        if self.suffix_min[e] > room {
            return;
        }
        let b = self.bound(e, room / self.k);
        if b != INF && add_gain(b, w) < target {
            self.prunes += 1;
            return;
        }
        if self.useful[e] && self.inst.costs[e] <= room && self.d.interdict(self.inst) {
            self.take(e);
            self.blocker_node(i);
            self.untake(e);
            if self.halt {
                return;
            }
            self.d.uninterdict(self.inst);
        }
        self.d.skip(self.inst);
        self.blocker_node(i + 1);
        if self.halt {
            return;
        }
        self.d.unskip();
    }
}

/// Minimum cost over useful elements at or after each index.
fn suffix_min(inst: &Instance, useful: &[bool]) -> Vec<u64> {
    let mut out = vec![u64::MAX; inst.len() + 1];
    for e in (0..inst.len()).rev() {
        out[e] = out[e + 1];
        if useful[e] {
            out[e] = out[e].min(inst.costs[e]);
        }
    }
    out
}

/// Instance the tables are built on: elements the search never interdicts
/// become unaffordable, which keeps the bounds valid and tightens them.
fn bound_instance(red: &Reduced, cap: u64) -> Instance {
    let mut b = red.inst.clone();
    b.capacity = cap;
    let big = cap.saturating_add(1);
    for (e, c) in b.costs.iter_mut().enumerate() {
        if !red.useful[e] {
            *c = big;
        }
    }
    b
}

struct Outcome {
    goal: Goal,
    best_x: Vec<usize>,
    best_y: Option<Vec<usize>>,
    stats: SearchStats,
    timed_out: bool,
}

/// Runs the search over `red` with the configured bound schedule.
fn run(
    red: &Reduced,
    cap: u64,
    goal: Goal,
    incumbent: (Vec<usize>, Option<Vec<usize>>),
    cfg: &SolverConfig,
    hooks: Hooks<'_>,
    deadline: Option<Instant>,
) -> Outcome {
    let inst = &red.inst;
    let k = cfg.round_k.max(1);
    let p_max = cfg.max_prefix_bits.min(MAX_PREFIX_BITS);
    let binst = bound_instance(red, cap);
    let mut builder_cpu = Duration::ZERO;
    let mut source = Source::None;
    let mut table = None;
    let mut handle = None;
    let shared = Arc::new(Shared {
        generation: AtomicUsize::new(0),
        table: Mutex::new(None),
        stop: AtomicBool::new(false),
    });
    let blocker = matches!(goal, Goal::Blocker { .. });
    match cfg.mode {
        Mode::NoBounds => {}
        Mode::BoundsFirst => {
            let mut b = TableBuilder::new(&binst, k, 0, p_max, cfg.memory_budget);
            while let Step::Finished(t) = b.step(&mut || deadline.is_some_and(|d| Instant::now() >= d)) {
                table = Some(Arc::new(t));
            }
            source = Source::Fixed;
        }
        Mode::Interleaved => {
            source = Source::Interleaved(Box::new(Interleave {
                builder: TableBuilder::new(&binst, k, 0, p_max, cfg.memory_budget),
                slice: FIRST_SLICE,
                switch_at: Instant::now() + FIRST_SLICE,
                done: false,
            }));
        }
        Mode::Parallel => {
            let sh = Arc::clone(&shared);
            let budget = cfg.memory_budget;
            let binst = binst.clone();
            handle = Some(std::thread::spawn(move || {
                let mut b = TableBuilder::new(&binst, k, 0, p_max, budget);
                let stop = &sh.stop;
                while let Step::Finished(t) = b.step(&mut || stop.load(Ordering::Relaxed)) {
                    publish(&sh, t);
                }
                thread_cpu_time()
            }));
            source = Source::Shared {
                shared: Arc::clone(&shared),
                seen: 0,
            };
        }
    }
    let useful = &red.useful;
    let space = StateSpace::for_matroid(&inst.matroid);
    let initial = space.initial();
    let mut eng = Engine {
        inst,
        useful,
        last_useful: red.last_useful,
        suffix_min: suffix_min(inst, useful),
        space,
        k,
        d: DynInterdict::new(inst),
        states: vec![initial],
        xbits: 0,
        reader: Reader {
            source,
            table,
            deadline,
        },
        goal,
        best_x: incumbent.0,
        best_y: incumbent.1,
        nodes: 0,
        prunes: 0,
        p_used: None,
        deadline,
        timed_out: false,
        halt: false,
        hooks,
    };
    if blocker {
        eng.blocker_node(0);
    } else {
        eng.interdict_node(0);
    }
    if let Some(h) = handle {
        shared.stop.store(true, Ordering::Relaxed);
        builder_cpu = h.join().expect("bound builder panicked");
        eng.reader.refresh();
    }
    let root_ub = eng.reader.table.as_deref().and_then(|t| match t.root() {
        INF => None,
        g => inst.value(&[]).map(|f| f.saturating_add(g)),
    });
    let stats = SearchStats {
        nodes: eng.nodes,
        prunes: eng.prunes,
        mbar: red.last_useful.map_or(0, |e| e + 1),
        p_used: eng.p_used,
        root_ub,
        cpu_seconds: builder_cpu.as_secs_f64(),
        ..SearchStats::default()
    };
    Outcome {
        goal: eng.goal,
        best_x: eng.best_x,
        best_y: eng.best_y,
        stats,
        timed_out: eng.timed_out,
    }
}

/// Runs `f` on a thread with a large stack and adds that thread's CPU time
/// to the reported statistics.
fn on_big_stack<'h>(f: impl FnOnce() -> Result<Solution> + Send + 'h) -> Result<Solution> {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, || {
                let start = thread_cpu_time();
                let mut sol = f()?;
                sol.stats.cpu_seconds += (thread_cpu_time() - start).as_secs_f64();
                Ok(sol)
            })
            .expect("spawn search thread")
            .join()
            .expect("search thread panicked")
    })
}

fn with_free(inst: &Instance, mut x: Vec<usize>) -> Vec<usize> {
    x.extend_from_slice(&inst.free);
    x.sort_unstable();
    x.dedup();
    x
}

fn rank_reducible(inst: &Instance, witness: Vec<usize>, proven: bool) -> Solution {
    let cost = inst.cost(&inst.from_original(&witness));
    Solution {
        interdicted: with_free(inst, witness),
        basis: None,
        value: None,
        cost,
        proven_optimal: proven,
        rank_reducible: true,
        stats: SearchStats {
            optimal: proven,
            ..SearchStats::default()
        },
    }
}

fn deadline(cfg: &SolverConfig) -> Option<Instant> {
    cfg.time_limit.map(|t| Instant::now() + t)
}

/// Interdiction with optional observation hooks.
pub fn solve_interdiction_with(inst: &Instance, cfg: &SolverConfig, hooks: Hooks<'_>) -> Result<Solution> {
    let deadline = deadline(cfg);
    on_big_stack(move || {
        if inst.free_reduces_rank {
            return Ok(rank_reducible(inst, Vec::new(), true));
        }
        let red = if cfg.preprocess {
            if let Some((x, _)) = rank_reducing_set(inst) {
                return Ok(rank_reducible(inst, inst.to_original(&x), true));
            }
            reduce(inst, inst.capacity)
        } else {
            unreduced(inst)
        };
        let r = &red.inst;
        let (x0, v0) = if cfg.greedy {
            greedy_lower_bound(r)
        } else {
            (Vec::new(), r.value(&[]))
        };
        let v0 = v0.ok_or_else(|| Error::InvalidInstance("ground set has no basis".into()))?;
        let y0 = r.lex_min_basis(&x0).map(|y| r.to_original(&y));
        let goal = Goal::Interdict {
            cap: inst.capacity,
            best: v0,
            witness: None,
        };
        let out = run(&red, inst.capacity, goal, (r.to_original(&x0), y0), cfg, hooks, deadline);
        let Goal::Interdict { best, witness, .. } = out.goal else { unreachable!() };
        if let Some(w) = witness {
            let mut sol = rank_reducible(inst, r.to_original(&w), true);
            sol.stats = SearchStats { optimal: true, ..out.stats };
            return Ok(sol);
        }
        let optimal = !out.timed_out;
        let cost = r.cost(&r.from_original(&out.best_x));
        Ok(Solution {
            interdicted: with_free(inst, out.best_x),
            basis: out.best_y,
            value: Some(best),
            cost,
            proven_optimal: optimal,
            rank_reducible: false,
            stats: SearchStats {
                root_lb: Some(v0),
                value: Some(best),
                optimal,
                ..out.stats
            },
        })
    })
}

/// Minimum-cost blocker with optional observation hooks.
pub fn solve_blocker_with(inst: &Instance, target: i64, cfg: &SolverConfig, hooks: Hooks<'_>) -> Result<Solution> {
    let deadline = deadline(cfg);
    on_big_stack(move || {
        let trivial = |value: Option<i64>, basis: Option<Vec<usize>>| Solution {
            interdicted: with_free(inst, Vec::new()),
            basis,
            value,
            cost: 0,
            proven_optimal: true,
            rank_reducible: value.is_none(),
            stats: SearchStats {
                value,
                optimal: true,
                ..SearchStats::default()
            },
        };
        if inst.free_reduces_rank {
            return Ok(trivial(None, None));
        }
        let f0 = inst.value(&[]).ok_or_else(|| Error::InvalidInstance("ground set has no basis".into()))?;
        if f0 >= target {
            let y = inst.lex_min_basis(&[]).map(|y| inst.to_original(&y));
            return Ok(trivial(Some(f0), y));
        }
        let (cut, c0) = inst
            .matroid
            .min_cost_cocircuit(&inst.costs, None)
            .ok_or(Error::Unreachable(target))?;
        let finite: u64 = inst.costs.iter().filter(|&&c| c < inst.inf_cost).sum();
        let cap = (c0 - 1).min(finite);
        let mut work = inst.clone();
        work.capacity = cap;
        let red = if cfg.preprocess { reduce(&work, cap) } else { unreduced(&work) };
        let goal = Goal::Blocker { target, best_cost: c0 };
        let out = run(&red, cap, goal, (inst.to_original(&cut), None), cfg, hooks, deadline);
        let Goal::Blocker { best_cost, .. } = out.goal else { unreachable!() };
        // only sets with an uninterdictable element reach the target
        if best_cost >= inst.inf_cost && !out.timed_out {
            return Err(Error::Unreachable(target));
        }
        let optimal = !out.timed_out;
        let value = out.best_y.as_ref().map(|y| inst.weight(&inst.from_original(y)));
        Ok(Solution {
            interdicted: with_free(inst, out.best_x),
            rank_reducible: value.is_none(),
            basis: out.best_y,
            value,
            cost: best_cost,
            proven_optimal: optimal,
            stats: SearchStats {
                root_lb: Some(f0),
                value,
                optimal,
                ..out.stats
            },
        })
    })
}
