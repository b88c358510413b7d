use std::io::{Read, Write};
use std::path::Path;

use super::{add_gain, round_costs, DeltaOracle, StateSpace, INF};
use crate::error::{Error, Result};
use crate::instance::Instance;

const MAGIC: &[u8; 5] = b"MIBT1";

/// Materialized `f_p`. Layout is row `i`, then prefix mask, then state,
/// then remaining capacity `r`, so one query is one lookup.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundTable {
    m: usize,
    cap: u64,
    k: u64,
    p: usize,
    space: StateSpace,
    part_of: Vec<usize>,
    /// Costs after rounding by `k`; queries pass `r` in these units.
    costs: Vec<u64>,
    row_offset: Vec<usize>,
    values: Vec<i64>,
}

fn masks_at(i: usize, p: usize) -> usize {
    1 << i.min(p)
}

fn layout(m: usize, p: usize, states: usize, cap: u64) -> (Vec<usize>, u128) {
    let block = states as u128 * (cap as u128 + 1);
    let mut offsets = Vec::with_capacity(m);
    let mut total: u128 = 0;
    for i in 0..m {
        offsets.push(total.min(usize::MAX as u128) as usize);
        total += masks_at(i, p) as u128 * block;
    }
    (offsets, total)
}

/// Bytes a table with these dimensions occupies.
pub fn table_bytes(inst: &Instance, p: usize, k: u64) -> u128 {
    let space = StateSpace::for_matroid(&inst.matroid);
    let cap = inst.capacity.div_ceil(k);
    layout(inst.len(), p.min(inst.len()), space.num_states(), cap).1 * 8
}

impl BoundTable {
    fn empty(inst: &Instance, p: usize, k: u64, budget: u128) -> Result<Self> {
        let rounded = round_costs(inst, k);
        let space = StateSpace::for_matroid(&inst.matroid);
        let p = p.min(inst.len());
        let (row_offset, cells) = layout(inst.len(), p, space.num_states(), rounded.capacity);
        let needed = cells * 8;
        if needed > budget {
            return Err(Error::MemoryBudget { needed, budget });
        }
        Ok(Self {
            m: inst.len(),
            cap: rounded.capacity,
            k,
            p,
            part_of: (0..inst.len()).map(|e| inst.matroid.part_index(e)).collect(),
            space,
            costs: rounded.costs,
            row_offset,
            values: vec![INF; cells as usize],
        })
    }

    pub fn prefix_bits(&self) -> usize {
        self.p
    }

    pub fn rounding(&self) -> u64 {
        self.k
    }

    /// Capacity in rounded units.
    pub fn capacity(&self) -> u64 {
        self.cap
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn rounded_cost(&self, e: usize) -> u64 {
        self.costs[e]
    }

    pub fn num_states(&self) -> usize {
        self.space.num_states()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    fn index(&self, i: usize, mask: usize, s: usize, r: u64) -> usize {
        let stride = self.cap as usize + 1;
        self.row_offset[i] + (mask * self.space.num_states() + s) * stride + r as usize
    }

    /// `f_p(i, r, s, mask)` with `r` in rounded units; `mask` holds the
    /// interdicted elements among the first `min(i, p)`.
    #[inline]
    pub fn get(&self, i: usize, mask: usize, s: usize, r: u64) -> i64 {
        if i >= self.m {
            return 0;
        }
        debug_assert!(mask < masks_at(i, self.p));
        self.values[self.index(i, mask, s, r.min(self.cap))]
    }

    /// `f_p(1, C, φ(∅), ∅)`.
    pub fn root(&self) -> i64 {
        self.get(0, 0, self.space.initial(), self.cap)
    }

    /// Prefix mask of an interdiction set.
    pub fn mask_of(&self, x: &[usize]) -> usize {
        x.iter().filter(|&&e| e < self.p).fold(0, |m, &e| m | 1 << e)
    }

    /// Bound on the further gain for a node whose interdictions are `x`, all
    /// below `i`.
    pub fn bound_for(&self, i: usize, x: &[usize]) -> i64 {
        let spent: u64 = x.iter().map(|&e| self.costs[e]).sum();
        match self.cap.checked_sub(spent) {
            None => INF,
            Some(r) => {
                let mut sorted = x.to_vec();
                sorted.sort_unstable();
                let s = sorted.iter().fold(self.space.initial(), |s, &e| {
                    self.space.transition(self.part_of[e], s)
                });
                self.get(i, self.mask_of(x), s, r)
            }
        }
    }

    /// Fills row `i`, prefix `mask` from row `i + 1`.
    fn fill_block(&mut self, oracle: &mut DeltaOracle, delta: &mut [i64], i: usize, mask: usize) {
        let stride = self.cap as usize + 1;
        let states = self.space.num_states();
        let base = self.index(i, mask, 0, 0);
        if oracle.effective_capacity(mask).is_none() {
            self.values[base..base + states * stride].fill(INF);
            return;
        }
        oracle.fill(&self.space, i, mask, delta);
        let ci = self.costs[i];
        let next_mask = if i < self.p { mask | 1 << i } else { mask };
        let part = self.part_of[i];
        for s in 0..states {
            let t = self.space.transition(part, s);
            for r in 0..=self.cap {
                let skip = self.get(i + 1, mask, s, r);
                let val = if ci <= r {
                    let d = delta[s * stride + r as usize];
                    skip.max(add_gain(self.get(i + 1, next_mask, t, r - ci), d))
                } else {
                    skip
                };
                self.values[base + s * stride + r as usize] = val;
            }
        }
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        for h in [self.m as u64, self.cap, self.k, self.p as u64, self.num_states() as u64] {
            w.write_all(&h.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    /// Reads a table written for `inst`; the header must match the
    /// instance's dimensions.
    pub fn read_from(r: &mut impl Read, inst: &Instance) -> Result<Self> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Cache("wrong magic".into()));
        }
        let mut header = [0u64; 5];
        for h in &mut header {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            *h = u64::from_le_bytes(b);
        }
        let [m, cap, k, p, states] = header;
        if k == 0 {
            return Err(Error::Cache("rounding factor 0".into()));
        }
        let expect = (
            inst.len(),
            inst.capacity.div_ceil(k),
            StateSpace::for_matroid(&inst.matroid).num_states(),
        );
        if (m as usize, cap, states as usize) != expect || p > m {
            return Err(Error::Cache(format!(
                "header (m={m}, C={cap}, K={k}, p={p}, T={states}) does not match the instance"
            )));
        }
        let mut table = Self::empty(inst, p as usize, k, u128::MAX)?;
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() != table.values.len() * 8 {
            return Err(Error::Cache(format!(
                "expected {} values, found {} bytes",
                table.values.len(),
                buf.len()
            )));
        }
        for (v, chunk) in table.values.iter_mut().zip(buf.chunks_exact(8)) {
            *v = i64::from_le_bytes(chunk.try_into().unwrap());
        }
        Ok(table)
    }

    pub fn load(path: &Path, inst: &Instance) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f, inst)
    }
}

/// Builds `f_p` in one go.
pub fn build_table(inst: &Instance, p: usize, k: u64, budget: u128) -> Result<BoundTable> {
    let mut b = TableBuilder::new(inst, k, p, p, budget);
    match b.step(&mut || false) {
        Step::Finished(t) => Ok(t),
        Step::Exhausted(Some(e)) => Err(e),
        Step::Exhausted(None) | Step::Paused => unreachable!("an unpaused build of one level finishes"),
    }
}

pub enum Step {
    Finished(BoundTable),
    Paused,
    /// No more levels: either `p_max` was reached or the next level does not
    /// fit the memory budget.
    Exhausted(Option<Error>),
}

struct Partial {
    table: BoundTable,
    oracle: DeltaOracle,
    /// Next row to fill; rows above it are complete.
    row: usize,
    mask: usize,
}

/// Builds `f_0, f_1, …` in turn and can stop between `(i, mask)` blocks.
pub struct TableBuilder {
    inst: Instance,
    k: u64,
    next_p: usize,
    p_max: usize,
    budget: u128,
    current: Option<Partial>,
    delta: Vec<i64>,
}

impl TableBuilder {
    pub fn new(inst: &Instance, k: u64, p_min: usize, p_max: usize, budget: u128) -> Self {
        let p_max = p_max.min(inst.len());
        Self {
            inst: inst.clone(),
            k: k.max(1),
            next_p: p_min.min(p_max),
            p_max,
            budget,
            current: None,
            delta: Vec::new(),
        }
    }

    /// Works until a level completes, `pause()` returns true, or no level is
    /// left. `pause` is polled between blocks and before a level is allocated.
    pub fn step(&mut self, pause: &mut dyn FnMut() -> bool) -> Step {
        if self.current.is_none() {
            if self.next_p > self.p_max {
                return Step::Exhausted(None);
            }
            if pause() {
                return Step::Paused;
            }
            let table = match BoundTable::empty(&self.inst, self.next_p, self.k, self.budget) {
                Ok(t) => t,
                Err(e) => {
                    self.next_p = self.p_max + 1;
                    return Step::Exhausted(Some(e));
                }
            };
            let rounded = round_costs(&self.inst, self.k);
            self.delta = vec![0; table.num_states() * (table.cap as usize + 1)];
            self.current = Some(Partial {
                oracle: DeltaOracle::new(&rounded, table.p),
                row: table.m,
                mask: 0,
                table,
            });
        }
        let cur = self.current.as_mut().unwrap();
        loop {
            if cur.mask == 0 {
                if cur.row == 0 {
                    break;
                }
                cur.row -= 1;
                cur.mask = masks_at(cur.row, cur.table.p);
            }
            cur.mask -= 1;
            cur.table.fill_block(&mut cur.oracle, &mut self.delta, cur.row, cur.mask);
            if cur.mask == 0 && cur.row == 0 {
                break;
            }
            if pause() {
                return Step::Paused;
            }
        }
        self.next_p += 1;
        Step::Finished(self.current.take().unwrap().table)
    }
}
