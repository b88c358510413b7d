use super::{StateSpace, INF};
use crate::graph::{IncrementalFlow, UnionFindUndo, INF_CAP};
use crate::instance::Instance;
use crate::matroid::PartKind;

#[derive(Clone, Debug)]
struct GraphicPart {
    start: usize,
    end: usize,
    n: usize,
    /// Endpoints local to the part's vertex range.
    ends: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
enum PartData {
    Uniform { start: usize, end: usize, k: usize },
    Graphic(GraphicPart),
}

/// Evaluates the per-element gain bound `δ_p(i, r, s, mask)` for whole rows
/// at once. Costs and capacity are whatever the instance carries, so a
/// rounded instance yields the rounded bound.
#[derive(Clone, Debug)]
pub struct DeltaOracle {
    weights: Vec<i64>,
    costs: Vec<u64>,
    capacity: u64,
    part_of: Vec<usize>,
    parts: Vec<PartData>,
    p: usize,
    flow: Option<IncrementalFlow>,
    gbuf: Vec<i64>,
}

impl DeltaOracle {
    pub fn new(inst: &Instance, p: usize) -> Self {
        let m = &inst.matroid;
        let parts = m
            .parts()
            .iter()
            .map(|part| match &part.kind {
                PartKind::Uniform { k } => PartData::Uniform {
                    start: part.range.start,
                    end: part.range.end,
                    k: *k,
                },
                PartKind::Graphic { vertices } => PartData::Graphic(GraphicPart {
                    start: part.range.start,
                    end: part.range.end,
                    n: vertices.len(),
                    ends: part
                        .range
                        .clone()
                        .map(|e| {
                            let (u, v) = m.endpoints(e);
                            (u - vertices.start, v - vertices.start)
                        })
                        .collect(),
                }),
            })
            .collect();
        Self {
            weights: inst.weights.clone(),
            costs: inst.costs.clone(),
            capacity: inst.capacity,
            part_of: (0..inst.len()).map(|e| m.part_index(e)).collect(),
            parts,
            p: p.min(inst.len()),
            flow: None,
            gbuf: vec![0; inst.capacity as usize + 1],
        }
    }

    pub fn prefix_bits(&self) -> usize {
        self.p
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// Capacity left after paying for `mask`, or `None` if it is unaffordable.
    pub fn effective_capacity(&self, mask: usize) -> Option<u64> {
        let spent: u64 = (0..self.p).filter(|j| mask >> j & 1 == 1).map(|j| self.costs[j]).sum();
        self.capacity.checked_sub(spent)
    }

    /// Fills `out[s * (C + 1) + r]` with `δ_p(i, r, s, mask)` for every state
    /// and every `r`. States that cannot occur at `i` get [`INF`].
    pub fn fill(&mut self, space: &StateSpace, i: usize, mask: usize, out: &mut [i64]) {
        let stride = self.capacity as usize + 1;
        debug_assert_eq!(out.len(), space.num_states() * stride);
        let q = self.part_of[i];
        match &self.parts[q] {
            PartData::Uniform { start, end, k } => {
                let (start, end, k) = (*start, *end, *k);
                for (s, row) in out.chunks_exact_mut(stride).enumerate() {
                    let v = match space.local_count(q, s) {
                        None => INF,
                        Some(n) => uniform_delta(&self.weights[start..end], k, n, i - start),
                    };
                    row.fill(v);
                }
            }
            PartData::Graphic(_) => {
                let mut row = std::mem::take(&mut self.gbuf);
                match self.effective_capacity(mask) {
                    Some(ceff) => self.graphic_row(i, mask, ceff, &mut row),
                    None => row.fill(INF),
                }
                for (s, out_row) in out.chunks_exact_mut(stride).enumerate() {
                    if space.local_count(q, s).is_some() {
                        out_row.copy_from_slice(&row);
                    } else {
                        out_row.fill(INF);
                    }
                }
                self.gbuf = row;
            }
        }
    }

    /// Gain bound for a single cell; convenient for tests.
    pub fn value(&mut self, space: &StateSpace, i: usize, r: u64, s: usize, mask: usize) -> i64 {
        let stride = self.capacity as usize + 1;
        let mut out = vec![0; space.num_states() * stride];
        self.fill(space, i, mask, &mut out);
        out[s * stride + r as usize]
    }

    /// Alg. 1 on the part of edge `i`, with prefix edges in `mask` deleted
    /// and the other prefix edges made uncuttable.
    fn graphic_row(&mut self, i: usize, mask: usize, ceff: u64, row: &mut [i64]) {
        let PartData::Graphic(g) = &self.parts[self.part_of[i]] else {
            unreachable!()
        };
        let (u, v) = g.ends[i - g.start];
        if u == v {
            // a self-loop never enters a basis
            row.fill(0);
            return;
        }
        let wi = self.weights[i];
        row.fill(INF);

        let mut uf = UnionFindUndo::new(g.n);
        for j in i + 1..g.end {
            let (a, b) = g.ends[j - g.start];
            uf.union(a, b);
            if uf.same(u, v) {
                row.fill(self.weights[j] - wi);
                break;
            }
        }

        let mut flow = match self.flow.take() {
            Some(mut f) if f.num_vertices() == g.n => {
                f.reset(u, v);
                f
            }
            _ => IncrementalFlow::new(g.n, u, v),
        };
        for j in g.start..i {
            let cap = if j < self.p {
                if mask >> j & 1 == 1 {
                    continue;
                }
                None
            } else {
                Some(self.costs[j])
            };
            let (a, b) = g.ends[j - g.start];
            flow.add_edge(a, b, cap);
        }
        let ceff = ceff as i64;
        let limit = (ceff + 1).min(INF_CAP);
        let top = row.len();
        // rows [lo, top) are final; each later edge only lowers lo
        let threshold = |x: i64| ((ceff - x + 1).max(0) as usize).min(top);
        let x = flow.augment(limit);
        let mut lo = threshold(x);
        row[lo..].fill(0);
        if x <= ceff {
            for j in i + 1..g.end {
                let (a, b) = g.ends[j - g.start];
                flow.add_edge(a, b, None);
                let x = flow.augment(limit);
                let t = threshold(x);
                if t < lo {
                    let gain = self.weights[j] - wi;
                    for cell in &mut row[t..lo] {
                        *cell = (*cell).min(gain);
                    }
                    lo = t;
                }
                if x > ceff {
                    break;
                }
            }
        }
        self.flow = Some(flow);
    }
}

/// Exact gain of interdicting local element `li` (0-based) of a uniform part
/// of rank `k` after `n` earlier interdictions in the part.
#[inline]
fn uniform_delta(w: &[i64], k: usize, n: usize, li: usize) -> i64 {
    let m = w.len();
    if k + n <= li {
        0
    } else if k + n < m {
        w[k + n] - w[li]
    } else {
        INF
    }
}
