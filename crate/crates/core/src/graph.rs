//! Multigraph utilities: union-find with rollback, incremental max-flow and
//! minimum cuts.
//!
//! Vertices are `0..n`. Edge `j` of a [`Multigraph`] is matroid element `j`
//! of the graphic matroid built on it.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multigraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        Self { n, edges }
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Connectivity of `(V, {j : keep[j]})`; all edges when `keep` is `None`.
    pub fn is_connected(&self, keep: Option<&[bool]>) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut uf = UnionFindUndo::new(self.n);
        let mut merged = 0;
        for (j, &(u, v)) in self.edges.iter().enumerate() {
            if keep.is_none_or(|k| k[j]) && uf.union(u, v) {
                merged += 1;
            }
        }
        merged == self.n - 1
    }
}

/// Disjoint sets with union by size and no path compression, so that every
/// union (including a no-op union) can be undone in O(1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionFindUndo {
    parent: Vec<usize>,
    size: Vec<usize>,
    log: Vec<Option<(usize, usize)>>,
}

impl UnionFindUndo {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            log: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&self, mut a: usize) -> usize {
        while self.parent[a] != a {
            a = self.parent[a];
        }
        a
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Returns whether two distinct sets were merged. A no-op union is still
    /// logged so that `undo` always reverses exactly one call.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.log.push(None);
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.log.push(Some((rb, ra)));
        true
    }

    /// Reverses the most recent `union`.
    ///
    /// Panics if there is nothing to undo.
    pub fn undo(&mut self) {
        let entry = self.log.pop().expect("undo on empty union-find log");
        if let Some((child, root)) = entry {
            self.parent[child] = child;
            self.size[root] -= self.size[child];
        }
    }

    /// Number of logged unions.
    pub fn history_len(&self) -> usize {
        self.log.len()
    }

    pub fn rollback_to(&mut self, len: usize) {
        while self.log.len() > len {
            self.undo();
        }
    }
}

/// Capacity used for uncuttable arcs. Flow searches are always limited to a
/// finite target well below this, so sums never overflow.
pub const INF_CAP: i64 = i64::MAX / 4;

/// Max-flow on an undirected multigraph that supports adding edges after
/// flow has been pushed. Adding edges never invalidates a feasible flow, so
/// `augment` simply continues from the current residual network.
#[derive(Clone, Debug)]
pub struct IncrementalFlow {
    source: usize,
    sink: usize,
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    flow: Vec<i64>,
    value: i64,
    level: Vec<i32>,
    iter: Vec<usize>,
    queue: Vec<usize>,
}

impl IncrementalFlow {
    pub fn new(n: usize, source: usize, sink: usize) -> Self {
        assert_ne!(source, sink, "source and sink must differ");
        Self {
            source,
            sink,
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            flow: Vec::new(),
            value: 0,
            level: vec![-1; n],
            iter: vec![0; n],
            queue: Vec::with_capacity(n),
        }
    }

    /// Clears all edges and flow, keeping allocations.
    pub fn reset(&mut self, source: usize, sink: usize) {
        assert_ne!(source, sink, "source and sink must differ");
        self.source = source;
        self.sink = sink;
        for a in &mut self.adj {
            a.clear();
        }
        self.to.clear();
        self.cap.clear();
        self.flow.clear();
        self.value = 0;
    }

    /// Adds undirected edge `{u, v}`; `None` capacity means uncuttable.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: Option<u64>) {
        if u == v {
            return;
        }
        let c = cap.map_or(INF_CAP, |c| (c as i64).min(INF_CAP));
        let a = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.flow.push(0);
        self.to.push(u);
        self.cap.push(c);
        self.flow.push(0);
        self.adj[u].push(a);
        self.adj[v].push(a + 1);
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    /// Pushes flow until the value reaches `limit` or no augmenting path is
    /// left. Returns the current flow value.
    pub fn augment(&mut self, limit: i64) -> i64 {
        while self.value < limit && self.bfs() {
            self.iter.iter_mut().for_each(|x| *x = 0);
            loop {
                let want = limit - self.value;
                if want <= 0 {
                    break;
                }
                let pushed = self.dfs(self.source, want);
                if pushed == 0 {
                    break;
                }
                self.value += pushed;
            }
        }
        self.value
    }

    fn bfs(&mut self) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.queue.clear();
        self.level[self.source] = 0;
        self.queue.push(self.source);
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for &a in &self.adj[u] {
                let v = self.to[a];
                if self.level[v] < 0 && self.cap[a] - self.flow[a] > 0 {
                    self.level[v] = self.level[u] + 1;
                    self.queue.push(v);
                }
            }
        }
        self.level[self.sink] >= 0
    }

    fn dfs(&mut self, u: usize, want: i64) -> i64 {
        if u == self.sink {
            return want;
        }
        while self.iter[u] < self.adj[u].len() {
            let a = self.adj[u][self.iter[u]];
            let v = self.to[a];
            let residual = self.cap[a] - self.flow[a];
            if residual > 0 && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, want.min(residual));
                if got > 0 {
                    self.flow[a] += got;
                    self.flow[a ^ 1] -= got;
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    /// Vertices reachable from the source in the residual network.
    pub fn source_side(&self) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![self.source];
        seen[self.source] = true;
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let v = self.to[a];
                if !seen[v] && self.cap[a] - self.flow[a] > 0 {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    /// `None` when every separating edge set contains an uncuttable edge.
    pub value: Option<u64>,
    pub source_side: Vec<bool>,
}

impl Cut {
    /// Edges of `g` crossing the cut.
    pub fn crossing_edges(&self, g: &Multigraph, keep: Option<&[bool]>) -> Vec<usize> {
        g.edges
            .iter()
            .enumerate()
            .filter(|&(j, &(u, v))| {
                keep.is_none_or(|k| k[j]) && self.source_side[u] != self.source_side[v]
            })
            .map(|(j, _)| j)
            .collect()
    }
}

fn finite_sum(caps: &[Option<u64>]) -> u64 {
    caps.iter().flatten().fold(0u64, |a, &c| a.saturating_add(c))
}

/// Minimum `s`-`t` cut. Edges whose capacity is `None` are never cut; those
/// with `keep[j] == false` are absent.
pub fn min_st_cut(
    g: &Multigraph,
    caps: &[Option<u64>],
    keep: Option<&[bool]>,
    s: usize,
    t: usize,
) -> Cut {
    // Any cut of value above the finite total must use an uncuttable edge.
    let sentinel = finite_sum(caps).saturating_add(1).min(INF_CAP as u64 - 1) as i64;
    let mut flow = IncrementalFlow::new(g.n, s, t);
    for (j, &(u, v)) in g.edges.iter().enumerate() {
        if keep.is_none_or(|k| k[j]) {
            flow.add_edge(u, v, caps[j]);
        }
    }
    let value = flow.augment(sentinel);
    Cut {
        value: (value < sentinel).then_some(value as u64),
        source_side: flow.source_side(),
    }
}

/// Global minimum cut by `n - 1` max-flow computations from vertex 0.
pub fn global_min_cut(g: &Multigraph, caps: &[Option<u64>], keep: Option<&[bool]>) -> Cut {
    assert!(g.n >= 2, "global cut needs at least two vertices");
    let mut best: Option<Cut> = None;
    for t in 1..g.n {
        let cut = min_st_cut(g, caps, keep, 0, t);
        let better = match (&best, cut.value) {
            (None, _) => true,
            (Some(b), Some(v)) => b.value.is_none_or(|bv| v < bv),
            (Some(_), None) => false,
        };
        if better {
            best = Some(cut);
        }
        if best.as_ref().and_then(|b| b.value) == Some(0) {
            break;
        }
    }
    best.expect("n >= 2")
}
