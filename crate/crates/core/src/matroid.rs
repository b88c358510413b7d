//! Matroid descriptions and the oracles built on them.
//!
//! [`MatroidSpec`] is the user-facing description over input indices.
//! [`Matroid`] is the normalized form the solver works with: a direct sum of
//! uniform and graphic parts, each occupying a contiguous index range. A
//! partition matroid becomes one uniform part per block.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{global_min_cut, Multigraph, UnionFindUndo};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub elements: Vec<usize>,
    pub cap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatroidSpec {
    Uniform { m: usize, k: usize },
    Partition { blocks: Vec<Block> },
    /// Element `j` is edge `j` of the graph.
    Graphic { graph: Multigraph },
    /// Part `t` owns the contiguous index range following part `t - 1`.
    DirectSum { parts: Vec<MatroidSpec> },
}

impl MatroidSpec {
    pub fn len(&self) -> usize {
        match self {
            MatroidSpec::Uniform { m, .. } => *m,
            MatroidSpec::Partition { blocks } => blocks.iter().map(|b| b.elements.len()).sum(),
            MatroidSpec::Graphic { graph } => graph.num_edges(),
            MatroidSpec::DirectSum { parts } => parts.iter().map(|p| p.len()).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MatroidSpec::Uniform { m, k } => {
                if k > m {
                    return Err(Error::InvalidMatroid(format!("uniform rank {k} exceeds {m} elements")));
                }
            }
            MatroidSpec::Partition { blocks } => {
                let m = self.len();
                let mut seen = vec![false; m];
                for (b, block) in blocks.iter().enumerate() {
                    if block.cap > block.elements.len() {
                        return Err(Error::InvalidMatroid(format!(
                            "block {} has cap {} above its size {}",
                            b + 1,
                            block.cap,
                            block.elements.len()
                        )));
                    }
                    for &e in &block.elements {
                        if e >= m || std::mem::replace(&mut seen[e], true) {
                            return Err(Error::InvalidMatroid(format!(
                                "blocks must partition 0..{m}; element {e} is out of range or repeated"
                            )));
                        }
                    }
                }
            }
            MatroidSpec::Graphic { graph } => {
                if let Some(&(u, v)) = graph.edges.iter().find(|&&(u, v)| u >= graph.n || v >= graph.n) {
                    return Err(Error::InvalidMatroid(format!(
                        "edge ({u},{v}) references a vertex outside 0..{}",
                        graph.n
                    )));
                }
                if !graph.is_connected(None) {
                    return Err(Error::Disconnected);
                }
            }
            MatroidSpec::DirectSum { parts } => {
                for p in parts {
                    p.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Independence oracle on input indices.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        match self {
            MatroidSpec::Uniform { k, .. } => set.len() <= *k,
            MatroidSpec::Partition { blocks } => {
                let mut block_of = vec![0; self.len()];
                for (b, block) in blocks.iter().enumerate() {
                    for &e in &block.elements {
                        block_of[e] = b;
                    }
                }
                let mut used = vec![0; blocks.len()];
                for &e in set {
                    used[block_of[e]] += 1;
                }
                used.iter().zip(blocks).all(|(&u, b)| u <= b.cap)
            }
            MatroidSpec::Graphic { graph } => {
                let mut uf = UnionFindUndo::new(graph.n);
                set.iter().all(|&e| {
                    let (u, v) = graph.edges[e];
                    uf.union(u, v)
                })
            }
            MatroidSpec::DirectSum { parts } => {
                let mut offset = 0;
                parts.iter().all(|p| {
                    let range = offset..offset + p.len();
                    offset = range.end;
                    let local: Vec<usize> = set
                        .iter()
                        .filter(|e| range.contains(e))
                        .map(|e| e - range.start)
                        .collect();
                    p.is_independent(&local)
                })
            }
        }
    }

    /// Size of a maximal independent subset of `set`, built greedily.
    pub fn rank(&self, set: &[usize]) -> usize {
        let mut chosen = Vec::with_capacity(set.len());
        for &e in set {
            chosen.push(e);
            if !self.is_independent(&chosen) {
                chosen.pop();
            }
        }
        chosen.len()
    }

    pub fn full_rank(&self) -> usize {
        self.rank(&(0..self.len()).collect::<Vec<_>>())
    }

    /// The dual matroid, with identical element indexing.
    ///
    /// Partition and uniform matroids dualize by complementing caps. A
    /// graphic matroid needs the caller to supply a planar dual graph whose
    /// edge `j` corresponds to primal edge `j`.
    pub fn dual(&self, dual_graph: Option<&Multigraph>) -> Result<MatroidSpec> {
        match self {
            MatroidSpec::Uniform { m, k } => Ok(MatroidSpec::Uniform { m: *m, k: m - k }),
            MatroidSpec::Partition { blocks } => Ok(MatroidSpec::Partition {
                blocks: blocks
                    .iter()
                    .map(|b| Block {
                        elements: b.elements.clone(),
                        cap: b.elements.len() - b.cap,
                    })
                    .collect(),
            }),
            MatroidSpec::Graphic { graph } => {
                let dual = dual_graph.ok_or(Error::Unsupported("graphic dual requires a supplied dual graph"))?;
                if dual.num_edges() != graph.num_edges() {
                    return Err(Error::InvalidMatroid(format!(
                        "dual graph has {} edges, primal has {}",
                        dual.num_edges(),
                        graph.num_edges()
                    )));
                }
                Ok(MatroidSpec::Graphic { graph: dual.clone() })
            }
            MatroidSpec::DirectSum { parts } => {
                if parts.iter().any(|p| matches!(p, MatroidSpec::Graphic { .. })) {
                    return Err(Error::Unsupported("dual of a direct sum with graphic parts"));
                }
                Ok(MatroidSpec::DirectSum {
                    parts: parts.iter().map(|p| p.dual(None)).collect::<Result<_>>()?,
                })
            }
        }
    }

    /// Cheapest set meeting every basis, on input indices. `None` when the
    /// matroid has rank zero (no such set exists).
    pub fn min_cost_cocircuit(&self, costs: &[u64]) -> Result<Option<(Vec<usize>, u64)>> {
        self.validate()?;
        let (m, perm) = Matroid::from_spec(self, |_| true, |e| e as i64)?;
        let permuted: Vec<u64> = perm.iter().map(|&e| costs[e]).collect();
        Ok(m
            .min_cost_cocircuit(&permuted, None)
            .map(|(set, cost)| {
                let mut orig: Vec<usize> = set.into_iter().map(|e| perm[e]).collect();
                orig.sort_unstable();
                (orig, cost)
            }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartKind {
    Uniform { k: usize },
    /// Endpoints of the part's edges live in this global vertex range.
    Graphic { vertices: Range<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub range: Range<usize>,
    pub kind: PartKind,
}

/// Normalized matroid: a direct sum of contiguous uniform and graphic parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matroid {
    parts: Vec<Part>,
    part_of: Vec<usize>,
    ends: Vec<(usize, usize)>,
    num_vertices: usize,
    rank: usize,
}

/// One flattened component before re-indexing.
struct Component {
    kind: RawKind,
    /// Input indices of the component's elements, in local order.
    elements: Vec<usize>,
}

enum RawKind {
    Uniform { k: usize },
    Graphic { n: usize, ends: Vec<(usize, usize)> },
}

fn flatten(spec: &MatroidSpec, offset: usize, out: &mut Vec<Component>) {
    match spec {
        MatroidSpec::Uniform { m, k } => out.push(Component {
            kind: RawKind::Uniform { k: *k },
            elements: (offset..offset + m).collect(),
        }),
        MatroidSpec::Partition { blocks } => {
            for b in blocks {
                out.push(Component {
                    kind: RawKind::Uniform { k: b.cap },
                    elements: b.elements.iter().map(|e| e + offset).collect(),
                });
            }
        }
        MatroidSpec::Graphic { graph } => out.push(Component {
            kind: RawKind::Graphic {
                n: graph.n,
                ends: graph.edges.clone(),
            },
            elements: (offset..offset + graph.num_edges()).collect(),
        }),
        MatroidSpec::DirectSum { parts } => {
            let mut off = offset;
            for p in parts {
                flatten(p, off, out);
                off += p.len();
            }
        }
    }
}

impl Matroid {
    /// Builds the normalized form of `spec`, keeping only elements with
    /// `keep(e)` and ordering each part by `key` (ties by input index).
    /// Returns the matroid and `perm`, mapping new indices to input indices.
    pub fn from_spec<K: Ord>(
        spec: &MatroidSpec,
        keep: impl Fn(usize) -> bool,
        key: impl Fn(usize) -> K,
    ) -> Result<(Matroid, Vec<usize>)> {
        let mut comps = Vec::new();
        flatten(spec, 0, &mut comps);
        let mut parts = Vec::new();
        let mut perm = Vec::new();
        let mut part_of = Vec::new();
        let mut ends = Vec::new();
        let mut num_vertices = 0;
        for comp in comps {
            let mut local: Vec<usize> = (0..comp.elements.len())
                .filter(|&j| keep(comp.elements[j]))
                .collect();
            local.sort_by(|&a, &b| {
                let (ea, eb) = (comp.elements[a], comp.elements[b]);
                key(ea).cmp(&key(eb)).then(ea.cmp(&eb))
            });
            let start = perm.len();
            let kind = match &comp.kind {
                RawKind::Uniform { k } => {
                    // Deleting elements can leave fewer than k; the part's
                    // rank is then the whole part.
                    PartKind::Uniform { k: (*k).min(local.len()) }
                }
                RawKind::Graphic { n, ends: e } => {
                    for &j in &local {
                        let (u, v) = e[j];
                        ends.push((u + num_vertices, v + num_vertices));
                    }
                    let vertices = num_vertices..num_vertices + n;
                    num_vertices += n;
                    PartKind::Graphic { vertices }
                }
            };
            if matches!(kind, PartKind::Uniform { .. }) {
                ends.extend(std::iter::repeat_n((0, 0), local.len()));
            }
            for &j in &local {
                perm.push(comp.elements[j]);
                part_of.push(parts.len());
            }
            let range = start..perm.len();
            let is_empty_uniform = matches!(kind, PartKind::Uniform { .. }) && range.is_empty();
            if is_empty_uniform {
                continue;
            }
            parts.push(Part { range, kind });
        }
        let mut m = Matroid {
            parts,
            part_of,
            ends,
            num_vertices,
            rank: 0,
        };
        m.rank = m.rank_of_mask(None);
        Ok((m, perm))
    }

    pub fn len(&self) -> usize {
        self.part_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.part_of.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn part_index(&self, e: usize) -> usize {
        self.part_of[e]
    }

    pub fn part_of(&self, e: usize) -> &Part {
        &self.parts[self.part_of[e]]
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn accumulator(&self) -> Accumulator {
        Accumulator::new(self)
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        let mut acc = self.accumulator();
        set.iter().all(|&e| acc.can_add(self, e) && acc.add(self, e))
    }

    /// Rank of `{e : mask[e]}`, or of the ground set when `mask` is `None`.
    pub fn rank_of_mask(&self, mask: Option<&[bool]>) -> usize {
        let mut acc = self.accumulator();
        (0..self.len())
            .filter(|&e| mask.is_none_or(|k| k[e]))
            .filter(|&e| acc.can_add(self, e) && acc.add(self, e))
            .count()
    }

    pub fn rank_of(&self, set: &[usize]) -> usize {
        let mut mask = vec![false; self.len()];
        set.iter().for_each(|&e| mask[e] = true);
        self.rank_of_mask(Some(&mask))
    }

    /// Lexicographically smallest basis avoiding `excluded`, or `None` when
    /// `E \ excluded` does not span.
    pub fn lex_min_basis(&self, excluded: &[bool]) -> Option<Vec<usize>> {
        let mut acc = self.accumulator();
        let basis: Vec<usize> = (0..self.len())
            .filter(|&e| !excluded[e] && acc.can_add(self, e) && acc.add(self, e))
            .collect();
        (basis.len() == self.rank).then_some(basis)
    }

    /// The element entering the lex-min basis when `e` is also excluded.
    pub fn replacement_element(&self, excluded: &[bool], basis: &[usize], e: usize) -> Option<usize> {
        debug_assert!(basis.contains(&e));
        let mut ex = excluded.to_vec();
        ex[e] = true;
        let next = self.lex_min_basis(&ex)?;
        let mut in_old = vec![false; self.len()];
        basis.iter().for_each(|&b| in_old[b] = true);
        next.into_iter().find(|&b| !in_old[b])
    }

    /// Replacement chain of basis element `e`: `r_0 = e`, then each element
    /// entering the lex-min basis once all earlier chain elements are also
    /// excluded, as long as the chain's total cost stays within `budget`.
    /// The second value is the first replacement that did not fit, if any.
    pub fn replacement_chain(
        &self,
        costs: &[u64],
        budget: u64,
        excluded: &[bool],
        basis: &[usize],
        e: usize,
    ) -> (Vec<usize>, Option<usize>) {
        if costs[e] > budget {
            return (Vec::new(), None);
        }
        let mut ex = excluded.to_vec();
        let mut basis = basis.to_vec();
        let mut chain = vec![e];
        let mut spent = costs[e];
        loop {
            let last = *chain.last().unwrap();
            let Some(next) = self.replacement_element(&ex, &basis, last) else {
                return (chain, None);
            };
            ex[last] = true;
            basis.retain(|&b| b != last);
            basis.push(next);
            if spent + costs[next] > budget {
                return (chain, Some(next));
            }
            spent += costs[next];
            chain.push(next);
        }
    }

    /// Restriction to `{e : keep[e]}`, preserving order. Returns the new
    /// matroid and the map from new indices to old ones.
    pub fn restrict(&self, keep: &[bool]) -> (Matroid, Vec<usize>) {
        let map: Vec<usize> = (0..self.len()).filter(|&e| keep[e]).collect();
        let mut parts = Vec::new();
        let mut part_of = Vec::new();
        let mut ends = Vec::new();
        for part in &self.parts {
            let start = part_of.len();
            for e in part.range.clone().filter(|&e| keep[e]) {
                part_of.push(parts.len());
                ends.push(self.ends[e]);
            }
            let range = start..part_of.len();
            let kind = match &part.kind {
                PartKind::Uniform { k } => {
                    if range.is_empty() {
                        continue;
                    }
                    PartKind::Uniform { k: (*k).min(range.len()) }
                }
                g => g.clone(),
            };
            parts.push(Part { range, kind });
        }
        let mut m = Matroid {
            parts,
            part_of,
            ends,
            num_vertices: self.num_vertices,
            rank: 0,
        };
        m.rank = m.rank_of_mask(None);
        (m, map)
    }

    /// Minimum-cost set `X ⊆ within` with `r(within \ X) < r(E)`.
    ///
    /// When `within` already has rank below `r(E)` the answer is the empty
    /// set at cost 0. `None` means no such set exists (rank zero).
    pub fn min_cost_cocircuit(&self, costs: &[u64], within: Option<&[bool]>) -> Option<(Vec<usize>, u64)> {
        let inside = |e: usize| within.is_none_or(|w| w[e]);
        let mut best: Option<(Vec<usize>, u64)> = None;
        let mut consider = |set: Vec<usize>, cost: u64| {
            if best.as_ref().is_none_or(|(_, b)| cost < *b) {
                best = Some((set, cost));
            }
        };
        for part in &self.parts {
            match &part.kind {
                PartKind::Uniform { k } => {
                    if *k == 0 {
                        continue;
                    }
                    let mut elems: Vec<usize> = part.range.clone().filter(|&e| inside(e)).collect();
                    if elems.len() < *k {
                        consider(Vec::new(), 0);
                        continue;
                    }
                    elems.sort_by_key(|&e| (costs[e], e));
                    elems.truncate(elems.len() - k + 1);
                    let cost = elems.iter().map(|&e| costs[e]).sum();
                    consider(elems, cost);
                }
                PartKind::Graphic { vertices } => {
                    if vertices.len() < 2 {
                        continue;
                    }
                    let edges: Vec<usize> = part.range.clone().filter(|&e| inside(e)).collect();
                    let g = Multigraph::new(
                        vertices.len(),
                        edges
                            .iter()
                            .map(|&e| {
                                let (u, v) = self.ends[e];
                                (u - vertices.start, v - vertices.start)
                            })
                            .collect(),
                    );
                    let caps: Vec<Option<u64>> = edges.iter().map(|&e| Some(costs[e])).collect();
                    let cut = global_min_cut(&g, &caps, None);
                    let value = cut.value.expect("all capacities are finite");
                    let set = cut.crossing_edges(&g, None).into_iter().map(|j| edges[j]).collect();
                    consider(set, value);
                }
            }
        }
        best
    }
}

/// Incremental independence test with undo: tracks the span of the elements
/// added so far. Each `add` logs exactly one entry.
#[derive(Clone, Debug)]
pub struct Accumulator {
    uf: UnionFindUndo,
    counts: Vec<usize>,
    log: Vec<Option<usize>>,
}

impl Accumulator {
    pub fn new(m: &Matroid) -> Self {
        Self {
            uf: UnionFindUndo::new(m.num_vertices),
            counts: vec![0; m.parts.len()],
            log: Vec::new(),
        }
    }

    /// Whether adding `e` keeps the accumulated set independent.
    #[inline]
    pub fn can_add(&self, m: &Matroid, e: usize) -> bool {
        let p = m.part_of[e];
        match m.parts[p].kind {
            PartKind::Uniform { k } => self.counts[p] < k,
            PartKind::Graphic { .. } => {
                let (u, v) = m.ends[e];
                !self.uf.same(u, v)
            }
        }
    }

    /// Adds `e`; returns `true` so it can be chained in filters.
    #[inline]
    pub fn add(&mut self, m: &Matroid, e: usize) -> bool {
        let p = m.part_of[e];
        match m.parts[p].kind {
            PartKind::Uniform { .. } => {
                self.counts[p] += 1;
                self.log.push(Some(p));
            }
            PartKind::Graphic { .. } => {
                let (u, v) = m.ends[e];
                self.uf.union(u, v);
                self.log.push(None);
            }
        }
        true
    }

    pub fn undo(&mut self) {
        match self.log.pop().expect("undo on empty accumulator") {
            Some(p) => self.counts[p] -= 1,
            None => self.uf.undo(),
        }
    }

    pub fn history_len(&self) -> usize {
        self.log.len()
    }

    pub fn rollback_to(&mut self, len: usize) {
        while self.log.len() > len {
            self.undo();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_spec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> MatroidSpec {
        MatroidSpec::Graphic {
            graph: Multigraph::new(3, vec![(0, 1), (1, 2), (0, 2)]),
        }
    }

    fn normalized(spec: &MatroidSpec) -> Matroid {
        Matroid::from_spec(spec, |_| true, |e| e).unwrap().0
    }

    #[test]
    fn independence_examples() {
        let u = MatroidSpec::Uniform { m: 4, k: 2 };
        assert!(u.is_independent(&[0, 2]));
        assert!(!u.is_independent(&[0, 1, 2]));
        assert!(!triangle().is_independent(&[0, 1, 2]));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(triangle().rank(&[0, 1, 2]), 2);
        let p = MatroidSpec::Partition {
            blocks: vec![
                Block { elements: vec![0, 1], cap: 1 },
                Block { elements: vec![2], cap: 1 },
            ],
        };
        assert_eq!(p.rank(&[0, 1]), 1);
        assert_eq!(MatroidSpec::Uniform { m: 4, k: 2 }.rank(&[]), 0);
    }

    #[test]
    fn lex_min_basis_on_triangle() {
        let m = normalized(&triangle());
        assert_eq!(m.lex_min_basis(&[false; 3]), Some(vec![0, 1]));
        assert_eq!(m.lex_min_basis(&[true, false, false]), Some(vec![1, 2]));
        assert_eq!(m.lex_min_basis(&[true, true, false]), None);
    }

    #[test]
    fn replacement_examples() {
        let m = normalized(&triangle());
        let none = [false; 3];
        assert_eq!(m.replacement_element(&none, &[0, 1], 0), Some(2));
        assert_eq!(m.replacement_element(&none, &[0, 1], 1), Some(2));
        let path = normalized(&MatroidSpec::Graphic {
            graph: Multigraph::new(3, vec![(0, 1), (1, 2)]),
        });
        assert_eq!(path.replacement_element(&[false; 2], &[0, 1], 0), None);
    }

    #[test]
    fn replacement_chain_examples() {
        let m = normalized(&triangle());
        let none = [false; 3];
        let costs = [1, 1, 1];
        assert_eq!(m.replacement_chain(&costs, 2, &none, &[0, 1], 0), (vec![0, 2], None));
        assert_eq!(m.replacement_chain(&costs, 1, &none, &[0, 1], 0), (vec![0], Some(2)));
        assert_eq!(m.replacement_chain(&costs, 0, &none, &[0, 1], 0), (vec![], None));
        // four parallel edges: the chain walks through all of them
        let par = normalized(&MatroidSpec::Graphic {
            graph: Multigraph::new(2, vec![(0, 1); 4]),
        });
        let chain = par.replacement_chain(&[1, 2, 3, 4], 6, &[false; 4], &[0], 0);
        assert_eq!(chain, (vec![0, 1, 2], Some(3)));
    }

    #[test]
    fn cocircuit_examples() {
        assert_eq!(triangle().min_cost_cocircuit(&[1, 1, 1]).unwrap().unwrap().1, 2);
        let one_block = MatroidSpec::Partition {
            blocks: vec![Block { elements: vec![0, 1, 2], cap: 1 }],
        };
        assert_eq!(one_block.min_cost_cocircuit(&[1, 1, 1]).unwrap().unwrap(), (vec![0, 1, 2], 3));
        let free = MatroidSpec::Partition {
            blocks: vec![Block { elements: vec![0, 1], cap: 2 }],
        };
        assert_eq!(free.min_cost_cocircuit(&[4, 3]).unwrap().unwrap(), (vec![1], 3));
        assert_eq!(MatroidSpec::Uniform { m: 3, k: 0 }.min_cost_cocircuit(&[1, 1, 1]).unwrap(), None);
    }

    #[test]
    fn dual_examples() {
        let p = MatroidSpec::Partition {
            blocks: vec![Block { elements: vec![0, 1, 2], cap: 1 }],
        };
        let d = p.dual(None).unwrap();
        assert_eq!(
            d,
            MatroidSpec::Partition {
                blocks: vec![Block { elements: vec![0, 1, 2], cap: 2 }]
            }
        );
        assert_eq!(d.dual(None).unwrap(), p);
        assert!(matches!(triangle().dual(None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn triangle_dual_bases_complement_spanning_trees() {
        let primal = triangle();
        let dual_graph = Multigraph::new(2, vec![(0, 1); 3]);
        let dual = primal.dual(Some(&dual_graph)).unwrap();
        check_dual_bases(&primal, &dual);
    }

    fn subsets(m: usize) -> impl Iterator<Item = Vec<usize>> {
        (0u32..1 << m).map(move |mask| (0..m).filter(|&e| mask >> e & 1 == 1).collect())
    }

    fn check_dual_bases(primal: &MatroidSpec, dual: &MatroidSpec) {
        let m = primal.len();
        let r = primal.full_rank();
        for s in subsets(m) {
            let rest: Vec<usize> = (0..m).filter(|e| !s.contains(e)).collect();
            // S independent in the dual iff E \ S spans the primal
            assert_eq!(dual.is_independent(&s), primal.rank(&rest) == r, "S={s:?}");
        }
    }

    fn exhaustive_rank(spec: &MatroidSpec, set: &[usize]) -> usize {
        (0u32..1 << set.len())
            .map(|mask| {
                set.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect::<Vec<_>>()
            })
            .filter(|s| spec.is_independent(s))
            .map(|s| s.len())
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn greedy_rank_matches_exhaustive_search_in_any_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..150 {
            let m = rng.gen_range(0..=8);
            let spec = random_spec(&mut rng, m);
            spec.validate().unwrap();
            let norm = Matroid::from_spec(&spec, |_| true, |e| e).unwrap();
            for s in subsets(m).step_by(3) {
                let expect = exhaustive_rank(&spec, &s);
                assert_eq!(spec.rank(&s), expect);
                let mut rev = s.clone();
                rev.reverse();
                assert_eq!(spec.rank(&rev), expect);
                let inv: Vec<usize> = {
                    let mut inv = vec![0; m];
                    norm.1.iter().enumerate().for_each(|(new, &old)| inv[old] = new);
                    s.iter().map(|&e| inv[e]).collect()
                };
                assert_eq!(norm.0.rank_of(&inv), expect);
                assert_eq!(norm.0.is_independent(&inv), spec.is_independent(&s));
            }
        }
    }

    #[test]
    fn lex_min_basis_has_minimum_weight_under_sorted_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..150 {
            let m = rng.gen_range(1..=9);
            let spec = random_spec(&mut rng, m);
            let w: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..6)).collect();
            let (mat, perm) = Matroid::from_spec(&spec, |_| true, |e| w[e]).unwrap();
            let r = spec.full_rank();
            let excluded: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.25)).collect();
            let best = subsets(m)
                .filter(|s| s.len() == r && spec.is_independent(s))
                .filter(|s| s.iter().all(|&e| !excluded[e]))
                .map(|s| s.iter().map(|&e| w[e]).sum::<i64>())
                .min();
            let ex_new: Vec<bool> = perm.iter().map(|&e| excluded[e]).collect();
            let got = mat
                .lex_min_basis(&ex_new)
                .map(|b| b.iter().map(|&e| w[perm[e]]).sum::<i64>());
            assert_eq!(got, best);
            if let Some(b) = mat.lex_min_basis(&ex_new) {
                for &e in &b {
                    if let Some(f) = mat.replacement_element(&ex_new, &b, e) {
                        assert!(f > e, "replacement must come later");
                        assert_eq!(mat.part_index(f), mat.part_index(e));
                    }
                }
            }
        }
    }

    #[test]
    fn cocircuits_are_minimum_rank_reducing_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..150 {
            let m = rng.gen_range(1..=9);
            let spec = random_spec(&mut rng, m);
            let c: Vec<u64> = (0..m).map(|_| rng.gen_range(1..5)).collect();
            let r = spec.full_rank();
            let brute = subsets(m)
                .filter(|x| {
                    let rest: Vec<usize> = (0..m).filter(|e| !x.contains(e)).collect();
                    spec.rank(&rest) < r
                })
                .map(|x| x.iter().map(|&e| c[e]).sum::<u64>())
                .min();
            let got = spec.min_cost_cocircuit(&c).unwrap();
            assert_eq!(got.as_ref().map(|g| g.1), brute);
            if let Some((x, cost)) = got {
                assert_eq!(x.iter().map(|&e| c[e]).sum::<u64>(), cost);
                let rest: Vec<usize> = (0..m).filter(|e| !x.contains(e)).collect();
                assert!(spec.rank(&rest) < r);
            }
        }
    }

    #[test]
    fn dual_independence_matches_complement_spanning() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..60 {
            let m = rng.gen_range(0..=8);
            let spec = loop {
                let s = random_spec(&mut rng, m);
                if s.dual(None).is_ok() {
                    break s;
                }
            };
            let dual = spec.dual(None).unwrap();
            check_dual_bases(&spec, &dual);
            assert_eq!(dual.dual(None).unwrap(), spec);
        }
    }

    #[test]
    fn accumulator_undo_restores_state() {
        let spec = MatroidSpec::DirectSum {
            parts: vec![MatroidSpec::Uniform { m: 3, k: 1 }, triangle()],
        };
        let m = normalized(&spec);
        let mut acc = m.accumulator();
        assert!(acc.can_add(&m, 0));
        acc.add(&m, 0);
        assert!(!acc.can_add(&m, 1));
        acc.add(&m, 3);
        acc.add(&m, 4);
        assert!(!acc.can_add(&m, 5));
        acc.rollback_to(1);
        assert!(acc.can_add(&m, 5));
        acc.undo();
        assert!(acc.can_add(&m, 2));
        assert_eq!(acc.history_len(), 0);
    }

    #[test]
    fn validate_rejects_bad_inputs() {
        let disc = MatroidSpec::Graphic {
            graph: Multigraph::new(3, vec![(0, 1)]),
        };
        assert!(matches!(disc.validate(), Err(Error::Disconnected)));
        let overlap = MatroidSpec::Partition {
            blocks: vec![
                Block { elements: vec![0, 1], cap: 1 },
                Block { elements: vec![1], cap: 1 },
            ],
        };
        assert!(overlap.validate().is_err());
        assert!(MatroidSpec::Uniform { m: 2, k: 3 }.validate().is_err());
    }
}
