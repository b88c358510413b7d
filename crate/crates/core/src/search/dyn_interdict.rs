use std::collections::BTreeSet;

use crate::instance::Instance;
use crate::matroid::Accumulator;

/// Interdiction set, its lex-min basis and a cursor into the basis, with
/// undo. The accumulator always spans the basis elements before the cursor.
#[derive(Clone, Debug)]
pub struct DynInterdict {
    x: Vec<usize>,
    in_x: Vec<bool>,
    y: BTreeSet<usize>,
    in_y: Vec<bool>,
    cursor: Option<usize>,
    acc: Accumulator,
    skips: Vec<Option<usize>>,
    swaps: Vec<(usize, usize)>,
    weight: i64,
    cost: u64,
}

impl DynInterdict {
    /// `None` when the matroid has no basis at all (cannot happen for a
    /// normalized instance).
    pub fn new(inst: &Instance) -> Self {
        let m = inst.len();
        let basis = inst.lex_min_basis(&[]).expect("the ground set spans");
        let mut in_y = vec![false; m];
        basis.iter().for_each(|&e| in_y[e] = true);
        let y: BTreeSet<usize> = basis.iter().copied().collect();
        Self {
            x: Vec::new(),
            in_x: vec![false; m],
            cursor: y.first().copied(),
            weight: inst.weight(&basis),
            y,
            in_y,
            acc: inst.matroid.accumulator(),
            skips: Vec::new(),
            swaps: Vec::new(),
            cost: 0,
        }
    }

    pub fn interdicted(&self) -> &[usize] {
        &self.x
    }

    pub fn basis(&self) -> Vec<usize> {
        self.y.iter().copied().collect()
    }

    pub fn cursor(&self) -> Option<usize> {
        self.cursor
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    /// Moves the cursor past the current basis element.
    pub fn skip(&mut self, inst: &Instance) {
        let e = self.cursor.expect("skip past the end of the basis");
        self.acc.add(&inst.matroid, e);
        self.skips.push(self.cursor);
        self.cursor = self.y.range(e + 1..).next().copied();
    }

    pub fn unskip(&mut self) {
        self.cursor = self.skips.pop().expect("unskip without skip");
        self.acc.undo();
    }

    /// Interdicts the cursor element and swaps in its replacement. Returns
    /// `false`, changing nothing, when no replacement exists.
    pub fn interdict(&mut self, inst: &Instance) -> bool {
        let Some(e) = self.cursor else { return false };
        let mark = self.acc.history_len();
        let mut found = None;
        for f in e + 1..inst.len() {
            if self.in_y[f] {
                self.acc.add(&inst.matroid, f);
            } else if !self.in_x[f] && self.acc.can_add(&inst.matroid, f) {
                found = Some(f);
                break;
            }
        }
        self.acc.rollback_to(mark);
        let Some(f) = found else { return false };
        self.x.push(e);
        self.in_x[e] = true;
        self.y.remove(&e);
        self.in_y[e] = false;
        self.y.insert(f);
        self.in_y[f] = true;
        self.weight += inst.weights[f] - inst.weights[e];
        self.cost += inst.costs[e];
        self.cursor = self.y.range(e + 1..).next().copied();
        self.swaps.push((e, f));
        true
    }

    pub fn uninterdict(&mut self, inst: &Instance) {
        let (e, f) = self.swaps.pop().expect("uninterdict without interdict");
        self.x.pop();
        self.in_x[e] = false;
        self.y.remove(&f);
        self.in_y[f] = false;
        self.y.insert(e);
        self.in_y[e] = true;
        self.weight -= inst.weights[f] - inst.weights[e];
        self.cost -= inst.costs[e];
        self.cursor = Some(e);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Multigraph;
    use crate::instance::RawInstance;
    use crate::matroid::MatroidSpec;
    use crate::testutil::{random_raw, random_spec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> Instance {
        RawInstance::new(
            MatroidSpec::Graphic {
                graph: Multigraph::new(3, vec![(0, 1), (1, 2), (0, 2)]),
            },
            vec![1, 2, 3],
            vec![Some(1); 3],
            1,
        )
        .normalize()
        .unwrap()
    }

    #[test]
    fn triangle_operations() {
        let inst = triangle();
        let mut d = DynInterdict::new(&inst);
        assert_eq!(d.basis(), vec![0, 1]);
        assert_eq!(d.cursor(), Some(0));
        assert!(d.interdict(&inst));
        assert_eq!(d.interdicted(), &[0]);
        assert_eq!(d.basis(), vec![1, 2]);
        assert_eq!(d.cursor(), Some(1));
        assert_eq!(d.weight(), 5);
        // the other two edges now form the only tree
        assert!(!d.interdict(&inst));
        d.uninterdict(&inst);
        assert_eq!(d.basis(), vec![0, 1]);
        assert_eq!(d.cursor(), Some(0));
    }

    #[test]
    fn bridge_cannot_be_interdicted() {
        let inst = RawInstance::new(
            MatroidSpec::Graphic {
                graph: Multigraph::new(2, vec![(0, 1)]),
            },
            vec![1],
            vec![Some(1)],
            1,
        )
        .normalize()
        .unwrap();
        let mut d = DynInterdict::new(&inst);
        assert!(!d.interdict(&inst));
        assert_eq!(d.basis(), vec![0]);
    }

    #[derive(Debug, PartialEq)]
    struct Snapshot(Vec<usize>, Vec<usize>, Option<usize>, i64, u64);

    fn snap(d: &DynInterdict) -> Snapshot {
        Snapshot(d.interdicted().to_vec(), d.basis(), d.cursor(), d.weight(), d.cost())
    }

    #[test]
    fn random_walks_keep_lex_min_basis_and_undo_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = rng.gen_range(1..=10);
            let spec = random_spec(&mut rng, m);
            let inst = random_raw(&mut rng, spec, 6, 3, 5).normalize().unwrap();
            let mut d = DynInterdict::new(&inst);
            let mut ops: Vec<(bool, Snapshot)> = Vec::new();
            for _ in 0..30 {
                let forward = ops.is_empty() || rng.gen_bool(0.6);
                if forward && d.cursor().is_some() {
                    let before = snap(&d);
                    if rng.gen_bool(0.5) {
                        if d.interdict(&inst) {
                            ops.push((true, before));
                        } else {
                            assert_eq!(snap(&d), before);
                        }
                    } else {
                        d.skip(&inst);
                        ops.push((false, before));
                    }
                } else if let Some((was_interdict, before)) = ops.pop() {
                    if was_interdict {
                        d.uninterdict(&inst);
                    } else {
                        d.unskip();
                    }
                    assert_eq!(snap(&d), before);
                }
                assert_eq!(Some(d.basis()), inst.lex_min_basis(d.interdicted()));
                assert_eq!(d.weight(), inst.weight(&d.basis()));
                assert_eq!(d.cost(), inst.cost(d.interdicted()));
                if let Some(e) = d.cursor() {
                    assert!(d.basis().contains(&e));
                    assert!(d.interdicted().iter().all(|&x| x < e));
                }
            }
        }
    }
}
