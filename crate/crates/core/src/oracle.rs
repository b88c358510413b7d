//! Exhaustive reference solvers over the raw instance.
//!
//! These only use the input independence oracle and sorting, so they share
//! no code with the search.

use crate::error::{Error, Result};
use crate::instance::RawInstance;
use crate::search::{SearchStats, Solution};

pub const DEFAULT_CAP: usize = 20;

fn check_cap(raw: &RawInstance, cap: usize) -> Result<()> {
    if raw.len() > cap {
        return Err(Error::OracleCap { m: raw.len(), cap });
    }
    raw.check()
}

fn cost_of(raw: &RawInstance, e: usize) -> u64 {
    raw.costs[e].unwrap_or(u64::MAX / 4)
}

fn set_cost(raw: &RawInstance, x: &[usize]) -> u64 {
    x.iter().fold(0u64, |acc, &e| acc.saturating_add(cost_of(raw, e)))
}

/// Minimum-weight basis of `E \ x` by the greedy algorithm in `(w, index)`
/// order, `None` when `E \ x` does not span.
pub fn min_basis(raw: &RawInstance, removed: &[bool]) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..raw.len()).filter(|&e| !removed[e]).collect();
    order.sort_by_key(|&e| (raw.weights[e], e));
    let mut basis = Vec::new();
    for e in order {
        basis.push(e);
        if !raw.matroid.is_independent(&basis) {
            basis.pop();
        }
    }
    (basis.len() == raw.matroid.full_rank()).then_some(basis)
}

fn solution(raw: &RawInstance, x: Vec<usize>, basis: Option<Vec<usize>>) -> Solution {
    let value = basis.as_ref().map(|b| b.iter().map(|&e| raw.weights[e]).sum());
    Solution {
        cost: set_cost(raw, &x),
        interdicted: x,
        rank_reducible: basis.is_none(),
        basis,
        value,
        proven_optimal: true,
        stats: SearchStats {
            value,
            optimal: true,
            ..SearchStats::default()
        },
    }
}

/// Best interdiction set by enumeration. Since removing more elements never
/// lowers the minimum basis weight, only sets that no further element fits
/// into are evaluated.
pub fn brute_force_interdiction(raw: &RawInstance, cap: usize) -> Result<Solution> {
    check_cap(raw, cap)?;
    let m = raw.len();
    let mut removed = vec![false; m];
    let mut best: Option<(Vec<usize>, Option<Vec<usize>>, Option<i64>)> = None;

    fn rec(
        raw: &RawInstance,
        e: usize,
        spent: u64,
        min_out: u64,
        removed: &mut Vec<bool>,
        best: &mut Option<(Vec<usize>, Option<Vec<usize>>, Option<i64>)>,
    ) -> bool {
        if e == raw.len() {
            if spent.saturating_add(min_out) <= raw.capacity {
                return false;
            }
            let basis = min_basis(raw, removed);
            let value = basis.as_ref().map(|b| b.iter().map(|&j| raw.weights[j]).sum::<i64>());
            let better = match best {
                None => true,
                Some((_, _, v)) => match (value, *v) {
                    (None, Some(_)) => true,
                    (Some(a), Some(b)) => a > b,
                    _ => false,
                },
            };
            if better {
                let x = (0..raw.len()).filter(|&j| removed[j]).collect();
                *best = Some((x, basis, value));
            }
            return value.is_none();
        }
        let c = cost_of(raw, e);
        if spent + c <= raw.capacity {
            removed[e] = true;
            let done = rec(raw, e + 1, spent + c, min_out, removed, best);
            removed[e] = false;
            if done {
                return true;
            }
        }
        rec(raw, e + 1, spent, min_out.min(c), removed, best)
    }

    rec(raw, 0, 0, u64::MAX, &mut removed, &mut best);
    let (x, basis, _) = best.expect("the empty set is always evaluated or dominated");
    Ok(solution(raw, x, basis))
}

/// Cheapest set whose removal leaves minimum basis weight at least
/// `target` (or no basis).
pub fn brute_force_blocker(raw: &RawInstance, target: i64, cap: usize) -> Result<Solution> {
    check_cap(raw, cap)?;
    let m = raw.len();
    let mut best: Option<(u64, Vec<usize>, Option<Vec<usize>>)> = None;
    for mask in 0u64..1 << m {
        let x: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
        let c = set_cost(raw, &x);
        if best.as_ref().is_some_and(|b| c >= b.0) {
            continue;
        }
        let removed: Vec<bool> = (0..m).map(|e| mask >> e & 1 == 1).collect();
        let basis = min_basis(raw, &removed);
        let ok = basis
            .as_ref()
            .is_none_or(|b| b.iter().map(|&e| raw.weights[e]).sum::<i64>() >= target);
        if ok {
            best = Some((c, x, basis));
        }
    }
    // only a rank-0 matroid keeps a basis after removing everything
    let (_, x, basis) = best.ok_or(Error::Unreachable(target))?;
    if x.iter().any(|&e| raw.costs[e].is_none()) {
        return Err(Error::Unreachable(target));
    }
    Ok(solution(raw, x, basis))
}

/// Minimum over affordable `X` of the heaviest basis containing `X`.
/// `value = None` means some affordable `X` is contained in no basis.
pub fn brute_force_inclusion(raw: &RawInstance, cap: usize) -> Result<Solution> {
    check_cap(raw, cap)?;
    let m = raw.len();
    let r = raw.matroid.full_rank();
    let sets = |mask: u64| -> Vec<usize> { (0..m).filter(|&e| mask >> e & 1 == 1).collect() };
    let bases: Vec<(u64, i64)> = (0u64..1 << m)
        .filter(|&b| b.count_ones() as usize == r && raw.matroid.is_independent(&sets(b)))
        .map(|b| (b, sets(b).iter().map(|&e| raw.weights[e]).sum()))
        .collect();
    let mut best: Option<(Vec<usize>, Option<(u64, i64)>)> = None;
    for mask in 0u64..1 << m {
        let x = sets(mask);
        if set_cost(raw, &x) > raw.capacity {
            continue;
        }
        let top = bases
            .iter()
            .filter(|(b, _)| b & mask == mask)
            .max_by_key(|(_, w)| *w)
            .copied();
        let better = match &best {
            None => true,
            Some((_, cur)) => match (top, cur) {
                (None, Some(_)) => true,
                (Some(a), Some(b)) => a.1 < b.1,
                _ => false,
            },
        };
        if better {
            best = Some((x, top));
        }
    }
    let (x, top) = best.expect("the empty set is affordable");
    let basis = top.map(|(b, _)| sets(b));
    let mut sol = solution(raw, x, basis);
    sol.rank_reducible = top.is_none();
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Multigraph;
    use crate::matroid::MatroidSpec;

    fn triangle(cap: u64) -> RawInstance {
        RawInstance::new(
            MatroidSpec::Graphic {
                graph: Multigraph::new(3, vec![(0, 1), (1, 2), (0, 2)]),
            },
            vec![1, 2, 3],
            vec![Some(1); 3],
            cap,
        )
    }

    #[test]
    fn triangle_values() {
        let s = brute_force_interdiction(&triangle(1), DEFAULT_CAP).unwrap();
        assert_eq!((s.value, s.interdicted), (Some(5), vec![0]));
        let s = brute_force_interdiction(&triangle(2), DEFAULT_CAP).unwrap();
        assert!(s.rank_reducible);
        let s = brute_force_blocker(&triangle(0), 5, DEFAULT_CAP).unwrap();
        assert_eq!((s.cost, s.interdicted), (1, vec![0]));
        let s = brute_force_blocker(&triangle(0), 99, DEFAULT_CAP).unwrap();
        assert_eq!((s.cost, s.value), (2, None));
    }

    #[test]
    fn cap_is_enforced() {
        let raw = RawInstance::new(MatroidSpec::Uniform { m: 5, k: 2 }, vec![0; 5], vec![Some(1); 5], 1);
        assert!(matches!(brute_force_interdiction(&raw, 4), Err(Error::OracleCap { m: 5, cap: 4 })));
    }

    #[test]
    fn maximal_sets_give_the_plain_enumeration_optimum() {
        use crate::testutil::{random_raw, random_spec, subsets};
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let m = rng.gen_range(1..=9);
            let spec = random_spec(&mut rng, m);
            let raw = random_raw(&mut rng, spec, 9, 4, 8);
            let mut plain: Option<Option<i64>> = None;
            for x in subsets(m) {
                if x.iter().map(|&e| cost_of(&raw, e)).sum::<u64>() > raw.capacity {
                    continue;
                }
                let mut removed = vec![false; m];
                x.iter().for_each(|&e| removed[e] = true);
                let v = min_basis(&raw, &removed).map(|b| b.iter().map(|&e| raw.weights[e]).sum::<i64>());
                plain = Some(match (plain, v) {
                    (None, v) => v,
                    (Some(None), _) | (_, None) => None,
                    (Some(Some(a)), Some(b)) => Some(a.max(b)),
                });
            }
            let s = brute_force_interdiction(&raw, DEFAULT_CAP).unwrap();
            assert_eq!(s.value, plain.unwrap());
            assert!(s.cost <= raw.capacity);
        }
    }
}
