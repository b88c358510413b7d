use crate::instance::Instance;

/// Result of discarding elements that never matter within a budget.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub inst: Instance,
    /// Elements worth interdicting, over the reduced indices.
    pub useful: Vec<bool>,
    pub last_useful: Option<usize>,
    /// Number of distinct weight levels kept.
    pub levels: usize,
}

/// Cheapest set that destroys every basis, if it fits in the capacity.
pub fn rank_reducing_set(inst: &Instance) -> Option<(Vec<usize>, u64)> {
    inst.matroid
        .min_cost_cocircuit(&inst.costs, None)
        .filter(|(_, c)| *c <= inst.capacity)
}

/// Distinct weights in increasing order.
pub fn distinct_weights(inst: &Instance) -> Vec<i64> {
    let mut w = inst.weights.clone();
    w.sort_unstable();
    w.dedup();
    w
}

fn at_most(inst: &Instance, w: i64) -> Vec<bool> {
    inst.weights.iter().map(|&x| x <= w).collect()
}

/// Cheapest set inside `E_{≤w}` whose removal leaves `E_{≤w}` without full
/// rank; zero when `E_{≤w}` is already deficient.
fn level_cut(inst: &Instance, w: i64) -> u64 {
    let within = at_most(inst, w);
    inst.matroid
        .min_cost_cocircuit(&inst.costs, Some(&within))
        .map_or(u64::MAX, |(_, c)| c)
}

/// Smallest `t` (1-based into the distinct weights) such that no set within
/// `cap` destroys the full rank of `E_{≤w'_t}`. `None` when even the whole
/// ground set can be cut within `cap`, or the rank is zero.
pub fn critical_level(inst: &Instance, cap: u64) -> Option<usize> {
    let w = distinct_weights(inst);
    if inst.rank() == 0 || w.is_empty() || level_cut(inst, *w.last().unwrap()) <= cap {
        return None;
    }
    let (mut lo, mut hi) = (1, w.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if level_cut(inst, w[mid - 1]) > cap {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Keeps elements up to the critical weight level and marks the ones below
/// it as the only candidates for interdiction. Requires that no set within
/// `cap` reduces the rank.
pub fn reduce(inst: &Instance, cap: u64) -> Reduced {
    let Some(k) = critical_level(inst, cap) else {
        let useful = vec![false; inst.len()];
        return Reduced {
            inst: inst.clone(),
            useful,
            last_useful: None,
            levels: 0,
        };
    };
    let w = distinct_weights(inst);
    let keep = at_most(inst, w[k - 1]);
    let inst = inst.restrict(&keep);
    let useful: Vec<bool> = if k == 1 {
        vec![false; inst.len()]
    } else {
        at_most(&inst, w[k - 2])
    };
    Reduced {
        last_useful: useful.iter().rposition(|&u| u),
        inst,
        useful,
        levels: k,
    }
}

/// No reduction: every element stays a candidate.
pub fn unreduced(inst: &Instance) -> Reduced {
    let useful = vec![true; inst.len()];
    Reduced {
        last_useful: inst.len().checked_sub(1),
        inst: inst.clone(),
        useful,
        levels: distinct_weights(inst).len(),
    }
}

/// `Σ_{i<k} (w'_{i+1} - w'_i)(r(E) - r(E_{≤i} \ X))` with `w'_0 = 0` and
/// `E_{≤0} = ∅`. Equals the lex-min basis weight of `E \ X` whenever
/// `E_{≤k} \ X` has full rank.
pub fn telescoped_weight(inst: &Instance, x: &[usize], k: usize) -> i64 {
    let w = distinct_weights(inst);
    let full = inst.rank() as i64;
    let mut keep = vec![false; inst.len()];
    let mut total = 0i64;
    let mut prev = 0i64;
    for (i, &wi) in w.iter().take(k).enumerate() {
        if i > 0 {
            for (e, slot) in keep.iter_mut().enumerate() {
                *slot = inst.weights[e] <= w[i - 1] && !x.contains(&e);
            }
        }
        let r = inst.matroid.rank_of_mask(Some(&keep)) as i64;
        total += (wi - prev) * (full - r);
        prev = wi;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_raw, random_spec, subsets};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn levels_are_exact_by_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let m = rng.gen_range(1..=8);
            let spec = random_spec(&mut rng, m);
            let inst = random_raw(&mut rng, spec, 5, 3, 6).normalize().unwrap();
            let affordable: Vec<Vec<usize>> =
                subsets(inst.len()).filter(|x| inst.cost(x) <= inst.capacity).collect();
            let kills = affordable.iter().any(|x| inst.value(x).is_none());
            assert_eq!(kills, rank_reducing_set(&inst).is_some());
            if kills || inst.rank() == 0 {
                continue;
            }
            let w = distinct_weights(&inst);
            let k = critical_level(&inst, inst.capacity).unwrap();
            let full = |t: usize, x: &Vec<usize>| {
                let keep: Vec<bool> = (0..inst.len())
                    .map(|e| inst.weights[e] <= w[t - 1] && !x.contains(&e))
                    .collect();
                inst.matroid.rank_of_mask(Some(&keep)) == inst.rank()
            };
            assert!(affordable.iter().all(|x| full(k, x)));
            if k > 1 {
                assert!(affordable.iter().any(|x| !full(k - 1, x)));
            }
            // values only depend on the interdicted elements below the level
            let red = reduce(&inst, inst.capacity);
            for x in &affordable {
                let low: Vec<usize> = x.iter().copied().filter(|&e| k > 1 && inst.weights[e] <= w[k - 2]).collect();
                assert_eq!(inst.value(x), inst.value(&low));
                let kept: Vec<usize> = red.inst.from_original(&inst.to_original(x));
                if kept.len() == x.len() {
                    assert_eq!(red.inst.value(&kept), inst.value(x));
                }
                assert_eq!(Some(telescoped_weight(&inst, x, k)), inst.value(x));
            }
        }
    }

    #[test]
    fn telescoping_with_every_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let m = rng.gen_range(1..=8);
            let spec = random_spec(&mut rng, m);
            let mut raw = random_raw(&mut rng, spec, 6, 3, 6);
            raw.weights.iter_mut().for_each(|w| *w -= 3);
            let inst = raw.normalize().unwrap();
            let levels = distinct_weights(&inst).len();
            for x in subsets(inst.len()) {
                if let Some(v) = inst.value(&x) {
                    assert_eq!(telescoped_weight(&inst, &x, levels), v);
                }
            }
        }
    }
}
