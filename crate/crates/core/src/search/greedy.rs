use std::cmp::Ordering;

use crate::instance::Instance;

/// Ratio `num / den` with `den > 0`, compared exactly.
#[derive(Clone, Copy, Debug)]
struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    fn cmp(self, other: Ratio) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Feasible interdiction set found by repeatedly interdicting the basis
/// element with the best weight gain per unit of cost along its
/// replacement chain. Returns the set and its value, `None` when the
/// instance has no basis to begin with.
pub fn greedy_lower_bound(inst: &Instance) -> (Vec<usize>, Option<i64>) {
    let mut x: Vec<usize> = Vec::new();
    let mut excluded = vec![false; inst.len()];
    let Some(mut y) = inst.matroid.lex_min_basis(&excluded) else {
        return (x, None);
    };
    loop {
        let residual = inst.capacity - inst.cost(&x);
        let mut best: Option<(Ratio, usize)> = None;
        for &e in &y {
            if inst.costs[e] > residual {
                continue;
            }
            let (chain, next) = inst
                .matroid
                .replacement_chain(&inst.costs, residual, &excluded, &y, e);
            let mut paid = 0u64;
            let mut eff: Option<Ratio> = None;
            for (i, &r) in chain.iter().enumerate() {
                paid += inst.costs[r];
                let rep = if i + 1 < chain.len() { Some(chain[i + 1]) } else { next };
                if let Some(rep) = rep {
                    let v = Ratio {
                        num: (inst.weights[rep] - inst.weights[e]) as i128,
                        den: paid as i128,
                    };
                    if eff.is_none_or(|b| v.cmp(b) == Ordering::Greater) {
                        eff = Some(v);
                    }
                }
            }
            if let Some(v) = eff {
                if best.is_none_or(|(b, _)| v.cmp(b) == Ordering::Greater) {
                    best = Some((v, e));
                }
            }
        }
        let Some((_, f)) = best else { break };
        x.push(f);
        excluded[f] = true;
        y = inst
            .matroid
            .lex_min_basis(&excluded)
            .expect("a chosen element always has a replacement");
    }
    let value = inst.weight(&y);
    x.sort_unstable();
    (x, Some(value))
}
