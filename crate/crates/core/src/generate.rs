//! Instance generators.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{global_min_cut, Multigraph};
use crate::instance::RawInstance;
use crate::matroid::MatroidSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    pub density: f64,
    pub gamma: f64,
    pub c_max: u64,
    pub w_max: i64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub raw: RawInstance,
    /// Edge sets drawn and thrown away for being disconnected.
    pub resamples: usize,
    /// Cost of the global minimum cut.
    pub min_cut: u64,
}

/// Random simple graph with `⌊d·n(n-1)/2⌋` edges, redrawn until connected,
/// weights in `[1, w_max]`, costs in `[1, c_max]` and capacity
/// `⌊γ(mincut - 1)⌋`.
pub fn generate_random(p: &GenParams) -> Result<Generated> {
    if p.n < 2 {
        return Err(Error::InvalidInstance("random instances need at least two vertices".into()));
    }
    if p.c_max < 1 || p.w_max < 1 {
        return Err(Error::InvalidInstance("c_max and w_max must be positive".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..p.n).flat_map(|u| (u + 1..p.n).map(move |v| (u, v))).collect();
    let m = (p.density * pairs.len() as f64).floor() as usize;
    if m < p.n - 1 || m > pairs.len() {
        return Err(Error::InvalidInstance(format!(
            "density {} gives {m} edges, need between {} and {}",
            p.density,
            p.n - 1,
            pairs.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut resamples = 0;
    let graph = loop {
        let mut picked = sample(&mut rng, pairs.len(), m).into_vec();
        picked.sort_unstable();
        let g = Multigraph::new(p.n, picked.into_iter().map(|i| pairs[i]).collect());
        if g.is_connected(None) {
            break g;
        }
        resamples += 1;
    };
    let weights: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=p.w_max)).collect();
    let costs: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=p.c_max)).collect();
    let caps: Vec<Option<u64>> = costs.iter().map(|&c| Some(c)).collect();
    let min_cut = global_min_cut(&graph, &caps, None).value.expect("finite capacities");
    let capacity = (p.gamma * (min_cut - 1) as f64).floor() as u64;
    let raw = RawInstance::new(
        MatroidSpec::Graphic { graph },
        weights,
        costs.into_iter().map(Some).collect(),
        capacity,
    );
    Ok(Generated { raw, resamples, min_cut })
}

/// `k` parallel triples in series, each with weights `0, 1, M` and costs
/// `k - 1, 1, ∞`; capacity `2k - 1`. The optimum is `M + 1`.
pub fn generate_comb(k: usize, big: i64) -> RawInstance {
    let mut edges = Vec::with_capacity(3 * k);
    let mut weights = Vec::with_capacity(3 * k);
    let mut costs = Vec::with_capacity(3 * k);
    for j in 0..k {
        for (w, c) in [(0, Some(k as u64 - 1)), (1, Some(1)), (big, None)] {
            edges.push((j, j + 1));
            weights.push(w);
            costs.push(c);
        }
    }
    RawInstance::new(
        MatroidSpec::Graphic {
            graph: Multigraph::new(k + 1, edges),
        },
        weights,
        costs,
        2 * k as u64 - 1,
    )
}

/// Four-vertex instance on which the greedy heuristic interdicts only the
/// weight-1 cost-2 edge (value 4) while the optimum is `M + 2`.
pub fn generate_greedy_gap(big: i64) -> RawInstance {
    let edges = vec![(0, 1), (1, 2), (2, 3), (0, 2), (2, 3), (1, 3)];
    RawInstance::new(
        MatroidSpec::Graphic {
            graph: Multigraph::new(4, edges),
        },
        vec![0, 0, 1, 1, 4, big],
        vec![Some(1), Some(1), Some(2), None, None, None],
        2,
    )
}

/// Uniform interdiction instance whose optimum is `Σ(p_max - p_e)` plus the
/// best knapsack profit with weights `a` and capacity `cap`.
pub fn generate_knapsack(a: &[u64], p: &[i64], cap: u64) -> RawInstance {
    assert_eq!(a.len(), p.len(), "one weight per profit");
    let n = a.len();
    let p_max = p.iter().copied().max().unwrap_or(0);
    let mut weights: Vec<i64> = p.iter().map(|&pe| p_max - pe).collect();
    let mut costs: Vec<Option<u64>> = a.iter().map(|&c| Some(c)).collect();
    weights.extend(std::iter::repeat_n(p_max, n));
    costs.extend(std::iter::repeat_n(Some(cap + 1), n));
    RawInstance::new(MatroidSpec::Uniform { m: 2 * n, k: n }, weights, costs, cap)
}

/// Knapsack reduction over `n` random items with weights in `[1, a_max]`
/// and profits in `[0, p_max]`. Returns the instance with the items.
pub fn random_knapsack(n: usize, a_max: u64, p_max: i64, cap: u64, seed: u64) -> (RawInstance, Vec<u64>, Vec<i64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=a_max.max(1))).collect();
    let p: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=p_max.max(0))).collect();
    (generate_knapsack(&a, &p, cap), a, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_interdiction, DEFAULT_CAP};
    use crate::search::greedy_lower_bound;

    #[test]
    fn random_is_deterministic_and_sized() {
        let p = GenParams {
            n: 10,
            density: 1.0,
            gamma: 0.5,
            c_max: 10,
            w_max: 100,
            seed: 7,
        };
        let a = generate_random(&p).unwrap();
        let b = generate_random(&p).unwrap();
        assert_eq!(a.raw, b.raw);
        assert_eq!(a.raw.len(), 45);
        assert_eq!(a.raw.capacity, (0.5 * (a.min_cut - 1) as f64).floor() as u64);
        let sparse = generate_random(&GenParams { n: 7, density: 0.5, ..p }).unwrap();
        assert_eq!(sparse.raw.len(), 10);
        assert!(sparse.raw.check().is_ok());
        let zero = generate_random(&GenParams { gamma: 0.0, ..p }).unwrap();
        assert_eq!(zero.raw.capacity, 0);
        assert!(generate_random(&GenParams { n: 1, ..p }).is_err());
    }

    #[test]
    fn comb_optimum_by_enumeration() {
        for k in 2..=4 {
            for big in [5, 10] {
                let raw = generate_comb(k, big);
                let s = brute_force_interdiction(&raw, DEFAULT_CAP).unwrap();
                assert_eq!(s.value, Some(big + 1), "k={k} M={big}");
                // heaviest spanning tree takes one M edge per triple
                let mut neg = raw.clone();
                neg.weights.iter_mut().for_each(|w| *w = -*w);
                let heavy = crate::oracle::min_basis(&neg, &vec![false; raw.len()]).unwrap();
                assert_eq!(heavy.iter().map(|&e| raw.weights[e]).sum::<i64>(), k as i64 * big);
            }
        }
    }

    #[test]
    fn greedy_gap_instance() {
        for big in [10, 50] {
            let raw = generate_greedy_gap(big);
            let s = brute_force_interdiction(&raw, DEFAULT_CAP).unwrap();
            assert_eq!(s.value, Some(big + 2));
            assert_eq!(s.interdicted, vec![0, 1]);
            let inst = raw.normalize().unwrap();
            let (x, v) = greedy_lower_bound(&inst);
            assert_eq!(v, Some(4));
            assert_eq!(inst.to_original(&x), vec![2]);
        }
    }

    #[test]
    fn knapsack_layout() {
        let raw = generate_knapsack(&[2, 3], &[5, 1], 4);
        assert_eq!(raw.weights, vec![0, 4, 5, 5]);
        assert_eq!(raw.costs, vec![Some(2), Some(3), Some(5), Some(5)]);
        let s = brute_force_interdiction(&raw, DEFAULT_CAP).unwrap();
        assert_eq!(s.value, Some(4 + 5));
    }
}
