//! Fixed instance families shared by the benchmarks.

use matint::generate::{generate_comb, generate_random, random_knapsack, GenParams};
use matint::Instance;

/// Complete graph on `n` vertices with the default weight and cost ranges.
pub fn complete_graph(n: usize, seed: u64) -> Instance {
    let p = GenParams {
        n,
        density: 1.0,
        gamma: 1.0,
        c_max: 100,
        w_max: 10_000,
        seed,
    };
    generate_random(&p).expect("valid parameters").raw.normalize().expect("connected")
}

pub fn comb(k: usize) -> Instance {
    generate_comb(k, 100).normalize().expect("comb instance")
}

pub fn knapsack(n: usize, seed: u64) -> Instance {
    let cap = 5 * n as u64;
    random_knapsack(n, 20, 30, cap, seed).0.normalize().expect("knapsack instance")
}
