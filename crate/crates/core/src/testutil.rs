//! Random instances and exhaustive evaluation shared by unit tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Multigraph;
use crate::instance::{Instance, RawInstance};
use crate::matroid::{Block, MatroidSpec};

pub fn random_graph(rng: &mut ChaCha8Rng, m: usize, max_n: usize) -> Multigraph {
    loop {
        let n = rng.gen_range(1..=max_n);
        let edges = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        let g = Multigraph::new(n, edges);
        if g.is_connected(None) {
            return g;
        }
    }
}

pub fn random_partition(rng: &mut ChaCha8Rng, m: usize, max_blocks: usize) -> MatroidSpec {
    let mut elems: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        elems.swap(i, rng.gen_range(0..=i));
    }
    let mut blocks = Vec::new();
    let mut rest = &elems[..];
    while !rest.is_empty() {
        let take = if blocks.len() + 1 == max_blocks {
            rest.len()
        } else {
            rng.gen_range(1..=rest.len())
        };
        let cap = rng.gen_range(0..=take);
        blocks.push(Block { elements: rest[..take].to_vec(), cap });
        rest = &rest[take..];
    }
    MatroidSpec::Partition { blocks }
}

pub fn random_spec(rng: &mut ChaCha8Rng, m: usize) -> MatroidSpec {
    match rng.gen_range(0..4) {
        0 => MatroidSpec::Uniform { m, k: rng.gen_range(0..=m) },
        1 => random_partition(rng, m, usize::MAX),
        2 => MatroidSpec::Graphic {
            graph: random_graph(rng, m, 5),
        },
        _ => {
            let split = rng.gen_range(0..=m);
            MatroidSpec::DirectSum {
                parts: vec![
                    MatroidSpec::Uniform { m: split, k: rng.gen_range(0..=split) },
                    random_spec(rng, m - split),
                ],
            }
        }
    }
}

pub fn random_raw(rng: &mut ChaCha8Rng, spec: MatroidSpec, max_w: i64, max_c: u64, max_cap: u64) -> RawInstance {
    let m = spec.len();
    RawInstance::new(
        spec,
        (0..m).map(|_| rng.gen_range(0..=max_w)).collect(),
        (0..m).map(|_| Some(rng.gen_range(1..=max_c))).collect(),
        rng.gen_range(0..=max_cap),
    )
}

pub fn subsets(m: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << m).map(move |mask| (0..m).filter(|&e| mask >> e & 1 == 1).collect())
}

/// Best F over affordable sets, `None` meaning some affordable set kills
/// every basis.
pub fn brute_opt(inst: &Instance) -> Option<i64> {
    let mut best = inst.value(&[]);
    for x in subsets(inst.len()) {
        if inst.cost(&x) <= inst.capacity {
            {
                let v = inst.value(&x)?;
                best = best.map(|b| b.max(v))
            }
        }
    }
    best
}
