use matint::io::{parse, serialize};
use matint::oracle::{brute_force_blocker, brute_force_interdiction, min_basis, DEFAULT_CAP};
use matint::search::{solve_blocker, solve_blocker_by_bisection, solve_interdiction};
use matint::{Block, Error, MatroidSpec, Mode, Multigraph, RawInstance, SolverConfig};
use proptest::prelude::*;

fn cost() -> impl Strategy<Value = Option<u64>> {
    prop_oneof![9 => (0u64..8).prop_map(Some), 1 => Just(None)]
}

fn uniform() -> impl Strategy<Value = RawInstance> {
    (1usize..9).prop_flat_map(|m| {
        (0..=m, prop::collection::vec(-10i64..30, m), prop::collection::vec(cost(), m), 0u64..20)
            .prop_map(move |(k, w, c, cap)| RawInstance::new(MatroidSpec::Uniform { m, k }, w, c, cap))
    })
}

/// Blocks are contiguous so that element numbering survives a round trip.
fn partition() -> impl Strategy<Value = RawInstance> {
    prop::collection::vec((1usize..4, 0usize..4), 1..4).prop_flat_map(|sizes| {
        let m: usize = sizes.iter().map(|s| s.0).sum();
        let mut start = 0;
        let blocks: Vec<Block> = sizes
            .iter()
            .map(|&(len, cap)| {
                let b = Block {
                    elements: (start..start + len).collect(),
                    cap: cap.min(len),
                };
                start += len;
                b
            })
            .collect();
        (prop::collection::vec(-10i64..30, m), prop::collection::vec(cost(), m), 0u64..20)
            .prop_map(move |(w, c, cap)| RawInstance::new(MatroidSpec::Partition { blocks: blocks.clone() }, w, c, cap))
    })
}

/// Spanning path plus random extra edges, so the graph is connected.
fn graphic() -> impl Strategy<Value = RawInstance> {
    (2usize..6).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..6).prop_flat_map(move |extra| {
            let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
            edges.extend(extra.iter().filter(|(u, v)| u != v));
            let m = edges.len();
            let edges = edges.clone();
            (prop::collection::vec(-10i64..30, m), prop::collection::vec(cost(), m), 0u64..20).prop_map(
                move |(w, c, cap)| {
                    RawInstance::new(
                        MatroidSpec::Graphic {
                            graph: Multigraph::new(n, edges.clone()),
                        },
                        w,
                        c,
                        cap,
                    )
                },
            )
        })
    })
}

fn any_instance() -> impl Strategy<Value = RawInstance> {
    prop_oneof![uniform(), partition(), graphic()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_round_trip(raw in any_instance(), target in prop::option::of(-5i64..50)) {
        let raw = RawInstance { target, ..raw };
        let text = serialize(&raw).unwrap();
        prop_assert_eq!(parse(&text).unwrap(), raw);
    }

    #[test]
    fn solver_matches_enumeration(raw in any_instance(), nobounds in any::<bool>()) {
        let inst = raw.normalize().unwrap();
        let cfg = SolverConfig {
            mode: if nobounds { Mode::NoBounds } else { Mode::BoundsFirst },
            max_prefix_bits: 3,
            ..SolverConfig::default()
        };
        let sol = solve_interdiction(&inst, &cfg).unwrap();
        let truth = brute_force_interdiction(&raw, DEFAULT_CAP).unwrap();
        prop_assert_eq!(sol.value, truth.value);
        prop_assert!(sol.proven_optimal);
        let spent: u64 = sol.interdicted.iter().map(|&e| raw.costs[e].unwrap()).sum();
        prop_assert!(spent <= raw.capacity);
        let mut removed = vec![false; raw.len()];
        sol.interdicted.iter().for_each(|&e| removed[e] = true);
        let reached = min_basis(&raw, &removed).map(|b| b.iter().map(|&e| raw.weights[e]).sum::<i64>());
        prop_assert_eq!(reached, sol.value);
    }

    #[test]
    fn blocker_is_cheapest(raw in any_instance(), lift in 0i64..25) {
        let inst = raw.normalize().unwrap();
        prop_assume!(inst.rank() > 0);
        let target = inst.value(&[]).unwrap() + lift;
        let cfg = SolverConfig::default();
        match (solve_blocker(&inst, target, &cfg), brute_force_blocker(&raw, target, DEFAULT_CAP)) {
            (Ok(sol), Ok(truth)) => {
                prop_assert_eq!(sol.cost, truth.cost);
                prop_assert!(sol.value.is_none_or(|v| v >= target));
                let by_bisection = solve_blocker_by_bisection(&inst, target, &cfg).unwrap();
                prop_assert_eq!(by_bisection.cost, truth.cost);
            }
            (Err(Error::Unreachable(_)), Err(Error::Unreachable(_))) => {
                prop_assert!(matches!(solve_blocker_by_bisection(&inst, target, &cfg), Err(Error::Unreachable(_))));
            }
            (a, b) => prop_assert!(false, "solver {:?} vs enumeration {:?}", a.map(|s| s.cost), b.map(|s| s.cost)),
        }
    }
}

#[test]
fn rank_zero_blocker() {
    let raw = RawInstance::new(MatroidSpec::Uniform { m: 2, k: 0 }, vec![1, 2], vec![Some(1), Some(1)], 0);
    let inst = raw.normalize().unwrap();
    let cfg = SolverConfig::default();
    assert!(matches!(solve_blocker(&inst, 1, &cfg), Err(Error::Unreachable(1))));
    assert!(matches!(brute_force_blocker(&raw, 1, DEFAULT_CAP), Err(Error::Unreachable(1))));
    assert_eq!(solve_blocker(&inst, 0, &cfg).unwrap().cost, 0);
    assert_eq!(brute_force_blocker(&raw, 0, DEFAULT_CAP).unwrap().cost, 0);
}
