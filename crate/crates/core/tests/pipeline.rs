use std::collections::BTreeSet;

use dissem::bounds::{dmax, lower_bound, partition_upper_bound, BoundCaps};
use dissem::multiround::{required_rounds, schedule, MultiRoundScheme};
use dissem::one_round::{decode, recombine, solve_exact, solve_heuristic};
use dissem::sim::execute;
use dissem::{DirectedNetwork, DisseminationInstance, Error, Field, FieldMatrix, Gf2, Gf3, SearchCaps, Strategy};
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

/// `t` transmitters holding everything, receiver `i` wants `x_i` and holds `side[i]`.
fn bipartite(q: u32, t: usize, side: &[BTreeSet<usize>], links: &[(usize, usize)]) -> DisseminationInstance {
    let n = side.len();
    let net = DirectedNetwork::new(t + n, links.iter().map(|&(a, s)| (a, t + s))).unwrap();
    let mut possess: Vec<BTreeSet<usize>> = vec![(0..n).collect(); t];
    possess.extend(side.iter().cloned());
    let mut request = vec![BTreeSet::new(); t];
    request.extend((0..n).map(|s| BTreeSet::from([s])));
    DisseminationInstance::new(q, n, net, possess, request).unwrap()
}

fn bipartite_instance(q: u32) -> impl proptest::strategy::Strategy<Value = DisseminationInstance> {
    (1usize..=2, 2usize..=4).prop_flat_map(move |(t, n)| {
        let side = proptest::collection::vec(any::<u8>(), n);
        let links = proptest::collection::vec((1u8..(1 << t), any::<u8>()), n);
        (Just(t), Just(n), side, links).prop_map(move |(t, n, side, links)| {
            let side: Vec<BTreeSet<usize>> = side
                .iter()
                .enumerate()
                .map(|(i, m)| (0..n).filter(|&j| j != i && m >> j & 1 == 1).collect())
                .collect();
            // every receiver hears at least one transmitter
            let links: Vec<(usize, usize)> = links
                .iter()
                .enumerate()
                .flat_map(|(s, &(mask, _))| (0..t).filter(move |a| mask >> a & 1 == 1).map(move |a| (a, s)))
                .collect();
            bipartite(q, t, &side, &links)
        })
    })
}

/// Strongly connected network, possession covering every symbol, requests complementing it.
fn complete_demand_instance() -> impl proptest::strategy::Strategy<Value = DisseminationInstance> {
    (2usize..=4, 1usize..=4).prop_flat_map(|(k, n)| {
        let order = Just((0..k).collect::<Vec<_>>()).prop_shuffle();
        let extra = proptest::collection::vec(any::<bool>(), k * k);
        let owners = proptest::collection::vec(1u64..(1 << k), n);
        (Just(k), Just(n), order, extra, owners).prop_map(|(k, n, order, extra, owners)| {
            let mut edges: BTreeSet<(usize, usize)> = (0..k).map(|i| (order[i], order[(i + 1) % k])).collect();
            for u in 0..k {
                for v in 0..k {
                    if u != v && extra[u * k + v] {
                        edges.insert((u, v));
                    }
                }
            }
            let possess: Vec<BTreeSet<usize>> = (0..k)
                .map(|l| (0..n).filter(|&s| owners[s] >> l & 1 == 1).collect())
                .collect();
            let request = possess.iter().map(|p| (0..n).filter(|s| !p.contains(s)).collect()).collect();
            DisseminationInstance::new(2, n, DirectedNetwork::new(k, edges).unwrap(), possess, request).unwrap()
        })
    })
}

fn assert_one_round_decodes<F: Field>(inst: &DisseminationInstance, scheme: &dissem::TransmissionScheme<F>) {
    for l in 0..inst.node_count() {
        for &eta in inst.request(l) {
            let d = decode(inst, scheme, l, eta).unwrap();
            assert_eq!(recombine(inst, scheme, l, &d), FieldMatrix::<F>::unit(inst.symbol_count(), eta));
        }
    }
}

#[test]
fn five_node_end_to_end() {
    let net = DirectedNetwork::new(5, [(0, 2), (0, 3), (1, 2), (1, 3), (1, 4)]).unwrap();
    let set = |s: &[usize]| s.iter().copied().collect::<BTreeSet<_>>();
    let inst = DisseminationInstance::new(
        2,
        3,
        net,
        vec![set(&[0, 1]), set(&[1, 2]), set(&[0]), set(&[1]), set(&[0, 2])],
        vec![set(&[]), set(&[]), set(&[1, 2]), set(&[0, 2]), set(&[1])],
    )
    .unwrap();
    let r = solve_exact::<Gf2>(&inst, &SearchCaps::default()).unwrap();
    assert_eq!(r.tau, 2);
    assert_eq!(dmax(&inst).unwrap(), 2);
    assert_one_round_decodes(&inst, &r.scheme);
    let t = execute(&inst, &MultiRoundScheme::from(r.scheme)).unwrap();
    assert!(t.all_satisfied);
}

#[test]
fn two_hop_path_needs_two_rounds() {
    let net = DirectedNetwork::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let inst = DisseminationInstance::new(
        2,
        1,
        net,
        vec![BTreeSet::from([0]), BTreeSet::new(), BTreeSet::new()],
        vec![BTreeSet::new(), BTreeSet::from([0]), BTreeSet::from([0])],
    )
    .unwrap();
    assert!(matches!(solve_exact::<Gf2>(&inst, &SearchCaps::default()), Err(Error::NotOneRoundSolvable { node: 3, symbol: 1 })));
    assert_eq!(required_rounds(&inst).unwrap(), 2);
    let s = schedule::<Gf2>(&inst, 2, Strategy::Exact, &SearchCaps::default()).unwrap();
    assert_eq!(s.round_tau(), &[1, 1]);
    assert!(execute(&inst, &s).unwrap().all_satisfied);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bipartite_sandwich(inst in bipartite_instance(2)) {
        let caps = BoundCaps::default();
        let exact = solve_exact::<Gf2>(&inst, &SearchCaps::default()).unwrap();
        let lower = lower_bound(&inst).unwrap();
        let upper = partition_upper_bound(&inst, &caps).unwrap();
        prop_assert!(lower <= exact.tau);
        prop_assert!(exact.tau <= upper.minrank_sum.unwrap());
        prop_assert!(upper.minrank_sum.unwrap() <= upper.clc_sum);
        assert_one_round_decodes(&inst, &exact.scheme);
        let heur = solve_heuristic::<Gf2>(&inst, 3, 16).unwrap();
        prop_assert!(heur.tau >= exact.tau);
        assert_one_round_decodes(&inst, &heur.scheme);
    }

    #[test]
    fn bipartite_sandwich_gf3(inst in bipartite_instance(3)) {
        let exact = solve_exact::<Gf3>(&inst, &SearchCaps::default()).unwrap();
        prop_assert!(lower_bound(&inst).unwrap() <= exact.tau);
        prop_assert!(exact.tau <= partition_upper_bound(&inst, &BoundCaps::default()).unwrap().clc_sum);
        assert_one_round_decodes(&inst, &exact.scheme);
    }

    #[test]
    fn schedules_pass_the_simulator(inst in complete_demand_instance()) {
        let r0 = required_rounds(&inst).unwrap();
        let lower = dmax(&inst).unwrap();
        let mut exact_tau = None;
        for strategy in [Strategy::Exact, Strategy::Flood, Strategy::Random { samples: 8, seed: 1 }] {
            let s = schedule::<Gf2>(&inst, r0, strategy, &SearchCaps::default()).unwrap();
            let t = execute(&inst, &s).unwrap();
            prop_assert!(t.all_satisfied);
            for rec in &t.recovery {
                prop_assert_eq!(t.recombine(rec).unwrap(), FieldMatrix::<Gf2>::unit(inst.symbol_count(), rec.symbol - 1));
            }
            prop_assert!(s.tau_total() >= lower);
            match strategy {
                Strategy::Exact => exact_tau = Some(s.tau_total()),
                _ => prop_assert!(s.tau_total() >= exact_tau.unwrap()),
            }
        }
        // more rounds than needed still works
        let s = schedule::<Gf2>(&inst, r0 + 1, Strategy::Exact, &SearchCaps::default()).unwrap();
        prop_assert!(execute(&inst, &s).unwrap().all_satisfied);
    }
}
