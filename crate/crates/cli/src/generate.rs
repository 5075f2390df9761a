//! Random instances with a prescribed solvability index.
//!
//! Networks are a random spanning cycle plus extra arcs, each present with a
//! density drawn afresh per attempt; a draw is kept iff its solvability index
//! is exactly the target. Every symbol goes to a uniformly random nonempty set
//! of nodes and every node requests what it lacks.

use std::collections::BTreeSet;

use dissem::{DirectedNetwork, DisseminationInstance, Error};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RETRY_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub nodes: usize,
    pub symbols: usize,
    pub diameter: usize,
    pub field: u32,
}

/// Strongly connected network on `k` nodes with solvability index `d`.
pub fn random_network(k: usize, d: usize, rng: &mut impl Rng) -> Result<DirectedNetwork, Error> {
    let reachable = if k <= 1 { d == 0 } else { (1..k).contains(&d) };
    if !reachable {
        return Err(Error::GenerationFailed(format!(
            "no network on {k} nodes has solvability index {d}"
        )));
    }
    for _ in 0..RETRY_BUDGET {
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(rng);
        let mut edges: BTreeSet<(usize, usize)> = (0..k)
            .filter(|_| k > 1)
            .map(|i| (order[i], order[(i + 1) % k]))
            .collect();
        let density: f64 = rng.gen();
        for u in 0..k {
            for v in 0..k {
                if u != v && rng.gen_bool(density) {
                    edges.insert((u, v));
                }
            }
        }
        let net = DirectedNetwork::new(k, edges)?;
        if net.solvability_index() == Some(d) {
            return Ok(net);
        }
    }
    Err(Error::GenerationFailed(format!(
        "no network with solvability index {d} after {RETRY_BUDGET} attempts"
    )))
}

/// Possession sets with every symbol held somewhere and at least one request.
fn random_possession(k: usize, n: usize, rng: &mut impl Rng) -> Result<Vec<BTreeSet<usize>>, Error> {
    for _ in 0..RETRY_BUDGET {
        let mut possess = vec![BTreeSet::new(); k];
        for s in 0..n {
            let mask: u64 = rng.gen_range(1..1u64 << k);
            for (l, p) in possess.iter_mut().enumerate() {
                if mask >> l & 1 == 1 {
                    p.insert(s);
                }
            }
        }
        if possess.iter().any(|p| p.len() < n) {
            return Ok(possess);
        }
    }
    Err(Error::GenerationFailed(format!(
        "every draw gave all {n} symbols to all {k} nodes"
    )))
}

pub fn random_instance(p: &GenParams, rng: &mut impl Rng) -> Result<DisseminationInstance, Error> {
    if p.nodes == 0 || p.nodes > 63 || p.symbols == 0 {
        return Err(Error::GenerationFailed("need 1..=63 nodes and at least one symbol".into()));
    }
    let net = random_network(p.nodes, p.diameter, rng)?;
    let possess = random_possession(p.nodes, p.symbols, rng)?;
    let request = possess
        .iter()
        .map(|have| (0..p.symbols).filter(|s| !have.contains(s)).collect())
        .collect();
    DisseminationInstance::new(p.field, p.symbols, net, possess, request)
}

/// `count` instances drawn in order from one stream seeded with `seed`.
pub fn corpus(p: &GenParams, count: usize, seed: u64) -> Result<Vec<DisseminationInstance>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(p, &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const K4D2: GenParams = GenParams {
        nodes: 4,
        symbols: 4,
        diameter: 2,
        field: 2,
    };

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(corpus(&K4D2, 10, 5).unwrap(), corpus(&K4D2, 10, 5).unwrap());
        assert_ne!(corpus(&K4D2, 10, 5).unwrap(), corpus(&K4D2, 10, 6).unwrap());
    }

    #[test]
    fn instances_meet_the_contract() {
        for d in [1, 2, 3] {
            let p = GenParams { diameter: d, ..K4D2 };
            for inst in corpus(&p, 30, d as u64).unwrap() {
                assert_eq!(inst.network().solvability_index(), Some(d));
                assert!(inst.is_feasible());
                inst.check_demand_complete().unwrap();
                assert!(inst.has_requests());
                let held: BTreeSet<usize> = inst.possess_sets().iter().flatten().copied().collect();
                assert_eq!(held.len(), 4);
            }
        }
    }

    #[test]
    fn unreachable_diameter_fails_loudly() {
        let p = GenParams { diameter: 4, ..K4D2 };
        assert!(matches!(corpus(&p, 1, 0), Err(Error::GenerationFailed(_))));
        let p = GenParams { nodes: 1, diameter: 0, ..K4D2 };
        assert!(matches!(corpus(&p, 1, 0), Err(Error::GenerationFailed(_))));
    }
}
