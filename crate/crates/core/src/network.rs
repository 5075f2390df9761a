//! Directed broadcast networks: adjacency, reachability and solvability.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::star::IntMatrix;

/// Directed graph on nodes `0..k` without self-loops or parallel edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirectedNetwork {
    k: usize,
    edges: BTreeSet<(usize, usize)>,
    in_nbrs: Vec<Vec<usize>>,
    out_nbrs: Vec<Vec<usize>>,
}

impl DirectedNetwork {
    /// Builds a network; rejects self-loops, repeated edges and out-of-range endpoints.
    pub fn new(k: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= k || v >= k {
                return Err(Error::InvalidInstance(format!(
                    "edge ({}, {}) references a node outside 1..={k}",
                    u + 1,
                    v + 1
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop at node {}", u + 1)));
            }
            if !set.insert((u, v)) {
                return Err(Error::InvalidInstance(format!(
                    "parallel edge ({}, {})",
                    u + 1,
                    v + 1
                )));
            }
        }
        let mut in_nbrs = vec![Vec::new(); k];
        let mut out_nbrs = vec![Vec::new(); k];
        for &(u, v) in &set {
            out_nbrs[u].push(v);
            in_nbrs[v].push(u);
        }
        for l in &mut in_nbrs {
            l.sort_unstable();
        }
        Ok(DirectedNetwork {
            k,
            edges: set,
            in_nbrs,
            out_nbrs,
        })
    }

    /// Complete directed graph on `k` nodes.
    pub fn complete(k: usize) -> Self {
        let edges = (0..k).flat_map(|u| (0..k).filter(move |&v| v != u).map(move |v| (u, v)));
        Self::new(k, edges).expect("complete graph is simple")
    }

    /// Directed cycle `0 → 1 → … → k−1 → 0`.
    pub fn cycle(k: usize) -> Self {
        Self::new(k, (0..k).map(|u| (u, (u + 1) % k)).filter(|&(u, v)| u != v))
            .expect("cycle is simple")
    }

    pub fn node_count(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_nbrs[v]
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_nbrs[v]
    }

    /// Transposed adjacency matrix: entry `(i, j)` is 1 iff `j → i`.
    /// With `with_self_loops` the diagonal is forced to 1.
    pub fn adjacency(&self, with_self_loops: bool) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.k, self.k);
        for &(u, v) in &self.edges {
            d.set(v, u, 1);
        }
        if with_self_loops {
            for i in 0..self.k {
                d.set(i, i, 1);
            }
        }
        d
    }

    /// Smallest `r` with every entry of `D^r` positive (`D` with self-loops),
    /// or `None` if the network is not strongly connected.
    pub fn solvability_index(&self) -> Option<usize> {
        let d = self.adjacency(true);
        let mut power = IntMatrix::identity(self.k);
        for r in 0..=self.k {
            if power.all_positive() {
                return Some(r);
            }
            power = power.mul(&d).expect("square").support();
        }
        None
    }

    /// BFS distances from a set of sources to every node.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.k];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have a distance");
            for &v in &self.out_nbrs[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Length of the shortest directed path from any of `sources` to `target`.
    pub fn shortest_dist(&self, sources: &[usize], target: usize) -> Option<usize> {
        self.distances_from(sources)[target]
    }

    /// Largest shortest-path distance over ordered node pairs; `None` if some pair is unreachable.
    pub fn max_eccentricity(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.k {
            for d in self.distances_from(&[s]) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.max_eccentricity().is_some()
    }

    /// Every requested symbol is held by some node with a directed path to the requester.
    /// `possess[l]` and `request[l]` are 0-based symbol lists.
    pub fn is_feasible(&self, possess: &[BTreeSet<usize>], request: &[BTreeSet<usize>]) -> bool {
        self.first_infeasible(possess, request).is_none()
    }

    /// First `(node, symbol)` pair violating feasibility.
    pub fn first_infeasible(
        &self,
        possess: &[BTreeSet<usize>],
        request: &[BTreeSet<usize>],
    ) -> Option<(usize, usize)> {
        for (l, req) in request.iter().enumerate() {
            for &s in req {
                let holders: Vec<usize> = (0..self.k).filter(|&h| possess[h].contains(&s)).collect();
                if self.shortest_dist(&holders, l).is_none() {
                    return Some((l, s));
                }
            }
        }
        None
    }
}
