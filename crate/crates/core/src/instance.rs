//! Dissemination instances: a network, a field, and per-node possession and
//! request sets. Indices are 0-based here; files and reports are 1-based.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::field::{Field, FieldMatrix};
use crate::network::DirectedNetwork;
use crate::star::StarMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisseminationInstance {
    q: u32,
    n: usize,
    net: DirectedNetwork,
    possess: Vec<BTreeSet<usize>>,
    request: Vec<BTreeSet<usize>>,
}

/// Transmitter/receiver split of a bipartite instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteRoles {
    pub transmitters: Vec<usize>,
    /// `receiver_of[s]` is the node requesting symbol `s`.
    pub receiver_of: Vec<usize>,
}

impl DisseminationInstance {
    pub fn new(
        q: u32,
        n: usize,
        net: DirectedNetwork,
        possess: Vec<BTreeSet<usize>>,
        request: Vec<BTreeSet<usize>>,
    ) -> Result<Self> {
        let k = net.node_count();
        if q < 2 || !(2..q).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d)) {
            return Err(Error::InvalidInstance(format!("field size {q} is not prime")));
        }
        if possess.len() != k || request.len() != k {
            return Err(Error::InvalidInstance(format!(
                "expected possession and request sets for {k} nodes"
            )));
        }
        for l in 0..k {
            if let Some(&s) = possess[l].iter().chain(&request[l]).find(|&&s| s >= n) {
                return Err(Error::InvalidInstance(format!(
                    "node {} references symbol {} outside 1..={n}",
                    l + 1,
                    s + 1
                )));
            }
            if let Some(&s) = possess[l].intersection(&request[l]).next() {
                return Err(Error::InvalidInstance(format!(
                    "node {} both holds and requests x{}",
                    l + 1,
                    s + 1
                )));
            }
        }
        Ok(DisseminationInstance {
            q,
            n,
            net,
            possess,
            request,
        })
    }

    pub fn field_order(&self) -> u32 {
        self.q
    }

    pub fn symbol_count(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.net.node_count()
    }

    pub fn network(&self) -> &DirectedNetwork {
        &self.net
    }

    pub fn possess(&self, l: usize) -> &BTreeSet<usize> {
        &self.possess[l]
    }

    pub fn request(&self, l: usize) -> &BTreeSet<usize> {
        &self.request[l]
    }

    pub fn possess_sets(&self) -> &[BTreeSet<usize>] {
        &self.possess
    }

    pub fn request_sets(&self) -> &[BTreeSet<usize>] {
        &self.request
    }

    /// Nodes initially holding symbol `s`.
    pub fn holders(&self, s: usize) -> Vec<usize> {
        (0..self.node_count()).filter(|&l| self.possess[l].contains(&s)).collect()
    }

    pub fn has_requests(&self) -> bool {
        self.request.iter().any(|r| !r.is_empty())
    }

    pub fn is_feasible(&self) -> bool {
        self.net.is_feasible(&self.possess, &self.request)
    }

    pub(crate) fn check_field<F: Field>(&self) -> Result<()> {
        if F::ORDER != self.q {
            return Err(Error::FieldMismatch {
                solver: F::ORDER,
                instance: self.q,
            });
        }
        Ok(())
    }

    /// Compact possession family: row `l` has ★ exactly on the symbols node `l` holds.
    /// The full `(kn) × n` family is `repeat_rows(n)` of this.
    pub fn possession_family<F: Field>(&self) -> StarMatrix<F> {
        StarMatrix::from_pattern(self.node_count(), self.n, |l, s| self.possess[l].contains(&s))
    }

    /// `n × n` 0/1 diagonal marking the symbols node `l` holds.
    pub fn possession_diag<F: Field>(&self, l: usize) -> FieldMatrix<F> {
        diag_of(self.n, &self.possess[l])
    }

    /// `n × n` 0/1 diagonal marking the symbols node `l` requests.
    pub fn query_diag<F: Field>(&self, l: usize) -> FieldMatrix<F> {
        diag_of(self.n, &self.request[l])
    }

    /// Requires every node to hold or request each symbol.
    pub fn check_demand_complete(&self) -> Result<()> {
        for l in 0..self.node_count() {
            if self.possess[l].len() + self.request[l].len() != self.n {
                return Err(Error::IncompleteDemand(l + 1));
            }
        }
        Ok(())
    }

    /// Splits the nodes into transmitters (hold everything, request nothing,
    /// no incoming edges) and exactly `n` receivers, each requesting one distinct
    /// symbol, fed only by transmitters. At least one transmitter is required.
    pub fn bipartite_roles(&self) -> Option<BipartiteRoles> {
        let k = self.node_count();
        let mut transmitters = Vec::new();
        let mut receiver_of = vec![None; self.n];
        let mut receivers = BTreeSet::new();
        for l in 0..k {
            if self.possess[l].len() == self.n && self.request[l].is_empty() {
                if !self.net.in_neighbors(l).is_empty() {
                    return None;
                }
                transmitters.push(l);
            } else if self.request[l].len() == 1 {
                let s = *self.request[l].iter().next().expect("one element");
                if receiver_of[s].replace(l).is_some() || !self.net.out_neighbors(l).is_empty() {
                    return None;
                }
                receivers.insert(l);
            } else {
                return None;
            }
        }
        if transmitters.is_empty() || receivers.len() != self.n {
            return None;
        }
        if self.net.edges().any(|(u, _)| receivers.contains(&u)) {
            return None;
        }
        Some(BipartiteRoles {
            transmitters,
            receiver_of: receiver_of.into_iter().map(|r| r.expect("all symbols assigned")).collect(),
        })
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartite_roles().is_some()
    }

    /// Side-information graph on the receivers, identified with the symbols
    /// they request: edge `(i, j)` when the receiver of `x_i` holds `x_j`.
    pub fn side_info_graph(&self) -> Result<SideInfoGraph> {
        let roles = self.bipartite_roles().ok_or(Error::NotBipartite)?;
        let edges = (0..self.n).flat_map(|i| {
            self.possess[roles.receiver_of[i]].iter().map(move |&j| (i, j))
        });
        SideInfoGraph::new(self.n, edges)
    }
}

fn diag_of<F: Field>(n: usize, set: &BTreeSet<usize>) -> FieldMatrix<F> {
    let rows = (0..n)
        .map(|i| {
            let mut r = vec![F::zero(); n];
            if set.contains(&i) {
                r[i] = F::one();
            }
            r
        })
        .collect();
    FieldMatrix::from_rows(n, rows).expect("square")
}

/// Directed graph on `n ≤ 64` vertices stored as adjacency bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SideInfoGraph {
    n: usize,
    out: Vec<u64>,
}

impl SideInfoGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > 64 {
            return Err(Error::InvalidInstance(format!("side-information graph too large ({n} > 64)")));
        }
        let mut out = vec![0u64; n];
        for (i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidInstance(format!("bad side-information edge ({}, {})", i + 1, j + 1)));
            }
            out[i] |= 1 << j;
        }
        Ok(SideInfoGraph { n, out })
    }

    /// Undirected graph given as a symmetric edge list.
    pub fn undirected(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let e: Vec<(usize, usize)> = edges.into_iter().flat_map(|(a, b)| [(a, b), (b, a)]).collect();
        Self::new(n, e)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = SideInfoGraph { n, out: vec![0; n] };
        for i in 0..n {
            g.out[i] = full_mask(n) & !(1 << i);
        }
        g
    }

    pub fn empty(n: usize) -> Self {
        SideInfoGraph { n, out: vec![0; n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out[i] >> j & 1 == 1
    }

    pub fn out_mask(&self, i: usize) -> u64 {
        self.out[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(i, j)| self.has_edge(j, i))
    }

    /// Undirected adjacency where `i ~ j` if either direction is present.
    pub fn any_direction(&self) -> Vec<u64> {
        (0..self.n)
            .map(|i| self.out[i] | (0..self.n).filter(|&j| self.has_edge(j, i)).fold(0, |m, j| m | 1 << j))
            .collect()
    }

    /// Undirected adjacency where `i ~ j` only if both directions are present.
    pub fn both_directions(&self) -> Vec<u64> {
        (0..self.n)
            .map(|i| (0..self.n).filter(|&j| self.has_edge(i, j) && self.has_edge(j, i)).fold(0, |m, j| m | 1 << j))
            .collect()
    }

    /// Subgraph induced on `vertices` (renumbered in the given order).
    pub fn induced(&self, vertices: &[usize]) -> SideInfoGraph {
        let mut out = vec![0u64; vertices.len()];
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate() {
                if self.has_edge(u, v) {
                    out[a] |= 1 << b;
                }
            }
        }
        SideInfoGraph { n: vertices.len(), out }
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
