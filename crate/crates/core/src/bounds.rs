//! Graph-theoretic bounds for bipartite instances and the distance lower bound
//! for general ones.
//!
//! For a side-information graph `H` on `n` receivers:
//! `α(H) ≤ minrank₂(H) ≤ clc(H)`. On a directed graph `α` is taken on the
//! graph where `i ~ j` if either arc is present, and `clc` on the graph where
//! both arcs must be present; both inequalities survive.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{full_mask, DisseminationInstance, SideInfoGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundCaps {
    /// Largest graph handed to [`minrank2`].
    pub minrank_vertices: usize,
    /// Largest graph handed to [`independence_number`] and [`clique_cover_number`].
    pub graph_vertices: usize,
    /// Partitions enumerated before switching to the greedy assignment.
    pub partitions: u64,
}

impl Default for BoundCaps {
    fn default() -> Self {
        BoundCaps {
            minrank_vertices: 10,
            graph_vertices: 20,
            partitions: 100_000,
        }
    }
}

/// A minimum-rank fitting matrix, rows as bitmasks over GF(2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinRank {
    pub rank: usize,
    pub rows: Vec<u64>,
}

fn fits(h: &SideInfoGraph, i: usize, v: u64) -> bool {
    v >> i & 1 == 1 && v & !(h.out_mask(i) | 1 << i) == 0
}

/// GF(2) basis kept in echelon form, indexed by leading bit.
#[derive(Clone)]
struct Gf2Basis {
    by_lead: [u64; 64],
    vectors: Vec<u64>,
}

impl Default for Gf2Basis {
    fn default() -> Self {
        Gf2Basis {
            by_lead: [0; 64],
            vectors: Vec::new(),
        }
    }
}

impl Gf2Basis {
    /// Canonical coset representative of `v` modulo the span.
    fn reduce(&self, mut v: u64) -> u64 {
        for b in (0..64).rev() {
            if v >> b & 1 == 1 && self.by_lead[b] != 0 {
                v ^= self.by_lead[b];
            }
        }
        v
    }

    fn insert(&mut self, v: u64) {
        let mut v = v;
        while v != 0 {
            let lead = 63 - v.leading_zeros() as usize;
            if self.by_lead[lead] == 0 {
                self.by_lead[lead] = v;
                self.vectors.push(v);
                return;
            }
            v ^= self.by_lead[lead];
        }
    }

    fn dim(&self) -> usize {
        self.vectors.len()
    }

    fn span(&self) -> impl Iterator<Item = u64> + '_ {
        (0u64..1 << self.vectors.len()).map(move |sel| {
            self.vectors
                .iter()
                .enumerate()
                .filter(|(b, _)| sel >> b & 1 == 1)
                .fold(0, |acc, (_, &v)| acc ^ v)
        })
    }
}

struct MinRankSearch<'a> {
    h: &'a SideInfoGraph,
    order: Vec<usize>,
    rows: Vec<u64>,
}

impl MinRankSearch<'_> {
    fn dfs(&mut self, depth: usize, basis: &Gf2Basis, budget: usize) -> bool {
        let Some(&i) = self.order.get(depth) else {
            return true;
        };
        if let Some(v) = basis.span().find(|&v| fits(self.h, i, v)) {
            self.rows[i] = v;
            return self.dfs(depth + 1, basis, budget);
        }
        if basis.dim() == budget {
            return false;
        }
        let free: Vec<usize> = (0..self.h.vertex_count()).filter(|&j| self.h.has_edge(i, j)).collect();
        let mut seen = BTreeSet::new();
        for sel in 0u64..1 << free.len() {
            let v = free
                .iter()
                .enumerate()
                .filter(|(b, _)| sel >> b & 1 == 1)
                .fold(1u64 << i, |acc, (_, &j)| acc | 1 << j);
            if !seen.insert(basis.reduce(v)) {
                continue;
            }
            let mut next = basis.clone();
            next.insert(v);
            self.rows[i] = v;
            if self.dfs(depth + 1, &next, budget) {
                return true;
            }
        }
        false
    }
}

/// Minimum GF(2) rank of a matrix with unit diagonal whose off-diagonal
/// support lies on the arcs of `h`, with a witness.
pub fn minrank2_witness(h: &SideInfoGraph, caps: &BoundCaps) -> Result<MinRank> {
    let n = h.vertex_count();
    if n > caps.minrank_vertices {
        return Err(Error::SearchCapExceeded(format!(
            "minrank on {n} vertices (cap {})",
            caps.minrank_vertices
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| h.out_mask(i).count_ones());
    let mut search = MinRankSearch {
        h,
        order,
        rows: vec![0; n],
    };
    for budget in 0..=n {
        if search.dfs(0, &Gf2Basis::default(), budget) {
            return Ok(MinRank {
                rank: budget,
                rows: search.rows,
            });
        }
    }
    unreachable!("the identity always fits")
}

pub fn minrank2(h: &SideInfoGraph) -> Result<usize> {
    minrank2_witness(h, &BoundCaps::default()).map(|m| m.rank)
}

fn mask_vertices(mask: u64) -> Vec<usize> {
    (0..64).filter(|&b| mask >> b & 1 == 1).collect()
}

fn max_independent(adj: &[u64], chosen: u64, cand: u64, best: &mut u64) {
    if chosen.count_ones() + cand.count_ones() <= best.count_ones() {
        return;
    }
    if cand == 0 {
        *best = chosen;
        return;
    }
    let v = mask_vertices(cand)
        .into_iter()
        .max_by_key(|&v| (adj[v] & cand).count_ones())
        .expect("nonempty");
    if adj[v] & cand == 0 {
        // no edges left among the candidates
        *best = chosen | cand;
        return;
    }
    max_independent(adj, chosen | 1 << v, cand & !adj[v] & !(1 << v), best);
    max_independent(adj, chosen, cand & !(1 << v), best);
}

/// Largest independent set, ignoring arc direction. Returns the vertices.
pub fn independent_set(h: &SideInfoGraph, caps: &BoundCaps) -> Result<Vec<usize>> {
    let n = h.vertex_count();
    if n > caps.graph_vertices {
        return Err(Error::SearchCapExceeded(format!(
            "independence number on {n} vertices (cap {})",
            caps.graph_vertices
        )));
    }
    let mut best = 0;
    max_independent(&h.any_direction(), 0, full_mask(n), &mut best);
    Ok(mask_vertices(best))
}

pub fn independence_number(h: &SideInfoGraph) -> Result<usize> {
    independent_set(h, &BoundCaps::default()).map(|s| s.len())
}

struct Coloring<'a> {
    adj: &'a [u64],
    color: Vec<Option<usize>>,
    best: Vec<usize>,
    best_count: usize,
}

impl Coloring<'_> {
    fn saturation(&self, v: usize) -> usize {
        mask_vertices(self.adj[v])
            .into_iter()
            .filter_map(|u| self.color[u])
            .collect::<BTreeSet<_>>()
            .len()
    }

    fn dfs(&mut self, used: usize) {
        if used >= self.best_count {
            return;
        }
        let next = (0..self.color.len())
            .filter(|&v| self.color[v].is_none())
            .max_by_key(|&v| (self.saturation(v), self.adj[v].count_ones(), std::cmp::Reverse(v)));
        let Some(v) = next else {
            self.best = self.color.iter().map(|c| c.expect("colored")).collect();
            self.best_count = used;
            return;
        };
        for c in 0..=used {
            if c == used && used + 1 >= self.best_count {
                break;
            }
            if mask_vertices(self.adj[v]).iter().any(|&u| self.color[u] == Some(c)) {
                continue;
            }
            self.color[v] = Some(c);
            self.dfs(used.max(c + 1));
            self.color[v] = None;
        }
    }
}

/// Minimum cover of the vertices by cliques of mutually adjacent vertices.
/// Cliques are sorted, and listed by their smallest vertex.
pub fn clique_cover(h: &SideInfoGraph, caps: &BoundCaps) -> Result<Vec<Vec<usize>>> {
    let n = h.vertex_count();
    if n > caps.graph_vertices {
        return Err(Error::SearchCapExceeded(format!(
            "clique cover on {n} vertices (cap {})",
            caps.graph_vertices
        )));
    }
    let both = h.both_directions();
    let complement: Vec<u64> = (0..n).map(|i| full_mask(n) & !both[i] & !(1 << i)).collect();
    let mut search = Coloring {
        adj: &complement,
        color: vec![None; n],
        best: (0..n).collect(),
        best_count: n + 1,
    };
    search.dfs(0);
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in search.best.iter().enumerate() {
        classes.entry(c).or_default().push(v);
    }
    let mut cover: Vec<Vec<usize>> = classes.into_values().collect();
    cover.sort();
    Ok(cover)
}

pub fn clique_cover_number(h: &SideInfoGraph) -> Result<usize> {
    clique_cover(h, &BoundCaps::default()).map(|c| c.len())
}

/// `max_ℓ Σ_{η ∈ T_ℓ} dist(holders of x_η, ℓ)`: a lower bound on the total
/// number of transmissions of any multi-round scheme.
pub fn dmax(inst: &DisseminationInstance) -> Result<usize> {
    let net = inst.network();
    let mut best = 0;
    for l in 0..inst.node_count() {
        let mut total = 0;
        for &eta in inst.request(l) {
            total += net.shortest_dist(&inst.holders(eta), l).ok_or(Error::Infeasible {
                node: l + 1,
                symbol: eta + 1,
            })?;
        }
        best = best.max(total);
    }
    Ok(best)
}

/// Lower bound on one-round transmissions for bipartite instances (minrank₂
/// of the side-information graph over GF(2), `α` over other fields or past the
/// minrank cap), and `dmax` otherwise.
pub fn lower_bound(inst: &DisseminationInstance) -> Result<usize> {
    lower_bound_with(inst, &BoundCaps::default())
}

pub fn lower_bound_with(inst: &DisseminationInstance, caps: &BoundCaps) -> Result<usize> {
    if !inst.is_bipartite() {
        return dmax(inst);
    }
    let h = inst.side_info_graph()?;
    if inst.field_order() == 2 {
        match minrank2_witness(&h, caps) {
            Ok(m) => return Ok(m.rank),
            Err(Error::SearchCapExceeded(_)) => {}
            Err(e) => return Err(e),
        }
    }
    match independent_set(&h, caps) {
        Ok(s) => Ok(s.len()),
        Err(Error::SearchCapExceeded(_)) => dmax(inst),
        Err(e) => Err(e),
    }
}

/// Best assignment of receivers to transmitters found by [`partition_upper_bound`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionBound {
    /// `Σ minrank₂` of the induced groups; `None` off GF(2) or past the minrank cap.
    pub minrank_sum: Option<usize>,
    /// `assignment[s]` is the transmitter serving the receiver of `x_s`.
    pub minrank_assignment: Option<Vec<usize>>,
    /// `Σ clc` of the induced groups; valid over every field.
    pub clc_sum: usize,
    pub clc_assignment: Vec<usize>,
    /// `false` when the assignment space exceeded the cap and a greedy choice was used.
    pub exhaustive: bool,
}

struct GroupCost<'a> {
    h: &'a SideInfoGraph,
    caps: BoundCaps,
    minrank: HashMap<u64, usize>,
    clc: HashMap<u64, usize>,
}

impl GroupCost<'_> {
    fn minrank(&mut self, group: u64) -> Result<usize> {
        if let Some(&v) = self.minrank.get(&group) {
            return Ok(v);
        }
        let v = minrank2_witness(&self.h.induced(&mask_vertices(group)), &self.caps)?.rank;
        self.minrank.insert(group, v);
        Ok(v)
    }

    fn clc(&mut self, group: u64) -> Result<usize> {
        if let Some(&v) = self.clc.get(&group) {
            return Ok(v);
        }
        let v = clique_cover(&self.h.induced(&mask_vertices(group)), &self.caps)?.len();
        self.clc.insert(group, v);
        Ok(v)
    }
}

fn groups(assignment: &[usize], transmitters: &[usize]) -> Vec<u64> {
    transmitters
        .iter()
        .map(|&t| {
            assignment
                .iter()
                .enumerate()
                .filter(|&(_, &a)| a == t)
                .fold(0, |m, (s, _)| m | 1 << s)
        })
        .collect()
}

/// Upper bound from splitting a bipartite instance into independent index
/// coding problems, one per transmitter, each receiver served by one of its
/// in-neighbors.
pub fn partition_upper_bound(inst: &DisseminationInstance, caps: &BoundCaps) -> Result<PartitionBound> {
    let roles = inst.bipartite_roles().ok_or(Error::NotBipartite)?;
    let h = inst.side_info_graph()?;
    let n = inst.symbol_count();
    let options: Vec<Vec<usize>> = roles
        .receiver_of
        .iter()
        .map(|&r| inst.network().in_neighbors(r).to_vec())
        .collect();
    if let Some(s) = options.iter().position(Vec::is_empty) {
        return Err(Error::ReceiverUncovered(roles.receiver_of[s] + 1));
    }
    let use_minrank = inst.field_order() == 2 && n <= caps.minrank_vertices;
    let mut cost = GroupCost {
        h: &h,
        caps: *caps,
        minrank: HashMap::new(),
        clc: HashMap::new(),
    };
    let total = options
        .iter()
        .try_fold(1u64, |acc, o| acc.checked_mul(o.len() as u64).filter(|&p| p <= caps.partitions));

    let mut best_mr: Option<(usize, Vec<usize>)> = None;
    let mut best_clc: Option<(usize, Vec<usize>)> = None;
    let mut consider = |assignment: &[usize], cost: &mut GroupCost| -> Result<()> {
        let g = groups(assignment, &roles.transmitters);
        if use_minrank {
            let v = g.iter().map(|&m| cost.minrank(m)).sum::<Result<usize>>()?;
            if best_mr.as_ref().is_none_or(|(b, _)| v < *b) {
                best_mr = Some((v, assignment.to_vec()));
            }
        }
        let v = g.iter().map(|&m| cost.clc(m)).sum::<Result<usize>>()?;
        if best_clc.as_ref().is_none_or(|(b, _)| v < *b) {
            best_clc = Some((v, assignment.to_vec()));
        }
        Ok(())
    };

    let exhaustive = total.is_some();
    if exhaustive {
        let mut idx = vec![0usize; n];
        loop {
            let assignment: Vec<usize> = idx.iter().zip(&options).map(|(&i, o)| o[i]).collect();
            consider(&assignment, &mut cost)?;
            let Some(pos) = (0..n).rev().find(|&p| idx[p] + 1 < options[p].len()) else {
                break;
            };
            idx[pos] += 1;
            idx[pos + 1..].iter_mut().for_each(|i| *i = 0);
        }
    } else {
        // greedy: each receiver joins the transmitter whose group grows cheapest
        let mut assignment: Vec<usize> = Vec::with_capacity(n);
        for (s, opts) in options.iter().enumerate() {
            let mut pick = opts[0];
            let mut pick_cost = usize::MAX;
            for &t in opts {
                let group = assignment
                    .iter()
                    .enumerate()
                    .filter(|&(_, &a)| a == t)
                    .fold(1u64 << s, |m, (r, _)| m | 1 << r);
                let c = if use_minrank { cost.minrank(group)? } else { cost.clc(group)? };
                if c < pick_cost {
                    pick = t;
                    pick_cost = c;
                }
            }
            assignment.push(pick);
        }
        consider(&assignment, &mut cost)?;
    }

    let (clc_sum, clc_assignment) = best_clc.expect("at least one assignment");
    Ok(PartitionBound {
        minrank_sum: best_mr.as_ref().map(|(v, _)| *v),
        minrank_assignment: best_mr.map(|(_, a)| a),
        clc_sum,
        clc_assignment,
        exhaustive,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LowerBounds {
    pub dmax: usize,
    pub minrank2: Option<usize>,
    pub alpha: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct UpperBounds {
    pub partition: Option<usize>,
    pub clique_cover: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Witnesses {
    /// Transmitter (1-based) serving each symbol's receiver.
    pub partition: Option<Vec<usize>>,
    /// Cliques of symbols (1-based) for the clique-cover bound.
    pub clique_cover: Option<Vec<Vec<usize>>>,
    /// Independent set of symbols (1-based).
    pub independent_set: Option<Vec<usize>>,
    pub partition_exhaustive: Option<bool>,
}

/// Every applicable bound; bounds that do not apply carry a reason in `notes`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub lower: LowerBounds,
    pub upper: UpperBounds,
    pub witnesses: Witnesses,
    pub notes: BTreeMap<String, String>,
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

pub fn bounds_report(inst: &DisseminationInstance, caps: &BoundCaps) -> Result<BoundsReport> {
    let mut report = BoundsReport {
        lower: LowerBounds {
            dmax: dmax(inst)?,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut note = |key: &str, why: String| {
        report.notes.insert(key.to_string(), format!("n/a: {why}"));
    };
    if !inst.is_bipartite() {
        for key in ["minrank2", "alpha", "partition", "clique_cover"] {
            note(key, "not bipartite".into());
        }
        return Ok(report);
    }
    let h = inst.side_info_graph()?;
    let mut minrank = None;
    let mut alpha = None;
    let mut indep = None;
    if inst.field_order() != 2 {
        note("minrank2", format!("field is GF({}), not GF(2)", inst.field_order()));
    } else {
        match minrank2_witness(&h, caps) {
            Ok(m) => minrank = Some(m.rank),
            Err(Error::SearchCapExceeded(why)) => note("minrank2", why),
            Err(e) => return Err(e),
        }
    }
    match independent_set(&h, caps) {
        Ok(s) => {
            alpha = Some(s.len());
            indep = Some(one_based(&s));
        }
        Err(Error::SearchCapExceeded(why)) => note("alpha", why),
        Err(e) => return Err(e),
    }
    let mut upper = UpperBounds::default();
    let mut witnesses = Witnesses {
        independent_set: indep,
        ..Default::default()
    };
    match partition_upper_bound(inst, caps) {
        Ok(p) => {
            upper.partition = p.minrank_sum;
            upper.clique_cover = Some(p.clc_sum);
            witnesses.partition = p.minrank_assignment.as_deref().map(one_based);
            witnesses.partition_exhaustive = Some(p.exhaustive);
            let groups = groups(&p.clc_assignment, &inst.bipartite_roles().expect("bipartite").transmitters);
            let mut cliques = Vec::new();
            for g in groups.into_iter().filter(|&g| g != 0) {
                let members = mask_vertices(g);
                for c in clique_cover(&h.induced(&members), caps)? {
                    cliques.push(c.iter().map(|&i| members[i] + 1).collect::<Vec<_>>());
                }
            }
            cliques.sort();
            witnesses.clique_cover = Some(cliques);
            if p.minrank_sum.is_none() {
                note(
                    "partition",
                    if inst.field_order() != 2 {
                        format!("field is GF({}), not GF(2)", inst.field_order())
                    } else {
                        "minrank cap exceeded".into()
                    },
                );
            }
        }
        Err(e @ (Error::ReceiverUncovered(_) | Error::SearchCapExceeded(_))) => {
            note("partition", e.to_string());
            note("clique_cover", e.to_string());
        }
        Err(e) => return Err(e),
    }
    report.lower.minrank2 = minrank;
    report.lower.alpha = alpha;
    report.upper = upper;
    report.witnesses = witnesses;
    Ok(report)
}
