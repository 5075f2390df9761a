//! Optimal one-round coded broadcast.
//!
//! Every node `l` picks a subspace `S_l` of the coordinate space spanned by the
//! symbols it holds and broadcasts a basis of it. A choice is valid when every
//! node `l` can express each requested unit vector `e_η` as a combination of
//! what its in-neighbors sent plus its own symbols. The minimum of `Σ dim S_l`
//! over valid choices is the optimal number of transmissions; if even full
//! flooding is not valid, no one-round scheme exists.
//!
//! [`solve_exact`] finds that minimum by iterative deepening on the total budget
//! with a depth-first search over canonical subspace bases. Candidates for each
//! node are visited by dimension and then lexicographically, so among optimal
//! schemes the one whose tuple of RREF bases is lexicographically smallest wins.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{enumerate_subspaces, subspace_count, Field, FieldMatrix};
use crate::instance::DisseminationInstance;

/// Coding vectors broadcast by each node in one round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransmissionScheme<F> {
    n: usize,
    per_node: Vec<FieldMatrix<F>>,
}

impl<F: Field> TransmissionScheme<F> {
    pub fn new(n: usize, per_node: Vec<FieldMatrix<F>>) -> Result<Self> {
        if let Some(m) = per_node.iter().find(|m| m.cols() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.cols(),
            });
        }
        Ok(TransmissionScheme { n, per_node })
    }

    pub fn empty(n: usize, k: usize) -> Self {
        TransmissionScheme {
            n,
            per_node: vec![FieldMatrix::empty(n); k],
        }
    }

    pub fn symbol_count(&self) -> usize {
        self.n
    }

    pub fn node(&self, l: usize) -> &FieldMatrix<F> {
        &self.per_node[l]
    }

    pub fn nodes(&self) -> &[FieldMatrix<F>] {
        &self.per_node
    }

    /// Total number of broadcast symbols.
    pub fn transmissions(&self) -> usize {
        self.per_node.iter().map(FieldMatrix::rows).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Exact,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneRoundResult<F> {
    pub tau: usize,
    pub scheme: TransmissionScheme<F>,
    pub method: SolveMethod,
    pub node_ranks: Vec<usize>,
}

impl<F: Field> OneRoundResult<F> {
    fn from_scheme(scheme: TransmissionScheme<F>, method: SolveMethod) -> Self {
        let node_ranks: Vec<usize> = scheme.nodes().iter().map(FieldMatrix::rows).collect();
        OneRoundResult {
            tau: node_ranks.iter().sum(),
            scheme,
            method,
            node_ranks,
        }
    }
}

/// Size limits for the exact search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchCaps {
    /// Nodes that may usefully transmit.
    pub max_active_nodes: usize,
    /// Symbols a single node may combine (after dropping unrequested ones).
    pub max_support: usize,
    /// Candidate subspaces per node.
    pub max_subspaces: u64,
    /// Optional limit on transmissions per node; `None` means up to `n`.
    pub max_per_node: Option<usize>,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_active_nodes: 6,
            max_support: 5,
            max_subspaces: 4096,
            max_per_node: None,
        }
    }
}

/// Decode coefficients: `Σ alpha·received + Σ beta·P_l rows = e_η`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoding<F> {
    /// `(sender, row)` of every received vector, in the order `alpha` uses.
    pub received: Vec<(usize, usize)>,
    pub alpha: Vec<F>,
    /// One coefficient per row of the `n × n` possession diagonal.
    pub beta: Vec<F>,
}

fn unit_rows<F: Field>(n: usize, set: impl IntoIterator<Item = usize>) -> FieldMatrix<F> {
    FieldMatrix::from_rows(n, set.into_iter().map(|s| FieldMatrix::unit(n, s)).collect())
        .expect("unit rows have length n")
}

fn check_choice_shape<F: Field>(inst: &DisseminationInstance, choice: &[FieldMatrix<F>]) -> Result<()> {
    inst.check_field::<F>()?;
    if choice.len() != inst.node_count() {
        return Err(Error::SchemeMismatch(format!(
            "{} node matrices for {} nodes",
            choice.len(),
            inst.node_count()
        )));
    }
    for (l, a) in choice.iter().enumerate() {
        if a.cols() != inst.symbol_count() {
            return Err(Error::DimensionMismatch {
                expected: inst.symbol_count(),
                found: a.cols(),
            });
        }
        if a.support().iter().any(|s| !inst.possess(l).contains(s)) {
            return Err(Error::SupportViolation { node: l + 1 });
        }
    }
    Ok(())
}

/// Whether the per-node matrices let every node decode all of its requests.
pub fn check_condition<F: Field>(inst: &DisseminationInstance, choice: &[FieldMatrix<F>]) -> Result<bool> {
    check_choice_shape(inst, choice)?;
    Ok(first_undecodable(inst, choice).is_none())
}

fn first_undecodable<F: Field>(inst: &DisseminationInstance, choice: &[FieldMatrix<F>]) -> Option<(usize, usize)> {
    let n = inst.symbol_count();
    for l in 0..inst.node_count() {
        if inst.request(l).is_empty() {
            continue;
        }
        let own = inst.possession_diag::<F>(l);
        let blocks = inst.network().in_neighbors(l).iter().map(|&i| &choice[i]).chain([&own]);
        let m = FieldMatrix::stack(n, blocks).expect("uniform width");
        if let Some(&eta) = inst.request(l).iter().find(|&&eta| !m.spans(&FieldMatrix::unit(n, eta))) {
            return Some((l, eta));
        }
    }
    None
}

/// A requested symbol that no in-neighbor holds blocks every one-round scheme.
fn unsolvable_certificate(inst: &DisseminationInstance) -> Option<(usize, usize)> {
    (0..inst.node_count()).find_map(|l| {
        inst.request(l)
            .iter()
            .find(|&&eta| !inst.network().in_neighbors(l).iter().any(|&i| inst.possess(i).contains(&eta)))
            .map(|&eta| (l, eta))
    })
}

/// Symbols each node may usefully combine: held, requested by someone, and only
/// for nodes with an out-neighbor that requests something.
fn useful_support(inst: &DisseminationInstance) -> Vec<Vec<usize>> {
    let requested: BTreeSet<usize> = inst.request_sets().iter().flatten().copied().collect();
    (0..inst.node_count())
        .map(|l| {
            let feeds = inst.network().out_neighbors(l).iter().any(|&o| !inst.request(o).is_empty());
            if feeds {
                inst.possess(l).intersection(&requested).copied().collect()
            } else {
                Vec::new()
            }
        })
        .collect()
}

struct Receiver<F> {
    own: FieldMatrix<F>,
    wanted: FieldMatrix<F>,
    /// Positions (into the active list) of in-neighbors that can transmit.
    feeders: Vec<usize>,
}

struct Search<F> {
    n: usize,
    active: Vec<usize>,
    candidates: Vec<Vec<FieldMatrix<F>>>,
    flood: Vec<FieldMatrix<F>>,
    receivers: Vec<Receiver<F>>,
    picks: Vec<usize>,
}

impl<F: Field> Search<F> {
    /// Whether `picks[..depth]` can still be completed within `budget` more transmissions.
    fn feasible(&self, depth: usize, budget: usize) -> bool {
        for rx in &self.receivers {
            let fixed: Vec<&FieldMatrix<F>> = rx
                .feeders
                .iter()
                .filter(|&&p| p < depth)
                .map(|&p| &self.candidates[p][self.picks[p]])
                .chain([&rx.own])
                .collect();
            let base = FieldMatrix::stack(self.n, fixed.iter().copied()).expect("width");
            let base_rank = base.rank();
            let with_wanted = FieldMatrix::stack(self.n, [&base, &rx.wanted]).expect("width");
            let need = with_wanted.rank() - base_rank;
            if need == 0 {
                continue;
            }
            if need > budget {
                return false;
            }
            let optimistic = FieldMatrix::stack(
                self.n,
                fixed.iter().copied().chain(rx.feeders.iter().filter(|&&p| p >= depth).map(|&p| &self.flood[p])),
            )
            .expect("width");
            let opt_rank = optimistic.rank();
            if FieldMatrix::stack(self.n, [&optimistic, &rx.wanted]).expect("width").rank() != opt_rank {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, depth: usize, budget: usize) -> bool {
        if !self.feasible(depth, budget) {
            return false;
        }
        if depth == self.active.len() {
            return true;
        }
        for c in 0..self.candidates[depth].len() {
            let dim = self.candidates[depth][c].rows();
            if dim > budget {
                // candidates are sorted by dimension
                break;
            }
            self.picks[depth] = c;
            if self.dfs(depth + 1, budget - dim) {
                return true;
            }
        }
        false
    }
}

/// Exact minimum-transmission one-round scheme.
pub fn solve_exact<F: Field>(inst: &DisseminationInstance, caps: &SearchCaps) -> Result<OneRoundResult<F>> {
    inst.check_field::<F>()?;
    if let Some((l, eta)) = unsolvable_certificate(inst) {
        return Err(Error::NotOneRoundSolvable {
            node: l + 1,
            symbol: eta + 1,
        });
    }
    let n = inst.symbol_count();
    let k = inst.node_count();
    if !inst.has_requests() {
        return Ok(OneRoundResult::from_scheme(TransmissionScheme::empty(n, k), SolveMethod::Exact));
    }

    let support = useful_support(inst);
    let active: Vec<usize> = (0..k).filter(|&l| !support[l].is_empty()).collect();
    if active.len() > caps.max_active_nodes {
        return Err(Error::SearchCapExceeded(format!(
            "{} transmitting nodes (cap {})",
            active.len(),
            caps.max_active_nodes
        )));
    }
    let per_node = caps.max_per_node.unwrap_or(n);
    let mut candidates = Vec::with_capacity(active.len());
    for &l in &active {
        let s = &support[l];
        if s.len() > caps.max_support {
            return Err(Error::SearchCapExceeded(format!(
                "node {} combines {} symbols (cap {})",
                l + 1,
                s.len(),
                caps.max_support
            )));
        }
        let count = subspace_count(F::ORDER, s.len(), per_node);
        if count > caps.max_subspaces {
            return Err(Error::SearchCapExceeded(format!(
                "node {} has {count} candidate subspaces (cap {})",
                l + 1,
                caps.max_subspaces
            )));
        }
        candidates.push(
            enumerate_subspaces::<F>(s.len(), per_node)
                .into_iter()
                .map(|b| b.embed_columns(n, s))
                .collect::<Vec<_>>(),
        );
    }
    let flood: Vec<FieldMatrix<F>> = active.iter().map(|&l| unit_rows(n, support[l].iter().copied())).collect();
    let receivers = (0..k)
        .filter(|&o| !inst.request(o).is_empty())
        .map(|o| Receiver {
            own: unit_rows(n, inst.possess(o).iter().copied()),
            wanted: unit_rows(n, inst.request(o).iter().copied()),
            feeders: inst
                .network()
                .in_neighbors(o)
                .iter()
                .filter_map(|i| active.iter().position(|a| a == i))
                .collect(),
        })
        .collect();

    let lower = (0..k).map(|o| inst.request(o).len()).max().unwrap_or(0);
    let upper: usize = active.iter().map(|&l| support[l].len().min(per_node)).sum();
    let mut search = Search {
        n,
        picks: vec![0; active.len()],
        active,
        candidates,
        flood,
        receivers,
    };
    for budget in lower..=upper {
        if search.dfs(0, budget) {
            let mut per_node = vec![FieldMatrix::empty(n); k];
            for (p, &l) in search.active.iter().enumerate() {
                per_node[l] = search.candidates[p][search.picks[p]].clone();
            }
            let scheme = TransmissionScheme::new(n, per_node)?;
            return Ok(OneRoundResult::from_scheme(scheme, SolveMethod::Exact));
        }
    }
    Err(Error::SearchCapExceeded(format!(
        "no scheme with at most {per_node} transmissions per node"
    )))
}

/// Randomized greedy fallback: start from flooding in a random basis, drop rows
/// while the decoding condition keeps holding, keep the best restart.
/// Restart 0 floods plain unit vectors, so the result never exceeds flooding.
pub fn solve_heuristic<F: Field>(
    inst: &DisseminationInstance,
    seed: u64,
    iterations: usize,
) -> Result<OneRoundResult<F>> {
    inst.check_field::<F>()?;
    if let Some((l, eta)) = unsolvable_certificate(inst) {
        return Err(Error::NotOneRoundSolvable {
            node: l + 1,
            symbol: eta + 1,
        });
    }
    let n = inst.symbol_count();
    let k = inst.node_count();
    if !inst.has_requests() {
        return Ok(OneRoundResult::from_scheme(TransmissionScheme::empty(n, k), SolveMethod::Heuristic));
    }
    let support = useful_support(inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Vec<FieldMatrix<F>>> = None;
    for it in 0..iterations.max(1) {
        let mut rows: Vec<(usize, Vec<F>)> = Vec::new();
        for (l, s) in support.iter().enumerate() {
            let basis = if it == 0 {
                FieldMatrix::identity(s.len())
            } else {
                random_invertible::<F>(s.len(), &mut rng)
            };
            let basis = basis.embed_columns(n, s);
            rows.extend(basis.row_iter().map(|r| (l, r.to_vec())));
        }
        if it > 0 {
            rows.shuffle(&mut rng);
        }
        let mut keep = vec![true; rows.len()];
        for i in 0..rows.len() {
            keep[i] = false;
            if first_undecodable(inst, &assemble(n, k, &rows, &keep)).is_some() {
                keep[i] = true;
            }
        }
        let choice = assemble(n, k, &rows, &keep);
        let total: usize = choice.iter().map(FieldMatrix::rows).sum();
        if best.as_ref().is_none_or(|b| total < b.iter().map(FieldMatrix::rows).sum()) {
            best = Some(choice);
        }
    }
    let per_node = best
        .expect("at least one restart")
        .into_iter()
        .map(|m| m.row_space_basis())
        .collect();
    Ok(OneRoundResult::from_scheme(
        TransmissionScheme::new(n, per_node)?,
        SolveMethod::Heuristic,
    ))
}

fn assemble<F: Field>(n: usize, k: usize, rows: &[(usize, Vec<F>)], keep: &[bool]) -> Vec<FieldMatrix<F>> {
    let mut per: Vec<Vec<Vec<F>>> = vec![Vec::new(); k];
    for ((l, r), &kept) in rows.iter().zip(keep) {
        if kept {
            per[*l].push(r.clone());
        }
    }
    per.into_iter()
        .map(|rs| FieldMatrix::from_rows(n, rs).expect("width n"))
        .collect()
}

fn random_invertible<F: Field>(d: usize, rng: &mut impl Rng) -> FieldMatrix<F> {
    loop {
        let rows = (0..d)
            .map(|_| (0..d).map(|_| F::from_u64(rng.gen_range(0..F::ORDER as u64))).collect())
            .collect();
        let m = FieldMatrix::from_rows(d, rows).expect("square");
        if m.rank() == d {
            return m;
        }
    }
}

/// Coefficients letting node `l` recover `x_η` from its in-neighbors' broadcasts
/// and its own symbols.
pub fn decode<F: Field>(
    inst: &DisseminationInstance,
    scheme: &TransmissionScheme<F>,
    l: usize,
    eta: usize,
) -> Result<Decoding<F>> {
    check_choice_shape(inst, scheme.nodes())?;
    let n = inst.symbol_count();
    if l >= inst.node_count() || eta >= n {
        return Err(Error::NoDecoding { node: l + 1, symbol: eta + 1 });
    }
    let senders = inst.network().in_neighbors(l);
    let received: Vec<(usize, usize)> = senders
        .iter()
        .flat_map(|&i| (0..scheme.node(i).rows()).map(move |r| (i, r)))
        .collect();
    let own = inst.possession_diag::<F>(l);
    let m = FieldMatrix::stack(n, senders.iter().map(|&i| scheme.node(i)).chain([&own]))?;
    let coeffs = m
        .solve_in_row_space(&FieldMatrix::unit(n, eta))?
        .ok_or(Error::NoDecoding { node: l + 1, symbol: eta + 1 })?;
    let (alpha, beta) = coeffs.split_at(received.len());
    Ok(Decoding {
        received,
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
    })
}

/// Recomputes `Σ alpha·received + Σ beta·P_l rows`.
pub fn recombine<F: Field>(
    inst: &DisseminationInstance,
    scheme: &TransmissionScheme<F>,
    l: usize,
    dec: &Decoding<F>,
) -> Vec<F> {
    let n = inst.symbol_count();
    let own = inst.possession_diag::<F>(l);
    let mut out = own.left_mul_vec(&dec.beta).expect("beta has n entries");
    for (&(i, r), &a) in dec.received.iter().zip(&dec.alpha) {
        for (o, &v) in out.iter_mut().zip(scheme.node(i).row(r)) {
            *o = *o + a * v;
        }
    }
    debug_assert_eq!(out.len(), n);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::network::DirectedNetwork;
    use num_traits::{One, Zero};

    type G2 = Fp<2>;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn five_node() -> DisseminationInstance {
        let net = DirectedNetwork::new(5, [(0, 2), (0, 3), (1, 2), (1, 3), (1, 4)]).unwrap();
        DisseminationInstance::new(
            2,
            3,
            net,
            vec![set(&[0, 1]), set(&[1, 2]), set(&[0]), set(&[1]), set(&[0, 2])],
            vec![set(&[]), set(&[]), set(&[1, 2]), set(&[0, 2]), set(&[1])],
        )
        .unwrap()
    }

    fn five_node_scheme() -> TransmissionScheme<G2> {
        let mut per = vec![FieldMatrix::empty(3); 5];
        per[0] = FieldMatrix::from_u64_rows(3, &[&[1, 1, 0]]).unwrap();
        per[1] = FieldMatrix::from_u64_rows(3, &[&[0, 1, 1]]).unwrap();
        TransmissionScheme::new(3, per).unwrap()
    }

    #[test]
    fn condition_examples() {
        let inst = five_node();
        assert!(check_condition(&inst, five_node_scheme().nodes()).unwrap());
        let empty = TransmissionScheme::<G2>::empty(3, 5);
        assert!(!check_condition(&inst, empty.nodes()).unwrap());

        let quiet = DisseminationInstance::new(
            2,
            3,
            inst.network().clone(),
            inst.possess_sets().to_vec(),
            vec![BTreeSet::new(); 5],
        )
        .unwrap();
        assert!(check_condition(&quiet, empty.nodes()).unwrap());

        // v3 only holds x1
        let mut bad = vec![FieldMatrix::<G2>::empty(3); 5];
        bad[2] = FieldMatrix::from_u64_rows(3, &[&[0, 1, 0]]).unwrap();
        assert_eq!(check_condition(&inst, &bad), Err(Error::SupportViolation { node: 3 }));
    }

    #[test]
    fn five_node_exact_is_two() {
        let res = solve_exact::<G2>(&five_node(), &SearchCaps::default()).unwrap();
        assert_eq!(res.tau, 2);
        assert_eq!(res.method, SolveMethod::Exact);
        assert!(check_condition(&five_node(), res.scheme.nodes()).unwrap());
        assert_eq!(res.node_ranks.iter().sum::<usize>(), 2);
    }

    #[test]
    fn no_requests_costs_nothing() {
        let net = DirectedNetwork::complete(3);
        let inst = DisseminationInstance::new(2, 2, net, vec![set(&[0]); 3], vec![set(&[]); 3]).unwrap();
        let res = solve_exact::<G2>(&inst, &SearchCaps::default()).unwrap();
        assert_eq!(res.tau, 0);
        assert_eq!(res.scheme.transmissions(), 0);
    }

    #[test]
    fn two_hop_request_is_not_one_round() {
        let net = DirectedNetwork::new(3, [(0, 1), (1, 2)]).unwrap();
        let inst = DisseminationInstance::new(
            2,
            1,
            net,
            vec![set(&[0]), set(&[]), set(&[])],
            vec![set(&[]), set(&[0]), set(&[0])],
        )
        .unwrap();
        assert_eq!(
            solve_exact::<G2>(&inst, &SearchCaps::default()),
            Err(Error::NotOneRoundSolvable { node: 3, symbol: 1 })
        );
        assert!(solve_heuristic::<G2>(&inst, 1, 4).is_err());
    }

    #[test]
    fn field_must_match() {
        assert_eq!(
            solve_exact::<Fp<3>>(&five_node(), &SearchCaps::default()),
            Err(Error::FieldMismatch { solver: 3, instance: 2 })
        );
    }

    #[test]
    fn caps_are_enforced() {
        let caps = SearchCaps {
            max_support: 1,
            ..SearchCaps::default()
        };
        assert!(matches!(solve_exact::<G2>(&five_node(), &caps), Err(Error::SearchCapExceeded(_))));
    }

    #[test]
    fn heuristic_is_sound_and_deterministic() {
        let inst = five_node();
        let a = solve_heuristic::<G2>(&inst, 7, 32).unwrap();
        assert!(a.tau <= 3 && a.tau >= 2);
        assert!(check_condition(&inst, a.scheme.nodes()).unwrap());
        assert_eq!(a, solve_heuristic::<G2>(&inst, 7, 32).unwrap());
        assert_eq!(solve_heuristic::<G2>(&inst, 0, 1).unwrap().tau, 3);
    }

    #[test]
    fn decode_five_node() {
        let inst = five_node();
        let scheme = five_node_scheme();
        let dec = decode(&inst, &scheme, 4, 1).unwrap();
        assert_eq!(dec.received, vec![(1, 0)]);
        assert_eq!(dec.alpha, vec![G2::one()]);
        assert_eq!(dec.beta, vec![G2::zero(), G2::zero(), G2::one()]);
        assert_eq!(recombine(&inst, &scheme, 4, &dec), FieldMatrix::unit(3, 1));

        // own symbol: beta picks the matching diagonal row
        let own = decode(&inst, &scheme, 4, 0).unwrap();
        assert!(own.alpha.iter().all(|a| a.is_zero()));
        assert_eq!(own.beta, FieldMatrix::unit(3, 0));

        let empty = TransmissionScheme::<G2>::empty(3, 5);
        assert_eq!(decode(&inst, &empty, 4, 1), Err(Error::NoDecoding { node: 5, symbol: 2 }));
    }

    #[test]
    fn per_node_cap_limits_each_node() {
        // complete graph on 3, each node holds one symbol, everyone wants everything
        let net = DirectedNetwork::complete(3);
        let inst = DisseminationInstance::new(
            2,
            3,
            net,
            vec![set(&[0]), set(&[1]), set(&[2])],
            vec![set(&[1, 2]), set(&[0, 2]), set(&[0, 1])],
        )
        .unwrap();
        let res = solve_exact::<G2>(&inst, &SearchCaps::default()).unwrap();
        assert_eq!(res.tau, 3);
        let caps = SearchCaps {
            max_per_node: Some(0),
            ..SearchCaps::default()
        };
        assert!(solve_exact::<G2>(&inst, &caps).is_err());
    }
}
