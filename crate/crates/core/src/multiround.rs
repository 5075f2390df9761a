//! Multi-round dissemination over the ★-matrix algebra.
//!
//! Round `i` starts from the possession family `Âᵢ₋₁` and must leave every node
//! `j` with everything flooding would have given it, i.e. the coordinate span
//! of the ★ columns of row `j` of `Âᵢ = D·Âᵢ₋₁` (`D` with self-loops). Since
//! every round ends in that state, a node's knowledge before round `i` is
//! exactly the coordinate span of its ★ columns in `Âᵢ₋₁`, and minimizing a
//! single round is a one-round problem where each node holds those symbols and
//! requests the ones it is about to gain.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds;
use crate::error::{Error, Result};
use crate::field::{Field, FieldMatrix};
use crate::instance::DisseminationInstance;
use crate::network::DirectedNetwork;
use crate::one_round::{self, SearchCaps, SolveMethod, TransmissionScheme};
use crate::star::{int_mul_star, IntMatrix, StarMatrix};

/// `D^steps · Â` with every product collapsed to a 0/1 pattern.
pub fn evolve<F: Field>(a: &StarMatrix<F>, d: &IntMatrix, steps: usize) -> Result<StarMatrix<F>> {
    int_mul_star(&d.boolean_pow(steps)?, a)
}

/// Possession families around round `round` (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundContext<F> {
    pub round: usize,
    /// Transposed adjacency with self-loops.
    pub adjacency: IntMatrix,
    /// Compact `k × n` family before the round.
    pub before: StarMatrix<F>,
    /// Compact `k × n` family after the round.
    pub after: StarMatrix<F>,
}

impl<F: Field> RoundContext<F> {
    pub fn new(inst: &DisseminationInstance, round: usize) -> Result<Self> {
        if round == 0 {
            return Err(Error::InvalidInstance("rounds are numbered from 1".into()));
        }
        let adjacency = inst.network().adjacency(true);
        let before = evolve(&inst.possession_family::<F>(), &adjacency, round - 1)?;
        let after = int_mul_star(&adjacency, &before)?;
        Ok(RoundContext {
            round,
            adjacency,
            before,
            after,
        })
    }

    pub fn node_count(&self) -> usize {
        self.before.rows()
    }

    pub fn symbol_count(&self) -> usize {
        self.before.cols()
    }

    /// Whether no node can learn anything this round.
    pub fn is_fixpoint(&self) -> bool {
        self.before == self.after
    }

    /// `Γ` of node `l`'s `n × n` block before the round, zero rows dropped:
    /// the unit vectors of the symbols it holds.
    pub fn gamma_block(&self, l: usize) -> FieldMatrix<F> {
        let g = self.before.row_matrix(l).repeat_rows(self.symbol_count()).gamma();
        FieldMatrix::from_rows(g.cols(), g.row_iter().filter(|r| r.iter().any(|v| !v.is_zero())).map(<[F]>::to_vec).collect())
            .expect("same width")
    }

    /// The one-round problem equivalent to this round.
    pub fn as_one_round(&self) -> Result<DisseminationInstance> {
        let k = self.node_count();
        let edges = (0..k).flat_map(|v| (0..k).filter(move |&u| u != v).map(move |u| (u, v)));
        let net = DirectedNetwork::new(k, edges.filter(|&(u, v)| self.adjacency.get(v, u) != 0))?;
        let possess: Vec<BTreeSet<usize>> = (0..k).map(|l| self.before.star_columns(l).into_iter().collect()).collect();
        let request = (0..k)
            .map(|l| self.after.star_columns(l).into_iter().filter(|s| !possess[l].contains(s)).collect())
            .collect();
        DisseminationInstance::new(F::ORDER, self.symbol_count(), net, possess, request)
    }
}

/// Right side of the round constraint for node `j`: the number of ★ entries in
/// row `j` of the post-round family (its maximum rank).
pub fn round_rhs_rank<F: Field>(ctx: &RoundContext<F>, j: usize) -> usize {
    ctx.after.star_columns(j).len()
}

fn check_choice<F: Field>(ctx: &RoundContext<F>, choice: &[FieldMatrix<F>]) -> Result<()> {
    if choice.len() != ctx.node_count() {
        return Err(Error::DimensionMismatch {
            expected: ctx.node_count(),
            found: choice.len(),
        });
    }
    for (l, m) in choice.iter().enumerate() {
        if m.cols() != ctx.symbol_count() {
            return Err(Error::DimensionMismatch {
                expected: ctx.symbol_count(),
                found: m.cols(),
            });
        }
        let held = ctx.before.star_columns(l);
        if m.support().iter().any(|s| !held.contains(s)) {
            return Err(Error::SupportViolation { node: l + 1 });
        }
    }
    Ok(())
}

/// Whether node `j` ends the round knowing everything flooding would give it.
/// `choice[l]` holds node `l`'s coding vectors in symbol coordinates.
pub fn check_round<F: Field>(ctx: &RoundContext<F>, choice: &[FieldMatrix<F>], j: usize) -> Result<bool> {
    check_choice(ctx, choice)?;
    let n = ctx.symbol_count();
    let gamma = ctx.gamma_block(j);
    let heard = (0..ctx.node_count()).filter(|&i| ctx.adjacency.get(j, i) != 0).map(|i| &choice[i]);
    let stacked = FieldMatrix::stack(n, heard.chain([&gamma]))?;
    Ok(stacked.rank() == round_rhs_rank(ctx, j))
}

pub fn check_round_all<F: Field>(ctx: &RoundContext<F>, choice: &[FieldMatrix<F>]) -> Result<bool> {
    for j in 0..ctx.node_count() {
        if !check_round(ctx, choice, j)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every node broadcasts each symbol it holds.
pub fn construct_flood_round<F: Field>(ctx: &RoundContext<F>) -> Vec<FieldMatrix<F>> {
    (0..ctx.node_count()).map(|l| ctx.gamma_block(l)).collect()
}

/// Choice for one round together with how it was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundChoice<F> {
    pub per_node: Vec<FieldMatrix<F>>,
    pub method: SolveMethod,
}

const FALLBACK_RESTARTS: usize = 64;

/// Fewest transmissions for one round: exact within `caps`, otherwise the
/// randomized row-deletion heuristic (flagged by `method`).
pub fn minimize_round<F: Field>(ctx: &RoundContext<F>, caps: &SearchCaps) -> Result<RoundChoice<F>> {
    let k = ctx.node_count();
    let n = ctx.symbol_count();
    if ctx.is_fixpoint() {
        return Ok(RoundChoice {
            per_node: vec![FieldMatrix::empty(n); k],
            method: SolveMethod::Exact,
        });
    }
    let inst = ctx.as_one_round()?;
    let result = match one_round::solve_exact::<F>(&inst, caps) {
        Err(Error::SearchCapExceeded(_)) => one_round::solve_heuristic::<F>(&inst, ctx.round as u64, FALLBACK_RESTARTS)?,
        other => other?,
    };
    Ok(RoundChoice {
        per_node: result.scheme.nodes().to_vec(),
        method: result.method,
    })
}

/// Emulates picking random members of the round's family: each node draws
/// a random `n × n` matrix over the symbols it holds and broadcasts a basis of
/// its row space. The cheapest valid draw wins; flooding if none is valid.
pub fn random_round<F: Field>(ctx: &RoundContext<F>, samples: usize, rng: &mut impl Rng) -> Result<Vec<FieldMatrix<F>>> {
    let n = ctx.symbol_count();
    let mut best: Option<(usize, Vec<FieldMatrix<F>>)> = None;
    for _ in 0..samples {
        let choice: Vec<FieldMatrix<F>> = (0..ctx.node_count())
            .map(|l| {
                let block = ctx.before.row_matrix(l).repeat_rows(n);
                block.sample(rng.gen()).row_space_basis()
            })
            .collect();
        if check_round_all(ctx, &choice)? {
            let cost = choice.iter().map(FieldMatrix::rows).sum();
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, choice));
            }
        }
    }
    Ok(best.map_or_else(|| construct_flood_round(ctx), |(_, c)| c))
}

/// How each round's transmissions are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Per-round minimum via [`minimize_round`].
    Exact,
    /// Every node rebroadcasts everything it holds.
    Flood,
    /// Best of `samples` random family members per round.
    Random { samples: usize, seed: u64 },
}

/// Coding vectors per round and node, in symbol coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiRoundScheme<F> {
    n: usize,
    rounds: Vec<Vec<FieldMatrix<F>>>,
    round_tau: Vec<usize>,
    methods: Vec<SolveMethod>,
}

impl<F: Field> MultiRoundScheme<F> {
    pub fn new(n: usize, rounds: Vec<Vec<FieldMatrix<F>>>) -> Result<Self> {
        let methods = vec![SolveMethod::Exact; rounds.len()];
        Self::with_methods(n, rounds, methods)
    }

    fn with_methods(n: usize, rounds: Vec<Vec<FieldMatrix<F>>>, methods: Vec<SolveMethod>) -> Result<Self> {
        if let Some(m) = rounds.iter().flatten().find(|m| m.cols() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.cols(),
            });
        }
        let round_tau = rounds.iter().map(|r| r.iter().map(FieldMatrix::rows).sum()).collect();
        Ok(MultiRoundScheme {
            n,
            rounds,
            round_tau,
            methods,
        })
    }

    pub fn symbol_count(&self) -> usize {
        self.n
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn rounds(&self) -> &[Vec<FieldMatrix<F>>] {
        &self.rounds
    }

    pub fn round(&self, i: usize) -> &[FieldMatrix<F>] {
        &self.rounds[i]
    }

    pub fn round_tau(&self) -> &[usize] {
        &self.round_tau
    }

    pub fn tau_total(&self) -> usize {
        self.round_tau.iter().sum()
    }

    /// How each round was chosen; `Heuristic` marks a cap fallback.
    pub fn methods(&self) -> &[SolveMethod] {
        &self.methods
    }
}

impl<F: Field> From<TransmissionScheme<F>> for MultiRoundScheme<F> {
    fn from(s: TransmissionScheme<F>) -> Self {
        MultiRoundScheme::new(s.symbol_count(), vec![s.nodes().to_vec()]).expect("widths already checked")
    }
}

/// Checks the multi-round preconditions and returns the minimum round count.
pub fn required_rounds(inst: &DisseminationInstance) -> Result<usize> {
    inst.check_demand_complete()?;
    inst.network().solvability_index().ok_or(Error::NotStronglyConnected)
}

/// Builds an `r`-round scheme, one round at a time.
pub fn schedule<F: Field>(
    inst: &DisseminationInstance,
    r: usize,
    strategy: Strategy,
    caps: &SearchCaps,
) -> Result<MultiRoundScheme<F>> {
    inst.check_field::<F>()?;
    let r0 = required_rounds(inst)?;
    if r < r0 {
        return Err(Error::RoundsTooFew {
            requested: r,
            required: r0,
        });
    }
    let n = inst.symbol_count();
    let k = inst.node_count();
    let mut rng = match strategy {
        Strategy::Random { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut rounds = Vec::with_capacity(r);
    let mut methods = Vec::with_capacity(r);
    for i in 1..=r {
        let ctx = RoundContext::<F>::new(inst, i)?;
        if ctx.is_fixpoint() {
            rounds.push(vec![FieldMatrix::empty(n); k]);
            methods.push(SolveMethod::Exact);
            continue;
        }
        let (choice, method) = match strategy {
            Strategy::Exact => {
                let c = minimize_round(&ctx, caps)?;
                (c.per_node, c.method)
            }
            Strategy::Flood => (construct_flood_round(&ctx), SolveMethod::Exact),
            Strategy::Random { samples, .. } => (
                random_round(&ctx, samples, rng.as_mut().expect("seeded"))?,
                SolveMethod::Heuristic,
            ),
        };
        debug_assert!(check_round_all(&ctx, &choice)?);
        rounds.push(choice);
        methods.push(method);
    }
    MultiRoundScheme::with_methods(n, rounds, methods)
}

/// `tau / dmax` as an exact fraction.
pub fn ratio_of(tau: usize, dmax: usize) -> Result<Ratio<u64>> {
    if dmax == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(Ratio::new(tau as u64, dmax as u64))
}

/// Scheduled transmissions over the distance lower bound.
pub fn ratio<F: Field>(inst: &DisseminationInstance, r: usize, caps: &SearchCaps) -> Result<Ratio<u64>> {
    let scheme = schedule::<F>(inst, r, Strategy::Exact, caps)?;
    ratio_of(scheme.tau_total(), bounds::dmax(inst)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::star::StarEntry;
    use super::Strategy;
    use proptest::strategy::Strategy as _;
    use proptest::prelude::*;

    type G2 = Fp<2>;
    type G3 = Fp<3>;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    /// Demand-complete instance: node `l` holds `held[l]` and requests the rest.
    fn complete_demand(q: u32, n: usize, net: DirectedNetwork, held: &[&[usize]]) -> DisseminationInstance {
        let possess: Vec<BTreeSet<usize>> = held.iter().map(|h| set(h)).collect();
        let request = possess.iter().map(|p| (0..n).filter(|s| !p.contains(s)).collect()).collect();
        DisseminationInstance::new(q, n, net, possess, request).unwrap()
    }

    fn three_cycle() -> DisseminationInstance {
        complete_demand(2, 3, DirectedNetwork::cycle(3), &[&[0], &[1], &[2]])
    }

    #[test]
    fn evolve_examples() {
        let a = StarMatrix::<G2>::parse("* 0 0; 0 * 0; 0 0 *").unwrap();
        assert_eq!(evolve(&a, &IntMatrix::identity(3), 5).unwrap(), a);
        let d = DirectedNetwork::cycle(3).adjacency(true);
        let one = evolve(&a, &d, 1).unwrap();
        assert_eq!(one, StarMatrix::parse("* 0 *; * * 0; 0 * *").unwrap());
        let two = evolve(&a, &d, 2).unwrap();
        assert_eq!(two.star_count(), 9);
        assert_eq!(evolve(&a, &d, 7).unwrap(), two);
    }

    #[test]
    fn evolve_matches_product_example() {
        // the same product as the integer-times-family example, read as one round
        let d = IntMatrix::from_rows(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]).unwrap();
        let a = StarMatrix::<G2>::parse("* 0 0; 0 0 *; 0 * 0").unwrap();
        assert_eq!(evolve(&a, &d, 1).unwrap(), int_mul_star(&d, &a).unwrap());
    }

    #[test]
    fn rhs_rank_counts_stars() {
        let inst = complete_demand(2, 4, DirectedNetwork::complete(2), &[&[0, 2, 3], &[1]]);
        let ctx = RoundContext::<G2>::new(&inst, 1).unwrap();
        assert_eq!(round_rhs_rank(&ctx, 0), 4);
        let lonely = complete_demand(2, 4, DirectedNetwork::new(2, [(1, 0)]).unwrap(), &[&[0, 2, 3], &[1]]);
        let ctx = RoundContext::<G2>::new(&lonely, 1).unwrap();
        assert_eq!(round_rhs_rank(&ctx, 1), 1);
        assert_eq!(round_rhs_rank(&ctx, 0), 4);
    }

    #[test]
    fn gamma_block_is_held_units() {
        let inst = complete_demand(2, 5, DirectedNetwork::complete(2), &[&[0, 2, 3], &[1]]);
        let ctx = RoundContext::<G2>::new(&inst, 1).unwrap();
        let expected = FieldMatrix::from_u64_rows(5, &[&[1, 0, 0, 0, 0], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 0]]).unwrap();
        assert_eq!(ctx.gamma_block(0), expected);
        assert_eq!(construct_flood_round(&ctx)[1].rows(), 1);
    }

    #[test]
    fn check_round_cases() {
        let inst = three_cycle();
        let ctx = RoundContext::<G2>::new(&inst, 1).unwrap();
        let flood = construct_flood_round(&ctx);
        assert!(check_round_all(&ctx, &flood).unwrap());
        let empty = vec![FieldMatrix::<G2>::empty(3); 3];
        assert!(!check_round(&ctx, &empty, 1).unwrap());
        let mut bad = flood.clone();
        bad[0] = FieldMatrix::from_u64_rows(3, &[&[0, 1, 0]]).unwrap();
        assert_eq!(check_round(&ctx, &bad, 1), Err(Error::SupportViolation { node: 1 }));
        let done = RoundContext::<G2>::new(&inst, 3).unwrap();
        assert!(done.is_fixpoint());
        assert!(check_round_all(&done, &empty).unwrap());
    }

    #[test]
    fn node_without_symbols_sends_nothing() {
        let inst = complete_demand(2, 2, DirectedNetwork::complete(3), &[&[0, 1], &[], &[0]]);
        let ctx = RoundContext::<G2>::new(&inst, 1).unwrap();
        assert_eq!(construct_flood_round(&ctx)[1].rows(), 0);
    }

    #[test]
    fn schedule_three_cycle() {
        let inst = three_cycle();
        let s = schedule::<G2>(&inst, 2, Strategy::Exact, &SearchCaps::default()).unwrap();
        let dmax = bounds::dmax(&inst).unwrap();
        assert_eq!(dmax, 3);
        assert!(s.tau_total() >= dmax && s.tau_total() <= 6);
        let flood = schedule::<G2>(&inst, 2, Strategy::Flood, &SearchCaps::default()).unwrap();
        assert_eq!(flood.round_tau(), &[3, 6]);
        assert_eq!(s.round_tau(), &[3, 3]);
        let padded = schedule::<G2>(&inst, 4, Strategy::Exact, &SearchCaps::default()).unwrap();
        assert_eq!(padded.round_tau()[2..], [0, 0]);
        assert_eq!(padded.tau_total(), s.tau_total());
    }

    #[test]
    fn schedule_preconditions() {
        let inst = three_cycle();
        assert_eq!(
            schedule::<G2>(&inst, 1, Strategy::Exact, &SearchCaps::default()),
            Err(Error::RoundsTooFew { requested: 1, required: 2 })
        );
        let split = complete_demand(2, 1, DirectedNetwork::new(2, [(0, 1)]).unwrap(), &[&[0], &[]]);
        assert_eq!(
            schedule::<G2>(&split, 3, Strategy::Exact, &SearchCaps::default()),
            Err(Error::NotStronglyConnected)
        );
        let partial = DisseminationInstance::new(
            2,
            2,
            DirectedNetwork::complete(2),
            vec![set(&[0]), set(&[1])],
            vec![set(&[1]), set(&[])],
        )
        .unwrap();
        assert_eq!(
            schedule::<G2>(&partial, 1, Strategy::Exact, &SearchCaps::default()),
            Err(Error::IncompleteDemand(2))
        );
        assert!(matches!(
            schedule::<G3>(&inst, 2, Strategy::Exact, &SearchCaps::default()),
            Err(Error::FieldMismatch { .. })
        ));
    }

    #[test]
    fn single_round_matches_one_round_solver() {
        let inst = complete_demand(2, 4, DirectedNetwork::complete(3), &[&[0, 1], &[1, 2], &[2, 3, 0]]);
        let s = schedule::<G2>(&inst, 1, Strategy::Exact, &SearchCaps::default()).unwrap();
        let direct = one_round::solve_exact::<G2>(&inst, &SearchCaps::default()).unwrap();
        assert_eq!(s.tau_total(), direct.tau);
    }

    #[test]
    fn forced_flooding_has_ratio_one() {
        let inst = complete_demand(2, 1, DirectedNetwork::complete(2), &[&[0], &[]]);
        assert_eq!(ratio::<G2>(&inst, 1, &SearchCaps::default()).unwrap(), Ratio::from_integer(1));
        let nothing = complete_demand(2, 1, DirectedNetwork::complete(2), &[&[0], &[0]]);
        assert_eq!(ratio::<G2>(&nothing, 1, &SearchCaps::default()), Err(Error::DivisionByZero));
    }

    #[test]
    fn random_strategy_is_deterministic_and_valid() {
        let inst = three_cycle();
        let strat = Strategy::Random { samples: 16, seed: 9 };
        let a = schedule::<G2>(&inst, 2, strat, &SearchCaps::default()).unwrap();
        let b = schedule::<G2>(&inst, 2, strat, &SearchCaps::default()).unwrap();
        assert_eq!(a, b);
        for i in 1..=2 {
            let ctx = RoundContext::<G2>::new(&inst, i).unwrap();
            assert!(check_round_all(&ctx, a.round(i - 1)).unwrap());
        }
    }

    fn arb_instance() -> impl proptest::strategy::Strategy<Value = DisseminationInstance> {
        (2usize..=5, 1usize..=5).prop_flat_map(|(k, n)| {
            (
                proptest::collection::vec(any::<bool>(), k * k),
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), k), n),
            )
                .prop_map(move |(bits, owners)| {
                    let edges = (0..k)
                        .flat_map(|u| (0..k).map(move |v| (u, v)))
                        .filter(|&(u, v)| u != v && (bits[u * k + v] || v == (u + 1) % k));
                    let net = DirectedNetwork::new(k, edges).unwrap();
                    let mut possess = vec![BTreeSet::new(); k];
                    for (s, who) in owners.iter().enumerate() {
                        let first = who.iter().position(|&b| b).unwrap_or(s % k);
                        possess[first].insert(s);
                        for (l, &b) in who.iter().enumerate() {
                            if b {
                                possess[l].insert(s);
                            }
                        }
                    }
                    let request = possess.iter().map(|p| (0..n).filter(|s| !p.contains(s)).collect()).collect();
                    DisseminationInstance::new(2, n, net, possess, request).unwrap()
                })
        })
    }

    /// `(diag(e_j) ⊗ I)(D^i ⊗ E)(Â ⊗ 1_n)` built literally from integer and family products.
    fn expanded_family(inst: &DisseminationInstance, i: usize, j: usize) -> StarMatrix<G2> {
        let k = inst.node_count();
        let n = inst.symbol_count();
        let d = inst.network().adjacency(true).boolean_pow(i).unwrap();
        let full = int_mul_star(&d.tensor(&IntMatrix::ones(n, n)), &inst.possession_family::<G2>().repeat_rows(n)).unwrap();
        let mut e = vec![0; k];
        e[j] = 1;
        int_mul_star(&IntMatrix::diag(&e).tensor(&IntMatrix::identity(n)), &full).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn flood_rounds_pass_and_possession_grows(inst in arb_instance()) {
            let r0 = inst.network().solvability_index().unwrap();
            for i in 1..=r0 + 1 {
                let ctx = RoundContext::<G2>::new(&inst, i).unwrap();
                prop_assert!(ctx.before.stars_subset_of(&ctx.after));
                prop_assert!(check_round_all(&ctx, &construct_flood_round(&ctx)).unwrap());
            }
            let last = RoundContext::<G2>::new(&inst, r0).unwrap();
            prop_assert_eq!(last.after.star_count(), inst.node_count() * inst.symbol_count());
        }

        #[test]
        fn rhs_rank_agrees_with_maxrank(inst in arb_instance(), i in 1usize..3, j in 0usize..5) {
            let j = j % inst.node_count();
            let ctx = RoundContext::<G2>::new(&inst, i).unwrap();
            prop_assert_eq!(round_rhs_rank(&ctx, j), expanded_family(&inst, i, j).maxrank().unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn minimized_rounds_pass_and_beat_flooding(inst in arb_instance()) {
            let r0 = inst.network().solvability_index().unwrap();
            for i in 1..=r0 {
                let ctx = RoundContext::<G2>::new(&inst, i).unwrap();
                let c = minimize_round(&ctx, &SearchCaps::default()).unwrap();
                prop_assert!(check_round_all(&ctx, &c.per_node).unwrap());
                let cost: usize = c.per_node.iter().map(FieldMatrix::rows).sum();
                let flood: usize = construct_flood_round(&ctx).iter().map(FieldMatrix::rows).sum();
                prop_assert!(cost <= flood);
            }
        }
    }

    #[test]
    fn star_entries_in_context() {
        let inst = three_cycle();
        let ctx = RoundContext::<G2>::new(&inst, 1).unwrap();
        assert_eq!(ctx.after.get(0, 2), StarEntry::Star);
        assert!(ctx.after.get(0, 1).is_zero());
    }
}
