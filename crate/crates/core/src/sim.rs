//! Symbolic execution of the broadcast protocol.
//!
//! Symbols are never instantiated: a node's knowledge is the span of the
//! coefficient vectors it holds, and a request is met iff its unit vector lies
//! in that span. Indices inside a [`Transcript`] are 1-based, like every report.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldMatrix};
use crate::instance::DisseminationInstance;
use crate::multiround::MultiRoundScheme;

/// Span of everything a node can compute, kept in RREF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeKnowledge<F> {
    basis: FieldMatrix<F>,
}

impl<F: Field> NodeKnowledge<F> {
    pub fn initial(inst: &DisseminationInstance, l: usize) -> Self {
        let n = inst.symbol_count();
        let rows = inst.possess(l).iter().map(|&s| FieldMatrix::unit(n, s)).collect();
        NodeKnowledge {
            basis: FieldMatrix::from_rows(n, rows).expect("unit rows"),
        }
    }

    pub fn basis(&self) -> &FieldMatrix<F> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.basis.spans(v)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn absorb(&mut self, v: &[F]) -> bool {
        if self.contains(v) {
            return false;
        }
        self.basis = self.basis.with_row(v).expect("width n").rref().0;
        true
    }
}

/// One vector a node has on record: its own symbol (round 0) or a reception.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogEntry<F> {
    pub round: usize,
    pub sender: usize,
    pub vector: Vec<F>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Broadcast<F> {
    pub node: usize,
    pub vectors: FieldMatrix<F>,
    pub received_by: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundLog<F> {
    pub round: usize,
    pub broadcasts: Vec<Broadcast<F>>,
    /// Knowledge dimension of every node after the round.
    pub knowledge_dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recovery<F> {
    pub node: usize,
    pub symbol: usize,
    pub satisfied: bool,
    /// Coefficients over the node's log that sum to the unit vector of `symbol`.
    pub coefficients: Option<Vec<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript<F> {
    pub initial_dims: Vec<usize>,
    pub rounds: Vec<RoundLog<F>>,
    /// Per node, its own symbols followed by everything it received, in order.
    pub logs: Vec<Vec<LogEntry<F>>>,
    pub recovery: Vec<Recovery<F>>,
    pub all_satisfied: bool,
}

impl<F: Field> Transcript<F> {
    /// `Σ c_i · log_i` for a recovery entry; equals `e_symbol` when satisfied.
    pub fn recombine(&self, rec: &Recovery<F>) -> Option<Vec<F>> {
        let coeffs = rec.coefficients.as_ref()?;
        let log = &self.logs[rec.node - 1];
        let n = log.first().map_or(0, |e| e.vector.len());
        let mut out = vec![F::zero(); n];
        for (entry, &c) in log.iter().zip(coeffs) {
            for (o, &v) in out.iter_mut().zip(&entry.vector) {
                *o = *o + c * v;
            }
        }
        Some(out)
    }

    /// Requests left unmet, as `(node, symbol)`.
    pub fn unsatisfied(&self) -> Vec<(usize, usize)> {
        self.recovery
            .iter()
            .filter(|r| !r.satisfied)
            .map(|r| (r.node, r.symbol))
            .collect()
    }

    pub fn final_dims(&self) -> &[usize] {
        self.rounds.last().map_or(&self.initial_dims, |r| &r.knowledge_dims)
    }
}

struct Executor<'a, F> {
    inst: &'a DisseminationInstance,
    knowledge: Vec<NodeKnowledge<F>>,
    initial_dims: Vec<usize>,
    logs: Vec<Vec<LogEntry<F>>>,
    rounds: Vec<RoundLog<F>>,
}

impl<'a, F: Field> Executor<'a, F> {
    fn new(inst: &'a DisseminationInstance) -> Self {
        let k = inst.node_count();
        let n = inst.symbol_count();
        Executor {
            inst,
            knowledge: (0..k).map(|l| NodeKnowledge::initial(inst, l)).collect(),
            initial_dims: (0..k).map(|l| inst.possess(l).len()).collect(),
            logs: (0..k)
                .map(|l| {
                    inst.possess(l)
                        .iter()
                        .map(|&s| LogEntry {
                            round: 0,
                            sender: l + 1,
                            vector: FieldMatrix::unit(n, s),
                        })
                        .collect()
                })
                .collect(),
            rounds: Vec::new(),
        }
    }

    fn round(&mut self, sends: &[FieldMatrix<F>]) -> Result<()> {
        let round = self.rounds.len() + 1;
        let net = self.inst.network();
        // transmissions use the knowledge held at the start of the round
        for (l, m) in sends.iter().enumerate() {
            if m.row_iter().any(|v| !self.knowledge[l].contains(v)) {
                return Err(Error::IllegalTransmission { round, node: l + 1 });
            }
        }
        let mut broadcasts = Vec::new();
        for (l, m) in sends.iter().enumerate() {
            if m.rows() == 0 {
                continue;
            }
            let outs = net.out_neighbors(l);
            for &o in outs {
                for v in m.row_iter() {
                    self.logs[o].push(LogEntry {
                        round,
                        sender: l + 1,
                        vector: v.to_vec(),
                    });
                }
            }
            broadcasts.push(Broadcast {
                node: l + 1,
                vectors: m.clone(),
                received_by: outs.iter().map(|o| o + 1).collect(),
            });
        }
        for (l, m) in sends.iter().enumerate() {
            for &o in net.out_neighbors(l) {
                for v in m.row_iter() {
                    self.knowledge[o].absorb(v);
                }
            }
        }
        self.rounds.push(RoundLog {
            round,
            broadcasts,
            knowledge_dims: self.knowledge.iter().map(NodeKnowledge::dim).collect(),
        });
        Ok(())
    }

    fn finish(self) -> Result<Transcript<F>> {
        let n = self.inst.symbol_count();
        let mut recovery = Vec::new();
        for l in 0..self.inst.node_count() {
            let log = FieldMatrix::from_rows(n, self.logs[l].iter().map(|e| e.vector.clone()).collect())?;
            for &eta in self.inst.request(l) {
                let coefficients = log.solve_in_row_space(&FieldMatrix::unit(n, eta))?;
                recovery.push(Recovery {
                    node: l + 1,
                    symbol: eta + 1,
                    satisfied: coefficients.is_some(),
                    coefficients,
                });
            }
        }
        Ok(Transcript {
            initial_dims: self.initial_dims,
            all_satisfied: recovery.iter().all(|r| r.satisfied),
            rounds: self.rounds,
            logs: self.logs,
            recovery,
        })
    }
}

/// Runs `scheme` round by round, rejecting any vector outside its sender's span.
pub fn execute<F: Field>(inst: &DisseminationInstance, scheme: &MultiRoundScheme<F>) -> Result<Transcript<F>> {
    inst.check_field::<F>()?;
    if scheme.symbol_count() != inst.symbol_count() {
        return Err(Error::DimensionMismatch {
            expected: inst.symbol_count(),
            found: scheme.symbol_count(),
        });
    }
    let k = inst.node_count();
    if let Some((i, _)) = scheme.rounds().iter().enumerate().find(|(_, r)| r.len() != k) {
        return Err(Error::SchemeMismatch(format!(
            "round {} lists {} nodes, the instance has {k}",
            i + 1,
            scheme.round(i).len()
        )));
    }
    let mut exec = Executor::new(inst);
    for sends in scheme.rounds() {
        exec.round(sends)?;
    }
    exec.finish()
}

/// `r` rounds in which every node rebroadcasts a basis of all it knows.
pub fn flood_execute<F: Field>(inst: &DisseminationInstance, r: usize) -> Result<Transcript<F>> {
    inst.check_field::<F>()?;
    let mut exec = Executor::new(inst);
    for _ in 0..r {
        let sends: Vec<FieldMatrix<F>> = exec.knowledge.iter().map(|kn| kn.basis().clone()).collect();
        exec.round(&sends)?;
    }
    exec.finish()
}
