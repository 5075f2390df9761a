//! JSON files: instances, schemes, and the 1-based conventions they share.
//!
//! Node keys are decimal strings (`"1"`, `"2"`, …); a node missing from
//! `possess` or `request` has an empty set. Unknown keys are rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use dissem::{DirectedNetwork, DisseminationInstance, Field, FieldMatrix, MultiRoundScheme};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format: u32,
    pub field: u32,
    pub n: usize,
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub possess: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub request: BTreeMap<String, Vec<usize>>,
}

fn check_version(found: u32) -> Result<(), CliError> {
    if found != FORMAT_VERSION {
        return Err(CliError::Format(format!(
            "unsupported format version {found} (expected {FORMAT_VERSION})"
        )));
    }
    Ok(())
}

fn node_index(key: &str, k: usize, what: &str) -> Result<usize, CliError> {
    match key.parse::<usize>() {
        Ok(v) if (1..=k).contains(&v) => Ok(v - 1),
        _ => Err(CliError::Format(format!("{what}: node key {key:?} is not in 1..={k}"))),
    }
}

fn symbol_sets(map: &BTreeMap<String, Vec<usize>>, k: usize, n: usize, what: &str) -> Result<Vec<BTreeSet<usize>>, CliError> {
    let mut out = vec![BTreeSet::new(); k];
    for (key, symbols) in map {
        let l = node_index(key, k, what)?;
        for &s in symbols {
            if !(1..=n).contains(&s) {
                return Err(CliError::Format(format!("{what}: node {key} lists symbol {s} outside 1..={n}")));
            }
            if !out[l].insert(s - 1) {
                return Err(CliError::Format(format!("{what}: node {key} lists symbol {s} twice")));
            }
        }
    }
    Ok(out)
}

fn symbol_map(sets: &[BTreeSet<usize>]) -> BTreeMap<String, Vec<usize>> {
    sets.iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(l, s)| ((l + 1).to_string(), s.iter().map(|x| x + 1).collect()))
        .collect()
}

impl InstanceFile {
    pub fn from_instance(inst: &DisseminationInstance) -> Self {
        InstanceFile {
            format: FORMAT_VERSION,
            field: inst.field_order(),
            n: inst.symbol_count(),
            nodes: inst.node_count(),
            edges: inst.network().edges().map(|(u, v)| [u + 1, v + 1]).collect(),
            possess: symbol_map(inst.possess_sets()),
            request: symbol_map(inst.request_sets()),
        }
    }

    pub fn to_instance(&self) -> Result<DisseminationInstance, CliError> {
        check_version(self.format)?;
        let k = self.nodes;
        let mut edges = Vec::with_capacity(self.edges.len());
        for &[u, v] in &self.edges {
            if !(1..=k).contains(&u) || !(1..=k).contains(&v) {
                return Err(CliError::Format(format!("edge [{u}, {v}] references a node outside 1..={k}")));
            }
            edges.push((u - 1, v - 1));
        }
        let net = DirectedNetwork::new(k, edges)?;
        let possess = symbol_sets(&self.possess, k, self.n, "possess")?;
        let request = symbol_sets(&self.request, k, self.n, "request")?;
        Ok(DisseminationInstance::new(self.field, self.n, net, possess, request)?)
    }
}

pub fn parse_instance(text: &str) -> Result<DisseminationInstance, CliError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.to_instance()
}

pub fn instance_to_json(inst: &DisseminationInstance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serializes")
}

pub fn read_instance(path: &Path) -> Result<DisseminationInstance, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    parse_instance(&text).map_err(|e| e.in_file(path))
}

/// Coding vectors per round: `rounds[i]["node"]` is a list of coefficient rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub format: u32,
    pub field: u32,
    pub n: usize,
    pub rounds: Vec<BTreeMap<String, Vec<Vec<u32>>>>,
}

impl SchemeFile {
    pub fn from_scheme<F: Field>(scheme: &MultiRoundScheme<F>) -> Self {
        SchemeFile {
            format: FORMAT_VERSION,
            field: F::ORDER,
            n: scheme.symbol_count(),
            rounds: scheme
                .rounds()
                .iter()
                .map(|round| {
                    round
                        .iter()
                        .enumerate()
                        .filter(|(_, m)| m.rows() > 0)
                        .map(|(l, m)| ((l + 1).to_string(), m.to_values()))
                        .collect()
                })
                .collect(),
        }
    }

    /// Builds the scheme for a network of `k` nodes; absent nodes stay silent.
    pub fn to_scheme<F: Field>(&self, k: usize) -> Result<MultiRoundScheme<F>, CliError> {
        check_version(self.format)?;
        if self.field != F::ORDER {
            return Err(CliError::Core(dissem::Error::FieldMismatch {
                solver: F::ORDER,
                instance: self.field,
            }));
        }
        let n = self.n;
        let mut rounds = Vec::with_capacity(self.rounds.len());
        for (i, round) in self.rounds.iter().enumerate() {
            let mut per_node = vec![FieldMatrix::empty(n); k];
            for (key, rows) in round {
                let what = format!("round {}", i + 1);
                let l = node_index(key, k, &what)?;
                let mut parsed = Vec::with_capacity(rows.len());
                for row in rows {
                    if row.len() != n {
                        return Err(CliError::Format(format!(
                            "{what}: node {key} has a vector of length {} (expected {n})",
                            row.len()
                        )));
                    }
                    if let Some(v) = row.iter().find(|&&v| v >= F::ORDER) {
                        return Err(CliError::Format(format!("{what}: node {key} uses {v}, not an element of GF({})", F::ORDER)));
                    }
                    parsed.push(row.iter().map(|&v| F::from_u64(v.into())).collect());
                }
                per_node[l] = FieldMatrix::from_rows(n, parsed)?;
            }
            rounds.push(per_node);
        }
        Ok(MultiRoundScheme::new(n, rounds)?)
    }
}

pub fn read_scheme(path: &Path) -> Result<SchemeFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let file: SchemeFile = serde_json::from_str(&text).map_err(|e| CliError::from(e).in_file(path))?;
    Ok(file)
}
