//! The solutions document written by `solve` and read back by `export` and
//! `simulate`. Reaction and order indices are 0-based.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::dot::structure_to_dot;
use crate::io::instance::write_instance;
use crate::model::{ExperimentGraph, Reaction, RegulatoryStructure, SpeciesTable};
use crate::pipeline::{Run, SolveReport};
use crate::reconstruct::Solution;
use crate::validity::ValidityReport;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub from: String,
    pub to: String,
    pub reactions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureEntry {
    pub reactions: Vec<Vec<i32>>,
    /// `(a, b)`: reaction `a` is slower than reaction `b`. Transitively closed.
    pub slower: Vec<(usize, usize)>,
    #[serde(default)]
    pub sequences: Vec<SequenceEntry>,
}

impl StructureEntry {
    pub fn from_solution(g: &ExperimentGraph, s: &Solution) -> Self {
        StructureEntry {
            reactions: s
                .structure
                .reactions()
                .iter()
                .map(|r| r.entries().to_vec())
                .collect(),
            slower: s.structure.slower().iter().copied().collect(),
            sequences: s
                .realizations
                .iter()
                .map(|q| {
                    let (from, to) = g.edge_ids(q.edge);
                    SequenceEntry {
                        from,
                        to,
                        reactions: q.reactions.clone(),
                    }
                })
                .collect(),
        }
    }

    pub fn to_structure(&self, species: &SpeciesTable) -> Result<RegulatoryStructure> {
        let reactions = self
            .reactions
            .iter()
            .map(|r| Reaction::new(r.clone(), species))
            .collect::<Result<Vec<_>>>()?;
        RegulatoryStructure::new(reactions, self.slower.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSteps {
    pub from: String,
    pub to: String,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsEntry {
    pub max_reactions: usize,
    pub edge_steps: Vec<EdgeSteps>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunEntry {
    /// Hidden values per state id.
    pub extension: BTreeMap<String, Vec<u8>>,
    pub species: Vec<String>,
    pub bounds: BoundsEntry,
    pub solutions: Vec<StructureEntry>,
}

impl RunEntry {
    fn new(run: &Run) -> Self {
        let g = &run.graph;
        let extension = (0..g.states().len())
            .map(|i| (g.id(i).to_owned(), run.extension.rows()[i].clone()))
            .collect();
        let edge_steps = g
            .ordered_responses()
            .into_iter()
            .map(|e| {
                let (from, to) = g.edge_ids(e);
                EdgeSteps {
                    from,
                    to,
                    steps: run.bounds.steps(e),
                }
            })
            .collect();
        RunEntry {
            extension,
            species: g.species().names().to_vec(),
            bounds: BoundsEntry {
                max_reactions: run.bounds.max_reactions,
                edge_steps,
            },
            solutions: run
                .solutions
                .iter()
                .map(|s| StructureEntry::from_solution(g, s))
                .collect(),
        }
    }

    /// The observed values of state `id` in `g`, followed by its hidden values
    /// in this run.
    pub fn extended_state(&self, g: &ExperimentGraph, id: &str) -> Option<Vec<i32>> {
        let i = g.state_index(id)?;
        let mut v = g.values(i).to_vec();
        v.extend(self.extension.get(id)?.iter().map(|&b| i32::from(b)));
        Some(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionsDocument {
    pub format_version: u32,
    /// SHA-256 of the canonical instance text.
    pub instance_digest: String,
    pub species: Vec<String>,
    pub validity: ValidityReport,
    pub hidden_species: usize,
    pub additional_changes: usize,
    pub runs: Vec<RunEntry>,
}

pub fn instance_digest(g: &ExperimentGraph) -> String {
    hex::encode(Sha256::digest(write_instance(g).as_bytes()))
}

impl SolutionsDocument {
    pub fn new(g: &ExperimentGraph, report: &SolveReport) -> Self {
        SolutionsDocument {
            format_version: FORMAT_VERSION,
            instance_digest: instance_digest(g),
            species: g.species().names().to_vec(),
            validity: report.validity.clone(),
            hidden_species: report.hidden,
            additional_changes: report.changes,
            runs: report.runs.iter().map(RunEntry::new).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SolutionsDocument =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Document(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn solution_count(&self) -> usize {
        self.runs.iter().map(|r| r.solutions.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

/// JSON: the document itself. DOT: one digraph per solution, named
/// `run<i>_model<j>`.
pub fn write_solutions(doc: &SolutionsDocument, format: Format) -> String {
    match format {
        Format::Json => doc.to_json(),
        Format::Dot => {
            let mut out = String::new();
            for (i, run) in doc.runs.iter().enumerate() {
                for (j, s) in run.solutions.iter().enumerate() {
                    let name = format!("run{}_model{}", i + 1, j + 1);
                    out.push_str(&structure_to_dot(&name, &run.species, &s.reactions));
                }
            }
            out
        }
    }
}
