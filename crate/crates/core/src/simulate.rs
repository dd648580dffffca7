//! Forward simulation under the fastest-reaction semantics, and a
//! conformality checker built on it that shares no code with the search.

use std::collections::HashSet;

use serde::Serialize;

use crate::bounds::edge_step_bound;
use crate::error::{Error, Result};
use crate::model::{self, ExperimentGraph, RegulatoryStructure, SpeciesTable};
use crate::reconstruct::monotone_ok;
use crate::validity::validate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    ReachedFixpoint,
    NondeterministicStall,
    CycleDetected,
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub states: Vec<Vec<i32>>,
    pub fired: Vec<usize>,
    pub outcome: Outcome,
}

/// The reaction that fires in `y`: `Ok(None)` if nothing is enabled, `Err`
/// with the enabled set if no single reaction is faster than all others.
pub fn fastest(
    rs: &RegulatoryStructure,
    species: &SpeciesTable,
    y: &[i32],
) -> std::result::Result<Option<usize>, Vec<usize>> {
    let enabled: Vec<usize> = (0..rs.reactions().len())
        .filter(|&i| model::fires(rs.reactions()[i].entries(), y, species.maxima()))
        .collect();
    let winners: Vec<usize> = enabled
        .iter()
        .copied()
        .filter(|&f| enabled.iter().all(|&j| j == f || rs.is_slower(j, f)))
        .collect();
    match (enabled.len(), winners.as_slice()) {
        (0, _) => Ok(None),
        (_, [f]) => Ok(Some(*f)),
        _ => Err(enabled),
    }
}

fn check_dims(rs: &RegulatoryStructure, species: &SpeciesTable, x: &[i32]) -> Result<()> {
    species.check_len(x.len())?;
    for r in rs.reactions() {
        species.check_len(r.len())?;
    }
    if !species.admits(x) {
        return Err(Error::Graph(format!("start state {x:?} outside capacities")));
    }
    Ok(())
}

/// Default step limit: the number of distinct states.
pub fn state_space_size(species: &SpeciesTable) -> usize {
    species
        .maxima()
        .iter()
        .fold(1usize, |acc, &m| acc.saturating_mul(m as usize + 1))
}

pub fn run(
    rs: &RegulatoryStructure,
    species: &SpeciesTable,
    x0: &[i32],
    max_steps: Option<usize>,
) -> Result<Trajectory> {
    check_dims(rs, species, x0)?;
    let limit = max_steps.unwrap_or_else(|| state_space_size(species));
    let mut states = vec![x0.to_vec()];
    let mut fired = Vec::new();
    let mut seen: HashSet<Vec<i32>> = HashSet::from([x0.to_vec()]);
    let outcome = loop {
        let y = states.last().expect("nonempty");
        let f = match fastest(rs, species, y) {
            Ok(None) => break Outcome::ReachedFixpoint,
            Err(_) => break Outcome::NondeterministicStall,
            Ok(Some(f)) => f,
        };
        if fired.len() == limit {
            break Outcome::StepLimit;
        }
        let next = model::add(y, rs.reactions()[f].entries());
        fired.push(f);
        let repeat = !seen.insert(next.clone());
        states.push(next);
        if repeat {
            break Outcome::CycleDetected;
        }
    };
    Ok(Trajectory {
        states,
        fired,
        outcome,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeFailure {
    pub from: String,
    pub to: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformalityReport {
    /// Terminal id with the reactions enabled there (VII).
    pub enabled_at_terminals: Vec<(String, Vec<usize>)>,
    /// Response edges not realized by the simulation (VIII).
    pub edge_failures: Vec<EdgeFailure>,
    /// Reactions never fired on any edge (IX).
    pub unused: Vec<usize>,
}

impl ConformalityReport {
    pub fn is_conformal(&self) -> bool {
        self.enabled_at_terminals.is_empty() && self.edge_failures.is_empty() && self.unused.is_empty()
    }
}

/// Checks VII-IX by simulation. Each response edge `(x, x')` is replayed from
/// `x`, firing the fastest reaction until `x'` is reached; a stall, a
/// non-monotone step or running past the edge's step bound fails the edge.
pub fn check_conformal(rs: &RegulatoryStructure, g: &ExperimentGraph) -> Result<ConformalityReport> {
    if !validate(g).is_valid {
        return Err(Error::InvalidGraph);
    }
    let species = g.species();
    for r in rs.reactions() {
        species.check_len(r.len())?;
    }

    let enabled_at_terminals = g
        .terminals()
        .iter()
        .filter_map(|&t| {
            let en: Vec<usize> = (0..rs.reactions().len())
                .filter(|&i| model::fires(rs.reactions()[i].entries(), g.values(t), species.maxima()))
                .collect();
            (!en.is_empty()).then(|| (g.id(t).to_owned(), en))
        })
        .collect();

    let mut used = vec![false; rs.reactions().len()];
    let mut edge_failures = Vec::new();
    for e in g.ordered_responses() {
        let (x, x2) = (g.values(e.from), g.values(e.to));
        let bound = edge_step_bound(g, e, 0)?;
        let mut y = x.to_vec();
        let mut steps = 0;
        let mut fired = Vec::new();
        let failure = loop {
            if y == x2 {
                break None;
            }
            if steps == bound {
                break Some(format!("not reached within {bound} steps"));
            }
            let f = match fastest(rs, species, &y) {
                Ok(Some(f)) => f,
                Ok(None) => break Some(format!("stalled in {y:?} with nothing enabled")),
                Err(en) => break Some(format!("no unique fastest reaction among {en:?} in {y:?}")),
            };
            if !monotone_ok(&rs.reactions()[f], x, x2) {
                break Some(format!("reaction {f} is not monotone for this edge"));
            }
            fired.push(f);
            y = model::add(&y, rs.reactions()[f].entries());
            steps += 1;
        };
        match failure {
            None => {
                for f in fired {
                    used[f] = true;
                }
            }
            Some(reason) => {
                let (from, to) = g.edge_ids(e);
                edge_failures.push(EdgeFailure { from, to, reason });
            }
        }
    }
    let unused = (0..used.len()).filter(|&i| !used[i]).collect();
    Ok(ConformalityReport {
        enabled_at_terminals,
        edge_failures,
        unused,
    })
}
