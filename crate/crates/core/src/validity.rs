//! Validity of experiment graphs: determinism of responses (I), equal states
//! reaching equal terminals (II), and a decrease on every response edge (III).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ExperimentGraph;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidityReport {
    pub is_valid: bool,
    /// States with more than one outgoing response edge.
    pub det_violations: Vec<String>,
    /// Value-equal states whose terminals differ in value.
    pub equal_terminal_violations: Vec<(String, String)>,
    /// Response edges on which no species decreases.
    pub decrease_violations: Vec<(String, String)>,
    /// Response states whose chain never reaches a declared terminal. These
    /// are warnings and do not affect `is_valid`.
    pub dangling_chains: Vec<String>,
}

/// Maps each state to the terminal reached along its response chain.
/// Terminals map to themselves; states whose chain never reaches a terminal
/// are absent.
pub fn terminal_map(g: &ExperimentGraph) -> Result<BTreeMap<usize, usize>> {
    if let Some(i) = (0..g.states().len()).find(|&i| g.responses_from(i).nth(1).is_some()) {
        return Err(Error::Nondeterministic(g.id(i).to_owned()));
    }
    Ok(deterministic_terminals(g))
}

/// Terminal map over the states whose chain is deterministic all the way.
fn deterministic_terminals(g: &ExperimentGraph) -> BTreeMap<usize, usize> {
    let n = g.states().len();
    let successor: Vec<Option<usize>> = (0..n)
        .map(|i| {
            let mut out = g.responses_from(i);
            match (out.next(), out.next()) {
                (Some(e), None) => Some(e.to),
                _ => None,
            }
        })
        .collect();
    let mut map = BTreeMap::new();
    for start in 0..n {
        let mut seen = BTreeSet::new();
        let mut at = start;
        loop {
            if g.is_terminal(at) {
                map.insert(start, at);
                break;
            }
            if !seen.insert(at) {
                break;
            }
            match successor[at] {
                Some(next) => at = next,
                None => break,
            }
        }
    }
    map
}

/// Lists every violation of conditions I-III.
///
/// Condition II is checked among states that have an outgoing response edge,
/// which is where the associated terminal is defined.
pub fn validate(g: &ExperimentGraph) -> ValidityReport {
    let n = g.states().len();
    let det_violations: Vec<String> = (0..n)
        .filter(|&i| g.responses_from(i).nth(1).is_some())
        .map(|i| g.id(i).to_owned())
        .collect();

    let terminals = deterministic_terminals(g);
    let sources: Vec<usize> = (0..n)
        .filter(|&i| g.responses_from(i).next().is_some())
        .collect();

    let mut equal_terminal_violations = Vec::new();
    for (k, &a) in sources.iter().enumerate() {
        for &b in &sources[k + 1..] {
            if g.values(a) != g.values(b) {
                continue;
            }
            if let (Some(&ta), Some(&tb)) = (terminals.get(&a), terminals.get(&b)) {
                if g.values(ta) != g.values(tb) {
                    equal_terminal_violations.push((g.id(a).to_owned(), g.id(b).to_owned()));
                }
            }
        }
    }

    let decrease_violations: Vec<(String, String)> = g
        .responses()
        .iter()
        .filter(|&&e| !g.edge_diff(e).iter().any(|&d| d < 0))
        .map(|&e| g.edge_ids(e))
        .collect();

    let dangling_chains = sources
        .iter()
        .filter(|i| !terminals.contains_key(i))
        .map(|&i| g.id(i).to_owned())
        .collect();

    ValidityReport {
        is_valid: det_violations.is_empty()
            && equal_terminal_violations.is_empty()
            && decrease_violations.is_empty(),
        det_violations,
        equal_terminal_violations,
        decrease_violations,
        dangling_chains,
    }
}
