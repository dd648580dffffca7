//! Line-oriented instance format.
//!
//! ```text
//! # comment
//! species <name> 0..<max>
//! state <id> <name>=<value> ...      (every species, once)
//! perturb <from> <to>
//! response <from> <to>
//! terminal <id>
//! ```
//!
//! Species named `_h<k>` declared after all other species are read back as
//! hidden species.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{ExperimentGraph, SpeciesTable, StateVector, HIDDEN_PREFIX};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_int(line: usize, token: &str) -> Result<i32> {
    token
        .parse()
        .map_err(|_| err(line, format!("expected an integer, found `{token}`")))
}

fn is_hidden_name(name: &str) -> bool {
    name.strip_prefix(HIDDEN_PREFIX)
        .is_some_and(|k| !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()))
}

/// `name=value` pairs of one state line.
type Assignments = Vec<(String, i32)>;

pub fn parse_instance(text: &str) -> Result<ExperimentGraph> {
    let mut species: Vec<(String, i32)> = Vec::new();
    let mut hidden: Vec<String> = Vec::new();
    let mut states: Vec<(usize, String, Assignments)> = Vec::new();
    let mut perturbations: Vec<(usize, String, String)> = Vec::new();
    let mut responses: Vec<(usize, String, String)> = Vec::new();
    let mut terminals: Vec<(usize, String)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let arity = |n: usize| {
            if tokens.len() == n {
                Ok(())
            } else {
                Err(err(
                    line,
                    format!("`{}` takes {} argument(s)", tokens[0], n - 1),
                ))
            }
        };
        match tokens[0] {
            "species" => {
                arity(3)?;
                if !states.is_empty() {
                    return Err(err(line, "species must be declared before states"));
                }
                let name = tokens[1].to_owned();
                if species.iter().any(|(n, _)| *n == name) || hidden.contains(&name) {
                    return Err(err(line, format!("duplicate species `{name}`")));
                }
                let (lo, hi) = tokens[2]
                    .split_once("..")
                    .ok_or_else(|| err(line, format!("expected <lo>..<hi>, found `{}`", tokens[2])))?;
                let (lo, hi) = (parse_int(line, lo)?, parse_int(line, hi)?);
                if lo != 0 {
                    return Err(err(line, "capacity must start at 0"));
                }
                if hi < 0 {
                    return Err(err(line, "empty capacity"));
                }
                if is_hidden_name(&name) {
                    if hi != 1 {
                        return Err(err(line, format!("hidden species `{name}` must be 0..1")));
                    }
                    hidden.push(name);
                } else {
                    if !hidden.is_empty() {
                        return Err(err(line, "observed species must precede hidden species"));
                    }
                    species.push((name, hi));
                }
            }
            "state" => {
                if tokens.len() < 2 {
                    return Err(err(line, "`state` needs an id"));
                }
                let id = tokens[1].to_owned();
                if states.iter().any(|(_, s, _)| *s == id) {
                    return Err(err(line, format!("duplicate state `{id}`")));
                }
                let mut values = Vec::new();
                for tok in &tokens[2..] {
                    let (name, value) = tok
                        .split_once('=')
                        .ok_or_else(|| err(line, format!("expected <species>=<value>, found `{tok}`")))?;
                    values.push((name.to_owned(), parse_int(line, value)?));
                }
                states.push((line, id, values));
            }
            "perturb" | "response" => {
                arity(3)?;
                let list = if tokens[0] == "perturb" {
                    &mut perturbations
                } else {
                    &mut responses
                };
                if list.iter().any(|(_, a, b)| a == tokens[1] && b == tokens[2]) {
                    return Err(err(line, "duplicate edge"));
                }
                list.push((line, tokens[1].to_owned(), tokens[2].to_owned()));
            }
            "terminal" => {
                arity(2)?;
                if terminals.iter().any(|(_, t)| t == tokens[1]) {
                    return Err(err(line, "duplicate terminal"));
                }
                terminals.push((line, tokens[1].to_owned()));
            }
            other => return Err(err(line, format!("unknown declaration `{other}`"))),
        }
    }

    let table = SpeciesTable::new(species).and_then(|t| t.with_hidden_names(hidden))?;
    let mut vectors = Vec::with_capacity(states.len());
    for (line, id, assignments) in &states {
        let mut values: Vec<Option<i32>> = vec![None; table.len()];
        for (name, value) in assignments {
            let i = table
                .index_of(name)
                .ok_or_else(|| err(*line, format!("unknown species `{name}`")))?;
            if values[i].is_some() {
                return Err(err(*line, format!("species `{name}` assigned twice")));
            }
            if !(0..=table.max(i)).contains(value) {
                return Err(err(
                    *line,
                    format!("value {value} of `{name}` outside capacity 0..{}", table.max(i)),
                ));
            }
            values[i] = Some(*value);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    err(*line, format!("missing value for species `{}`", table.name(i)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        vectors.push(StateVector::new(id.clone(), values));
    }

    let declared: HashSet<&str> = states.iter().map(|(_, id, _)| id.as_str()).collect();
    let check = |line: usize, id: &str| {
        if declared.contains(id) {
            Ok(())
        } else {
            Err(err(line, format!("unknown state `{id}`")))
        }
    };
    for (line, a, b) in perturbations.iter().chain(&responses) {
        check(*line, a)?;
        check(*line, b)?;
    }
    for (line, t) in &terminals {
        check(*line, t)?;
        if let Some((_, a, b)) = responses.iter().find(|(_, a, _)| a == t) {
            return Err(err(
                *line,
                format!("terminal `{t}` has outgoing response edge ({a}, {b})"),
            ));
        }
    }
    if let Some((line, a, b)) = responses
        .iter()
        .find(|(_, a, b)| perturbations.iter().any(|(_, c, d)| a == c && b == d))
    {
        return Err(err(*line, format!("({a}, {b}) is both a perturbation and a response")));
    }

    let pairs = |list: &[(usize, String, String)]| -> Vec<(String, String)> {
        list.iter().map(|(_, a, b)| (a.clone(), b.clone())).collect()
    };
    let terminal_ids: Vec<String> = terminals.into_iter().map(|(_, t)| t).collect();
    ExperimentGraph::new(
        table,
        vectors,
        &pairs(&perturbations),
        &pairs(&responses),
        &terminal_ids,
    )
}

/// Canonical text for a graph; `parse_instance` reads it back unchanged.
pub fn write_instance(g: &ExperimentGraph) -> String {
    let sp = g.species();
    let mut out = String::new();
    for i in 0..sp.len() {
        let _ = writeln!(out, "species {} 0..{}", sp.name(i), sp.max(i));
    }
    out.push('\n');
    for s in g.states() {
        out.push_str("state ");
        out.push_str(&s.id);
        for (i, v) in s.values.iter().enumerate() {
            let _ = write!(out, " {}={v}", sp.name(i));
        }
        out.push('\n');
    }
    let mut section = |keyword: &str, edges: &[crate::model::Edge]| {
        if !edges.is_empty() {
            out.push('\n');
        }
        for e in edges {
            let _ = writeln!(out, "{keyword} {} {}", g.id(e.from), g.id(e.to));
        }
    };
    section("perturb", g.perturbations());
    section("response", g.responses());
    if !g.terminals().is_empty() {
        out.push('\n');
    }
    for &t in g.terminals() {
        let _ = writeln!(out, "terminal {}", g.id(t));
    }
    out
}

/// Per-state hidden values keyed by state id; convenient for reports.
pub fn hidden_columns(g: &ExperimentGraph) -> BTreeMap<String, Vec<i32>> {
    let n = g.species().observed_count();
    g.states()
        .iter()
        .map(|s| (s.id.clone(), s.values[n..].to_vec()))
        .collect()
}
