//! Shared domain types: species, states, experiment graphs, reactions and
//! regulatory structures, plus the elementary vector arithmetic on them.
//!
//! All vectors are positional over a [`SpeciesTable`]. Observed species come
//! first, hidden (binary) species occupy the trailing positions.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};

/// Prefix used for generated hidden species names (`_h1`, `_h2`, ...).
pub const HIDDEN_PREFIX: &str = "_h";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpeciesTable {
    names: Vec<String>,
    maxima: Vec<i32>,
    observed: usize,
}

impl SpeciesTable {
    /// Builds a table of observed species, each with capacity `0..=max`.
    pub fn new<I, S>(species: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, i32)>,
        S: Into<String>,
    {
        let mut names = Vec::new();
        let mut maxima = Vec::new();
        for (name, max) in species {
            let name = name.into();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::Species(format!("bad species name {name:?}")));
            }
            if max < 0 {
                return Err(Error::Species(format!(
                    "capacity of `{name}` must contain 0, got 0..{max}"
                )));
            }
            if names.contains(&name) {
                return Err(Error::Species(format!("duplicate species `{name}`")));
            }
            names.push(name);
            maxima.push(max);
        }
        let observed = names.len();
        Ok(SpeciesTable {
            names,
            maxima,
            observed,
        })
    }

    /// Appends `count` hidden binary species named `_h{k}`, numbering on from
    /// any hidden species already present.
    pub fn with_hidden(&self, count: usize) -> Result<Self> {
        let first = self.hidden_count() + 1;
        self.with_hidden_names((first..first + count).map(|k| format!("{HIDDEN_PREFIX}{k}")))
    }

    /// Appends hidden binary species with the given names.
    pub fn with_hidden_names<I, S>(&self, names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = self.clone();
        for name in names {
            let name = name.into();
            if table.names.contains(&name) {
                return Err(Error::Species(format!(
                    "hidden species name `{name}` is already taken"
                )));
            }
            table.names.push(name);
            table.maxima.push(1);
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn observed_count(&self) -> usize {
        self.observed
    }

    pub fn hidden_count(&self) -> usize {
        self.names.len() - self.observed
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Upper end of every capacity interval; the lower end is always 0.
    pub fn maxima(&self) -> &[i32] {
        &self.maxima
    }

    pub fn max(&self, i: usize) -> i32 {
        self.maxima[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// True iff every value lies in its species' capacity.
    pub fn admits(&self, values: &[i32]) -> bool {
        values.len() == self.len() && within(values, &self.maxima)
    }

    pub(crate) fn check_len(&self, found: usize) -> Result<()> {
        if found == self.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.len(),
                found,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StateVector {
    pub id: String,
    pub values: Vec<i32>,
}

impl StateVector {
    pub fn new(id: impl Into<String>, values: Vec<i32>) -> Self {
        StateVector {
            id: id.into(),
            values,
        }
    }

    /// Value equality, ignoring ids (states form a multiset).
    pub fn same_values(&self, other: &StateVector) -> bool {
        self.values == other.values
    }
}

/// A directed edge between two states, by index into [`ExperimentGraph::states`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
}

impl Edge {
    pub fn new(from: usize, to: usize) -> Self {
        Edge { from, to }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentGraph {
    species: SpeciesTable,
    states: Vec<StateVector>,
    index: HashMap<String, usize>,
    perturbations: Vec<Edge>,
    responses: Vec<Edge>,
    terminals: BTreeSet<usize>,
}

impl ExperimentGraph {
    /// Builds a graph, checking the structural invariants: unique state ids,
    /// values inside capacities, declared edge endpoints, disjoint
    /// perturbation/response edge sets and no response edge leaving a
    /// terminal state.
    pub fn new<S: AsRef<str>>(
        species: SpeciesTable,
        states: Vec<StateVector>,
        perturbations: &[(S, S)],
        responses: &[(S, S)],
        terminals: &[S],
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Graph("at least one state is required".into()));
        }
        let mut index = HashMap::new();
        for (i, state) in states.iter().enumerate() {
            species.check_len(state.values.len())?;
            if !species.admits(&state.values) {
                return Err(Error::Graph(format!(
                    "state `{}` has a value outside its capacity",
                    state.id
                )));
            }
            if index.insert(state.id.clone(), i).is_some() {
                return Err(Error::Graph(format!("duplicate state id `{}`", state.id)));
            }
        }
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::Graph(format!("unknown state `{id}`")))
        };
        let edges = |list: &[(S, S)], kind: &str| -> Result<Vec<Edge>> {
            let mut out: Vec<Edge> = Vec::with_capacity(list.len());
            for (a, b) in list {
                let e = Edge::new(lookup(a.as_ref())?, lookup(b.as_ref())?);
                if out.contains(&e) {
                    return Err(Error::Graph(format!(
                        "duplicate {kind} edge ({}, {})",
                        a.as_ref(),
                        b.as_ref()
                    )));
                }
                out.push(e);
            }
            Ok(out)
        };
        let perturbations = edges(perturbations, "perturbation")?;
        let responses = edges(responses, "response")?;
        if let Some(e) = perturbations.iter().find(|e| responses.contains(e)) {
            return Err(Error::Graph(format!(
                "({}, {}) is both a perturbation and a response edge",
                states[e.from].id, states[e.to].id
            )));
        }
        let mut terminal_set = BTreeSet::new();
        for t in terminals {
            let i = lookup(t.as_ref())?;
            if !terminal_set.insert(i) {
                return Err(Error::Graph(format!("duplicate terminal `{}`", t.as_ref())));
            }
            if responses.iter().any(|e| e.from == i) {
                return Err(Error::Graph(format!(
                    "terminal state `{}` has an outgoing response edge",
                    t.as_ref()
                )));
            }
        }
        Ok(ExperimentGraph {
            species,
            states,
            index,
            perturbations,
            responses,
            terminals: terminal_set,
        })
    }

    /// Same topology, new species table and value rows (one per state).
    pub fn with_values(&self, species: SpeciesTable, rows: Vec<Vec<i32>>) -> Result<Self> {
        if rows.len() != self.states.len() {
            return Err(Error::DimensionMismatch {
                expected: self.states.len(),
                found: rows.len(),
            });
        }
        let mut states = Vec::with_capacity(rows.len());
        for (state, values) in self.states.iter().zip(rows) {
            species.check_len(values.len())?;
            if !species.admits(&values) {
                return Err(Error::Graph(format!(
                    "state `{}` has a value outside its capacity",
                    state.id
                )));
            }
            states.push(StateVector::new(state.id.clone(), values));
        }
        Ok(ExperimentGraph {
            species,
            states,
            index: self.index.clone(),
            perturbations: self.perturbations.clone(),
            responses: self.responses.clone(),
            terminals: self.terminals.clone(),
        })
    }

    pub fn species(&self) -> &SpeciesTable {
        &self.species
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &StateVector {
        &self.states[i]
    }

    pub fn values(&self, i: usize) -> &[i32] {
        &self.states[i].values
    }

    pub fn id(&self, i: usize) -> &str {
        &self.states[i].id
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn perturbations(&self) -> &[Edge] {
        &self.perturbations
    }

    /// Response edges in declaration order.
    pub fn responses(&self) -> &[Edge] {
        &self.responses
    }

    pub fn terminals(&self) -> &BTreeSet<usize> {
        &self.terminals
    }

    pub fn is_terminal(&self, i: usize) -> bool {
        self.terminals.contains(&i)
    }

    pub fn is_response(&self, e: Edge) -> bool {
        self.responses.contains(&e)
    }

    pub fn responses_from(&self, i: usize) -> impl Iterator<Item = Edge> + '_ {
        self.responses.iter().copied().filter(move |e| e.from == i)
    }

    /// Response edges sorted by (source id, target id). This is the fixed
    /// global edge order used by the search and the hidden-species ordering.
    pub fn ordered_responses(&self) -> Vec<Edge> {
        let mut edges = self.responses.clone();
        edges.sort_by(|a, b| {
            (self.id(a.from), self.id(a.to)).cmp(&(self.id(b.from), self.id(b.to)))
        });
        edges
    }

    /// `x' - x` for the edge `(x, x')`.
    pub fn edge_diff(&self, e: Edge) -> Vec<i32> {
        sub(self.values(e.to), self.values(e.from))
    }

    pub fn edge_ids(&self, e: Edge) -> (String, String) {
        (self.id(e.from).to_owned(), self.id(e.to).to_owned())
    }

    /// Resolves an edge given by state ids.
    pub fn edge(&self, from: &str, to: &str) -> Option<Edge> {
        Some(Edge::new(self.state_index(from)?, self.state_index(to)?))
    }
}

/// An integer change vector with at least one negative entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Reaction {
    entries: Vec<i32>,
}

impl Reaction {
    /// Rejects all-nonnegative vectors and entries whose magnitude exceeds the
    /// species capacity (such a reaction could never fire).
    pub fn new(entries: Vec<i32>, species: &SpeciesTable) -> Result<Self> {
        species.check_len(entries.len())?;
        if !entries.iter().any(|&v| v < 0) {
            return Err(Error::Reaction {
                entries,
                reason: "no negative entry".into(),
            });
        }
        if let Some(k) = (0..entries.len()).find(|&k| entries[k].abs() > species.max(k)) {
            let reason = format!(
                "entry for `{}` exceeds capacity 0..{}",
                species.name(k),
                species.max(k)
            );
            return Err(Error::Reaction { entries, reason });
        }
        Ok(Reaction { entries })
    }

    /// Skips the capacity check; callers guarantee the invariants.
    pub(crate) fn from_raw(entries: Vec<i32>) -> Self {
        debug_assert!(entries.iter().any(|&v| v < 0));
        Reaction { entries }
    }

    pub fn entries(&self) -> &[i32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `x + r` stays within every capacity.
pub fn enabled(r: &Reaction, x: &[i32], species: &SpeciesTable) -> Result<bool> {
    species.check_len(r.len())?;
    species.check_len(x.len())?;
    Ok(fires(r.entries(), x, species.maxima()))
}

/// Fires `r` in `x`.
pub fn apply(r: &Reaction, x: &[i32], species: &SpeciesTable) -> Result<Vec<i32>> {
    if !enabled(r, x, species)? {
        return Err(Error::NotEnabled {
            reaction: r.entries().to_vec(),
            state: x.to_vec(),
        });
    }
    Ok(add(x, r.entries()))
}

/// `to - from`, componentwise.
pub fn diff(from: &[i32], to: &[i32]) -> Result<Vec<i32>> {
    if from.len() != to.len() {
        return Err(Error::DimensionMismatch {
            expected: from.len(),
            found: to.len(),
        });
    }
    Ok(sub(to, from))
}

#[inline]
pub(crate) fn fires(r: &[i32], x: &[i32], maxima: &[i32]) -> bool {
    r.iter()
        .zip(x)
        .zip(maxima)
        .all(|((&d, &v), &m)| (0..=m).contains(&(v + d)))
}

#[inline]
pub(crate) fn within(values: &[i32], maxima: &[i32]) -> bool {
    values.iter().zip(maxima).all(|(&v, &m)| (0..=m).contains(&v))
}

#[inline]
pub(crate) fn add(x: &[i32], r: &[i32]) -> Vec<i32> {
    x.iter().zip(r).map(|(a, b)| a + b).collect()
}

#[inline]
pub(crate) fn sub(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A set of reactions with a strict partial order on them.
///
/// `slower` holds pairs `(a, b)` meaning reaction `a` is slower than reaction
/// `b` (`b` takes precedence when both are enabled). The relation is kept
/// transitively closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegulatoryStructure {
    reactions: Vec<Reaction>,
    slower: BTreeSet<(usize, usize)>,
}

impl RegulatoryStructure {
    /// Closes `pairs` transitively and rejects cycles, out-of-range indices
    /// and repeated reaction vectors.
    pub fn new(
        reactions: Vec<Reaction>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = reactions.len();
        if let Some(w) = reactions.first().map(Reaction::len) {
            if reactions.iter().any(|r| r.len() != w) {
                return Err(Error::Structure("reactions differ in length".into()));
            }
        }
        let distinct: BTreeSet<_> = reactions.iter().collect();
        if distinct.len() != n {
            return Err(Error::Structure("repeated reaction vector".into()));
        }
        let mut reach = vec![vec![false; n]; n];
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::Structure(format!(
                    "order pair ({a}, {b}) out of range for {n} reactions"
                )));
            }
            reach[a][b] = true;
        }
        for k in 0..n {
            let via = reach[k].clone();
            for row in reach.iter_mut().filter(|row| row[k]) {
                for (cell, &step) in row.iter_mut().zip(&via) {
                    *cell |= step;
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| reach[i][i]) {
            return Err(Error::Structure(format!(
                "order is cyclic through reaction {i}"
            )));
        }
        let slower = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| reach[i][j])
            .collect();
        Ok(RegulatoryStructure { reactions, slower })
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Transitively closed "slower than" pairs.
    pub fn slower(&self) -> &BTreeSet<(usize, usize)> {
        &self.slower
    }

    pub fn is_slower(&self, a: usize, b: usize) -> bool {
        self.slower.contains(&(a, b))
    }

    pub fn index_of(&self, entries: &[i32]) -> Option<usize> {
        self.reactions.iter().position(|r| r.entries() == entries)
    }

    /// Reorders reactions ascending by vector and remaps the order. Also
    /// returns `perm` with `perm[old] = new`.
    pub fn canonical(self) -> (Self, Vec<usize>) {
        let mut idx: Vec<usize> = (0..self.reactions.len()).collect();
        idx.sort_by(|&a, &b| self.reactions[a].cmp(&self.reactions[b]));
        let mut perm = vec![0; idx.len()];
        for (new, &old) in idx.iter().enumerate() {
            perm[old] = new;
        }
        let reactions = idx.iter().map(|&i| self.reactions[i].clone()).collect();
        let slower = self
            .slower
            .iter()
            .map(|&(a, b)| (perm[a], perm[b]))
            .collect();
        (RegulatoryStructure { reactions, slower }, perm)
    }

    /// The cover (transitive reduction) of the order.
    pub fn cover(&self) -> Vec<(usize, usize)> {
        self.slower
            .iter()
            .copied()
            .filter(|&(a, b)| {
                !(0..self.reactions.len())
                    .any(|k| self.is_slower(a, k) && self.is_slower(k, b))
            })
            .collect()
    }
}
