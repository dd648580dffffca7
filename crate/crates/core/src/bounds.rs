//! Finite search bounds: the longest realizing sequence per response edge and
//! the largest reaction set worth trying.
//!
//! The basic per-edge bound rests on a simple counting argument. Along a
//! realizing sequence every species moves monotonically from `x_k` to `x'_k`,
//! and every reaction has a negative entry, which must sit on a species that
//! decreases over the edge. So each step uses up at least one unit of the
//! edge's total decrease. Every reaction of a conformal structure fires on
//! some edge, so summing the edge bounds bounds the reaction count.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Edge, ExperimentGraph};
use crate::par;
use crate::reconstruct;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub max_reactions: usize,
    /// Hidden species present in the graph the bounds were computed for.
    pub max_hidden: usize,
    pub edge_steps: BTreeMap<Edge, usize>,
}

/// Total decrease over `e`, plus one per hidden species not yet present in
/// `g` (a binary species can add at most one decrease per edge).
pub fn edge_step_bound(g: &ExperimentGraph, e: Edge, extra_hidden: usize) -> Result<usize> {
    if !g.is_response(e) {
        let (from, to) = g.edge_ids(e);
        return Err(Error::NotResponseEdge { from, to });
    }
    let decrease: i32 = g.edge_diff(e).iter().filter(|&&d| d < 0).map(|d| -d).sum();
    Ok(decrease as usize + extra_hidden)
}

pub fn global_reaction_bound(g: &ExperimentGraph, extra_hidden: usize) -> usize {
    g.responses()
        .iter()
        .map(|&e| edge_step_bound(g, e, extra_hidden).expect("response edge"))
        .sum()
}

impl Bounds {
    /// Basic bounds for a graph whose hidden species are already in place.
    pub fn basic(g: &ExperimentGraph) -> Self {
        let edge_steps = g
            .responses()
            .iter()
            .map(|&e| (e, edge_step_bound(g, e, 0).expect("response edge")))
            .collect();
        Bounds {
            max_reactions: global_reaction_bound(g, 0),
            max_hidden: g.species().hidden_count(),
            edge_steps,
        }
    }

    pub fn steps(&self, e: Edge) -> usize {
        self.edge_steps.get(&e).copied().unwrap_or(0)
    }
}

/// Shrinks `b` edge by edge: each edge bound becomes the longest monotone
/// realization of that edge alone whose reactions are disabled at every
/// terminal. Every reaction of a conformal structure fires on some edge, so
/// the reaction bound becomes the sum of the new edge bounds. Nothing
/// conformal is lost.
pub fn tighten_bounds(g: &ExperimentGraph, b: &Bounds, parallel: bool) -> Result<Bounds> {
    let edges: Vec<Edge> = g.ordered_responses();
    let lengths = par::map(&edges, parallel, |&e| {
        reconstruct::longest_realization(g, e, b.steps(e))
    });
    let mut edge_steps = BTreeMap::new();
    for (e, len) in edges.iter().zip(lengths) {
        edge_steps.insert(*e, len.unwrap_or(0));
    }
    let total: usize = edge_steps.values().sum();
    Ok(Bounds {
        max_reactions: total.min(b.max_reactions),
        max_hidden: b.max_hidden,
        edge_steps,
    })
}
