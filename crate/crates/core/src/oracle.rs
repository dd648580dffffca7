//! Brute-force references for small instances. Nothing here calls the search
//! or the extension enumerator; only the basic vector arithmetic is shared.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::extension::{extend, Extension};
use crate::model::{self, Edge, ExperimentGraph};

/// Largest cartesian product of per-edge decompositions tried.
pub const MAX_COMBINATIONS: usize = 1_000_000;
/// Largest number of binary cells (`states * hidden`) tried.
pub const MAX_CELLS: usize = 20;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleStructures {
    /// Every conformal reaction set, each sorted.
    pub sets: BTreeSet<Vec<Vec<i32>>>,
    /// Longest witness sequence seen per edge among conformal combinations.
    pub longest_witness: BTreeMap<Edge, usize>,
    /// Largest conformal reaction set.
    pub max_reactions: usize,
}

/// Every sequence of vectors with a negative entry leading from `from` to
/// `to`, moving each species monotonically, staying inside capacities and
/// using no vector that fires in a terminal.
fn decompositions(
    from: &[i32],
    to: &[i32],
    maxima: &[i32],
    terminals: &[Vec<i32>],
    max_len: usize,
) -> Vec<Vec<Vec<i32>>> {
    let mut out = Vec::new();
    let mut seq = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        y: Vec<i32>,
        from: &[i32],
        to: &[i32],
        maxima: &[i32],
        terminals: &[Vec<i32>],
        left: usize,
        seq: &mut Vec<Vec<i32>>,
        out: &mut Vec<Vec<Vec<i32>>>,
    ) {
        if y == to {
            out.push(seq.clone());
            return;
        }
        if left == 0 {
            return;
        }
        // all vectors with entries in [-max, max]
        let n = y.len();
        let mut r: Vec<i32> = maxima.iter().map(|m| -m).collect();
        loop {
            let useful = r.iter().any(|&v| v < 0)
                && (0..n).all(|k| {
                    let d = to[k] - from[k];
                    r[k] * d >= 0 && (d != 0 || r[k] == 0)
                })
                && model::fires(&r, &y, maxima)
                && seq
                    .iter()
                    .chain(std::iter::once(&r))
                    .all(|s: &Vec<i32>| (0..n).all(|k| s[k] * r[k] >= 0))
                && !terminals.iter().any(|t| model::fires(&r, t, maxima));
            if useful {
                let next = model::add(&y, &r);
                // never overshoot the target
                if (0..n).all(|k| (next[k] - from[k]).abs() <= (to[k] - from[k]).abs()) {
                    seq.push(r.clone());
                    rec(next, from, to, maxima, terminals, left - 1, seq, out);
                    seq.pop();
                }
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if r[k] < maxima[k] {
                    r[k] += 1;
                    for j in k + 1..n {
                        r[j] = -maxima[j];
                    }
                    break;
                }
            }
        }
    }
    rec(from.to_vec(), from, to, maxima, terminals, max_len, &mut seq, &mut out);
    out
}

fn acyclic(n: usize, pairs: &BTreeSet<(usize, usize)>) -> bool {
    let mut indegree = vec![0; n];
    for &(_, b) in pairs {
        indegree[b] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut done = 0;
    while let Some(a) = ready.pop() {
        done += 1;
        for &(x, b) in pairs.range((a, 0)..=(a, usize::MAX)) {
            debug_assert_eq!(x, a);
            indegree[b] -= 1;
            if indegree[b] == 0 {
                ready.push(b);
            }
        }
    }
    done == n
}

/// All conformal reaction sets with at most `max_reactions` reactions and
/// witnesses of at most `max_steps` steps per edge. Each combination of
/// per-edge decompositions is one candidate: its reactions are the vectors
/// used, and its order is whatever the fastest-choice rule forces at each
/// step; the candidate is conformal iff that order is acyclic.
pub fn brute_structures(
    g: &ExperimentGraph,
    max_reactions: usize,
    max_steps: usize,
) -> Result<OracleStructures> {
    let maxima = g.species().maxima();
    let terminals: Vec<Vec<i32>> = g.terminals().iter().map(|&t| g.values(t).to_vec()).collect();
    let edges: Vec<Edge> = g.responses().to_vec();

    let mut per_edge = Vec::new();
    let mut combos: usize = 1;
    for &e in &edges {
        let (x, x2) = (g.values(e.from), g.values(e.to));
        let variation: usize = x.iter().zip(x2).map(|(a, b)| (a - b).unsigned_abs() as usize).sum();
        let ds = decompositions(x, x2, maxima, &terminals, variation.min(max_steps));
        combos = combos.saturating_mul(ds.len());
        if combos > MAX_COMBINATIONS {
            return Err(Error::TooLarge(format!("more than {MAX_COMBINATIONS} combinations")));
        }
        per_edge.push(ds);
    }

    let mut result = OracleStructures::default();
    if per_edge.iter().any(|d| d.is_empty()) {
        return Ok(result);
    }
    let mut pick = vec![0usize; edges.len()];
    loop {
        let chosen: Vec<&Vec<Vec<i32>>> = pick.iter().zip(&per_edge).map(|(&i, d)| &d[i]).collect();
        let set: BTreeSet<&Vec<i32>> = chosen.iter().flat_map(|s| s.iter()).collect();
        if set.len() <= max_reactions {
            let list: Vec<&Vec<i32>> = set.iter().copied().collect();
            let index = |r: &Vec<i32>| list.iter().position(|x| *x == r).expect("member");
            let mut pairs = BTreeSet::new();
            for (seq, &e) in chosen.iter().zip(&edges) {
                let mut y = g.values(e.from).to_vec();
                for r in seq.iter() {
                    let f = index(r);
                    for (j, other) in list.iter().enumerate() {
                        if j != f && model::fires(other, &y, maxima) {
                            pairs.insert((j, f));
                        }
                    }
                    y = model::add(&y, r);
                }
            }
            if acyclic(list.len(), &pairs) {
                result.sets.insert(list.iter().map(|r| (*r).clone()).collect());
                result.max_reactions = result.max_reactions.max(list.len());
                for (seq, &e) in chosen.iter().zip(&edges) {
                    let w = result.longest_witness.entry(e).or_insert(0);
                    *w = (*w).max(seq.len());
                }
            }
        }
        let mut k = 0;
        loop {
            if k == pick.len() {
                return Ok(result);
            }
            pick[k] += 1;
            if pick[k] < per_edge[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// Conditions I-III, computed directly.
fn naive_valid(g: &ExperimentGraph) -> bool {
    let n = g.states().len();
    let mut next = vec![None; n];
    for e in g.responses() {
        if next[e.from].is_some() {
            return false;
        }
        next[e.from] = Some(e.to);
    }
    if g.responses().iter().any(|&e| g.edge_diff(e).iter().all(|&d| d >= 0)) {
        return false;
    }
    let end = |mut s: usize| -> Option<usize> {
        for _ in 0..=n {
            if g.is_terminal(s) {
                return Some(s);
            }
            s = next[s]?;
        }
        None
    };
    for a in 0..n {
        for b in a + 1..n {
            if next[a].is_none() || next[b].is_none() || g.values(a) != g.values(b) {
                continue;
            }
            if let (Some(ta), Some(tb)) = (end(a), end(b)) {
                if g.values(ta) != g.values(tb) {
                    return false;
                }
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleExtensions {
    pub hidden: usize,
    pub changes: usize,
    pub extensions: BTreeSet<Extension>,
}

/// Tries every binary assignment for `a = 1..=a_max` hidden species, keeping
/// those satisfying XI, validity and realizability, and returns the level
/// with the fewest species and then the fewest changes. `None` when no level
/// up to `a_max` works.
pub fn brute_minimal_extensions(g: &ExperimentGraph, a_max: usize) -> Result<Option<OracleExtensions>> {
    let n = g.states().len();
    if naive_valid(g) {
        return Ok(Some(OracleExtensions {
            hidden: 0,
            changes: 0,
            extensions: BTreeSet::from([Extension::empty(n)]),
        }));
    }
    if n * a_max > MAX_CELLS {
        return Err(Error::TooLarge(format!("{} binary cells", n * a_max)));
    }
    for a in 1..=a_max {
        let mut by_changes: BTreeMap<usize, Vec<Extension>> = BTreeMap::new();
        for bits in 0u64..(1u64 << (n * a)) {
            let rows: Vec<Vec<u8>> = (0..n)
                .map(|s| (0..a).map(|h| ((bits >> (s * a + h)) & 1) as u8).collect())
                .collect();
            if g.perturbations().iter().any(|p| rows[p.from] != rows[p.to]) {
                continue;
            }
            let changes = (0..n)
                .filter(|&s| g.responses().iter().any(|e| e.from == s && rows[e.from] != rows[e.to]))
                .count();
            let e = Extension::new(a, rows);
            if naive_valid(&extend(g, &e)?) {
                by_changes.entry(changes).or_default().push(e);
            }
        }
        for (c, level) in by_changes {
            let mut found = BTreeSet::new();
            for e in level {
                let ext = extend(g, &e)?;
                if !brute_structures(&ext, usize::MAX, usize::MAX)?.sets.is_empty() {
                    found.insert(e);
                }
            }
            if !found.is_empty() {
                return Ok(Some(OracleExtensions {
                    hidden: a,
                    changes: c,
                    extensions: found,
                }));
            }
        }
    }
    Ok(None)
}
