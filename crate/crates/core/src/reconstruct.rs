//! Enumeration of regulatory structures conformal with a valid graph.
//!
//! The search walks the response edges in the global edge order and builds a
//! realizing sequence for each by chronological backtracking. At every
//! intermediate state it either fires a reaction it already has or introduces
//! a new one. The fired reaction is the fastest enabled one, so every other
//! enabled reaction is recorded as slower. Introducing a reaction late also
//! orders it against every earlier step at which it would have been enabled.
//! The recorded pairs must stay acyclic.
//!
//! Reactions are introduced only when fired, so each one is used, and a
//! candidate enabled at some terminal is never introduced.

use std::collections::BTreeMap;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::model::{self, Edge, ExperimentGraph, Reaction, RegulatoryStructure, SpeciesTable};
use crate::par;
use crate::validity::validate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Emission {
    /// One solution per distinct reaction set.
    #[default]
    ReactionSets,
    /// One solution per distinct (reaction set, inferred order) pair.
    AllOrders,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub bounds: Bounds,
    /// Record and check the slower-than pairs. Off gives the order-free relaxation.
    pub check_order: bool,
    pub emission: Emission,
    pub parallel: bool,
}

impl SearchConfig {
    pub fn new(bounds: Bounds) -> Self {
        SearchConfig {
            bounds,
            check_order: true,
            emission: Emission::ReactionSets,
            parallel: par::available(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RealizingSequence {
    pub edge: Edge,
    /// Indices into the structure's reactions, in firing order.
    pub reactions: Vec<usize>,
    /// `y^1 = x, ..., y^{l+1} = x'`.
    pub intermediates: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Solution {
    pub structure: RegulatoryStructure,
    /// One witness per response edge, in the global edge order.
    pub realizations: Vec<RealizingSequence>,
}

impl Solution {
    /// `(edge, step) -> reaction` for every step; each is a fastest choice.
    pub fn fastest_choices(&self) -> BTreeMap<(Edge, usize), usize> {
        self.realizations
            .iter()
            .flat_map(|s| s.reactions.iter().enumerate().map(move |(i, &r)| ((s.edge, i), r)))
            .collect()
    }
}

/// The states visited when firing `seq` from `x`, or `None` as soon as a step
/// is not enabled.
pub fn intermediate_states(
    x: &[i32],
    seq: &[Reaction],
    species: &SpeciesTable,
) -> Result<Option<Vec<Vec<i32>>>> {
    species.check_len(x.len())?;
    let mut out = vec![x.to_vec()];
    for r in seq {
        let y = out.last().expect("nonempty");
        if !model::enabled(r, y, species)? {
            return Ok(None);
        }
        out.push(model::add(y, r.entries()));
    }
    Ok(Some(out))
}

/// Each entry of `r` moves its species toward `to`, and species that do not
/// change over the edge are left alone.
pub fn monotone_ok(r: &Reaction, from: &[i32], to: &[i32]) -> bool {
    r.len() == from.len()
        && from.len() == to.len()
        && r.entries()
            .iter()
            .zip(from.iter().zip(to))
            .all(|(&v, (&a, &b))| v * (b - a) >= 0 && (a != b || v == 0))
}

pub fn enabled_set(reactions: &[Reaction], y: &[i32], species: &SpeciesTable) -> Vec<usize> {
    reactions
        .iter()
        .enumerate()
        .filter(|(_, r)| r.len() == y.len() && model::fires(r.entries(), y, species.maxima()))
        .map(|(i, _)| i)
        .collect()
}

/// Strictly ascending under lexicographic vector order.
pub fn canonical_reactions(rs: &[Reaction]) -> bool {
    rs.windows(2).all(|w| w[0] < w[1])
}

/// `r` fits the remaining change `rem`: same signs, no overshoot, untouched
/// where nothing is left to change.
#[inline]
fn fits(r: &[i32], rem: &[i32]) -> bool {
    r.iter().zip(rem).all(|(&v, &d)| {
        if d == 0 {
            v == 0
        } else {
            v * d >= 0 && v.abs() <= d.abs()
        }
    })
}

/// All reaction vectors fitting `rem`, ascending lexicographically.
fn candidates(rem: &[i32]) -> Vec<Vec<i32>> {
    let ranges: Vec<(i32, i32)> = rem
        .iter()
        .map(|&d| if d < 0 { (d, 0) } else { (0, d) })
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<i32> = ranges.iter().map(|r| r.0).collect();
    loop {
        if cur.iter().any(|&v| v < 0) {
            out.push(cur.clone());
        }
        let mut k = cur.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < ranges[k].1 {
                cur[k] += 1;
                for j in k + 1..cur.len() {
                    cur[j] = ranges[j].0;
                }
                break;
            }
        }
    }
}

struct Ctx<'g> {
    g: &'g ExperimentGraph,
    maxima: Vec<i32>,
    edges: Vec<Edge>,
    steps: Vec<usize>,
    terminals: Vec<Vec<i32>>,
    max_reactions: usize,
    check_order: bool,
    emission: Emission,
}

impl Ctx<'_> {
    fn enabled_at_terminal(&self, r: &[i32]) -> bool {
        self.terminals.iter().any(|t| model::fires(r, t, &self.maxima))
    }
}

#[derive(Debug, Clone)]
struct Step {
    edge: usize,
    state: Vec<i32>,
    fired: usize,
}

#[derive(Debug, Clone, Default)]
struct Search {
    reactions: Vec<Vec<i32>>,
    /// `slower[a][b]`: how many recorded constraints say `a` is slower than `b`.
    slower: Vec<Vec<u32>>,
    history: Vec<Step>,
    edge: usize,
}

/// A search node whose choice has been applied but not explored.
#[derive(Debug, Clone)]
struct Task {
    search: Search,
    y: Vec<i32>,
    rem: Vec<i32>,
    left: usize,
}

/// Reactions, plus the closed order unless solutions are projected.
type SolutionKey = (Vec<Reaction>, Vec<(usize, usize)>);

#[derive(Debug, Default)]
struct Sink {
    found: BTreeMap<SolutionKey, Solution>,
    first_only: bool,
    /// Nested parallel forks still allowed below this point.
    forks: u32,
}

impl Sink {
    fn done(&self) -> bool {
        self.first_only && !self.found.is_empty()
    }

    fn offer(&mut self, key: SolutionKey, s: Solution) {
        match self.found.get_mut(&key) {
            Some(old) if *old <= s => {}
            Some(old) => *old = s,
            None => {
                self.found.insert(key, s);
            }
        }
    }

    fn merge(&mut self, other: Sink) {
        for (k, s) in other.found {
            self.offer(k, s);
        }
    }
}

impl Search {
    fn add_reaction(&mut self, r: Vec<i32>) -> usize {
        for row in &mut self.slower {
            row.push(0);
        }
        self.reactions.push(r);
        self.slower.push(vec![0; self.reactions.len()]);
        self.reactions.len() - 1
    }

    fn pop_reaction(&mut self) {
        self.reactions.pop();
        self.slower.pop();
        for row in &mut self.slower {
            row.pop();
        }
    }

    fn reaches(&self, from: usize, to: usize) -> bool {
        let n = self.reactions.len();
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(a) = stack.pop() {
            if a == to {
                return true;
            }
            for (b, &count) in self.slower[a].iter().enumerate() {
                if count > 0 && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        false
    }

    /// Records "`a` slower than `b`" unless that closes a cycle.
    fn order(&mut self, a: usize, b: usize, added: &mut Vec<(usize, usize)>) -> bool {
        if self.slower[a][b] == 0 && self.reaches(b, a) {
            return false;
        }
        self.slower[a][b] += 1;
        added.push((a, b));
        true
    }

    fn unorder(&mut self, added: &mut Vec<(usize, usize)>) {
        for (a, b) in added.drain(..) {
            self.slower[a][b] -= 1;
        }
    }

    fn start_edge(&mut self, ctx: &Ctx, sink: &mut Sink) {
        if self.edge == ctx.edges.len() {
            self.emit(ctx, sink);
            return;
        }
        let e = ctx.edges[self.edge];
        let y = ctx.g.values(e.from).to_vec();
        let rem = ctx.g.edge_diff(e);
        self.step(ctx, sink, y, rem, ctx.steps[self.edge]);
    }

    /// Pairs forced by firing `f` at `y`, given the reactions `enabled` there.
    /// A reaction introduced at this step (`fresh`) is also ordered against
    /// every earlier step at which it would have fired.
    fn constrain(
        &mut self,
        ctx: &Ctx,
        f: usize,
        enabled: &[usize],
        fresh: bool,
        added: &mut Vec<(usize, usize)>,
    ) -> bool {
        if !ctx.check_order {
            return true;
        }
        if !enabled.iter().filter(|&&j| j != f).all(|&j| self.order(j, f, added)) {
            return false;
        }
        if fresh {
            for s in 0..self.history.len() {
                if model::fires(&self.reactions[f], &self.history[s].state, &ctx.maxima) {
                    let g = self.history[s].fired;
                    if !self.order(f, g, added) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn step(&mut self, ctx: &Ctx, sink: &mut Sink, y: Vec<i32>, rem: Vec<i32>, left: usize) {
        if sink.done() {
            return;
        }
        if rem.iter().all(|&d| d == 0) {
            self.edge += 1;
            self.start_edge(ctx, sink);
            self.edge -= 1;
            return;
        }
        if left == 0 || !rem.iter().any(|&d| d < 0) {
            return;
        }
        let enabled: Vec<usize> = (0..self.reactions.len())
            .filter(|&i| model::fires(&self.reactions[i], &y, &ctx.maxima))
            .collect();
        let existing: Vec<usize> = enabled
            .iter()
            .copied()
            .filter(|&f| fits(&self.reactions[f], &rem))
            .collect();
        let fresh: Vec<Vec<i32>> = if self.reactions.len() < ctx.max_reactions {
            candidates(&rem)
                .into_iter()
                .filter(|c| !self.reactions.contains(c) && !ctx.enabled_at_terminal(c))
                .collect()
        } else {
            Vec::new()
        };
        if sink.forks > 0 && existing.len() + fresh.len() > 1 {
            self.fork(ctx, sink, &y, &rem, left, &enabled, &existing, fresh);
            return;
        }

        let mut added = Vec::new();
        for f in existing {
            if self.constrain(ctx, f, &enabled, false, &mut added) {
                self.descend(ctx, sink, f, &y, &rem, left);
            }
            self.unorder(&mut added);
            if sink.done() {
                return;
            }
        }
        for cand in fresh {
            let new = self.add_reaction(cand);
            if self.constrain(ctx, new, &enabled, true, &mut added) {
                self.descend(ctx, sink, new, &y, &rem, left);
            }
            self.unorder(&mut added);
            self.pop_reaction();
            if sink.done() {
                return;
            }
        }
    }

    /// Explores each choice at this node as an independent task.
    #[allow(clippy::too_many_arguments)]
    fn fork(
        &mut self,
        ctx: &Ctx,
        sink: &mut Sink,
        y: &[i32],
        rem: &[i32],
        left: usize,
        enabled: &[usize],
        existing: &[usize],
        fresh: Vec<Vec<i32>>,
    ) {
        let mut tasks = Vec::new();
        let choices = existing
            .iter()
            .map(|&f| (Some(f), None))
            .chain(fresh.into_iter().map(|c| (None, Some(c))));
        for (old, new) in choices {
            let mut child = self.clone();
            let (f, is_new) = match (old, new) {
                (Some(f), _) => (f, false),
                (None, Some(c)) => (child.add_reaction(c), true),
                _ => unreachable!(),
            };
            let mut added = Vec::new();
            if !child.constrain(ctx, f, enabled, is_new, &mut added) {
                continue;
            }
            let r = child.reactions[f].clone();
            child.history.push(Step {
                edge: child.edge,
                state: y.to_vec(),
                fired: f,
            });
            tasks.push(Task {
                search: child,
                y: model::add(y, &r),
                rem: model::sub(rem, &r),
                left: left - 1,
            });
        }
        let forks = sink.forks - 1;
        let first_only = sink.first_only;
        let parts = par::map(&tasks, true, |t| {
            let mut part = Sink {
                first_only,
                forks,
                ..Sink::default()
            };
            t.search
                .clone()
                .step(ctx, &mut part, t.y.clone(), t.rem.clone(), t.left);
            part
        });
        for part in parts {
            sink.merge(part);
        }
    }

    fn descend(&mut self, ctx: &Ctx, sink: &mut Sink, f: usize, y: &[i32], rem: &[i32], left: usize) {
        let r = &self.reactions[f];
        let next = model::add(y, r);
        let rem = model::sub(rem, r);
        self.history.push(Step {
            edge: self.edge,
            state: y.to_vec(),
            fired: f,
        });
        self.step(ctx, sink, next, rem, left - 1);
        self.history.pop();
    }

    fn emit(&self, ctx: &Ctx, sink: &mut Sink) {
        let mut order: Vec<usize> = (0..self.reactions.len()).collect();
        order.sort_by(|&a, &b| self.reactions[a].cmp(&self.reactions[b]));
        let mut perm = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        let reactions: Vec<Reaction> = order
            .iter()
            .map(|&i| Reaction::from_raw(self.reactions[i].clone()))
            .collect();
        let n = self.reactions.len();
        let pairs = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.slower[a][b] > 0)
            .map(|(a, b)| (perm[a], perm[b]));
        let structure = RegulatoryStructure::new(reactions.clone(), pairs)
            .expect("search keeps the order acyclic");

        let mut realizations: Vec<RealizingSequence> = ctx
            .edges
            .iter()
            .map(|&e| RealizingSequence {
                edge: e,
                reactions: Vec::new(),
                intermediates: vec![ctx.g.values(e.from).to_vec()],
            })
            .collect();
        for s in &self.history {
            let seq = &mut realizations[s.edge];
            seq.reactions.push(perm[s.fired]);
            let last = seq.intermediates.last().expect("nonempty");
            let next = model::add(last, &self.reactions[s.fired]);
            seq.intermediates.push(next);
        }

        let order_key = match ctx.emission {
            Emission::ReactionSets => Vec::new(),
            Emission::AllOrders => structure.slower().iter().copied().collect(),
        };
        sink.offer(
            (reactions, order_key),
            Solution {
                structure,
                realizations,
            },
        );
    }
}

fn context<'g>(g: &'g ExperimentGraph, cfg: &SearchConfig) -> Result<Ctx<'g>> {
    if !validate(g).is_valid {
        return Err(Error::InvalidGraph);
    }
    let edges = g.ordered_responses();
    let steps = edges.iter().map(|&e| cfg.bounds.steps(e)).collect();
    Ok(Ctx {
        g,
        maxima: g.species().maxima().to_vec(),
        edges,
        steps,
        terminals: g.terminals().iter().map(|&t| g.values(t).to_vec()).collect(),
        max_reactions: cfg.bounds.max_reactions,
        check_order: cfg.check_order,
        emission: cfg.emission,
    })
}

fn run(ctx: &Ctx, parallel: bool, first_only: bool) -> Sink {
    // enough nested forks to keep every worker busy on uneven trees
    let forks = if parallel && par::workers() > 1 {
        usize::BITS - par::workers().leading_zeros() + 3
    } else {
        0
    };
    let mut sink = Sink {
        first_only,
        forks,
        ..Sink::default()
    };
    Search::default().start_edge(ctx, &mut sink);
    sink
}

/// Every conformal structure within the bounds, sorted by reaction set (then
/// order). For each key the smallest witness is kept, so the output does not
/// depend on how the work was scheduled.
pub fn enumerate_structures(g: &ExperimentGraph, cfg: &SearchConfig) -> Result<Vec<Solution>> {
    let ctx = context(g, cfg)?;
    Ok(run(&ctx, cfg.parallel, false).found.into_values().collect())
}

/// Whether at least one conformal structure exists within `bounds`.
pub fn is_realizable(g: &ExperimentGraph, bounds: &Bounds) -> Result<bool> {
    let cfg = SearchConfig {
        parallel: false,
        ..SearchConfig::new(bounds.clone())
    };
    let ctx = context(g, &cfg)?;
    Ok(!run(&ctx, false, true).found.is_empty())
}

/// Longest monotone realization of `e` on its own, using only reactions that
/// are disabled at every terminal of `g`, capped at `limit`. `None` when `e`
/// cannot be realized at all.
pub fn longest_realization(g: &ExperimentGraph, e: Edge, limit: usize) -> Option<usize> {
    let maxima = g.species().maxima();
    let terminals: Vec<&[i32]> = g.terminals().iter().map(|&t| g.values(t)).collect();
    let mut memo: BTreeMap<(Vec<i32>, usize), Option<usize>> = BTreeMap::new();

    fn go(
        rem: Vec<i32>,
        left: usize,
        maxima: &[i32],
        terminals: &[&[i32]],
        memo: &mut BTreeMap<(Vec<i32>, usize), Option<usize>>,
    ) -> Option<usize> {
        if rem.iter().all(|&d| d == 0) {
            return Some(0);
        }
        if left == 0 {
            return None;
        }
        let key = (rem, left);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let best = candidates(&key.0)
            .into_iter()
            .filter(|c| !terminals.iter().any(|t| model::fires(c, t, maxima)))
            .filter_map(|c| go(model::sub(&key.0, &c), left - 1, maxima, terminals, memo))
            .max()
            .map(|l| l + 1);
        memo.insert(key, best);
        best
    }

    go(g.edge_diff(e), limit, maxima, &terminals, &mut memo)
}
