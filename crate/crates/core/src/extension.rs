//! Hidden binary species that repair an invalid graph.
//!
//! Perturbations act on observed species only, so hidden values are shared
//! by every state in a perturbation-connected class. The search assigns one
//! hidden vector per class, pruning on condition III and on the change budget
//! as soon as both ends of a response edge are fixed.
//!
//! Among valid extensions only those that some conformal structure can
//! realize are kept, and minimality is taken over those.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::model::{Edge, ExperimentGraph};
use crate::par;
use crate::reconstruct::is_realizable;
use crate::validity::{validate, ValidityReport};

/// Hidden values for every state, one row per state in graph order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Extension {
    hidden: usize,
    rows: Vec<Vec<u8>>,
}

impl Extension {
    pub fn new(hidden: usize, rows: Vec<Vec<u8>>) -> Self {
        Extension { hidden, rows }
    }

    /// The trivial extension of a graph with `states` states.
    pub fn empty(states: usize) -> Self {
        Extension::new(0, vec![Vec::new(); states])
    }

    pub fn hidden_count(&self) -> usize {
        self.hidden
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn value(&self, state: usize, h: usize) -> u8 {
        self.rows[state][h]
    }

    pub fn column(&self, h: usize) -> Vec<u8> {
        self.rows.iter().map(|r| r[h]).collect()
    }

    /// Hidden column `h` of the result is column `perm[h]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| perm.iter().map(|&h| r[h]).collect())
            .collect();
        Extension::new(self.hidden, rows)
    }

    fn check(&self, g: &ExperimentGraph) -> Result<()> {
        if self.rows.len() != g.states().len() {
            return Err(Error::IncompleteAssignment(format!(
                "{} rows for {} states",
                self.rows.len(),
                g.states().len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.hidden {
                return Err(Error::IncompleteAssignment(format!(
                    "state `{}` has {} hidden values, expected {}",
                    g.id(i),
                    row.len(),
                    self.hidden
                )));
            }
            if row.iter().any(|&v| v > 1) {
                return Err(Error::IncompleteAssignment(format!(
                    "state `{}` has a non-binary hidden value",
                    g.id(i)
                )));
            }
        }
        Ok(())
    }

    /// Response sources at which some hidden value changes.
    pub fn change_count(&self, g: &ExperimentGraph) -> usize {
        (0..g.states().len())
            .filter(|&i| {
                g.responses_from(i)
                    .any(|e| self.rows[e.from] != self.rows[e.to])
            })
            .count()
    }
}

pub fn extend(g: &ExperimentGraph, e: &Extension) -> Result<ExperimentGraph> {
    e.check(g)?;
    if e.hidden == 0 {
        return Ok(g.clone());
    }
    let species = g.species().with_hidden(e.hidden)?;
    let rows = g
        .states()
        .iter()
        .zip(&e.rows)
        .map(|(s, h)| {
            let mut v = s.values.clone();
            v.extend(h.iter().map(|&b| i32::from(b)));
            v
        })
        .collect();
    g.with_values(species, rows)
}

/// Condition X (the extended graph is valid) and XI (hidden values agree
/// across every perturbation edge).
pub fn is_valid_extension(g: &ExperimentGraph, e: &Extension) -> Result<(bool, ValidityReport)> {
    let report = validate(&extend(g, e)?);
    let xi = g
        .perturbations()
        .iter()
        .all(|p| e.rows[p.from] == e.rows[p.to]);
    Ok((report.is_valid && xi, report))
}

type ColumnKey = (Vec<(bool, Reverse<i32>, bool)>, Vec<u8>);

fn column_key(e: &Extension, edges: &[Edge], h: usize) -> ColumnKey {
    let changes = edges
        .iter()
        .map(|p| {
            let c = i32::from(e.value(p.to, h)) - i32::from(e.value(p.from, h));
            (c == 0, Reverse(c.abs()), c > 0)
        })
        .collect();
    (changes, e.column(h))
}

/// Hidden columns are in canonical order: comparing their change profiles
/// over the globally ordered response edges (a change before no change, a
/// larger change first, a decrease before an increase, then the raw column
/// values), no column is larger than the next one.
pub fn canonical_hidden(e: &Extension, g: &ExperimentGraph) -> bool {
    let edges = g.ordered_responses();
    let keys: Vec<ColumnKey> = (0..e.hidden).map(|h| column_key(e, &edges, h)).collect();
    keys.windows(2).all(|w| w[0] <= w[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionOptions {
    pub max_hidden: usize,
    pub symmetry_breaking: bool,
    pub parallel: bool,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions {
            max_hidden: 4,
            symmetry_breaking: true,
            parallel: par::available(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalExtensions {
    pub hidden: usize,
    pub changes: usize,
    /// Sorted.
    pub extensions: Vec<Extension>,
}

/// Perturbation-connected classes, numbered by first appearance.
fn classes(g: &ExperimentGraph) -> Vec<usize> {
    let n = g.states().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for e in g.perturbations() {
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    (0..n)
        .map(|i| {
            let r = find(&mut parent, i);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            label[r]
        })
        .collect()
}

/// A condition-II obligation between two observed-equal response sources
/// `a` and `b` with terminals `ta` and `tb`.
#[derive(Debug, Clone, Copy)]
struct PairCheck {
    a: usize,
    b: usize,
    ta: usize,
    tb: usize,
    /// The observed parts of the two terminals agree.
    terminals_agree: bool,
}

struct Enumerator {
    hidden: usize,
    class_of: Vec<usize>,
    /// Class assignment order.
    order: Vec<usize>,
    /// Response edges whose later endpoint class is `order[k]`, for each k.
    checks: Vec<Vec<Edge>>,
    /// Pair obligations fully assigned once `order[k]` is.
    pairs: Vec<Vec<PairCheck>>,
    /// Response edges not yet checked after position k.
    remaining: Vec<usize>,
    /// Observed part of each response edge already decreases.
    observed_decrease: Vec<bool>,
    edge_index: std::collections::HashMap<Edge, usize>,
    /// Exact number of changing response edges wanted.
    changes: usize,
}

impl Enumerator {
    fn value(&self, values: &[Option<u32>], state: usize) -> u32 {
        values[self.class_of[state]].expect("assigned")
    }

    fn run(&self, values: &mut Vec<Option<u32>>, k: usize, changes: usize, out: &mut Vec<Vec<u32>>) {
        if k == self.order.len() {
            if changes == self.changes {
                out.push(values.iter().map(|v| v.expect("assigned")).collect());
            }
            return;
        }
        let class = self.order[k];
        for v in 0..(1u32 << self.hidden) {
            values[class] = Some(v);
            let mut ok = true;
            let mut extra = 0;
            for e in &self.checks[k] {
                let a = self.value(values, e.from);
                let b = self.value(values, e.to);
                // III: some observed or hidden species decreases
                if !self.observed_decrease[self.edge_index[e]] && a & !b == 0 {
                    ok = false;
                    break;
                }
                if a != b {
                    extra += 1;
                }
            }
            // II on the extended values
            ok = ok
                && self.pairs[k].iter().all(|p| {
                    self.value(values, p.a) != self.value(values, p.b)
                        || (p.terminals_agree && self.value(values, p.ta) == self.value(values, p.tb))
                });
            let total = changes + extra;
            if ok && total <= self.changes && total + self.remaining[k] >= self.changes {
                self.run(values, k + 1, total, out);
            }
        }
        values[class] = None;
    }
}

/// Every assignment at `hidden` species satisfying XI, condition II and
/// condition III with exactly `changes` changes. Condition I must already
/// hold.
fn assignments(g: &ExperimentGraph, hidden: usize, changes: usize) -> Vec<Extension> {
    let class_of = classes(g);
    let classes = class_of.iter().max().map_or(0, |m| m + 1);
    let edges = g.ordered_responses();

    let mut order = Vec::new();
    let mut seen = vec![false; classes];
    for e in &edges {
        for s in [e.from, e.to] {
            let c = class_of[s];
            if !seen[c] {
                seen[c] = true;
                order.push(c);
            }
        }
    }
    order.extend((0..classes).filter(|&c| !seen[c]));
    let pos: Vec<usize> = {
        let mut p = vec![0; classes];
        for (k, &c) in order.iter().enumerate() {
            p[c] = k;
        }
        p
    };
    let at = |states: &[usize]| states.iter().map(|&s| pos[class_of[s]]).max().unwrap_or(0);

    let mut checks = vec![Vec::new(); order.len()];
    for &e in &edges {
        checks[at(&[e.from, e.to])].push(e);
    }
    let mut remaining = vec![0; order.len()];
    let mut left = edges.len();
    for k in 0..order.len() {
        left -= checks[k].len();
        remaining[k] = left;
    }

    let terminal = crate::validity::terminal_map(g).expect("deterministic");
    let sources: Vec<usize> = (0..g.states().len())
        .filter(|&i| g.responses_from(i).next().is_some())
        .collect();
    let mut pairs = vec![Vec::new(); order.len()];
    for (i, &a) in sources.iter().enumerate() {
        for &b in &sources[i + 1..] {
            if g.values(a) != g.values(b) {
                continue;
            }
            if let (Some(&ta), Some(&tb)) = (terminal.get(&a), terminal.get(&b)) {
                pairs[at(&[a, b, ta, tb])].push(PairCheck {
                    a,
                    b,
                    ta,
                    tb,
                    terminals_agree: g.values(ta) == g.values(tb),
                });
            }
        }
    }

    let enumerator = Enumerator {
        hidden,
        observed_decrease: edges
            .iter()
            .map(|&e| g.edge_diff(e).iter().any(|&d| d < 0))
            .collect(),
        edge_index: edges.iter().enumerate().map(|(i, &e)| (e, i)).collect(),
        class_of,
        order,
        checks,
        pairs,
        remaining,
        changes,
    };
    let mut raw = Vec::new();
    enumerator.run(&mut vec![None; classes], 0, 0, &mut raw);

    let mask = |v: u32| -> Vec<u8> { (0..hidden).map(|h| ((v >> h) & 1) as u8).collect() };
    raw.into_iter()
        .map(|values| {
            let rows = enumerator
                .class_of
                .iter()
                .map(|&cl| mask(values[cl]))
                .collect();
            Extension::new(hidden, rows)
        })
        .collect()
}

fn realizable(g: &ExperimentGraph, e: &Extension) -> Result<bool> {
    let ext = extend(g, e)?;
    is_realizable(&ext, &Bounds::basic(&ext))
}

/// Fewest hidden species first, then fewest changes, over valid extensions
/// that admit a conformal structure. Deepens the hidden count up to
/// `opts.max_hidden`.
pub fn minimal_valid_extensions(g: &ExperimentGraph, opts: &ExtensionOptions) -> Result<MinimalExtensions> {
    let report = validate(g);
    if report.is_valid {
        return Ok(MinimalExtensions {
            hidden: 0,
            changes: 0,
            extensions: vec![Extension::empty(g.states().len())],
        });
    }
    // hidden species cannot repair a state with two responses
    if !report.det_violations.is_empty() {
        return Err(Error::NoExtension(opts.max_hidden));
    }
    let sources = (0..g.states().len())
        .filter(|&i| g.responses_from(i).next().is_some())
        .count();
    for hidden in 1..=opts.max_hidden {
        for changes in 0..=sources {
            let mut level: Vec<Extension> = assignments(g, hidden, changes)
                .into_iter()
                .filter(|e| !opts.symmetry_breaking || canonical_hidden(e, g))
                .collect();
            debug_assert!(level
                .iter()
                .all(|e| validate(&extend(g, e).expect("well-formed")).is_valid));
            level.sort();
            let verdicts = par::map(&level, opts.parallel, |e| realizable(g, e));
            let mut extensions = Vec::new();
            for (e, ok) in level.iter().zip(verdicts) {
                if ok? {
                    extensions.push(e.clone());
                }
            }
            if !extensions.is_empty() {
                return Ok(MinimalExtensions {
                    hidden,
                    changes,
                    extensions,
                });
            }
        }
    }
    Err(Error::NoExtension(opts.max_hidden))
}

/// All column permutations of `e`, deduplicated.
pub fn column_orbit(e: &Extension) -> BTreeSet<Extension> {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    perms(e.hidden).iter().map(|p| e.permute_columns(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn opts() -> ExtensionOptions {
        ExtensionOptions {
            parallel: false,
            ..ExtensionOptions::default()
        }
    }

    #[test]
    fn extend_appends_hidden_columns() {
        let g = fixtures::fig2();
        assert_eq!(g.species().names(), ["fr", "r", "spo", "_h1", "_h2"]);
        let x2 = g.state_index("x2").unwrap();
        assert_eq!(g.values(x2), [0, 0, 0, 1, 0]);
        assert_eq!(g.responses(), fixtures::fig1().responses());
    }

    #[test]
    fn trivial_and_zero_extensions() {
        let g = fixtures::fig1();
        assert_eq!(extend(&g, &Extension::empty(9)).unwrap(), g);
        let zero = Extension::new(1, vec![vec![0]; 9]);
        let ext = extend(&g, &zero).unwrap();
        assert!(ext.states().iter().all(|s| s.values[3] == 0));
    }

    #[test]
    fn incomplete_assignment() {
        let g = fixtures::fig1();
        let short = Extension::new(1, vec![vec![0]; 8]);
        assert!(matches!(extend(&g, &short), Err(Error::IncompleteAssignment(_))));
        let ragged = Extension::new(2, vec![vec![0]; 9]);
        assert!(matches!(extend(&g, &ragged), Err(Error::IncompleteAssignment(_))));
    }

    #[test]
    fn figure_extensions_are_valid() {
        let g = fixtures::fig1();
        assert!(is_valid_extension(&g, &fixtures::fig2_extension()).unwrap().0);
        assert!(is_valid_extension(&g, &fixtures::fig3_extension()).unwrap().0);
        assert_eq!(fixtures::fig2_extension().change_count(&g), 5);
        assert_eq!(fixtures::fig3_extension().change_count(&g), 5);
    }

    #[test]
    fn perturbation_mismatch_breaks_xi() {
        let g = fixtures::fig1();
        let mut rows = fixtures::fig2_extension().rows().to_vec();
        rows[g.state_index("x6").unwrap()] = vec![0, 0];
        let (ok, _) = is_valid_extension(&g, &Extension::new(2, rows)).unwrap();
        assert!(!ok);
    }

    #[test]
    fn exactly_one_of_a_mirror_pair_is_canonical() {
        let g = fixtures::fig1();
        for e in [fixtures::fig2_extension(), fixtures::fig3_extension()] {
            let mirror = e.permute_columns(&[1, 0]);
            assert!(canonical_hidden(&e, &g));
            assert!(!canonical_hidden(&mirror, &g));
        }
        let one = Extension::new(1, vec![vec![1]; 9]);
        assert!(canonical_hidden(&one, &g));
        let twins = Extension::new(2, vec![vec![1, 1]; 9]);
        assert!(canonical_hidden(&twins, &g));
    }

    #[test]
    fn fig1_minimal_extensions() {
        let g = fixtures::fig1();
        let m = minimal_valid_extensions(&g, &opts()).unwrap();
        assert_eq!((m.hidden, m.changes), (2, 5));
        let mut expected = vec![fixtures::fig2_extension(), fixtures::fig3_extension()];
        expected.sort();
        assert_eq!(m.extensions, expected);

        let all = minimal_valid_extensions(
            &g,
            &ExtensionOptions {
                symmetry_breaking: false,
                ..opts()
            },
        )
        .unwrap();
        assert_eq!(all.extensions.len(), 4);
        for e in &all.extensions {
            assert!(expected.iter().any(|x| column_orbit(x).contains(e)));
        }
    }

    #[test]
    fn one_hidden_species_is_not_enough() {
        let g = fixtures::fig1();
        let capped = ExtensionOptions {
            max_hidden: 1,
            ..opts()
        };
        assert_eq!(minimal_valid_extensions(&g, &capped), Err(Error::NoExtension(1)));
    }

    #[test]
    fn valid_graph_needs_nothing() {
        let g = fixtures::fig2();
        let m = minimal_valid_extensions(&g, &opts()).unwrap();
        assert_eq!((m.hidden, m.changes), (0, 0));
        assert_eq!(m.extensions, vec![Extension::empty(9)]);
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(column_orbit(&fixtures::fig2_extension()).len(), 2);
        assert_eq!(column_orbit(&Extension::new(2, vec![vec![1, 1]; 3])).len(), 1);
        assert_eq!(column_orbit(&Extension::empty(3)).len(), 1);
    }
}
