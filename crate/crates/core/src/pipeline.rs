//! validate, extend if needed, then enumerate per minimal extension.

use crate::bounds::{tighten_bounds, Bounds};
use crate::error::Result;
use crate::extension::{extend, minimal_valid_extensions, Extension, ExtensionOptions};
use crate::model::ExperimentGraph;
use crate::par;
use crate::reconstruct::{enumerate_structures, Emission, SearchConfig, Solution};
use crate::validity::{validate, ValidityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// One solution per reaction set (otherwise one per inferred order).
    pub project: bool,
    pub tighten: bool,
    pub max_hidden: usize,
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            project: true,
            tighten: false,
            max_hidden: 4,
            parallel: par::available(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Run {
    pub extension: Extension,
    pub graph: ExperimentGraph,
    pub bounds: Bounds,
    pub solutions: Vec<Solution>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub validity: ValidityReport,
    pub hidden: usize,
    pub changes: usize,
    /// One run per minimal extension, in extension order.
    pub runs: Vec<Run>,
}

impl SolveReport {
    pub fn solution_count(&self) -> usize {
        self.runs.iter().map(|r| r.solutions.len()).sum()
    }
}

pub fn solve(g: &ExperimentGraph, opts: &SolveOptions) -> Result<SolveReport> {
    let validity = validate(g);
    let minimal = minimal_valid_extensions(
        g,
        &ExtensionOptions {
            max_hidden: opts.max_hidden,
            symmetry_breaking: true,
            parallel: opts.parallel,
        },
    )?;
    let runs = par::map(&minimal.extensions, opts.parallel, |e| -> Result<Run> {
        let graph = extend(g, e)?;
        let mut bounds = Bounds::basic(&graph);
        if opts.tighten {
            bounds = tighten_bounds(&graph, &bounds, opts.parallel)?;
        }
        let cfg = SearchConfig {
            bounds: bounds.clone(),
            check_order: true,
            emission: if opts.project {
                Emission::ReactionSets
            } else {
                Emission::AllOrders
            },
            parallel: opts.parallel,
        };
        let solutions = enumerate_structures(&graph, &cfg)?;
        Ok(Run {
            extension: e.clone(),
            graph,
            bounds,
            solutions,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SolveReport {
        validity,
        hidden: minimal.hidden,
        changes: minimal.changes,
        runs,
    })
}
