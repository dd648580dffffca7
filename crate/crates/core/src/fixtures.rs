//! The three-experiment sporulation example (species fr, r, spo) with its two
//! hand-derived extensions and regulatory structures. Used by tests, benches
//! and the CLI smoke tests.

use crate::extension::{extend, Extension};
use crate::io::parse_instance;
use crate::model::ExperimentGraph;

pub const FIG1_INSTANCE: &str = include_str!("../data/fig1.exp");
pub const TOY_INSTANCE: &str = include_str!("../data/toy.exp");

/// The invalid three-experiment graph.
pub fn fig1() -> ExperimentGraph {
    parse_instance(FIG1_INSTANCE).expect("bundled instance parses")
}

fn rows(hidden: &[(&str, [u8; 2])]) -> Vec<Vec<u8>> {
    let g = fig1();
    g.states()
        .iter()
        .map(|s| {
            hidden
                .iter()
                .find(|(id, _)| *id == s.id)
                .map(|(_, v)| v.to_vec())
                .unwrap_or_else(|| vec![0, 0])
        })
        .collect()
}

/// First extension: x2, x5 -> (1,0); x3, x6, x7 -> (0,1); others (0,0).
pub fn fig2_extension() -> Extension {
    Extension::new(
        2,
        rows(&[
            ("x2", [1, 0]),
            ("x3", [0, 1]),
            ("x5", [1, 0]),
            ("x6", [0, 1]),
            ("x7", [0, 1]),
        ]),
    )
}

/// Second extension: x2, x5 -> (1,1); x3, x6, x7 -> (0,1); others (0,0).
pub fn fig3_extension() -> Extension {
    Extension::new(
        2,
        rows(&[
            ("x2", [1, 1]),
            ("x3", [0, 1]),
            ("x5", [1, 1]),
            ("x6", [0, 1]),
            ("x7", [0, 1]),
        ]),
    )
}

pub fn fig2() -> ExperimentGraph {
    extend(&fig1(), &fig2_extension()).expect("fixture extends")
}

pub fn fig3() -> ExperimentGraph {
    extend(&fig1(), &fig3_extension()).expect("fixture extends")
}

/// Reactions r1..r5 conformal with the first extension, over
/// (fr, r, spo, _h1, _h2).
pub const FIG4_REACTIONS: [[i32; 5]; 5] = [
    [-1, 0, 0, 1, 0],
    [0, -1, 0, 0, 0],
    [0, -1, 0, -1, 0],
    [0, 0, 0, -1, 1],
    [0, 0, 1, 0, -1],
];

/// Order pairs as printed alongside the first structure, 1-based (a, b) with
/// `a` slower than `b`.
pub const FIG4_PRINTED_ORDER: [(usize, usize); 3] = [(4, 3), (3, 2), (5, 2)];

/// Order forced by the fastest-reaction semantics on the first extension.
pub const FIG4_FORCED_ORDER: [(usize, usize); 3] = [(4, 3), (2, 3), (5, 2)];

/// Reactions r1..r5 of the second structure. They are written with the two
/// hidden columns in the opposite order from [`fig3_extension`].
pub const FIG5_REACTIONS: [[i32; 5]; 5] = [
    [-1, 0, 0, 1, 1],
    [0, -1, 0, -1, -1],
    [0, -1, 0, 0, 0],
    [0, 0, 1, -1, 0],
    [0, 0, 0, 0, -1],
];

pub const FIG5_PRINTED_ORDER: [(usize, usize); 4] = [(4, 5), (5, 2), (4, 3), (3, 2)];

/// Swaps the two trailing (hidden) entries of a five-species vector.
pub fn swap_hidden(v: &[i32]) -> Vec<i32> {
    let mut out = v.to_vec();
    let n = out.len();
    out.swap(n - 2, n - 1);
    out
}
