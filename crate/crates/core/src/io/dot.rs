//! Bipartite species/reaction networks in Graphviz DOT.
//!
//! Species are circles, reactions are boxes. A negative entry draws an arc
//! from the species to the reaction, a positive entry an arc from the reaction
//! to the species. Arcs for entries of magnitude above one carry the magnitude
//! as a label.

use std::fmt::Write as _;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn structure_to_dot(name: &str, species: &[String], reactions: &[Vec<i32>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    for s in species {
        let _ = writeln!(
            out,
            "  {} [label={}, shape=circle];",
            quote(&format!("s:{s}")),
            quote(s)
        );
    }
    for k in 0..reactions.len() {
        let _ = writeln!(
            out,
            "  {} [label={}, shape=box];",
            quote(&format!("r:{}", k + 1)),
            quote(&format!("r{}", k + 1))
        );
    }
    for (k, r) in reactions.iter().enumerate() {
        let node = quote(&format!("r:{}", k + 1));
        for (s, &v) in species.iter().zip(r) {
            let sp = quote(&format!("s:{s}"));
            let label = if v.abs() > 1 {
                format!(" [label=\"{}\"]", v.abs())
            } else {
                String::new()
            };
            match v.signum() {
                -1 => {
                    let _ = writeln!(out, "  {sp} -> {node}{label};");
                }
                1 => {
                    let _ = writeln!(out, "  {node} -> {sp}{label};");
                }
                _ => {}
            }
        }
    }
    out.push_str("}\n");
    out
}
