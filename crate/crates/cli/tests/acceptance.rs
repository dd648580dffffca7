//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Tolerances are fixed here and nowhere else.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use netrecon_core::bounds::{edge_step_bound, global_reaction_bound, tighten_bounds, Bounds};
use netrecon_core::extension::{column_orbit, extend, minimal_valid_extensions, Extension, ExtensionOptions};
use netrecon_core::fixtures::{self, FIG1_INSTANCE, TOY_INSTANCE};
use netrecon_core::io::{parse_instance, write_instance, SolutionsDocument, StructureEntry};
use netrecon_core::oracle::{brute_minimal_extensions, brute_structures, MAX_CELLS};
use netrecon_core::pipeline::{solve, SolveOptions};
use netrecon_core::reconstruct::{enumerate_structures, SearchConfig, Solution};
use netrecon_core::simulate::check_conformal;
use netrecon_core::synth::{partially_observed, scrambled, simulated, SynthConfig};
use netrecon_core::validity::{validate, ValidityReport};
use netrecon_core::{Error, ExperimentGraph};

const VALIDATE_LIMIT: Duration = Duration::from_secs(1);
const EXTEND_LIMIT: Duration = Duration::from_secs(10);
const SOLVE_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_LIMIT: Duration = Duration::from_secs(600);
const SCALE_LIMIT: Duration = Duration::from_secs(3600);
const SCALE_MEMORY_KIB: u64 = 2 * 1024 * 1024;
const CORPUS_SEEDS: std::ops::Range<u64> = 1000..1120;
const SCALE_INSTANCE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/scale.exp");

type Verdict = Result<String, String>;

fn netrecon(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_netrecon"))
        .args(args)
        .output()
        .expect("binary runs");
    (out, start.elapsed())
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("netrecon-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn within(label: &str, took: Duration, limit: Duration) -> Result<(), String> {
    if took <= limit {
        Ok(())
    } else {
        Err(format!("{label} took {took:?}, limit {limit:?}"))
    }
}

fn sorted(vs: impl IntoIterator<Item = Vec<i32>>) -> Vec<Vec<i32>> {
    let mut v: Vec<Vec<i32>> = vs.into_iter().collect();
    v.sort();
    v
}

fn family(sols: &[Solution]) -> BTreeSet<Vec<Vec<i32>>> {
    sols.iter()
        .map(|s| s.structure.reactions().iter().map(|r| r.entries().to_vec()).collect())
        .collect()
}

fn rows_by_id(g: &ExperimentGraph, e: &Extension) -> BTreeMap<String, Vec<u8>> {
    (0..g.states().len())
        .map(|i| (g.id(i).to_owned(), e.rows()[i].clone()))
        .collect()
}

fn criterion_1() -> Verdict {
    let f = scratch("fig1.exp", FIG1_INSTANCE);
    let (out, took) = netrecon(&["validate", "--json", s(&f)]);
    let report: ValidityReport = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let pair = |a: &str, b: &str| (a.to_owned(), b.to_owned());
    let expected = ValidityReport {
        is_valid: false,
        det_violations: vec![],
        equal_terminal_violations: vec![pair("x5", "x6")],
        decrease_violations: vec![pair("x2", "x3"), pair("x3", "x4"), pair("x7", "x8")],
        dangling_chains: vec![],
    };
    if report != expected {
        return Err(format!("report {report:?}"));
    }
    if out.status.code() != Some(1) {
        return Err(format!("exit status {:?}", out.status.code()));
    }
    within("validate", took, VALIDATE_LIMIT)?;
    Ok(format!("exact report, exit 1, {took:?}"))
}

fn criterion_2() -> Verdict {
    let f = scratch("fig1.exp", FIG1_INSTANCE);
    let g = fixtures::fig1();
    let (out, t1) = netrecon(&["extend", "--json", s(&f)]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let got: BTreeSet<BTreeMap<String, Vec<u8>>> =
        serde_json::from_value(v["extensions"].clone()).map_err(|e| e.to_string())?;
    let want: BTreeSet<_> = [fixtures::fig2_extension(), fixtures::fig3_extension()]
        .iter()
        .map(|e| rows_by_id(&g, e))
        .collect();
    if v["hidden_species"] != 2 {
        return Err(format!("a* = {}", v["hidden_species"]));
    }
    if got != want {
        return Err(format!("extensions {got:?}"));
    }
    let (out, t2) = netrecon(&["extend", "--all", "--json", s(&f)]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let unfiltered = v["extensions"].as_array().map_or(0, Vec::len);
    if unfiltered != 4 {
        return Err(format!("{unfiltered} unfiltered extensions"));
    }
    within("extend", t1 + t2, EXTEND_LIMIT)?;
    Ok(format!("a*=2, c*={}, 2 canonical = Figs. 2/3, 4 unfiltered, {:?}", v["additional_changes"], t1 + t2))
}

/// The printed pairs (1-based figure numbering) absent from the closure of
/// `slower` over `reactions`.
fn missing_pairs(
    figure: &[Vec<i32>],
    printed: &[(usize, usize)],
    reactions: &[Vec<i32>],
    slower: &BTreeSet<(usize, usize)>,
) -> Vec<(usize, usize)> {
    let index = |p: usize| reactions.iter().position(|r| *r == figure[p - 1]);
    printed
        .iter()
        .copied()
        .filter(|&(a, b)| match (index(a), index(b)) {
            (Some(i), Some(j)) => !slower.contains(&(i, j)),
            _ => true,
        })
        .collect()
}

fn criterion_3() -> Verdict {
    let f = scratch("fig1.exp", FIG1_INSTANCE);
    let g = fixtures::fig1();
    let projected = scratch("projected.json", "");
    let all = scratch("all.json", "");
    let (_, t1) = netrecon(&["solve", s(&f), "-o", s(&projected)]);
    let (_, t2) = netrecon(&["solve", "--no-project", s(&f), "-o", s(&all)]);
    let load = |p: &Path| SolutionsDocument::from_json(&std::fs::read_to_string(p).unwrap()).map_err(|e| e.to_string());
    let (projected, all) = (load(&projected)?, load(&all)?);

    // Fig. 5 is drawn with the hidden columns in the opposite order to Fig. 3
    let fig4: Vec<Vec<i32>> = fixtures::FIG4_REACTIONS.iter().map(|v| v.to_vec()).collect();
    let fig5: Vec<Vec<i32>> = fixtures::FIG5_REACTIONS.iter().map(|v| fixtures::swap_hidden(v)).collect();
    let cases = [
        ("Fig. 4", fixtures::fig2_extension(), &fig4, &fixtures::FIG4_PRINTED_ORDER[..]),
        ("Fig. 5", fixtures::fig3_extension(), &fig5, &fixtures::FIG5_PRINTED_ORDER[..]),
    ];
    let mut problems = Vec::new();
    for (name, ext, figure, printed) in cases {
        let rows = rows_by_id(&g, &ext);
        let find = |doc: &SolutionsDocument| doc.runs.iter().find(|r| r.extension == rows).cloned();
        let (Some(p), Some(a)) = (find(&projected), find(&all)) else {
            problems.push(format!("{name}: no run for its extension"));
            continue;
        };
        let sets: BTreeSet<Vec<Vec<i32>>> = p.solutions.iter().map(|s| sorted(s.reactions.clone())).collect();
        if sets != BTreeSet::from([sorted(figure.clone())]) {
            problems.push(format!("{name}: reaction sets {sets:?}"));
        }
        // some emitted order must extend the printed one
        let best = a
            .solutions
            .iter()
            .map(|s: &StructureEntry| {
                let slower: BTreeSet<(usize, usize)> = s.slower.iter().copied().collect();
                missing_pairs(figure, printed, &s.reactions, &slower)
            })
            .min_by_key(Vec::len);
        match best {
            Some(m) if m.is_empty() => {}
            Some(m) => problems.push(format!(
                "{name}: printed pairs {m:?} (r_a slower than r_b) are in no emitted order"
            )),
            None => problems.push(format!("{name}: no solutions")),
        }
    }
    if let Err(e) = within("solve", t1 + t2, SOLVE_LIMIT) {
        problems.push(e);
    }
    if problems.is_empty() {
        Ok(format!("Fig. 4/5 reaction sets and orders reproduced, {:?}", t1 + t2))
    } else {
        Err(problems.join("; "))
    }
}

struct Corpus {
    graphs: Vec<(String, ExperimentGraph)>,
}

fn corpus() -> Corpus {
    let cfg = SynthConfig::tiny();
    let mut graphs = Vec::new();
    for seed in CORPUS_SEEDS {
        graphs.push((format!("simulated {seed}"), simulated(seed, &cfg).0));
        graphs.push((format!("scrambled {seed}"), scrambled(seed, &cfg)));
    }
    Corpus { graphs }
}

fn criterion_4(c: &Corpus) -> Verdict {
    let mut instances: Vec<(String, ExperimentGraph)> = vec![
        ("fig1".into(), fixtures::fig1()),
        ("toy".into(), parse_instance(TOY_INSTANCE).unwrap()),
        ("scale".into(), parse_instance(&std::fs::read_to_string(SCALE_INSTANCE).unwrap()).unwrap()),
    ];
    instances.extend(c.graphs.iter().cloned());
    let mut checked = 0;
    for (label, g) in &instances {
        for project in [true, false] {
            let opts = SolveOptions {
                project,
                ..SolveOptions::default()
            };
            let report = match solve(g, &opts) {
                Ok(r) => r,
                Err(Error::NoExtension(_)) => continue,
                Err(e) => return Err(format!("{label}: {e}")),
            };
            for run in &report.runs {
                for sol in &run.solutions {
                    let r = check_conformal(&sol.structure, &run.graph).map_err(|e| e.to_string())?;
                    if !r.is_conformal() {
                        return Err(format!("{label}: {r:?}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} solutions on {} instances, all conformal", instances.len()))
}

#[derive(Default)]
struct OracleTally {
    instances: usize,
    structure_checks: usize,
    extension_checks: usize,
    failures: Vec<String>,
    bound_failures: Vec<String>,
    bound_checks: usize,
}

fn structures_vs_oracle(g: &ExperimentGraph, label: &str, t: &mut OracleTally) {
    let oracle = match brute_structures(g, usize::MAX, usize::MAX) {
        Ok(o) => o,
        Err(e) => return t.failures.push(format!("{label}: oracle {e}")),
    };
    let basic = Bounds::basic(g);
    let found = family(&enumerate_structures(g, &SearchConfig::new(basic.clone())).unwrap());
    t.structure_checks += 1;
    if found != oracle.sets {
        t.failures.push(format!("{label}: engine {found:?} oracle {:?}", oracle.sets));
    }

    t.bound_checks += 1;
    if oracle.max_reactions > global_reaction_bound(g, 0) {
        t.bound_failures.push(format!("{label}: {} reactions over the global bound", oracle.max_reactions));
    }
    for (&e, &w) in &oracle.longest_witness {
        if w > edge_step_bound(g, e, 0).unwrap() {
            t.bound_failures.push(format!("{label}: witness of {w} steps over the edge bound"));
        }
    }
    let tight = tighten_bounds(g, &basic, false).unwrap();
    let found = family(&enumerate_structures(g, &SearchConfig::new(tight)).unwrap());
    if !oracle.sets.is_subset(&found) {
        t.bound_failures.push(format!("{label}: tightened bounds lose structures"));
    }
}

fn extensions_vs_oracle(g: &ExperimentGraph, label: &str, t: &mut OracleTally) {
    let a_max = (MAX_CELLS / g.states().len()).min(3);
    let opts = ExtensionOptions {
        max_hidden: a_max,
        ..ExtensionOptions::default()
    };
    let brute = match brute_minimal_extensions(g, a_max) {
        Ok(b) => b,
        Err(e) => return t.failures.push(format!("{label}: oracle {e}")),
    };
    t.extension_checks += 1;
    match (minimal_valid_extensions(g, &opts), brute) {
        (Err(Error::NoExtension(_)), None) => {}
        (Ok(ours), Some(brute)) => {
            let orbits: BTreeSet<Extension> = ours.extensions.iter().flat_map(column_orbit).collect();
            if (ours.hidden, ours.changes) != (brute.hidden, brute.changes) || orbits != brute.extensions {
                t.failures.push(format!(
                    "{label}: engine ({}, {}) oracle ({}, {})",
                    ours.hidden, ours.changes, brute.hidden, brute.changes
                ));
            }
            if ours.hidden > 0 {
                for e in &ours.extensions {
                    structures_vs_oracle(&extend(g, e).unwrap(), label, t);
                }
            }
        }
        (ours, brute) => t.failures.push(format!("{label}: engine {ours:?} oracle {brute:?}")),
    }
}

fn oracle_tally(c: &Corpus) -> (OracleTally, Duration) {
    let start = Instant::now();
    let mut t = OracleTally::default();
    for (label, g) in &c.graphs {
        t.instances += 1;
        if validate(g).is_valid {
            structures_vs_oracle(g, label, &mut t);
        }
        extensions_vs_oracle(g, label, &mut t);
    }
    (t, start.elapsed())
}

fn criterion_5(t: &OracleTally, took: Duration) -> Verdict {
    if t.instances < 200 {
        return Err(format!("only {} instances", t.instances));
    }
    if !t.failures.is_empty() {
        return Err(format!("{} mismatches, first: {}", t.failures.len(), t.failures[0]));
    }
    within("oracle corpus", took, ORACLE_LIMIT)?;
    Ok(format!(
        "{} instances: {} structure families and {} extension sets agree, {took:?}",
        t.instances, t.structure_checks, t.extension_checks
    ))
}

fn criterion_6(t: &OracleTally) -> Verdict {
    if !t.bound_failures.is_empty() {
        return Err(format!("{} violations, first: {}", t.bound_failures.len(), t.bound_failures[0]));
    }
    Ok(format!("{} graphs: global, per-edge and tightened bounds sound", t.bound_checks))
}

fn criterion_7() -> Verdict {
    let dense = SynthConfig {
        reactions: 16,
        merge_chance: 0.6,
        max_chain: 24,
        ..SynthConfig::scale()
    };
    let files = [
        scratch("fig1.exp", FIG1_INSTANCE),
        PathBuf::from(SCALE_INSTANCE),
        scratch("dense.exp", &write_instance(&simulated(3, &dense).0)),
    ];
    let mut compared = 0;
    for f in &files {
        for extra in [&[][..], &["--no-project"][..], &["--tighten"][..]] {
            let run = |w: &str| {
                let mut args = vec!["solve", s(f), "--workers", w];
                args.extend_from_slice(extra);
                netrecon(&args).0
            };
            let (one, four) = (run("1"), run("4"));
            if !one.status.success() || one.stdout != four.stdout {
                return Err(format!("{} {extra:?}: outputs differ", f.display()));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} solve invocations byte-identical for --workers 1 and 4"))
}

fn criterion_8() -> Verdict {
    let g = parse_instance(&std::fs::read_to_string(SCALE_INSTANCE).unwrap()).map_err(|e| e.to_string())?;
    let experiments = g.perturbations().len();
    if g.species().len() != 10 || experiments != 8 || !(25..=35).contains(&g.states().len()) {
        return Err(format!(
            "instance shape: {} species, {experiments} experiments, {} states",
            g.species().len(),
            g.states().len()
        ));
    }
    // address-space cap enforced by the shell
    let script = format!(
        "ulimit -v {SCALE_MEMORY_KIB} && exec \"$0\" solve \"$1\" --workers 4"
    );
    let start = Instant::now();
    let out = Command::new("sh")
        .args(["-c", &script, env!("CARGO_BIN_EXE_netrecon"), SCALE_INSTANCE])
        .output()
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let doc = SolutionsDocument::from_json(&String::from_utf8_lossy(&out.stdout)).map_err(|e| e.to_string())?;
    if doc.hidden_species > 1 {
        return Err(format!("{} hidden species", doc.hidden_species));
    }
    within("scale solve", took, SCALE_LIMIT)?;

    // a few more draws of the same shape, in-process
    let mut sweep = Vec::new();
    let cfg = SynthConfig {
        reactions: 16,
        merge_chance: 0.6,
        ..SynthConfig::scale()
    };
    for seed in 0..8 {
        let (h, _) = partially_observed(seed, &cfg, 1);
        let t = Instant::now();
        let r = solve(&h, &SolveOptions::default()).map_err(|e| format!("seed {seed}: {e}"))?;
        sweep.push((r.hidden, t.elapsed()));
    }
    let slowest = sweep.iter().map(|s| s.1).max().unwrap_or_default();
    within("sweep", slowest, SCALE_LIMIT)?;
    Ok(format!(
        "{} states, hidden {}, {} solutions in {took:?} under {} MiB; sweep of {} more, slowest {slowest:?}",
        g.states().len(),
        doc.hidden_species,
        doc.solution_count(),
        SCALE_MEMORY_KIB / 1024,
        sweep.len()
    ))
}

fn main() {
    let corpus = corpus();
    let (tally, oracle_time) = oracle_tally(&corpus);
    let results: Vec<(&str, Verdict)> = vec![
        ("golden validity", criterion_1()),
        ("golden extension", criterion_2()),
        ("golden reconstruction", criterion_3()),
        ("conformality soundness", criterion_4(&corpus)),
        ("oracle equivalence", criterion_5(&tally, oracle_time)),
        ("bound soundness", criterion_6(&tally)),
        ("parallel determinism", criterion_7()),
        ("scalability", criterion_8()),
    ];
    let mut failed = 0;
    for (i, (name, verdict)) in results.iter().enumerate() {
        match verdict {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
