use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use netrecon_core::extension::{minimal_valid_extensions, ExtensionOptions, MinimalExtensions};
use netrecon_core::io::document::RunEntry;
use netrecon_core::io::{parse_instance, write_solutions, Format, SolutionsDocument, StructureEntry};
use netrecon_core::pipeline::{solve, SolveOptions};
use netrecon_core::validity::{validate, ValidityReport};
use netrecon_core::{simulate, Error, ExperimentGraph};

#[derive(Debug, Parser)]
#[command(name = "netrecon", version, about = "Reconstruct reaction networks from perturbation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance; exit 0 if valid, 1 if not.
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the minimal valid extensions of an instance.
    Extend {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_hidden: usize,
        /// Keep every hidden-column permutation.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
    },
    /// Extend if needed and enumerate every conformal structure.
    Solve {
        file: PathBuf,
        /// Emit one solution per rate order instead of per reaction set.
        #[arg(long)]
        no_project: bool,
        /// Precompute tighter step and reaction bounds.
        #[arg(long)]
        tighten: bool,
        #[arg(long, default_value_t = 4)]
        max_hidden: usize,
        /// Worker threads; 1 runs the sequential search.
        #[arg(long)]
        workers: Option<usize>,
        /// Write the document here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the fastest-reaction dynamics of a structure from a state.
    Simulate {
        file: PathBuf,
        /// A structure entry or a solutions document.
        structure: PathBuf,
        state: String,
        /// Run to pick from a solutions document (1-based).
        #[arg(long, default_value_t = 1)]
        run: usize,
        /// Solution to pick within the run (1-based).
        #[arg(long, default_value_t = 1)]
        solution: usize,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Convert a solutions document.
    Export {
        solutions: PathBuf,
        #[arg(long)]
        dot: bool,
    },
}

/// Exit status 1: the input is well formed but semantically unusable.
/// Exit status 2: usage, I/O or parse trouble.
#[derive(Debug)]
enum Failure {
    Semantic(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Document(_) => Failure::Usage(e.to_string()),
            _ => Failure::Semantic(e.to_string()),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ExperimentGraph, Failure> {
    let text = read(path)?;
    parse_instance(&text).map_err(|e| match e {
        Error::Parse { .. } | Error::Graph(_) | Error::Species(_) | Error::DimensionMismatch { .. } => {
            Failure::Usage(format!("{}: {e}", path.display()))
        }
        other => other.into(),
    })
}

fn json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn render_validity(r: &ValidityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", if r.is_valid { "valid" } else { "invalid" });
    for s in &r.det_violations {
        let _ = writeln!(out, "I   {s} has several response edges");
    }
    for (a, b) in &r.equal_terminal_violations {
        let _ = writeln!(out, "II  {a} and {b} are equal but reach different terminals");
    }
    for (a, b) in &r.decrease_violations {
        let _ = writeln!(out, "III nothing decreases on {a} -> {b}");
    }
    for s in &r.dangling_chains {
        let _ = writeln!(out, "warning: chain from {s} never reaches a terminal");
    }
    out
}

fn cmd_validate(file: &Path, as_json: bool) -> Outcome {
    let g = load(file)?;
    let report = validate(&g);
    print!("{}", if as_json { json(&report) } else { render_validity(&report) });
    Ok(if report.is_valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn extension_json(g: &ExperimentGraph, m: &MinimalExtensions) -> serde_json::Value {
    let ext: Vec<serde_json::Value> = m
        .extensions
        .iter()
        .map(|e| {
            let rows: serde_json::Map<String, serde_json::Value> = (0..g.states().len())
                .map(|i| (g.id(i).to_owned(), serde_json::json!(e.rows()[i])))
                .collect();
            serde_json::Value::Object(rows)
        })
        .collect();
    serde_json::json!({
        "hidden_species": m.hidden,
        "additional_changes": m.changes,
        "extensions": ext,
    })
}

fn cmd_extend(file: &Path, max_hidden: usize, all: bool, as_json: bool) -> Outcome {
    let g = load(file)?;
    let opts = ExtensionOptions {
        max_hidden,
        symmetry_breaking: !all,
        ..ExtensionOptions::default()
    };
    let m = minimal_valid_extensions(&g, &opts)?;
    if as_json {
        print!("{}", json(&extension_json(&g, &m)));
        return Ok(ExitCode::SUCCESS);
    }
    let mut out = format!("hidden species {}\nadditional changes {}\n", m.hidden, m.changes);
    let names: Vec<String> = (1..=m.hidden).map(|h| format!("_h{h}")).collect();
    for (k, e) in m.extensions.iter().enumerate() {
        let _ = writeln!(out, "extension {}", k + 1);
        for i in 0..g.states().len() {
            let cells: Vec<String> = names
                .iter()
                .zip(&e.rows()[i])
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            let _ = writeln!(out, "  {} {}", g.id(i), cells.join(" "));
        }
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(file: &Path, opts: SolveOptions, workers: Option<usize>, output: Option<&Path>) -> Outcome {
    let g = load(file)?;
    let report = match workers {
        Some(0) => return Err(Failure::Usage("--workers must be at least 1".into())),
        Some(1) => solve(&g, &SolveOptions { parallel: false, ..opts })?,
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
            pool.install(|| solve(&g, &opts))?
        }
        None => solve(&g, &opts)?,
    };
    let text = SolutionsDocument::new(&g, &report).to_json();
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

/// A bare structure entry, or one picked from a solutions document together
/// with the hidden values of its run.
fn load_structure(path: &Path, run: usize, solution: usize) -> Result<(StructureEntry, Option<RunEntry>), Failure> {
    let text = read(path)?;
    if let Ok(entry) = serde_json::from_str::<StructureEntry>(&text) {
        return Ok((entry, None));
    }
    let doc = SolutionsDocument::from_json(&text)?;
    let r = run
        .checked_sub(1)
        .and_then(|i| doc.runs.get(i))
        .ok_or_else(|| Failure::Usage(format!("no run {run} in {}", path.display())))?;
    let s = solution
        .checked_sub(1)
        .and_then(|i| r.solutions.get(i))
        .ok_or_else(|| Failure::Usage(format!("no solution {solution} in run {run}")))?;
    Ok((s.clone(), Some(r.clone())))
}

fn cmd_simulate(file: &Path, structure: &Path, state: &str, run: usize, solution: usize, max_steps: Option<usize>) -> Outcome {
    let g = load(file)?;
    let (entry, run_entry) = load_structure(structure, run, solution)?;
    let unknown = || Failure::Semantic(format!("unknown state `{state}`"));
    let (species, x0) = match &run_entry {
        Some(r) => {
            let hidden = r.species.len().saturating_sub(g.species().len());
            let species = g.species().with_hidden(hidden)?;
            (species, r.extended_state(&g, state).ok_or_else(unknown)?)
        }
        None => {
            let i = g.state_index(state).ok_or_else(unknown)?;
            (g.species().clone(), g.values(i).to_vec())
        }
    };
    let rs = entry.to_structure(&species)?;
    let t = simulate::run(&rs, &species, &x0, max_steps)?;
    print!("{}", json(&t));
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(path: &Path, dot: bool) -> Outcome {
    let doc = SolutionsDocument::from_json(&read(path)?)?;
    print!("{}", write_solutions(&doc, if dot { Format::Dot } else { Format::Json }));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file, json } => cmd_validate(&file, json),
        Command::Extend {
            file,
            max_hidden,
            all,
            json,
        } => cmd_extend(&file, max_hidden, all, json),
        Command::Solve {
            file,
            no_project,
            tighten,
            max_hidden,
            workers,
            output,
        } => {
            let opts = SolveOptions {
                project: !no_project,
                tighten,
                max_hidden,
                ..SolveOptions::default()
            };
            cmd_solve(&file, opts, workers, output.as_deref())
        }
        Command::Simulate {
            file,
            structure,
            state,
            run,
            solution,
            max_steps,
        } => cmd_simulate(&file, &structure, &state, run, solution, max_steps),
        Command::Export { solutions, dot } => cmd_export(&solutions, dot),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Semantic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
