//! Prints a synthetic instance in the text format.
//!
//! cargo run --example synth_instance -- <seed> [unobserved] [tiny|scale|dense]

use netrecon_core::io::write_instance;
use netrecon_core::synth::{partially_observed, SynthConfig};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed: u64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0);
    let unobserved: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = match args.get(2).map(String::as_str) {
        Some("tiny") => SynthConfig::tiny(),
        Some("dense") => SynthConfig {
            reactions: 16,
            merge_chance: 0.6,
            ..SynthConfig::scale()
        },
        _ => SynthConfig::scale(),
    };
    let (g, _) = partially_observed(seed, &cfg, unobserved);
    print!("{}", write_instance(&g));
}
