//! Synthetic experiment graphs.
//!
//! `simulated` draws a random reaction network with a random total rate
//! order and records what it does after random perturbations, so the result
//! is valid and realizable by construction. `scrambled` draws state values
//! at random and is usually invalid. Both are seeded and reproducible.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{self, ExperimentGraph, Reaction, RegulatoryStructure, SpeciesTable, StateVector};
use crate::simulate::fastest;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub species: usize,
    pub max_level: i32,
    pub reactions: usize,
    pub experiments: usize,
    /// Upper limit on recorded states (perturbation sources included).
    pub max_states: usize,
    pub max_responses: usize,
    /// Upper limit on response edges per experiment.
    pub max_chain: usize,
    /// Chance of merging a firing into the previous recorded step when the
    /// merge keeps the edge monotone.
    pub merge_chance: f64,
}

impl SynthConfig {
    /// At most 3 binary species, 6 states and 3 response edges.
    pub fn tiny() -> Self {
        SynthConfig {
            species: 3,
            max_level: 1,
            reactions: 3,
            experiments: 3,
            max_states: 6,
            max_responses: 3,
            max_chain: 3,
            merge_chance: 0.3,
        }
    }

    /// 10 species, 8 experiments, about 30 states.
    pub fn scale() -> Self {
        SynthConfig {
            species: 10,
            max_level: 1,
            reactions: 12,
            experiments: 8,
            max_states: 32,
            max_responses: 24,
            max_chain: 2,
            merge_chance: 0.25,
        }
    }
}

fn species_table(n: usize, max_level: i32) -> SpeciesTable {
    SpeciesTable::new((0..n).map(|i| (format!("s{i}"), max_level))).expect("generated names")
}

/// A random conversion (`a -> b`) or degradation (`a ->`) network with a
/// random total order, fastest first.
fn network(rng: &mut ChaCha8Rng, sp: &SpeciesTable, count: usize) -> RegulatoryStructure {
    let n = sp.len();
    let mut reactions: Vec<Vec<i32>> = Vec::new();
    for _ in 0..count * 4 {
        if reactions.len() == count {
            break;
        }
        let mut r = vec![0; n];
        let a = rng.gen_range(0..n);
        r[a] = -1;
        if n > 1 && rng.gen_bool(0.7) {
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            r[b] = 1;
        }
        if !reactions.contains(&r) {
            reactions.push(r);
        }
    }
    let mut rank: Vec<usize> = (0..reactions.len()).collect();
    rank.shuffle(rng);
    let m = reactions.len();
    let pairs = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .filter(|&(a, b)| rank[a] > rank[b]);
    let rs = reactions
        .into_iter()
        .map(|r| Reaction::new(r, sp).expect("unit entries"))
        .collect();
    RegulatoryStructure::new(rs, pairs).expect("total order")
}

fn random_state(rng: &mut ChaCha8Rng, sp: &SpeciesTable) -> Vec<i32> {
    sp.maxima().iter().map(|&m| rng.gen_range(0..=m)).collect()
}

/// Fires the fastest reaction until nothing is enabled; `None` if the
/// network cycles instead.
fn trajectory(rs: &RegulatoryStructure, sp: &SpeciesTable, x: &[i32]) -> Option<Vec<Vec<i32>>> {
    let mut out = vec![x.to_vec()];
    while out.len() <= crate::simulate::state_space_size(sp) {
        let y = out.last().expect("nonempty");
        match fastest(rs, sp, y) {
            Ok(Some(f)) => out.push(model::add(y, rs.reactions()[f].entries())),
            Ok(None) => return Some(out),
            Err(_) => return None,
        }
    }
    None
}

fn sign_consistent(a: &[i32], b: &[i32], c: &[i32]) -> bool {
    a.iter()
        .zip(b)
        .zip(c)
        .all(|((&x, &y), &z)| (y - x) * (z - y) >= 0)
}

/// A valid graph recorded from a random ground-truth network, together with
/// that network.
pub fn simulated(seed: u64, cfg: &SynthConfig) -> (ExperimentGraph, RegulatoryStructure) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sp = species_table(cfg.species, cfg.max_level);
    let truth = network(&mut rng, &sp, cfg.reactions);

    let mut states: Vec<StateVector> = Vec::new();
    let mut perturb = Vec::new();
    let mut respond = Vec::new();
    let mut terminals = Vec::new();

    // the unperturbed system at rest
    let rest = trajectory(&truth, &sp, &random_state(&mut rng, &sp))
        .and_then(|mut t| t.pop())
        .unwrap_or_else(|| vec![0; sp.len()]);
    for e in 0..cfg.experiments {
        let mut path = Vec::new();
        for _ in 0..8 {
            let start = random_state(&mut rng, &sp);
            match trajectory(&truth, &sp, &start) {
                Some(t) if t.len() > 1 => {
                    path = t;
                    break;
                }
                _ => {}
            }
        }
        if path.is_empty() {
            continue;
        }
        // keep a subsequence whose consecutive segments stay monotone
        let mut kept = vec![path[0].clone()];
        for next in &path[1..] {
            let k = kept.len();
            let merge = k > 1
                && rng.gen_bool(cfg.merge_chance)
                && sign_consistent(&kept[k - 2], &kept[k - 1], next);
            if merge {
                *kept.last_mut().expect("nonempty") = next.clone();
            } else {
                kept.push(next.clone());
            }
        }
        let steps = kept.len() - 1;
        let room_states = cfg.max_states.saturating_sub(states.len() + 1);
        let room_edges = cfg.max_responses.saturating_sub(respond.len());
        let allowed = steps
            .min(cfg.max_chain)
            .min(room_edges)
            .min(room_states.saturating_sub(1));
        if allowed == 0 {
            break;
        }
        let kept = kept.split_off(steps - allowed);
        let source = format!("e{e}p");
        states.push(StateVector::new(source.clone(), rest.clone()));
        for (i, v) in kept.iter().enumerate() {
            states.push(StateVector::new(format!("e{e}s{i}"), v.clone()));
        }
        perturb.push((source, format!("e{e}s0")));
        for i in 0..allowed {
            respond.push((format!("e{e}s{i}"), format!("e{e}s{}", i + 1)));
        }
        terminals.push(format!("e{e}s{allowed}"));
    }
    if states.is_empty() {
        states.push(StateVector::new("e0p", rest));
    }
    let g = ExperimentGraph::new(sp, states, &perturb, &respond, &terminals).expect("well-formed");
    (g, truth)
}

/// Like `simulated` over `cfg.species + unobserved` species, with the last
/// `unobserved` species then dropped from every recorded state. The result
/// is often invalid and needs hidden species to explain it.
pub fn partially_observed(seed: u64, cfg: &SynthConfig, unobserved: usize) -> (ExperimentGraph, RegulatoryStructure) {
    let full = SynthConfig {
        species: cfg.species + unobserved,
        ..*cfg
    };
    let (g, truth) = simulated(seed, &full);
    let sp = species_table(cfg.species, cfg.max_level);
    let rows = (0..g.states().len())
        .map(|i| g.values(i)[..cfg.species].to_vec())
        .collect();
    (g.with_values(sp, rows).expect("same layout"), truth)
}

/// A graph with random binary values on a random experiment layout.
pub fn scrambled(seed: u64, cfg: &SynthConfig) -> ExperimentGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=cfg.species);
    let sp = species_table(n, cfg.max_level);
    let mut states: Vec<StateVector> = Vec::new();
    let mut perturb = Vec::new();
    let mut respond = Vec::new();
    let mut terminals = Vec::new();
    for e in 0..cfg.experiments {
        let room_states = cfg.max_states.saturating_sub(states.len());
        let room_edges = cfg.max_responses.saturating_sub(respond.len());
        if room_states < 3 || room_edges == 0 {
            break;
        }
        let chain = rng.gen_range(1..=room_edges.min(room_states - 2).min(cfg.max_chain).min(2));
        let source = format!("e{e}p");
        states.push(StateVector::new(source.clone(), random_state(&mut rng, &sp)));
        for i in 0..=chain {
            states.push(StateVector::new(format!("e{e}s{i}"), random_state(&mut rng, &sp)));
        }
        perturb.push((source, format!("e{e}s0")));
        for i in 0..chain {
            respond.push((format!("e{e}s{i}"), format!("e{e}s{}", i + 1)));
        }
        terminals.push(format!("e{e}s{chain}"));
    }
    ExperimentGraph::new(sp, states, &perturb, &respond, &terminals).expect("well-formed")
}
