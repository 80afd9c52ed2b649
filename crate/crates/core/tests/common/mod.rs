#![allow(dead_code)]

use consensus_guard::analysis::detectability_for;
use consensus_guard::graph::random_weights;
use consensus_guard::numerics::Vector;
use consensus_guard::sim::measurement_matrix;
use consensus_guard::{
    metropolis_weights, validate_weight_matrix, AnalysisParams, AttackProfile, AttackSignal, DetectorSpec, Graph,
    Scenario,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Random connected graph on 2..=6 agents with validated weights, a random
/// initial state and one detector. No attack, no noise.
pub fn random_quiet_scenario<R: Rng>(rng: &mut R, horizon: usize) -> Scenario {
    let n = rng.random_range(2..=6);
    let graph = Graph::random_connected(n, 0.3, rng).unwrap();
    let weights = if rng.random::<bool>() {
        metropolis_weights(&graph).unwrap()
    } else {
        random_weights(&graph, rng.random(), 0.5).unwrap()
    };
    assert!(validate_weight_matrix(&weights, &graph).unwrap().passed());
    let x0 = Vector::from_fn(n, |_, _| rng.random_range(-100.0..100.0));
    let agent = rng.random_range(1..=n);
    Scenario {
        graph,
        weights,
        x0,
        phi: 0.2,
        seed: rng.random(),
        zero_noise: true,
        attack: AttackProfile::none(),
        detectors: vec![DetectorSpec {
            agent,
            c: 16.2,
            rho: 0.7,
        }],
        horizon,
        analysis: AnalysisParams {
            p_max: n.min(3),
            ..AnalysisParams::default()
        },
    }
}

/// Like [`random_quiet_scenario`] but with a detectable attacker set of one
/// or two agents injecting uniform random inputs at every step.
pub fn random_attacked_scenario<R: Rng>(rng: &mut R, horizon: usize) -> Scenario {
    loop {
        let mut s = random_quiet_scenario(rng, horizon);
        let n = s.n();
        let detector = s.detectors[0].agent;
        let pool: Vec<usize> = (1..=n).filter(|&a| a != detector).collect();
        if pool.is_empty() {
            continue;
        }
        let size = rng.random_range(1..=pool.len().min(2));
        let mut set: Vec<usize> = pool.choose_multiple(rng, size).copied().collect();
        set.sort_unstable();
        let c = measurement_matrix(&s.graph, detector).unwrap();
        if !detectability_for(s.weights.matrix(), &c, &set).unwrap().detectable {
            continue;
        }
        let signals = set
            .iter()
            .map(|_| AttackSignal::Sequence {
                values: (0..=horizon).map(|_| rng.random_range(-10.0..10.0)).collect(),
            })
            .collect();
        s.attack = AttackProfile::new(n, set, signals).unwrap();
        return s;
    }
}
