//! The four-agent ring used as the reference benchmark throughout the crate.
//!
//! Agents 1–2–3–4–1 form a cycle with a fixed symmetric weight matrix.
//! Agent 3 injects `-24 * 0.2^k`, agent 1 runs a
//! detector with `c = 16.2`, `rho = 0.7` and the privacy noise decays with
//! `phi = 0.2`. The same data ships as `examples/ring4.json`.

use crate::graph::{Graph, WeightMatrix};
use crate::numerics::Vector;
use crate::scenario::{AnalysisParams, DetectorSpec, Scenario};
use crate::sim::{AttackProfile, AttackSignal};

pub const WEIGHTS: [[f64; 4]; 4] = [
    [0.136, 0.461, 0.0, 0.403],
    [0.461, 0.153, 0.386, 0.0],
    [0.0, 0.386, 0.278, 0.336],
    [0.403, 0.0, 0.336, 0.261],
];
pub const INITIAL_STATE: [f64; 4] = [100.0, -50.0, 50.0, -100.0];
pub const EDGES: [(usize, usize); 4] = [(1, 2), (2, 3), (3, 4), (1, 4)];
pub const ATTACKER: usize = 3;
pub const ATTACK_AMPLITUDE: f64 = -24.0;
pub const ATTACK_RATIO: f64 = 0.2;
pub const DETECTOR_AGENT: usize = 1;
pub const C: f64 = 16.2;
pub const RHO: f64 = 0.7;
pub const PHI: f64 = 0.2;
pub const SEED: u64 = 2021;
pub const HORIZON: usize = 200;

pub fn graph() -> Graph {
    Graph::new(4, &EDGES).expect("static edge list is valid")
}

pub fn weights() -> WeightMatrix {
    WeightMatrix::from_rows(&WEIGHTS.map(Vec::from)).expect("static matrix is square")
}

pub fn initial_state() -> Vector {
    Vector::from_row_slice(&INITIAL_STATE)
}

pub fn attack() -> AttackProfile {
    AttackProfile::new(
        4,
        vec![ATTACKER],
        vec![AttackSignal::Geometric {
            amplitude: ATTACK_AMPLITUDE,
            ratio: ATTACK_RATIO,
        }],
    )
    .expect("static attack profile is valid")
}

pub fn scenario() -> Scenario {
    Scenario {
        graph: graph(),
        weights: weights(),
        x0: initial_state(),
        phi: PHI,
        seed: SEED,
        zero_noise: false,
        attack: attack(),
        detectors: vec![DetectorSpec {
            agent: DETECTOR_AGENT,
            c: C,
            rho: RHO,
        }],
        horizon: HORIZON,
        analysis: AnalysisParams {
            beta: 0.001,
            p_max: 3,
        },
    }
}
