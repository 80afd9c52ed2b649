//! Compares the analytic false-alarm bound with a Monte-Carlo estimate on
//! attack-free runs of the ring.

use anyhow::Result;
use consensus_guard::{ring4, run_campaign};

fn main() -> Result<()> {
    let trials: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let mut scenario = ring4::scenario();
    scenario.horizon = 100;

    for r in run_campaign(&scenario, trials, None)? {
        println!(
            "agent {}: {} / {} trials alarmed, rate {:.4}, bound {:.4}, within tolerance: {}",
            r.agent,
            r.alarms,
            r.trials,
            r.empirical_rate,
            r.alpha_bound,
            r.within_bound()
        );
    }

    // A tight threshold makes the bound vacuous and the detector noisy.
    scenario.detectors[0].c = 2.0;
    let loose = &run_campaign(&scenario, trials, None)?[0];
    println!("c = 2: rate {:.3}, bound {:.3}", loose.empirical_rate, loose.alpha_bound);
    Ok(())
}
