//! Recovers the injected input from noise-free residuals.

use anyhow::Result;
use consensus_guard::{ring4, sim, Detector};

fn main() -> Result<()> {
    let scenario = ring4::scenario();
    let trace = sim::replay_without_noise(&scenario)?;
    let detector = Detector::for_scenario(&scenario, ring4::DETECTOR_AGENT)?;
    let series = trace.measurements_of(ring4::DETECTOR_AGENT).expect("detector recorded");

    let estimates = detector.estimate_inputs(series)?;
    for (k, u_hat) in estimates.iter().take(8).enumerate() {
        println!("k = {k}: injected {:>12.6e}, recovered {:>12.6e}", trace.u[k][0], u_hat[0]);
    }
    Ok(())
}
