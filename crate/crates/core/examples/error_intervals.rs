//! Confidence intervals for the final consensus error, for the true
//! attacker and for the union over every plausible attacker set.

use anyhow::Result;
use consensus_guard::analysis::{enumerate_detectable_attacker_sets, error_interval, union_error_interval};
use consensus_guard::{ring4, sim::measurement_matrix, StackedSystem};

fn main() -> Result<()> {
    let a = ring4::weights();
    let c_meas = measurement_matrix(&ring4::graph(), ring4::DETECTOR_AGENT)?;
    let beta = 1e-3;

    let sys = StackedSystem::new(a.matrix(), &c_meas, &[ring4::ATTACKER])?;
    let single = error_interval(&sys, ring4::C, ring4::RHO, ring4::PHI, beta)?;
    println!(
        "attacker {{{}}}: mu = {:.4}, z = {:.4}, interval [{:.4}, {:.4}]",
        ring4::ATTACKER,
        single.mu,
        single.z,
        single.lower,
        single.upper
    );

    let candidates = enumerate_detectable_attacker_sets(a.matrix(), &c_meas, 3, &[ring4::DETECTOR_AGENT])?;
    let union = union_error_interval(a.matrix(), &c_meas, &candidates, ring4::C, ring4::RHO, ring4::PHI, beta)?;
    for i in &union.contributions {
        println!("  {:?}: half-width {:.4}", i.attackers, i.half_width());
    }
    println!("union half-width {:.4}, realised by {:?}", union.half_width, union.widest);
    Ok(())
}
