//! Lists which attacker sets of up to three agents the ring detector at
//! agent 1 can tell apart from the initial state.

use anyhow::Result;
use consensus_guard::analysis::classify_attacker_sets;
use consensus_guard::{ring4, sim::measurement_matrix};

fn main() -> Result<()> {
    let a = ring4::weights();
    let c = measurement_matrix(&ring4::graph(), ring4::DETECTOR_AGENT)?;

    for (set, v) in classify_attacker_sets(a.matrix(), &c, 3, &[])? {
        println!(
            "{:<10} rank[O J] = {:>2}  rank[J] = {:>2}  {}",
            format!("{set:?}"),
            v.rank_oj,
            v.rank_j,
            if v.detectable { "detectable" } else { "not detectable" }
        );
    }
    Ok(())
}
