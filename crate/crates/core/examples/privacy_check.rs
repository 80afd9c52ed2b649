//! Which agents keep their initial state private from a curious neighbor.

use anyhow::Result;
use consensus_guard::analysis::privacy_report;
use consensus_guard::{ring4, Graph};

fn main() -> Result<()> {
    for (name, graph) in [("ring", ring4::graph()), ("complete", Graph::complete(4)?), ("star", Graph::star(4)?)] {
        println!("{name}, curious agent 3:");
        for v in privacy_report(&graph, &[3])? {
            println!("  agent {}: {}", v.agent, if v.private { "private" } else { "exposed" });
        }
    }
    Ok(())
}
