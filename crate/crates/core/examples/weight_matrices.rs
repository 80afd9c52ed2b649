//! Builds consensus weights for a few graphs and checks the assumptions the
//! detector relies on.

use anyhow::Result;
use consensus_guard::analysis::second_eigenvalue_modulus;
use consensus_guard::graph::random_weights;
use consensus_guard::{metropolis_weights, ring4, validate_weight_matrix, Graph};

fn main() -> Result<()> {
    let graphs = [
        ("ring (reference weights)", ring4::graph(), Some(ring4::weights())),
        ("path of 5", Graph::path(5)?, None),
        ("star of 6", Graph::star(6)?, None),
    ];
    for (name, graph, given) in graphs {
        let w = match given {
            Some(w) => w,
            None => metropolis_weights(&graph)?,
        };
        let report = validate_weight_matrix(&w, &graph)?;
        println!(
            "{name}: valid = {}, second eigenvalue modulus = {:.4}",
            report.passed(),
            second_eigenvalue_modulus(w.matrix())?
        );
    }

    let graph = Graph::cycle(6)?;
    let w = random_weights(&graph, 7, 0.5)?;
    println!("random weights on a 6-cycle:\n{}", w.matrix());
    Ok(())
}
