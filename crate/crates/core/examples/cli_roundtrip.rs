//! Drives the command-line front end in-process on the shipped scenario.

use anyhow::Result;
use consensus_guard::cli::execute;

fn main() -> Result<()> {
    let scenario = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ring4.json");
    let out = std::env::temp_dir().join("consensus-guard-demo");
    let out = out.to_str().expect("utf-8 temp path");

    for args in [
        vec!["consensus-guard", "validate", scenario],
        vec!["consensus-guard", "simulate", scenario, "--out", out],
        vec!["consensus-guard", "montecarlo", scenario, "--trials", "200", "--horizon", "60"],
    ] {
        let code = execute(args, &mut std::io::stdout(), &mut std::io::stderr());
        println!("exit code {code}");
    }
    Ok(())
}
