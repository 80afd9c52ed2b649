//! Privacy-preserving average consensus with distributed attack detection.
//!
//! Agents on an undirected graph mix their states through a doubly
//! stochastic weight matrix. Each agent masks its state with a decaying,
//! telescoping noise sequence so that the network average is preserved
//! exactly. A detector agent that sees only its closed neighborhood runs a
//! projected residual test over a sliding window and raises an alarm when
//! the residual outgrows a geometrically decaying threshold.
//!
//! Modules:
//! - [`graph`]: graphs, weight matrices, assumption checks.
//! - [`numerics`]: SVD rank, pseudo-inverse, symmetric eigenvalues, Gaussian tails.
//! - [`sim`]: noise processes, attack signals, the simulator.
//! - [`detector`]: stacked matrices, projector, residual test, input reconstruction.
//! - [`analysis`]: privacy, detectability, false-alarm and convergence bounds,
//!   error intervals on the final consensus value.
//! - [`campaign`]: Monte-Carlo false-alarm rates.
//! - [`io`], [`scenario`], [`cli`]: scenario files and the command line.
//!
//! ```
//! use consensus_guard::{ring4, sim, detector::evaluate_trace};
//!
//! let scenario = ring4::scenario();
//! let trace = sim::run(&scenario).unwrap();
//! let reports = evaluate_trace(&scenario, &trace).unwrap();
//! assert!(reports[0].alpha_bound <= 0.01);
//! ```

pub mod analysis;
pub mod campaign;
pub mod cli;
pub mod detector;
pub mod error;
pub mod graph;
pub mod io;
pub mod numerics;
pub mod ring4;
pub mod rng;
pub mod scenario;
pub mod sim;

pub use analysis::{
    analyze, detectability_check, error_interval, privacy_check, union_error_interval, AnalysisReport,
    ErrorInterval, UnionInterval,
};
pub use campaign::{run_campaign, CampaignResult};
pub use detector::{Detector, DetectionReport, StackedSystem};
pub use error::{Error, ErrorClass, Result};
pub use graph::{build_graph, metropolis_weights, validate_weight_matrix, Graph, WeightMatrix};
pub use numerics::{Matrix, Vector};
pub use scenario::{AnalysisParams, DetectorSpec, Scenario};
pub use sim::{AttackProfile, AttackSignal, NoiseProcess, Simulator, Trace};
