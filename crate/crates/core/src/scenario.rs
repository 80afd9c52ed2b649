//! Complete description of one experiment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{validate_weight_matrix, Graph, ValidationReport, WeightMatrix};
use crate::numerics::Vector;
use crate::sim::AttackProfile;

/// A benign agent running a residual detector with threshold `c * rho^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    pub agent: usize,
    pub c: f64,
    pub rho: f64,
}

/// Parameters of the static analysis: interval confidence and the largest
/// attacker-set size considered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisParams {
    pub beta: f64,
    pub p_max: usize,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            beta: 0.001,
            p_max: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: Graph,
    pub weights: WeightMatrix,
    pub x0: Vector,
    pub phi: f64,
    pub seed: u64,
    /// Run with `v(k) = 0`, so the only stochastic input disappears.
    pub zero_noise: bool,
    pub attack: AttackProfile,
    pub detectors: Vec<DetectorSpec>,
    pub horizon: usize,
    pub analysis: AnalysisParams,
}

/// Result of [`Scenario::check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioCheck {
    pub connected: bool,
    pub weights: ValidationReport,
    /// Constraint violations; the scenario is usable only when empty.
    pub problems: Vec<String>,
    /// Conditions worth reporting that do not block a run.
    pub warnings: Vec<String>,
}

impl ScenarioCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Every detector needs `y(k..=k+n)`, so detection is possible only
    /// for `k <= horizon - n`.
    pub fn evaluable_steps(&self) -> usize {
        (self.horizon + 1).saturating_sub(self.n())
    }

    /// Same scenario with every attacker silenced.
    pub fn without_attack(&self) -> Scenario {
        Scenario {
            attack: AttackProfile::none(),
            ..self.clone()
        }
    }

    pub fn check(&self) -> Result<ScenarioCheck> {
        self.check_inner(true)
    }

    /// Like [`Scenario::check`] but returns the first problem as an error.
    pub fn validate(&self) -> Result<()> {
        first_problem(self.check()?)
    }

    /// Validation used before simulating: a horizon shorter than the
    /// detector window is allowed there, it only leaves nothing to detect.
    pub(crate) fn validate_for_run(&self) -> Result<()> {
        first_problem(self.check_inner(false)?)
    }

    fn check_inner(&self, require_window: bool) -> Result<ScenarioCheck> {
        let n = self.n();
        let mut problems = Vec::new();
        let mut warnings = Vec::new();

        if !self.graph.is_connected() {
            problems.push("graph is not connected".to_string());
        }
        if self.weights.n() != n {
            return Err(Error::dims("weight matrix vs graph", n, self.weights.n()));
        }
        let weights = validate_weight_matrix(&self.weights, &self.graph)?;
        if !weights.symmetric {
            problems.push(format!(
                "weight matrix is not symmetric (max asymmetry {:.3e})",
                weights.max_asymmetry
            ));
        }
        if !weights.row_stochastic {
            problems.push(format!(
                "weight rows do not sum to one (max error {:.3e})",
                weights.max_row_sum_error
            ));
        }
        if !weights.sparsity_matches_graph {
            problems.push(format!(
                "weights on non-edges: {:?}",
                weights.sparsity_violations
            ));
        }
        if !weights.spectrum_ok {
            problems.push(
                "spectrum violates lambda_1 = 1 and |lambda_i| < 1 for i >= 2".to_string(),
            );
        }

        if self.x0.len() != n {
            problems.push(format!("x0 has {} entries, expected {n}", self.x0.len()));
        } else if self.x0.iter().any(|v| !v.is_finite()) {
            problems.push("x0 has non-finite entries".to_string());
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            problems.push(format!("phi = {} must lie in (0, 1)", self.phi));
        }

        let non_summable = self.attack.non_summable_agents();
        if !non_summable.is_empty() {
            warnings.push(format!(
                "attack signals of agents {non_summable:?} are not summable"
            ));
        }

        for d in &self.detectors {
            let tag = format!("detector at agent {}", d.agent);
            if d.agent == 0 || d.agent > n {
                problems.push(format!("{tag}: agent out of range 1..={n}"));
                continue;
            }
            if self.attack.agents().contains(&d.agent) {
                problems.push(format!("{tag}: detector agent is an attacker"));
            }
            if !d.c.is_finite() || d.c <= 0.0 {
                problems.push(format!("{tag}: c = {} must be positive", d.c));
            }
            if d.rho.is_nan() || d.rho <= self.phi {
                problems.push(format!(
                    "{tag}: phi < rho violated (phi = {}, rho = {})",
                    self.phi, d.rho
                ));
            }
            if d.rho.is_nan() || d.rho >= 1.0 {
                problems.push(format!("{tag}: rho < 1 violated (rho = {})", d.rho));
            }
        }
        if require_window && !self.detectors.is_empty() && self.horizon < n + 1 {
            problems.push(format!(
                "horizon {} is shorter than the detector window n + 1 = {}",
                self.horizon,
                n + 1
            ));
        }

        let AnalysisParams { beta, p_max } = self.analysis;
        if !(beta > 0.0 && beta < 1.0) {
            problems.push(format!("beta = {beta} must lie in (0, 1)"));
        }
        if p_max == 0 || p_max > n {
            problems.push(format!("p_max = {p_max} must lie in 1..={n}"));
        }

        Ok(ScenarioCheck {
            connected: self.graph.is_connected(),
            weights,
            problems,
            warnings,
        })
    }
}

fn first_problem(check: ScenarioCheck) -> Result<()> {
    match check.problems.into_iter().next() {
        None => Ok(()),
        Some(p) => Err(Error::InvalidScenario(p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring4;

    #[test]
    fn reference_scenario_passes() {
        let s = ring4::scenario();
        let check = s.check().unwrap();
        assert!(check.passed(), "{:?}", check.problems);
        assert_eq!(s.evaluable_steps(), 197);
    }

    #[test]
    fn rho_below_phi_is_named() {
        let mut s = ring4::scenario();
        s.detectors[0].rho = 0.1;
        let check = s.check().unwrap();
        assert!(check.problems.iter().any(|p| p.contains("phi < rho")));
        assert!(matches!(s.validate(), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn short_horizon_blocks_detection_only() {
        let mut s = ring4::scenario();
        s.horizon = 2;
        assert!(s.validate().is_err());
        assert!(s.validate_for_run().is_ok());
        assert_eq!(s.evaluable_steps(), 0);
    }

    #[test]
    fn attacker_cannot_detect() {
        let mut s = ring4::scenario();
        s.detectors[0].agent = 3;
        assert!(s.validate().is_err());
    }
}
