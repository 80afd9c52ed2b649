//! Scenario documents (JSON) and run outputs (CSV time series, JSON summaries).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detector::DetectionReport;
use crate::error::{Error, Result};
use crate::graph::{metropolis_weights, random_weights, Graph, WeightMatrix};
use crate::numerics::Vector;
use crate::scenario::{AnalysisParams, DetectorSpec, Scenario};
use crate::sim::{AttackProfile, AttackSignal, Trace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub agents: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomWeightsSection {
    pub seed: u64,
    pub scale: f64,
}

/// `"metropolis"`, `{"random": {...}}`, or an explicit row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSection {
    Explicit(Vec<Vec<f64>>),
    Named(String),
    Random { random: RandomWeightsSection },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub phi: f64,
    pub seed: u64,
    #[serde(default)]
    pub zero_noise: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSection {
    pub agents: Vec<usize>,
    pub signals: Vec<AttackSignal>,
}

/// On-disk scenario. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub graph: GraphSection,
    pub weights: WeightsSection,
    pub x0: Vec<f64>,
    pub noise: NoiseSection,
    #[serde(default)]
    pub attack: AttackSection,
    #[serde(default)]
    pub detectors: Vec<DetectorSpec>,
    pub horizon: usize,
    #[serde(default)]
    pub analysis: AnalysisParams,
}

impl ScenarioFile {
    /// Builds the in-memory scenario. Structural errors (bad agent ids,
    /// unknown weight generator) fail here; constraint checks are left to
    /// [`Scenario::check`].
    pub fn into_scenario(self) -> Result<Scenario> {
        let graph = Graph::new(self.graph.agents, &self.graph.edges)?;
        let weights = match self.weights {
            WeightsSection::Explicit(rows) => WeightMatrix::from_rows(&rows)?,
            WeightsSection::Named(name) if name == "metropolis" => metropolis_weights(&graph)?,
            WeightsSection::Named(name) => {
                return Err(Error::InvalidScenario(format!(
                    "unknown weight generator {name:?}; expected \"metropolis\""
                )))
            }
            WeightsSection::Random { random } => random_weights(&graph, random.seed, random.scale)?,
        };
        let attack = AttackProfile::new(graph.n(), self.attack.agents, self.attack.signals)?;
        Ok(Scenario {
            graph,
            weights,
            x0: Vector::from_vec(self.x0),
            phi: self.noise.phi,
            seed: self.noise.seed,
            zero_noise: self.noise.zero_noise,
            attack,
            detectors: self.detectors,
            horizon: self.horizon,
            analysis: self.analysis,
        })
    }

    /// Document describing `scenario`, with the weights written explicitly.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        ScenarioFile {
            graph: GraphSection {
                agents: scenario.n(),
                edges: scenario.graph.edges(),
            },
            weights: WeightsSection::Explicit(scenario.weights.to_rows()),
            x0: scenario.x0.iter().copied().collect(),
            noise: NoiseSection {
                phi: scenario.phi,
                seed: scenario.seed,
                zero_noise: scenario.zero_noise,
            },
            attack: AttackSection {
                agents: scenario.attack.agents().to_vec(),
                signals: scenario.attack.signals().to_vec(),
            },
            detectors: scenario.detectors.clone(),
            horizon: scenario.horizon,
            analysis: scenario.analysis,
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    serde_json::from_str::<ScenarioFile>(text)?.into_scenario()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    parse_scenario(&fs::read_to_string(path)?)
}

pub fn scenario_to_json(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from_scenario(scenario))
        .expect("scenario documents always serialize")
}

/// SHA-256 of the compact canonical document, hex encoded.
pub fn scenario_hash(scenario: &Scenario) -> String {
    let bytes = serde_json::to_vec(&ScenarioFile::from_scenario(scenario))
        .expect("scenario documents always serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// Scientific notation with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Long-format trace: one row per `(step, agent)` with `x`, `w`, the
/// injected input `u`, and for each detector a column `y_agent<d>` holding
/// the value that detector saw for this agent (empty when not observed).
pub fn write_trace_csv<W: Write>(trace: &Trace, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["step".to_string(), "agent".into(), "x".into(), "w".into(), "u".into()];
    header.extend(trace.measurements.iter().map(|m| format!("y_agent{}", m.agent)));
    wtr.write_record(&header)?;
    let n = trace.x.first().map_or(0, Vector::len);
    for k in 0..trace.len() {
        let injected = trace.injected(k);
        for i in 0..n {
            let mut row = vec![
                k.to_string(),
                (i + 1).to_string(),
                fmt_float(trace.x[k][i]),
                fmt_float(trace.w[k][i]),
                fmt_float(injected[i]),
            ];
            for series in &trace.measurements {
                row.push(
                    series
                        .observed
                        .iter()
                        .position(|&a| a == i + 1)
                        .map(|r| fmt_float(series.y[k][r]))
                        .unwrap_or_default(),
                );
            }
            wtr.write_record(&row)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_detection_csv<W: Write>(report: &DetectionReport, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["step", "residual_norm", "threshold", "alarm"])?;
    for s in &report.steps {
        wtr.write_record([
            s.step.to_string(),
            fmt_float(s.residual_norm),
            fmt_float(s.threshold),
            s.alarm.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub agent: usize,
    pub first_alarm: Option<usize>,
    pub alpha_bound: f64,
    pub evaluable_steps: usize,
    pub degenerate: bool,
}

impl From<&DetectionReport> for DetectionSummary {
    fn from(r: &DetectionReport) -> Self {
        DetectionSummary {
            agent: r.agent,
            first_alarm: r.first_alarm,
            alpha_bound: r.alpha_bound,
            evaluable_steps: r.evaluable_steps,
            degenerate: r.degenerate,
        }
    }
}
