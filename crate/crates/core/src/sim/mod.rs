//! Time-stepped simulation of noisy consensus under attack.
//!
//! Each step every agent (attackers included) perturbs its state with the
//! privacy noise before sharing, the network averages with `A`, and the
//! attackers add their inputs: `x(k+1) = A (x(k) + w(k)) + B u(k)`. Each
//! detector agent records `y(k) = C (x(k) + w(k))`.
//!
//! The state is carried as `s(k) 1 + d(k)` with `s` the network mean. Late
//! in a run the disagreement `d` is many orders of magnitude below `s`, and
//! the residual test compares against thresholds far below the resolution
//! of `s`. Keeping `d` and the per-step mean drift separately lets the
//! detector form windows relative to their first step without cancellation.

mod attack;
mod noise;

pub use attack::{attack_signal, input_matrix, AttackProfile, AttackSignal};
pub use noise::{noise_step, NoiseProcess, NoiseSample};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{Matrix, Vector};
use crate::scenario::Scenario;

/// Selection matrix of the values visible to `agent`: its own state first,
/// then its neighbors in ascending order.
pub fn measurement_matrix(graph: &Graph, agent: usize) -> Result<Matrix> {
    let neighbors = graph.neighborhood(agent)?;
    let rows: Vec<usize> = std::iter::once(agent).chain(neighbors).collect();
    let mut c = Matrix::zeros(rows.len(), graph.n());
    for (r, &a) in rows.iter().enumerate() {
        c[(r, a - 1)] = 1.0;
    }
    Ok(c)
}

/// One update `A (x + w) + B u`.
pub fn step(x: &Vector, a: &Matrix, w: &Vector, b: &Matrix, u: &Vector) -> Result<Vector> {
    let n = x.len();
    if a.shape() != (n, n) {
        return Err(Error::dims("weight matrix", format!("{n}x{n}"), format!("{:?}", a.shape())));
    }
    if w.len() != n {
        return Err(Error::dims("noise vector", n, w.len()));
    }
    if b.nrows() != n || b.ncols() != u.len() {
        return Err(Error::dims(
            "input matrix",
            format!("{n}x{}", u.len()),
            format!("{}x{}", b.nrows(), b.ncols()),
        ));
    }
    Ok(a * (x + w) + b * u)
}

/// Measurements of one detector agent.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSeries {
    pub agent: usize,
    /// Agents observed, in the row order of `c`.
    pub observed: Vec<usize>,
    pub c: Matrix,
    pub y: Vec<Vector>,
    /// `y(k) - s(k) 1`, where `s(k)` is the network mean.
    pub deviation: Vec<Vector>,
    /// `s(k+1) - s(k)`.
    pub drift: Vec<f64>,
}

impl MeasurementSeries {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// `Y_[k, k+blocks-1] - s(k) 1`, accurate to the size of the
    /// deviations rather than the size of `s`.
    pub fn centered_window(&self, k: usize, blocks: usize) -> Result<Vector> {
        if blocks == 0 || k + blocks > self.len() {
            return Err(Error::dims(
                "measurement window",
                format!("{blocks} blocks from step {k}"),
                format!("{} recorded steps", self.len()),
            ));
        }
        let m = self.c.nrows();
        let mut out = Vector::zeros(m * blocks);
        let mut shift = 0.0;
        for i in 0..blocks {
            out.rows_mut(i * m, m)
                .copy_from(&self.deviation[k + i].add_scalar(shift));
            shift += self.drift[k + i];
        }
        Ok(out)
    }
}

/// Everything recorded by one run, steps `0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub seed: u64,
    pub stream: u64,
    pub scenario_hash: String,
    pub zero_noise: bool,
    pub attackers: Vec<usize>,
    pub x: Vec<Vector>,
    pub v: Vec<Vector>,
    pub w: Vec<Vector>,
    /// `u(k)`, one entry per attacker.
    pub u: Vec<Vector>,
    pub measurements: Vec<MeasurementSeries>,
}

/// Largest discrepancies found when replaying the recorded equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCheck {
    pub max_update_error: f64,
    pub max_measurement_error: f64,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.x.len().saturating_sub(1)
    }

    /// Dense injected input `B u(k)`.
    pub fn injected(&self, k: usize) -> Vector {
        let mut dense = Vector::zeros(self.x[k].len());
        for (&a, &value) in self.attackers.iter().zip(self.u[k].iter()) {
            dense[a - 1] = value;
        }
        dense
    }

    pub fn measurements_of(&self, agent: usize) -> Option<&MeasurementSeries> {
        self.measurements.iter().find(|m| m.agent == agent)
    }

    /// Recomputes the update and measurement equations on the recorded data.
    pub fn verify(&self, weights: &Matrix) -> TraceCheck {
        let n = weights.nrows();
        let b = input_matrix(n, &self.attackers).expect("attackers validated at run time");
        let mut max_update_error = 0.0f64;
        for k in 0..self.horizon() {
            let next = weights * (&self.x[k] + &self.w[k]) + &b * &self.u[k];
            max_update_error = max_update_error.max((next - &self.x[k + 1]).amax());
        }
        let mut max_measurement_error = 0.0f64;
        for series in &self.measurements {
            for (k, y) in series.y.iter().enumerate() {
                let expected = &series.c * (&self.x[k] + &self.w[k]);
                max_measurement_error = max_measurement_error.max((expected - y).amax());
            }
        }
        TraceCheck {
            max_update_error,
            max_measurement_error,
        }
    }
}

/// A validated scenario ready to be run on any number of noise substreams.
#[derive(Debug, Clone)]
pub struct Simulator {
    scenario: Scenario,
    b: Matrix,
    detectors: Vec<(usize, Vec<usize>, Matrix)>,
    hash: String,
}

impl Simulator {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate_for_run()?;
        let n = scenario.n();
        let b = input_matrix(n, scenario.attack.agents())?;
        let detectors = scenario
            .detectors
            .iter()
            .map(|d| {
                let c = measurement_matrix(&scenario.graph, d.agent)?;
                let observed = std::iter::once(d.agent)
                    .chain(scenario.graph.neighborhood(d.agent)?)
                    .collect();
                Ok((d.agent, observed, c))
            })
            .collect::<Result<_>>()?;
        Ok(Simulator {
            scenario: scenario.clone(),
            b,
            detectors,
            hash: crate::io::scenario_hash(scenario),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Runs with noise substream `(seed, stream)`.
    pub fn run(&self, stream: u64) -> Result<Trace> {
        let s = &self.scenario;
        let n = s.n();
        let a = s.weights.matrix();
        let mut noise = if s.zero_noise {
            NoiseProcess::silent(n, s.phi)?
        } else {
            NoiseProcess::with_stream(n, s.phi, s.seed, stream)?
        };

        let len = s.horizon + 1;
        let mut x = Vec::with_capacity(len);
        let mut v = Vec::with_capacity(len);
        let mut w = Vec::with_capacity(len);
        let mut u = Vec::with_capacity(len);
        let mut measurements: Vec<MeasurementSeries> = self
            .detectors
            .iter()
            .map(|(agent, observed, c)| MeasurementSeries {
                agent: *agent,
                observed: observed.clone(),
                c: c.clone(),
                y: Vec::with_capacity(len),
                deviation: Vec::with_capacity(len),
                drift: Vec::with_capacity(len),
            })
            .collect();

        let mut mean = s.x0.mean();
        let mut dev = s.x0.add_scalar(-mean);
        for k in 0..len {
            let sample = noise.step(k)?;
            let input = s.attack.signal(k);
            let z = &dev + &sample.w;
            let injected = &self.b * &input;
            let drift = z.mean() + injected.mean();
            for series in &mut measurements {
                let d = &series.c * &z;
                series.y.push(d.add_scalar(mean));
                series.deviation.push(d);
                series.drift.push(drift);
            }
            x.push(dev.add_scalar(mean));
            dev = (a * &z + injected).add_scalar(-drift);
            mean += drift;
            v.push(sample.v);
            w.push(sample.w);
            u.push(input);
        }

        Ok(Trace {
            seed: s.seed,
            stream,
            scenario_hash: self.hash.clone(),
            zero_noise: s.zero_noise,
            attackers: s.attack.agents().to_vec(),
            x,
            v,
            w,
            u,
            measurements,
        })
    }
}

/// Runs the scenario on noise substream 0.
pub fn run(scenario: &Scenario) -> Result<Trace> {
    Simulator::new(scenario)?.run(0)
}

/// Noise-free rerun of the scenario: its residuals contain only the
/// attack contribution.
pub fn replay_without_noise(scenario: &Scenario) -> Result<Trace> {
    let quiet = Scenario {
        zero_noise: true,
        ..scenario.clone()
    };
    run(&quiet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring4;

    #[test]
    fn measurement_matrix_examples() {
        let c = measurement_matrix(&ring4::graph(), 1).unwrap();
        let expected = Matrix::from_row_slice(
            3,
            4,
            &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        );
        assert_eq!(c, expected);

        let single = Graph::new(1, &[]).unwrap();
        assert_eq!(measurement_matrix(&single, 1).unwrap(), Matrix::identity(1, 1));

        let k4 = Graph::complete(4).unwrap();
        let c = measurement_matrix(&k4, 2).unwrap();
        let order: Vec<usize> = c.row_iter().map(|r| r.iter().position(|&v| v == 1.0).unwrap() + 1).collect();
        assert_eq!(order, vec![2, 1, 3, 4]);
        assert!(measurement_matrix(&k4, 5).is_err());
    }

    #[test]
    fn step_examples() {
        let a = ring4::weights().into_inner();
        let ones = Vector::repeat(4, 1.0);
        let zero = Vector::zeros(4);
        let b = input_matrix(4, &[3]).unwrap();
        let no_input = Vector::zeros(1);
        let fixed = step(&ones, &a, &zero, &b, &no_input).unwrap();
        assert!((fixed - &ones).amax() < 1e-15);

        let x0 = ring4::initial_state();
        let base = step(&x0, &a, &zero, &b, &no_input).unwrap();
        let mut expected = Vector::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                expected[i] += ring4::WEIGHTS[i][j] * ring4::INITIAL_STATE[j];
            }
        }
        assert!((&base - expected).amax() < 1e-12);

        let attacked = step(&x0, &a, &zero, &b, &Vector::from_element(1, -5.0)).unwrap();
        let diff = attacked - base;
        assert_eq!(diff[2], -5.0);
        assert_eq!(diff[0], 0.0);
        assert_eq!(diff[1], 0.0);
        assert_eq!(diff[3], 0.0);

        assert!(step(&x0, &a, &Vector::zeros(3), &b, &no_input).is_err());
    }

    #[test]
    fn horizon_zero_records_one_step() {
        let mut s = ring4::scenario();
        s.horizon = 0;
        let t = run(&s).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.w.len(), 1);
        assert_eq!(t.measurements[0].y.len(), 1);
    }

    #[test]
    fn noise_free_attack_free_reaches_average() {
        let s = Scenario {
            zero_noise: true,
            ..ring4::scenario().without_attack()
        };
        let t = run(&s).unwrap();
        assert!(t.x.last().unwrap().amax() < 1e-9);
    }

    #[test]
    fn attacked_run_settles_at_shifted_value() {
        let t = run(&ring4::scenario()).unwrap();
        let last = t.x.last().unwrap();
        assert!(last.iter().all(|v| (v + 7.5).abs() < 1e-3), "{last}");
    }

    #[test]
    fn centered_windows_match_raw_measurements() {
        let s = ring4::scenario();
        let trace = run(&s).unwrap();
        let series = &trace.measurements[0];
        for k in [0, 5, 40] {
            let centered = series.centered_window(k, 5).unwrap();
            let mut raw = Vector::zeros(15);
            for i in 0..5 {
                raw.rows_mut(3 * i, 3).copy_from(&series.y[k + i]);
            }
            let offset = raw[0] - centered[0];
            assert!((raw.add_scalar(-offset) - centered).amax() < 1e-12);
        }
        assert!(series.centered_window(197, 5).is_err());
    }

    #[test]
    fn reproducible_and_verifiable() {
        let s = ring4::scenario();
        let a = run(&s).unwrap();
        let b = run(&s).unwrap();
        assert_eq!(a, b);
        let check = a.verify(s.weights.matrix());
        assert!(check.max_update_error < 1e-12, "{check:?}");
        assert!(check.max_measurement_error < 1e-12, "{check:?}");
        let other = Simulator::new(&s).unwrap().run(1).unwrap();
        assert_ne!(a.x, other.x);
    }

    #[test]
    fn mass_balance() {
        let s = ring4::scenario();
        let t = run(&s).unwrap();
        let a = s.weights.matrix();
        for k in 0..20 {
            let lhs = t.x[k + 1].sum();
            let rhs = t.x[k].sum() + (a * &t.w[k]).sum() + t.u[k].sum();
            assert!((lhs - rhs).abs() < 1e-9);
        }
        // Mean shift equals the total injection divided by n.
        let shift = t.x.last().unwrap().mean() - s.x0.mean();
        assert!((shift - s.attack.total_injection().unwrap() / 4.0).abs() < 1e-9);
    }
}
