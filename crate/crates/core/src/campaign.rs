//! Monte-Carlo estimate of the false-alarm rate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::Detector;
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::sim::Simulator;

/// Empirical alarm frequency of one detector over attack-free trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub agent: usize,
    pub trials: usize,
    /// Trials with at least one alarm.
    pub alarms: usize,
    pub empirical_rate: f64,
    pub alpha_bound: f64,
    pub seed: u64,
    pub horizon: usize,
}

impl CampaignResult {
    /// `alpha_bound + 3 sqrt(alpha_bound / trials)`: the bound plus three
    /// binomial standard deviations.
    pub fn tolerance(&self) -> f64 {
        self.alpha_bound + 3.0 * (self.alpha_bound / self.trials as f64).sqrt()
    }

    pub fn within_bound(&self) -> bool {
        self.empirical_rate <= self.tolerance()
    }
}

/// Runs `trials` attack-free simulations, trial `t` on noise substream
/// `(seed, t)`, and counts for each detector the trials that alarm at least
/// once. `threads = None` uses every available core. Results do not depend
/// on the thread count.
pub fn run_campaign(scenario: &Scenario, trials: usize, threads: Option<usize>) -> Result<Vec<CampaignResult>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("campaign needs at least one trial".into()));
    }
    if scenario.detectors.is_empty() {
        return Err(Error::InvalidParameter("scenario has no detectors".into()));
    }
    let quiet = scenario.without_attack();
    quiet.validate()?;
    let simulator = Simulator::new(&quiet)?;
    let detectors: Vec<Detector> = quiet
        .detectors
        .iter()
        .map(|d| Detector::for_scenario(&quiet, d.agent))
        .collect::<Result<_>>()?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let width = detectors.len();
    let counts = pool.install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let trace = simulator.run(t)?;
                detectors
                    .iter()
                    .zip(&trace.measurements)
                    .map(|(det, series)| det.any_alarm(series).map(usize::from))
                    .collect::<Result<Vec<usize>>>()
            })
            .try_reduce(
                || vec![0; width],
                |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
            )
    })?;

    Ok(detectors
        .iter()
        .zip(counts)
        .map(|(det, alarms)| CampaignResult {
            agent: det.agent,
            trials,
            alarms,
            empirical_rate: alarms as f64 / trials as f64,
            alpha_bound: det.alpha_bound(),
            seed: quiet.seed,
            horizon: quiet.horizon,
        })
        .collect())
}
