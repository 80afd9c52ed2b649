//! Static guarantees of the protocol: initial-state privacy, detectability,
//! convergence rate and confidence intervals for the consensus error.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::detector::{check_rates, false_alarm_bound, stacked_matrices, StackedSystem};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{self, Matrix, DEFAULT_REL_TOL};
use crate::scenario::Scenario;
use crate::sim::{input_matrix, measurement_matrix, Trace};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivacyVerdict {
    pub agent: usize,
    pub private: bool,
    /// Closed neighborhood of `agent`.
    pub closed_neighborhood: Vec<usize>,
    /// Union of the attackers and their neighbors.
    pub attacker_view: Vec<usize>,
    /// Members of the closed neighborhood outside the attackers' view. The
    /// agent is private exactly when this is nonempty.
    pub hidden: Vec<usize>,
}

/// The initial state of `agent` stays private from `attackers` iff its
/// closed neighborhood is not covered by the attackers' closed neighborhoods.
pub fn privacy_check(graph: &Graph, attackers: &[usize], agent: usize) -> Result<PrivacyVerdict> {
    graph.check_agent(agent)?;
    if attackers.contains(&agent) {
        return Err(Error::InvalidParameter(format!(
            "agent {agent} is in the attacker set"
        )));
    }
    let mut view = BTreeSet::new();
    for &a in attackers {
        view.extend(graph.closed_neighborhood(a)?);
    }
    let closed = graph.closed_neighborhood(agent)?;
    let hidden: Vec<usize> = closed.difference(&view).copied().collect();
    Ok(PrivacyVerdict {
        agent,
        private: !hidden.is_empty(),
        closed_neighborhood: closed.into_iter().collect(),
        attacker_view: view.into_iter().collect(),
        hidden,
    })
}

/// Verdicts for every agent outside `attackers`.
pub fn privacy_report(graph: &Graph, attackers: &[usize]) -> Result<Vec<PrivacyVerdict>> {
    (1..=graph.n())
        .filter(|a| !attackers.contains(a))
        .map(|a| privacy_check(graph, attackers, a))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectabilityVerdict {
    pub detectable: bool,
    pub rank_oj: usize,
    pub rank_j: usize,
    pub observability_rank: usize,
    pub n: usize,
}

impl DetectabilityVerdict {
    pub fn rank_gap(&self) -> usize {
        self.rank_oj - self.rank_j
    }

    /// Whether `(A, C)` is observable over `n` steps.
    pub fn observable(&self) -> bool {
        self.observability_rank == self.n
    }
}

/// No attack input can hide from the residual iff
/// `rank[O J] - rank[J] = n` on depth `n - 1` stacks.
pub fn detectability_check(a: &Matrix, c: &Matrix, b: &Matrix) -> Result<DetectabilityVerdict> {
    let n = a.nrows();
    let stacks = stacked_matrices(a, c, b, n.saturating_sub(1))?;
    let o = &stacks.observability;
    let j = &stacks.input;
    let mut oj = Matrix::zeros(o.nrows(), o.ncols() + j.ncols());
    oj.columns_mut(0, o.ncols()).copy_from(o);
    oj.columns_mut(o.ncols(), j.ncols()).copy_from(j);
    let rank_oj = numerics::rank(&oj, DEFAULT_REL_TOL)?.rank;
    let rank_j = numerics::rank(j, DEFAULT_REL_TOL)?.rank;
    let observability_rank = numerics::rank(o, DEFAULT_REL_TOL)?.rank;
    Ok(DetectabilityVerdict {
        detectable: rank_oj - rank_j == n,
        rank_oj,
        rank_j,
        observability_rank,
        n,
    })
}

/// [`detectability_check`] for 1-indexed attackers.
pub fn detectability_for(a: &Matrix, c: &Matrix, attackers: &[usize]) -> Result<DetectabilityVerdict> {
    let b = input_matrix(a.nrows(), attackers)?;
    detectability_check(a, c, &b)
}

/// `A - 11ᵀ/n`; its powers are `A^k - 11ᵀ/n`.
pub fn disagreement_operator(a: &Matrix) -> Matrix {
    let n = a.nrows();
    a - Matrix::from_element(n, n, 1.0 / n as f64)
}

/// `max(|lambda_2|, |lambda_n|)`, the second-largest eigenvalue modulus.
pub fn second_eigenvalue_modulus(a: &Matrix) -> Result<f64> {
    let ev = numerics::eigenvalues_symmetric(a)?;
    Ok(match ev.len() {
        0 | 1 => 0.0,
        len => ev[1].abs().max(ev[len - 1].abs()),
    })
}

/// `max(rho, |lambda_2|, |lambda_n|)`.
pub fn convergence_rate_bound(a: &Matrix, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho = {rho} must lie in (0, 1)")));
    }
    Ok(rho.max(second_eigenvalue_modulus(a)?))
}

/// Outcome of [`empirical_convergence_rate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateEstimate {
    /// The disagreement was negligible from the first step.
    ConvergedImmediately,
    Rate {
        rate: f64,
        first_step: usize,
        last_step: usize,
    },
}

impl RateEstimate {
    pub fn rate(&self) -> Option<f64> {
        match self {
            RateEstimate::ConvergedImmediately => None,
            RateEstimate::Rate { rate, .. } => Some(*rate),
        }
    }
}

/// Disagreement below this multiple of `‖x(0)‖` is treated as round-off.
pub const DISAGREEMENT_FLOOR: f64 = 1e-14;
pub const MIN_TRACE_LEN: usize = 20;

/// Least-squares slope of `log ‖x(k) - x̄(k)‖` against `k`, exponentiated.
///
/// Only the steps before the disagreement first drops under
/// `DISAGREEMENT_FLOOR * ‖x(0)‖` are usable; the fit covers the final
/// `tail_fraction` of them.
pub fn empirical_convergence_rate(trace: &Trace, tail_fraction: f64) -> Result<RateEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail fraction {tail_fraction} must lie in (0, 1]"
        )));
    }
    if trace.len() < MIN_TRACE_LEN {
        return Err(Error::TooFewPoints {
            needed: MIN_TRACE_LEN,
            found: trace.len(),
        });
    }
    let floor = DISAGREEMENT_FLOOR * trace.x[0].norm();
    let disagreement: Vec<f64> = trace
        .x
        .iter()
        .map(|x| x.add_scalar(-x.mean()).norm())
        .collect();
    if disagreement[0] <= floor {
        return Ok(RateEstimate::ConvergedImmediately);
    }
    let usable = disagreement
        .iter()
        .position(|&d| d <= floor || d == 0.0)
        .unwrap_or(disagreement.len());
    let count = ((usable as f64) * tail_fraction).ceil() as usize;
    if count < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            found: count,
        });
    }
    let first = usable - count;
    let points: Vec<(f64, f64)> = (first..usable)
        .map(|k| (k as f64, disagreement[k].ln()))
        .collect();
    let mean_k = points.iter().map(|p| p.0).sum::<f64>() / count as f64;
    let mean_l = points.iter().map(|p| p.1).sum::<f64>() / count as f64;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(k, l)| {
        (sxy + (k - mean_k) * (l - mean_l), sxx + (k - mean_k).powi(2))
    });
    Ok(RateEstimate::Rate {
        rate: (sxy / sxx).exp(),
        first_step: first,
        last_step: usable - 1,
    })
}

/// Confidence interval `[-mu - z, mu + z]` for the consensus error under
/// one hypothesised attacker set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorInterval {
    pub attackers: Vec<usize>,
    /// Bound on the residual-sum term.
    pub mu: f64,
    /// Two-sided normal quantile scaled by the noise-term deviation.
    pub z: f64,
    pub variance: f64,
    pub beta: f64,
    pub lower: f64,
    pub upper: f64,
}

impl ErrorInterval {
    pub fn half_width(&self) -> f64 {
        self.upper
    }

    pub fn contains(&self, e: f64) -> bool {
        self.lower <= e && e <= self.upper
    }
}

/// Interval for the attacker set the system was built for.
///
/// `mu = c / (n (1 - rho)) ‖q‖` and
/// `Var = sum_{i=1..n} phi^(2(i-1)) / n^2 ‖q P_i‖^2`, where `q` is the
/// minimum-norm row with `q P J = [1ᵀ | 0]`.
pub fn error_interval(sys: &StackedSystem, c: f64, rho: f64, phi: f64, beta: f64) -> Result<ErrorInterval> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c} must be non-negative")));
    }
    check_rates(1.0, rho, phi)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must lie in (0, 1)")));
    }
    let q_row = &sys.reconstructor()?.q_row;
    let n = sys.n() as f64;
    let mu = c / (n * (1.0 - rho)) * q_row.norm();
    let variance: f64 = (1..=sys.n())
        .map(|i| phi.powi(2 * (i as i32 - 1)) / (n * n) * (q_row * &sys.partitions()[i]).norm_squared())
        .sum();
    let z = numerics::gaussian_quantile(1.0 - beta / 2.0)? * variance.sqrt();
    Ok(ErrorInterval {
        attackers: sys.attackers().to_vec(),
        mu,
        z,
        variance,
        beta,
        lower: -mu - z,
        upper: mu + z,
    })
}

/// Union of the per-set intervals over every detectable candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionInterval {
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub beta: f64,
    /// Attacker set that realises the half-width.
    pub widest: Vec<usize>,
    /// One entry per detectable candidate, in candidate order.
    pub contributions: Vec<ErrorInterval>,
    /// Candidates dropped because they fail the rank condition.
    pub undetectable: Vec<Vec<usize>>,
}

impl UnionInterval {
    pub fn contains(&self, e: f64) -> bool {
        self.lower <= e && e <= self.upper
    }
}

#[allow(clippy::too_many_arguments)]
pub fn union_error_interval(
    a: &Matrix,
    c_meas: &Matrix,
    candidates: &[Vec<usize>],
    c: f64,
    rho: f64,
    phi: f64,
    beta: f64,
) -> Result<UnionInterval> {
    let evaluated: Vec<Option<ErrorInterval>> = candidates
        .par_iter()
        .map(|set| {
            if !detectability_for(a, c_meas, set)?.detectable {
                return Ok(None);
            }
            let sys = StackedSystem::new(a, c_meas, set)?;
            error_interval(&sys, c, rho, phi, beta).map(Some)
        })
        .collect::<Result<_>>()?;

    let mut contributions = Vec::new();
    let mut undetectable = Vec::new();
    for (set, interval) in candidates.iter().zip(evaluated) {
        match interval {
            Some(i) => contributions.push(i),
            None => undetectable.push(set.clone()),
        }
    }
    let widest = contributions
        .iter()
        .max_by(|x, y| x.half_width().total_cmp(&y.half_width()))
        .ok_or(Error::NoDetectableCandidates)?;
    let half_width = widest.half_width();
    Ok(UnionInterval {
        half_width,
        lower: -half_width,
        upper: half_width,
        beta,
        widest: widest.attackers.clone(),
        contributions,
        undetectable,
    })
}

/// Nonempty attacker sets of size at most `p_max`, drawn from agents not in
/// `exclude`, that pass [`detectability_check`]. Ordered by size, then
/// lexicographically.
pub fn enumerate_detectable_attacker_sets(
    a: &Matrix,
    c_meas: &Matrix,
    p_max: usize,
    exclude: &[usize],
) -> Result<Vec<Vec<usize>>> {
    Ok(classify_attacker_sets(a, c_meas, p_max, exclude)?
        .into_iter()
        .filter(|(_, v)| v.detectable)
        .map(|(set, _)| set)
        .collect())
}

/// Every candidate set with its verdict, in enumeration order.
pub fn classify_attacker_sets(
    a: &Matrix,
    c_meas: &Matrix,
    p_max: usize,
    exclude: &[usize],
) -> Result<Vec<(Vec<usize>, DetectabilityVerdict)>> {
    let n = a.nrows();
    if p_max == 0 || p_max > n {
        return Err(Error::InvalidParameter(format!("p_max = {p_max} must lie in 1..={n}")));
    }
    let pool: Vec<usize> = (1..=n).filter(|a| !exclude.contains(a)).collect();
    let candidates: Vec<Vec<usize>> = (1..=p_max.min(pool.len()))
        .flat_map(|size| pool.iter().copied().combinations(size))
        .collect();
    candidates
        .into_par_iter()
        .map(|set| detectability_for(a, c_meas, &set).map(|v| (set, v)))
        .collect()
}

/// Static analysis for one detector agent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorAnalysis {
    pub agent: usize,
    pub c: f64,
    pub rho: f64,
    pub alpha_bound: f64,
    pub convergence_bound: f64,
    /// Verdict for the scenario's actual attacker set, if it has one.
    pub actual_attackers: Option<DetectabilityVerdict>,
    pub candidates: Vec<CandidateVerdict>,
    pub union: Option<UnionInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateVerdict {
    pub attackers: Vec<usize>,
    #[serde(flatten)]
    pub verdict: DetectabilityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub scenario_hash: String,
    pub attackers: Vec<usize>,
    pub beta: f64,
    pub p_max: usize,
    pub eigenvalues: Vec<f64>,
    pub second_eigenvalue_modulus: f64,
    pub privacy: Vec<PrivacyVerdict>,
    pub detectors: Vec<DetectorAnalysis>,
}

/// Full static analysis of a scenario. Candidate attacker sets for each
/// detector exclude the detector agent itself.
pub fn analyze(scenario: &Scenario) -> Result<AnalysisReport> {
    scenario.validate()?;
    let a = scenario.weights.matrix();
    let attackers = scenario.attack.agents().to_vec();
    let beta = scenario.analysis.beta;
    let p_max = scenario.analysis.p_max;

    let detectors = scenario
        .detectors
        .iter()
        .map(|d| {
            let c_meas = measurement_matrix(&scenario.graph, d.agent)?;
            let base = StackedSystem::new(a, &c_meas, &[])?;
            let alpha_bound = false_alarm_bound(&base, d.c, d.rho, scenario.phi)?;
            let actual_attackers = if attackers.is_empty() {
                None
            } else {
                Some(detectability_for(a, &c_meas, &attackers)?)
            };
            let candidates: Vec<CandidateVerdict> = classify_attacker_sets(a, &c_meas, p_max, &[d.agent])?
                .into_iter()
                .map(|(attackers, verdict)| CandidateVerdict { attackers, verdict })
                .collect();
            let detectable: Vec<Vec<usize>> = candidates
                .iter()
                .filter(|cv| cv.verdict.detectable)
                .map(|cv| cv.attackers.clone())
                .collect();
            let union = if detectable.is_empty() {
                None
            } else {
                Some(union_error_interval(a, &c_meas, &detectable, d.c, d.rho, scenario.phi, beta)?)
            };
            Ok(DetectorAnalysis {
                agent: d.agent,
                c: d.c,
                rho: d.rho,
                alpha_bound,
                convergence_bound: convergence_rate_bound(a, d.rho)?,
                actual_attackers,
                candidates,
                union,
            })
        })
        .collect::<Result<_>>()?;

    Ok(AnalysisReport {
        scenario_hash: crate::io::scenario_hash(scenario),
        attackers: attackers.clone(),
        beta,
        p_max,
        eigenvalues: numerics::eigenvalues_symmetric(a)?,
        second_eigenvalue_modulus: second_eigenvalue_modulus(a)?,
        privacy: privacy_report(&scenario.graph, &attackers)?,
        detectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::metropolis_weights;
    use crate::ring4;

    fn ring_c() -> Matrix {
        measurement_matrix(&ring4::graph(), 1).unwrap()
    }

    #[test]
    fn privacy_examples() {
        let ring = ring4::graph();
        let v = privacy_check(&ring, &[3], 1).unwrap();
        assert!(v.private);
        assert_eq!(v.closed_neighborhood, vec![1, 2, 4]);
        assert_eq!(v.attacker_view, vec![2, 3, 4]);
        assert_eq!(v.hidden, vec![1]);

        let k4 = Graph::complete(4).unwrap();
        assert!(!privacy_check(&k4, &[3], 1).unwrap().private);

        let path = Graph::path(5).unwrap();
        assert!(privacy_check(&path, &[3], 1).unwrap().private);

        assert!(privacy_check(&ring, &[3], 3).is_err());
    }

    #[test]
    fn privacy_is_monotone_in_attackers() {
        let g = Graph::path(6).unwrap();
        for j in 1..=6 {
            for small in (1..=6).filter(|&a| a != j).combinations(2) {
                let before = privacy_check(&g, &small, j).unwrap().private;
                for extra in (1..=6).filter(|a| *a != j && !small.contains(a)) {
                    let mut big = small.clone();
                    big.push(extra);
                    let after = privacy_check(&g, &big, j).unwrap().private;
                    assert!(before || !after, "j={j} {small:?} -> {big:?}");
                }
            }
        }
    }

    #[test]
    fn ring_detectability() {
        let v = detectability_for(ring4::weights().matrix(), &ring_c(), &[3]).unwrap();
        assert!(v.detectable);
        assert_eq!(v.rank_gap(), 4);
        assert!(v.observable());
    }

    #[test]
    fn no_measurements_not_detectable() {
        let v = detectability_for(ring4::weights().matrix(), &Matrix::zeros(3, 4), &[3]).unwrap();
        assert!(!v.detectable);
        assert_eq!(v.rank_oj, v.rank_j);
    }

    #[test]
    fn all_agents_attacking_not_detectable() {
        let v = detectability_for(ring4::weights().matrix(), &ring_c(), &[1, 2, 3, 4]).unwrap();
        assert!(!v.detectable);
        assert!(v.rank_gap() < 4);
    }

    #[test]
    fn disagreement_powers() {
        let a = ring4::weights().into_inner();
        let d = disagreement_operator(&a);
        let avg = Matrix::from_element(4, 4, 0.25);
        let mut dk = d.clone();
        let mut ak = a.clone();
        for _ in 1..=20 {
            assert!((&dk - (&ak - &avg)).amax() <= 1e-10);
            dk = &dk * &d;
            ak = &ak * &a;
        }
        let radius = numerics::eigenvalues_symmetric(&d)
            .unwrap()
            .iter()
            .map(|l| l.abs())
            .fold(0.0, f64::max);
        assert!((radius - 0.6057).abs() < 1e-4);
    }

    #[test]
    fn convergence_bound_examples() {
        let a = ring4::weights().into_inner();
        assert_eq!(convergence_rate_bound(&a, 0.7).unwrap(), 0.7);
        assert!((convergence_rate_bound(&a, 0.1).unwrap() - 0.605_675_59).abs() < 1e-6);
        let uniform = Matrix::from_element(4, 4, 0.25);
        assert!((convergence_rate_bound(&uniform, 0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!(convergence_rate_bound(&a, 1.0).is_err());
    }

    #[test]
    fn interval_scaling() {
        let sys = StackedSystem::new(ring4::weights().matrix(), &ring_c(), &[3]).unwrap();
        let base = error_interval(&sys, 16.2, 0.7, 0.2, 0.001).unwrap();
        let no_c = error_interval(&sys, 0.0, 0.7, 0.2, 0.001).unwrap();
        assert_eq!(no_c.mu, 0.0);
        assert!((no_c.half_width() - base.z).abs() < 1e-12);
        let wider = error_interval(&sys, 20.0, 0.7, 0.2, 0.001).unwrap();
        assert!(wider.half_width() > base.half_width());
        let looser = error_interval(&sys, 16.2, 0.7, 0.2, 0.01).unwrap();
        assert!(looser.half_width() < base.half_width());
        let slow = error_interval(&sys, 16.2, 0.85, 0.2, 0.001).unwrap();
        assert!((slow.mu / base.mu - 0.3 / 0.15).abs() < 1e-12);
        assert!((base.lower + base.upper).abs() == 0.0);
    }

    #[test]
    fn interval_requires_detectable_set() {
        let sys = StackedSystem::new(ring4::weights().matrix(), &ring_c(), &[2, 4]).unwrap();
        assert!(matches!(
            error_interval(&sys, 16.2, 0.7, 0.2, 0.001),
            Err(Error::Undetectable(_))
        ));
    }

    #[test]
    fn union_examples() {
        let a = ring4::weights().into_inner();
        let c = ring_c();
        let single = union_error_interval(&a, &c, &[vec![3]], 16.2, 0.7, 0.2, 0.001).unwrap();
        let sys = StackedSystem::new(&a, &c, &[3]).unwrap();
        let direct = error_interval(&sys, 16.2, 0.7, 0.2, 0.001).unwrap();
        assert_eq!(single.half_width, direct.half_width());

        let pair = union_error_interval(&a, &c, &[vec![2], vec![3]], 16.2, 0.7, 0.2, 0.001).unwrap();
        assert_eq!(pair.half_width, direct.half_width());
        assert_eq!(pair.widest, vec![3]);

        let none = union_error_interval(&a, &c, &[vec![2, 4]], 16.2, 0.7, 0.2, 0.001);
        assert!(matches!(none, Err(Error::NoDetectableCandidates)));
    }

    #[test]
    fn enumeration_order_and_filters() {
        let a = ring4::weights().into_inner();
        let c = ring_c();
        let singles = enumerate_detectable_attacker_sets(&a, &c, 1, &[1]).unwrap();
        assert!(singles.contains(&vec![3]));
        let all = enumerate_detectable_attacker_sets(&a, &c, 3, &[1]).unwrap();
        for set in &all {
            assert_eq!(detectability_for(&a, &c, set).unwrap().rank_gap(), 4);
        }
        assert!(all.windows(2).all(|w| (w[0].len(), &w[0]) < (w[1].len(), &w[1])));
        assert!(!all.contains(&vec![2, 4]));
        assert!(enumerate_detectable_attacker_sets(&a, &Matrix::zeros(3, 4), 4, &[])
            .unwrap()
            .is_empty());
        assert!(enumerate_detectable_attacker_sets(&a, &c, 0, &[]).is_err());
        assert!(enumerate_detectable_attacker_sets(&a, &c, 5, &[]).is_err());
    }

    #[test]
    fn rate_estimate_noise_free() {
        let s = crate::scenario::Scenario {
            zero_noise: true,
            ..ring4::scenario().without_attack()
        };
        let trace = crate::sim::run(&s).unwrap();
        let est = empirical_convergence_rate(&trace, 0.5).unwrap();
        let slem = second_eigenvalue_modulus(s.weights.matrix()).unwrap();
        assert!((est.rate().unwrap() - slem).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn rate_estimate_constant_trace() {
        let g = Graph::cycle(5).unwrap();
        let mut s = ring4::scenario().without_attack();
        s.weights = metropolis_weights(&g).unwrap();
        s.graph = g;
        s.x0 = crate::numerics::Vector::repeat(5, 3.5);
        s.zero_noise = true;
        s.detectors.clear();
        let trace = crate::sim::run(&s).unwrap();
        assert_eq!(
            empirical_convergence_rate(&trace, 0.5).unwrap(),
            RateEstimate::ConvergedImmediately
        );
    }

    #[test]
    fn rate_estimate_short_trace() {
        let mut s = ring4::scenario();
        s.horizon = 10;
        let trace = crate::sim::run(&s).unwrap();
        assert!(matches!(
            empirical_convergence_rate(&trace, 0.5),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn analyze_complete_graph_nobody_private() {
        let g = Graph::complete(4).unwrap();
        let mut s = ring4::scenario();
        s.weights = metropolis_weights(&g).unwrap();
        s.graph = g;
        let report = analyze(&s).unwrap();
        assert_eq!(report.privacy.len(), 3);
        assert!(report.privacy.iter().all(|v| !v.private));
    }
}
