//! Projection-based residual detector for one benign agent.
//!
//! Over a window of `n + 1` steps the stacked measurements satisfy
//! `Y = O x(k) + H W + J U`. Projecting onto the orthogonal complement of
//! the range of `O` removes the unknown state, leaving the residual
//! `r(k) = P Y = P H W + P J U`. An alarm fires at step `k` when
//! `‖r(k)‖ > c rho^k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Vector, DEFAULT_REL_TOL};
use crate::scenario::Scenario;
use crate::sim::{input_matrix, measurement_matrix, MeasurementSeries, Trace};

/// Tolerance on `Q P J = [I_p | 0]` accepted from the reconstructor.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Block stacks over `depth + 1` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Stacks {
    /// Rows `C A^i`, `i = 0..=depth`.
    pub observability: Matrix,
    /// Block lower triangular, block `(i, j)` is `C A^(i-j)`.
    pub noise: Matrix,
    /// Strictly block lower triangular, block `(i, j)` is `C A^(i-j-1) B`.
    pub input: Matrix,
}

pub fn stacked_matrices(a: &Matrix, c: &Matrix, b: &Matrix, depth: usize) -> Result<Stacks> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::dims("state matrix", "square", format!("{:?}", a.shape())));
    }
    if c.ncols() != n {
        return Err(Error::dims("measurement matrix columns", n, c.ncols()));
    }
    if b.nrows() != n {
        return Err(Error::dims("input matrix rows", n, b.nrows()));
    }
    let m = c.nrows();
    let p = b.ncols();
    let blocks = depth + 1;

    // c_pow[i] = C A^i
    let mut c_pow = Vec::with_capacity(blocks);
    c_pow.push(c.clone());
    for i in 1..blocks {
        let next = &c_pow[i - 1] * a;
        c_pow.push(next);
    }
    let c_pow_b: Vec<Matrix> = c_pow.iter().map(|cp| cp * b).collect();

    let mut observability = Matrix::zeros(m * blocks, n);
    let mut noise = Matrix::zeros(m * blocks, n * blocks);
    let mut input = Matrix::zeros(m * blocks, p * blocks);
    for i in 0..blocks {
        observability.view_mut((i * m, 0), (m, n)).copy_from(&c_pow[i]);
        for j in 0..=i {
            noise
                .view_mut((i * m, j * n), (m, n))
                .copy_from(&c_pow[i - j]);
            if j < i {
                input
                    .view_mut((i * m, j * p), (m, p))
                    .copy_from(&c_pow_b[i - j - 1]);
            }
        }
    }
    Ok(Stacks {
        observability,
        noise,
        input,
    })
}

/// Orthogonal projector `I - O O⁺` onto the complement of `range(O)`.
pub fn projector(observability: &Matrix) -> Result<Matrix> {
    let rows = observability.nrows();
    let pinv = numerics::pinv(observability, DEFAULT_REL_TOL)?;
    Ok(Matrix::identity(rows, rows) - observability * pinv)
}

/// Left inverse of the projected input stack on its first block.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstructor {
    /// Minimum-Frobenius `Q` with `Q P J = [I_p | 0]`.
    pub q: Matrix,
    /// Minimum-norm row with `q P J = [1ᵀ | 0]`.
    pub q_row: Matrix,
}

/// Builds `Q = [I_p | 0] (P J)⁺` and `q = [1ᵀ | 0] (P J)⁺`.
///
/// Such a `Q` exists iff the first `p` columns of `P J` are independent of
/// each other and of the remaining columns, i.e.
/// `rank(P J) - rank(P J[:, p..]) = p`.
pub fn input_reconstructor(projector: &Matrix, input_stack: &Matrix, p: usize) -> Result<Reconstructor> {
    if p == 0 {
        return Err(Error::InvalidParameter("reconstructor needs at least one attacker".into()));
    }
    if projector.ncols() != input_stack.nrows() {
        return Err(Error::dims("projector vs input stack", projector.ncols(), input_stack.nrows()));
    }
    let cols = input_stack.ncols();
    if cols < p || !cols.is_multiple_of(p) {
        return Err(Error::dims("input stack columns", format!("multiple of {p}"), cols));
    }
    let pj = projector * input_stack;
    let rank_full = numerics::rank(&pj, DEFAULT_REL_TOL)?.rank;
    let tail = pj.columns(p, cols - p).into_owned();
    let rank_tail = if tail.ncols() == 0 {
        0
    } else {
        numerics::rank(&tail, DEFAULT_REL_TOL)?.rank
    };
    if rank_full < rank_tail + p {
        return Err(Error::Undetectable(format!(
            "rank(P J) - rank(P J without first block) = {} - {} != p = {p}; \
             no Q satisfies Q P J = [I_p | 0]",
            rank_full, rank_tail
        )));
    }

    let pj_pinv = numerics::pinv(&pj, DEFAULT_REL_TOL)?;
    let mut selector = Matrix::zeros(p, cols);
    for i in 0..p {
        selector[(i, i)] = 1.0;
    }
    let q = &selector * &pj_pinv;
    let mut ones = Matrix::zeros(1, cols);
    ones.columns_mut(0, p).fill(1.0);
    let q_row = &ones * &pj_pinv;

    let error = (&q * &pj - &selector).amax();
    if error > RECONSTRUCTION_TOL {
        return Err(Error::Undetectable(format!(
            "Q P J = [I_p | 0] holds only to {error:.3e}"
        )));
    }
    Ok(Reconstructor { q, q_row })
}

/// Stacks, projector and derived quantities for one detector agent and one
/// hypothesised attacker set.
#[derive(Debug, Clone)]
pub struct StackedSystem {
    n: usize,
    m: usize,
    attackers: Vec<usize>,
    stacks: Stacks,
    projector: Matrix,
    partitions: Vec<Matrix>,
    projected_input: Matrix,
    /// Error message kept when no reconstructor exists.
    reconstructor: std::result::Result<Reconstructor, String>,
    degenerate: bool,
}

impl StackedSystem {
    /// Builds the depth-`n` system for the 1-indexed `attackers`.
    pub fn new(a: &Matrix, c: &Matrix, attackers: &[usize]) -> Result<Self> {
        let b = input_matrix(a.nrows(), attackers)?;
        let mut sys = Self::with_input_matrix(a, c, &b)?;
        sys.attackers = attackers.to_vec();
        Ok(sys)
    }

    /// Same as [`StackedSystem::new`] for an arbitrary input matrix.
    pub fn with_input_matrix(a: &Matrix, c: &Matrix, b: &Matrix) -> Result<Self> {
        let n = a.nrows();
        let m = c.nrows();
        let stacks = stacked_matrices(a, c, b, n)?;
        let projector = projector(&stacks.observability)?;
        let degenerate = projector.amax() <= DEFAULT_REL_TOL;
        if degenerate {
            log::warn!("projector vanishes: the detector residual is identically zero");
        }
        let ph = &projector * &stacks.noise;
        let partitions = (0..=n).map(|i| ph.columns(i * n, n).into_owned()).collect();
        let projected_input = &projector * &stacks.input;
        let p = b.ncols();
        let reconstructor = if p == 0 {
            Err(String::new())
        } else {
            input_reconstructor(&projector, &stacks.input, p).map_err(|e| match e {
                Error::Undetectable(msg) => msg,
                other => other.to_string(),
            })
        };
        Ok(StackedSystem {
            n,
            m,
            attackers: Vec::new(),
            stacks,
            projector,
            partitions,
            projected_input,
            reconstructor,
            degenerate,
        })
    }

    /// Agent count; the window spans `n + 1` steps.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Rows of `C`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.stacks.input.ncols() / (self.n + 1)
    }

    pub fn attackers(&self) -> &[usize] {
        &self.attackers
    }

    pub fn window_len(&self) -> usize {
        self.m * (self.n + 1)
    }

    pub fn stacks(&self) -> &Stacks {
        &self.stacks
    }

    pub fn projector(&self) -> &Matrix {
        &self.projector
    }

    /// Column blocks `P_0, ..., P_n` of `P H`, each `m(n+1) x n`.
    pub fn partitions(&self) -> &[Matrix] {
        &self.partitions
    }

    /// `P J`.
    pub fn projected_input(&self) -> &Matrix {
        &self.projected_input
    }

    /// True when `P = 0`, so no residual can ever be nonzero.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn reconstructor(&self) -> Result<&Reconstructor> {
        match &self.reconstructor {
            Ok(r) => Ok(r),
            Err(_) if self.p() == 0 => Err(Error::InvalidParameter(
                "system has no attacker inputs to reconstruct".into(),
            )),
            Err(msg) => Err(Error::Undetectable(msg.clone())),
        }
    }
}

/// Measurements `y(k), ..., y(k + blocks - 1)` stacked into one vector.
pub fn stack_window(series: &[Vector], k: usize, blocks: usize) -> Result<Vector> {
    if k + blocks > series.len() {
        return Err(Error::dims(
            "measurement window",
            format!("steps {}..={}", k, k + blocks - 1),
            format!("{} recorded steps", series.len()),
        ));
    }
    let m = series[k].len();
    let mut out = Vector::zeros(m * blocks);
    for (i, y) in series[k..k + blocks].iter().enumerate() {
        out.rows_mut(i * m, m).copy_from(y);
    }
    Ok(out)
}

/// Source of stacked measurement windows for a consensus detector.
///
/// A window may be shifted by any multiple of the all-ones vector: with
/// `A 1 = 1` and `C 1 = 1` that vector lies in the range of the
/// observability stack and the projector removes it.
pub trait Measurements {
    fn steps(&self) -> usize;
    fn window(&self, k: usize, blocks: usize) -> Result<Vector>;
}

/// Plain measurement vectors; each window is centered on its first entry.
impl Measurements for [Vector] {
    fn steps(&self) -> usize {
        self.len()
    }

    fn window(&self, k: usize, blocks: usize) -> Result<Vector> {
        let w = stack_window(self, k, blocks)?;
        let offset = w.get(0).copied().unwrap_or(0.0);
        Ok(w.add_scalar(-offset))
    }
}

impl Measurements for MeasurementSeries {
    fn steps(&self) -> usize {
        self.len()
    }

    fn window(&self, k: usize, blocks: usize) -> Result<Vector> {
        self.centered_window(k, blocks)
    }
}

/// `r(k) = P Y_[k, k+n]`.
pub fn residual(sys: &StackedSystem, window: &Vector) -> Result<Vector> {
    if window.len() != sys.window_len() {
        return Err(Error::dims("residual window", sys.window_len(), window.len()));
    }
    Ok(&sys.projector * window)
}

/// Strict comparison `r_norm > c rho^k`.
pub fn alarm(r_norm: f64, c: f64, rho: f64, k: usize) -> bool {
    r_norm > threshold(c, rho, k)
}

pub fn threshold(c: f64, rho: f64, k: usize) -> f64 {
    c * rho.powi(k as i32)
}

pub(crate) fn check_rates(c: f64, rho: f64, phi: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    if !(phi > 0.0 && phi < rho && rho < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < phi < rho < 1, got phi = {phi}, rho = {rho}"
        )));
    }
    Ok(())
}

/// Upper bound on the probability of any alarm over an infinite horizon
/// when no attacker is present (union bound plus Chebyshev).
pub fn false_alarm_bound(sys: &StackedSystem, c: f64, rho: f64, phi: f64) -> Result<f64> {
    check_rates(c, rho, phi)?;
    if sys.is_degenerate() {
        return Ok(0.0);
    }
    let parts = &sys.partitions;
    let n = sys.n;
    let mut eta = 0.0;
    for i in 0..n {
        let diff = &parts[i] - &parts[i + 1];
        eta += phi.powi(2 * i as i32) * diff.norm_squared();
    }
    eta += phi.powi(2 * n as i32) * parts[n].norm_squared();
    Ok(eta / (c * c) * rho * rho / (rho * rho - phi * phi))
}

/// `u(k) = Q r_a(k)` for an attack-only residual.
pub fn reconstruct_input(sys: &StackedSystem, attack_residual: &Vector) -> Result<Vector> {
    if attack_residual.len() != sys.window_len() {
        return Err(Error::dims("attack residual", sys.window_len(), attack_residual.len()));
    }
    Ok(&sys.reconstructor()?.q * attack_residual)
}

/// `P J U_[k, k+n]` computed from known inputs.
pub fn attack_residual(sys: &StackedSystem, inputs: &[Vector], k: usize) -> Result<Vector> {
    let stacked = stack_window(inputs, k, sys.n + 1)?;
    if stacked.len() != sys.projected_input.ncols() {
        return Err(Error::dims("input window", sys.projected_input.ncols(), stacked.len()));
    }
    Ok(&sys.projected_input * stacked)
}

/// `P H W_[k, k+n]` computed from known noise.
pub fn noise_residual(sys: &StackedSystem, noise: &[Vector], k: usize) -> Result<Vector> {
    let stacked = stack_window(noise, k, sys.n + 1)?;
    let ph = &sys.projector * &sys.stacks.noise;
    Ok(ph * stacked)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionStep {
    pub step: usize,
    pub residual_norm: f64,
    pub threshold: f64,
    pub alarm: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub agent: usize,
    pub c: f64,
    pub rho: f64,
    pub steps: Vec<DetectionStep>,
    pub first_alarm: Option<usize>,
    pub alpha_bound: f64,
    pub evaluable_steps: usize,
    pub degenerate: bool,
}

/// Detector of one agent, built once and applied to any number of traces.
#[derive(Debug, Clone)]
pub struct Detector {
    pub agent: usize,
    pub c: f64,
    pub rho: f64,
    pub phi: f64,
    system: StackedSystem,
    alpha_bound: f64,
}

impl Detector {
    /// The stacks use the scenario's actual attacker set; the residual and
    /// the false-alarm bound do not depend on it.
    pub fn for_scenario(scenario: &Scenario, agent: usize) -> Result<Self> {
        let spec = scenario
            .detectors
            .iter()
            .find(|d| d.agent == agent)
            .ok_or_else(|| Error::InvalidParameter(format!("no detector at agent {agent}")))?;
        let c_meas = measurement_matrix(&scenario.graph, agent)?;
        let system = StackedSystem::new(scenario.weights.matrix(), &c_meas, scenario.attack.agents())?;
        let alpha_bound = false_alarm_bound(&system, spec.c, spec.rho, scenario.phi)?;
        Ok(Detector {
            agent,
            c: spec.c,
            rho: spec.rho,
            phi: scenario.phi,
            system,
            alpha_bound,
        })
    }

    pub fn system(&self) -> &StackedSystem {
        &self.system
    }

    pub fn alpha_bound(&self) -> f64 {
        self.alpha_bound
    }

    /// Residual norms and alarms for every evaluable step of `y`.
    pub fn evaluate<M: Measurements + ?Sized>(&self, y: &M) -> Result<DetectionReport> {
        let blocks = self.system.n + 1;
        let evaluable = y.steps().saturating_sub(blocks - 1);
        let mut steps = Vec::with_capacity(evaluable);
        let mut first_alarm = None;
        for k in 0..evaluable {
            let r = residual(&self.system, &y.window(k, blocks)?)?;
            let residual_norm = r.norm();
            let thr = threshold(self.c, self.rho, k);
            let fired = residual_norm > thr;
            if fired && first_alarm.is_none() {
                first_alarm = Some(k);
            }
            steps.push(DetectionStep {
                step: k,
                residual_norm,
                threshold: thr,
                alarm: fired,
            });
        }
        Ok(DetectionReport {
            agent: self.agent,
            c: self.c,
            rho: self.rho,
            steps,
            first_alarm,
            alpha_bound: self.alpha_bound,
            evaluable_steps: evaluable,
            degenerate: self.system.is_degenerate(),
        })
    }

    /// True as soon as any evaluable step alarms; skips building a report.
    pub fn any_alarm<M: Measurements + ?Sized>(&self, y: &M) -> Result<bool> {
        let blocks = self.system.n + 1;
        let evaluable = y.steps().saturating_sub(blocks - 1);
        for k in 0..evaluable {
            let r = residual(&self.system, &y.window(k, blocks)?)?;
            if alarm(r.norm(), self.c, self.rho, k) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Applies `Q` to the full residuals. With privacy noise present the
    /// estimates carry the noise term `Q P H W`.
    pub fn estimate_inputs<M: Measurements + ?Sized>(&self, y: &M) -> Result<Vec<Vector>> {
        let blocks = self.system.n + 1;
        let evaluable = y.steps().saturating_sub(blocks - 1);
        (0..evaluable)
            .map(|k| {
                let r = residual(&self.system, &y.window(k, blocks)?)?;
                reconstruct_input(&self.system, &r)
            })
            .collect()
    }
}

/// Runs every detector of the scenario over the trace.
pub fn evaluate_trace(scenario: &Scenario, trace: &Trace) -> Result<Vec<DetectionReport>> {
    scenario
        .detectors
        .iter()
        .map(|spec| {
            let detector = Detector::for_scenario(scenario, spec.agent)?;
            let series = trace
                .measurements_of(spec.agent)
                .ok_or_else(|| Error::InvalidParameter(format!("trace lacks agent {}", spec.agent)))?;
            detector.evaluate(series)
        })
        .collect()
}
