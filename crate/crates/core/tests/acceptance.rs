//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use consensus_guard::analysis::{
    detectability_for, empirical_convergence_rate, enumerate_detectable_attacker_sets, error_interval,
    privacy_report, second_eigenvalue_modulus, union_error_interval, RateEstimate,
};
use consensus_guard::detector::{false_alarm_bound, stacked_matrices};
use consensus_guard::numerics::{rank, Matrix, DEFAULT_REL_TOL};
use consensus_guard::sim::{input_matrix, measurement_matrix};
use consensus_guard::{io, ring4, run_campaign, sim, AttackProfile, Detector, Graph, StackedSystem};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn shipped_scenario() -> consensus_guard::Scenario {
    io::load_scenario(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ring4.json")).unwrap()
}

fn ring_system(attackers: &[usize]) -> StackedSystem {
    let c = measurement_matrix(&ring4::graph(), ring4::DETECTOR_AGENT).unwrap();
    StackedSystem::new(ring4::weights().matrix(), &c, attackers).unwrap()
}

fn consensus_value() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for seed in [2021, 0, 1, 7, 12345] {
        let mut s = shipped_scenario();
        s.seed = seed;
        let start = Instant::now();
        let trace = sim::run(&s).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        let last = trace.x.last().unwrap();
        worst = last.iter().map(|v| (v + 7.5).abs()).fold(worst, f64::max);
    }
    let s = shipped_scenario();
    let exact = s.x0.mean() + s.attack.total_injection().unwrap() / 4.0;
    ensure(
        worst <= 1e-3 && (exact + 7.5).abs() < 1e-12 && slowest < Duration::from_secs(1),
        format!("max |x_i(200) + 7.5| = {worst:.3e}, deterministic part {exact}, slowest run {slowest:?}"),
    )
}

fn false_alarm_bound_value() -> Outcome {
    let alpha = false_alarm_bound(&ring_system(&[]), ring4::C, ring4::RHO, ring4::PHI).map_err(|e| e.to_string())?;
    ensure(alpha <= 0.01, format!("alpha bound = {alpha:.6}"))
}

fn detectability_rank() -> Outcome {
    let a = ring4::weights();
    let c = measurement_matrix(&ring4::graph(), ring4::DETECTOR_AGENT).unwrap();
    let b = input_matrix(4, &[ring4::ATTACKER]).unwrap();
    let stacks = stacked_matrices(a.matrix(), &c, &b, 3).unwrap();
    let oj = {
        let o = &stacks.observability;
        let j = &stacks.input;
        let mut m = Matrix::zeros(o.nrows(), o.ncols() + j.ncols());
        m.view_mut((0, 0), o.shape()).copy_from(o);
        m.view_mut((0, o.ncols()), j.shape()).copy_from(j);
        m
    };
    let r_oj = rank(&oj, DEFAULT_REL_TOL).unwrap().rank;
    let r_j = rank(&stacks.input, DEFAULT_REL_TOL).unwrap().rank;
    let verdict = detectability_for(a.matrix(), &c, &[ring4::ATTACKER]).unwrap();
    ensure(
        r_oj - r_j == 4 && verdict.rank_gap() == 4 && verdict.detectable,
        format!("rank[O J] = {r_oj}, rank[J] = {r_j}, gap {}", r_oj - r_j),
    )
}

fn confidence_intervals() -> Outcome {
    const SINGLE: f64 = 29.5478;
    const UNION: f64 = 57.9926;
    let beta = 1e-3;
    let single = error_interval(&ring_system(&[ring4::ATTACKER]), ring4::C, ring4::RHO, ring4::PHI, beta)
        .map_err(|e| e.to_string())?;
    let a = ring4::weights();
    let c = measurement_matrix(&ring4::graph(), ring4::DETECTOR_AGENT).unwrap();
    let candidates = enumerate_detectable_attacker_sets(a.matrix(), &c, 3, &[ring4::DETECTOR_AGENT]).unwrap();
    let union = union_error_interval(a.matrix(), &c, &candidates, ring4::C, ring4::RHO, ring4::PHI, beta)
        .map_err(|e| e.to_string())?;
    let e_single = (single.half_width() - SINGLE).abs() / SINGLE;
    let e_union = (union.half_width - UNION).abs() / UNION;
    let mut detail = format!(
        "singleton {:.4} ({:.2}% off), union {:.4} via {:?} ({:.2}% off)",
        single.half_width(),
        100.0 * e_single,
        union.half_width,
        union.widest,
        100.0 * e_union
    );
    let ok = e_single <= 0.01 && e_union <= 0.01;
    if !ok {
        for i in &union.contributions {
            detail += &format!("\n      B = {:?}: mu {:.4}, z {:.4}, half-width {:.4}", i.attackers, i.mu, i.z, i.half_width());
        }
        for b in &union.undetectable {
            detail += &format!("\n      B = {b:?}: not detectable");
        }
    }
    ensure(ok, detail)
}

fn monte_carlo_soundness() -> Outcome {
    let mut s = shipped_scenario();
    s.horizon = 100;
    let start = Instant::now();
    let r = run_campaign(&s, 10_000, None).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let r = &r[0];
    let limit = r.alpha_bound + 3.0 * (r.alpha_bound / 10_000.0).sqrt();
    ensure(
        r.empirical_rate <= limit && elapsed < Duration::from_secs(60),
        format!(
            "{} alarms in {} trials, rate {:.4} <= {:.4}, {:.1?}",
            r.alarms, r.trials, r.empirical_rate, limit, elapsed
        ),
    )
}

fn residual_nullity() -> Outcome {
    let mut rng = common::rng(6);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let s = common::random_quiet_scenario(&mut rng, 40);
        let trace = sim::run(&s).unwrap();
        let det = Detector::for_scenario(&s, s.detectors[0].agent).unwrap();
        let report = det.evaluate(&trace.measurements[0]).unwrap();
        let raw = det.evaluate(trace.measurements[0].y.as_slice()).unwrap();
        let scale = s.x0.norm();
        for step in report.steps.iter().chain(&raw.steps) {
            worst = worst.max(step.residual_norm / scale);
        }
    }
    ensure(worst <= 1e-9, format!("max ‖r‖ / ‖x(0)‖ = {worst:.3e} over 50 systems"))
}

fn input_reconstruction() -> Outcome {
    let mut rng = common::rng(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let s = common::random_attacked_scenario(&mut rng, 30);
        let trace = sim::run(&s).unwrap();
        let det = Detector::for_scenario(&s, s.detectors[0].agent).unwrap();
        let estimates = det.estimate_inputs(&trace.measurements[0]).unwrap();
        let scale = trace.u.iter().map(|u| u.amax()).fold(0.0, f64::max);
        for (k, u_hat) in estimates.iter().enumerate() {
            worst = worst.max((u_hat - &trace.u[k]).amax() / scale);
        }
    }
    ensure(worst <= 1e-8, format!("max relative reconstruction error {worst:.3e} over 50 systems"))
}

fn projector_algebra() -> Outcome {
    let mut systems = Vec::new();
    for set in [vec![], vec![3], vec![2, 3], vec![1, 3, 4]] {
        systems.push(ring_system(&set));
    }
    let mut rng = common::rng(8);
    for _ in 0..50 {
        let s = common::random_attacked_scenario(&mut rng, 10);
        let c = measurement_matrix(&s.graph, s.detectors[0].agent).unwrap();
        systems.push(StackedSystem::new(s.weights.matrix(), &c, s.attack.agents()).unwrap());
    }
    let mut worst = 0.0f64;
    for sys in &systems {
        let p = sys.projector();
        worst = worst
            .max((p * p - p).amax())
            .max((p - p.transpose()).amax())
            .max((p * &sys.stacks().observability).amax());
    }
    ensure(worst <= 1e-10, format!("max violation {worst:.3e} over {} systems", systems.len()))
}

fn convergence_bound() -> Outcome {
    let s = shipped_scenario();
    let trace = sim::run(&s).unwrap();
    let noisy = empirical_convergence_rate(&trace, 0.5).unwrap().rate().unwrap_or(0.0);

    let mut quiet = s.clone();
    quiet.attack = AttackProfile::none();
    quiet.zero_noise = true;
    let clean = empirical_convergence_rate(&sim::run(&quiet).unwrap(), 0.5).unwrap();
    let lambda = second_eigenvalue_modulus(s.weights.matrix()).unwrap();
    let clean_rate = match clean {
        RateEstimate::Rate { rate, .. } => rate,
        RateEstimate::ConvergedImmediately => f64::NAN,
    };
    ensure(
        noisy <= 0.75 && (clean_rate - lambda).abs() <= 0.05,
        format!("noisy tail rate {noisy:.4} <= 0.75; clean rate {clean_rate:.4} vs |lambda| {lambda:.4}"),
    )
}

fn privacy_truth_table() -> Outcome {
    let ring = privacy_report(&ring4::graph(), &[3]).unwrap();
    let k4 = privacy_report(&Graph::complete(4).unwrap(), &[3]).unwrap();
    let ring_private: Vec<usize> = ring.iter().filter(|v| v.private).map(|v| v.agent).collect();
    let k4_private: Vec<usize> = k4.iter().filter(|v| v.private).map(|v| v.agent).collect();
    ensure(
        ring_private == [1, 2, 4] && k4_private.is_empty(),
        format!("ring private {ring_private:?}, K4 private {k4_private:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("consensus value under attack", consensus_value),
        ("false-alarm bound", false_alarm_bound_value),
        ("detectability rank", detectability_rank),
        ("confidence intervals", confidence_intervals),
        ("Monte-Carlo soundness", monte_carlo_soundness),
        ("residual nullity", residual_nullity),
        ("input reconstruction", input_reconstruction),
        ("projector algebra", projector_algebra),
        ("convergence rate", convergence_bound),
        ("privacy truth table", privacy_truth_table),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
