use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use super::config::*;
use super::{digest12, CliError, Command, Common};
use crate::asymptotics::{
    density_profile_periodic, classify_example_wall, f0, g_alpha_periodic, rescale_tagged,
    scaling_constants, shock_densities, tagged_label, Law,
};
use crate::clockfield::{replica_seed, ClockField};
use crate::dynamics::{eval_wall, simulate, InitialCondition, PiecewiseFn, Wall};
use crate::experiments::{
    colour_suite, decoupling_discrepancy, density_comparison, density_particle_count,
    final_configurations, pathwise_suite, periodic_ic, replica_trajectory, shock_probe,
    tagged_samples,
};
use crate::identities::{
    estimate_wall_identity, shifted_minimum_mc, envelope_pathwise, step_event_indicator,
    variational_onepoint_estimate, wall_margin_infimum, IdentitySetup,
};
use crate::multispecies::{
    build_pi, colour_position_check, exchange_check, ExchangeOutcome, PermutationConfig, SwapSequence,
};
use crate::stats::{dkw_band, mean, variance, wilson_ci};

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    pub passed: bool,
}

struct Output {
    dir: PathBuf,
    stem: String,
}

impl Output {
    fn new(common: &Common, name: &str, exp: &Experiment) -> Result<Self, CliError> {
        let canonical = serde_json::to_vec(exp)?;
        std::fs::create_dir_all(&common.out_dir)?;
        Ok(Self {
            dir: common.out_dir.clone(),
            stem: format!("{name}-s{}-{}", common.seed, digest12(&canonical)),
        })
    }

    fn write(&self, suffix: &str, body: &str, report: &mut Report) -> Result<(), CliError> {
        let path = self.dir.join(format!("{}{suffix}", self.stem));
        std::fs::write(&path, body)?;
        report.files.push(path);
        Ok(())
    }

    fn write_json<T: Serialize>(&self, value: &T, report: &mut Report) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.write(".json", &body, report)
    }
}

fn default_for(cmd: &Command) -> Option<Experiment> {
    Some(match cmd {
        Command::Simulate(_) => Experiment::Simulate(SimulateConfig::default()),
        Command::VerifyIdentity(_) => Experiment::VerifyIdentity(IdentityConfig::default()),
        Command::VerifyCoupling(_) => Experiment::VerifyCoupling(CouplingConfig::default()),
        Command::ColourPosition(_) => Experiment::ColourPosition(ColourConfig::default()),
        Command::Density(_) => Experiment::Density(DensityConfig::default()),
        Command::Fluctuations(_) => Experiment::Fluctuations(FluctuationConfig::default()),
        Command::Classify(_) => Experiment::Classify(ClassifyConfig::default()),
        Command::Selfcheck(_) => return None,
    })
}

fn apply_samples(exp: &mut Experiment, samples: usize) {
    match exp {
        Experiment::Simulate(c) => c.replicas = samples,
        Experiment::VerifyIdentity(c) => c.samples = samples,
        Experiment::VerifyCoupling(c) => c.samples = samples,
        Experiment::ColourPosition(c) => c.sequences = samples,
        Experiment::Density(c) => c.replicas = samples,
        Experiment::Fluctuations(c) => c.samples = samples,
        Experiment::Classify(_) => {}
    }
}

pub fn dispatch(cmd: &Command, exp: Option<Experiment>) -> Result<Report, CliError> {
    let common = cmd.common();
    if let Command::Selfcheck(_) = cmd {
        return selfcheck(common);
    }
    let mut exp = exp.or_else(|| default_for(cmd)).expect("subcommand has a default");
    if let Some(s) = common.samples {
        apply_samples(&mut exp, s);
    }
    let out = Output::new(common, cmd.name(), &exp)?;
    match &exp {
        Experiment::Simulate(c) => run_simulate(c, common, &out),
        Experiment::VerifyIdentity(c) => run_identity(c, common, &out),
        Experiment::VerifyCoupling(c) => run_coupling(c, common, &out),
        Experiment::ColourPosition(c) => run_colour(c, common, &out),
        Experiment::Density(c) => run_density(c, common, &out),
        Experiment::Fluctuations(c) => run_fluctuations(c, common, &out),
        Experiment::Classify(c) => run_classify(c, &out),
    }
}

fn run_simulate(c: &SimulateConfig, common: &Common, out: &Output) -> Result<Report, CliError> {
    let mut report = Report {
        passed: true,
        ..Default::default()
    };
    if c.replicas <= 1 {
        let traj = replica_trajectory(&c.ic, c.n, c.wall.as_ref(), c.horizon, common.seed, 0)?;
        let mut buf = Vec::new();
        traj.write_csv(&mut buf)?;
        out.write(".csv", &String::from_utf8(buf).expect("ascii csv"), &mut report)?;
        report.lines.push(format!("{} jumps over [0, {}]", traj.total_jumps(), c.horizon));
    } else {
        let configs = final_configurations(
            &c.ic,
            c.n,
            c.wall.as_ref(),
            c.horizon,
            c.replicas,
            common.seed,
            common.replicas_in_flight,
        )?;
        let mut body = String::from("replica,label,position\n");
        for (r, cfg) in configs.iter().enumerate() {
            for (k, x) in cfg.iter().enumerate() {
                writeln!(body, "{r},{},{x}", k + 1).expect("string write");
            }
        }
        out.write(".csv", &body, &mut report)?;
        report.lines.push(format!("{} replicas of {} labels", c.replicas, c.n));
    }
    Ok(report)
}

fn run_identity(c: &IdentityConfig, common: &Common, out: &Output) -> Result<Report, CliError> {
    let mut report = Report::default();
    let mut all = Vec::new();
    for (k, case) in c.cases.iter().enumerate() {
        let setup = IdentitySetup {
            ic: case.ic.clone(),
            wall: case.wall.clone(),
            n: case.n,
            horizon: case.horizon,
        };
        let seed = replica_seed(common.seed, 100, k as u64);
        let reps = estimate_wall_identity(&setup, &case.s, c.samples, seed, common.replicas_in_flight)?;
        for r in &reps {
            report.lines.push(format!(
                "case {k} n={} T={} s={}: p_lhs={:.5} p_rhs={:.5} {}",
                case.n,
                case.horizon,
                r.s,
                r.p_lhs,
                r.p_rhs,
                if r.verdict { "overlap" } else { "DISJOINT" }
            ));
        }
        all.extend(reps);
    }
    report.passed = all.iter().all(|r| r.verdict);
    out.write_json(&all, &mut report)?;
    Ok(report)
}

fn run_coupling(c: &CouplingConfig, common: &Common, out: &Output) -> Result<Report, CliError> {
    let mut report = Report::default();
    let threads = common.replicas_in_flight;
    let pathwise = match &c.pathwise {
        Some(p) => Some(pathwise_suite(p.cases, p.max_n, p.max_horizon, common.seed)?),
        None => None,
    };
    let mut shifted = Vec::new();
    for (k, case) in c.shifted_minimum.iter().enumerate() {
        let seed = replica_seed(common.seed, 110, k as u64);
        shifted.push(shifted_minimum_mc(&case.shifts, case.horizon, case.s, c.samples, seed, threads)?);
    }
    let mut one_point = Vec::new();
    for (k, case) in c.one_point.iter().enumerate() {
        let seed = replica_seed(common.seed, 120, k as u64);
        one_point.extend(variational_onepoint_estimate(
            &case.ic, case.n, case.horizon, &case.s, c.samples, seed, threads,
        )?);
    }
    if let Some(t) = &pathwise {
        report
            .lines
            .push(format!("pathwise envelope: {} checked, {} failed", t.checked, t.failed));
    }
    report.passed = pathwise.as_ref().is_none_or(|t| t.failed == 0)
        && shifted.iter().chain(&one_point).all(|r| r.verdict);
    for r in shifted.iter().chain(&one_point) {
        report.lines.push(format!(
            "s={}: p_lhs={:.5} p_rhs={:.5} {}",
            r.s,
            r.p_lhs,
            r.p_rhs,
            if r.verdict { "overlap" } else { "DISJOINT" }
        ));
    }
    out.write_json(
        &json!({ "pathwise": pathwise, "shifted_minimum": shifted, "one_point": one_point }),
        &mut report,
    )?;
    Ok(report)
}

fn run_colour(c: &ColourConfig, common: &Common, out: &Output) -> Result<Report, CliError> {
    let mut report = Report::default();
    let summary = colour_suite(
        c.sequences,
        c.max_len,
        c.window,
        c.exchange_max_width,
        c.pi_cases,
        c.pi_max_n,
        common.seed,
    )?;
    report.passed =
        summary.symmetry.failed == 0 && summary.exchange.failed == 0 && summary.involution.failed == 0;
    for (name, t) in [
        ("colour-position symmetry", &summary.symmetry),
        ("exchange", &summary.exchange),
        ("involution", &summary.involution),
    ] {
        report.lines.push(format!(
            "{name}: {} checked, {} failed, {} skipped",
            t.checked, t.failed, t.skipped
        ));
    }
    out.write_json(&summary, &mut report)?;
    Ok(report)
}

fn run_density(c: &DensityConfig, common: &Common, out: &Output) -> Result<Report, CliError> {
    let mut report = Report {
        passed: true,
        ..Default::default()
    };
    let t = c.horizon;
    let n = density_particle_count(c.d, t);
    let configs = final_configurations(
        &periodic_ic(c.d),
        n,
        c.wall.as_ref(),
        t,
        c.replicas,
        common.seed,
        common.replicas_in_flight,
    )?;
    let cmp = density_comparison(&configs, c.d, t, c.bin_width, c.margin)?;
    let mut body = String::from("lo,hi,centre,empirical,predicted\n");
    for (b, predicted, _) in &cmp.bins {
        writeln!(body, "{},{},{},{},{}", b.lo, b.hi, b.centre(), b.density, predicted)
            .expect("string write");
    }
    out.write(".csv", &body, &mut report)?;
    let shock = c.shock_probe.as_ref().map(|p| {
        let (left, right) = shock_probe(&configs, p.label, p.window);
        json!({ "label": p.label, "window": p.window, "left": left, "right": right })
    });
    // the profile is the wall-free one
    let sup_error = c.wall.is_none().then_some(cmp.sup_error);
    if let Some(e) = sup_error {
        report
            .lines
            .push(format!("sup density error {e:.4} over {} bins", cmp.compared));
    }
    if let Some(s) = &shock {
        report.lines.push(format!("shock probe {s}"));
    }
    out.write_json(
        &json!({
            "particles": n,
            "bins_compared": cmp.compared,
            "sup_error": sup_error,
            "shock_probe": shock,
        }),
        &mut report,
    )?;
    Ok(report)
}

fn run_fluctuations(c: &FluctuationConfig, common: &Common, out: &Output) -> Result<Report, CliError> {
    if c.decoupling && c.wall.is_none() {
        return Err(CliError::Usage("decoupling needs a wall".into()));
    }
    let mut report = Report {
        passed: true,
        ..Default::default()
    };
    let t = c.horizon;
    let threads = common.replicas_in_flight;
    let label = tagged_label(c.alpha, t);
    let xs = tagged_samples(&c.ic, c.wall.as_ref(), label, t, c.samples, common.seed, threads)?;
    let s_vals: Vec<f64> = xs
        .iter()
        .map(|&x| rescale_tagged(x as f64, c.xi, t))
        .collect::<crate::Result<_>>()?;
    let mut body = String::from("replica,position,rescaled\n");
    for (r, (x, s)) in xs.iter().zip(&s_vals).enumerate() {
        writeln!(body, "{r},{x},{s}").expect("string write");
    }
    out.write(".csv", &body, &mut report)?;
    let (mean, var) = (mean(&s_vals), variance(&s_vals));
    let tails: Vec<(f64, f64)> = c
        .tail_levels
        .iter()
        .map(|&lvl| {
            let p = s_vals.iter().filter(|&&s| s >= lvl).count() as f64 / s_vals.len() as f64;
            (lvl, p)
        })
        .collect();
    let mut decoupling = None;
    if let (true, Some(f)) = (c.decoupling, &c.wall) {
        let seed = replica_seed(common.seed, 200, 0);
        let discrepancy = decoupling_discrepancy(&c.ic, f, label, t, c.samples, seed, threads)?;
        let band = dkw_band(c.samples, 0.99)?;
        report
            .lines
            .push(format!("decoupling discrepancy {discrepancy:.4} (DKW band {band:.4})"));
        decoupling = Some(json!({ "discrepancy": discrepancy, "dkw_band": band }));
    }
    report.lines.push(format!("label {label}: mean S {mean:.4}, var S {var:.4}"));
    out.write_json(
        &json!({
            "label": label,
            "mean": mean,
            "variance": var,
            "tail": tails,
            "decoupling": decoupling,
        }),
        &mut report,
    )?;
    Ok(report)
}

fn run_classify(c: &ClassifyConfig, out: &Output) -> Result<Report, CliError> {
    let mut report = Report {
        passed: true,
        ..Default::default()
    };
    let mut rows = Vec::new();
    for &a in &c.alpha {
        let row = match classify_example_wall(c.d, a) {
            Ok(r) => {
                let shock = match (r.influence.first(), r.influence.last()) {
                    (Some(&a0), Some(&an)) => shock_densities(a, a0, an).ok(),
                    _ => None,
                };
                report.lines.push(format!("alpha={a}: xi={:.6} {}", r.xi, r.label));
                json!({
                    "alpha": a,
                    "regime": r,
                    "g_alpha": g_alpha_periodic(c.d, a).ok(),
                    "shock_densities": shock,
                })
            }
            Err(e) => {
                report.lines.push(format!("alpha={a}: {e}"));
                json!({ "alpha": a, "error": e.to_string() })
            }
        };
        rows.push(row);
    }
    out.write_json(&rows, &mut report)?;
    Ok(report)
}

fn selfcheck(common: &Common) -> Result<Report, CliError> {
    let mut checks: Vec<(&'static str, bool)> = Vec::new();
    let mut check = |name: &'static str, ok: crate::Result<bool>| {
        checks.push((name, ok.unwrap_or(false)));
    };

    check("clock field: empty window", (|| {
        let mut f = ClockField::new(common.seed, 5.0)?;
        Ok(f.site_events(0, 0.0)?.is_empty())
    })());
    check("clock field: deterministic", (|| {
        let a = ClockField::new(common.seed, 5.0)?.site_events(3, 5.0)?.to_vec();
        let b = ClockField::new(common.seed, 5.0)?.site_events(3, 5.0)?.to_vec();
        Ok(a == b)
    })());
    check("initial data: step and periodic", (|| {
        Ok(InitialCondition::step().materialize(3, 0)? == vec![0, -1, -2]
            && InitialCondition::HalfPeriodic { d: 2.0 }.materialize(3, 0)? == vec![0, -2, -4]
            && InitialCondition::HalfPeriodic { d: 1.5 }.materialize(4, 0)? == vec![0, -1, -3, -4])
    })());
    check("wall: example values", (|| {
        let f = PiecewiseFn::example_wall(1.0)?;
        Ok((f.eval(0.35)? - 29.0 / 120.0).abs() < 1e-12
            && (f.eval(1.0)? - 17.0 / 30.0).abs() < 1e-12
            && eval_wall(None, 1.0)? == f64::INFINITY)
    })());
    check("dynamics: zero wall freezes particle 1", (|| {
        let wall = Wall::right(PiecewiseFn::zero())?;
        let mut ok = true;
        for r in 0..20 {
            let mut clocks = ClockField::new(replica_seed(common.seed, 7, r), 5.0)?;
            let traj = simulate(&[0, -1, -2], &wall, 5.0, &mut clocks)?;
            ok &= traj.final_position(1)? == 0;
        }
        Ok(ok)
    })());
    check("swaps: rules and inverse", (|| {
        let mut cfg = PermutationConfig::identity();
        let first = cfg.apply_swap(0);
        let second = cfg.apply_swap(0);
        Ok(first && !second && cfg.invert() == cfg && cfg.is_consistent())
    })());
    check("colour-position: short words", (|| {
        Ok(colour_position_check(&SwapSequence::default())
            && colour_position_check(&SwapSequence(vec![2]))
            && colour_position_check(&SwapSequence(vec![0, 1, 0, 2, -1])))
    })());
    check("involution: two-particle and step cases", (|| {
        let (seq, _) = build_pi(&[0, -2], 2)?;
        let (step, _) = build_pi(&[0, -1, -2, -3], 4)?;
        Ok(seq.0 == vec![-1] && step.is_empty())
    })());
    check("exchange: core case", Ok(exchange_check(&[true, false], 0, 1, 0) == ExchangeOutcome::Holds));
    check("identity: degenerate levels", (|| {
        let zero = PiecewiseFn::zero();
        let mut ok = true;
        for r in 0..20 {
            let mut clocks = ClockField::new(replica_seed(common.seed, 8, r), 2.0)?;
            let traj = simulate(&[0], &Wall::None, 2.0, &mut clocks)?;
            ok &= step_event_indicator(&traj, &[0], Some(&zero), 1, -1, 2.0)?;
            ok &= !step_event_indicator(&traj, &[0], Some(&zero), 1, 0, 2.0)?;
            ok &= wall_margin_infimum(&traj, 1, Some(&zero), 2.0, 0)? <= 0.0;
        }
        let setup = IdentitySetup {
            ic: InitialCondition::step(),
            wall: Some(zero),
            n: 1,
            horizon: 1.0,
        };
        let reps = estimate_wall_identity(&setup, &[-1, 0], 200, common.seed, common.replicas_in_flight)?;
        Ok(ok && reps[0].p_lhs == 1.0 && reps[0].p_rhs == 1.0 && reps[1].p_lhs == 0.0 && reps[1].p_rhs == 0.0)
    })());
    check("envelope: single label and step", (|| {
        let mut ok = true;
        for r in 0..20 {
            let mut clocks = ClockField::new(replica_seed(common.seed, 9, r), 3.0)?;
            ok &= envelope_pathwise(&[-1, -4], 1, 3.0, &mut clocks)?;
            ok &= envelope_pathwise(&[0, -1, -2], 3, 3.0, &mut clocks)?;
        }
        Ok(ok)
    })());
    check("formulas: branch seams", (|| {
        let (c1, _) = scaling_constants(0.25, 1.0)?;
        Ok((f0(1.0, 0.25, 0.0)? - 0.25).abs() < 1e-15
            && (c1 - 2f64.powf(-1.0 / 3.0)).abs() < 1e-14
            && g_alpha_periodic(2.0, 0.25)?.abs() < 1e-15
            && density_profile_periodic(0.0, 1.0, 2.0)? == 0.5
            && shock_densities(0.25, 1.0, 1.0)?.0 == 0.5)
    })());
    check("classification: table entries", (|| {
        Ok(classify_example_wall(1.0, 1.0 / 9.0)?.law == Law::Airy2To1
            && classify_example_wall(2.0, 0.2)?.law == Law::Gue
            && classify_example_wall(2.5, 0.2).is_err())
    })());
    check("stats: Wilson edges", (|| {
        Ok(wilson_ci(0, 10, 0.99)?.0 == 0.0 && wilson_ci(10, 10, 0.99)?.1 == 1.0)
    })());

    let passed = checks.iter().all(|c| c.1);
    let mut report = Report {
        passed,
        ..Default::default()
    };
    for (name, ok) in &checks {
        report.lines.push(format!("{} {name}", if *ok { "ok  " } else { "FAIL" }));
    }
    std::fs::create_dir_all(&common.out_dir)?;
    let body = serde_json::to_string_pretty(&json!({
        "checks": checks.iter().map(|(n, ok)| json!({ "name": n, "passed": ok })).collect::<Vec<_>>(),
        "passed": passed,
    }))? + "\n";
    let path = common.out_dir.join(format!("selfcheck-s{}.json", common.seed));
    std::fs::write(&path, body)?;
    report.files.push(path);
    Ok(report)
}
