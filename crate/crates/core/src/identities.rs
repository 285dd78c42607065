//! Finite-time identities relating wall-constrained TASEP with general initial
//! data to step TASEP: Monte Carlo estimators and exact pathwise checks.

use serde::Serialize;

use crate::clockfield::{replica_seed, ClockField};
use crate::dynamics::{simulate, InitialCondition, PiecewiseFn, Trajectory, Wall};
use crate::ensemble::run_replicas;
use crate::error::{Error, Result};
use crate::stats::{intervals_overlap, wilson_ci};

/// Coverage of the Wilson intervals in identity reports.
pub const CI_LEVEL: f64 = 0.99;

const TAG_LHS_CLOCKS: u64 = 1;
const TAG_LHS_IC: u64 = 2;
const TAG_RHS_CLOCKS: u64 = 3;
const TAG_RHS_IC: u64 = 4;

/// `inf_{t ∈ [0,T]} (x_n(t) + f(T - t))`, exactly.
///
/// `x_n` is a nondecreasing step function and `t ↦ f(T-t)` is nonincreasing, so
/// on each constancy interval `[τ_k, τ_{k+1})` of `x_n` the infimum is the limit
/// `x_n(τ_{k+1}-) + f(T - τ_{k+1})` (right-continuity of `f`), and on the last
/// one it is `x_n(T) + f(0)`. `f = None` means no wall (`+∞`).
pub fn wall_envelope(traj: &Trajectory, n: usize, f: Option<&PiecewiseFn>, horizon: f64) -> Result<f64> {
    if !(horizon >= 0.0 && horizon <= traj.horizon()) {
        return Err(Error::OutOfRange(format!(
            "T = {horizon} beyond trajectory horizon {}",
            traj.horizon()
        )));
    }
    let Some(f) = f else {
        traj.jump_times(n)?;
        return Ok(f64::INFINITY);
    };
    let x0 = traj.initial()[n - 1];
    let jumps = traj.jump_times(n)?;
    let mut best = f64::INFINITY;
    let mut k = 0usize;
    for &tau in jumps.iter().take_while(|&&t| t <= horizon) {
        best = best.min((x0 + k as i64) as f64 + f.eval(horizon - tau)?);
        k += 1;
    }
    Ok(best.min((x0 + k as i64) as f64 + f.eval(0.0)?))
}

/// `inf_{t ∈ [0,T]} (x_n(t) - (s - f(T - t)))`.
pub fn wall_margin_infimum(
    traj: &Trajectory,
    n: usize,
    f: Option<&PiecewiseFn>,
    horizon: f64,
    s: i64,
) -> Result<f64> {
    Ok(wall_envelope(traj, n, f, horizon)? - s as f64)
}

/// The wall clause `x_n(t) ≥ s + 1 - f(T - t)` for all `t`, given the margin.
///
/// Positions are integers, so for integer-valued walls this is the same as a
/// strictly positive margin; for general walls only the `≥ 1` form is exact.
pub fn wall_clause_holds(margin: f64) -> bool {
    margin >= 1.0
}

/// Indicator of the step-TASEP event that has the same probability as
/// `x^f_n(T) > s` for the wall-constrained process started from `ic`.
pub fn step_event_indicator(
    traj_step: &Trajectory,
    ic: &[i64],
    f: Option<&PiecewiseFn>,
    n: usize,
    s: i64,
    horizon: f64,
) -> Result<bool> {
    if n == 0 || ic.len() < n || traj_step.n_labels() < n {
        return Err(Error::Precondition(format!(
            "need n = {n} labels and initial positions"
        )));
    }
    if !wall_clause_holds(wall_margin_infimum(traj_step, n, f, horizon, s)?) {
        return Ok(false);
    }
    for j in 0..n {
        if traj_step.position_at(n - j, horizon)? <= s - ic[j] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Wall-constrained system `x^f` started from `ic`, observed at label `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySetup {
    pub ic: InitialCondition,
    /// `None`: no wall.
    pub wall: Option<PiecewiseFn>,
    pub n: usize,
    pub horizon: f64,
}

impl IdentitySetup {
    fn wall(&self) -> Result<Wall> {
        match &self.wall {
            Some(f) => Wall::right(f.clone()),
            None => Ok(Wall::None),
        }
    }
}

/// Two-sided estimate of one identity at one level `s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub params: serde_json::Value,
    pub s: i64,
    pub p_lhs: f64,
    pub ci_lhs: (f64, f64),
    pub p_rhs: f64,
    pub ci_rhs: (f64, f64),
    pub k_lhs: u64,
    pub k_rhs: u64,
    pub n_samples: u64,
    pub verdict: bool,
}

impl IdentityReport {
    fn from_counts(params: serde_json::Value, s: i64, k_lhs: u64, k_rhs: u64, n: u64) -> Result<Self> {
        let ci_lhs = wilson_ci(k_lhs, n, CI_LEVEL)?;
        let ci_rhs = wilson_ci(k_rhs, n, CI_LEVEL)?;
        Ok(Self {
            params,
            s,
            p_lhs: k_lhs as f64 / n as f64,
            ci_lhs,
            p_rhs: k_rhs as f64 / n as f64,
            ci_rhs,
            k_lhs,
            k_rhs,
            n_samples: n,
            verdict: intervals_overlap(ci_lhs, ci_rhs),
        })
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 100 {
        return Err(Error::Precondition(format!("need at least 100 samples, got {samples}")));
    }
    Ok(())
}

/// Per-replica summary of the step side: `(inf_t (x_n(t) + f(T-t)), min_j (x_{n-j}(T) + ic_{1+j}))`.
fn rhs_summary(setup: &IdentitySetup, base_seed: u64, r: u64) -> Result<(f64, i64)> {
    let n = setup.n;
    let ic = setup.ic.materialize(n, replica_seed(base_seed, TAG_RHS_IC, r))?;
    let mut clocks = ClockField::new(replica_seed(base_seed, TAG_RHS_CLOCKS, r), setup.horizon)?;
    let step: Vec<i64> = (0..n as i64).map(|k| -k).collect();
    let traj = simulate(&step, &Wall::None, setup.horizon, &mut clocks)?;
    let env = wall_envelope(&traj, n, setup.wall.as_ref(), setup.horizon)?;
    let mut m = i64::MAX;
    for (j, u) in ic.iter().enumerate() {
        m = m.min(traj.final_position(n - j)? + u);
    }
    Ok((env, m))
}

fn lhs_sample(setup: &IdentitySetup, wall: &Wall, base_seed: u64, r: u64) -> Result<i64> {
    let ic = setup.ic.materialize(setup.n, replica_seed(base_seed, TAG_LHS_IC, r))?;
    let mut clocks = ClockField::new(replica_seed(base_seed, TAG_LHS_CLOCKS, r), setup.horizon)?;
    let traj = simulate(&ic, wall, setup.horizon, &mut clocks)?;
    traj.final_position(setup.n)
}

/// Estimates `P(x^f_n(T) > s)` directly (left side) and through an independent
/// step TASEP (right side) for every `s` in `s_grid`, sharing samples across `s`.
pub fn estimate_wall_identity(
    setup: &IdentitySetup,
    s_grid: &[i64],
    samples: usize,
    base_seed: u64,
    threads: usize,
) -> Result<Vec<IdentityReport>> {
    check_samples(samples)?;
    if setup.n == 0 {
        return Err(Error::Precondition("label n must be at least 1".into()));
    }
    setup.ic.validate()?;
    let wall = setup.wall()?;
    let lhs = run_replicas(samples, threads, |r| lhs_sample(setup, &wall, base_seed, r))?;
    let rhs = run_replicas(samples, threads, |r| rhs_summary(setup, base_seed, r))?;
    let params = serde_json::to_value(setup).expect("setup serializes");
    s_grid
        .iter()
        .map(|&s| {
            let k_lhs = lhs.iter().filter(|&&x| x > s).count() as u64;
            let k_rhs = rhs
                .iter()
                .filter(|&&(env, m)| wall_clause_holds(env - s as f64) && m > s)
                .count() as u64;
            IdentityReport::from_counts(params.clone(), s, k_lhs, k_rhs, samples as u64)
        })
        .collect()
}

/// Wall-free one-point law of label `n` from `ic` versus the step-TASEP minimum.
pub fn variational_onepoint_estimate(
    ic: &InitialCondition,
    n: usize,
    horizon: f64,
    s_grid: &[i64],
    samples: usize,
    base_seed: u64,
    threads: usize,
) -> Result<Vec<IdentityReport>> {
    let setup = IdentitySetup {
        ic: ic.clone(),
        wall: None,
        n,
        horizon,
    };
    estimate_wall_identity(&setup, s_grid, samples, base_seed, threads)
}

/// Step positions with rightmost particle at `a`.
fn shifted_step(a: i64, n: usize) -> Vec<i64> {
    (0..n as i64).map(|k| a - k).collect()
}

/// Checks `x̃_n(T) = min_{0 ≤ j < n} x^{step, ic_{1+j}}_{n-j}(T)` on one shared clock field.
pub fn envelope_pathwise(ic: &[i64], n: usize, horizon: f64, clocks: &mut ClockField) -> Result<bool> {
    if n == 0 || n > ic.len() {
        return Err(Error::Precondition(format!("label {n} outside 1..={}", ic.len())));
    }
    let direct = simulate(&ic[..n], &Wall::None, horizon, clocks)?.final_position(n)?;
    let mut envelope = i64::MAX;
    for j in 0..n {
        let traj = simulate(&shifted_step(ic[j], n - j), &Wall::None, horizon, clocks)?;
        envelope = envelope.min(traj.final_position(n - j)?);
    }
    Ok(direct == envelope)
}

/// Compares `P(min_{m} x^{step,Z_m}_m(T) ≤ s)` for basic-coupled shifted step
/// systems with `P(min_m x^{step,0}_m(T) + Z_m ≤ s)` from one step system.
/// `shifts` lists the pairs `(m, Z_m)`.
pub fn shifted_minimum_mc(
    shifts: &[(usize, i64)],
    horizon: f64,
    s: i64,
    samples: usize,
    base_seed: u64,
    threads: usize,
) -> Result<IdentityReport> {
    check_samples(samples)?;
    if shifts.is_empty() || shifts.iter().any(|&(m, _)| m == 0) {
        return Err(Error::Precondition("labels must be >= 1 and the index set nonempty".into()));
    }
    let top = shifts.iter().map(|&(m, _)| m).max().unwrap();
    let lhs = run_replicas(samples, threads, |r| {
        let mut clocks = ClockField::new(replica_seed(base_seed, TAG_LHS_CLOCKS, r), horizon)?;
        let mut best = i64::MAX;
        for &(m, z) in shifts {
            let traj = simulate(&shifted_step(z, m), &Wall::None, horizon, &mut clocks)?;
            best = best.min(traj.final_position(m)?);
        }
        Ok(best)
    })?;
    let rhs = run_replicas(samples, threads, |r| {
        let mut clocks = ClockField::new(replica_seed(base_seed, TAG_RHS_CLOCKS, r), horizon)?;
        let traj = simulate(&shifted_step(0, top), &Wall::None, horizon, &mut clocks)?;
        let mut best = i64::MAX;
        for &(m, z) in shifts {
            best = best.min(traj.final_position(m)? + z);
        }
        Ok(best)
    })?;
    let params = serde_json::json!({ "shifts": shifts, "horizon": horizon });
    let k_lhs = lhs.iter().filter(|&&x| x <= s).count() as u64;
    let k_rhs = rhs.iter().filter(|&&x| x <= s).count() as u64;
    IdentityReport::from_counts(params, s, k_lhs, k_rhs, samples as u64)
}
