//! Ensemble runners shared by the command line and the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clockfield::{replica_seed, ClockField};
use crate::dynamics::{simulate, InitialCondition, PiecewiseFn, Trajectory, Wall};
use crate::asymptotics::density_profile_periodic;
use crate::ensemble::run_replicas;
use crate::error::Result;
use crate::identities::{envelope_pathwise, wall_envelope};
use crate::stats::{decoupling_check, empirical_density, DensityBin};
use crate::multispecies::{
    build_pi, colour_position_check, exchange_check, simulate_multi_observed, ExchangeOutcome,
    PermutationConfig, SwapSequence,
};

const TAG_IC: u64 = 11;
const TAG_CLOCKS: u64 = 12;
const TAG_CASES: u64 = 13;
const TAG_SPLIT: u64 = 14;

fn right_wall(f: Option<&PiecewiseFn>) -> Result<Wall> {
    match f {
        Some(f) => Wall::right(f.clone()),
        None => Ok(Wall::None),
    }
}

/// Full trajectory of replica `r`, with the same seeds as [`final_configurations`].
pub fn replica_trajectory(
    ic: &InitialCondition,
    n: usize,
    wall: Option<&PiecewiseFn>,
    horizon: f64,
    seed: u64,
    r: u64,
) -> Result<Trajectory> {
    let wall = right_wall(wall)?;
    let x0 = ic.materialize(n, replica_seed(seed, TAG_IC, r))?;
    let mut clocks = ClockField::new(replica_seed(seed, TAG_CLOCKS, r), horizon)?;
    simulate(&x0, &wall, horizon, &mut clocks)
}

/// Final positions of labels `1..=n` for each replica.
pub fn final_configurations(
    ic: &InitialCondition,
    n: usize,
    wall: Option<&PiecewiseFn>,
    horizon: f64,
    replicas: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<Vec<i64>>> {
    let wall = right_wall(wall)?;
    run_replicas(replicas, threads, |r| {
        let x0 = ic.materialize(n, replica_seed(seed, TAG_IC, r))?;
        let mut clocks = ClockField::new(replica_seed(seed, TAG_CLOCKS, r), horizon)?;
        Ok(simulate(&x0, &wall, horizon, &mut clocks)?.final_positions())
    })
}

/// `x_label(T)` per replica.
pub fn tagged_samples(
    ic: &InitialCondition,
    wall: Option<&PiecewiseFn>,
    label: usize,
    horizon: f64,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<i64>> {
    let wall = right_wall(wall)?;
    run_replicas(samples, threads, |r| {
        let x0 = ic.materialize(label, replica_seed(seed, TAG_IC, r))?;
        let mut clocks = ClockField::new(replica_seed(seed, TAG_CLOCKS, r), horizon)?;
        simulate(&x0, &wall, horizon, &mut clocks)?.final_position(label)
    })
}

/// `inf_t (x_label(t) + f(T - t))` for wall-free step TASEP, per replica.
pub fn envelope_samples(
    f: &PiecewiseFn,
    label: usize,
    horizon: f64,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<f64>> {
    run_replicas(samples, threads, |r| {
        let x0: Vec<i64> = (0..label as i64).map(|k| -k).collect();
        let mut clocks = ClockField::new(replica_seed(seed, TAG_CLOCKS, r), horizon)?;
        let traj = simulate(&x0, &Wall::None, horizon, &mut clocks)?;
        wall_envelope(&traj, label, Some(f), horizon)
    })
}

/// Occupied fraction of the `window` sites right of, and left of, the tagged particle.
pub fn shock_probe(configs: &[Vec<i64>], label: usize, window: i64) -> (f64, f64) {
    let mut right = 0usize;
    let mut left = 0usize;
    for cfg in configs {
        let x = cfg[label - 1];
        right += cfg[..label - 1].iter().filter(|&&y| y <= x + window).count();
        left += cfg[label..].iter().filter(|&&y| y >= x - window).count();
    }
    let norm = (window as f64) * configs.len() as f64;
    (left as f64 / norm, right as f64 / norm)
}

/// Particles needed so that `[-T, T]` keeps being fed from the left up to time `T`
/// for half-`d`-periodic data.
pub fn density_particle_count(d: f64, horizon: f64) -> usize {
    ((2.0 * horizon + 50.0) / d).ceil() as usize + 1
}

/// Half-`d`-periodic data; `d = 1` is step.
pub fn periodic_ic(d: f64) -> InitialCondition {
    if d == 1.0 {
        InitialCondition::step()
    } else {
        InitialCondition::HalfPeriodic { d }
    }
}

/// Empirical against hydrodynamic density on `[-T, T - 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct DensityComparison {
    /// `(bin, predicted density at the bin centre, compared)`.
    pub bins: Vec<(DensityBin, f64, bool)>,
    /// Largest error over bins farther than `margin T^{2/3}` from the profile kinks.
    pub sup_error: f64,
    pub compared: usize,
}

pub fn density_comparison(
    configs: &[Vec<i64>],
    d: f64,
    horizon: f64,
    bin_width: u64,
    margin: f64,
) -> Result<DensityComparison> {
    let region = (-(horizon as i64), horizon as i64 - 1);
    let kinks = [(1.0 - 2.0 / d) * horizon, horizon];
    let gap = margin * horizon.powf(2.0 / 3.0);
    let mut bins = Vec::new();
    let mut sup_error: f64 = 0.0;
    let mut compared = 0;
    for b in empirical_density(configs, bin_width, region)? {
        let predicted = density_profile_periodic(b.centre(), horizon, d)?;
        let clear = kinks
            .iter()
            .all(|&k| b.lo as f64 > k + gap || (b.hi as f64) < k - gap);
        if clear {
            sup_error = sup_error.max((b.density - predicted).abs());
            compared += 1;
        }
        bins.push((b, predicted, clear));
    }
    Ok(DensityComparison {
        bins,
        sup_error,
        compared,
    })
}

/// `sup_s |P(x^f_label(T) > s) - P(E ≥ s + 1) P(x_label(T) > s)|` where `x^f` starts
/// from `ic` under the wall, `E` is the wall envelope of step TASEP and `x` starts
/// from `ic` without wall; the three samples are independent.
pub fn decoupling_discrepancy(
    ic: &InitialCondition,
    f: &PiecewiseFn,
    label: usize,
    horizon: f64,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<f64> {
    let as_f64 = |v: Vec<i64>| v.into_iter().map(|x| x as f64).collect::<Vec<f64>>();
    let lhs = as_f64(tagged_samples(ic, Some(f), label, horizon, samples, replica_seed(seed, TAG_SPLIT, 0), threads)?);
    // floor(e) > s exactly when e >= s + 1
    let wall_part: Vec<f64> = envelope_samples(f, label, horizon, samples, replica_seed(seed, TAG_SPLIT, 1), threads)?
        .into_iter()
        .map(f64::floor)
        .collect();
    let ic_part = as_f64(tagged_samples(ic, None, label, horizon, samples, replica_seed(seed, TAG_SPLIT, 2), threads)?);
    let mut grid: Vec<f64> = lhs.iter().chain(&wall_part).chain(&ic_part).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    decoupling_check(&lhs, &wall_part, &ic_part, &grid)
}

/// Tally of an exact check suite.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checked: u64,
    pub failed: u64,
    pub skipped: u64,
}

impl Tally {
    pub fn record(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }
}

/// Random initial data with `u_1 ≤ 0` and gaps of 1 to `1 + max_gap` sites.
pub fn random_ic(rng: &mut ChaCha8Rng, n: usize, max_gap: i64) -> Vec<i64> {
    let mut x = -rng.random_range(0..=max_gap);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(x);
        x -= 1 + rng.random_range(0..=max_gap);
    }
    out
}

/// Shifted-step envelope identity on random initial data, exact on each path.
pub fn pathwise_suite(cases: usize, max_n: usize, max_horizon: f64, seed: u64) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed, TAG_CASES, 0));
    let mut tally = Tally::default();
    for r in 0..cases as u64 {
        let n = rng.random_range(1..=max_n);
        let horizon = rng.random_range(0.1..=max_horizon);
        let ic = random_ic(&mut rng, n, 3);
        let mut clocks = ClockField::new(replica_seed(seed, TAG_CLOCKS, r), horizon)?;
        tally.record(envelope_pathwise(&ic, n, horizon, &mut clocks)?);
    }
    Ok(tally)
}

/// Counts for the colour-position, exchange and involution suites.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ColourSummary {
    pub symmetry: Tally,
    pub exchange: Tally,
    pub involution: Tally,
}

pub fn colour_suite(
    sequences: usize,
    max_len: usize,
    window: (i64, i64),
    exchange_max_width: i64,
    pi_cases: usize,
    pi_max_n: usize,
    seed: u64,
) -> Result<ColourSummary> {
    let mut out = ColourSummary::default();
    let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed, TAG_CASES, 1));
    for _ in 0..sequences {
        let len = rng.random_range(0..=max_len);
        let word: Vec<i64> = (0..len)
            .map(|_| rng.random_range(window.0..window.1))
            .collect();
        out.symmetry.record(colour_position_check(&SwapSequence(word)));
    }
    for width in 1..=exchange_max_width {
        for bits in 0u32..(1 << (width + 1)) {
            let occ: Vec<bool> = (0..=width).map(|k| bits >> k & 1 == 1).collect();
            for x in 0..width {
                match exchange_check(&occ, 0, width, x) {
                    ExchangeOutcome::HypothesisNotMet => out.exchange.skipped += 1,
                    ExchangeOutcome::Holds => out.exchange.record(true),
                    ExchangeOutcome::Fails => out.exchange.record(false),
                }
            }
        }
    }
    for _ in 0..pi_cases {
        let n = rng.random_range(2..=pi_max_n.max(2));
        let u = random_ic(&mut rng, n, 3);
        out.involution.record(pi_properties_hold(&u)?);
    }
    Ok(out)
}

/// `π = π^{-1}` and the marginal of `π(id)` reproduces `u` on sites `≥ u_n`.
pub fn pi_properties_hold(u: &[i64]) -> Result<bool> {
    let n = u.len();
    let (word, pi) = build_pi(u, n)?;
    let mut twice = pi.clone();
    word.apply_transpositions(&mut twice);
    let involution = twice == PermutationConfig::identity() && pi.invert() == pi;
    let occ = pi.marginal(u[n - 1] + n as i64 - 1);
    let top = u[0].max(0) + 2;
    let matches = (u[n - 1]..=top).all(|z| occ.is_occupied(z) == u.contains(&z));
    Ok(involution && matches)
}

/// Multi-species marginal at cutoff 0 against single-species step TASEP with
/// `n` labels under one clock field, compared after every applied swap.
pub fn marginal_consistency_case(
    seed: u64,
    n: usize,
    horizon: f64,
    wall: Option<&PiecewiseFn>,
) -> Result<bool> {
    let step: Vec<i64> = (0..n as i64).map(|k| -k).collect();
    let single_wall = right_wall(wall)?;
    let mut clocks = ClockField::new(seed, horizon)?;
    let traj = simulate(&step, &single_wall, horizon, &mut clocks)?;
    let lo = -(n as i64 - 1);
    let hi = 20 + (12.0 * horizon) as i64;
    let mut ok = true;
    let admissible = |z: i64, t: f64| match wall {
        Some(f) => (z + 1) as f64 <= f.eval(t).unwrap_or(f64::NEG_INFINITY),
        None => true,
    };
    let compare = |t: f64, occ_cfg: &PermutationConfig| -> bool {
        let occ = occ_cfg.marginal(0);
        let mut expected: Vec<i64> = Vec::with_capacity(n);
        for label in 1..=n {
            match traj.position_at(label, t) {
                Ok(x) => expected.push(x),
                Err(_) => return false,
            }
        }
        let got: Vec<i64> = (lo..=hi + 1).rev().filter(|&z| occ.is_occupied(z)).collect();
        got == expected
    };
    let cfg0 = PermutationConfig::identity_on(lo, hi + 1);
    let last = simulate_multi_observed(&cfg0, lo..=hi, admissible, horizon, &mut clocks, |t, _, cfg| {
        if ok && !compare(t, cfg) {
            ok = false;
        }
    })?;
    Ok(ok && compare(horizon, &last))
}
