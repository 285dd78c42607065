use excluwall::asymptotics::{
    density_profile_periodic, f0, g_alpha_periodic, scaling_constants, tagged_constants,
};
use excluwall::dynamics::{simulate, PiecewiseFn, Wall};
use excluwall::identities::wall_envelope;
use excluwall::multispecies::{PermutationConfig, SwapSequence};
use excluwall::stats::{decoupling_check, dkw_band, ks_distance, ks_one_sample, ks_pvalue, wilson_ci, Ecdf};
use excluwall::ClockField;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

fn decreasing(gaps: &[i64], top: i64) -> Vec<i64> {
    let mut x = vec![top];
    for g in gaps {
        let last = *x.last().unwrap();
        x.push(last - g);
    }
    x
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn clocks_ignore_query_order(seed in any::<u64>(), a in -500i64..500, b in -500i64..500, t in 0.5f64..40.0) {
        let mut one = ClockField::new(seed, 40.0).unwrap();
        let mut two = ClockField::new(seed, 40.0).unwrap();
        let a1 = one.site_events(a, t).unwrap().to_vec();
        let b1 = one.site_events(b, t).unwrap().to_vec();
        let b2 = two.site_events(b, t).unwrap().to_vec();
        let a2 = two.site_events(a, t).unwrap().to_vec();
        prop_assert_eq!(a1, a2);
        prop_assert_eq!(b1, b2);
    }

    #[test]
    fn clock_events_are_prefix_stable(seed in any::<u64>(), z in -50i64..50, t1 in 0.0f64..30.0, dt in 0.0f64..30.0) {
        let mut short = ClockField::new(seed, 30.0).unwrap();
        let mut long = ClockField::new(seed, 60.0).unwrap();
        let head = short.site_events(z, t1).unwrap().to_vec();
        let full = long.site_events(z, t1 + dt).unwrap().to_vec();
        prop_assert!(full.len() >= head.len());
        prop_assert_eq!(&full[..head.len()], &head[..]);
        prop_assert!(full.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(full.iter().all(|&s| s > 0.0 && s <= t1 + dt));
    }

    #[test]
    fn next_event_walks_the_event_list(seed in any::<u64>(), z in -20i64..20) {
        let mut c = ClockField::new(seed, 25.0).unwrap();
        let events = c.site_events(z, 25.0).unwrap().to_vec();
        let mut t = 0.0;
        let mut walked = Vec::new();
        while let Some(s) = c.next_event(z, t).unwrap() {
            walked.push(s);
            t = s;
        }
        prop_assert_eq!(walked, events);
    }

    #[test]
    fn trajectories_respect_exclusion_and_wall(
        seed in any::<u64>(),
        gaps in prop::collection::vec(1i64..4, 0..12),
        slope in 0.0f64..2.0,
        horizon in 0.1f64..8.0,
    ) {
        let x0 = decreasing(&gaps, 0);
        let f = PiecewiseFn::from_triples(&[(0.0, 0.0, 0.0), (horizon / 2.0, slope, 0.5)]).unwrap();
        let wall = Wall::right(f).unwrap();
        let mut clocks = ClockField::new(seed, horizon).unwrap();
        let traj = simulate(&x0, &wall, horizon, &mut clocks).unwrap();
        prop_assert!(traj.validate(&wall).is_ok());
        let fin = traj.final_positions();
        prop_assert!(fin.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(fin.iter().zip(&x0).all(|(a, b)| a >= b));
    }

    #[test]
    fn basic_coupling_is_attractive(
        seed in any::<u64>(),
        gaps in prop::collection::vec(1i64..4, 0..10),
        lifts in prop::collection::vec(0i64..3, 11),
        horizon in 0.1f64..10.0,
    ) {
        let lower = decreasing(&gaps, 0);
        // lifting particle k by a nondecreasing-from-the-left amount keeps the order
        let mut upper = lower.clone();
        let mut acc = 0;
        for k in (0..upper.len()).rev() {
            acc += lifts[k];
            upper[k] += acc;
        }
        let mut clocks = ClockField::new(seed, horizon).unwrap();
        let lo = simulate(&lower, &Wall::None, horizon, &mut clocks).unwrap().final_positions();
        let hi = simulate(&upper, &Wall::None, horizon, &mut clocks).unwrap().final_positions();
        prop_assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "{lo:?} vs {hi:?}");
    }

    #[test]
    fn particles_ignore_those_behind(seed in any::<u64>(), gaps in prop::collection::vec(1i64..4, 1..10), horizon in 0.1f64..10.0) {
        let x0 = decreasing(&gaps, 3);
        let mut clocks = ClockField::new(seed, horizon).unwrap();
        let full = simulate(&x0, &Wall::None, horizon, &mut clocks).unwrap().final_positions();
        let head = simulate(&x0[..x0.len() / 2 + 1], &Wall::None, horizon, &mut clocks).unwrap().final_positions();
        prop_assert_eq!(&full[..head.len()], &head[..]);
    }

    #[test]
    fn envelope_matches_dense_scan(
        seed in any::<u64>(),
        n in 1usize..5,
        horizon in 0.5f64..6.0,
        v1 in 0.0f64..3.0,
        jump in 0.0f64..2.0,
    ) {
        let x0: Vec<i64> = (0..5).map(|k| -k).collect();
        let f = PiecewiseFn::from_triples(&[(0.0, 0.0, 0.0), (horizon * 0.4, v1, jump), (horizon, v1 + jump + 1.0, 0.0)]).unwrap();
        let mut clocks = ClockField::new(seed, horizon).unwrap();
        let traj = simulate(&x0, &Wall::None, horizon, &mut clocks).unwrap();
        let env = wall_envelope(&traj, n, Some(&f), horizon).unwrap();

        let mut times: Vec<f64> = (0..=4000).map(|k| (horizon * k as f64 / 4000.0).min(horizon)).collect();
        for &tau in traj.jump_times(n).unwrap() {
            times.push(tau);
            times.push((tau - 1e-10).max(0.0));
        }
        for knot in f.breakpoints() {
            if knot <= horizon {
                times.push(horizon - knot);
                times.push((horizon - knot - 1e-10).max(0.0));
            }
        }
        let scan = times
            .iter()
            .map(|&t| traj.position_at(n, t).unwrap() as f64 + f.eval(horizon - t).unwrap())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(env <= scan + 1e-12);
        prop_assert!(scan - env < 1e-6, "envelope {env}, scan {scan}");
    }

    #[test]
    fn ecdf_matches_counting(xs in prop::collection::vec(-5.0f64..5.0, 1..60), probe in -6.0f64..6.0) {
        let e = Ecdf::new(&xs).unwrap();
        let n = xs.len() as f64;
        let le = xs.iter().filter(|&&x| x <= probe).count() as f64 / n;
        let lt = xs.iter().filter(|&&x| x < probe).count() as f64 / n;
        prop_assert!((e.eval(probe) - le).abs() < 1e-15);
        prop_assert!((e.eval_left(probe) - lt).abs() < 1e-15);
        prop_assert!((e.survival(probe) - (1.0 - le)).abs() < 1e-15);
    }

    #[test]
    fn ks_distance_matches_scan(
        xs in prop::collection::vec(-20i32..20, 1..40),
        ys in prop::collection::vec(-20i32..20, 1..40),
    ) {
        let a: Vec<f64> = xs.iter().map(|&x| x as f64 / 2.0).collect();
        let b: Vec<f64> = ys.iter().map(|&y| y as f64 / 2.0).collect();
        let (fa, fb) = (Ecdf::new(&a).unwrap(), Ecdf::new(&b).unwrap());
        // both empirical CDFs are constant between half-integers
        let scan = (-50..=50)
            .map(|k| {
                let x = k as f64 / 4.0;
                (fa.eval(x) - fb.eval(x)).abs()
            })
            .fold(0.0, f64::max);
        prop_assert!((ks_distance(&fa, &fb) - scan).abs() < 1e-15);
    }

    #[test]
    fn wilson_endpoints_solve_the_score_equation(n in 1u64..500, frac in 0.0f64..1.0, level in 0.8f64..0.999) {
        let k = ((n as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_ci(k, n, level).unwrap();
        let z = normal_quantile_by_bisection(0.5 + level / 2.0);
        let phat = k as f64 / n as f64;
        let score = |p: f64| (phat - p).powi(2) - z * z * p * (1.0 - p) / n as f64;
        let root = |mut a: f64, mut b: f64| {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if (score(a) > 0.0) == (score(m) > 0.0) { a = m } else { b = m }
            }
            0.5 * (a + b)
        };
        let want_lo = if k == 0 { 0.0 } else { root(0.0, phat) };
        let want_hi = if k == n { 1.0 } else { root(phat, 1.0) };
        prop_assert!((lo - want_lo).abs() < 1e-9, "{lo} vs {want_lo}");
        prop_assert!((hi - want_hi).abs() < 1e-9, "{hi} vs {want_hi}");
    }

    #[test]
    fn swaps_project_to_exclusion_moves(
        transpositions in prop::collection::vec((-6i64..6, -6i64..6), 0..20),
        word in prop::collection::vec(-8i64..8, 0..60),
        cutoff in -8i64..8,
    ) {
        let mut cfg = PermutationConfig::identity_on(-8, 8);
        for (a, b) in transpositions {
            cfg.transpose(a, b);
        }
        prop_assert!(cfg.is_consistent());
        let mut occ: Vec<bool> = (-9..=9).map(|z| cfg.colour_at(z) <= cutoff).collect();
        for &z in &word {
            cfg.apply_swap(z);
            let k = (z + 9) as usize;
            if occ[k] && !occ[k + 1] {
                occ.swap(k, k + 1);
            }
        }
        prop_assert!(cfg.is_consistent());
        let marginal = cfg.marginal(cutoff);
        for z in -9..=9 {
            prop_assert_eq!(marginal.is_occupied(z), occ[(z + 9) as usize], "site {}", z);
        }
    }

    #[test]
    fn inversion_is_an_involution(word in prop::collection::vec(-10i64..10, 0..40)) {
        let mut cfg = PermutationConfig::identity();
        SwapSequence(word).apply(&mut cfg);
        let back = cfg.invert().invert();
        prop_assert_eq!(&back, &cfg);
        for z in -12..12 {
            prop_assert_eq!(cfg.site_of(cfg.colour_at(z)), z);
        }
    }

    #[test]
    fn periodic_profile_balances_the_inflow(d in 1.0f64..8.0, horizon in 1.0f64..50.0) {
        let steps = 20_000;
        let h = 2.0 * horizon / steps as f64;
        let mut excess = 0.0;
        for k in 0..steps {
            let x = -horizon + (k as f64 + 0.5) * h;
            let initial = if x <= 0.0 { 1.0 / d } else { 0.0 };
            excess += (density_profile_periodic(x, horizon, d).unwrap() - initial) * h;
        }
        // density 1/d persists at -T, so current (1/d)(1 - 1/d) flows in from the left
        let inflow = horizon / d * (1.0 - 1.0 / d);
        prop_assert!((excess - inflow).abs() < 1e-3 * horizon, "excess {excess}, inflow {inflow}");
    }

    #[test]
    fn formulas_are_continuous_at_their_switch_points(alpha in 0.01f64..0.99, d in 1.0f64..6.0) {
        let b = 1.0 - alpha;
        let jump = (f0(b - 1e-9, alpha, 0.0).unwrap() - f0(b, alpha, 0.0).unwrap()).abs();
        prop_assert!(jump < 1e-6);
        let a = d.powi(-2);
        if a < 1.0 {
            let below = g_alpha_periodic(d, a).unwrap();
            let above = g_alpha_periodic(d, (a + 1e-12).min(0.999_999)).unwrap();
            prop_assert!((below - above).abs() < 1e-6);
        }
        let x = (1.0 - 2.0 / d) * 10.0;
        let left = density_profile_periodic(x, 10.0, d).unwrap();
        let right = density_profile_periodic(x + 1e-9, 10.0, d).unwrap();
        prop_assert!((left - right).abs() < 1e-6);
    }
}

// Normal quantile by bisection on an erfc-based CDF.
fn normal_quantile_by_bisection(p: f64) -> f64 {
    let cdf = |x: f64| 0.5 * erfc(-x / std::f64::consts::SQRT_2);
    let (mut a, mut b) = (-10.0, 10.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if cdf(m) < p { a = m } else { b = m }
    }
    0.5 * (a + b)
}

// erfc from the erf Taylor series near zero and a continued fraction in the tail.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        // Taylor series of erf
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x * x / k;
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() < 1e-17 {
                break;
            }
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        // Lentz continued fraction
        let mut f = x;
        let mut c = x;
        let mut dd = 0.0;
        for k in 1..300 {
            let a = k as f64 / 2.0;
            dd = x + a * dd;
            dd = 1.0 / dd;
            c = x + a / c;
            let delta = c * dd;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
    }
}

#[test]
fn clock_gaps_are_unit_exponential() {
    let mut clocks = ClockField::new(2024, 60.0).unwrap();
    let mut gaps = Vec::new();
    for z in -100..100 {
        let ev = clocks.site_events(z, 60.0).unwrap();
        let mut prev = 0.0;
        for &t in ev {
            gaps.push(t - prev);
            prev = t;
        }
    }
    let e = Ecdf::new(&gaps).unwrap();
    let d = ks_one_sample(&e, |x| 1.0 - (-x).exp());
    assert!(ks_pvalue(d, gaps.len()) > 1e-3, "KS distance {d} over {} gaps", gaps.len());
    let per_site = gaps.len() as f64 / 200.0;
    assert!((per_site - 60.0).abs() < 3.0, "mean count {per_site}");
}

#[test]
fn neighbouring_clocks_are_uncorrelated() {
    let mut clocks = ClockField::new(77, 4.0).unwrap();
    let counts: Vec<f64> = (-2000..2000)
        .map(|z| clocks.site_events(z, 4.0).unwrap().len() as f64)
        .collect();
    let m = counts.iter().sum::<f64>() / counts.len() as f64;
    let var = counts.iter().map(|c| (c - m).powi(2)).sum::<f64>() / counts.len() as f64;
    let cov = counts.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum::<f64>() / (counts.len() - 1) as f64;
    let corr = cov / var;
    // four standard errors of a null correlation over 4000 pairs
    assert!(corr.abs() < 4.0 / (counts.len() as f64).sqrt(), "lag-one correlation {corr}");
    assert!((var - 4.0).abs() < 0.5, "count variance {var}");
}

#[test]
fn clock_replicas_with_distinct_seeds_differ() {
    let mut a = ClockField::new(1, 10.0).unwrap();
    let mut b = ClockField::new(2, 10.0).unwrap();
    assert_ne!(a.site_events(0, 10.0).unwrap().to_vec(), b.site_events(0, 10.0).unwrap().to_vec());
}

#[test]
fn dkw_band_covers_at_its_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n, level, trials) = (200, 0.9, 2000);
    let band = dkw_band(n, level).unwrap();
    let mut misses = 0;
    for _ in 0..trials {
        let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let e = Ecdf::new(&xs).unwrap();
        if ks_one_sample(&e, |x| x.clamp(0.0, 1.0)) > band {
            misses += 1;
        }
    }
    // DKW is conservative, so the miss rate stays below 1 - level
    let rate = misses as f64 / trials as f64;
    assert!(rate <= 0.1 + 3.0 * (0.09f64 / trials as f64).sqrt(), "miss rate {rate}");
}

#[test]
fn decoupling_vanishes_for_an_independent_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 20_000;
    let draw = |rng: &mut ChaCha8Rng| -> f64 { -rng.random::<f64>().ln() };
    let x: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
    let y: Vec<f64> = (0..n).map(|_| 2.0 * draw(&mut rng)).collect();
    let min: Vec<f64> = (0..n).map(|_| draw(&mut rng).min(2.0 * draw(&mut rng))).collect();
    let grid: Vec<f64> = (0..60).map(|k| k as f64 * 0.05).collect();
    let disc = decoupling_check(&min, &x, &y, &grid).unwrap();
    assert!(disc < 0.03, "independent discrepancy {disc}");

    // a dependent pair breaks the product form: min(X, X) = X, not S_X^2
    let disc = decoupling_check(&x, &x, &x, &grid).unwrap();
    assert!(disc > 0.2, "dependent discrepancy {disc}");
}

#[test]
fn scaling_constants_at_reference_points() {
    let (c1, c2) = scaling_constants(0.25, 1.0).unwrap();
    // gap = 1/2: c1 = 4^(1/6) 2^(-2/3) = 2^(-1/3), c2 = 2 * 4^(1/3) * 2^(-1/3) = 2^(4/3)
    assert!((c1 - 2f64.powf(-1.0 / 3.0)).abs() < 1e-14);
    assert!((c2 - 2f64.powf(4.0 / 3.0)).abs() < 1e-14);
    let (t1, t2) = tagged_constants(0.25).unwrap();
    assert!((t1 - 0.5f64.powf(2.0 / 3.0) * 4f64.powf(1.0 / 6.0)).abs() < 1e-14);
    assert!((t2 - 2.0 * 0.25f64.powf(2.0 / 3.0) * 0.5f64.powf(1.0 / 3.0)).abs() < 1e-14);
    assert!(scaling_constants(0.5, 0.5).is_err());
}

// Every ring of every site in time order; a ring moves the particle on that
// site if the target is empty and the wall admits it.
fn naive_final(x0: &[i64], wall: &Wall, horizon: f64, clocks: &mut ClockField) -> Vec<i64> {
    let lo = *x0.last().unwrap();
    let hi = x0[0] + 80;
    let mut rings = Vec::new();
    for z in lo..hi {
        for &t in clocks.site_events(z, horizon).unwrap() {
            rings.push((t, z));
        }
    }
    rings.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut x = x0.to_vec();
    for (t, z) in rings {
        if let Some(k) = x.iter().position(|&p| p == z) {
            let free = k == 0 || x[k - 1] > z + 1;
            if free && wall.admits(k + 1, z, t) {
                x[k] += 1;
            }
        }
    }
    assert!(x[0] < hi - 1);
    x
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn event_driven_matches_per_ring_scan(
        seed in any::<u64>(),
        gaps in prop::collection::vec(1i64..4, 0..8),
        slope in 0.0f64..1.5,
        walled in any::<bool>(),
        horizon in 0.1f64..8.0,
    ) {
        let x0 = decreasing(&gaps, 0);
        let wall = if walled {
            Wall::right(PiecewiseFn::from_triples(&[(0.0, 0.0, 0.0), (horizon, slope * horizon, 0.0)]).unwrap()).unwrap()
        } else {
            Wall::None
        };
        let mut clocks = ClockField::new(seed, horizon).unwrap();
        let fast = simulate(&x0, &wall, horizon, &mut clocks).unwrap().final_positions();
        prop_assert_eq!(fast, naive_final(&x0, &wall, horizon, &mut clocks));
    }
}
