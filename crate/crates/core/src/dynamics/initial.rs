use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Initial particle configurations, rightmost particle first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `x_n = offset - (n - 1)`.
    Step {
        #[serde(default)]
        offset: i64,
    },
    Explicit { positions: Vec<i64> },
    /// `x_n = -floor(d (n - 1))`.
    HalfPeriodic { d: f64 },
    /// Particle 1 pinned at 0, each site below occupied independently with probability `rho`.
    HalfBernoulli { rho: f64 },
    /// Bernoulli(`rho`) restricted to sites `≤ 0`; the `n_max` particles must fit in
    /// the `window` sites `{-window+1, ..., 0}`.
    Stationary { rho: f64, window: u64 },
}

impl InitialCondition {
    pub fn step() -> Self {
        InitialCondition::Step { offset: 0 }
    }

    pub fn is_random(&self) -> bool {
        matches!(
            self,
            InitialCondition::HalfBernoulli { .. } | InitialCondition::Stationary { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialCondition::Step { .. } => Ok(()),
            InitialCondition::Explicit { positions } => check_decreasing(positions),
            InitialCondition::HalfPeriodic { d } => {
                if d.is_finite() && *d >= 1.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("half-periodic spacing d = {d} must be >= 1")))
                }
            }
            InitialCondition::HalfBernoulli { rho } | InitialCondition::Stationary { rho, .. } => {
                if *rho > 0.0 && *rho < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("density rho = {rho} must lie in (0, 1)")))
                }
            }
        }
    }

    /// First `n_max` positions. Deterministic variants ignore `seed`.
    pub fn materialize(&self, n_max: usize, seed: u64) -> Result<Vec<i64>> {
        if n_max == 0 {
            return Err(Error::Precondition("n_max must be at least 1".into()));
        }
        self.validate()?;
        let out = match self {
            InitialCondition::Step { offset } => (0..n_max as i64).map(|k| offset - k).collect(),
            InitialCondition::Explicit { positions } => {
                if positions.len() < n_max {
                    return Err(Error::Precondition(format!(
                        "explicit initial condition has {} particles, {n_max} requested",
                        positions.len()
                    )));
                }
                positions[..n_max].to_vec()
            }
            InitialCondition::HalfPeriodic { d } => (0..n_max)
                .map(|k| -((d * k as f64).floor() as i64))
                .collect(),
            InitialCondition::HalfBernoulli { rho } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                geometric_chain(0, *rho, n_max, &mut rng)?
            }
            InitialCondition::Stationary { rho, window } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let gaps = Geometric::new(*rho).map_err(|e| Error::Domain(e.to_string()))?;
                let first = -(gaps.sample(&mut rng) as i64);
                let out = geometric_chain(first, *rho, n_max, &mut rng)?;
                let lowest = *out.last().unwrap();
                if lowest <= -(*window as i64) {
                    return Err(Error::OutOfRange(format!(
                        "{n_max} stationary particles reach site {lowest}, outside window of {window} sites"
                    )));
                }
                out
            }
        };
        Ok(out)
    }
}

fn geometric_chain(first: i64, rho: f64, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<i64>> {
    let gaps = Geometric::new(rho).map_err(|e| Error::Domain(e.to_string()))?;
    let mut out = Vec::with_capacity(n);
    let mut x = first;
    out.push(x);
    for _ in 1..n {
        x -= 1 + gaps.sample(rng) as i64;
        out.push(x);
    }
    Ok(out)
}

pub(crate) fn check_decreasing(positions: &[i64]) -> Result<()> {
    if let Some(w) = positions.windows(2).find(|w| w[1] >= w[0]) {
        return Err(Error::Precondition(format!(
            "positions must be strictly decreasing, found {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}
