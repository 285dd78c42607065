//! Permutation-valued TASEP: swap operators, colour-position symmetry and
//! the involution used to match general initial conditions to step.

use std::ops::RangeInclusive;

use crate::clockfield::ClockField;
use crate::dynamics::initial::check_decreasing;
use crate::error::{Error, Result};

/// A bijection of ℤ (site → colour) equal to the identity outside `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct PermutationConfig {
    lo: i64,
    forward: Vec<i64>,
    inverse: Vec<i64>,
}

impl PermutationConfig {
    pub fn identity() -> Self {
        Self {
            lo: 0,
            forward: Vec::new(),
            inverse: Vec::new(),
        }
    }

    pub fn identity_on(lo: i64, hi: i64) -> Self {
        let mut cfg = Self::identity();
        cfg.ensure(lo);
        cfg.ensure(hi);
        cfg
    }

    /// Builds from the colours of sites `lo, lo+1, ...`; must permute that window.
    pub fn from_colours(lo: i64, colours: Vec<i64>) -> Result<Self> {
        let n = colours.len();
        let mut inverse = vec![i64::MIN; n];
        for (k, &c) in colours.iter().enumerate() {
            let idx = c - lo;
            if idx < 0 || idx as usize >= n || inverse[idx as usize] != i64::MIN {
                return Err(Error::Precondition(format!(
                    "colours do not permute the window starting at {lo}"
                )));
            }
            inverse[idx as usize] = lo + k as i64;
        }
        Ok(Self {
            lo,
            forward: colours,
            inverse,
        })
    }

    /// Current window `(lo, hi)`; `None` while still the bare identity.
    pub fn window(&self) -> Option<(i64, i64)> {
        if self.forward.is_empty() {
            None
        } else {
            Some((self.lo, self.lo + self.forward.len() as i64 - 1))
        }
    }

    fn slot(&self, z: i64) -> Option<usize> {
        let k = z - self.lo;
        (k >= 0 && (k as usize) < self.forward.len()).then_some(k as usize)
    }

    pub fn colour_at(&self, z: i64) -> i64 {
        self.slot(z).map_or(z, |k| self.forward[k])
    }

    pub fn site_of(&self, colour: i64) -> i64 {
        self.slot(colour).map_or(colour, |k| self.inverse[k])
    }

    /// Grows the window to contain `z`, filling with identity colours.
    fn ensure(&mut self, z: i64) {
        if self.forward.is_empty() {
            self.lo = z;
            self.forward.push(z);
            self.inverse.push(z);
            return;
        }
        if z < self.lo {
            let fill: Vec<i64> = (z..self.lo).collect();
            self.forward.splice(0..0, fill.iter().copied());
            self.inverse.splice(0..0, fill);
            self.lo = z;
        }
        let hi = self.lo + self.forward.len() as i64 - 1;
        if z > hi {
            self.forward.extend(hi + 1..=z);
            self.inverse.extend(hi + 1..=z);
        }
    }

    /// Swap operator at `(z, z+1)`: exchanges the colours iff `cfg(z) < cfg(z+1)`.
    /// Returns whether a swap happened.
    pub fn apply_swap(&mut self, z: i64) -> bool {
        if self.colour_at(z) < self.colour_at(z + 1) {
            self.transpose(z, z + 1);
            true
        } else {
            false
        }
    }

    /// Unconditional exchange of the colours at `a` and `b`.
    pub fn transpose(&mut self, a: i64, b: i64) {
        self.ensure(a);
        self.ensure(b);
        let (ka, kb) = ((a - self.lo) as usize, (b - self.lo) as usize);
        self.forward.swap(ka, kb);
        let (ca, cb) = (self.forward[ka], self.forward[kb]);
        self.inverse[(ca - self.lo) as usize] = a;
        self.inverse[(cb - self.lo) as usize] = b;
    }

    pub fn invert(&self) -> Self {
        Self {
            lo: self.lo,
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `forward ∘ inverse = id` on the window and colours stay inside it.
    pub fn is_consistent(&self) -> bool {
        self.forward.len() == self.inverse.len()
            && self.forward.iter().enumerate().all(|(k, &c)| {
                self.slot(c)
                    .is_some_and(|j| self.inverse[j] == self.lo + k as i64)
            })
    }

    /// Sites whose colour is `≤ cutoff`.
    pub fn marginal(&self, cutoff: i64) -> Occupancy {
        Occupancy {
            lo: self.lo,
            occupied: self.forward.iter().map(|&c| c <= cutoff).collect(),
            cutoff,
        }
    }
}

impl PartialEq for PermutationConfig {
    fn eq(&self, other: &Self) -> bool {
        let bounds = [self.window(), other.window()];
        let lo = bounds.iter().flatten().map(|w| w.0).min();
        let hi = bounds.iter().flatten().map(|w| w.1).max();
        match (lo, hi) {
            (Some(lo), Some(hi)) => (lo..=hi).all(|z| self.colour_at(z) == other.colour_at(z)),
            _ => true,
        }
    }
}

impl Eq for PermutationConfig {}

/// A set of occupied sites: explicit inside a window, `z ≤ cutoff` outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    lo: i64,
    occupied: Vec<bool>,
    cutoff: i64,
}

impl Occupancy {
    pub fn is_occupied(&self, z: i64) -> bool {
        let k = z - self.lo;
        if k >= 0 && (k as usize) < self.occupied.len() {
            self.occupied[k as usize]
        } else {
            z <= self.cutoff
        }
    }

    /// The `n` rightmost occupied sites, descending.
    pub fn rightmost(&self, n: usize) -> Vec<i64> {
        let hi = self.lo + self.occupied.len() as i64 - 1;
        let mut z = hi.max(self.cutoff);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            if self.is_occupied(z) {
                out.push(z);
            }
            z -= 1;
        }
        out
    }
}

/// Ordered list of swap sites; `z` stands for the pair `(z, z+1)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwapSequence(pub Vec<i64>);

impl SwapSequence {
    /// Applies the swap operators in list order.
    pub fn apply(&self, cfg: &mut PermutationConfig) {
        for &z in &self.0 {
            cfg.apply_swap(z);
        }
    }

    /// Applies plain adjacent transpositions in list order.
    pub fn apply_transpositions(&self, cfg: &mut PermutationConfig) {
        for &z in &self.0 {
            cfg.transpose(z, z + 1);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Runs the multi-species dynamics on the clocks of `sites`, applying the swap at
/// `(z, z+1)` at each ring of `z` for which `admissible(z, t)` holds. `observe`
/// sees the configuration after every applied ring.
pub fn simulate_multi_observed<A, O>(
    cfg0: &PermutationConfig,
    sites: RangeInclusive<i64>,
    mut admissible: A,
    horizon: f64,
    clocks: &mut ClockField,
    mut observe: O,
) -> Result<PermutationConfig>
where
    A: FnMut(i64, f64) -> bool,
    O: FnMut(f64, i64, &PermutationConfig),
{
    if !(horizon >= 0.0 && horizon <= clocks.horizon()) {
        return Err(Error::Range {
            requested: horizon,
            horizon: clocks.horizon(),
        });
    }
    let mut events = Vec::new();
    for z in sites {
        for &t in clocks.site_events(z, horizon)? {
            events.push((t, z));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut cfg = cfg0.clone();
    for (t, z) in events {
        if admissible(z, t) {
            cfg.apply_swap(z);
            observe(t, z, &cfg);
        }
    }
    Ok(cfg)
}

pub fn simulate_multi<A>(
    cfg0: &PermutationConfig,
    sites: RangeInclusive<i64>,
    admissible: A,
    horizon: f64,
    clocks: &mut ClockField,
) -> Result<PermutationConfig>
where
    A: FnMut(i64, f64) -> bool,
{
    simulate_multi_observed(cfg0, sites, admissible, horizon, clocks, |_, _, _| {})
}

/// Applies `seq` to the identity in order, and compares with the inverse of the
/// reversed word applied to the identity.
pub fn colour_position_check(seq: &SwapSequence) -> bool {
    let mut forward = PermutationConfig::identity();
    seq.apply(&mut forward);
    let mut reversed = PermutationConfig::identity();
    for &z in seq.0.iter().rev() {
        reversed.apply_swap(z);
    }
    forward == reversed.invert()
}

/// Adjacent swaps `b-1, b-2, ..., a, a+1, ..., b-1`, exchanging `a < b`.
fn exchange_word(a: i64, b: i64, out: &mut Vec<i64>) {
    out.extend((a..b).rev());
    out.extend(a + 1..b);
}

/// The swap word and `π(id)` that turn step initial data into `u` on the
/// sites `≥ u_n`, for colours `≤ u_n + n - 1` read as particles.
pub fn build_pi(u: &[i64], n: usize) -> Result<(SwapSequence, PermutationConfig)> {
    if n == 0 || u.len() < n {
        return Err(Error::Precondition(format!("need n >= 1 positions, got n = {n}, {} given", u.len())));
    }
    let u = &u[..n];
    check_decreasing(u)?;
    if u[0] > 0 {
        return Err(Error::Precondition(format!("rightmost position {} must be <= 0", u[0])));
    }
    if n == 1 {
        return Ok((SwapSequence::default(), PermutationConfig::identity()));
    }
    // 1-based access u_i
    let at = |i: i64| u[(i - 1) as usize];
    let n_i = n as i64;
    let target = at(n_i) + n_i - 1;
    let k = (0..n_i - 1)
        .find(|&k| at(n_i - k) < target && target <= at(n_i - k - 1))
        .expect("strictly decreasing positions always bracket the target");

    let mut word = Vec::new();
    let mut pi = PermutationConfig::identity();
    for j in 0..=k {
        let upper = if j < k {
            at(n_i - j - 1) - at(n_i - j) - 2
        } else {
            target - at(n_i - k) - 1
        };
        for i in 0..=upper {
            let a = at(n_i - j) + 1 + i;
            let b = at(1 + at(n_i - j) - at(n_i) - j + i);
            if a == b {
                continue;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            exchange_word(lo, hi, &mut word);
            pi.transpose(lo, hi);
        }
    }
    Ok((SwapSequence(word), pi))
}

/// Outcome of checking the hole-moving exchange on one occupancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeOutcome {
    HypothesisNotMet,
    Holds,
    Fails,
}

/// Applies the exchange word for `(a, b)` to an occupancy of `{a, ..., b}`
/// (`true` = particle, particles move right past holes) and checks that the
/// hole count in `{a, ..., x}` grows by one, `a` becomes a hole and `b` a particle.
pub fn exchange_check(occ: &[bool], a: i64, b: i64, x: i64) -> ExchangeOutcome {
    let width = b - a + 1;
    if !(a <= x && x < b) || occ.len() as i64 != width {
        return ExchangeOutcome::HypothesisNotMet;
    }
    let split = (x - a + 1) as usize;
    let particle_left = occ[..split].iter().any(|&p| p);
    let hole_right = occ[split..].iter().any(|&p| !p);
    if !(particle_left && hole_right) {
        return ExchangeOutcome::HypothesisNotMet;
    }
    let holes_before = occ[..split].iter().filter(|&&p| !p).count();
    let mut cfg = occ.to_vec();
    let mut word = Vec::new();
    exchange_word(a, b, &mut word);
    for z in word {
        let k = (z - a) as usize;
        if cfg[k] && !cfg[k + 1] {
            cfg.swap(k, k + 1);
        }
    }
    let holes_after = cfg[..split].iter().filter(|&&p| !p).count();
    if holes_after == holes_before + 1 && !cfg[0] && cfg[(width - 1) as usize] {
        ExchangeOutcome::Holds
    } else {
        ExchangeOutcome::Fails
    }
}
