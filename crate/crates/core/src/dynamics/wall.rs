use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One breakpoint of a [`PiecewiseFn`]: `f(t-) = left`, `f(t) = left + jump`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub t: f64,
    pub left: f64,
    #[serde(default)]
    pub jump: f64,
}

impl Knot {
    pub fn right(&self) -> f64 {
        self.left + self.jump
    }
}

/// Nondecreasing càdlàg function on `[0, ∞)`, linear between knots and
/// constant after the last one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "Vec<(f64, f64, f64)>")]
pub struct PiecewiseFn {
    knots: Vec<Knot>,
}

impl From<PiecewiseFn> for Vec<(f64, f64, f64)> {
    fn from(f: PiecewiseFn) -> Self {
        f.knots.iter().map(|k| (k.t, k.left, k.jump)).collect()
    }
}

impl<'de> Deserialize<'de> for PiecewiseFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pair(f64, f64),
            Triple(f64, f64, f64),
        }
        let raw: Vec<Raw> = Vec::deserialize(d)?;
        let knots = raw
            .into_iter()
            .map(|r| match r {
                Raw::Pair(t, left) => Knot { t, left, jump: 0.0 },
                Raw::Triple(t, left, jump) => Knot { t, left, jump },
            })
            .collect();
        PiecewiseFn::new(knots).map_err(serde::de::Error::custom)
    }
}

impl PiecewiseFn {
    pub fn new(knots: Vec<Knot>) -> Result<Self> {
        let first = knots.first().ok_or(Error::Empty("wall breakpoints"))?;
        if first.t != 0.0 {
            return Err(Error::Domain(format!("first breakpoint must be at t = 0, got {}", first.t)));
        }
        for k in &knots {
            if !(k.t.is_finite() && k.left.is_finite() && k.jump.is_finite()) {
                return Err(Error::Domain("wall breakpoints must be finite".into()));
            }
            if k.jump < 0.0 {
                return Err(Error::Domain(format!("negative jump {} at t = {}", k.jump, k.t)));
            }
        }
        for w in knots.windows(2) {
            if w[1].t <= w[0].t {
                return Err(Error::Domain("breakpoint times must be strictly increasing".into()));
            }
            if w[1].left < w[0].right() {
                return Err(Error::Domain(format!("wall decreases on [{}, {}]", w[0].t, w[1].t)));
            }
        }
        Ok(Self { knots })
    }

    /// Builds from `(t, value, jump)` triples.
    pub fn from_triples(points: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            points
                .iter()
                .map(|&(t, left, jump)| Knot { t, left, jump })
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            knots: vec![Knot { t: 0.0, left: c, jump: 0.0 }],
        }
    }

    /// `f(t) = slope * min(t, until)`.
    pub fn ramp(slope: f64, until: f64) -> Result<Self> {
        Self::from_triples(&[(0.0, 0.0, 0.0), (until, slope * until, 0.0)])
    }

    /// The wall with slope 2/3 up to 0.35T, a jump of T/120, then slope 1/2.
    pub fn example_wall(horizon: f64) -> Result<Self> {
        let t1 = 0.35 * horizon;
        let before = 2.0 / 3.0 * t1;
        let after = horizon / 15.0 + 0.5 * t1;
        Self::from_triples(&[
            (0.0, 0.0, 0.0),
            (t1, before, after - before),
            (horizon, horizon / 15.0 + 0.5 * horizon, 0.0),
        ])
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    /// Knot times, ascending.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots.iter().map(|k| k.t)
    }

    /// Same function shifted up by `c`.
    pub fn offset(&self, c: f64) -> Self {
        Self {
            knots: self
                .knots
                .iter()
                .map(|k| Knot { left: k.left + c, ..*k })
                .collect(),
        }
    }

    fn check(t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::Domain(format!("wall evaluated at t = {t}")));
        }
        Ok(())
    }

    /// Right-continuous value `f(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Self::check(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        let k = self.knots.partition_point(|k| k.t <= t) - 1;
        let here = &self.knots[k];
        if t == here.t {
            return here.right();
        }
        match self.knots.get(k + 1) {
            None => here.right(),
            Some(next) => {
                let w = (t - here.t) / (next.t - here.t);
                here.right() + w * (next.left - here.right())
            }
        }
    }

    /// Left limit `f(t-)`; at `t = 0` this is `f(0-) := left value of the first knot`.
    pub fn left_limit(&self, t: f64) -> Result<f64> {
        Self::check(t)?;
        let idx = self.knots.partition_point(|k| k.t < t);
        match self.knots.get(idx) {
            Some(k) if k.t == t => Ok(k.left),
            _ => Ok(self.eval_unchecked(t)),
        }
    }

    /// Smallest `t ≥ 0` with `f(t) ≥ level`, if any.
    pub fn first_reach(&self, level: f64) -> Option<f64> {
        for (i, k) in self.knots.iter().enumerate() {
            if k.right() >= level {
                return Some(k.t);
            }
            if let Some(next) = self.knots.get(i + 1) {
                if next.left >= level {
                    let t = k.t + (level - k.right()) / (next.left - k.right()) * (next.t - k.t);
                    // guard against rounding pushing the crossing outside the piece
                    return Some(t.clamp(k.t, next.t));
                }
            }
        }
        None
    }
}

/// Constraint applied to attempted jumps.
#[derive(Debug, Clone, PartialEq)]
pub enum Wall {
    None,
    /// Particle 1 may move to `z + 1` only if `z + 1 ≤ f(t)`.
    Right(PiecewiseFn),
    /// Any particle at `z` may jump only if `z ≥ offset − f(reflect − t)`.
    MinSite {
        offset: i64,
        f: PiecewiseFn,
        reflect: f64,
    },
}

impl Wall {
    pub fn right(f: PiecewiseFn) -> Result<Self> {
        let f0 = f.eval_unchecked(0.0);
        if f0 != 0.0 {
            return Err(Error::Domain(format!("right wall needs f(0) = 0, got {f0}")));
        }
        Ok(Wall::Right(f))
    }

    /// The wall value at `t`; `+∞` without a right wall.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Wall::Right(f) => f.eval(t),
            _ => {
                PiecewiseFn::check(t)?;
                Ok(f64::INFINITY)
            }
        }
    }

    /// Whether a particle with the given label (1-based) at `z` may jump at `t`.
    #[inline]
    pub fn admits(&self, label: usize, z: i64, t: f64) -> bool {
        match self {
            Wall::None => true,
            Wall::Right(f) => label != 1 || (z + 1) as f64 <= f.eval_unchecked(t),
            Wall::MinSite { offset, f, reflect } => {
                let m = *offset as f64 - f.eval_unchecked((reflect - t).max(0.0));
                z as f64 >= m
            }
        }
    }
}
