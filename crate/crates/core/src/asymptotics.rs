//! Closed-form scaling constants, limit-law tables and rescaling of
//! simulation output to fluctuation coordinates.

use serde::Serialize;

use crate::dynamics::PiecewiseFn;
use crate::error::{Error, Result};

/// Tolerance for recognising the special parameter values of the regime tables.
pub const TABLE_TOL: f64 = 1e-12;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha = {alpha} must lie in (0, 1)")))
    }
}

fn check_positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("T = {t} must be positive")))
    }
}

/// Macroscopic position of the wall that exactly touches the tagged particle's
/// trajectory: `ξ - sqrt(1-β)(sqrt(1-β) - 2 sqrt(α))` before `1-α`, then `ξ + α`.
pub fn f0(beta: f64, alpha: f64, xi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta = {beta} outside [0, 1]")));
    }
    check_alpha(alpha)?;
    if beta < 1.0 - alpha {
        let r = (1.0 - beta).sqrt();
        Ok(xi - r * (r - 2.0 * alpha.sqrt()))
    } else {
        Ok(xi + alpha)
    }
}

/// `(c_1^i, c_2^i)` for influence time `α_i` of the label `αT`.
pub fn scaling_constants(alpha: f64, alpha_i: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    if !(alpha_i > alpha && alpha_i <= 1.0) {
        return Err(Error::Degenerate { alpha, alpha_i });
    }
    let gap = alpha_i.sqrt() - alpha.sqrt();
    let c1 = alpha.powf(-1.0 / 6.0) * alpha_i.powf(1.0 / 6.0) * gap.powf(2.0 / 3.0);
    let c2 = 2.0 * alpha.powf(-1.0 / 3.0) * alpha_i.powf(5.0 / 6.0) * gap.powf(1.0 / 3.0);
    Ok((c1, c2))
}

/// Centring `μ^i(τ, T)` of the wall near time `α_i T`.
pub fn mu(alpha: f64, alpha_i: f64, tau: f64, horizon: f64) -> Result<f64> {
    scaling_constants(alpha, alpha_i)?;
    let (sa, si) = (alpha.sqrt(), alpha_i.sqrt());
    Ok(si * (si - 2.0 * sa) * horizon
        - 2.0 * tau * alpha.powf(-1.0 / 3.0) * alpha_i.powf(1.0 / 3.0) * (si - sa).powf(4.0 / 3.0)
            * horizon.powf(2.0 / 3.0))
}

/// Tagged-particle constants `(c_1, ĉ_2)` of step TASEP at label `αT`.
pub fn tagged_constants(alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let s = alpha.sqrt();
    let c1 = (1.0 - s).powf(2.0 / 3.0) * alpha.powf(-1.0 / 6.0);
    let c2hat = 2.0 * alpha.powf(2.0 / 3.0) * (1.0 - s).powf(1.0 / 3.0);
    Ok((c1, c2hat))
}

/// Constants `(c_1, ĉ_2)` attached to density `1/d` initial data.
pub fn periodic_constants(d: f64) -> Result<(f64, f64)> {
    if !(d > 1.0 && d.is_finite()) {
        return Err(Error::Domain(format!("d = {d} must exceed 1")));
    }
    let c1 = (1.0 - 1.0 / d).powf(2.0 / 3.0) * d.powf(1.0 / 3.0);
    let c2hat = 2.0 * d.powf(-4.0 / 3.0) * (1.0 - 1.0 / d).powf(1.0 / 3.0);
    Ok((c1, c2hat))
}

/// Label `αT` with its macroscopic position `ξ` and the wall influence times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingContext {
    pub alpha: f64,
    pub d: Option<f64>,
    pub xi: f64,
    pub influence: Vec<f64>,
}

impl ScalingContext {
    pub fn new(alpha: f64, d: Option<f64>, xi: f64, influence: Vec<f64>) -> Result<Self> {
        check_alpha(alpha)?;
        if let Some(d) = d {
            if !(d >= 1.0 && d.is_finite()) {
                return Err(Error::Domain(format!("d = {d} must be >= 1")));
            }
        }
        if influence.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("influence times must be strictly increasing".into()));
        }
        for &a in &influence {
            scaling_constants(alpha, a)?;
        }
        Ok(Self { alpha, d, xi, influence })
    }

    fn influence_at(&self, i: usize) -> Result<f64> {
        self.influence
            .get(i)
            .copied()
            .ok_or_else(|| Error::OutOfRange(format!("no influence time with index {i}")))
    }

    pub fn constants(&self, i: usize) -> Result<(f64, f64)> {
        scaling_constants(self.alpha, self.influence_at(i)?)
    }

    pub fn mu(&self, i: usize, tau: f64, horizon: f64) -> Result<f64> {
        mu(self.alpha, self.influence_at(i)?, tau, horizon)
    }

    pub fn tagged_constants(&self) -> Result<(f64, f64)> {
        tagged_constants(self.alpha)
    }

    /// Wall time `T - t = (1-α_i)T + c_2^i τ T^{2/3}` probed at parameter `τ`.
    pub fn wall_time(&self, i: usize, tau: f64, horizon: f64) -> Result<f64> {
        let (_, c2) = self.constants(i)?;
        Ok((1.0 - self.influence_at(i)?) * horizon + c2 * tau * horizon.powf(2.0 / 3.0))
    }
}

/// Sampled wall fluctuation profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GtProfile {
    pub tau: Vec<f64>,
    pub g: Vec<f64>,
    /// `min_τ (g(τ) - τ²/2)` over the grid; a finite value is the lower constant in
    /// the quadratic growth bound `g ≥ -M + τ²/2` with `M = -min_excess`.
    pub min_excess: f64,
}

/// `g_T^i(τ) = τ² - (ξT - μ^i(τ,T) - f((1-α_i)T + c_2^i τ T^{2/3})) / (c_1^i T^{1/3})`.
pub fn wall_to_gt(
    f: &PiecewiseFn,
    ctx: &ScalingContext,
    i: usize,
    horizon: f64,
    grid: &[f64],
) -> Result<GtProfile> {
    check_positive_time(horizon)?;
    let (c1, _) = ctx.constants(i)?;
    let scale = c1 * horizon.powf(1.0 / 3.0);
    let mut g = Vec::with_capacity(grid.len());
    for &tau in grid {
        let wall = f.eval(ctx.wall_time(i, tau, horizon)?)?;
        let m = ctx.mu(i, tau, horizon)?;
        g.push(tau * tau - (ctx.xi * horizon - m - wall) / scale);
    }
    let min_excess = grid
        .iter()
        .zip(&g)
        .map(|(t, g)| g - 0.5 * t * t)
        .fold(f64::INFINITY, f64::min);
    Ok(GtProfile {
        tau: grid.to_vec(),
        g,
        min_excess,
    })
}

/// How labels are read off the initial data when forming `y_T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum YMode {
    /// Labels `1 + ĉ_2 τ T^{2/3}`, `τ ≥ 0`, with the tagged constants at `α`.
    Tagged { alpha: f64, d: f64 },
    /// Labels `(α - d^{-2})T + ĉ_2 τ T^{2/3}` with the density-`1/d` constants.
    Shifted { alpha: f64, d: f64 },
}

fn floor_label(x: f64) -> i64 {
    // absorb representation error in products like 0.1 * 10
    (x + 1e-9).floor() as i64
}

/// Rescaled initial data `y_T` on `grid`; `ic` lists positions by label from 1.
pub fn ic_to_yt(ic: &[i64], mode: YMode, horizon: f64, grid: &[f64]) -> Result<Vec<f64>> {
    check_positive_time(horizon)?;
    let t13 = horizon.powf(1.0 / 3.0);
    let t23 = horizon.powf(2.0 / 3.0);
    let fetch = |label: i64| -> Result<f64> {
        if label < 1 || label as usize > ic.len() {
            return Err(Error::OutOfRange(format!(
                "label {label} needed but {} positions given",
                ic.len()
            )));
        }
        Ok(ic[label as usize - 1] as f64)
    };
    match mode {
        YMode::Tagged { alpha, d } => {
            let (c1, c2hat) = tagged_constants(alpha)?;
            grid.iter()
                .map(|&tau| {
                    if tau < 0.0 {
                        return Err(Error::Domain(format!("tau = {tau} must be >= 0")));
                    }
                    let j = floor_label(c2hat * tau * t23);
                    Ok((fetch(1 + j)? + d * j as f64) / (c1 * t13))
                })
                .collect()
        }
        YMode::Shifted { alpha, d } => {
            check_alpha(alpha)?;
            let (c1, c2hat) = periodic_constants(d)?;
            if alpha <= d.powi(-2) {
                return Err(Error::Domain(format!("alpha = {alpha} must exceed d^-2 = {}", d.powi(-2))));
            }
            grid.iter()
                .map(|&tau| {
                    let l = floor_label((alpha - d.powi(-2)) * horizon + c2hat * tau * t23);
                    Ok((fetch(l)? + d * l as f64) / (c1 * t13))
                })
                .collect()
        }
    }
}

/// Macroscopic position `g_α` of label `αT` for half-`d`-periodic data without wall.
pub fn g_alpha_periodic(d: f64, alpha: f64) -> Result<f64> {
    if !(d >= 1.0 && d.is_finite()) {
        return Err(Error::Domain(format!("d = {d} must be >= 1")));
    }
    check_alpha(alpha)?;
    if alpha <= d.powi(-2) {
        Ok(1.0 - 2.0 * alpha.sqrt())
    } else {
        Ok(1.0 - 1.0 / d - d * alpha)
    }
}

/// Hydrodynamic density at `x` and time `T` from half-`d`-periodic data.
pub fn density_profile_periodic(x: f64, horizon: f64, d: f64) -> Result<f64> {
    check_positive_time(horizon)?;
    if !(d >= 1.0 && d.is_finite()) {
        return Err(Error::Domain(format!("d = {d} must be >= 1")));
    }
    Ok(if x <= (1.0 - 2.0 / d) * horizon {
        1.0 / d
    } else if x < horizon {
        0.5 * (1.0 - x / horizon)
    } else {
        0.0
    })
}

/// `(ρ_r, bound on ρ_l) = (sqrt(α/α_0), sqrt(α/α_n))`.
pub fn shock_densities(alpha: f64, alpha0: f64, alpha_n: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    if !(alpha <= alpha0 && alpha0 <= alpha_n && alpha_n <= 1.0) {
        return Err(Error::Domain(format!(
            "need alpha <= alpha_0 <= alpha_n <= 1, got {alpha}, {alpha0}, {alpha_n}"
        )));
    }
    Ok(((alpha / alpha0).sqrt(), (alpha / alpha_n).sqrt()))
}

/// Limit law family of a regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Gue,
    Goe,
    GoeProduct,
    Airy2To1,
}

/// One row of the regime table for the kinked example wall.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regime {
    pub xi: f64,
    pub law: Law,
    /// Argument multipliers: the law is evaluated at `scales[k] * S` (one per factor).
    pub scales: Vec<f64>,
    /// Wall influence times `α_0 < ... < α_n`; empty when the wall is not felt.
    pub influence: Vec<f64>,
    pub label: String,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= TABLE_TOL
}

/// `α_d = (13d - 30) / (30 (d-2) d)`, the boundary label for `d ≥ 4`.
pub fn alpha_d(d: f64) -> f64 {
    (13.0 * d - 30.0) / (30.0 * (d - 2.0) * d)
}

fn c1_of(alpha: f64) -> f64 {
    alpha.powf(-1.0 / 6.0) * (1.0 - alpha.sqrt()).powf(2.0 / 3.0)
}

fn step_regime(alpha: f64) -> Regime {
    let tenth = 0.1;
    let ninth = 1.0 / 9.0;
    if near(alpha, tenth) {
        Regime {
            xi: 11.0 / 30.0,
            law: Law::GoeProduct,
            scales: vec![(2.0 / alpha).powf(1.0 / 3.0), (3.0 * alpha).powf(-1.0 / 3.0)],
            influence: vec![4.0 * alpha, 9.0 * alpha],
            label: "F_GOE((2/a)^(1/3) S) F_GOE((3a)^(-1/3) S)".into(),
        }
    } else if near(alpha, ninth) {
        Regime {
            xi: 1.0 / 3.0,
            law: Law::Airy2To1,
            scales: vec![2f64.powf(-2.0 / 3.0) * 3f64.powf(1.0 / 3.0)],
            influence: vec![1.0],
            label: "F_2->1;0(2^(-2/3) 3^(1/3) S)".into(),
        }
    } else if alpha < tenth {
        Regime {
            xi: 17.0 / 30.0 - 2.0 * alpha,
            law: Law::Goe,
            scales: vec![(2.0 / alpha).powf(1.0 / 3.0)],
            influence: vec![4.0 * alpha],
            label: "F_GOE((2/a)^(1/3) S)".into(),
        }
    } else if alpha < ninth {
        Regime {
            xi: 2.0 / 3.0 - 3.0 * alpha,
            law: Law::Goe,
            scales: vec![(3.0 * alpha).powf(-1.0 / 3.0)],
            influence: vec![9.0 * alpha],
            label: "F_GOE((3a)^(-1/3) S)".into(),
        }
    } else {
        Regime {
            xi: 1.0 - 2.0 * alpha.sqrt(),
            law: Law::Gue,
            scales: vec![1.0 / c1_of(alpha)],
            influence: vec![],
            label: "F_GUE(c1(a)^(-1) S)".into(),
        }
    }
}

/// Wall-free half-`d`-periodic limit laws.
fn periodic_regime(d: f64, alpha: f64) -> Result<Regime> {
    let xi = g_alpha_periodic(d, alpha)?;
    let edge = d.powi(-2);
    let scale_gue = (1.0 - alpha.sqrt()).powf(-2.0 / 3.0) * alpha.powf(1.0 / 6.0);
    Ok(if near(alpha, edge) {
        Regime {
            xi,
            law: Law::Airy2To1,
            scales: vec![scale_gue],
            influence: vec![],
            label: "F_2->1;0((1-sqrt(a))^(-2/3) a^(1/6) S)".into(),
        }
    } else if alpha < edge {
        Regime {
            xi,
            law: Law::Gue,
            scales: vec![scale_gue],
            influence: vec![],
            label: "F_GUE((1-sqrt(a))^(-2/3) a^(1/6) S)".into(),
        }
    } else {
        Regime {
            xi,
            law: Law::Goe,
            scales: vec![2f64.powf(2.0 / 3.0) * (1.0 - 1.0 / d).powf(-2.0 / 3.0) * d.powf(-1.0 / 3.0)],
            influence: vec![],
            label: "F_GOE(2^(2/3) (1-1/d)^(-2/3) d^(-1/3) S)".into(),
        }
    })
}

/// Regime of label `αT` for the kinked example wall with step (`d = 1`) or
/// half-`d`-periodic data, `d ∈ {2, 3}` or `d ≥ 4`.
pub fn classify_example_wall(d: f64, alpha: f64) -> Result<Regime> {
    check_alpha(alpha)?;
    let ninth = 1.0 / 9.0;
    if near(d, 1.0) {
        return Ok(step_regime(alpha));
    }
    if near(d, 2.0) {
        return if alpha <= ninth + TABLE_TOL {
            Ok(step_regime(alpha))
        } else {
            periodic_regime(2.0, alpha)
        };
    }
    if near(d, 3.0) {
        if alpha < ninth - TABLE_TOL {
            return Ok(step_regime(alpha));
        }
        let mut r = periodic_regime(3.0, alpha)?;
        if near(alpha, ninth) {
            // boundary of the wall-affected region: decoupled, IC side only
            r = Regime {
                xi: 1.0 / 3.0,
                law: Law::Goe,
                scales: vec![3f64.powf(1.0 / 3.0)],
                influence: vec![],
                label: "F_GOE(3^(1/3) S)".into(),
            };
        }
        return Ok(r);
    }
    if d >= 4.0 && d.is_finite() {
        let ad = alpha_d(d);
        let ic_scale = 2f64.powf(2.0 / 3.0) / c1_of(d.powi(-2));
        return Ok(if near(alpha, ad) {
            Regime {
                xi: g_alpha_periodic(d, alpha)?,
                law: Law::GoeProduct,
                scales: vec![(2.0 / alpha).powf(1.0 / 3.0), ic_scale],
                influence: vec![4.0 * alpha],
                label: "F_GOE((2/a)^(1/3) S) F_GOE(2^(2/3) c1(d^-2)^(-1) S)".into(),
            }
        } else if alpha < ad {
            Regime {
                xi: 17.0 / 30.0 - 2.0 * alpha,
                law: Law::Goe,
                scales: vec![(2.0 / alpha).powf(1.0 / 3.0)],
                influence: vec![4.0 * alpha],
                label: "F_GOE((2/a)^(1/3) S)".into(),
            }
        } else {
            Regime {
                xi: g_alpha_periodic(d, alpha)?,
                law: Law::Goe,
                scales: vec![ic_scale],
                influence: vec![],
                label: "F_GOE(2^(2/3) c1(d^-2)^(-1) S)".into(),
            }
        });
    }
    Err(Error::Domain(format!("regime for d = {d}, alpha = {alpha} is not tabulated")))
}

/// `S = (ξT - x) / T^{1/3}`.
pub fn rescale_tagged(x: f64, xi: f64, horizon: f64) -> Result<f64> {
    check_positive_time(horizon)?;
    Ok((xi * horizon - x) / horizon.powf(1.0 / 3.0))
}

/// `X_T(τ)` from final positions (by label from 1) of step TASEP.
pub fn rescale_fixed_time(positions: &[i64], alpha: f64, horizon: f64, grid: &[f64]) -> Result<Vec<f64>> {
    check_positive_time(horizon)?;
    let (c1, c2hat) = tagged_constants(alpha)?;
    let t13 = horizon.powf(1.0 / 3.0);
    let t23 = horizon.powf(2.0 / 3.0);
    grid.iter()
        .map(|&tau| {
            let label = floor_label(alpha * horizon + c2hat * tau * t23);
            if label < 1 || label as usize > positions.len() {
                return Err(Error::OutOfRange(format!(
                    "label {label} needed but {} positions given",
                    positions.len()
                )));
            }
            let centre = (1.0 - 2.0 * alpha.sqrt()) * horizon - c2hat * tau * t23 / alpha.sqrt();
            Ok((positions[label as usize - 1] as f64 - centre) / (-c1 * t13))
        })
        .collect()
}

/// Label `⌊αT⌋` (at least 1).
pub fn tagged_label(alpha: f64, horizon: f64) -> usize {
    floor_label(alpha * horizon).max(1) as usize
}
