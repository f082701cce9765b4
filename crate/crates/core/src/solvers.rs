//! Zero crossings and optima of the key-rate bounds.

use std::f64::consts::E;

use crate::bounds::{key_rate, Bound};
use crate::error::{Error, Result};
use crate::protocol::{ChannelParams, ProtocolParams};

/// Lowest transmission searched for a critical point.
pub const MIN_TRANSMISSION: f64 = 1e-6;
/// Highest transmission searched (for pure-loss channels).
pub const MAX_TRANSMISSION: f64 = 1.0 - 1e-9;
/// Parameter tolerance of every critical-point bisection.
pub const CRITICAL_TOL: f64 = 1e-9;
/// Upper end of the excess-noise bracket expansion `1, 2, 4, ...`.
pub const MAX_EXCESS_NOISE: f64 = 64.0;
/// Modulation interval searched by [`optimal_modulation`].
pub const MODULATION_RANGE: (f64, f64) = (0.01, 10.0);
pub const MODULATION_TOL: f64 = 1e-4;

const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        Self::with_max_iter(lo, hi, tol, DEFAULT_MAX_ITER)
    }

    pub fn with_max_iter(lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!("bracket [{lo}, {hi}] is empty")));
        }
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::invalid(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        Ok(Self {
            lo,
            hi,
            tol,
            max_iter,
        })
    }
}

/// Bisection down to `|hi - lo| <= tol`; returns the final midpoint.
pub fn find_root<F>(mut objective: F, bracket: RootBracket) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let RootBracket {
        mut lo,
        mut hi,
        tol,
        max_iter,
    } = bracket;
    let f_lo = objective(lo)?;
    let f_hi = objective(hi)?;
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::numerical("objective is NaN at the bracket ends"));
    }
    if f_lo * f_hi > 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    let lo_positive = f_lo > 0.0;
    let mut iter = 0;
    while hi - lo > tol {
        if iter == max_iter {
            return Err(Error::numerical(format!(
                "bisection did not reach tolerance {tol} in {max_iter} iterations"
            )));
        }
        iter += 1;
        let mid = 0.5 * (lo + hi);
        let f_mid = objective(mid)?;
        if f_mid.is_nan() {
            return Err(Error::numerical(format!("objective is NaN at {mid}")));
        }
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section maximization on `[lo, hi]`. Returns `(argmax, max)`.
/// On plateaus the leftmost candidate wins.
pub fn golden_section_max<F>(mut objective: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, objective(x)?))
}

/// A zero crossing of a key rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub value: f64,
    /// `-10 log10 T`, only for transmission-type points.
    pub in_db: Option<f64>,
    /// `|key_rate(value)|` in nats.
    pub residual: f64,
}

pub fn losses_db(transmission: f64) -> f64 {
    -10.0 * transmission.log10()
}

pub fn transmission_from_db(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

fn rate_at(bound: Bound, p: &ProtocolParams, t: f64, eps: f64) -> Result<f64> {
    Ok(key_rate(bound, p, &ChannelParams::new(t, eps)?)?.key_rate)
}

/// Transmission below which the selected rate turns negative.
pub fn critical_transmission(bound: Bound, p: &ProtocolParams, eps: f64) -> Result<CriticalPoint> {
    bound.check(p)?;
    let hi = MAX_TRANSMISSION.min(ChannelParams::max_transmission_for(eps));
    let lo = MIN_TRANSMISSION;
    let rate = |t: f64| rate_at(bound, p, t, eps);
    if rate(hi)? <= 0.0 {
        return Err(Error::NoPositiveRegion(format!(
            "{bound} rate is not positive near unit transmission (eps={eps})"
        )));
    }
    let t_c = find_root(rate, RootBracket::new(lo, hi, CRITICAL_TOL)?)?;
    Ok(CriticalPoint {
        value: t_c,
        in_db: Some(losses_db(t_c)),
        residual: rate(t_c)?.abs(),
    })
}

/// Excess noise above which the selected rate turns negative.
pub fn critical_noise(
    bound: Bound,
    p: &ProtocolParams,
    transmission: f64,
) -> Result<CriticalPoint> {
    bound.check(p)?;
    let rate = |eps: f64| rate_at(bound, p, transmission, eps);
    if rate(0.0)? <= 0.0 {
        return Err(Error::NoPositiveRegion(format!(
            "{bound} rate is not positive at T={transmission} without excess noise"
        )));
    }
    let cap = MAX_EXCESS_NOISE.min(ChannelParams::max_excess_noise_for(transmission));
    let mut lo = 0.0;
    let mut hi = cap.min(1.0);
    loop {
        if rate(hi)? <= 0.0 {
            break;
        }
        if hi >= cap {
            return Err(Error::BracketFailure { lo: 0.0, hi });
        }
        lo = hi;
        hi = (2.0 * hi).min(cap);
    }
    let eps_c = find_root(rate, RootBracket::new(lo, hi, CRITICAL_TOL)?)?;
    Ok(CriticalPoint {
        value: eps_c,
        in_db: None,
        residual: rate(eps_c)?.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationOptimum {
    pub modulation: f64,
    /// Tolerable losses in dB at `modulation`.
    pub loss_db: f64,
    /// Set when the optimum sits on the edge of the searched interval.
    pub at_boundary: bool,
}

/// Tolerable losses (dB) at a given modulation; zero when the rate is
/// nowhere positive.
pub fn tolerable_losses_db(bound: Bound, p: &ProtocolParams, eps: f64) -> Result<f64> {
    match critical_transmission(bound, p, eps) {
        Ok(cp) => Ok(cp.in_db.unwrap_or(0.0)),
        Err(Error::NoPositiveRegion(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Modulation maximizing the tolerable losses, searched over [`MODULATION_RANGE`].
pub fn optimal_modulation(
    bound: Bound,
    template: &ProtocolParams,
    eps: f64,
) -> Result<ModulationOptimum> {
    bound.check(template)?;
    let objective = |r: f64| tolerable_losses_db(bound, &template.with_modulation(r)?, eps);
    let (lo, hi) = MODULATION_RANGE;
    let (r, db) = golden_section_max(objective, lo, hi, MODULATION_TOL)?;

    let db_lo = objective(lo)?;
    if db_lo >= db {
        return Ok(ModulationOptimum {
            modulation: lo,
            loss_db: db_lo,
            at_boundary: true,
        });
    }
    let db_hi = objective(hi)?;
    if db_hi >= db {
        return Ok(ModulationOptimum {
            modulation: hi,
            loss_db: db_hi,
            at_boundary: true,
        });
    }
    let at_boundary = r - lo <= 10.0 * MODULATION_TOL || hi - r <= 10.0 * MODULATION_TOL;
    Ok(ModulationOptimum {
        modulation: r,
        loss_db: db,
        at_boundary,
    })
}

/// Left minus right side of the high-modulation equation for the direct
/// reconciliation critical transmission. Vanishes at `T = 1/2` for every `T_A`.
pub fn direct_transmission_equation(t: f64, ta: f64) -> f64 {
    let lhs = t * (1.0 - t) * (1.0 - t + ta * (2.0 * t - 1.0)) / (ta + t - 2.0 * ta * t);
    lhs - (1.0 - t).powi(2)
}

/// Logarithm of the high-modulation equation for the critical excess noise of
/// coherent states with direct reconciliation, minus 2 (i.e. `ln e²`).
pub fn direct_noise_equation(eps: f64) -> f64 {
    let s = (1.0 + eps).sqrt();
    -(1.0 + eps).ln() + s * ((s + 1.0) / (s - 1.0)).ln() - 2.0
}

/// High-modulation limits available in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConstants {
    /// `e² / (e² + 4)`.
    pub t_c_general_w: f64,
    pub t_c_collective_direct: f64,
    pub eps_c_direct_coherent: f64,
    /// `(√(1 + 16/e²) - 1) / 2`.
    pub eps_c_reverse_coherent: f64,
    /// `2 / e`, both directions.
    pub eps_c_squeezed: f64,
}

pub fn analytic_constants() -> AnalyticConstants {
    let e2 = E * E;
    let bracket = RootBracket::new(0.5, 1.5, 1e-13).expect("static bracket");
    let eps_c_direct_coherent = find_root(|e| Ok(direct_noise_equation(e)), bracket)
        .expect("direct noise equation changes sign on [0.5, 1.5]");
    AnalyticConstants {
        t_c_general_w: e2 / (e2 + 4.0),
        t_c_collective_direct: 0.5,
        eps_c_direct_coherent,
        eps_c_reverse_coherent: 0.5 * ((1.0 + 16.0 / e2).sqrt() - 1.0),
        eps_c_squeezed: 2.0 / E,
    }
}
