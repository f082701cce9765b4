//! Key-rate bounds.
//!
//! All rates are per matched channel use (no sifting factor) and computed in
//! nats; [`KeyRateReport::in_base`] converts to bits for presentation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    condition_on_quadrature, partial_trace, von_neumann_entropy, GaussianState, QuadratureSelector,
};
use crate::protocol::{
    alice_bob_quadrature_cov, build_global_state, BivariateCov, ChannelParams, ProtocolKind,
    ProtocolParams, ALICE_ANCILLA_MODE, ALICE_KEY_MODE, BOB_MODE, EVE_MODES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    /// `I_AB - S(ρ_AB)`, no assumption on the attack.
    #[serde(rename = "general")]
    General,
    /// As `General`, with Alice's second quadrature disclosed to condition Eve's entropy.
    #[serde(rename = "general_w")]
    GeneralW,
    /// `I_AB - χ`, Eve restricted to the entangling cloner but measuring collectively.
    #[serde(rename = "collective")]
    Collective,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::General => "general",
            BoundKind::GeneralW => "general_w",
            BoundKind::Collective => "collective",
        }
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(BoundKind::General),
            "general_w" => Ok(BoundKind::GeneralW),
            "collective" => Ok(BoundKind::Collective),
            other => Err(Error::invalid(format!("unknown bound {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Alice's data is the reference.
    Direct,
    /// Bob's data is the reference.
    Reverse,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Direct => "direct",
            Direction::Reverse => "reverse",
        }
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Direction::Direct),
            "reverse" => Ok(Direction::Reverse),
            other => Err(Error::invalid(format!("unknown direction {other:?}"))),
        }
    }
}

/// A bound together with its reconciliation direction where one applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    General,
    GeneralW,
    Collective(Direction),
}

impl Bound {
    /// A direction is required for the collective bound and rejected otherwise.
    pub fn new(kind: BoundKind, direction: Option<Direction>) -> Result<Self> {
        match (kind, direction) {
            (BoundKind::General, None) => Ok(Bound::General),
            (BoundKind::GeneralW, None) => Ok(Bound::GeneralW),
            (BoundKind::Collective, Some(d)) => Ok(Bound::Collective(d)),
            (BoundKind::Collective, None) => {
                Err(Error::invalid("collective bound requires a direction"))
            }
            (k, Some(_)) => Err(Error::invalid(format!(
                "direction only applies to the collective bound, not {}",
                k.as_str()
            ))),
        }
    }

    pub fn kind(self) -> BoundKind {
        match self {
            Bound::General => BoundKind::General,
            Bound::GeneralW => BoundKind::GeneralW,
            Bound::Collective(_) => BoundKind::Collective,
        }
    }

    pub fn direction(self) -> Option<Direction> {
        match self {
            Bound::Collective(d) => Some(d),
            _ => None,
        }
    }

    /// Rejects combinations that have no meaning for the protocol.
    pub fn check(self, p: &ProtocolParams) -> Result<()> {
        if self == Bound::GeneralW && p.kind() != ProtocolKind::Coherent {
            return Err(Error::invalid("general_w requires coherent"));
        }
        Ok(())
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Collective(d) => write!(f, "collective/{}", d.as_str()),
            b => f.write_str(b.kind().as_str()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Nats => "nats",
            LogBase::Bits => "bits",
        }
    }

    /// Converts a value in nats to this base.
    pub fn from_nats(self, value: f64) -> f64 {
        match self {
            LogBase::Nats => value,
            LogBase::Bits => value / std::f64::consts::LN_2,
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(LogBase::Nats),
            "bits" => Ok(LogBase::Bits),
            other => Err(Error::invalid(format!("unknown base {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateReport {
    pub i_ab: f64,
    /// `S(ρ_AB)`, `S(ρ_E|W)` or a Holevo quantity depending on the bound.
    pub eve_term: f64,
    pub key_rate: f64,
    pub base: LogBase,
    pub bound: Bound,
    pub protocol: ProtocolParams,
    pub channel: ChannelParams,
}

impl KeyRateReport {
    fn new(
        i_ab: f64,
        eve_term: f64,
        bound: Bound,
        protocol: ProtocolParams,
        channel: ChannelParams,
    ) -> Self {
        Self {
            i_ab,
            eve_term,
            key_rate: i_ab - eve_term,
            base: LogBase::Nats,
            bound,
            protocol,
            channel,
        }
    }

    /// Same report expressed in `base`.
    pub fn in_base(&self, base: LogBase) -> Self {
        let to_nats = |v: f64| match self.base {
            LogBase::Nats => v,
            LogBase::Bits => v * std::f64::consts::LN_2,
        };
        let conv = |v: f64| base.from_nats(to_nats(v));
        Self {
            i_ab: conv(self.i_ab),
            eve_term: conv(self.eve_term),
            key_rate: conv(self.key_rate),
            base,
            ..*self
        }
    }
}

/// Mutual information of a bivariate Gaussian, in nats.
pub fn mutual_information(cov: &BivariateCov) -> Result<f64> {
    let det = cov.determinant();
    if !(cov.v_a > 0.0 && cov.v_b > 0.0 && det > 0.0) {
        return Err(Error::invalid(format!(
            "covariance (v_a={}, v_b={}, c={}) is not positive definite",
            cov.v_a, cov.v_b, cov.c
        )));
    }
    Ok(0.5 * (cov.v_a * cov.v_b / det).ln())
}

/// Index of `mode` after `removed` has been measured out.
fn shifted(mode: usize, removed: usize) -> usize {
    if mode > removed {
        mode - 1
    } else {
        mode
    }
}

fn eve_entropy(global: &GaussianState) -> Result<f64> {
    von_neumann_entropy(&partial_trace(global, &EVE_MODES)?)
}

fn eve_entropy_given(global: &GaussianState, sel: QuadratureSelector) -> Result<f64> {
    let cond = condition_on_quadrature(global, sel)?;
    let eve = EVE_MODES.map(|m| shifted(m, sel.mode));
    von_neumann_entropy(&partial_trace(&cond, &eve)?)
}

fn holevo_on(global: &GaussianState, dir: Direction) -> Result<f64> {
    let reference = match dir {
        Direction::Direct => ALICE_KEY_MODE,
        Direction::Reverse => BOB_MODE,
    };
    let chi = eve_entropy(global)? - eve_entropy_given(global, QuadratureSelector::x(reference))?;
    Ok(chi)
}

/// General-security rate. Eve's term is `S(ρ_AB)`, evaluated on her side as
/// `S(ρ_E)` since the global state is pure.
pub fn key_rate_general(p: &ProtocolParams, ch: &ChannelParams) -> Result<KeyRateReport> {
    let i_ab = mutual_information(&alice_bob_quadrature_cov(p, ch)?)?;
    let global = build_global_state(p, ch)?;
    let s_e = eve_entropy(&global)?;
    Ok(KeyRateReport::new(i_ab, s_e, Bound::General, *p, *ch))
}

/// General-security rate with Alice's second (P) quadrature made public.
pub fn key_rate_general_w(p: &ProtocolParams, ch: &ChannelParams) -> Result<KeyRateReport> {
    Bound::GeneralW.check(p)?;
    let i_ab = mutual_information(&alice_bob_quadrature_cov(p, ch)?)?;
    let global = build_global_state(p, ch)?;
    let s_e_w = eve_entropy_given(&global, QuadratureSelector::p(ALICE_ANCILLA_MODE))?;
    Ok(KeyRateReport::new(i_ab, s_e_w, Bound::GeneralW, *p, *ch))
}

/// Holevo quantity between Eve and the reference party's key quadrature.
pub fn holevo(p: &ProtocolParams, ch: &ChannelParams, dir: Direction) -> Result<f64> {
    holevo_on(&build_global_state(p, ch)?, dir)
}

pub fn key_rate_collective(
    p: &ProtocolParams,
    ch: &ChannelParams,
    dir: Direction,
) -> Result<KeyRateReport> {
    let i_ab = mutual_information(&alice_bob_quadrature_cov(p, ch)?)?;
    let chi = holevo(p, ch, dir)?;
    Ok(KeyRateReport::new(
        i_ab,
        chi,
        Bound::Collective(dir),
        *p,
        *ch,
    ))
}

/// Dispatches to the rate selected by `bound`.
pub fn key_rate(bound: Bound, p: &ProtocolParams, ch: &ChannelParams) -> Result<KeyRateReport> {
    bound.check(p)?;
    match bound {
        Bound::General => key_rate_general(p, ch),
        Bound::GeneralW => key_rate_general_w(p, ch),
        Bound::Collective(dir) => key_rate_collective(p, ch, dir),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn mutual_information_examples() {
        let mi = |v_a, c, v_b| mutual_information(&BivariateCov { v_a, v_b, c }).unwrap();
        assert_eq!(mi(2.0, 0.0, 3.0), 0.0);
        let (ch, sh) = (1.0f64.cosh(), 1.0f64.sinh());
        close(mi(ch, sh, ch), 0.4337808304830271, 1e-12);
        close(mi(2.0, 1.0, 2.0), 0.14384103622589042, 1e-14);
        assert!(mutual_information(&BivariateCov {
            v_a: 1.0,
            v_b: 1.0,
            c: 1.0
        })
        .is_err());
        assert!(mutual_information(&BivariateCov {
            v_a: -1.0,
            v_b: 1.0,
            c: 0.0
        })
        .is_err());
    }

    #[test]
    fn bound_combinations() {
        assert_eq!(
            Bound::new(BoundKind::General, None).unwrap(),
            Bound::General
        );
        assert!(Bound::new(BoundKind::General, Some(Direction::Direct)).is_err());
        assert!(Bound::new(BoundKind::Collective, None).is_err());
        let b = Bound::new(BoundKind::Collective, Some(Direction::Reverse)).unwrap();
        assert_eq!(b.direction(), Some(Direction::Reverse));
        assert_eq!(b.kind(), BoundKind::Collective);
    }

    #[test]
    fn decoupled_channel() {
        let ch = ChannelParams::lossy(1.0).unwrap();
        for p in [
            ProtocolParams::coherent(1.0).unwrap(),
            ProtocolParams::squeezed(2.0).unwrap(),
        ] {
            let mut bounds = vec![
                Bound::General,
                Bound::Collective(Direction::Direct),
                Bound::Collective(Direction::Reverse),
            ];
            if p.kind() == ProtocolKind::Coherent {
                bounds.push(Bound::GeneralW);
            }
            for b in bounds {
                let r = key_rate(b, &p, &ch).unwrap();
                assert!(r.eve_term.abs() < 1e-9, "{b}: {}", r.eve_term);
                close(r.key_rate, r.i_ab - r.eve_term, 0.0);
            }
        }
    }

    #[test]
    fn general_w_rejects_squeezed() {
        let p = ProtocolParams::squeezed(1.0).unwrap();
        let ch = ChannelParams::lossy(0.8).unwrap();
        let err = key_rate_general_w(&p, &ch).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidArgument("general_w requires coherent".into())
        );
    }

    #[test]
    fn w_conditioning_on_uncorrelated_ancilla() {
        let p = ProtocolParams::coherent(1.2)
            .unwrap()
            .with_alice_transmittivity(1.0)
            .unwrap();
        let ch = ChannelParams::new(0.7, 0.1).unwrap();
        let g = key_rate_general(&p, &ch).unwrap();
        let w = key_rate_general_w(&p, &ch).unwrap();
        close(w.eve_term, g.eve_term, 1e-10);
    }

    #[test]
    fn holevo_without_modulation() {
        let p = ProtocolParams::coherent(0.0).unwrap();
        let lossy = ChannelParams::lossy(0.5).unwrap();
        let noisy = ChannelParams::new(0.5, 0.2).unwrap();
        for d in [Direction::Direct, Direction::Reverse] {
            assert!(holevo(&p, &lossy, d).unwrap().abs() < 1e-10);
        }
        assert!(holevo(&p, &noisy, Direction::Direct).unwrap().abs() < 1e-10);
        // Bob's outcome is pure cloner noise whose purification Eve keeps.
        assert!(holevo(&p, &noisy, Direction::Reverse).unwrap() > 0.1);
    }

    #[test]
    fn direct_reconciliation_three_db() {
        let p = ProtocolParams::coherent(15.0).unwrap();
        let dir = Direction::Direct;
        let below = key_rate_collective(&p, &ChannelParams::lossy(0.45).unwrap(), dir).unwrap();
        let above = key_rate_collective(&p, &ChannelParams::lossy(0.55).unwrap(), dir).unwrap();
        assert!(below.key_rate < 0.0);
        assert!(above.key_rate > 0.0);
    }

    #[test]
    fn reverse_small_signal_rate() {
        let p = ProtocolParams::coherent(0.1).unwrap();
        let ch = ChannelParams::lossy(1e-3).unwrap();
        let r = key_rate_collective(&p, &ch, Direction::Reverse).unwrap();
        let ratio = r.key_rate / (0.5 * 1e-3 * (0.1f64.cosh() - 1.0));
        assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn bits_conversion() {
        let p = ProtocolParams::coherent(1.0).unwrap();
        let r = key_rate_general(&p, &ChannelParams::lossy(0.9).unwrap()).unwrap();
        let b = r.in_base(LogBase::Bits);
        assert_eq!(b.base, LogBase::Bits);
        assert_eq!(b.key_rate, r.key_rate / std::f64::consts::LN_2);
        assert_eq!(b.in_base(LogBase::Nats).base, LogBase::Nats);
        close(b.in_base(LogBase::Nats).i_ab, r.i_ab, 1e-15);
    }
}
