//! Alice–Bob–Eve model of the Gaussian-modulated protocols.
//!
//! Alice's preparation is described in the entanglement picture: half of a
//! two-mode squeezed vacuum is split on a beam splitter of transmittivity
//! `T_A` and measured by Alice, the other half travels to Bob through an
//! entangling cloner that reproduces a channel of transmission `T` and excess
//! noise `ε` (referred to the channel input).
//!
//! The global five-mode state is pure. Mode roles are fixed:
//!
//! | mode | role                                         |
//! |------|----------------------------------------------|
//! | 0    | Alice's key mode (first splitter output)     |
//! | 1    | Alice's ancilla mode (second splitter output)|
//! | 2    | Bob's mode                                   |
//! | 3    | Eve's cloner output                          |
//! | 4    | Eve's retained squeezed half                 |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    apply, entropy_g, partial_trace, vacuum_state, GaussianState, Quadrature, QuadratureSelector,
    SymplecticTransform,
};

pub const ALICE_KEY_MODE: usize = 0;
pub const ALICE_ANCILLA_MODE: usize = 1;
pub const BOB_MODE: usize = 2;
pub const EVE_CLONER_MODE: usize = 3;
pub const EVE_IDLER_MODE: usize = 4;
pub const GLOBAL_MODES: usize = 5;
pub const ALICE_BOB_MODES: [usize; 3] = [ALICE_KEY_MODE, ALICE_ANCILLA_MODE, BOB_MODE];
pub const EVE_MODES: [usize; 2] = [EVE_CLONER_MODE, EVE_IDLER_MODE];

/// Largest admissible `cosh r_E - 1`. The cloner squeezing diverges as
/// `T → 1` at fixed ε, and the spectrum of Eve's modes is only resolved to
/// roughly `ε_mach cosh² r_E`; past this the rates lose their eighth digit.
pub const MAX_CLONER_EXCESS: f64 = 1e3;

/// Largest admissible modulation. Critical points are stable to ~1e-7 up to
/// here; beyond it the unit-scale structure of the covariance drowns in the
/// `cosh r_A` entries and results drift visibly by r_A = 30.
pub const MAX_MODULATION: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    /// Alice splits her mode on a balanced beam splitter and measures both quadratures.
    Coherent,
    /// Alice measures one randomly chosen quadrature of the unsplit mode.
    Squeezed,
}

impl ProtocolKind {
    pub fn default_alice_transmittivity(self) -> f64 {
        match self {
            ProtocolKind::Coherent => 0.5,
            ProtocolKind::Squeezed => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Coherent => "coherent",
            ProtocolKind::Squeezed => "squeezed",
        }
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(ProtocolKind::Coherent),
            "squeezed" => Ok(ProtocolKind::Squeezed),
            other => Err(Error::invalid(format!("unknown protocol {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    transmission: f64,
    excess_noise: f64,
}

impl ChannelParams {
    pub fn new(transmission: f64, excess_noise: f64) -> Result<Self> {
        if !(transmission.is_finite() && transmission > 0.0 && transmission <= 1.0) {
            return Err(Error::invalid(format!(
                "transmission must lie in (0, 1], got {transmission}"
            )));
        }
        if !(excess_noise.is_finite() && excess_noise >= 0.0) {
            return Err(Error::invalid(format!(
                "excess noise must be finite and >= 0, got {excess_noise}"
            )));
        }
        if transmission < 1.0
            && excess_noise * transmission / (1.0 - transmission) > MAX_CLONER_EXCESS * (1.0 + 1e-9)
        {
            return Err(Error::invalid(format!(
                "channel (T={transmission}, eps={excess_noise}) needs cloner squeezing beyond the supported range"
            )));
        }
        Ok(Self {
            transmission,
            excess_noise,
        })
    }

    /// Pure-loss channel.
    pub fn lossy(transmission: f64) -> Result<Self> {
        Self::new(transmission, 0.0)
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn excess_noise(&self) -> f64 {
        self.excess_noise
    }

    /// `R = 1 - T`.
    pub fn loss(&self) -> f64 {
        1.0 - self.transmission
    }

    /// Largest transmission below one for which a channel with this excess
    /// noise stays inside the supported cloner range.
    pub fn max_transmission_for(excess_noise: f64) -> f64 {
        if excess_noise <= 0.0 {
            1.0
        } else {
            MAX_CLONER_EXCESS / (MAX_CLONER_EXCESS + excess_noise)
        }
    }

    /// Largest excess noise a channel of this transmission supports.
    pub fn max_excess_noise_for(transmission: f64) -> f64 {
        if transmission >= 1.0 {
            0.0
        } else {
            MAX_CLONER_EXCESS * (1.0 - transmission) / transmission
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams {
    modulation: f64,
    alice_transmittivity: f64,
    kind: ProtocolKind,
}

impl ProtocolParams {
    /// `alice_transmittivity = None` selects the default for `kind`.
    pub fn new(
        kind: ProtocolKind,
        modulation: f64,
        alice_transmittivity: Option<f64>,
    ) -> Result<Self> {
        if !(modulation.is_finite() && (0.0..=MAX_MODULATION).contains(&modulation)) {
            return Err(Error::invalid(format!(
                "modulation must lie in [0, {MAX_MODULATION}], got {modulation}"
            )));
        }
        let ta = alice_transmittivity.unwrap_or_else(|| kind.default_alice_transmittivity());
        if !(ta.is_finite() && ta > 0.0 && ta <= 1.0) {
            return Err(Error::invalid(format!(
                "alice transmittivity must lie in (0, 1], got {ta}"
            )));
        }
        Ok(Self {
            modulation,
            alice_transmittivity: ta,
            kind,
        })
    }

    pub fn coherent(modulation: f64) -> Result<Self> {
        Self::new(ProtocolKind::Coherent, modulation, None)
    }

    pub fn squeezed(modulation: f64) -> Result<Self> {
        Self::new(ProtocolKind::Squeezed, modulation, None)
    }

    pub fn with_modulation(&self, modulation: f64) -> Result<Self> {
        Self::new(self.kind, modulation, Some(self.alice_transmittivity))
    }

    pub fn with_alice_transmittivity(&self, ta: f64) -> Result<Self> {
        Self::new(self.kind, self.modulation, Some(ta))
    }

    pub fn modulation(&self) -> f64 {
        self.modulation
    }

    pub fn alice_transmittivity(&self) -> f64 {
        self.alice_transmittivity
    }

    /// `R_A = 1 - T_A`.
    pub fn alice_reflectivity(&self) -> f64 {
        1.0 - self.alice_transmittivity
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }
}

/// Eve's attack: a beam splitter mixing the signal with half of a two-mode
/// squeezed vacuum of parameter `r_E`. The splitter's transmittivity seen
/// from Eve's input is `T_E = 1 - T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglingCloner {
    pub eve_squeezing: f64,
    pub signal_transmission: f64,
}

impl EntanglingCloner {
    pub fn eve_transmittivity(&self) -> f64 {
        1.0 - self.signal_transmission
    }
}

/// Per-quadrature classical covariance of Alice's and Bob's outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateCov {
    pub v_a: f64,
    pub v_b: f64,
    pub c: f64,
}

impl BivariateCov {
    pub fn determinant(&self) -> f64 {
        self.v_a * self.v_b - self.c * self.c
    }
}

/// Cloner tuned so that `(1 - T) cosh r_E = 1 - T + εT`.
pub fn cloner_from_channel(ch: &ChannelParams) -> Result<EntanglingCloner> {
    let t = ch.transmission;
    let eps = ch.excess_noise;
    let eve_squeezing = if eps == 0.0 {
        0.0
    } else if t >= 1.0 {
        return Err(Error::InfeasibleCloner { excess_noise: eps });
    } else {
        (1.0 + eps * t / (1.0 - t)).acosh()
    };
    Ok(EntanglingCloner {
        eve_squeezing,
        signal_transmission: t,
    })
}

/// Pure five-mode state of Alice, Bob and Eve.
pub fn build_global_state(p: &ProtocolParams, ch: &ChannelParams) -> Result<GaussianState> {
    let cloner = cloner_from_channel(ch)?;
    let n = GLOBAL_MODES;
    let source = SymplecticTransform::two_mode_squeezer(p.modulation, ALICE_KEY_MODE, BOB_MODE, n)?;
    let eve = SymplecticTransform::two_mode_squeezer(
        cloner.eve_squeezing,
        EVE_CLONER_MODE,
        EVE_IDLER_MODE,
        n,
    )?;
    let alice_split = SymplecticTransform::beam_splitter(
        p.alice_transmittivity,
        ALICE_KEY_MODE,
        ALICE_ANCILLA_MODE,
        n,
    )?;
    let channel =
        SymplecticTransform::beam_splitter(ch.transmission, BOB_MODE, EVE_CLONER_MODE, n)?;

    let total = source.then(&eve)?.then(&alice_split)?.then(&channel)?;
    apply(&total, &vacuum_state(n)?)
}

/// Closed-form covariance of Alice's key quadrature and Bob's matching quadrature.
pub fn alice_bob_quadrature_cov(p: &ProtocolParams, ch: &ChannelParams) -> Result<BivariateCov> {
    let cloner = cloner_from_channel(ch)?;
    let (ca, sa) = (p.modulation.cosh(), p.modulation.sinh());
    let ta = p.alice_transmittivity;
    let t = ch.transmission;
    Ok(BivariateCov {
        v_a: ta * ca + p.alice_reflectivity(),
        v_b: t * ca + ch.loss() * cloner.eve_squeezing.cosh(),
        c: (ta * t).sqrt() * sa,
    })
}

/// Same quantity read off the global state, for either quadrature.
pub fn model_quadrature_cov(state: &GaussianState, quadrature: Quadrature) -> BivariateCov {
    let a = QuadratureSelector::new(ALICE_KEY_MODE, quadrature);
    let b = QuadratureSelector::new(BOB_MODE, quadrature);
    BivariateCov {
        v_a: state.entry(a, a),
        v_b: state.entry(b, b),
        c: state.entry(a, b),
    }
}

/// Eve's two-mode reduced state.
pub fn eve_reduced_state(p: &ProtocolParams, ch: &ChannelParams) -> Result<GaussianState> {
    partial_trace(&build_global_state(p, ch)?, &EVE_MODES)
}

/// Eve's entropy computed as if her modes were uncorrelated, with
/// variances `T cosh r_E + R cosh r_A` and `cosh r_E`. Agrees with the full
/// model for a pure-loss channel and overestimates it otherwise.
pub fn eve_entropy_uncorrelated(p: &ProtocolParams, ch: &ChannelParams) -> Result<f64> {
    let ce = cloner_from_channel(ch)?.eve_squeezing.cosh();
    let first = ch.transmission * ce + ch.loss() * p.modulation.cosh();
    Ok(entropy_g(first)? + entropy_g(ce)?)
}

/// Variance of the Gaussian modulation in the equivalent prepare-and-measure
/// scheme (shot-noise units).
pub fn pm_modulation_variance(p: &ProtocolParams) -> f64 {
    let r = p.modulation;
    match p.kind {
        ProtocolKind::Coherent => (r.cosh() - 1.0) / 2.0,
        ProtocolKind::Squeezed => r.sinh().powi(2) / (2.0 * r.cosh()),
    }
}
