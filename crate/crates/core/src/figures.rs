//! Parameter sweeps and the tolerable-loss / tolerable-noise datasets.
//!
//! Grid points are evaluated in parallel; rows always come back in grid order.

use rayon::prelude::*;

use crate::bounds::{key_rate, Bound, Direction, LogBase};
use crate::error::{Error, Result};
use crate::output::format_sig;
use crate::protocol::{ChannelParams, ProtocolKind, ProtocolParams};
use crate::solvers::{
    analytic_constants, critical_noise, critical_transmission, transmission_from_db,
};

/// Modulation standing in for the infinite-modulation limit.
pub const HIGH_MODULATION: f64 = 15.0;

/// Transmission used for the near-lossless excess-noise limits.
pub const NEAR_UNIT_TRANSMISSION: f64 = 0.999;

/// The 0 dB point of the excess-noise figure is evaluated here: a noisy
/// channel cannot have unit transmission, and much closer to 1 the cloner
/// squeezing grows past what double precision resolves.
pub const FIG3_MAX_TRANSMISSION: f64 = NEAR_UNIT_TRANSMISSION;

pub const FIG_POINTS: usize = 50;

/// Evenly spaced grid including both ends.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![from],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    to
                } else {
                    from + (to - from) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

/// Numeric table with optional (failed or undefined) cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// One message per failed cell, in row order.
    pub warnings: Vec<String>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Rows whose data cells (everything after the axis column) are all present.
    pub fn complete_rows(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.iter().skip(1).all(Option::is_some))
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.map(format_sig).unwrap_or_default())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Modulation,
    Transmission,
    ExcessNoise,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Modulation => "ra",
            SweepAxis::Transmission => "t",
            SweepAxis::ExcessNoise => "eps",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ra" => Ok(SweepAxis::Modulation),
            "t" => Ok(SweepAxis::Transmission),
            "eps" => Ok(SweepAxis::ExcessNoise),
            other => Err(Error::invalid(format!("unknown sweep axis {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepQuantity {
    /// `i_ab, eve_term, key_rate`.
    Rate,
    /// `t_c, loss_db`.
    CriticalLoss,
    /// `loss_db` only.
    CriticalLossDb,
    /// `eps_c`.
    CriticalNoise,
}

impl SweepQuantity {
    fn columns(self) -> &'static [&'static str] {
        match self {
            SweepQuantity::Rate => &["i_ab", "eve_term", "key_rate"],
            SweepQuantity::CriticalLoss => &["t_c", "loss_db"],
            SweepQuantity::CriticalLossDb => &["loss_db"],
            SweepQuantity::CriticalNoise => &["eps_c"],
        }
    }
}

impl std::str::FromStr for SweepQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rate" => Ok(SweepQuantity::Rate),
            "critical-loss" => Ok(SweepQuantity::CriticalLoss),
            "critical-loss-db" => Ok(SweepQuantity::CriticalLossDb),
            "critical-noise" => Ok(SweepQuantity::CriticalNoise),
            other => Err(Error::invalid(format!("unknown sweep quantity {other:?}"))),
        }
    }
}

/// A one-dimensional sweep. Parameters that are not the axis must be set
/// when the quantity needs them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub quantity: SweepQuantity,
    pub kind: ProtocolKind,
    pub bound: Bound,
    pub modulation: Option<f64>,
    pub alice_transmittivity: Option<f64>,
    pub transmission: Option<f64>,
    pub excess_noise: Option<f64>,
    pub base: LogBase,
}

impl SweepSpec {
    /// Checks everything that does not depend on the axis value.
    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(Error::invalid("sweep bounds must be finite"));
        }
        if self.from >= self.to {
            return Err(Error::invalid("sweep needs from < to"));
        }
        if self.steps < 2 {
            return Err(Error::invalid("sweep needs at least 2 steps"));
        }
        let conflict = match self.quantity {
            SweepQuantity::CriticalLoss | SweepQuantity::CriticalLossDb => {
                self.axis == SweepAxis::Transmission
            }
            SweepQuantity::CriticalNoise => self.axis == SweepAxis::ExcessNoise,
            SweepQuantity::Rate => false,
        };
        if conflict {
            return Err(Error::invalid(format!(
                "cannot sweep {} while solving for it",
                self.axis.name()
            )));
        }
        let needs_ra = self.axis != SweepAxis::Modulation;
        let needs_t = self.axis != SweepAxis::Transmission
            && matches!(
                self.quantity,
                SweepQuantity::Rate | SweepQuantity::CriticalNoise
            );
        if needs_ra && self.modulation.is_none() {
            return Err(Error::invalid("--ra is required unless sweeping ra"));
        }
        if needs_t && self.transmission.is_none() {
            return Err(Error::invalid("--t is required for this sweep"));
        }
        let probe_ra = self.modulation.unwrap_or(self.from.max(0.0));
        let p = ProtocolParams::new(self.kind, probe_ra, self.alice_transmittivity);
        if needs_ra {
            self.bound.check(&p?)?;
        } else if let Ok(p) = p {
            self.bound.check(&p)?;
        } else {
            ProtocolParams::new(self.kind, 0.0, self.alice_transmittivity)?;
        }
        if let (Some(t), true) = (self.transmission, needs_t) {
            ChannelParams::new(t, 0.0)?;
        }
        if let Some(eps) = self.excess_noise {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::invalid(format!(
                    "excess noise must be >= 0, got {eps}"
                )));
            }
        }
        Ok(())
    }

    fn point(&self, x: f64) -> Result<Vec<f64>> {
        let ra = if self.axis == SweepAxis::Modulation {
            x
        } else {
            self.modulation.unwrap_or(0.0)
        };
        let eps = if self.axis == SweepAxis::ExcessNoise {
            x
        } else {
            self.excess_noise.unwrap_or(0.0)
        };
        let t = if self.axis == SweepAxis::Transmission {
            Some(x)
        } else {
            self.transmission
        };
        let p = ProtocolParams::new(self.kind, ra, self.alice_transmittivity)?;
        let need_t = || t.ok_or_else(|| Error::invalid("transmission not set"));
        match self.quantity {
            SweepQuantity::Rate => {
                let ch = ChannelParams::new(need_t()?, eps)?;
                let r = key_rate(self.bound, &p, &ch)?.in_base(self.base);
                Ok(vec![r.i_ab, r.eve_term, r.key_rate])
            }
            SweepQuantity::CriticalLoss => {
                let cp = critical_transmission(self.bound, &p, eps)?;
                Ok(vec![cp.value, cp.in_db.unwrap_or(f64::NAN)])
            }
            SweepQuantity::CriticalLossDb => {
                let cp = critical_transmission(self.bound, &p, eps)?;
                Ok(vec![cp.in_db.unwrap_or(f64::NAN)])
            }
            SweepQuantity::CriticalNoise => {
                let cp = critical_noise(self.bound, &p, need_t()?)?;
                Ok(vec![cp.value])
            }
        }
    }
}

/// Evaluates a sweep. Per-point failures leave empty cells and a warning.
pub fn sweep(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let xs = linspace(spec.from, spec.to, spec.steps);
    let columns = spec.quantity.columns();
    let results: Vec<Result<Vec<f64>>> = xs.par_iter().map(|&x| spec.point(x)).collect();

    let mut table = Table {
        header: std::iter::once(spec.axis.name())
            .chain(columns.iter().copied())
            .map(String::from)
            .collect(),
        ..Table::default()
    };
    for (x, res) in xs.iter().zip(results) {
        let mut row = vec![Some(*x)];
        match res {
            Ok(vals) => row.extend(vals.into_iter().map(Some)),
            Err(e) => {
                table
                    .warnings
                    .push(format!("{}={}: {e}", spec.axis.name(), format_sig(*x)));
                row.extend(std::iter::repeat_n(None, columns.len()));
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

fn cell(res: Result<f64>, what: &str, warnings: &mut Vec<String>) -> Option<f64> {
    match res {
        Ok(v) => Some(v),
        Err(Error::NoPositiveRegion(_)) => None,
        Err(e) => {
            warnings.push(format!("{what}: {e}"));
            None
        }
    }
}

fn tabulate<F>(header: &[&str], xs: Vec<f64>, cells: F) -> Table
where
    F: Fn(f64) -> Vec<(String, Result<f64>)> + Sync,
{
    let computed: Vec<Vec<(String, Result<f64>)>> = xs.par_iter().map(|&x| cells(x)).collect();
    let mut table = Table {
        header: header.iter().map(|h| h.to_string()).collect(),
        ..Table::default()
    };
    for (x, row_cells) in xs.into_iter().zip(computed) {
        let mut row = vec![Some(x)];
        for (what, res) in row_cells {
            row.push(cell(res, &what, &mut table.warnings));
        }
        table.rows.push(row);
    }
    table
}

/// Tolerable losses (dB) of the general bound against modulation, ε = 0,
/// for coherent and squeezed states.
pub fn fig2() -> Table {
    let header = ["ra", "loss_db_coherent_general", "loss_db_squeezed_general"];
    tabulate(&header, linspace(0.1, 5.0, FIG_POINTS), |ra| {
        [ProtocolKind::Coherent, ProtocolKind::Squeezed]
            .into_iter()
            .map(|kind| {
                let res = ProtocolParams::new(kind, ra, None)
                    .and_then(|p| critical_transmission(Bound::General, &p, 0.0))
                    .map(|cp| cp.in_db.unwrap_or(f64::NAN));
                (format!("ra={} {}", format_sig(ra), kind.as_str()), res)
            })
            .collect()
    })
}

/// Critical excess noise of the collective bound against losses (dB) at
/// high modulation, for both protocols and directions.
pub fn fig3() -> Table {
    let header = [
        "loss_db",
        "eps_c_coh_direct",
        "eps_c_coh_reverse",
        "eps_c_sq_direct",
        "eps_c_sq_reverse",
    ];
    let curves = [
        (ProtocolKind::Coherent, Direction::Direct),
        (ProtocolKind::Coherent, Direction::Reverse),
        (ProtocolKind::Squeezed, Direction::Direct),
        (ProtocolKind::Squeezed, Direction::Reverse),
    ];
    tabulate(&header, linspace(0.0, 10.0, FIG_POINTS), |db| {
        let t = transmission_from_db(db).min(FIG3_MAX_TRANSMISSION);
        curves
            .iter()
            .map(|&(kind, dir)| {
                let res = ProtocolParams::new(kind, HIGH_MODULATION, None)
                    .and_then(|p| critical_noise(Bound::Collective(dir), &p, t))
                    .map(|cp| cp.value);
                (
                    format!(
                        "loss_db={} {} {}",
                        format_sig(db),
                        kind.as_str(),
                        dir.as_str()
                    ),
                    res,
                )
            })
            .collect()
    })
}

/// A closed-form limit next to the value bisected from the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRow {
    pub name: &'static str,
    pub analytic: f64,
    pub numeric: Result<f64>,
}

impl ConstantRow {
    pub fn gap(&self) -> Option<f64> {
        self.numeric
            .as_ref()
            .ok()
            .map(|n| (n - self.analytic).abs())
    }
}

pub fn constants_table() -> Vec<ConstantRow> {
    let c = analytic_constants();
    let coherent = ProtocolParams::coherent(HIGH_MODULATION).expect("valid modulation");
    let squeezed = ProtocolParams::squeezed(HIGH_MODULATION).expect("valid modulation");
    let t = NEAR_UNIT_TRANSMISSION;
    type Solve = Box<dyn Fn() -> Result<f64> + Sync>;
    let rows: Vec<(&'static str, f64, Solve)> = vec![
        (
            "t_c_general_w",
            c.t_c_general_w,
            Box::new(move || Ok(critical_transmission(Bound::GeneralW, &coherent, 0.0)?.value)),
        ),
        (
            "t_c_collective_direct",
            c.t_c_collective_direct,
            Box::new(move || {
                Ok(
                    critical_transmission(Bound::Collective(Direction::Direct), &coherent, 0.0)?
                        .value,
                )
            }),
        ),
        (
            "eps_c_direct_coherent",
            c.eps_c_direct_coherent,
            Box::new(move || {
                Ok(critical_noise(Bound::Collective(Direction::Direct), &coherent, t)?.value)
            }),
        ),
        (
            "eps_c_reverse_coherent",
            c.eps_c_reverse_coherent,
            Box::new(move || {
                Ok(critical_noise(Bound::Collective(Direction::Reverse), &coherent, t)?.value)
            }),
        ),
        (
            "eps_c_squeezed",
            c.eps_c_squeezed,
            Box::new(move || {
                Ok(critical_noise(Bound::Collective(Direction::Reverse), &squeezed, t)?.value)
            }),
        ),
    ];
    rows.par_iter()
        .map(|(name, analytic, numeric)| ConstantRow {
            name,
            analytic: *analytic,
            numeric: numeric(),
        })
        .collect()
}
