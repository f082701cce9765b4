//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 numerical failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::Value;

use crate::bounds::{key_rate, Bound, BoundKind, Direction, LogBase};
use crate::error::Error;
use crate::figures::{
    constants_table, fig2, fig3, sweep, SweepAxis, SweepQuantity, SweepSpec, Table,
};
use crate::output::{json_number, Cell, Format, OutputRecord, VERSION};
use crate::protocol::{ChannelParams, ProtocolKind, ProtocolParams};
use crate::solvers::{critical_noise, critical_transmission};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::InfeasibleCloner { .. } => EXIT_USAGE,
        Error::NumericalFailure(_) | Error::BracketFailure { .. } | Error::NoPositiveRegion(_) => {
            EXIT_NUMERICAL
        }
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

fn format_arg(s: &str) -> Result<Format, String> {
    match s {
        "text" => Ok(Format::Text),
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(format!("unknown format {other:?} (text, csv, json)")),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cvqkd",
    version,
    about = "Security bounds for continuous-variable QKD"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Key rate at a single channel point.
    Rate {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Transmission at which the key rate vanishes.
    CriticalLoss {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Excess noise at which the key rate vanishes.
    CriticalNoise {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        out: FormatArgs,
    },
    /// CSV over a linear grid of one parameter.
    Sweep {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Tolerable losses against modulation (CSV).
    Fig2,
    /// Tolerable excess noise against losses (CSV).
    Fig3,
    /// Closed-form limits next to their numeric counterparts.
    Constants {
        #[command(flatten)]
        out: FormatArgs,
    },
    /// Newline-delimited JSON requests in, one JSON result per line out.
    Batch {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Parameters of a single evaluation. Also the schema of a batch line.
#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointArgs {
    /// coherent | squeezed
    #[arg(long, default_value = "coherent")]
    #[serde(default = "default_protocol")]
    protocol: ProtocolKind,
    /// general | general_w | collective
    #[arg(long, default_value = "general")]
    #[serde(default = "default_bound")]
    bound: BoundKind,
    /// direct | reverse (collective bound only)
    #[arg(long)]
    direction: Option<Direction>,
    /// Two-mode squeezing of Alice's source
    #[arg(long, value_parser = finite)]
    ra: Option<f64>,
    /// Alice's beam-splitter transmittivity [default: 0.5 coherent, 1 squeezed]
    #[arg(long, value_parser = finite)]
    ta: Option<f64>,
    /// Channel transmission
    #[arg(long, value_parser = finite)]
    t: Option<f64>,
    /// Excess noise in shot-noise units [default: 0]
    #[arg(long, value_parser = finite)]
    eps: Option<f64>,
    /// nats | bits (key rates only) [default: nats]
    #[arg(long)]
    base: Option<LogBase>,
}

fn default_protocol() -> ProtocolKind {
    ProtocolKind::Coherent
}

fn default_bound() -> BoundKind {
    BoundKind::General
}

#[derive(Debug, Args)]
struct FormatArgs {
    /// text | csv | json
    #[arg(long, default_value = "text", value_parser = format_arg)]
    format: Format,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Swept parameter: ra | t | eps
    #[arg(long = "x")]
    axis: SweepAxis,
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    to: f64,
    #[arg(long)]
    steps: usize,
    /// rate | critical-loss | critical-loss-db | critical-noise
    #[arg(long, default_value = "rate")]
    quantity: SweepQuantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PointCommand {
    Rate,
    CriticalLoss,
    CriticalNoise,
}

impl PointCommand {
    fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "rate" => Ok(PointCommand::Rate),
            "critical-loss" => Ok(PointCommand::CriticalLoss),
            "critical-noise" => Ok(PointCommand::CriticalNoise),
            other => Err(Error::invalid(format!(
                "unknown batch command {other:?} (rate, critical-loss, critical-noise)"
            ))),
        }
    }
}

fn reject(present: bool, flag: &str, cmd: &str) -> Result<(), Error> {
    if present {
        Err(Error::invalid(format!("--{flag} does not apply to {cmd}")))
    } else {
        Ok(())
    }
}

fn require(v: Option<f64>, flag: &str) -> Result<f64, Error> {
    v.ok_or_else(|| Error::invalid(format!("--{flag} is required")))
}

fn check_finite(args: &PointArgs) -> Result<(), Error> {
    for (name, v) in [
        ("ra", args.ra),
        ("ta", args.ta),
        ("t", args.t),
        ("eps", args.eps),
    ] {
        if let Some(x) = v {
            if !x.is_finite() {
                return Err(Error::invalid(format!("--{name} must be finite")));
            }
        }
    }
    Ok(())
}

fn echoed(
    args: &PointArgs,
    p: &ProtocolParams,
    bound: Bound,
    t: Option<f64>,
    eps: Option<f64>,
) -> Vec<(&'static str, Cell)> {
    let num = |v: Option<f64>| v.map(Cell::Num).unwrap_or(Cell::Empty);
    vec![
        ("protocol", Cell::text(args.protocol.as_str())),
        ("bound", Cell::text(bound.kind().as_str())),
        (
            "direction",
            bound
                .direction()
                .map(|d| Cell::text(d.as_str()))
                .unwrap_or(Cell::Empty),
        ),
        ("ra", Cell::Num(p.modulation())),
        ("ta", Cell::Num(p.alice_transmittivity())),
        ("t", num(t)),
        ("eps", num(eps)),
    ]
}

fn evaluate(cmd: PointCommand, args: &PointArgs) -> Result<OutputRecord, Error> {
    check_finite(args)?;
    let name = match cmd {
        PointCommand::Rate => "rate",
        PointCommand::CriticalLoss => "critical-loss",
        PointCommand::CriticalNoise => "critical-noise",
    };
    let bound = Bound::new(args.bound, args.direction)?;
    let p = ProtocolParams::new(args.protocol, require(args.ra, "ra")?, args.ta)?;
    bound.check(&p)?;
    if cmd != PointCommand::Rate {
        reject(args.base.is_some(), "base", name)?;
    }
    match cmd {
        PointCommand::Rate => {
            let t = require(args.t, "t")?;
            let eps = args.eps.unwrap_or(0.0);
            let base = args.base.unwrap_or_default();
            let r = key_rate(bound, &p, &ChannelParams::new(t, eps)?)?.in_base(base);
            Ok(OutputRecord {
                params: echoed(args, &p, bound, Some(t), Some(eps)),
                fields: vec![
                    ("i_ab", Cell::Num(r.i_ab)),
                    ("eve_term", Cell::Num(r.eve_term)),
                    ("key_rate", Cell::Num(r.key_rate)),
                    ("base", Cell::text(base.as_str())),
                ],
            })
        }
        PointCommand::CriticalLoss => {
            reject(args.t.is_some(), "t", name)?;
            let eps = args.eps.unwrap_or(0.0);
            let cp = critical_transmission(bound, &p, eps)?;
            Ok(OutputRecord {
                params: echoed(args, &p, bound, None, Some(eps)),
                fields: vec![
                    ("critical_value", Cell::Num(cp.value)),
                    ("loss_db", cp.in_db.map(Cell::Num).unwrap_or(Cell::Empty)),
                    ("residual", Cell::Num(cp.residual)),
                ],
            })
        }
        PointCommand::CriticalNoise => {
            reject(args.eps.is_some(), "eps", name)?;
            let t = require(args.t, "t")?;
            let cp = critical_noise(bound, &p, t)?;
            Ok(OutputRecord {
                params: echoed(args, &p, bound, Some(t), None),
                fields: vec![
                    ("critical_value", Cell::Num(cp.value)),
                    ("residual", Cell::Num(cp.residual)),
                ],
            })
        }
    }
}

fn sweep_spec(point: &PointArgs, grid: &GridArgs) -> Result<SweepSpec, Error> {
    check_finite(point)?;
    let bound = Bound::new(point.bound, point.direction)?;
    let axis_flag = match grid.axis {
        SweepAxis::Modulation => point.ra,
        SweepAxis::Transmission => point.t,
        SweepAxis::ExcessNoise => point.eps,
    };
    reject(
        axis_flag.is_some(),
        grid.axis.name(),
        "a sweep over the same parameter",
    )?;
    if grid.quantity != SweepQuantity::Rate {
        reject(point.base.is_some(), "base", "critical-point sweeps")?;
    }
    match grid.quantity {
        SweepQuantity::CriticalLoss | SweepQuantity::CriticalLossDb => {
            reject(point.t.is_some(), "t", "critical-loss sweeps")?
        }
        SweepQuantity::CriticalNoise => {
            reject(point.eps.is_some(), "eps", "critical-noise sweeps")?
        }
        SweepQuantity::Rate => {}
    }
    Ok(SweepSpec {
        axis: grid.axis,
        from: grid.from,
        to: grid.to,
        steps: grid.steps,
        quantity: grid.quantity,
        kind: point.protocol,
        bound,
        modulation: point.ra,
        alice_transmittivity: point.ta,
        transmission: point.t,
        excess_noise: point.eps,
        base: point.base.unwrap_or_default(),
    })
}

/// Writes a table and its warnings; fails only if no row is complete.
fn emit_table(table: &Table, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    for w in &table.warnings {
        writeln!(err, "warning: {w}")?;
    }
    out.write_all(table.to_csv().as_bytes())?;
    if table.complete_rows() == 0 {
        writeln!(err, "error: no grid point could be evaluated")?;
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn emit_constants(
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    let rows = constants_table();
    for r in &rows {
        if let Err(e) = &r.numeric {
            writeln!(err, "warning: {}: {e}", r.name)?;
        }
    }
    let numeric = |r: &crate::figures::ConstantRow| r.numeric.as_ref().ok().copied();
    match format {
        Format::Csv | Format::Text => {
            let table = Table {
                header: ["name", "analytic", "numeric", "abs_gap"]
                    .map(String::from)
                    .to_vec(),
                rows: vec![],
                warnings: vec![],
            };
            let mut text = table.to_csv();
            for r in &rows {
                let cells = [Some(r.analytic), numeric(r), r.gap()]
                    .map(|c| c.map(crate::output::format_sig).unwrap_or_default());
                text.push_str(&format!("{},{}\n", r.name, cells.join(",")));
            }
            if format == Format::Text {
                text = text
                    .lines()
                    .skip(1)
                    .map(|l| {
                        let f: Vec<&str> = l.split(',').collect();
                        format!(
                            "{}: analytic={} numeric={} abs_gap={}\n",
                            f[0], f[1], f[2], f[3]
                        )
                    })
                    .collect();
            }
            out.write_all(text.as_bytes())?;
        }
        Format::Json => {
            let list: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let opt = |v: Option<f64>| v.map(json_number).unwrap_or(Value::Null);
                    serde_json::json!({
                        "name": r.name,
                        "analytic": json_number(r.analytic),
                        "numeric": opt(numeric(r)),
                        "abs_gap": opt(r.gap()),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "constants": list, "version": VERSION });
            writeln!(out, "{doc}")?;
        }
    }
    Ok(EXIT_OK)
}

/// Runs each line of `text` as a request. Failed lines are reported on `err`
/// and produce no output; the exit code is the worst one seen.
fn run_batch(text: &str, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    let mut code = EXIT_OK;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match batch_line(line) {
            Ok(rec) => out.write_all(rec.render(Format::Json).as_bytes())?,
            Err(e) => {
                writeln!(err, "error: line {}: {e}", i + 1)?;
                code = code.max(exit_code(&e));
            }
        }
    }
    Ok(code)
}

fn batch_line(line: &str) -> Result<OutputRecord, Error> {
    let mut obj: serde_json::Map<String, Value> = serde_json::from_str(line)
        .map_err(|e| Error::invalid(format!("not a JSON object: {e}")))?;
    let cmd = match obj.remove("command") {
        Some(Value::String(s)) => PointCommand::parse(&s)?,
        _ => return Err(Error::invalid("missing string field \"command\"")),
    };
    let args: PointArgs =
        serde_json::from_value(Value::Object(obj)).map_err(|e| Error::invalid(e.to_string()))?;
    evaluate(cmd, &args)
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    let point = |c: PointCommand,
                 args: &PointArgs,
                 format: Format,
                 out: &mut dyn Write,
                 err: &mut dyn Write| {
        match evaluate(c, args) {
            Ok(rec) => out
                .write_all(rec.render(format).as_bytes())
                .map(|_| EXIT_OK),
            Err(e) => writeln!(err, "error: {e}").map(|_| exit_code(&e)),
        }
    };
    match cmd {
        Command::Rate { point: a, out: f } => point(PointCommand::Rate, &a, f.format, out, err),
        Command::CriticalLoss { point: a, out: f } => {
            point(PointCommand::CriticalLoss, &a, f.format, out, err)
        }
        Command::CriticalNoise { point: a, out: f } => {
            point(PointCommand::CriticalNoise, &a, f.format, out, err)
        }
        Command::Sweep { point: a, grid } => match sweep_spec(&a, &grid).and_then(|s| sweep(&s)) {
            Ok(table) => emit_table(&table, out, err),
            Err(e) => writeln!(err, "error: {e}").map(|_| exit_code(&e)),
        },
        Command::Fig2 => emit_table(&fig2(), out, err),
        Command::Fig3 => emit_table(&fig3(), out, err),
        Command::Constants { out: f } => emit_constants(f.format, out, err),
        Command::Batch { input } => match std::fs::read_to_string(&input) {
            Ok(text) => run_batch(&text, out, err),
            Err(e) => {
                writeln!(err, "error: cannot read {}: {e}", input.display()).map(|_| EXIT_USAGE)
            }
        },
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_NUMERICAL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("cvqkd").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn rate_text() {
        let (code, out, _) = run_str(&["rate", "--bound", "general", "--ra", "1", "--t", "1"]);
        assert_eq!(code, 0);
        assert!(
            out.starts_with("protocol: coherent\nbound: general\nra: 1\nta: 0.5\nt: 1\neps: 0\n")
        );
        assert!(out.contains("eve_term: 0\n"));
    }

    #[test]
    fn usage_errors() {
        for args in [
            &[
                "rate",
                "--bound",
                "general_w",
                "--protocol",
                "squeezed",
                "--ra",
                "1",
                "--t",
                "0.5",
            ][..],
            &[
                "rate",
                "--bound",
                "general",
                "--direction",
                "direct",
                "--ra",
                "1",
                "--t",
                "0.5",
            ],
            &["rate", "--bound", "collective", "--ra", "1", "--t", "0.5"],
            &["rate", "--ra", "NaN", "--t", "0.5"],
            &["rate", "--ra", "inf", "--t", "0.5"],
            &["rate", "--ra", "1"],
            &["critical-loss", "--ra", "1", "--t", "0.5"],
            &["critical-noise", "--ra", "1", "--t", "0.5", "--eps", "0.1"],
            &["rate", "--ra", "1", "--t", "1", "--eps", "0.1"],
            &[
                "sweep", "--x", "t", "--from", "0.1", "--to", "0.9", "--steps", "1", "--ra", "1",
            ],
            &[
                "sweep", "--x", "t", "--from", "0.5", "--to", "0.5", "--steps", "3", "--ra", "1",
            ],
            &[
                "sweep", "--x", "t", "--from", "0.1", "--to", "0.9", "--steps", "3", "--ra", "1",
                "--t", "0.5",
            ],
            &["bogus"],
            &["rate", "--format", "xml", "--ra", "1", "--t", "0.5"],
        ] {
            let (code, _, err) = run_str(args);
            assert_eq!(code, 1, "{args:?}: {err}");
            assert!(err.starts_with("error:"), "{args:?}: {err}");
        }
        let (_, _, err) = run_str(&[
            "rate",
            "--bound",
            "general_w",
            "--protocol",
            "squeezed",
            "--ra",
            "1",
            "--t",
            "0.5",
        ]);
        assert!(err.contains("general_w requires coherent"));
    }

    #[test]
    fn no_positive_region_exits_2() {
        let (code, out, err) = run_str(&[
            "critical-noise",
            "--bound",
            "collective",
            "--direction",
            "direct",
            "--ra",
            "15",
            "--t",
            "0.4",
        ]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("no-positive-region"));
    }

    #[test]
    fn help_and_version_exit_0() {
        assert_eq!(run_str(&["--help"]).0, 0);
        let (code, out, _) = run_str(&["--version"]);
        assert_eq!(code, 0);
        assert!(out.contains(VERSION));
    }

    #[test]
    fn batch_lines() {
        let text = concat!(
            r#"{"command":"rate","bound":"collective","direction":"reverse","ra":1,"t":0.3}"#,
            "\n\n",
            r#"{"command":"rate","ra":1,"t":0.5,"colour":"red"}"#,
            "\n",
            r#"{"command":"critical-noise","bound":"collective","direction":"direct","ra":15,"t":0.4}"#,
            "\n",
        );
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_batch(text, &mut out, &mut err).unwrap();
        assert_eq!(code, 2);
        let out = String::from_utf8(out).unwrap();
        assert_eq!(out.lines().count(), 1);
        let v: Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        assert!(v["key_rate"].as_f64().unwrap() > 0.0);
        assert_eq!(v["params"]["direction"], "reverse");
        let err = String::from_utf8(err).unwrap();
        assert!(err.contains("line 3:") && err.contains("line 4:"), "{err}");
    }
}
