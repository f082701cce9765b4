//! Locale-independent rendering of results as text, CSV or JSON.

use serde_json::{Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Significant digits used for every printed float.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats like C's `%.9g`: nine significant digits, trailing zeros dropped,
/// scientific notation outside `1e-5 <= |x| < 1e9`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let prec = SIGNIFICANT_DIGITS - 1;
    let sci = format!("{x:.prec$e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIGNIFICANT_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (prec as i32 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A float rounded to [`SIGNIFICANT_DIGITS`], as a JSON number.
pub fn json_number(x: f64) -> Value {
    format_sig(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json_number(*x),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

/// Echoed parameters followed by result fields, in a fixed order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputRecord {
    pub params: Vec<(&'static str, Cell)>,
    pub fields: Vec<(&'static str, Cell)>,
}

impl OutputRecord {
    fn flat(&self) -> impl Iterator<Item = (&'static str, Cell)> + '_ {
        self.params
            .iter()
            .chain(self.fields.iter())
            .cloned()
            .chain(std::iter::once(("version", Cell::text(VERSION))))
    }

    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self
            .params
            .iter()
            .filter(|(_, c)| *c != Cell::Empty)
            .map(|(k, c)| (k.to_string(), c.json()))
            .collect();
        let mut obj = Map::new();
        obj.insert("params".into(), Value::Object(params));
        for (k, c) in self.fields.iter().filter(|(_, c)| *c != Cell::Empty) {
            obj.insert(k.to_string(), c.json());
        }
        obj.insert("version".into(), Value::String(VERSION.into()));
        Value::Object(obj)
    }

    /// Rendering terminated by a newline.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self
                .flat()
                .filter(|(_, c)| *c != Cell::Empty)
                .map(|(k, c)| format!("{k}: {}\n", c.render()))
                .collect(),
            Format::Csv => {
                let (keys, vals): (Vec<_>, Vec<_>) = self
                    .flat()
                    .map(|(k, c)| (k.to_string(), c.render()))
                    .unzip();
                format!("{}\n{}\n", keys.join(","), vals.join(","))
            }
            Format::Json => format!("{}\n", self.to_json()),
        }
    }
}
