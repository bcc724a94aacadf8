//! Deterministic CSV rendering.

use std::fmt::Write as _;

use crate::cli::config::Column;
use crate::observables::EntropyRecord;

/// Formats like C's `%.12g`, except that negative zero prints as `0`.
pub fn format_g12(x: f64) -> String {
    const PRECISION: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header plus one row per record; undefined values are empty cells.
pub fn render_csv(records: &[EntropyRecord], columns: &[Column]) -> String {
    let mut out = String::new();
    let header: Vec<&str> = columns.iter().map(|c| c.name()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for r in records {
        for (i, c) in columns.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if let Some(v) = c.value(r) {
                write!(out, "{}", format_g12(v)).expect("writing to a String");
            }
        }
        out.push('\n');
    }
    out
}
