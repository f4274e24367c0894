//! Deterministic text output for CSV artifacts.

use std::fmt::Write;

/// Formats a float with the shortest representation that round-trips.
///
/// Plain notation is used for moderate magnitudes, exponent notation
/// otherwise, so tiny error values stay short.
pub fn float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let a = x.abs();
    if (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Renders a CSV document from a header and rows of floats.
pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| float(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
