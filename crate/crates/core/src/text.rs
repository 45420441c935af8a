//! Canonical number formatting for all text artifacts.
//!
//! Floats are serialized with 17 significant digits, enough to round-trip
//! any f64 exactly, so save/load/save cycles are byte-identical.

/// 17-significant-digit scientific form, e.g. `3.8000000000000000e1`.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Parse an f64, mapping errors to a message naming the offending token.
pub fn parse_f64(tok: &str) -> Result<f64, String> {
    tok.parse::<f64>()
        .map_err(|_| format!("invalid float `{tok}`"))
}

/// Parse an f64 and reject non-finite values.
pub fn parse_finite_f64(tok: &str) -> Result<f64, String> {
    let v = parse_f64(tok)?;
    if !v.is_finite() {
        return Err(format!("non-finite value `{tok}`"));
    }
    Ok(v)
}
