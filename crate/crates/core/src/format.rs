//! Deterministic number formatting for CSV and report output.

/// Significant digits kept in CSV and report output.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to `digits` significant digits. Non-finite values pass through.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    let r: f64 = s.parse().expect("formatted float reparses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Formats with [`SIGNIFICANT_DIGITS`] significant digits in the shortest
/// text that reparses to the rounded value.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x, SIGNIFICANT_DIGITS);
    if r == 0.0 {
        return "0".to_owned();
    }
    let a = r.abs();
    if (1e-6..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
