//! Rendering and parsing of real numbers in every output format.

use crate::error::{Error, Result};

/// Significant digits kept in every emitted real.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Relative tolerance for rank ties and constant score columns when scores
/// are computed from parsed tables. A parsed value can be off by up to half
/// a unit in the ninth digit (5e-9 relative), and the error grows through
/// the curve fit and the weighted sum; this leaves a tenfold margin over
/// the rendering step.
pub const PARSED_SCORE_TOLERANCE: f64 = 1e-7;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits. Negative zero
/// becomes zero so renderings never show `-0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("exponent formatting of a finite f64 parses");
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

/// Plain decimal text (no exponent) of `round_sig(x)`.
pub fn render(x: f64) -> String {
    round_sig(x).to_string()
}

/// Parses a finite decimal real, naming `what` in the error.
pub fn parse_real(text: &str, what: impl FnOnce() -> String) -> Result<f64> {
    let trimmed = text.trim();
    match trimmed.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(_) => Err(Error::Format(format!("{}: `{trimmed}` is not a finite number", what()))),
        Err(_) => Err(Error::Format(format!("{}: `{trimmed}` is not a number", what()))),
    }
}
