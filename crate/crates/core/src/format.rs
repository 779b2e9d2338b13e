//! Fixed textual rendering for numbers written to CSV and Markdown outputs.

/// Significant digits used for every probability written as text.
pub const PROBABILITY_DIGITS: usize = 12;

/// Renders `x` like C's `%.{digits}g`, with Rust's exponent syntax
/// (`1.5e-5` rather than `1.5e-05`) so that the text parses back with `str::parse`.
pub fn format_significant(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= digits as i32 {
        format!("{}e{}", trim_fraction(mantissa), exponent)
    } else {
        let decimals = (digits as i32 - 1 - exponent) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

pub fn format_probability(x: f64) -> String {
    format_significant(x, PROBABILITY_DIGITS)
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
