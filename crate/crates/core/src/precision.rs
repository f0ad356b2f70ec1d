//! Decimal rounding applied to arithmetic results when precision mode is on.

/// Largest supported number of decimal digits.
pub const MAX_DIGITS: u32 = 15;

/// Default digit count for serialization and precision mode.
pub const DEFAULT_DIGITS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    Off,
    Digits(u32),
}

impl Rounding {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Rounding::Off => x,
            Rounding::Digits(k) => round_to(x, k),
        }
    }
}

/// Round half away from zero to `digits` decimal places.
pub fn round_to(x: f64, digits: u32) -> f64 {
    let scale = 10f64.powi(digits as i32);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Fixed-point decimal rendering with exactly `digits` fractional digits.
/// Never uses scientific notation and never prints a negative zero.
pub fn format_fixed(x: f64, digits: u32) -> String {
    let s = format!("{:.*}", digits as usize, x);
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Shortest decimal text that parses back to the same `f64`.
pub fn format_exact(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x}")
}
