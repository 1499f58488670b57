//! Locale-independent number formatting for CSV output.

use crate::scalar::Real;

/// Significant digits used in every CSV column.
pub const CSV_DIGITS: usize = 9;

/// Formats `x` with `digits` significant digits, `%g` style but without
/// trimming trailing zeros: fixed notation for exponents in `[-5, digits)`,
/// scientific otherwise. Always `.` as decimal separator.
pub fn sig<T: Real>(x: T, digits: usize) -> String {
    let x = x.to_f64_lossy();
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { "-" } else { "+" };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// [`sig`] with [`CSV_DIGITS`].
pub fn csv<T: Real>(x: T) -> String {
    sig(x, CSV_DIGITS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_and_scientific() {
        assert_eq!(csv(2.0 * 2f64.sqrt()), "2.82842712");
        assert_eq!(csv(2.0_f64), "2.00000000");
        assert_eq!(csv(std::f64::consts::FRAC_PI_4), "0.785398163");
        assert_eq!(csv(-1.0e-7_f64), "-1.00000000e-07");
        assert_eq!(csv(123456789012.0_f64), "1.23456789e+11");
        assert_eq!(csv(0.0_f64), "0");
        assert_eq!(csv(9.9999999999_f64), "10.0000000");
        assert_eq!(csv(f64::NAN), "nan");
    }
}
