//! Lossless decimal formatting with 17 significant digits.

/// Formats `x` with 17 significant digits, trimming trailing zeros and using
/// positional notation for moderate exponents. Parsing the result with
/// `str::parse::<f64>` gives back `x` exactly.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let body = if (-5..17).contains(&exp) {
        // Positional: decimal point sits after digit index `exp`.
        if exp >= 0 {
            let point = exp as usize + 1;
            if digits.len() <= point {
                format!("{digits}{}", "0".repeat(point - digits.len()))
            } else {
                format!("{}.{}", &digits[..point], &digits[point..])
            }
        } else {
            format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else if digits.len() == 1 {
        format!("{digits}e{exp}")
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn readable_values() {
        assert_eq!(format_f64(100.0), "100");
        assert_eq!(format_f64(1.0), "1");
        assert_eq!(format_f64(0.5), "0.5");
        assert_eq!(format_f64(-2.25), "-2.25");
        assert_eq!(format_f64(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_f64(0.25), "0.25");
        assert_eq!(format_f64(1.0 / 1.01), "0.99009900990099009");
        assert_eq!(format_f64(0.0), "0");
    }

    proptest! {
        #[test]
        fn round_trips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL) {
            let s = format_f64(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
