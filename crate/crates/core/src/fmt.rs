//! Number formatting with a fixed count of significant digits, in the style
//! of C's `%.Ng`.

/// Format `x` with `digits` significant digits, trimming trailing zeros.
/// Uses exponent notation when the decimal exponent is below -5 or at least
/// `digits`.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
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
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
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

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig(0.0, 12), "0");
        assert_eq!(sig(12.25, 12), "12.25");
        assert_eq!(sig(0.25, 12), "0.25");
        assert_eq!(sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(sig(-2.0 / 3.0, 4), "-0.6667");
        assert_eq!(sig(123456.0, 3), "1.23e5");
        assert_eq!(sig(1e-7, 12), "1e-7");
        assert_eq!(sig(0.0001234, 2), "0.00012");
        assert_eq!(sig(99.99, 3), "100");
        assert_eq!(sig(f64::NEG_INFINITY, 5), "-inf");
    }

    #[test]
    fn round_trips_at_17_digits() {
        for x in [std::f64::consts::PI, 1e-300, -6.02e23, 7289.56 / 7290.56] {
            assert_eq!(sig(x, 17).parse::<f64>().unwrap(), x);
        }
    }
}
