//! Fixed float rendering shared by every emitted artifact.

/// Renders `v` like C's `%g`: six significant digits, trailing zeros
/// dropped, scientific notation below 1e-4 and from 1e6 up.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        trim_fraction(format!("{:.*}", (5 - exp) as usize, v))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa.to_string()), exp.abs())
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        let keep = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(keep);
    }
    s
}

/// Empty for missing values.
pub fn format_opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// `v` rounded to the six significant digits it is printed with.
pub fn round6(v: f64) -> f64 {
    format_float(v).parse().unwrap_or(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333"),
            (2.0 / 3.0, "0.666667"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (999999.5, "1e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (1e-300, "1e-300"),
            (2.0794415416798357, "2.07944"),
            (100.0, "100"),
        ];
        for (v, want) in cases {
            assert_eq!(format_float(v), want, "{v}");
        }
    }

    #[test]
    fn round_trip_is_stable() {
        for v in [0.123456789, -98765.4321, 3.0e-7, 1.5e12] {
            let once = round6(v);
            assert_eq!(round6(once), once);
            assert_eq!(format_float(once), format_float(v));
        }
    }

    #[test]
    fn missing_is_empty() {
        assert_eq!(format_opt(None), "");
        assert_eq!(format_opt(Some(0.5)), "0.5");
    }
}
