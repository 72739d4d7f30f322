//! Number formatting for CSV output: 9 significant digits, shortest form.

/// Formats `v` like C's `%.9g`.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(-2.5), "-2.5");
        assert_eq!(sig9(0.1), "0.1");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1234567894.0), "1.23456789e9");
        assert_eq!(sig9(1.5e-7), "1.5e-7");
        assert_eq!(sig9(9.9999999996), "10");
        assert_eq!(sig9(0.00012345678912), "0.000123456789");
    }

    proptest! {
        #[test]
        fn written_values_are_stable(x in prop::num::f64::NORMAL) {
            let s = sig9(x);
            let parsed: f64 = s.parse().unwrap();
            prop_assert_eq!(sig9(parsed), s.clone());
            prop_assert!(((parsed - x) / x).abs() <= 5e-9);
        }
    }
}
