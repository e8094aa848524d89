//! Number formatting for CSV output: 12 significant digits, `.` as decimal
//! separator, trailing zeros trimmed, `inf` for unbounded values.

use qreading::critical::Threshold;

pub const SIGNIFICANT: usize = 12;

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Formats like C's `%.12g`, with an unpadded exponent (`6.2e-7`).
pub fn real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT as i32 {
        format!("{}e{exp}", trim_fraction(mantissa))
    } else {
        let decimals = (SIGNIFICANT as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

pub fn threshold(t: Threshold) -> String {
    match t {
        Threshold::Finite(m) => m.to_string(),
        Threshold::Unbounded => "inf".into(),
    }
}

pub fn optional(x: Option<f64>) -> String {
    x.map_or_else(|| "inf".into(), real)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(real(0.0), "0");
        assert_eq!(real(-0.0), "0");
        assert_eq!(real(1.0), "1");
        assert_eq!(real(0.5), "0.5");
        assert_eq!(real(200000.0), "200000");
        assert_eq!(real(1.0 / 3.0), "0.333333333333");
        assert_eq!(real(2.0 / 3.0 * 1e-3), "0.000666666666667");
        assert_eq!(real(6.2e-7), "6.2e-7");
        assert_eq!(real(2.242e-5), "2.242e-5");
        assert_eq!(real(1e-4), "0.0001");
        assert_eq!(real(-1.25e20), "-1.25e20");
        assert_eq!(real(9.9999999999999e-1), "1");
        assert_eq!(real(123456789012345.0), "1.23456789012e14");
        assert_eq!(real(f64::INFINITY), "inf");
        assert_eq!(threshold(Threshold::Unbounded), "inf");
        assert_eq!(threshold(Threshold::Finite(42)), "42");
        assert_eq!(optional(None), "inf");
    }
}
