//! Parameter lists on the command line.
//!
//! A list is comma separated. Each item is a number or `start:stop:points`,
//! which expands to `points` equally spaced values from `start` to `stop`
//! inclusive. `0:1:5` gives `0, 0.25, 0.5, 0.75, 1`.

use crate::error::{flag_err, Result};

fn parse_number(flag: &'static str, text: &str) -> Result<f64> {
    let t = text.trim();
    let v = match t {
        "inf" | "+inf" => f64::INFINITY,
        _ => t
            .parse::<f64>()
            .map_err(|_| flag_err(flag, format!("`{t}` is not a number")))?,
    };
    if v.is_nan() {
        return Err(flag_err(flag, "NaN is not allowed"));
    }
    Ok(v)
}

/// Expands a list of reals.
pub fn parse_reals(flag: &'static str, text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(flag_err(flag, format!("empty item in `{text}`")));
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(parse_number(flag, x)?),
            [start, stop, points] => {
                let (a, b) = (parse_number(flag, start)?, parse_number(flag, stop)?);
                let n = parse_count(flag, points)?;
                if n == 0 {
                    return Err(flag_err(flag, format!("`{item}` has zero points")));
                }
                if !(a.is_finite() && b.is_finite()) {
                    return Err(flag_err(flag, format!("`{item}` needs finite ends")));
                }
                if n == 1 {
                    out.push(a);
                } else {
                    let last = (n - 1) as f64;
                    // endpoints exact, interior by the same expression for every i
                    out.extend((0..n).map(|i| {
                        if i + 1 == n {
                            b
                        } else {
                            a + (b - a) * (i as f64 / last)
                        }
                    }));
                }
            }
            _ => {
                return Err(flag_err(
                    flag,
                    format!("`{item}` is neither a number nor start:stop:points"),
                ))
            }
        }
    }
    Ok(out)
}

/// Parses a nonnegative integer; scientific notation such as `1e8` is
/// accepted when the value is integral.
pub fn parse_count(flag: &'static str, text: &str) -> Result<u64> {
    let t = text.trim();
    if let Ok(n) = t.parse::<u64>() {
        return Ok(n);
    }
    let v = parse_number(flag, t)?;
    if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(flag_err(
            flag,
            format!("`{t}` is not a nonnegative integer"),
        ))
    }
}

/// Expands a list of counts. Ranges are rounded to integers and duplicates
/// from rounding are dropped.
pub fn parse_counts(flag: &'static str, text: &str) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = Vec::new();
    for item in text.split(',') {
        if item.contains(':') {
            for v in parse_reals(flag, item)? {
                if v < 0.0 {
                    return Err(flag_err(flag, format!("negative count {v}")));
                }
                let n = v.round() as u64;
                if out.last() != Some(&n) {
                    out.push(n);
                }
            }
        } else {
            out.push(parse_count(flag, item)?);
        }
    }
    Ok(out)
}
