//! Grid specifications on the command line.
//!
//! A list is comma separated; each item is a number, a linear range
//! `start:stop:step`, or a log range `start:stop:xN` with N points per decade.

use crate::output::{CliError, Result};

fn num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config(format!("'{s}' is not a number")))
}

/// Rounds away the float noise of `start + i * step`.
fn tidy(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(11 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

pub fn parse_reals(spec: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(num(x)?),
            [a, b, step] => {
                let (a, b) = (num(a)?, num(b)?);
                if b < a {
                    return Err(CliError::Config(format!("range '{item}' runs backwards")));
                }
                if let Some(per_decade) = step.trim().strip_prefix('x') {
                    let k = num(per_decade)?;
                    if a <= 0.0 || k < 1.0 {
                        return Err(CliError::Config(format!("bad log range '{item}'")));
                    }
                    let n = ((b / a).log10() * k + 1e-9).floor() as usize;
                    out.extend((0..=n).map(|i| tidy(a * 10f64.powf(i as f64 / k))));
                } else {
                    let s = num(step)?;
                    if s <= 0.0 {
                        return Err(CliError::Config(format!("step of '{item}' must be positive")));
                    }
                    let n = ((b - a) / s + 1e-9).floor() as usize;
                    out.extend((0..=n).map(|i| tidy(a + i as f64 * s)));
                }
            }
            _ => return Err(CliError::Config(format!("cannot read '{item}'"))),
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("empty grid".into()));
    }
    Ok(out)
}

pub fn parse_counts(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for x in parse_reals(spec)? {
        if x < 0.0 || x.fract() != 0.0 {
            return Err(CliError::Config(format!("{x} is not a whole number")));
        }
        out.push(x as usize);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_counts("3,5,7").unwrap(), vec![3, 5, 7]);
        assert_eq!(parse_counts("3:9:2").unwrap(), vec![3, 5, 7, 9]);
        let e = parse_reals("0.002:0.012:0.001").unwrap();
        assert_eq!(e.len(), 11);
        assert_eq!(e[4], 0.006);
        assert_eq!(e[10], 0.012);
        assert_eq!(
            parse_reals("1e-6:1e-4:x2").unwrap(),
            vec![1e-6, 3.16227766017e-6, 1e-5, 3.16227766017e-5, 1e-4]
        );
        assert!(parse_reals("0.1:0.0:0.1").is_err());
        assert!(parse_reals("a").is_err());
        assert!(parse_counts("2.5").is_err());
    }
}
