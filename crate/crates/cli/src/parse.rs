//! Argument value parsers.

use std::f64::consts::PI;

/// Radians, or a multiple of pi: `0.25pi`, `pi/4`, `-3pi/4`, `2*pi/3`, `pi`.
pub fn angle(s: &str) -> Result<f64, String> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .replace('π', "pi")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let value = if let Some(idx) = t.find("pi") {
        let (coef, rest) = (&t[..idx], &t[idx + 2..]);
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let coef = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => number(c, s)?,
        };
        let denom = match rest {
            "" => 1.0,
            r => match r.strip_prefix('/') {
                Some(d) => number(d, s)?,
                None => return Err(format!("cannot parse angle '{s}'")),
            },
        };
        if denom == 0.0 {
            return Err(format!("zero denominator in angle '{s}'"));
        }
        coef * PI / denom
    } else {
        number(&t, s)?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("angle '{s}' is not finite"))
    }
}

fn number(token: &str, whole: &str) -> Result<f64, String> {
    token
        .parse::<f64>()
        .map_err(|_| format!("cannot parse '{whole}'"))
}

/// Comma-separated finite reals.
pub fn real_list(s: &str) -> Result<Vec<f64>, String> {
    let values = s
        .split(',')
        .map(|tok| number(tok.trim(), s))
        .collect::<Result<Vec<f64>, _>>()?;
    if values.iter().any(|x| !x.is_finite()) {
        return Err(format!("non-finite value in '{s}'"));
    }
    Ok(values)
}

/// Grid of degrees of entanglement, `start:stop:step` or a comma list,
/// returned in ascending order without duplicates. Every point must lie in
/// `[0, 1]`.
pub fn g_grid(s: &str) -> Result<Vec<f64>, String> {
    let mut values = if s.contains(':') {
        let parts = s
            .split(':')
            .map(|tok| number(tok.trim(), s))
            .collect::<Result<Vec<f64>, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(format!("grid '{s}' must be start:stop:step"));
        };
        if step.is_nan() || step <= 0.0 || stop.is_nan() || start.is_nan() || stop < start {
            return Err(format!("grid '{s}' needs step > 0 and stop >= start"));
        }
        let span = (stop - start) / step;
        let n = span.round();
        if (span - n).abs() > 1e-9 {
            return Err(format!("step does not divide the range in '{s}'"));
        }
        let n = n as usize;
        (0..=n)
            .map(|k| {
                if k == n {
                    stop
                } else {
                    start + k as f64 * step
                }
            })
            .collect()
    } else {
        real_list(s)?
    };
    if let Some(bad) = values.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(format!("grid point {bad} is outside [0, 1]"));
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}

/// Joins values with commas using the shortest round-trip representation.
pub fn join_exact(values: &[f64]) -> String {
    values
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
