//! Angle and number parsing for command-line values.
//!
//! Accepted forms: decimals (`0.7854`), multiples of π (`pi`, `pi/3`,
//! `2pi/3`, `2*pi/3`) and arctangents (`atan:2`, `atan:sqrt2`, `atan:sqrt(3)`).

use std::f64::consts::PI;

fn parse_scalar(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("sqrt") {
        let inner = rest.trim_start_matches('(').trim_end_matches(')');
        let x = parse_scalar(inner)?;
        if x < 0.0 {
            return Err(format!("square root of negative number {x}"));
        }
        return Ok(x.sqrt());
    }
    s.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))
}

/// Parses an angle in radians.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim().to_ascii_lowercase();
    if let Some(arg) = s.strip_prefix("atan:") {
        return Ok(parse_scalar(arg)?.atan());
    }
    if let Some(pos) = s.find("pi") {
        let (num, rest) = s.split_at(pos);
        let rest = &rest[2..];
        let num = num.trim_end_matches('*');
        let factor = if num.is_empty() { 1.0 } else { parse_scalar(num)? };
        let divisor = match rest.strip_prefix('/') {
            Some(d) => parse_scalar(d)?,
            None if rest.is_empty() => 1.0,
            None => return Err(format!("cannot parse angle {s:?}")),
        };
        if divisor == 0.0 {
            return Err("division by zero in angle".into());
        }
        return Ok(factor * PI / divisor);
    }
    parse_scalar(&s).map_err(|_| format!("cannot parse angle {s:?}; use a decimal, pi/N or atan:X"))
}
