//! Angle literals such as `pi`, `pi/2`, `3pi/4`, `2*pi/3` or `0.785`.

use std::f64::consts::PI;

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if s.is_empty() {
        return Err("empty angle".into());
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (s.as_str(), None),
    };
    let numerator = match num.strip_suffix("pi") {
        Some(prefix) => {
            let prefix = prefix.strip_suffix('*').unwrap_or(prefix);
            let k = if prefix.is_empty() {
                1.0
            } else {
                parse_number(prefix, text)?
            };
            k * PI
        }
        None => parse_number(num, text)?,
    };
    let value = match den {
        Some(d) => {
            let d = parse_number(d, text)?;
            if d == 0.0 {
                return Err(format!("zero denominator in angle {text:?}"));
            }
            numerator / d
        }
        None => numerator,
    };
    if !value.is_finite() {
        return Err(format!("angle {text:?} is not finite"));
    }
    Ok(value)
}

fn parse_number(s: &str, whole: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("cannot parse angle {whole:?}"))
}
