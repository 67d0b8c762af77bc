//! Hexadecimal float text (`0x1.8p+1`), exact in both directions.

pub fn format(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 {
        (0, -1022)
    } else {
        (1, exp_bits - 1023)
    };
    let digits = format!("{mantissa:013x}");
    let digits = digits.trim_end_matches('0');
    if digits.is_empty() {
        format!("{sign}0x{lead}p{exp:+}")
    } else {
        format!("{sign}0x{lead}.{digits}p{exp:+}")
    }
}

/// Parses the form written by [`format`]. Returns `None` for malformed text
/// or values that would need rounding.
pub fn parse(s: &str) -> Option<f64> {
    match s {
        "nan" => return Some(f64::NAN),
        "inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let body = body.strip_prefix("0x")?;
    let (mant_text, exp_text) = body.split_once('p')?;
    let exp: i64 = exp_text.parse().ok()?;
    let (int_part, frac_part) = mant_text.split_once('.').unwrap_or((mant_text, ""));
    if int_part.is_empty() || int_part.len() > 1 || frac_part.len() > 13 {
        return None;
    }
    let mut mantissa: u64 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        mantissa = (mantissa << 4) | c.to_digit(16)? as u64;
    }
    let shift = exp - 4 * frac_part.len() as i64;
    let magnitude = if mantissa == 0 {
        0.0
    } else {
        scale_exact(mantissa, shift)?
    };
    Some(if negative { -magnitude } else { magnitude })
}

fn scale_exact(mantissa: u64, shift: i64) -> Option<f64> {
    if mantissa >> 53 != 0 {
        return None;
    }
    let value = scale(mantissa as f64, shift);
    // a value that lost bits on the way down does not scale back
    if !value.is_finite() || scale(value, -shift) != mantissa as f64 {
        return None;
    }
    Some(value)
}

fn scale(mut value: f64, mut shift: i64) -> f64 {
    while shift != 0 {
        let step = shift.clamp(-1000, 1000);
        value *= f64::powi(2.0, step as i32);
        shift -= step;
    }
    value
}
