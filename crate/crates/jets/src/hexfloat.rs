//! Exact text form of `f64` values (`0x1.8p+1` style).

/// Formats `x` as a hexadecimal float literal that parses back bit-exactly.
pub fn format_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let mut digits = format!("{mant:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let esign = if e >= 0 { "+" } else { "-" };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{esign}{}", e.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{esign}{}", e.abs())
    }
}

/// Parses a literal produced by [`format_hex`]. Returns `None` for anything
/// that is not an exactly representable hexadecimal float.
pub fn parse_hex(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "inf" | "+inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (mant_txt, exp_txt) = rest.split_once(['p', 'P'])?;
    let exp: i64 = exp_txt.parse().ok()?;
    let (int_txt, frac_txt) = mant_txt.split_once('.').unwrap_or((mant_txt, ""));
    if int_txt.is_empty() && frac_txt.is_empty() {
        return None;
    }
    // Accumulate the significand as an integer; reject more than 64 bits.
    let mut m: u128 = 0;
    for c in int_txt.chars().chain(frac_txt.chars()) {
        m = m.checked_mul(16)?.checked_add(c.to_digit(16)? as u128)?;
        if m >= 1u128 << 100 {
            return None;
        }
    }
    let e2 = exp - 4 * frac_txt.len() as i64;
    let v = scale_exact(m, e2)?;
    Some(if neg { -v } else { v })
}

/// `m * 2^e` if exactly representable.
fn scale_exact(m: u128, e: i64) -> Option<f64> {
    if m == 0 {
        return Some(0.0);
    }
    let bits = 128 - m.leading_zeros() as i64;
    // Strip trailing zero bits so the significand fits in 53 bits if possible.
    let tz = m.trailing_zeros() as i64;
    let (m, e) = (m >> tz, e + tz);
    let bits = bits - tz;
    if bits > 53 {
        return None;
    }
    let top = e + bits - 1;
    if top > 1023 {
        return None;
    }
    if e < -1074 {
        return None;
    }
    let mut v = m as f64;
    // Apply the exponent in steps that stay exact.
    let mut k = e;
    while k > 0 {
        let s = k.min(1000);
        v *= 2f64.powi(s as i32);
        k -= s;
    }
    while k < 0 {
        let s = (-k).min(1000);
        let f = 2f64.powi(-(s as i32));
        if f == 0.0 {
            return None;
        }
        let next = v * f;
        if next == 0.0 {
            // Take smaller steps near the subnormal range.
            let half = s / 2;
            if half == 0 {
                return None;
            }
            v *= 2f64.powi(-(half as i32));
            k += half;
            continue;
        }
        v = next;
        k += s;
    }
    Some(v)
}
