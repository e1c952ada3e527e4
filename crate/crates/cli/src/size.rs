//! Exact parsing of integer sizes written as `1000000`, `1e9` or `2.5e3`.

/// Parses a non-negative integer, allowing a decimal mantissa and exponent
/// as long as the value is integral.
pub fn parse_integer(input: &str) -> Result<u64, String> {
    let s = input.trim().replace('_', "");
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let exp: i64 = s[i + 1..]
                .trim_start_matches('+')
                .parse()
                .map_err(|_| format!("bad exponent in `{input}`"))?;
            (&s[..i], exp)
        }
        None => (s.as_str(), 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(format!("`{input}` is not a non-negative number"));
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    let mut scale = exponent - frac_part.len() as i64;
    let mut digits = digits.to_string();
    while scale < 0 && digits.ends_with('0') {
        digits.pop();
        scale += 1;
    }
    if digits.is_empty() {
        return Ok(0);
    }
    if scale < 0 {
        return Err(format!("`{input}` is not an integer"));
    }
    let too_big = || format!("`{input}` is too large");
    let mut value: u64 = digits.parse().map_err(|_| too_big())?;
    for _ in 0..scale {
        value = value.checked_mul(10).ok_or_else(too_big)?;
    }
    Ok(value)
}
