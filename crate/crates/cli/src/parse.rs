use loewner::ComplexPoint;

/// Parses `<re>+<im>i` or `<re>-<im>i` with decimal reals.
pub fn parse_complex(text: &str) -> Result<ComplexPoint, String> {
    let s = text.trim();
    let body = s
        .strip_suffix('i')
        .ok_or_else(|| format!("`{text}`: expected <re>+<im>i or <re>-<im>i"))?;
    let bytes = body.as_bytes();
    // the separating sign is the last one not opening the string or an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(|| format!("`{text}`: missing sign between real and imaginary parts"))?;
    let re = parse_real(&body[..split]).ok_or_else(|| format!("`{text}`: bad real part"))?;
    let im = parse_real(&body[split..]).ok_or_else(|| format!("`{text}`: bad imaginary part"))?;
    Ok(ComplexPoint::new(re, im))
}

fn parse_real(s: &str) -> Option<f64> {
    let digits = s.trim_start_matches(['+', '-']);
    if digits.is_empty() || !digits.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_both_signs() {
        assert_eq!(parse_complex("1+1i").unwrap(), ComplexPoint::new(1.0, 1.0));
        assert_eq!(parse_complex("-2.5-0.25i").unwrap(), ComplexPoint::new(-2.5, -0.25));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), ComplexPoint::new(1e-3, 20.0));
        assert_eq!(parse_complex("+0.5+.5i").unwrap(), ComplexPoint::new(0.5, 0.5));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1", "1+i", "i", "1+1", "abc", "1+1j", "1++1i", "nan+1i", "1+infi", "2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }
}
