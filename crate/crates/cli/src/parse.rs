//! Value parsers for angles, lists and ranges.

/// Radians, or degrees with a `deg` suffix.
pub fn angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (number, scale) = match s.strip_suffix("deg") {
        Some(d) => (d.trim(), std::f64::consts::PI / 180.0),
        None => (s, 1.0),
    };
    let value: f64 = number
        .parse()
        .map_err(|_| format!("expected an angle in radians or with a `deg` suffix, got {s:?}"))?;
    if !value.is_finite() {
        return Err(format!("angle must be finite, got {s:?}"));
    }
    Ok(value * scale)
}

pub fn number(s: &str) -> Result<f64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("expected a number, got {s:?}"))
}

/// Comma-separated values parsed by `item`.
pub fn list(s: &str, item: fn(&str) -> Result<f64, String>) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = s
        .split(',')
        .filter(|v| !v.trim().is_empty())
        .map(item)
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err("list must not be empty".into());
    }
    Ok(values)
}

/// `LO:HI` or `LO:HI:STEPS`; `steps_required` selects the form.
pub fn range(s: &str, steps_required: bool) -> Result<(f64, f64, Option<usize>), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let expected = if steps_required { 3 } else { 2 };
    if parts.len() != expected {
        let form = if steps_required { "LO:HI:STEPS" } else { "LO:HI" };
        return Err(format!("expected {form}, got {s:?}"));
    }
    let lo = number(parts[0])?;
    let hi = number(parts[1])?;
    let steps = if steps_required {
        Some(
            parts[2]
                .trim()
                .parse()
                .map_err(|_| format!("expected an integer step count, got {:?}", parts[2]))?,
        )
    } else {
        None
    };
    Ok((lo, hi, steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(angle("0.5").unwrap(), 0.5);
        assert!((angle("45deg").unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-16);
        assert!((angle("-90 deg").unwrap() + std::f64::consts::FRAC_PI_2).abs() < 1e-16);
        assert!(angle("45 degrees").is_err());
        assert!(angle("nan").is_err());
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(range("0.01:100:41", true).unwrap(), (0.01, 100.0, Some(41)));
        assert_eq!(range("1:10", false).unwrap(), (1.0, 10.0, None));
        assert!(range("1:10", true).is_err());
        assert_eq!(list("0, 45deg", angle).unwrap()[0], 0.0);
        assert!(list("", number).is_err());
    }
}
