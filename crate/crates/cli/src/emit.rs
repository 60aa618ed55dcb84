//! CSV/JSON emission helpers and small parsers shared by the commands.
//!
//! Floats are printed with 17 significant digits ('.' decimal, no locale),
//! which round-trips every f64 exactly.

use num_complex::Complex64;
use rslab_core::{Error, Result};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parse "2", "1.5", "2+i", "2-0.5i", "0.7i" into a complex number.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    if !s.ends_with('i') {
        let re: f64 = s
            .parse()
            .map_err(|e| Error::Parse(format!("bad complex literal {text:?}: {e}")))?;
        return Ok(Complex64::new(re, 0.0));
    }
    let body = &s[..s.len() - 1];
    // split at the sign of the imaginary part (not a leading sign, not an
    // exponent sign)
    let mut split = None;
    for (idx, ch) in body.char_indices().rev() {
        if (ch == '+' || ch == '-') && idx > 0 {
            let prev = body.as_bytes()[idx - 1];
            if prev != b'e' && prev != b'E' {
                split = Some(idx);
                break;
            }
        }
    }
    let (re_part, im_part) = match split {
        Some(idx) => (&body[..idx], &body[idx..]),
        None => ("", body),
    };
    let re: f64 = if re_part.is_empty() {
        0.0
    } else {
        re_part
            .parse()
            .map_err(|e| Error::Parse(format!("bad complex literal {text:?}: {e}")))?
    };
    let im: f64 = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other
            .parse()
            .map_err(|e| Error::Parse(format!("bad complex literal {text:?}: {e}")))?,
    };
    Ok(Complex64::new(re, im))
}

/// Parse "1e4" or "31623" into a grid coordinate.
pub fn parse_count(text: &str) -> Result<u64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad number {text:?}: {e}")))?;
    if !v.is_finite() || v < 0.0 || v > u64::MAX as f64 {
        return Err(Error::Parse(format!("number {text:?} out of range")));
    }
    Ok(v.round() as u64)
}

/// Grid spec: either "lo:hi:geometric" (half-decade spacing) or an explicit
/// comma list "1e4,1e5,1e6".
pub fn parse_grid(spec: &str) -> Result<Vec<u64>> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 || parts[2] != "geometric" {
            return Err(Error::Parse(format!(
                "grid spec {spec:?} must be lo:hi:geometric or a comma list"
            )));
        }
        let lo = parse_count(parts[0])?;
        let hi = parse_count(parts[1])?;
        if lo < 2 || hi < lo {
            return Err(Error::Parse(format!("grid bounds {lo}..{hi} are invalid")));
        }
        return Ok(rslab_core::pnt::geometric_grid(lo, hi));
    }
    let mut grid = Vec::new();
    for part in spec.split(',') {
        grid.push(parse_count(part)?);
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid.is_empty() {
        return Err(Error::Parse("grid list must be strictly increasing".into()));
    }
    Ok(grid)
}

pub fn write_output(path: Option<&std::path::Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(p, content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("2+i").unwrap(), Complex64::new(2.0, 1.0));
        assert_eq!(parse_complex("2+1i").unwrap(), Complex64::new(2.0, 1.0));
        assert_eq!(parse_complex("2-0.5i").unwrap(), Complex64::new(2.0, -0.5));
        assert_eq!(parse_complex("0.7i").unwrap(), Complex64::new(0.0, 0.7));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(
            parse_complex("1e-3+2e-4i").unwrap(),
            Complex64::new(1e-3, 2e-4)
        );
        assert!(parse_complex("chaos").is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for v in [
            0.1,
            1.0 / 3.0,
            94.045_311_229_357_4,
            -1.7182818e-12,
            999586.5974956327,
        ] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s}");
        }
    }

    #[test]
    fn grid_specs() {
        assert_eq!(
            parse_grid("1e4:1e6:geometric").unwrap(),
            vec![10_000, 31_623, 100_000, 316_228, 1_000_000]
        );
        assert_eq!(parse_grid("100,1000").unwrap(), vec![100, 1000]);
        assert!(parse_grid("1e6:1e4:geometric").is_err());
        assert!(parse_grid("1e4:1e6:linear").is_err());
    }
}
