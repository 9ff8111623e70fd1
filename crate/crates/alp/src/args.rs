//! Parsing of rational parameters, moduli and `m` grids.

use num_rational::Rational64;

use crate::Failure;

/// Exact value of `"7/2"`, `"-3"`, or (when `decimal` is set) `"0.25"`.
pub fn parse_exact(s: &str, decimal: bool) -> Result<Rational64, Failure> {
    let s = s.trim();
    let bad = || Failure::Usage(format!("cannot read {s:?} as a rational number"));
    if s.contains('/') || !s.contains('.') {
        return s.parse::<Rational64>().map_err(|_| bad());
    }
    if !decimal {
        return Err(Failure::Usage(format!("{s:?}: give a and b as integers or fractions such as 7/2")));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').ok_or_else(bad)?;
    if frac.len() > 15 || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) || int.len() + frac.len() == 0 {
        return Err(bad());
    }
    let digits: i64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let r = Rational64::new(digits, 10i64.pow(frac.len() as u32));
    Ok(if neg { -r } else { r })
}

pub fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// A potential index `a` or `b`.
pub fn parse_index(s: &str) -> Result<Rational64, Failure> {
    parse_exact(s, false)
}

fn check_m(m: f64, shown: &str) -> Result<f64, Failure> {
    if m.is_finite() && (0.0..1.0).contains(&m) {
        Ok(m)
    } else {
        Err(Failure::Usage(format!("m = {shown} must lie in [0, 1)")))
    }
}

/// A single modulus: exact forms first, then any float literal such as `1e-12`.
pub fn parse_m(s: &str) -> Result<f64, Failure> {
    let m = match parse_exact(s, true) {
        Ok(r) => to_f64(r),
        Err(e) => s.trim().parse::<f64>().map_err(|_| e)?,
    };
    check_m(m, s.trim())
}

/// `start:stop:step`, inclusive of `stop` when the step lands on it.
/// Grid points are computed exactly, so `0.1:0.3:0.1` gives `0.1, 0.2, 0.3`.
pub fn parse_m_range(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(Failure::Usage(format!("m range {s:?} should look like 0.01:0.99:0.01")));
    };
    let (start, stop, step) = (parse_exact(start, true)?, parse_exact(stop, true)?, parse_exact(step, true)?);
    if step <= Rational64::from_integer(0) || stop < start {
        return Err(Failure::Usage(format!("m range {s:?} needs start ≤ stop and a positive step")));
    }
    let n = ((stop - start) / step).floor().to_integer();
    if n > 100_000 {
        return Err(Failure::Usage(format!("m range {s:?} has more than 100000 points")));
    }
    (0..=n)
        .map(|i| {
            let m = start + step * i;
            check_m(to_f64(m), &m.to_string())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_echo_back() {
        for s in ["7/2", "-1/2", "3", "0", "-5"] {
            assert_eq!(parse_index(s).unwrap().to_string(), s);
        }
        assert_eq!(parse_index("6/4").unwrap().to_string(), "3/2");
        assert!(parse_index("1/0").is_err());
        assert!(parse_index("0.5").is_err());
        assert!(parse_index("x").is_err());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_exact("0.25", true).unwrap(), Rational64::new(1, 4));
        assert_eq!(parse_exact("-.5", true).unwrap(), Rational64::new(-1, 2));
        assert!(parse_exact("1.2.3", true).is_err());
        assert!(parse_exact(".", true).is_err());
    }

    #[test]
    fn moduli() {
        assert_eq!(parse_m("0.5").unwrap(), 0.5);
        assert_eq!(parse_m("1/2").unwrap(), 0.5);
        assert_eq!(parse_m("1e-12").unwrap(), 1e-12);
        assert!(parse_m("1").is_err());
        assert!(parse_m("-0.1").is_err());
        assert!(parse_m("nan").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_m_range("0.1:0.3:0.1").unwrap(), [0.1, 0.2, 0.3]);
        assert_eq!(parse_m_range("0:0.5:0.2").unwrap(), [0.0, 0.2, 0.4]);
        assert_eq!(parse_m_range("0.5:0.5:0.1").unwrap(), [0.5]);
        assert!(parse_m_range("0.5:1:0.25").is_err());
        assert!(parse_m_range("0.5:0.1:0.1").is_err());
        assert!(parse_m_range("0.1:0.2").is_err());
    }
}
