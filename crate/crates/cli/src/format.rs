use std::fmt;
use std::str::FromStr;

/// A radius given either as a number or as a multiple of R (`2R`, `0.5R`, `R`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiusArg {
    Absolute(f64),
    TimesR(f64),
}

impl RadiusArg {
    pub fn resolve(self, r: f64) -> f64 {
        match self {
            RadiusArg::Absolute(x) => x,
            RadiusArg::TimesR(k) => k * r,
        }
    }

    pub fn needs_r(self) -> bool {
        matches!(self, RadiusArg::TimesR(_))
    }
}

impl FromStr for RadiusArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let positive = |x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(x)
            } else {
                Err(format!("radius '{s}' must be positive"))
            }
        };
        if let Some(k) = s.strip_suffix('R') {
            let k = if k.is_empty() { 1.0 } else { k.parse().map_err(|_| format!("bad radius '{s}'"))? };
            return Ok(RadiusArg::TimesR(positive(k)?));
        }
        Ok(RadiusArg::Absolute(positive(s.parse().map_err(|_| format!("bad radius '{s}'"))?)?))
    }
}

impl fmt::Display for RadiusArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusArg::Absolute(x) => f.write_str(&num(*x)),
            RadiusArg::TimesR(k) if *k == 1.0 => f.write_str("R"),
            RadiusArg::TimesR(k) => write!(f, "{}R", num(*k)),
        }
    }
}

/// Ten significant digits, trailing zeros removed.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..10).contains(&mag) {
        let s = format!("{x:.9e}");
        let (m, e) = s.split_once('e').unwrap();
        return format!("{}e{e}", trim(m));
    }
    let decimals = (9 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    trim(&s).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn point(p: delone::Point) -> String {
    format!("({}, {}, {})", num(p.x), num(p.y), num(p.z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_forms() {
        assert_eq!("2R".parse::<RadiusArg>().unwrap(), RadiusArg::TimesR(2.0));
        assert_eq!("R".parse::<RadiusArg>().unwrap(), RadiusArg::TimesR(1.0));
        assert_eq!("14R".parse::<RadiusArg>().unwrap().resolve(0.5), 7.0);
        assert_eq!("1.5".parse::<RadiusArg>().unwrap(), RadiusArg::Absolute(1.5));
        assert!("-1".parse::<RadiusArg>().is_err());
        assert!("xR".parse::<RadiusArg>().is_err());
    }

    #[test]
    fn ten_significant_digits() {
        assert_eq!(num(3f64.sqrt() / 2.0), "0.8660254038");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.9999999999999999), "1");
        assert_eq!(num(-0.33669731449), "-0.3366973145");
        assert_eq!(num(123.456), "123.456");
        assert_eq!(num(1e-7), "1e-7");
        assert_eq!(num(0.0), "0");
    }
}
