//! Inline input syntaxes: groups, rational functions and oscillating models.

use std::fs::File;
use std::path::Path;

use tsl_core::field::{parse_rational, ExactGauss, Gauss, Q};
use tsl_core::poly::Poly;
use tsl_core::sequence::{read_coeffs_csv, IndexSet, SeriesSpec};
use tsl_core::subsets::RationalSubset;
use tsl_core::{Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn list<T>(s: &str, what: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| f(t.trim()).map_err(|e| bad(format!("{what}: {e}")))).collect()
}

fn usize_token(t: &str) -> Result<usize> {
    t.parse().map_err(|_| Error::Parse(format!("not a nonnegative integer: {t:?}")))
}

/// `"2,3"` → free product of cyclic groups of orders 2 and 3.
pub fn parse_group(s: &str) -> Result<SeriesSpec> {
    let orders = list(s, "group orders", |t| t.parse::<u32>().map_err(|_| Error::Parse(format!("not an order: {t:?}"))))?;
    let spec = SeriesSpec::FreeProduct { orders };
    spec.validate()?;
    Ok(spec)
}

/// `"n0,n1,...;d0,d1,..."`, ascending coefficients as exact rationals.
pub fn parse_rational_function(s: &str) -> Result<SeriesSpec> {
    let (n, d) = s.split_once(';').ok_or_else(|| bad(format!("expected \"numerator;denominator\", got {s:?}")))?;
    let num = list(n, "numerator", parse_rational)?;
    let den = list(d, "denominator", parse_rational)?;
    if den.is_empty() {
        return Err(bad("empty denominator"));
    }
    let spec = SeriesSpec::rational(Poly::new(num), Poly::new(den));
    spec.validate()?;
    Ok(spec)
}

/// `"x"`, `"yi"`, `"x+yi"` or `"x-yi"` with exact rational parts.
pub fn parse_gauss(s: &str) -> Result<Gauss> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Gauss::new(parse_rational(s)?, Q::from_integer(0.into())));
    };
    // the sign separating the parts is the last one not opening the string or an exponent
    let split = body
        .char_indices()
        .filter(|&(i, c)| (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .next_back();
    let imag = |t: &str| match t {
        "" | "+" => Ok(Q::from_integer(1.into())),
        "-" => Ok(Q::from_integer((-1).into())),
        t => parse_rational(t),
    };
    match split {
        Some(i) => Ok(Gauss::new(parse_rational(&body[..i])?, imag(&body[i..])?)),
        None => Ok(Gauss::new(Q::from_integer(0.into()), imag(body)?)),
    }
}

/// `squares`, `explicit:i1,i2,...` or `mod:H:r1,r2[:added[:removed]]`.
pub fn parse_index_set(s: &str) -> Result<IndexSet> {
    let s = s.trim();
    if s == "squares" {
        return Ok(IndexSet::Squares);
    }
    if let Some(rest) = s.strip_prefix("explicit:") {
        return Ok(IndexSet::Explicit { indices: list(rest, "explicit indices", usize_token)? });
    }
    if let Some(rest) = s.strip_prefix("mod:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() < 2 || parts.len() > 4 {
            return Err(bad(format!("expected mod:H:residues[:added[:removed]], got {s:?}")));
        }
        let h = usize_token(parts[0])?;
        let residues = list(parts[1], "residues", usize_token)?;
        let added = parts.get(2).map_or(Ok(Vec::new()), |p| list(p, "added indices", usize_token))?;
        let removed = parts.get(3).map_or(Ok(Vec::new()), |p| list(p, "removed indices", usize_token))?;
        return Ok(IndexSet::Rational { subset: RationalSubset::new(h, residues, added, removed)? });
    }
    Err(bad(format!("unknown index set {s:?}")))
}

/// `"set=<index set>;a=<gauss>;b=<gauss>"`.
pub fn parse_model(s: &str) -> Result<SeriesSpec> {
    let (mut set, mut a, mut b) = (None, None, None);
    for field in s.split(';').map(str::trim).filter(|f| !f.is_empty()) {
        let (k, v) = field.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {field:?}")))?;
        match k.trim() {
            "set" => set = Some(parse_index_set(v)?),
            "a" => a = Some(parse_gauss(v)?),
            "b" => b = Some(parse_gauss(v)?),
            other => return Err(bad(format!("unknown model key {other:?}"))),
        }
    }
    let spec = SeriesSpec::OscillatingModel {
        set: set.ok_or_else(|| bad("model needs set=..."))?,
        a: ExactGauss(a.ok_or_else(|| bad("model needs a=..."))?),
        b: ExactGauss(b.ok_or_else(|| bad("model needs b=..."))?),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn read_coeffs(path: &Path) -> Result<SeriesSpec> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let spec = SeriesSpec::ExplicitCoeffs { coeffs: read_coeffs_csv(f)? };
    spec.validate()?;
    Ok(spec)
}

pub fn read_spec(path: &Path) -> Result<SeriesSpec> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let spec: SeriesSpec = serde_json::from_reader(f)?;
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsl_core::field::{q, qi};

    #[test]
    fn rational_syntax() {
        let s = parse_rational_function("1;1,-1").unwrap();
        assert_eq!(s, SeriesSpec::rational(Poly::new(vec![qi(1)]), Poly::new(vec![qi(1), qi(-1)])));
        let s = parse_rational_function("1/2, 0 ;1,-1/3").unwrap();
        assert_eq!(s, SeriesSpec::rational(Poly::new(vec![q(1, 2)]), Poly::new(vec![qi(1), q(-1, 3)])));
        assert!(parse_rational_function("1,2").is_err());
        assert!(parse_rational_function("1;0,1").is_err());
        assert!(parse_rational_function("1;x").is_err());
    }

    #[test]
    fn group_syntax() {
        assert_eq!(parse_group("2, 3").unwrap(), SeriesSpec::FreeProduct { orders: vec![2, 3] });
        assert!(parse_group("1,3").is_err());
        assert!(parse_group("").is_err());
    }

    #[test]
    fn gauss_syntax() {
        assert_eq!(parse_gauss("1/2").unwrap(), Gauss::new(q(1, 2), qi(0)));
        assert_eq!(parse_gauss("1+i").unwrap(), Gauss::new(qi(1), qi(1)));
        assert_eq!(parse_gauss("-1/2-3/4i").unwrap(), Gauss::new(q(-1, 2), q(-3, 4)));
        assert_eq!(parse_gauss("-i").unwrap(), Gauss::new(qi(0), qi(-1)));
        assert_eq!(parse_gauss("2i").unwrap(), Gauss::new(qi(0), qi(2)));
        assert_eq!(parse_gauss("1e-1+1e-2i").unwrap(), Gauss::new(q(1, 10), q(1, 100)));
    }

    #[test]
    fn model_syntax() {
        let m = parse_model("set=squares;a=1/2;b=2").unwrap();
        assert!(matches!(m, SeriesSpec::OscillatingModel { set: IndexSet::Squares, .. }));
        let m = parse_model("set=mod:4:1,3:8:5;a=1/2;b=2").unwrap();
        let SeriesSpec::OscillatingModel { set: IndexSet::Rational { subset }, .. } = m else { panic!() };
        assert!(subset.contains(8) && !subset.contains(5) && subset.contains(7));
        assert!(parse_model("set=squares;a=1/2").is_err());
        assert!(parse_model("set=cubes;a=1;b=2").is_err());
    }
}
