//! The map and function mini-grammar, see the README for the EBNF.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use circum_core::exceptional::ExceptionalParams;
use circum_core::expsum::{ExpSum, Term};
use circum_core::{Complex, Mobius, Polynomial, RationalMap};
use serde_json::Value;

/// A complex literal: `2`, `-1.5e-3`, `i`, `-2.5i`, `1+2i`, `3e2-i`.
pub fn parse_complex(s: &str) -> Result<Complex> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let real = |t: &str| -> Result<f64> {
        let ok = !t.is_empty() && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
        match t.parse::<f64>() {
            Ok(v) if ok && v.is_finite() => Ok(v),
            _ => bail!("bad number {t:?} in complex literal {s:?}"),
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex::new(real(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => real(t)?,
    };
    Ok(Complex::new(re, im))
}

fn parse_list(s: &str) -> Result<Vec<Complex>> {
    if s.trim().is_empty() {
        bail!("empty coefficient list");
    }
    s.split(',').map(parse_complex).collect()
}

fn parse_reals<const N: usize>(s: &str, what: &str) -> Result<[f64; N]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| match parse_complex(t)? {
            z if z.im == 0.0 => Ok(z.re),
            _ => bail!("{what}: expected a real number, got {t:?}"),
        })
        .collect::<Result<_>>()?;
    v.try_into().map_err(|v: Vec<f64>| anyhow!("{what}: expected {N} comma-separated numbers, got {}", v.len()))
}

/// `a,b` for intervals and strips.
pub fn parse_pair(s: &str, what: &str) -> Result<[f64; 2]> {
    parse_reals::<2>(s, what)
}

/// `re_min,re_max,im_min,im_max`.
pub fn parse_window(s: &str) -> Result<[f64; 4]> {
    parse_reals::<4>(s, "window")
}

/// `N` or `WxH`.
pub fn parse_resolution(s: &str) -> Result<(usize, usize)> {
    let num = |t: &str| t.trim().parse::<usize>().with_context(|| format!("bad resolution {s:?}"));
    match s.split_once(['x', 'X']) {
        Some((w, h)) => Ok((num(w)?, num(h)?)),
        None => {
            let n = num(s)?;
            Ok((n, n))
        }
    }
}

fn read_json(path: &str) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
    serde_json::from_str(&text).with_context(|| format!("{path} is not valid JSON"))
}

/// `poly:c_d,...,c_0`, `rat:num|den` (both descending) or `@file.json`.
pub fn parse_map(spec: &str) -> Result<RationalMap> {
    if let Some(rest) = spec.strip_prefix("poly:") {
        return Ok(RationalMap::polynomial(Polynomial::from_descending(&parse_list(rest)?)));
    }
    if let Some(rest) = spec.strip_prefix("rat:") {
        let (num, den) = rest.split_once('|').ok_or_else(|| anyhow!("rat: needs num|den"))?;
        let num = Polynomial::from_descending(&parse_list(num)?);
        let den = Polynomial::from_descending(&parse_list(den)?);
        return Ok(RationalMap::new(num, den)?);
    }
    if let Some(path) = spec.strip_prefix('@') {
        return serde_json::from_value(read_json(path)?).with_context(|| format!("{path} is not a rational map"));
    }
    bail!("unknown map spec {spec:?}: expected poly:, rat: or @file.json")
}

/// Anything the growth estimator can integrate.
#[derive(Debug, Clone)]
pub enum Function {
    Rational(RationalMap),
    ExpSum(ExpSum),
    Exceptional(ExceptionalParams),
}

/// A map spec, `expsum:c@μ,...` for `Σ c e^{iμz}`, `exceptional:c1,b1,c2,b2`
/// with `L = id`, or `@file.json` holding any of the three.
pub fn parse_function(spec: &str) -> Result<Function> {
    if let Some(rest) = spec.strip_prefix("expsum:") {
        let terms = rest
            .split(',')
            .map(|t| {
                let (c, mu) = t.split_once('@').ok_or_else(|| anyhow!("expsum term {t:?} needs coeff@freq"))?;
                let [mu] = parse_reals::<1>(mu, "frequency")?;
                Ok(Term::new(parse_complex(c)?, mu))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Function::ExpSum(ExpSum::new(terms)?));
    }
    if let Some(rest) = spec.strip_prefix("exceptional:") {
        let [c1, b1, c2, b2] = parse_reals::<4>(rest, "exceptional")?;
        return Ok(Function::Exceptional(ExceptionalParams::new(Mobius::identity(), c1, b1, c2, b2)?));
    }
    if let Some(path) = spec.strip_prefix('@') {
        let v = read_json(path)?;
        let f = if v.get("terms").is_some() {
            Function::ExpSum(serde_json::from_value(v)?)
        } else if v.get("c1").is_some() {
            Function::Exceptional(serde_json::from_value(v)?)
        } else {
            Function::Rational(serde_json::from_value(v)?)
        };
        return Ok(f);
    }
    Ok(Function::Rational(parse_map(spec)?))
}
