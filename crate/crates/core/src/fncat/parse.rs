//! Textual form of catalog entries.
//!
//! ```text
//! exp[:λ]            sin[:α[:β]]         ml:α
//! mlpow:α:N          smlpow:λ:α:N        erdos:<P>:<Q>:<c>
//! ```
//!
//! Complex literals are written `a`, `bi`, `a+bi` or `a-bi`; polynomial
//! coefficients are comma-separated in ascending degree.

use super::FunctionSpec;
use crate::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("malformed complex literal '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign and not leading
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() { 0.0 } else { re_part.parse::<f64>().map_err(|_| bad())? };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("malformed real '{s}'")))
}

fn parse_power(s: &str) -> Result<u32> {
    s.trim().parse::<u32>().map_err(|_| Error::Parse(format!("malformed power '{s}'")))
}

fn parse_coeffs(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').map(parse_complex).collect()
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if parts.len() < lo || parts.len() > hi {
                Err(Error::Parse(format!("'{s}': wrong number of fields for '{}'", parts[0])))
            } else {
                Ok(())
            }
        };
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match parts[0] {
            "exp" => {
                arity(1, 2)?;
                let lambda = parts.get(1).map(|p| parse_complex(p)).transpose()?.unwrap_or(one);
                Ok(FunctionSpec::Exp { lambda })
            }
            "sin" => {
                arity(1, 3)?;
                let alpha = parts.get(1).map(|p| parse_complex(p)).transpose()?.unwrap_or(one);
                let beta = parts.get(2).map(|p| parse_complex(p)).transpose()?.unwrap_or(zero);
                Ok(FunctionSpec::Sine { alpha, beta })
            }
            "ml" => {
                arity(2, 2)?;
                Ok(FunctionSpec::MittagLeffler { alpha: parse_real(parts[1])? })
            }
            "mlpow" => {
                arity(3, 3)?;
                Ok(FunctionSpec::MittagLefflerPower { alpha: parse_real(parts[1])?, n: parse_power(parts[2])? })
            }
            "smlpow" => {
                arity(4, 4)?;
                Ok(FunctionSpec::ScaledMittagLefflerPower {
                    lambda: parse_real(parts[1])?,
                    alpha: parse_real(parts[2])?,
                    n: parse_power(parts[3])?,
                })
            }
            "erdos" => {
                arity(4, 4)?;
                Ok(FunctionSpec::ErdosIntegral {
                    p: parse_coeffs(parts[1])?,
                    q: parse_coeffs(parts[2])?,
                    c: parse_complex(parts[3])?,
                })
            }
            other => Err(Error::Parse(format!("unknown function family '{other}'"))),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Exp { lambda } => write!(f, "exp:{}", fmt_complex(*lambda)),
            FunctionSpec::Sine { alpha, beta } => {
                write!(f, "sin:{}:{}", fmt_complex(*alpha), fmt_complex(*beta))
            }
            FunctionSpec::MittagLeffler { alpha } => write!(f, "ml:{alpha}"),
            FunctionSpec::MittagLefflerPower { alpha, n } => write!(f, "mlpow:{alpha}:{n}"),
            FunctionSpec::ScaledMittagLefflerPower { lambda, alpha, n } => {
                write!(f, "smlpow:{lambda}:{alpha}:{n}")
            }
            FunctionSpec::ErdosIntegral { p, q, c } => {
                let join = |v: &[Complex64]| v.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(",");
                write!(f, "erdos:{}:{}:{}", join(p), join(q), fmt_complex(*c))
            }
        }
    }
}
