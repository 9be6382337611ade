//! Catalog of entire functions.
//!
//! A [`FunctionSpec`] is the plain description of a catalog entry; building it
//! yields an [`EntireFunction`] with any per-parameter tables precomputed.
//! Every entry can report `log f(z)` without overflow, which is what the
//! growth, tract and iteration code consume.

mod growth;
pub mod mittag_leffler;
mod parse;
pub mod scaled;

pub use growth::{
    max_log_modulus, max_modulus, order_estimate, sector_angles, sector_bound_check, MaxModulus,
    OrderEstimate, SectorReport,
};
pub use mittag_leffler::{MittagLeffler, Method, Sector};
pub use parse::parse_complex;
pub use scaled::{wrap_angle, Scaled, LN_MAX};

use crate::quadrature::panel_rule;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One entry of the function catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `λ e^z`
    Exp { lambda: Complex64 },
    /// `sin(αz + β)`
    Sine { alpha: Complex64, beta: Complex64 },
    /// `E_α(z)`
    MittagLeffler { alpha: f64 },
    /// `E_α(z^N)`
    MittagLefflerPower { alpha: f64, n: u32 },
    /// `λ E_α(z^N)`
    ScaledMittagLefflerPower { lambda: f64, alpha: f64, n: u32 },
    /// `∫₀^z P(t) e^{Q(t)} dt + c`, coefficients in ascending degree.
    ErdosIntegral { p: Vec<Complex64>, q: Vec<Complex64>, c: Complex64 },
}

impl FunctionSpec {
    pub fn exp() -> Self {
        FunctionSpec::Exp { lambda: Complex64::new(1.0, 0.0) }
    }

    pub fn sine() -> Self {
        FunctionSpec::Sine { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.0, 0.0) }
    }

    pub fn mittag_leffler(alpha: f64) -> Self {
        FunctionSpec::MittagLeffler { alpha }
    }

    pub fn build(&self) -> Result<EntireFunction> {
        EntireFunction::new(self.clone())
    }

    /// Bound on the moduli of the critical and finite asymptotic values, as
    /// used by [`default_threshold`](Self::default_threshold).
    pub fn singular_value_bound(&self) -> f64 {
        match self {
            FunctionSpec::Exp { lambda } => lambda.norm(),
            FunctionSpec::Sine { .. } => 1.0,
            _ => 10.0,
        }
    }

    /// `R = max(10, 2|f(0)|, 2·bound)`.
    pub fn default_threshold(&self) -> Result<f64> {
        let f = self.build()?;
        let f0 = f.value_at_zero().norm();
        Ok(10f64.max(2.0 * f0).max(2.0 * self.singular_value_bound()))
    }
}

/// `log|f(z)|` together with whether a direct evaluation would overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogModulus {
    pub value: f64,
    pub overflow_safe: bool,
}

#[derive(Debug, Clone)]
enum Kind {
    Exp { lambda: Complex64 },
    Sine { alpha: Complex64, beta: Complex64 },
    Ml { ml: MittagLeffler, power: u32, lambda: f64 },
    Erdos { p: Vec<Complex64>, q: Vec<Complex64>, c: Complex64 },
}

/// A validated catalog entry ready for evaluation. Immutable and `Sync`.
#[derive(Debug, Clone)]
pub struct EntireFunction {
    spec: FunctionSpec,
    kind: Kind,
}

const SINE_DIRECT_LIMIT: f64 = 20.0;

impl EntireFunction {
    pub fn new(spec: FunctionSpec) -> Result<Self> {
        let kind = match &spec {
            FunctionSpec::Exp { lambda } => {
                if *lambda == Complex64::new(0.0, 0.0) {
                    return Err(Error::Parameter("exp family needs λ ≠ 0".into()));
                }
                Kind::Exp { lambda: *lambda }
            }
            FunctionSpec::Sine { alpha, beta } => {
                if *alpha == Complex64::new(0.0, 0.0) {
                    return Err(Error::Parameter("sine family needs α ≠ 0".into()));
                }
                Kind::Sine { alpha: *alpha, beta: *beta }
            }
            FunctionSpec::MittagLeffler { alpha } => {
                Kind::Ml { ml: MittagLeffler::new(*alpha)?, power: 1, lambda: 1.0 }
            }
            FunctionSpec::MittagLefflerPower { alpha, n } => {
                check_power(*n)?;
                Kind::Ml { ml: MittagLeffler::new(*alpha)?, power: *n, lambda: 1.0 }
            }
            FunctionSpec::ScaledMittagLefflerPower { lambda, alpha, n } => {
                check_power(*n)?;
                if !(*lambda > 0.0) {
                    return Err(Error::Parameter(format!("scale λ must be > 0, got {lambda}")));
                }
                Kind::Ml { ml: MittagLeffler::new(*alpha)?, power: *n, lambda: *lambda }
            }
            FunctionSpec::ErdosIntegral { p, q, c } => {
                if p.is_empty() || q.is_empty() {
                    return Err(Error::Parameter("polynomial coefficient lists must be nonempty".into()));
                }
                Kind::Erdos { p: p.clone(), q: q.clone(), c: *c }
            }
        };
        Ok(Self { spec, kind })
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn value_at_zero(&self) -> Complex64 {
        match &self.kind {
            Kind::Exp { lambda } => *lambda,
            Kind::Sine { beta, .. } => beta.sin(),
            Kind::Ml { lambda, .. } => Complex64::new(*lambda, 0.0),
            Kind::Erdos { c, .. } => *c,
        }
    }

    /// `f(z)` in scaled form; never overflows.
    pub fn scaled(&self, z: Complex64) -> Scaled {
        self.scaled_with_log_derivative(z).0
    }

    /// `f(z)` in scaled form together with `f'(z)/f(z)`.
    pub fn scaled_with_log_derivative(&self, z: Complex64) -> (Scaled, Complex64) {
        match &self.kind {
            Kind::Exp { lambda } => {
                let mant = *lambda * Complex64::new(0.0, z.im).exp();
                (Scaled::new(mant, z.re), Complex64::new(1.0, 0.0))
            }
            Kind::Sine { alpha, beta } => {
                let u = *alpha * z + *beta;
                (sine_scaled(u), *alpha * cot(u))
            }
            Kind::Ml { ml, power, lambda } => {
                let w = if *power == 1 { z } else { z.powu(*power) };
                let ev = ml.evaluate(w);
                let dlog = ev.dmant / ev.value.mant;
                let chain = if *power == 1 {
                    Complex64::new(1.0, 0.0)
                } else {
                    z.powu(*power - 1) * *power as f64
                };
                (ev.value.scale_by(Complex64::new(*lambda, 0.0)), dlog * chain)
            }
            Kind::Erdos { p, q, c } => {
                let value = erdos_integral(p, q, *c, z);
                let log_integrand = horner(p, z).ln() + horner(q, z);
                (value, (log_integrand - value.ln()).exp())
            }
        }
    }

    /// `f(z)`, or [`Error::Overflow`] carrying `log|f(z)|`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let s = self.scaled(z);
        s.to_complex().ok_or(Error::Overflow { log_modulus: s.ln_abs() })
    }

    pub fn log_modulus(&self, z: Complex64) -> LogModulus {
        let value = self.scaled(z).ln_abs();
        LogModulus { value, overflow_safe: value > LN_MAX }
    }

    /// Principal value of `log f(z)`.
    pub fn log_value(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            // exact for the exponential: log λ + z
            Kind::Exp { lambda } => Complex64::new(
                z.re + lambda.norm().ln(),
                wrap_angle(z.im + lambda.arg()),
            ),
            _ => self.scaled(z).ln(),
        }
    }

    /// `f'(z)/f(z)`.
    pub fn log_derivative(&self, z: Complex64) -> Complex64 {
        self.scaled_with_log_derivative(z).1
    }

    /// `f'(z)`, or overflow.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let (s, d) = self.scaled_with_log_derivative(z);
        let out = s.scale_by(d);
        out.to_complex().ok_or(Error::Overflow { log_modulus: out.ln_abs() })
    }
}

fn check_power(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::Parameter("power N must be ≥ 1".into()))
    } else {
        Ok(())
    }
}

/// `sin u` with the dominant exponential factored out when `|Im u|` is large.
fn sine_scaled(u: Complex64) -> Scaled {
    let i = Complex64::new(0.0, 1.0);
    if u.im.abs() <= SINE_DIRECT_LIMIT {
        Scaled::plain(u.sin())
    } else if u.im > 0.0 {
        // sin u = (i/2) e^{-iu} (1 - e^{2iu})
        let mant = i * 0.5 * Complex64::new(0.0, -u.re).exp() * (1.0 - (2.0 * i * u).exp());
        Scaled::new(mant, u.im)
    } else {
        // sin u = (-i/2) e^{iu} (1 - e^{-2iu})
        let mant = -i * 0.5 * Complex64::new(0.0, u.re).exp() * (1.0 - (-2.0 * i * u).exp());
        Scaled::new(mant, -u.im)
    }
}

fn cot(u: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if u.im >= 0.0 {
        let e = (2.0 * i * u).exp();
        i * (e + 1.0) / (e - 1.0)
    } else {
        let e = (-2.0 * i * u).exp();
        i * (1.0 + e) / (1.0 - e)
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Composite Gauss–Legendre on the segment `[0, z]` with panel doubling until
/// successive values agree to 1e-10 relative.
fn erdos_integral(p: &[Complex64], q: &[Complex64], c: Complex64, z: Complex64) -> Scaled {
    if z == Complex64::new(0.0, 0.0) {
        return Scaled::plain(c);
    }
    let mut panels = 1usize;
    let mut prev = panel_sum(p, q, z, panels);
    loop {
        panels *= 2;
        let cur = panel_sum(p, q, z, panels);
        let scale = cur.log_scale.max(prev.log_scale);
        let a = cur.mant * (cur.log_scale - scale).exp();
        let b = prev.mant * (prev.log_scale - scale).exp();
        let converged = (a - b).norm() <= 1e-10 * a.norm();
        prev = cur;
        if converged || panels >= 4096 {
            break;
        }
    }
    let integral = prev;
    if !integral.log_scale.is_finite() {
        return Scaled::plain(c);
    }
    if integral.log_scale <= 0.0 {
        Scaled::plain(integral.mant * integral.log_scale.exp() + c)
    } else {
        Scaled::new(integral.mant + c * (-integral.log_scale).exp(), integral.log_scale)
    }
}

fn panel_sum(p: &[Complex64], q: &[Complex64], z: Complex64, panels: usize) -> Scaled {
    let (nodes, weights) = panel_rule();
    let h = 1.0 / panels as f64;
    let mut logs = Vec::with_capacity(panels * nodes.len());
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in nodes.iter().zip(weights) {
            let t = z * (mid + 0.5 * h * x);
            let jac = z * (0.5 * h * w);
            logs.push(horner(p, t).ln() + horner(q, t) + jac.ln());
        }
    }
    let scale = logs
        .iter()
        .map(|l| l.re)
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !scale.is_finite() {
        return Scaled::new(Complex64::new(0.0, 0.0), f64::NEG_INFINITY);
    }
    let mant = logs
        .iter()
        .filter(|l| l.re.is_finite())
        .map(|l| (l - scale).exp())
        .sum();
    Scaled::new(mant, scale)
}

/// `f(z)` for a catalog spec.
pub fn eval(spec: &FunctionSpec, z: Complex64) -> Result<Complex64> {
    spec.build()?.eval(z)
}

/// `E_α(z)`.
pub fn eval_mittag_leffler(alpha: f64, z: Complex64) -> Result<Complex64> {
    let ml = MittagLeffler::new(alpha)?;
    let s = ml.value(z);
    s.to_complex().ok_or(Error::Overflow { log_modulus: s.ln_abs() })
}

pub fn log_modulus(spec: &FunctionSpec, z: Complex64) -> Result<LogModulus> {
    Ok(spec.build()?.log_modulus(z))
}
