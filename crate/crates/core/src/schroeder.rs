//! Linearization of `E_β(x) = e^{βx}` at its repelling fixed point.
//!
//! For `0 < β < 1/e` the map `E_β` has a repelling fixed point `ξ > e` with
//! multiplier `μ = βξ > 1`. The Schröder function `Φ` solves
//! `Φ(E_β(x)) = μ Φ(x)`, `Φ(ξ) = 0`, `Φ'(ξ) = 1`, and is computed here as the
//! Koenigs limit `Φ(x) = lim μⁿ (L_βⁿ(x) − ξ)` of the inverse branch
//! `L_β(y) = log(y)/β`, for which `ξ` is attracting.
//!
//! The iteration runs on the offset `d = y − ξ` through
//! `d ↦ ln(1 + d/ξ)/β`, which follows from `ln ξ = βξ` and keeps full relative
//! precision as `d → 0`.

use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::E;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_DEPTH: usize = 200;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchroederSolution {
    pub beta: f64,
    pub xi: f64,
    pub mu: f64,
    pub koenigs_depth: usize,
    pub tol: f64,
}

/// Solve `e^{βx} = x` for the root above `e`.
pub fn fixed_point(beta: f64) -> Result<SchroederSolution> {
    if !(beta > 0.0 && beta < 1.0 / E) {
        return Err(Error::Parameter(format!("beta must lie in (0, 1/e), got {beta}")));
    }
    // g(x) = βx − ln x is negative on (e, ξ) and positive beyond ξ
    let g = |x: f64| beta * x - x.ln();
    let mut hi = 10.0_f64;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Domain(format!("no fixed point bracket for beta {beta}")));
        }
    }
    let mut lo = E;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let xi = if g(hi).abs() < g(lo).abs() { hi } else { lo };
    Ok(SchroederSolution { beta, xi, mu: beta * xi, koenigs_depth: DEFAULT_DEPTH, tol: DEFAULT_TOL })
}

impl SchroederSolution {
    pub fn new(beta: f64) -> Result<Self> {
        fixed_point(beta)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.koenigs_depth = depth;
        self
    }

    /// `|e^{βξ} − ξ| / ξ`
    pub fn fixed_point_residual(&self) -> f64 {
        ((self.beta * self.xi).exp() - self.xi).abs() / self.xi
    }

    fn koenigs(&self, d0: f64, scale: f64) -> f64 {
        let (xi, beta, mu) = (self.xi, self.beta, self.mu);
        let stop = self.tol * (mu - 1.0) / mu;
        let mut d = d0;
        let mut power = scale;
        let mut phi = power * d;
        for _ in 0..self.koenigs_depth {
            d = (d / xi).ln_1p() / beta;
            power *= mu;
            let next = power * d;
            let change = (next - phi).abs();
            phi = next;
            if change <= stop * phi.abs() {
                break;
            }
        }
        phi
    }

    /// `Φ(x)` for `x ≥ ξ`.
    pub fn phi(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < self.xi {
            return Err(Error::Domain(format!("Φ is defined on [ξ, ∞) = [{}, ∞), got {x}", self.xi)));
        }
        if x.is_infinite() {
            return Err(Error::Overflow { log_modulus: f64::INFINITY });
        }
        Ok(self.koenigs(x - self.xi, 1.0))
    }

    /// `Φ(e^y)`, usable when `e^y` itself is out of floating range.
    pub fn phi_of_exp(&self, y: f64) -> Result<f64> {
        let first = y / self.beta;
        if first.is_nan() || first < self.xi {
            return Err(Error::Domain(format!("e^{y} lies below ξ = {}", self.xi)));
        }
        if first.is_infinite() {
            return Err(Error::Overflow { log_modulus: y });
        }
        Ok(self.koenigs(first - self.xi, self.mu))
    }

    /// `ε(x) = 1/Φ(x)` for `x > ξ`.
    pub fn epsilon(&self, x: f64) -> Result<f64> {
        if !(x > self.xi) {
            return Err(Error::Domain(format!("ε needs x > ξ = {}, got {x}", self.xi)));
        }
        Ok(1.0 / self.phi(x)?)
    }

    /// `ε(e^y)`.
    pub fn epsilon_of_exp(&self, y: f64) -> Result<f64> {
        let phi = self.phi_of_exp(y)?;
        if phi <= 0.0 {
            return Err(Error::Domain(format!("ε needs e^y > ξ, got y = {y}")));
        }
        Ok(1.0 / phi)
    }

    /// `Φ(e^{βx}) − μΦ(x)` relative to `1 + μΦ(x)`, evaluating the left side
    /// directly whenever `e^{βx}` is representable.
    pub fn functional_residual(&self, x: f64) -> Result<f64> {
        let rhs = self.mu * self.phi(x)?;
        let image = (self.beta * x).exp();
        let lhs = if image.is_finite() { self.phi(image)? } else { self.phi_of_exp(self.beta * x)? };
        Ok((lhs - rhs).abs() / (1.0 + rhs.abs()))
    }

    /// Orbit `x_n = E_βⁿ(x0)` tracked through `log x_n` and `log log x_n`,
    /// together with `Φ(x_n) = μⁿ Φ(x0)`.
    pub fn tower_orbit(&self, x0: f64, n_max: usize) -> Result<Vec<TowerPoint>> {
        let phi0 = self.phi(x0)?;
        let mut out = Vec::with_capacity(n_max + 1);
        // x_{n-1}, x_{n-2} as plain floats (possibly infinite)
        let (mut prev, mut prev2) = (f64::NAN, f64::NAN);
        let mut x = x0;
        for n in 0..=n_max {
            let log_x = if n == 0 { x0.ln() } else { self.beta * prev };
            let log_log_x = match n {
                0 => x0.ln().ln(),
                1 => (self.beta * x0).ln(),
                _ => self.beta.ln() + self.beta * prev2,
            };
            if log_log_x.is_infinite() {
                break;
            }
            out.push(TowerPoint { n, x, log_x, log_log_x, phi: self.mu.powi(n as i32) * phi0 });
            prev2 = prev;
            prev = x;
            x = (self.beta * x).exp();
        }
        Ok(out)
    }

    /// `δ(x_n) = ε(exp x_n)` along `x_n = E_βⁿ(x0)`, `n = 0..=n_max`.
    pub fn delta_sequence(&self, x0: f64, n_max: usize) -> Result<DeltaSequence> {
        if !(x0 > self.xi) {
            return Err(Error::Domain(format!("need x0 > ξ = {}, got {x0}", self.xi)));
        }
        let phi_x0 = self.phi(x0)?;
        let bounds: Vec<f64> =
            (0..=n_max).map(|n| 1.0 / (self.mu.powi(n as i32 + 1) * phi_x0)).collect();
        let mut values = Vec::with_capacity(n_max + 1);
        let mut orbit = Vec::with_capacity(n_max + 1);
        let mut x = x0;
        let mut truncated = false;
        for _ in 0..=n_max {
            let value = if x.is_finite() {
                self.epsilon_of_exp(x)
            } else {
                // x = e^{β x_prev} overflowed: Φ(e^x) = μ Φ(x/β) = μ Φ(e^{β x_prev − ln β})
                let log_x = self.beta * orbit.last().copied().unwrap_or(f64::INFINITY);
                self.phi_of_exp(log_x - self.beta.ln()).map(|p| 1.0 / (self.mu * p))
            };
            match value {
                Ok(v) if v.is_finite() => {
                    values.push(v);
                    orbit.push(x);
                }
                _ => {
                    truncated = true;
                    break;
                }
            }
            x = (self.beta * x).exp();
        }
        Ok(DeltaSequence { x0, phi_x0, values, orbit, bounds, truncated })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TowerPoint {
    pub n: usize,
    /// `x_n`, infinite once out of floating range.
    pub x: f64,
    pub log_x: f64,
    pub log_log_x: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaSequence {
    pub x0: f64,
    pub phi_x0: f64,
    /// Computed `δ(x_n)`; shorter than `bounds` when truncated.
    pub values: Vec<f64>,
    /// `x_n` for each computed value (infinite for the last one when it was
    /// reached through logarithms).
    pub orbit: Vec<f64>,
    /// `1/(μ^{n+1} Φ(x0))` for `n = 0..=n_max`.
    pub bounds: Vec<f64>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductReport {
    pub eta: f64,
    pub factors: Vec<f64>,
    pub partial_products: Vec<f64>,
    /// Number of leading factors built from computed δ values; later ones use the bound.
    pub computed_factors: usize,
    pub limit_estimate: f64,
}

impl DeltaSequence {
    /// `δ(x_n)` when computed, otherwise its upper bound.
    pub fn value_or_bound(&self, n: usize) -> Option<f64> {
        self.values.get(n).or_else(|| self.bounds.get(n)).copied()
    }

    /// Partial products `∏_{k=1}^{n} (1 − η δ(x_k))`. Past truncation the bound
    /// replaces `δ`, which can only lower the product.
    pub fn partial_products(&self, eta: f64) -> Result<ProductReport> {
        let n_max = self.bounds.len() - 1;
        if n_max < 1 {
            return Err(Error::Parameter("need at least one factor".into()));
        }
        let d1 = self.value_or_bound(1).unwrap_or(0.0);
        if !(eta > 0.0 && eta * d1 < 1.0) {
            return Err(Error::Parameter(format!("eta must lie in (0, 1/δ(x1)) = (0, {}), got {eta}", 1.0 / d1)));
        }
        let factors: Vec<f64> = (1..=n_max).map(|k| 1.0 - eta * self.value_or_bound(k).unwrap()).collect();
        let mut acc = 1.0;
        let partial_products: Vec<f64> = factors
            .iter()
            .map(|f| {
                acc *= f;
                acc
            })
            .collect();
        let computed_factors = self.values.len().saturating_sub(1).min(n_max);
        // tail beyond n_max: Σ_{k>n} ηδ(x_k) ≤ η·bound_n/(μ−1), μ = bound_{n}/bound_{n+1}
        let last_bound = self.bounds[n_max];
        let mu = self.bounds[0] / self.bounds[1];
        let tail = (1.0 - eta * last_bound / (mu - 1.0)).max(0.0);
        Ok(ProductReport { eta, factors, partial_products, computed_factors, limit_estimate: acc * tail })
    }
}
