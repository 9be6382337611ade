//! Mittag-Leffler function `E_α(z) = Σ zⁿ / Γ(αn + 1)` for `0 < α ≤ 2`.
//!
//! Two representations are combined:
//!
//! * the power series, accurate while the cancellation budget
//!   `ε_mach · E_α(|z|) ≈ ε_mach · exp(|z|^ρ) / α` stays small;
//! * the large-|z| form
//!   `E_α(z) = (1/α) Σ_m exp((z e^{2πim})^ρ) − Σ_{k≥1} z^{-k} / Γ(1 − αk)`, ρ = 1/α,
//!   where the exponential sum runs over the branches `m ∈ {-1, 0, 1}` with
//!   `|arg z + 2πm| < απ` (half weight on the Stokes line itself) and the
//!   inverse-power tail is truncated at its smallest term.
//!
//! Inside `|arg z| ≤ απ/2 + δ` the exponential dominates and the tail is the
//! `O(1/|z|)` correction; outside it only the inverse-power tail survives,
//! which is why `E_α` stays bounded around the negative axis.
//!
//! The evaluator picks whichever representation has the smaller error
//! estimate at the given point, so the switch radius depends on `arg z`.

use super::scaled::Scaled;
use crate::{Error, Result};
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

/// Above this value of `|z|^ρ` the series is never used.
const SERIES_T_MAX: f64 = 40.0;
const MACHINE_BUDGET: f64 = 2e-15;

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Asymptotic,
}

/// Angular region of a point relative to the growth sector `|arg z| ≤ απ/2 + δ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Growth,
    Decay,
}

/// A value together with its derivative on the same scale.
#[derive(Debug, Clone, Copy)]
pub struct Evaluated {
    pub value: Scaled,
    /// `E'_α(z) = dmant · exp(value.log_scale)`
    pub dmant: Complex64,
    pub method: Method,
    /// Absolute error estimate, relative to `exp(value.log_scale)`.
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct MittagLeffler {
    alpha: f64,
    rho: f64,
    integer_alpha: bool,
    /// `Γ(α(n−1)+1) / Γ(αn+1)` at index `n ≥ 1`; index 0 unused.
    series_ratio: Vec<f64>,
    /// `1/Γ(1 − αk)` at index `k ≥ 1`.
    inverse_coeffs: Vec<f64>,
    /// `ln(Γ(αk)/π)`, an upper envelope for `|1/Γ(1 − αk)|`.
    inverse_envelope: Vec<f64>,
}

/// `1/Γ(x)` for real `x`, exact zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if x > 0.0 {
        (-ln_gamma(x)).exp()
    } else if x.fract() == 0.0 {
        0.0
    } else {
        (PI * x).sin() * ln_gamma(1.0 - x).exp() / PI
    }
}

/// Half-width margin δ of the growth sector used for sector classification.
pub fn sector_margin(alpha: f64) -> f64 {
    (alpha * PI / 4.0).min((1.0 - alpha / 2.0) * PI / 2.0)
}

impl MittagLeffler {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Parameter(format!(
                "Mittag-Leffler parameter α must lie in (0, 2], got {alpha}"
            )));
        }
        let rho = 1.0 / alpha;
        let n_series = ((std::f64::consts::E * SERIES_T_MAX + 60.0) / alpha).ceil() as usize + 8;
        let mut series_ratio = vec![0.0; n_series + 1];
        let mut prev = ln_gamma(1.0);
        for (n, slot) in series_ratio.iter_mut().enumerate().skip(1) {
            let cur = ln_gamma(alpha * n as f64 + 1.0);
            *slot = (prev - cur).exp();
            prev = cur;
        }
        let n_inv = ((160.0 / alpha).floor() as usize).min(4000);
        let integer_alpha = alpha.fract() == 0.0;
        let mut inverse_coeffs = vec![0.0; n_inv + 1];
        let mut inverse_envelope = vec![f64::NEG_INFINITY; n_inv + 1];
        for k in 1..=n_inv {
            let ak = alpha * k as f64;
            inverse_coeffs[k] = recip_gamma(1.0 - ak);
            inverse_envelope[k] = ln_gamma(ak) - PI.ln();
        }
        Ok(Self { alpha, rho, integer_alpha, series_ratio, inverse_coeffs, inverse_envelope })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Order of growth, `1/α`.
    pub fn order(&self) -> f64 {
        self.rho
    }

    pub fn sector(&self, z: Complex64) -> Sector {
        let half = self.alpha * PI / 2.0 + sector_margin(self.alpha) / 2.0;
        if z.arg().abs() <= half {
            Sector::Growth
        } else {
            Sector::Decay
        }
    }

    /// Evaluates with automatic choice of representation.
    pub fn evaluate(&self, z: Complex64) -> Evaluated {
        let t = z.norm().powf(self.rho);
        if t <= 1.0 {
            return self.series(z);
        }
        let asym = self.asymptotic(z);
        if t > SERIES_T_MAX {
            return asym;
        }
        let series_err = MACHINE_BUDGET * (1.0 + t.exp() / self.alpha);
        let asym_err = asym.error * asym.value.log_scale.exp();
        if asym_err <= series_err {
            asym
        } else {
            self.series(z)
        }
    }

    pub fn value(&self, z: Complex64) -> Scaled {
        self.evaluate(z).value
    }

    /// Power series with term-wise derivative.
    pub fn series(&self, z: Complex64) -> Evaluated {
        if z == Complex64::new(0.0, 0.0) {
            return Evaluated {
                value: Scaled::plain(Complex64::new(1.0, 0.0)),
                dmant: Complex64::new(self.series_ratio[1], 0.0),
                method: Method::Series,
                error: 0.0,
            };
        }
        let t = z.norm().powf(self.rho);
        let n_peak = t / self.alpha;
        let mut sum = Complex64::new(1.0, 0.0);
        let mut dsum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 1.0;
        let mut term = Complex64::new(1.0, 0.0);
        for n in 1..self.series_ratio.len() {
            term = term * z * self.series_ratio[n];
            sum += term;
            dsum += term * n as f64;
            let mag = term.norm();
            abs_sum += mag;
            if (n as f64) > n_peak + 2.0 && mag <= 1e-17 * abs_sum {
                break;
            }
        }
        Evaluated {
            value: Scaled::plain(sum),
            dmant: dsum / z,
            method: Method::Series,
            error: MACHINE_BUDGET * abs_sum,
        }
    }

    /// Large-|z| representation, returned on the scale of its dominant exponential.
    pub fn asymptotic(&self, z: Complex64) -> Evaluated {
        let r = z.norm();
        let theta = z.arg();
        let t = r.powf(self.rho);

        let mut exps: Vec<(f64, Complex64)> = Vec::with_capacity(2);
        for m in -1i32..=1 {
            let phi = theta + 2.0 * PI * m as f64;
            let gap = phi.abs() - self.alpha * PI;
            let weight = if gap.abs() <= 1e-12 {
                0.5
            } else if gap < 0.0 {
                1.0
            } else {
                continue;
            };
            let e = Complex64::from_polar(t, self.rho * phi);
            exps.push((weight, e));
        }
        let scale = exps.iter().map(|(_, e)| e.re).fold(0.0f64, f64::max);

        let mut mant = Complex64::new(0.0, 0.0);
        let mut dmant = Complex64::new(0.0, 0.0);
        for &(w, e) in &exps {
            let x = (e - scale).exp() * (w / self.alpha);
            mant += x;
            dmant += x * e * self.rho / z;
        }

        // inverse-power tail, truncated at its smallest envelope term
        let (tail, dtail, tail_err) = if self.integer_alpha {
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0)
        } else {
            let zinv = z.inv();
            let ln_r = r.ln();
            let mut s = Complex64::new(0.0, 0.0);
            let mut ds = Complex64::new(0.0, 0.0);
            let mut pow = Complex64::new(1.0, 0.0);
            let mut prev_env = f64::INFINITY;
            let mut err = f64::INFINITY;
            for k in 1..self.inverse_coeffs.len() {
                pow *= zinv;
                let env = self.inverse_envelope[k] - k as f64 * ln_r;
                if k >= 2 && env > prev_env {
                    err = prev_env.exp();
                    break;
                }
                let env_abs = env.exp();
                if env_abs <= 1e-17 * s.norm() || env < -745.0 {
                    err = env_abs;
                    break;
                }
                let term = pow * self.inverse_coeffs[k];
                s += term;
                ds -= term * (k as f64) * zinv;
                prev_env = env;
                err = env_abs;
            }
            (s, ds, err)
        };
        let damp = (-scale).exp();
        mant -= tail * damp;
        dmant -= dtail * damp;

        let stokes = if self.integer_alpha { 0.0 } else { (-t).exp() / self.alpha };
        Evaluated {
            value: Scaled::new(mant, scale),
            dmant,
            method: Method::Asymptotic,
            error: (tail_err + stokes) * damp,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_out_of_range_alpha() {
        assert!(MittagLeffler::new(0.0).is_err());
        assert!(MittagLeffler::new(-1.0).is_err());
        assert!(MittagLeffler::new(2.5).is_err());
        assert!(MittagLeffler::new(f64::NAN).is_err());
        assert!(MittagLeffler::new(2.0).is_ok());
    }

    #[test]
    fn recip_gamma_poles_and_values() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        assert!((recip_gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((recip_gamma(0.5) - 1.0 / PI.sqrt()).abs() < 1e-14);
        // Γ(-0.5) = -2√π
        assert!((recip_gamma(-0.5) + 1.0 / (2.0 * PI.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn alpha_one_is_exp() {
        let ml = MittagLeffler::new(1.0).unwrap();
        let e = ml.value(c(1.0, 0.0)).to_complex().unwrap();
        assert!((e.re - std::f64::consts::E).abs() < 1e-14);
        let m10 = ml.value(c(-10.0, 0.0)).to_complex().unwrap();
        assert!(((m10.re - (-10f64).exp()) / (-10f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn alpha_two_is_cosh_sqrt() {
        let ml = MittagLeffler::new(2.0).unwrap();
        assert!((ml.value(c(4.0, 0.0)).to_complex().unwrap().re - 2f64.cosh()).abs() < 1e-12);
        assert!((ml.value(c(9.0, 0.0)).to_complex().unwrap().re - 3f64.cosh()).abs() < 1e-12);
        let neg = ml.value(c(-9.0, 0.0)).to_complex().unwrap();
        assert!((neg.re - 3f64.cos()).abs() < 1e-12);
        assert!(neg.im.abs() < 1e-12);
    }

    #[test]
    fn series_and_asymptotic_agree_in_overlap() {
        for &alpha in &[0.3, 0.5, 0.7, 0.9, 1.2, 1.5, 1.8] {
            let ml = MittagLeffler::new(alpha).unwrap();
            for k in 0..24 {
                let theta = -PI + (k as f64 + 0.5) * 2.0 * PI / 24.0;
                let r = 17f64.powf(alpha);
                let z = Complex64::from_polar(r, theta);
                let s = ml.series(z).value.to_complex().unwrap();
                let a = ml.asymptotic(z).value.to_complex().unwrap();
                let tol = 1e-5 * (1.0 + s.norm());
                assert!((s - a).norm() <= tol, "α={alpha} θ={theta}: {s} vs {a}");
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        for &alpha in &[0.6, 1.0, 1.5] {
            let ml = MittagLeffler::new(alpha).unwrap();
            for &z in &[c(2.0, 1.0), c(-3.0, 0.5), c(30.0, 10.0), c(-40.0, 5.0)] {
                let ev = ml.evaluate(z);
                let d = ev.dmant * ev.value.log_scale.exp();
                let h = 1e-5 * (1.0 + z.norm());
                let fp = ml.value(z + h).to_complex().unwrap();
                let fm = ml.value(z - h).to_complex().unwrap();
                let fd = (fp - fm) / (2.0 * h);
                assert!((d - fd).norm() <= 1e-5 * (1.0 + d.norm()), "α={alpha} z={z}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn sector_classification() {
        let ml = MittagLeffler::new(0.9).unwrap();
        assert_eq!(ml.sector(c(10.0, 0.0)), Sector::Growth);
        assert_eq!(ml.sector(c(-10.0, 0.0)), Sector::Decay);
    }
}
