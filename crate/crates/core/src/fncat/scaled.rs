use num_complex::Complex64;
use std::f64::consts::PI;

/// Natural log of the largest finite `f64`.
pub const LN_MAX: f64 = 709.782_712_893_384;

/// A complex number stored as `mant * exp(log_scale)`.
///
/// Lets values such as `exp(z^ρ)` travel through the catalog without
/// overflowing; only the final conversion to a plain `Complex64` can fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mant: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn new(mant: Complex64, log_scale: f64) -> Self {
        Self { mant, log_scale }
    }

    pub fn plain(value: Complex64) -> Self {
        Self { mant: value, log_scale: 0.0 }
    }

    pub fn ln_abs(&self) -> f64 {
        self.mant.norm().ln() + self.log_scale
    }

    /// Principal logarithm: imaginary part is `arg(mant)` in (-π, π].
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs(), self.mant.arg())
    }

    /// Converts to a plain complex number, `None` if the modulus is not representable.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.ln_abs() > LN_MAX {
            return None;
        }
        let v = self.mant * self.log_scale.exp();
        if v.re.is_finite() && v.im.is_finite() {
            Some(v)
        } else {
            None
        }
    }

    pub fn scale_by(self, factor: Complex64) -> Self {
        Self { mant: self.mant * factor, log_scale: self.log_scale }
    }
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}
