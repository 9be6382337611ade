use super::{EntireFunction, MittagLeffler};
use crate::quadrature::log_space;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

const GOLDEN_ITERATIONS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxModulus {
    /// `log M(r, f)`
    pub log_max: f64,
    /// Angle at which the maximum was found.
    pub angle: f64,
}

/// `log M(r, f)` from `samples` equally spaced points refined by golden-section search.
pub fn max_log_modulus(f: &EntireFunction, r: f64, samples: usize) -> Result<MaxModulus> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if samples < 64 {
        return Err(Error::Parameter(format!("need at least 64 samples, got {samples}")));
    }
    let g = |t: f64| f.log_modulus(Complex64::from_polar(r, t)).value;
    let step = 2.0 * PI / samples as f64;
    let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
    for j in 0..samples {
        let t = j as f64 * step;
        let v = g(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_t - step, best_t + step);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    for (t, v) in [(c, gc), (d, gd)] {
        if v > best {
            best = v;
            best_t = t;
        }
    }
    Ok(MaxModulus { log_max: best, angle: best_t.rem_euclid(2.0 * PI) })
}

/// `log log M(r, f)`; a domain error when `M(r, f) ≤ 1`.
pub fn max_modulus(f: &EntireFunction, r: f64, samples: usize) -> Result<f64> {
    let m = max_log_modulus(f, r, samples)?;
    if m.log_max <= 0.0 {
        return Err(Error::Domain(format!("M({r}) ≤ 1, log log M undefined")));
    }
    Ok(m.log_max.ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub order: f64,
    pub intercept: f64,
    pub radii: Vec<f64>,
    pub log_log_max: Vec<f64>,
}

/// Least-squares slope of `log log M(r)` against `log r` over log-spaced radii.
pub fn order_estimate(
    f: &EntireFunction,
    r_min: f64,
    r_max: f64,
    n_points: usize,
    samples: usize,
) -> Result<OrderEstimate> {
    if !(1.0 < r_min && r_min < r_max) {
        return Err(Error::Parameter(format!("need 1 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if n_points < 3 {
        return Err(Error::Parameter("need at least 3 radii".into()));
    }
    let radii = log_space(r_min, r_max, n_points);
    let log_log_max = radii
        .par_iter()
        .map(|&r| max_modulus(f, r, samples))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = log_log_max.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&log_log_max).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let order = sxy / sxx;
    Ok(OrderEstimate { order, intercept: my - order * mx, radii, log_log_max })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorReport {
    pub alpha: f64,
    pub max_modulus: f64,
    pub argmax: [f64; 2],
    pub samples: usize,
    pub skipped_outside_sector: usize,
    pub bound: f64,
    pub within_bound: bool,
}

/// `n` angles spanning the closed sector `|t − π| ≤ (1 − α/2)π`.
pub fn sector_angles(alpha: f64, n: usize) -> Vec<f64> {
    let half = (1.0 - alpha / 2.0) * PI;
    if n == 1 {
        return vec![PI];
    }
    (0..n).map(|j| PI - half + 2.0 * half * j as f64 / (n - 1) as f64).collect()
}

/// Maximum of `|E_α|` over grid points lying in `|t − π| ≤ (1 − α/2)π`.
pub fn sector_bound_check(alpha: f64, r_grid: &[f64], angle_grid: &[f64], bound: f64) -> Result<SectorReport> {
    let ml = MittagLeffler::new(alpha)?;
    let half = (1.0 - alpha / 2.0) * PI;
    let inside: Vec<f64> = angle_grid
        .iter()
        .copied()
        .filter(|t| (t.rem_euclid(2.0 * PI) - PI).abs() <= half + 1e-12)
        .collect();
    let skipped = angle_grid.len() - inside.len();
    let points: Vec<(f64, f64)> =
        r_grid.iter().flat_map(|&r| inside.iter().map(move |&t| (r, t))).collect();
    let (max_modulus, argmax) = points
        .par_iter()
        .map(|&(r, t)| (ml.value(Complex64::from_polar(r, t)).ln_abs().exp(), [r, t]))
        .reduce(
            || (f64::NEG_INFINITY, [0.0, 0.0]),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    Ok(SectorReport {
        alpha,
        max_modulus,
        argmax,
        samples: points.len(),
        skipped_outside_sector: skipped,
        bound,
        within_bound: max_modulus <= bound,
    })
}
