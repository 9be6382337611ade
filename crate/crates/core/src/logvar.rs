//! Logarithmic change of variable `F(z) = log f(e^z)`.
//!
//! On `W = exp⁻¹{|f| > R}` the lift satisfies `exp F = f ∘ exp` and maps each
//! component onto the half-plane `Re w > log R`. `Re F = log|f(e^z)|` is
//! branch independent; `Im F` is fixed by continuation.
//!
//! Continuation from a known state `(z₀, F₀)` to `z₁` predicts the increment
//! with the trapezoid rule `(F'(z₀) + F'(z₁))/2 · (z₁ − z₀)` and picks the
//! branch of `log f(e^{z₁})` nearest to the prediction. The step is rejected
//! when the two derivative estimates disagree by more than `π/2` in their
//! phase increment, since the branch would then be ambiguous.

use crate::fncat::{EntireFunction, FunctionSpec, LN_MAX};
use crate::tracts::TractDecomposition;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogCoordinateState {
    pub z: Complex64,
    pub f_value: Complex64,
    /// `(Im F − Im Log f(e^z)) / 2π`, the offset from the principal branch.
    pub branch_offset: i64,
    pub in_w: bool,
}

/// `f` together with the threshold `R` defining `W`.
#[derive(Debug, Clone)]
pub struct LogChart {
    pub function: EntireFunction,
    pub threshold: f64,
    log_threshold: f64,
}

impl LogChart {
    pub fn new(spec: &FunctionSpec, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0) {
            return Err(Error::Parameter(format!("R must be positive, got {threshold}")));
        }
        Ok(Self { function: spec.build()?, threshold, log_threshold: threshold.ln() })
    }

    pub fn log_threshold(&self) -> f64 {
        self.log_threshold
    }

    fn check_z(&self, z: Complex64) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite point {z}")));
        }
        if z.re > LN_MAX {
            return Err(Error::Overflow { log_modulus: z.re });
        }
        Ok(())
    }

    /// Principal value `log f(e^z)`, no membership check.
    pub fn principal(&self, z: Complex64) -> Result<Complex64> {
        self.check_z(z)?;
        Ok(self.function.log_value(z.exp()))
    }

    /// `F'(z) = e^z f'(e^z)/f(e^z)`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_z(z)?;
        let w = z.exp();
        Ok(w * self.function.log_derivative(w))
    }

    fn state(&self, z: Complex64, principal: Complex64, f_value: Complex64) -> LogCoordinateState {
        let branch_offset = ((f_value.im - principal.im) / TAU).round() as i64;
        LogCoordinateState { z, f_value, branch_offset, in_w: principal.re > self.log_threshold }
    }

    /// Lift on the principal branch; errors outside `W`.
    pub fn lift(&self, z: Complex64) -> Result<LogCoordinateState> {
        let p = self.principal(z)?;
        let s = self.state(z, p, p);
        if !s.in_w {
            return Err(Error::Domain(format!("{z} is not in W: log|f(e^z)| = {} ≤ log R", p.re)));
        }
        Ok(s)
    }

    /// Continue the branch of `prev` to `z`.
    pub fn continue_to(&self, prev: &LogCoordinateState, z: Complex64) -> Result<LogCoordinateState> {
        let p = self.principal(z)?;
        if p.re <= self.log_threshold {
            return Err(Error::Domain(format!("{z} is not in W")));
        }
        let dz = z - prev.z;
        let d0 = self.derivative(prev.z)? * dz;
        let d1 = self.derivative(z)? * dz;
        if (d1.im - d0.im).abs() > FRAC_PI_2 {
            return Err(Error::Continuation(format!(
                "step {} → {} too coarse: phase increment estimates {:.3} and {:.3} disagree",
                prev.z, z, d0.im, d1.im
            )));
        }
        let predicted = prev.f_value.im + 0.5 * (d0.im + d1.im);
        let k = ((predicted - p.im) / TAU).round();
        Ok(self.state(z, p, Complex64::new(p.re, p.im + k * TAU)))
    }

    /// Lift along a path, starting on the principal branch.
    pub fn lift_path(&self, path: &[Complex64]) -> Result<Vec<LogCoordinateState>> {
        let mut out = Vec::with_capacity(path.len());
        let Some((&first, rest)) = path.split_first() else {
            return Ok(out);
        };
        out.push(self.lift(first)?);
        for &z in rest {
            let next = self.continue_to(out.last().unwrap(), z)?;
            out.push(next);
        }
        Ok(out)
    }

    /// `Re F(z) ≥ exp(β Re z)`.
    pub fn in_l(&self, beta: f64, state: &LogCoordinateState) -> bool {
        state.in_w && state.f_value.re >= (beta * state.z.re).exp()
    }

    /// Iterate `F` from `z` until the orbit leaves `L`, `n_max` is reached, or
    /// `Re F` passes the point where `e^{F}` is no longer representable.
    pub fn iterate_t(&self, beta: f64, z: Complex64, n_max: usize) -> Result<OrbitRecord> {
        check_beta(beta)?;
        let mut states = Vec::with_capacity(n_max + 2);
        let mut lower_bounds = Vec::with_capacity(n_max + 1);
        let mut bound = z.re;
        let mut current = z;
        let mut exit_index = None;
        let mut overflow_certified = false;
        for k in 0..=n_max {
            lower_bounds.push(bound);
            let p = self.principal(current)?;
            let s = self.state(current, p, p);
            let inside = self.in_l(beta, &s);
            states.push(s);
            if !inside {
                exit_index = Some(k);
                break;
            }
            if k == n_max {
                break;
            }
            current = s.f_value;
            bound = (beta * bound).exp();
            if current.re > LN_MAX {
                // F^{k+1}(z) is known but f(e^{F^{k+1}}) is out of range; the
                // bound Re F^{k+1} ≥ E_β^{k+1}(Re z) already holds
                overflow_certified = true;
                lower_bounds.push(bound);
                states.push(LogCoordinateState { z: current, f_value: Complex64::new(f64::INFINITY, 0.0), branch_offset: 0, in_w: true });
                break;
            }
        }
        let escape_flag = exit_index.is_none()
            && states.iter().zip(&lower_bounds).all(|(s, b)| s.z.re >= *b * (1.0 - 1e-12) || b.is_infinite() && s.z.re > LN_MAX);
        Ok(OrbitRecord { states, exit_index, escape_flag, overflow_certified, lower_bounds })
    }

    /// Check `|F'(z)| ≥ (Re F(z) − log R)/(4π)` at the given points, skipping
    /// points outside `W` or with `Re F < log R + margin`.
    pub fn check_expansion(&self, points: &[Complex64], margin: f64) -> ExpansionReport {
        let results: Vec<Option<(bool, f64)>> = points
            .par_iter()
            .map(|&z| {
                let p = self.principal(z).ok()?;
                if p.re < self.log_threshold + margin || p.re <= self.log_threshold {
                    return None;
                }
                let d = self.derivative(z).ok()?.norm();
                let bound = (p.re - self.log_threshold) / (4.0 * PI);
                Some((d >= bound, d / bound))
            })
            .collect();
        let tested = results.iter().flatten().count();
        let violations = results.iter().flatten().filter(|(ok, _)| !ok).count();
        let min_ratio = results.iter().flatten().map(|(_, q)| *q).fold(f64::INFINITY, f64::min);
        ExpansionReport { tested, skipped: points.len() - tested, violations, min_ratio }
    }

    /// `count` seeded points `z = log|w| + it` with `|w| ∈ [r_min, r_max]`
    /// log-uniform and `t` uniform, kept when `Re F ≥ log R + margin`.
    pub fn sample_w(&self, count: usize, r_min: f64, r_max: f64, margin: f64, seed: u64) -> Result<Vec<Complex64>> {
        if !(r_min > 0.0 && r_min < r_max) {
            return Err(Error::Parameter(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (r_min.ln(), r_max.ln().min(LN_MAX));
        let mut out = Vec::with_capacity(count);
        let max_draws = 1000 * count.max(1);
        for _ in 0..max_draws {
            if out.len() == count {
                break;
            }
            let z = Complex64::new(rng.random_range(a..b), rng.random_range(-PI..PI));
            if self.principal(z)?.re >= self.log_threshold + margin {
                out.push(z);
            }
        }
        if out.len() < count {
            return Err(Error::Domain(format!("found only {} of {count} points in W with the requested margin", out.len())));
        }
        Ok(out)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Parameter(format!("beta must lie in (0, 1), got {beta}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub states: Vec<LogCoordinateState>,
    /// First `k` with `F^k(z) ∉ L`.
    pub exit_index: Option<usize>,
    /// No exit, and `Re F^k(z) ≥ E_β^k(Re z)` at every recorded step.
    pub escape_flag: bool,
    /// The orbit was cut because `Re F` left the floating range of `exp`.
    pub overflow_certified: bool,
    /// `E_β^k(Re z)` for each recorded state.
    pub lower_bounds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub tested: usize,
    pub skipped: usize,
    pub violations: usize,
    /// Smallest `|F'| / ((Re F − log R)/4π)` seen.
    pub min_ratio: f64,
}

/// Continuous lift of every tract cell, grown breadth-first from the cell of
/// largest `|f|` on the outer ring.
#[derive(Debug, Clone)]
pub struct BranchAtlas {
    pub states: Vec<Option<LogCoordinateState>>,
    pub base_cells: Vec<usize>,
}

impl BranchAtlas {
    pub fn new(chart: &LogChart, dec: &TractDecomposition) -> Result<Self> {
        let grid = &dec.grid;
        let mut states: Vec<Option<LogCoordinateState>> = vec![None; grid.n_cells()];
        let mut base_cells = Vec::with_capacity(dec.n_components);
        let n_theta = grid.n_theta() as isize;
        for c in 1..=dec.n_components as u32 {
            let base = dec.base_cell(c)?;
            base_cells.push(base);
            let (i, j) = grid.cell(base);
            let z = Complex64::new(grid.ring_radius(i).ln(), wrap_signed(grid.angle(j)));
            states[base] = Some(chart.lift(z)?);
            let mut queue = VecDeque::from([base]);
            while let Some(k) = queue.pop_front() {
                let prev = states[k].unwrap();
                let (_, jk) = grid.cell(k);
                for m in grid.neighbors(k) {
                    if dec.labels[m] != c || states[m].is_some() {
                        continue;
                    }
                    let (im, jm) = grid.cell(m);
                    // angular step of ±1 cell, unwrapped across 2π
                    let mut dj = jm as isize - jk as isize;
                    if dj > 1 {
                        dj -= n_theta;
                    } else if dj < -1 {
                        dj += n_theta;
                    }
                    let z = Complex64::new(grid.ring_radius(im).ln(), prev.z.im + dj as f64 * grid.cell_width());
                    states[m] = Some(chart.continue_to(&prev, z)?);
                    queue.push_back(m);
                }
            }
        }
        Ok(Self { states, base_cells })
    }
}

fn wrap_signed(t: f64) -> f64 {
    if t > PI {
        t - TAU
    } else {
        t
    }
}
