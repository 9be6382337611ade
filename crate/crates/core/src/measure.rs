//! Densities of `T_n`, of the complement of `L`, and of escaping orbits on squares.
//!
//! Every report stores a per-cell exit level: the first `n` at which the cell
//! stops being counted, or [`NEVER`] if it survives all `n_max` levels.
//! `density_sequence[n]` is the fraction of cells with exit level `> n`, so
//! the sequence is nonincreasing by construction.

use crate::fncat::{FunctionSpec, LN_MAX};
use crate::logvar::LogChart;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Exit level of a cell that survives every level.
pub const NEVER: u32 = u32::MAX;
pub const MIN_RESOLUTION: usize = 64;
pub const S_DENSITY_RESOLUTION: usize = 512;
pub const DEFAULT_ENTRY_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquareRegion {
    pub center: Complex64,
    pub side: f64,
}

impl SquareRegion {
    pub fn new(center: Complex64, side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::Parameter(format!("side must be positive, got {side}")));
        }
        Ok(Self { center, side })
    }

    /// `Q(z)`: the square of side `Re z` centered at `z`.
    pub fn q(z: Complex64) -> Result<Self> {
        Self::new(z, z.re)
    }

    /// Center of cell `(i, j)` (column `i` along the real axis, row `j` along the imaginary axis).
    pub fn cell_center(&self, resolution: usize, i: usize, j: usize) -> Complex64 {
        let h = self.side / resolution as f64;
        let corner = self.center - Complex64::new(self.side / 2.0, self.side / 2.0);
        corner + Complex64::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
    }

    fn cell_centers(&self, resolution: usize) -> Vec<Complex64> {
        (0..resolution)
            .flat_map(|j| (0..resolution).map(move |i| (i, j)))
            .map(|(i, j)| self.cell_center(resolution, i, j))
            .collect()
    }

    fn random_points(&self, samples: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = self.side / 2.0;
        (0..samples)
            .map(|_| self.center + Complex64::new(rng.random_range(-half..half), rng.random_range(-half..half)))
            .collect()
    }
}

/// How the region was sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Sampling {
    /// `resolution × resolution` cells, classified at their centers, row-major from the lower-left corner.
    Grid { resolution: usize },
    /// Uniform random points from a seeded ChaCha8 stream.
    MonteCarlo { samples: usize, seed: u64 },
}

impl Sampling {
    pub fn grid(resolution: usize) -> Self {
        Sampling::Grid { resolution }
    }

    fn points(&self, region: &SquareRegion) -> Result<Vec<Complex64>> {
        match *self {
            Sampling::Grid { resolution } => {
                if resolution < MIN_RESOLUTION {
                    return Err(Error::Parameter(format!("resolution must be at least {MIN_RESOLUTION}, got {resolution}")));
                }
                Ok(region.cell_centers(resolution))
            }
            Sampling::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(Error::Parameter("need at least one sample".into()));
                }
                Ok(region.random_points(samples, seed))
            }
        }
    }

    /// Grid resolution, if any.
    pub fn resolution(&self) -> Option<usize> {
        match *self {
            Sampling::Grid { resolution } => Some(resolution),
            Sampling::MonteCarlo { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeGridReport {
    pub region: SquareRegion,
    pub sampling: Sampling,
    pub n_max: usize,
    pub cell_exit: Vec<u32>,
    /// `dens(T_n, P)` for `n = 0..=n_max`.
    pub density_sequence: Vec<f64>,
    /// `dens(T_n, T_0 ∩ P)`; `None` when `T_0 ∩ P` is empty or for z-plane reports.
    pub relative_to_first: Option<Vec<f64>>,
    /// Resolution of the coarser report this one refines.
    pub refinement_parent: Option<usize>,
}

impl EscapeGridReport {
    fn from_exits(region: SquareRegion, sampling: Sampling, n_max: usize, cell_exit: Vec<u32>, relative: bool) -> Self {
        let total = cell_exit.len() as f64;
        let counts: Vec<usize> =
            (0..=n_max).map(|n| cell_exit.iter().filter(|&&e| e == NEVER || e as usize > n).count()).collect();
        let density_sequence = counts.iter().map(|&c| c as f64 / total).collect();
        let relative_to_first = (relative && counts[0] > 0)
            .then(|| counts.iter().map(|&c| c as f64 / counts[0] as f64).collect());
        Self { region, sampling, n_max, cell_exit, density_sequence, relative_to_first, refinement_parent: None }
    }

    /// `density_sequence[n+1] ≤ density_sequence[n]` for all `n`.
    pub fn is_nonincreasing(&self) -> bool {
        self.density_sequence.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn with_parent(mut self, parent: &EscapeGridReport) -> Self {
        self.refinement_parent = parent.sampling.resolution();
        self
    }

    /// One byte per cell: exit level clamped to 255, survivors as 0.
    pub fn raster_bytes(&self) -> Vec<u8> {
        self.cell_exit.iter().map(|&e| if e == NEVER { 0 } else { e.min(255) as u8 }).collect()
    }
}

/// Exit level of one point under `F`: `0` outside `L`, `k` if `F^k ∉ L` first, else [`NEVER`].
fn t_exit(chart: &LogChart, beta: f64, z: Complex64, n_max: usize) -> u32 {
    match chart.iterate_t(beta, z, n_max) {
        Ok(rec) => rec.exit_index.map_or(NEVER, |k| k as u32),
        // only reachable through overflow of the starting point, which lies beyond every bound
        Err(Error::Overflow { .. }) => NEVER,
        Err(_) => 0,
    }
}

/// `dens(T_n, P)` for `n = 0..=n_max` by classifying sample points with `iterate_T`.
pub fn tn_density(
    spec: &FunctionSpec,
    threshold: f64,
    beta: f64,
    region: &SquareRegion,
    sampling: Sampling,
    n_max: usize,
) -> Result<EscapeGridReport> {
    let chart = LogChart::new(spec, threshold)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Parameter(format!("beta must lie in (0, 1), got {beta}")));
    }
    let points = sampling.points(region)?;
    let exits: Vec<u32> = points.par_iter().map(|&z| t_exit(&chart, beta, z, n_max)).collect();
    Ok(EscapeGridReport::from_exits(*region, sampling, n_max, exits, true))
}

/// Exit level of a z-plane orbit.
///
/// The orbit must reach `|f^k| ≥ escape_radius` at some `k ≤ entry_steps`
/// (otherwise level 0); after that each step must not decrease `|f^k|`.
/// The first decreasing step is the exit level. An iterate whose modulus
/// leaves the floating range certifies escape.
fn z_exit(f: &crate::fncat::EntireFunction, z: Complex64, n_max: usize, log_escape: f64, entry_steps: usize) -> u32 {
    let mut w = z;
    let mut log_w = z.norm().ln();
    let mut entered = log_w >= log_escape;
    for k in 1..=n_max.max(entry_steps) {
        let s = f.scaled(w);
        let log_next = s.ln_abs();
        if entered {
            if log_next < log_w {
                return k as u32;
            }
        } else if log_next >= log_escape {
            entered = true;
        } else if k >= entry_steps {
            return 0;
        }
        if log_next > LN_MAX {
            return if entered { NEVER } else { 0 };
        }
        match s.to_complex() {
            Some(next) if next.re.is_finite() && next.im.is_finite() => {
                w = next;
                log_w = log_next;
            }
            _ => return if entered { NEVER } else { 0 },
        }
    }
    if entered {
        NEVER
    } else {
        0
    }
}

/// Density of points whose orbits under `f` enter `|w| ≥ escape_radius`
/// within `entry_steps` and then grow monotonically, per level `n`.
pub fn z_plane_escape_density(
    spec: &FunctionSpec,
    region: &SquareRegion,
    sampling: Sampling,
    n_max: usize,
    escape_radius: f64,
    entry_steps: usize,
) -> Result<EscapeGridReport> {
    let f = spec.build()?;
    let r_default = spec.default_threshold()?;
    if !(escape_radius > r_default) {
        return Err(Error::Parameter(format!("escape radius {escape_radius} must exceed R = {r_default}")));
    }
    if n_max < 5 {
        return Err(Error::Parameter(format!("n_max must be at least 5, got {n_max}")));
    }
    let points = sampling.points(region)?;
    let log_escape = escape_radius.ln();
    let exits: Vec<u32> = points.par_iter().map(|&z| z_exit(&f, z, n_max, log_escape, entry_steps)).collect();
    Ok(EscapeGridReport::from_exits(*region, sampling, n_max, exits, false))
}

/// `dens(S, Q(z))` with `S = ℂ \ L`, on a fixed 512-cell grid.
pub fn s_square_density(spec: &FunctionSpec, threshold: f64, beta: f64, z: Complex64) -> Result<f64> {
    if !(threshold > 1.0) || !(z.re > 2.0 * threshold.ln()) {
        return Err(Error::Parameter(format!("need Re z > 2 log R = {}, got {}", 2.0 * threshold.ln(), z.re)));
    }
    let chart = LogChart::new(spec, threshold)?;
    let region = SquareRegion::q(z)?;
    let points = region.cell_centers(S_DENSITY_RESOLUTION);
    let outside = points
        .par_iter()
        .filter(|&&p| match chart.principal(p) {
            Ok(v) => !(v.re > chart.log_threshold() && v.re >= (beta * p.re).exp()),
            Err(Error::Overflow { .. }) => false,
            Err(_) => true,
        })
        .count();
    Ok(outside as f64 / points.len() as f64)
}

/// What a chain of refinements is expected to show.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Tail density changes by at most 25% between successive resolutions.
    PositiveMeasure,
    /// Density strictly decreases from level `from` to `n_max` at every resolution.
    ZeroMeasure { from: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementReport {
    pub expectation: Expectation,
    pub resolutions: Vec<Option<usize>>,
    /// `density_sequence[n_max]` of each report.
    pub tail_densities: Vec<f64>,
    /// `|d_{k+1} − d_k| / d_k` between successive reports (0 when both vanish).
    pub relative_changes: Vec<f64>,
    pub pass: bool,
}

pub const TAIL_TOLERANCE: f64 = 0.25;

/// Compare reports on the same region at increasing resolution.
pub fn refinement_study(reports: &[EscapeGridReport], expectation: Expectation) -> Result<RefinementReport> {
    if reports.len() < 2 {
        return Err(Error::Parameter("refinement needs at least two reports".into()));
    }
    let first = &reports[0];
    for r in &reports[1..] {
        if r.region != first.region || r.n_max != first.n_max {
            return Err(Error::Mismatch("reports cover different regions or depths".into()));
        }
    }
    let tail_densities: Vec<f64> = reports.iter().map(|r| *r.density_sequence.last().unwrap()).collect();
    let relative_changes: Vec<f64> = tail_densities
        .windows(2)
        .map(|w| {
            if w[0] == 0.0 && w[1] == 0.0 {
                0.0
            } else if w[0] == 0.0 {
                f64::INFINITY
            } else {
                (w[1] - w[0]).abs() / w[0]
            }
        })
        .collect();
    let pass = match expectation {
        Expectation::PositiveMeasure => {
            tail_densities.iter().all(|&d| d > 0.0) && relative_changes.iter().all(|&c| c <= TAIL_TOLERANCE)
        }
        Expectation::ZeroMeasure { from } => reports.iter().all(|r| {
            // strictly shrinking until the survivors run out, then flat at zero
            let seq = &r.density_sequence[from.min(r.n_max)..];
            seq.len() >= 2 && seq[0] > 0.0 && seq.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))
        }),
    };
    Ok(RefinementReport {
        expectation,
        resolutions: reports.iter().map(|r| r.sampling.resolution()).collect(),
        tail_densities,
        relative_changes,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_square_convention() {
        let q = SquareRegion::q(Complex64::new(40.0, 3.0)).unwrap();
        assert_eq!(q.side, 40.0);
        let c = q.cell_center(4, 0, 0);
        assert_eq!(c, Complex64::new(25.0, -12.0));
        assert!(SquareRegion::new(Complex64::new(0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn region_inside_l_has_full_first_density() {
        // thin square around the real axis far to the right: all of it is in L for exp
        let region = SquareRegion::new(Complex64::new(20.0, 0.0), 1.0).unwrap();
        let rep = tn_density(&FunctionSpec::exp(), 10.0, 0.2, &region, Sampling::grid(64), 3).unwrap();
        assert_eq!(rep.density_sequence[0], 1.0);
        assert!(rep.is_nonincreasing());
        assert_eq!(rep.relative_to_first.as_ref().unwrap()[3], 1.0);
    }

    #[test]
    fn exp_square_keeps_about_half() {
        let region = SquareRegion::q(Complex64::new(40.0, 0.0)).unwrap();
        let rep = tn_density(&FunctionSpec::exp(), 10.0, 0.2, &region, Sampling::grid(128), 6).unwrap();
        assert!(rep.is_nonincreasing());
        let d0 = rep.density_sequence[0];
        assert!((d0 - 0.5).abs() < 0.05, "{d0}");
        let rel = rep.relative_to_first.unwrap();
        assert!(rel[6] > 0.99);
    }

    #[test]
    fn region_outside_w_is_degenerate() {
        let region = SquareRegion::new(Complex64::new(-20.0, 0.0), 2.0).unwrap();
        let rep = tn_density(&FunctionSpec::exp(), 10.0, 0.2, &region, Sampling::grid(64), 3).unwrap();
        assert!(rep.density_sequence.iter().all(|&d| d == 0.0));
        assert!(rep.relative_to_first.is_none());
    }

    #[test]
    fn attracting_basin_scores_zero() {
        // 0.1 e^z has an attracting fixed point near 0.11
        let spec = FunctionSpec::Exp { lambda: Complex64::new(0.1, 0.0) };
        let region = SquareRegion::new(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let rep = z_plane_escape_density(&spec, &region, Sampling::grid(64), 8, 20.0, 5).unwrap();
        assert!(rep.density_sequence.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn z_plane_parameter_checks() {
        let region = SquareRegion::new(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let sin = FunctionSpec::sine();
        assert!(z_plane_escape_density(&sin, &region, Sampling::grid(64), 4, 20.0, 5).is_err());
        assert!(z_plane_escape_density(&sin, &region, Sampling::grid(64), 8, 5.0, 5).is_err());
        assert!(z_plane_escape_density(&sin, &region, Sampling::grid(16), 8, 20.0, 5).is_err());
    }

    #[test]
    fn sine_escape_density_is_positive() {
        let region = SquareRegion::new(Complex64::new(std::f64::consts::PI, std::f64::consts::PI), 2.0 * std::f64::consts::PI).unwrap();
        let rep = z_plane_escape_density(&FunctionSpec::sine(), &region, Sampling::grid(128), 10, 20.0, 5).unwrap();
        assert!(rep.is_nonincreasing());
        assert!(rep.density_sequence[10] > 0.05);
    }

    #[test]
    fn monte_carlo_shares_schema_and_is_seeded() {
        let region = SquareRegion::q(Complex64::new(40.0, 0.0)).unwrap();
        let s = Sampling::MonteCarlo { samples: 4000, seed: 3 };
        let a = tn_density(&FunctionSpec::exp(), 10.0, 0.2, &region, s, 4).unwrap();
        let b = tn_density(&FunctionSpec::exp(), 10.0, 0.2, &region, s, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cell_exit.len(), 4000);
        assert!((a.density_sequence[0] - 0.5).abs() < 0.05);
    }

    #[test]
    fn s_density_examples() {
        let exp = FunctionSpec::exp();
        let d30 = s_square_density(&exp, 10.0, 0.2, Complex64::new(30.0, 0.0)).unwrap();
        assert!(d30 > 0.0 && d30 < 1.0);
        assert!(s_square_density(&exp, 10.0, 0.2, Complex64::new(4.0, 0.0)).is_err());
    }

    #[test]
    fn refinement_identical_reports() {
        let region = SquareRegion::q(Complex64::new(40.0, 0.0)).unwrap();
        let rep = tn_density(&FunctionSpec::exp(), 10.0, 0.2, &region, Sampling::grid(64), 3).unwrap();
        let study = refinement_study(&[rep.clone(), rep.clone()], Expectation::PositiveMeasure).unwrap();
        assert_eq!(study.relative_changes, vec![0.0]);
        assert!(study.pass);
        let other = tn_density(&FunctionSpec::exp(), 10.0, 0.2, &SquareRegion::q(Complex64::new(50.0, 0.0)).unwrap(), Sampling::grid(64), 3).unwrap();
        assert!(matches!(refinement_study(&[rep.clone(), other], Expectation::PositiveMeasure), Err(Error::Mismatch(_))));
        assert!(refinement_study(&[rep], Expectation::PositiveMeasure).is_err());
    }

    #[test]
    fn raster_encoding() {
        let region = SquareRegion::new(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let mut rep = EscapeGridReport::from_exits(region, Sampling::grid(64), 300, vec![0, 3, 299, NEVER], false);
        assert_eq!(rep.raster_bytes(), vec![0, 3, 255, 0]);
        rep.density_sequence.truncate(2);
        assert_eq!(rep.density_sequence, vec![0.75, 0.75]);
    }
}
