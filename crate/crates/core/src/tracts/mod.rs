//! Tracts of `{|f| > R}` on a polar grid and the radial quantities built on them.
//!
//! ```
//! use tractlab::fncat::FunctionSpec;
//! use tractlab::tracts::{decompose, GridParams};
//!
//! let grid = GridParams::new(5.0, 100.0, 128, 512);
//! let dec = decompose(&FunctionSpec::sine(), 10.0, &grid).unwrap();
//! assert_eq!(dec.n_components, 2);
//! ```

mod checks;
mod labels;
mod profile;

pub use checks::{
    cauchy_schwarz_check, convexity_check, deficiency_integral, loglogm_profile, theorem1_hypothesis, verify_dca,
    verify_theorem2, CauchySchwarzReport, ConvexityReport, DcaReport, DeficiencyReport, Theorem1Report,
    Theorem2Report,
};
pub use labels::{label_components, UnionFind};
pub use profile::{
    m_profile, psi_profile, theta_profile, theta_star_profile, tsuji_integral, ProfileKind, RadialProfile,
    TsujiIntegral,
};

use crate::fncat::{EntireFunction, FunctionSpec};
use crate::quadrature::log_space;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Default radial resolution.
pub const RINGS_PER_DECADE: usize = 512;
pub const MIN_N_THETA: usize = 256;

/// Resolution of a polar grid over the annulus `r_min ≤ |z| ≤ r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridParams {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl GridParams {
    pub fn new(r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Self {
        Self { r_min, r_max, n_r, n_theta }
    }

    /// `rings_per_decade` rings for each factor of 10 in `r_max / r_min`.
    pub fn per_decade(r_min: f64, r_max: f64, rings_per_decade: usize, n_theta: usize) -> Self {
        let decades = (r_max / r_min).log10();
        let n_r = ((decades * rings_per_decade as f64).ceil() as usize).max(1);
        Self { r_min, r_max, n_r, n_theta }
    }

    /// Default radial density with the given angular resolution.
    pub fn with_default_density(r_min: f64, r_max: f64, n_theta: usize) -> Self {
        Self::per_decade(r_min, r_max, RINGS_PER_DECADE, n_theta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::Parameter(format!("need 0 < r_min < r_max, got [{}, {}]", self.r_min, self.r_max)));
        }
        if self.n_r == 0 {
            return Err(Error::Parameter("need at least one ring".into()));
        }
        if self.n_theta < MIN_N_THETA {
            return Err(Error::Parameter(format!("n_theta must be at least {MIN_N_THETA}, got {}", self.n_theta)));
        }
        Ok(())
    }
}

/// Log-spaced ring edges and a uniform angular partition.
///
/// Cell `(i, j)` covers `[r_i, r_{i+1}) × [2πj/n, 2π(j+1)/n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarGrid {
    pub params: GridParams,
    pub r_edges: Vec<f64>,
}

impl PolarGrid {
    pub fn new(params: GridParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, r_edges: log_space(params.r_min, params.r_max, params.n_r + 1) })
    }

    pub fn n_rings(&self) -> usize {
        self.params.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.params.n_theta
    }

    pub fn n_cells(&self) -> usize {
        self.params.n_r * self.params.n_theta
    }

    /// Geometric midpoint of ring `i`.
    pub fn ring_radius(&self, i: usize) -> f64 {
        (self.r_edges[i] * self.r_edges[i + 1]).sqrt()
    }

    pub fn ring_radii(&self) -> Vec<f64> {
        (0..self.n_rings()).map(|i| self.ring_radius(i)).collect()
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * (j as f64 + 0.5) / self.params.n_theta as f64
    }

    pub fn cell_width(&self) -> f64 {
        2.0 * PI / self.params.n_theta as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.params.n_theta + j
    }

    pub fn cell(&self, k: usize) -> (usize, usize) {
        (k / self.params.n_theta, k % self.params.n_theta)
    }

    pub fn center(&self, k: usize) -> Complex64 {
        let (i, j) = self.cell(k);
        Complex64::from_polar(self.ring_radius(i), self.angle(j))
    }

    /// Ring whose radial span contains `r`.
    pub fn ring_of(&self, r: f64) -> Option<usize> {
        if !(r >= self.r_edges[0] && r <= *self.r_edges.last().unwrap()) {
            return None;
        }
        let i = self.r_edges.partition_point(|&e| e <= r);
        Some(i.saturating_sub(1).min(self.n_rings() - 1))
    }

    /// Edge-adjacent cells, with angular wraparound.
    pub fn neighbors(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.cell(k);
        let n = self.params.n_theta;
        let same_ring = [self.index(i, (j + 1) % n), self.index(i, (j + n - 1) % n)];
        let inward = (i > 0).then(|| k - n);
        let outward = (i + 1 < self.n_rings()).then(|| k + n);
        same_ring.into_iter().chain(inward).chain(outward)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentInfo {
    pub id: u32,
    pub cells: usize,
    pub touches_inner: bool,
    pub touches_outer: bool,
}

/// Labeled super-level set `{log|f| > log R}` on a polar grid.
///
/// Components meeting the outer ring (the tracts) carry ids `1..=N`, ordered
/// by their first angular cell on that ring; bounded islands follow.
#[derive(Debug, Clone)]
pub struct TractDecomposition {
    pub spec: FunctionSpec,
    pub function: EntireFunction,
    pub grid: PolarGrid,
    pub threshold: f64,
    /// `log|f|` at every cell center.
    pub log_modulus: Vec<f64>,
    pub labels: Vec<u32>,
    pub components: Vec<ComponentInfo>,
    pub n_components: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub spec: String,
    pub threshold: f64,
    pub grid: GridParams,
    pub n_components: usize,
    pub bounded_islands: usize,
    pub super_level_cells: usize,
    pub components: Vec<ComponentInfo>,
    pub warnings: Vec<String>,
}

/// Split `{|f| > R}` into connected components on the polar grid.
pub fn decompose(spec: &FunctionSpec, threshold: f64, params: &GridParams) -> Result<TractDecomposition> {
    let function = spec.build()?;
    let f0 = function.value_at_zero().norm();
    if !(threshold > f0) {
        return Err(Error::Parameter(format!("R = {threshold} must exceed |f(0)| = {f0}")));
    }
    let grid = PolarGrid::new(*params)?;
    let n_theta = grid.n_theta();
    let log_modulus: Vec<f64> = (0..grid.n_rings())
        .into_par_iter()
        .flat_map_iter(|i| {
            let r = grid.ring_radius(i);
            let f = &function;
            let g = &grid;
            (0..n_theta).map(move |j| f.log_modulus(Complex64::from_polar(r, g.angle(j))).value)
        })
        .collect();
    let log_r = threshold.ln();
    let mask: Vec<bool> = log_modulus.iter().map(|&v| v > log_r).collect();
    let (raw, count) = label_components(&mask, grid.n_rings(), n_theta);

    // relabel: tracts first, by first angular index on the outer ring
    let outer = grid.n_rings() - 1;
    let mut remap = vec![0u32; count + 1];
    let mut next = 0u32;
    for j in 0..n_theta {
        let l = raw[grid.index(outer, j)] as usize;
        if l != 0 && remap[l] == 0 {
            next += 1;
            remap[l] = next;
        }
    }
    let n_components = next as usize;
    for l in &raw {
        let l = *l as usize;
        if l != 0 && remap[l] == 0 {
            next += 1;
            remap[l] = next;
        }
    }
    let labels: Vec<u32> = raw.iter().map(|&l| remap[l as usize]).collect();

    let mut components: Vec<ComponentInfo> = (1..=count as u32)
        .map(|id| ComponentInfo { id, cells: 0, touches_inner: false, touches_outer: false })
        .collect();
    for (k, &l) in labels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let c = &mut components[l as usize - 1];
        c.cells += 1;
        let (i, _) = grid.cell(k);
        c.touches_inner |= i == 0;
        c.touches_outer |= i == outer;
    }

    let mut warnings = Vec::new();
    if count == 0 {
        warnings.push(format!("no cell exceeds R = {threshold}; R too large for r_max = {}", params.r_max));
    }
    Ok(TractDecomposition {
        spec: spec.clone(),
        function,
        grid,
        threshold,
        log_modulus,
        labels,
        components,
        n_components,
        warnings,
    })
}

impl TractDecomposition {
    pub fn bounded_islands(&self) -> usize {
        self.components.len() - self.n_components
    }

    pub fn summary(&self) -> DecompositionSummary {
        DecompositionSummary {
            spec: self.spec.to_string(),
            threshold: self.threshold,
            grid: self.grid.params,
            n_components: self.n_components,
            bounded_islands: self.bounded_islands(),
            super_level_cells: self.labels.iter().filter(|&&l| l != 0).count(),
            components: self.components.clone(),
            warnings: self.warnings.clone(),
        }
    }

    pub(crate) fn check_component(&self, component: u32) -> Result<()> {
        if component == 0 || component as usize > self.components.len() {
            return Err(Error::Parameter(format!(
                "component {component} does not exist ({} components)",
                self.components.len()
            )));
        }
        Ok(())
    }

    /// Cell of largest `|f|` on the outer ring within a tract.
    pub fn base_cell(&self, component: u32) -> Result<usize> {
        self.check_component(component)?;
        let outer = self.grid.n_rings() - 1;
        (0..self.grid.n_theta())
            .map(|j| self.grid.index(outer, j))
            .filter(|&k| self.labels[k] == component)
            .max_by(|&a, &b| self.log_modulus[a].total_cmp(&self.log_modulus[b]).then(b.cmp(&a)))
            .ok_or_else(|| Error::Domain(format!("component {component} does not meet the outer ring")))
    }

    /// Number of cells of `component` in ring `i`.
    pub fn ring_count(&self, component: u32, i: usize) -> usize {
        let n = self.grid.n_theta();
        self.labels[i * n..(i + 1) * n].iter().filter(|&&l| l == component).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = PolarGrid::new(GridParams::new(1.0, 100.0, 4, 256)).unwrap();
        assert_eq!(g.r_edges.len(), 5);
        assert!((g.ring_radius(0) - 10f64.powf(0.25)).abs() < 1e-12);
        assert_eq!(g.ring_of(1.0), Some(0));
        assert_eq!(g.ring_of(100.0), Some(3));
        assert_eq!(g.ring_of(20.0), Some(2));
        assert_eq!(g.ring_of(0.5), None);
        let nb: Vec<_> = g.neighbors(g.index(0, 0)).collect();
        assert_eq!(nb, vec![1, 255, 256]);
        assert!(PolarGrid::new(GridParams::new(1.0, 100.0, 4, 128)).is_err());
        assert!(PolarGrid::new(GridParams::new(2.0, 1.0, 4, 256)).is_err());
    }

    #[test]
    fn per_decade_ring_count() {
        assert_eq!(GridParams::per_decade(10.0, 1e4, 512, 256).n_r, 1536);
    }

    #[test]
    fn catalog_tract_counts() {
        let exp = decompose(&FunctionSpec::exp(), 10.0, &GridParams::per_decade(5.0, 100.0, 128, 512)).unwrap();
        assert_eq!(exp.n_components, 1);
        let sin = decompose(&FunctionSpec::sine(), 10.0, &GridParams::per_decade(5.0, 100.0, 128, 512)).unwrap();
        assert_eq!(sin.n_components, 2);
        assert!(sin.components.iter().all(|c| c.touches_outer));
        let ml = FunctionSpec::MittagLefflerPower { alpha: 0.9, n: 3 };
        let ml = decompose(&ml, 10.0, &GridParams::per_decade(5.0, 200.0, 128, 512)).unwrap();
        assert_eq!(ml.n_components, 3);
    }

    #[test]
    fn threshold_must_exceed_f0() {
        let p = GridParams::new(5.0, 100.0, 16, 256);
        assert!(decompose(&FunctionSpec::exp(), 0.5, &p).is_err());
    }

    #[test]
    fn empty_super_level_set_warns() {
        let p = GridParams::new(1.0, 2.0, 8, 256);
        let dec = decompose(&FunctionSpec::exp(), 1e6, &p).unwrap();
        assert_eq!(dec.n_components, 0);
        assert_eq!(dec.warnings.len(), 1);
    }

    #[test]
    fn base_cell_maximizes_on_outer_ring() {
        let dec = decompose(&FunctionSpec::exp(), 10.0, &GridParams::new(5.0, 50.0, 32, 256)).unwrap();
        let k = dec.base_cell(1).unwrap();
        let (i, j) = dec.grid.cell(k);
        assert_eq!(i, 31);
        assert!(j == 0 || j == 255);
        assert!(dec.base_cell(2).is_err());
    }
}
