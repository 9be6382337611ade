use super::TractDecomposition;
use crate::quadrature::trapezoid;
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Theta,
    ThetaStar,
    Psi,
    M,
    LogLogM,
    TsujiIntegral,
    Deficiency,
}

/// A quantity sampled on increasing radii.
///
/// `full_ring[i]` marks rings lying entirely inside the component. For
/// `ThetaStar` and `Psi` profiles such rings stand for `θ* = ∞`: the stored
/// value is `2π` and integrals give them weight zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub kind: ProfileKind,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub full_ring: Vec<bool>,
}

impl RadialProfile {
    pub fn new(kind: ProfileKind, radii: Vec<f64>, values: Vec<f64>) -> Self {
        let full_ring = vec![false; radii.len()];
        Self { kind, radii, values, full_ring }
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Pointwise sum of profiles on identical radii (e.g. ψ over all tracts).
    pub fn sum(profiles: &[RadialProfile]) -> Result<RadialProfile> {
        let first = profiles.first().ok_or_else(|| Error::Parameter("no profiles to sum".into()))?;
        let mut out = first.clone();
        for p in &profiles[1..] {
            if p.radii != first.radii {
                return Err(Error::Mismatch("profiles sampled on different radii".into()));
            }
            for (k, v) in p.values.iter().enumerate() {
                out.values[k] += v;
                out.full_ring[k] |= p.full_ring[k];
            }
        }
        Ok(out)
    }

    /// Restrict to radii in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> RadialProfile {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.radii[i] >= lo && self.radii[i] <= hi).collect();
        RadialProfile {
            kind: self.kind,
            radii: keep.iter().map(|&i| self.radii[i]).collect(),
            values: keep.iter().map(|&i| self.values[i]).collect(),
            full_ring: keep.iter().map(|&i| self.full_ring[i]).collect(),
        }
    }
}

fn angular_profile(dec: &TractDecomposition, component: u32, kind: ProfileKind, keep: impl Fn(usize, f64) -> bool) -> RadialProfile {
    let grid = &dec.grid;
    let n = grid.n_theta();
    let width = grid.cell_width();
    let mut values = Vec::with_capacity(grid.n_rings());
    let mut full_ring = Vec::with_capacity(grid.n_rings());
    for i in 0..grid.n_rings() {
        let r = grid.ring_radius(i);
        let mut in_component = 0usize;
        let mut kept = 0usize;
        for k in i * n..(i + 1) * n {
            if dec.labels[k] == component {
                in_component += 1;
                if keep(k, r) {
                    kept += 1;
                }
            }
        }
        values.push(kept as f64 * width);
        full_ring.push(kind != ProfileKind::Theta && in_component == n);
    }
    RadialProfile { kind, radii: grid.ring_radii(), values, full_ring }
}

/// `θ(r)`: angular measure of the ring inside `component`.
pub fn theta_profile(dec: &TractDecomposition, component: u32) -> Result<RadialProfile> {
    dec.check_component(component)?;
    Ok(angular_profile(dec, component, ProfileKind::Theta, |_, _| true))
}

/// `θ*(r)`: as `θ`, with full rings flagged as infinite.
pub fn theta_star_profile(dec: &TractDecomposition, component: u32) -> Result<RadialProfile> {
    dec.check_component(component)?;
    Ok(angular_profile(dec, component, ProfileKind::ThetaStar, |_, _| true))
}

/// `ψ(r)`: angular measure of cells in `component` with `log|f| ≥ r^β`.
pub fn psi_profile(dec: &TractDecomposition, beta: f64, component: u32) -> Result<RadialProfile> {
    check_beta(beta)?;
    dec.check_component(component)?;
    Ok(angular_profile(dec, component, ProfileKind::Psi, |k, r| dec.log_modulus[k] >= r.powf(beta)))
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::Parameter(format!("beta must lie in (0, 1/2), got {beta}")));
    }
    Ok(())
}

/// `m(r) = (1/2π) ∫_{V_r} v² dt` with `v = log|f| − r^β`, on the rings
/// containing `radii` (all rings when `None`).
pub fn m_profile(dec: &TractDecomposition, beta: f64, component: u32, radii: Option<&[f64]>) -> Result<RadialProfile> {
    check_beta(beta)?;
    dec.check_component(component)?;
    let grid = &dec.grid;
    let rings: Vec<usize> = match radii {
        None => (0..grid.n_rings()).collect(),
        Some(rs) => rs
            .iter()
            .map(|&r| grid.ring_of(r).ok_or_else(|| Error::Domain(format!("radius {r} outside the grid"))))
            .collect::<Result<_>>()?,
    };
    let n = grid.n_theta();
    let width = grid.cell_width();
    let values = rings
        .iter()
        .map(|&i| {
            let floor = grid.ring_radius(i).powf(beta);
            let sum: f64 = (i * n..(i + 1) * n)
                .filter(|&k| dec.labels[k] == component)
                .map(|k| dec.log_modulus[k] - floor)
                .filter(|v| *v >= 0.0)
                .map(|v| v * v)
                .sum();
            sum * width / (2.0 * PI)
        })
        .collect();
    Ok(RadialProfile::new(ProfileKind::M, rings.iter().map(|&i| grid.ring_radius(i)).collect(), values))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TsujiIntegral {
    /// `π ∫_{r0}^{κr} dt / (t θ*(t))`
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Rings with zero measure inside the range, bridged by interpolation.
    pub gaps: usize,
    /// Full rings inside the range, contributing zero.
    pub full_rings: usize,
    /// An endpoint fell between samples and its integrand was interpolated.
    pub interpolated_endpoints: bool,
}

/// `π ∫_{r0}^{κr} dt/(t θ*(t))` by the trapezoid rule in `log t`.
pub fn tsuji_integral(profile: &RadialProfile, r0: f64, kappa: f64, r: f64) -> Result<TsujiIntegral> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Parameter(format!("kappa must lie in (0, 1), got {kappa}")));
    }
    let upper = kappa * r;
    if !(r0 > 0.0 && r0 < upper) {
        return Err(Error::Parameter(format!("need 0 < r0 < κr, got r0 = {r0}, κr = {upper}")));
    }
    let (first, last) = match (profile.radii.first(), profile.radii.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::Domain("empty profile".into())),
    };
    if r0 < first * (1.0 - 1e-12) || upper > last * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("profile covers [{first}, {last}], integral needs [{r0}, {upper}]")));
    }

    // (log t, integrand) at usable samples; gaps are skipped
    let mut nodes: Vec<(f64, f64)> = Vec::new();
    let (mut gaps, mut full_rings) = (0, 0);
    for ((&t, &v), &full) in profile.radii.iter().zip(&profile.values).zip(&profile.full_ring) {
        let inside = t >= r0 && t <= upper;
        let g = if full {
            if inside {
                full_rings += 1;
            }
            0.0
        } else if v > 0.0 {
            PI / v
        } else {
            if inside {
                gaps += 1;
            }
            continue;
        };
        nodes.push((t.ln(), g));
    }
    if nodes.is_empty() {
        return Err(Error::Domain("profile has no usable samples".into()));
    }
    let (a, b) = (r0.ln(), upper.ln());
    let at = |u: f64| -> (f64, bool) {
        let k = nodes.partition_point(|n| n.0 < u);
        if k < nodes.len() && nodes[k].0 == u {
            return (nodes[k].1, false);
        }
        let (lo, hi) = match k {
            0 => (nodes[0], nodes[0]),
            k if k == nodes.len() => (nodes[k - 1], nodes[k - 1]),
            k => (nodes[k - 1], nodes[k]),
        };
        let g = if hi.0 == lo.0 { lo.1 } else { lo.1 + (hi.1 - lo.1) * (u - lo.0) / (hi.0 - lo.0) };
        (g, true)
    };
    let (ga, ia) = at(a);
    let (gb, ib) = at(b);
    let mut pts = vec![(a, ga)];
    pts.extend(nodes.iter().copied().filter(|n| n.0 > a && n.0 < b));
    pts.push((b, gb));
    Ok(TsujiIntegral {
        value: trapezoid(&pts),
        lower: r0,
        upper,
        gaps,
        full_rings,
        interpolated_endpoints: ia || ib,
    })
}
