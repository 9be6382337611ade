use super::profile::{check_beta, psi_profile, tsuji_integral, ProfileKind, RadialProfile};
use super::TractDecomposition;
use crate::fncat::{max_modulus, EntireFunction};
use crate::quadrature::trapezoid;
use crate::schroeder::SchroederSolution;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// `log log M(r)` on the given radii.
pub fn loglogm_profile(f: &EntireFunction, radii: &[f64], samples: usize) -> Result<RadialProfile> {
    let values = radii.par_iter().map(|&r| max_modulus(f, r, samples)).collect::<Result<Vec<_>>>()?;
    Ok(RadialProfile::new(ProfileKind::LogLogM, radii.to_vec(), values))
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcaReport {
    pub n_components: usize,
    pub radii: Vec<f64>,
    pub log_log_max: Vec<f64>,
    /// `log log M(r) − (N/2) log r`
    pub residuals: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub budget: f64,
    /// `min ≥ −budget`
    pub bounded_below: bool,
}

/// Residual of `log log M(r) ≥ (N/2) log r − O(1)` over `r_grid`.
pub fn verify_dca(dec: &TractDecomposition, r_grid: &[f64], samples: usize, budget: f64) -> Result<DcaReport> {
    if dec.n_components == 0 {
        return Err(Error::Domain("decomposition has no tracts".into()));
    }
    let llm = loglogm_profile(&dec.function, r_grid, samples)?;
    let half_n = dec.n_components as f64 / 2.0;
    let residuals: Vec<f64> = r_grid.iter().zip(&llm.values).map(|(r, v)| v - half_n * r.ln()).collect();
    let (min, max) = min_max(&residuals);
    Ok(DcaReport {
        n_components: dec.n_components,
        radii: r_grid.to_vec(),
        log_log_max: llm.values,
        residuals,
        min,
        max,
        budget,
        bounded_below: min >= -budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub component: u32,
    pub beta: f64,
    pub r0: f64,
    pub kappa: f64,
    pub radii: Vec<f64>,
    pub log_log_max: Vec<f64>,
    /// `π ∫_{r0}^{κr} dt/(t ψ(t))`
    pub integrals: Vec<f64>,
    pub residuals: Vec<f64>,
    pub inf: f64,
    pub c_budget: f64,
    /// Radii of rings lying entirely in the tract (excluded from the integral).
    pub hypothesis_violations: Vec<f64>,
    pub gaps: usize,
    pub pass: bool,
}

/// Residual `log log M(r) − π ∫_{r0}^{κr} dt/(t ψ(t))` for one tract.
#[allow(clippy::too_many_arguments)]
pub fn verify_theorem2(
    dec: &TractDecomposition,
    beta: f64,
    component: u32,
    r0: f64,
    kappa: f64,
    r_grid: &[f64],
    samples: usize,
    c_budget: f64,
) -> Result<Theorem2Report> {
    let psi = psi_profile(dec, beta, component)?;
    let llm = loglogm_profile(&dec.function, r_grid, samples)?;
    let mut integrals = Vec::with_capacity(r_grid.len());
    let mut gaps = 0;
    for &r in r_grid {
        let t = tsuji_integral(&psi, r0, kappa, r)?;
        gaps = gaps.max(t.gaps);
        integrals.push(t.value);
    }
    let upper = kappa * r_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hypothesis_violations = psi
        .radii
        .iter()
        .zip(&psi.full_ring)
        .filter(|(r, full)| **full && **r >= r0 && **r <= upper)
        .map(|(r, _)| *r)
        .collect();
    let residuals: Vec<f64> = llm.values.iter().zip(&integrals).map(|(a, b)| a - b).collect();
    let (inf, _) = min_max(&residuals);
    Ok(Theorem2Report {
        component,
        beta,
        r0,
        kappa,
        radii: r_grid.to_vec(),
        log_log_max: llm.values,
        integrals,
        residuals,
        inf,
        c_budget,
        hypothesis_violations,
        gaps,
        pass: inf > -c_budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub n_components: usize,
    pub beta: f64,
    pub xi: f64,
    pub radii: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub log_log_max: Vec<f64>,
    /// `(N/2 + ε(r)) log r − log log M(r)`
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub pass: bool,
}

/// Check `log log M(r) ≤ (N/2 + ε(r)) log r` on `r_grid`.
pub fn theorem1_hypothesis(
    f: &EntireFunction,
    n_components: usize,
    sol: &SchroederSolution,
    r_grid: &[f64],
    samples: usize,
) -> Result<Theorem1Report> {
    if let Some(&r) = r_grid.iter().find(|&&r| r <= sol.xi) {
        return Err(Error::Domain(format!("radius {r} is not above ξ = {}", sol.xi)));
    }
    let epsilon = r_grid.iter().map(|&r| sol.epsilon(r)).collect::<Result<Vec<_>>>()?;
    let llm = loglogm_profile(f, r_grid, samples)?;
    let half_n = n_components as f64 / 2.0;
    let margins: Vec<f64> = r_grid
        .iter()
        .zip(&epsilon)
        .zip(&llm.values)
        .map(|((r, e), v)| (half_n + e) * r.ln() - v)
        .collect();
    let (min_margin, _) = min_max(&margins);
    Ok(Theorem1Report {
        n_components,
        beta: sol.beta,
        xi: sol.xi,
        radii: r_grid.to_vec(),
        epsilon,
        log_log_max: llm.values,
        margins,
        min_margin,
        pass: min_margin >= 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub radii: Vec<f64>,
    /// `d²m/d(log r)²` at interior samples (aligned with `radii[1..n-1]`).
    pub second_differences: Vec<f64>,
    pub threshold: f64,
    pub r0: f64,
    pub first_failure: Option<f64>,
    pub pass: bool,
}

/// Discrete convexity of a profile in `log r`, from `r0` on, with tolerance
/// `tol · max(1, max m)`.
pub fn convexity_check(profile: &RadialProfile, tol: f64, r0: Option<f64>) -> Result<ConvexityReport> {
    let n = profile.len();
    if n < 3 {
        return Err(Error::Parameter("convexity needs at least 3 radii".into()));
    }
    let u: Vec<f64> = profile.radii.iter().map(|r| r.ln()).collect();
    let m = &profile.values;
    let second_differences: Vec<f64> = (1..n - 1)
        .map(|i| {
            let (h1, h2) = (u[i] - u[i - 1], u[i + 1] - u[i]);
            2.0 * ((m[i + 1] - m[i]) / h2 - (m[i] - m[i - 1]) / h1) / (h1 + h2)
        })
        .collect();
    let peak = m.iter().copied().fold(1.0, f64::max);
    let threshold = -tol * peak;
    let r0 = r0.unwrap_or(profile.radii[0]);
    let first_failure = (1..n - 1)
        .find(|&i| profile.radii[i] >= r0 && second_differences[i - 1] < threshold)
        .map(|i| profile.radii[i]);
    Ok(ConvexityReport {
        radii: profile.radii.clone(),
        second_differences,
        threshold,
        r0,
        first_failure,
        pass: first_failure.is_none(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficiencyReport {
    /// `∫_{r0}^{r} (2π − ψ(t)) dt/t` at each profile radius `≥ r0`.
    pub integral: RadialProfile,
    pub ratio_to_log_r: Vec<f64>,
    /// Ratio nonincreasing over the last decade of radii.
    pub decreasing_top_decade: bool,
}

/// Cumulative deficiency `∫_{r0}^{r} (2π − ψ(t)) dt/t` of a total ψ profile.
pub fn deficiency_integral(psi_total: &RadialProfile, r0: f64) -> Result<DeficiencyReport> {
    let window = psi_total.window(r0, f64::INFINITY);
    if window.len() < 2 {
        return Err(Error::Domain(format!("profile has fewer than two radii beyond r0 = {r0}")));
    }
    let pts: Vec<(f64, f64)> = window.radii.iter().zip(&window.values).map(|(r, v)| (r.ln(), 2.0 * PI - v)).collect();
    let values: Vec<f64> = (0..pts.len()).map(|k| trapezoid(&pts[..=k])).collect();
    let ratio_to_log_r: Vec<f64> = window.radii.iter().zip(&values).map(|(r, v)| v / r.ln()).collect();
    let r_top = *window.radii.last().unwrap() / 10.0;
    let top: Vec<f64> =
        window.radii.iter().zip(&ratio_to_log_r).filter(|(r, _)| **r >= r_top).map(|(_, q)| *q).collect();
    let decreasing_top_decade = top.len() >= 2 && top.windows(2).all(|w| w[1] <= w[0]);
    Ok(DeficiencyReport {
        integral: RadialProfile::new(ProfileKind::Deficiency, window.radii, values),
        ratio_to_log_r,
        decreasing_top_decade,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchySchwarzReport {
    pub rings_checked: usize,
    pub violations: usize,
    /// Smallest `Σ 1/ψ_j − N²/Σ ψ_j` over checked rings.
    pub min_slack: f64,
}

/// `Σ_j 1/ψ_j ≥ N²/Σ_j ψ_j` on every ring where all `ψ_j > 0`.
pub fn cauchy_schwarz_check(dec: &TractDecomposition, beta: f64) -> Result<CauchySchwarzReport> {
    check_beta(beta)?;
    let n = dec.n_components;
    if n == 0 {
        return Err(Error::Domain("decomposition has no tracts".into()));
    }
    let profiles = (1..=n as u32).map(|c| psi_profile(dec, beta, c)).collect::<Result<Vec<_>>>()?;
    let (mut rings_checked, mut violations, mut min_slack) = (0, 0, f64::INFINITY);
    for i in 0..dec.grid.n_rings() {
        let psi: Vec<f64> = profiles.iter().map(|p| p.values[i]).collect();
        if psi.iter().any(|&v| v <= 0.0) {
            continue;
        }
        rings_checked += 1;
        let lhs: f64 = psi.iter().map(|v| 1.0 / v).sum();
        let rhs = (n * n) as f64 / psi.iter().sum::<f64>();
        let slack = lhs - rhs;
        min_slack = min_slack.min(slack);
        // allow rounding in the last few bits
        if lhs < rhs * (1.0 - 8.0 * f64::EPSILON) {
            violations += 1;
        }
    }
    Ok(CauchySchwarzReport { rings_checked, violations, min_slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fncat::FunctionSpec;
    use crate::quadrature::log_space;
    use crate::schroeder::fixed_point;
    use crate::tracts::{decompose, GridParams};

    // the gap between the two tracts is about 6/r radians wide, so the
    // angular resolution has to exceed roughly r
    fn sine_dec() -> TractDecomposition {
        let dec = decompose(&FunctionSpec::sine(), 10.0, &GridParams::per_decade(5.0, 400.0, 64, 2048)).unwrap();
        assert_eq!(dec.n_components, 2);
        dec
    }

    #[test]
    fn dca_residuals() {
        let dec = sine_dec();
        let radii = log_space(10.0, 1e4, 20);
        let rep = verify_dca(&dec, &radii, 256, 5.0).unwrap();
        for (r, res) in radii.iter().zip(&rep.residuals) {
            let want = (r - std::f64::consts::LN_2).ln() - r.ln();
            assert!((res - want).abs() < 1e-8);
        }
        assert!(rep.bounded_below);

        let exp = decompose(&FunctionSpec::exp(), 10.0, &GridParams::new(5.0, 100.0, 32, 256)).unwrap();
        let rep = verify_dca(&exp, &radii, 256, 5.0).unwrap();
        for (r, res) in radii.iter().zip(&rep.residuals) {
            assert!((res - 0.5 * r.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn theorem1_sine_passes_exp_fails() {
        let sol = fixed_point(0.2).unwrap();
        let radii = log_space(20.0, 1e6, 30);
        let s = FunctionSpec::sine().build().unwrap();
        assert!(theorem1_hypothesis(&s, 2, &sol, &radii, 256).unwrap().pass);
        let e = FunctionSpec::exp().build().unwrap();
        let rep = theorem1_hypothesis(&e, 1, &sol, &radii, 256).unwrap();
        assert!(!rep.pass);
        assert!(rep.margins.last().unwrap() < &0.0);
        assert!(theorem1_hypothesis(&e, 1, &sol, &[5.0], 256).is_err());
    }

    #[test]
    fn theorem2_sine_per_tract() {
        let dec = sine_dec();
        let radii = log_space(100.0, 700.0, 10);
        for c in 1..=2 {
            let rep = verify_theorem2(&dec, 0.25, c, 10.0, 0.5, &radii, 256, 5.0).unwrap();
            assert!(rep.pass, "tract {c}: inf {}", rep.inf);
            assert!(rep.hypothesis_violations.is_empty());
        }
    }

    #[test]
    fn convexity_controls() {
        let radii = log_space(10.0, 1e4, 40);
        let linear = RadialProfile::new(ProfileKind::M, radii.clone(), radii.iter().map(|r| 2.0 * r).collect());
        let rep = convexity_check(&linear, 1e-3, None).unwrap();
        assert!(rep.pass && rep.second_differences.iter().all(|&d| d > 0.0));
        let concave = RadialProfile::new(ProfileKind::M, radii.clone(), radii.iter().map(|r| r.ln().sqrt()).collect());
        let rep = convexity_check(&concave, 1e-6, None).unwrap();
        assert!(!rep.pass);
        assert!(convexity_check(&RadialProfile::new(ProfileKind::M, vec![1.0, 2.0], vec![1.0, 2.0]), 1e-3, None).is_err());
    }

    #[test]
    fn deficiency_ratio_decreases_for_sine() {
        // the ratio peaks near r = 55, so the top decade must start well beyond
        let dec = decompose(&FunctionSpec::sine(), 10.0, &GridParams::per_decade(5.0, 3000.0, 64, 4096)).unwrap();
        assert_eq!(dec.n_components, 2);
        let total = RadialProfile::sum(&[psi_profile(&dec, 0.25, 1).unwrap(), psi_profile(&dec, 0.25, 2).unwrap()])
            .unwrap();
        let rep = deficiency_integral(&total, 10.0).unwrap();
        assert!(rep.decreasing_top_decade);
        assert!(rep.integral.values.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn cauchy_schwarz_holds() {
        let dec = sine_dec();
        let rep = cauchy_schwarz_check(&dec, 0.25).unwrap();
        assert!(rep.rings_checked > 0);
        assert_eq!(rep.violations, 0);
    }
}
