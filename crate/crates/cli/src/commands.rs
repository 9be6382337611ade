use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;
use serde::Serialize;
use tractlab::fncat::{order_estimate, FunctionSpec, OrderEstimate};
use tractlab::io;
use tractlab::logvar::{ExpansionReport, LogChart, OrbitRecord};
use tractlab::measure::{
    refinement_study, tn_density, z_plane_escape_density, EscapeGridReport, Expectation, RefinementReport, Sampling,
    SquareRegion, DEFAULT_ENTRY_STEPS,
};
use tractlab::quadrature::log_space;
use tractlab::schroeder::{DeltaSequence, ProductReport, SchroederSolution};
use tractlab::tracts::{
    convexity_check, decompose, loglogm_profile, m_profile, psi_profile, theta_profile, theorem1_hypothesis,
    verify_dca, verify_theorem2, ConvexityReport, DcaReport, GridParams, RadialProfile,
    Theorem1Report, Theorem2Report, TractDecomposition,
};

use crate::config::{or_default, Settings};
use crate::output::{Artifact, Outcome, Run, Status};

const DEFAULT_SAMPLES: usize = 512;
const DEFAULT_NTHETA: usize = 1024;
const DEFAULT_RINGS_PER_DECADE: usize = 128;

fn decomposition(s: &mut Settings, spec: &FunctionSpec, annulus: &str) -> Result<TractDecomposition> {
    let threshold = s.threshold(spec)?;
    let (r_min, r_max) = s.annulus(annulus)?;
    let n_theta = or_default(&mut s.ntheta, DEFAULT_NTHETA);
    let per_decade = or_default(&mut s.rings_per_decade, DEFAULT_RINGS_PER_DECADE);
    Ok(decompose(spec, threshold, &GridParams::per_decade(r_min, r_max, per_decade, n_theta))?)
}

fn profile_csv(run: &Run, profile: &RadialProfile) -> Artifact {
    Artifact::Text { suffix: ".csv", body: io::profile_csv(profile, Some(&run.provenance())) }
}

fn numeric_expectation(s: &Settings) -> Result<Option<f64>> {
    s.expect
        .as_deref()
        .map(|t| t.parse::<f64>().map_err(|_| anyhow!("--expect must be a number here, got {t:?}")))
        .transpose()
}

#[derive(Serialize)]
struct EvalResult {
    z: Complex64,
    value: Option<Complex64>,
    log_modulus: f64,
    overflow: bool,
}

pub fn eval(mut s: Settings) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let z = s.point("z", None)?;
    let run = Run { command: "eval", settings: s };
    let f = spec.build()?;
    let lm = f.log_modulus(z);
    let value = f.eval(z).ok();
    let result = EvalResult { z, value, log_modulus: lm.value, overflow: value.is_none() };
    run.finish(Status::Report, &result, vec![])
}

pub fn maxmod(mut s: Settings) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let radii = s.radii("10:1000:41")?;
    let samples = or_default(&mut s.samples, DEFAULT_SAMPLES);
    let run = Run { command: "maxmod", settings: s };
    let profile = loglogm_profile(&spec.build()?, &radii, samples)?;
    let csv = profile_csv(&run, &profile);
    run.finish(Status::Report, &profile, vec![csv])
}

#[derive(Serialize)]
struct OrderResult {
    estimate: OrderEstimate,
    expected: Option<f64>,
    tol: Option<f64>,
}

pub fn order(mut s: Settings) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let radii = s.radii("10:10000:16")?;
    let samples = or_default(&mut s.samples, DEFAULT_SAMPLES);
    let expected = numeric_expectation(&s)?;
    let tol = expected.map(|_| or_default(&mut s.tol, 0.05));
    let run = Run { command: "order", settings: s };
    let (lo, hi) = (radii[0], *radii.last().unwrap());
    let estimate = order_estimate(&spec.build()?, lo, hi, radii.len(), samples)?;
    let status = match (expected, tol) {
        (Some(e), Some(t)) => Status::from_check((estimate.order - e).abs() <= t),
        _ => Status::Report,
    };
    run.finish(status, &OrderResult { estimate, expected, tol }, vec![])
}

pub fn tracts(mut s: Settings) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let dec = decomposition(&mut s, &spec, "5:100")?;
    let expected = numeric_expectation(&s)?;
    let run = Run { command: "tracts", settings: s };
    let summary = dec.summary();
    let status = match expected {
        Some(n) => Status::from_check(summary.n_components as f64 == n),
        None => Status::Report,
    };
    run.finish(status, &summary, vec![])
}

fn angular_profile(mut s: Settings, command: &'static str) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let dec = decomposition(&mut s, &spec, "5:100")?;
    let component = or_default(&mut s.component, 1);
    let profile = if command == "psi" {
        let beta = or_default(&mut s.beta, 0.25);
        psi_profile(&dec, beta, component)?
    } else {
        theta_profile(&dec, component)?
    };
    let run = Run { command, settings: s };
    let csv = profile_csv(&run, &profile);
    run.finish(Status::Report, &profile, vec![csv])
}

pub fn theta(s: Settings) -> Result<Outcome> {
    angular_profile(s, "theta")
}

pub fn psi(s: Settings) -> Result<Outcome> {
    angular_profile(s, "psi")
}

#[derive(Serialize)]
struct TsujiResult {
    n_components: usize,
    report: Theorem2Report,
    /// `π∫ / log log M` at the largest radius.
    ratio_at_max: f64,
}

pub fn tsuji(mut s: Settings) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let beta = or_default(&mut s.beta, 0.25);
    let component = or_default(&mut s.component, 1);
    let r0 = or_default(&mut s.r0, 10.0);
    let kappa = or_default(&mut s.kappa, 0.5);
    let radii = s.radii("100:10000:21")?;
    let samples = or_default(&mut s.samples, DEFAULT_SAMPLES);
    let budget = or_default(&mut s.budget, 5.0);
    let top = kappa * radii.last().unwrap();
    let dec = decomposition(&mut s, &spec, &format!("{}:{}", r0 / 2.0, top * 1.05))?;
    let run = Run { command: "tsuji", settings: s };
    let report = verify_theorem2(&dec, beta, component, r0, kappa, &radii, samples, budget)?;
    let ratio_at_max = report.integrals.last().unwrap() / report.log_log_max.last().unwrap();
    let status = Status::from_check(report.pass);
    run.finish(status, &TsujiResult { n_components: dec.n_components, report, ratio_at_max }, vec![])
}

pub fn dca(mut s: Settings) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let dec = decomposition(&mut s, &spec, "5:100")?;
    let radii = s.radii("10:10000:31")?;
    let samples = or_default(&mut s.samples, DEFAULT_SAMPLES);
    let budget = or_default(&mut s.budget, 1.0);
    let run = Run { command: "dca", settings: s };
    let report: DcaReport = verify_dca(&dec, &radii, samples, budget)?;
    // the residual is two-sided here: the equality case keeps it within the budget
    let ok = report.bounded_below && report.max <= budget;
    run.finish(Status::from_check(ok), &report, vec![])
}

pub fn hypothesis(mut s: Settings) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let beta = or_default(&mut s.beta, 0.2);
    let dec = decomposition(&mut s, &spec, "5:100")?;
    let radii = s.radii("100:1000000:25")?;
    let samples = or_default(&mut s.samples, DEFAULT_SAMPLES);
    let run = Run { command: "hypothesis", settings: s };
    let sol = SchroederSolution::new(beta)?;
    let report: Theorem1Report = theorem1_hypothesis(&dec.function, dec.n_components, &sol, &radii, samples)?;
    run.finish(Status::from_check(report.pass), &report, vec![])
}

#[derive(Serialize)]
struct SchroederRow {
    x: f64,
    phi: f64,
    epsilon: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SchroederResult {
    beta: f64,
    xi: f64,
    mu: f64,
    fixed_point_residual: f64,
    at: Option<SchroederRow>,
    table: Vec<SchroederRow>,
    max_residual: f64,
    delta: Option<DeltaSequence>,
    products: Option<ProductReport>,
}

pub fn schroeder(mut s: Settings) -> Result<Outcome> {
    let beta = or_default(&mut s.beta, 0.2);
    let points = or_default(&mut s.points, 25);
    let tol = or_default(&mut s.tol, 1e-8);
    let n_max = s.x0.map(|_| or_default(&mut s.n_max, 20));
    let run = Run { command: "schroeder", settings: s.clone() };
    let sol = SchroederSolution::new(beta)?;
    let row = |x: f64| -> Result<SchroederRow> {
        Ok(SchroederRow { x, phi: sol.phi(x)?, epsilon: sol.epsilon(x)?, residual: sol.functional_residual(x)? })
    };
    if points < 2 {
        bail!("--points must be at least 2");
    }
    let table = log_space(sol.xi + 0.01, 1e8, points).into_iter().map(row).collect::<Result<Vec<_>>>()?;
    let at = s.x.map(row).transpose()?;
    let max_residual = table.iter().chain(&at).map(|r| r.residual).fold(0.0, f64::max);
    let (delta, products) = match (s.x0, n_max) {
        (Some(x0), Some(n)) => {
            let d = sol.delta_sequence(x0, n)?;
            let d1 = d.value_or_bound(1).ok_or_else(|| anyhow!("delta sequence is empty"))?;
            let p = d.partial_products(0.1 / d1)?;
            (Some(d), Some(p))
        }
        _ => (None, None),
    };
    let ok = sol.fixed_point_residual() <= 1e-10 * sol.xi && max_residual <= tol;
    let mut csv = format!("# {}\n", run.provenance().replace('\n', "\n# "));
    csv.push_str("x,phi,epsilon,residual\n");
    for r in table.iter().chain(&at) {
        csv.push_str(&format!("{},{},{},{}\n", r.x, r.phi, r.epsilon, r.residual));
    }
    let result = SchroederResult {
        beta,
        xi: sol.xi,
        mu: sol.mu,
        fixed_point_residual: sol.fixed_point_residual(),
        at,
        table,
        max_residual,
        delta,
        products,
    };
    run.finish(Status::from_check(ok), &result, vec![Artifact::Text { suffix: ".csv", body: csv }])
}

#[derive(Serialize)]
struct MProfileResult {
    profile: RadialProfile,
    /// Range of `m(r)/r` over the profile.
    m_over_r: [f64; 2],
    convexity: ConvexityReport,
}

pub fn mprofile(mut s: Settings) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let beta = or_default(&mut s.beta, 0.25);
    let component = or_default(&mut s.component, 1);
    let tol = or_default(&mut s.tol, 1e-3);
    let dec = decomposition(&mut s, &spec, "10:1000")?;
    let run = Run { command: "mprofile", settings: s.clone() };
    let profile = m_profile(&dec, beta, component, None)?;
    let convexity = convexity_check(&profile, tol, s.r0)?;
    let ratios = profile.radii.iter().zip(&profile.values).map(|(r, m)| m / r);
    let m_over_r = ratios.fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], q| [lo.min(q), hi.max(q)]);
    let csv = profile_csv(&run, &profile);
    let status = Status::from_check(convexity.pass);
    run.finish(status, &MProfileResult { profile, m_over_r, convexity }, vec![csv])
}

#[derive(Serialize)]
struct LogvarResult {
    orbit: Option<OrbitRecord>,
    expansion: ExpansionReport,
}

pub fn logvar(mut s: Settings) -> Result<Outcome> {
    let spec = s.function_spec()?;
    let threshold = s.threshold(&spec)?;
    let beta = or_default(&mut s.beta, 0.2);
    let z = s.z.is_some().then(|| s.point("z", None)).transpose()?;
    let n_max = z.map(|_| or_default(&mut s.n_max, 20));
    let points = or_default(&mut s.points, 1000);
    let seed = or_default(&mut s.seed, 0);
    let margin = or_default(&mut s.margin, 1.0);
    let (r_min, r_max) = s.annulus("2:1000000")?;
    let run = Run { command: "logvar", settings: s };
    let chart = LogChart::new(&spec, threshold)?;
    let sample = chart.sample_w(points, r_min, r_max, margin, seed)?;
    let expansion = chart.check_expansion(&sample, margin);
    let orbit = match (z, n_max) {
        (Some(z), Some(n)) => Some(chart.iterate_t(beta, z, n)?),
        _ => None,
    };
    let artifacts = orbit
        .iter()
        .map(|o| Artifact::Text { suffix: ".csv", body: io::orbit_csv(o, Some(&run.provenance())) })
        .collect();
    let status = Status::from_check(expansion.violations == 0);
    run.finish(status, &LogvarResult { orbit, expansion }, artifacts)
}

/// Escape report without the per-cell data, which goes to the rasters.
#[derive(Serialize)]
struct EscapeSummary<'a> {
    region: &'a SquareRegion,
    sampling: &'a Sampling,
    n_max: usize,
    density_sequence: &'a [f64],
    relative_to_first: &'a Option<Vec<f64>>,
    refinement_parent: Option<usize>,
    nonincreasing: bool,
}

impl<'a> From<&'a EscapeGridReport> for EscapeSummary<'a> {
    fn from(r: &'a EscapeGridReport) -> Self {
        Self {
            region: &r.region,
            sampling: &r.sampling,
            n_max: r.n_max,
            density_sequence: &r.density_sequence,
            relative_to_first: &r.relative_to_first,
            refinement_parent: r.refinement_parent,
            nonincreasing: r.is_nonincreasing(),
        }
    }
}

/// Resolved parameters shared by `escape` and `refine`.
struct EscapeSetup {
    spec: FunctionSpec,
    z_plane: bool,
    threshold: f64,
    beta: f64,
    region: SquareRegion,
    n_max: usize,
    escape_radius: f64,
    entry_steps: usize,
}

impl EscapeSetup {
    fn resolve(s: &mut Settings) -> Result<Self> {
        let spec = s.function_spec()?;
        let threshold = s.threshold(&spec)?;
        let plane = s.plane.get_or_insert_with(|| "log".into()).clone();
        let z_plane = match plane.as_str() {
            "log" => false,
            "z" => true,
            other => bail!("--plane must be log or z, got {other:?}"),
        };
        let beta = or_default(&mut s.beta, 0.2);
        let center = s.point("center", Some(if z_plane { "0" } else { "40" }))?;
        let region = match (s.side, z_plane) {
            (Some(side), _) => SquareRegion::new(center, side)?,
            (None, true) => SquareRegion::new(center, *s.side.insert(20.0))?,
            (None, false) => {
                let q = SquareRegion::q(center)?;
                s.side = Some(q.side);
                q
            }
        };
        let n_max = or_default(&mut s.n_max, 10);
        let escape_radius = or_default(&mut s.escape_radius, 2.0 * threshold);
        let entry_steps = or_default(&mut s.entry_steps, DEFAULT_ENTRY_STEPS);
        Ok(Self { spec, z_plane, threshold, beta, region, n_max, escape_radius, entry_steps })
    }

    fn run(&self, sampling: Sampling) -> Result<EscapeGridReport> {
        Ok(if self.z_plane {
            z_plane_escape_density(&self.spec, &self.region, sampling, self.n_max, self.escape_radius, self.entry_steps)?
        } else {
            tn_density(&self.spec, self.threshold, self.beta, &self.region, sampling, self.n_max)?
        })
    }
}

fn sampling(s: &mut Settings) -> Sampling {
    match s.monte_carlo {
        Some(samples) => Sampling::MonteCarlo { samples, seed: or_default(&mut s.seed, 0) },
        None => Sampling::grid(or_default(&mut s.resolution, 256)),
    }
}

pub fn escape(mut s: Settings) -> Result<Outcome> {
    let setup = EscapeSetup::resolve(&mut s)?;
    let sampling = sampling(&mut s);
    let run = Run { command: "escape", settings: s };
    let report = setup.run(sampling)?;
    let mut artifacts = Vec::new();
    let prov = run.provenance();
    let mut csv = format!("# {}\nn,density\n", prov.replace('\n', "\n# "));
    for (n, d) in report.density_sequence.iter().enumerate() {
        csv.push_str(&format!("{n},{d}\n"));
    }
    artifacts.push(Artifact::Text { suffix: ".csv", body: csv });
    if let Some(res) = sampling.resolution() {
        let rows = io::grid_to_image_rows(res, &report.raster_bytes());
        artifacts.push(Artifact::Binary { suffix: ".pgm", body: io::pgm(res, res, &rows, Some(&prov))? });
        artifacts.push(Artifact::Binary { suffix: ".ppm", body: io::ppm(res, res, &rows, Some(&prov))? });
    }
    let status = Status::from_check(report.is_nonincreasing());
    run.finish(status, &EscapeSummary::from(&report), artifacts)
}

#[derive(Serialize)]
struct RefineResult<'a> {
    study: RefinementReport,
    reports: Vec<EscapeSummary<'a>>,
}

fn parse_expectation(text: &str) -> Result<Expectation> {
    match text.split_once(':') {
        None if text == "positive" => Ok(Expectation::PositiveMeasure),
        None if text == "zero" => Ok(Expectation::ZeroMeasure { from: 0 }),
        Some(("zero", n)) => Ok(Expectation::ZeroMeasure { from: n.parse()? }),
        _ => bail!("--expect must be positive, zero or zero:<n>, got {text:?}"),
    }
}

pub fn refine(mut s: Settings) -> Result<Outcome> {
    let setup = EscapeSetup::resolve(&mut s)?;
    let resolutions = s.resolutions("256,512,1024")?;
    let expectation = parse_expectation(s.expect.get_or_insert_with(|| "positive".into()))?;
    let run = Run { command: "refine", settings: s };
    let mut reports: Vec<EscapeGridReport> = Vec::with_capacity(resolutions.len());
    for &res in &resolutions {
        let mut rep = setup.run(Sampling::grid(res))?;
        if let Some(parent) = reports.last() {
            rep = rep.with_parent(parent);
        }
        reports.push(rep);
    }
    let study = refinement_study(&reports, expectation)?;
    let status = Status::from_check(study.pass);
    let result = RefineResult { study, reports: reports.iter().map(EscapeSummary::from).collect() };
    run.finish(status, &result, vec![])
}
