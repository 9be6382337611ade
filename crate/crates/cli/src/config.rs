use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use tractlab::fncat::{parse_complex, FunctionSpec};
use tractlab::quadrature::log_space;

/// Environment variable that redirects output files. It overrides the config
/// file but not `--out-dir`.
pub const OUT_DIR_ENV: &str = "TRACTLAB_OUT_DIR";

/// Every experiment parameter, settable from the command line or a flat TOML
/// file. Values left unset are filled with per-command defaults before the
/// run; the filled-in copy is what gets embedded in the output.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Flat TOML file with any of these options; command-line flags win
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Directory for output files (also TRACTLAB_OUT_DIR); without it only stdout is written
    #[arg(long, value_name = "DIR")]
    #[serde(skip_serializing)]
    pub out_dir: Option<PathBuf>,

    /// Worker threads (default: all cores); never changes results
    #[arg(long)]
    #[serde(skip_serializing)]
    pub threads: Option<usize>,

    /// Function: exp[:λ], sin[:α:β], ml:α, mlpow:α:N, smlpow:λ:α:N, erdos:<P>:<Q>:<c>
    /// (coefficients comma-separated, ascending degree; complex literals like 1.5-2i)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,

    /// Threshold R of the super-level set {|f| > R}
    #[arg(long = "R", value_name = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,

    /// Exponent β of the comparison function E_β(x) = e^{βx}
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,

    /// Complex point, e.g. 1+0.5i
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,

    /// Real point for the Schröder tables
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,

    /// Start of the E_β orbit for δ(x_n) and the partial products
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,

    /// Grid annulus r_min:r_max
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annulus: Option<String>,

    /// Angular cells per ring
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ntheta: Option<usize>,

    /// Rings per decade of radius
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rings_per_decade: Option<usize>,

    /// Evaluation radii lo:hi:count, log-spaced
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<String>,

    /// Angular samples for the maximum modulus
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,

    /// Tract id (1-based)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<u32>,

    /// Lower limit of the Tsuji integral
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,

    /// Upper limit factor κ of the Tsuji integral
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,

    /// Allowed lower excursion of a residual
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,

    /// Relative tolerance of a check
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    /// Number of table rows or sampled points
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,

    /// Minimum height of Re F above log R for sampled points
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,

    /// Iteration depth
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,

    /// Plane of an escape grid: log (iterates of F) or z (iterates of f)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plane: Option<String>,

    /// Center of the square region
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<String>,

    /// Side of the square region
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<f64>,

    /// Cells per side of the escape grid
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,

    /// Comma-separated resolutions for a refinement study
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolutions: Option<String>,

    /// Use this many random points instead of a grid
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<usize>,

    /// Seed for random sampling
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// z-plane escape radius
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_radius: Option<f64>,

    /// Steps allowed to first reach the escape radius
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry_steps: Option<usize>,

    /// Expected outcome: positive or zero[:n] for refine; a number for order and tracts
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

impl Settings {
    /// Fill unset flags from the config file and the output directory from the environment.
    pub fn resolve(mut self, env_out_dir: Option<PathBuf>) -> Result<Self> {
        if let Some(path) = self.config.clone() {
            let file = load_file(&path)?;
            let out_dir_flag = self.out_dir.take();
            merge_fields!(self, file; threads, spec, threshold, beta, z, x, x0, annulus, ntheta,
                rings_per_decade, radii, samples, component, r0, kappa, budget, tol, points, margin,
                n_max, plane, center, side, resolution, resolutions, monte_carlo, seed,
                escape_radius, entry_steps, expect);
            self.out_dir = out_dir_flag.or(env_out_dir.clone()).or(file.out_dir);
        }
        if self.out_dir.is_none() {
            self.out_dir = env_out_dir;
        }
        Ok(self)
    }

    pub fn function_spec(&mut self) -> Result<FunctionSpec> {
        let text = self.spec.as_deref().ok_or_else(|| anyhow!("--spec is required"))?;
        let spec: FunctionSpec = text.parse().with_context(|| format!("bad --spec {text:?}"))?;
        self.spec = Some(spec.to_string());
        Ok(spec)
    }

    /// `--R`, defaulting to the catalog's recommended threshold.
    pub fn threshold(&mut self, spec: &FunctionSpec) -> Result<f64> {
        match self.threshold {
            Some(r) => Ok(r),
            None => {
                let r = spec.default_threshold()?;
                self.threshold = Some(r);
                Ok(r)
            }
        }
    }

    pub fn point(&mut self, which: &str, default: Option<&str>) -> Result<Complex64> {
        let slot = match which {
            "z" => &mut self.z,
            "center" => &mut self.center,
            _ => unreachable!("unknown point option {which}"),
        };
        if slot.is_none() {
            *slot = default.map(str::to_owned);
        }
        let text = slot.as_deref().ok_or_else(|| anyhow!("--{which} is required"))?;
        Ok(parse_complex(text).with_context(|| format!("bad --{which} {text:?}"))?)
    }

    pub fn annulus(&mut self, default: &str) -> Result<(f64, f64)> {
        let text = self.annulus.get_or_insert_with(|| default.to_owned());
        let parts = split_numbers(text, ':')?;
        match parts[..] {
            [a, b] if 0.0 < a && a < b => Ok((a, b)),
            _ => bail!("--annulus must be r_min:r_max with 0 < r_min < r_max, got {text:?}"),
        }
    }

    pub fn radii(&mut self, default: &str) -> Result<Vec<f64>> {
        let text = self.radii.get_or_insert_with(|| default.to_owned());
        let parts = split_numbers(text, ':')?;
        match parts[..] {
            [a, b, n] if 0.0 < a && a < b && n >= 2.0 && n.fract() == 0.0 => Ok(log_space(a, b, n as usize)),
            _ => bail!("--radii must be lo:hi:count with 0 < lo < hi and count ≥ 2, got {text:?}"),
        }
    }

    pub fn resolutions(&mut self, default: &str) -> Result<Vec<usize>> {
        let text = self.resolutions.get_or_insert_with(|| default.to_owned());
        text.split(',')
            .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad --resolutions {text:?}")))
            .collect()
    }
}

fn split_numbers(text: &str, sep: char) -> Result<Vec<f64>> {
    text.split(sep)
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("not a number: {s:?} in {text:?}")))
        .collect()
}

fn load_file(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `option.get_or_insert(default)` for `Copy` values, recording the default.
pub fn or_default<T: Copy>(slot: &mut Option<T>, default: T) -> T {
    *slot.get_or_insert(default)
}
