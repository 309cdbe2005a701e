use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dopgolay_core::radarsim::{
    alamouti_receive, hypothesis_stats, matched_filter, synthesize, synthesize_polarimetric, HypothesisStats,
    LagSeries, MatrixLagOutput,
};
use dopgolay_core::trains::{alamouti_train, build_train};
use dopgolay_core::{Complex64, Doppler, NoiseSpec, PointTarget, Scattering, Scheme};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{rng_seed, seed, to_json_bytes, Cli, Format, Outcome};

/// Scenario file. `target` must be present but may be `null` (noise only).
/// `trials = 1` writes the receiver output of one realization; `trials > 1`
/// runs the Monte-Carlo variance check at `u[d0]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub scheme: String,
    #[serde(rename = "M")]
    pub order: u32,
    #[serde(default)]
    pub seed_pair: Option<String>,
    #[serde(deserialize_with = "Option::deserialize")]
    pub target: Option<TargetSpec>,
    pub noise: NoiseConfig,
    pub trials: usize,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

/// Exactly one of `h` (`[re, im]`), `H` (2×2 of `[re, im]`), `sigma_h`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub d0: usize,
    pub theta: f64,
    #[serde(default)]
    pub h: Option<[f64; 2]>,
    #[serde(default, rename = "H")]
    pub h_matrix: Option<[[[f64; 2]; 2]; 2]>,
    #[serde(default)]
    pub sigma_h: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma_w: f64,
    pub seed: u64,
}

pub const DEFAULT_TOLERANCE: f64 = 0.03;

impl TargetSpec {
    pub fn to_target(&self) -> Result<PointTarget> {
        let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        let scattering = match (self.h, self.h_matrix, self.sigma_h) {
            (Some(h), None, None) => Scattering::Scalar(c(h)),
            (None, Some(m), None) => Scattering::Matrix([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]]),
            (None, None, Some(s)) => {
                if !s.is_finite() || s < 0.0 {
                    bail!("target.sigma_h must be finite and ≥ 0, got {s}");
                }
                Scattering::Random { sigma_h: s }
            }
            _ => bail!("target needs exactly one of `h`, `H`, `sigma_h`"),
        };
        Ok(PointTarget {
            delay: self.d0,
            doppler: Doppler::new(self.theta)?,
            scattering,
        })
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Scenario JSON file.
    pub scenario: PathBuf,

    /// Output file name relative to --out-dir.
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub hypothesis: &'static str,
    #[serde(flatten)]
    pub stats: HypothesisStats,
    pub relative_error: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

fn series_csv(u: &LagSeries) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lag", "re", "im", "magnitude"])?;
    for (lag, v) in u.iter() {
        w.write_record([
            lag.to_string(),
            v.re.to_string(),
            v.im.to_string(),
            v.norm().to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

fn matrix_csv(u: &MatrixLagOutput) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lag", "row", "col", "re", "im", "magnitude"])?;
    for (i, row) in u.entries.iter().enumerate() {
        for (j, series) in row.iter().enumerate() {
            for (lag, v) in series.iter() {
                w.write_record([
                    lag.to_string(),
                    i.to_string(),
                    j.to_string(),
                    v.re.to_string(),
                    v.im.to_string(),
                    v.norm().to_string(),
                ])?;
            }
        }
    }
    Ok(w.into_inner()?)
}

fn stats_csv(r: &StatsReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"])?;
    let rows = [
        ("hypothesis", r.hypothesis.to_string()),
        ("trials", r.stats.trials.to_string()),
        ("mean_re", r.stats.mean.re.to_string()),
        ("mean_im", r.stats.mean.im.to_string()),
        ("variance", r.stats.variance.to_string()),
        ("expected_variance", r.stats.expected_variance.to_string()),
        ("relative_error", r.relative_error.to_string()),
        ("tolerance", r.tolerance.to_string()),
        ("within_tolerance", r.within_tolerance.to_string()),
    ];
    for (k, v) in rows {
        w.write_record([k, v.as_str()])?;
    }
    Ok(w.into_inner()?)
}

fn scheme_parts(name: &str) -> Result<(bool, Scheme)> {
    let (matrix, base) = match name.strip_prefix("alamouti-") {
        Some(rest) => (true, rest),
        None => (false, name),
    };
    let scheme: Scheme = base.parse()?;
    if scheme == Scheme::Custom {
        bail!("scenario scheme must be ptm, conventional, alamouti-ptm or alamouti-conventional");
    }
    Ok((matrix, scheme))
}

pub fn read_scenario(path: &Path) -> Result<(Scenario, Vec<u8>)> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let scenario = serde_json::from_slice(&bytes).with_context(|| format!("invalid scenario {}", path.display()))?;
    Ok((scenario, bytes))
}

pub fn run(cli: &Cli, args: &Args) -> Result<Outcome> {
    let (sc, bytes) = read_scenario(&args.scenario)?;
    let (matrix, scheme) = scheme_parts(&sc.scheme)?;
    if sc.trials == 0 {
        bail!("scenario field `trials` must be at least 1");
    }
    let base = args.scenario.parent();
    let raw = seed::load(sc.seed_pair.as_deref().unwrap_or(seed::BUILTIN), base)?;
    let pair = raw.validate()?;
    let noise_seed = rng_seed(cli)?.unwrap_or(sc.noise.seed);
    let noise = NoiseSpec::new(sc.noise.sigma_w, noise_seed)?;
    let target = sc.target.as_ref().map(TargetSpec::to_target).transpose()?;
    let quiet = PointTarget::scalar(0, Doppler::ZERO, Complex64::new(0.0, 0.0));

    let mut manifest = RunManifest::new(
        "simulate",
        json!({
            "scheme": sc.scheme,
            "M": sc.order,
            "seed_pair": raw.source,
            "noise_seed": noise_seed,
            "sigma_w": sc.noise.sigma_w,
            "trials": sc.trials,
        }),
    );
    manifest.record_input(&args.scenario, &bytes);
    if let Some((path, pbytes)) = &raw.file {
        manifest.record_input(path, pbytes);
    }
    let ext = cli.format.extension();

    let outcome = if sc.trials == 1 {
        let (name, body) = if matrix {
            let wm = alamouti_train(&pair, sc.order, scheme)?;
            let r = synthesize_polarimetric(&wm, target.as_ref().unwrap_or(&quiet), &noise)?;
            let u = alamouti_receive(&r, &wm, Doppler::ZERO)?;
            let body = match cli.format {
                Format::Json => to_json_bytes(&u)?,
                Format::Csv => matrix_csv(&u)?,
            };
            (format!("alamouti.{ext}"), body)
        } else {
            let train = build_train(&pair, sc.order, scheme)?;
            let r = synthesize(&train, target.as_ref().unwrap_or(&quiet), &noise)?;
            let u = matched_filter(&r, &train)?;
            let (peak_lag, peak) = u
                .iter()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap_or((0, Complex64::new(0.0, 0.0)));
            println!("matched-filter peak |u| = {} at lag {peak_lag}", peak.norm());
            let body = match cli.format {
                Format::Json => to_json_bytes(&u)?,
                Format::Csv => series_csv(&u)?,
            };
            (format!("matched_filter.{ext}"), body)
        };
        let path = manifest.write_output(&cli.out_dir, args.output.as_deref().unwrap_or(&name), &body)?;
        println!("wrote {}", path.display());
        Outcome::Pass
    } else {
        if matrix {
            bail!("Monte-Carlo statistics (trials > 1) are only available for single-channel schemes");
        }
        let train = build_train(&pair, sc.order, scheme)?;
        let stats = hypothesis_stats(sc.trials, &train, target.as_ref(), &noise)?;
        let tolerance = sc.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        let relative_error = stats.relative_error();
        let report = StatsReport {
            hypothesis: if target.is_some() { "H1" } else { "H0" },
            stats,
            relative_error,
            tolerance,
            within_tolerance: relative_error <= tolerance,
        };
        println!(
            "{}: {} trials, variance {:.3} vs model {:.3} (relative error {:.4}, tolerance {})",
            report.hypothesis, stats.trials, stats.variance, stats.expected_variance, relative_error, tolerance
        );
        let body = match cli.format {
            Format::Json => to_json_bytes(&report)?,
            Format::Csv => stats_csv(&report)?,
        };
        let name = format!("stats.{ext}");
        let path = manifest.write_output(&cli.out_dir, args.output.as_deref().unwrap_or(&name), &body)?;
        println!("wrote {}", path.display());
        Outcome::from_bool(report.within_tolerance)
    };
    manifest.finish(&cli.out_dir)?;
    Ok(outcome)
}
