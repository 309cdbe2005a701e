use std::path::PathBuf;

use anyhow::{bail, Result};
use dopgolay_core::ambiguity::{channel_response, peak_sidelobe, ratio_db};
use dopgolay_core::trains::Loaded;
use dopgolay_core::{Channel, Doppler, Waveform};
use serde::Serialize;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{load_waveform, to_json_bytes, Cli, Format, Outcome};

/// Minimum expected suppression (dB) of the PTM train over the conventional
/// train for the length-8, 16-pulse configuration.
pub fn reference_floor(channel: Channel, theta: f64) -> Option<f64> {
    const THETAS: [f64; 3] = [0.025, 0.05, 0.075];
    let floors = match channel {
        Channel::Single | Channel::Diag => [24.0, 28.0, 29.0],
        Channel::Offdiag => [24.0, 12.0, 5.0],
    };
    THETAS.iter().position(|t| (t - theta).abs() < 1e-9).map(|i| floors[i])
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Doppler-resilient waveform file.
    pub resilient: PathBuf,

    /// Baseline waveform file.
    pub baseline: PathBuf,

    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.025,0.05,0.075",
        allow_negative_numbers = true
    )]
    pub thetas: Vec<f64>,

    /// Channel to compare; defaults to single, plus offdiag for matrices.
    #[arg(long)]
    pub channel: Option<Channel>,

    /// Output file name relative to --out-dir; defaults to compare.<format>.
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub channel: Channel,
    pub theta: f64,
    pub resilient_psl: f64,
    pub baseline_psl: f64,
    /// `None` encodes +∞ (resilient peak exactly zero).
    pub suppression_db: Option<f64>,
    pub floor_db: Option<f64>,
    pub meets_floor: Option<bool>,
}

fn waveform(l: &Loaded) -> Waveform<'_> {
    match l {
        Loaded::Train(t) => Waveform::Train(t),
        Loaded::Matrix(m) => Waveform::Matrix(m),
    }
}

pub fn compare_rows(
    resilient: Waveform<'_>,
    baseline: Waveform<'_>,
    channels: &[Channel],
    thetas: &[f64],
) -> Result<Vec<Row>> {
    if resilient.train().num_pulses() != baseline.train().num_pulses() {
        bail!(
            "pulse counts differ ({} vs {})",
            resilient.train().num_pulses(),
            baseline.train().num_pulses()
        );
    }
    let mut rows = Vec::new();
    for &channel in channels {
        for &t in thetas {
            let theta = Doppler::new(t)?;
            let exclude = channel.excludes_zero_lag();
            let r = peak_sidelobe(&channel_response(resilient, channel, theta)?, exclude);
            let b = peak_sidelobe(&channel_response(baseline, channel, theta)?, exclude);
            let db = ratio_db(b, r);
            let floor = reference_floor(channel, t);
            rows.push(Row {
                channel,
                theta: t,
                resilient_psl: r,
                baseline_psl: b,
                suppression_db: db.is_finite().then_some(db),
                floor_db: floor,
                meets_floor: floor.map(|f| db >= f),
            });
        }
    }
    Ok(rows)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn db_text(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "inf".to_string())
}

pub fn rows_csv(rows: &[Row]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "channel",
        "theta",
        "resilient_psl",
        "baseline_psl",
        "suppression_db",
        "floor_db",
        "meets_floor",
    ])?;
    for r in rows {
        w.write_record([
            r.channel.to_string(),
            r.theta.to_string(),
            r.resilient_psl.to_string(),
            r.baseline_psl.to_string(),
            db_text(r.suppression_db),
            opt(r.floor_db),
            opt(r.meets_floor),
        ])?;
    }
    Ok(w.into_inner()?)
}

pub fn run(cli: &Cli, args: &Args) -> Result<Outcome> {
    if args.thetas.is_empty() {
        bail!("--thetas needs at least one value");
    }
    let (res, res_bytes) = load_waveform(&args.resilient)?;
    let (base, base_bytes) = load_waveform(&args.baseline)?;
    let both_matrices = matches!((&res, &base), (Loaded::Matrix(_), Loaded::Matrix(_)));
    let channels = match args.channel {
        Some(c) => vec![c],
        None if both_matrices => vec![Channel::Single, Channel::Offdiag],
        None => vec![Channel::Single],
    };
    let rows = compare_rows(waveform(&res), waveform(&base), &channels, &args.thetas)?;

    for r in &rows {
        let flag = match r.meets_floor {
            Some(true) => format!("meets ≥ {} dB", r.floor_db.unwrap_or_default()),
            Some(false) => format!("BELOW FLOOR {} dB", r.floor_db.unwrap_or_default()),
            None => "no reference floor".to_string(),
        };
        let db = match r.suppression_db {
            Some(v) => format!("{v:.2}"),
            None => "inf".to_string(),
        };
        println!("{:<8} θ={:<7} suppression {db:>8} dB  {flag}", r.channel, r.theta);
    }

    let body = match cli.format {
        Format::Json => to_json_bytes(&rows)?,
        Format::Csv => rows_csv(&rows)?,
    };
    let name = args
        .output
        .clone()
        .unwrap_or_else(|| format!("compare.{}", cli.format.extension()));
    let mut manifest = RunManifest::new(
        "compare",
        json!({
            "thetas": args.thetas,
            "channels": channels.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
        }),
    );
    manifest.record_input(&args.resilient, &res_bytes);
    manifest.record_input(&args.baseline, &base_bytes);
    manifest.write_output(&cli.out_dir, &name, &body)?;
    manifest.finish(&cli.out_dir)?;

    Ok(Outcome::from_bool(rows.iter().all(|r| r.meets_floor != Some(false))))
}
