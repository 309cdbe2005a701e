use std::path::PathBuf;

use anyhow::Result;
use dopgolay_core::ambiguity::grid;
use dopgolay_core::trains::Loaded;
use dopgolay_core::{AmbiguityGrid, Channel, Doppler, Waveform};
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{load_waveform, to_json_bytes, Cli, Format, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Train or waveform-matrix JSON file.
    pub file: PathBuf,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_min: f64,

    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub theta_max: f64,

    /// Number of evenly spaced shifts from --theta-min to --theta-max.
    #[arg(long, default_value_t = 201)]
    pub steps: usize,

    /// Explicit shifts (comma separated). Writes one column per shift.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["theta_min", "theta_max", "steps"], allow_negative_numbers = true)]
    pub thetas: Option<Vec<f64>>,

    /// single, diag, or offdiag (offdiag needs an Alamouti matrix).
    #[arg(long, default_value = "single")]
    pub channel: Channel,

    /// Output file name relative to --out-dir; defaults to ambiguity.<format>.
    #[arg(long)]
    pub output: Option<String>,
}

/// `lag,<θ_0>,<θ_1>,...`: one magnitude column per shift.
pub fn slice_csv(g: &AmbiguityGrid) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["lag".to_string()];
    header.extend(g.thetas.iter().map(|t| t.to_string()));
    w.write_record(&header)?;
    for lag in g.lags() {
        let mut row = vec![lag.to_string()];
        row.extend((0..g.thetas.len()).map(|ti| g.value(ti, lag).to_string()));
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}

/// `lag,theta,magnitude`, ordered by θ then lag.
pub fn grid_csv(g: &AmbiguityGrid) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    g.write_csv(&mut out, false)?;
    Ok(out)
}

pub fn run(cli: &Cli, args: &Args) -> Result<Outcome> {
    let (loaded, bytes) = load_waveform(&args.file)?;
    let waveform = match &loaded {
        Loaded::Train(t) => Waveform::Train(t),
        Loaded::Matrix(m) => Waveform::Matrix(m),
    };
    let thetas = match &args.thetas {
        Some(list) => list
            .iter()
            .map(|t| Doppler::new(*t))
            .collect::<dopgolay_core::Result<Vec<_>>>()?,
        None => Doppler::sweep(args.theta_min, args.theta_max, args.steps)?,
    };
    let g = grid(waveform, args.channel, &thetas)?;
    let body = match (cli.format, args.thetas.is_some()) {
        (Format::Json, _) => to_json_bytes(&g)?,
        (Format::Csv, true) => slice_csv(&g)?,
        (Format::Csv, false) => grid_csv(&g)?,
    };
    let name = args
        .output
        .clone()
        .unwrap_or_else(|| format!("ambiguity.{}", cli.format.extension()));

    let mut manifest = RunManifest::new(
        "ambiguity",
        json!({
            "channel": args.channel.as_str(),
            "thetas": g.thetas,
            "format": cli.format.extension(),
        }),
    );
    manifest.record_input(&args.file, &bytes);
    let path = manifest.write_output(&cli.out_dir, &name, &body)?;
    manifest.finish(&cli.out_dir)?;
    println!(
        "wrote {} ({} channel, {} shifts, lags {}..={})",
        path.display(),
        g.channel,
        g.thetas.len(),
        g.min_lag,
        g.max_lag
    );
    Ok(Outcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dopgolay_core::trains::ptm_train;
    use dopgolay_core::GolayPair;

    #[test]
    fn slice_layout() {
        let t = ptm_train(&GolayPair::builtin8(), 3).unwrap();
        let thetas = [0.0, 0.05].map(|x| Doppler::new(x).unwrap());
        let g = grid(Waveform::Train(&t), Channel::Single, &thetas).unwrap();
        let text = String::from_utf8(slice_csv(&g).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "lag,0,0.05");
        assert_eq!(lines.len(), 16);
        assert!(lines[8].starts_with("0,128,"));
        assert!(lines[1].starts_with("-7,0,"));
    }
}
