use anyhow::Result;
use serde_json::json;

use crate::acceptance::{run_criteria, AcceptConfig};
use crate::manifest::RunManifest;
use crate::{rng_seed, seed, to_json_bytes, Cli, Format, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Seed pair source; replacing it with a non-complementary pair must fail.
    #[arg(long, default_value = seed::BUILTIN)]
    pub seed_pair: String,

    /// Monte-Carlo trials per hypothesis.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,

    /// Relative tolerance for the Monte-Carlo variances.
    #[arg(long, default_value_t = 0.03)]
    pub tolerance: f64,

    /// Report file name relative to --out-dir.
    #[arg(long, default_value = "acceptance.json")]
    pub output: String,
}

pub fn run(cli: &Cli, args: &Args) -> Result<Outcome> {
    let raw = seed::load(&args.seed_pair, None)?;
    let mut cfg = AcceptConfig {
        seed_a: raw.a.clone(),
        seed_b: raw.b.clone(),
        trials: args.trials,
        variance_tolerance: args.tolerance,
        ..AcceptConfig::default()
    };
    if let Some(s) = rng_seed(cli)? {
        cfg.rng_seed = s;
    }
    let report = run_criteria(&cfg);

    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Csv => {
            for c in &report.criteria {
                println!("{}", c.summary_line());
            }
            let ok = report.criteria.iter().filter(|c| c.passed).count();
            println!("{ok}/{} criteria passed", report.criteria.len());
        }
    }

    let mut manifest = RunManifest::new(
        "accept",
        json!({
            "seed_pair": raw.source,
            "trials": cfg.trials,
            "rng_seed": cfg.rng_seed,
            "tolerance": cfg.variance_tolerance,
        }),
    );
    if let Some((path, bytes)) = &raw.file {
        manifest.record_input(path, bytes);
    }
    manifest.write_output(&cli.out_dir, &args.output, &to_json_bytes(&report)?)?;
    manifest.finish(&cli.out_dir)?;
    Ok(Outcome::from_bool(report.all_passed))
}
