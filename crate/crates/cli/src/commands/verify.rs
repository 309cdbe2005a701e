use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use dopgolay_core::ambiguity::{taylor_b, taylor_c};
use dopgolay_core::sequences::is_golay;
use dopgolay_core::trains::{check_block_cross_signs, check_prouhet_pairs};
use dopgolay_core::{PulseTrain, UnimodularSequence, WaveformMatrix};
use serde::Serialize;

use crate::{read_document, Cli, Format, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Train or waveform-matrix JSON file.
    pub file: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub file: String,
    pub scheme: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Runs every applicable check. `matrix` adds the Alamouti block checks.
pub fn run_checks(train: &PulseTrain, matrix: bool) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let n = train.num_pulses();

    let mut bad = Vec::new();
    for (k, pair) in train.pulses().chunks(2).enumerate() {
        if pair.len() != 2 || !is_golay(&pair[0], &pair[1])? {
            bad.push(k);
        }
    }
    checks.push(check(
        "pairing",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} complementary pairs", n / 2)
        } else {
            format!("blocks {bad:?} are not complementary pairs")
        },
    ));

    let Some(order) = train.order() else {
        checks.push(check(
            "prouhet-pairs",
            false,
            format!("{n} pulses is not a power of two"),
        ));
        return Ok(checks);
    };
    let pairs_ok = check_prouhet_pairs(train)?;
    checks.push(check(
        "prouhet-pairs",
        pairs_ok,
        "odd pulses drawn from opposite Prouhet classes are complementary",
    ));

    let wm = matrix.then(|| WaveformMatrix::from_train(train.clone()));
    if let Some(wm) = &wm {
        let signs_ok = check_block_cross_signs(wm);
        checks.push(check(
            "block-cross-signs",
            signs_ok,
            "every block cross-correlation is ±(first block's), signed by the PTM bit",
        ));
    }

    for m in 1..=order {
        let c = taylor_c(train, m)?;
        let off: usize = c.poly.iter().filter(|(lag, v)| *lag != 0 && *v != 0).count();
        checks.push(check(
            format!("C{m}-vanishes"),
            off == 0,
            format!("{off} nonzero coefficients off lag 0"),
        ));
    }
    if let Some(wm) = &wm {
        for m in 1..=order {
            let b = taylor_b(wm, m)?;
            let nonzero = b.poly.iter().filter(|(_, v)| *v != 0).count();
            checks.push(check(
                format!("B{m}-vanishes"),
                nonzero == 0,
                format!("{nonzero} nonzero coefficients"),
            ));
        }
    }
    Ok(checks)
}

pub fn run(cli: &Cli, args: &Args) -> Result<Outcome> {
    let (doc, _) = read_document(&args.file)?;
    let pulses = doc
        .pulses
        .iter()
        .enumerate()
        .map(|(i, s)| s.parse::<UnimodularSequence>().with_context(|| format!("pulse {i}")))
        .collect::<Result<Vec<_>>>()?;
    if pulses.is_empty() {
        bail!("{} lists no pulses", args.file.display());
    }
    if pulses.iter().any(|p| p.len() != pulses[0].len()) {
        bail!("pulses in {} have different lengths", args.file.display());
    }
    let matrix = doc.scheme.starts_with("alamouti-") || doc.blocks.is_some();
    let train = PulseTrain::new_unchecked(pulses);

    let mut checks = vec![match doc.load() {
        Ok(_) => check("document", true, format!("consistent {} document", doc.scheme)),
        Err(e) => check("document", false, e.to_string()),
    }];
    checks.extend(run_checks(&train, matrix)?);
    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        file: args.file.display().to_string(),
        scheme: doc.scheme.clone(),
        checks,
        passed,
    };

    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Csv => {
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag}  {:<18} {}", c.name, c.detail);
            }
            let ok = report.checks.iter().filter(|c| c.passed).count();
            println!("{ok}/{} checks passed", report.checks.len());
        }
    }
    Ok(Outcome::from_bool(passed))
}
