use anyhow::Result;
use clap::ValueEnum;
use dopgolay_core::sequences::{expand_to, ExpandMethod};
use dopgolay_core::trains::{alamouti_train, build_train, TrainDocument};
use dopgolay_core::Scheme;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{seed, to_json_bytes, Cli, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenScheme {
    Ptm,
    Conventional,
    AlamoutiPtm,
    AlamoutiConventional,
}

impl GenScheme {
    fn parts(self) -> (bool, Scheme) {
        match self {
            GenScheme::Ptm => (false, Scheme::Ptm),
            GenScheme::Conventional => (false, Scheme::Conventional),
            GenScheme::AlamoutiPtm => (true, Scheme::Ptm),
            GenScheme::AlamoutiConventional => (true, Scheme::Conventional),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expansion {
    Concatenate,
    Interleave,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_enum)]
    pub scheme: GenScheme,

    /// Train order: the train has 2^(M+1) pulses.
    #[arg(long = "M", alias = "order")]
    pub order: u32,

    /// Seed pair source; overrides the global --seed.
    #[arg(long)]
    pub seed_pair: Option<String>,

    /// Expand the seed pair to this length before building the train.
    #[arg(long)]
    pub length: Option<usize>,

    #[arg(long, value_enum, default_value_t = Expansion::Concatenate)]
    pub expansion: Expansion,

    /// Output file name, relative to --out-dir.
    #[arg(long, default_value = "train.json")]
    pub output: String,
}

pub fn run(cli: &Cli, args: &Args) -> Result<Outcome> {
    let source = args
        .seed_pair
        .as_deref()
        .or(cli.seed.as_deref())
        .unwrap_or(seed::BUILTIN);
    let raw = seed::load(source, None)?;
    let mut pair = raw.validate()?;
    if let Some(len) = args.length {
        let method = match args.expansion {
            Expansion::Concatenate => ExpandMethod::Concatenate,
            Expansion::Interleave => ExpandMethod::Interleave,
        };
        pair = expand_to(&pair, len, method)?;
    }
    let (matrix, scheme) = args.scheme.parts();
    let doc = if matrix {
        TrainDocument::from_matrix(&alamouti_train(&pair, args.order, scheme)?)
    } else {
        TrainDocument::from_train(&build_train(&pair, args.order, scheme)?)
    };

    let mut manifest = RunManifest::new(
        "generate",
        json!({
            "scheme": doc.scheme,
            "M": args.order,
            "seed_pair": raw.source,
            "length": args.length,
            "expansion": format!("{:?}", args.expansion).to_lowercase(),
        }),
    );
    if let Some((path, bytes)) = &raw.file {
        manifest.record_input(path, bytes);
    }
    let path = manifest.write_output(&cli.out_dir, &args.output, &to_json_bytes(&doc)?)?;
    manifest.finish(&cli.out_dir)?;
    println!(
        "wrote {} ({}, {} pulses, L = {})",
        path.display(),
        doc.scheme,
        doc.pulses.len(),
        doc.pulse_len
    );
    Ok(Outcome::Pass)
}
