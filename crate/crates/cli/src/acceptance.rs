//! The acceptance suite: eleven criteria, each with a runtime budget and
//! expected-vs-measured values side by side.

use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use dopgolay_core::ambiguity::{composite_ambiguity, matrix_ambiguity, suppression_db, taylor_b, taylor_c};
use dopgolay_core::radarsim::{augmented_filter, hypothesis_stats, matched_filter, synthesize};
use dopgolay_core::sequences::{expand_to, prouhet_partition, ExpandMethod};
use dopgolay_core::trains::{alamouti_train, conventional_train, ptm_train};
use dopgolay_core::{
    autocorr, reference, Channel, Complex64, Doppler, GolayPair, LaurentPoly, NoiseSpec, PointTarget, PulseTrain,
    Scattering, Scheme, UnimodularSequence, WaveformMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::compare::reference_floor;

pub const THETAS: [f64; 3] = [0.025, 0.05, 0.075];
const ORACLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct AcceptConfig {
    pub seed_a: UnimodularSequence,
    pub seed_b: UnimodularSequence,
    pub trials: usize,
    pub rng_seed: u64,
    pub variance_tolerance: f64,
}

impl Default for AcceptConfig {
    fn default() -> Self {
        let (a, b) = GolayPair::builtin8().into_parts();
        Self {
            seed_a: a,
            seed_b: b,
            trials: 100_000,
            rng_seed: 2012,
            variance_tolerance: 0.03,
        }
    }
}

/// One expected-vs-measured comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Measurement {
    pub label: String,
    pub expected: String,
    pub measured: String,
}

fn measure(label: impl Into<String>, expected: impl Into<String>, measured: impl Into<String>) -> Measurement {
    Measurement {
        label: label.into(),
        expected: expected.into(),
        measured: measured.into(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    pub detail: String,
    pub runtime_ms: f64,
    pub budget_ms: f64,
}

impl CriterionResult {
    pub fn summary_line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let values: Vec<String> = self
            .measurements
            .iter()
            .map(|m| format!("{}: {} (expected {})", m.label, m.measured, m.expected))
            .collect();
        let mut line = format!("[{tag}] {:>2} {}", self.id, self.name);
        if !values.is_empty() {
            line.push_str(" | ");
            line.push_str(&values.join("; "));
        }
        if !self.detail.is_empty() {
            line.push_str(" | ");
            line.push_str(&self.detail);
        }
        line.push_str(&format!(" [{:.0} ms / {:.0} ms]", self.runtime_ms, self.budget_ms));
        line
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceReport {
    pub version: String,
    pub seed_pair: [String; 2],
    pub trials: usize,
    pub rng_seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub all_passed: bool,
}

struct Outcome {
    passed: bool,
    measurements: Vec<Measurement>,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, measurements: Vec<Measurement>) -> Self {
        Self {
            passed,
            measurements,
            detail: String::new(),
        }
    }
}

fn seed_pair(cfg: &AcceptConfig) -> Result<GolayPair> {
    Ok(GolayPair::new(cfg.seed_a.clone(), cfg.seed_b.clone())?)
}

fn golay_identity(cfg: &AcceptConfig) -> Result<Outcome> {
    let (a, b) = (&cfg.seed_a, &cfg.seed_b);
    ensure!(
        a.len() == b.len(),
        "seed sequences differ in length ({} vs {})",
        a.len(),
        b.len()
    );
    let l = a.len();
    let sum = &autocorr(a) + &autocorr(b);
    let impulse = LaurentPoly::monomial(0, 2 * l as i64);
    let mut passed = sum == impulse;
    let mut ms = vec![measure(
        format!("L={l}"),
        format!("{}·z^0", 2 * l),
        if passed {
            format!("{}·z^0", 2 * l)
        } else {
            "not an impulse".to_string()
        },
    )];
    if passed {
        let pair = seed_pair(cfg)?;
        for target in [2 * l, 4 * l, 8 * l] {
            let mut ok = true;
            for method in [ExpandMethod::Concatenate, ExpandMethod::Interleave] {
                let p = expand_to(&pair, target, method)?;
                let s = &autocorr(p.a()) + &autocorr(p.b());
                ok &= s == LaurentPoly::monomial(0, 2 * target as i64);
            }
            passed &= ok;
            ms.push(measure(
                format!("L={target}"),
                format!("{}·z^0", 2 * target),
                if ok {
                    format!("{}·z^0", 2 * target)
                } else {
                    "not an impulse".to_string()
                },
            ));
        }
    }
    Ok(Outcome::new(passed, ms))
}

fn prouhet(_: &AcceptConfig) -> Result<Outcome> {
    let mut passed = true;
    let mut failures = Vec::new();
    for order in 0..=6 {
        let p = prouhet_partition(order)?;
        for m in 0..=order {
            match p.power_sums(m) {
                Some((s0, s1)) if s0 == s1 => {}
                _ => {
                    passed = false;
                    failures.push(format!("M={order}, m={m}"));
                }
            }
        }
    }
    let measured = if passed {
        "all equal".to_string()
    } else {
        format!("unequal at {}", failures.join(", "))
    };
    Ok(Outcome::new(
        passed,
        vec![measure("power sums m ≤ M, M = 0..6", "equal", measured)],
    ))
}

fn nonzero_off_lag(poly: &LaurentPoly<i64>) -> usize {
    poly.iter().filter(|(lag, v)| *lag != 0 && *v != 0).count()
}

fn c_vanishing(cfg: &AcceptConfig) -> Result<Outcome> {
    let pair = seed_pair(cfg)?;
    let l = pair.len();
    let ptm = ptm_train(&pair, 3)?;
    let off_lags = 2 * (l - 1);
    let mut passed = true;
    let mut ms = Vec::new();
    for m in 1..=3 {
        let c = taylor_c(&ptm, m)?;
        let n = nonzero_off_lag(&c.poly);
        passed &= c.vanishes_off_zero();
        ms.push(measure(
            format!("PTM C{m} nonzero off-lag"),
            format!("0/{off_lags}"),
            format!("{n}/{off_lags}"),
        ));
    }
    let conv = taylor_c(&conventional_train(&pair, 3)?, 1)?;
    let n = nonzero_off_lag(&conv.poly);
    passed &= n > 0;
    ms.push(measure(
        "conventional C1 nonzero off-lag",
        "> 0",
        format!("{n}/{off_lags}"),
    ));
    Ok(Outcome::new(passed, ms))
}

fn b_vanishing(cfg: &AcceptConfig) -> Result<Outcome> {
    let pair = seed_pair(cfg)?;
    let lags = 2 * pair.len() - 1;
    let wm = alamouti_train(&pair, 3, Scheme::Ptm)?;
    let mut passed = true;
    let mut ms = Vec::new();
    for m in 1..=3 {
        let b = taylor_b(&wm, m)?;
        let n = b.poly.iter().filter(|(_, v)| *v != 0).count();
        passed &= b.is_zero();
        ms.push(measure(
            format!("PTM B{m} nonzero"),
            format!("0/{lags}"),
            format!("{n}/{lags}"),
        ));
    }
    let conv = taylor_b(&alamouti_train(&pair, 3, Scheme::Conventional)?, 1)?;
    let n = conv.poly.iter().filter(|(_, v)| *v != 0).count();
    passed &= !conv.is_zero();
    ms.push(measure("conventional B1 nonzero", "> 0", format!("{n}/{lags}")));
    Ok(Outcome::new(passed, ms))
}

fn zero_doppler(cfg: &AcceptConfig) -> Result<Outcome> {
    let pair = seed_pair(cfg)?;
    let mut passed = true;
    let mut ms = Vec::new();
    for scheme in [Scheme::Ptm, Scheme::Conventional] {
        let wm = alamouti_train(&pair, 3, scheme)?;
        let nl = (wm.num_columns() * pair.len()) as f64;
        let g = matrix_ambiguity(&wm, Doppler::ZERO);
        let diag = LaurentPoly::constant(Complex64::new(nl, 0.0));
        let ok = g.entry(0, 0) == &diag && g.entry(1, 1) == &diag && g.entry(0, 1).is_zero() && g.entry(1, 0).is_zero();
        passed &= ok;
        ms.push(measure(
            format!("{scheme} G(z,0)"),
            format!("{nl}·I"),
            if ok {
                format!("{nl}·I")
            } else {
                "not NL·I".to_string()
            },
        ));
    }
    Ok(Outcome::new(passed, ms))
}

fn suppression(cfg: &AcceptConfig, channel: Channel) -> Result<Outcome> {
    let pair = seed_pair(cfg)?;
    let mut passed = true;
    let mut ms = Vec::new();
    let (rt, bt, rm, bm);
    let (resilient, baseline) = if channel == Channel::Offdiag {
        rm = alamouti_train(&pair, 3, Scheme::Ptm)?;
        bm = alamouti_train(&pair, 3, Scheme::Conventional)?;
        ((&rm).into(), (&bm).into())
    } else {
        rt = ptm_train(&pair, 3)?;
        bt = conventional_train(&pair, 3)?;
        ((&rt).into(), (&bt).into())
    };
    for theta in THETAS {
        let db = suppression_db(resilient, baseline, Doppler::new(theta)?, channel)?;
        let floor = reference_floor(channel, theta).unwrap_or(f64::INFINITY);
        passed &= db >= floor;
        ms.push(measure(
            format!("θ={theta}"),
            format!("≥ {floor} dB"),
            format!("{db:.2} dB"),
        ));
    }
    Ok(Outcome::new(passed, ms))
}

/// Golay pairs of length ≤ 16 reachable from the length-1, 2, 8 and 10 kernels.
fn random_pair(rng: &mut ChaCha8Rng) -> Result<GolayPair> {
    let kernels: [(&str, &str); 4] = [
        ("+", "+"),
        ("++", "+-"),
        ("++-++++-", "--+-+++-"),
        ("++-+-+--++", "++-+++++--"),
    ];
    let (a, b) = kernels[rng.random_range(0..kernels.len())];
    let mut pair = GolayPair::new(a.parse()?, b.parse()?)?;
    while pair.len() * 2 <= 16 && rng.random_bool(0.6) {
        let method = if rng.random_bool(0.5) {
            ExpandMethod::Concatenate
        } else {
            ExpandMethod::Interleave
        };
        pair = expand_to(&pair, pair.len() * 2, method)?;
    }
    let (mut a, mut b) = pair.into_parts();
    if rng.random_bool(0.5) {
        a = a.negate();
    }
    if rng.random_bool(0.5) {
        b = b.reverse_conjugate();
    }
    if rng.random_bool(0.5) {
        std::mem::swap(&mut a, &mut b);
    }
    Ok(GolayPair::new(a, b)?)
}

fn oracle(cfg: &AcceptConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..25 {
        let pair = random_pair(&mut rng)?;
        let order = rng.random_range(0..=3u32);
        let scheme = if rng.random_bool(0.5) {
            Scheme::Ptm
        } else {
            Scheme::Conventional
        };
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let doppler = Doppler::new(theta)?;
        let train: PulseTrain = match scheme {
            Scheme::Ptm => ptm_train(&pair, order)?,
            _ => conventional_train(&pair, order)?,
        };
        let l = pair.len() as i64;
        let g = composite_ambiguity(&train, doppler);
        let wm = WaveformMatrix::from_train(train.clone());
        let gm = matrix_ambiguity(&wm, doppler);
        for k in -l..=l {
            let d = g.coefficient(k) - reference::composite_at(train.pulses(), theta, k);
            worst = worst.max(d.norm());
            for i in 0..2 {
                for j in 0..2 {
                    let d = gm.entry(i, j).coefficient(k) - reference::matrix_entry_at(train.pulses(), theta, i, j, k);
                    worst = worst.max(d.norm());
                }
            }
        }
        cases += 1;
    }
    let mut out = Outcome::new(
        worst <= ORACLE_TOL,
        vec![measure(
            format!("max |Δ| over {cases} cases"),
            format!("≤ {ORACLE_TOL:e}"),
            format!("{worst:e}"),
        )],
    );
    out.detail = format!("rng seed {}", cfg.rng_seed);
    Ok(out)
}

fn matched_filter_identity(cfg: &AcceptConfig) -> Result<Outcome> {
    let pair = seed_pair(cfg)?;
    let train = ptm_train(&pair, 3)?;
    let nl = (train.num_pulses() * train.pulse_len()) as f64;
    let target = PointTarget::scalar(0, Doppler::ZERO, Complex64::new(1.0, 0.0));
    let u = matched_filter(&synthesize(&train, &target, &NoiseSpec::noiseless())?, &train)?;
    let worst = u
        .iter()
        .map(|(k, v)| (v - Complex64::new(if k == 0 { nl } else { 0.0 }, 0.0)).norm())
        .fold(0.0, f64::max);
    Ok(Outcome::new(
        worst <= ORACLE_TOL,
        vec![
            measure("u[0]", format!("{nl}"), format!("{}", u.at(0).re)),
            measure("max |u[k] − NL·δ|", format!("≤ {ORACLE_TOL:e}"), format!("{worst:e}")),
        ],
    ))
}

fn variances(cfg: &AcceptConfig) -> Result<Outcome> {
    let pair = seed_pair(cfg)?;
    let train = ptm_train(&pair, 3)?;
    let (n, l) = (train.num_pulses() as f64, train.pulse_len() as f64);
    let h0 = hypothesis_stats(cfg.trials, &train, None, &NoiseSpec::new(1.0, cfg.rng_seed)?)?;
    let random = PointTarget {
        delay: 0,
        doppler: Doppler::ZERO,
        scattering: Scattering::Random { sigma_h: 1.0 },
    };
    let noise1 = NoiseSpec::new(1.0, cfg.rng_seed.wrapping_add(1))?;
    let h1 = hypothesis_stats(cfg.trials, &train, Some(&random), &noise1)?;
    let model0 = 2.0 * n * l;
    let model1 = 2.0 * n * n * l * l + 2.0 * n * l;
    let e0 = (h0.variance - model0).abs() / model0;
    let e1 = (h1.variance - model1).abs() / model1;
    let tol = cfg.variance_tolerance;
    let mut out = Outcome::new(
        e0 <= tol && e1 <= tol,
        vec![
            measure(
                "H0 variance",
                format!("{model0}"),
                format!("{:.2} ({:.2}%)", h0.variance, 100.0 * e0),
            ),
            measure(
                "H1 variance",
                format!("{model1}"),
                format!("{:.2} ({:.2}%)", h1.variance, 100.0 * e1),
            ),
        ],
    );
    out.detail = format!("{} trials, tolerance {}%", cfg.trials, 100.0 * tol);
    Ok(out)
}

fn augmented(cfg: &AcceptConfig) -> Result<Outcome> {
    let pair = seed_pair(cfg)?;
    let train = ptm_train(&pair, 1)?;
    let l = train.pulse_len() as i64;
    let d = 2 * l;
    let target = PointTarget::scalar(0, Doppler::ZERO, Complex64::new(1.0, 0.0));
    let r = synthesize(&train, &target, &NoiseSpec::noiseless())?;
    let u = augmented_filter(&r, &train, d as usize)?;
    let (mut outside, mut stray) = (0usize, Vec::new());
    for (k, v) in u.iter() {
        if k.abs() < l || v.norm() <= 1e-9 {
            continue;
        }
        outside += 1;
        let m = (k as f64 / d as f64).round() as i64;
        if m == 0 || (k - m * d).abs() > l - 1 {
            stray.push(k);
        }
    }
    let mut out = Outcome::new(
        stray.is_empty() && outside > 0,
        vec![measure(
            format!("sidelobes outside |k| < {l}"),
            format!("within {} of ±mD, D={d}", l - 1),
            format!("{outside} nonzero, {} stray", stray.len()),
        )],
    );
    if !stray.is_empty() {
        out.detail = format!("stray lags {stray:?}");
    }
    Ok(out)
}

type CriterionFn = fn(&AcceptConfig) -> Result<Outcome>;

const CRITERIA: [(u8, &str, CriterionFn, u64); 11] = [
    (1, "Golay identity", golay_identity, 1_000),
    (2, "Prouhet power sums", prouhet, 1_000),
    (3, "C_m vanishing off lag 0", c_vanishing, 1_000),
    (4, "B_m vanishing", b_vanishing, 1_000),
    (5, "zero-Doppler matrix ambiguity", zero_doppler, 1_000),
    (
        6,
        "single-channel suppression",
        |c| suppression(c, Channel::Single),
        1_000,
    ),
    (
        7,
        "off-diagonal suppression",
        |c| suppression(c, Channel::Offdiag),
        1_000,
    ),
    (8, "brute-force oracle agreement", oracle, 5_000),
    (9, "matched-filter identity", matched_filter_identity, 1_000),
    (10, "hypothesis-test variances", variances, 30_000),
    (11, "augmented-filter sidelobe structure", augmented, 1_000),
];

pub fn run_criterion(cfg: &AcceptConfig, id: u8) -> Option<CriterionResult> {
    let (id, name, f, budget) = *CRITERIA.iter().find(|c| c.0 == id)?;
    let budget = Duration::from_millis(budget);
    let start = Instant::now();
    let result = f(cfg);
    let elapsed = start.elapsed();
    let (mut passed, measurements, mut detail) = match result {
        Ok(o) => (o.passed, o.measurements, o.detail),
        Err(e) => (false, Vec::new(), format!("error: {e:#}")),
    };
    if elapsed > budget {
        passed = false;
        if !detail.is_empty() {
            detail.push_str("; ");
        }
        detail.push_str("over runtime budget");
    }
    Some(CriterionResult {
        id,
        name,
        passed,
        measurements,
        detail,
        runtime_ms: elapsed.as_secs_f64() * 1e3,
        budget_ms: budget.as_secs_f64() * 1e3,
    })
}

pub fn run_criteria(cfg: &AcceptConfig) -> AcceptanceReport {
    let criteria: Vec<CriterionResult> = CRITERIA.iter().filter_map(|c| run_criterion(cfg, c.0)).collect();
    AcceptanceReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed_pair: [cfg.seed_a.to_sign_string(), cfg.seed_b.to_sign_string()],
        trials: cfg.trials,
        rng_seed: cfg.rng_seed,
        all_passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}
