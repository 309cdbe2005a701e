//! Point-target returns and the receivers that process them.
//!
//! The measurement model is per-PRI: pulse `n` comes back scaled by the
//! scattering coefficient, delayed by `d0` chips, and rotated by the Doppler
//! phase `e^{jnθ}` (constant over the pulse), plus proper complex white
//! Gaussian noise of variance `2σ_w²`.
//!
//! Noise comes from ChaCha8 (`rand_chacha`), a counter-based generator whose
//! output is fixed by its algorithm, so a seed reproduces the same samples on
//! every platform. A single synthesis uses stream 0 of the seed; Monte-Carlo
//! trial `t` uses stream `t + 1`, so trials are independent of evaluation
//! order and can run in parallel.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambiguity::Doppler;
use crate::error::{dimension_mismatch, invalid_argument, Result};
use crate::laurent::LaurentPoly;
use crate::trains::{PulseTrain, WaveformMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Target scattering: a fixed coefficient, a fixed 2×2 polarimetric matrix
/// `[[h_VV, h_VH], [h_HV, h_HH]]`, or a coefficient drawn per realization from
/// a proper complex normal with variance `2σ_h²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scattering {
    Scalar(Complex64),
    Matrix([[Complex64; 2]; 2]),
    Random { sigma_h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointTarget {
    /// Range delay `d0` in chips.
    pub delay: usize,
    pub doppler: Doppler,
    pub scattering: Scattering,
}

impl PointTarget {
    pub fn scalar(delay: usize, doppler: Doppler, h: Complex64) -> Self {
        Self {
            delay,
            doppler,
            scattering: Scattering::Scalar(h),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Per-component standard deviation; complex variance is `2σ_w²`.
    pub sigma_w: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma_w: f64, seed: u64) -> Result<Self> {
        if !sigma_w.is_finite() || sigma_w < 0.0 {
            return Err(invalid_argument(format!(
                "sigma_w must be finite and ≥ 0, got {sigma_w}"
            )));
        }
        Ok(Self { sigma_w, seed })
    }

    pub fn noiseless() -> Self {
        Self { sigma_w: 0.0, seed: 0 }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Received samples `data[channel][pri][i]` at absolute chip index `start + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSet {
    start: i64,
    window: usize,
    data: Vec<Vec<Vec<Complex64>>>,
}

impl ReturnSet {
    pub fn new(start: i64, window: usize, data: Vec<Vec<Vec<Complex64>>>) -> Result<Self> {
        if data.is_empty() || data.iter().any(|c| c.is_empty()) {
            return Err(invalid_argument("a return set needs at least one channel and PRI"));
        }
        let pris = data[0].len();
        for ch in &data {
            if ch.len() != pris || ch.iter().any(|r| r.len() != window) {
                return Err(dimension_mismatch("inconsistent channel, PRI, or window sizes"));
            }
        }
        Ok(Self { start, window, data })
    }

    /// Absolute chip index of the first sample.
    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn channels(&self) -> usize {
        self.data.len()
    }

    pub fn pris(&self) -> usize {
        self.data[0].len()
    }

    pub fn samples(&self, channel: usize, pri: usize) -> &[Complex64] {
        &self.data[channel][pri]
    }

    /// Sample at absolute chip index `t`, zero outside the window.
    pub fn at(&self, channel: usize, pri: usize, t: i64) -> Complex64 {
        let i = t - self.start;
        if i < 0 {
            return ZERO;
        }
        self.data[channel][pri].get(i as usize).copied().unwrap_or(ZERO)
    }
}

/// Complex values indexed by lag, `values[i]` at lag `min_lag + i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagSeries {
    pub min_lag: i64,
    pub values: Vec<Complex64>,
}

impl LagSeries {
    pub fn at(&self, lag: i64) -> Complex64 {
        let i = lag - self.min_lag;
        if i < 0 {
            return ZERO;
        }
        self.values.get(i as usize).copied().unwrap_or(ZERO)
    }

    pub fn max_lag(&self) -> i64 {
        self.min_lag + self.values.len() as i64 - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.min_lag + i as i64, *v))
    }
}

/// 2×2 receiver output `U(z)`, each entry a lag series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixLagOutput {
    pub entries: [[LagSeries; 2]; 2],
}

fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sigma * re, sigma * im)
}

fn add_noise(data: &mut [Vec<Vec<Complex64>>], sigma_w: f64, rng: &mut ChaCha8Rng) {
    if sigma_w == 0.0 {
        return;
    }
    for channel in data.iter_mut() {
        for pri in channel.iter_mut() {
            for s in pri.iter_mut() {
                *s += gaussian(rng, sigma_w);
            }
        }
    }
}

fn synthesize_single(
    train: &PulseTrain,
    target: &PointTarget,
    sigma_w: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ReturnSet> {
    let h = match target.scattering {
        Scattering::Scalar(h) => h,
        Scattering::Random { sigma_h } => gaussian(rng, sigma_h),
        Scattering::Matrix(_) => return Err(invalid_argument("matrix scattering needs an Alamouti waveform matrix")),
    };
    let window = train.pulse_len() + target.delay;
    let mut data = vec![Vec::with_capacity(train.num_pulses())];
    for (n, pulse) in train.pulses().iter().enumerate() {
        let gain = h * target.doppler.phase(n);
        let mut r = vec![ZERO; window];
        for (l, chip) in pulse.values().iter().enumerate() {
            r[l + target.delay] = gain * f64::from(*chip);
        }
        data[0].push(r);
    }
    add_noise(&mut data, sigma_w, rng);
    Ok(ReturnSet { start: 0, window, data })
}

/// `r_n = h·e^{jnθ}·z^{-d0} X_n(z) + w_n`, samples `0 .. L + d0`.
pub fn synthesize(train: &PulseTrain, target: &PointTarget, noise: &NoiseSpec) -> Result<ReturnSet> {
    synthesize_single(train, target, noise.sigma_w, &mut noise.rng(0))
}

/// `R(z) = H X(z) D(θ) z^{-d0} + W(z)` for the two polarization channels.
///
/// The Alamouti entries `-X~_2k+1` and `X~_2k` are anti-causal, so the window
/// starts at chip `-(L-1)` and spans `2L - 1 + d0` samples. A scalar
/// scattering coefficient `h` acts as `h·I`.
pub fn synthesize_polarimetric(wm: &WaveformMatrix, target: &PointTarget, noise: &NoiseSpec) -> Result<ReturnSet> {
    let h = match target.scattering {
        Scattering::Matrix(h) => h,
        Scattering::Scalar(h) => [[h, ZERO], [ZERO, h]],
        Scattering::Random { .. } => {
            return Err(invalid_argument(
                "random scattering is only modelled for single-channel trains",
            ))
        }
    };
    let l = wm.train().pulse_len() as i64;
    let start = -(l - 1);
    let window = (2 * l - 1) as usize + target.delay;
    let d0 = target.delay as i64;
    let mut data = vec![vec![vec![ZERO; window]; wm.num_columns()]; 2];
    for (row_h, channel) in h.iter().zip(data.iter_mut()) {
        for (col, out) in channel.iter_mut().enumerate() {
            let phase = target.doppler.phase(col);
            let column = [wm.entry(0, col), wm.entry(1, col)];
            for (j, entry) in column.iter().enumerate() {
                let gain = row_h[j] * phase;
                for (lag, c) in entry.iter() {
                    out[(lag + d0 - start) as usize] += gain * c as f64;
                }
            }
        }
    }
    add_noise(&mut data, noise.sigma_w, &mut noise.rng(0));
    Ok(ReturnSet { start, window, data })
}

fn check_single(returns: &ReturnSet, train: &PulseTrain) -> Result<()> {
    if returns.channels() != 1 {
        return Err(dimension_mismatch(format!(
            "expected a single-channel return set, got {} channels",
            returns.channels()
        )));
    }
    if returns.pris() != train.num_pulses() {
        return Err(dimension_mismatch(format!(
            "{} PRIs received for a {}-pulse train",
            returns.pris(),
            train.num_pulses()
        )));
    }
    Ok(())
}

/// `u[k] = Σ_n xcorr_k(r_n, x_n)` at a single lag.
pub fn matched_filter_at(returns: &ReturnSet, train: &PulseTrain, lag: i64) -> Result<Complex64> {
    check_single(returns, train)?;
    Ok(correlate_at(returns, train, lag))
}

fn correlate_at(returns: &ReturnSet, train: &PulseTrain, lag: i64) -> Complex64 {
    let mut acc = ZERO;
    for (n, pulse) in train.pulses().iter().enumerate() {
        for (l, chip) in pulse.values().iter().enumerate() {
            acc += returns.at(0, n, l as i64 + lag) * f64::from(*chip);
        }
    }
    acc
}

/// Per-PRI matched filter: each return is correlated with its own pulse and
/// the outputs are summed. Covers every lag with any overlap.
pub fn matched_filter(returns: &ReturnSet, train: &PulseTrain) -> Result<LagSeries> {
    check_single(returns, train)?;
    let l = train.pulse_len() as i64;
    let lo = returns.start - (l - 1);
    let hi = returns.start + returns.window as i64 - 1;
    Ok(LagSeries {
        min_lag: lo,
        values: (lo..=hi).map(|k| correlate_at(returns, train, k)).collect(),
    })
}

/// Correlates the augmented return `Σ_n r_n[k - nD]` with the augmented
/// waveform `Σ_n x_n[k - nD]`. Cross terms between different pulses land near
/// nonzero multiples of `D`.
pub fn augmented_filter(returns: &ReturnSet, train: &PulseTrain, pri_spacing: usize) -> Result<LagSeries> {
    check_single(returns, train)?;
    let l = train.pulse_len();
    if pri_spacing < l {
        return Err(invalid_argument(format!(
            "PRI spacing {pri_spacing} is shorter than the pulse length {l}"
        )));
    }
    let n = train.num_pulses();
    let span_x = (n - 1) * pri_spacing + l;
    let mut xa = vec![0.0f64; span_x];
    for (i, pulse) in train.pulses().iter().enumerate() {
        for (j, chip) in pulse.values().iter().enumerate() {
            xa[i * pri_spacing + j] += f64::from(*chip);
        }
    }
    let span_r = (n - 1) * pri_spacing + returns.window;
    let mut ra = vec![ZERO; span_r];
    for i in 0..n {
        for (j, s) in returns.samples(0, i).iter().enumerate() {
            ra[i * pri_spacing + j] += *s;
        }
    }
    // ra[idx] sits at absolute chip start + idx
    let lo = returns.start - (span_x as i64 - 1);
    let hi = returns.start + span_r as i64 - 1;
    let values = (lo..=hi)
        .map(|k| {
            let mut acc = ZERO;
            for (t, x) in xa.iter().enumerate() {
                if *x == 0.0 {
                    continue;
                }
                let idx = t as i64 + k - returns.start;
                if idx >= 0 && (idx as usize) < span_r {
                    acc += ra[idx as usize] * *x;
                }
            }
            acc
        })
        .collect();
    Ok(LagSeries { min_lag: lo, values })
}

/// Alamouti receiver `U(z) = R(z) D^H(θ̂) X~(z)`. With `θ̂ = 0` this is the
/// plain receiver matrix, and the noiseless output is `H·G(z, θ)`.
pub fn alamouti_receive(
    returns: &ReturnSet,
    wm: &WaveformMatrix,
    theta_hypothesis: Doppler,
) -> Result<MatrixLagOutput> {
    if returns.channels() != 2 {
        return Err(dimension_mismatch(format!(
            "the Alamouti receiver needs two channels, got {}",
            returns.channels()
        )));
    }
    if returns.pris() != wm.num_columns() {
        return Err(dimension_mismatch(format!(
            "{} PRIs received for a {}-column waveform matrix",
            returns.pris(),
            wm.num_columns()
        )));
    }
    let l = wm.train().pulse_len() as i64;
    let lo = returns.start - (l - 1);
    let hi = returns.start + returns.window as i64 - 1 + (l - 1);
    let mut acc: [[LaurentPoly<Complex64>; 2]; 2] = Default::default();
    for col in 0..wm.num_columns() {
        let derotate = theta_hypothesis.phase(col).conj();
        let filters = [
            wm.entry(0, col).tilde().to_complex(),
            wm.entry(1, col).tilde().to_complex(),
        ];
        for (i, row) in acc.iter_mut().enumerate() {
            let r = LaurentPoly::new(returns.start, returns.samples(i, col).to_vec()).scale(derotate);
            for (j, slot) in row.iter_mut().enumerate() {
                *slot += &(&r * &filters[j]);
            }
        }
    }
    let series = |p: &LaurentPoly<Complex64>| LagSeries {
        min_lag: lo,
        values: p.dense(lo, hi),
    };
    Ok(MatrixLagOutput {
        entries: [
            [series(&acc[0][0]), series(&acc[0][1])],
            [series(&acc[1][0]), series(&acc[1][1])],
        ],
    })
}

/// Monte-Carlo estimate of the matched-filter output at the target lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisStats {
    pub trials: usize,
    pub mean: Complex64,
    /// Unbiased complex variance `Σ|u - ū|² / (T - 1)`.
    pub variance: f64,
    /// Model variance `2σ_h²|G_0(θ)|² + 2NLσ_w²`.
    pub expected_variance: f64,
}

impl HypothesisStats {
    pub fn relative_error(&self) -> f64 {
        if self.expected_variance == 0.0 {
            return if self.variance == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (self.variance - self.expected_variance).abs() / self.expected_variance
    }
}

/// Model variance of `u[d0]`: noise contributes `NL·2σ_w²`; a random target
/// adds `2σ_h²|Σ_n e^{jnθ} L|²`. Fixed scattering contributes none.
pub fn expected_variance(train: &PulseTrain, target: Option<&PointTarget>, noise: &NoiseSpec) -> f64 {
    let nl = (train.num_pulses() * train.pulse_len()) as f64;
    let noise_var = nl * 2.0 * noise.sigma_w * noise.sigma_w;
    let signal_var = match target {
        Some(PointTarget {
            doppler,
            scattering: Scattering::Random { sigma_h },
            ..
        }) => {
            let gain: Complex64 = (0..train.num_pulses())
                .map(|n| doppler.phase(n) * train.pulse_len() as f64)
                .sum();
            2.0 * sigma_h * sigma_h * gain.norm_sqr()
        }
        _ => 0.0,
    };
    signal_var + noise_var
}

/// Runs `trials` independent realizations and reports the sample mean and
/// variance of `u[d0]`. `target = None` is the noise-only hypothesis.
pub fn hypothesis_stats(
    trials: usize,
    train: &PulseTrain,
    target: Option<&PointTarget>,
    noise: &NoiseSpec,
) -> Result<HypothesisStats> {
    if trials == 0 {
        return Err(invalid_argument("hypothesis_stats needs at least one trial"));
    }
    let null = PointTarget::scalar(0, Doppler::ZERO, ZERO);
    let tgt = target.copied().unwrap_or(null);
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = noise.rng(t as u64 + 1);
            let returns = synthesize_single(train, &tgt, noise.sigma_w, &mut rng)?;
            Ok(correlate_at(&returns, train, tgt.delay as i64))
        })
        .collect::<Result<Vec<Complex64>>>()?;
    let mean = samples.iter().sum::<Complex64>() / trials as f64;
    let variance = if trials > 1 {
        samples.iter().map(|u| (u - mean).norm_sqr()).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    Ok(HypothesisStats {
        trials,
        mean,
        variance,
        expected_variance: expected_variance(train, target, noise),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::{composite_ambiguity, matrix_ambiguity};
    use crate::sequences::GolayPair;
    use crate::trains::{alamouti_train, conventional_train, ptm_train, Scheme};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn th(t: f64) -> Doppler {
        Doppler::new(t).unwrap()
    }

    #[test]
    fn noiseless_zero_doppler_returns_are_the_pulses() {
        let t = ptm_train(&GolayPair::builtin8(), 3).unwrap();
        let r = synthesize(
            &t,
            &PointTarget::scalar(0, Doppler::ZERO, c(1.0, 0.0)),
            &NoiseSpec::noiseless(),
        )
        .unwrap();
        for (n, p) in t.pulses().iter().enumerate() {
            let expect: Vec<Complex64> = p.values().iter().map(|v| c(f64::from(*v), 0.0)).collect();
            assert_eq!(r.samples(0, n), &expect[..]);
        }
    }

    #[test]
    fn doppler_rotates_each_pri() {
        let t = ptm_train(&GolayPair::builtin8(), 3).unwrap();
        let r = synthesize(
            &t,
            &PointTarget::scalar(0, th(0.05), c(1.0, 0.0)),
            &NoiseSpec::noiseless(),
        )
        .unwrap();
        for (n, p) in t.pulses().iter().enumerate() {
            for (l, v) in p.values().iter().enumerate() {
                let expect = Complex64::from_polar(1.0, 0.05 * n as f64) * f64::from(*v);
                assert!((r.samples(0, n)[l] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let t = conventional_train(&GolayPair::builtin8(), 2).unwrap();
        let tgt = PointTarget::scalar(2, th(0.01), c(0.5, -0.5));
        let noise = NoiseSpec::new(1.0, 1234).unwrap();
        let a = synthesize(&t, &tgt, &noise).unwrap();
        let b = synthesize(&t, &tgt, &noise).unwrap();
        assert_eq!(a, b);
        let bits = |r: &ReturnSet| -> Vec<u64> {
            r.samples(0, 3)
                .iter()
                .flat_map(|s| [s.re.to_bits(), s.im.to_bits()])
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
        let other = synthesize(&t, &tgt, &NoiseSpec::new(1.0, 1235).unwrap()).unwrap();
        assert_ne!(a, other);
        assert!(NoiseSpec::new(-1.0, 0).is_err());
        assert!(NoiseSpec::new(f64::NAN, 0).is_err());
    }

    #[test]
    fn matrix_scattering_rejected_for_single_channel() {
        let t = ptm_train(&GolayPair::builtin8(), 1).unwrap();
        let tgt = PointTarget {
            delay: 0,
            doppler: Doppler::ZERO,
            scattering: Scattering::Matrix([[c(1.0, 0.0), ZERO], [ZERO, c(1.0, 0.0)]]),
        };
        assert!(synthesize(&t, &tgt, &NoiseSpec::noiseless()).is_err());
    }

    #[test]
    fn model_is_linear_in_h() {
        let t = ptm_train(&GolayPair::builtin8(), 2).unwrap();
        let (a, b) = (c(0.3, -1.2), c(-2.0, 0.7));
        let synth = |h| synthesize(&t, &PointTarget::scalar(1, th(0.2), h), &NoiseSpec::noiseless()).unwrap();
        let (ra, rb, rab) = (synth(a), synth(b), synth(a + b));
        for n in 0..t.num_pulses() {
            for i in 0..rab.window() {
                let d = rab.samples(0, n)[i] - ra.samples(0, n)[i] - rb.samples(0, n)[i];
                assert!(d.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matched_filter_zero_doppler_impulse() {
        let t = ptm_train(&GolayPair::builtin8(), 3).unwrap();
        let r = synthesize(
            &t,
            &PointTarget::scalar(0, Doppler::ZERO, c(1.0, 0.0)),
            &NoiseSpec::noiseless(),
        )
        .unwrap();
        let u = matched_filter(&r, &t).unwrap();
        assert_eq!(u.min_lag, -7);
        assert_eq!(u.max_lag(), 7);
        for (k, v) in u.iter() {
            let expect = if k == 0 { 128.0 } else { 0.0 };
            assert!((v - c(expect, 0.0)).norm() < 1e-12, "lag {k}");
        }
    }

    #[test]
    fn matched_filter_follows_delay() {
        let t = conventional_train(&GolayPair::builtin8(), 3).unwrap();
        let r = synthesize(
            &t,
            &PointTarget::scalar(3, Doppler::ZERO, c(1.0, 0.0)),
            &NoiseSpec::noiseless(),
        )
        .unwrap();
        let u = matched_filter(&r, &t).unwrap();
        for (k, v) in u.iter() {
            let expect = if k == 3 { 128.0 } else { 0.0 };
            assert!((v - c(expect, 0.0)).norm() < 1e-12, "lag {k}");
        }
    }

    #[test]
    fn matched_filter_equals_composite_ambiguity() {
        let seed = GolayPair::builtin8();
        for t in [ptm_train(&seed, 3).unwrap(), conventional_train(&seed, 3).unwrap()] {
            for theta in [0.0, 0.05, 0.3] {
                let r = synthesize(
                    &t,
                    &PointTarget::scalar(0, th(theta), c(1.0, 0.0)),
                    &NoiseSpec::noiseless(),
                )
                .unwrap();
                let u = matched_filter(&r, &t).unwrap();
                let g = composite_ambiguity(&t, th(theta));
                for (k, v) in u.iter() {
                    assert!((v - g.coefficient(k)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn matched_filter_dimension_checks() {
        let seed = GolayPair::builtin8();
        let t3 = ptm_train(&seed, 3).unwrap();
        let t2 = ptm_train(&seed, 2).unwrap();
        let r = synthesize(
            &t2,
            &PointTarget::scalar(0, Doppler::ZERO, c(1.0, 0.0)),
            &NoiseSpec::noiseless(),
        )
        .unwrap();
        assert!(matched_filter(&r, &t3).is_err());
        let wm = alamouti_train(&seed, 2, Scheme::Ptm).unwrap();
        let rp = synthesize_polarimetric(
            &wm,
            &PointTarget::scalar(0, Doppler::ZERO, c(1.0, 0.0)),
            &NoiseSpec::noiseless(),
        )
        .unwrap();
        assert!(matched_filter(&rp, &t2).is_err());
        assert!(alamouti_receive(&r, &wm, Doppler::ZERO).is_err());
    }

    #[test]
    fn augmented_filter_structure() {
        let t = ptm_train(&GolayPair::builtin8(), 1).unwrap();
        let r = synthesize(
            &t,
            &PointTarget::scalar(0, Doppler::ZERO, c(1.0, 0.0)),
            &NoiseSpec::noiseless(),
        )
        .unwrap();
        let ua = augmented_filter(&r, &t, 16).unwrap();
        let u = matched_filter(&r, &t).unwrap();
        assert!((ua.at(0) - c(32.0, 0.0)).norm() < 1e-12);
        assert!((ua.at(0) - u.at(0)).norm() < 1e-12);
        let (l, d) = (8i64, 16i64);
        let mut cross_peaks = 0;
        for (k, v) in ua.iter() {
            if v.norm() < 1e-12 || k.abs() < l {
                continue;
            }
            let m = (k as f64 / d as f64).round() as i64;
            assert!(m != 0 && (k - m * d).abs() < l, "stray energy at lag {k}");
            cross_peaks += 1;
        }
        assert!(cross_peaks > 0);
        for m in [-1i64, 1] {
            let near = (m * d - (l - 1)..=m * d + (l - 1))
                .map(|k| ua.at(k).norm())
                .fold(0.0, f64::max);
            assert!(near > 0.0);
        }
        assert!(augmented_filter(&r, &t, 7).is_err());
    }

    #[test]
    fn alamouti_receiver_identity() {
        let seed = GolayPair::builtin8();
        let wm = alamouti_train(&seed, 3, Scheme::Ptm).unwrap();
        let h = [[c(0.5, 1.0), c(-0.25, 0.0)], [c(0.0, 2.0), c(1.5, -0.5)]];
        for hm in [[[c(1.0, 0.0), ZERO], [ZERO, c(1.0, 0.0)]], h] {
            let tgt = PointTarget {
                delay: 0,
                doppler: Doppler::ZERO,
                scattering: Scattering::Matrix(hm),
            };
            let r = synthesize_polarimetric(&wm, &tgt, &NoiseSpec::noiseless()).unwrap();
            let u = alamouti_receive(&r, &wm, Doppler::ZERO).unwrap();
            for (i, row) in u.entries.iter().enumerate() {
                for (j, entry) in row.iter().enumerate() {
                    for (k, v) in entry.iter() {
                        let expect = if k == 0 { hm[i][j] * 128.0 } else { ZERO };
                        assert!((v - expect).norm() < 1e-12, "({i},{j}) lag {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn alamouti_receiver_matches_matrix_ambiguity() {
        let seed = GolayPair::builtin8();
        let tgt = PointTarget::scalar(2, th(0.05), c(1.0, 0.0));
        let mut peaks = Vec::new();
        for scheme in [Scheme::Ptm, Scheme::Conventional] {
            let wm = alamouti_train(&seed, 3, scheme).unwrap();
            let r = synthesize_polarimetric(&wm, &tgt, &NoiseSpec::noiseless()).unwrap();
            let u = alamouti_receive(&r, &wm, Doppler::ZERO).unwrap();
            let g = matrix_ambiguity(&wm, th(0.05));
            for i in 0..2 {
                for j in 0..2 {
                    for k in -7..=7 {
                        let d = u.entries[i][j].at(k + 2) - g.entry(i, j).coefficient(k);
                        assert!(d.norm() < 1e-12);
                    }
                }
            }
            peaks.push(u.entries[0][1].iter().map(|(_, v)| v.norm()).fold(0.0, f64::max));
        }
        assert!(peaks[1] > 100.0 * peaks[0]);
    }

    #[test]
    fn doppler_hypothesis_compensates() {
        let wm = alamouti_train(&GolayPair::builtin8(), 2, Scheme::Conventional).unwrap();
        let tgt = PointTarget::scalar(0, th(0.3), c(1.0, 0.0));
        let r = synthesize_polarimetric(&wm, &tgt, &NoiseSpec::noiseless()).unwrap();
        let u = alamouti_receive(&r, &wm, th(0.3)).unwrap();
        for (k, v) in u.entries[0][0].iter() {
            let expect = if k == 0 { 64.0 } else { 0.0 };
            assert!((v - c(expect, 0.0)).norm() < 1e-12);
        }
        assert!(u.entries[0][1].iter().all(|(_, v)| v.norm() < 1e-12));
    }

    #[test]
    fn null_hypothesis_without_noise_has_zero_variance() {
        let t = ptm_train(&GolayPair::builtin8(), 3).unwrap();
        let s = hypothesis_stats(100, &t, None, &NoiseSpec::noiseless()).unwrap();
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.expected_variance, 0.0);
        assert_eq!(s.relative_error(), 0.0);
        assert!(hypothesis_stats(0, &t, None, &NoiseSpec::noiseless()).is_err());
    }

    #[test]
    fn monte_carlo_is_order_independent() {
        let t = ptm_train(&GolayPair::builtin8(), 1).unwrap();
        let noise = NoiseSpec::new(1.0, 99).unwrap();
        let a = hypothesis_stats(2000, &t, None, &noise).unwrap();
        let b = hypothesis_stats(2000, &t, None, &noise).unwrap();
        assert_eq!(a, b);
        // trial t uses stream t + 1 regardless of scheduling
        let mut rng = noise.rng(6);
        let tgt = PointTarget::scalar(0, Doppler::ZERO, ZERO);
        let r = synthesize_single(&t, &tgt, 1.0, &mut rng).unwrap();
        let direct = matched_filter_at(&r, &t, 0).unwrap();
        let mut rng = noise.rng(6);
        let again = synthesize_single(&t, &tgt, 1.0, &mut rng).unwrap();
        assert_eq!(direct, matched_filter_at(&again, &t, 0).unwrap());
    }

    #[test]
    fn small_monte_carlo_variances() {
        let t = ptm_train(&GolayPair::builtin8(), 3).unwrap();
        let noise = NoiseSpec::new(1.0, 7).unwrap();
        let s0 = hypothesis_stats(20_000, &t, None, &noise).unwrap();
        assert_eq!(s0.expected_variance, 256.0);
        assert!(s0.relative_error() < 0.05, "{s0:?}");
        let tgt = PointTarget {
            delay: 0,
            doppler: Doppler::ZERO,
            scattering: Scattering::Random { sigma_h: 1.0 },
        };
        let s1 = hypothesis_stats(20_000, &t, Some(&tgt), &NoiseSpec::new(0.0, 7).unwrap()).unwrap();
        assert_eq!(s1.expected_variance, 2.0 * 128.0 * 128.0);
        assert!(s1.relative_error() < 0.05, "{s1:?}");
    }
}
