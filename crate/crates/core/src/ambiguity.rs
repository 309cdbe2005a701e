//! Composite and matrix-valued ambiguity functions.
//!
//! With a Doppler shift of `θ` radians per PRI, pulse `n` picks up the phase
//! `e^{jnθ}`. The single-channel composite ambiguity function is
//!
//! ```text
//! G(z, θ) = Σ_n e^{jnθ} |X_n(z)|²
//! ```
//!
//! and the polarimetric one is the 2×2 matrix `X(z) D(θ) X~(z)`. Expanding
//! `e^{jnθ}` around `θ = 0` gives the lag polynomials `C_m(z) = Σ_n n^m |X_n(z)|²`
//! (diagonal) and `B_m(z) = Σ_k ((2k)^m - (2k+1)^m) X_2k(z) X~_2k+1(z)`
//! (off-diagonal). The true series coefficient of `θ^m` is `(j^m / m!)·C_m`;
//! the `j^m / m!` factor does not affect which lags vanish, so `C_m` and `B_m`
//! are kept as exact integer polynomials without it.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid_argument, Error, Result};
use crate::laurent::{autocorr, LaurentPoly};
use crate::trains::{PulseTrain, WaveformMatrix};

/// Doppler shift as phase advance per PRI, in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Doppler(f64);

impl Doppler {
    pub const ZERO: Doppler = Doppler(0.0);

    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(invalid_argument(format!("Doppler shift {theta} is not finite")));
        }
        Ok(Self(theta))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// `e^{jnθ}`, the modulation on PRI `n`.
    pub fn phase(self, n: usize) -> Complex64 {
        Complex64::from_polar(1.0, n as f64 * self.0)
    }

    /// `steps` evenly spaced shifts from `min` to `max` inclusive.
    /// A single step yields `min`.
    pub fn sweep(min: f64, max: f64, steps: usize) -> Result<Vec<Doppler>> {
        if steps == 0 {
            return Err(invalid_argument("Doppler sweep needs at least one step"));
        }
        if min.is_nan() || max.is_nan() || min > max {
            return Err(invalid_argument(format!("empty Doppler range [{min}, {max}]")));
        }
        let (lo, hi) = (Self::new(min)?, Self::new(max)?);
        if steps == 1 {
            return Ok(vec![lo]);
        }
        let step = (hi.0 - lo.0) / (steps - 1) as f64;
        Ok((0..steps)
            .map(|i| {
                if i == steps - 1 {
                    hi
                } else {
                    Doppler(lo.0 + i as f64 * step)
                }
            })
            .collect())
    }
}

impl fmt::Display for Doppler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which ambiguity entry to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// Single-channel composite ambiguity `G(z, θ)`.
    Single,
    /// Diagonal entry `G_1(z, θ)` of the matrix ambiguity.
    Diag,
    /// Off-diagonal entry `G_2(z, θ)` of the matrix ambiguity.
    Offdiag,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Single => "single",
            Channel::Diag => "diag",
            Channel::Offdiag => "offdiag",
        }
    }

    /// Whether lag 0 is part of the sidelobe set. The ideal off-diagonal entry
    /// is zero at every lag, so its peak includes lag 0.
    pub fn excludes_zero_lag(self) -> bool {
        !matches!(self, Channel::Offdiag)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Channel::Single),
            "diag" => Ok(Channel::Diag),
            "offdiag" => Ok(Channel::Offdiag),
            other => Err(invalid_argument(format!("unknown channel {other:?}"))),
        }
    }
}

/// Anything an ambiguity function can be evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum Waveform<'a> {
    Train(&'a PulseTrain),
    Matrix(&'a WaveformMatrix),
}

impl<'a> Waveform<'a> {
    pub fn train(&self) -> &'a PulseTrain {
        match self {
            Waveform::Train(t) => t,
            Waveform::Matrix(m) => m.train(),
        }
    }
}

impl<'a> From<&'a PulseTrain> for Waveform<'a> {
    fn from(t: &'a PulseTrain) -> Self {
        Waveform::Train(t)
    }
}

impl<'a> From<&'a WaveformMatrix> for Waveform<'a> {
    fn from(m: &'a WaveformMatrix) -> Self {
        Waveform::Matrix(m)
    }
}

/// `G(z, θ) = Σ_n e^{jnθ} corr(x_n)`.
pub fn composite_ambiguity(train: &PulseTrain, theta: Doppler) -> LaurentPoly<Complex64> {
    let l = train.pulse_len() as i64;
    let mut acc = vec![Complex64::new(0.0, 0.0); (2 * l - 1).max(1) as usize];
    for (n, pulse) in train.pulses().iter().enumerate() {
        let phase = theta.phase(n);
        for (lag, c) in autocorr(pulse).iter() {
            acc[(lag + l - 1) as usize] += phase * c as f64;
        }
    }
    LaurentPoly::new(-(l - 1), acc)
}

/// Exact Taylor coefficient polynomial `C_m` or `B_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorCoefficient {
    pub order: u32,
    pub poly: LaurentPoly<i64>,
}

impl TaylorCoefficient {
    /// All coefficients away from lag 0 are zero.
    pub fn vanishes_off_zero(&self) -> bool {
        self.poly.is_monomial_at_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

fn overflow(what: &str, m: u32) -> Error {
    invalid_argument(format!("{what} of order {m} overflows 64-bit integers"))
}

fn weighted_sum<'a>(
    terms: impl Iterator<Item = (i64, LaurentPoly<i64>)> + 'a,
    l: usize,
    what: &str,
    m: u32,
) -> Result<LaurentPoly<i64>> {
    let l = l as i64;
    let mut acc = vec![0i64; (2 * l - 1).max(1) as usize];
    for (weight, poly) in terms {
        for (lag, c) in poly.iter() {
            let slot = &mut acc[(lag + l - 1) as usize];
            *slot = c
                .checked_mul(weight)
                .and_then(|v| slot.checked_add(v))
                .ok_or_else(|| overflow(what, m))?;
        }
    }
    Ok(LaurentPoly::new(-(l - 1), acc))
}

/// `C_0(z) = N·L`, the zero-order term for any Golay-paired train.
pub fn taylor_c0(train: &PulseTrain) -> LaurentPoly<i64> {
    LaurentPoly::constant((train.num_pulses() * train.pulse_len()) as i64)
}

/// `C_m(z) = Σ_n n^m corr(x_n)` for `m ≥ 1`.
pub fn taylor_c(train: &PulseTrain, m: u32) -> Result<TaylorCoefficient> {
    if m == 0 {
        return Err(invalid_argument("taylor_c needs m ≥ 1; C_0 is taylor_c0"));
    }
    let weights = (0..train.num_pulses())
        .map(|n| (n as i64).checked_pow(m).ok_or_else(|| overflow("C_m", m)))
        .collect::<Result<Vec<_>>>()?;
    let terms = train.pulses().iter().zip(weights).map(|(p, w)| (w, autocorr(p)));
    Ok(TaylorCoefficient {
        order: m,
        poly: weighted_sum(terms, train.pulse_len(), "C_m", m)?,
    })
}

/// `B_m(z) = Σ_k ((2k)^m - (2k+1)^m) X_2k(z) X~_2k+1(z)` for `m ≥ 1`.
pub fn taylor_b(wm: &WaveformMatrix, m: u32) -> Result<TaylorCoefficient> {
    if m == 0 {
        return Err(invalid_argument("taylor_b needs m ≥ 1; B_0 is identically zero"));
    }
    let blocks = wm.num_columns() / 2;
    let weights = (0..blocks)
        .map(|k| {
            let even = ((2 * k) as i64).checked_pow(m);
            let odd = ((2 * k + 1) as i64).checked_pow(m);
            even.zip(odd)
                .and_then(|(e, o)| e.checked_sub(o))
                .ok_or_else(|| overflow("B_m", m))
        })
        .collect::<Result<Vec<_>>>()?;
    let terms = weights.into_iter().enumerate().map(|(k, w)| (w, wm.block_cross(k)));
    Ok(TaylorCoefficient {
        order: m,
        poly: weighted_sum(terms, wm.train().pulse_len(), "B_m", m)?,
    })
}

/// `G(z, θ) = X(z) D(θ) X~(z)`, indexed `[row][col]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixAmbiguity {
    pub entries: [[LaurentPoly<Complex64>; 2]; 2],
}

impl MatrixAmbiguity {
    /// Diagonal entry `G_1`.
    pub fn g1(&self) -> &LaurentPoly<Complex64> {
        &self.entries[0][0]
    }

    /// Upper off-diagonal entry `G_2`.
    pub fn g2(&self) -> &LaurentPoly<Complex64> {
        &self.entries[0][1]
    }

    pub fn entry(&self, row: usize, col: usize) -> &LaurentPoly<Complex64> {
        &self.entries[row][col]
    }
}

/// Evaluates the full product `Σ_n e^{jnθ} X_{i,n}(z) X~_{j,n}(z)` for every
/// entry. The upper row is `(G_1, G_2)`. The lower-left entry is `G_2` reversed
/// in lag, and the lower-right is `G_1` of the train with each pair swapped;
/// both reduce to the `(G~_2, G_1)` pattern at `θ = 0`.
pub fn matrix_ambiguity(wm: &WaveformMatrix, theta: Doppler) -> MatrixAmbiguity {
    let mut entries: [[LaurentPoly<Complex64>; 2]; 2] = Default::default();
    for col in 0..wm.num_columns() {
        let phase = theta.phase(col);
        let column = [wm.entry(0, col), wm.entry(1, col)];
        let tildes = [column[0].tilde(), column[1].tilde()];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let term = (&column[i] * &tildes[j]).to_complex().scale(phase);
                *slot += &term;
            }
        }
    }
    MatrixAmbiguity { entries }
}

/// The ambiguity entry selected by `channel`. Trains support `single`/`diag`
/// (identical for them); `offdiag` needs an Alamouti matrix.
pub fn channel_response(waveform: Waveform<'_>, channel: Channel, theta: Doppler) -> Result<LaurentPoly<Complex64>> {
    match (waveform, channel) {
        (Waveform::Train(t), Channel::Single | Channel::Diag) => Ok(composite_ambiguity(t, theta)),
        (Waveform::Train(_), Channel::Offdiag) => Err(invalid_argument(
            "the off-diagonal channel needs an Alamouti waveform matrix",
        )),
        (Waveform::Matrix(m), Channel::Single | Channel::Diag) => Ok(matrix_ambiguity(m, theta).entries[0][0].clone()),
        (Waveform::Matrix(m), Channel::Offdiag) => Ok(matrix_ambiguity(m, theta).entries[0][1].clone()),
    }
}

/// Magnitudes `|g_l(θ)|` over lags `-(L-1)..=L-1` and a list of Doppler shifts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbiguityGrid {
    pub channel: Channel,
    pub min_lag: i64,
    pub max_lag: i64,
    pub thetas: Vec<f64>,
    /// `values[theta_index][lag - min_lag]`
    pub values: Vec<Vec<f64>>,
}

impl AmbiguityGrid {
    pub fn lags(&self) -> std::ops::RangeInclusive<i64> {
        self.min_lag..=self.max_lag
    }

    pub fn value(&self, theta_index: usize, lag: i64) -> f64 {
        self.values[theta_index][(lag - self.min_lag) as usize]
    }

    /// `lag,theta,magnitude[,channel]`, ordered by θ then lag. Values use the
    /// shortest representation that round-trips.
    pub fn write_csv<W: Write>(&self, mut w: W, with_channel: bool) -> io::Result<()> {
        if with_channel {
            writeln!(w, "lag,theta,magnitude,channel")?;
        } else {
            writeln!(w, "lag,theta,magnitude")?;
        }
        self.write_csv_rows(&mut w, with_channel)
    }

    /// Rows only, for concatenating several channels under one header.
    pub fn write_csv_rows<W: Write>(&self, mut w: W, with_channel: bool) -> io::Result<()> {
        for (ti, theta) in self.thetas.iter().enumerate() {
            for lag in self.lags() {
                let mag = self.value(ti, lag);
                if with_channel {
                    writeln!(w, "{lag},{theta},{mag},{}", self.channel)?;
                } else {
                    writeln!(w, "{lag},{theta},{mag}")?;
                }
            }
        }
        Ok(())
    }
}

/// Evaluates `channel` at each shift in `thetas`. Columns are computed in
/// parallel; each is independent, so the result does not depend on scheduling.
pub fn grid(waveform: Waveform<'_>, channel: Channel, thetas: &[Doppler]) -> Result<AmbiguityGrid> {
    if thetas.is_empty() {
        return Err(invalid_argument("ambiguity grid needs at least one Doppler shift"));
    }
    let l = waveform.train().pulse_len() as i64;
    let (lo, hi) = (-(l - 1), l - 1);
    let values = thetas
        .par_iter()
        .map(|theta| {
            channel_response(waveform, channel, *theta).map(|p| p.dense(lo, hi).into_iter().map(|c| c.norm()).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(AmbiguityGrid {
        channel,
        min_lag: lo,
        max_lag: hi,
        thetas: thetas.iter().map(|t| t.radians()).collect(),
        values,
    })
}

/// Peak coefficient magnitude, optionally ignoring the mainlobe at lag 0.
pub fn peak_sidelobe(poly: &LaurentPoly<Complex64>, exclude_zero_lag: bool) -> f64 {
    poly.peak_magnitude(exclude_zero_lag)
}

/// `20·log10(PSL_baseline / PSL_resilient)` on `channel` at `theta`.
///
/// A resilient peak of exactly zero against a nonzero baseline gives `+∞`;
/// two zero peaks count as equal (0 dB).
pub fn suppression_db(
    resilient: Waveform<'_>,
    baseline: Waveform<'_>,
    theta: Doppler,
    channel: Channel,
) -> Result<f64> {
    if resilient.train().num_pulses() != baseline.train().num_pulses() {
        return Err(invalid_argument("compared waveforms must have the same pulse count"));
    }
    let exclude = channel.excludes_zero_lag();
    let r = peak_sidelobe(&channel_response(resilient, channel, theta)?, exclude);
    let b = peak_sidelobe(&channel_response(baseline, channel, theta)?, exclude);
    Ok(ratio_db(b, r))
}

/// `20·log10(numerator / denominator)` with the zero conventions of [`suppression_db`].
pub fn ratio_db(numerator: f64, denominator: f64) -> f64 {
    match (numerator == 0.0, denominator == 0.0) {
        (true, true) => 0.0,
        (false, true) => f64::INFINITY,
        _ => 20.0 * (numerator / denominator).log10(),
    }
}
