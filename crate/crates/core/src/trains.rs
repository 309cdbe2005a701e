//! Pulse trains of Golay pairs and their Alamouti waveform matrices.
//!
//! A train transmits `N = 2^(M+1)` pulses, one per PRI, grouped into pairs
//! `(x_2k, x_2k+1)`. The PTM train uses the pair `(x, y)` where the PTM bit
//! `s_k` is 0 and `(-y~, x~)` where it is 1. That choice satisfies both
//! structural conditions checked here:
//!
//! - [`check_prouhet_pairs`]: every odd-indexed pulse in the PTM-zero set is
//!   complementary to every odd-indexed pulse in the PTM-one set, which makes
//!   the Taylor coefficients `C_1..C_M` vanish away from lag 0;
//! - [`check_block_cross_signs`]: the within-pair cross-correlation of block `k` is
//!   `(-1)^s_k` times that of block 0, which makes `B_1..B_M` vanish.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_argument, Error, Result};
use crate::laurent::{xcorr, LaurentPoly};
use crate::sequences::{is_golay, prouhet_partition, ptm, ptm_bit, GolayPair, UnimodularSequence};

/// Largest supported Taylor order; `N = 2^(M+1)` pulses are materialized.
pub const MAX_ORDER: u32 = 20;

/// How the pairs of a train were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// PTM-ordered pairs `(x, y)` / `(-y~, x~)`.
    Ptm,
    /// The seed pair repeated in every block.
    Conventional,
    /// User-supplied pulses.
    Custom,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ptm => "ptm",
            Scheme::Conventional => "conventional",
            Scheme::Custom => "custom",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ptm" => Ok(Scheme::Ptm),
            "conventional" => Ok(Scheme::Conventional),
            "custom" => Ok(Scheme::Custom),
            other => Err(invalid_argument(format!("unknown scheme {other:?}"))),
        }
    }
}

/// `N` pulses of common length `L`; each `(x_2k, x_2k+1)` is a Golay pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulseTrain {
    pulses: Vec<UnimodularSequence>,
    scheme: Scheme,
}

impl PulseTrain {
    /// Validates pairing and lengths; the result is tagged [`Scheme::Custom`].
    pub fn new(pulses: Vec<UnimodularSequence>) -> Result<Self> {
        Self::with_scheme(pulses, Scheme::Custom)
    }

    fn with_scheme(pulses: Vec<UnimodularSequence>, scheme: Scheme) -> Result<Self> {
        if pulses.is_empty() || pulses.len() % 2 != 0 {
            return Err(invalid_argument(format!(
                "a train needs a positive even number of pulses, got {}",
                pulses.len()
            )));
        }
        let l = pulses[0].len();
        if let Some(n) = pulses.iter().position(|p| p.len() != l) {
            return Err(invalid_argument(format!(
                "pulse {n} has length {}, expected {l}",
                pulses[n].len()
            )));
        }
        for (k, pair) in pulses.chunks(2).enumerate() {
            if !is_golay(&pair[0], &pair[1])? {
                return Err(Error::InvalidPair(format!(
                    "pulses {} and {} are not complementary",
                    2 * k,
                    2 * k + 1
                )));
            }
        }
        Ok(Self { pulses, scheme })
    }

    /// Builds a train without the pairing check. Only used for trains that are
    /// deliberately broken or degenerate (a single pulse, for instance).
    pub fn new_unchecked(pulses: Vec<UnimodularSequence>) -> Self {
        Self {
            pulses,
            scheme: Scheme::Custom,
        }
    }

    pub fn pulses(&self) -> &[UnimodularSequence] {
        &self.pulses
    }

    pub fn pulse(&self, n: usize) -> &UnimodularSequence {
        &self.pulses[n]
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// PRI count `N`.
    pub fn num_pulses(&self) -> usize {
        self.pulses.len()
    }

    /// Chip count `L`.
    pub fn pulse_len(&self) -> usize {
        self.pulses.first().map_or(0, |p| p.len())
    }

    /// `M = log2(N) - 1` when `N` is a power of two ≥ 2.
    pub fn order(&self) -> Option<u32> {
        let n = self.num_pulses();
        (n >= 2 && n.is_power_of_two()).then(|| n.trailing_zeros() - 1)
    }

    /// Block labels: `0` where the pair equals the first pair `(x, y)`, `1`
    /// where it equals `(-y~, x~)`, `None` for anything else.
    pub fn block_labels(&self) -> Vec<Option<u8>> {
        if self.pulses.len() < 2 {
            return Vec::new();
        }
        let (x, y) = (&self.pulses[0], &self.pulses[1]);
        let alt = (y.reverse_conjugate().negate(), x.reverse_conjugate());
        self.pulses
            .chunks_exact(2)
            .map(|p| {
                if (&p[0], &p[1]) == (x, y) {
                    Some(0)
                } else if (&p[0], &p[1]) == (&alt.0, &alt.1) {
                    Some(1)
                } else {
                    None
                }
            })
            .collect()
    }
}

fn check_order(order: u32) -> Result<()> {
    if order > MAX_ORDER {
        return Err(invalid_argument(format!(
            "order {order} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// PTM-coordinated train of `2^(order+1)` pulses.
pub fn ptm_train(seed: &GolayPair, order: u32) -> Result<PulseTrain> {
    check_order(order)?;
    let blocks = 1usize << order;
    let bits = ptm(blocks)?;
    let (x, y) = (seed.a(), seed.b());
    let (alt0, alt1) = (y.reverse_conjugate().negate(), x.reverse_conjugate());
    let mut pulses = Vec::with_capacity(2 * blocks);
    for &bit in bits.bits() {
        if bit == 0 {
            pulses.extend([x.clone(), y.clone()]);
        } else {
            pulses.extend([alt0.clone(), alt1.clone()]);
        }
    }
    Ok(PulseTrain {
        pulses,
        scheme: Scheme::Ptm,
    })
}

/// The seed pair repeated: `x, y, x, y, …` over `2^(order+1)` PRIs.
pub fn conventional_train(seed: &GolayPair, order: u32) -> Result<PulseTrain> {
    check_order(order)?;
    let blocks = 1usize << order;
    let pulses = (0..blocks).flat_map(|_| [seed.a().clone(), seed.b().clone()]).collect();
    Ok(PulseTrain {
        pulses,
        scheme: Scheme::Conventional,
    })
}

/// Builds a train of the given scheme; `Custom` is rejected.
pub fn build_train(seed: &GolayPair, order: u32, scheme: Scheme) -> Result<PulseTrain> {
    match scheme {
        Scheme::Ptm => ptm_train(seed, order),
        Scheme::Conventional => conventional_train(seed, order),
        Scheme::Custom => Err(invalid_argument("custom trains are built from explicit pulses")),
    }
}

/// True iff every pair `(x_p, x_q)` with `p, q` odd, `s_p = 0`, `s_q = 1` is a
/// Golay pair. `N` must be a power of two.
pub fn check_prouhet_pairs(train: &PulseTrain) -> Result<bool> {
    let order = train
        .order()
        .ok_or_else(|| invalid_argument(format!("pulse count {} is not a power of two", train.num_pulses())))?;
    let partition = prouhet_partition(order)?;
    let odd = |set: &[u64]| -> Vec<usize> { set.iter().filter(|i| *i % 2 == 1).map(|i| *i as usize).collect() };
    let (odd0, odd1) = (odd(partition.zeros()), odd(partition.ones()));
    for &p in &odd0 {
        for &q in &odd1 {
            if !is_golay(train.pulse(p), train.pulse(q))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff `xcorr(x_2k, x_2k+1) = (-1)^s_k · xcorr(x_0, x_1)` for every block.
pub fn check_block_cross_signs(wm: &WaveformMatrix) -> bool {
    let train = wm.train();
    let reference = wm.block_cross(0);
    (0..train.num_pulses() / 2).all(|k| {
        let expected = if ptm_bit(k) == 0 {
            reference.clone()
        } else {
            -&reference
        };
        wm.block_cross(k) == expected
    })
}

/// Alamouti-structured `2 × N` waveform matrix over a pulse train.
///
/// Block `k` occupies columns `2k, 2k+1`:
///
/// ```text
/// ( X_2k     -X~_2k+1 )
/// ( X_2k+1    X~_2k   )
/// ```
///
/// Rows are the two polarization channels, columns are PRIs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveformMatrix {
    train: PulseTrain,
}

impl WaveformMatrix {
    pub fn from_train(train: PulseTrain) -> Self {
        Self { train }
    }

    pub fn train(&self) -> &PulseTrain {
        &self.train
    }

    pub fn into_train(self) -> PulseTrain {
        self.train
    }

    pub fn num_columns(&self) -> usize {
        self.train.num_pulses()
    }

    /// Entry `(row, col)` of the matrix as a polynomial, `row ∈ {0, 1}`.
    pub fn entry(&self, row: usize, col: usize) -> LaurentPoly<i64> {
        assert!(row < 2, "waveform matrix has two rows");
        let k = col / 2;
        let (first, second) = (self.train.pulse(2 * k), self.train.pulse(2 * k + 1));
        match (row, col % 2) {
            (0, 0) => LaurentPoly::from_sequence(first),
            (1, 0) => LaurentPoly::from_sequence(second),
            (0, _) => -LaurentPoly::from_sequence(second).tilde(),
            (_, _) => LaurentPoly::from_sequence(first).tilde(),
        }
    }

    /// The 2×2 block `k` as `[[e00, e01], [e10, e11]]`.
    pub fn block(&self, k: usize) -> [[LaurentPoly<i64>; 2]; 2] {
        let c = 2 * k;
        [
            [self.entry(0, c), self.entry(0, c + 1)],
            [self.entry(1, c), self.entry(1, c + 1)],
        ]
    }

    /// `X_2k(z)·X~_2k+1(z)`, the within-pair cross-correlation of block `k`.
    pub fn block_cross(&self, k: usize) -> LaurentPoly<i64> {
        xcorr(self.train.pulse(2 * k), self.train.pulse(2 * k + 1)).expect("train pulses share one length")
    }

    /// Every block satisfies `e01 = -e10~` and `e11 = e00~`.
    pub fn is_alamouti(&self) -> bool {
        (0..self.num_columns() / 2).all(|k| {
            let [[e00, e01], [e10, e11]] = self.block(k);
            e01 == -e10.tilde() && e11 == e00.tilde()
        })
    }
}

pub fn alamouti_train(seed: &GolayPair, order: u32, scheme: Scheme) -> Result<WaveformMatrix> {
    build_train(seed, order, scheme).map(WaveformMatrix::from_train)
}

/// On-disk form of a train or waveform matrix.
///
/// ```json
/// {"scheme": "ptm", "M": 3, "L": 8, "pulses": ["++-++++-", ...]}
/// ```
///
/// Matrices use schemes prefixed with `alamouti-` and add a `blocks` list of
/// `"X0"`/`"X1"`/`"custom"` tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainDocument {
    pub scheme: String,
    #[serde(rename = "M")]
    pub order: Option<u32>,
    #[serde(rename = "L")]
    pub pulse_len: usize,
    pub pulses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<String>>,
}

/// A loaded document: either a plain train or an Alamouti matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Loaded {
    Train(PulseTrain),
    Matrix(WaveformMatrix),
}

impl TrainDocument {
    pub fn from_train(train: &PulseTrain) -> Self {
        Self {
            scheme: train.scheme().to_string(),
            order: train.order(),
            pulse_len: train.pulse_len(),
            pulses: train.pulses().iter().map(|p| p.to_sign_string()).collect(),
            blocks: None,
        }
    }

    pub fn from_matrix(wm: &WaveformMatrix) -> Self {
        let mut doc = Self::from_train(wm.train());
        doc.scheme = format!("alamouti-{}", wm.train().scheme());
        doc.blocks = Some(
            wm.train()
                .block_labels()
                .into_iter()
                .map(|label| match label {
                    Some(b) => format!("X{b}"),
                    None => "custom".to_string(),
                })
                .collect(),
        );
        doc
    }

    /// Parses the pulses, re-validates the pairing, and checks `M`/`L`.
    pub fn load(&self) -> Result<Loaded> {
        let (is_matrix, base) = match self.scheme.strip_prefix("alamouti-") {
            Some(rest) => (true, rest),
            None => (false, self.scheme.as_str()),
        };
        let scheme: Scheme = base.parse()?;
        let pulses = self
            .pulses
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.parse::<UnimodularSequence>()
                    .map_err(|e| invalid_argument(format!("pulse {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let train = PulseTrain::with_scheme(pulses, scheme)?;
        if train.pulse_len() != self.pulse_len {
            return Err(invalid_argument(format!(
                "declared L = {} but pulses have length {}",
                self.pulse_len,
                train.pulse_len()
            )));
        }
        if self.order.is_some() && self.order != train.order() {
            return Err(invalid_argument(format!(
                "declared M = {:?} does not match {} pulses",
                self.order,
                train.num_pulses()
            )));
        }
        let expected = match scheme {
            Scheme::Custom => None,
            _ => {
                let order = train
                    .order()
                    .ok_or_else(|| invalid_argument("scheme trains need 2^(M+1) pulses"))?;
                let seed = GolayPair::new(train.pulse(0).clone(), train.pulse(1).clone())?;
                Some(build_train(&seed, order, scheme)?)
            }
        };
        if let Some(expected) = expected {
            if expected != train {
                return Err(invalid_argument(format!(
                    "pulses do not follow the {scheme} construction"
                )));
            }
        }
        Ok(if is_matrix {
            Loaded::Matrix(WaveformMatrix::from_train(train))
        } else {
            Loaded::Train(train)
        })
    }
}
