//! Binary unimodular sequences, Golay complementary pairs, and the
//! Prouhet-Thue-Morse (PTM) sequence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_argument, Error, Result};
use crate::laurent::autocorr;

/// Largest Prouhet order accepted; `2^(order+1)` indices are materialized.
pub const MAX_PROUHET_ORDER: u32 = 24;

/// A nonempty sequence of chips drawn from `{+1, -1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct UnimodularSequence(Vec<i8>);

impl UnimodularSequence {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid_argument("sequence must have at least one chip"));
        }
        if let Some(pos) = values.iter().position(|v| *v != 1 && *v != -1) {
            return Err(invalid_argument(format!(
                "chip {pos} is {}, expected +1 or -1",
                values[pos]
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn negate(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }

    /// `x~[l] = x*[-l]`. On the real binary alphabet conjugation is the
    /// identity, so this is the time reversal of the chips.
    pub fn reverse_conjugate(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn transform(&self, op: Transform) -> Self {
        match op {
            Transform::Negate => self.negate(),
            Transform::ReverseConjugate => self.reverse_conjugate(),
            Transform::Both => self.reverse_conjugate().negate(),
        }
    }

    /// Compact `+`/`-` rendering used on the command line.
    pub fn to_sign_string(&self) -> String {
        self.0.iter().map(|v| if *v > 0 { '+' } else { '-' }).collect()
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// `self[0], other[0], self[1], other[1], ...`; lengths must match.
    pub fn interleave(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(invalid_argument("interleave needs equal lengths"));
        }
        Ok(Self(self.0.iter().zip(&other.0).flat_map(|(a, b)| [*a, *b]).collect()))
    }
}

impl TryFrom<Vec<i64>> for UnimodularSequence {
    type Error = Error;

    fn try_from(values: Vec<i64>) -> Result<Self> {
        let chips = values
            .into_iter()
            .map(|v| match v {
                1 => Ok(1i8),
                -1 => Ok(-1i8),
                other => Err(invalid_argument(format!("chip value {other} is not +1 or -1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(chips)
    }
}

impl From<UnimodularSequence> for Vec<i64> {
    fn from(s: UnimodularSequence) -> Self {
        s.0.into_iter().map(i64::from).collect()
    }
}

impl FromStr for UnimodularSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chips = s
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(invalid_argument(format!(
                    "unexpected character {other:?} in sign string"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(chips)
    }
}

impl fmt::Display for UnimodularSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sign_string())
    }
}

/// Sequence transformations under which Golay pairs are closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Negate,
    ReverseConjugate,
    Both,
}

/// Doubling constructions for [`golay_expand`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpandMethod {
    /// `(a ‖ b, a ‖ -b)`
    Concatenate,
    /// `(a ⧢ b, a ⧢ -b)`, entrywise interleaving
    Interleave,
}

/// Two equal-length sequences whose autocorrelations sum to `2L·δ[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GolayPair {
    a: UnimodularSequence,
    b: UnimodularSequence,
}

impl GolayPair {
    pub fn new(a: UnimodularSequence, b: UnimodularSequence) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidPair(format!(
                "lengths differ ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        if !is_golay(&a, &b)? {
            return Err(Error::InvalidPair(format!("{a} and {b} are not complementary")));
        }
        Ok(Self { a, b })
    }

    /// The length-8 reference pair `x = ++-++++-`, `y = --+-+++-` (CLI name `builtin8`).
    pub fn builtin8() -> Self {
        let a = UnimodularSequence(vec![1, 1, -1, 1, 1, 1, 1, -1]);
        let b = UnimodularSequence(vec![-1, -1, 1, -1, 1, 1, 1, -1]);
        Self { a, b }
    }

    pub fn a(&self) -> &UnimodularSequence {
        &self.a
    }

    pub fn b(&self) -> &UnimodularSequence {
        &self.b
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn into_parts(self) -> (UnimodularSequence, UnimodularSequence) {
        (self.a, self.b)
    }
}

impl<'de> Deserialize<'de> for GolayPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: UnimodularSequence,
            b: UnimodularSequence,
        }
        let raw = Raw::deserialize(d)?;
        GolayPair::new(raw.a, raw.b).map_err(serde::de::Error::custom)
    }
}

/// Exact integer test of `corr_k(a) + corr_k(b) = 2L·δ[k]` over every lag.
pub fn is_golay(a: &UnimodularSequence, b: &UnimodularSequence) -> Result<bool> {
    if a.len() != b.len() {
        return Err(invalid_argument(format!(
            "is_golay needs equal lengths ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let sum = &autocorr(a) + &autocorr(b);
    Ok(sum.min_degree() == 0 && sum.coefficients().len() == 1 && sum.coefficients()[0] == 2 * a.len() as i64)
}

pub fn golay_expand(pair: &GolayPair, method: ExpandMethod) -> GolayPair {
    let (a, b) = (pair.a(), pair.b());
    let nb = b.negate();
    let (a2, b2) = match method {
        ExpandMethod::Concatenate => (a.concat(b), a.concat(&nb)),
        // equal lengths are a GolayPair invariant
        ExpandMethod::Interleave => (
            a.interleave(b).expect("pair lengths match"),
            a.interleave(&nb).expect("pair lengths match"),
        ),
    };
    GolayPair { a: a2, b: b2 }
}

/// Applies `golay_expand` until the pair is at least `target_len` long.
/// `target_len` must be the seed length times a power of two.
pub fn expand_to(pair: &GolayPair, target_len: usize, method: ExpandMethod) -> Result<GolayPair> {
    let l = pair.len();
    if target_len < l || target_len % l != 0 || !(target_len / l).is_power_of_two() {
        return Err(invalid_argument(format!(
            "cannot reach length {target_len} from {l} by doubling"
        )));
    }
    let mut out = pair.clone();
    while out.len() < target_len {
        out = golay_expand(&out, method);
    }
    Ok(out)
}

/// Prefix of the Prouhet-Thue-Morse sequence over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtmBits(Vec<u8>);

impl PtmBits {
    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, k: usize) -> u8 {
        self.0[k]
    }
}

/// The PTM bit `s_k`: parity of the number of ones in the binary expansion of `k`.
pub fn ptm_bit(k: usize) -> u8 {
    (k.count_ones() & 1) as u8
}

/// First `n` PTM bits, built by the recursion `s_0 = 0`, `s_2k = s_k`,
/// `s_2k+1 = 1 - s_k`. Any `n ≥ 1` is accepted.
pub fn ptm(n: usize) -> Result<PtmBits> {
    if n == 0 {
        return Err(invalid_argument("ptm length must be at least 1"));
    }
    let mut bits = vec![0u8; n];
    for k in 1..n {
        bits[k] = if k % 2 == 0 { bits[k / 2] } else { 1 - bits[k / 2] };
    }
    Ok(PtmBits(bits))
}

/// Split of `{0, …, 2^(order+1) - 1}` into the PTM zeros and ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProuhetPartition {
    order: u32,
    zeros: Vec<u64>,
    ones: Vec<u64>,
}

impl ProuhetPartition {
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Indices whose PTM bit is 0 (the set containing 0).
    pub fn zeros(&self) -> &[u64] {
        &self.zeros
    }

    pub fn ones(&self) -> &[u64] {
        &self.ones
    }

    pub fn size(&self) -> u64 {
        1u64 << (self.order + 1)
    }

    /// `(Σ_{p∈S0} p^m, Σ_{q∈S1} q^m)`, or `None` if the sums overflow `u128`.
    pub fn power_sums(&self, m: u32) -> Option<(u128, u128)> {
        let sum = |set: &[u64]| {
            set.iter().try_fold(0u128, |acc, &p| {
                (p as u128).checked_pow(m).and_then(|v| acc.checked_add(v))
            })
        };
        Some((sum(&self.zeros)?, sum(&self.ones)?))
    }

    /// True iff the two power sums agree for every `m` in `0..=order`.
    pub fn is_balanced(&self) -> bool {
        (0..=self.order).all(|m| matches!(self.power_sums(m), Some((s0, s1)) if s0 == s1))
    }
}

pub fn prouhet_partition(order: u32) -> Result<ProuhetPartition> {
    if order > MAX_PROUHET_ORDER {
        return Err(invalid_argument(format!(
            "Prouhet order {order} exceeds the supported maximum {MAX_PROUHET_ORDER}"
        )));
    }
    let n = 1usize << (order + 1);
    let bits = ptm(n)?;
    let (mut zeros, mut ones) = (Vec::with_capacity(n / 2), Vec::with_capacity(n / 2));
    for (k, bit) in bits.bits().iter().enumerate() {
        if *bit == 0 {
            zeros.push(k as u64);
        } else {
            ones.push(k as u64);
        }
    }
    Ok(ProuhetPartition { order, zeros, ones })
}
