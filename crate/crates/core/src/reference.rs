//! Direct evaluators that work from the chip sequences alone, with no
//! polynomial arithmetic. They are slow and exist to cross-check the fast
//! paths in [`crate::ambiguity`].

use num_complex::Complex64;

use crate::sequences::UnimodularSequence;

/// `Σ_l a[l + k]·b[l]`, zero outside the supports.
pub fn correlation_at(a: &UnimodularSequence, b: &UnimodularSequence, k: i64) -> i64 {
    let (a, b) = (a.values(), b.values());
    let mut acc = 0i64;
    for (l, bl) in b.iter().enumerate() {
        let i = l as i64 + k;
        if i >= 0 && (i as usize) < a.len() {
            acc += i64::from(a[i as usize]) * i64::from(*bl);
        }
    }
    acc
}

/// `Σ_n e^{jnθ} Σ_l x_n[l + k]·x_n[l]`.
pub fn composite_at(pulses: &[UnimodularSequence], theta: f64, k: i64) -> Complex64 {
    pulses
        .iter()
        .enumerate()
        .map(|(n, x)| Complex64::from_polar(1.0, n as f64 * theta) * correlation_at(x, x, k) as f64)
        .sum()
}

/// Upper off-diagonal entry of the Alamouti ambiguity matrix:
/// `Σ_k (e^{j2kθ} - e^{j(2k+1)θ})·Σ_l x_2k[l + m]·x_2k+1[l]` at lag `m`.
pub fn offdiag_at(pulses: &[UnimodularSequence], theta: f64, m: i64) -> Complex64 {
    pulses
        .chunks_exact(2)
        .enumerate()
        .map(|(k, pair)| {
            let w = Complex64::from_polar(1.0, 2.0 * k as f64 * theta)
                - Complex64::from_polar(1.0, (2 * k + 1) as f64 * theta);
            w * correlation_at(&pair[0], &pair[1], m) as f64
        })
        .sum()
}

/// Chip signal of Alamouti waveform-matrix entry `(row, col)` as
/// `(first chip index, chips)`. Odd columns hold time-reversed pulses that
/// start at chip `-(L-1)`.
pub fn alamouti_signal(pulses: &[UnimodularSequence], row: usize, col: usize) -> (i64, Vec<i64>) {
    let k = col / 2;
    let (x0, x1) = (pulses[2 * k].values(), pulses[2 * k + 1].values());
    let l = x0.len() as i64;
    let chips = |v: &[i8], sign: i64| v.iter().map(|c| sign * i64::from(*c)).collect::<Vec<_>>();
    let reversed = |v: &[i8], sign: i64| v.iter().rev().map(|c| sign * i64::from(*c)).collect::<Vec<_>>();
    match (row, col % 2) {
        (0, 0) => (0, chips(x0, 1)),
        (1, 0) => (0, chips(x1, 1)),
        (0, _) => (-(l - 1), reversed(x1, -1)),
        _ => (-(l - 1), reversed(x0, 1)),
    }
}

/// Entry `(i, j)` of `Σ_n e^{jnθ} s_{i,n} ⋆ s_{j,n}` at lag `m`, where `s_{i,n}`
/// is [`alamouti_signal`] and `⋆` is `Σ_t s_i[t + m]·s_j[t]`.
pub fn matrix_entry_at(pulses: &[UnimodularSequence], theta: f64, i: usize, j: usize, m: i64) -> Complex64 {
    (0..pulses.len())
        .map(|n| {
            let (si, a) = alamouti_signal(pulses, i, n);
            let (sj, b) = alamouti_signal(pulses, j, n);
            let mut acc = 0i64;
            for (t, bt) in b.iter().enumerate() {
                let idx = sj + t as i64 + m - si;
                if idx >= 0 && (idx as usize) < a.len() {
                    acc += a[idx as usize] * bt;
                }
            }
            Complex64::from_polar(1.0, n as f64 * theta) * acc as f64
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::GolayPair;

    #[test]
    fn builtin_pair_correlations() {
        let p = GolayPair::builtin8();
        for k in -7..=7 {
            let s = correlation_at(p.a(), p.a(), k) + correlation_at(p.b(), p.b(), k);
            assert_eq!(s, if k == 0 { 16 } else { 0 });
        }
        assert_eq!(correlation_at(p.a(), p.a(), 8), 0);
    }

    #[test]
    fn matrix_entries_agree_with_named_forms() {
        let p = GolayPair::builtin8();
        let pulses = vec![
            p.a().clone(),
            p.b().clone(),
            p.b().reverse_conjugate().negate(),
            p.a().reverse_conjugate(),
        ];
        for m in -7..=7 {
            let d = matrix_entry_at(&pulses, 0.3, 0, 0, m) - composite_at(&pulses, 0.3, m);
            assert!(d.norm() < 1e-12);
            let d = matrix_entry_at(&pulses, 0.3, 0, 1, m) - offdiag_at(&pulses, 0.3, m);
            assert!(d.norm() < 1e-12);
            let expect = if m == 0 { 32.0 } else { 0.0 };
            assert_eq!(matrix_entry_at(&pulses, 0.0, 1, 1, m), Complex64::new(expect, 0.0));
            assert_eq!(matrix_entry_at(&pulses, 0.0, 1, 0, m), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn offdiag_vanishes_without_doppler() {
        let p = GolayPair::builtin8();
        let pulses = vec![p.a().clone(), p.b().clone()];
        for m in -7..=7 {
            assert_eq!(offdiag_at(&pulses, 0.0, m), Complex64::new(0.0, 0.0));
        }
    }
}
