//! Doppler-resilient Golay complementary waveforms.
//!
//! A Golay pair `(x, y)` has autocorrelations that sum to an impulse, so a
//! train of pairs has a perfect composite ambiguity function along the
//! zero-Doppler axis. Off that axis the sidelobes come back. Ordering the
//! pairs in the train according to the Prouhet-Thue-Morse sequence cancels the
//! low-order Taylor terms of the ambiguity function in Doppler, which keeps the
//! range sidelobes close to zero for small Doppler shifts. The same ordering,
//! applied to Alamouti blocks, does the job for two-channel polarimetric radar.
//!
//! Modules, bottom-up:
//!
//! - [`sequences`]: ±1 sequences, Golay pairs, the PTM sequence, Prouhet partitions.
//! - [`laurent`]: exact two-sided polynomials in `z^-1` and correlations.
//! - [`trains`]: PTM and conventional pulse trains, Alamouti waveform matrices,
//!   and the structural checks that guarantee Doppler resilience.
//! - [`ambiguity`]: composite and matrix-valued ambiguity functions, their
//!   Taylor coefficients, delay-Doppler grids, and sidelobe metrics.
//! - [`radarsim`]: noisy point-target returns and the receivers that process them.
//! - [`reference`]: slow definition-level evaluations used for cross-checking.
//!
//! ```
//! use dopgolay_core::{ambiguity, trains, Doppler, GolayPair};
//!
//! let seed = GolayPair::builtin8();
//! let resilient = trains::ptm_train(&seed, 3).unwrap();
//! let baseline = trains::conventional_train(&seed, 3).unwrap();
//! let theta = Doppler::new(0.05).unwrap();
//!
//! let psl = |t| ambiguity::peak_sidelobe(&ambiguity::composite_ambiguity(t, theta), true);
//! assert!(psl(&baseline) > 100.0 * psl(&resilient));
//! ```

pub mod ambiguity;
pub mod error;
pub mod laurent;
pub mod radarsim;
pub mod reference;
pub mod sequences;
pub mod trains;

pub use ambiguity::{AmbiguityGrid, Channel, Doppler, MatrixAmbiguity, TaylorCoefficient, Waveform};
pub use error::{Error, Result};
pub use laurent::{autocorr, xcorr, Coefficient, LaurentPoly};
pub use num_complex::Complex64;
pub use radarsim::{HypothesisStats, LagSeries, NoiseSpec, PointTarget, ReturnSet, Scattering};
pub use sequences::{GolayPair, ProuhetPartition, PtmBits, UnimodularSequence};
pub use trains::{PulseTrain, Scheme, WaveformMatrix};
