//! Seeded pseudo-random number generation.
//!
//! All randomness in the crate flows through [`SplitMix64`] so that every
//! sampled channel, state, and search trial is reproducible from a 64-bit
//! seed. No platform entropy is used anywhere in library code.

use crate::linalg::Complex64;

/// SplitMix64 generator.
///
/// State update: `s += 0x9E3779B97F4A7C15`; output: `z = s`,
/// `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9`,
/// `z = (z ^ (z >> 27)) * 0x94D049BB133111EB`, `z ^ (z >> 31)`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`, using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex Gaussian (`E|z|^2 = 1`) via the polar form of
    /// Box-Muller: `sqrt(-ln u1) e^{2 pi i u2}` with `u1` in `(0, 1]`.
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        let radius = (-u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        Complex64::new(radius * angle.cos(), radius * angle.sin())
    }

    /// Independent generator seeded from this stream, for per-trial
    /// sub-streams.
    pub fn fork(&mut self) -> SplitMix64 {
        SplitMix64::new(self.next_u64())
    }
}
