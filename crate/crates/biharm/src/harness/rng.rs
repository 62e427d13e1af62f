//! Seeded pseudo-random numbers for noise synthesis and randomized checks.
//!
//! The generator is SplitMix64.  Its update recurrence is documented here in
//! full so that any other implementation can reproduce noise streams
//! bit-for-bit:
//!
//! ```text
//! state <- state + 0x9E3779B97F4A7C15                 (mod 2^64)
//! z <- state
//! z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9         (mod 2^64)
//! z <- (z XOR (z >> 27)) * 0x94D049BB133111EB         (mod 2^64)
//! output <- z XOR (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits: `u = (output >> 11) * 2^-53`, so
//! `u` lies in `[0, 1)`.  Standard normals use the Box-Muller transform on
//! two consecutive uniforms: `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)` and the
//! matching sine for the second variate.

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Derive a child stream, giving each dataset an independent stream
    /// from one experiment seed.
    pub fn child(seed: u64, index: u64) -> Self {
        let mut base = SplitMix64::new(seed ^ index.wrapping_mul(0xA076_1D64_78BD_642F));
        SplitMix64::new(base.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Pair of independent standard normals (Box-Muller).
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let a = 2.0 * std::f64::consts::PI * u2;
        (r * a.cos(), r * a.sin())
    }
}
