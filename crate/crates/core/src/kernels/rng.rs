//! Minimal-standard linear congruential generator.
//!
//! The simulated cores cannot rely on a host `rand()`, so every random draw
//! in the system (behavior policy, slippery moves, RAN sampling, epsilon
//! decisions) goes through this one routine: `x' = 16807 * x mod (2^31 - 1)`.
//! State is carried explicitly so each simulated core owns its own stream.

/// LCG multiplier.
const LCG_A: u64 = 16807;
/// LCG modulus, the Mersenne prime 2^31 - 1.
const LCG_M: u64 = 0x7fff_ffff;

/// Explicit LCG state. Always in `[1, 2^31 - 2]`; zero is unreachable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState {
    x: u64,
}

impl RngState {
    /// Seed a stream from an arbitrary 64-bit value. Seeds that reduce to
    /// zero under the modulus are remapped to 1 so the recurrence never
    /// collapses.
    pub fn from_seed(seed: u64) -> Self {
        let x = seed % LCG_M;
        RngState {
            x: if x == 0 { 1 } else { x },
        }
    }

    /// Derive the stream for a numbered consumer (core id, episode index,
    /// policy vs environment) by offsetting the seed and advancing one LCG
    /// step. Distinct stream ids always yield distinct states because the
    /// step is a bijection on the field.
    pub fn derive_stream(seed: u64, stream: u64) -> Self {
        let mut rng = RngState::from_seed(seed.wrapping_add(stream));
        rng.next_value();
        rng
    }

    /// Advance one step and return the new 31-bit value (never zero).
    pub fn next_value(&mut self) -> u32 {
        // 16807 * (2^31 - 2) fits comfortably in 64 bits.
        self.x = (LCG_A * self.x) % LCG_M;
        self.x as u32
    }

    /// Uniform draw in `[0, n)` by one LCG step and a modulus.
    ///
    /// Panics if `n` is zero or exceeds the generator period; the modulo
    /// bias for the small `n` used here is below 2^-30.
    pub fn below(&mut self, n: u32) -> u32 {
        assert!(
            n >= 1 && (n as u64) < LCG_M,
            "rand_below range {n} out of domain"
        );
        self.next_value() % n
    }

    /// Raw state, exposed for tests that replay traces.
    pub fn state(&self) -> u64 {
        self.x
    }
}
