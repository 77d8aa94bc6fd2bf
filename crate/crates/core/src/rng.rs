//! The portable random stream used for every seeded draw in the pipeline.
//!
//! The generator is xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). All higher-level draws are defined
//! here in terms of `next_u64` so that other implementations can reproduce
//! datasets and initializations exactly:
//!
//! * `next_f64`: `(next_u64() >> 11) * 2^-53`, uniform on `[0, 1)`.
//! * `uniform(lo, hi)`: `lo + (hi - lo) * next_f64()`.
//! * `int_in(lo, hi)`: inclusive range of size `r`; draw `x = next_u64()`
//!   until `x < 2^64 - (2^64 mod r)`, return `lo + x mod r`.
//! * `normal()`: Box–Muller, `u1 = 1 - next_f64()`, `u2 = next_f64()`,
//!   returns `sqrt(-2 ln u1) * cos(2π u2)` (the sine branch is discarded).
//! * `shuffle`: Fisher–Yates from the last index down, swapping `i` with
//!   `int_in(0, i)`.

use core::f64::consts::PI;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::math;

/// A source of raw 64-bit draws. Everything else is derived.
pub trait Draw {
    fn next_u64(&mut self) -> u64;

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    fn int_in(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty integer range");
        let span = hi - lo;
        if span == u64::MAX {
            return self.next_u64();
        }
        let r = span + 1;
        let zone = u64::MAX - (u64::MAX - r + 1) % r;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return lo + x % r;
            }
        }
    }

    fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * PI * u2)
    }

    fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.int_in(0, i as u64) as usize;
            items.swap(i, j);
        }
    }
}

/// xoshiro256++ seeded via SplitMix64.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededRng(Xoshiro256PlusPlus);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// An independent stream derived from this seed and a label, used to keep
    /// e.g. model initialization and data shuffling decoupled.
    pub fn derived(seed: u64, stream: u64) -> Self {
        let mixed = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
        Self::new(mixed)
    }
}

impl Draw for SeededRng {
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
}
