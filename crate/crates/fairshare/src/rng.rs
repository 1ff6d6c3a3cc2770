//! Counter-based random streams.
//!
//! Seeded simulations here must be bit-reproducible across runs and across
//! worker counts, so instead of a stateful generator each (seed, stream)
//! pair owns a pure function from a counter to a uniform draw. Any walker
//! can then be replayed in isolation and work can be split across threads
//! without changing a single draw.
//!
//! The mixing function is the splitmix64 finalizer, applied twice when
//! deriving the stream key.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One independent stream of uniform draws, addressed by counter.
#[derive(Clone, Copy, Debug)]
pub struct CounterStream {
    key: u64,
}

impl CounterStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix(mix(seed.wrapping_add(GAMMA.wrapping_mul(stream.wrapping_add(1)))));
        CounterStream { key }
    }

    #[inline]
    pub fn bits(&self, counter: u64) -> u64 {
        mix(self.key.wrapping_add(GAMMA.wrapping_mul(counter.wrapping_add(1))))
    }

    /// Uniform draw in the half-open interval (0, 1].
    ///
    /// The lower end is excluded so the draw can feed `ln` directly.
    #[inline]
    pub fn u01(&self, counter: u64) -> f64 {
        ((self.bits(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform angle in [0, 2*pi).
    #[inline]
    pub fn angle(&self, counter: u64) -> f64 {
        // u01 is in (0,1]; flip to [0,1) so the angle never reaches 2*pi.
        (1.0 - self.u01(counter)) * std::f64::consts::TAU
    }

    /// Standard normal via Box-Muller from two counter slots.
    #[inline]
    pub fn normal(&self, counter: u64) -> f64 {
        let r = (-2.0 * self.u01(counter).ln()).sqrt();
        r * (std::f64::consts::TAU * (1.0 - self.u01(counter + 1))).cos()
    }
}
