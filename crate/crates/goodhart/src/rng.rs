//! Counter-based random streams for reproducible, parallel-safe sampling.
//!
//! Every variate is a pure function of `(seed, index)`, so a population can be
//! filled in parallel over arbitrary chunkings and still come out bit-identical
//! to a sequential fill. The generator is splitmix64 applied to the index
//! stream, with Box-Muller for normals.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 output for the `index`-th state of a stream started at `seed`.
#[inline]
fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)` with 53-bit resolution, keyed by `(seed, index)`.
#[inline]
pub fn unit_from(seed: u64, index: u64) -> f64 {
    (mix(seed, index) >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// A seeded stream of standard normal pairs addressable by index.
#[derive(Debug, Clone, Copy)]
pub struct NormalStream {
    seed: u64,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream { seed }
    }

    /// The `index`-th pair of independent standard normals.
    #[inline]
    pub fn standard_pair(&self, index: u64) -> (f64, f64) {
        let a = mix(self.seed, index.wrapping_mul(2));
        let b = mix(self.seed, index.wrapping_mul(2).wrapping_add(1));
        // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
        let u1 = ((a >> 11) + 1) as f64 * (1.0 / 9007199254740992.0);
        let u2 = (b >> 11) as f64 * (1.0 / 9007199254740992.0);
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }

    /// The `index`-th single standard normal draw.
    #[inline]
    pub fn standard(&self, index: u64) -> f64 {
        self.standard_pair(index).0
    }
}
