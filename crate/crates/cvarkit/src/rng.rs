//! Counter-based pseudo-random streams for reproducible experiments.
//!
//! Every experiment draws from a [`Stream`]: a SplitMix64-style generator
//! whose output at counter `i` is a pure function of `(seed, stream id, i)`.
//! Streams never share state, so scenario generation, measurement maps and
//! signal construction can be re-run independently with identical results.
//! Stream ids used by the crate are listed in [`streams`].

/// Well-known stream ids, one per experiment family.
pub mod streams {
    /// Portfolio scenario sampling (normal and skewed).
    pub const SCENARIOS: u64 = 1;
    /// Gaussian measurement maps for recovery experiments.
    pub const PHI: u64 = 2;
    /// Signal construction for recovery experiments.
    pub const SIGNAL: u64 = 3;
    /// Terminal share-price simulation for hedging.
    pub const PRICES: u64 = 4;
    /// Random hyperplanes for the atom-projection experiment.
    pub const PROJECT: u64 = 5;
    /// Input vectors for the norm benchmark.
    pub const BENCH: u64 = 6;
    /// Miscellaneous test data.
    pub const TEST: u64 = 7;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seeded, counter-based random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
    gauss_cache: Option<f64>,
}

impl Stream {
    /// Stream identified by `(seed, stream_id)`.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self::from_ids(seed, &[stream_id])
    }

    /// Stream identified by a seed plus an arbitrary id path, e.g.
    /// `(seed, [PHI, trial, n])` for the Φ used by one recovery trial.
    pub fn from_ids(seed: u64, ids: &[u64]) -> Self {
        let mut key = mix(seed.wrapping_add(GOLDEN));
        for &id in ids {
            key = mix(key ^ id.wrapping_mul(GOLDEN).wrapping_add(GOLDEN));
        }
        Stream { key, counter: 0, gauss_cache: None }
    }

    /// Child stream derived from this one; independent of later draws here.
    pub fn substream(&self, id: u64) -> Stream {
        Stream {
            key: mix(self.key ^ id.wrapping_mul(GOLDEN).wrapping_add(GOLDEN)),
            counter: 0,
            gauss_cache: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1); safe as a logarithm argument.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller; pairs are cached.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.gauss_cache.take() {
            return z;
        }
        let u = self.uniform_open();
        let v = self.uniform();
        let r = (-2.0 * u.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * v;
        self.gauss_cache = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Gamma(shape, 1) for shape >= 1 via Marsaglia-Tsang.
    pub fn gamma(&mut self, shape: f64) -> f64 {
        assert!(shape >= 1.0, "gamma sampler requires shape >= 1");
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.gaussian();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v3 = v * v * v;
            let u = self.uniform_open();
            if u.ln() < 0.5 * x * x + d - d * v3 + d * v3.ln() {
                return d * v3;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = Stream::new(7, streams::SCENARIOS);
        let mut b = Stream::new(7, streams::SCENARIOS);
        let mut c = Stream::new(7, streams::PHI);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let zs: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn substream_is_independent_of_parent_position() {
        let parent = Stream::new(3, streams::SIGNAL);
        let mut advanced = parent.clone();
        for _ in 0..100 {
            advanced.next_u64();
        }
        let mut s1 = parent.substream(5);
        let mut s2 = advanced.substream(5);
        assert_eq!(s1.next_u64(), s2.next_u64());
    }

    #[test]
    fn gaussian_moments() {
        let mut s = Stream::new(11, streams::TEST);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let z = s.gaussian();
            sum += z;
            sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn gamma_moments() {
        let shape = 8.0;
        let mut s = Stream::new(13, streams::TEST);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let g = s.gamma(shape);
            sum += g;
            sq += g * g;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!((mean - shape).abs() < 0.05, "mean {mean}");
        assert!((var - shape).abs() < 0.15, "var {var}");
    }

    #[test]
    fn uniform_open_stays_inside_unit_interval() {
        let mut s = Stream::new(17, streams::TEST);
        for _ in 0..10_000 {
            let u = s.uniform_open();
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
