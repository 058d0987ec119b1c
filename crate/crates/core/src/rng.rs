//! Counter-addressed random numbers.
//!
//! Every draw is a pure function of `(seed, stream, index)`: a ChaCha8 keystream
//! keyed by the seed, with the stream selector naming the consumer (for example
//! the noise of path `p`) and draw `n` living at keystream word `4n`. Draws never
//! depend on which worker produced them or in what order.

use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math;

/// Which consumer owns a keystream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    /// Gaussian increments of Monte Carlo path `index`.
    Noise(u64),
    /// Volatility draws of scenario `index` (i.i.d. policies).
    Volatility(u64),
    /// Geometry sampling (boundary points, pair tests).
    Sampling(u64),
    /// Deterministic driver generation.
    Driver(u64),
}

impl Stream {
    fn id(self) -> u64 {
        let (tag, idx) = match self {
            Stream::Noise(i) => (0, i),
            Stream::Volatility(i) => (1, i),
            Stream::Sampling(i) => (2, i),
            Stream::Driver(i) => (3, i),
        };
        (idx << 2) | tag
    }
}

/// A seekable generator for one `(seed, stream)` pair.
#[derive(Clone, Debug)]
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64, stream: Stream) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream.id());
        inner.set_word_pos(0);
        Self { inner }
    }

    /// Position the generator at draw `index`.
    pub fn seek(&mut self, index: u64) {
        self.inner.set_word_pos(u128::from(index) * 4);
    }

    fn pair(&mut self) -> (u64, u64) {
        (self.inner.next_u64(), self.inner.next_u64())
    }

    /// Uniform on `[0, 1)`; consumes one draw.
    pub fn uniform(&mut self) -> f64 {
        let (a, _) = self.pair();
        (a >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`; consumes one draw.
    pub fn below(&mut self, n: usize) -> usize {
        let u = self.uniform();
        ((u * n as f64) as usize).min(n.saturating_sub(1))
    }

    /// Standard normal by Box–Muller; consumes one draw.
    pub fn normal(&mut self) -> f64 {
        let (a, b) = self.pair();
        // (0, 1] so the logarithm is finite
        let u1 = ((a >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * PI * u2)
    }

    /// A uniformly distributed unit vector.
    pub fn unit_vector<const D: usize>(&mut self) -> crate::Point<D> {
        loop {
            let mut p = crate::Point::<D>::zero();
            for i in 0..D {
                p[i] = self.normal();
            }
            if let Some(u) = p.normalized() {
                return u;
            }
        }
    }
}
