//! Seeded, partitioned Monte Carlo driver.
//!
//! Samples are split into fixed-size chunks. Chunk `k` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `k`, chunks are processed in
//! parallel, and their accumulators are merged in chunk order. The result
//! therefore depends only on `(seed, samples, CHUNK_SIZE)` and not on the
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ballgeom::{BallScale, LpBallSpec};
use crate::error::{Error, Result};
use crate::measures::ProductMeasure;

pub const CHUNK_SIZE: usize = 16_384;

/// A source of i.i.d. random vectors in `ℝ^n`.
pub trait Sampler: Sync {
    fn dim(&self) -> usize;
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]);
    fn label(&self) -> String;
}

impl Sampler for ProductMeasure {
    fn dim(&self) -> usize {
        self.n
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        self.sample(rng, out);
    }
    fn label(&self) -> String {
        format!("{}^{}", self.base, self.n)
    }
}

/// Uniform sampler on an `L_p` ball with the radius computed once.
#[derive(Debug, Clone, Copy)]
pub struct BallSampler {
    pub spec: LpBallSpec,
    radius: f64,
}

impl BallSampler {
    pub fn new(spec: LpBallSpec) -> Self {
        BallSampler { spec, radius: spec.radius() }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Sampler for BallSampler {
    fn dim(&self) -> usize {
        self.spec.n
    }
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        self.spec.sample_into(rng, self.radius, out);
    }
    fn label(&self) -> String {
        let scale = match self.spec.scale {
            BallScale::Unit => "unit",
            BallScale::Isotropic => "iso",
        };
        format!("ball(n={}, p={}, {scale})", self.spec.n, self.spec.p)
    }
}

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Folds every sample into a per-chunk accumulator and merges the chunk
/// accumulators left to right.
pub fn run_chunks<S, A, I, F, M>(sampler: &S, samples: usize, seed: u64, init: I, step: F, merge: M) -> A
where
    S: Sampler + ?Sized,
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &[f64]) + Sync,
    M: Fn(A, A) -> A,
{
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k);
            let mut acc = init();
            let mut x = vec![0.0; sampler.dim()];
            let len = CHUNK_SIZE.min(samples - k * CHUNK_SIZE);
            for _ in 0..len {
                sampler.sample_into(&mut rng, &mut x);
                step(&mut acc, &x);
            }
            acc
        })
        .collect();
    parts.into_iter().fold(init(), merge)
}

/// Running power sums of a scalar statistic, merged exactly in chunk order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PowerSums {
    pub count: u64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
}

impl PowerSums {
    /// Accumulates `y`; callers shift by a reference value first when the
    /// mean is far from zero.
    pub fn push(&mut self, y: f64) {
        let y2 = y * y;
        self.count += 1;
        self.s1 += y;
        self.s2 += y2;
        self.s3 += y2 * y;
        self.s4 += y2 * y2;
    }

    pub fn merge(mut self, other: PowerSums) -> PowerSums {
        self.count += other.count;
        self.s1 += other.s1;
        self.s2 += other.s2;
        self.s3 += other.s3;
        self.s4 += other.s4;
        self
    }

    pub fn mean(&self) -> f64 {
        self.s1 / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let n = self.count as f64;
        let m = self.mean();
        ((self.s2 - n * m * m) / (n - 1.0)).max(0.0)
    }

    pub fn mean_stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    /// Central moment `E[(Y − EY)^4]` from the raw power sums.
    pub fn central_fourth(&self) -> f64 {
        let n = self.count as f64;
        let m = self.mean();
        let (e2, e3, e4) = (self.s2 / n, self.s3 / n, self.s4 / n);
        e4 - 4.0 * m * e3 + 6.0 * m * m * e2 - 3.0 * m.powi(4)
    }

    /// Large-sample standard error of the sample variance,
    /// `√((μ₄ − σ⁴)/N)`.
    pub fn variance_stderr(&self) -> f64 {
        let v = self.variance();
        ((self.central_fourth() - v * v).max(0.0) / self.count as f64).sqrt()
    }
}

pub fn require_samples(samples: usize, min: usize) -> Result<()> {
    if samples < min {
        return Err(Error::InvalidArgument(format!("need at least {min} samples, got {samples}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Measure1D;

    #[test]
    fn thread_count_does_not_change_results() {
        let pm = ProductMeasure::new(Measure1D::standard_gaussian(), 3).unwrap();
        let run =
            || run_chunks(&pm, 50_000, 42, PowerSums::default, |a, x| a.push(x[0] * x[1] + x[2]), PowerSums::merge);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
        assert_eq!(one, four);
        assert_eq!(one.count, 50_000);
    }

    #[test]
    fn distinct_chunks_use_distinct_streams() {
        use rand::Rng;
        let a: u64 = chunk_rng(1, 0).random();
        let b: u64 = chunk_rng(1, 1).random();
        assert_ne!(a, b);
    }

    #[test]
    fn power_sum_statistics() {
        let mut p = PowerSums::default();
        for y in [1.0, 2.0, 3.0, 4.0] {
            p.push(y);
        }
        assert_eq!(p.mean(), 2.5);
        assert!((p.variance() - 5.0 / 3.0).abs() < 1e-15);
        // Central fourth moment of {1,2,3,4}: (2·1.5⁴ + 2·0.5⁴)/4.
        assert!((p.central_fourth() - (2.0 * 1.5f64.powi(4) + 2.0 * 0.5f64.powi(4)) / 4.0).abs() < 1e-12);
    }
}
