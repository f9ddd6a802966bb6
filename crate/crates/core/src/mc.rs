//! Seeded random streams, graph samplers and the signed-count hypothesis test.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counts::{signed_count, CountError, SampledGraph};
use crate::fourier::{self, FourierError, DEFAULT_BUDGET};
use crate::graphs::{copies_in_complete, GraphError, PatternGraph};
use crate::sbm::SbmModel;

/// A reproducible random stream: ChaCha8 keyed by `master_seed`, on stream
/// `stream_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeededStream { master_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.master_seed);
        r.set_stream(self.stream_index);
        r
    }

    /// Sub-stream `i`, same master seed.
    pub fn child(&self, i: u64) -> Self {
        SeededStream { master_seed: self.master_seed, stream_index: splitmix64(splitmix64(self.stream_index) ^ i) }
    }
}

#[derive(Debug, Error)]
pub enum McError {
    #[error("pattern has {h} vertices but n = {n}")]
    PatternTooLarge { h: usize, n: u64 },
    #[error("need at least {0}")]
    TooFewSamples(&'static str),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

// ----------------------------------------------------------------- sampling

/// `G(n, 1/2)`.
pub fn sample_er(n: usize, stream: &SeededStream) -> SampledGraph {
    let mut rng = stream.rng();
    let mut g = SampledGraph::empty(n);
    for i in 0..n {
        let mut j = i + 1;
        while j < n {
            let bits: u64 = rng.random();
            let take = (n - j).min(64);
            for b in 0..take {
                if bits >> b & 1 == 1 {
                    g.set_edge(i, j + b, true);
                }
            }
            j += take;
        }
    }
    g
}

/// Labels i.i.d. from `p`, then each pair independently with probability
/// `(1 + Q[x_i][x_j]) / 2`. Labels are kept on the result.
pub fn sample_sbm(m: &SbmModel, n: usize, stream: &SeededStream) -> SampledGraph {
    let mut rng = stream.rng();
    let labels = sample_labels(m, n, &mut rng);
    let mut g = SampledGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < m.edge_probability(labels[i] as usize, labels[j] as usize) {
                g.set_edge(i, j, true);
            }
        }
    }
    g.with_labels(labels)
}

fn sample_labels<R: Rng>(m: &SbmModel, n: usize, rng: &mut R) -> Vec<u32> {
    if m.k() == 1 {
        return vec![0; n];
    }
    let w = WeightedIndex::new(m.p()).expect("validated probabilities");
    (0..n).map(|_| w.sample(rng) as u32).collect()
}

// --------------------------------------------------------------- the test

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMode {
    /// Pair enumeration; fails when out of budget.
    Exact,
    /// Empirical variance over this many planted samples.
    MonteCarlo { trials: usize },
    /// Exact when possible, otherwise Monte-Carlo with twice the trials.
    Auto { trials: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    pub h: PatternGraph,
    pub n: u64,
    pub model: SbmModel,
    pub phi: f64,
    pub psi: f64,
    pub null_sigma: f64,
    pub planted_mean: f64,
    pub planted_sigma: f64,
    pub variance_exact: bool,
    /// `|mu| sigma_0 / (sigma_0 + sigma_1)`, compared against `sign(mu) SC`.
    pub threshold: f64,
    pub separation_ratio: f64,
}

impl TestSpec {
    /// Declares "planted" for a signed count; never does when the planted mean is zero.
    pub fn rejects_null(&self, sc: i64) -> bool {
        if self.planted_mean == 0.0 {
            return false;
        }
        self.planted_mean.signum() * sc as f64 >= self.threshold
    }
}

pub fn build_test(m: &SbmModel, h: &PatternGraph, n: u64, mode: VarianceMode, stream: &SeededStream) -> Result<TestSpec, McError> {
    if (h.vertex_count() as u64) > n {
        return Err(McError::PatternTooLarge { h: h.vertex_count(), n });
    }
    let f = fourier::phi(m, h)?;
    let copies = copies_in_complete(h, n)?;
    let null_sigma = (copies as f64).sqrt();
    let planted_mean = copies as f64 * f.phi;
    let exact = || fourier::planted_variance_sc(m, h, n, DEFAULT_BUDGET);
    let (variance, variance_exact) = match mode {
        VarianceMode::Exact => (exact()?, true),
        VarianceMode::MonteCarlo { trials } => (mc_variance(m, h, n, trials, stream)?, false),
        VarianceMode::Auto { trials } => match exact() {
            Ok(v) => (v, true),
            Err(FourierError::BudgetExceeded { .. }) | Err(FourierError::Graph(_)) => (mc_variance(m, h, n, 2 * trials, stream)?, false),
            Err(e) => return Err(e.into()),
        },
    };
    let planted_sigma = variance.max(0.0).sqrt();
    let threshold = planted_mean.abs() * null_sigma / (null_sigma + planted_sigma);
    let separation_ratio = planted_mean.abs() / null_sigma.max(planted_sigma);
    Ok(TestSpec {
        h: *h,
        n,
        model: m.clone(),
        phi: f.phi,
        psi: f.psi,
        null_sigma,
        planted_mean,
        planted_sigma,
        variance_exact,
        threshold,
        separation_ratio,
    })
}

fn mc_variance(m: &SbmModel, h: &PatternGraph, n: u64, trials: usize, stream: &SeededStream) -> Result<f64, McError> {
    if trials < 2 {
        return Err(McError::TooFewSamples("two variance trials"));
    }
    let counts: Vec<i64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| signed_count(&sample_sbm(m, n as usize, &stream.child(t)), h))
        .collect::<Result<_, _>>()?;
    Ok(sample_variance(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>()))
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub trials: usize,
    pub type1_rate: f64,
    pub type2_rate: f64,
    pub threshold: f64,
    pub separation_ratio: f64,
}

/// Runs `trials` null and `trials` planted samples. Trial `t` uses child
/// streams `2t` (null) and `2t + 1` (planted), so the report does not depend
/// on the number of worker threads.
pub fn estimate_power(spec: &TestSpec, trials: usize, stream: &SeededStream) -> Result<PowerReport, McError> {
    if trials == 0 {
        return Err(McError::TooFewSamples("one trial"));
    }
    let n = spec.n as usize;
    let outcomes: Vec<(bool, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<(bool, bool), CountError> {
            let null = signed_count(&sample_er(n, &stream.child(2 * t)), &spec.h)?;
            let planted = signed_count(&sample_sbm(&spec.model, n, &stream.child(2 * t + 1)), &spec.h)?;
            Ok((spec.rejects_null(null), spec.rejects_null(planted)))
        })
        .collect::<Result<_, _>>()?;
    let false_alarms = outcomes.iter().filter(|o| o.0).count();
    let misses = outcomes.iter().filter(|o| !o.1).count();
    Ok(PowerReport {
        trials,
        type1_rate: false_alarms as f64 / trials as f64,
        type2_rate: misses as f64 / trials as f64,
        threshold: spec.threshold,
        separation_ratio: spec.separation_ratio,
    })
}

const PHI_BLOCK: usize = 4096;

/// Monte-Carlo estimate of `Phi(H)`: labels for the pattern's vertices and
/// its edges only. Returns `(mean, standard error)`.
pub fn estimate_phi_mc(m: &SbmModel, h: &PatternGraph, samples: usize, stream: &SeededStream) -> Result<(f64, f64), McError> {
    if samples < 2 {
        return Err(McError::TooFewSamples("two samples"));
    }
    let hv = h.vertex_count();
    let edges = h.edges();
    let blocks = samples.div_ceil(PHI_BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.child(b as u64).rng();
            let count = PHI_BLOCK.min(samples - b * PHI_BLOCK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let labels = sample_labels(m, hv, &mut rng);
                let mut sign = 1.0;
                for &(u, v) in &edges {
                    if rng.random::<f64>() >= m.edge_probability(labels[u] as usize, labels[v] as usize) {
                        sign = -sign;
                    }
                }
                s += sign;
                s2 += sign * sign;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}
