//! Stochastic block model parameters, family classification, random model
//! generators and the named example constructions.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mc::SeededStream;

/// Row-mean magnitude below which a model counts as fully unbiased.
pub const DEFAULT_UNBIASED_TOL: f64 = 1e-10;

const SUM_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SbmError {
    #[error("model needs at least one community")]
    Empty,
    #[error("Q must be {k}x{k}")]
    Shape { k: usize },
    #[error("p[{index}] = {value} must be positive and finite")]
    BadProbability { index: usize, value: f64 },
    #[error("probabilities sum to {0}, not 1")]
    BadSum(f64),
    #[error("|Q[{i}][{j}]| = {value} exceeds 1")]
    EntryOutOfRange { i: usize, j: usize, value: f64 },
    #[error("Q is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("invalid random family: {0}")]
    InvalidFamily(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
}

/// `SBM(p, Q)`: labels drawn i.i.d. from `p`, edge `{i, j}` present with
/// probability `(1 + Q[x_i][x_j]) / 2`.
#[derive(Clone, PartialEq)]
pub struct SbmModel {
    p: Vec<f64>,
    /// Row-major `k x k`, exactly symmetric.
    q: Vec<f64>,
}

/// Validates and builds a model. `Q` may be asymmetric by at most `1e-12`, in
/// which case it is symmetrised by averaging.
pub fn make_sbm(p: Vec<f64>, q: Vec<Vec<f64>>) -> Result<SbmModel, SbmError> {
    let k = p.len();
    if k == 0 {
        return Err(SbmError::Empty);
    }
    if q.len() != k || q.iter().any(|row| row.len() != k) {
        return Err(SbmError::Shape { k });
    }
    for (index, &value) in p.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(SbmError::BadProbability { index, value });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(SbmError::BadSum(sum));
    }
    let mut flat = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let value = q[i][j];
            if !value.is_finite() || value.abs() > 1.0 {
                return Err(SbmError::EntryOutOfRange { i, j, value });
            }
            if (value - q[j][i]).abs() > SYMMETRY_TOL {
                return Err(SbmError::Asymmetric { i, j });
            }
            flat[i * k + j] = if i == j { value } else { 0.5 * (q[i][j] + q[j][i]) };
        }
    }
    Ok(SbmModel { p, q: flat })
}

impl SbmModel {
    /// `G(n, 1/2)` as a one-community model with `Q = 0`.
    pub fn erdos_renyi() -> Self {
        SbmModel { p: vec![1.0], q: vec![0.0] }
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.k() + j]
    }

    /// `Q` row-major.
    pub fn q_flat(&self) -> &[f64] {
        &self.q
    }

    pub fn q_rows(&self) -> Vec<Vec<f64>> {
        self.q.chunks(self.k()).map(|r| r.to_vec()).collect()
    }

    pub fn min_p(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_q(&self) -> f64 {
        self.q.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Probability that a vertex pair with labels `(x, y)` is adjacent.
    pub fn edge_probability(&self, x: usize, y: usize) -> f64 {
        0.5 * (1.0 + self.q(x, y))
    }
}

impl fmt::Debug for SbmModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SbmModel {{ p: {:?}, Q: {:?} }}", self.p, self.q_rows())
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    p: Vec<f64>,
    #[serde(rename = "Q")]
    q: Vec<Vec<f64>>,
}

impl Serialize for SbmModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModelJson { p: self.p.clone(), q: self.q_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SbmModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = ModelJson::deserialize(d)?;
        make_sbm(raw.p, raw.q).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyTags {
    pub is_diagonal: bool,
    pub is_nonnegative: bool,
    /// `min_i p_i`.
    pub nonvanishing_c: f64,
    pub is_two_community: bool,
    pub is_fully_unbiased: bool,
}

pub fn classify(m: &SbmModel, tol: f64) -> FamilyTags {
    let k = m.k();
    let is_diagonal = (0..k).all(|i| (0..k).all(|j| i == j || m.q(i, j) == 0.0));
    FamilyTags {
        is_diagonal,
        is_nonnegative: m.q.iter().all(|&v| v >= 0.0),
        nonvanishing_c: m.min_p(),
        is_two_community: k == 2,
        is_fully_unbiased: community_row_means(m).iter().all(|l| l.abs() <= tol),
    }
}

/// Same `p`, entrywise `|Q|`.
pub fn abs_model(m: &SbmModel) -> SbmModel {
    SbmModel { p: m.p.clone(), q: m.q.iter().map(|v| v.abs()).collect() }
}

/// `lambda_x = sum_y p_y Q[x][y]`.
pub fn community_row_means(m: &SbmModel) -> Vec<f64> {
    let k = m.k();
    (0..k).map(|x| (0..k).map(|y| m.p[y] * m.q(x, y)).sum()).collect()
}

// ------------------------------------------------------ random generation

/// Parameter families sampled by the falsification search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomFamily {
    Diagonal,
    Nonnegative,
    /// Every community probability at least `c`.
    Nonvanishing(f64),
    TwoCommunity,
    Arbitrary,
}

impl RandomFamily {
    pub fn name(&self) -> String {
        match self {
            RandomFamily::Diagonal => "diagonal".into(),
            RandomFamily::Nonnegative => "nonnegative".into(),
            RandomFamily::Nonvanishing(c) => format!("nonvanishing({c})"),
            RandomFamily::TwoCommunity => "two_community".into(),
            RandomFamily::Arbitrary => "arbitrary".into(),
        }
    }
}

/// Prior knobs for [`random_sbm_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriorOptions {
    /// When set, community 0 gets probability `n_context^-spike` and the rest
    /// share the remainder by the Dirichlet draw.
    pub spike: Option<f64>,
}

impl Default for PriorOptions {
    fn default() -> Self {
        PriorOptions { spike: None }
    }
}

/// Draws a random model in `family` with `k` communities; `n_context` sets the
/// smallest `|Q|` scale (`1 / n_context`).
pub fn random_sbm(family: RandomFamily, k: usize, n_context: u64, stream: &SeededStream) -> Result<SbmModel, SbmError> {
    random_sbm_with(family, k, n_context, PriorOptions::default(), &mut stream.rng())
}

pub fn random_sbm_with<R: Rng + ?Sized>(
    family: RandomFamily,
    k: usize,
    n_context: u64,
    opts: PriorOptions,
    rng: &mut R,
) -> Result<SbmModel, SbmError> {
    if !(1..=8).contains(&k) {
        return Err(SbmError::InvalidFamily(format!("k = {k} outside [1, 8]")));
    }
    if n_context < 2 {
        return Err(SbmError::InvalidFamily("n_context must be at least 2".into()));
    }
    let log_n = (n_context as f64).ln();
    let p = match family {
        RandomFamily::Nonvanishing(c) => {
            if !(c > 0.0) || c * k as f64 > 1.0 + 1e-12 {
                return Err(SbmError::InvalidFamily(format!("nonvanishing({c}) with k = {k}")));
            }
            let slack = (1.0 - c * k as f64).max(0.0);
            let d = dirichlet(k, rng);
            let mut p: Vec<f64> = d.iter().map(|x| c + slack * x).collect();
            normalize(&mut p);
            p
        }
        RandomFamily::TwoCommunity => {
            if k != 2 {
                return Err(SbmError::InvalidFamily(format!("two_community needs k = 2, got {k}")));
            }
            let lo = -0.9 * log_n;
            let hi = 0.5f64.ln();
            let p1 = (lo + (hi - lo) * rng.random::<f64>()).exp();
            if rng.random::<bool>() {
                vec![p1, 1.0 - p1]
            } else {
                vec![1.0 - p1, p1]
            }
        }
        _ => match opts.spike {
            Some(alpha) if k >= 2 => {
                let spike = (-alpha * log_n).exp();
                let d = dirichlet(k - 1, rng);
                let mut p = vec![spike];
                p.extend(d.iter().map(|x| (1.0 - spike) * x));
                normalize(&mut p);
                p
            }
            _ => dirichlet(k, rng),
        },
    };
    let mut q = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let magnitude = (-log_n * rng.random::<f64>()).exp();
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let v = match family {
                RandomFamily::Diagonal if i != j => 0.0,
                RandomFamily::Nonnegative => magnitude,
                _ => sign * magnitude,
            };
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    make_sbm(p, q)
}

/// Symmetric Dirichlet(1) draw via normalised exponentials.
fn dirichlet<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    // An all-zero draw is impossible in exact arithmetic; guard the division anyway.
    if x.iter().all(|&v| v == 0.0) {
        x.iter_mut().for_each(|v| *v = 1.0);
    }
    normalize(&mut x);
    for v in x.iter_mut() {
        if *v <= 0.0 {
            *v = f64::MIN_POSITIVE;
        }
    }
    x
}

/// Scales to sum one, then folds the residual rounding into the largest entry.
fn normalize(p: &mut [f64]) {
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    let residual = 1.0 - p.iter().sum::<f64>();
    if let Some(big) = p.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *big += residual;
    }
}

// ----------------------------------------------------- example families

/// Named constructions with a known Fourier profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum ExampleFamily {
    /// `p = (1/2, 1/2)`, `Q = [[1, -1], [-1, 1]]`.
    DiagPm1,
    /// `p = (1/2, 1/2)`, `Q = diag(n^-beta, n^-beta)`, `beta in (3/4, 1)`.
    Star1Dominant { n: u64, beta: f64 },
    /// `p = (1/2, 1/2)`, `Q = diag(n^-beta, -n^-beta)`, `beta in (2/3, 3/4)`.
    Star2Dominant { n: u64, beta: f64 },
    /// `p = (n^-3/4, 1 - n^-3/4)`, off-diagonal `n^-beta` with
    /// `beta = (2D-1)/(4D) - 1/(8D(D-1))`.
    LargeStar { n: u64, d: usize },
    /// `k = q^2` labels `(a, b)`, uniform `p`, `Q = +1` when `a` matches and
    /// `b` differs, `-1` when `b` matches and `a` differs, else `0`.
    Quiet4Cycle { q: usize },
    /// Uniform `p` on `k` labels, `Q = 1` on the diagonal, `-1/(k-1)` off it.
    PlantedColoring { k: usize },
    /// Same model as [`ExampleFamily::DiagPm1`], used against `K_{2,4}`.
    OneToOneGap1,
    /// `p = (n^-alpha, 1 - n^-alpha)`, `Q = [[0, 1], [1, 0]]`.
    OneToOneGap2 { n: u64, alpha: f64 },
}

/// Largest `q` accepted for [`ExampleFamily::Quiet4Cycle`] (`k = q^2`).
pub const QUIET_MAX_Q: usize = 32;
/// Largest `k` accepted for [`ExampleFamily::PlantedColoring`].
pub const COLORING_MAX_K: usize = 2048;

impl ExampleFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ExampleFamily::DiagPm1 => "diag_pm1",
            ExampleFamily::Star1Dominant { .. } => "star1_dominant",
            ExampleFamily::Star2Dominant { .. } => "star2_dominant",
            ExampleFamily::LargeStar { .. } => "large_star",
            ExampleFamily::Quiet4Cycle { .. } => "quiet_4cycle",
            ExampleFamily::PlantedColoring { .. } => "planted_coloring",
            ExampleFamily::OneToOneGap1 => "one_to_one_gap_1",
            ExampleFamily::OneToOneGap2 { .. } => "one_to_one_gap_2",
        }
    }

    /// Planted colouring with `k = round(n^alpha)` communities, `alpha in (2/3, 3/4)`.
    pub fn planted_coloring_at(n: u64, alpha: f64) -> Result<Self, SbmError> {
        if !(alpha > 2.0 / 3.0 && alpha < 0.75) {
            return Err(SbmError::ParameterOutOfRange(format!("planted_coloring alpha = {alpha} outside (2/3, 3/4)")));
        }
        let k = (n as f64).powf(alpha).round() as usize;
        Ok(ExampleFamily::PlantedColoring { k })
    }
}

/// Exponent `beta` of the off-diagonal scale in [`ExampleFamily::LargeStar`].
pub fn large_star_beta(d: usize) -> f64 {
    let d = d as f64;
    (2.0 * d - 1.0) / (4.0 * d) - 1.0 / (8.0 * d * (d - 1.0))
}

fn open_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<(), SbmError> {
    if v > lo && v < hi {
        Ok(())
    } else {
        Err(SbmError::ParameterOutOfRange(format!("{name} = {v} outside ({lo}, {hi})")))
    }
}

pub fn construct_example(f: &ExampleFamily) -> Result<SbmModel, SbmError> {
    let pow = |n: u64, e: f64| (n as f64).powf(-e);
    let need_n = |n: u64| {
        if n >= 2 {
            Ok(())
        } else {
            Err(SbmError::ParameterOutOfRange(format!("n = {n} must be at least 2")))
        }
    };
    match *f {
        ExampleFamily::DiagPm1 | ExampleFamily::OneToOneGap1 => {
            make_sbm(vec![0.5, 0.5], vec![vec![1.0, -1.0], vec![-1.0, 1.0]])
        }
        ExampleFamily::Star1Dominant { n, beta } => {
            open_range("beta", beta, 0.75, 1.0)?;
            need_n(n)?;
            let s = pow(n, beta);
            make_sbm(vec![0.5, 0.5], vec![vec![s, 0.0], vec![0.0, s]])
        }
        ExampleFamily::Star2Dominant { n, beta } => {
            open_range("beta", beta, 2.0 / 3.0, 0.75)?;
            need_n(n)?;
            let s = pow(n, beta);
            make_sbm(vec![0.5, 0.5], vec![vec![s, 0.0], vec![0.0, -s]])
        }
        ExampleFamily::LargeStar { n, d } => {
            if !(3..=11).contains(&d) {
                return Err(SbmError::ParameterOutOfRange(format!("large_star D = {d} outside [3, 11]")));
            }
            need_n(n)?;
            let p1 = pow(n, 0.75);
            let s = pow(n, large_star_beta(d));
            make_sbm(vec![p1, 1.0 - p1], vec![vec![0.0, s], vec![s, 0.0]])
        }
        ExampleFamily::Quiet4Cycle { q } => {
            if !(3..=QUIET_MAX_Q).contains(&q) {
                return Err(SbmError::ParameterOutOfRange(format!("quiet_4cycle q = {q} outside [3, {QUIET_MAX_Q}]")));
            }
            let k = q * q;
            let label = |x: usize| (x / q, x % q);
            let mut rows = vec![vec![0.0; k]; k];
            for (x, row) in rows.iter_mut().enumerate() {
                let (a1, b1) = label(x);
                for (y, v) in row.iter_mut().enumerate() {
                    let (a2, b2) = label(y);
                    *v = if a1 == a2 && b1 != b2 {
                        1.0
                    } else if a1 != a2 && b1 == b2 {
                        -1.0
                    } else {
                        0.0
                    };
                }
            }
            make_sbm(vec![1.0 / k as f64; k], rows)
        }
        ExampleFamily::PlantedColoring { k } => {
            if !(2..=COLORING_MAX_K).contains(&k) {
                return Err(SbmError::ParameterOutOfRange(format!("planted_coloring k = {k} outside [2, {COLORING_MAX_K}]")));
            }
            let off = -1.0 / (k as f64 - 1.0);
            let rows = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { off }).collect()).collect();
            make_sbm(vec![1.0 / k as f64; k], rows)
        }
        ExampleFamily::OneToOneGap2 { n, alpha } => {
            open_range("alpha", alpha, 0.0, 1.0)?;
            need_n(n)?;
            let p1 = pow(n, alpha);
            make_sbm(vec![p1, 1.0 - p1], vec![vec![0.0, 1.0], vec![1.0, 0.0]])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn make_sbm_examples() {
        let er = make_sbm(vec![1.0], vec![vec![0.0]]).unwrap();
        assert_eq!(er, SbmModel::erdos_renyi());
        let pm = make_sbm(vec![0.5, 0.5], vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let tags = classify(&pm, DEFAULT_UNBIASED_TOL);
        assert!(tags.is_fully_unbiased && !tags.is_diagonal);
        assert!(matches!(make_sbm(vec![0.5, 0.6], vec![vec![0.0; 2]; 2]), Err(SbmError::BadSum(_))));
    }

    #[test]
    fn make_sbm_errors() {
        assert!(matches!(make_sbm(vec![], vec![]), Err(SbmError::Empty)));
        assert!(matches!(make_sbm(vec![1.0, 0.0], vec![vec![0.0; 2]; 2]), Err(SbmError::BadProbability { index: 1, .. })));
        assert!(matches!(make_sbm(vec![1.0], vec![vec![1.5]]), Err(SbmError::EntryOutOfRange { .. })));
        assert!(matches!(
            make_sbm(vec![0.5, 0.5], vec![vec![0.0, 0.1], vec![0.2, 0.0]]),
            Err(SbmError::Asymmetric { .. })
        ));
        assert!(matches!(make_sbm(vec![0.5, 0.5], vec![vec![0.0; 3]; 2]), Err(SbmError::Shape { k: 2 })));
        let m = make_sbm(vec![0.5, 0.5], vec![vec![0.0, 0.1], vec![0.1 + 1e-13, 0.0]]).unwrap();
        assert_eq!(m.q(0, 1), m.q(1, 0));
    }

    #[test]
    fn classify_examples() {
        let diag = make_sbm(vec![0.5, 0.5], vec![vec![0.3, 0.0], vec![0.0, -0.2]]).unwrap();
        assert!(classify(&diag, 0.0).is_diagonal);
        let n = 1000f64;
        let a = n.powf(-0.5);
        let clique = make_sbm(vec![a, 1.0 - a], vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let t = classify(&clique, DEFAULT_UNBIASED_TOL);
        assert!(t.is_nonnegative && t.is_two_community);
        assert!(approx(t.nonvanishing_c, a, 0.0));
    }

    #[test]
    fn abs_model_examples() {
        let m = make_sbm(vec![0.5, 0.5], vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert_eq!(abs_model(&m).q_rows(), vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let nn = make_sbm(vec![0.3, 0.7], vec![vec![0.1, 0.2], vec![0.2, 0.0]]).unwrap();
        assert_eq!(abs_model(&nn), nn);
        let mixed = make_sbm(vec![0.3, 0.7], vec![vec![-0.5, 0.2], vec![0.2, -0.1]]).unwrap();
        assert_eq!(abs_model(&mixed).q_rows(), vec![vec![0.5, 0.2], vec![0.2, 0.1]]);
    }

    #[test]
    fn row_means_examples() {
        let pm = construct_example(&ExampleFamily::DiagPm1).unwrap();
        assert!(community_row_means(&pm).iter().all(|v| v.abs() <= 1e-15));
        let one = make_sbm(vec![1.0], vec![vec![0.37]]).unwrap();
        assert_eq!(community_row_means(&one), vec![0.37]);
        let a = 0.4;
        let m = make_sbm(vec![0.5, 0.5], vec![vec![a, 0.0], vec![0.0, -a]]).unwrap();
        assert_eq!(community_row_means(&m), vec![a / 2.0, -a / 2.0]);
    }

    #[test]
    fn random_sbm_examples() {
        let m = random_sbm(RandomFamily::Diagonal, 3, 1000, &SeededStream::new(7, 0)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(m.q(i, j), 0.0);
                }
            }
        }
        for s in 0..50 {
            let m = random_sbm(RandomFamily::Nonvanishing(0.2), 4, 1000, &SeededStream::new(s, 0)).unwrap();
            assert!(m.min_p() >= 0.2 - 1e-15);
        }
        let a = random_sbm(RandomFamily::TwoCommunity, 2, 1_000_000, &SeededStream::new(1, 0)).unwrap();
        let b = random_sbm(RandomFamily::TwoCommunity, 2, 1_000_000, &SeededStream::new(1, 0)).unwrap();
        assert_eq!(a.p().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.p().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        assert_eq!(a.q_flat().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.q_flat().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        assert!(a.min_p() >= 1e6f64.powf(-0.9) * (1.0 - 1e-12));
    }

    #[test]
    fn random_sbm_errors() {
        let s = SeededStream::new(0, 0);
        assert!(random_sbm(RandomFamily::Nonvanishing(0.3), 4, 100, &s).is_err());
        assert!(random_sbm(RandomFamily::TwoCommunity, 3, 100, &s).is_err());
        assert!(random_sbm(RandomFamily::Arbitrary, 9, 100, &s).is_err());
        assert!(random_sbm(RandomFamily::Arbitrary, 0, 100, &s).is_err());
    }

    #[test]
    fn random_nonnegative_and_abs() {
        for seed in 0..100 {
            let s = SeededStream::new(seed, 3);
            let m = random_sbm(RandomFamily::Arbitrary, 1 + (seed as usize % 5), 500, &s).unwrap();
            assert!(classify(&abs_model(&m), 0.0).is_nonnegative);
            assert!(m.max_abs_q() <= 1.0 && m.max_abs_q() >= 1.0 / 500.0 * (1.0 - 1e-12));
            let nn = random_sbm(RandomFamily::Nonnegative, 3, 500, &s).unwrap();
            assert!(classify(&nn, 0.0).is_nonnegative);
        }
    }

    #[test]
    fn spiked_prior() {
        let mut rng = SeededStream::new(5, 0).rng();
        let m = random_sbm_with(RandomFamily::Arbitrary, 3, 10_000, PriorOptions { spike: Some(0.5) }, &mut rng).unwrap();
        assert!(approx(m.p()[0], 0.01, 1e-12));
    }

    #[test]
    fn quiet_4cycle_construction() {
        let m = construct_example(&ExampleFamily::Quiet4Cycle { q: 3 }).unwrap();
        assert_eq!(m.k(), 9);
        assert!(m.p().iter().all(|&v| v == 1.0 / 9.0));
        assert!(m.q_flat().iter().all(|&v| v == 1.0 || v == -1.0 || v == 0.0));
        // (a, b) -> (b, a) negates Q.
        let swap = |x: usize| (x % 3) * 3 + x / 3;
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(m.q(swap(x), swap(y)), -m.q(x, y));
            }
        }
        assert!(classify(&m, DEFAULT_UNBIASED_TOL).is_fully_unbiased);
        assert!(construct_example(&ExampleFamily::Quiet4Cycle { q: 2 }).is_err());
    }

    #[test]
    fn planted_coloring_construction() {
        let m = construct_example(&ExampleFamily::PlantedColoring { k: 5 }).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.q(i, j), if i == j { 1.0 } else { -0.25 });
            }
        }
        for k in [2, 3, 7, 50] {
            let m = construct_example(&ExampleFamily::PlantedColoring { k }).unwrap();
            assert!(community_row_means(&m).iter().all(|v| v.abs() <= 1e-15), "k = {k}");
        }
        assert_eq!(ExampleFamily::planted_coloring_at(1000, 0.7).unwrap(), ExampleFamily::PlantedColoring { k: 126 });
        assert!(ExampleFamily::planted_coloring_at(1000, 0.8).is_err());
    }

    #[test]
    fn star_family_constructions() {
        let m = construct_example(&ExampleFamily::Star2Dominant { n: 10_000, beta: 0.7 }).unwrap();
        assert_eq!(m.p(), &[0.5, 0.5]);
        assert!(approx(m.q(0, 0), 10f64.powf(-2.8), 1e-18));
        assert!(approx(m.q(1, 1), -10f64.powf(-2.8), 1e-18));
        assert_eq!(m.q(0, 1), 0.0);
        assert!(construct_example(&ExampleFamily::Star2Dominant { n: 100, beta: 0.8 }).is_err());
        assert!(construct_example(&ExampleFamily::Star1Dominant { n: 100, beta: 0.7 }).is_err());
        assert!(approx(large_star_beta(4), 41.0 / 96.0, 1e-15));
        let ls = construct_example(&ExampleFamily::LargeStar { n: 10_000, d: 4 }).unwrap();
        assert!(approx(ls.p()[0], 1e-3, 1e-15));
        assert_eq!(ls.q(0, 0), 0.0);
        let gap = construct_example(&ExampleFamily::OneToOneGap2 { n: 100, alpha: 0.5 }).unwrap();
        assert!(approx(gap.p()[0], 0.1, 1e-15));
    }

    #[test]
    fn json_round_trip() {
        let m = make_sbm(vec![0.25, 0.75], vec![vec![0.5, -0.125], vec![-0.125, 0.0]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"p":[0.25,0.75],"Q":[[0.5,-0.125],[-0.125,0.0]]}"#);
        let back: SbmModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<SbmModel>(r#"{"p":[0.5,0.6],"Q":[[0,0],[0,0]]}"#).is_err());
    }
}
