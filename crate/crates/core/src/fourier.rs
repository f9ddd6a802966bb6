//! Fourier coefficients `Phi(H)` of block models, their scaled form `Psi`, and
//! the planted mean and variance of signed counts.

use std::collections::HashMap;
use std::collections::HashSet;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{canonical_form, copies_in_complete, CanonicalCode, GraphError, PatternGraph, MAX_VERTICES};
use crate::sbm::{community_row_means, SbmModel};

pub const DEFAULT_BUDGET: u128 = 100_000_000;
/// Values with `|Phi|` at or below this count as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// Label sums at least this large are split across threads.
const PARALLEL_TERMS: u128 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("{needed} terms exceed the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("model outside the method's family: {0}")]
    NotInFamily(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigensolver received non-finite input")]
    NonFinite,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LabelSum,
    Elimination,
    StarClosedForm,
    CycleSpectral,
    Factorized,
    IndependencePoly,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::LabelSum => "label_sum",
            Method::Elimination => "elimination",
            Method::StarClosedForm => "star_closed_form",
            Method::CycleSpectral => "cycle_spectral",
            Method::Factorized => "factorized",
            Method::IndependencePoly => "independence_poly",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierResult {
    pub phi: f64,
    pub psi: f64,
    pub method: Method,
    pub terms_evaluated: u128,
}

impl FourierResult {
    fn new(phi: f64, vertices: usize, method: Method, terms: u128) -> Self {
        FourierResult { phi, psi: scale(phi, vertices), method, terms_evaluated: terms }
    }

    pub fn is_zero(&self) -> bool {
        self.phi.abs() <= ZERO_TOL
    }
}

/// `|phi|^(1/v)`, with `0 -> 0` and the empty pattern mapped to 1.
pub fn scale(phi: f64, vertices: usize) -> f64 {
    if vertices == 0 {
        1.0
    } else if phi == 0.0 {
        0.0
    } else {
        phi.abs().powf(1.0 / vertices as f64)
    }
}

fn terms_needed(k: usize, h: usize) -> u128 {
    (k as u128).checked_pow(h as u32).unwrap_or(u128::MAX)
}

// ---------------------------------------------------------------- label sum

/// Direct sum over all `k^h` label assignments.
pub fn phi_label_sum(m: &SbmModel, h: &PatternGraph, budget: u128) -> Result<FourierResult, FourierError> {
    let n = h.vertex_count();
    if n == 0 {
        return Ok(FourierResult::new(1.0, 0, Method::LabelSum, 1));
    }
    let k = m.k();
    let needed = terms_needed(k, n);
    if needed > budget {
        return Err(FourierError::BudgetExceeded { needed, budget });
    }
    // back[d] = neighbours of d among 0..d
    let back: Vec<Vec<usize>> = (0..n).map(|d| (0..d).filter(|&j| h.has_edge(j, d)).collect()).collect();
    let ctx = LabelSum { m, back: &back, n };
    let phi = if needed >= PARALLEL_TERMS && k > 1 {
        let parts: Vec<f64> = (0..k)
            .into_par_iter()
            .map(|x| {
                let mut labels = vec![0usize; n];
                labels[0] = x;
                m.p()[x] * ctx.sum(1, &mut labels)
            })
            .collect();
        parts.iter().sum()
    } else {
        ctx.sum(0, &mut vec![0usize; n])
    };
    Ok(FourierResult::new(phi, n, Method::LabelSum, needed))
}

struct LabelSum<'a> {
    m: &'a SbmModel,
    back: &'a [Vec<usize>],
    n: usize,
}

impl LabelSum<'_> {
    fn sum(&self, d: usize, labels: &mut [usize]) -> f64 {
        if d == self.n {
            return 1.0;
        }
        let mut acc = 0.0;
        for x in 0..self.m.k() {
            let mut w = self.m.p()[x];
            for &j in &self.back[d] {
                w *= self.m.q(labels[j], x);
            }
            if w == 0.0 {
                continue;
            }
            labels[d] = x;
            acc += w * self.sum(d + 1, labels);
        }
        acc
    }
}

// -------------------------------------------------------------- elimination

/// Greedy min-degree elimination order and the total tensor work it needs.
pub fn elimination_plan(k: usize, h: &PatternGraph) -> (Vec<usize>, u128) {
    let n = h.vertex_count();
    let mut adj: Vec<u16> = (0..n).map(|v| h.neighbors(v)).collect();
    let mut alive: u16 = if n == 0 { 0 } else { ((1u32 << n) - 1) as u16 };
    let mut order = Vec::with_capacity(n);
    let mut cost: u128 = 0;
    while alive != 0 {
        let v = (0..n)
            .filter(|&v| alive >> v & 1 == 1)
            .min_by_key(|&v| ((adj[v] & alive).count_ones(), v))
            .unwrap();
        let nb = adj[v] & alive;
        cost = cost.saturating_add(terms_needed(k, nb.count_ones() as usize + 1));
        for u in 0..n {
            if nb >> u & 1 == 1 {
                adj[u] |= nb & !(1 << u);
            }
        }
        alive &= !(1 << v);
        order.push(v);
    }
    (order, cost)
}

struct Factor {
    scope: Vec<usize>,
    values: Vec<f64>,
}

/// Variable elimination over the label variables, one factor per vertex
/// weight and per edge.
pub fn phi_elimination(m: &SbmModel, h: &PatternGraph, budget: u128) -> Result<FourierResult, FourierError> {
    let n = h.vertex_count();
    if n == 0 {
        return Ok(FourierResult::new(1.0, 0, Method::Elimination, 1));
    }
    let k = m.k();
    let (order, cost) = elimination_plan(k, h);
    if cost > budget {
        return Err(FourierError::BudgetExceeded { needed: cost, budget });
    }
    let mut factors: Vec<Factor> = (0..n).map(|v| Factor { scope: vec![v], values: m.p().to_vec() }).collect();
    for (u, v) in h.edges() {
        factors.push(Factor { scope: vec![u, v], values: m.q_flat().to_vec() });
    }
    let mut labels = vec![0usize; n];
    for v in order {
        let (touch, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.scope.contains(&v));
        factors = rest;
        let mut scope: Vec<usize> = touch.iter().flat_map(|f| f.scope.iter().copied()).filter(|&u| u != v).collect();
        scope.sort_unstable();
        scope.dedup();
        let size = k.pow(scope.len() as u32);
        let strides: Vec<Vec<usize>> = touch
            .iter()
            .map(|f| {
                let mut s = 1;
                f.scope
                    .iter()
                    .map(|_| {
                        let cur = s;
                        s *= k;
                        cur
                    })
                    .collect()
            })
            .collect();
        let mut values = vec![0.0; size];
        for (idx, out) in values.iter_mut().enumerate() {
            let mut rem = idx;
            for &u in &scope {
                labels[u] = rem % k;
                rem /= k;
            }
            let mut acc = 0.0;
            for x in 0..k {
                labels[v] = x;
                let mut w = 1.0;
                for (f, st) in touch.iter().zip(&strides) {
                    let i: usize = f.scope.iter().zip(st).map(|(&u, &s)| labels[u] * s).sum();
                    w *= f.values[i];
                    if w == 0.0 {
                        break;
                    }
                }
                acc += w;
            }
            *out = acc;
        }
        factors.push(Factor { scope, values });
    }
    let phi = factors.iter().map(|f| f.values[0]).product();
    Ok(FourierResult::new(phi, n, Method::Elimination, cost))
}

// ------------------------------------------------------------ closed forms

/// `Phi(Star_t) = sum_x p_x lambda_x^t`.
pub fn phi_star(m: &SbmModel, t: usize) -> Result<FourierResult, FourierError> {
    if t == 0 {
        return Err(FourierError::InvalidArgument("star size must be at least 1".into()));
    }
    let lambda = community_row_means(m);
    let phi = m.p().iter().zip(&lambda).map(|(p, l)| p * l.powi(t as i32)).sum();
    Ok(FourierResult::new(phi, t + 1, Method::StarClosedForm, m.k() as u128))
}

/// Eigenvalues of `sqrt(P) Q sqrt(P)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumView {
    /// Sorted by absolute value, largest first.
    pub eigenvalues: Vec<f64>,
}

impl SpectrumView {
    pub fn power_sum(&self, t: usize) -> f64 {
        self.eigenvalues.iter().map(|l| l.powi(t as i32)).sum()
    }
}

/// `sqrt(P) Q sqrt(P)` with entries `sqrt(p_i p_j) Q_ij`, so the diagonal is
/// exactly `p_i Q_ii`.
fn weighted_matrix(m: &SbmModel) -> Result<DMatrix<f64>, FourierError> {
    let k = m.k();
    let mat = DMatrix::from_fn(k, k, |i, j| (m.p()[i] * m.p()[j]).sqrt() * m.q(i, j));
    if mat.iter().any(|v| !v.is_finite()) {
        return Err(FourierError::NonFinite);
    }
    Ok(mat)
}

pub fn spectrum(m: &SbmModel) -> Result<SpectrumView, FourierError> {
    let mat = weighted_matrix(m)?;
    let mut eigenvalues: Vec<f64> = if m.k() == 1 { vec![mat[(0, 0)]] } else { mat.symmetric_eigenvalues().iter().copied().collect() };
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(FourierError::NonFinite);
    }
    eigenvalues.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
    Ok(SpectrumView { eigenvalues })
}

/// `Phi(Cyc_t) = tr((sqrt(P) Q sqrt(P))^t)`, the `t`-th power sum of the
/// spectrum. Evaluated as `<M^a, M^b>` with `a + b = t`, which needs no
/// eigensolver and is exact whenever the matrix products are.
pub fn phi_cycle_spectral(m: &SbmModel, t: usize) -> Result<FourierResult, FourierError> {
    if t < 3 {
        return Err(FourierError::InvalidArgument(format!("cycle length {t} below 3")));
    }
    let mat = weighted_matrix(m)?;
    let (a, b) = (t / 2, t - t / 2);
    let mut powers = vec![mat.clone()];
    while powers.len() < b {
        let next = powers.last().unwrap() * &mat;
        powers.push(next);
    }
    // M is symmetric, so tr(M^a M^b) is the entrywise inner product.
    let phi = powers[a - 1].dot(&powers[b - 1]);
    let k = m.k() as u128;
    Ok(FourierResult::new(phi, t, Method::CycleSpectral, k * k * k * (b as u128 - 1) + k * k))
}

/// Product of the component coefficients.
pub fn phi_factorized(m: &SbmModel, components: &[PatternGraph]) -> Result<FourierResult, FourierError> {
    phi_factorized_budget(m, components, DEFAULT_BUDGET)
}

fn phi_factorized_budget(m: &SbmModel, components: &[PatternGraph], budget: u128) -> Result<FourierResult, FourierError> {
    let mut phi = 1.0;
    let mut vertices = 0;
    let mut terms: u128 = 0;
    for c in components {
        let r = phi_budget(m, c, budget)?;
        phi *= r.phi;
        vertices += c.vertex_count();
        terms = terms.saturating_add(r.terms_evaluated);
    }
    Ok(FourierResult::new(phi, vertices, Method::Factorized, terms))
}

/// Sum over independent sets for two-community models with `Q[0][0] = 0`.
pub fn phi_independence_poly(m: &SbmModel, h: &PatternGraph) -> Result<FourierResult, FourierError> {
    if m.k() != 2 || m.q(0, 0) != 0.0 {
        return Err(FourierError::NotInFamily("needs k = 2 and Q[0][0] = 0".into()));
    }
    let n = h.vertex_count();
    let q = m.p()[0];
    let (b, g) = (m.q(0, 1), m.q(1, 1));
    let edges = h.edges();
    let mut phi = 0.0;
    let mut terms: u128 = 0;
    for s in 0u32..1 << n {
        let inside = |v: usize| s >> v & 1 == 1;
        if edges.iter().any(|&(u, v)| inside(u) && inside(v)) {
            continue;
        }
        let cross = edges.iter().filter(|&&(u, v)| inside(u) != inside(v)).count();
        let rest = edges.len() - cross;
        let size = s.count_ones() as i32;
        phi += q.powi(size) * (1.0 - q).powi(n as i32 - size) * b.powi(cross as i32) * g.powi(rest as i32);
        terms += 1;
    }
    Ok(FourierResult::new(phi, n, Method::IndependencePoly, terms))
}

// ------------------------------------------------------------------ routing

/// Exact `Phi(H)` by the cheapest applicable method.
pub fn phi(m: &SbmModel, h: &PatternGraph) -> Result<FourierResult, FourierError> {
    phi_budget(m, h, DEFAULT_BUDGET)
}

pub fn phi_budget(m: &SbmModel, h: &PatternGraph, budget: u128) -> Result<FourierResult, FourierError> {
    if h.is_empty_pattern() {
        return phi_label_sum(m, h, budget);
    }
    if let Some(t) = h.as_star() {
        return phi_star(m, t);
    }
    if let Some(t) = h.as_cycle() {
        return phi_cycle_spectral(m, t);
    }
    if !h.is_connected() {
        return phi_factorized_budget(m, &h.component_graphs(), budget);
    }
    let (_, cost) = elimination_plan(m.k(), h);
    if terms_needed(m.k(), h.vertex_count()) <= cost {
        phi_label_sum(m, h, budget)
    } else {
        phi_elimination(m, h, budget)
    }
}

/// `Psi(H) = |Phi(H)|^(1/|V(H)|)`.
pub fn psi(m: &SbmModel, h: &PatternGraph) -> Result<f64, FourierError> {
    if h.is_empty_pattern() {
        return Err(FourierError::InvalidArgument("Psi of the empty pattern".into()));
    }
    Ok(phi(m, h)?.psi)
}

// ------------------------------------------------------- planted moments

/// Mean of the signed count under the model: `N_H(n) Phi(H)`.
pub fn planted_mean_sc(m: &SbmModel, h: &PatternGraph, n: u64) -> Result<f64, FourierError> {
    let copies = copies_in_complete(h, n)?;
    Ok(copies as f64 * phi(m, h)?.phi)
}

/// How two overlapping copies `H1`, `H2` sit relative to each other.
///
/// `s_1`, `s_2` count vertices private to one copy, `s_12` shared vertices
/// that keep an edge in `H1 ⊗ H2`, `s_empty` shared vertices that lose all of
/// theirs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OverlapPattern {
    pub s_empty: usize,
    pub s_1: usize,
    pub s_2: usize,
    pub s_12: usize,
}

/// Overlap pattern of two graphs drawn on common vertex labels.
pub fn overlap_pattern(h1: &PatternGraph, h2: &PatternGraph) -> OverlapPattern {
    let n = h1.vertex_count().max(h2.vertex_count());
    let support = |g: &PatternGraph| (0..g.vertex_count()).filter(|&v| g.degree(v) > 0).fold(0u16, |a, v| a | 1 << v);
    let (v1, v2) = (support(h1), support(h2));
    let prod = PatternGraph::from_raw(n, h1.edge_bits() ^ h2.edge_bits());
    let vp = support(&prod);
    let shared = v1 & v2;
    OverlapPattern {
        s_empty: (shared & !vp).count_ones() as usize,
        s_1: (v1 & !v2).count_ones() as usize,
        s_2: (v2 & !v1).count_ones() as usize,
        s_12: (shared & vp).count_ones() as usize,
    }
}

/// One group of copy pairs in the planted variance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapClass {
    pub overlap: OverlapPattern,
    pub product: CanonicalCode,
    /// Ordered copy pairs `(H1, H2)` in `K_n` falling in this group.
    pub pairs: f64,
    /// `Phi(H1 ⊗ H2) - Phi(H)^2`.
    pub covariance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedVariance {
    pub variance: f64,
    pub classes: Vec<OverlapClass>,
    /// Candidate partner copies examined for one fixed `H1`.
    pub work: u128,
}

/// Largest pattern whose overlapping pairs fit in [`MAX_VERTICES`].
pub const VARIANCE_MAX_VERTICES: usize = MAX_VERTICES / 2;

/// Exact variance of the signed count under the model.
pub fn planted_variance_sc(m: &SbmModel, h: &PatternGraph, n: u64, budget: u128) -> Result<f64, FourierError> {
    Ok(planted_variance_detail(m, h, n, budget)?.variance)
}

/// Sums `Phi(H1 ⊗ H2) - Phi(H)^2` over ordered pairs of copies that share a
/// vertex. `H1` is fixed on vertices `0..h` (every copy looks the same), the
/// partner is enumerated on `S ∪ {h, h+1, ..}` for each shared set `S`, and the
/// choice of outside vertices contributes `C(n - h, h - |S|)`.
pub fn planted_variance_detail(m: &SbmModel, h: &PatternGraph, n: u64, budget: u128) -> Result<PlantedVariance, FourierError> {
    let hv = h.vertex_count();
    if hv == 0 {
        return Err(FourierError::InvalidArgument("empty pattern".into()));
    }
    if hv > VARIANCE_MAX_VERTICES {
        return Err(GraphError::TooLarge(2 * hv - 1).into());
    }
    let copies = copies_in_complete(h, n)?;
    let phi_h = phi_budget(m, h, budget)?.phi;

    let slots = distinct_layouts(h);
    let work: u128 = (1..=hv).map(|j| binom(hv as u64, j as u64) * slots.len() as u128).sum();
    if work > budget {
        return Err(FourierError::BudgetExceeded { needed: work, budget });
    }

    let mut cache: HashMap<CanonicalCode, f64> = HashMap::new();
    let mut groups: HashMap<(OverlapPattern, CanonicalCode), u128> = HashMap::new();
    let h1 = *h;
    for s in 1u32..1 << hv {
        let j = s.count_ones() as usize;
        let outside = binom(n - hv as u64, (hv - j) as u64);
        if outside == 0 {
            continue;
        }
        // slot i -> actual vertex: shared vertices first, then fresh ones
        let mut target: Vec<usize> = (0..hv).filter(|&v| s >> v & 1 == 1).collect();
        target.extend(hv..2 * hv - j);
        for &layout in &slots {
            let mut bits = 0u128;
            let g = PatternGraph::from_raw(hv, layout);
            for (a, b) in g.edges() {
                bits |= 1u128 << crate::graphs::pair_index(target[a], target[b]);
            }
            let h2 = PatternGraph::from_raw(2 * hv - j, bits);
            let ov = overlap_pattern(&h1, &h2);
            let prod = PatternGraph::from_raw(2 * hv - j, h1.edge_bits() ^ bits).remove_isolated();
            let code = canonical_form(&prod);
            *groups.entry((ov, code)).or_insert(0) += outside;
        }
    }
    let mut classes = Vec::with_capacity(groups.len());
    let mut keys: Vec<_> = groups.into_iter().collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0));
    let mut variance = 0.0;
    for ((overlap, code), mult) in keys {
        let phi_prod = match cache.get(&code) {
            Some(&v) => v,
            None => {
                let v = phi_budget(m, &code.graph(), budget)?.phi;
                cache.insert(code, v);
                v
            }
        };
        let covariance = phi_prod - phi_h * phi_h;
        let pairs = copies as f64 * mult as f64;
        variance += pairs * covariance;
        classes.push(OverlapClass { overlap, product: code, pairs, covariance });
    }
    Ok(PlantedVariance { variance, classes, work })
}

/// Distinct edge sets of copies of `h` on the vertex set `0..h`.
fn distinct_layouts(h: &PatternGraph) -> Vec<u128> {
    let n = h.vertex_count();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    permute(&mut perm, 0, &mut |p| {
        let bits = h.relabel(p).edge_bits();
        if seen.insert(bits) {
            out.push(bits);
        }
    });
    out.sort_unstable();
    out
}

fn permute(perm: &mut [usize], i: usize, f: &mut impl FnMut(&[usize])) {
    if i == perm.len() {
        f(perm);
        return;
    }
    for j in i..perm.len() {
        perm.swap(i, j);
        permute(perm, i + 1, f);
        perm.swap(i, j);
    }
}

pub(crate) fn binom(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{connected_catalog, disjoint_union, enumerate_graphs, parse_graph, profile, symmetric_product};
    use crate::mc::SeededStream;
    use crate::sbm::{construct_example, make_sbm, random_sbm, ExampleFamily, RandomFamily};
    use proptest::prelude::*;

    /// Flat enumeration of every assignment with the full product recomputed.
    fn brute_phi(m: &SbmModel, h: &PatternGraph) -> f64 {
        let n = h.vertex_count();
        let k = m.k();
        let edges = h.edges();
        let mut labels = vec![0usize; n];
        let mut total = 0.0;
        loop {
            let mut w: f64 = labels.iter().map(|&x| m.p()[x]).product();
            for &(u, v) in &edges {
                w *= m.q(labels[u], labels[v]);
            }
            total += w;
            let mut i = 0;
            loop {
                if i == n {
                    return total;
                }
                labels[i] += 1;
                if labels[i] < k {
                    break;
                }
                labels[i] = 0;
                i += 1;
            }
        }
    }

    fn pm1() -> SbmModel {
        construct_example(&ExampleFamily::DiagPm1).unwrap()
    }

    fn g(s: &str) -> PatternGraph {
        parse_graph(s).unwrap()
    }

    fn model(seed: u64, k: usize) -> SbmModel {
        random_sbm(RandomFamily::Arbitrary, k, 50, &SeededStream::new(seed, 11)).unwrap()
    }

    #[test]
    fn label_sum_examples() {
        let m = pm1();
        assert_eq!(phi_label_sum(&m, &g("cyc4"), DEFAULT_BUDGET).unwrap().phi, 1.0);
        assert_eq!(phi_label_sum(&m, &g("edge"), DEFAULT_BUDGET).unwrap().phi, 0.0);
        assert_eq!(phi_label_sum(&m, &g("k4minus"), DEFAULT_BUDGET).unwrap().phi, 0.0);
        let one = make_sbm(vec![1.0], vec![vec![0.3]]).unwrap();
        for h in connected_catalog(5) {
            let r = phi_label_sum(&one, &h, DEFAULT_BUDGET).unwrap();
            assert!((r.phi - 0.3f64.powi(h.edge_count() as i32)).abs() < 1e-15);
        }
        assert_eq!(phi_label_sum(&m, &PatternGraph::empty(), 1).unwrap().phi, 1.0);
    }

    #[test]
    fn label_sum_budget() {
        let m = model(1, 4);
        let err = phi_label_sum(&m, &g("cyc6"), 100).unwrap_err();
        assert_eq!(err, FourierError::BudgetExceeded { needed: 4096, budget: 100 });
    }

    #[test]
    fn label_sum_matches_brute() {
        for seed in 0..20 {
            let m = model(seed, 1 + seed as usize % 4);
            for h in connected_catalog(4) {
                let a = phi_label_sum(&m, &h, DEFAULT_BUDGET).unwrap().phi;
                assert!((a - brute_phi(&m, &h)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn parallel_label_sum_is_deterministic() {
        let m = model(3, 4);
        let h = g("k4");
        let big = disjoint_union(&h, &g("cyc4")).unwrap();
        let a = phi_label_sum(&m, &big, DEFAULT_BUDGET).unwrap();
        let b = phi_label_sum(&m, &big, DEFAULT_BUDGET).unwrap();
        assert_eq!(a.phi.to_bits(), b.phi.to_bits());
        assert!(a.terms_evaluated >= PARALLEL_TERMS);
        assert!((a.phi - brute_phi(&m, &big)).abs() < 1e-13);
    }

    #[test]
    fn elimination_matches_label_sum() {
        for seed in 0..30 {
            let m = model(seed, 1 + seed as usize % 5);
            for h in connected_catalog(6) {
                let a = phi_elimination(&m, &h, DEFAULT_BUDGET).unwrap().phi;
                let b = phi_label_sum(&m, &h, DEFAULT_BUDGET).unwrap().phi;
                assert!((a - b).abs() < 1e-13, "{} seed {seed}: {a} vs {b}", h.name());
            }
        }
    }

    #[test]
    fn elimination_plan_costs() {
        let (order, cost) = elimination_plan(3, &g("path5"));
        assert_eq!(order.len(), 5);
        // four leaf-like steps of k^2 and a final k^1
        assert_eq!(cost, 4 * 9 + 3);
        let (_, cost) = elimination_plan(2, &g("k4"));
        assert_eq!(cost, 16 + 8 + 4 + 2);
    }

    #[test]
    fn star_examples() {
        let pm = pm1();
        for t in 1..6 {
            assert_eq!(phi_star(&pm, t).unwrap().phi, 0.0);
        }
        let m = make_sbm(vec![0.5, 0.5], vec![vec![0.5, 0.0], vec![0.0, -0.5]]).unwrap();
        assert_eq!(phi_star(&m, 2).unwrap().phi, 0.0625);
        assert_eq!(phi_star(&m, 3).unwrap().phi, 0.0);
        assert!((brute_phi(&m, &PatternGraph::star(2)) - 0.0625).abs() < 1e-15);
        assert!(phi_star(&m, 0).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(&pm1()).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15 && s.eigenvalues[1].abs() < 1e-15);
        for t in 3..9 {
            let m = model(t as u64, 5);
            let direct = phi_cycle_spectral(&m, t).unwrap().phi;
            assert!((direct - spectrum(&m).unwrap().power_sum(t)).abs() < 1e-12);
        }
        let z = make_sbm(vec![0.25; 4], vec![vec![0.0; 4]; 4]).unwrap();
        assert!(spectrum(&z).unwrap().eigenvalues.iter().all(|&v| v == 0.0));
        let one = make_sbm(vec![1.0], vec![vec![-0.4]]).unwrap();
        assert_eq!(spectrum(&one).unwrap().eigenvalues, vec![-0.4]);
    }

    #[test]
    fn spectrum_frobenius() {
        for seed in 0..50 {
            let m = model(seed, 1 + seed as usize % 6);
            let s = spectrum(&m).unwrap();
            let k = m.k();
            let fro: f64 = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| m.p()[i] * m.p()[j] * m.q(i, j).powi(2)).sum();
            assert!((s.power_sum(2) - fro).abs() < 1e-10);
            for w in s.eigenvalues.windows(2) {
                assert!(w[0].abs() >= w[1].abs());
            }
        }
    }

    #[test]
    fn cycle_examples() {
        let pm = pm1();
        assert_eq!(phi_cycle_spectral(&pm, 4).unwrap().phi, 1.0);
        assert_eq!(phi_cycle_spectral(&pm, 3).unwrap().phi, 1.0);
        assert_eq!(phi_label_sum(&pm, &g("triangle"), DEFAULT_BUDGET).unwrap().phi, 1.0);
        assert!(phi_cycle_spectral(&pm, 2).is_err());
        for seed in 0..50 {
            let m = model(seed, 1 + seed as usize % 5);
            let c4 = phi_cycle_spectral(&m, 4).unwrap().psi;
            let c5 = phi_cycle_spectral(&m, 5).unwrap().psi;
            assert!(c5 <= c4 + 1e-12);
        }
    }

    #[test]
    fn factorized_examples() {
        let pm = pm1();
        let e = PatternGraph::edge();
        assert_eq!(phi_factorized(&pm, &[e, e]).unwrap().phi, 0.0);
        let c4 = PatternGraph::cycle(4);
        assert!((phi_factorized(&pm, &[c4, c4]).unwrap().phi - 1.0).abs() < 1e-14);
        for seed in 0..20 {
            let m = model(seed, 3);
            let a = phi_factorized(&m, &[PatternGraph::star(2), PatternGraph::cycle(3)]).unwrap().phi;
            let u = disjoint_union(&PatternGraph::star(2), &PatternGraph::cycle(3)).unwrap();
            assert!((a - brute_phi(&m, &u)).abs() < 1e-12);
        }
    }

    #[test]
    fn independence_poly_examples() {
        let (q, b, gm) = (0.3, 0.6, -0.4);
        let m = make_sbm(vec![q, 1.0 - q], vec![vec![0.0, b], vec![b, gm]]).unwrap();
        let r = phi_independence_poly(&m, &PatternGraph::edge()).unwrap();
        let expect = 2.0 * q * (1.0 - q) * b + (1.0 - q).powi(2) * gm;
        assert!((r.phi - expect).abs() < 1e-15);
        // empty set plus three singletons
        assert_eq!(phi_independence_poly(&m, &g("triangle")).unwrap().terms_evaluated, 4);
        let zero = make_sbm(vec![q, 1.0 - q], vec![vec![0.0, 0.0], vec![0.0, gm]]).unwrap();
        for h in connected_catalog(4) {
            let r = phi_independence_poly(&zero, &h).unwrap().phi;
            let expect = (1.0 - q).powi(h.vertex_count() as i32) * gm.powi(h.edge_count() as i32);
            assert!((r - expect).abs() < 1e-15);
        }
        assert!(phi_independence_poly(&pm1(), &g("edge")).is_err());
    }

    #[test]
    fn routing() {
        let m = model(4, 3);
        assert_eq!(phi(&m, &g("star3")).unwrap().method, Method::StarClosedForm);
        assert_eq!(phi(&m, &g("cyc5")).unwrap().method, Method::CycleSpectral);
        assert_eq!(phi(&m, &disjoint_union(&g("edge"), &g("edge")).unwrap()).unwrap().method, Method::Factorized);
        assert_eq!(phi(&model(4, 2), &g("k4minus")).unwrap().method, Method::LabelSum);
        assert_eq!(phi(&m, &g("k4minus")).unwrap().method, Method::Elimination);
        assert_eq!(phi(&model(4, 6), &g("path6")).unwrap().method, Method::Elimination);
        assert!(psi(&m, &PatternGraph::empty()).is_err());
    }

    #[test]
    fn psi_examples() {
        let pm = pm1();
        assert_eq!(psi(&pm, &g("k24")).unwrap(), 1.0);
        assert_eq!(psi(&pm, &g("k4")).unwrap(), 0.0);
        assert_eq!(psi(&pm, &g("star2")).unwrap(), 0.0);
        for (n, beta) in [(100u64, 0.7), (10_000, 0.7), (1000, 0.7)] {
            let m = construct_example(&ExampleFamily::Star2Dominant { n, beta }).unwrap();
            let expect = ((n as f64).powf(-2.0 * beta) / 4.0).powf(1.0 / 3.0);
            assert!((psi(&m, &g("star2")).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn fully_unbiased_leafy_zero() {
        let models = [
            pm1(),
            construct_example(&ExampleFamily::PlantedColoring { k: 4 }).unwrap(),
            construct_example(&ExampleFamily::Quiet4Cycle { q: 3 }).unwrap(),
        ];
        for m in &models {
            for h in connected_catalog(5) {
                if !profile(&h).leaf_vertices.is_empty() {
                    assert!(phi(m, &h).unwrap().phi.abs() <= ZERO_TOL, "{}", h.name());
                }
            }
        }
    }

    #[test]
    fn disjoint_union_psi_max() {
        for seed in 0..30 {
            let m = model(seed, 3);
            let cat = connected_catalog(3);
            for a in &cat {
                for b in &cat {
                    let u = disjoint_union(a, b).unwrap();
                    let lhs = psi(&m, &u).unwrap();
                    let rhs = psi(&m, a).unwrap().max(psi(&m, b).unwrap());
                    assert!(lhs <= rhs + 1e-12);
                }
            }
        }
    }

    #[test]
    fn planted_mean_examples() {
        let z = make_sbm(vec![0.5, 0.5], vec![vec![0.0; 2]; 2]).unwrap();
        assert_eq!(planted_mean_sc(&z, &g("cyc4"), 9).unwrap(), 0.0);
        assert!((planted_mean_sc(&pm1(), &g("cyc4"), 6).unwrap() - 45.0).abs() < 1e-12);
        let m = model(2, 3);
        let e = phi(&m, &g("edge")).unwrap().phi;
        assert_eq!(planted_mean_sc(&m, &g("edge"), 10).unwrap(), 45.0 * e);
        assert!(planted_mean_sc(&m, &g("cyc4"), 3).is_err());
    }

    #[test]
    fn overlap_pattern_relations() {
        let h1 = g("cyc4");
        let h2 = PatternGraph::from_edges_allow_isolated(6, &[(0, 1), (1, 4), (4, 5), (5, 0)]).unwrap();
        let ov = overlap_pattern(&h1, &h2);
        assert_eq!(ov, OverlapPattern { s_empty: 0, s_1: 2, s_2: 2, s_12: 2 });
        let same = overlap_pattern(&h1, &h1);
        assert_eq!(same, OverlapPattern { s_empty: 4, s_1: 0, s_2: 0, s_12: 0 });
    }

    #[test]
    fn planted_variance_examples() {
        let m = model(6, 3);
        let e = phi(&m, &g("edge")).unwrap().phi;
        let v = planted_variance_sc(&m, &g("edge"), 2, DEFAULT_BUDGET).unwrap();
        assert!((v - (1.0 - e * e)).abs() < 1e-15);
        let z = make_sbm(vec![1.0], vec![vec![0.0]]).unwrap();
        for h in connected_catalog(4) {
            for n in [h.vertex_count() as u64, 9, 25] {
                let v = planted_variance_sc(&z, &h, n, DEFAULT_BUDGET).unwrap();
                assert_eq!(v, copies_in_complete(&h, n).unwrap() as f64, "{}", h.name());
            }
        }
        assert_eq!(planted_variance_sc(&pm1(), &g("edge"), 4, DEFAULT_BUDGET).unwrap(), 6.0);
    }

    /// Every ordered pair of copies in `K_n`, Phi evaluated by brute force.
    fn raw_pair_variance(m: &SbmModel, h: &PatternGraph, n: usize) -> f64 {
        let hv = h.vertex_count();
        let mut copies: HashSet<Vec<(usize, usize)>> = HashSet::new();
        let mut map = vec![0usize; hv];
        fn rec(d: usize, n: usize, used: &mut Vec<bool>, map: &mut Vec<usize>, h: &PatternGraph, out: &mut HashSet<Vec<(usize, usize)>>) {
            if d == map.len() {
                let mut e: Vec<_> = h.edges().iter().map(|&(u, v)| (map[u].min(map[v]), map[u].max(map[v]))).collect();
                e.sort();
                out.insert(e);
                return;
            }
            for x in 0..n {
                if !used[x] {
                    used[x] = true;
                    map[d] = x;
                    rec(d + 1, n, used, map, h, out);
                    used[x] = false;
                }
            }
        }
        rec(0, n, &mut vec![false; n], &mut map, h, &mut copies);
        let copies: Vec<_> = copies.into_iter().collect();
        let ph = brute_phi(m, h);
        let mut var = 0.0;
        for a in &copies {
            for b in &copies {
                let va: HashSet<usize> = a.iter().flat_map(|&(u, v)| [u, v]).collect();
                if !b.iter().any(|&(u, v)| va.contains(&u) || va.contains(&v)) {
                    continue;
                }
                let sa: HashSet<_> = a.iter().copied().collect();
                let sb: HashSet<_> = b.iter().copied().collect();
                let diff: Vec<(usize, usize)> = sa.symmetric_difference(&sb).copied().collect();
                let prod = if diff.is_empty() { PatternGraph::empty() } else { PatternGraph::from_edges_allow_isolated(n, &diff).unwrap().remove_isolated() };
                var += brute_phi(m, &prod) - ph * ph;
            }
        }
        var
    }

    #[test]
    fn planted_variance_matches_raw_pairs() {
        let cases = [("edge", 5), ("star2", 6), ("triangle", 6), ("cyc4", 7), ("path4", 6)];
        for (i, (name, n)) in cases.iter().enumerate() {
            let m = model(40 + i as u64, 2);
            let h = g(name);
            let grouped = planted_variance_sc(&m, &h, *n as u64, DEFAULT_BUDGET).unwrap();
            let raw = raw_pair_variance(&m, &h, *n);
            assert!((grouped - raw).abs() <= 1e-9 * raw.abs().max(1.0), "{name}: {grouped} vs {raw}");
        }
    }

    #[test]
    fn planted_variance_overlap_invariants() {
        let m = model(8, 2);
        for h in connected_catalog(4) {
            let d = planted_variance_detail(&m, &h, 12, DEFAULT_BUDGET).unwrap();
            let hv = h.vertex_count();
            for c in &d.classes {
                let o = c.overlap;
                assert_eq!(o.s_empty + o.s_1 + o.s_12, hv);
                assert_eq!(o.s_1 + o.s_2 + o.s_12, c.product.graph().vertex_count());
            }
        }
    }

    #[test]
    fn planted_variance_limits() {
        let m = model(1, 2);
        assert!(planted_variance_sc(&m, &g("path7"), 20, DEFAULT_BUDGET).is_err());
        assert!(matches!(planted_variance_sc(&m, &g("k4"), 20, 10), Err(FourierError::BudgetExceeded { .. })));
    }

    #[test]
    fn symmetric_product_phi_bounded() {
        let m = model(9, 3);
        let a = g("cyc4");
        let p = symmetric_product(&a, &a, &[0, 1, 2, 3], &[1, 0, 5, 4]).unwrap();
        assert!(phi(&m, &p).unwrap().phi.abs() <= 1.0);
    }

    #[test]
    fn catalog_enumeration_in_budget() {
        let m = model(10, 5);
        for h in enumerate_graphs(6, false).unwrap() {
            assert!(phi(&m, &h).is_ok());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn phi_is_bounded(seed in 0u64..10_000, k in 1usize..5, idx in 0usize..52) {
            let m = model(seed, k);
            let cat = connected_catalog(6);
            let h = cat[idx % cat.len()];
            prop_assert!(phi(&m, &h).unwrap().phi.abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn methods_agree(seed in 0u64..10_000, k in 1usize..5, t in 1usize..6) {
            let m = model(seed, k);
            let star = PatternGraph::star(t);
            prop_assert!((phi_star(&m, t).unwrap().phi - brute_phi(&m, &star)).abs() <= 1e-12);
            if t >= 3 {
                let cyc = PatternGraph::cycle(t);
                prop_assert!((phi_cycle_spectral(&m, t).unwrap().phi - brute_phi(&m, &cyc)).abs() <= 1e-10);
            }
        }
    }
}
