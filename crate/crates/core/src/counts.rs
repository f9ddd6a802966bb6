//! Signed subgraph counts `SC_H(G)` on concrete graphs: a backtracking oracle
//! and the star / triangle / 4-cycle fast paths.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::graphs::{automorphism_count, copies_in_complete, GraphError, PatternGraph};

pub const DEFAULT_COUNT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Error)]
pub enum CountError {
    #[error("{needed} copies exceed the enumeration budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("star size {t} outside [1, {max}]")]
    StarOutOfRange { t: usize, max: usize },
    #[error("signed count does not fit in 64 bits")]
    Overflow,
    #[error("edge list: {0}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Dense undirected graph with packed adjacency rows and optional latent labels.
#[derive(Clone, PartialEq, Eq)]
pub struct SampledGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    labels: Option<Vec<u32>>,
}

impl SampledGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        SampledGraph { n, words, rows: vec![0; n * words], labels: None }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.set_edge(i, j, true);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, CountError> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(CountError::Parse(format!("edge {u}-{v} outside 0..{n}")));
            }
            if u == v {
                return Err(CountError::Parse(format!("self-loop at {u}")));
            }
            g.set_edge(u, v, true);
        }
        Ok(g)
    }

    /// Reads `n` on the first non-comment line, then one `u v` (or `u-v`) edge per line.
    pub fn from_edge_list(text: &str) -> Result<Self, CountError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| CountError::Parse("missing vertex count".into()))?
            .parse()
            .map_err(|_| CountError::Parse("first line must be the vertex count".into()))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split(|c: char| c == '-' || c.is_whitespace()).filter(|s| !s.is_empty());
            let parse = |s: Option<&str>| -> Result<usize, CountError> {
                s.and_then(|s| s.parse().ok()).ok_or_else(|| CountError::Parse(format!("bad edge line `{line}`")))
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(CountError::Parse(format!("bad edge line `{line}`")));
            }
            edges.push((u, v));
        }
        Self::from_edges(n, &edges)
    }

    pub fn read_edge_list(path: &Path) -> Result<Self, CountError> {
        Self::from_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<u32>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
        self
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        debug_assert!(u != v);
        for (a, b) in [(u, v), (v, u)] {
            let w = &mut self.rows[a * self.words + b / 64];
            if present {
                *w |= 1 << (b % 64);
            } else {
                *w &= !(1 << (b % 64));
            }
        }
    }

    #[inline]
    fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    /// `2 G_ij - 1` off the diagonal, 0 on it.
    #[inline]
    pub fn sign(&self, u: usize, v: usize) -> i64 {
        if u == v {
            0
        } else if self.has_edge(u, v) {
            1
        } else {
            -1
        }
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.degrees().iter().sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn common_neighbors(&self, u: usize, v: usize) -> i64 {
        self.row(u).iter().zip(self.row(v)).map(|(a, b)| (a & b).count_ones() as i64).sum()
    }

    /// Every non-edge becomes an edge and vice versa; labels are kept.
    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.set_edge(u, v, true);
                }
            }
        }
        g.labels = self.labels.clone();
        g
    }
}

impl fmt::Debug for SampledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SampledGraph {{ n: {}, edges: {} }}", self.n, self.edge_count())
    }
}

// ------------------------------------------------------------------ oracle

/// Exact signed count by injective backtracking.
pub fn signed_count_naive(g: &SampledGraph, h: &PatternGraph) -> Result<i64, CountError> {
    signed_count_naive_budget(g, h, DEFAULT_COUNT_BUDGET)
}

pub fn signed_count_naive_budget(g: &SampledGraph, h: &PatternGraph, budget: u128) -> Result<i64, CountError> {
    let hv = h.vertex_count();
    let n = g.n();
    if hv == 0 {
        return Ok(1);
    }
    let needed = copies_in_complete(h, n as u64)?;
    if needed > budget {
        return Err(CountError::BudgetExceeded { needed, budget });
    }
    let plan = Plan::new(h);
    let sums: Vec<i64> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut map = vec![usize::MAX; hv];
            let mut used = vec![false; n];
            map[plan.order[0]] = x;
            used[x] = true;
            plan.extend(g, 1, &mut map, &mut used, 1)
        })
        .collect();
    let constrained: i128 = sums.iter().map(|&s| s as i128).sum();
    let aut = automorphism_count(h) as i128;
    let total = constrained * plan.twin_group as i128;
    debug_assert_eq!(total % aut, 0);
    i64::try_from(total / aut).map_err(|_| CountError::Overflow)
}

/// Vertex order and twin constraints for the backtracking search.
///
/// Twins (`N(u) \ {v} = N(v) \ {u}`) can be swapped by an automorphism, so the
/// search only visits maps that are increasing within each twin class and
/// multiplies back by the size of that subgroup.
struct Plan {
    order: Vec<usize>,
    /// Earlier neighbours of `order[d]`.
    back: Vec<Vec<usize>>,
    /// Previous member of the same twin class in `order`, if any.
    prev_twin: Vec<Option<usize>>,
    twin_group: u64,
}

impl Plan {
    fn new(h: &PatternGraph) -> Self {
        let hv = h.vertex_count();
        let mut class = vec![usize::MAX; hv];
        let mut sizes = Vec::new();
        for v in 0..hv {
            if class[v] != usize::MAX {
                continue;
            }
            class[v] = sizes.len();
            let mut size = 1u64;
            for u in v + 1..hv {
                let mask = !(1u16 << u | 1u16 << v);
                if class[u] == usize::MAX && h.neighbors(u) & mask == h.neighbors(v) & mask {
                    class[u] = sizes.len();
                    size += 1;
                }
            }
            sizes.push(size);
        }
        let twin_group = sizes.iter().map(|&s| (1..=s).product::<u64>()).product();

        // Each vertex after the first in its component has an earlier neighbour.
        let mut order = Vec::with_capacity(hv);
        let mut placed = 0u16;
        while order.len() < hv {
            let start = (0..hv).filter(|&v| placed >> v & 1 == 0).max_by_key(|&v| (h.degree(v), usize::MAX - v)).unwrap();
            order.push(start);
            placed |= 1 << start;
            loop {
                let next = (0..hv)
                    .filter(|&v| placed >> v & 1 == 0 && h.neighbors(v) & placed != 0)
                    .max_by_key(|&v| ((h.neighbors(v) & placed).count_ones(), h.degree(v), usize::MAX - v));
                match next {
                    Some(v) => {
                        order.push(v);
                        placed |= 1 << v;
                    }
                    None => break,
                }
            }
        }
        let pos: Vec<usize> = {
            let mut p = vec![0; hv];
            for (i, &v) in order.iter().enumerate() {
                p[v] = i;
            }
            p
        };
        let back = order.iter().map(|&v| (0..hv).filter(|&u| pos[u] < pos[v] && h.has_edge(u, v)).collect()).collect();
        let prev_twin = order
            .iter()
            .enumerate()
            .map(|(i, &v)| order[..i].iter().rev().copied().find(|&u| class[u] == class[v]))
            .collect();
        Plan { order, back, prev_twin, twin_group }
    }

    fn extend(&self, g: &SampledGraph, d: usize, map: &mut [usize], used: &mut [bool], sign: i64) -> i64 {
        if d == self.order.len() {
            return sign;
        }
        let v = self.order[d];
        let lo = self.prev_twin[d].map_or(0, |u| map[u] + 1);
        let mut acc = 0;
        for x in lo..g.n() {
            if used[x] {
                continue;
            }
            let mut s = sign;
            for &u in &self.back[d] {
                s *= g.sign(map[u], x);
            }
            map[v] = x;
            used[x] = true;
            acc += self.extend(g, d + 1, map, used, s);
            used[x] = false;
        }
        map[v] = usize::MAX;
        acc
    }
}

// --------------------------------------------------------------- fast paths

fn binom_i128(n: usize, r: usize) -> i128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: i128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// `[x^t] (1 + x)^a (1 - x)^b`: the signed sum over `t`-subsets of `a` plus
/// signs and `b` minus signs.
pub fn star_center_coefficient(a: usize, b: usize, t: usize) -> i128 {
    (0..=t.min(a))
        .map(|j| {
            let c = binom_i128(a, j) * binom_i128(b, t - j);
            if (t - j) % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .sum()
}

/// Signed `Star_t` count from the degree sequence.
pub fn signed_star_count(g: &SampledGraph, t: usize) -> Result<i64, CountError> {
    let n = g.n();
    if t == 0 || t + 1 > n {
        return Err(CountError::StarOutOfRange { t, max: n.saturating_sub(1) });
    }
    let mut total: i128 = 0;
    for v in 0..n {
        let a = g.degree(v);
        total += star_center_coefficient(a, n - 1 - a, t);
    }
    // a single edge is a 1-star around either endpoint
    if t == 1 {
        total /= 2;
    }
    i64::try_from(total).map_err(|_| CountError::Overflow)
}

/// Off-diagonal entries of `S^2` for the zero-diagonal sign matrix, passed to
/// `f(i, j, s2_ij)` for every `i < j`.
fn for_each_s2(g: &SampledGraph, mut f: impl FnMut(usize, usize, i64)) {
    let n = g.n() as i64;
    let deg: Vec<i64> = g.degrees().iter().map(|&d| d as i64).collect();
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            let a = g.has_edge(i, j) as i64;
            let s2 = 4 * g.common_neighbors(i, j) - 2 * (deg[i] - a) - 2 * (deg[j] - a) + (n - 2);
            f(i, j, s2);
        }
    }
}

/// `tr(S^3)` and `tr(S^4)` of the zero-diagonal sign matrix.
pub fn sign_traces(g: &SampledGraph) -> (i128, i128) {
    let n = g.n() as i128;
    let mut t3: i128 = 0;
    let mut t4: i128 = n * (n - 1) * (n - 1);
    for_each_s2(g, |i, j, s2| {
        t3 += 2 * (s2 * g.sign(i, j)) as i128;
        t4 += 2 * (s2 as i128) * (s2 as i128);
    });
    (t3, t4)
}

/// Signed triangle count `tr(S^3) / 6`.
pub fn signed_triangle_fast(g: &SampledGraph) -> i64 {
    let (t3, _) = sign_traces(g);
    debug_assert_eq!(t3 % 6, 0);
    (t3 / 6) as i64
}

/// Signed 4-cycle count `(tr(S^4) - n(n-1)(2n-3)) / 8`.
///
/// With a zero diagonal the closed 4-walks that are not 4-cycles are exactly
/// `i j i l` and `i j k j`, each contributing 1: `2 n (n-1)^2` walks minus the
/// `n (n-1)` counted twice.
pub fn signed_cycle4_fast(g: &SampledGraph) -> i64 {
    let (_, t4) = sign_traces(g);
    let n = g.n() as i128;
    let c = t4 - n * (n - 1) * (2 * n - 3);
    debug_assert_eq!(c % 8, 0);
    (c / 8) as i64
}

/// Converts `tr((2A - J)^3)`, whose diagonal is -1, back to the signed
/// triangle count: that trace equals `tr(S^3) - 3 n (n-1) - n`.
pub fn triangle_from_unit_diagonal_trace(trace: i128, n: usize) -> i128 {
    let n = n as i128;
    (trace + 3 * n * (n - 1) + n) / 6
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountPath {
    Star,
    Triangle,
    Cycle4,
    Naive,
}

pub fn count_path(h: &PatternGraph) -> CountPath {
    if h.as_star().is_some() {
        CountPath::Star
    } else {
        match h.as_cycle() {
            Some(3) => CountPath::Triangle,
            Some(4) => CountPath::Cycle4,
            _ => CountPath::Naive,
        }
    }
}

/// `SC_H(G)` through the fastest available path.
pub fn signed_count(g: &SampledGraph, h: &PatternGraph) -> Result<i64, CountError> {
    match count_path(h) {
        CountPath::Star if h.vertex_count() <= g.n() => signed_star_count(g, h.as_star().unwrap()),
        CountPath::Triangle if g.n() >= 3 => Ok(signed_triangle_fast(g)),
        CountPath::Cycle4 if g.n() >= 4 => Ok(signed_cycle4_fast(g)),
        _ => signed_count_naive(g, h),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{connected_catalog, disjoint_union, parse_graph};
    use crate::mc::{sample_er, SeededStream};
    use rand::Rng;
    use std::collections::HashSet;

    fn g(s: &str) -> PatternGraph {
        parse_graph(s).unwrap()
    }

    fn random_graph(n: usize, density: f64, seed: u64) -> SampledGraph {
        let mut rng = SeededStream::new(seed, 99).rng();
        let mut out = SampledGraph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < density {
                    out.set_edge(i, j, true);
                }
            }
        }
        out
    }

    /// Every injective map, deduplicated by edge set.
    fn raw_count(gr: &SampledGraph, h: &PatternGraph) -> i64 {
        let hv = h.vertex_count();
        let mut seen = HashSet::new();
        let mut total = 0;
        let mut map = vec![0; hv];
        fn rec(d: usize, gr: &SampledGraph, h: &PatternGraph, map: &mut Vec<usize>, seen: &mut HashSet<Vec<(usize, usize)>>, total: &mut i64) {
            if d == map.len() {
                let mut e: Vec<_> = h.edges().iter().map(|&(u, v)| (map[u].min(map[v]), map[u].max(map[v]))).collect();
                e.sort();
                if seen.insert(e.clone()) {
                    *total += e.iter().map(|&(u, v)| gr.sign(u, v)).product::<i64>();
                }
                return;
            }
            for x in 0..gr.n() {
                if !map[..d].contains(&x) {
                    map[d] = x;
                    rec(d + 1, gr, h, map, seen, total);
                }
            }
        }
        rec(0, gr, h, &mut map, &mut seen, &mut total);
        total
    }

    #[test]
    fn naive_examples() {
        assert_eq!(signed_count_naive(&SampledGraph::empty(3), &g("triangle")).unwrap(), -1);
        for h in connected_catalog(4) {
            let n = 7;
            assert_eq!(signed_count_naive(&SampledGraph::complete(n), &h).unwrap() as u128, copies_in_complete(&h, n as u64).unwrap());
        }
        let path = SampledGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(signed_count_naive(&path, &g("star2")).unwrap(), -1);
    }

    #[test]
    fn naive_matches_raw_enumeration() {
        let mut shapes = connected_catalog(4);
        shapes.push(disjoint_union(&g("edge"), &g("star2")).unwrap());
        shapes.push(g("k4"));
        for seed in 0..6 {
            let gr = random_graph(7, 0.5, seed);
            for h in &shapes {
                assert_eq!(signed_count_naive(&gr, h).unwrap(), raw_count(&gr, h), "{}", h.name());
            }
        }
    }

    #[test]
    fn naive_budget() {
        let gr = SampledGraph::empty(40);
        assert!(matches!(signed_count_naive_budget(&gr, &g("cyc4"), 1000), Err(CountError::BudgetExceeded { .. })));
    }

    #[test]
    fn star_center_examples() {
        assert_eq!(star_center_coefficient(2, 1, 2), -1);
        assert_eq!(star_center_coefficient(3, 0, 3), 1);
        assert_eq!(star_center_coefficient(0, 4, 3), -4);
    }

    #[test]
    fn star_examples() {
        let n = 9;
        assert_eq!(signed_star_count(&SampledGraph::complete(n), 2).unwrap(), (n * (n - 1) * (n - 2) / 2) as i64);
        let gr = random_graph(30, 0.5, 1);
        for t in 1..=4 {
            assert_eq!(signed_star_count(&gr, t).unwrap(), signed_count_naive(&gr, &PatternGraph::star(t)).unwrap());
        }
        assert!(signed_star_count(&gr, 0).is_err());
        assert!(signed_star_count(&gr, 30).is_err());
    }

    #[test]
    fn triangle_examples() {
        assert_eq!(signed_triangle_fast(&SampledGraph::complete(3)), 1);
        assert_eq!(signed_triangle_fast(&SampledGraph::empty(3)), -1);
        for seed in 0..10 {
            let gr = random_graph(40, 0.5, seed);
            assert_eq!(signed_triangle_fast(&gr), signed_count_naive(&gr, &g("triangle")).unwrap());
        }
    }

    #[test]
    fn cycle4_examples() {
        assert_eq!(signed_cycle4_fast(&SampledGraph::empty(4)), 3);
        let c4 = SampledGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(signed_cycle4_fast(&c4), raw_count(&c4, &g("cyc4")));
        for seed in 0..10 {
            let gr = random_graph(40, 0.5, 100 + seed);
            assert_eq!(signed_cycle4_fast(&gr), signed_count_naive(&gr, &g("cyc4")).unwrap());
        }
    }

    /// Dense integer matrix power trace, used to check the corrections.
    fn dense_trace(gr: &SampledGraph, diag: i64, power: usize) -> i128 {
        let n = gr.n();
        let s: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| if i == j { diag as i128 } else { gr.sign(i, j) as i128 }).collect()).collect();
        let mut acc = s.clone();
        for _ in 1..power {
            acc = (0..n).map(|i| (0..n).map(|j| (0..n).map(|l| acc[i][l] * s[l][j]).sum()).collect()).collect();
        }
        (0..n).map(|i| acc[i][i]).sum()
    }

    #[test]
    fn trace_corrections() {
        for seed in 0..5 {
            let gr = random_graph(12, 0.4, 7 + seed);
            let (t3, t4) = sign_traces(&gr);
            assert_eq!(t3, dense_trace(&gr, 0, 3));
            assert_eq!(t4, dense_trace(&gr, 0, 4));
            let unit = dense_trace(&gr, -1, 3);
            assert_eq!(triangle_from_unit_diagonal_trace(unit, 12), signed_triangle_fast(&gr) as i128);
        }
    }

    #[test]
    fn dispatch() {
        assert_eq!(count_path(&g("star3")), CountPath::Star);
        assert_eq!(count_path(&g("cyc4")), CountPath::Cycle4);
        assert_eq!(count_path(&g("k4minus")), CountPath::Naive);
        assert_eq!(count_path(&g("triangle")), CountPath::Triangle);
        let gr = random_graph(15, 0.3, 2);
        for h in connected_catalog(4) {
            assert_eq!(signed_count(&gr, &h).unwrap(), signed_count_naive(&gr, &h).unwrap());
        }
    }

    #[test]
    fn complement_antisymmetry() {
        let gr = sample_er(11, &SeededStream::new(3, 0));
        let co = gr.complement();
        for h in connected_catalog(4) {
            let sign = if h.edge_count() % 2 == 0 { 1 } else { -1 };
            assert_eq!(signed_count(&co, &h).unwrap(), sign * signed_count(&gr, &h).unwrap());
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let gr = random_graph(10, 0.5, 4);
        let back = SampledGraph::from_edge_list(&gr.to_edge_list()).unwrap();
        assert_eq!(back, gr);
        let parsed = SampledGraph::from_edge_list("# comment\n4\n0-1\n2 3\n").unwrap();
        assert_eq!(parsed.edges(), vec![(0, 1), (2, 3)]);
        assert!(SampledGraph::from_edge_list("3\n0 3\n").is_err());
        assert!(SampledGraph::from_edge_list("3\n1 1\n").is_err());
        assert!(SampledGraph::from_edge_list("x\n").is_err());
    }
}
