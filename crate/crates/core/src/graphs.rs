//! Small pattern graphs: representation, parsing, canonical labelling,
//! enumeration up to isomorphism and the structural predicates used by
//! the family comparisons.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest vertex count a [`PatternGraph`] can hold. All `C(12, 2) = 66`
/// vertex pairs fit in one `u128`.
pub const MAX_VERTICES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph spec `{0}`")]
    Malformed(String),
    #[error("vertex index {0} exceeds the maximum of {max}", max = MAX_VERTICES - 1)]
    VertexOutOfRange(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("graph needs {0} vertices, more than {max}", max = MAX_VERTICES)]
    TooLarge(usize),
    #[error("max_edges must lie in [1, 8], got {0}")]
    EdgeBoundOutOfRange(usize),
    #[error("n = {n} is smaller than the pattern's {h} vertices")]
    HostTooSmall { n: u64, h: usize },
    #[error("copy count overflows 128 bits")]
    Overflow,
    #[error("invalid vertex map: {0}")]
    InvalidMap(String),
}

/// Bit index for the unordered pair `{u, v}`, `u != v`. Pairs are ordered by
/// their larger endpoint so the pairs inside `0..m` occupy bits `0..C(m,2)`.
#[inline]
pub(crate) fn pair_index(u: usize, v: usize) -> usize {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    b * (b - 1) / 2 + a
}

/// A simple undirected graph on at most [`MAX_VERTICES`] vertices.
///
/// Edges are stored as a bitset over vertex pairs. Catalog graphs never have
/// isolated vertices; the only legal graph with zero vertices is the empty
/// pattern produced by [`symmetric_product`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternGraph {
    n: u8,
    edges: u128,
}

impl PatternGraph {
    /// The empty pattern (no vertices, no edges). Its Fourier coefficient is 1.
    pub const fn empty() -> Self {
        PatternGraph { n: 0, edges: 0 }
    }

    /// Builds a graph from an explicit edge list, rejecting self-loops,
    /// out-of-range indices and isolated vertices.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let g = Self::from_edges_allow_isolated(n, edges)?;
        if let Some(v) = (0..n).find(|&v| g.degree(v) == 0) {
            return Err(GraphError::IsolatedVertex(v));
        }
        Ok(g)
    }

    pub(crate) fn from_edges_allow_isolated(
        n: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n));
        }
        let mut bits = 0u128;
        for &(u, v) in edges {
            if u >= MAX_VERTICES || v >= MAX_VERTICES {
                return Err(GraphError::VertexOutOfRange(u.max(v)));
            }
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u.max(v)));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            bits |= 1u128 << pair_index(u, v);
        }
        Ok(PatternGraph { n: n as u8, edges: bits })
    }

    pub(crate) fn from_raw(n: usize, edges: u128) -> Self {
        debug_assert!(n <= MAX_VERTICES);
        PatternGraph { n: n as u8, edges }
    }

    pub fn edge() -> Self {
        Self::star(1)
    }

    /// `Star_t`: a center (vertex 0) joined to `t` leaves.
    pub fn star(t: usize) -> Self {
        assert!((1..MAX_VERTICES).contains(&t), "star size out of range");
        let edges: Vec<_> = (1..=t).map(|l| (0, l)).collect();
        Self::from_edges(t + 1, &edges).unwrap()
    }

    /// The cycle on `t >= 3` vertices, edges `{i, i+1 mod t}`.
    pub fn cycle(t: usize) -> Self {
        assert!((3..=MAX_VERTICES).contains(&t), "cycle length out of range");
        let edges: Vec<_> = (0..t).map(|i| (i, (i + 1) % t)).collect();
        Self::from_edges(t, &edges).unwrap()
    }

    /// The path on `v >= 2` vertices.
    pub fn path(v: usize) -> Self {
        assert!((2..=MAX_VERTICES).contains(&v), "path length out of range");
        let edges: Vec<_> = (0..v - 1).map(|i| (i, i + 1)).collect();
        Self::from_edges(v, &edges).unwrap()
    }

    pub fn complete(t: usize) -> Self {
        assert!((2..=MAX_VERTICES).contains(&t), "clique size out of range");
        let mut edges = Vec::new();
        for v in 1..t {
            for u in 0..v {
                edges.push((u, v));
            }
        }
        Self::from_edges(t, &edges).unwrap()
    }

    /// `K_{a,b}` with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        assert!(a >= 1 && b >= 1 && a + b <= MAX_VERTICES, "K_{{a,b}} out of range");
        let mut edges = Vec::new();
        for u in 0..a {
            for v in a..a + b {
                edges.push((u, v));
            }
        }
        Self::from_edges(a + b, &edges).unwrap()
    }

    /// `K_4` minus the edge `{1, 3}`: degrees (3, 2, 3, 2).
    pub fn k4_minus() -> Self {
        Self::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.n as usize
    }

    pub fn edge_count(&self) -> usize {
        self.edges.count_ones() as usize
    }

    pub fn is_empty_pattern(&self) -> bool {
        self.n == 0
    }

    pub(crate) fn edge_bits(&self) -> u128 {
        self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.vertex_count() && v < self.vertex_count() && self.edges >> pair_index(u, v) & 1 == 1
    }

    /// Edges as `(u, v)` with `u < v`, ordered by `v` then `u`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        let mut bits = self.edges;
        while bits != 0 {
            let idx = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out.push(unpair(idx));
        }
        out
    }

    /// Neighbourhood of `v` as a vertex bitmask.
    pub fn neighbors(&self, v: usize) -> u16 {
        let mut mask = 0u16;
        for u in 0..self.vertex_count() {
            if self.has_edge(u, v) {
                mask |= 1 << u;
            }
        }
        mask
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.vertex_count()).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Relabels vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.vertex_count());
        let mut bits = 0u128;
        for (u, v) in self.edges() {
            bits |= 1u128 << pair_index(perm[u], perm[v]);
        }
        PatternGraph { n: self.n, edges: bits }
    }

    /// Drops isolated vertices, compacting the remaining indices in order.
    pub fn remove_isolated(&self) -> Self {
        let n = self.vertex_count();
        let mut map = vec![usize::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if self.neighbors(v) != 0 {
                map[v] = next;
                next += 1;
            }
        }
        let mut bits = 0u128;
        for (u, v) in self.edges() {
            bits |= 1u128 << pair_index(map[u], map[v]);
        }
        PatternGraph { n: next as u8, edges: bits }
    }

    /// Vertex sets of the connected components, each as a bitmask, ordered
    /// by smallest vertex.
    pub fn components(&self) -> Vec<u16> {
        let n = self.vertex_count();
        let adj: Vec<u16> = (0..n).map(|v| self.neighbors(v)).collect();
        let mut seen = 0u16;
        let mut out = Vec::new();
        for s in 0..n {
            if seen >> s & 1 == 1 {
                continue;
            }
            let mut comp = 1u16 << s;
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = adj[v] & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() > 0 && self.components().len() == 1
    }

    /// The subgraph induced on `mask`, relabelled to `0..popcount(mask)`.
    pub fn induced(&self, mask: u16) -> Self {
        let verts: Vec<usize> = (0..self.vertex_count()).filter(|&v| mask >> v & 1 == 1).collect();
        let mut bits = 0u128;
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    bits |= 1u128 << pair_index(i, j);
                }
            }
        }
        PatternGraph { n: verts.len() as u8, edges: bits }
    }

    /// Connected components as standalone graphs.
    pub fn component_graphs(&self) -> Vec<PatternGraph> {
        self.components().into_iter().map(|c| self.induced(c)).collect()
    }

    /// `Some(t)` if this graph is `Star_t` (the edge counts as `Star_1`).
    pub fn as_star(&self) -> Option<usize> {
        let n = self.vertex_count();
        let m = self.edge_count();
        if n < 2 || m != n - 1 {
            return None;
        }
        if n == 2 {
            return Some(1);
        }
        let degs = self.degrees();
        let centers = degs.iter().filter(|&&d| d == m).count();
        let leaves = degs.iter().filter(|&&d| d == 1).count();
        (centers == 1 && leaves == m).then_some(m)
    }

    /// `Some(t)` if this graph is the cycle on `t >= 3` vertices.
    pub fn as_cycle(&self) -> Option<usize> {
        let n = self.vertex_count();
        (n >= 3 && self.edge_count() == n && self.degrees().iter().all(|&d| d == 2) && self.is_connected())
            .then_some(n)
    }

    /// JSON form `{"n": int, "edges": [[u, v], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson::from(self)).expect("graph serializes")
    }

    /// Compact edge-list spec accepted by [`parse_graph`]; `""` for the empty pattern.
    pub fn to_spec(&self) -> String {
        self.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(";")
    }
}

fn unpair(idx: usize) -> (usize, usize) {
    let mut b = 1;
    while (b + 1) * b / 2 <= idx {
        b += 1;
    }
    (idx - b * (b - 1) / 2, b)
}

impl fmt::Debug for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PatternGraph(n={}, [{}])", self.n, self.to_spec())
    }
}

impl fmt::Display for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl From<&PatternGraph> for GraphJson {
    fn from(g: &PatternGraph) -> Self {
        GraphJson { n: g.vertex_count(), edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect() }
    }
}

impl Serialize for PatternGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PatternGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        let edges: Vec<_> = raw.edges.iter().map(|e| (e[0], e[1])).collect();
        if raw.n == 0 && edges.is_empty() {
            return Ok(PatternGraph::empty());
        }
        PatternGraph::from_edges(raw.n, &edges).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------- parsing

/// Parses a named token (`star3`, `cyc4`, `k4`, `k2x3`, `k23`, `k4minus`,
/// `path4`, `edge`, `triangle`, `wedge`) or a `;`-separated list of `u-v`
/// pairs with 0-based vertex indices.
pub fn parse_graph(spec: &str) -> Result<PatternGraph, GraphError> {
    let s = spec.trim();
    let bad = || GraphError::Malformed(spec.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if s.contains('-') && s.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return parse_edge_list(s);
    }
    let lower = s.to_ascii_lowercase();
    let num = |prefix: &str| -> Result<usize, GraphError> {
        lower[prefix.len()..].parse::<usize>().map_err(|_| bad())
    };
    let checked = |v: usize| if v > MAX_VERTICES { Err(GraphError::TooLarge(v)) } else { Ok(v) };
    match lower.as_str() {
        "edge" => return Ok(PatternGraph::edge()),
        "wedge" => return Ok(PatternGraph::star(2)),
        "triangle" => return Ok(PatternGraph::cycle(3)),
        "k4minus" => return Ok(PatternGraph::k4_minus()),
        _ => {}
    }
    if lower.starts_with("star") {
        let t = num("star")?;
        if t == 0 {
            return Err(bad());
        }
        checked(t + 1)?;
        return Ok(PatternGraph::star(t));
    }
    if lower.starts_with("cyc") {
        let t = checked(num("cyc")?)?;
        if t < 3 {
            return Err(bad());
        }
        return Ok(PatternGraph::cycle(t));
    }
    if lower.starts_with("path") {
        let v = checked(num("path")?)?;
        if v < 2 {
            return Err(bad());
        }
        return Ok(PatternGraph::path(v));
    }
    if let Some(rest) = lower.strip_prefix('k') {
        let (a, b) = if let Some((a, b)) = rest.split_once('x') {
            (a.parse::<usize>().map_err(|_| bad())?, Some(b.parse::<usize>().map_err(|_| bad())?))
        } else if rest.len() == 2 && rest.chars().all(|c| c.is_ascii_digit()) && !rest.starts_with('1') {
            // "k23" shorthand for K_{2,3}; "k12" would be K_12 and is too large anyway.
            let d: Vec<usize> = rest.chars().map(|c| c.to_digit(10).unwrap() as usize).collect();
            (d[0], Some(d[1]))
        } else {
            (rest.parse::<usize>().map_err(|_| bad())?, None)
        };
        return match b {
            Some(b) => {
                if a == 0 || b == 0 {
                    return Err(bad());
                }
                checked(a + b)?;
                Ok(PatternGraph::complete_bipartite(a, b))
            }
            None => {
                let t = checked(a)?;
                if t < 2 {
                    return Err(bad());
                }
                Ok(PatternGraph::complete(t))
            }
        };
    }
    Err(bad())
}

fn parse_edge_list(s: &str) -> Result<PatternGraph, GraphError> {
    let mut edges = Vec::new();
    let mut max = 0;
    for pair in s.split(';') {
        let pair = pair.trim();
        let (u, v) = pair.split_once('-').ok_or_else(|| GraphError::Malformed(pair.to_string()))?;
        let u: usize = u.trim().parse().map_err(|_| GraphError::Malformed(pair.to_string()))?;
        let v: usize = v.trim().parse().map_err(|_| GraphError::Malformed(pair.to_string()))?;
        if u >= MAX_VERTICES || v >= MAX_VERTICES {
            return Err(GraphError::VertexOutOfRange(u.max(v)));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        max = max.max(u).max(v);
        edges.push((u, v));
    }
    PatternGraph::from_edges(max + 1, &edges)
}

// ---------------------------------------------------- canonical labelling

/// Isomorphism-invariant code: the adjacency bits of a canonical relabelling.
///
/// For connected graphs the relabelling is the lexicographically minimal
/// adjacency string among vertex orders with non-increasing degree.
/// Disconnected graphs concatenate their component representatives in sorted
/// order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct CanonicalCode {
    pub n: u8,
    pub bits: u128,
}

impl CanonicalCode {
    /// The canonical representative graph.
    pub fn graph(&self) -> PatternGraph {
        PatternGraph::from_raw(self.n as usize, self.bits)
    }

    pub fn hex(&self) -> String {
        format!("{:02x}:{:x}", self.n, self.bits)
    }
}

/// Computes the canonical code of `g`.
///
/// The search enumerates degree-ordered relabellings with prefix pruning, so it
/// is exact for every graph that fits in [`MAX_VERTICES`]; its cost grows with
/// the automorphism group, which stays small for the sparse patterns used here.
pub fn canonical_form(g: &PatternGraph) -> CanonicalCode {
    let comps = g.components();
    if comps.len() <= 1 {
        let c = canonical_connected(g);
        return CanonicalCode { n: c.n, bits: c.edges };
    }
    let mut parts: Vec<PatternGraph> = comps.iter().map(|&c| canonical_connected(&g.induced(c))).collect();
    // Larger components first, then by their own code.
    parts.sort_by(|a, b| b.n.cmp(&a.n).then(b.edge_count().cmp(&a.edge_count())).then(a.edges.cmp(&b.edges)));
    let mut acc = PatternGraph::empty();
    for p in parts {
        acc = disjoint_union(&acc, &p).expect("components fit");
    }
    CanonicalCode { n: acc.n, bits: acc.edges }
}

/// Canonical relabelling of a (connected or edgeless) graph by branch and bound.
fn canonical_connected(g: &PatternGraph) -> PatternGraph {
    let n = g.vertex_count();
    if n <= 1 {
        return *g;
    }
    let adj: Vec<u16> = (0..n).map(|v| g.neighbors(v)).collect();
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let mut degree_slots: Vec<u32> = deg.clone();
    degree_slots.sort_unstable_by(|a, b| b.cmp(a));

    struct Search<'a> {
        n: usize,
        adj: &'a [u16],
        deg: &'a [u32],
        slots: &'a [u32],
        order: Vec<usize>,
        used: u16,
        best: Option<u128>,
    }

    impl Search<'_> {
        // Bits contributed by placing vertex `v` at position `pos`, pairs (i, pos) for i < pos.
        fn column(&self, v: usize, pos: usize) -> u128 {
            let mut col = 0u128;
            for (i, &u) in self.order[..pos].iter().enumerate() {
                if self.adj[v] >> u & 1 == 1 {
                    col |= 1u128 << i;
                }
            }
            col
        }

        // Lexicographic "smaller" on bit strings read from bit 0 upward is the
        // same as comparing the bit-reversed integers; reverse per column and
        // compare prefix by prefix instead.
        fn go(&mut self, pos: usize, prefix: u128) {
            if pos == self.n {
                let better = match self.best {
                    None => true,
                    Some(b) => lex_less(prefix, b, self.n),
                };
                if better {
                    self.best = Some(prefix);
                }
                return;
            }
            for v in 0..self.n {
                if self.used >> v & 1 == 1 || self.deg[v] != self.slots[pos] {
                    continue;
                }
                let col = self.column(v, pos);
                let next = prefix | col << (pos * (pos.saturating_sub(1)) / 2);
                if let Some(b) = self.best {
                    let width = (pos + 1) * pos / 2;
                    let mask = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
                    if lex_less(b & mask, next & mask, pos + 1) {
                        continue;
                    }
                }
                self.used |= 1 << v;
                self.order.push(v);
                self.go(pos + 1, next);
                self.order.pop();
                self.used &= !(1 << v);
            }
        }
    }

    let mut s = Search { n, adj: &adj, deg: &deg, slots: &degree_slots, order: Vec::with_capacity(n), used: 0, best: None };
    s.go(0, 0);
    PatternGraph::from_raw(n, s.best.expect("at least one ordering"))
}

/// `a < b` comparing bit strings `bit0, bit1, ...` lexicographically over the
/// first `C(m, 2)` pairs.
fn lex_less(a: u128, b: u128, m: usize) -> bool {
    let width = m * m.saturating_sub(1) / 2;
    let diff = a ^ b;
    if diff == 0 || width == 0 {
        return false;
    }
    let first = diff.trailing_zeros() as usize;
    first < width && a >> first & 1 == 0
}

/// Whether `a` and `b` are isomorphic.
pub fn isomorphic(a: &PatternGraph, b: &PatternGraph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && canonical_form(a) == canonical_form(b)
}

/// Number of vertex permutations preserving the edge set.
pub fn automorphism_count(g: &PatternGraph) -> u64 {
    let n = g.vertex_count();
    if n == 0 {
        return 1;
    }
    let adj: Vec<u16> = (0..n).map(|v| g.neighbors(v)).collect();
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();

    fn go(pos: usize, n: usize, adj: &[u16], deg: &[u32], image: &mut Vec<usize>, used: u16) -> u64 {
        if pos == n {
            return 1;
        }
        let mut total = 0;
        for w in 0..n {
            if used >> w & 1 == 1 || deg[w] != deg[pos] {
                continue;
            }
            let ok = (0..pos).all(|u| (adj[pos] >> u & 1) == (adj[w] >> image[u] & 1));
            if ok {
                image.push(w);
                total += go(pos + 1, n, adj, deg, image, used | 1 << w);
                image.pop();
            }
        }
        total
    }
    go(0, n, &adj, &deg, &mut Vec::with_capacity(n), 0)
}

/// Falling factorial `n (n-1) ... (n-h+1)`: the number of labelled copies of an
/// `h`-vertex graph in `K_n`.
pub fn labeled_copies_in_complete(g: &PatternGraph, n: u64) -> Result<u128, GraphError> {
    let h = g.vertex_count();
    if (n as u128) < h as u128 {
        return Err(GraphError::HostTooSmall { n, h });
    }
    let mut acc: u128 = 1;
    for i in 0..h as u64 {
        acc = acc.checked_mul((n - i) as u128).ok_or(GraphError::Overflow)?;
    }
    Ok(acc)
}

/// Number of distinct subgraphs of `K_n` isomorphic to `g`, i.e. the labelled
/// count divided by `|Aut(g)|`.
pub fn copies_in_complete(g: &PatternGraph, n: u64) -> Result<u128, GraphError> {
    let labeled = labeled_copies_in_complete(g, n)?;
    let aut = automorphism_count(g) as u128;
    debug_assert_eq!(labeled % aut, 0);
    Ok(labeled / aut)
}

/// Vertex-disjoint union, with `b` shifted by `a.vertex_count()`.
pub fn disjoint_union(a: &PatternGraph, b: &PatternGraph) -> Result<PatternGraph, GraphError> {
    let na = a.vertex_count();
    let n = na + b.vertex_count();
    if n > MAX_VERTICES {
        return Err(GraphError::TooLarge(n));
    }
    let mut bits = a.edges;
    for (u, v) in b.edges() {
        bits |= 1u128 << pair_index(u + na, v + na);
    }
    Ok(PatternGraph::from_raw(n, bits))
}

/// `H ⊗ K`: embed `a` and `b` into a common vertex set through `map_a` and
/// `map_b`, keep edges present in exactly one of them and drop isolated
/// vertices. Identical copies cancel to [`PatternGraph::empty`].
pub fn symmetric_product(
    a: &PatternGraph,
    b: &PatternGraph,
    map_a: &[usize],
    map_b: &[usize],
) -> Result<PatternGraph, GraphError> {
    let embed = |g: &PatternGraph, map: &[usize]| -> Result<u128, GraphError> {
        if map.len() != g.vertex_count() {
            return Err(GraphError::InvalidMap(format!("map has {} entries for {} vertices", map.len(), g.vertex_count())));
        }
        let mut seen = 0u32;
        for &x in map {
            if x >= MAX_VERTICES {
                return Err(GraphError::VertexOutOfRange(x));
            }
            if seen >> x & 1 == 1 {
                return Err(GraphError::InvalidMap(format!("vertex {x} used twice")));
            }
            seen |= 1 << x;
        }
        Ok(g.edges().into_iter().fold(0u128, |acc, (u, v)| acc | 1u128 << pair_index(map[u], map[v])))
    };
    let ea = embed(a, map_a)?;
    let eb = embed(b, map_b)?;
    let span = map_a.iter().chain(map_b).copied().max().map_or(0, |m| m + 1);
    Ok(PatternGraph::from_raw(span, ea ^ eb).remove_isolated())
}

/// Symmetric product when both graphs already live on the same vertex labels.
pub fn symmetric_product_same_labels(a: &PatternGraph, b: &PatternGraph) -> PatternGraph {
    let n = a.vertex_count().max(b.vertex_count());
    PatternGraph::from_raw(n, a.edges ^ b.edges).remove_isolated()
}

// ------------------------------------------------------------ enumeration

/// Every graph without isolated vertices on at most `max_edges` edges, one per
/// isomorphism class, ordered by vertex count, edge count, canonical code.
///
/// Disconnected classes needing more than [`MAX_VERTICES`] vertices (only
/// possible for `max_edges >= 7`) are omitted.
pub fn enumerate_graphs(max_edges: usize, connected_only: bool) -> Result<Vec<PatternGraph>, GraphError> {
    if !(1..=8).contains(&max_edges) {
        return Err(GraphError::EdgeBoundOutOfRange(max_edges));
    }
    let connected = connected_by_edges(max_edges);
    let mut out: Vec<CanonicalCode> = connected.iter().flatten().copied().collect();
    if !connected_only {
        let pool: Vec<CanonicalCode> = out.clone();
        let mut seen: HashSet<CanonicalCode> = out.iter().copied().collect();
        // Multisets of >= 2 connected components, grown in non-decreasing pool order.
        let mut frontier: Vec<(PatternGraph, usize)> =
            pool.iter().enumerate().map(|(i, c)| (c.graph(), i)).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (g, last) in &frontier {
                for (j, c) in pool.iter().enumerate().skip(*last) {
                    let part = c.graph();
                    if g.edge_count() + part.edge_count() > max_edges
                        || g.vertex_count() + part.vertex_count() > MAX_VERTICES
                    {
                        continue;
                    }
                    let u = disjoint_union(g, &part)?;
                    let code = canonical_form(&u);
                    if seen.insert(code) {
                        out.push(code);
                    }
                    next.push((u, j));
                }
            }
            frontier = next;
        }
    }
    let mut graphs: Vec<PatternGraph> = out.into_iter().map(|c| c.graph()).collect();
    graphs.sort_by_key(|g| (g.vertex_count(), g.edge_count(), canonical_form(g)));
    Ok(graphs)
}

/// Connected classes indexed by exact edge count (`0` is unused).
fn connected_by_edges(max_edges: usize) -> Vec<Vec<CanonicalCode>> {
    let mut levels: Vec<Vec<CanonicalCode>> = vec![Vec::new(); max_edges + 1];
    levels[1].push(canonical_form(&PatternGraph::edge()));
    for m in 1..max_edges {
        let mut seen: BTreeSet<CanonicalCode> = BTreeSet::new();
        for code in &levels[m] {
            let g = code.graph();
            let n = g.vertex_count();
            // Add an edge between existing non-adjacent vertices.
            for v in 1..n {
                for u in 0..v {
                    if !g.has_edge(u, v) {
                        let h = PatternGraph::from_raw(n, g.edges | 1u128 << pair_index(u, v));
                        seen.insert(canonical_form(&h));
                    }
                }
            }
            // Hang a new leaf.
            if n < MAX_VERTICES {
                for u in 0..n {
                    let h = PatternGraph::from_raw(n + 1, g.edges | 1u128 << pair_index(u, n));
                    seen.insert(canonical_form(&h));
                }
            }
        }
        levels[m + 1] = seen.into_iter().collect();
    }
    levels
}

/// The connected catalog `CGraphs_{<=d}` used by the verification routines.
pub fn connected_catalog(dmax: usize) -> Vec<PatternGraph> {
    enumerate_graphs(dmax, true).expect("dmax in range")
}

// ----------------------------------------------------------------- profile

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphProfile {
    pub degree_sequence: Vec<usize>,
    pub is_tree: bool,
    pub is_connected: bool,
    pub is_bipartite: bool,
    /// `(u, v)` with `u <= v`; for disconnected graphs the most unbalanced
    /// proper 2-colouring.
    pub bipartition_sizes: Option<(usize, usize)>,
    /// Connected and without a bridge (stays connected after deleting any edge).
    pub is_2connected: bool,
    pub leaf_vertices: Vec<usize>,
    pub all_degrees_even: bool,
    pub has_odd_degree_vertex: bool,
}

pub fn profile(g: &PatternGraph) -> GraphProfile {
    let n = g.vertex_count();
    let degs = g.degrees();
    let mut degree_sequence = degs.clone();
    degree_sequence.sort_unstable();
    let is_connected = g.is_connected();
    let is_tree = is_connected && g.edge_count() + 1 == n;
    let bipartition_sizes = bipartition(g);
    let is_2connected = is_connected && g.edge_count() > 0 && g.edges().into_iter().all(|(u, v)| {
        PatternGraph::from_raw(n, g.edges & !(1u128 << pair_index(u, v))).is_connected()
    });
    let all_degrees_even = degs.iter().all(|d| d % 2 == 0);
    GraphProfile {
        degree_sequence,
        is_tree,
        is_connected,
        is_bipartite: bipartition_sizes.is_some(),
        bipartition_sizes,
        is_2connected,
        leaf_vertices: (0..n).filter(|&v| degs[v] == 1).collect(),
        all_degrees_even,
        has_odd_degree_vertex: !all_degrees_even,
    }
}

fn bipartition(g: &PatternGraph) -> Option<(usize, usize)> {
    let mut small = 0;
    let mut large = 0;
    for comp in g.components() {
        let c = g.induced(comp);
        let n = c.vertex_count();
        let mut color = vec![u8::MAX; n];
        color[0] = 0;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            for u in 0..n {
                if c.has_edge(u, v) {
                    if color[u] == u8::MAX {
                        color[u] = 1 - color[v];
                        stack.push(u);
                    } else if color[u] == color[v] {
                        return None;
                    }
                }
            }
        }
        let ones = color.iter().filter(|&&x| x == 1).count();
        let zeros = n - ones;
        small += ones.min(zeros);
        large += ones.max(zeros);
    }
    Some((small, large))
}

impl PatternGraph {
    /// A readable name for well-known shapes, falling back to the edge list.
    pub fn name(&self) -> String {
        if self.is_empty_pattern() {
            return "empty".into();
        }
        if let Some(t) = self.as_star() {
            return format!("star{t}");
        }
        if let Some(t) = self.as_cycle() {
            return format!("cyc{t}");
        }
        let n = self.vertex_count();
        if n >= 4 && self.edge_count() == n * (n - 1) / 2 {
            return format!("k{n}");
        }
        if isomorphic(self, &PatternGraph::k4_minus()) {
            return "k4minus".into();
        }
        if n >= 4 && self.edge_count() == n - 1 && isomorphic(self, &PatternGraph::path(n)) {
            return format!("path{n}");
        }
        if let Some((a, b)) = profile(self).bipartition_sizes {
            if a >= 2 && self.edge_count() == a * b && self.is_connected() {
                return format!("k{a}x{b}");
            }
        }
        self.to_spec()
    }
}
