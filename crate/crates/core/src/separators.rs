//! Minimal separators, minimum vertex cuts and the three structural
//! parameters of a graph: separability order, degree and degree two.
//!
//! The separability order is the maximum, over non-adjacent vertex pairs,
//! of the smallest separator size for that pair. Pair minima are computed
//! exactly by maximum flow on the vertex-split digraph (Menger duality);
//! full minimal-separator enumeration exists for desk-scale graphs and is
//! guarded by a vertex-count cap.

use serde::{Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{UndirectedGraph, VertexSet};

/// Hard cap on `minimal_separators` enumeration (subsets of `V \ {a,b}`).
pub const ENUMERATION_VERTEX_CAP: usize = 16;

/// Separability order of a graph: a natural number, or infinite for
/// complete graphs. `Finite(n) < Infinite` for every `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SepOrder {
    Finite(usize),
    Infinite,
}

impl SepOrder {
    pub fn is_infinite(self) -> bool {
        matches!(self, SepOrder::Infinite)
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            SepOrder::Finite(n) => Some(n),
            SepOrder::Infinite => None,
        }
    }
}

impl fmt::Display for SepOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SepOrder::Finite(n) => write!(f, "{n}"),
            SepOrder::Infinite => write!(f, "infinite"),
        }
    }
}

/// Numbers serialize as numbers; the infinite order serializes as the
/// string `"infinite"` so JSON consumers never see a sentinel integer.
impl Serialize for SepOrder {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SepOrder::Finite(n) => serializer.serialize_u64(*n as u64),
            SepOrder::Infinite => serializer.serialize_str("infinite"),
        }
    }
}

fn require_non_adjacent(g: &UndirectedGraph, a: usize, b: usize) -> Result<()> {
    let n = g.vertex_count();
    if a >= n || b >= n {
        return Err(Error::UnknownVertex(format!("index {}", a.max(b))));
    }
    if a == b {
        return Err(Error::Domain("separator query needs two distinct vertices".into()));
    }
    if g.is_adjacent(a, b) {
        return Err(Error::Domain(format!(
            "adjacent pair ({}, {}) has no separator",
            g.label_of(a),
            g.label_of(b)
        )));
    }
    Ok(())
}

/// Does `s` meet every path between `a` and `b`?
pub fn is_separator(g: &UndirectedGraph, a: usize, b: usize, s: &VertexSet) -> Result<bool> {
    require_non_adjacent(g, a, b)?;
    if s.contains(&a) || s.contains(&b) {
        return Err(Error::Domain("separator may not contain either endpoint".into()));
    }
    let one = |v| VertexSet::from([v]);
    g.separates(&one(a), &one(b), s)
}

/// Is `s` a separator of `a`, `b` none of whose proper subsets separates?
///
/// Uses the component characterization: `s` separates, and every member
/// of `s` has a neighbor in the `a`-side component and in the `b`-side
/// component of the graph with `s` removed. A pair in two different
/// components has no minimal separators at all; the vacuous empty set
/// does not count.
pub fn is_minimal_separator(
    g: &UndirectedGraph,
    a: usize,
    b: usize,
    s: &VertexSet,
) -> Result<bool> {
    if !is_separator(g, a, b, s)? {
        return Ok(false);
    }
    if s.is_empty() {
        // only a cross-component pair reaches here
        return Ok(false);
    }
    let side_a = g.component_avoiding(a, s);
    let side_b = g.component_avoiding(b, s);
    for &v in s {
        let nbrs = g.neighbors(v)?;
        if !nbrs.iter().any(|w| side_a.contains(w)) || !nbrs.iter().any(|w| side_b.contains(w)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All minimal separators of a non-adjacent pair, sorted by size then
/// lexicographically. Empty exactly when the pair lies in two different
/// connected components.
///
/// Enumerates every subset of `V \ {a, b}`, so the graph must have at
/// most [`ENUMERATION_VERTEX_CAP`] vertices; use
/// [`minimal_separators_with_cap`] to raise the guard deliberately.
pub fn minimal_separators(g: &UndirectedGraph, a: usize, b: usize) -> Result<Vec<VertexSet>> {
    minimal_separators_with_cap(g, a, b, ENUMERATION_VERTEX_CAP)
}

pub fn minimal_separators_with_cap(
    g: &UndirectedGraph,
    a: usize,
    b: usize,
    vertex_cap: usize,
) -> Result<Vec<VertexSet>> {
    require_non_adjacent(g, a, b)?;
    let n = g.vertex_count();
    if n > vertex_cap.min(30) {
        return Err(Error::Domain(format!(
            "minimal-separator enumeration is capped at {} vertices, got {n}",
            vertex_cap.min(30)
        )));
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
    let mut found = Vec::new();
    for mask in 0u32..(1u32 << others.len()) {
        let s: VertexSet = others
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        if is_minimal_separator(g, a, b, &s)? {
            found.push(s);
        }
    }
    found.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    Ok(found)
}

/// Size of a minimum `(a, b)` vertex cut; `0` when the pair is already
/// disconnected. Equals the smallest minimal-separator size.
pub fn min_separator_size(g: &UndirectedGraph, a: usize, b: usize) -> Result<usize> {
    Ok(min_vertex_cut(g, a, b)?.len())
}

/// A minimum-size `(a, b)` vertex cut, extracted from a maximum flow on
/// the vertex-split digraph. Minimum cuts are automatically minimal
/// separators. Returns the empty set for a disconnected pair.
pub fn min_vertex_cut(g: &UndirectedGraph, a: usize, b: usize) -> Result<VertexSet> {
    require_non_adjacent(g, a, b)?;
    let n = g.vertex_count();
    // Split every vertex v into entry node 2v and exit node 2v+1; internal
    // capacity 1 carries Menger's theorem, edge arcs are uncapacitated.
    let inf = (n + 1) as i64;
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        let cap = if v == a || v == b { inf } else { 1 };
        net.add_arc(2 * v, 2 * v + 1, cap);
    }
    for (u, v) in g.edges() {
        net.add_arc(2 * u + 1, 2 * v, inf);
        net.add_arc(2 * v + 1, 2 * u, inf);
    }
    let source = 2 * a + 1;
    let sink = 2 * b;
    let flow = net.max_flow(source, sink);
    let reachable = net.residual_reachable(source);
    let cut: VertexSet = (0..n)
        .filter(|&v| v != a && v != b && reachable[2 * v] && !reachable[2 * v + 1])
        .collect();
    debug_assert_eq!(flow as usize, cut.len());
    Ok(cut)
}

/// A minimal separator of `a` and `b` contained in the neighborhood of
/// `a`: the neighborhood of the component of `b` once `a` and all its
/// neighbors are removed. Every member also has degree at least two.
pub fn minimal_separator_near(g: &UndirectedGraph, a: usize, b: usize) -> Result<VertexSet> {
    require_non_adjacent(g, a, b)?;
    if !g.component_avoiding(a, &VertexSet::new()).contains(&b) {
        return Err(Error::Domain(format!(
            "vertices {} and {} are in different components; no separator needed",
            g.label_of(a),
            g.label_of(b)
        )));
    }
    let mut removed: VertexSet = g.neighbors(a)?.clone();
    removed.insert(a);
    let side_b = g.component_avoiding(b, &removed);
    let mut sep = VertexSet::new();
    for &v in &side_b {
        for &w in g.neighbors(v)? {
            if !side_b.contains(&w) {
                sep.insert(w);
            }
        }
    }
    debug_assert!(!sep.contains(&a));
    Ok(sep)
}

/// Separability order of the graph: infinite for complete graphs,
/// otherwise the maximum pair minimum-cut size over non-adjacent pairs.
pub fn separability_order(g: &UndirectedGraph) -> SepOrder {
    if g.is_complete() {
        return SepOrder::Infinite;
    }
    let n = g.vertex_count();
    let mut max = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            if !g.is_adjacent(a, b) {
                let size = min_separator_size(g, a, b).expect("pair is non-adjacent");
                max = max.max(size);
            }
        }
    }
    SepOrder::Finite(max)
}

/// Maximum vertex degree. Rejects graphs without vertices.
pub fn degree(g: &UndirectedGraph) -> Result<usize> {
    if g.vertex_count() == 0 {
        return Err(Error::Domain("degree of a graph with no vertices".into()));
    }
    Ok((0..g.vertex_count())
        .map(|v| g.neighbors(v).expect("in range").len())
        .max()
        .unwrap())
}

/// Number of neighbors of `v` whose own degree is at least two.
pub fn degree_two_of(g: &UndirectedGraph, v: usize) -> Result<usize> {
    Ok(g.neighbors(v)?
        .iter()
        .filter(|&&w| g.neighbors(w).expect("in range").len() >= 2)
        .count())
}

/// Maximum of [`degree_two_of`] over all vertices.
pub fn degree_two(g: &UndirectedGraph) -> Result<usize> {
    if g.vertex_count() == 0 {
        return Err(Error::Domain("degree two of a graph with no vertices".into()));
    }
    Ok((0..g.vertex_count())
        .map(|v| degree_two_of(g, v).expect("in range"))
        .max()
        .unwrap())
}

/// Pair order for one non-adjacent pair, with labels.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PairOrder {
    pub a: String,
    pub b: String,
    pub order: usize,
}

/// A pair attaining the separability order, with a minimum-size minimal
/// separator as certificate.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SeparatorWitness {
    pub a: String,
    pub b: String,
    pub separator: Vec<String>,
}

/// Structural summary of a graph: the separability order, degree, degree
/// two, per-pair orders and a witness pair.
#[derive(Debug, Clone, Serialize)]
pub struct SeparabilityReport {
    pub so: SepOrder,
    pub d: usize,
    pub d2: usize,
    pub components: Vec<Vec<String>>,
    pub pairs: Vec<PairOrder>,
    pub witness: Option<SeparatorWitness>,
}

impl SeparabilityReport {
    pub fn compute(g: &UndirectedGraph) -> Result<Self> {
        let d = degree(g)?;
        let d2 = degree_two(g)?;
        let n = g.vertex_count();
        let mut pairs = Vec::new();
        let mut best: Option<(usize, usize, usize)> = None;
        for a in 0..n {
            for b in (a + 1)..n {
                if g.is_adjacent(a, b) {
                    continue;
                }
                let order = min_separator_size(g, a, b)?;
                if best.is_none_or(|(_, _, m)| order > m) {
                    best = Some((a, b, order));
                }
                pairs.push(PairOrder {
                    a: g.label_of(a).to_string(),
                    b: g.label_of(b).to_string(),
                    order,
                });
            }
        }
        let so = if g.is_complete() {
            SepOrder::Infinite
        } else {
            SepOrder::Finite(best.map_or(0, |(_, _, m)| m))
        };
        let witness = match best {
            Some((a, b, _)) => {
                let cut = min_vertex_cut(g, a, b)?;
                Some(SeparatorWitness {
                    a: g.label_of(a).to_string(),
                    b: g.label_of(b).to_string(),
                    separator: cut.iter().map(|&v| g.label_of(v).to_string()).collect(),
                })
            }
            None => None,
        };
        let components = g
            .connected_components()
            .into_iter()
            .map(|c| c.iter().map(|&v| g.label_of(v).to_string()).collect())
            .collect();
        Ok(Self { so, d, d2, components, pairs, witness })
    }
}

/// Unit-capacity max flow via repeated BFS augmentation. Arc `i` and its
/// reverse are stored at `2i`, `2i + 1`.
struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        Self { adj: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i64) {
        let id = self.to.len();
        self.to.push(to);
        self.cap.push(cap);
        self.to.push(from);
        self.cap.push(0);
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        let mut total = 0;
        loop {
            // BFS for a shortest augmenting path in the residual network.
            let mut pred: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut queue = std::collections::VecDeque::from([source]);
            let mut found = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for &arc in &self.adj[u] {
                    let v = self.to[arc];
                    if self.cap[arc] > 0 && pred[v].is_none() && v != source {
                        pred[v] = Some(arc);
                        if v == sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !found {
                return total;
            }
            let mut bottleneck = i64::MAX;
            let mut v = sink;
            while v != source {
                let arc = pred[v].unwrap();
                bottleneck = bottleneck.min(self.cap[arc]);
                v = self.to[arc ^ 1];
            }
            let mut v = sink;
            while v != source {
                let arc = pred[v].unwrap();
                self.cap[arc] -= bottleneck;
                self.cap[arc ^ 1] += bottleneck;
                v = self.to[arc ^ 1];
            }
            total += bottleneck;
        }
    }

    fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[source] = true;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &arc in &self.adj[u] {
                let v = self.to[arc];
                if self.cap[arc] > 0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}
