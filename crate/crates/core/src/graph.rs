//! Immutable undirected graphs with the separation criteria used by
//! concentration and covariance models.
//!
//! Vertices carry arbitrary string labels mapped to dense indices at
//! construction time; every operation works on indices and every report
//! translates back to labels. Graphs are loop-free, simple and immutable:
//! derived graphs (induced subgraphs, k-graphs) are new values, so a graph
//! can be shared freely across threads.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A subset of a graph's vertices, by dense index.
pub type VertexSet = BTreeSet<usize>;

/// An immutable, loop-free, simple undirected graph.
#[derive(Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    adj: Vec<BTreeSet<usize>>,
}

impl UndirectedGraph {
    /// Builds a graph from vertex labels and index pairs.
    ///
    /// Duplicate edges collapse; loops and out-of-range endpoints are
    /// rejected, as are duplicate labels.
    pub fn new<S: Into<String>>(labels: Vec<S>, edges: &[(usize, usize)]) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate vertex label {l:?}")));
            }
        }
        let n = labels.len();
        let mut adj = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::UnknownVertex(format!("index {}", u.max(v))));
            }
            if u == v {
                return Err(Error::Domain(format!(
                    "loop edge on vertex {:?}",
                    labels[u]
                )));
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Ok(Self { labels, index, adj })
    }

    /// Graph on `n` vertices labelled `v1..vn` with no edges.
    pub fn empty(n: usize) -> Self {
        Self::new(default_labels(n), &[]).expect("no edges, no failures")
    }

    /// Complete graph on `n` vertices labelled `v1..vn`.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Self::new(default_labels(n), &edges).expect("valid edges")
    }

    /// Same vertex set, edges given by index pairs. Convenient in tests.
    pub fn with_edges(&self, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(self.labels.clone(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_of(&self, v: usize) -> &str {
        &self.labels[v]
    }

    /// Dense index of a label.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|s| s.contains(&v))
    }

    /// Edges as index pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs.iter().filter(|&&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Vertices adjacent to `v`; `v` itself is never a member.
    pub fn neighbors(&self, v: usize) -> Result<&BTreeSet<usize>> {
        self.adj
            .get(v)
            .ok_or_else(|| Error::UnknownVertex(format!("index {v}")))
    }

    pub fn degree_of(&self, v: usize) -> Result<usize> {
        Ok(self.neighbors(v)?.len())
    }

    /// True when every pair of distinct vertices is adjacent
    /// (vacuously true on fewer than two vertices).
    pub fn is_complete(&self) -> bool {
        let n = self.vertex_count();
        self.edge_count() == n * n.saturating_sub(1) / 2
    }

    /// True when the edge set is empty.
    pub fn is_edgeless(&self) -> bool {
        self.edge_count() == 0
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Partition of the vertex set into connected components, each block
    /// sorted, blocks ordered by smallest member.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut blocks = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut block = VertexSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                block.insert(u);
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            blocks.push(block);
        }
        blocks
    }

    /// Subgraph induced by `set`: vertex set `set`, edges restricted to it.
    /// Labels are preserved; indices are re-densified in label-index order.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<Self> {
        let n = self.vertex_count();
        if let Some(&v) = set.iter().find(|&&v| v >= n) {
            return Err(Error::UnknownVertex(format!("index {v}")));
        }
        let verts: Vec<usize> = set.iter().copied().collect();
        let mut new_of = BTreeMap::new();
        for (new, &old) in verts.iter().enumerate() {
            new_of.insert(old, new);
        }
        let labels: Vec<String> = verts.iter().map(|&v| self.labels[v].clone()).collect();
        let mut edges = Vec::new();
        for &u in &verts {
            for &v in self.adj[u].iter().filter(|&&v| v > u) {
                if let Some(&nv) = new_of.get(&v) {
                    edges.push((new_of[&u], nv));
                }
            }
        }
        Self::new(labels, &edges)
    }

    /// Separation in the undirected sense: every path from `a` to `b`
    /// meets `s`. Requires `a`, `b` non-empty and `a`, `b`, `s` pairwise
    /// disjoint; `s` may be empty.
    pub fn separates(&self, a: &VertexSet, b: &VertexSet, s: &VertexSet) -> Result<bool> {
        self.check_triple(a, b, s)?;
        // BFS from all of `a` through V \ s; separated iff no vertex of `b`
        // is reached.
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &v in a {
            seen[v] = true;
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            if b.contains(&u) {
                return Ok(false);
            }
            for &w in &self.adj[u] {
                if !seen[w] && !s.contains(&w) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(true)
    }

    /// Separation in the covariance (bi-directed) sense: the complement
    /// `V \ (a ∪ b ∪ s)` must separate `a` from `b`.
    pub fn covariance_separates(
        &self,
        a: &VertexSet,
        b: &VertexSet,
        s: &VertexSet,
    ) -> Result<bool> {
        self.check_triple(a, b, s)?;
        let complement: VertexSet = (0..self.vertex_count())
            .filter(|v| !a.contains(v) && !b.contains(v) && !s.contains(v))
            .collect();
        self.separates(a, b, &complement)
    }

    fn check_triple(&self, a: &VertexSet, b: &VertexSet, s: &VertexSet) -> Result<()> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Domain(
                "separation requires non-empty vertex sets on both sides".into(),
            ));
        }
        let n = self.vertex_count();
        for set in [a, b, s] {
            if let Some(&v) = set.iter().find(|&&v| v >= n) {
                return Err(Error::UnknownVertex(format!("index {v}")));
            }
        }
        if a.intersection(b).next().is_some()
            || a.intersection(s).next().is_some()
            || b.intersection(s).next().is_some()
        {
            return Err(Error::Domain(
                "separation requires pairwise disjoint vertex sets".into(),
            ));
        }
        Ok(())
    }

    /// Connected component of `start` in the graph with `removed` deleted.
    /// Empty when `start` itself is removed.
    pub(crate) fn component_avoiding(&self, start: usize, removed: &VertexSet) -> VertexSet {
        let mut block = VertexSet::new();
        if removed.contains(&start) {
            return block;
        }
        let mut queue = VecDeque::from([start]);
        block.insert(start);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if !removed.contains(&w) && block.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        block
    }

    /// Parses the edge-list format: an optional `vertices:` header line
    /// followed by one `<label> <label>` pair per line. `#` starts a
    /// comment, blank lines are skipped, labels not declared in the header
    /// are added in order of first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let intern = |tok: &str, labels: &mut Vec<String>, index: &mut BTreeMap<String, usize>| {
            *index.entry(tok.to_string()).or_insert_with(|| {
                labels.push(tok.to_string());
                labels.len() - 1
            })
        };
        let mut header_allowed = true;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if header_allowed {
                header_allowed = false;
                if let Some(rest) = line.strip_prefix("vertices:") {
                    for tok in rest.split_whitespace() {
                        if index.contains_key(tok) {
                            return Err(Error::Parse {
                                line: lineno + 1,
                                message: format!("duplicate vertex {tok:?} in header"),
                            });
                        }
                        intern(tok, &mut labels, &mut index);
                    }
                    continue;
                }
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected two vertex labels, found {}", toks.len()),
                });
            }
            if toks[0] == toks[1] {
                return Err(Error::Loop {
                    line: lineno + 1,
                    label: toks[0].to_string(),
                });
            }
            let u = intern(toks[0], &mut labels, &mut index);
            let v = intern(toks[1], &mut labels, &mut index);
            edges.push((u, v));
        }
        Self::new(labels, &edges)
    }

    /// Canonical edge-list text: header with every label in index order,
    /// then edges sorted by index pair. `parse` of the output reproduces
    /// the graph exactly.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::from("vertices:");
        for l in &self.labels {
            out.push(' ');
            out.push_str(l);
        }
        out.push('\n');
        for (u, v) in self.edges() {
            out.push_str(&format!("{} {}\n", self.labels[u], self.labels[v]));
        }
        out
    }
}

impl fmt::Debug for UndirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "UndirectedGraph({} vertices, {} edges: {:?})",
            self.vertex_count(),
            self.edge_count(),
            self.edges()
        )
    }
}

/// Serializes as `{ "vertices": [...], "edges": [["a","b"], ...] }`.
impl Serialize for UndirectedGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("UndirectedGraph", 2)?;
        st.serialize_field("vertices", &self.labels)?;
        let edges: Vec<[&str; 2]> = self
            .edges()
            .into_iter()
            .map(|(u, v)| [self.labels[u].as_str(), self.labels[v].as_str()])
            .collect();
        st.serialize_field("edges", &edges)?;
        st.end()
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

/// Seeded random graphs and exhaustive enumeration of small labelled graphs.
pub mod enumerate {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    use super::{default_labels, UndirectedGraph};

    /// All pairs `(u, v)` with `u < v < n`, lexicographic.
    fn pair_slots(n: usize) -> Vec<(usize, usize)> {
        let mut slots = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                slots.push((u, v));
            }
        }
        slots
    }

    /// Every labelled graph on `n` vertices, in bitmask order over the
    /// pair slots. There are `2^(n·(n−1)/2)` of them; keep `n` small.
    pub fn all_labeled_graphs(n: usize) -> impl Iterator<Item = UndirectedGraph> {
        let slots = pair_slots(n);
        assert!(slots.len() <= 62, "enumeration is for small graphs only");
        (0u64..(1u64 << slots.len())).map(move |mask| {
            let edges: Vec<(usize, usize)> = slots
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            UndirectedGraph::new(default_labels(n), &edges).expect("slots are loop-free")
        })
    }

    /// Seeded Erdős–Rényi graph: each pair is an edge independently with
    /// probability `edge_prob`.
    pub fn erdos_renyi(n: usize, edge_prob: f64, seed: u64) -> UndirectedGraph {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let edges: Vec<(usize, usize)> = pair_slots(n)
            .into_iter()
            .filter(|_| rng.random_bool(edge_prob.clamp(0.0, 1.0)))
            .collect();
        UndirectedGraph::new(default_labels(n), &edges).expect("slots are loop-free")
    }
}
