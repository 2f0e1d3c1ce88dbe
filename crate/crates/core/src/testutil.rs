//! Shared fixtures and independent brute-force checkers for unit tests.
//! The checkers deliberately re-derive results from definitions (path
//! enumeration, subset enumeration) so the production algorithms are
//! tested against a second route.

use crate::graph::{UndirectedGraph, VertexSet};

pub fn vs(items: &[usize]) -> VertexSet {
    items.iter().copied().collect()
}

/// Five vertices 1..5 with edges 1-2, 2-3, 2-4, 3-4, 3-5, 4-5. Worked
/// example with separability order 2, degree 3, degree two 3.
pub fn example_five() -> UndirectedGraph {
    UndirectedGraph::parse("vertices: 1 2 3 4 5\n1 2\n2 3\n2 4\n3 4\n3 5\n4 5\n").unwrap()
}

/// Star on four vertices: center `c` (index 0) joined to three leaves.
/// Separability order 1, degree 3, degree two 1.
pub fn star_k13() -> UndirectedGraph {
    UndirectedGraph::new(vec!["c", "x", "y", "z"], &[(0, 1), (0, 2), (0, 3)]).unwrap()
}

/// All simple paths from `a` to `b`, as vertex sequences.
pub fn enumerate_simple_paths(g: &UndirectedGraph, a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut paths = Vec::new();
    let mut current = vec![a];
    let mut on_path = vs(&[a]);
    fn recurse(
        g: &UndirectedGraph,
        b: usize,
        current: &mut Vec<usize>,
        on_path: &mut VertexSet,
        paths: &mut Vec<Vec<usize>>,
    ) {
        let last = *current.last().unwrap();
        if last == b {
            paths.push(current.clone());
            return;
        }
        for &w in g.neighbors(last).unwrap() {
            if on_path.insert(w) {
                current.push(w);
                recurse(g, b, current, on_path, paths);
                current.pop();
                on_path.remove(&w);
            }
        }
    }
    recurse(g, b, &mut current, &mut on_path, &mut paths);
    paths
}

/// Definitional separation check: every simple path from a vertex of `a`
/// to a vertex of `b` meets `s`.
pub fn separates_by_path_enumeration(
    g: &UndirectedGraph,
    a: &VertexSet,
    b: &VertexSet,
    s: &VertexSet,
) -> bool {
    for &x in a {
        for &y in b {
            for path in enumerate_simple_paths(g, x, y) {
                if !path.iter().any(|v| s.contains(v)) {
                    return false;
                }
            }
        }
    }
    true
}

/// All subsets of `pool`, as vertex sets, in bitmask order.
pub fn all_subsets(pool: &[usize]) -> Vec<VertexSet> {
    (0u32..(1u32 << pool.len()))
        .map(|mask| {
            pool.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Brute-force minimum separator size: smallest subset of `V \ {a, b}`
/// that separates, by exhaustive enumeration. 0 when disconnected.
pub fn brute_force_min_separator_size(g: &UndirectedGraph, a: usize, b: usize) -> usize {
    let pool: Vec<usize> = (0..g.vertex_count()).filter(|&v| v != a && v != b).collect();
    all_subsets(&pool)
        .into_iter()
        .filter(|s| {
            g.separates(&vs(&[a]), &vs(&[b]), s).unwrap()
        })
        .map(|s| s.len())
        .min()
        .expect("the full complement always separates a non-adjacent pair")
}

/// Definitional minimality: `s` separates and no proper subset does.
/// Cross-component pairs have no minimal separators by convention, so
/// the vacuous empty set is rejected there as well.
pub fn is_minimal_separator_definitional(
    g: &UndirectedGraph,
    a: usize,
    b: usize,
    s: &VertexSet,
) -> bool {
    let single = |v| vs(&[v]);
    if g.separates(&single(a), &single(b), &VertexSet::new()).unwrap() {
        return false;
    }
    if !g.separates(&single(a), &single(b), s).unwrap() {
        return false;
    }
    let members: Vec<usize> = s.iter().copied().collect();
    all_subsets(&members)
        .into_iter()
        .filter(|t| t.len() < s.len())
        .all(|t| !g.separates(&single(a), &single(b), &t).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_enumeration_on_example_five() {
        let g = example_five();
        // paths from 1 (index 0) to 5 (index 4) all start with the edge 1-2
        let paths = enumerate_simple_paths(&g, 0, 4);
        assert!(paths.iter().all(|p| p[1] == 1));
        assert_eq!(paths.len(), 4); // 1-2-3-5, 1-2-4-5, 1-2-3-4-5, 1-2-4-3-5
    }

    #[test]
    fn brute_force_agrees_with_hand_values() {
        let g = example_five();
        assert_eq!(brute_force_min_separator_size(&g, 0, 2), 1);
        assert_eq!(brute_force_min_separator_size(&g, 1, 4), 2);
    }
}
