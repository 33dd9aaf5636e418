//! Carving decompositions of the diagram's vertex graph.
//!
//! A carving is a rooted binary tree whose leaves are the diagram's
//! vertices (crossings and twist marks); the edge above a node carries
//! the set of segments crossing the bipartition {leaves below, rest}.
//! The congestion — the largest such edge weight — bounds every
//! intermediate tensor the contraction engine builds. A tree is only
//! usable when it can be realized by nested Jordan curves; `realize`
//! checks that and reports the first violating node. Three constructors
//! are provided: exhaustive search over realizable merge orders (small
//! inputs), a greedy smallest-boundary heuristic, and an always-valid
//! caterpillar sweep.

mod words;

pub use words::{leaf_word, merge_words, Crossing, CyclicWord, MergeInfo, MergeViolation};

use crate::diagram::LinkDiagram;
use std::collections::HashMap;
use thiserror::Error;

/// Leaf threshold for the exhaustive search.
pub const MAX_EXACT_LEAVES: usize = 12;

#[derive(Debug, Error)]
pub enum CarvingError {
    #[error("exhaustive search limited to {max} leaves, diagram has {leaves}")]
    TooLarge { leaves: usize, max: usize },
    #[error("tree is not planar-realizable at node {node}: {reason}")]
    NotRealizable { node: usize, reason: MergeViolation },
    #[error("diagram is disconnected; carve one connected component at a time")]
    Disconnected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CarvingNode {
    Leaf { vertex: usize },
    Internal { left: usize, right: usize },
}

/// Rooted binary carving tree. Every internal node has exactly two
/// children; the half-edge above the root carries weight 0 on a closed
/// connected diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarvingTree {
    pub nodes: Vec<CarvingNode>,
    pub root: usize,
}

impl CarvingTree {
    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, CarvingNode::Leaf { .. })).count()
    }

    /// Children-before-parent traversal order.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((n, expanded)) = stack.pop() {
            if expanded {
                out.push(n);
                continue;
            }
            stack.push((n, true));
            if let CarvingNode::Internal { left, right } = self.nodes[n] {
                stack.push((right, false));
                stack.push((left, false));
            }
        }
        out
    }

    /// Bitset of diagram vertices below each node.
    pub fn leaf_sets(&self) -> Vec<u128> {
        let mut sets = vec![0u128; self.nodes.len()];
        for n in self.postorder() {
            sets[n] = match self.nodes[n] {
                CarvingNode::Leaf { vertex } => {
                    assert!(vertex < 128, "carving supports at most 128 vertices");
                    1u128 << vertex
                }
                CarvingNode::Internal { left, right } => sets[left] | sets[right],
            };
        }
        sets
    }

    /// Edge weight above each node: the number of segments with exactly
    /// one endpoint below it (an independent count, not derived from the
    /// boundary words).
    pub fn weights(&self, d: &LinkDiagram) -> Vec<usize> {
        let sets = self.leaf_sets();
        self.nodes
            .iter()
            .enumerate()
            .map(|(n, _)| {
                d.segments
                    .iter()
                    .filter(|s| {
                        let a = sets[n] >> s.from.0 & 1 == 1;
                        let b = sets[n] >> s.to.0 & 1 == 1;
                        a != b
                    })
                    .count()
            })
            .collect()
    }

    /// Maximal edge weight over the whole tree.
    pub fn congestion(&self, d: &LinkDiagram) -> usize {
        self.weights(d).into_iter().max().unwrap_or(0)
    }

    /// Parent of each node (`None` for the root and for unused slots).
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.nodes.len()];
        for (n, node) in self.nodes.iter().enumerate() {
            if let CarvingNode::Internal { left, right } = *node {
                p[left] = Some(n);
                p[right] = Some(n);
            }
        }
        p
    }

    /// Re-root by subdividing the edge above `edge_node` (any node other
    /// than the current root). The subtree below `edge_node` is kept; the
    /// rest of the tree is re-hung above it.
    pub fn rerooted(&self, edge_node: usize) -> CarvingTree {
        assert_ne!(edge_node, self.root, "the root half-edge cannot be subdivided again");
        let parents = self.parents();
        let mut nodes = Vec::new();
        let down = copy_subtree(self, edge_node, &mut nodes);
        let up = hang_up(self, &parents, edge_node, &mut nodes);
        nodes.push(CarvingNode::Internal { left: down, right: up });
        CarvingTree { nodes: nodes.clone(), root: nodes.len() - 1 }
    }

    /// Default rooting rule: subdivide the unrooted edge of minimum
    /// weight (ties: lowest node id). Rooting does not change the edge
    /// set, but it does change which region pairs become siblings, so
    /// only rootings that keep every merge realizable are considered;
    /// when none qualifies the current rooting is kept.
    pub fn rerooted_at_min_edge(&self, d: &LinkDiagram) -> CarvingTree {
        let weights = self.weights(d);
        let mut edges: Vec<usize> = (0..self.nodes.len()).filter(|&n| n != self.root).collect();
        edges.sort_by_key(|&n| (weights[n], n));
        for n in edges {
            let candidate = self.rerooted(n);
            if realize(&candidate, d).is_ok() {
                return candidate;
            }
        }
        self.clone()
    }

    /// Indented text rendering for the decompose command.
    pub fn render_text(&self, d: &LinkDiagram) -> String {
        let weights = self.weights(d);
        let mut out = String::new();
        let mut stack = vec![(self.root, 0usize)];
        while let Some((n, depth)) = stack.pop() {
            for _ in 0..depth {
                out.push_str("  ");
            }
            match self.nodes[n] {
                CarvingNode::Leaf { vertex } => {
                    out.push_str(&format!("leaf vertex {vertex} (weight {})\n", weights[n]));
                }
                CarvingNode::Internal { left, right } => {
                    out.push_str(&format!("node {n} (weight {})\n", weights[n]));
                    stack.push((right, depth + 1));
                    stack.push((left, depth + 1));
                }
            }
        }
        out
    }
}

fn copy_subtree(t: &CarvingTree, n: usize, out: &mut Vec<CarvingNode>) -> usize {
    let node = match t.nodes[n] {
        CarvingNode::Leaf { vertex } => CarvingNode::Leaf { vertex },
        CarvingNode::Internal { left, right } => {
            let l = copy_subtree(t, left, out);
            let r = copy_subtree(t, right, out);
            CarvingNode::Internal { left: l, right: r }
        }
    };
    out.push(node);
    out.len() - 1
}

/// Subtree representing everything above the edge (`from` → its parent),
/// re-rooted away from `from`.
fn hang_up(
    t: &CarvingTree,
    parents: &[Option<usize>],
    from: usize,
    out: &mut Vec<CarvingNode>,
) -> usize {
    let p = parents[from].expect("hang_up walks below the root");
    let CarvingNode::Internal { left, right } = t.nodes[p] else { unreachable!() };
    let sibling = if left == from { right } else { left };
    if p == t.root {
        // the old root vanishes: its other side is the whole upper part
        return copy_subtree(t, sibling, out);
    }
    let s = copy_subtree(t, sibling, out);
    let u = hang_up(t, parents, p, out);
    out.push(CarvingNode::Internal { left: s, right: u });
    out.len() - 1
}

/// Jordan-curve realization: a cyclic boundary word per tree node plus
/// the bridge geometry of every internal merge.
#[derive(Clone, Debug)]
pub struct Realization {
    pub words: Vec<CyclicWord>,
    pub merges: Vec<Option<MergeInfo>>,
}

/// Check that the tree is a bond embedding of the diagram: every
/// internal node's children must expose their shared segments as
/// mutually reversed contiguous blocks. Fails naming the first violating
/// node in postorder.
pub fn realize(t: &CarvingTree, d: &LinkDiagram) -> Result<Realization, CarvingError> {
    let mut words: Vec<CyclicWord> = vec![CyclicWord(Vec::new()); t.nodes.len()];
    let mut merges: Vec<Option<MergeInfo>> = vec![None; t.nodes.len()];
    for n in t.postorder() {
        match t.nodes[n] {
            CarvingNode::Leaf { vertex } => words[n] = leaf_word(d, vertex),
            CarvingNode::Internal { left, right } => {
                let (w, info) = merge_words(&words[left], &words[right])
                    .map_err(|reason| CarvingError::NotRealizable { node: n, reason })?;
                words[n] = w;
                merges[n] = Some(info);
            }
        }
    }
    if !words[t.root].is_empty() {
        return Err(CarvingError::Disconnected);
    }
    Ok(Realization { words, merges })
}

/// Exhaustive minimum-congestion search over realizable merge orders,
/// memoized on the partition of vertices into active blocks. Leaf edge
/// weights are fixed by the diagram, so only weights of created edges
/// are minimized (the final merge creates the weight-0 root edge).
pub fn exact_carving(d: &LinkDiagram) -> Result<CarvingTree, CarvingError> {
    let n = d.vertices.len();
    if n > MAX_EXACT_LEAVES {
        return Err(CarvingError::TooLarge { leaves: n, max: MAX_EXACT_LEAVES });
    }
    if n < 2 {
        return Err(CarvingError::Disconnected);
    }

    struct Search {
        full: u128,
        memo: HashMap<Vec<u128>, (usize, Option<(u128, u128)>)>,
    }
    impl Search {
        /// Minimum over merge orders of the largest created edge weight,
        /// with the winning first pair recorded per state.
        fn run(&mut self, blocks: &[(u128, CyclicWord)]) -> usize {
            if blocks.len() == 1 {
                return 0;
            }
            let mut key: Vec<u128> = blocks.iter().map(|b| b.0).collect();
            key.sort_unstable();
            if let Some(&(v, _)) = self.memo.get(&key) {
                return v;
            }
            let mut best = usize::MAX;
            let mut choice = None;
            for i in 0..blocks.len() {
                for j in i + 1..blocks.len() {
                    let Ok((word, _)) = merge_words(&blocks[i].1, &blocks[j].1) else {
                        continue;
                    };
                    let merged = blocks[i].0 | blocks[j].0;
                    let w = if merged == self.full { 0 } else { word.len() };
                    if w >= best {
                        // total is max(w, …) ≥ w, so this pair cannot improve
                        continue;
                    }
                    let mut next: Vec<(u128, CyclicWord)> = Vec::with_capacity(blocks.len() - 1);
                    for (t, b) in blocks.iter().enumerate() {
                        if t != i && t != j {
                            next.push(b.clone());
                        }
                    }
                    next.push((merged, word));
                    let sub = self.run(&next);
                    if sub == usize::MAX {
                        continue;
                    }
                    let total = sub.max(w);
                    if total < best {
                        best = total;
                        choice = Some((blocks[i].0, blocks[j].0));
                    }
                }
            }
            self.memo.insert(key, (best, choice));
            best
        }
    }

    let mut blocks: Vec<(u128, CyclicWord)> =
        (0..n).map(|v| (1u128 << v, leaf_word(d, v))).collect();
    let full = (1u128 << n) - 1;
    let mut search = Search { full, memo: HashMap::new() };
    if search.run(&blocks) == usize::MAX {
        return Err(CarvingError::Disconnected);
    }

    // replay the recorded choices into a tree
    let mut nodes: Vec<CarvingNode> = (0..n).map(|v| CarvingNode::Leaf { vertex: v }).collect();
    let mut ids: Vec<usize> = (0..n).collect();
    while blocks.len() > 1 {
        let mut key: Vec<u128> = blocks.iter().map(|b| b.0).collect();
        key.sort_unstable();
        let (_, Some((si, sj))) = search.memo[&key] else {
            unreachable!("finite value states always record a merge choice")
        };
        let i = blocks.iter().position(|b| b.0 == si).expect("recorded block present");
        let j = blocks.iter().position(|b| b.0 == sj).expect("recorded block present");
        let (word, _) = merge_words(&blocks[i].1, &blocks[j].1).expect("recorded merge is valid");
        nodes.push(CarvingNode::Internal { left: ids[i], right: ids[j] });
        let id = nodes.len() - 1;
        let merged = blocks[i].0 | blocks[j].0;
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        blocks.remove(hi);
        blocks.remove(lo);
        ids.remove(hi);
        ids.remove(lo);
        blocks.push((merged, word));
        ids.push(id);
    }
    let tree = CarvingTree { nodes, root: ids[0] };
    Ok(tree.rerooted_at_min_edge(d))
}

/// Greedy bottom-up pairing: repeatedly fuse the realizable pair of
/// active blocks with the smallest merged boundary, ties towards lower
/// node ids. Falls back to the sweep tree if the greedy run ever stalls.
pub fn heuristic_carving(d: &LinkDiagram) -> Result<CarvingTree, CarvingError> {
    let n = d.vertices.len();
    if n < 2 {
        return Err(CarvingError::Disconnected);
    }
    let mut nodes: Vec<CarvingNode> = (0..n).map(|v| CarvingNode::Leaf { vertex: v }).collect();
    let mut active: Vec<(usize, CyclicWord)> =
        (0..n).map(|v| (v, leaf_word(d, v))).collect();
    while active.len() > 1 {
        let mut best: Option<(usize, usize, usize, CyclicWord)> = None;
        for i in 0..active.len() {
            for j in i + 1..active.len() {
                if let Ok((w, _)) = merge_words(&active[i].1, &active[j].1) {
                    let cost = w.len();
                    if best.as_ref().is_none_or(|b| cost < b.0) {
                        best = Some((cost, i, j, w));
                    }
                }
            }
        }
        let Some((_, i, j, w)) = best else {
            return sweep_carving(d);
        };
        nodes.push(CarvingNode::Internal { left: active[i].0, right: active[j].0 });
        let id = nodes.len() - 1;
        active.remove(j);
        active.remove(i);
        active.push((id, w));
    }
    let tree = CarvingTree { nodes, root: active[0].0 };
    Ok(tree.rerooted_at_min_edge(d))
}

/// Caterpillar tree over a planar insertion order found by backtracking:
/// each next vertex must attach to the swept prefix along a contiguous
/// boundary block, which makes the spine realizable by construction.
pub fn sweep_carving(d: &LinkDiagram) -> Result<CarvingTree, CarvingError> {
    let n = d.vertices.len();
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    if !sweep_order(d, &mut order, &mut used, None) {
        return Err(CarvingError::Disconnected);
    }
    let mut nodes: Vec<CarvingNode> = (0..n).map(|v| CarvingNode::Leaf { vertex: v }).collect();
    let mut spine = order[0];
    for &v in &order[1..] {
        nodes.push(CarvingNode::Internal { left: spine, right: v });
        spine = nodes.len() - 1;
    }
    let tree = CarvingTree { nodes, root: spine };
    Ok(tree.rerooted_at_min_edge(d))
}

fn sweep_order(
    d: &LinkDiagram,
    order: &mut Vec<usize>,
    used: &mut [bool],
    prefix: Option<&CyclicWord>,
) -> bool {
    let n = d.vertices.len();
    if order.len() == n {
        return prefix.is_none_or(CyclicWord::is_empty);
    }
    for v in 0..n {
        if used[v] {
            continue;
        }
        let lw = leaf_word(d, v);
        let next = match prefix {
            None => lw,
            Some(p) => match merge_words(p, &lw) {
                Ok((w, _)) => w,
                Err(_) => continue,
            },
        };
        used[v] = true;
        order.push(v);
        if sweep_order(d, order, used, Some(&next)) {
            return true;
        }
        order.pop();
        used[v] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn prepared(text: &str) -> LinkDiagram {
        parse_pd(text).unwrap().broken_self_loops()
    }

    #[test]
    fn hopf_unique_tree_weights() {
        let d = prepared("X[1,4,2,3] X[3,2,4,1]");
        let t = exact_carving(&d).unwrap();
        let mut w = t.weights(&d);
        w.sort_unstable();
        assert_eq!(w, vec![0, 4, 4]);
        assert_eq!(t.congestion(&d), 4);
        realize(&t, &d).unwrap();
    }

    #[test]
    fn trefoil_congestion_is_four() {
        let d = prepared("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]");
        for t in [
            exact_carving(&d).unwrap(),
            heuristic_carving(&d).unwrap(),
            sweep_carving(&d).unwrap(),
        ] {
            assert_eq!(t.congestion(&d), 4);
            realize(&t, &d).unwrap();
        }
    }

    #[test]
    fn figure_eight_congestion_is_four() {
        let d = prepared("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]");
        let t = exact_carving(&d).unwrap();
        assert_eq!(t.congestion(&d), 4);
        realize(&t, &d).unwrap();
    }

    #[test]
    fn twist_pair_unknot_congestion_is_two() {
        let d = prepared("T[+,1] T[-,1]");
        let t = sweep_carving(&d).unwrap();
        assert_eq!(t.congestion(&d), 2);
        let mut w = t.weights(&d);
        w.sort_unstable();
        assert_eq!(w, vec![0, 2, 2]);
    }

    #[test]
    fn strategies_are_ordered_by_congestion() {
        for text in [
            "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]",
            "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]",
            "X[1,4,2,3] X[3,2,4,1]",
            "X[1,3,4,2] X[3,5,6,4] X[5,7,8,6] X[7,1,2,8]",
        ] {
            let d = prepared(text);
            let e = exact_carving(&d).unwrap().congestion(&d);
            let h = heuristic_carving(&d).unwrap().congestion(&d);
            let s = sweep_carving(&d).unwrap().congestion(&d);
            assert!(e <= h && h <= s, "{text}: exact {e}, heuristic {h}, sweep {s}");
        }
    }

    #[test]
    fn weights_match_boundary_word_lengths() {
        let d = prepared("X[1,3,4,2] X[3,5,6,4] X[5,7,8,6] X[7,1,2,8]");
        for t in [heuristic_carving(&d).unwrap(), sweep_carving(&d).unwrap()] {
            let r = realize(&t, &d).unwrap();
            let w = t.weights(&d);
            for n in 0..t.nodes.len() {
                assert_eq!(w[n], r.words[n].len(), "node {n}");
            }
        }
    }

    #[test]
    fn interleaved_tree_is_rejected_with_node_report() {
        // T(2,4): crossings along a band; pairing opposite crossings (0,2)
        // forces the bridge to interleave with (1,3)
        let d = prepared("X[1,3,4,2] X[3,5,6,4] X[5,7,8,6] X[7,1,2,8]");
        let nodes = vec![
            CarvingNode::Leaf { vertex: 0 },
            CarvingNode::Leaf { vertex: 1 },
            CarvingNode::Leaf { vertex: 2 },
            CarvingNode::Leaf { vertex: 3 },
            CarvingNode::Internal { left: 0, right: 2 },
            CarvingNode::Internal { left: 1, right: 3 },
            CarvingNode::Internal { left: 4, right: 5 },
        ];
        let t = CarvingTree { nodes, root: 6 };
        match realize(&t, &d) {
            Err(CarvingError::NotRealizable { node, .. }) => assert!(node == 4 || node == 5),
            other => panic!("expected realization failure, got {other:?}"),
        }
    }

    #[test]
    fn rerooting_preserves_congestion_and_realizability() {
        let d = prepared("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]");
        let t = sweep_carving(&d).unwrap();
        let base = t.congestion(&d);
        for n in 0..t.nodes.len() {
            if n == t.root {
                continue;
            }
            let r = t.rerooted(n);
            assert_eq!(r.congestion(&d), base, "reroot at {n}");
            assert_eq!(r.leaf_count(), t.leaf_count());
            realize(&r, &d).unwrap_or_else(|e| panic!("reroot at {n}: {e}"));
        }
    }

    #[test]
    fn exact_rejects_oversize() {
        let many: String =
            (1..=13).map(|_| "T[+,1] ".to_string()).collect::<String>() + "T[-,1]";
        let d = parse_pd(&many).unwrap();
        assert_eq!(d.vertices.len(), 14);
        assert!(matches!(
            exact_carving(&d),
            Err(CarvingError::TooLarge { leaves: 14, max: MAX_EXACT_LEAVES })
        ));
    }

    #[test]
    fn torus_band_heuristic_stays_at_four() {
        // T(2,6): greedy pairs adjacent crossings along the band
        let d = prepared(
            "X[1,3,4,2] X[3,5,6,4] X[5,7,8,6] X[7,9,10,8] X[9,11,12,10] X[11,1,2,12]",
        );
        let t = heuristic_carving(&d).unwrap();
        assert_eq!(t.congestion(&d), 4);
        realize(&t, &d).unwrap();
    }
}
