//! Cyclic boundary words and the planar merge rule.
//!
//! Every sub-tangle (set of diagram vertices) enclosed by a Jordan curve
//! exposes a cyclic word: the segments crossing the curve in
//! counter-clockwise order, each flagged outward (source endpoint
//! inside) or inward. Two sub-tangles can merge exactly when their
//! shared segments form one contiguous block in each word and the two
//! blocks read mutually reversed — that is what lets the two curves fuse
//! into one without crossings. The merged word is the concatenation of
//! the two remainders.

use crate::diagram::LinkDiagram;

/// One boundary crossing: segment id plus `true` when the strand leaves
/// the enclosed region here.
pub type Crossing = (usize, bool);

/// Cyclic counter-clockwise boundary word of a sub-tangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicWord(pub Vec<Crossing>);

impl CyclicWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Linear reading that starts at `bullet` and proceeds counter-clockwise.
    pub fn rotated(&self, bullet: usize) -> Vec<Crossing> {
        let n = self.0.len();
        (0..n).map(|i| self.0[(bullet + i) % n]).collect()
    }
}

/// Boundary word of a single vertex: its slots in counter-clockwise
/// order. Requires the segment at every slot to lead to another vertex
/// (self-loops must be broken into twist pairs first).
pub fn leaf_word(d: &LinkDiagram, v: usize) -> CyclicWord {
    let deg = d.vertices[v].degree();
    let mut out = Vec::with_capacity(deg);
    for slot in 0..deg {
        let (seg, outward) = d.segment_at(v, slot);
        let s = &d.segments[seg];
        assert!(
            s.from.0 != s.to.0,
            "vertex {v} carries a self-loop segment; break self-loops before carving"
        );
        out.push((seg, outward));
    }
    CyclicWord(out)
}

/// How two children fuse into their parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeInfo {
    /// Bridge segments in the first child's counter-clockwise block order.
    pub bridge: Vec<usize>,
    /// Start of the bridge block in the first child's word.
    pub start1: usize,
    /// Start of the bridge block in the second child's word.
    pub start2: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MergeViolation {
    /// The sub-tangles share no segment, so their curves cannot fuse.
    EmptyBridge,
    /// Shared segments are not one contiguous block in the named child
    /// (0 or 1).
    NotContiguous(usize),
    /// Blocks are contiguous but not mutually reversed.
    NotReversed,
}

impl std::fmt::Display for MergeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MergeViolation::EmptyBridge => write!(f, "children share no segment"),
            MergeViolation::NotContiguous(c) => {
                write!(f, "bridge segments are not contiguous in child {c}'s boundary")
            }
            MergeViolation::NotReversed => {
                write!(f, "bridge blocks are not mutually reversed")
            }
        }
    }
}

/// Fuse two cyclic words. On success returns the parent word (first
/// child's remainder, then the second's, each read counter-clockwise
/// from just past its bridge block) plus the bridge geometry.
pub fn merge_words(
    w1: &CyclicWord,
    w2: &CyclicWord,
) -> Result<(CyclicWord, MergeInfo), MergeViolation> {
    let in2 = |seg: usize| w2.0.iter().any(|&(s, _)| s == seg);
    let bridge_flags: Vec<bool> = w1.0.iter().map(|&(s, _)| in2(s)).collect();
    let k = bridge_flags.iter().filter(|&&b| b).count();
    if k == 0 {
        return Err(MergeViolation::EmptyBridge);
    }
    let n1 = w1.len();
    let n2 = w2.len();
    let base1 = cyclic_block_start(&bridge_flags).ok_or(MergeViolation::NotContiguous(0))?;
    let in1 = |seg: usize| w1.0.iter().any(|&(s, _)| s == seg);
    let flags2: Vec<bool> = w2.0.iter().map(|&(s, _)| in1(s)).collect();
    let base2 = cyclic_block_start(&flags2).ok_or(MergeViolation::NotContiguous(1))?;
    // When a word consists entirely of bridge, its block has no anchored
    // start: every rotation is a candidate alignment.
    let starts1: Vec<usize> = if k == n1 { (0..n1).collect() } else { vec![base1] };
    let starts2: Vec<usize> = if k == n2 { (0..n2).collect() } else { vec![base2] };
    for &start1 in &starts1 {
        let bridge: Vec<usize> = (0..k).map(|t| w1.0[(start1 + t) % n1].0).collect();
        for &start2 in &starts2 {
            if !(0..k).all(|t| w2.0[(start2 + k - 1 - t) % n2].0 == bridge[t]) {
                continue;
            }
            // a segment leaves exactly one of the two regions, so the
            // flags of the matched pairs must be opposite
            for t in 0..k {
                let a = w1.0[(start1 + t) % n1];
                let b = w2.0[(start2 + k - 1 - t) % n2];
                debug_assert!(a.1 != b.1, "bridge segment {} oriented inconsistently", a.0);
            }
            let mut parent = Vec::with_capacity(n1 + n2 - 2 * k);
            for t in 0..n1 - k {
                parent.push(w1.0[(start1 + k + t) % n1]);
            }
            for t in 0..n2 - k {
                parent.push(w2.0[(start2 + k + t) % n2]);
            }
            return Ok((CyclicWord(parent), MergeInfo { bridge, start1, start2 }));
        }
    }
    Err(MergeViolation::NotReversed)
}

/// If the `true` entries form one non-empty contiguous cyclic block,
/// return the block's start index.
fn cyclic_block_start(flags: &[bool]) -> Option<usize> {
    let n = flags.len();
    let k = flags.iter().filter(|&&b| b).count();
    if k == 0 {
        return None;
    }
    if k == n {
        return Some(0);
    }
    // the unique start is a true entry preceded (cyclically) by a false
    let start = (0..n).find(|&i| flags[i] && !flags[(i + n - 1) % n])?;
    if (0..k).all(|t| flags[(start + t) % n]) && (k..n).all(|t| !flags[(start + t) % n]) {
        Some(start)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    #[test]
    fn hopf_leaves_fuse_completely() {
        let d = parse_pd("X[1,4,2,3] X[3,2,4,1]").unwrap();
        let w0 = leaf_word(&d, 0);
        let w1 = leaf_word(&d, 1);
        assert_eq!(w0.len(), 4);
        let (parent, info) = merge_words(&w0, &w1).unwrap();
        assert!(parent.is_empty());
        assert_eq!(info.bridge.len(), 4);
    }

    #[test]
    fn trefoil_adjacent_leaves_fuse() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let w0 = leaf_word(&d, 0);
        let w1 = leaf_word(&d, 1);
        let (parent, info) = merge_words(&w0, &w1).unwrap();
        assert_eq!(info.bridge.len(), 2, "two strands run between adjacent crossings");
        assert_eq!(parent.len(), 4);
        let w2 = leaf_word(&d, 2);
        let (root, info2) = merge_words(&parent, &w2).unwrap();
        assert!(root.is_empty());
        assert_eq!(info2.bridge.len(), 4);
    }

    #[test]
    fn disjoint_kinks_refuse_to_merge() {
        let d = parse_pd("X[1,1,2,2] X[3,3,4,4]").unwrap();
        let b = d.broken_self_loops();
        let w0 = leaf_word(&b, 0);
        let w1 = leaf_word(&b, 1);
        assert_eq!(merge_words(&w0, &w1).unwrap_err(), MergeViolation::EmptyBridge);
    }

    #[test]
    fn rotation_of_inputs_does_not_matter() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let w0 = leaf_word(&d, 0);
        let w1 = leaf_word(&d, 1);
        let (parent, _) = merge_words(&w0, &w1).unwrap();
        for r in 0..4 {
            let w0r = CyclicWord(w0.rotated(r));
            let (p, _) = merge_words(&w0r, &w1).unwrap();
            // same cyclic word, possibly rotated
            let n = parent.len();
            assert!(
                (0..n).any(|s| (0..n).all(|t| p.0[t] == parent.0[(s + t) % n])),
                "r={r}"
            );
        }
    }
}
