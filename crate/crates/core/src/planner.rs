//! Contraction scheduling: turn a realized carving tree into an
//! explicit, independently checkable sequence of tensor operations.
//!
//! Every open sub-tangle built during contraction is a column vector
//! whose tensor factors read the sub-tangle's boundary clockwise from a
//! marked base point (equivalently: the reversal of the
//! counter-clockwise boundary word starting at that base point). The
//! plan records, for every carving-tree node, which elementary
//! operations produce the node's vector and what its boundary must look
//! like afterwards, so a symbolic replay can verify the whole schedule
//! without touching scalar data.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::carving::{leaf_word, CarvingNode, CarvingTree, CyclicWord, Realization};
use crate::category::RibbonData;
use crate::diagram::{LinkDiagram, Vertex};

/// Current schema of the serialized plan.
pub const PLAN_VERSION: u32 = 1;

/// One boundary factor of an open sub-tangle: the strand end crossing
/// the enclosing curve (`outward` when the strand leaves the region
/// there) and the object colouring that end (the dual object on inward
/// ends).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryFactor {
    pub segment: usize,
    pub outward: bool,
    pub object: usize,
}

/// Ordered boundary of an open sub-tangle as the engine sees it:
/// left-to-right tensor factors plus the base-point position in the
/// counter-clockwise boundary word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryState {
    pub factors: Vec<BoundaryFactor>,
    pub bullet: usize,
}

impl BoundaryState {
    pub fn objects(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.object).collect()
    }
}

/// The four elementary vertex tensors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeafKind {
    /// Crossing whose base-point-adjacent strand passes over: two cups
    /// composed with the stored braiding (kind 1).
    CrossingBraid,
    /// Crossing composed with the inverse braiding (kind 2).
    CrossingBraidInv,
    /// Positive curl: a cup composed with the twist (kind 3).
    TwistPos,
    /// Negative curl: a cup composed with the inverse twist (kind 4).
    TwistNeg,
}

impl LeafKind {
    pub fn index(self) -> u8 {
        match self {
            LeafKind::CrossingBraid => 1,
            LeafKind::CrossingBraidInv => 2,
            LeafKind::TwistPos => 3,
            LeafKind::TwistNeg => 4,
        }
    }
}

/// One elementary matrix applied while rotating a base point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlideOp {
    /// Twist (`positive`) or inverse twist on factor `at`.
    Twist { object: usize, positive: bool, at: usize },
    /// Braiding of adjacent factors `(at, at+1)`; the domain reads
    /// `first ⊗ second`, the codomain `second ⊗ first`. `positive`
    /// selects the stored braiding, otherwise the stored inverse.
    Braid { first: usize, second: usize, positive: bool, at: usize },
}

/// How a merge contracts the bridge cable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MergeCase {
    /// Cap the bridge with a nested-evaluation row (cheap for short
    /// bridges).
    SmallBridge,
    /// Dualize the second child and contract through a nested-cup
    /// column (cheap when the bridge is most of both boundaries).
    LargeBridge,
}

/// One schedule entry. Steps are emitted in carving-tree postorder with
/// base-point rotations placed immediately before the merge consuming
/// them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanStep {
    /// Build the elementary tensor of a single vertex.
    LeafAtom {
        node: usize,
        vertex: usize,
        kind: LeafKind,
        bullet: usize,
        /// Factor objects, left to right.
        objects: Vec<usize>,
        /// Factor orientations, left to right (`true` = strand leaves).
        outward: Vec<bool>,
    },
    /// Rotate a node's base point by `moves` positions, counter-
    /// clockwise when `ccw`, by applying `ops` in order.
    Slide { node: usize, ccw: bool, moves: usize, ops: Vec<SlideOp> },
    /// Contract the bridge cable between two children; `k` strands.
    Merge { node: usize, left: usize, right: usize, case: MergeCase, k: usize },
}

impl PlanStep {
    pub fn node(&self) -> usize {
        match *self {
            PlanStep::LeafAtom { node, .. }
            | PlanStep::Slide { node, .. }
            | PlanStep::Merge { node, .. } => node,
        }
    }
}

/// A full contraction schedule plus the expected boundary after every
/// step, ready for symbolic validation or execution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContractionPlan {
    pub version: u32,
    pub steps: Vec<PlanStep>,
    /// Expected state of the step's node right after the step runs;
    /// parallel to `steps`.
    pub states: Vec<BoundaryState>,
    /// Largest boundary-word length in the realized tree.
    pub congestion: usize,
    /// Merge case forced on every merge, if any (testing hook).
    pub forced_case: Option<MergeCase>,
    pub writhe: i64,
    pub colouring: Vec<usize>,
}

/// Cost forecast obtained by replaying the plan over the degree-window
/// ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostEstimate {
    /// Largest intermediate tensor length.
    pub peak_len: usize,
    /// Scalar multiplications plus additions.
    pub scalar_ops: u64,
    /// Whether the result can be nonzero at all.
    pub degree_present: bool,
    /// Window containing every exponent of the result.
    pub degree_lo: i64,
    pub degree_hi: i64,
    /// Upper bound on coefficient magnitude in bits.
    pub coeff_bits: u64,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("colouring has {got} entries, diagram has {want} components")]
    ColouringLength { got: usize, want: usize },
    #[error("colouring object index {index} out of range")]
    InvalidObject { index: usize },
    #[error("step {step}: {what}")]
    Replay { step: usize, what: String },
    #[error("plan leaves {live} open sub-tangles instead of one closed scalar")]
    Unfinished { live: usize },
}

fn check_colouring(
    d: &LinkDiagram,
    cat: &RibbonData,
    colouring: &[usize],
) -> Result<(), PlanError> {
    if colouring.len() != d.components.len() {
        return Err(PlanError::ColouringLength {
            got: colouring.len(),
            want: d.components.len(),
        });
    }
    if let Some(&index) = colouring.iter().find(|&&c| c >= cat.object_count()) {
        return Err(PlanError::InvalidObject { index });
    }
    Ok(())
}

/// Object at a strand end: the component colour at the source endpoint,
/// its dual at the target endpoint.
fn end_object(d: &LinkDiagram, cat: &RibbonData, colouring: &[usize], end: (usize, bool)) -> usize {
    let colour = colouring[d.segments[end.0].component];
    if end.1 {
        colour
    } else {
        cat.dual(colour)
    }
}

/// Factors of a node's vector: the reversal of the counter-clockwise
/// boundary word read from `bullet`.
fn factors_from_word(
    d: &LinkDiagram,
    cat: &RibbonData,
    colouring: &[usize],
    word: &CyclicWord,
    bullet: usize,
) -> Vec<BoundaryFactor> {
    let w = word.len();
    (0..w)
        .map(|j| {
            let (segment, outward) = word.0[(bullet + w - 1 - j) % w];
            BoundaryFactor {
                segment,
                outward,
                object: end_object(d, cat, colouring, (segment, outward)),
            }
        })
        .collect()
}

fn leaf_kind(vertex: &Vertex, bullet: usize) -> LeafKind {
    match vertex {
        // the strand holding the slot left of the base point passes over
        // exactly when the base point is even (over-ends sit at odd slots)
        Vertex::Crossing { .. } => {
            if bullet % 2 == 0 {
                LeafKind::CrossingBraid
            } else {
                LeafKind::CrossingBraidInv
            }
        }
        Vertex::Twist { sign, .. } => {
            if *sign > 0 {
                LeafKind::TwistPos
            } else {
                LeafKind::TwistNeg
            }
        }
    }
}

/// Rotate `state` to put the base point at `target`, emitting the
/// elementary matrices realizing the isotopy. Counter-clockwise moves
/// slide the rightmost factor across the back of the sub-tangle (a
/// twist, then braidings walking it to the left end); clockwise moves
/// are the exact inverse. The cheaper direction wins, ties go
/// counter-clockwise.
fn slide_step(node: usize, state: &mut BoundaryState, target: usize) -> Option<PlanStep> {
    let w = state.factors.len();
    if w == 0 {
        debug_assert_eq!(target, 0);
        return None;
    }
    let r_ccw = (target + w - state.bullet) % w;
    let r_cw = (state.bullet + w - target) % w;
    if r_ccw == 0 {
        return None;
    }
    let ccw = r_ccw <= r_cw;
    let moves = r_ccw.min(r_cw);
    let mut ops = Vec::new();
    for _ in 0..moves {
        if ccw {
            let mover = state.factors[w - 1].object;
            ops.push(SlideOp::Twist { object: mover, positive: true, at: w - 1 });
            for t in (1..w).rev() {
                ops.push(SlideOp::Braid {
                    first: state.factors[t - 1].object,
                    second: mover,
                    positive: true,
                    at: t - 1,
                });
            }
            state.factors.rotate_right(1);
            state.bullet = (state.bullet + 1) % w;
        } else {
            let mover = state.factors[0].object;
            for t in 1..w {
                ops.push(SlideOp::Braid {
                    first: mover,
                    second: state.factors[t].object,
                    positive: false,
                    at: t - 1,
                });
            }
            ops.push(SlideOp::Twist { object: mover, positive: false, at: w - 1 });
            state.factors.rotate_left(1);
            state.bullet = (state.bullet + w - 1) % w;
        }
    }
    debug_assert_eq!(state.bullet, target);
    Some(PlanStep::Slide { node, ccw, moves, ops })
}

/// Base point every node must present when its parent merges it: the
/// bridge block must sit at the end of the first child's clockwise
/// reading and at the start of the second child's.
fn required_bullets(t: &CarvingTree, r: &Realization) -> Vec<usize> {
    let parents = t.parents();
    let mut required = vec![0usize; t.nodes.len()];
    for n in t.postorder() {
        let Some(p) = parents[n] else { continue };
        let info = r.merges[p].as_ref().expect("parent of a node is internal");
        let CarvingNode::Internal { left, .. } = t.nodes[p] else { unreachable!() };
        let w = r.words[n].len();
        required[n] = if n == left {
            info.start1
        } else {
            (info.start2 + info.bridge.len()) % w
        };
    }
    required
}

/// Build the contraction schedule for a realized carving tree. Leaf base
/// points are free, so they are created where their parent needs them;
/// merged nodes are created with the base point at the seam between the
/// two remainders and rotated only when the next merge demands it.
pub fn build_plan(
    d: &LinkDiagram,
    t: &CarvingTree,
    r: &Realization,
    cat: &RibbonData,
    colouring: &[usize],
) -> Result<ContractionPlan, PlanError> {
    build_plan_forced(d, t, r, cat, colouring, None)
}

/// `build_plan` with every merge forced to one case (testing hook for
/// cross-checking the two bridge contractions against each other).
pub fn build_plan_forced(
    d: &LinkDiagram,
    t: &CarvingTree,
    r: &Realization,
    cat: &RibbonData,
    colouring: &[usize],
    forced_case: Option<MergeCase>,
) -> Result<ContractionPlan, PlanError> {
    check_colouring(d, cat, colouring)?;
    let congestion = t.postorder().iter().map(|&n| r.words[n].len()).max().unwrap_or(0);
    let required = required_bullets(t, r);

    let mut steps = Vec::new();
    let mut states = Vec::new();
    let mut live: HashMap<usize, BoundaryState> = HashMap::new();
    for n in t.postorder() {
        match t.nodes[n] {
            CarvingNode::Leaf { vertex } => {
                let bullet = required[n];
                let factors = factors_from_word(d, cat, colouring, &r.words[n], bullet);
                let state = BoundaryState { factors, bullet };
                steps.push(PlanStep::LeafAtom {
                    node: n,
                    vertex,
                    kind: leaf_kind(&d.vertices[vertex], bullet),
                    bullet,
                    objects: state.objects(),
                    outward: state.factors.iter().map(|f| f.outward).collect(),
                });
                states.push(state.clone());
                live.insert(n, state);
            }
            CarvingNode::Internal { left, right } => {
                for child in [left, right] {
                    let st = live.get_mut(&child).expect("child built before parent");
                    if let Some(step) = slide_step(child, st, required[child]) {
                        states.push(st.clone());
                        steps.push(step);
                    }
                }
                let info = r.merges[n].as_ref().expect("internal node carries merge info");
                let k = info.bridge.len();
                let ls = live.remove(&left).expect("left child live");
                let rs = live.remove(&right).expect("right child live");
                debug_assert!(k <= ls.factors.len() && k <= rs.factors.len());
                let i = ls.factors.len() - k;
                let case = forced_case.unwrap_or(if 2 * k <= congestion {
                    MergeCase::SmallBridge
                } else {
                    MergeCase::LargeBridge
                });
                let mut factors = ls.factors[..i].to_vec();
                factors.extend_from_slice(&rs.factors[k..]);
                let bullet = if factors.is_empty() { 0 } else { i };
                let state = BoundaryState { factors, bullet };
                steps.push(PlanStep::Merge { node: n, left, right, case, k });
                states.push(state.clone());
                live.insert(n, state);
            }
        }
    }
    debug_assert_eq!(live.len(), 1);
    Ok(ContractionPlan {
        version: PLAN_VERSION,
        steps,
        states,
        congestion,
        forced_case,
        writhe: d.writhe(),
        colouring: colouring.to_vec(),
    })
}

/// Symbolic replay of a plan against the diagram it claims to contract.
/// Leaf boundaries are re-derived from the diagram, slides are re-applied
/// op by op, merges re-check the bridge pairing, and every step's result
/// must equal the recorded expected state. Fails at the first mismatch.
pub fn validate_plan(
    plan: &ContractionPlan,
    d: &LinkDiagram,
    cat: &RibbonData,
) -> Result<(), PlanError> {
    check_colouring(d, cat, &plan.colouring)?;
    let colouring = &plan.colouring;
    let fail = |step: usize, what: String| PlanError::Replay { step, what };
    if plan.steps.len() != plan.states.len() {
        return Err(fail(0, "steps and expected states differ in length".into()));
    }
    let mut live: HashMap<usize, BoundaryState> = HashMap::new();
    for (idx, step) in plan.steps.iter().enumerate() {
        let expected = &plan.states[idx];
        match step {
            PlanStep::LeafAtom { node, vertex, kind, bullet, objects, outward } => {
                if live.contains_key(node) {
                    return Err(fail(idx, format!("node {node} built twice")));
                }
                if *vertex >= d.vertices.len() {
                    return Err(fail(idx, format!("vertex {vertex} out of range")));
                }
                let word = leaf_word(d, *vertex);
                if *bullet >= word.len() {
                    return Err(fail(idx, format!("bullet {bullet} outside word")));
                }
                let factors = factors_from_word(d, cat, colouring, &word, *bullet);
                let state = BoundaryState { factors, bullet: *bullet };
                if *kind != leaf_kind(&d.vertices[*vertex], *bullet) {
                    return Err(fail(idx, format!("leaf kind {kind:?} contradicts vertex")));
                }
                if *objects != state.objects() {
                    return Err(fail(idx, "leaf objects contradict diagram colouring".into()));
                }
                if *outward != state.factors.iter().map(|f| f.outward).collect::<Vec<_>>() {
                    return Err(fail(idx, "leaf orientations contradict diagram".into()));
                }
                if state != *expected {
                    return Err(fail(idx, "leaf state differs from expected state".into()));
                }
                live.insert(*node, state);
            }
            PlanStep::Slide { node, ccw, moves, ops } => {
                let st = live
                    .get_mut(node)
                    .ok_or_else(|| fail(idx, format!("slide on unbuilt node {node}")))?;
                let w = st.factors.len();
                if w == 0 {
                    return Err(fail(idx, "slide on closed sub-tangle".into()));
                }
                for op in ops {
                    match *op {
                        SlideOp::Twist { object, at, .. } => {
                            if at >= w || st.factors[at].object != object {
                                return Err(fail(
                                    idx,
                                    format!("twist object mismatch at factor {at}"),
                                ));
                            }
                        }
                        SlideOp::Braid { first, second, at, .. } => {
                            if at + 1 >= w
                                || st.factors[at].object != first
                                || st.factors[at + 1].object != second
                            {
                                return Err(fail(
                                    idx,
                                    format!("braiding object mismatch at factors {at},{}", at + 1),
                                ));
                            }
                            st.factors.swap(at, at + 1);
                        }
                    }
                }
                st.bullet = if *ccw {
                    (st.bullet + moves) % w
                } else {
                    (st.bullet + w - moves % w) % w
                };
                if st != expected {
                    return Err(fail(idx, "slide result differs from expected state".into()));
                }
            }
            PlanStep::Merge { node, left, right, case, k } => {
                let ls = live
                    .remove(left)
                    .ok_or_else(|| fail(idx, format!("merge consumes unbuilt node {left}")))?;
                let rs = live
                    .remove(right)
                    .ok_or_else(|| fail(idx, format!("merge consumes unbuilt node {right}")))?;
                if *k == 0 || *k > ls.factors.len() || *k > rs.factors.len() {
                    return Err(fail(idx, format!("bridge width {k} impossible")));
                }
                let i = ls.factors.len() - k;
                for l in 0..*k {
                    let a = &ls.factors[i + l];
                    let b = &rs.factors[k - 1 - l];
                    if a.segment != b.segment {
                        return Err(fail(
                            idx,
                            format!(
                                "bridge cable position {l} pairs segments {} and {}",
                                a.segment, b.segment
                            ),
                        ));
                    }
                    if a.outward == b.outward {
                        return Err(fail(
                            idx,
                            format!("bridge segment {} oriented the same on both sides", a.segment),
                        ));
                    }
                    if b.object != cat.dual(a.object) {
                        return Err(fail(
                            idx,
                            format!("bridge objects at cable position {l} are not dual"),
                        ));
                    }
                }
                let want = plan.forced_case.unwrap_or(if 2 * k <= plan.congestion {
                    MergeCase::SmallBridge
                } else {
                    MergeCase::LargeBridge
                });
                if *case != want {
                    return Err(fail(idx, format!("merge case {case:?}, expected {want:?}")));
                }
                let mut factors = ls.factors[..i].to_vec();
                factors.extend_from_slice(&rs.factors[*k..]);
                let bullet = if factors.is_empty() { 0 } else { i };
                let state = BoundaryState { factors, bullet };
                if state != *expected {
                    return Err(fail(idx, "merge result differs from expected state".into()));
                }
                live.insert(*node, state);
            }
        }
    }
    if live.len() != 1 {
        return Err(PlanError::Unfinished { live: live.len() });
    }
    let last = live.values().next().expect("one live node");
    if !last.factors.is_empty() {
        return Err(PlanError::Unfinished { live: 1 });
    }
    Ok(())
}

/// Forecast the cost of executing a plan by replaying it over the
/// degree-window ring: exact operation counts and tensor sizes, plus a
/// window and coefficient bound for the final scalar.
pub fn estimate_cost(
    plan: &ContractionPlan,
    cat: &RibbonData,
) -> Result<CostEstimate, crate::engine::EngineError> {
    let pc = crate::engine::PreparedCategory::for_bounds(cat, false);
    let exec = crate::engine::execute(plan, &pc)?;
    Ok(CostEstimate {
        peak_len: exec.stats.peak_len,
        scalar_ops: exec.stats.scalar_ops,
        degree_present: exec.value.present,
        degree_lo: exec.value.lo,
        degree_hi: exec.value.hi,
        coeff_bits: exec.value.bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carving::{exact_carving, realize, sweep_carving};
    use crate::category::builtin;
    use crate::diagram::parse_pd;

    fn prepared(text: &str) -> LinkDiagram {
        parse_pd(text).expect("parse").broken_self_loops()
    }

    fn plan_for(text: &str, sweep: bool) -> (LinkDiagram, ContractionPlan, RibbonData) {
        let d = prepared(text);
        let t = if sweep { sweep_carving(&d).unwrap() } else { exact_carving(&d).unwrap() };
        let r = realize(&t, &d).unwrap();
        let cat = builtin("sl2").unwrap();
        let colouring = vec![0; d.components.len()];
        let plan = build_plan(&d, &t, &r, &cat, &colouring).unwrap();
        (d, plan, cat)
    }

    const TWIST_PAIR: &str = "T[+,1] T[-,1]";
    const HOPF: &str = "X[1,3,2,4] X[3,1,4,2]";
    const TREFOIL_L: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
    const FIG8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";

    #[test]
    fn twist_pair_plan_uses_kinds_three_and_four_and_a_large_merge() {
        let (d, plan, cat) = plan_for(TWIST_PAIR, false);
        assert_eq!(plan.congestion, 2);
        let kinds: Vec<u8> = plan
            .steps
            .iter()
            .filter_map(|s| match s {
                PlanStep::LeafAtom { kind, .. } => Some(kind.index()),
                _ => None,
            })
            .collect();
        let mut sorted = kinds.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, [3, 4]);
        let merges: Vec<_> = plan
            .steps
            .iter()
            .filter_map(|s| match s {
                PlanStep::Merge { case, k, .. } => Some((*case, *k)),
                _ => None,
            })
            .collect();
        assert_eq!(merges, [(MergeCase::LargeBridge, 2)]);
        validate_plan(&plan, &d, &cat).unwrap();
    }

    #[test]
    fn hopf_final_merge_is_a_large_bridge_of_four() {
        let (d, plan, cat) = plan_for(HOPF, false);
        assert_eq!(plan.congestion, 4);
        let last = plan.steps.last().unwrap();
        match last {
            PlanStep::Merge { case, k, .. } => {
                assert_eq!(*case, MergeCase::LargeBridge);
                assert_eq!(*k, 4);
            }
            other => panic!("last step should merge, got {other:?}"),
        }
        validate_plan(&plan, &d, &cat).unwrap();
    }

    #[test]
    fn trefoil_sweep_first_merge_is_a_small_bridge_of_two() {
        let (d, plan, cat) = plan_for(TREFOIL_L, true);
        assert_eq!(plan.congestion, 4);
        let first_merge = plan
            .steps
            .iter()
            .find_map(|s| match s {
                PlanStep::Merge { case, k, .. } => Some((*case, *k)),
                _ => None,
            })
            .unwrap();
        assert_eq!(first_merge, (MergeCase::SmallBridge, 2));
        validate_plan(&plan, &d, &cat).unwrap();
    }

    #[test]
    fn leaf_bullets_match_parent_requirements_so_leaves_never_slide() {
        for text in [TWIST_PAIR, HOPF, TREFOIL_L, "X[1,5,2,4] X[3,1,4,8] X[5,3,6,2] X[7,6,8,7]"] {
            let (_, plan, _) = plan_for(text, false);
            let leaf_nodes: Vec<usize> = plan
                .steps
                .iter()
                .filter_map(|s| match s {
                    PlanStep::LeafAtom { node, .. } => Some(*node),
                    _ => None,
                })
                .collect();
            for step in &plan.steps {
                if let PlanStep::Slide { node, .. } = step {
                    assert!(
                        !leaf_nodes.contains(node),
                        "leaf {node} slid even though its base point was free"
                    );
                }
            }
        }
    }

    #[test]
    fn plans_validate_and_round_trip_through_json_on_the_sample_set() {
        for text in [TWIST_PAIR, HOPF, TREFOIL_L] {
            for sweep in [false, true] {
                let (d, plan, cat) = plan_for(text, sweep);
                validate_plan(&plan, &d, &cat).unwrap();
                let json = serde_json::to_string(&plan).unwrap();
                let back: ContractionPlan = serde_json::from_str(&json).unwrap();
                assert_eq!(back.steps, plan.steps);
                assert_eq!(back.states, plan.states);
                validate_plan(&back, &d, &cat).unwrap();
            }
        }
    }

    #[test]
    fn swapped_steps_fail_validation_at_the_first_swap() {
        let (d, mut plan, cat) = plan_for(TREFOIL_L, true);
        plan.steps.swap(0, 1); // two leaf steps out of order vs expected states
        let err = validate_plan(&plan, &d, &cat).unwrap_err();
        match err {
            PlanError::Replay { step, .. } => assert_eq!(step, 0),
            other => panic!("expected replay failure, got {other}"),
        }
    }

    #[test]
    fn rotation_off_by_one_is_rejected_with_an_object_report() {
        let (d, mut plan, cat) = plan_for(FIG8, true);
        let slide_idx = plan
            .steps
            .iter()
            .position(|s| matches!(s, PlanStep::Slide { .. }))
            .expect("figure-eight sweep needs at least one slide");
        // regenerate the slide one position past its true target
        let (node, prev_state) = {
            let PlanStep::Slide { node, .. } = plan.steps[slide_idx] else { unreachable!() };
            let before = plan.steps[..slide_idx]
                .iter()
                .enumerate()
                .rev()
                .find(|(_, s)| s.node() == node)
                .map(|(i, _)| plan.states[i].clone())
                .expect("slide follows the node's creation");
            (node, before)
        };
        let PlanStep::Slide { moves, ccw, .. } = plan.steps[slide_idx] else { unreachable!() };
        let w = prev_state.factors.len();
        let target = if ccw {
            (prev_state.bullet + moves + 1) % w
        } else {
            (prev_state.bullet + 2 * w - moves - 1) % w
        };
        let mut tampered = prev_state.clone();
        let step = slide_step(node, &mut tampered, target).expect("nonzero rotation");
        plan.steps[slide_idx] = step;
        let err = validate_plan(&plan, &d, &cat).unwrap_err();
        let PlanError::Replay { step, what } = err else { panic!("expected replay failure") };
        assert!(step >= slide_idx);
        assert!(
            what.contains("object") || what.contains("expected state") || what.contains("bridge"),
            "report should name the mismatch: {what}"
        );
    }

    #[test]
    fn forced_small_bridge_flips_the_recorded_case() {
        let d = prepared(HOPF);
        let t = exact_carving(&d).unwrap();
        let r = realize(&t, &d).unwrap();
        let cat = builtin("sl2").unwrap();
        let plan =
            build_plan_forced(&d, &t, &r, &cat, &[0, 0], Some(MergeCase::SmallBridge)).unwrap();
        assert!(plan
            .steps
            .iter()
            .all(|s| !matches!(s, PlanStep::Merge { case: MergeCase::LargeBridge, .. })));
        validate_plan(&plan, &d, &cat).unwrap();
    }
}
