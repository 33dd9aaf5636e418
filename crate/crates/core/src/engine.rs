//! Execution of a contraction plan over an arbitrary scalar backend.
//!
//! The engine walks the plan's steps, building one tensor per
//! carving-tree node: leaf vertices become cup/braiding composites,
//! base-point rotations apply twist and braiding matrices, and merges
//! contract the bridge cable either through a nested-evaluation row
//! (small bridge) or by dualizing the second child against a nested-cup
//! column (large bridge). All scalar work happens through the seven
//! composition kernels, so the same code path serves exact Laurent
//! arithmetic, modular point evaluation, and degree-window forecasting.
//!
//! For backends that cannot represent negative exponents, every stored
//! matrix is pre-multiplied by a power of the variable making its
//! entries ordinary polynomials; the engine accumulates the power applied
//! across the run (`shift_total`), which depends only on the plan, so
//! exact division restores the true Laurent scalar afterwards.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::{Morphism, RibbonData};
use crate::kernels::{
    eval_compose, kron, mid_compose, partial5, partial6, partial7, MorphVec, OpCount,
};
use crate::planner::{ContractionPlan, LeafKind, MergeCase, PlanStep, SlideOp};
use crate::ring::LaurentPoly;
use crate::scalar::{BoundRing, DegreeBound, ExactRing, ModRing, ScalarRing};

/// One stored matrix, converted to the backend's scalars, together with
/// the variable power applied to clear negative exponents.
struct Prepared<E> {
    mat: MorphVec<E>,
    shift: i64,
}

/// A ribbon category's matrices converted for one backend.
pub struct PreparedCategory<R: ScalarRing> {
    pub ring: R,
    pub object_count: usize,
    pub dims: Vec<usize>,
    pub duals: Vec<usize>,
    pub max_dim: usize,
    braiding: Vec<Prepared<R::Elem>>,
    braiding_inv: Vec<Prepared<R::Elem>>,
    twist: Vec<Prepared<R::Elem>>,
    twist_inv: Vec<Prepared<R::Elem>>,
    eval: Vec<Prepared<R::Elem>>,
    coeval: Vec<Prepared<R::Elem>>,
}

impl<R: ScalarRing> PreparedCategory<R> {
    /// Convert every stored matrix with `convert`; when `shifted`, first
    /// multiply each matrix by the smallest variable power making all of
    /// its entries ordinary polynomials.
    pub fn build(
        cat: &RibbonData,
        ring: R,
        shifted: bool,
        convert: &dyn Fn(&LaurentPoly) -> R::Elem,
    ) -> Self {
        let prep = |m: &Morphism| -> Prepared<R::Elem> {
            let shift = if shifted {
                m.data
                    .iter()
                    .filter_map(|p| p.min_exp())
                    .min()
                    .map(|e| (-e).max(0))
                    .unwrap_or(0)
            } else {
                0
            };
            let data = m.data.iter().map(|p| convert(&p.shifted(shift))).collect();
            Prepared {
                mat: MorphVec::new(m.row_dims.clone(), m.col_dims.clone(), data),
                shift,
            }
        };
        let nc = cat.object_count();
        let mut braiding = Vec::with_capacity(nc * nc);
        let mut braiding_inv = Vec::with_capacity(nc * nc);
        for v in 0..nc {
            for w in 0..nc {
                braiding.push(prep(cat.braiding(v, w)));
                braiding_inv.push(prep(cat.braiding_inv(v, w)));
            }
        }
        PreparedCategory {
            ring,
            object_count: nc,
            dims: (0..nc).map(|v| cat.dim(v)).collect(),
            duals: (0..nc).map(|v| cat.dual(v)).collect(),
            max_dim: cat.max_dim(),
            braiding,
            braiding_inv,
            twist: (0..nc).map(|v| prep(cat.twist(v))).collect(),
            twist_inv: (0..nc).map(|v| prep(cat.twist_inv(v))).collect(),
            eval: (0..nc).map(|v| prep(cat.eval(v))).collect(),
            coeval: (0..nc).map(|v| prep(cat.coeval(v))).collect(),
        }
    }
}

impl PreparedCategory<ExactRing> {
    pub fn for_exact(cat: &RibbonData) -> Self {
        Self::build(cat, ExactRing, false, &|p| p.clone())
    }
}

impl PreparedCategory<BoundRing> {
    pub fn for_bounds(cat: &RibbonData, shifted: bool) -> Self {
        Self::build(cat, BoundRing, shifted, &DegreeBound::of_poly)
    }
}

impl PreparedCategory<ModRing> {
    /// Matrices evaluated at `point` modulo `prime` (shifted first, so
    /// negative exponents never reach the evaluation).
    pub fn for_modular(cat: &RibbonData, prime: u64, point: u64) -> Self {
        Self::build(cat, ModRing { prime }, true, &|p| p.eval_mod(point, prime))
    }
}

/// Execution counters; every complexity claim is checked against these.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub congestion: usize,
    pub peak_len: usize,
    pub scalar_ops: u64,
    pub merges_small: usize,
    pub merges_large: usize,
    pub slides: usize,
    /// Variable power accumulated from pre-shifted matrices (0 for
    /// unshifted backends); depends only on the plan, never on values.
    pub shift_total: i64,
}

pub struct Execution<E> {
    pub value: E,
    pub stats: Stats,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(
        "intermediate tensor length {len} exceeds N^congestion = {budget} (congestion {congestion})"
    )]
    PeakBudget { len: usize, budget: u128, congestion: usize },
    #[error("merge multiply work {work} exceeds N^⌈3·congestion/2⌉ = {budget}")]
    MergeBudget { work: u128, budget: u128 },
    #[error("malformed plan at step {step}: {what}")]
    Malformed { step: usize, what: String },
}

struct NodeVal<E> {
    vec: MorphVec<E>,
    objects: Vec<usize>,
}

struct Runner<'a, R: ScalarRing> {
    pc: &'a PreparedCategory<R>,
    ops: OpCount,
    stats: Stats,
    peak_budget: u128,
    merge_budget: u128,
}

impl<'a, R: ScalarRing> Runner<'a, R> {
    fn note(&mut self, len: usize, step: usize) -> Result<(), EngineError> {
        let _ = step;
        if len > self.stats.peak_len {
            self.stats.peak_len = len;
        }
        if (len as u128) > self.peak_budget {
            return Err(EngineError::PeakBudget {
                len,
                budget: self.peak_budget,
                congestion: self.stats.congestion,
            });
        }
        Ok(())
    }

    fn work(&mut self, a: usize, b: usize, c: usize) -> Result<(), EngineError> {
        let w = a as u128 * b as u128 * c as u128;
        if w > self.merge_budget {
            return Err(EngineError::MergeBudget { work: w, budget: self.merge_budget });
        }
        Ok(())
    }

    /// Record the variable power carried by a pre-shifted matrix about
    /// to be applied.
    fn count_shift(&mut self, p: &Prepared<R::Elem>) {
        self.stats.shift_total += p.shift;
    }

    fn braid_mat(&mut self, first: usize, second: usize, positive: bool) -> &'a MorphVec<R::Elem> {
        let pc = self.pc;
        let p = if positive {
            &pc.braiding[first * pc.object_count + second]
        } else {
            &pc.braiding_inv[second * pc.object_count + first]
        };
        self.stats.shift_total += p.shift;
        &p.mat
    }

    /// Elementary tensor of a single vertex: cups composed with a
    /// braiding (crossings) or a twist on the strand's source end
    /// (curls). Factor order is the clockwise reading from the base
    /// point.
    fn leaf(
        &mut self,
        kind: LeafKind,
        objects: &[usize],
        outward: &[bool],
        step: usize,
    ) -> Result<MorphVec<R::Elem>, EngineError> {
        let malformed = |what: String| EngineError::Malformed { step, what };
        let pc = self.pc;
        match kind {
            LeafKind::CrossingBraid | LeafKind::CrossingBraidInv => {
                if objects.len() != 4 {
                    return Err(malformed(format!("crossing leaf with {} factors", objects.len())));
                }
                let (o0, o1, o2, o3) = (objects[0], objects[1], objects[2], objects[3]);
                if o2 != pc.duals[o0] || o3 != pc.duals[o1] {
                    return Err(malformed("opposite crossing factors must be dual".into()));
                }
                self.count_shift(&pc.coeval[o0]);
                self.count_shift(&pc.coeval[o1]);
                let mut state =
                    kron(&pc.ring, &pc.coeval[o0].mat, &pc.coeval[o1].mat, &mut self.ops);
                self.note(state.len(), step)?;
                let braid = self.braid_mat(o2, o1, kind == LeafKind::CrossingBraid);
                state = mid_compose(&pc.ring, &state, 1..3, braid, &mut self.ops);
                self.note(state.len(), step)?;
                Ok(state)
            }
            LeafKind::TwistPos | LeafKind::TwistNeg => {
                if objects.len() != 2 || outward.len() != 2 {
                    return Err(malformed(format!("curl leaf with {} factors", objects.len())));
                }
                if objects[1] != pc.duals[objects[0]] {
                    return Err(malformed("curl factors must be dual".into()));
                }
                if outward.iter().filter(|&&b| b).count() != 1 {
                    return Err(malformed("curl needs exactly one outward factor".into()));
                }
                self.count_shift(&pc.coeval[objects[0]]);
                let j = usize::from(!outward[0]);
                let theta = if kind == LeafKind::TwistPos {
                    &pc.twist[objects[j]]
                } else {
                    &pc.twist_inv[objects[j]]
                };
                self.count_shift(theta);
                let state = mid_compose(
                    &pc.ring,
                    &pc.coeval[objects[0]].mat,
                    j..j + 1,
                    &theta.mat,
                    &mut self.ops,
                );
                self.note(state.len(), step)?;
                Ok(state)
            }
        }
    }

    /// Apply one base-point rotation: the recorded twist/braiding list,
    /// each through `mid_compose`. Objects permute alongside factors.
    fn slide(
        &mut self,
        nv: &mut NodeVal<R::Elem>,
        ops_list: &[SlideOp],
        step: usize,
    ) -> Result<(), EngineError> {
        let w = nv.objects.len();
        let bad = |what: String| EngineError::Malformed { step, what };
        let pc = self.pc;
        for op in ops_list {
            match *op {
                SlideOp::Twist { object, positive, at } => {
                    if at >= w || nv.objects[at] != object {
                        return Err(bad(format!("twist at factor {at} contradicts objects")));
                    }
                    let theta = if positive { &pc.twist[object] } else { &pc.twist_inv[object] };
                    self.count_shift(theta);
                    nv.vec = mid_compose(&pc.ring, &nv.vec, at..at + 1, &theta.mat, &mut self.ops);
                }
                SlideOp::Braid { first, second, positive, at } => {
                    if at + 1 >= w || nv.objects[at] != first || nv.objects[at + 1] != second {
                        return Err(bad(format!(
                            "braiding at factors {at},{} contradicts objects",
                            at + 1
                        )));
                    }
                    let braid = self.braid_mat(first, second, positive);
                    nv.vec = mid_compose(&pc.ring, &nv.vec, at..at + 2, braid, &mut self.ops);
                    nv.objects.swap(at, at + 1);
                }
            }
            self.note(nv.vec.len(), step)?;
        }
        self.stats.slides += 1;
        Ok(())
    }

    /// Bridge contraction through a nested-evaluation row: build
    /// `d_{U₁⊗…⊗U_k}` innermost-first, contract it against the second
    /// child, then against the first.
    fn merge_small(
        &mut self,
        left: NodeVal<R::Elem>,
        right: NodeVal<R::Elem>,
        k: usize,
        step: usize,
    ) -> Result<NodeVal<R::Elem>, EngineError> {
        let pc = self.pc;
        let r = &pc.ring;
        let i = left.objects.len() - k;
        let u = &left.objects[i..]; // U_1 .. U_k
        self.count_shift(&pc.eval[pc.duals[u[k - 1]]]);
        let mut d_row = pc.eval[pc.duals[u[k - 1]]].mat.clone();
        for l in (0..k - 1).rev() {
            let pair = &pc.eval[pc.duals[u[l]]];
            self.count_shift(pair);
            d_row = eval_compose(r, &pair.mat, &d_row, &mut self.ops);
            self.note(d_row.len(), step)?;
        }
        self.note(d_row.len(), step)?;

        let w_prod: usize = right.vec.row_dims[k..].iter().product();
        let bridge_prod: usize = right.vec.row_dims[..k].iter().product();
        let u_prod: usize = d_row.col_dims[..k].iter().product();
        self.work(w_prod, bridge_prod, u_prod)?;
        let h = partial5(r, &right.vec, k, &d_row, k, &mut self.ops);
        self.note(h.len(), step)?;

        let lead_prod: usize = left.vec.row_dims[..i].iter().product();
        self.work(lead_prod, u_prod, w_prod)?;
        let fused = partial7(r, &left.vec, i, &h, &mut self.ops);
        self.note(fused.len(), step)?;

        let mut objects = left.objects[..i].to_vec();
        objects.extend_from_slice(&right.objects[k..]);
        Ok(NodeVal { vec: fused, objects })
    }

    /// Bridge contraction through the flipped second child: dualize it
    /// factor by factor (metric contraction with the evaluation of each
    /// factor's object), reverse, and contract through a nested-cup
    /// column over the non-bridge factors.
    fn merge_large(
        &mut self,
        left: NodeVal<R::Elem>,
        right: NodeVal<R::Elem>,
        k: usize,
        step: usize,
    ) -> Result<NodeVal<R::Elem>, EngineError> {
        let pc = self.pc;
        let r = &pc.ring;
        let i = left.objects.len() - k;
        let w2 = right.objects.len();
        let j = w2 - k;

        // g₂*: contract every factor with its evaluation row (reshaped
        // to a dim×dim matrix), then reverse the factor order.
        let mut dualized = right.vec;
        for t in 0..w2 {
            let z = right.objects[t];
            self.count_shift(&pc.eval[z]);
            let m = MorphVec::new(
                vec![pc.dims[pc.duals[z]]],
                vec![pc.dims[z]],
                pc.eval[z].mat.data.clone(),
            );
            dualized = mid_compose(r, &dualized, t..t + 1, &m, &mut self.ops);
            self.note(dualized.len(), step)?;
        }
        let flipped = dualized.reversed_row_factors().transposed_vector();

        // b_{W₁⊗…⊗W_j}: nested cups, outermost pair first.
        let wobjs = &right.objects[k..]; // W_1 .. W_j
        let mut cups = MorphVec::new(vec![], vec![], vec![r.one()]);
        for (l, &wl) in wobjs.iter().enumerate() {
            self.count_shift(&pc.coeval[wl]);
            cups = mid_compose(r, &cups, l..l, &pc.coeval[wl].mat, &mut self.ops);
            self.note(cups.len(), step)?;
        }

        let w_prod: usize = cups.row_dims[..j].iter().product();
        let dual_prod: usize = cups.row_dims[j..].iter().product();
        let u_prod: usize = flipped.col_dims[j..].iter().product();
        self.work(w_prod, dual_prod, u_prod)?;
        let h = partial6(r, &cups, j, &flipped, j, &mut self.ops);
        self.note(h.len(), step)?;

        let lead_prod: usize = left.vec.row_dims[..i].iter().product();
        let bridge_prod: usize = left.vec.row_dims[i..].iter().product();
        self.work(lead_prod, bridge_prod, w_prod)?;
        let fused = partial7(r, &left.vec, i, &h, &mut self.ops);
        self.note(fused.len(), step)?;

        let mut objects = left.objects[..i].to_vec();
        objects.extend_from_slice(&right.objects[k..]);
        Ok(NodeVal { vec: fused, objects })
    }
}

/// The budgets certify plans whose merge cases follow the bridge-width
/// rule; a plan with a forced case deliberately departs from the rule,
/// so enforcement is waived for it.
fn budgets(max_dim: usize, congestion: usize, forced: bool) -> (u128, u128) {
    if forced {
        return (u128::MAX, u128::MAX);
    }
    let n = max_dim.max(1) as u128;
    let cng = congestion as u32;
    (
        n.checked_pow(cng).unwrap_or(u128::MAX),
        n.checked_pow((3 * cng + 1) / 2).unwrap_or(u128::MAX),
    )
}

/// Run a plan over a prepared category, producing the closed diagram's
/// scalar and the execution counters. Enforces the size budgets implied
/// by the plan's congestion: every intermediate tensor stays within
/// N^congestion entries and every merge multiply within
/// N^⌈3·congestion/2⌉ scalar products.
pub fn execute<R: ScalarRing>(
    plan: &ContractionPlan,
    pc: &PreparedCategory<R>,
) -> Result<Execution<R::Elem>, EngineError> {
    let (peak_budget, merge_budget) =
        budgets(pc.max_dim, plan.congestion, plan.forced_case.is_some());
    let mut runner = Runner {
        pc,
        ops: OpCount::default(),
        stats: Stats { congestion: plan.congestion, ..Stats::default() },
        peak_budget,
        merge_budget,
    };
    let mut live: HashMap<usize, NodeVal<R::Elem>> = HashMap::new();
    for (idx, step) in plan.steps.iter().enumerate() {
        let missing =
            |node: usize| EngineError::Malformed { step: idx, what: format!("node {node} not live") };
        match step {
            PlanStep::LeafAtom { node, kind, objects, outward, .. } => {
                if live.contains_key(node) {
                    return Err(EngineError::Malformed {
                        step: idx,
                        what: format!("node {node} built twice"),
                    });
                }
                let vec = runner.leaf(*kind, objects, outward, idx)?;
                live.insert(*node, NodeVal { vec, objects: objects.clone() });
            }
            PlanStep::Slide { node, ops, .. } => {
                let nv = live.get_mut(node).ok_or_else(|| missing(*node))?;
                runner.slide(nv, ops, idx)?;
            }
            PlanStep::Merge { node, left, right, case, k } => {
                let l = live.remove(left).ok_or_else(|| missing(*left))?;
                let rt = live.remove(right).ok_or_else(|| missing(*right))?;
                if *k == 0 || *k > l.objects.len() || *k > rt.objects.len() {
                    return Err(EngineError::Malformed {
                        step: idx,
                        what: format!("bridge width {k} impossible"),
                    });
                }
                let merged = match case {
                    MergeCase::SmallBridge => {
                        runner.stats.merges_small += 1;
                        runner.merge_small(l, rt, *k, idx)?
                    }
                    MergeCase::LargeBridge => {
                        runner.stats.merges_large += 1;
                        runner.merge_large(l, rt, *k, idx)?
                    }
                };
                live.insert(*node, merged);
            }
        }
    }
    if live.len() != 1 {
        return Err(EngineError::Malformed {
            step: plan.steps.len(),
            what: format!("{} open sub-tangles remain", live.len()),
        });
    }
    let nv = live.into_values().next().expect("one live node");
    if !nv.vec.row_dims.is_empty() || !nv.vec.col_dims.is_empty() {
        return Err(EngineError::Malformed {
            step: plan.steps.len(),
            what: "plan does not close the diagram".into(),
        });
    }
    let mut stats = runner.stats;
    stats.scalar_ops = runner.ops.total();
    let value = nv.vec.data.into_iter().next().expect("scalar entry");
    Ok(Execution { value, stats })
}

/// Convert the framed scalar to the framing-normalized invariant by
/// dividing out one framing unit per writhe unit.
pub fn framing_normalize(value: &LaurentPoly, writhe: i64, cat: &RibbonData) -> LaurentPoly {
    let unit = if writhe >= 0 { &cat.framing_unit_inv } else { &cat.framing_unit };
    let mut out = value.clone();
    for _ in 0..writhe.unsigned_abs() {
        out = out.checked_mul(unit).expect("framing normalization overflow");
    }
    out
}

/// An open sub-tangle's tensor over the exact backend, as produced for
/// one plan node right before its parent merge consumes it (after its
/// recorded slides). Used to compare sub-tangle tensors against the
/// dense sweep oracle.
pub fn open_subtangle(
    plan: &ContractionPlan,
    pc: &PreparedCategory<ExactRing>,
    target_node: usize,
) -> Result<MorphVec<LaurentPoly>, EngineError> {
    let (peak_budget, merge_budget) =
        budgets(pc.max_dim, plan.congestion, plan.forced_case.is_some());
    let mut runner = Runner {
        pc,
        ops: OpCount::default(),
        stats: Stats { congestion: plan.congestion, ..Stats::default() },
        peak_budget,
        merge_budget,
    };
    let mut live: HashMap<usize, NodeVal<LaurentPoly>> = HashMap::new();
    for (idx, step) in plan.steps.iter().enumerate() {
        match step {
            PlanStep::LeafAtom { node, kind, objects, outward, .. } => {
                let vec = runner.leaf(*kind, objects, outward, idx)?;
                live.insert(*node, NodeVal { vec, objects: objects.clone() });
            }
            PlanStep::Slide { node, ops, .. } => {
                let nv = live.get_mut(node).ok_or(EngineError::Malformed {
                    step: idx,
                    what: "slide on missing node".into(),
                })?;
                runner.slide(nv, ops, idx)?;
            }
            PlanStep::Merge { node, left, right, case, k } => {
                if *left == target_node || *right == target_node {
                    let nv = live.remove(&target_node).ok_or(EngineError::Malformed {
                        step: idx,
                        what: "target not live at its merge".into(),
                    })?;
                    return Ok(nv.vec);
                }
                let l = live.remove(left).ok_or(EngineError::Malformed {
                    step: idx,
                    what: "missing left child".into(),
                })?;
                let rt = live.remove(right).ok_or(EngineError::Malformed {
                    step: idx,
                    what: "missing right child".into(),
                })?;
                let merged = match case {
                    MergeCase::SmallBridge => runner.merge_small(l, rt, *k, idx)?,
                    MergeCase::LargeBridge => runner.merge_large(l, rt, *k, idx)?,
                };
                live.insert(*node, merged);
            }
        }
    }
    live.remove(&target_node).map(|nv| nv.vec).ok_or(EngineError::Malformed {
        step: plan.steps.len(),
        what: "target node never built".into(),
    })
}

/// Slide range helper exposed for tests: apply `ops` to an exact column.
#[cfg(test)]
fn apply_ops_exact(
    pc: &PreparedCategory<ExactRing>,
    vec: &MorphVec<LaurentPoly>,
    objects: &mut Vec<usize>,
    ops_list: &[SlideOp],
) -> MorphVec<LaurentPoly> {
    let mut runner = Runner {
        pc,
        ops: OpCount::default(),
        stats: Stats::default(),
        peak_budget: u128::MAX,
        merge_budget: u128::MAX,
    };
    let mut nv = NodeVal { vec: vec.clone(), objects: objects.clone() };
    runner.slide(&mut nv, ops_list, 0).expect("ops apply");
    *objects = nv.objects;
    nv.vec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carving::{exact_carving, realize, sweep_carving, CarvingTree};
    use crate::category::builtin;
    use crate::diagram::{parse_pd, LinkDiagram};
    use crate::oracle::{kauffman_closed, morse_evaluate};
    use crate::planner::{build_plan, build_plan_forced, validate_plan, BoundaryState};

    fn prepared(text: &str) -> LinkDiagram {
        parse_pd(text).expect("parse").broken_self_loops()
    }

    fn exact_value(d: &LinkDiagram, cat: &RibbonData, sweep: bool) -> (LaurentPoly, Stats) {
        let t = if sweep { sweep_carving(d).unwrap() } else { exact_carving(d).unwrap() };
        let r = realize(&t, d).unwrap();
        let colouring = vec![0; d.components.len()];
        let plan = build_plan(d, &t, &r, cat, &colouring).unwrap();
        validate_plan(&plan, d, cat).unwrap();
        let pc = PreparedCategory::for_exact(cat);
        let exec = execute(&plan, &pc).unwrap();
        (exec.value, exec.stats)
    }

    const TWIST_PAIR: &str = "T[+,1] T[-,1]";
    const HOPF: &str = "X[1,3,2,4] X[3,1,4,2]";
    const TREFOIL_L: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
    const FIG8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
    const CURL_PAIR: &str = "X[2,2,3,1] X[3,1,4,4]";

    #[test]
    fn twist_pair_unknot_equals_the_loop_scalar() {
        let cat = builtin("sl2").unwrap();
        let d = prepared(TWIST_PAIR);
        let (value, stats) = exact_value(&d, &cat, false);
        assert_eq!(value, cat.quantum_dim(0));
        assert_eq!(value, kauffman_closed(&d));
        assert!(stats.merges_large > 0);
    }

    #[test]
    fn curl_pair_unknot_contracts_kind_one_against_kind_two() {
        let cat = builtin("sl2").unwrap();
        let d = prepared(CURL_PAIR);
        let (value, _) = exact_value(&d, &cat, false);
        assert_eq!(value, kauffman_closed(&d));
        assert_eq!(framing_normalize(&value, d.writhe(), &cat), cat.quantum_dim(0));
    }

    #[test]
    fn engine_matches_both_oracles_on_the_sample_set() {
        let cat = builtin("sl2").unwrap();
        for text in [TWIST_PAIR, HOPF, TREFOIL_L, FIG8, CURL_PAIR] {
            let d = prepared(text);
            let want = kauffman_closed(&d);
            let morse = morse_evaluate(&d, &cat, &vec![0; d.components.len()]).unwrap();
            assert_eq!(morse, want, "oracles disagree on {text}");
            for sweep in [false, true] {
                let (value, _) = exact_value(&d, &cat, sweep);
                assert_eq!(value, want, "engine mismatch on {text} (sweep={sweep})");
            }
        }
    }

    #[test]
    fn trivial_category_evaluates_every_sample_to_one() {
        let cat = builtin("trivial").unwrap();
        for text in [TWIST_PAIR, HOPF, TREFOIL_L, FIG8] {
            let d = prepared(text);
            let (value, stats) = exact_value(&d, &cat, false);
            assert_eq!(value, LaurentPoly::one());
            assert_eq!(stats.peak_len, 1);
        }
    }

    #[test]
    fn hopf_final_merge_agrees_between_both_bridge_contractions() {
        let cat = builtin("sl2").unwrap();
        let d = prepared(HOPF);
        let t = exact_carving(&d).unwrap();
        let r = realize(&t, &d).unwrap();
        let colouring = vec![0usize, 0];
        let pc = PreparedCategory::for_exact(&cat);
        let large = build_plan(&d, &t, &r, &cat, &colouring).unwrap();
        let forced =
            build_plan_forced(&d, &t, &r, &cat, &colouring, Some(MergeCase::SmallBridge)).unwrap();
        let a = execute(&large, &pc).unwrap();
        let b = execute(&forced, &pc).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.value, kauffman_closed(&d));
        assert!(a.stats.merges_large > 0);
        assert!(b.stats.merges_small > 0);
    }

    #[test]
    fn left_trefoil_normalized_matches_the_classical_polynomial() {
        let cat = builtin("sl2").unwrap();
        let d = prepared(TREFOIL_L);
        let (value, _) = exact_value(&d, &cat, false);
        let normalized = framing_normalize(&value, d.writhe(), &cat);
        // −t^−4 + t^−3 + t^−1 in t = A^−4, times the unknot's loop value
        let t_inv_scale = |e: i64, c: i64| LaurentPoly::monomial("A", c.into(), -4 * e);
        let jones_times_loop = t_inv_scale(-4, -1)
            .checked_add(&t_inv_scale(-3, 1))
            .unwrap()
            .checked_add(&t_inv_scale(-1, 1))
            .unwrap()
            .checked_mul(&cat.quantum_dim(0))
            .unwrap();
        assert_eq!(normalized, jones_times_loop);
    }

    #[test]
    fn slide_and_inverse_slide_restore_the_vector_exactly() {
        let cat = builtin("sl2").unwrap();
        let pc = PreparedCategory::for_exact(&cat);
        let d = prepared(TREFOIL_L);
        let t = sweep_carving(&d).unwrap();
        let r = realize(&t, &d).unwrap();
        let plan = build_plan(&d, &t, &r, &cat, &[0]).unwrap();
        // take any built leaf vector and slide it around one full turn
        let leaf_step = plan
            .steps
            .iter()
            .find_map(|s| match s {
                PlanStep::LeafAtom { kind, objects, outward, .. } => {
                    Some((*kind, objects.clone(), outward.clone()))
                }
                _ => None,
            })
            .unwrap();
        let mut runner = Runner {
            pc: &pc,
            ops: OpCount::default(),
            stats: Stats::default(),
            peak_budget: u128::MAX,
            merge_budget: u128::MAX,
        };
        let vec = runner.leaf(leaf_step.0, &leaf_step.1, &leaf_step.2, 0).unwrap();
        let mut objects = leaf_step.1.clone();
        let state = BoundaryState {
            factors: objects
                .iter()
                .zip(leaf_step.2.iter())
                .map(|(&object, &outward)| crate::planner::BoundaryFactor {
                    segment: 0,
                    outward,
                    object,
                })
                .collect(),
            bullet: 0,
        };
        // one counter-clockwise move, then one clockwise move back
        let mut fwd_state = state.clone();
        let fwd = planner_slide_for_test(&mut fwd_state, true);
        let mut back_state = fwd_state.clone();
        let back = planner_slide_for_test(&mut back_state, false);
        let mid = apply_ops_exact(&pc, &vec, &mut objects, &fwd);
        let restored = apply_ops_exact(&pc, &mid, &mut objects, &back);
        assert_eq!(restored, vec);
    }

    /// Emit the ops of a single rotation step in the given direction,
    /// mirroring the planner's emission rules.
    fn planner_slide_for_test(state: &mut BoundaryState, ccw: bool) -> Vec<SlideOp> {
        let w = state.factors.len();
        let mut ops = Vec::new();
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
        }
        ops
    }

    #[test]
    fn mirrored_diagrams_invert_the_variable() {
        let cat = builtin("sl2").unwrap();
        for text in [TREFOIL_L, FIG8] {
            let d = prepared(text);
            let m = d.mirror();
            let (value, _) = exact_value(&d, &cat, false);
            let (mirrored, _) = exact_value(&m, &cat, false);
            let inverted = LaurentPoly::from_terms(
                value.var(),
                value.terms().map(|(e, c)| (-e, c.clone())),
            );
            assert_eq!(mirrored, inverted);
        }
    }

    #[test]
    fn subtangle_tensor_matches_the_dense_sweep_oracle() {
        use crate::oracle::morse_open;
        let cat = builtin("sl2").unwrap();
        let d = prepared(TREFOIL_L);
        let t = sweep_carving(&d).unwrap();
        let r = realize(&t, &d).unwrap();
        let plan = build_plan(&d, &t, &r, &cat, &[0]).unwrap();
        let pc = PreparedCategory::for_exact(&cat);
        // first internal node of the sweep spine: the first merge's output
        let (node, state) = plan
            .steps
            .iter()
            .zip(plan.states.iter())
            .find_map(|(s, st)| match s {
                PlanStep::Merge { node, .. } => Some((*node, st.clone())),
                _ => None,
            })
            .unwrap();
        let got = open_subtangle(&plan, &pc, node).unwrap();
        // the oracle builds the same sub-tangle with the same clockwise
        // factor reading
        let vertices = subtree_vertices(&t, node);
        let target: Vec<(usize, bool)> =
            state.factors.iter().map(|f| (f.segment, f.outward)).collect();
        let want = morse_open(&d, &cat, &[0], &vertices, &target).unwrap();
        assert_eq!(got.row_dims, want.row_dims);
        assert_eq!(got.data, want.data);
    }

    fn subtree_vertices(t: &CarvingTree, node: usize) -> Vec<usize> {
        let mut stack = vec![node];
        let mut out = Vec::new();
        while let Some(n) = stack.pop() {
            match t.nodes[n] {
                crate::carving::CarvingNode::Leaf { vertex } => out.push(vertex),
                crate::carving::CarvingNode::Internal { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn cost_estimate_brackets_the_exact_run() {
        let cat = builtin("sl2").unwrap();
        for text in [TWIST_PAIR, HOPF, TREFOIL_L, FIG8] {
            let d = prepared(text);
            let t = exact_carving(&d).unwrap();
            let r = realize(&t, &d).unwrap();
            let colouring = vec![0; d.components.len()];
            let plan = build_plan(&d, &t, &r, &cat, &colouring).unwrap();
            let est = crate::planner::estimate_cost(&plan, &cat).unwrap();
            let pc = PreparedCategory::for_exact(&cat);
            let exec = execute(&plan, &pc).unwrap();
            assert_eq!(est.peak_len, exec.stats.peak_len);
            assert_eq!(est.scalar_ops, exec.stats.scalar_ops);
            if !exec.value.is_zero() {
                assert!(est.degree_present);
                assert!(est.degree_lo <= exec.value.min_exp().unwrap());
                assert!(est.degree_hi >= exec.value.max_exp().unwrap());
                assert!(est.coeff_bits >= exec.value.coeff_bits());
            }
        }
    }

    #[test]
    fn shifted_bound_replay_reports_an_ordinary_window() {
        let cat = builtin("sl2").unwrap();
        let d = prepared(TREFOIL_L);
        let t = exact_carving(&d).unwrap();
        let r = realize(&t, &d).unwrap();
        let plan = build_plan(&d, &t, &r, &cat, &[0]).unwrap();
        let pcb = PreparedCategory::for_bounds(&cat, true);
        let exec = execute(&plan, &pcb).unwrap();
        assert!(exec.stats.shift_total > 0);
        assert!(exec.value.present);
        assert!(exec.value.lo >= 0, "shifted intermediates must stay ordinary");
        // the window must contain the shifted exact value
        let pc = PreparedCategory::for_exact(&cat);
        let exact = execute(&plan, &pc).unwrap();
        assert_eq!(exact.stats.shift_total, 0);
        let shifted = exact.value.shifted(exec.stats.shift_total);
        assert!(exec.value.lo <= shifted.min_exp().unwrap());
        assert!(exec.value.hi >= shifted.max_exp().unwrap());
    }
}
