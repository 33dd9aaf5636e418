//! Dense Morse-position evaluator.
//!
//! The diagram is rebuilt bottom-up as a planar sweep: vertices are
//! inserted one at a time above a horizontal frontier of open strand
//! ends. Each insertion multiplies the running state vector by the
//! vertex's dense atom (a column built from cups, a braiding, and
//! twists) and immediately contracts the matched ends with evaluation
//! caps. Orientation is carried entirely by labels: an end where the
//! strand leaves the swept region is labelled by the component's colour,
//! an end where it will come back down is labelled by the dual, and a
//! cap over an adjacent pair (P, P*) always applies the dual object's
//! evaluation row. A backtracking search finds the insertion order; the
//! arithmetic uses direct index loops and shares no code with the
//! contraction engine.

use super::OracleError;
use crate::category::RibbonData;
use crate::diagram::{LinkDiagram, Vertex};
use crate::kernels::MorphVec;
use crate::ring::LaurentPoly;

/// An open strand end: segment index plus which endpoint (`true` = the
/// segment's source, where the strand leaves the swept region).
pub type StrandEnd = (usize, bool);

const WIDTH_CAP: usize = 1_000_000;
const SEARCH_CAP: usize = 5_000_000;

/// Closed evaluation: every component swept and capped, yielding the
/// full contraction value (an unknotted loop gives the loop scalar).
pub fn morse_evaluate(
    d: &LinkDiagram,
    cat: &RibbonData,
    colouring: &[usize],
) -> Result<LaurentPoly, OracleError> {
    morse_evaluate_directed(d, cat, colouring, false)
}

/// Closed evaluation with an explicit sweep direction; both directions
/// must agree (the value is a property of the diagram, not the sweep).
pub fn morse_evaluate_directed(
    d: &LinkDiagram,
    cat: &RibbonData,
    colouring: &[usize],
    right_to_left: bool,
) -> Result<LaurentPoly, OracleError> {
    let subset: Vec<usize> = (0..d.vertices.len()).collect();
    let out = sweep(d, cat, colouring, &subset, &[], right_to_left)?;
    assert!(out.row_dims.is_empty() && out.col_dims.is_empty());
    Ok(out.data.into_iter().next().expect("scalar"))
}

/// Open evaluation of the sub-diagram spanned by `subset`: sweep only
/// those vertices and require the surviving open ends to read exactly
/// `target` left to right. Returns the column vector over the target
/// boundary (factor order matching `target`).
pub fn morse_open(
    d: &LinkDiagram,
    cat: &RibbonData,
    colouring: &[usize],
    subset: &[usize],
    target: &[StrandEnd],
) -> Result<MorphVec<LaurentPoly>, OracleError> {
    sweep(d, cat, colouring, subset, target, false)
}

struct Ctx<'a> {
    d: &'a LinkDiagram,
    cat: &'a RibbonData,
    colouring: &'a [usize],
}

impl Ctx<'_> {
    /// Object label of a strand end: colour at the source endpoint, dual
    /// at the target endpoint.
    fn label(&self, end: StrandEnd) -> usize {
        let colour = self.colouring[self.d.segments[end.0].component];
        if end.1 {
            colour
        } else {
            self.cat.dual(colour)
        }
    }

    fn end_at(&self, vertex: usize, slot: usize) -> StrandEnd {
        self.d.segment_at(vertex, slot)
    }

    /// The other endpoint of the same segment.
    fn partner(&self, end: StrandEnd) -> StrandEnd {
        (end.0, !end.1)
    }
}

#[derive(Clone, Copy, Debug)]
struct Event {
    vertex: usize,
    /// Number of ends closed against the existing frontier.
    closing: usize,
    /// Leftmost frontier position of the closed block (equals the
    /// insertion point when nothing closes).
    pos: usize,
    /// Rotation: the slot whose end closes first is `rot`, and the atom
    /// word is the clockwise slot sequence starting at `rot + closing - 1`.
    rot: usize,
}

fn sweep(
    d: &LinkDiagram,
    cat: &RibbonData,
    colouring: &[usize],
    subset: &[usize],
    target: &[StrandEnd],
    right_to_left: bool,
) -> Result<MorphVec<LaurentPoly>, OracleError> {
    assert_eq!(colouring.len(), d.components.len(), "one colour per component");
    assert!(colouring.iter().all(|&c| c < cat.object_count()), "colour out of range");
    let ctx = Ctx { d, cat, colouring };
    let events = plan_sweep(&ctx, subset, target, right_to_left)?;
    evaluate(&ctx, &events, target)
}

/// Backtracking search for a planar insertion order.
fn plan_sweep(
    ctx: &Ctx,
    subset: &[usize],
    target: &[StrandEnd],
    right_to_left: bool,
) -> Result<Vec<Event>, OracleError> {
    let mut in_subset = vec![false; ctx.d.vertices.len()];
    for &v in subset {
        in_subset[v] = true;
    }
    let mut inserted = vec![false; ctx.d.vertices.len()];
    let mut frontier: Vec<StrandEnd> = Vec::new();
    let mut events = Vec::with_capacity(subset.len());
    let mut steps = 0usize;
    if dfs(
        ctx,
        &in_subset,
        &mut inserted,
        &mut frontier,
        &mut events,
        subset.len(),
        target,
        right_to_left,
        &mut steps,
    ) {
        Ok(events)
    } else {
        Err(OracleError::NoSweep)
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    ctx: &Ctx,
    in_subset: &[bool],
    inserted: &mut [bool],
    frontier: &mut Vec<StrandEnd>,
    events: &mut Vec<Event>,
    remaining: usize,
    target: &[StrandEnd],
    right_to_left: bool,
    steps: &mut usize,
) -> bool {
    if remaining == 0 {
        return frontier.as_slice() == target;
    }
    if *steps >= SEARCH_CAP {
        return false;
    }
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for v in 0..ctx.d.vertices.len() {
        if !in_subset[v] || inserted[v] {
            continue;
        }
        for rot in 0..ctx.d.vertices[v].degree() {
            candidates.push((v, rot));
        }
    }
    if right_to_left {
        candidates.reverse();
    }
    for (v, rot) in candidates {
        *steps += 1;
        let Some(ev) = try_insert(ctx, frontier, v, rot) else { continue };
        let saved = frontier.clone();
        apply_symbolic(ctx, frontier, &ev);
        inserted[v] = true;
        events.push(ev);
        if dfs(ctx, in_subset, inserted, frontier, events, remaining - 1, target, right_to_left, steps)
        {
            return true;
        }
        events.pop();
        inserted[v] = false;
        *frontier = saved;
    }
    false
}

/// Check whether vertex `v` can be inserted with rotation `rot`: reading
/// slots counter-clockwise from `rot`, the ends whose partners are
/// already open must come first, and those partners must occupy a
/// contiguous frontier block in the same left-to-right order.
fn try_insert(ctx: &Ctx, frontier: &[StrandEnd], v: usize, rot: usize) -> Option<Event> {
    let deg = ctx.d.vertices[v].degree();
    let mut closing = 0usize;
    let mut pos = frontier.len();
    for i in 0..deg {
        let slot = (rot + i) % deg;
        let end = ctx.end_at(v, slot);
        let partner = ctx.partner(end);
        // self-loop ends are handled after insertion, not as closings
        let open = ctx.d.segments[end.0].from.0 != v || ctx.d.segments[end.0].to.0 != v;
        let partner_pos = if open { frontier.iter().position(|&e| e == partner) } else { None };
        match partner_pos {
            Some(p) if i == closing => {
                if closing == 0 {
                    pos = p;
                } else if p != pos + i {
                    return None;
                }
                closing += 1;
            }
            Some(_) => return None, // closing end after a non-closing one
            None => {}
        }
    }
    if closing == 0 {
        pos = frontier.len();
    }
    Some(Event { vertex: v, closing, pos, rot })
}

/// Frontier update for an event: replace the closed block with the new
/// open ends (counter-clockwise slots read right to left), then cap any
/// adjacent pair of ends belonging to one segment.
fn apply_symbolic(ctx: &Ctx, frontier: &mut Vec<StrandEnd>, ev: &Event) {
    let deg = ctx.d.vertices[ev.vertex].degree();
    let mut block: Vec<StrandEnd> = Vec::with_capacity(deg - ev.closing);
    for i in (ev.closing..deg).rev() {
        let slot = (ev.rot + i) % deg;
        block.push(ctx.end_at(ev.vertex, slot));
    }
    frontier.splice(ev.pos..ev.pos + ev.closing, block);
    sweep_pending_caps(frontier, |_, _| {});
}

/// Remove adjacent same-segment pairs until none remain, reporting each
/// removal position and left end (leftmost first, restarting after each
/// removal).
fn sweep_pending_caps(frontier: &mut Vec<StrandEnd>, mut on_cap: impl FnMut(usize, StrandEnd)) {
    loop {
        let Some(q) = (0..frontier.len().saturating_sub(1))
            .find(|&q| frontier[q].0 == frontier[q + 1].0 && frontier[q].1 != frontier[q + 1].1)
        else {
            return;
        };
        on_cap(q, frontier[q]);
        frontier.drain(q..q + 2);
    }
}

/// Dense replay of a planned sweep.
fn evaluate(
    ctx: &Ctx,
    events: &[Event],
    target: &[StrandEnd],
) -> Result<MorphVec<LaurentPoly>, OracleError> {
    let mut state = Dense { dims: Vec::new(), data: vec![LaurentPoly::one()] };
    let mut frontier: Vec<StrandEnd> = Vec::new();
    for ev in events {
        let deg = ctx.d.vertices[ev.vertex].degree();
        let atom = build_atom(ctx, ev.vertex, (ev.rot + ev.closing) % deg)?;
        state.insert_block(ev.pos + ev.closing, &atom, WIDTH_CAP)?;
        // nested caps against the closed block, innermost first
        for i in 0..ev.closing {
            let q = ev.pos + ev.closing - 1 - i;
            let left = frontier[q];
            state.cap(q, ctx, ctx.label(left));
        }
        // mirror the frontier bookkeeping, capping pending self-loop pairs
        let mut block: Vec<StrandEnd> = Vec::with_capacity(deg - ev.closing);
        for i in (ev.closing..deg).rev() {
            block.push(ctx.end_at(ev.vertex, (ev.rot + i) % deg));
        }
        frontier.splice(ev.pos..ev.pos + ev.closing, block);
        sweep_pending_caps(&mut frontier, |q, left| state.cap(q, ctx, ctx.label(left)));
        debug_assert_eq!(state.dims.len(), frontier.len());
    }
    assert_eq!(frontier.as_slice(), target, "sweep replay diverged from plan");
    Ok(MorphVec::new(state.dims, vec![], state.data))
}

struct Dense {
    dims: Vec<usize>,
    data: Vec<LaurentPoly>,
}

impl Dense {
    /// `new[(α, t, γ)] = old[(α, γ)] · block[t]` with the block inserted
    /// at factor position `pos`.
    fn insert_block(&mut self, pos: usize, block: &Atom, cap: usize) -> Result<(), OracleError> {
        let new_len = self.data.len() * block.data.len();
        if new_len > cap {
            return Err(OracleError::WidthCap { len: new_len });
        }
        let a: usize = self.dims[..pos].iter().product();
        let c: usize = self.dims[pos..].iter().product();
        let m = block.data.len();
        let mut out = Vec::with_capacity(new_len);
        for alpha in 0..a {
            for t in 0..m {
                for gamma in 0..c {
                    out.push(self.data[alpha * c + gamma].checked_mul(&block.data[t]).unwrap());
                }
            }
        }
        let mut dims = Vec::with_capacity(self.dims.len() + block.dims.len());
        dims.extend_from_slice(&self.dims[..pos]);
        dims.extend_from_slice(&block.dims);
        dims.extend_from_slice(&self.dims[pos..]);
        self.dims = dims;
        self.data = out;
        Ok(())
    }

    /// Contract factors `pos, pos+1` with the evaluation row of the dual
    /// of `left_label`: `new[(α, γ)] = Σ_{x,y} d_{P*}[(x, y)] · old[(α, x, y, γ)]`.
    fn cap(&mut self, pos: usize, ctx: &Ctx, left_label: usize) {
        let row = ctx.cat.eval(ctx.cat.dual(left_label));
        let dl = self.dims[pos];
        let dr = self.dims[pos + 1];
        assert_eq!(row.col_dims, [dl, dr], "cap row shape");
        let a: usize = self.dims[..pos].iter().product();
        let c: usize = self.dims[pos + 2..].iter().product();
        let mut out = vec![LaurentPoly::zero(); a * c];
        for alpha in 0..a {
            for x in 0..dl {
                for y in 0..dr {
                    let weight = &row.data[x * dr + y];
                    if weight.is_zero() {
                        continue;
                    }
                    for gamma in 0..c {
                        let idx = ((alpha * dl + x) * dr + y) * c + gamma;
                        let term = self.data[idx].checked_mul(weight).unwrap();
                        let slot = &mut out[alpha * c + gamma];
                        *slot = slot.checked_add(&term).unwrap();
                    }
                }
            }
        }
        self.dims.drain(pos..pos + 2);
        self.data = out;
    }
}

struct Atom {
    dims: Vec<usize>,
    data: Vec<LaurentPoly>,
}

/// Dense atom for a vertex: a column over the vertex's ends with factor
/// order given by reading slots clockwise from `bullet - 1` (the reversal
/// of the counter-clockwise word starting at `bullet`).
fn build_atom(ctx: &Ctx, v: usize, bullet: usize) -> Result<Atom, OracleError> {
    match &ctx.d.vertices[v] {
        Vertex::Twist { sign, .. } => Ok(twist_atom(ctx, v, bullet, *sign)),
        Vertex::Crossing { .. } => Ok(crossing_atom(ctx, v, bullet)),
    }
}

/// Twist vertex: a cup with `θ^{±1}` composed onto the source-end factor.
fn twist_atom(ctx: &Ctx, v: usize, bullet: usize, sign: i8) -> Atom {
    let cat = ctx.cat;
    let ends: [StrandEnd; 2] = [ctx.end_at(v, (bullet + 1) % 2), ctx.end_at(v, bullet % 2)];
    let labels = [ctx.label(ends[0]), ctx.label(ends[1])];
    let cup = cat.coeval(labels[0]);
    let (d0, d1) = (cat.dim(labels[0]), cat.dim(labels[1]));
    assert_eq!(labels[1], cat.dual(labels[0]));
    // θ acts on the strand's source end (label = the plain colour)
    let (theta_on_first, theta_label) =
        if ends[0].1 { (true, labels[0]) } else { (false, labels[1]) };
    let theta =
        if sign > 0 { cat.twist(theta_label) } else { cat.twist_inv(theta_label) };
    let mut data = vec![LaurentPoly::zero(); d0 * d1];
    for x0 in 0..d0 {
        for x1 in 0..d1 {
            let mut acc = LaurentPoly::zero();
            if theta_on_first {
                for y in 0..d0 {
                    let t = theta.data[x0 * d0 + y].checked_mul(&cup.data[y * d1 + x1]).unwrap();
                    acc = acc.checked_add(&t).unwrap();
                }
            } else {
                for y in 0..d1 {
                    let t = theta.data[x1 * d1 + y].checked_mul(&cup.data[x0 * d1 + y]).unwrap();
                    acc = acc.checked_add(&t).unwrap();
                }
            }
            data[x0 * d1 + x1] = acc;
        }
    }
    Atom { dims: vec![d0, d1], data }
}

/// Crossing vertex: two cups with the braiding composed onto the two
/// inner factors. With factors `(t1,t2,t3,t4)` (clockwise word from
/// `bullet - 1`), `t1/t3` are one strand of the crossing and `t2/t4` the
/// other; `t1/t3` is the over-strand exactly when `bullet` is even
/// (over-strand ends sit at odd slots, and `t1` holds slot `bullet-1`).
fn crossing_atom(ctx: &Ctx, v: usize, bullet: usize) -> Atom {
    let cat = ctx.cat;
    let slots: [usize; 4] = std::array::from_fn(|j| (bullet + 4 - 1 - j) % 4);
    let ends: [StrandEnd; 4] = std::array::from_fn(|j| ctx.end_at(v, slots[j]));
    let l: [usize; 4] = std::array::from_fn(|j| ctx.label(ends[j]));
    assert_eq!(l[2], cat.dual(l[0]), "opposite slots carry dual labels");
    assert_eq!(l[3], cat.dual(l[1]));
    let cup1 = cat.coeval(l[0]); // 1 → t1 ⊗ t3'
    let cup2 = cat.coeval(l[1]); // 1 → t2' ⊗ t4
    // the t1/t3 strand crosses bottom-left → top-right in the middle;
    // positive stored braiding means that strand passes over
    let pair_a_over = bullet % 2 == 0;
    let braid = if pair_a_over {
        cat.braiding(l[2], l[1]) // c_{T3,T2}: T3⊗T2 → T2⊗T3
    } else {
        cat.braiding_inv(l[1], l[2]) // (c_{T2,T3})^{-1}: T3⊗T2 → T2⊗T3
    };
    let dims: [usize; 4] = std::array::from_fn(|j| cat.dim(l[j]));
    let (d1, d2, d3, d4) = (dims[0], dims[1], dims[2], dims[3]);
    assert_eq!(braid.row_dims, [d2, d3]);
    assert_eq!(braid.col_dims, [d3, d2]);
    let mut data = vec![LaurentPoly::zero(); d1 * d2 * d3 * d4];
    for x1 in 0..d1 {
        for x2 in 0..d2 {
            for x3 in 0..d3 {
                for x4 in 0..d4 {
                    let mut acc = LaurentPoly::zero();
                    for y3 in 0..d3 {
                        let c1 = &cup1.data[x1 * d3 + y3];
                        if c1.is_zero() {
                            continue;
                        }
                        for y2 in 0..d2 {
                            let b = braid.at(x2 * d3 + x3, y3 * d2 + y2);
                            if b.is_zero() {
                                continue;
                            }
                            let c2 = &cup2.data[y2 * d4 + x4];
                            let term = b.checked_mul(c1).unwrap().checked_mul(c2).unwrap();
                            acc = acc.checked_add(&term).unwrap();
                        }
                    }
                    data[((x1 * d2 + x2) * d3 + x3) * d4 + x4] = acc;
                }
            }
        }
    }
    Atom { dims: dims.to_vec(), data }
}
