//! PD text grammar.
//!
//! Whitespace-separated tokens `X[a,b,c,d]` (crossing, arcs listed
//! counter-clockwise from the incoming under-strand) and `T[s,a]` (a twist
//! mark of sign `s` on arc `a`), plus optional header lines
//! `component i color NAME` and `framing i k`. A `framing i k` header
//! expands to `|k|` twist marks of sign `k` on component `i`.
//!
//! Orientation is inferred from arc-label succession: within a component
//! the labels, sorted ascending, follow each other cyclically along the
//! strand direction, and every crossing is entered at its incoming
//! under-slot. The reading satisfying both rules is chosen (forward
//! preferred when both work); if neither works the input is rejected.

use super::{Component, DiagramError, LinkDiagram, Segment, Vertex};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Default)]
struct RawInput {
    crossings: Vec<[u32; 4]>,
    twists: Vec<(i8, u32)>,
    colors: Vec<(usize, String)>,
    framings: Vec<(usize, i64)>,
}

pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    build(tokenize(text)?)
}

/// Canonical text form; `parse_pd(render(d))` reproduces `d`.
pub fn render(d: &LinkDiagram) -> String {
    render_transformed(d, false)
}

fn tokenize(text: &str) -> Result<RawInput, DiagramError> {
    let mut raw = RawInput::default();
    for (idx, full_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = full_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: String| DiagramError::Parse { line: line_no, msg };
        match words[0] {
            "component" => {
                if words.len() != 4 || words[2] != "color" {
                    return Err(err("expected `component i color NAME`".into()));
                }
                let i: usize = words[1]
                    .parse()
                    .map_err(|_| err(format!("bad component index {:?}", words[1])))?;
                raw.colors.push((i, words[3].to_string()));
            }
            "framing" => {
                if words.len() != 3 {
                    return Err(err("expected `framing i k`".into()));
                }
                let i: usize = words[1]
                    .parse()
                    .map_err(|_| err(format!("bad component index {:?}", words[1])))?;
                let k: i64 = words[2]
                    .parse()
                    .map_err(|_| err(format!("bad framing {:?}", words[2])))?;
                raw.framings.push((i, k));
            }
            _ => {
                for w in words {
                    parse_token(w, line_no, &mut raw)?;
                }
            }
        }
    }
    Ok(raw)
}

fn parse_token(w: &str, line: usize, raw: &mut RawInput) -> Result<(), DiagramError> {
    let err = |msg: String| DiagramError::Parse { line, msg };
    let label = |s: &str| -> Result<u32, DiagramError> {
        let v: u32 = s
            .trim()
            .parse()
            .map_err(|_| err(format!("bad arc label {s:?}")))?;
        if v == 0 {
            return Err(err("arc labels start at 1".into()));
        }
        Ok(v)
    };
    if let Some(inner) = w.strip_prefix("X[").and_then(|r| r.strip_suffix(']')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 4 {
            return Err(err(format!("crossing token {w:?} needs four arcs")));
        }
        let mut arcs = [0u32; 4];
        for (i, p) in parts.iter().enumerate() {
            arcs[i] = label(p)?;
        }
        raw.crossings.push(arcs);
        Ok(())
    } else if let Some(inner) = w.strip_prefix("T[").and_then(|r| r.strip_suffix(']')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(err(format!("twist token {w:?} needs a sign and an arc")));
        }
        let sign = match parts[0].trim() {
            "+" => 1i8,
            "-" => -1i8,
            other => return Err(err(format!("twist sign must be + or -, got {other:?}"))),
        };
        raw.twists.push((sign, label(parts[1])?));
        Ok(())
    } else {
        Err(err(format!("unrecognised token {w:?}")))
    }
}

type Incidence = (usize, usize); // (crossing, slot)

#[derive(Clone, Copy)]
struct Directed {
    src: Incidence,
    dst: Incidence,
}

fn build(mut raw: RawInput) -> Result<LinkDiagram, DiagramError> {
    // incidences of each label at crossings, in (crossing, slot) order
    let mut cross_inc: BTreeMap<u32, Vec<Incidence>> = BTreeMap::new();
    for (ci, x) in raw.crossings.iter().enumerate() {
        for (s, &lbl) in x.iter().enumerate() {
            cross_inc.entry(lbl).or_default().push((ci, s));
        }
    }
    let twist_count_of = |twists: &[(i8, u32)], lbl: u32| twists.iter().filter(|t| t.1 == lbl).count();
    for (&lbl, incs) in &cross_inc {
        if incs.len() != 2 {
            return Err(DiagramError::ArcUsage {
                label: lbl,
                crossing_ends: incs.len(),
                twist_marks: twist_count_of(&raw.twists, lbl),
            });
        }
    }

    // orient each component of the crossing graph
    let mut directed: BTreeMap<u32, Directed> = BTreeMap::new();
    let mut cycles: Vec<Vec<u32>> = Vec::new();
    let mut visited: BTreeSet<u32> = BTreeSet::new();
    for (&start, incs) in &cross_inc {
        if visited.contains(&start) {
            continue;
        }
        let start_entry = *incs.iter().min().unwrap();
        let mut walk: Vec<(u32, Incidence)> = Vec::new();
        let mut cur = (start, start_entry);
        loop {
            walk.push(cur);
            visited.insert(cur.0);
            let (c, s) = cur.1;
            let partner = (c, (s + 2) % 4);
            let nxt = raw.crossings[c][partner.1];
            let nxt_incs = &cross_inc[&nxt];
            let entry = if nxt_incs[0] == partner { nxt_incs[1] } else { nxt_incs[0] };
            cur = (nxt, entry);
            if cur == (start, start_entry) {
                break;
            }
        }

        let other = |lbl: u32, inc: Incidence| {
            let incs = &cross_inc[&lbl];
            if incs[0] == inc {
                incs[1]
            } else {
                incs[0]
            }
        };
        let forward: Vec<(u32, Directed)> = walk
            .iter()
            .map(|&(lbl, entry)| (lbl, Directed { src: other(lbl, entry), dst: entry }))
            .collect();
        let backward: Vec<(u32, Directed)> = walk
            .iter()
            .rev()
            .map(|&(lbl, entry)| (lbl, Directed { src: entry, dst: other(lbl, entry) }))
            .collect();

        let mut sorted: Vec<u32> = walk.iter().map(|w| w.0).collect();
        sorted.sort_unstable();
        let succ = |x: u32| {
            let i = sorted.binary_search(&x).unwrap();
            sorted[(i + 1) % sorted.len()]
        };
        let valid = |assign: &[(u32, Directed)]| {
            assign.iter().all(|&(_, d)| d.dst.1 != 2 && d.src.1 != 0)
                && (0..assign.len()).all(|t| succ(assign[t].0) == assign[(t + 1) % assign.len()].0)
        };

        let chosen = if valid(&forward) {
            forward
        } else if valid(&backward) {
            backward
        } else {
            return Err(DiagramError::Orientation { label: sorted[0] });
        };
        let first = chosen
            .iter()
            .position(|&(lbl, _)| lbl == sorted[0])
            .unwrap();
        let mut cycle = Vec::with_capacity(chosen.len());
        for t in 0..chosen.len() {
            let (lbl, d) = chosen[(first + t) % chosen.len()];
            cycle.push(lbl);
            directed.insert(lbl, d);
        }
        cycles.push(cycle);
    }

    // twist-only loops: arcs never meeting a crossing
    let twist_labels: BTreeSet<u32> = raw.twists.iter().map(|t| t.1).collect();
    for &lbl in &twist_labels {
        if !cross_inc.contains_key(&lbl) {
            cycles.push(vec![lbl]);
        }
    }
    cycles.sort_by_key(|c| *c.iter().min().unwrap());

    // headers
    let mut colors: Vec<Option<String>> = vec![None; cycles.len()];
    for (i, name) in &raw.colors {
        if *i == 0 || *i > cycles.len() {
            return Err(DiagramError::UnknownComponent(*i));
        }
        colors[*i - 1] = Some(name.clone());
    }
    for &(i, k) in &raw.framings {
        if i == 0 || i > cycles.len() {
            return Err(DiagramError::UnknownComponent(i));
        }
        let lbl = *cycles[i - 1].iter().min().unwrap();
        let sign = if k >= 0 { 1i8 } else { -1i8 };
        for _ in 0..k.unsigned_abs() {
            raw.twists.push((sign, lbl));
        }
    }

    // twist marks per label, in file order
    let mut marks: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (ti, &(_, lbl)) in raw.twists.iter().enumerate() {
        marks.entry(lbl).or_default().push(ti);
    }
    for (&lbl, ms) in &marks {
        if !cross_inc.contains_key(&lbl) && ms.is_empty() {
            unreachable!();
        }
    }

    // vertices: crossings first (file order), then twist marks (file order)
    let ncross = raw.crossings.len();
    let mut vertices: Vec<Vertex> = Vec::with_capacity(ncross + raw.twists.len());
    for (c, x) in raw.crossings.iter().enumerate() {
        let over_in = directed[&x[3]].dst == (c, 3);
        vertices.push(Vertex::Crossing {
            sign: if over_in { 1 } else { -1 },
            slots: [usize::MAX; 4],
        });
    }
    for &(sign, _) in &raw.twists {
        vertices.push(Vertex::Twist { sign, slots: [usize::MAX; 2] });
    }

    let mut segments: Vec<Segment> = Vec::new();
    let mut components: Vec<Component> = Vec::new();
    let empty = Vec::new();
    for (comp_idx, cycle) in cycles.iter().enumerate() {
        let mut comp = Component { color: colors[comp_idx].take(), segments: Vec::new() };
        for &lbl in cycle {
            let ms = marks.get(&lbl).unwrap_or(&empty);
            // endpoints along the strand direction, as (vertex, slot)
            let mut points: Vec<(usize, usize)> = Vec::with_capacity(ms.len() * 2 + 2);
            if let Some(d) = directed.get(&lbl) {
                points.push(d.src);
                for &ti in ms {
                    points.push((ncross + ti, 0));
                    points.push((ncross + ti, 1));
                }
                points.push(d.dst);
            } else {
                // a twist-only loop: chain the marks cyclically
                for &ti in ms {
                    points.push((ncross + ti, 0));
                    points.push((ncross + ti, 1));
                }
                points.rotate_left(1); // start at the first mark's outgoing slot
            }
            for (part, pair) in points.chunks(2).enumerate() {
                let id = segments.len();
                segments.push(Segment {
                    label: lbl,
                    part,
                    from: pair[0],
                    to: pair[1],
                    component: comp_idx,
                });
                comp.segments.push(id);
                for &(v, slot) in pair {
                    match &mut vertices[v] {
                        Vertex::Crossing { slots, .. } => slots[slot] = id,
                        Vertex::Twist { slots, .. } => slots[slot] = id,
                    }
                }
            }
        }
        components.push(comp);
    }

    debug_assert!(vertices.iter().all(|v| v.slots().iter().all(|&s| s != usize::MAX)));
    Ok(LinkDiagram { vertices, segments, components })
}

/// Shared token emitter; `mirror` switches every crossing (re-rotating the
/// token to start at the old incoming over-strand) and flips twist signs.
pub(super) fn render_transformed(d: &LinkDiagram, mirror: bool) -> String {
    let mut out = String::new();
    for (i, comp) in d.components.iter().enumerate() {
        if let Some(c) = &comp.color {
            out.push_str(&format!("component {} color {}\n", i + 1, c));
        }
    }
    let toks = vertex_tokens(d, mirror, None);
    if !toks.is_empty() {
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

fn vertex_tokens(d: &LinkDiagram, mirror: bool, keep: Option<&BTreeSet<usize>>) -> Vec<String> {
    let mut toks = Vec::new();
    for (vid, v) in d.vertices.iter().enumerate() {
        if let Some(set) = keep {
            if !set.contains(&vid) {
                continue;
            }
        }
        match v {
            Vertex::Crossing { sign, slots } => {
                let l = |s: usize| d.segments[slots[s]].label;
                let rot: [usize; 4] = if !mirror {
                    [0, 1, 2, 3]
                } else if *sign > 0 {
                    [3, 0, 1, 2]
                } else {
                    [1, 2, 3, 0]
                };
                toks.push(format!("X[{},{},{},{}]", l(rot[0]), l(rot[1]), l(rot[2]), l(rot[3])));
            }
            Vertex::Twist { sign, slots } => {
                let s = if (*sign > 0) != mirror { '+' } else { '-' };
                toks.push(format!("T[{},{}]", s, d.segments[slots[0]].label));
            }
        }
    }
    toks
}

/// Tokens for a subset of vertices (used to split connected pieces); the
/// subset must be a union of connected pieces.
pub(super) fn render_subset(d: &LinkDiagram, keep: &[usize]) -> String {
    let set: BTreeSet<usize> = keep.iter().copied().collect();
    let mut out = String::new();
    let mut new_idx = 0usize;
    for comp in &d.components {
        let v0 = d.segments[comp.segments[0]].from.0;
        if !set.contains(&v0) {
            continue;
        }
        new_idx += 1;
        if let Some(c) = &comp.color {
            out.push_str(&format!("component {new_idx} color {c}\n"));
        }
    }
    let toks = vertex_tokens(d, false, Some(&set));
    if !toks.is_empty() {
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

/// Re-render with a cancelling `T[+] T[-]` pair appended on each listed arc.
pub(super) fn render_with_extra_twists(d: &LinkDiagram, labels: &[u32]) -> String {
    let mut out = render_transformed(d, false);
    let extra: Vec<String> = labels
        .iter()
        .map(|l| format!("T[+,{l}] T[-,{l}]"))
        .collect();
    if !extra.is_empty() {
        out.push_str(&extra.join(" "));
        out.push('\n');
    }
    out
}
