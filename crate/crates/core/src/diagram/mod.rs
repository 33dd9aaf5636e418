//! Oriented framed link diagrams from PD codes.
//!
//! A diagram is a 4-valent planar multigraph: crossings (degree 4) and
//! twist marks (degree 2) joined by strand segments. Crossing slots are
//! numbered 0..4 counter-clockwise starting at the incoming under-strand;
//! twist slots are 0 = incoming, 1 = outgoing. Strand orientation is
//! inferred from arc-label succession, and every segment is directed
//! along its strand.

mod parse;

pub use parse::{parse_pd, render};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("arc {label} is used {crossing_ends} times at crossings and {twist_marks} times in twist tokens")]
    ArcUsage { label: u32, crossing_ends: usize, twist_marks: usize },
    #[error("component containing arc {label} has no consistent orientation")]
    Orientation { label: u32 },
    #[error("non-planar or inconsistent rotation system: component has V={v}, E={e}, F={f}")]
    NonPlanar { v: usize, e: usize, f: usize },
    #[error("unknown component index {0} in header")]
    UnknownComponent(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vertex {
    /// Slots counter-clockwise from the incoming under-strand.
    Crossing { sign: i8, slots: [usize; 4] },
    /// slots[0] incoming, slots[1] outgoing.
    Twist { sign: i8, slots: [usize; 2] },
}

impl Vertex {
    pub fn degree(&self) -> usize {
        match self {
            Vertex::Crossing { .. } => 4,
            Vertex::Twist { .. } => 2,
        }
    }

    pub fn slots(&self) -> &[usize] {
        match self {
            Vertex::Crossing { slots, .. } => slots,
            Vertex::Twist { slots, .. } => slots,
        }
    }

    pub fn sign(&self) -> i8 {
        match self {
            Vertex::Crossing { sign, .. } | Vertex::Twist { sign, .. } => *sign,
        }
    }
}

/// A directed strand segment between two vertex slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    /// Original PD arc label (twist marks subdivide arcs, so several
    /// segments may share a label).
    pub label: u32,
    /// Position of this segment among those sharing the label, along the
    /// strand direction.
    pub part: usize,
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub component: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Component {
    pub color: Option<String>,
    /// Segment ids in strand order.
    pub segments: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct LinkDiagram {
    pub vertices: Vec<Vertex>,
    pub segments: Vec<Segment>,
    pub components: Vec<Component>,
}

impl LinkDiagram {
    pub fn crossing_count(&self) -> usize {
        self.vertices.iter().filter(|v| matches!(v, Vertex::Crossing { .. })).count()
    }

    pub fn twist_count(&self) -> usize {
        self.vertices.iter().filter(|v| matches!(v, Vertex::Twist { .. })).count()
    }

    /// Sum of crossing signs plus twist signs.
    pub fn writhe(&self) -> i64 {
        self.vertices.iter().map(|v| v.sign() as i64).sum()
    }

    /// Segment leaving `vertex` at `slot`, with `true` when it points away
    /// from the vertex.
    pub fn segment_at(&self, vertex: usize, slot: usize) -> (usize, bool) {
        let seg = self.vertices[vertex].slots()[slot];
        let s = &self.segments[seg];
        if s.from == (vertex, slot) {
            (seg, true)
        } else {
            debug_assert_eq!(s.to, (vertex, slot));
            (seg, false)
        }
    }

    /// Face count of the embedding, computed from the rotation system by
    /// tracing half-edge orbits. Returns faces per connected piece of the
    /// underlying graph together with that piece's vertex/edge counts.
    fn euler_pieces(&self) -> Vec<(usize, usize, usize)> {
        let n = self.vertices.len();
        // connected pieces of the graph
        let mut piece = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if piece[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            piece[start] = count;
            while let Some(v) = stack.pop() {
                for &seg in self.vertices[v].slots() {
                    let s = &self.segments[seg];
                    for w in [s.from.0, s.to.0] {
                        if piece[w] == usize::MAX {
                            piece[w] = count;
                            stack.push(w);
                        }
                    }
                }
            }
            count += 1;
        }

        // face tracing: half-edge = (segment, forward?); the next half-edge
        // around a face leaves from the slot clockwise-adjacent to the
        // arrival slot.
        let mut faces = vec![0usize; count];
        let mut seen = vec![[false; 2]; self.segments.len()];
        for seg in 0..self.segments.len() {
            for dir in 0..2 {
                if seen[seg][dir] {
                    continue;
                }
                let mut cur = (seg, dir);
                while !seen[cur.0][cur.1] {
                    seen[cur.0][cur.1] = true;
                    let s = &self.segments[cur.0];
                    let (v, slot) = if cur.1 == 0 { s.to } else { s.from };
                    let deg = self.vertices[v].degree();
                    let next_slot = (slot + deg - 1) % deg;
                    let (next_seg, forward) = self.segment_at(v, next_slot);
                    cur = (next_seg, if forward { 0 } else { 1 });
                }
                faces[piece[self.segments[seg].from.0]] += 1;
            }
        }

        let mut vcount = vec![0usize; count];
        let mut ecount = vec![0usize; count];
        for v in 0..n {
            vcount[piece[v]] += 1;
        }
        for s in &self.segments {
            ecount[piece[s.from.0]] += 1;
        }
        (0..count).map(|p| (vcount[p], ecount[p], faces[p])).collect()
    }

    /// Check that the rotation system embeds each connected piece in the
    /// sphere (V - E + F = 2) and return the total face count.
    pub fn validate(&self) -> Result<usize, DiagramError> {
        let mut total = 0;
        for (v, e, f) in self.euler_pieces() {
            if v + f != e + 2 {
                return Err(DiagramError::NonPlanar { v, e, f });
            }
            total += f;
        }
        Ok(total)
    }

    /// Switch every crossing (over becomes under) while keeping the planar
    /// rotation system; twist signs flip. The writhe negates.
    pub fn mirror(&self) -> LinkDiagram {
        let text = render_mirrored(self);
        parse_pd(&text).expect("mirror of a valid diagram is valid")
    }

    /// Connected pieces of the diagram graph as standalone diagrams.
    pub fn split_components(&self) -> Vec<LinkDiagram> {
        if self.vertices.is_empty() {
            return vec![];
        }
        let n = self.vertices.len();
        let mut piece = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if piece[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            piece[start] = count;
            while let Some(v) = stack.pop() {
                for &seg in self.vertices[v].slots() {
                    let s = &self.segments[seg];
                    for w in [s.from.0, s.to.0] {
                        if piece[w] == usize::MAX {
                            piece[w] = count;
                            stack.push(w);
                        }
                    }
                }
            }
            count += 1;
        }
        if count == 1 {
            return vec![self.clone()];
        }
        (0..count)
            .map(|p| {
                let keep: Vec<usize> = (0..n).filter(|&v| piece[v] == p).collect();
                let text = parse::render_subset(self, &keep);
                parse_pd(&text).expect("connected piece of a valid diagram is valid")
            })
            .collect()
    }

    /// Insert a cancelling positive/negative twist pair on every arc that
    /// carries a self-loop segment, so that no segment joins a vertex to
    /// itself. Single-crossing kinks and twist-only loops become honest
    /// multi-leaf diagrams; the invariant is unchanged.
    pub fn broken_self_loops(&self) -> LinkDiagram {
        let mut loop_labels: Vec<u32> = self
            .segments
            .iter()
            .filter(|s| s.from.0 == s.to.0)
            .map(|s| s.label)
            .collect();
        loop_labels.sort_unstable();
        loop_labels.dedup();
        if loop_labels.is_empty() {
            return self.clone();
        }
        let text = parse::render_with_extra_twists(self, &loop_labels);
        let out = parse_pd(&text).expect("twist insertion preserves validity");
        debug_assert!(out.segments.iter().all(|s| s.from.0 != s.to.0));
        out
    }

    /// Colour every component, by name.
    pub fn with_colors(&self, colors: &[Option<String>]) -> LinkDiagram {
        let mut out = self.clone();
        for (i, c) in colors.iter().enumerate() {
            if i < out.components.len() {
                out.components[i].color = c.clone();
            }
        }
        out
    }
}

fn render_mirrored(d: &LinkDiagram) -> String {
    parse::render_transformed(d, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEFT_TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";

    #[test]
    fn hopf_link_shape() {
        let d = parse_pd("X[1,4,2,3] X[3,2,4,1]").unwrap();
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.segments.len(), 4);
        assert_eq!(d.components.len(), 2);
        assert_eq!(d.validate().unwrap(), 4); // V=2, E=4, F=4
    }

    #[test]
    fn twist_pair_unknot() {
        let d = parse_pd("T[+,1] T[-,1]").unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.twist_count(), 2);
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.writhe(), 0);
        d.validate().unwrap();
    }

    #[test]
    fn single_kink_is_valid() {
        let d = parse_pd("X[1,1,2,2]").unwrap();
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.crossing_count(), 1);
        assert_eq!(d.validate().unwrap(), 3); // V=1, E=2, F=3
        assert_eq!(d.writhe(), 1);
    }

    #[test]
    fn left_trefoil_writhe() {
        let d = parse_pd(LEFT_TREFOIL).unwrap();
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.writhe(), -3);
        assert_eq!(d.validate().unwrap(), 5); // V=3, E=6, F=5
    }

    #[test]
    fn mirror_negates_writhe() {
        for text in [LEFT_TREFOIL, "X[1,4,2,3] X[3,2,4,1]", "X[1,1,2,2]", "T[+,1] X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"] {
            let d = parse_pd(text).unwrap();
            let m = d.mirror();
            assert_eq!(m.writhe(), -d.writhe(), "mirror writhe for {text}");
            m.validate().unwrap();
            assert_eq!(m.mirror().writhe(), d.writhe());
        }
    }

    #[test]
    fn scrambled_rotation_rejected() {
        // swap the over arcs of one trefoil crossing: the strand data still
        // orients, but the rotation system no longer embeds in the sphere
        let bad = parse_pd("X[1,5,2,4] X[3,6,4,1] X[5,2,6,3]");
        match bad {
            Ok(d) => assert!(d.validate().is_err()),
            Err(_) => {} // rejected even earlier
        }
    }

    #[test]
    fn arc_usage_errors() {
        assert!(matches!(
            parse_pd("X[1,2,3,4]"),
            Err(DiagramError::ArcUsage { .. })
        ));
        assert!(parse_pd("X[1,4,2,3] X[3,2,4,1] T[*,1]").is_err());
    }

    #[test]
    fn split_and_rejoin() {
        let d = parse_pd("X[1,4,2,3] X[3,2,4,1] X[5,8,6,9] X[7,10,8,5] X[9,6,10,7]").unwrap();
        let parts = d.split_components();
        assert_eq!(parts.len(), 2);
        let sizes: Vec<usize> = parts.iter().map(|p| p.crossing_count()).collect();
        assert!(sizes.contains(&2) && sizes.contains(&3));
        for p in &parts {
            p.validate().unwrap();
        }
        let connected = parse_pd(LEFT_TREFOIL).unwrap();
        assert_eq!(connected.split_components().len(), 1);
    }

    #[test]
    fn self_loop_breaking() {
        let d = parse_pd("X[1,1,2,2]").unwrap();
        let b = d.broken_self_loops();
        assert_eq!(b.crossing_count(), 1);
        assert_eq!(b.twist_count(), 4); // a cancelling pair on each kink arc
        assert_eq!(b.writhe(), d.writhe());
        b.validate().unwrap();
        assert!(b.segments.iter().all(|s| s.from.0 != s.to.0));

        let loop_twist = parse_pd("T[+,1]").unwrap();
        let lb = loop_twist.broken_self_loops();
        assert_eq!(lb.twist_count(), 3);
        assert_eq!(lb.writhe(), 1);
    }

    #[test]
    fn headers_assign_colors_and_framing() {
        let d = parse_pd("component 1 color V\nframing 1 2\nX[1,4,2,3] X[3,2,4,1]").unwrap();
        assert_eq!(d.components[0].color.as_deref(), Some("V"));
        assert_eq!(d.components[1].color, None);
        assert_eq!(d.twist_count(), 2);
        assert_eq!(d.writhe(), -2 + 2);
    }

    #[test]
    fn render_round_trip() {
        for text in [
            LEFT_TREFOIL,
            "X[1,4,2,3] X[3,2,4,1]",
            "T[+,1] T[-,1]",
            "component 1 color V\nX[1,1,2,2]",
        ] {
            let d = parse_pd(text).unwrap();
            let r = render(&d);
            let d2 = parse_pd(&r).unwrap();
            assert_eq!(render(&d2), r, "round trip for {text}");
            assert_eq!(d2.writhe(), d.writhe());
            assert_eq!(d2.components.len(), d.components.len());
        }
    }
}
