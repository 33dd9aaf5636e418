//! Kauffman bracket by direct state sum.
//!
//! Each of the `2^n` smoothing states resolves every crossing either the
//! `A` way (joining the incoming under-strand slot to its counter-clockwise
//! neighbour) or the `B` way (joining it to its clockwise neighbour); the
//! state contributes `A^(#A - #B) * delta^(loops - 1)` where
//! `delta = -A^2 - A^-2`. Twist marks multiply the whole sum by
//! `(-A^3)^(sign)` each, giving the framed bracket.

use crate::diagram::{LinkDiagram, Vertex};
use crate::ring::LaurentPoly;
use num_bigint::BigInt;

/// The loop value `delta = -A^2 - A^-2`.
pub fn loop_value() -> LaurentPoly {
    LaurentPoly::from_terms(Some("A"), [(2i64, BigInt::from(-1)), (-2, BigInt::from(-1))])
}

/// Framed bracket normalised so a 0-framed unknot evaluates to 1.
pub fn kauffman_bracket(d: &LinkDiagram) -> LaurentPoly {
    bracket(d, -1)
}

/// Framed bracket with every state loop counted: a 0-framed unknot gives
/// `delta`. This matches a full closed-diagram contraction.
pub fn kauffman_closed(d: &LinkDiagram) -> LaurentPoly {
    bracket(d, 0)
}

fn bracket(d: &LinkDiagram, loop_offset: i64) -> LaurentPoly {
    let crossings: Vec<&Vertex> = d
        .vertices
        .iter()
        .filter(|v| matches!(v, Vertex::Crossing { .. }))
        .collect();
    let n = crossings.len();
    assert!(n <= 22, "state sum over {n} crossings is too large");

    // node ids per vertex slot
    let mut base = vec![0usize; d.vertices.len()];
    let mut nodes = 0usize;
    for (i, v) in d.vertices.iter().enumerate() {
        base[i] = nodes;
        nodes += v.degree();
    }

    // unions independent of the state: segments, and twist pass-throughs
    let mut fixed = UnionFind::new(nodes);
    for s in &d.segments {
        fixed.union(base[s.from.0] + s.from.1, base[s.to.0] + s.to.1);
    }
    let mut twist_sign_sum = 0i64;
    for (i, v) in d.vertices.iter().enumerate() {
        if let Vertex::Twist { sign, .. } = v {
            fixed.union(base[i], base[i] + 1);
            twist_sign_sum += *sign as i64;
        }
    }
    let cross_ids: Vec<usize> = d
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| matches!(v, Vertex::Crossing { .. }))
        .map(|(i, _)| i)
        .collect();

    let delta = loop_value();
    let mut delta_pows: Vec<LaurentPoly> = vec![LaurentPoly::one()];
    let mut sum = LaurentPoly::zero();
    for state in 0u64..(1u64 << n) {
        let mut uf = fixed.clone();
        for (j, &v) in cross_ids.iter().enumerate() {
            let b = base[v];
            if state >> j & 1 == 0 {
                uf.union(b, b + 1);
                uf.union(b + 2, b + 3);
            } else {
                uf.union(b, b + 3);
                uf.union(b + 1, b + 2);
            }
        }
        let loops = uf.roots() as i64;
        let a_count = (n as u32 - state.count_ones()) as i64;
        let exponent = a_count - (state.count_ones() as i64);
        let power = loops + loop_offset;
        assert!(power >= 0, "bracket of an empty diagram is not normalisable");
        while delta_pows.len() <= power as usize {
            let last = delta_pows.last().unwrap().clone();
            delta_pows.push(last.checked_mul(&delta).unwrap());
        }
        let term = delta_pows[power as usize].shifted(exponent);
        sum = sum.checked_add(&term).unwrap();
    }

    // framing curls: each twist mark contributes (-A^3)^sign
    let curl = LaurentPoly::monomial("A", BigInt::from(-1), 3);
    let mut factor = LaurentPoly::one();
    let inv_curl = LaurentPoly::monomial("A", BigInt::from(-1), -3);
    for _ in 0..twist_sign_sum.abs() {
        let f = if twist_sign_sum > 0 { &curl } else { &inv_curl };
        factor = factor.checked_mul(f).unwrap();
    }
    sum.checked_mul(&factor).unwrap()
}

#[derive(Clone)]
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn roots(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}
