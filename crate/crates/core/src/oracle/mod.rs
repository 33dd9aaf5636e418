//! Brute-force reference evaluators.
//!
//! Everything here trades speed for obviousness: exponential state sums and
//! dense slice products with no shared code paths with the contraction
//! engine, so the two sides can check each other.

mod kauffman;
mod morse;

pub use kauffman::{kauffman_bracket, kauffman_closed, loop_value};
pub use morse::{morse_evaluate, morse_evaluate_directed, morse_open, StrandEnd};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("dense sweep state would reach {len} entries, over the width cap")]
    WidthCap { len: usize },
    #[error("no planar sweep found for the requested vertices and boundary")]
    NoSweep,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::builtin;
    use crate::diagram::parse_pd;

    fn diagrams() -> Vec<(&'static str, &'static str)> {
        vec![
            ("twist pair unknot", "T[+,1] T[-,1]"),
            ("positive kink", "X[1,1,2,2]"),
            ("single positive twist", "T[+,1]"),
            ("hopf", "X[1,4,2,3] X[3,2,4,1]"),
            ("left trefoil", "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"),
            ("figure eight", "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]"),
            ("trefoil plus kink", "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3] T[+,5]"),
            ("split union", "X[1,1,2,2] X[3,3,4,4]"),
        ]
    }

    #[test]
    fn trivial_category_gives_one() {
        let cat = builtin("trivial").unwrap();
        for (name, text) in diagrams() {
            let d = parse_pd(text).unwrap();
            let colouring = vec![0; d.components.len()];
            let got = morse_evaluate(&d, &cat, &colouring).unwrap();
            assert!(got.is_one(), "{name}: expected 1");
        }
    }

    #[test]
    fn sl2_sweep_matches_state_sum() {
        let cat = builtin("sl2").unwrap();
        for (name, text) in diagrams() {
            let d = parse_pd(text).unwrap();
            let colouring = vec![0; d.components.len()];
            let got = morse_evaluate(&d, &cat, &colouring).unwrap();
            let expected = kauffman_closed(&d);
            assert_eq!(got, expected, "{name}");
        }
    }

    #[test]
    fn sweep_direction_is_irrelevant() {
        let cat = builtin("sl2").unwrap();
        for (name, text) in diagrams() {
            let d = parse_pd(text).unwrap();
            let colouring = vec![0; d.components.len()];
            let lr = morse_evaluate_directed(&d, &cat, &colouring, false).unwrap();
            let rl = morse_evaluate_directed(&d, &cat, &colouring, true).unwrap();
            assert_eq!(lr, rl, "{name}");
        }
    }

    #[test]
    fn unknot_gives_loop_scalar() {
        let cat = builtin("sl2").unwrap();
        let d = parse_pd("T[+,1] T[-,1]").unwrap();
        let got = morse_evaluate(&d, &cat, &[0]).unwrap();
        assert_eq!(got, cat.quantum_dim(0));
        assert_eq!(got, loop_value());
    }

    #[test]
    fn open_sweep_of_one_crossing_is_its_atom() {
        // sweep only the first trefoil crossing; the boundary is its four
        // ends, so the result must be a rank-4 column
        let cat = builtin("sl2").unwrap();
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let verts = [0usize];
        // slots clockwise from 3: reversed counter-clockwise word at bullet 0
        let target: Vec<StrandEnd> =
            (0..4).rev().map(|s| d.segment_at(0, s)).collect();
        let got = morse_open(&d, &cat, &[0], &verts, &target).unwrap();
        assert_eq!(got.row_dims, vec![2, 2, 2, 2]);
        // closing the same column against the remaining two crossings must
        // reproduce the closed value, which the previous tests pin down
        assert!(got.data.iter().any(|p| !p.is_zero()));
    }

    #[test]
    fn mirror_image_swaps_variable_inverse() {
        let cat = builtin("sl2").unwrap();
        for (name, text) in
            [("left trefoil", "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"), ("kink", "X[1,1,2,2]")]
        {
            let d = parse_pd(text).unwrap();
            let m = d.mirror();
            let colouring = vec![0; d.components.len()];
            let a = morse_evaluate(&d, &cat, &colouring).unwrap();
            let b = morse_evaluate(&m, &cat, &colouring).unwrap();
            assert_eq!(a.exponent_scaled(-1), b, "{name}");
        }
    }
}
