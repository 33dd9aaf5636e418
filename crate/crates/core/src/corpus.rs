//! Reference diagrams: named small links, the two-strand torus family,
//! a braid-closure PD generator, Reidemeister move pairs, and seeded
//! random braid closures. Everything here emits PD text for the diagram
//! parser; labels are assigned by walking each strand, so they are
//! automatically monotone along every component.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Crossing-free unknot carrying a cancelling pair of framing marks.
pub const TWIST_PAIR_UNKNOT: &str = "T[+,1] T[-,1]";
/// Circle with one positive and one negative kink (writhe 0).
pub const CURL_PAIR_UNKNOT: &str = "X[2,2,3,1] X[3,1,4,4]";
pub const HOPF: &str = "X[1,3,2,4] X[3,1,4,2]";
pub const LEFT_TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
pub const FIGURE_EIGHT: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";

/// Trace closure of a braid word on `strands` strands. Word entries are
/// ±g for the generator crossing positions g and g+1 (1-based), read top
/// to bottom; the closure joins each bottom position to the matching top
/// position. Every strand must take part in at least one crossing,
/// otherwise its closure would be a bare loop with no PD arcs.
pub fn braid_closure(strands: usize, word: &[i32]) -> String {
    assert!(strands >= 2, "closure needs at least two strands");
    assert!(!word.is_empty(), "closure of the empty word has no crossings");
    let k = word.len();
    let gen = |j: usize| word[j].unsigned_abs() as usize;
    for (j, &w) in word.iter().enumerate() {
        let g = w.unsigned_abs() as usize;
        assert!(w != 0 && g < strands, "generator {w} out of range at word position {j}");
    }
    let mut touched = vec![false; strands + 2];
    for &w in word {
        let g = w.unsigned_abs() as usize;
        touched[g] = true;
        touched[g + 1] = true;
    }
    assert!((1..=strands).all(|p| touched[p]), "some strand never crosses");

    // An arc runs from a crossing exit down (wrapping through the
    // closure) to the first level whose generator touches its position.
    let next_entry = |j: usize, p: usize| -> (usize, usize) {
        let mut l = (j + 1) % k;
        loop {
            let g = gen(l);
            if p == g || p == g + 1 {
                return (l, p);
            }
            l = (l + 1) % k;
        }
    };

    // Walk every strand once, labelling arcs consecutively; record each
    // arc under its exit (crossing, position) and entry (crossing,
    // position).
    let mut exit_label: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut entry_label: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut next_label = 1usize;
    for j in 0..k {
        for start in [(j, gen(j)), (j, gen(j) + 1)] {
            if exit_label.contains_key(&start) {
                continue;
            }
            let mut cur = start;
            loop {
                exit_label.insert(cur, next_label);
                let (l, p) = next_entry(cur.0, cur.1);
                entry_label.insert((l, p), next_label);
                next_label += 1;
                let g = gen(l);
                cur = (l, if p == g { g + 1 } else { g });
                if cur == start {
                    break;
                }
            }
        }
    }

    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let g = gen(j);
        let in_l = entry_label[&(j, g)];
        let in_r = entry_label[&(j, g + 1)];
        let out_l = exit_label[&(j, g)];
        let out_r = exit_label[&(j, g + 1)];
        out.push(if word[j] > 0 {
            format!("X[{in_r},{out_r},{out_l},{in_l}]")
        } else {
            format!("X[{in_l},{in_r},{out_r},{out_l}]")
        });
    }
    out.join(" ")
}

/// The (2, k) torus family: k positive crossings for k > 0, |k| negative
/// for k < 0. `torus2(3)` is the right trefoil, `torus2(-3)` the left.
pub fn torus2(k: i64) -> String {
    assert!(k != 0, "the 0-crossing closure has no PD form");
    let g = if k > 0 { 1 } else { -1 };
    braid_closure(2, &vec![g; k.unsigned_abs() as usize])
}

/// Hand-built diagram pairs related by single Reidemeister moves (plus
/// two closure isotopies realized by R-moves): equal links presented by
/// different diagrams, for invariance testing.
pub fn reidemeister_pairs() -> Vec<(&'static str, String, String)> {
    vec![
        ("R1: opposite kinks", braid_closure(2, &[1]), braid_closure(2, &[-1])),
        ("R1: kink vs framing marks", braid_closure(2, &[1]), TWIST_PAIR_UNKNOT.to_string()),
        ("R2: Hopf with a cancelling pair", torus2(2), braid_closure(2, &[1, -1, 1, 1])),
        ("R2: trefoil with a cancelling pair", torus2(3), braid_closure(2, &[1, 1, 1, 1, -1])),
        (
            "R3: braid relation",
            braid_closure(3, &[1, 2, 1]),
            braid_closure(3, &[2, 1, 2]),
        ),
        (
            "closure rotation of the figure eight",
            braid_closure(3, &[1, -2, 1, -2]),
            braid_closure(3, &[-2, 1, -2, 1]),
        ),
    ]
}

/// Seed for randomized corpus members: `QLI_SEED` when set, else fixed.
pub fn env_seed() -> u64 {
    std::env::var("QLI_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0x51EED)
}

/// `count` distinct random braid closures with at most 8 crossings on 2
/// or 3 strands; every generator appears, so the diagram is connected
/// and every strand crosses.
pub fn random_closures(count: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: BTreeSet<(usize, Vec<i32>)> = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let strands = rng.gen_range(2..=3usize);
        let len = rng.gen_range(strands..=8usize);
        let word: Vec<i32> = (0..len)
            .map(|_| {
                let g = rng.gen_range(1..strands) as i32;
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        let mut used = vec![false; strands];
        for &w in &word {
            used[w.unsigned_abs() as usize] = true;
        }
        if !(1..strands).all(|g| used[g]) || !seen.insert((strands, word.clone())) {
            continue;
        }
        let name = format!(
            "random braid {strands}:[{}]",
            word.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
        );
        out.push((name, braid_closure(strands, &word)));
    }
    out
}

/// The full reference corpus: named links, torus instances, and five
/// seeded random closures — at least ten connected diagrams, all with at
/// most eight crossings.
pub fn corpus(seed: u64) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = vec![
        ("twist-pair unknot".into(), TWIST_PAIR_UNKNOT.into()),
        ("curl-pair unknot".into(), CURL_PAIR_UNKNOT.into()),
        ("Hopf link".into(), HOPF.into()),
        ("left trefoil".into(), LEFT_TREFOIL.into()),
        ("right trefoil".into(), torus2(3)),
        ("figure eight".into(), FIGURE_EIGHT.into()),
        ("T(2,4)".into(), torus2(4)),
        ("T(2,6)".into(), torus2(6)),
    ];
    out.extend(random_closures(5, seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::builtin;
    use crate::diagram::parse_pd;
    use crate::engine::framing_normalize;
    use crate::oracle::kauffman_closed;

    #[test]
    fn positive_single_crossing_closure_is_the_reference_kink() {
        assert_eq!(braid_closure(2, &[1]), "X[2,2,1,1]");
    }

    #[test]
    fn negative_two_strand_closure_matches_the_reference_trefoil() {
        let generated = parse_pd(&braid_closure(2, &[-1, -1, -1])).unwrap();
        let reference = parse_pd(LEFT_TREFOIL).unwrap();
        assert_eq!(generated.writhe(), -3);
        assert_eq!(kauffman_closed(&generated), kauffman_closed(&reference));
    }

    #[test]
    fn torus_instances_have_the_expected_shape() {
        for (k, comps) in [(2i64, 2usize), (3, 1), (4, 2), (5, 1), (6, 2)] {
            let d = parse_pd(&torus2(k)).unwrap();
            assert_eq!(d.writhe(), k, "torus2({k}) writhe");
            assert_eq!(d.components.len(), comps, "torus2({k}) components");
            assert_eq!(d.crossing_count(), k as usize);
        }
        let left = parse_pd(&torus2(-3)).unwrap();
        assert_eq!(left.writhe(), -3);
    }

    #[test]
    fn reidemeister_pairs_normalize_to_equal_brackets() {
        let cat = builtin("sl2").unwrap();
        let pairs = reidemeister_pairs();
        assert!(pairs.len() >= 5);
        for (name, a, b) in pairs {
            let da = parse_pd(&a).unwrap();
            let db = parse_pd(&b).unwrap();
            let na = framing_normalize(&kauffman_closed(&da), da.writhe(), &cat);
            let nb = framing_normalize(&kauffman_closed(&db), db.writhe(), &cat);
            assert_eq!(na, nb, "{name}");
        }
    }

    #[test]
    fn random_closures_are_deterministic_and_in_range() {
        let a = random_closures(5, 7);
        let b = random_closures(5, 7);
        assert_eq!(a, b);
        let names: BTreeSet<&String> = a.iter().map(|(n, _)| n).collect();
        assert_eq!(names.len(), 5, "closures are distinct");
        for (name, text) in &a {
            let d = parse_pd(text).unwrap();
            assert!(d.crossing_count() <= 8, "{name} too large");
            assert_eq!(d.split_components().len(), 1, "{name} splits");
        }
        assert_ne!(random_closures(5, 8), a, "seed changes the draw");
    }

    #[test]
    fn corpus_is_at_least_ten_connected_small_diagrams() {
        let c = corpus(env_seed());
        assert!(c.len() >= 10);
        for (name, text) in &c {
            let d = parse_pd(text).unwrap();
            assert!(d.crossing_count() <= 8, "{name}");
            assert_eq!(d.split_components().len(), 1, "{name} must be connected");
        }
    }
}
