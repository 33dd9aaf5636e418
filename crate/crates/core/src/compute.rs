//! End-to-end orchestration: diagram + category + options → invariant.
//!
//! This is the layer the CLI calls. It splits the diagram into connected
//! components, replaces self-loop crossings by framing marks, picks a
//! carving strategy, builds and validates a contraction plan per piece,
//! runs the chosen backend, and multiplies the per-component scalars.

use crate::carving::{self, CarvingError, CarvingTree};
use crate::category::RibbonData;
use crate::diagram::LinkDiagram;
use crate::engine::{self, framing_normalize, EngineError, PreparedCategory, Stats};
use crate::pipeline::{self, PipelineError};
use crate::planner::{self, ContractionPlan, PlanError};
use crate::ring::{LaurentPoly, RingError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exhaustive carving search is exponential in the leaf count; `Auto`
/// only attempts it on diagrams at most this large.
pub const MAX_EXACT_LEAVES: usize = 12;

/// How to search for a carving decomposition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Exhaustive search on small diagrams, greedy otherwise; either way
    /// fall back to the sweep construction when the first choice fails.
    #[default]
    Auto,
    /// Exhaustive minimum-congestion search (small diagrams only).
    Exact,
    /// Greedy congestion-driven merging.
    Heuristic,
    /// Left-to-right sweep order (always succeeds on connected input).
    Sweep,
}

/// Which arithmetic backend evaluates the plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Laurent-polynomial arithmetic with bignum coefficients.
    Exact,
    /// Evaluate at integer points modulo several primes, then rebuild the
    /// polynomial by CRT + interpolation. `extra_primes` adds redundant
    /// primes beyond the certified requirement.
    Modular { extra_primes: usize },
}

/// Options controlling one invariant computation.
#[derive(Clone, Debug)]
pub struct ComputeOptions {
    pub strategy: Strategy,
    pub backend: Backend,
    /// Divide out one framing unit per writhe unit at the end.
    pub normalize_framing: bool,
    /// Re-root the carving tree at this node before realization; no
    /// fallback is attempted when the re-rooted tree is not realizable.
    pub root_edge: Option<usize>,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        ComputeOptions {
            strategy: Strategy::Auto,
            backend: Backend::Exact,
            normalize_framing: false,
            root_edge: None,
        }
    }
}

/// Reporting block for one component evaluated modularly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModularInfo {
    /// Number of evaluation points (degree window size).
    pub points: usize,
    pub primes: Vec<u64>,
    /// Largest reconstructed point-value magnitude, in bits.
    pub max_point_bits: u64,
    /// Exponent shift that made every evaluated polynomial ordinary.
    pub shift: i64,
    /// Certified upper bound on the shifted degree.
    pub degree_bound: i64,
}

/// Result of one invariant computation.
#[derive(Clone, Debug)]
pub struct ComputeOutcome {
    /// The scalar invariant (normalized when requested).
    pub value: LaurentPoly,
    /// Counters merged over all components: max congestion and peak
    /// length, summed operation and step counts.
    pub stats: Stats,
    pub writhe: i64,
    pub normalized: bool,
    pub components: usize,
    /// One validated plan per connected component, in evaluation order.
    pub plans: Vec<ContractionPlan>,
    /// One entry per component when the modular backend ran.
    pub modular: Vec<ModularInfo>,
}

#[derive(Debug, Error)]
pub enum ComputeError {
    #[error("component {} is coloured with unknown object `{colour}`", component + 1)]
    UnknownColour { component: usize, colour: String },
    #[error(transparent)]
    Carving(#[from] CarvingError),
    #[error("--root-edge requires a connected diagram; this one has {components} components")]
    RootEdgeSplit { components: usize },
    #[error("root edge {edge} out of range: tree has nodes 0..{nodes} with root {root}")]
    RootEdgeRange { edge: usize, nodes: usize, root: usize },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Search for a carving tree under the requested strategy.
pub fn carve(d: &LinkDiagram, strategy: Strategy) -> Result<CarvingTree, CarvingError> {
    carve_named(d, strategy).map(|(tree, _)| tree)
}

/// Like [`carve`], but also report which concrete search produced the
/// tree (`Auto` resolves to one of the other three).
pub fn carve_named(
    d: &LinkDiagram,
    strategy: Strategy,
) -> Result<(CarvingTree, &'static str), CarvingError> {
    match strategy {
        Strategy::Exact => carving::exact_carving(d).map(|t| (t, "exact")),
        Strategy::Heuristic => carving::heuristic_carving(d).map(|t| (t, "heuristic")),
        Strategy::Sweep => carving::sweep_carving(d).map(|t| (t, "sweep")),
        Strategy::Auto => {
            let first = if d.vertices.len() <= MAX_EXACT_LEAVES {
                carving::exact_carving(d).map(|t| (t, "exact"))
            } else {
                carving::heuristic_carving(d).map(|t| (t, "heuristic"))
            };
            first.or_else(|_| carving::sweep_carving(d).map(|t| (t, "sweep")))
        }
    }
}

/// Translate per-component colour names into object indices; uncoloured
/// components get object 0.
pub fn colouring_of(d: &LinkDiagram, cat: &RibbonData) -> Result<Vec<usize>, ComputeError> {
    d.components
        .iter()
        .enumerate()
        .map(|(i, c)| match &c.color {
            None => Ok(0),
            Some(name) => cat
                .object_index(name)
                .ok_or_else(|| ComputeError::UnknownColour { component: i, colour: name.clone() }),
        })
        .collect()
}

fn merge_stats(total: &mut Stats, piece: &Stats) {
    total.congestion = total.congestion.max(piece.congestion);
    total.peak_len = total.peak_len.max(piece.peak_len);
    total.scalar_ops += piece.scalar_ops;
    total.merges_small += piece.merges_small;
    total.merges_large += piece.merges_large;
    total.slides += piece.slides;
    total.shift_total += piece.shift_total;
}

/// Compute the scalar invariant of `d` coloured by its component colour
/// names (default object 0) in the given ribbon category.
pub fn compute_invariant(
    d: &LinkDiagram,
    cat: &RibbonData,
    opts: &ComputeOptions,
) -> Result<ComputeOutcome, ComputeError> {
    let pieces = d.split_components();
    if opts.root_edge.is_some() && pieces.len() != 1 {
        return Err(ComputeError::RootEdgeSplit { components: pieces.len() });
    }

    let mut value = LaurentPoly::one();
    let mut stats = Stats::default();
    let mut plans = Vec::new();
    let mut modular = Vec::new();

    for piece in &pieces {
        let piece = piece.broken_self_loops();
        let colouring = colouring_of(&piece, cat)?;
        let mut tree = carve(&piece, opts.strategy)?;
        if let Some(edge) = opts.root_edge {
            if edge >= tree.nodes.len() || edge == tree.root {
                return Err(ComputeError::RootEdgeRange {
                    edge,
                    nodes: tree.nodes.len(),
                    root: tree.root,
                });
            }
            tree = tree.rerooted(edge);
        }
        let real = carving::realize(&tree, &piece)?;
        let plan = planner::build_plan(&piece, &tree, &real, cat, &colouring)?;
        planner::validate_plan(&plan, &piece, cat)?;

        let piece_value = match opts.backend {
            Backend::Exact => {
                let pc = PreparedCategory::for_exact(cat);
                let run = engine::execute(&plan, &pc)?;
                merge_stats(&mut stats, &run.stats);
                run.value
            }
            Backend::Modular { extra_primes } => {
                let out = pipeline::compute_via_modular(&plan, cat, extra_primes)?;
                merge_stats(&mut stats, &out.stats);
                modular.push(ModularInfo {
                    points: out.point_values.len(),
                    primes: out.primes,
                    max_point_bits: out.max_point_bits,
                    shift: out.shift,
                    degree_bound: out.degree,
                });
                out.value
            }
        };
        value = value.checked_mul(&piece_value)?;
        plans.push(plan);
    }

    let writhe = d.writhe();
    if opts.normalize_framing {
        value = framing_normalize(&value, writhe, cat);
    }
    Ok(ComputeOutcome {
        value,
        stats,
        writhe,
        normalized: opts.normalize_framing,
        components: pieces.len(),
        plans,
        modular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::builtin;
    use crate::corpus;
    use crate::diagram::parse_pd;
    use crate::oracle::kauffman_closed;

    const TWO_KINKS: &str = "X[1,1,2,2] X[3,3,4,4]";

    fn sl2() -> RibbonData {
        builtin("sl2").expect("builtin sl2")
    }

    #[test]
    fn split_diagrams_multiply_component_values() {
        let cat = sl2();
        let d = parse_pd(TWO_KINKS).expect("parse");
        assert_eq!(d.split_components().len(), 2);
        let whole = compute_invariant(&d, &cat, &ComputeOptions::default()).expect("whole");
        assert_eq!(whole.components, 2);
        assert_eq!(whole.plans.len(), 2);

        // Same scalar as the global state-sum oracle on the split diagram.
        assert_eq!(whole.value, kauffman_closed(&d));

        // And literally the product of the two separately computed pieces.
        let mut product = LaurentPoly::one();
        for piece in d.split_components() {
            let one = compute_invariant(&piece, &cat, &ComputeOptions::default()).expect("piece");
            product = product.checked_mul(&one.value).expect("product");
        }
        assert_eq!(whole.value, product);
    }

    #[test]
    fn corpus_matches_the_state_sum_oracle() {
        let cat = sl2();
        for (name, text) in corpus::corpus(corpus::env_seed()) {
            let d = parse_pd(&text).expect("parse");
            let got = compute_invariant(&d, &cat, &ComputeOptions::default())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(got.value, kauffman_closed(&d), "{name}");
        }
    }

    #[test]
    fn every_realizable_root_edge_gives_the_same_value() {
        let cat = sl2();
        let d = parse_pd(corpus::LEFT_TREFOIL).expect("parse");
        let base = compute_invariant(&d, &cat, &ComputeOptions::default()).expect("base");

        let tree = carve(&d.broken_self_loops(), Strategy::Auto).expect("carve");
        let mut agreed = 0usize;
        for edge in 0..tree.nodes.len() {
            if edge == tree.root {
                continue;
            }
            let opts = ComputeOptions { root_edge: Some(edge), ..ComputeOptions::default() };
            match compute_invariant(&d, &cat, &opts) {
                Ok(out) => {
                    assert_eq!(out.value, base.value, "root edge {edge}");
                    agreed += 1;
                }
                // A re-rooted tree may fail realization; the contract is
                // "error out, never fall back", not "always succeed".
                Err(ComputeError::Carving(_)) => {}
                Err(other) => panic!("root edge {edge}: unexpected error {other}"),
            }
        }
        assert!(agreed >= 2, "only {agreed} root edges were realizable");
    }

    #[test]
    fn root_edge_rejects_out_of_range_and_split_input() {
        let cat = sl2();
        let connected = parse_pd(corpus::HOPF).expect("parse");
        let opts = ComputeOptions { root_edge: Some(10_000), ..ComputeOptions::default() };
        match compute_invariant(&connected, &cat, &opts) {
            Err(ComputeError::RootEdgeRange { edge: 10_000, .. }) => {}
            other => panic!("expected RootEdgeRange, got {other:?}"),
        }
        let split = parse_pd(TWO_KINKS).expect("parse");
        let opts = ComputeOptions { root_edge: Some(0), ..ComputeOptions::default() };
        match compute_invariant(&split, &cat, &opts) {
            Err(ComputeError::RootEdgeSplit { components: 2 }) => {}
            other => panic!("expected RootEdgeSplit, got {other:?}"),
        }
    }

    #[test]
    fn unknown_colour_is_reported_with_component_and_name() {
        let cat = sl2();
        let mut d = parse_pd(corpus::HOPF).expect("parse");
        d.components[1].color = Some("W".into());
        match compute_invariant(&d, &cat, &ComputeOptions::default()) {
            Err(ComputeError::UnknownColour { component: 1, colour }) => {
                assert_eq!(colour, "W");
            }
            other => panic!("expected UnknownColour, got {other:?}"),
        }
    }

    #[test]
    fn normalized_kink_is_the_quantum_dimension() {
        let cat = sl2();
        let d = parse_pd("X[1,1,2,2]").expect("parse");
        let opts = ComputeOptions { normalize_framing: true, ..ComputeOptions::default() };
        let out = compute_invariant(&d, &cat, &opts).expect("compute");
        assert_eq!(out.writhe, 1);
        assert!(out.normalized);
        assert_eq!(out.value, cat.quantum_dim(0));
    }

    #[test]
    fn modular_backend_agrees_with_exact_through_the_orchestrator() {
        for cat_name in ["trivial", "sl2"] {
            let cat = builtin(cat_name).expect("builtin");
            let d = parse_pd(corpus::FIGURE_EIGHT).expect("parse");
            let exact = compute_invariant(&d, &cat, &ComputeOptions::default()).expect("exact");
            let opts = ComputeOptions {
                backend: Backend::Modular { extra_primes: 0 },
                ..ComputeOptions::default()
            };
            let modular = compute_invariant(&d, &cat, &opts).expect("modular");
            assert_eq!(exact.value, modular.value, "{cat_name}");
            assert_eq!(modular.modular.len(), 1);
            assert!(modular.modular[0].points >= 1);
            assert!(!modular.modular[0].primes.is_empty());
        }
    }

    #[test]
    fn all_strategies_agree_on_the_corpus() {
        let cat = sl2();
        for (name, text) in corpus::corpus(corpus::env_seed()) {
            let d = parse_pd(&text).expect("parse");
            let base = compute_invariant(&d, &cat, &ComputeOptions::default())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            for strategy in [Strategy::Heuristic, Strategy::Sweep] {
                let opts = ComputeOptions { strategy, ..ComputeOptions::default() };
                let got = compute_invariant(&d, &cat, &opts)
                    .unwrap_or_else(|e| panic!("{name} {strategy:?}: {e}"));
                assert_eq!(got.value, base.value, "{name} {strategy:?}");
            }
        }
    }
}
