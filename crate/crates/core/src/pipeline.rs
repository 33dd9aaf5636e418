//! Arithmetic-control backend: run the planned contraction at integer
//! points modulo small primes, reconstruct each point value by CRT,
//! interpolate the shifted ordinary polynomial, and unshift. The result
//! must equal the exact backend's polynomial; any interpolation
//! non-integrality is reported as an error (it signals a bound bug
//! upstream, never a recoverable condition).

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::category::RibbonData;
use crate::engine::{self, EngineError, PreparedCategory, Stats};
use crate::planner::{estimate_cost, ContractionPlan};
use crate::ring::{
    crt_reconstruct, interpolate_integer_points, select_primes, LaurentPoly, Residue, RingError,
};

/// Shift/degree window turning the invariant into an ordinary
/// polynomial: v^shift · P has no negative exponents and degree at most
/// `degree`, so the points {0..degree} suffice for interpolation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftBounds {
    pub shift: i64,
    pub degree: i64,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("engine failure: {0}")]
    Engine(#[from] EngineError),
    #[error("ring failure: {0}")]
    Ring(#[from] RingError),
}

/// Everything the modular path produces: the reconstructed polynomial,
/// the execution counters (plan-determined, identical across points),
/// and the evaluation record for soundness checks and reporting.
#[derive(Clone, Debug)]
pub struct ModularOutcome {
    pub value: LaurentPoly,
    pub stats: Stats,
    pub shift: i64,
    pub degree: i64,
    pub primes: Vec<u64>,
    /// CRT-reconstructed values of v^shift · P at x = 0, 1, …, degree.
    pub point_values: Vec<BigInt>,
    /// Bit length of the largest reconstructed point value.
    pub max_point_bits: u64,
}

/// Degree-bound replay of the plan over the pre-shifted backend. The
/// per-matrix shifts make every intermediate an ordinary polynomial, so
/// the replay's window is the shifted result's window and its total
/// shift depends only on the plan.
pub fn shift_bounds(plan: &ContractionPlan, cat: &RibbonData) -> Result<ShiftBounds, EngineError> {
    let pc = PreparedCategory::for_bounds(cat, true);
    let run = engine::execute(plan, &pc)?;
    let b = run.value;
    debug_assert!(!b.present || b.lo >= 0, "pre-shifted replay left a negative exponent");
    Ok(ShiftBounds { shift: run.stats.shift_total, degree: if b.present { b.hi } else { 0 } })
}

fn ceil_log2(n: u64) -> u64 {
    n.max(1).next_power_of_two().trailing_zeros() as u64
}

/// Bit budget for the prime product: coefficient bound of the shifted
/// polynomial plus the evaluation amplification (D+1 terms, each at most
/// max-coefficient · D^D over the points {0..D}).
fn required_bits(coeff_bits: u64, degree: i64) -> u64 {
    let d = degree.max(0) as u64;
    coeff_bits + (d + 1) * ceil_log2(d.max(2)) + 2
}

/// Evaluate the plan at every point x ∈ {0..D} modulo each selected
/// prime (fan-out over (point, prime) pairs), CRT-reconstruct the point
/// values, interpolate the ordinary polynomial, and divide by v^shift.
/// `extra_primes` appends safety primes beyond the computed bound.
pub fn compute_via_modular(
    plan: &ContractionPlan,
    cat: &RibbonData,
    extra_primes: usize,
) -> Result<ModularOutcome, PipelineError> {
    let sb = shift_bounds(plan, cat)?;
    let est = estimate_cost(plan, cat)?;
    let primes = select_primes(required_bits(est.coeff_bits, sb.degree), extra_primes);
    let points: Vec<u64> = (0..=sb.degree.max(0) as u64).collect();

    let jobs: Vec<(u64, u64)> =
        points.iter().flat_map(|&x| primes.iter().map(move |&p| (x, p))).collect();
    let runs: Vec<Result<(u64, Stats), EngineError>> = jobs
        .par_iter()
        .map(|&(x, p)| {
            let pc = PreparedCategory::for_modular(cat, p, x);
            let run = engine::execute(plan, &pc)?;
            Ok((run.value, run.stats))
        })
        .collect();

    // reduction is sequential and in job order, so it is deterministic
    let mut stats: Option<Stats> = None;
    let mut residues: Vec<Vec<Residue>> = vec![Vec::with_capacity(primes.len()); points.len()];
    for (&(x, p), run) in jobs.iter().zip(runs) {
        let (value, st) = run?;
        if stats.is_none() {
            stats = Some(st);
        }
        residues[x as usize].push(Residue::new(value, p));
    }
    let point_values: Vec<BigInt> =
        residues.iter().map(|rs| crt_reconstruct(rs)).collect::<Result<_, _>>()?;
    let max_point_bits = point_values.iter().map(|v| v.magnitude().bits()).max().unwrap_or(0);

    let samples: Vec<(BigInt, BigInt)> = point_values
        .iter()
        .enumerate()
        .map(|(x, y)| (BigInt::from(x), y.clone()))
        .collect();
    let coeffs = interpolate_integer_points(&samples)?;
    let value = LaurentPoly::from_terms(
        Some(cat.variable.as_str()),
        coeffs.into_iter().enumerate().map(|(e, c)| (e as i64 - sb.shift, c)),
    );
    Ok(ModularOutcome {
        value,
        stats: stats.unwrap_or_default(),
        shift: sb.shift,
        degree: sb.degree,
        primes,
        point_values,
        max_point_bits,
    })
}
