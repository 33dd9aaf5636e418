//! Randomized algebraic laws for the scalar ring and its modular tools:
//! ring axioms on Laurent polynomials, evaluation as a homomorphism,
//! Chinese-remainder round trips, and interpolation round trips.

use num_bigint::BigInt;
use proptest::collection::vec;
use proptest::prelude::*;
use qli_core::ring::{
    crt_reconstruct, interpolate_integer_points, mul_mod, select_primes, LaurentPoly, Residue,
};

/// Random Laurent polynomial: exponents in [-8, 8], coefficients in
/// [-10^6, 10^6], up to 8 terms (duplicate exponents accumulate).
fn laurent() -> impl Strategy<Value = LaurentPoly> {
    vec((-8i64..=8, -1_000_000i64..=1_000_000), 0..8).prop_map(|terms| {
        LaurentPoly::from_terms(Some("v"), terms.into_iter().map(|(e, c)| (e, BigInt::from(c))))
    })
}

/// Random ordinary polynomial (no negative exponents), so that it can be
/// evaluated at integer points.
fn ordinary(max_deg: i64) -> impl Strategy<Value = LaurentPoly> {
    vec((0..=max_deg, -1_000_000i64..=1_000_000), 0..8).prop_map(|terms| {
        LaurentPoly::from_terms(Some("v"), terms.into_iter().map(|(e, c)| (e, BigInt::from(c))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn ring_laws_hold_on_random_triples(a in laurent(), b in laurent(), c in laurent()) {
        let add = |x: &LaurentPoly, y: &LaurentPoly| x.checked_add(y).unwrap();
        let mul = |x: &LaurentPoly, y: &LaurentPoly| x.checked_mul(y).unwrap();

        prop_assert_eq!(add(&a, &b), add(&b, &a));
        prop_assert_eq!(mul(&a, &b), mul(&b, &a));
        prop_assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
        prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
        prop_assert_eq!(mul(&a, &add(&b, &c)), add(&mul(&a, &b), &mul(&a, &c)));

        prop_assert_eq!(add(&a, &LaurentPoly::zero()), a.clone());
        prop_assert_eq!(mul(&a, &LaurentPoly::one()), a.clone());
        prop_assert_eq!(add(&a, &a.clone().neg()), LaurentPoly::zero());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in ordinary(8), b in ordinary(8), x in -9i64..=9) {
        let x = BigInt::from(x);
        let sum = a.checked_add(&b).unwrap();
        let product = a.checked_mul(&b).unwrap();
        prop_assert_eq!(sum.eval_big(&x), a.eval_big(&x) + b.eval_big(&x));
        prop_assert_eq!(product.eval_big(&x), a.eval_big(&x) * b.eval_big(&x));
    }

    #[test]
    fn modular_evaluation_is_a_ring_homomorphism(
        a in ordinary(8),
        b in ordinary(8),
        x in 0u64..100,
        pick in 0usize..4,
    ) {
        let p = [97u64, 101, 10007, 65521][pick];
        let product = a.checked_mul(&b).unwrap();
        prop_assert_eq!(
            product.eval_mod(x % p, p),
            mul_mod(a.eval_mod(x % p, p), b.eval_mod(x % p, p), p)
        );
    }

    #[test]
    fn crt_round_trips_through_the_symmetric_range(
        bits in 1u64..120,
        extra in 0usize..3,
        seed in any::<u128>(),
    ) {
        let primes = select_primes(bits, extra);
        let modulus: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();

        // A pseudo-random representative in (-M/2, M/2].
        let mut x = BigInt::from(seed) % &modulus;
        let half = &modulus / 2;
        while x > half {
            x -= &modulus;
        }
        while &x + &half < BigInt::from(0) {
            x += &modulus;
        }

        let residues: Vec<Residue> =
            primes.iter().map(|&p| Residue::from_bigint(&x, p)).collect();
        prop_assert_eq!(crt_reconstruct(&residues).unwrap(), x);
    }

    #[test]
    fn interpolation_round_trips_up_to_degree_32(
        coeffs in vec(-1_000_000i64..=1_000_000, 1..=33),
    ) {
        let p = LaurentPoly::from_terms(
            Some("v"),
            coeffs.iter().enumerate().map(|(e, &c)| (e as i64, BigInt::from(c))),
        );
        let points: Vec<(BigInt, BigInt)> = (0..coeffs.len())
            .map(|i| {
                let x = BigInt::from(i);
                let y = p.eval_big(&x);
                (x, y)
            })
            .collect();
        let back = interpolate_integer_points(&points).unwrap();
        prop_assert!(back.len() <= coeffs.len());
        for (e, want) in coeffs.iter().enumerate() {
            let got = back.get(e).cloned().unwrap_or_default();
            prop_assert_eq!(got, BigInt::from(*want), "coefficient of v^{}", e);
        }
    }
}

#[test]
fn crt_examples_pin_the_representative_range() {
    // The representative lives in (-M/2, M/2]; for M = 21 that is the
    // integer window -10..=10, so 10 stays 10 while 11 wraps to -10.
    let ans = crt_reconstruct(&[Residue::new(1, 3), Residue::new(3, 7)]).unwrap();
    assert_eq!(ans, BigInt::from(10));
    let ans = crt_reconstruct(&[Residue::new(2, 3), Residue::new(4, 7)]).unwrap();
    assert_eq!(ans, BigInt::from(-10), "11 > 21/2 wraps to 11 - 21");
    let ans = crt_reconstruct(&[Residue::new(2, 3), Residue::new(2, 5)]).unwrap();
    assert_eq!(ans, BigInt::from(2));
    let ans = crt_reconstruct(&[Residue::new(5, 101)]).unwrap();
    assert_eq!(ans, BigInt::from(5));
}
