//! Scalar backends the contraction engine is generic over: exact Laurent
//! polynomials, residues modulo a fixed prime, and a degree/coefficient
//! bound tracker used for cost and shift estimation.

use crate::ring::{add_mod, mul_mod, neg_mod, LaurentPoly};

/// Ring operations dispatched through a context value, so a backend can
/// carry data like the modulus without bloating every element.
pub trait ScalarRing: Clone + Send + Sync {
    type Elem: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
}

/// Exact arithmetic in Z[v, v^-1].
///
/// All elements flowing through one computation share the category's
/// variable, so a symbol mismatch here is an internal invariant breach.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactRing;

impl ScalarRing for ExactRing {
    type Elem = LaurentPoly;

    fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero()
    }
    fn one(&self) -> LaurentPoly {
        LaurentPoly::one()
    }
    fn is_zero(&self, a: &LaurentPoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        a.checked_add(b).expect("engine scalars share one variable")
    }
    fn mul(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        a.checked_mul(b).expect("engine scalars share one variable")
    }
    fn neg(&self, a: &LaurentPoly) -> LaurentPoly {
        a.clone().neg()
    }
}

/// Arithmetic modulo one machine-word prime.
#[derive(Clone, Copy, Debug)]
pub struct ModRing {
    pub prime: u64,
}

impl ScalarRing for ModRing {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.prime
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.prime)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.prime)
    }
    fn neg(&self, a: &u64) -> u64 {
        neg_mod(*a, self.prime)
    }
}

/// Sound interval bound on an element's exponent span and coefficient
/// size: multiplication adds spans and bit counts, addition hulls spans
/// and can grow the coefficient by one bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBound {
    pub present: bool,
    pub lo: i64,
    pub hi: i64,
    /// coefficient magnitude is bounded by 2^bits
    pub bits: u64,
}

impl DegreeBound {
    pub fn absent() -> Self {
        DegreeBound { present: false, lo: 0, hi: 0, bits: 0 }
    }

    pub fn span(lo: i64, hi: i64, bits: u64) -> Self {
        debug_assert!(lo <= hi);
        DegreeBound { present: true, lo, hi, bits }
    }

    pub fn of_poly(p: &LaurentPoly) -> Self {
        match (p.min_exp(), p.max_exp()) {
            (Some(lo), Some(hi)) => DegreeBound::span(lo, hi, p.coeff_bits()),
            _ => DegreeBound::absent(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BoundRing;

impl ScalarRing for BoundRing {
    type Elem = DegreeBound;

    fn zero(&self) -> DegreeBound {
        DegreeBound::absent()
    }
    fn one(&self) -> DegreeBound {
        DegreeBound::span(0, 0, 1)
    }
    fn is_zero(&self, a: &DegreeBound) -> bool {
        !a.present
    }
    fn add(&self, a: &DegreeBound, b: &DegreeBound) -> DegreeBound {
        match (a.present, b.present) {
            (false, _) => *b,
            (_, false) => *a,
            _ => DegreeBound::span(a.lo.min(b.lo), a.hi.max(b.hi), a.bits.max(b.bits) + 1),
        }
    }
    fn mul(&self, a: &DegreeBound, b: &DegreeBound) -> DegreeBound {
        if !a.present || !b.present {
            return DegreeBound::absent();
        }
        // each product coefficient sums at most min(span)+1 cross terms
        let overlap = ((a.hi - a.lo).min(b.hi - b.lo) as u64).saturating_add(1);
        let carry = overlap.next_power_of_two().trailing_zeros() as u64;
        DegreeBound::span(a.lo + b.lo, a.hi + b.hi, a.bits + b.bits + carry)
    }
    fn neg(&self, a: &DegreeBound) -> DegreeBound {
        *a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::text::parse;

    #[test]
    fn bound_tracks_an_actual_product() {
        let r = BoundRing;
        let p = parse("3*v^2 - v^-1").unwrap();
        let q = parse("v - 2").unwrap();
        let pb = DegreeBound::of_poly(&p);
        let qb = DegreeBound::of_poly(&q);
        let prod = p.checked_mul(&q).unwrap();
        let bound = r.mul(&pb, &qb);
        assert!(bound.lo <= prod.min_exp().unwrap());
        assert!(bound.hi >= prod.max_exp().unwrap());
        assert!(bound.bits >= prod.coeff_bits());
    }

    #[test]
    fn mod_ring_wraps() {
        let r = ModRing { prime: 7 };
        assert_eq!(r.add(&5, &4), 2);
        assert_eq!(r.mul(&5, &4), 6);
        assert_eq!(r.neg(&0), 0);
        assert_eq!(r.neg(&3), 4);
    }
}
