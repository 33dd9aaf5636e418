//! Laurent polynomials over arbitrary-precision integers.
//!
//! A polynomial carries an optional variable symbol; constants are
//! symbol-free and compatible with any symbol. Mixing two distinct bound
//! symbols is an error surfaced by the arithmetic entry points.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::RingError;

/// Variable symbol; `None` until a non-constant term binds one.
pub type VarSym = Option<Arc<str>>;

/// Sparse Laurent polynomial `sum c_e v^e` with `e` ranging over `i64`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    var: VarSym,
    /// exponent -> coefficient; no zero coefficients are stored.
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { var: None, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        LaurentPoly { var: None, terms }
    }

    pub fn constant_i64(c: i64) -> Self {
        Self::constant(BigInt::from(c))
    }

    /// `c * v^e` in the named variable.
    pub fn monomial(var: &str, c: BigInt, e: i64) -> Self {
        if c.is_zero() || e == 0 {
            return Self::constant(c);
        }
        let mut terms = BTreeMap::new();
        terms.insert(e, c);
        LaurentPoly { var: Some(Arc::from(var)), terms }
    }

    pub fn variable(var: &str) -> Self {
        Self::monomial(var, BigInt::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map(|c| c.is_one()).unwrap_or(false)
    }

    /// Symbol bound to this polynomial, if any non-constant term exists.
    pub fn var(&self) -> Option<&str> {
        self.var.as_deref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Largest bit-length over coefficients (0 for the zero polynomial).
    pub fn coeff_bits(&self) -> u64 {
        self.terms.values().map(|c| c.bits()).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn unify_vars(a: &VarSym, b: &VarSym) -> Result<VarSym, RingError> {
        match (a, b) {
            (None, x) => Ok(x.clone()),
            (x, None) => Ok(x.clone()),
            (Some(x), Some(y)) => {
                if x == y {
                    Ok(Some(x.clone()))
                } else {
                    Err(RingError::VariableMismatch { left: x.to_string(), right: y.to_string() })
                }
            }
        }
    }

    fn normalized(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        if self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&0)) {
            self.var = None;
        }
        self
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, RingError> {
        let var = Self::unify_vars(&self.var, &rhs.var)?;
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            *terms.entry(*e).or_insert_with(BigInt::zero) += c;
        }
        Ok(LaurentPoly { var, terms }.normalized())
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, RingError> {
        self.checked_add(&rhs.clone().neg())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, RingError> {
        let var = Self::unify_vars(&self.var, &rhs.var)?;
        let mut terms: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                *terms.entry(e1 + e2).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        Ok(LaurentPoly { var, terms }.normalized())
    }

    pub fn neg(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }

    /// `self * v^s` (pure exponent shift).
    pub fn shifted(&self, s: i64) -> Self {
        if s == 0 || self.is_zero() {
            return self.clone();
        }
        let terms = self.terms.iter().map(|(e, c)| (e + s, c.clone())).collect();
        LaurentPoly { var: self.var.clone(), terms }
    }

    /// Substitute `v -> v^k` (k != 0). For k < 0 this mirrors exponents.
    pub fn exponent_scaled(&self, k: i64) -> Self {
        assert!(k != 0, "exponent scale must be nonzero");
        let terms = self.terms.iter().map(|(e, c)| (e * k, c.clone())).collect();
        LaurentPoly { var: self.var.clone(), terms: terms }.normalized()
    }

    /// Same coefficients, different variable symbol.
    pub fn renamed(&self, var: &str) -> Self {
        let mut out = self.clone();
        if !out.terms.is_empty() && !(out.terms.len() == 1 && out.terms.contains_key(&0)) {
            out.var = Some(Arc::from(var));
        }
        out
    }

    /// Exact evaluation at an integer point. Negative exponents require the
    /// point to divide exactly; this is only meaningful for `x = 1, -1` and
    /// is guarded by an assertion — pipeline code always clears negative
    /// exponents first.
    pub fn eval_big(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            assert!(*e >= 0, "eval_big requires an ordinary polynomial (pre-shift first)");
            acc += c * x.pow(*e as u32);
        }
        acc
    }

    /// Evaluation at `x` modulo `p`; requires all exponents nonnegative.
    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        debug_assert!(p >= 2 && p < (1 << 31));
        let x = x % p;
        let mut acc: u64 = 0;
        for (e, c) in &self.terms {
            assert!(*e >= 0, "eval_mod requires an ordinary polynomial (pre-shift first)");
            let ce = bigint_mod(c, p);
            let xe = pow_mod(x, *e as u64, p);
            acc = (acc + ce * xe % p) % p;
        }
        acc
    }

    /// Build from `(exponent, coefficient)` pairs (duplicates accumulate).
    pub fn from_terms(var: Option<&str>, it: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut terms: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e, c) in it {
            *terms.entry(e).or_insert_with(BigInt::zero) += c;
        }
        LaurentPoly { var: var.map(Arc::from), terms }.normalized()
    }
}

pub(crate) fn bigint_mod(c: &BigInt, p: u64) -> u64 {
    use num_traits::ToPrimitive;
    let p_big = BigInt::from(p);
    let mut r = c % &p_big;
    if r.is_negative() {
        r += &p_big;
    }
    r.to_u64().expect("residue fits u64")
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::render(self, "v"))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::render(self, "v"))
    }
}
