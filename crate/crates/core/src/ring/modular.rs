//! Machine-word modular arithmetic, prime generation, and CRT
//! reconstruction into the symmetric range.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::bigint_mod;
use super::RingError;

/// Primes are kept below 2^31 so products of two residues fit in u64.
pub const PRIME_LIMIT: u64 = 1 << 31;

/// A value reduced modulo a specific prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Residue {
    pub value: u64,
    pub prime: u64,
}

impl Residue {
    pub fn new(value: u64, prime: u64) -> Self {
        debug_assert!(prime >= 2 && prime < PRIME_LIMIT);
        Residue { value: value % prime, prime }
    }

    pub fn from_bigint(n: &BigInt, prime: u64) -> Self {
        Residue { value: bigint_mod(n, prime), prime }
    }
}

pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < p && b < p && p < PRIME_LIMIT);
    a * b % p
}

pub fn neg_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest primes (ascending from 2) whose product strictly exceeds
/// `2^(bit_bound + 1)`; the extra bit covers the sign in the symmetric
/// range. `extra` appends that many further primes beyond the minimum.
pub fn select_primes(bit_bound: u64, extra: usize) -> Vec<u64> {
    let target: BigInt = BigInt::one() << (bit_bound + 1);
    let mut primes = Vec::new();
    let mut product = BigInt::one();
    let mut candidate = 2u64;
    let mut surplus = 0usize;
    loop {
        if product > target {
            if surplus >= extra {
                return primes;
            }
            surplus += 1;
        }
        while !is_prime(candidate) {
            candidate += 1;
            assert!(candidate < PRIME_LIMIT, "prime pool exhausted");
        }
        primes.push(candidate);
        product *= candidate;
        candidate += 1;
    }
}

/// Reconstruct the unique integer in the symmetric range
/// `(-M/2, M/2]` (M = product of the moduli) from its residues.
pub fn crt_reconstruct(residues: &[Residue]) -> Result<BigInt, RingError> {
    if residues.is_empty() {
        return Err(RingError::Crt("no residues".to_string()));
    }
    for (i, a) in residues.iter().enumerate() {
        for b in &residues[i + 1..] {
            if BigInt::from(a.prime).gcd(&BigInt::from(b.prime)) != BigInt::one() {
                return Err(RingError::Crt(format!(
                    "moduli {} and {} are not coprime",
                    a.prime, b.prime
                )));
            }
        }
    }
    let m: BigInt = residues.iter().map(|r| BigInt::from(r.prime)).product();
    let mut x = BigInt::zero();
    for r in residues {
        let p = BigInt::from(r.prime);
        let mi = &m / &p;
        let inv = mod_inverse(&mi, &p).ok_or_else(|| {
            RingError::Crt(format!("no inverse of partial product mod {}", r.prime))
        })?;
        x += BigInt::from(r.value) * &mi * inv;
    }
    x = x.mod_floor(&m);
    // symmetric range (-M/2, M/2]
    if &x * 2 > m {
        x -= &m;
    }
    Ok(x)
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(p);
    if e.gcd != BigInt::one() {
        return None;
    }
    Some(e.x.mod_floor(p))
}
