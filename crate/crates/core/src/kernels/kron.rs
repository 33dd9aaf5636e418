//! Reference implementations of the contraction kernels.
//!
//! Everything here is written the slow, obvious way: materialise the
//! padded operator with Kronecker products of identities and multiply
//! dense matrices, without zero-skipping and with index arithmetic done
//! by div/mod instead of the streaming kernels' digit loops. These
//! routines exist solely to cross-check `kernels::*` on random inputs.

use super::{identity, MorphVec};
use crate::scalar::ScalarRing;

/// Kronecker product, entry-by-entry from the definition.
pub fn oracle_kron<R: ScalarRing>(
    r: &R,
    a: &MorphVec<R::Elem>,
    b: &MorphVec<R::Elem>,
) -> MorphVec<R::Elem> {
    let (rb, cb) = (b.nrows(), b.ncols());
    let nrows = a.nrows() * rb;
    let ncols = a.ncols() * cb;
    let mut row_dims = a.row_dims.clone();
    row_dims.extend_from_slice(&b.row_dims);
    let mut col_dims = a.col_dims.clone();
    col_dims.extend_from_slice(&b.col_dims);
    let mut data = Vec::with_capacity(nrows * ncols);
    for i in 0..nrows {
        for j in 0..ncols {
            data.push(r.mul(a.at(i / rb, j / cb), b.at(i % rb, j % cb)));
        }
    }
    MorphVec::new(row_dims, col_dims, data)
}

/// Textbook matrix product without zero-skipping.
pub fn oracle_matmul<R: ScalarRing>(
    r: &R,
    a: &MorphVec<R::Elem>,
    b: &MorphVec<R::Elem>,
) -> MorphVec<R::Elem> {
    assert_eq!(a.ncols(), b.nrows(), "composition boundary mismatch");
    let (n, m, p) = (a.nrows(), a.ncols(), b.ncols());
    let mut data = Vec::with_capacity(n * p);
    for i in 0..n {
        for j in 0..p {
            let mut acc = r.zero();
            for k in 0..m {
                acc = r.add(&acc, &r.mul(a.at(i, k), b.at(k, j)));
            }
            data.push(acc);
        }
    }
    MorphVec::new(a.row_dims.clone(), b.col_dims.clone(), data)
}

/// Reorder the column factors of a row vector; `perm[new_slot] = old_slot`.
pub fn permute_col_factors<E: Clone>(v: &MorphVec<E>, perm: &[usize]) -> MorphVec<E> {
    assert!(v.row_dims.is_empty(), "factor permutation expects a row vector");
    assert_eq!(perm.len(), v.col_dims.len());
    let new_dims: Vec<usize> = perm.iter().map(|&s| v.col_dims[s]).collect();
    let n = v.ncols();
    let mut data = Vec::with_capacity(n);
    for new_j in 0..n {
        let mut rem = new_j;
        let mut old_digits = vec![0usize; perm.len()];
        for s in (0..perm.len()).rev() {
            old_digits[perm[s]] = rem % new_dims[s];
            rem /= new_dims[s];
        }
        let mut old_j = 0usize;
        for (slot, d) in v.col_dims.iter().enumerate() {
            old_j = old_j * d + old_digits[slot];
        }
        data.push(v.data[old_j].clone());
    }
    MorphVec::new(vec![], new_dims, data)
}

/// `(id ⊗ M ⊗ id) ∘ f`, with the padded operator fully materialised.
pub fn oracle_mid_compose<R: ScalarRing>(
    r: &R,
    f: &MorphVec<R::Elem>,
    mid: std::ops::Range<usize>,
    m: &MorphVec<R::Elem>,
) -> MorphVec<R::Elem> {
    let left = oracle_kron(r, &identity(r, &f.row_dims[..mid.start]), m);
    let padded = oracle_kron(r, &left, &identity(r, &f.row_dims[mid.end..]));
    oracle_matmul(r, &padded, f)
}

/// Wrap an evaluation row around `f`: form `d ⊗ f` and permute its column
/// blocks from (X, Y, B) to (X, B, Y).
pub fn oracle_eval_compose<R: ScalarRing>(
    r: &R,
    d: &MorphVec<R::Elem>,
    f: &MorphVec<R::Elem>,
) -> MorphVec<R::Elem> {
    let half = d.col_dims.len() / 2;
    let ny = d.col_dims.len() - half;
    let nb = f.col_dims.len();
    let prod = oracle_kron(r, d, f);
    let mut perm = Vec::with_capacity(half + ny + nb);
    perm.extend(0..half);
    perm.extend(half + ny..half + ny + nb);
    perm.extend(half..half + ny);
    permute_col_factors(&prod, &perm)
}

/// `(g ⊗ id_W) ∘ (id_U ⊗ f)` as literal dense composition.
pub fn oracle_partial5<R: ScalarRing>(
    r: &R,
    f: &MorphVec<R::Elem>,
    split_f: usize,
    g: &MorphVec<R::Elem>,
    split_g: usize,
) -> MorphVec<R::Elem> {
    let left = oracle_kron(r, g, &identity(r, &f.row_dims[split_f..]));
    let right = oracle_kron(r, &identity(r, &g.col_dims[..split_g]), f);
    oracle_matmul(r, &left, &right)
}

/// `(id_U ⊗ g) ∘ (f ⊗ id_W)` as literal dense composition.
pub fn oracle_partial6<R: ScalarRing>(
    r: &R,
    f: &MorphVec<R::Elem>,
    split_f: usize,
    g: &MorphVec<R::Elem>,
    split_g: usize,
) -> MorphVec<R::Elem> {
    let left = oracle_kron(r, &identity(r, &f.row_dims[..split_f]), g);
    let right = oracle_kron(r, f, &identity(r, &g.col_dims[split_g..]));
    oracle_matmul(r, &left, &right)
}

/// `(id_U ⊗ g) ∘ f` as literal dense composition.
pub fn oracle_partial7<R: ScalarRing>(
    r: &R,
    f: &MorphVec<R::Elem>,
    split_f: usize,
    g: &MorphVec<R::Elem>,
) -> MorphVec<R::Elem> {
    let left = oracle_kron(r, &identity(r, &f.row_dims[..split_f]), g);
    oracle_matmul(r, &left, f)
}
