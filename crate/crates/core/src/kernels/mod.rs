//! Streaming tensor-composition kernels.
//!
//! A `MorphVec` stores a morphism between tensor products as a dense
//! row-major matrix together with the factor dimensions of its codomain
//! (rows) and domain (columns). The leftmost factor is the most
//! significant index digit. Morphisms compose as matrix products; tensor
//! products are Kronecker products.
//!
//! The kernels below apply padded compositions of the form
//! `(id ⊗ M ⊗ id) ∘ f` and the three partial contractions used by the
//! bridge merges without ever materialising `id ⊗ M ⊗ id`. Every index
//! computation goes through [`idx3`]/[`split3`].

pub mod kron;

use crate::scalar::ScalarRing;

/// Multiplication/addition tally for cost accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub muls: u64,
    pub adds: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.muls + self.adds
    }
    pub fn absorb(&mut self, other: OpCount) {
        self.muls += other.muls;
        self.adds += other.adds;
    }
}

/// Dense morphism with factored row/column index sets.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphVec<E> {
    pub row_dims: Vec<usize>,
    pub col_dims: Vec<usize>,
    pub data: Vec<E>,
}

impl<E: Clone> MorphVec<E> {
    pub fn new(row_dims: Vec<usize>, col_dims: Vec<usize>, data: Vec<E>) -> Self {
        let v = MorphVec { row_dims, col_dims, data };
        v.assert_shape();
        v
    }

    pub fn nrows(&self) -> usize {
        self.row_dims.iter().product()
    }

    pub fn ncols(&self) -> usize {
        self.col_dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn at(&self, row: usize, col: usize) -> &E {
        &self.data[row * self.ncols() + col]
    }

    /// Factor lists must describe the stored data exactly.
    pub fn assert_shape(&self) {
        assert_eq!(
            self.nrows() * self.ncols(),
            self.data.len(),
            "factor dims {:?} x {:?} disagree with data length {}",
            self.row_dims,
            self.col_dims,
            self.data.len()
        );
    }

    /// Reinterpret a column vector as a row vector (same data; the factor
    /// list moves from codomain to domain). Used when a built-up creation
    /// morphism is consumed as an evaluation.
    pub fn transposed_vector(mut self) -> Self {
        assert!(self.col_dims.is_empty() || self.row_dims.is_empty(), "vector expected");
        std::mem::swap(&mut self.row_dims, &mut self.col_dims);
        self
    }

    /// Reverse the order of row factors, permuting data accordingly.
    pub fn reversed_row_factors(&self) -> Self {
        let dims = &self.row_dims;
        let ncols = self.ncols();
        let new_dims: Vec<usize> = dims.iter().rev().copied().collect();
        let mut data = Vec::with_capacity(self.data.len());
        let nrows = self.nrows();
        for new_row in 0..nrows {
            // digits of new_row under reversed dims, re-read under original dims
            let mut rem = new_row;
            let mut digits = vec![0usize; dims.len()];
            for (slot, d) in new_dims.iter().enumerate().rev() {
                digits[slot] = rem % d;
                rem /= d;
            }
            // digits[slot] is the value of reversed factor `slot`, i.e. of
            // original factor dims.len()-1-slot
            let mut old_row = 0usize;
            for (orig, d) in dims.iter().enumerate() {
                old_row = old_row * d + digits[dims.len() - 1 - orig];
            }
            for col in 0..ncols {
                data.push(self.data[old_row * ncols + col].clone());
            }
        }
        MorphVec::new(new_dims, self.col_dims.clone(), data)
    }
}

/// Compose a 3-digit mixed-radix index `(alpha, beta, gamma)` with middle
/// radix `m` and low radix `c` (the high radix does not enter).
#[inline]
pub fn idx3(alpha: usize, beta: usize, gamma: usize, m: usize, c: usize) -> usize {
    (alpha * m + beta) * c + gamma
}

/// Inverse of [`idx3`]: split `i` into `(alpha, beta, gamma)`.
#[inline]
pub fn split3(i: usize, m: usize, c: usize) -> (usize, usize, usize) {
    let gamma = i % c;
    let rest = i / c;
    (rest / m, rest % m, gamma)
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// `h = (id_a ⊗ M ⊗ id_c) ∘ f` for a column `f`, where the factors of `f`
/// in `mid` form M's domain. M's row factors replace them in the output.
pub fn mid_compose<R: ScalarRing>(
    r: &R,
    f: &MorphVec<R::Elem>,
    mid: std::ops::Range<usize>,
    m: &MorphVec<R::Elem>,
    ops: &mut OpCount,
) -> MorphVec<R::Elem> {
    assert!(f.col_dims.is_empty(), "mid_compose expects a column vector");
    assert!(mid.end <= f.row_dims.len());
    let a = product(&f.row_dims[..mid.start]);
    let c = product(&f.row_dims[mid.end..]);
    let m_in = product(&f.row_dims[mid.start..mid.end]);
    assert_eq!(m.ncols(), m_in, "middle block does not match M's domain");
    let m_out = m.nrows();

    let mut row_dims = Vec::with_capacity(f.row_dims.len());
    row_dims.extend_from_slice(&f.row_dims[..mid.start]);
    row_dims.extend_from_slice(&m.row_dims);
    row_dims.extend_from_slice(&f.row_dims[mid.end..]);

    let mut data = vec![r.zero(); a * m_out * c];
    for alpha in 0..a {
        for beta in 0..m_out {
            for k in 0..m_in {
                let mv = m.at(beta, k);
                if r.is_zero(mv) {
                    continue;
                }
                for gamma in 0..c {
                    let fv = &f.data[idx3(alpha, k, gamma, m_in, c)];
                    if r.is_zero(fv) {
                        continue;
                    }
                    let out = &mut data[idx3(alpha, beta, gamma, m_out, c)];
                    let prod = r.mul(mv, fv);
                    ops.muls += 1;
                    if r.is_zero(out) {
                        *out = prod;
                    } else {
                        *out = r.add(out, &prod);
                        ops.adds += 1;
                    }
                }
            }
        }
    }
    MorphVec::new(row_dims, vec![], data)
}

/// Wrap an evaluation row `d` (domain `X ⊗ Y`, two factor blocks of equal
/// product dimension) around an existing row `f`, producing the row with
/// domain `X ⊗ (f's domain) ⊗ Y`. Entrywise `h[(α,β,γ)] = d[(α,γ)]·f[β]`.
/// Builds nested evaluation pairings outward.
pub fn eval_compose<R: ScalarRing>(
    r: &R,
    d: &MorphVec<R::Elem>,
    f: &MorphVec<R::Elem>,
    ops: &mut OpCount,
) -> MorphVec<R::Elem> {
    assert!(d.row_dims.is_empty(), "eval_compose expects a row for d");
    assert!(f.row_dims.is_empty(), "eval_compose expects a row for f");
    assert_eq!(d.col_dims.len() % 2, 0, "evaluation domain must split in half");
    let half = d.col_dims.len() / 2;
    let a1 = product(&d.col_dims[..half]);
    let a2 = product(&d.col_dims[half..]);
    assert_eq!(a1, a2, "evaluation pairs blocks of equal dimension");
    let b = f.ncols();

    let mut col_dims = Vec::new();
    col_dims.extend_from_slice(&d.col_dims[..half]);
    col_dims.extend_from_slice(&f.col_dims);
    col_dims.extend_from_slice(&d.col_dims[half..]);

    let mut data = vec![r.zero(); a1 * b * a2];
    for alpha in 0..a1 {
        for gamma in 0..a2 {
            let dv = &d.data[alpha * a2 + gamma];
            if r.is_zero(dv) {
                continue;
            }
            for beta in 0..b {
                let fv = &f.data[beta];
                if r.is_zero(fv) {
                    continue;
                }
                data[idx3(alpha, beta, gamma, b, a2)] = r.mul(dv, fv);
                ops.muls += 1;
            }
        }
    }
    MorphVec::new(vec![], col_dims, data)
}

/// `h = (g ⊗ id_W) ∘ (id_U ⊗ f)` where `f : 1 -> V ⊗ W` is a column with
/// `split_f` leading factors forming V, and `g : U ⊗ V -> 1` is a row with
/// `split_g` leading factors forming U. Result maps `U -> W`.
pub fn partial5<R: ScalarRing>(
    r: &R,
    f: &MorphVec<R::Elem>,
    split_f: usize,
    g: &MorphVec<R::Elem>,
    split_g: usize,
    ops: &mut OpCount,
) -> MorphVec<R::Elem> {
    assert!(f.col_dims.is_empty() && g.row_dims.is_empty());
    let b = product(&f.row_dims[..split_f]);
    let c = product(&f.row_dims[split_f..]);
    let a = product(&g.col_dims[..split_g]);
    assert_eq!(product(&g.col_dims[split_g..]), b, "contracted blocks disagree");

    let row_dims: Vec<usize> = f.row_dims[split_f..].to_vec();
    let col_dims: Vec<usize> = g.col_dims[..split_g].to_vec();
    let mut data = vec![r.zero(); c * a];
    for j in 0..a {
        for k in 0..b {
            let gv = &g.data[j * b + k];
            if r.is_zero(gv) {
                continue;
            }
            for i in 0..c {
                let fv = &f.data[k * c + i];
                if r.is_zero(fv) {
                    continue;
                }
                let out = &mut data[i * a + j];
                let prod = r.mul(gv, fv);
                ops.muls += 1;
                if r.is_zero(out) {
                    *out = prod;
                } else {
                    *out = r.add(out, &prod);
                    ops.adds += 1;
                }
            }
        }
    }
    MorphVec::new(row_dims, col_dims, data)
}

/// `h = (id_U ⊗ g) ∘ (f ⊗ id_W)` where `f : 1 -> U ⊗ V` is a column with
/// `split_f` leading factors forming U, and `g : V ⊗ W -> 1` is a row with
/// `split_g` leading factors forming V. Result maps `W -> U`.
pub fn partial6<R: ScalarRing>(
    r: &R,
    f: &MorphVec<R::Elem>,
    split_f: usize,
    g: &MorphVec<R::Elem>,
    split_g: usize,
    ops: &mut OpCount,
) -> MorphVec<R::Elem> {
    assert!(f.col_dims.is_empty() && g.row_dims.is_empty());
    let a = product(&f.row_dims[..split_f]);
    let b = product(&f.row_dims[split_f..]);
    let c = product(&g.col_dims[split_g..]);
    assert_eq!(product(&g.col_dims[..split_g]), b, "contracted blocks disagree");

    let row_dims: Vec<usize> = f.row_dims[..split_f].to_vec();
    let col_dims: Vec<usize> = g.col_dims[split_g..].to_vec();
    let mut data = vec![r.zero(); a * c];
    for i in 0..a {
        for k in 0..b {
            let fv = &f.data[i * b + k];
            if r.is_zero(fv) {
                continue;
            }
            for j in 0..c {
                let gv = &g.data[k * c + j];
                if r.is_zero(gv) {
                    continue;
                }
                let out = &mut data[i * c + j];
                let prod = r.mul(gv, fv);
                ops.muls += 1;
                if r.is_zero(out) {
                    *out = prod;
                } else {
                    *out = r.add(out, &prod);
                    ops.adds += 1;
                }
            }
        }
    }
    MorphVec::new(row_dims, col_dims, data)
}

/// `h = (id_U ⊗ g) ∘ f` where `f : 1 -> U ⊗ V` is a column with `split_f`
/// leading factors forming U and `g : V -> W` is a matrix. Result is the
/// column `1 -> U ⊗ W`.
pub fn partial7<R: ScalarRing>(
    r: &R,
    f: &MorphVec<R::Elem>,
    split_f: usize,
    g: &MorphVec<R::Elem>,
    ops: &mut OpCount,
) -> MorphVec<R::Elem> {
    assert!(f.col_dims.is_empty());
    let a = product(&f.row_dims[..split_f]);
    let b = product(&f.row_dims[split_f..]);
    let c = g.nrows();
    assert_eq!(g.ncols(), b, "contracted blocks disagree");

    let mut row_dims: Vec<usize> = f.row_dims[..split_f].to_vec();
    row_dims.extend_from_slice(&g.row_dims);
    let mut data = vec![r.zero(); a * c];
    for alpha in 0..a {
        for beta in 0..c {
            let mut acc = r.zero();
            for k in 0..b {
                let gv = g.at(beta, k);
                let fv = &f.data[alpha * b + k];
                if r.is_zero(gv) || r.is_zero(fv) {
                    continue;
                }
                let prod = r.mul(gv, fv);
                ops.muls += 1;
                if r.is_zero(&acc) {
                    acc = prod;
                } else {
                    acc = r.add(&acc, &prod);
                    ops.adds += 1;
                }
            }
            data[alpha * c + beta] = acc;
        }
    }
    MorphVec::new(row_dims, vec![], data)
}

/// Identity morphism on the tensor product of `dims`.
pub fn identity<R: ScalarRing>(r: &R, dims: &[usize]) -> MorphVec<R::Elem> {
    let n: usize = dims.iter().product();
    let mut data = vec![r.zero(); n * n];
    for i in 0..n {
        data[i * n + i] = r.one();
    }
    MorphVec::new(dims.to_vec(), dims.to_vec(), data)
}

/// Kronecker (tensor) product `a ⊗ b`; the left operand is the more
/// significant index block.
pub fn kron<R: ScalarRing>(
    r: &R,
    a: &MorphVec<R::Elem>,
    b: &MorphVec<R::Elem>,
    ops: &mut OpCount,
) -> MorphVec<R::Elem> {
    let (rb, cb) = (b.nrows(), b.ncols());
    let mut row_dims = a.row_dims.clone();
    row_dims.extend_from_slice(&b.row_dims);
    let mut col_dims = a.col_dims.clone();
    col_dims.extend_from_slice(&b.col_dims);
    let ncols = a.ncols() * cb;
    let mut data = vec![r.zero(); a.nrows() * rb * ncols];
    for ia in 0..a.nrows() {
        for ja in 0..a.ncols() {
            let av = a.at(ia, ja);
            if r.is_zero(av) {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    let bv = b.at(ib, jb);
                    if r.is_zero(bv) {
                        continue;
                    }
                    data[(ia * rb + ib) * ncols + (ja * cb + jb)] = r.mul(av, bv);
                    ops.muls += 1;
                }
            }
        }
    }
    MorphVec::new(row_dims, col_dims, data)
}

/// Matrix product `a ∘ b` (apply `b` first). Only the total dimensions of
/// the shared boundary must agree; factor lists may differ.
pub fn matmul<R: ScalarRing>(
    r: &R,
    a: &MorphVec<R::Elem>,
    b: &MorphVec<R::Elem>,
    ops: &mut OpCount,
) -> MorphVec<R::Elem> {
    assert_eq!(a.ncols(), b.nrows(), "composition boundary mismatch");
    let (n, m, p) = (a.nrows(), a.ncols(), b.ncols());
    let mut data = vec![r.zero(); n * p];
    for i in 0..n {
        for k in 0..m {
            let av = a.at(i, k);
            if r.is_zero(av) {
                continue;
            }
            for j in 0..p {
                let bv = b.at(k, j);
                if r.is_zero(bv) {
                    continue;
                }
                let out = &mut data[i * p + j];
                let prod = r.mul(av, bv);
                ops.muls += 1;
                if r.is_zero(out) {
                    *out = prod;
                } else {
                    *out = r.add(out, &prod);
                    ops.adds += 1;
                }
            }
        }
    }
    MorphVec::new(a.row_dims.clone(), b.col_dims.clone(), data)
}

/// Multiply every entry by a scalar.
pub fn scale<R: ScalarRing>(
    r: &R,
    s: &R::Elem,
    f: &MorphVec<R::Elem>,
    ops: &mut OpCount,
) -> MorphVec<R::Elem> {
    let data = f
        .data
        .iter()
        .map(|v| {
            if r.is_zero(v) {
                v.clone()
            } else {
                ops.muls += 1;
                r.mul(s, v)
            }
        })
        .collect();
    MorphVec::new(f.row_dims.clone(), f.col_dims.clone(), data)
}
