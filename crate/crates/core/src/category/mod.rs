//! Strict ribbon category data presented by matrices.
//!
//! Objects carry a dimension and a dual (dual-of-dual is the object
//! itself); the structure maps are dense matrices over the Laurent ring:
//! braiding `c_{V,W}: V⊗W → W⊗V` with inverse, twist `θ_V` with inverse,
//! evaluation `d_V: V*⊗V → 1` and co-evaluation `b_V: 1 → V⊗V*`, plus a
//! framing unit `φ = ±v^k`. Loading runs the executable axiom suite, so
//! data that reaches the engine is certified, not assumed.

mod axioms;
mod io;

pub use axioms::{AxiomFailure, AxiomReport};
pub use io::{load_category, save_category};

use crate::kernels::{self, MorphVec, OpCount};
use crate::ring::{LaurentPoly, RingError};
use crate::scalar::ExactRing;
use num_traits::Signed;
use thiserror::Error;

pub type Morphism = MorphVec<LaurentPoly>;

#[derive(Debug, Error)]
pub enum CategoryError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("axiom failure:\n{0}")]
    Axiom(AxiomReport),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown builtin category `{0}` (expected trivial or sl2)")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("category file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonObject {
    pub name: String,
    pub dim: usize,
    /// Index of the dual object; `dual(dual(v)) == v`.
    pub dual: usize,
}

#[derive(Clone, Debug)]
pub struct RibbonData {
    pub variable: String,
    pub objects: Vec<RibbonObject>,
    /// `c_{V,W}` indexed by `v * n + w`.
    braiding: Vec<Morphism>,
    braiding_inv: Vec<Morphism>,
    twist: Vec<Morphism>,
    twist_inv: Vec<Morphism>,
    eval: Vec<Morphism>,
    coeval: Vec<Morphism>,
    pub framing_unit: LaurentPoly,
    pub framing_unit_inv: LaurentPoly,
}

impl RibbonData {
    /// Assemble and shape-check category data without running the axiom
    /// suite; `load_category` and `builtin` add the axiom gate.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        variable: String,
        objects: Vec<RibbonObject>,
        braiding: Vec<Morphism>,
        braiding_inv: Vec<Morphism>,
        twist: Vec<Morphism>,
        twist_inv: Vec<Morphism>,
        eval: Vec<Morphism>,
        coeval: Vec<Morphism>,
        framing_unit: LaurentPoly,
    ) -> Result<Self, CategoryError> {
        let n = objects.len();
        let fail = |msg: String| Err(CategoryError::Schema(msg));
        if n == 0 {
            return fail("category needs at least one object".into());
        }
        for (i, o) in objects.iter().enumerate() {
            if o.dim == 0 {
                return fail(format!("object {} has dimension 0", o.name));
            }
            if o.dual >= n || objects[o.dual].dual != i || objects[o.dual].dim != o.dim {
                return fail(format!("object {} has an inconsistent dual", o.name));
            }
        }
        if braiding.len() != n * n || braiding_inv.len() != n * n {
            return fail("braiding tables must cover every ordered object pair".into());
        }
        if [twist.len(), twist_inv.len(), eval.len(), coeval.len()].iter().any(|&l| l != n) {
            return fail("twist/eval/coeval tables must cover every object".into());
        }
        for v in 0..n {
            for w in 0..n {
                let (dv, dw) = (objects[v].dim, objects[w].dim);
                let c = &braiding[v * n + w];
                if c.row_dims != [dw, dv] || c.col_dims != [dv, dw] {
                    return fail(format!(
                        "braiding {},{} must map {}⊗{} to {}⊗{}",
                        objects[v].name, objects[w].name, dv, dw, dw, dv
                    ));
                }
                let ci = &braiding_inv[v * n + w];
                if ci.row_dims != [dv, dw] || ci.col_dims != [dw, dv] {
                    return fail(format!(
                        "inverse braiding {},{} has the wrong shape",
                        objects[v].name, objects[w].name
                    ));
                }
            }
            let dv = objects[v].dim;
            let dvs = objects[objects[v].dual].dim;
            if twist[v].row_dims != [dv] || twist[v].col_dims != [dv] {
                return fail(format!("twist of {} must be {dv}x{dv}", objects[v].name));
            }
            if twist_inv[v].row_dims != [dv] || twist_inv[v].col_dims != [dv] {
                return fail(format!("inverse twist of {} must be {dv}x{dv}", objects[v].name));
            }
            if !eval[v].row_dims.is_empty() || eval[v].col_dims != [dvs, dv] {
                return fail(format!("evaluation of {} must be a 1x{} row", objects[v].name, dvs * dv));
            }
            if coeval[v].row_dims != [dv, dvs] || !coeval[v].col_dims.is_empty() {
                return fail(format!("co-evaluation of {} must be a {}x1 column", objects[v].name, dv * dvs));
            }
        }
        let framing_unit_inv = invert_unit(&framing_unit).ok_or_else(|| {
            CategoryError::Schema("framing unit must be a monomial with coefficient ±1".into())
        })?;
        let data = RibbonData {
            variable,
            objects,
            braiding,
            braiding_inv,
            twist,
            twist_inv,
            eval,
            coeval,
            framing_unit,
            framing_unit_inv,
        };
        for m in data.all_morphisms() {
            for e in &m.data {
                if let Some(v) = e.var() {
                    if v != data.variable {
                        return Err(CategoryError::Schema(format!(
                            "matrix entry uses variable `{v}` but the category declares `{}`",
                            data.variable
                        )));
                    }
                }
            }
        }
        Ok(data)
    }

    fn all_morphisms(&self) -> impl Iterator<Item = &Morphism> {
        self.braiding
            .iter()
            .chain(&self.braiding_inv)
            .chain(&self.twist)
            .chain(&self.twist_inv)
            .chain(&self.eval)
            .chain(&self.coeval)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }

    pub fn dim(&self, v: usize) -> usize {
        self.objects[v].dim
    }

    pub fn dual(&self, v: usize) -> usize {
        self.objects[v].dual
    }

    pub fn max_dim(&self) -> usize {
        self.objects.iter().map(|o| o.dim).max().unwrap_or(1)
    }

    /// `c_{V,W}: V⊗W → W⊗V`.
    pub fn braiding(&self, v: usize, w: usize) -> &Morphism {
        &self.braiding[v * self.objects.len() + w]
    }

    /// `(c_{V,W})^{-1}: W⊗V → V⊗W`.
    pub fn braiding_inv(&self, v: usize, w: usize) -> &Morphism {
        &self.braiding_inv[v * self.objects.len() + w]
    }

    pub fn twist(&self, v: usize) -> &Morphism {
        &self.twist[v]
    }

    pub fn twist_inv(&self, v: usize) -> &Morphism {
        &self.twist_inv[v]
    }

    /// `d_V: V*⊗V → 1`.
    pub fn eval(&self, v: usize) -> &Morphism {
        &self.eval[v]
    }

    /// `b_V: 1 → V⊗V*`.
    pub fn coeval(&self, v: usize) -> &Morphism {
        &self.coeval[v]
    }

    /// Quantum dimension: the value of a plain unknotted loop coloured `v`.
    pub fn quantum_dim(&self, v: usize) -> LaurentPoly {
        let dstar = self.eval(self.dual(v));
        let b = self.coeval(v);
        let mut acc = LaurentPoly::zero();
        for (i, e) in b.data.iter().enumerate() {
            acc = acc.checked_add(&dstar.data[i].checked_mul(e).unwrap()).unwrap();
        }
        acc
    }

    pub fn axiom_check(&self) -> AxiomReport {
        axioms::run(self)
    }

    /// Rule: `f* = (d_V ⊗ id_{U*}) ∘ (id_{V*} ⊗ f ⊗ id_{U*}) ∘ (id_{V*} ⊗ b_U)`
    /// for `f: U → V`, giving `f*: V* → U*`.
    pub fn dual_morphism(&self, f: &Morphism, u: usize, v: usize) -> Morphism {
        assert_eq!(f.nrows(), self.dim(v), "dual_morphism: codomain mismatch");
        assert_eq!(f.ncols(), self.dim(u), "dual_morphism: domain mismatch");
        let r = ExactRing;
        let mut ops = OpCount::default();
        let id_vstar = kernels::identity(&r, &[self.dim(self.dual(v))]);
        let id_ustar = kernels::identity(&r, &[self.dim(self.dual(u))]);
        let a1 = kernels::kron(&r, &id_vstar, self.coeval(u), &mut ops);
        let mid = kernels::kron(&r, &id_vstar, f, &mut ops);
        let a2 = kernels::kron(&r, &mid, &id_ustar, &mut ops);
        let a3 = kernels::kron(&r, self.eval(v), &id_ustar, &mut ops);
        let lower = kernels::matmul(&r, &a2, &a1, &mut ops);
        kernels::matmul(&r, &a3, &lower, &mut ops)
    }
}

fn invert_unit(p: &LaurentPoly) -> Option<LaurentPoly> {
    if p.num_terms() != 1 {
        return None;
    }
    let (e, c) = p.terms().next().map(|(e, c)| (e, c.clone()))?;
    if !c.abs().eq(&num_bigint::BigInt::from(1)) {
        return None;
    }
    Some(match p.var() {
        Some(v) => LaurentPoly::monomial(v, c, -e),
        None => LaurentPoly::constant(c),
    })
}

/// Built-in categories: `trivial` (one invisible object) and `sl2` (the
/// two-dimensional self-dual object whose braiding satisfies the Kauffman
/// smoothing relation; certified by the axiom suite and oracle agreement).
pub fn builtin(name: &str) -> Result<RibbonData, CategoryError> {
    let data = match name {
        "trivial" => trivial_parts()?,
        "sl2" => sl2_parts()?,
        other => return Err(CategoryError::UnknownBuiltin(other.to_string())),
    };
    let report = data.axiom_check();
    if !report.passed() {
        return Err(CategoryError::Axiom(report));
    }
    Ok(data)
}

fn poly(s: &str) -> LaurentPoly {
    crate::ring::text::parse(s).expect("builtin entries parse")
}

fn morphism(row_dims: Vec<usize>, col_dims: Vec<usize>, entries: &[&str]) -> Morphism {
    MorphVec::new(row_dims, col_dims, entries.iter().map(|s| poly(s)).collect())
}

fn trivial_parts() -> Result<RibbonData, CategoryError> {
    let one = vec!["1"];
    RibbonData::from_parts(
        "v".into(),
        vec![RibbonObject { name: "I".into(), dim: 1, dual: 0 }],
        vec![morphism(vec![1, 1], vec![1, 1], &one)],
        vec![morphism(vec![1, 1], vec![1, 1], &one)],
        vec![morphism(vec![1], vec![1], &one)],
        vec![morphism(vec![1], vec![1], &one)],
        vec![morphism(vec![], vec![1, 1], &one)],
        vec![morphism(vec![1, 1], vec![], &one)],
        poly("1"),
    )
}

fn sl2_parts() -> Result<RibbonData, CategoryError> {
    // braiding = A·id + A^{-1}·(b∘d), the smoothing relation in matrix form
    let c = morphism(
        vec![2, 2],
        vec![2, 2],
        &[
            "A", "0", "0", "0",
            "0", "0", "A^-1", "0",
            "0", "A^-1", "A - A^-3", "0",
            "0", "0", "0", "A",
        ],
    );
    let c_inv = morphism(
        vec![2, 2],
        vec![2, 2],
        &[
            "A^-1", "0", "0", "0",
            "0", "A^-1 - A^3", "A", "0",
            "0", "A", "0", "0",
            "0", "0", "0", "A^-1",
        ],
    );
    RibbonData::from_parts(
        "A".into(),
        vec![RibbonObject { name: "V".into(), dim: 2, dual: 0 }],
        vec![c],
        vec![c_inv],
        vec![morphism(vec![2], vec![2], &["-A^3", "0", "0", "-A^3"])],
        vec![morphism(vec![2], vec![2], &["-A^-3", "0", "0", "-A^-3"])],
        vec![morphism(vec![], vec![2, 2], &["0", "A", "-A^-1", "0"])],
        vec![morphism(vec![2, 2], vec![], &["0", "-A", "A^-1", "0"])],
        poly("-A^3"),
    )
}
