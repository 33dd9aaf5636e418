//! JSON (de)serialization for category files.
//!
//! Schema: `variable`, `objects: [{name, dim, dual}]`,
//! `braiding`/`braiding_inv`: `{"V,W": [[poly]]}` covering every ordered
//! pair, `twist`/`twist_inv`: `{"V": [[poly]]}`, `eval`/`coeval`:
//! `{"V": [poly]}` (flat vectors of length dim·dim), `framing_unit`:
//! poly. Polynomial strings use the ring text grammar. Loading runs the
//! full axiom suite; a file that parses but fails an identity is
//! rejected with the identity's name and the offending entry.

use super::{CategoryError, Morphism, RibbonData, RibbonObject};
use crate::kernels::MorphVec;
use crate::ring::{text, LaurentPoly};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
struct FileFormat {
    variable: String,
    objects: Vec<ObjectEntry>,
    braiding: BTreeMap<String, Vec<Vec<String>>>,
    braiding_inv: BTreeMap<String, Vec<Vec<String>>>,
    twist: BTreeMap<String, Vec<Vec<String>>>,
    twist_inv: BTreeMap<String, Vec<Vec<String>>>,
    eval: BTreeMap<String, Vec<String>>,
    coeval: BTreeMap<String, Vec<String>>,
    framing_unit: String,
}

#[derive(Serialize, Deserialize)]
struct ObjectEntry {
    name: String,
    dim: usize,
    dual: String,
}

fn parse_poly(s: &str, what: &str) -> Result<LaurentPoly, CategoryError> {
    text::parse(s).map_err(|e| CategoryError::Schema(format!("{what}: bad polynomial `{s}`: {e}")))
}

fn parse_matrix(
    rows: &[Vec<String>],
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
    what: &str,
) -> Result<Morphism, CategoryError> {
    let nrows: usize = row_dims.iter().product();
    let ncols: usize = col_dims.iter().product();
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(CategoryError::Schema(format!("{what}: expected a {nrows}x{ncols} matrix")));
    }
    let mut data = Vec::with_capacity(nrows * ncols);
    for row in rows {
        for cell in row {
            data.push(parse_poly(cell, what)?);
        }
    }
    Ok(MorphVec::new(row_dims, col_dims, data))
}

fn parse_vector(
    cells: &[String],
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
    what: &str,
) -> Result<Morphism, CategoryError> {
    let n: usize = row_dims.iter().chain(col_dims.iter()).product();
    if cells.len() != n {
        return Err(CategoryError::Schema(format!("{what}: expected {n} entries")));
    }
    let mut data = Vec::with_capacity(n);
    for cell in cells {
        data.push(parse_poly(cell, what)?);
    }
    Ok(MorphVec::new(row_dims, col_dims, data))
}

/// Parse, shape-check, and axiom-check a category file.
pub fn load_category(input: &str) -> Result<RibbonData, CategoryError> {
    let file: FileFormat = serde_json::from_str(input)?;
    let names: Vec<&str> = file.objects.iter().map(|o| o.name.as_str()).collect();
    let index_of = |name: &str| -> Result<usize, CategoryError> {
        names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| CategoryError::UnknownObject(name.to_string()))
    };
    let mut objects = Vec::with_capacity(file.objects.len());
    for o in &file.objects {
        objects.push(RibbonObject { name: o.name.clone(), dim: o.dim, dual: index_of(&o.dual)? });
    }

    let n = objects.len();
    let mut braiding = Vec::with_capacity(n * n);
    let mut braiding_inv = Vec::with_capacity(n * n);
    for v in 0..n {
        for w in 0..n {
            let key = format!("{},{}", objects[v].name, objects[w].name);
            let (dv, dw) = (objects[v].dim, objects[w].dim);
            let rows = file.braiding.get(&key).ok_or_else(|| {
                CategoryError::Schema(format!("braiding is missing the pair `{key}`"))
            })?;
            braiding.push(parse_matrix(rows, vec![dw, dv], vec![dv, dw], &format!("braiding {key}"))?);
            let rows = file.braiding_inv.get(&key).ok_or_else(|| {
                CategoryError::Schema(format!("braiding_inv is missing the pair `{key}`"))
            })?;
            braiding_inv.push(parse_matrix(
                rows,
                vec![dv, dw],
                vec![dw, dv],
                &format!("braiding_inv {key}"),
            )?);
        }
    }

    let mut twist = Vec::with_capacity(n);
    let mut twist_inv = Vec::with_capacity(n);
    let mut eval = Vec::with_capacity(n);
    let mut coeval = Vec::with_capacity(n);
    for o in &objects {
        let d = o.dim;
        let ds = objects[o.dual].dim;
        let need = |map: &BTreeMap<String, Vec<Vec<String>>>, table: &str| {
            map.get(&o.name)
                .cloned()
                .ok_or_else(|| CategoryError::Schema(format!("{table} is missing `{}`", o.name)))
        };
        twist.push(parse_matrix(&need(&file.twist, "twist")?, vec![d], vec![d], &format!("twist {}", o.name))?);
        twist_inv.push(parse_matrix(
            &need(&file.twist_inv, "twist_inv")?,
            vec![d],
            vec![d],
            &format!("twist_inv {}", o.name),
        )?);
        let ev = file.eval.get(&o.name).ok_or_else(|| {
            CategoryError::Schema(format!("eval is missing `{}`", o.name))
        })?;
        eval.push(parse_vector(ev, vec![], vec![ds, d], &format!("eval {}", o.name))?);
        let cv = file.coeval.get(&o.name).ok_or_else(|| {
            CategoryError::Schema(format!("coeval is missing `{}`", o.name))
        })?;
        coeval.push(parse_vector(cv, vec![d, ds], vec![], &format!("coeval {}", o.name))?);
    }

    let framing_unit = parse_poly(&file.framing_unit, "framing_unit")?;
    let data = RibbonData::from_parts(
        file.variable,
        objects,
        braiding,
        braiding_inv,
        twist,
        twist_inv,
        eval,
        coeval,
        framing_unit,
    )?;
    let report = data.axiom_check();
    if !report.passed() {
        return Err(CategoryError::Axiom(report));
    }
    Ok(data)
}

/// Render category data back to canonical pretty-printed JSON.
pub fn save_category(cat: &RibbonData) -> String {
    let var = &cat.variable;
    let rend = |p: &LaurentPoly| text::render(p, var);
    let matrix = |m: &Morphism| -> Vec<Vec<String>> {
        let ncols = m.ncols();
        (0..m.nrows()).map(|i| (0..ncols).map(|j| rend(m.at(i, j))).collect()).collect()
    };
    let vector = |m: &Morphism| -> Vec<String> { m.data.iter().map(&rend).collect() };

    let mut braiding = BTreeMap::new();
    let mut braiding_inv = BTreeMap::new();
    for v in 0..cat.object_count() {
        for w in 0..cat.object_count() {
            let key = format!("{},{}", cat.objects[v].name, cat.objects[w].name);
            braiding.insert(key.clone(), matrix(cat.braiding(v, w)));
            braiding_inv.insert(key, matrix(cat.braiding_inv(v, w)));
        }
    }
    let mut twist = BTreeMap::new();
    let mut twist_inv = BTreeMap::new();
    let mut eval = BTreeMap::new();
    let mut coeval = BTreeMap::new();
    for (v, o) in cat.objects.iter().enumerate() {
        twist.insert(o.name.clone(), matrix(cat.twist(v)));
        twist_inv.insert(o.name.clone(), matrix(cat.twist_inv(v)));
        eval.insert(o.name.clone(), vector(cat.eval(v)));
        coeval.insert(o.name.clone(), vector(cat.coeval(v)));
    }
    let file = FileFormat {
        variable: cat.variable.clone(),
        objects: cat
            .objects
            .iter()
            .map(|o| ObjectEntry {
                name: o.name.clone(),
                dim: o.dim,
                dual: cat.objects[o.dual].name.clone(),
            })
            .collect(),
        braiding,
        braiding_inv,
        twist,
        twist_inv,
        eval,
        coeval,
        framing_unit: rend(&cat.framing_unit),
    };
    serde_json::to_string_pretty(&file).expect("category serializes") + "\n"
}
