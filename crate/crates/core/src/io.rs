//! JSON formats for groups, cocycles, representations, actions and diagrams.
//!
//! Group: `{"builtin": "Z3xZ3"}`, `{"cyclic": n}`, `{"dihedral": n}`,
//! `{"symmetric": n}`, `{"product": [g, h]}`, `{"cayley": [[…]]}` or
//! `{"permutations": [[…], …]}`.
//!
//! Cocycle: `{"trivial": true}`, `{"class": [c_1, …]}` (a basis
//! representative), `{"modulus": N, "values": [[…]]}`, `{"inverse": c}`,
//! `{"product": [a, b]}` or `{"from_rep": rep}`.
//!
//! Representation: `{"matrices": [m_g, …]}` with entries `x` or `[re, im]`,
//! or `{"cocycle": c, "multiplicities": […]}` over the canonical irreps.
//!
//! Action: `{"group": g, "summands": [{"size": m, "rep": r}, …], "unital": b}`.
//!
//! Diagram: `{"group": g, "levels": [[{"class": […], "multiplicities": […]}]],
//! "edges": [[{"from": i, "to": j, "label": […]}]], "stationary": {"from": k,
//! "period": p} | null, "unital": b}`.

use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::cohomology::{cocycle_product, Cocycle};
use crate::error::{Error, Result};
use crate::group::{small_group_corpus, FiniteGroup};
use crate::kaction::FDAction;
use crate::limits::{DecoratedBratteli, EdgeSpec, Stationary, SummandSpec};
use crate::numeric::{c, round_to, CMat};
use crate::projrep::{cocycle_of_rep_with, ProjRep, RLambdaElement, RepContext};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field \"{key}\"")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("{what} must be a nonnegative integer")))
}

fn as_i64_vec(v: &Value, what: &str) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array")))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| bad(format!("{what} must contain integers"))))
        .collect()
}

fn as_u64_vec(v: &Value, what: &str) -> Result<Vec<u64>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array")))?
        .iter()
        .map(|x| x.as_u64().ok_or_else(|| bad(format!("{what} must contain nonnegative integers"))))
        .collect()
}

fn as_table(v: &Value, what: &str) -> Result<Vec<Vec<usize>>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array of rows")))?
        .iter()
        .map(|r| Ok(as_u64_vec(r, what)?.into_iter().map(|x| x as usize).collect()))
        .collect()
}

const MAX_ORDER: usize = 256;

pub fn parse_group(v: &Value) -> Result<FiniteGroup> {
    let obj = v.as_object().ok_or_else(|| bad("a group must be a JSON object"))?;
    let small = |n: usize| -> Result<usize> {
        if n == 0 || n > MAX_ORDER {
            Err(bad(format!("group order must lie in 1..={MAX_ORDER}")))
        } else {
            Ok(n)
        }
    };
    if let Some(name) = obj.get("builtin") {
        let name = name.as_str().ok_or_else(|| bad("builtin must be a string"))?;
        return small_group_corpus()
            .into_iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, g)| g)
            .ok_or_else(|| bad(format!("unknown builtin group \"{name}\"")));
    }
    if let Some(n) = obj.get("cyclic") {
        return Ok(FiniteGroup::cyclic(small(as_usize(n, "cyclic")?)?));
    }
    if let Some(n) = obj.get("dihedral") {
        let n = as_usize(n, "dihedral")?;
        small(2 * n.max(1))?;
        if n < 1 {
            return Err(bad("dihedral needs n ≥ 1"));
        }
        return Ok(FiniteGroup::dihedral(n));
    }
    if let Some(n) = obj.get("symmetric") {
        let n = as_usize(n, "symmetric")?;
        if !(1..=5).contains(&n) {
            return Err(bad("symmetric needs 1 ≤ n ≤ 5"));
        }
        return Ok(FiniteGroup::symmetric(n));
    }
    if let Some(p) = obj.get("product") {
        let parts = p.as_array().ok_or_else(|| bad("product must be an array"))?;
        let mut acc = FiniteGroup::trivial();
        for part in parts {
            let g = parse_group(part)?;
            small(acc.order() * g.order())?;
            acc = FiniteGroup::direct_product(&acc, &g);
        }
        return Ok(acc);
    }
    if let Some(t) = obj.get("cayley") {
        let table = as_table(t, "cayley")?;
        small(table.len())?;
        return FiniteGroup::from_cayley_table(&table);
    }
    if let Some(p) = obj.get("permutations") {
        let gens = as_table(p, "permutations")?;
        return FiniteGroup::from_permutation_generators(&gens);
    }
    Err(bad("unrecognized group description"))
}

pub fn group_to_json(g: &FiniteGroup) -> Value {
    json!({ "cayley": g.cayley_table() })
}

fn parse_complex(v: &Value) -> Result<num_complex::Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(c(x, 0.0));
    }
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(c(
            re.as_f64().ok_or_else(|| bad("matrix entries must be numbers"))?,
            im.as_f64().ok_or_else(|| bad("matrix entries must be numbers"))?,
        )),
        _ => Err(bad("matrix entries are numbers or [re, im] pairs")),
    }
}

fn parse_matrix(v: &Value) -> Result<CMat> {
    let rows = v.as_array().ok_or_else(|| bad("a matrix is an array of rows"))?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidRepresentation("empty matrix".into()));
    }
    let mut m = CMat::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| bad("a matrix row is an array"))?;
        if r.len() != n {
            return Err(Error::InvalidRepresentation("matrices must be square".into()));
        }
        for (j, x) in r.iter().enumerate() {
            m[(i, j)] = parse_complex(x)?;
        }
    }
    Ok(m)
}

pub fn parse_matrices(v: &Value, group: &FiniteGroup) -> Result<Vec<CMat>> {
    let ms = v.as_array().ok_or_else(|| bad("matrices must be an array"))?;
    if ms.len() != group.order() {
        return Err(Error::InvalidRepresentation(format!(
            "expected {} matrices, got {}",
            group.order(),
            ms.len()
        )));
    }
    let mats: Vec<CMat> = ms.iter().map(parse_matrix).collect::<Result<_>>()?;
    if mats.iter().any(|m| m.nrows() != mats[0].nrows()) {
        return Err(Error::InvalidRepresentation("matrices differ in size".into()));
    }
    Ok(mats)
}

pub fn parse_cocycle(v: &Value, ctx: &RepContext) -> Result<Cocycle> {
    let g = ctx.group();
    let obj = v.as_object().ok_or_else(|| bad("a cocycle must be a JSON object"))?;
    if let Some(gv) = obj.get("group") {
        if parse_group(gv)? != **g {
            return Err(Error::GroupMismatch);
        }
    }
    if obj.get("trivial").is_some() {
        return Ok(Cocycle::trivial(g.clone()));
    }
    if let Some(cl) = obj.get("class") {
        let coords = as_u64_vec(cl, "class")?;
        let basis = ctx.basis();
        let f = &basis.invariant_factors().factors;
        if coords.len() != f.len() || coords.iter().zip(f).any(|(a, d)| a >= d) {
            return Err(bad(format!("{coords:?} is not a class of {}", basis.invariant_factors())));
        }
        return Ok(basis.representative(&coords));
    }
    if let Some(m) = obj.get("modulus") {
        let modulus = m.as_u64().filter(|&m| m > 0).ok_or_else(|| bad("modulus must be a positive integer"))?;
        let rows = field(v, "values")?.as_array().ok_or_else(|| bad("values must be an array of rows"))?;
        let values = rows.iter().map(|r| as_i64_vec(r, "values")).collect::<Result<Vec<_>>>()?;
        if values.len() != g.order() || values.iter().any(|r| r.len() != g.order()) {
            return Err(bad(format!("values must be a {0}×{0} table", g.order())));
        }
        return Cocycle::new(g.clone(), modulus, &values);
    }
    if let Some(inner) = obj.get("inverse") {
        return Ok(parse_cocycle(inner, ctx)?.inverse());
    }
    if let Some(p) = obj.get("product") {
        let parts = p.as_array().ok_or_else(|| bad("product must be an array"))?;
        let mut acc = Cocycle::trivial(g.clone());
        for part in parts {
            acc = cocycle_product(&acc, &parse_cocycle(part, ctx)?)?;
        }
        return Ok(acc);
    }
    if let Some(r) = obj.get("from_rep") {
        return Ok(parse_rep(r, ctx)?.cocycle().clone());
    }
    Err(bad("unrecognized cocycle description"))
}

pub fn cocycle_to_json(c: &Cocycle) -> Value {
    json!({ "modulus": c.modulus(), "values": c.table() })
}

pub fn parse_rep(v: &Value, ctx: &RepContext) -> Result<ProjRep> {
    let g = ctx.group();
    if let Some(m) = v.get("matrices") {
        let mats = parse_matrices(m, g)?;
        return Ok(cocycle_of_rep_with(g, mats, ctx.tolerances())?.1);
    }
    if let Some(cv) = v.get("cocycle") {
        let lambda = parse_cocycle(cv, ctx)?;
        let table = ctx.irrep_table(&lambda)?;
        let mult = as_i64_vec(field(v, "multiplicities")?, "multiplicities")?;
        return RLambdaElement::new(table, mult)?.realize();
    }
    Err(bad("a representation gives \"matrices\" or \"cocycle\" with \"multiplicities\""))
}

pub fn parse_action(v: &Value, ctx: &RepContext) -> Result<FDAction> {
    let summands = field(v, "summands")?.as_array().ok_or_else(|| bad("summands must be an array"))?;
    let mut reps = Vec::with_capacity(summands.len());
    for s in summands {
        let rep = parse_rep(field(s, "rep")?, ctx)?;
        if let Some(size) = s.get("size") {
            if as_usize(size, "size")? != rep.dim() {
                return Err(Error::InvalidRepresentation(format!(
                    "summand size {} does not match representation dimension {}",
                    size,
                    rep.dim()
                )));
            }
        }
        reps.push(rep);
    }
    let unital = v.get("unital").map_or(Ok(true), |u| u.as_bool().ok_or_else(|| bad("unital must be a boolean")))?;
    FDAction::new(ctx.group().clone(), reps, unital)
}

/// The group of a file that carries a `"group"` field.
pub fn file_group(v: &Value) -> Result<Arc<FiniteGroup>> {
    Ok(Arc::new(parse_group(field(v, "group")?)?))
}

pub fn parse_diagram(v: &Value, group: Arc<FiniteGroup>) -> Result<DecoratedBratteli> {
    let levels = field(v, "levels")?
        .as_array()
        .ok_or_else(|| bad("levels must be an array"))?
        .iter()
        .map(|l| {
            l.as_array()
                .ok_or_else(|| bad("a level is an array of summands"))?
                .iter()
                .map(|s| {
                    Ok(SummandSpec {
                        class: as_u64_vec(field(s, "class")?, "class")?,
                        multiplicities: as_i64_vec(field(s, "multiplicities")?, "multiplicities")?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = match v.get("edges") {
        None => Vec::new(),
        Some(e) => e
            .as_array()
            .ok_or_else(|| bad("edges must be an array"))?
            .iter()
            .map(|set| {
                set.as_array()
                    .ok_or_else(|| bad("an edge set is an array"))?
                    .iter()
                    .map(|e| {
                        Ok(EdgeSpec {
                            from: as_usize(field(e, "from")?, "from")?,
                            to: as_usize(field(e, "to")?, "to")?,
                            class: e.get("class").map(|c| as_u64_vec(c, "class")).transpose()?,
                            label: as_i64_vec(field(e, "label")?, "label")?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let stationary = match v.get("stationary") {
        None | Some(Value::Null) => None,
        Some(s) => Some(Stationary { from: as_usize(field(s, "from")?, "from")?, period: as_usize(field(s, "period")?, "period")? }),
    };
    let unital = v.get("unital").map_or(Ok(true), |u| u.as_bool().ok_or_else(|| bad("unital must be a boolean")))?;
    Ok(DecoratedBratteli { group, levels, edges, stationary, unital })
}

pub fn diagram_to_json(d: &DecoratedBratteli) -> Value {
    json!({
        "group": group_to_json(&d.group),
        "levels": d.levels,
        "edges": d.edges,
        "stationary": d.stationary,
        "unital": d.unital,
    })
}

pub fn rep_to_json(p: &ProjRep) -> Value {
    let mats: Vec<Value> = p
        .matrices()
        .iter()
        .map(|m| {
            let rows: Vec<Value> = (0..m.nrows())
                .map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect()))
                .collect();
            Value::Array(rows)
        })
        .collect();
    json!({ "matrices": mats })
}

/// `[re, im]` rounded to twelve decimals, so printed output is stable.
pub fn complex_json(z: num_complex::Complex64) -> Value {
    json!([round_to(z.re, 1e12), round_to(z.im, 1e12)])
}

pub fn action_to_json(a: &FDAction) -> Value {
    json!({
        "group": group_to_json(a.group()),
        "summands": a.summands().iter().map(|p| json!({ "size": p.dim(), "rep": rep_to_json(p) })).collect::<Vec<_>>(),
        "unital": a.is_unital(),
    })
}
