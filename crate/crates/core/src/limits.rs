//! Decorated Bratteli diagrams: inductive systems of spectrally trivial
//! actions whose connecting maps are recorded by their labels.
//!
//! A level is a list of summands, each a cohomology class together with a
//! multiplicity vector over the canonical irreps of the representative
//! cocycle of that class. An edge `i → j` between consecutive levels carries
//! a positive element of `R^{λ̄_i λ_j}(G)`. Stationary diagrams list the levels
//! `0..from+period` together with one edge set per listed level; the last
//! edge set wraps around to level `from`.
//!
//! Stationary diagrams unroll by pushing multiplicities forward along the
//! periodic edges and adding a periodic pad: the pad of template level
//! `t ≥ 1` is the difference between its listed multiplicities and the
//! pushed-forward ones from level `t - 1`; the pad of level `0` is zero.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cohomology::{cocycle_product, same_group, Cocycle};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::intlin::{rank_of_power, IntMatrix};
use crate::kaction::{
    check_compatible, ell_from_multiplicities, hom_from_labels, iso_invariants, labels_of, realize_labels,
    unitary_intertwiner, EllInvariant, EquivariantHom, FDAction, InvariantHom, Labels,
};
use crate::projrep::{RLambdaElement, RepContext};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandSpec {
    pub class: Vec<u64>,
    pub multiplicities: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    /// Optional class of the label, checked against the endpoints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<Vec<u64>>,
    pub label: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stationary {
    pub from: usize,
    pub period: usize,
}

#[derive(Clone, Debug)]
pub struct DecoratedBratteli {
    pub group: Arc<FiniteGroup>,
    pub levels: Vec<Vec<SummandSpec>>,
    pub edges: Vec<Vec<EdgeSpec>>,
    pub stationary: Option<Stationary>,
    pub unital: bool,
}

impl DecoratedBratteli {
    /// Number of levels of a finite diagram; `None` when stationary.
    pub fn finite_len(&self) -> Option<usize> {
        self.stationary.is_none().then_some(self.levels.len())
    }

    /// The listed level whose classes and edges level `k` repeats.
    pub fn template(&self, k: usize) -> usize {
        match self.stationary {
            Some(s) if k >= s.from => s.from + (k - s.from) % s.period,
            _ => k,
        }
    }

    /// Levels explored at a search depth: a finite diagram up to its last
    /// level, a stationary one through `depth` periods past its transient.
    pub fn explored(&self, depth: usize) -> usize {
        match self.stationary {
            Some(s) => s.from + depth.max(1) * s.period,
            None => self.available(depth.max(1)),
        }
    }

    /// Levels available for truncation, capped at `want`.
    pub fn available(&self, want: usize) -> usize {
        match self.finite_len() {
            Some(n) => want.min(n),
            None => want,
        }
    }
}

fn class_cocycle(ctx: &RepContext, class: &[u64]) -> Result<Cocycle> {
    let b = ctx.basis();
    let f = &b.invariant_factors().factors;
    if class.len() != f.len() || class.iter().zip(f).any(|(c, d)| c >= d) {
        return Err(Error::InvalidInput(format!("{class:?} is not a class of {}", b.invariant_factors())));
    }
    Ok(b.representative(class))
}

/// Multiplicities of every level and labels of every step, up to a depth.
#[derive(Clone, Debug)]
pub struct Unrolled {
    pub units: Vec<Vec<RLambdaElement>>,
    pub labels: Vec<Labels>,
}

impl Unrolled {
    pub fn level_dims(&self, k: usize) -> Vec<usize> {
        self.units[k].iter().map(|u| u.dim() as usize).collect()
    }
}

fn level_units(ctx: &RepContext, level: &[SummandSpec], k: usize) -> Result<Vec<RLambdaElement>> {
    level
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let table = ctx.irrep_table(&class_cocycle(ctx, &s.class)?)?;
            if s.multiplicities.len() != table.len() || s.multiplicities.iter().any(|&m| m < 0) {
                return Err(Error::BadBookkeeping { level: k, summand: j });
            }
            let u = RLambdaElement::new(table, s.multiplicities.clone())?;
            if u.dim() == 0 {
                return Err(Error::BadBookkeeping { level: k, summand: j });
            }
            Ok(u)
        })
        .collect()
}

fn edge_labels(ctx: &RepContext, d: &DecoratedBratteli, step: usize, src: &[Cocycle], dst: &[Cocycle]) -> Result<Labels> {
    let basis = ctx.basis();
    let mut labels: Labels = src
        .iter()
        .map(|a| {
            dst.iter()
                .map(|b| Ok(RLambdaElement::zero(ctx.irrep_table(&cocycle_product(&a.inverse(), b)?)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut seen = std::collections::BTreeSet::new();
    for e in &d.edges[step] {
        let bad = Error::BadEdgeClass { level: step, from: e.from, to: e.to };
        if e.from >= src.len() || e.to >= dst.len() {
            return Err(bad);
        }
        if !seen.insert((e.from, e.to)) {
            return Err(Error::InvalidInput(format!("duplicate edge {} -> {} at level {step}", e.from, e.to)));
        }
        let table = labels[e.from][e.to].table().clone();
        if let Some(c) = &e.class {
            if *c != basis.class_coordinates(table.cocycle())? {
                return Err(bad);
            }
        }
        if e.label.len() != table.len() || e.label.iter().any(|&v| v < 0) {
            return Err(bad);
        }
        labels[e.from][e.to] = RLambdaElement::new(table, e.label.clone())?;
    }
    Ok(labels)
}

fn push(ctx: &RepContext, units: &[RLambdaElement], labels: &Labels, dst: &[Cocycle]) -> Result<Vec<RLambdaElement>> {
    let mut out = dst
        .iter()
        .map(|c| Ok(RLambdaElement::zero(ctx.irrep_table(c)?)))
        .collect::<Result<Vec<_>>>()?;
    for (i, u) in units.iter().enumerate() {
        for (j, x) in labels[i].iter().enumerate() {
            if x.coeffs().iter().any(|&v| v != 0) {
                out[j] = out[j].add(&ctx.pairing(u, x)?)?;
            }
        }
    }
    Ok(out)
}

fn sub(a: &RLambdaElement, b: &RLambdaElement) -> Vec<i64> {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x - y).collect()
}

struct Prepared {
    cocycles: Vec<Vec<Cocycle>>,
    listed: Vec<Vec<RLambdaElement>>,
    labels: Vec<Labels>,
    pads: Vec<Vec<RLambdaElement>>,
}

fn prepare(ctx: &RepContext, d: &DecoratedBratteli) -> Result<Prepared> {
    if !same_group(ctx.group(), &d.group) {
        return Err(Error::GroupMismatch);
    }
    if d.levels.is_empty() || d.levels.iter().any(Vec::is_empty) {
        return Err(Error::InvalidInput("every level needs at least one summand".into()));
    }
    let nl = d.levels.len();
    match d.stationary {
        Some(s) => {
            if s.period == 0 || s.from + s.period != nl || d.edges.len() != nl {
                return Err(Error::InvalidInput(
                    "a stationary diagram lists levels 0..from+period and one edge set per level".into(),
                ));
            }
        }
        None => {
            if d.edges.len() + 1 != nl {
                return Err(Error::InvalidInput("a finite diagram has one edge set per consecutive pair".into()));
            }
        }
    }
    let cocycles = d
        .levels
        .iter()
        .map(|l| l.iter().map(|s| class_cocycle(ctx, &s.class)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let listed = d.levels.iter().enumerate().map(|(k, l)| level_units(ctx, l, k)).collect::<Result<Vec<_>>>()?;
    let mut labels = Vec::with_capacity(d.edges.len());
    for step in 0..d.edges.len() {
        let next = if step + 1 < nl { step + 1 } else { d.stationary.expect("wrap").from };
        labels.push(edge_labels(ctx, d, step, &cocycles[step], &cocycles[next])?);
    }
    let mut pads = vec![Vec::new(); nl];
    for k in 0..nl {
        if k == 0 {
            pads[0] = cocycles[0]
                .iter()
                .map(|c| Ok(RLambdaElement::zero(ctx.irrep_table(c)?)))
                .collect::<Result<_>>()?;
            continue;
        }
        let pushed = push(ctx, &listed[k - 1], &labels[k - 1], &cocycles[k])?;
        let mut pad = Vec::with_capacity(pushed.len());
        for (j, (have, got)) in listed[k].iter().zip(&pushed).enumerate() {
            let diff = sub(have, got);
            if diff.iter().any(|&v| v < 0) || (d.unital && diff.iter().any(|&v| v != 0)) {
                return Err(Error::BadBookkeeping { level: k, summand: j });
            }
            pad.push(RLambdaElement::new(have.table().clone(), diff)?);
        }
        pads[k] = pad;
    }
    Ok(Prepared { cocycles, listed, labels, pads })
}

/// Checks classes, positivity and dimension bookkeeping.
pub fn validate_diagram(ctx: &RepContext, d: &DecoratedBratteli) -> Result<()> {
    prepare(ctx, d).map(|_| ())
}

/// Multiplicities and labels for the first `depth` levels.
pub fn unroll(ctx: &RepContext, d: &DecoratedBratteli, depth: usize) -> Result<Unrolled> {
    let p = prepare(ctx, d)?;
    if let Some(n) = d.finite_len() {
        if depth > n {
            return Err(Error::InvalidInput(format!("the diagram has only {n} levels")));
        }
    }
    let mut units: Vec<Vec<RLambdaElement>> = Vec::with_capacity(depth);
    let mut labels = Vec::with_capacity(depth.saturating_sub(1));
    for k in 0..depth {
        if k < p.listed.len() {
            units.push(p.listed[k].clone());
        } else {
            let t = d.template(k);
            let prev = d.template(k - 1);
            let pushed = push(ctx, &units[k - 1], &p.labels[prev], &p.cocycles[t])?;
            let level = pushed.iter().zip(&p.pads[t]).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
            units.push(level);
        }
        if k > 0 {
            labels.push(p.labels[d.template(k - 1)].clone());
        }
    }
    Ok(Unrolled { units, labels })
}

/// The concrete action at level `k`.
pub fn level_action(ctx: &RepContext, d: &DecoratedBratteli, k: usize) -> Result<FDAction> {
    let u = unroll(ctx, d, k + 1)?;
    let reps = u.units[k].iter().map(RLambdaElement::realize).collect::<Result<Vec<_>>>()?;
    FDAction::new(d.group.clone(), reps, d.unital)
}

/// The connecting map from level `k` to `k + 1`, realized concretely, with
/// its invariant.
pub fn connecting_hom(ctx: &Arc<RepContext>, d: &DecoratedBratteli, k: usize, seed: u64) -> Result<(EquivariantHom, InvariantHom)> {
    let u = unroll(ctx, d, k + 2)?;
    let alpha = Arc::new(level_action(ctx, d, k)?);
    let beta = Arc::new(level_action(ctx, d, k + 1)?);
    let src = ell_from_multiplicities(ctx, &u.units[k], d.unital)?;
    let dst = ell_from_multiplicities(ctx, &u.units[k + 1], d.unital)?;
    let gamma = hom_from_labels(&src, &dst, &u.labels[k])?;
    let t = realize_labels(&u.labels[k], &alpha, &beta, ctx, crate::numeric::mix_all(seed, [k as u64]))?;
    Ok((t, gamma))
}

/// `Ell` of the first `depth` levels and the maps between them.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub levels: Vec<EllInvariant>,
    pub maps: Vec<InvariantHom>,
}

impl Truncation {
    /// The composite map from level `a` to level `b ≥ a`.
    pub fn compose(&self, a: usize, b: usize) -> InvariantHom {
        let mut h = InvariantHom::identity(&self.levels[a]);
        for k in a..b {
            h = h.then(&self.maps[k]);
        }
        h
    }
}

pub fn truncation_invariant(ctx: &Arc<RepContext>, d: &DecoratedBratteli, depth: usize) -> Result<Truncation> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let u = unroll(ctx, d, depth)?;
    let levels = u
        .units
        .iter()
        .map(|l| ell_from_multiplicities(ctx, l, d.unital))
        .collect::<Result<Vec<_>>>()?;
    let mut maps = Vec::with_capacity(depth - 1);
    for k in 0..depth - 1 {
        let h = hom_from_labels(&levels[k], &levels[k + 1], &u.labels[k])?;
        check_compatible(&h, &levels[k], &levels[k + 1])?;
        maps.push(h);
    }
    Ok(Truncation { levels, maps })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableRank {
    pub class: Vec<u64>,
    pub rank: usize,
}

/// The eventual rank of the period map on every `K^{λ_c}`, which is the
/// rank of the colimit group.
pub fn stable_rank_per_class(ctx: &Arc<RepContext>, d: &DecoratedBratteli) -> Result<Vec<StableRank>> {
    let s = d.stationary.ok_or(Error::NotStationary)?;
    let t = truncation_invariant(ctx, d, s.from + s.period + 1)?;
    let m = t.compose(s.from, s.from + s.period);
    let basis = ctx.basis();
    Ok(m.matrices
        .iter()
        .enumerate()
        .map(|(c, a)| StableRank { class: basis.class_at(c), rank: rank_of_power(a, a.rows() as u32) })
        .collect())
}

/// The diagram restricted to levels `0, step, 2·step, …` with composed
/// labels. A finite diagram keeps its last level.
pub fn telescope(ctx: &RepContext, d: &DecoratedBratteli, step: usize) -> Result<DecoratedBratteli> {
    if step == 0 {
        return Err(Error::InvalidInput("telescoping step must be positive".into()));
    }
    let (picks, stationary) = match d.stationary {
        None => {
            let n = d.levels.len();
            let mut picks: Vec<usize> = (0..n).step_by(step).collect();
            if *picks.last().expect("nonempty") != n - 1 {
                picks.push(n - 1);
            }
            (picks, None)
        }
        Some(s) => {
            let period = s.period / num_integer::gcd(s.period, step);
            // listed pads must already be periodic at the first template level
            let from = if d.unital { s.from.div_ceil(step) } else { s.from.div_ceil(step) + 1 };
            let picks: Vec<usize> = (0..=from + period).map(|j| j * step).collect();
            (picks, Some(Stationary { from, period }))
        }
    };
    let last = *picks.last().expect("nonempty");
    let u = unroll(ctx, d, last + 1)?;
    let keep = if stationary.is_some() { picks.len() - 1 } else { picks.len() };
    let levels: Vec<Vec<SummandSpec>> = picks[..keep]
        .iter()
        .map(|&k| {
            u.units[k]
                .iter()
                .zip(&d.levels[d.template(k)])
                .map(|(x, s)| SummandSpec { class: s.class.clone(), multiplicities: x.coeffs().to_vec() })
                .collect()
        })
        .collect();
    let mut edges = Vec::with_capacity(picks.len() - 1);
    for w in picks.windows(2) {
        let mut lab = u.labels[w[0]].clone();
        for k in w[0] + 1..w[1] {
            lab = compose_labels(ctx, &lab, &u.labels[k])?;
        }
        let mut set = Vec::new();
        for (i, row) in lab.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if x.coeffs().iter().any(|&v| v != 0) {
                    set.push(EdgeSpec { from: i, to: j, class: None, label: x.coeffs().to_vec() });
                }
            }
        }
        edges.push(set);
    }
    if stationary.is_none() {
        edges.truncate(levels.len() - 1);
    }
    Ok(DecoratedBratteli { group: d.group.clone(), levels, edges, stationary, unital: d.unital })
}

/// Labels of the composite of two label-determined maps.
pub fn compose_labels(ctx: &RepContext, first: &Labels, second: &Labels) -> Result<Labels> {
    let mut out = Vec::with_capacity(first.len());
    for row in first {
        let mut new_row = Vec::with_capacity(second.first().map_or(0, Vec::len));
        for k in 0..second.first().map_or(0, Vec::len) {
            let psi = cocycle_product(row[0].cocycle(), second[0][k].cocycle())?;
            let mut acc = RLambdaElement::zero(ctx.irrep_table(&psi)?);
            for (j, x) in row.iter().enumerate() {
                let y = &second[j][k];
                if x.coeffs().iter().any(|&v| v != 0) && y.coeffs().iter().any(|&v| v != 0) {
                    acc = acc.add(&ctx.pairing(x, y)?)?;
                }
            }
            new_row.push(acc);
        }
        out.push(new_row);
    }
    Ok(out)
}

/// One step of a certified intertwining: `map` goes from level `from` of
/// one diagram to level `to` of the other.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub from: usize,
    pub to: usize,
    pub map: InvariantHom,
}

#[derive(Clone, Debug)]
pub struct ConjugacyWitness {
    /// Maps left → right.
    pub forward: Vec<ChainMap>,
    /// Maps right → left; `backward[k]` follows `forward[k]`.
    pub backward: Vec<ChainMap>,
    /// Index of the forward map that the last forward map repeats, for
    /// stationary diagrams.
    pub repeats: Option<usize>,
    pub lifts_verified: usize,
    pub lifts_skipped: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Obstruction {
    Unital { left: bool, right: bool },
    StableRank { class: Vec<u64>, left: usize, right: usize },
    FiniteLimit { left_level: usize, right_level: usize },
}

#[derive(Clone, Debug)]
pub enum ConjugacyVerdict {
    ConjugateCertified(ConjugacyWitness),
    NotConjugateCertified(Obstruction),
    Unknown { depth: usize, note: String },
}

impl ConjugacyVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::ConjugateCertified(_) => "ConjugateCertified",
            Self::NotConjugateCertified(_) => "NotConjugateCertified",
            Self::Unknown { .. } => "Unknown",
        }
    }
}

const NODE_BUDGET: usize = 200_000;
const CANDIDATES_PER_STEP: usize = 4;
const LIFT_DIM_CAP: usize = 128;

fn inverse_of(h: &InvariantHom, src: &EllInvariant, dst: &EllInvariant) -> Option<InvariantHom> {
    if !h.matrices.iter().all(IntMatrix::is_permutation) {
        return None;
    }
    InvariantHom::from_matrices(h.matrices.iter().map(IntMatrix::transpose).collect(), dst, src).ok()
}

fn admissible(h: &InvariantHom, unital: bool) -> bool {
    h.positive && h.contractive && (!unital || h.unital)
}

enum Found {
    Some(Vec<InvariantHom>),
    Overflow,
}

/// Label-determined homs `Γ: src → dst`, contractive (unital when asked),
/// with `Γ ∘ pre = want` when a constraint is given. At most `limit` are
/// returned, in a fixed order.
fn find_homs(
    src: &EllInvariant,
    dst: &EllInvariant,
    constraint: Option<(&InvariantHom, &InvariantHom)>,
    unital: bool,
    limit: usize,
    budget: &mut usize,
) -> Result<Found> {
    let ctx = src.context();
    let (ns, nd) = (src.num_summands(), dst.num_summands());
    let nc = src.num_classes();
    let su = src.unit();
    let du = dst.unit();
    let g0d = dst.group_at(0);
    // blocks[i][k][l][c]: rows of component k of Γ^c for label e_l at (i, k)
    let mut blocks: Vec<Vec<Vec<Vec<IntMatrix>>>> = Vec::with_capacity(ns);
    let mut tables = Vec::with_capacity(ns);
    for i in 0..ns {
        let mut row = Vec::with_capacity(nd);
        let mut trow = Vec::with_capacity(nd);
        for k in 0..nd {
            let table = ctx.irrep_table(&cocycle_product(&src.summand_cocycles()[i].inverse(), &dst.summand_cocycles()[k])?)?;
            let mut per_l = Vec::with_capacity(table.len());
            for l in 0..table.len() {
                let mut labels: Labels = (0..ns)
                    .map(|a| {
                        (0..nd)
                            .map(|b| {
                                Ok(RLambdaElement::zero(ctx.irrep_table(&cocycle_product(
                                    &src.summand_cocycles()[a].inverse(),
                                    &dst.summand_cocycles()[b],
                                )?)?))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                labels[i][k] = RLambdaElement::basis(table.clone(), l);
                let h = hom_from_labels(src, dst, &labels)?;
                let rows: Vec<IntMatrix> = (0..nc)
                    .map(|c| {
                        let g = dst.group_at(c);
                        let pre_cols = h.matrices[c].cols();
                        h.matrices[c].block(g.offset(k), 0, g.components()[k].len(), pre_cols)
                    })
                    .collect();
                per_l.push(rows);
            }
            row.push(per_l);
            trow.push(table);
        }
        blocks.push(row);
        tables.push(trow);
    }
    let _ = tables;
    let targets: Vec<Option<Vec<IntMatrix>>> = (0..nd)
        .map(|k| {
            constraint.map(|(_, want)| {
                (0..nc)
                    .map(|c| {
                        let g = dst.group_at(c);
                        want.matrices[c].block(g.offset(k), 0, g.components()[k].len(), want.matrices[c].cols())
                    })
                    .collect()
            })
        })
        .collect();
    let pre = constraint.map(|(p, _)| p);

    // per target summand: all admissible label columns, up to the limit
    let mut per_target: Vec<Vec<Vec<Vec<i64>>>> = Vec::with_capacity(nd);
    for k in 0..nd {
        let slack: Vec<i128> = du[g0d.offset(k)..g0d.offset(k) + g0d.components()[k].len()]
            .iter()
            .map(|&v| v as i128)
            .collect();
        let unit_image = |i: usize, l: usize| -> Vec<i128> {
            let src_unit: Vec<i128> = su.iter().map(|&v| v as i128).collect();
            blocks[i][k][l][0].mul_vec(&src_unit)
        };
        let images: Vec<Vec<Vec<i128>>> = (0..ns).map(|i| (0..blocks[i][k].len()).map(|l| unit_image(i, l)).collect()).collect();
        let mut found = Vec::new();
        let mut current: Vec<Vec<i64>> = (0..ns).map(|i| vec![0; blocks[i][k].len()]).collect();
        let partial: Vec<IntMatrix> = (0..nc)
            .map(|c| IntMatrix::zeros(dst.group_at(c).components()[k].len(), src.group_at(c).rank()))
            .collect();
        let ctxk = EnumCtx {
            blocks: &blocks,
            images: &images,
            k,
            pre,
            target: targets[k].as_deref(),
            unital,
            limit,
        };
        let mut slack = slack;
        let overflow = enumerate(&ctxk, 0, 0, &mut current, &mut slack, partial, &mut found, budget);
        if overflow {
            return Ok(Found::Overflow);
        }
        if found.is_empty() {
            return Ok(Found::Some(Vec::new()));
        }
        per_target.push(found);
    }
    // combine the first choices per target, then vary one target at a time
    let mut out = Vec::new();
    let mut choice = vec![0usize; nd];
    loop {
        let labels: Labels = (0..ns)
            .map(|i| {
                (0..nd)
                    .map(|k| {
                        let t = ctx.irrep_table(&cocycle_product(&src.summand_cocycles()[i].inverse(), &dst.summand_cocycles()[k])?)?;
                        RLambdaElement::new(t, per_target[k][choice[k]][i].clone())
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let h = hom_from_labels(src, dst, &labels)?;
        if admissible(&h, unital) {
            out.push(h);
        }
        if out.len() >= limit {
            break;
        }
        let mut pos = 0;
        loop {
            if pos == nd {
                return Ok(Found::Some(out));
            }
            choice[pos] += 1;
            if choice[pos] < per_target[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
    Ok(Found::Some(out))
}

struct EnumCtx<'a> {
    blocks: &'a [Vec<Vec<Vec<IntMatrix>>>],
    images: &'a [Vec<Vec<i128>>],
    k: usize,
    pre: Option<&'a InvariantHom>,
    target: Option<&'a [IntMatrix]>,
    unital: bool,
    limit: usize,
}

fn partial_product(ctx: &EnumCtx, c: usize, rows: &IntMatrix) -> IntMatrix {
    match ctx.pre {
        Some(p) => rows.mul(&p.matrices[c]),
        None => rows.clone(),
    }
}

/// Depth-first over source summands `i` and label irreps `l`. Returns
/// `true` if the node budget ran out.
#[allow(clippy::too_many_arguments)]
fn enumerate(
    ctx: &EnumCtx,
    i: usize,
    l: usize,
    current: &mut Vec<Vec<i64>>,
    slack: &mut Vec<i128>,
    rows: Vec<IntMatrix>,
    found: &mut Vec<Vec<Vec<i64>>>,
    budget: &mut usize,
) -> bool {
    if found.len() >= ctx.limit {
        return false;
    }
    if *budget == 0 {
        return true;
    }
    *budget -= 1;
    let ns = ctx.blocks.len();
    if i == ns {
        if ctx.unital && slack.iter().any(|&s| s != 0) {
            return false;
        }
        let ok = match ctx.target {
            None => current.iter().any(|v| v.iter().any(|&x| x != 0)),
            Some(t) => (0..t.len()).all(|c| partial_product(ctx, c, &rows[c]) == t[c]),
        };
        if ok {
            found.push(current.clone());
        }
        return false;
    }
    let nl = ctx.blocks[i][ctx.k].len();
    if l == nl {
        return enumerate(ctx, i + 1, 0, current, slack, rows, found, budget);
    }
    // try the larger multiplicities first so that unital solutions appear early
    let img = &ctx.images[i][l];
    let mut max = 0i64;
    {
        let mut s = slack.clone();
        while img.iter().any(|&v| v > 0) && img.iter().zip(&s).all(|(&a, &b)| a <= b) {
            for (x, &a) in s.iter_mut().zip(img) {
                *x -= a;
            }
            max += 1;
        }
    }
    for m in (0..=max).rev() {
        let mut r = rows.clone();
        if m > 0 {
            for (c, rc) in r.iter_mut().enumerate() {
                let b = &ctx.blocks[i][ctx.k][l][c];
                for row in 0..rc.rows() {
                    for col in 0..rc.cols() {
                        rc.set(row, col, rc.get(row, col) + m as i128 * b.get(row, col));
                    }
                }
            }
            if let Some(t) = ctx.target {
                let over = (0..t.len()).any(|c| {
                    let p = partial_product(ctx, c, &r[c]);
                    (0..p.rows()).any(|a| (0..p.cols()).any(|b| p.get(a, b) > t[c].get(a, b)))
                });
                if over {
                    continue;
                }
            }
        }
        for (x, &a) in slack.iter_mut().zip(img) {
            *x -= m as i128 * a;
        }
        current[i][l] = m;
        let overflow = enumerate(ctx, i, l + 1, current, slack, r, found, budget);
        current[i][l] = 0;
        for (x, &a) in slack.iter_mut().zip(img) {
            *x += m as i128 * a;
        }
        if overflow {
            return true;
        }
        if found.len() >= ctx.limit {
            return false;
        }
    }
    false
}

struct Searcher<'a> {
    left: &'a Truncation,
    right: &'a Truncation,
    left_st: Option<Stationary>,
    right_st: Option<Stationary>,
    unital: bool,
    enumerate: bool,
    budget: usize,
    overflowed: bool,
    isos: HashMap<(bool, usize, usize), Option<(InvariantHom, InvariantHom)>>,
    forward: Vec<ChainMap>,
    backward: Vec<ChainMap>,
}

fn template_of(st: Option<Stationary>, k: usize) -> Option<usize> {
    st.and_then(|s| (k >= s.from).then(|| s.from + (k - s.from) % s.period))
}

impl Searcher<'_> {
    /// `(from_left, a, b)`: iso between left level `a` and right level `b`,
    /// oriented left → right when `from_left`.
    fn iso(&mut self, from_left: bool, a: usize, b: usize) -> Result<Option<InvariantHom>> {
        if !self.isos.contains_key(&(from_left, a, b)) {
            let found = if from_left {
                iso_invariants(&self.left.levels[a], &self.right.levels[b])?
            } else {
                iso_invariants(&self.right.levels[b], &self.left.levels[a])?
            };
            self.isos.insert((from_left, a, b), found);
        }
        Ok(self.isos[&(from_left, a, b)].as_ref().map(|p| p.0.clone()))
    }

    fn repeats(&self) -> Option<usize> {
        let last = self.forward.last()?;
        let (t1, t2) = (template_of(self.left_st, last.from)?, template_of(self.right_st, last.to)?);
        self.forward[..self.forward.len() - 1].iter().position(|f| {
            template_of(self.left_st, f.from) == Some(t1)
                && template_of(self.right_st, f.to) == Some(t2)
                && f.map.matrices == last.map.matrices
        })
    }

    /// Candidates `Ψ: right[m] → left[n2]` with `Ψ ∘ Φ = A(n → n2)`.
    fn forth(&mut self, n: usize, m: usize, phi: &InvariantHom, n2: usize) -> Result<Vec<InvariantHom>> {
        let want = self.left.compose(n, n2);
        let (src, dst) = (&self.right.levels[m], &self.left.levels[n2]);
        let mut out = Vec::new();
        if let Some(j) = self.iso(false, n2, m)? {
            if phi.then(&j).matrices == want.matrices {
                out.push(j);
            }
        }
        if let Some(inv) = inverse_of(phi, &self.left.levels[n], src) {
            let h = InvariantHom::from_matrices(inv.then(&want).matrices, src, dst)?;
            if admissible(&h, self.unital) && !out.contains(&h) {
                out.push(h);
            }
        }
        if self.enumerate && out.is_empty() {
            match find_homs(src, dst, Some((phi, &want)), self.unital, CANDIDATES_PER_STEP, &mut self.budget)? {
                Found::Some(v) => out.extend(v),
                Found::Overflow => self.overflowed = true,
            }
        }
        Ok(out)
    }

    /// Candidates `Φ': left[n2] → right[m2]` with `Φ' ∘ Ψ = B(m → m2)`.
    fn back(&mut self, m: usize, n2: usize, psi: &InvariantHom, m2: usize) -> Result<Vec<InvariantHom>> {
        let want = self.right.compose(m, m2);
        let (src, dst) = (&self.left.levels[n2], &self.right.levels[m2]);
        let mut out = Vec::new();
        if let Some(j) = self.iso(true, n2, m2)? {
            if psi.then(&j).matrices == want.matrices {
                out.push(j);
            }
        }
        if let Some(inv) = inverse_of(psi, &self.right.levels[m], src) {
            let h = InvariantHom::from_matrices(inv.then(&want).matrices, src, dst)?;
            if admissible(&h, self.unital) && !out.contains(&h) {
                out.push(h);
            }
        }
        if self.enumerate && out.is_empty() {
            match find_homs(src, dst, Some((psi, &want)), self.unital, CANDIDATES_PER_STEP, &mut self.budget)? {
                Found::Some(v) => out.extend(v),
                Found::Overflow => self.overflowed = true,
            }
        }
        Ok(out)
    }

    fn extend(&mut self) -> Result<bool> {
        if self.repeats().is_some() {
            return Ok(true);
        }
        if self.budget == 0 {
            self.overflowed = true;
            return Ok(false);
        }
        let last = self.forward.last().expect("started").clone();
        let (n, m) = (last.from, last.to);
        for n2 in n + 1..self.left.levels.len() {
            for psi in self.forth(n, m, &last.map, n2)? {
                self.backward.push(ChainMap { from: m, to: n2, map: psi.clone() });
                for m2 in m + 1..self.right.levels.len() {
                    for phi in self.back(m, n2, &psi, m2)? {
                        self.forward.push(ChainMap { from: n2, to: m2, map: phi });
                        if self.extend()? {
                            return Ok(true);
                        }
                        self.forward.pop();
                    }
                }
                self.backward.pop();
            }
        }
        Ok(false)
    }

    fn run(&mut self) -> Result<bool> {
        for m in 0..self.right.levels.len() {
            let mut starts = Vec::new();
            if let Some(j) = self.iso(true, 0, m)? {
                starts.push(j);
            }
            if self.enumerate && starts.is_empty() {
                match find_homs(&self.left.levels[0], &self.right.levels[m], None, self.unital, CANDIDATES_PER_STEP, &mut self.budget)? {
                    Found::Some(v) => starts.extend(v),
                    Found::Overflow => self.overflowed = true,
                }
            }
            for phi in starts {
                self.forward.push(ChainMap { from: 0, to: m, map: phi });
                if self.extend()? {
                    return Ok(true);
                }
                self.forward.pop();
            }
        }
        Ok(false)
    }
}

/// Re-checks a witness: triangles commute exactly, every map is positive,
/// compatible, and contractive (unital for unital diagrams).
pub fn verify_witness(left: &Truncation, right: &Truncation, w: &ConjugacyWitness, unital: bool) -> Result<bool> {
    for (k, f) in w.forward.iter().enumerate() {
        let (src, dst) = (&left.levels[f.from], &right.levels[f.to]);
        check_compatible(&f.map, src, dst)?;
        if !admissible(&InvariantHom::from_matrices(f.map.matrices.clone(), src, dst)?, unital) {
            return Ok(false);
        }
        if let Some(b) = w.backward.get(k) {
            let (bs, bd) = (&right.levels[b.from], &left.levels[b.to]);
            check_compatible(&b.map, bs, bd)?;
            if !admissible(&InvariantHom::from_matrices(b.map.matrices.clone(), bs, bd)?, unital) {
                return Ok(false);
            }
            if b.from != f.to || f.map.then(&b.map).matrices != left.compose(f.from, b.to).matrices {
                return Ok(false);
            }
            if let Some(next) = w.forward.get(k + 1) {
                if next.from != b.to || b.map.then(&next.map).matrices != right.compose(b.from, next.to).matrices {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

struct Lifter<'a> {
    ctx: &'a Arc<RepContext>,
    seed: u64,
    verified: usize,
    skipped: usize,
    residual: f64,
}

impl Lifter<'_> {
    fn lift(
        &mut self,
        src_d: &DecoratedBratteli,
        a: usize,
        dst_d: &DecoratedBratteli,
        b: usize,
        h: &InvariantHom,
        src: &EllInvariant,
        dst: &EllInvariant,
    ) -> Result<Option<EquivariantHom>> {
        let alpha = level_action(self.ctx, src_d, a)?;
        let beta = level_action(self.ctx, dst_d, b)?;
        if beta.sizes().iter().sum::<usize>() > LIFT_DIM_CAP {
            self.skipped += 1;
            return Ok(None);
        }
        let labels = labels_of(h, src, dst)?;
        let t = realize_labels(&labels, &Arc::new(alpha), &Arc::new(beta), self.ctx, crate::numeric::mix_all(self.seed, [a as u64, b as u64]))?;
        let back = crate::kaction::induced_hom(&t, src, dst)?;
        if back.matrices != h.matrices {
            return Err(Error::NumericalDegeneracy("lifted map induces a different invariant map".into()));
        }
        let defect = t.sampled_defect(self.seed, 2);
        if defect > 1e-8 {
            return Err(Error::NumericalDegeneracy(format!("lifted map has defect {defect:e}")));
        }
        self.residual = self.residual.max(defect);
        self.verified += 1;
        Ok(Some(t))
    }

    /// The diagram's own connecting map from level `a` to `b`, concretely.
    fn connecting(&self, d: &DecoratedBratteli, a: usize, b: usize) -> Result<EquivariantHom> {
        let mut t = EquivariantHom::identity(Arc::new(level_action(self.ctx, d, a)?));
        for k in a..b {
            let (step, _) = connecting_hom(self.ctx, d, k, self.seed)?;
            let step = EquivariantHom::from_parts(
                t.target().clone(),
                step.target().clone(),
                (0..step.target().summands().len()).map(|j| (step.isometry(j).clone(), step.blocks(j).to_vec())).collect(),
            )?;
            t = t.then(&step)?;
        }
        Ok(t)
    }
}

/// Decides conjugacy of the limit actions of two diagrams as far as the
/// given depth allows. For a stationary diagram the depth counts periods
/// past its transient, see [`DecoratedBratteli::explored`].
pub fn decide_conjugacy(
    ctx: &Arc<RepContext>,
    left: &DecoratedBratteli,
    right: &DecoratedBratteli,
    depth: usize,
    seed: u64,
) -> Result<ConjugacyVerdict> {
    if !same_group(&left.group, &right.group) {
        return Err(Error::GroupMismatch);
    }
    validate_diagram(ctx, left)?;
    validate_diagram(ctx, right)?;
    if left.unital != right.unital {
        return Ok(ConjugacyVerdict::NotConjugateCertified(Obstruction::Unital { left: left.unital, right: right.unital }));
    }
    if left.stationary.is_some() && right.stationary.is_some() {
        let (a, b) = (stable_rank_per_class(ctx, left)?, stable_rank_per_class(ctx, right)?);
        if let Some((x, y)) = a.iter().zip(&b).find(|(x, y)| x.rank != y.rank) {
            return Ok(ConjugacyVerdict::NotConjugateCertified(Obstruction::StableRank {
                class: x.class.clone(),
                left: x.rank,
                right: y.rank,
            }));
        }
    }
    let lt = truncation_invariant(ctx, left, left.explored(depth))?;
    let rt = truncation_invariant(ctx, right, right.explored(depth))?;
    let mut lifter = Lifter { ctx, seed, verified: 0, skipped: 0, residual: 0.0 };

    if let (Some(nl), Some(nr)) = (left.finite_len(), right.finite_len()) {
        if depth < nl.max(nr) {
            return Ok(ConjugacyVerdict::Unknown { depth, note: "depth does not reach the last levels".into() });
        }
        let (a, b) = (&lt.levels[nl - 1], &rt.levels[nr - 1]);
        return Ok(match iso_invariants(a, b)? {
            None => ConjugacyVerdict::NotConjugateCertified(Obstruction::FiniteLimit { left_level: nl - 1, right_level: nr - 1 }),
            Some((f, g)) => {
                lifter.lift(left, nl - 1, right, nr - 1, &f, a, b)?;
                lifter.lift(right, nr - 1, left, nl - 1, &g, b, a)?;
                ConjugacyVerdict::ConjugateCertified(ConjugacyWitness {
                    forward: vec![ChainMap { from: nl - 1, to: nr - 1, map: f }],
                    backward: vec![ChainMap { from: nr - 1, to: nl - 1, map: g }],
                    repeats: None,
                    lifts_verified: lifter.verified,
                    lifts_skipped: lifter.skipped,
                    max_residual: lifter.residual,
                })
            }
        });
    }
    if left.stationary.is_none() || right.stationary.is_none() {
        return Ok(ConjugacyVerdict::Unknown { depth, note: "a finite and a stationary diagram are not compared".into() });
    }

    let mut overflowed = false;
    for enumerate in [false, true] {
        let mut s = Searcher {
            left: &lt,
            right: &rt,
            left_st: left.stationary,
            right_st: right.stationary,
            unital: left.unital,
            enumerate,
            budget: NODE_BUDGET,
            overflowed: false,
            isos: HashMap::new(),
            forward: Vec::new(),
            backward: Vec::new(),
        };
        if s.run()? {
            let repeats = s.repeats();
            let mut w = ConjugacyWitness {
                forward: s.forward,
                backward: s.backward,
                repeats,
                lifts_verified: 0,
                lifts_skipped: 0,
                max_residual: 0.0,
            };
            if !verify_witness(&lt, &rt, &w, left.unital)? {
                return Err(Error::NumericalDegeneracy("intertwining failed re-verification".into()));
            }
            for k in 0..w.forward.len() {
                let f = &w.forward[k];
                let tf = lifter.lift(left, f.from, right, f.to, &f.map, &lt.levels[f.from], &rt.levels[f.to])?;
                if let Some(b) = w.backward.get(k) {
                    let tb = lifter.lift(right, b.from, left, b.to, &b.map, &rt.levels[b.from], &lt.levels[b.to])?;
                    if let (Some(tf), Some(tb)) = (tf, tb) {
                        let around = tf.then(&tb)?;
                        let own = lifter.connecting(left, f.from, b.to)?;
                        let own = EquivariantHom::from_parts(
                            around.source().clone(),
                            around.target().clone(),
                            (0..own.target().summands().len()).map(|j| (own.isometry(j).clone(), own.blocks(j).to_vec())).collect(),
                        )?;
                        let (_, r) = unitary_intertwiner(&around, &own, ctx, seed)?;
                        lifter.residual = lifter.residual.max(r);
                    }
                }
            }
            w.lifts_verified = lifter.verified;
            w.lifts_skipped = lifter.skipped;
            w.max_residual = lifter.residual;
            return Ok(ConjugacyVerdict::ConjugateCertified(w));
        }
        overflowed |= s.overflowed;
    }
    let note = if overflowed {
        format!("search budget of {NODE_BUDGET} nodes exhausted")
    } else {
        "no intertwining found within the explored levels".into()
    };
    Ok(ConjugacyVerdict::Unknown { depth, note })
}

/// Graphviz text for the first `depth` levels.
pub fn to_dot(ctx: &RepContext, d: &DecoratedBratteli, depth: usize) -> Result<String> {
    let depth = d.available(depth.max(1));
    let u = unroll(ctx, d, depth)?;
    let mut s = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=box];\n");
    for (k, level) in u.units.iter().enumerate() {
        let _ = writeln!(s, "  subgraph level_{k} {{\n    rank=same;");
        for (j, x) in level.iter().enumerate() {
            let class = &d.levels[d.template(k)][j].class;
            let cls: Vec<String> = class.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "    n{k}_{j} [label=\"M_{{{}}}^{{[{}]}}\"];", x.dim(), cls.join(","));
        }
        s.push_str("  }\n");
    }
    for (k, labels) in u.labels.iter().enumerate() {
        for (i, row) in labels.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if x.coeffs().iter().any(|&v| v != 0) {
                    let v: Vec<String> = x.coeffs().iter().map(i64::to_string).collect();
                    let _ = writeln!(s, "  n{k}_{i} -> n{}_{j} [label=\"[{}]\"];", k + 1, v.join(","));
                }
            }
        }
    }
    s.push_str("}\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::Cocycle;

    fn trivial_ctx() -> Arc<RepContext> {
        Arc::new(RepContext::new(Arc::new(FiniteGroup::trivial()), 0))
    }

    fn plain(group: Arc<FiniteGroup>, sizes: Vec<Vec<i64>>, edges: Vec<Vec<(usize, usize, i64)>>, unital: bool) -> DecoratedBratteli {
        DecoratedBratteli {
            group,
            levels: sizes
                .into_iter()
                .map(|l| l.into_iter().map(|m| SummandSpec { class: vec![], multiplicities: vec![m] }).collect())
                .collect(),
            edges: edges
                .into_iter()
                .map(|e| e.into_iter().map(|(f, t, m)| EdgeSpec { from: f, to: t, class: None, label: vec![m] }).collect())
                .collect(),
            stationary: None,
            unital,
        }
    }

    #[test]
    fn ordinary_bratteli_semantics() {
        let ctx = trivial_ctx();
        let d = plain(ctx.group().clone(), vec![vec![1, 1], vec![3, 2]], vec![vec![(0, 0, 2), (1, 0, 1), (1, 1, 2)]], true);
        validate_diagram(&ctx, &d).unwrap();
        let t = truncation_invariant(&ctx, &d, 2).unwrap();
        assert_eq!(t.maps[0].matrices[0], IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]));
        assert!(t.maps[0].unital);
        let (conc, inv) = connecting_hom(&ctx, &d, 0, 1).unwrap();
        assert!(conc.defect() < 1e-9);
        assert_eq!(inv, t.maps[0]);
    }

    #[test]
    fn bookkeeping_errors() {
        let ctx = trivial_ctx();
        let d = plain(ctx.group().clone(), vec![vec![2], vec![3]], vec![vec![(0, 0, 2)]], true);
        assert!(matches!(validate_diagram(&ctx, &d), Err(Error::BadBookkeeping { level: 1, summand: 0 })));
        let mut nonunital = plain(ctx.group().clone(), vec![vec![1], vec![3]], vec![vec![(0, 0, 2)]], false);
        validate_diagram(&ctx, &nonunital).unwrap();
        let t = truncation_invariant(&ctx, &nonunital, 2).unwrap();
        assert!(t.maps[0].contractive && !t.maps[0].unital);
        nonunital.unital = true;
        assert!(validate_diagram(&ctx, &nonunital).is_err());
        let single = plain(ctx.group().clone(), vec![vec![4]], vec![], true);
        validate_diagram(&ctx, &single).unwrap();
    }

    #[test]
    fn stationary_doubling() {
        let ctx = trivial_ctx();
        let mut d = plain(ctx.group().clone(), vec![vec![1]], vec![vec![(0, 0, 2)]], true);
        d.stationary = Some(Stationary { from: 0, period: 1 });
        let u = unroll(&ctx, &d, 4).unwrap();
        assert_eq!(u.level_dims(3), vec![8]);
        assert_eq!(stable_rank_per_class(&ctx, &d).unwrap(), vec![StableRank { class: vec![], rank: 1 }]);
        let tel = telescope(&ctx, &d, 2).unwrap();
        assert_eq!(unroll(&ctx, &tel, 3).unwrap().level_dims(2), vec![16]);
        let dot = to_dot(&ctx, &d, 4).unwrap();
        assert_eq!(dot.matches("rank=same").count(), 4);
        assert!(dot.contains("M_{8}^{[]}"));
        let v = decide_conjugacy(&ctx, &d, &tel, 3, 0).unwrap();
        assert_eq!(v.tag(), "ConjugateCertified");
        let v = decide_conjugacy(&ctx, &d, &d, 2, 0).unwrap();
        assert_eq!(v.tag(), "ConjugateCertified");
    }

    #[test]
    fn non_unital_stationary_pads() {
        let ctx = trivial_ctx();
        let mut d = plain(ctx.group().clone(), vec![vec![1], vec![3]], vec![vec![(0, 0, 2)], vec![(0, 0, 2)]], false);
        d.stationary = Some(Stationary { from: 1, period: 1 });
        let u = unroll(&ctx, &d, 4).unwrap();
        // pad 1 at every step from level 1 on
        assert_eq!(u.level_dims(2), vec![7]);
        assert_eq!(u.level_dims(3), vec![15]);
        let tel = telescope(&ctx, &d, 2).unwrap();
        let ut = unroll(&ctx, &tel, 3).unwrap();
        assert_eq!(ut.level_dims(1), vec![7]);
        assert_eq!(ut.level_dims(2), vec![31]);
    }

    #[test]
    fn edge_class_checks() {
        let g = Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)));
        let ctx = Arc::new(RepContext::new(g.clone(), 0));
        let d = DecoratedBratteli {
            group: g.clone(),
            levels: vec![
                vec![SummandSpec { class: vec![1], multiplicities: vec![1] }],
                vec![SummandSpec { class: vec![0], multiplicities: vec![1, 1, 0, 0] }],
            ],
            edges: vec![vec![EdgeSpec { from: 0, to: 0, class: Some(vec![0]), label: vec![1] }]],
            stationary: None,
            unital: true,
        };
        assert!(matches!(validate_diagram(&ctx, &d), Err(Error::BadEdgeClass { level: 0, from: 0, to: 0 })));
        let _ = Cocycle::trivial(g);
    }
}

#[cfg(test)]
mod tower_tests {
    use super::*;
    use crate::numeric::{c, identity, turn_to_phase, CMat};
    use crate::projrep::cocycle_of_rep;
    use nalgebra::DVector;

    fn z3z3() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(3), &FiniteGroup::cyclic(3)))
    }

    fn class_of_example(ctx: &RepContext, second: bool) -> Vec<u64> {
        let w = turn_to_phase(1.0 / 3.0);
        let a = if second {
            CMat::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), w * w, w]))
        } else {
            CMat::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), w, w * w]))
        };
        let mut b = CMat::zeros(3, 3);
        b[(0, 1)] = c(1.0, 0.0);
        b[(1, 2)] = c(1.0, 0.0);
        b[(2, 0)] = c(1.0, 0.0);
        let pow = |m: &CMat, k: usize| (0..k).fold(identity(3), |acc, _| acc * m);
        let mats = (0..9).map(|x| pow(&a, x / 3) * pow(&b, x % 3)).collect();
        let (lam, _) = cocycle_of_rep(ctx.group(), mats).unwrap();
        ctx.basis().class_coordinates(&lam).unwrap()
    }

    fn tower(ctx: &RepContext, second: bool) -> DecoratedBratteli {
        let class = class_of_example(ctx, second);
        let rho = vec![1, 1, 1, 0, 0, 0, 0, 0, 0];
        DecoratedBratteli {
            group: ctx.group().clone(),
            levels: vec![vec![SummandSpec { class, multiplicities: vec![1] }]],
            edges: vec![vec![EdgeSpec { from: 0, to: 0, class: None, label: rho }]],
            stationary: Some(Stationary { from: 0, period: 1 }),
            unital: true,
        }
    }

    #[test]
    fn example_towers() {
        let ctx = Arc::new(RepContext::new(z3z3(), 0));
        let g1 = tower(&ctx, false);
        let g2 = tower(&ctx, true);
        validate_diagram(&ctx, &g1).unwrap();
        let bar = ctx.basis().neg_class(&class_of_example(&ctx, false));
        let t = truncation_invariant(&ctx, &g1, 4).unwrap();
        let idx = ctx.basis().class_index(&bar);
        assert!(t.levels.iter().all(|e| e.group_at(idx).rank() == 9));
        let r1 = stable_rank_per_class(&ctx, &g1).unwrap();
        let r2 = stable_rank_per_class(&ctx, &g2).unwrap();
        assert_eq!(r2[idx].rank, 1);
        assert!(r1[idx].rank >= 3, "{r1:?}");
        let start = std::time::Instant::now();
        let v = decide_conjugacy(&ctx, &g1, &g2, 8, 7).unwrap();
        assert!(matches!(v, ConjugacyVerdict::NotConjugateCertified(Obstruction::StableRank { .. })), "{v:?}");
        let tel = telescope(&ctx, &g1, 2).unwrap();
        let v = decide_conjugacy(&ctx, &g1, &tel, 3, 7).unwrap();
        match v {
            ConjugacyVerdict::ConjugateCertified(w) => assert!(w.max_residual < 1e-8 && w.lifts_verified > 0, "{w:?}"),
            other => panic!("{other:?}"),
        }
        println!("{:?}", start.elapsed());
    }
}
