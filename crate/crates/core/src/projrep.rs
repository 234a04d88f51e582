//! Projective unitary representations, irreducible decompositions of twisted
//! group algebras, and the groups `R^λ(G)` with their tensor pairings.
//!
//! Cocycles stay exact; matrices are `f64` complex. Every integer that
//! matters downstream (multiplicities, structure constants) is recovered by
//! rounding a character inner product and checked against a tolerance.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::cohomology::{coboundary, cocycle_product, same_group, schur_multiplier, CoboundaryWitness, Cocycle, CohomologyBasis};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::numeric::{self, c, dist, identity, turn_to_phase, CMat};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub unitary: f64,
    pub mult: f64,
    pub character: f64,
    pub gap: f64,
    pub max_retries: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { unitary: 1e-9, mult: 1e-9, character: 1e-6, gap: 1e-6, max_retries: 8 }
    }
}

/// `λ(g, h)` as a complex number.
pub fn phase(lambda: &Cocycle, g: usize, h: usize) -> Complex64 {
    if lambda.value(g, h) == 0 {
        c(1.0, 0.0)
    } else {
        turn_to_phase(lambda.turn(g, h))
    }
}

/// A unitary `λ`-representation `g ↦ U_g` with `U_g U_h = λ(g,h) U_{gh}`.
#[derive(Clone, Debug)]
pub struct ProjRep {
    cocycle: Cocycle,
    matrices: Vec<CMat>,
}

impl ProjRep {
    /// Validates the family against `cocycle` with the given tolerances.
    /// `U_1` is replaced by the exact identity once it is close to it.
    pub fn new(cocycle: Cocycle, mut matrices: Vec<CMat>, tol: &Tolerances) -> Result<Self> {
        let g = cocycle.group().clone();
        let d = check_shapes(&g, &matrices)?;
        if dist(&matrices[0], &identity(d)) > tol.unitary {
            return Err(Error::InvalidRepresentation("U at the identity is not I".into()));
        }
        matrices[0] = identity(d);
        for (x, m) in matrices.iter().enumerate() {
            if !numeric::is_unitary(m, tol.unitary) {
                return Err(Error::InvalidRepresentation(format!("U_{x} is not unitary")));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                let lhs = &matrices[a] * &matrices[b];
                let rhs = &matrices[g.mul(a, b)] * phase(&cocycle, a, b);
                if dist(&lhs, &rhs) > tol.mult * (d as f64).sqrt().max(1.0) {
                    return Err(Error::NotProjective(a, b));
                }
            }
        }
        Ok(Self { cocycle, matrices })
    }

    /// Wraps a family without checks, for callers that construct it exactly.
    pub fn from_parts_unchecked(cocycle: Cocycle, matrices: Vec<CMat>) -> Self {
        Self { cocycle, matrices }
    }

    /// The one-dimensional trivial representation.
    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Self { cocycle: Cocycle::trivial(group), matrices: vec![identity(1); n] }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.cocycle.group()
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.matrices[g]
    }

    pub fn character(&self) -> Vec<Complex64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }

    /// `g ↦ v U_g v*`.
    pub fn conjugated_by(&self, v: &CMat) -> ProjRep {
        let mats = self.matrices.iter().map(|m| v * m * v.adjoint()).collect();
        Self { cocycle: self.cocycle.clone(), matrices: mats }
    }

    /// Largest deviation from `U_g U_h = λ(g,h) U_{gh}`.
    pub fn multiplicativity_error(&self) -> f64 {
        let g = self.group();
        let mut worst = 0.0f64;
        for a in g.elements() {
            for b in g.elements() {
                let lhs = &self.matrices[a] * &self.matrices[b];
                let rhs = &self.matrices[g.mul(a, b)] * phase(&self.cocycle, a, b);
                worst = worst.max(dist(&lhs, &rhs));
            }
        }
        worst
    }
}

fn check_shapes(g: &FiniteGroup, matrices: &[CMat]) -> Result<usize> {
    if matrices.len() != g.order() {
        return Err(Error::InvalidRepresentation(format!(
            "expected {} matrices, got {}",
            g.order(),
            matrices.len()
        )));
    }
    let d = matrices[0].nrows();
    if d == 0 || matrices.iter().any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(Error::InvalidRepresentation("matrices must be square of one common size".into()));
    }
    Ok(d)
}

/// Reads off the cocycle of a projective unitary family.
pub fn cocycle_of_rep(group: &Arc<FiniteGroup>, matrices: Vec<CMat>) -> Result<(Cocycle, ProjRep)> {
    cocycle_of_rep_with(group, matrices, &Tolerances::default())
}

pub fn cocycle_of_rep_with(
    group: &Arc<FiniteGroup>,
    mut matrices: Vec<CMat>,
    tol: &Tolerances,
) -> Result<(Cocycle, ProjRep)> {
    let d = check_shapes(group, &matrices)?;
    if dist(&matrices[0], &identity(d)) > tol.unitary {
        return Err(Error::InvalidRepresentation("U at the identity is not I".into()));
    }
    matrices[0] = identity(d);
    for (x, m) in matrices.iter().enumerate() {
        if !numeric::is_unitary(m, tol.unitary) {
            return Err(Error::InvalidRepresentation(format!("U_{x} is not unitary")));
        }
    }
    let n = group.order();
    let big_n = n as f64;
    let mut values = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in 0..n {
            let disc = &matrices[a] * &matrices[b] * matrices[group.mul(a, b)].adjoint();
            let s = disc.trace() / c(d as f64, 0.0);
            if dist(&disc, &(identity(d) * s)) > tol.mult * (d as f64).sqrt() {
                return Err(Error::NotProjective(a, b));
            }
            let t = s.arg() / std::f64::consts::TAU * big_n;
            let k = t.round();
            if (s - turn_to_phase(k / big_n)).norm() > tol.mult.max(1e-9) * 10.0 {
                return Err(Error::NotRootOfUnity(a, b));
            }
            values[a][b] = (k as i64).rem_euclid(n as i64);
        }
    }
    let cocycle = Cocycle::new(group.clone(), n as u64, &values)?;
    let rep = ProjRep::new(cocycle.clone(), matrices, tol)?;
    Ok((cocycle, rep))
}

/// Clock and shift on `Z/n ⊕ Z/n`: `(a, b) ↦ A^a B^b` with
/// `A = diag(1, ω^k, ω^{2k}, …)`, `ω = e^{2πi/n}`, and `B` the cyclic shift
/// `e_{j+1} ↦ e_j`. The element `(a, b)` is index `a·n + b` of
/// `direct_product(cyclic(n), cyclic(n))`.
pub fn clock_and_shift(n: usize, k: usize) -> Result<ProjRep> {
    let g = Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(n), &FiniteGroup::cyclic(n)));
    let mut a = CMat::zeros(n, n);
    let mut b = CMat::zeros(n, n);
    for j in 0..n {
        a[(j, j)] = turn_to_phase(((j * k) % n) as f64 / n as f64);
        b[(j, (j + 1) % n)] = c(1.0, 0.0);
    }
    let pow = |m: &CMat, e: usize| (0..e).fold(identity(n), |acc, _| acc * m);
    let mats = (0..n * n).map(|x| pow(&a, x / n) * pow(&b, x % n)).collect();
    Ok(cocycle_of_rep(&g, mats)?.1)
}

/// `U_g e_h = λ(g,h) e_{gh}` on `ℓ²(G)`.
pub fn regular_rep(lambda: &Cocycle) -> ProjRep {
    let g = lambda.group().clone();
    let n = g.order();
    let mats = (0..n)
        .map(|a| {
            let mut m = CMat::zeros(n, n);
            for h in 0..n {
                m[(g.mul(a, h), h)] = phase(lambda, a, h);
            }
            m
        })
        .collect();
    ProjRep::from_parts_unchecked(lambda.clone(), mats)
}

pub fn tensor(a: &ProjRep, b: &ProjRep) -> Result<ProjRep> {
    let cocycle = cocycle_product(&a.cocycle, &b.cocycle)?;
    let mats = a.matrices.iter().zip(&b.matrices).map(|(x, y)| numeric::kron(x, y)).collect();
    Ok(ProjRep { cocycle, matrices: mats })
}

pub fn contragredient(a: &ProjRep) -> ProjRep {
    ProjRep {
        cocycle: a.cocycle.inverse(),
        matrices: a.matrices.iter().map(|m| m.map(|z| z.conj())).collect(),
    }
}

pub fn direct_sum(reps: &[ProjRep]) -> Result<ProjRep> {
    let first = reps.first().ok_or_else(|| Error::InvalidInput("empty direct sum".into()))?;
    if reps.iter().any(|r| r.cocycle != first.cocycle) {
        return Err(Error::CocycleMismatch);
    }
    let n = first.group().order();
    let mats = (0..n)
        .map(|g| numeric::block_diag(&reps.iter().map(|r| r.matrices[g].clone()).collect::<Vec<_>>()))
        .collect();
    Ok(ProjRep { cocycle: first.cocycle.clone(), matrices: mats })
}

/// `g ↦ μ(g) U_g`, a `dμ·λ`-representation.
pub fn shift_by_mu(pi: &ProjRep, mu: &CoboundaryWitness) -> ProjRep {
    let g = pi.group().clone();
    let cocycle = cocycle_product(&coboundary(&g, mu), &pi.cocycle).expect("same group");
    let mats = pi
        .matrices
        .iter()
        .enumerate()
        .map(|(x, m)| if mu.mu[x] == 0 { m.clone() } else { m * turn_to_phase(mu.turn(x)) })
        .collect();
    ProjRep { cocycle, matrices: mats }
}

fn char_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let s: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
    s / c(a.len() as f64, 0.0)
}

/// Dimension of the intertwiner space between two `λ`-representations.
pub fn inner_product(a: &ProjRep, b: &ProjRep) -> Result<u64> {
    inner_product_with(a, b, &Tolerances::default())
}

pub fn inner_product_with(a: &ProjRep, b: &ProjRep, tol: &Tolerances) -> Result<u64> {
    if !same_group(a.group(), b.group()) {
        return Err(Error::GroupMismatch);
    }
    if a.cocycle != b.cocycle {
        return Err(Error::CocycleMismatch);
    }
    let v = char_inner(&a.character(), &b.character());
    let r = v.re.round();
    if (v - c(r, 0.0)).norm() > tol.character || r < 0.0 {
        return Err(Error::NotIntegral(v.re));
    }
    Ok(r as u64)
}

/// The irreducible `λ`-representations, in canonical order.
#[derive(Clone, Debug)]
pub struct IrrepTable {
    cocycle: Cocycle,
    irreps: Vec<ProjRep>,
    characters: Vec<Vec<Complex64>>,
}

impl IrrepTable {
    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.cocycle.group()
    }

    pub fn irreps(&self) -> &[ProjRep] {
        &self.irreps
    }

    pub fn irrep(&self, i: usize) -> &ProjRep {
        &self.irreps[i]
    }

    pub fn characters(&self) -> &[Vec<Complex64>] {
        &self.characters
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(ProjRep::dim).collect()
    }

    /// Index of the trivial character, when the cocycle is trivial.
    pub fn trivial_index(&self) -> Option<usize> {
        if !self.cocycle.is_trivial() {
            return None;
        }
        self.characters.iter().position(|ch| ch.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-6))
    }

    /// `(1/|G|) Σ χ_i(g) conj χ_j(g)`.
    pub fn gram(&self) -> Vec<Vec<Complex64>> {
        self.characters
            .iter()
            .map(|a| self.characters.iter().map(|b| char_inner(a, b)).collect())
            .collect()
    }
}

/// Number of conjugacy classes of `λ`-regular elements.
pub fn regular_class_count(lambda: &Cocycle) -> usize {
    lambda
        .group()
        .conjugacy_classes()
        .iter()
        .filter(|cls| lambda.is_regular(cls[0]))
        .count()
}

fn cocycle_seed(seed: u64, lambda: &Cocycle) -> u64 {
    let n = lambda.group().order() as u64;
    let mut words = vec![n, lambda.modulus()];
    for g in 0..n as usize {
        for h in 0..n as usize {
            words.push(lambda.value(g, h));
        }
    }
    numeric::mix_all(seed, words)
}

fn restrict(rep: &ProjRep, q: &CMat) -> Vec<CMat> {
    rep.matrices.iter().map(|m| q.adjoint() * m * q).collect()
}

fn char_key(ch: &[Complex64]) -> Vec<(i64, i64)> {
    ch.iter().map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)).collect()
}

/// Decomposes the regular `λ`-representation into irreducibles by splitting
/// along eigenspaces of random elements of the commutant.
pub fn irrep_table(lambda: &Cocycle, seed: u64) -> Result<IrrepTable> {
    irrep_table_with(lambda, seed, &Tolerances::default())
}

pub fn irrep_table_with(lambda: &Cocycle, seed: u64, tol: &Tolerances) -> Result<IrrepTable> {
    let group = lambda.group().clone();
    let n = group.order();
    let reg = regular_rep(lambda);
    let mut rng = numeric::rng_from(cocycle_seed(seed, lambda));
    let mut found: Vec<(Vec<CMat>, Vec<Complex64>)> = Vec::new();
    let mut covered = 0usize;
    let mut queue = vec![identity(n)];
    while let Some(q) = queue.pop() {
        if covered == n {
            break;
        }
        let k = q.ncols();
        let mats = restrict(&reg, &q);
        let ch: Vec<Complex64> = mats.iter().map(|m| m.trace()).collect();
        let norm = char_inner(&ch, &ch).re;
        let known = found.iter().any(|(_, f)| {
            let d = f[0].re;
            let m = char_inner(&ch, f).re;
            (m * d - k as f64).abs() < tol.character && (norm - m * m).abs() < tol.character
        });
        if known {
            continue;
        }
        if (norm - 1.0).abs() < tol.character {
            let mut mats = mats;
            mats[0] = identity(k);
            covered += k * k;
            found.push((mats, ch));
            continue;
        }
        let mut split = None;
        for _ in 0..=tol.max_retries {
            let h = numeric::random_hermitian(k, &mut rng);
            let mut avg = CMat::zeros(k, k);
            for m in &mats {
                avg += m * &h * m.adjoint();
            }
            avg /= c(n as f64, 0.0);
            let (vals, vecs) = numeric::hermitian_eigen(&avg);
            let Some(clusters) = numeric::cluster_sorted(&vals, tol.gap * 1e-2, tol.gap) else {
                continue;
            };
            if clusters.len() < 2 {
                continue;
            }
            let parts: Vec<CMat> = clusters.into_iter().map(|r| numeric::columns(&vecs, r)).collect();
            let invariant = parts.iter().all(|p| {
                mats.iter().all(|m| {
                    let mp = m * p;
                    dist(&mp, &(p * (p.adjoint() * &mp))) < tol.gap
                })
            });
            if invariant {
                split = Some(parts);
                break;
            }
        }
        let parts = split.ok_or_else(|| {
            Error::NumericalDegeneracy(format!(
                "commutant eigenvalues of a {k}-dimensional subrepresentation not separated after {} attempts",
                tol.max_retries + 1
            ))
        })?;
        for p in parts.into_iter().rev() {
            queue.push(&q * p);
        }
    }
    if covered != n {
        return Err(Error::NumericalDegeneracy(format!(
            "irreducible dimensions squared sum to {covered}, expected {n}"
        )));
    }
    found.sort_by(|a, b| {
        let (da, db) = (a.0[0].nrows(), b.0[0].nrows());
        da.cmp(&db).then_with(|| char_key(&a.1).cmp(&char_key(&b.1)))
    });
    let characters = found.iter().map(|(_, ch)| ch.clone()).collect();
    let irreps = found.into_iter().map(|(m, _)| ProjRep::from_parts_unchecked(lambda.clone(), m)).collect();
    Ok(IrrepTable { cocycle: lambda.clone(), irreps, characters })
}

/// An element of `R^λ(G)`: integer coefficients over a table's irreps.
#[derive(Clone, Debug)]
pub struct RLambdaElement {
    table: Arc<IrrepTable>,
    coeffs: Vec<i64>,
}

impl PartialEq for RLambdaElement {
    fn eq(&self, other: &Self) -> bool {
        self.table.cocycle == other.table.cocycle && self.coeffs == other.coeffs
    }
}

impl RLambdaElement {
    pub fn new(table: Arc<IrrepTable>, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != table.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                table.len(),
                coeffs.len()
            )));
        }
        Ok(Self { table, coeffs })
    }

    pub fn zero(table: Arc<IrrepTable>) -> Self {
        let k = table.len();
        Self { table, coeffs: vec![0; k] }
    }

    pub fn basis(table: Arc<IrrepTable>, i: usize) -> Self {
        let mut e = Self::zero(table);
        e.coeffs[i] = 1;
        e
    }

    pub fn table(&self) -> &Arc<IrrepTable> {
        &self.table
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.table.cocycle
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|&x| x >= 0)
    }

    /// `Σ c_i dim(π_i)`.
    pub fn dim(&self) -> i64 {
        self.coeffs.iter().zip(self.table.dims()).map(|(&c, d)| c * d as i64).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.table.cocycle != other.table.cocycle {
            return Err(Error::CocycleMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { table: self.table.clone(), coeffs })
    }

    /// A representation in this class (requires a positive element).
    pub fn realize(&self) -> Result<ProjRep> {
        if !self.is_positive() || self.dim() == 0 {
            return Err(Error::NotPositive(format!("cannot realize {:?}", self.coeffs)));
        }
        let parts: Vec<ProjRep> = self
            .coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| std::iter::repeat_n(self.table.irreps[i].clone(), m as usize))
            .collect();
        direct_sum(&parts)
    }
}

pub fn decompose(pi: &ProjRep, table: &Arc<IrrepTable>) -> Result<RLambdaElement> {
    decompose_with(pi, table, &Tolerances::default())
}

pub fn decompose_with(pi: &ProjRep, table: &Arc<IrrepTable>, tol: &Tolerances) -> Result<RLambdaElement> {
    Ok(decompose_detailed(pi, table, tol)?.0)
}

/// Like [`decompose_with`], also returning the largest distance of a
/// character inner product from its rounded value.
pub fn decompose_detailed(pi: &ProjRep, table: &Arc<IrrepTable>, tol: &Tolerances) -> Result<(RLambdaElement, f64)> {
    if !same_group(pi.group(), table.group()) {
        return Err(Error::GroupMismatch);
    }
    if pi.cocycle != table.cocycle {
        return Err(Error::CocycleMismatch);
    }
    let ch = pi.character();
    let mut coeffs = Vec::with_capacity(table.len());
    let mut worst = 0.0f64;
    for (i, chi) in table.characters.iter().enumerate() {
        let v = char_inner(&ch, chi);
        let r = v.re.round();
        worst = worst.max((v - c(r, 0.0)).norm());
        if (v - c(r, 0.0)).norm() > tol.character {
            return Err(Error::NotIntegralMultiplicity { irrep: i, value: v.re });
        }
        coeffs.push(r as i64);
    }
    let out = RLambdaElement { table: table.clone(), coeffs };
    if out.dim() != pi.dim() as i64 {
        return Err(Error::NumericalDegeneracy(format!(
            "multiplicities account for dimension {} of {}",
            out.dim(),
            pi.dim()
        )));
    }
    Ok((out, worst))
}

/// Tensor structure constants: entry `[i][j]` decomposes `π_i ⊗ π_j`.
pub type StructureConstants = Vec<Vec<Vec<i64>>>;

/// Per-group cache of irrep tables and pairing structure constants, with a
/// fixed seed and tolerances. Safe to share across threads.
#[derive(Debug)]
pub struct RepContext {
    group: Arc<FiniteGroup>,
    seed: u64,
    tol: Tolerances,
    basis: OnceLock<CohomologyBasis>,
    tables: RwLock<HashMap<Cocycle, Arc<IrrepTable>>>,
    pairings: RwLock<HashMap<(Cocycle, Cocycle), Arc<StructureConstants>>>,
}

impl RepContext {
    pub fn new(group: Arc<FiniteGroup>, seed: u64) -> Self {
        Self::with_tolerances(group, seed, Tolerances::default())
    }

    pub fn with_tolerances(group: Arc<FiniteGroup>, seed: u64, tol: Tolerances) -> Self {
        Self {
            group,
            seed,
            tol,
            basis: OnceLock::new(),
            tables: RwLock::new(HashMap::new()),
            pairings: RwLock::new(HashMap::new()),
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn basis(&self) -> &CohomologyBasis {
        self.basis.get_or_init(|| schur_multiplier(&self.group))
    }

    pub fn irrep_table(&self, lambda: &Cocycle) -> Result<Arc<IrrepTable>> {
        if !same_group(&self.group, lambda.group()) {
            return Err(Error::GroupMismatch);
        }
        if let Some(t) = self.tables.read().expect("lock").get(lambda) {
            return Ok(t.clone());
        }
        let t = Arc::new(irrep_table_with(lambda, self.seed, &self.tol)?);
        let mut w = self.tables.write().expect("lock");
        Ok(w.entry(lambda.clone()).or_insert(t).clone())
    }

    pub fn decompose(&self, pi: &ProjRep) -> Result<RLambdaElement> {
        let t = self.irrep_table(pi.cocycle())?;
        decompose_with(pi, &t, &self.tol)
    }

    pub fn structure_constants(&self, a: &Cocycle, b: &Cocycle) -> Result<Arc<StructureConstants>> {
        let key = (a.clone(), b.clone());
        if let Some(s) = self.pairings.read().expect("lock").get(&key) {
            return Ok(s.clone());
        }
        let ta = self.irrep_table(a)?;
        let tb = self.irrep_table(b)?;
        let tab = self.irrep_table(&cocycle_product(a, b)?)?;
        let mut s = Vec::with_capacity(ta.len());
        for x in ta.irreps() {
            let mut row = Vec::with_capacity(tb.len());
            for y in tb.irreps() {
                row.push(decompose_with(&tensor(x, y)?, &tab, &self.tol)?.coeffs);
            }
            s.push(row);
        }
        let s = Arc::new(s);
        let mut w = self.pairings.write().expect("lock");
        Ok(w.entry(key).or_insert(s).clone())
    }

    /// The product `R^{λ₁}(G) × R^{λ₂}(G) → R^{λ₁λ₂}(G)`.
    pub fn pairing(&self, x: &RLambdaElement, y: &RLambdaElement) -> Result<RLambdaElement> {
        let s = self.structure_constants(x.cocycle(), y.cocycle())?;
        let target = self.irrep_table(&cocycle_product(x.cocycle(), y.cocycle())?)?;
        let mut coeffs = vec![0i64; target.len()];
        for (i, &xi) in x.coeffs.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.coeffs.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                for (k, &s) in s[i][j].iter().enumerate() {
                    coeffs[k] += xi * yj * s;
                }
            }
        }
        Ok(RLambdaElement { table: target, coeffs })
    }
}

/// The pairing on explicit elements, through a fresh context.
pub fn pairing(x: &RLambdaElement, y: &RLambdaElement, seed: u64) -> Result<RLambdaElement> {
    RepContext::new(x.table.group().clone(), seed).pairing(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{schur_multiplier, trivialize};
    use crate::group::small_group_corpus;

    pub(crate) fn z3z3() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(3), &FiniteGroup::cyclic(3)))
    }

    /// `π(e₁^r e₂^s) = A^r B^s` with element index `3r + s`.
    pub(crate) fn example_rep(second: bool) -> Vec<CMat> {
        let w = turn_to_phase(1.0 / 3.0);
        let w2 = w * w;
        let a = if second {
            CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), w2, w]))
        } else {
            CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), w, w2]))
        };
        let mut b = CMat::zeros(3, 3);
        b[(0, 1)] = c(1.0, 0.0);
        b[(1, 2)] = c(1.0, 0.0);
        b[(2, 0)] = c(1.0, 0.0);
        let pow = |m: &CMat, k: usize| (0..k).fold(identity(3), |acc, _| acc * m);
        (0..9).map(|x| pow(&a, x / 3) * pow(&b, x % 3)).collect()
    }

    #[test]
    fn example_matrices_give_distinct_nontrivial_classes() {
        let g = z3z3();
        let (l1, p1) = cocycle_of_rep(&g, example_rep(false)).unwrap();
        let (l2, _) = cocycle_of_rep(&g, example_rep(true)).unwrap();
        assert_eq!(l1.modulus(), 3);
        let basis = schur_multiplier(&g);
        let c1 = basis.class_coordinates(&l1).unwrap();
        let c2 = basis.class_coordinates(&l2).unwrap();
        assert_ne!(c1, vec![0]);
        assert_ne!(c2, vec![0]);
        assert_ne!(c1, c2);
        assert_eq!(inner_product(&p1, &p1).unwrap(), 1);
        let table = Arc::new(irrep_table(&l1, 0).unwrap());
        assert_eq!(table.dims(), vec![3]);
        assert_eq!(decompose(&p1, &table).unwrap().coeffs(), &[1]);
        assert_eq!(decompose(&regular_rep(&l1), &table).unwrap().coeffs(), &[3]);
        let cg = contragredient(&p1);
        assert_eq!(basis.class_coordinates(cg.cocycle()).unwrap(), basis.neg_class(&c1));
    }

    #[test]
    fn ordinary_reps_have_trivial_cocycle() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let mats = (0..4).map(|k| CMat::from_element(1, 1, turn_to_phase(k as f64 / 4.0))).collect();
        let (l, _) = cocycle_of_rep(&g, mats).unwrap();
        assert!(l.is_trivial());
    }

    #[test]
    fn non_projective_family_is_rejected() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let mut flip = CMat::zeros(2, 2);
        flip[(0, 1)] = c(1.0, 0.0);
        flip[(1, 0)] = c(1.0, 0.0);
        let mats = vec![identity(2), flip];
        assert!(cocycle_of_rep(&g, mats).is_ok());
        let odd = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), turn_to_phase(0.25)]));
        let err = cocycle_of_rep(&g, vec![identity(2), odd]).unwrap_err();
        assert_eq!(err, Error::NotProjective(1, 1));
        let scalar = CMat::from_element(1, 1, turn_to_phase(0.1));
        assert_eq!(cocycle_of_rep(&g, vec![identity(1), scalar]).unwrap_err(), Error::NotRootOfUnity(1, 1));
    }

    #[test]
    fn regular_rep_examples() {
        let g = z3z3();
        let triv = regular_rep(&Cocycle::trivial(g.clone()));
        for m in triv.matrices() {
            assert!(m.iter().all(|z| *z == c(0.0, 0.0) || *z == c(1.0, 0.0)));
        }
        let (l1, _) = cocycle_of_rep(&g, example_rep(false)).unwrap();
        let reg = regular_rep(&l1);
        assert_eq!(reg.dim(), 9);
        assert!(reg.multiplicativity_error() < 1e-12);
        let one = regular_rep(&Cocycle::trivial(Arc::new(FiniteGroup::trivial())));
        assert_eq!(one.matrices(), &[identity(1)]);
    }

    #[test]
    fn abelian_tables() {
        let g = z3z3();
        let t = irrep_table(&Cocycle::trivial(g), 1).unwrap();
        assert_eq!(t.dims(), vec![1; 9]);
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let t = Arc::new(irrep_table(&Cocycle::trivial(z2.clone()), 1).unwrap());
        assert_eq!(t.dims(), vec![1, 1]);
        let d = decompose(&regular_rep(&Cocycle::trivial(z2.clone())), &t).unwrap();
        assert_eq!(d.coeffs(), &[1, 1]);
        let reg = regular_rep(&Cocycle::trivial(z2.clone()));
        assert_eq!(inner_product(&reg, &ProjRep::trivial(z2)).unwrap(), 1);
    }

    #[test]
    fn tensor_with_contragredient_contains_every_character() {
        let g = z3z3();
        let (_, p1) = cocycle_of_rep(&g, example_rep(false)).unwrap();
        let prod = tensor(&p1, &contragredient(&p1)).unwrap();
        assert!(prod.cocycle().is_trivial());
        let ctx = RepContext::new(g.clone(), 0);
        assert_eq!(ctx.decompose(&prod).unwrap().coeffs(), &[1; 9]);
        let sq = tensor(&p1, &p1).unwrap();
        assert_eq!(sq.dim(), 9);
        assert_eq!(*sq.cocycle(), p1.cocycle().pow(2));
        let one = tensor(&p1, &ProjRep::trivial(g)).unwrap();
        assert_eq!(one.cocycle(), p1.cocycle());
    }

    #[test]
    fn pairing_laws_on_klein_group() {
        let g = Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)));
        let ctx = RepContext::new(g.clone(), 0);
        let lam = ctx.basis().representatives()[0].clone();
        let t0 = ctx.irrep_table(&Cocycle::trivial(g.clone())).unwrap();
        let tl = ctx.irrep_table(&lam).unwrap();
        assert_eq!(tl.dims(), vec![2]);
        let x = RLambdaElement::new(tl.clone(), vec![1]).unwrap();
        let y = RLambdaElement::new(t0.clone(), vec![1, 0, 2, 1]).unwrap();
        let unit = RLambdaElement::basis(t0.clone(), t0.trivial_index().unwrap());
        assert_eq!(ctx.pairing(&unit, &x).unwrap(), x);
        let xy = ctx.pairing(&x, &y).unwrap();
        let yx = ctx.pairing(&y, &x).unwrap();
        assert_eq!(xy.coeffs(), yx.coeffs());
        let xx = ctx.pairing(&x, &x).unwrap();
        let lhs = ctx.pairing(&xx, &y).unwrap();
        let rhs = ctx.pairing(&x, &ctx.pairing(&x, &y).unwrap()).unwrap();
        assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn shift_by_mu_round_trips() {
        let g = z3z3();
        let (l1, p1) = cocycle_of_rep(&g, example_rep(false)).unwrap();
        let mu0 = CoboundaryWitness { modulus: 9, mu: vec![0, 1, 2, 3, 4, 5, 6, 7, 8] };
        let target = cocycle_product(&l1, &coboundary(&g, &mu0)).unwrap();
        let w = trivialize(&target, &l1).unwrap();
        let shifted = shift_by_mu(&p1, &w);
        assert_eq!(*shifted.cocycle(), target);
        assert!(shifted.multiplicativity_error() < 1e-9);
        let back = shift_by_mu(&shifted, &w.inverse());
        assert_eq!(*back.cocycle(), l1);
        for (a, b) in back.matrices().iter().zip(p1.matrices()) {
            assert!(dist(a, b) < 1e-12);
        }
        let same = shift_by_mu(&p1, &CoboundaryWitness::zero(9));
        assert_eq!(same.matrices(), p1.matrices());
    }

    #[test]
    fn tables_are_seed_independent() {
        let g = Arc::new(FiniteGroup::dihedral(4));
        let basis = schur_multiplier(&g);
        for lam in [Cocycle::trivial(g.clone()), basis.representatives()[0].clone()] {
            let base = irrep_table(&lam, 0).unwrap();
            for seed in 1..5 {
                let t = irrep_table(&lam, seed).unwrap();
                assert_eq!(t.dims(), base.dims());
                for (a, b) in t.characters().iter().zip(base.characters()) {
                    for (x, y) in a.iter().zip(b) {
                        assert!((x - y).norm() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn small_corpus_laws() {
        for (name, g) in small_group_corpus().into_iter().filter(|(_, g)| g.order() <= 8) {
            let g = Arc::new(g);
            let basis = schur_multiplier(&g);
            for coords in basis.all_classes() {
                let lam = basis.representative(&coords);
                let t = irrep_table(&lam, 0).unwrap();
                let sq: usize = t.dims().iter().map(|d| d * d).sum();
                assert_eq!(sq, g.order(), "{name} {coords:?}");
                assert_eq!(t.len(), regular_class_count(&lam), "{name} {coords:?}");
                for (i, row) in t.gram().iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((v - c(want, 0.0)).norm() < 1e-8);
                    }
                }
            }
        }
    }
}
