//! Normalized 2-cocycles with values in the roots of unity, coboundaries, and
//! the Schur multiplier `H²(G, T)`.
//!
//! A cocycle is stored as an exponent table: `λ(g, h) = exp(2πi v[g][h] / N)`.
//! Tables are always kept at their smallest modulus, so two [`Cocycle`]s are
//! equal exactly when they define the same function.
//!
//! The multiplier is computed exactly. Every class in `H²(G, T)` has a
//! representative with values in `μ_N`, `N = |G|`, because the exponent of
//! the multiplier divides `|G|`. If a `μ_M`-valued cocycle `c` equals `dμ`
//! over `T`, then multiplying `c(g, h) = μ(g)μ(h)/μ(gh)` over all `h` gives
//! `μ(g)^N = ∏_h c(g, h)`, so `μ` itself takes values in `μ_{MN}`. Hence
//! deciding triviality over `T` is a congruence problem modulo `MN`, and the
//! multiplier is `Z²(G, Z/N)` modulo the cocycles `z` for which `N·z` is a
//! coboundary modulo `N²`.

use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AbelianInvariants, FiniteGroup};
use crate::intlin::{kernel_mod, smith_normal_form, solve_mod, IntMatrix, ModKernel, SmithForm, SmithOptions};

/// A normalized 2-cocycle `G × G → μ_N`.
#[derive(Clone)]
pub struct Cocycle {
    group: Arc<FiniteGroup>,
    modulus: u64,
    values: Vec<u64>,
}

impl std::fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cocycle")
            .field("modulus", &self.modulus)
            .field("values", &self.table())
            .finish()
    }
}

impl PartialEq for Cocycle {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus
            && self.values == other.values
            && same_group(&self.group, &other.group)
    }
}

impl Eq for Cocycle {}

impl Hash for Cocycle {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.modulus.hash(state);
        self.values.hash(state);
    }
}

pub(crate) fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Cocycle {
    /// Builds and validates a cocycle from an exponent table modulo `modulus`.
    pub fn new(group: Arc<FiniteGroup>, modulus: u64, values: &[Vec<i64>]) -> Result<Self> {
        let c = Self::from_table_unchecked(group, modulus, values)?;
        validate_cocycle(&c)?;
        Ok(c)
    }

    /// Builds a cocycle after checking only the shape of the table. The
    /// cocycle identity is not checked; see [`validate_cocycle`].
    pub fn from_table_unchecked(
        group: Arc<FiniteGroup>,
        modulus: u64,
        values: &[Vec<i64>],
    ) -> Result<Self> {
        let n = group.order();
        if modulus == 0 {
            return Err(Error::InvalidInput("cocycle modulus must be positive".into()));
        }
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("cocycle table must be {n}x{n}")));
        }
        let m = modulus as i64;
        let flat = values.iter().flatten().map(|&v| v.rem_euclid(m) as u64).collect();
        Ok(Self::from_flat(group, modulus, flat))
    }

    pub(crate) fn from_flat(group: Arc<FiniteGroup>, modulus: u64, mut values: Vec<u64>) -> Self {
        for v in &mut values {
            *v %= modulus;
        }
        let g = values.iter().fold(modulus, |acc, &v| acc.gcd(&v));
        let modulus = modulus / g;
        for v in &mut values {
            *v /= g;
        }
        Self { group, modulus, values }
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Self { group, modulus: 1, values: vec![0; n * n] }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// The smallest `N` with all values in `μ_N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn value(&self, g: usize, h: usize) -> u64 {
        self.values[g * self.group.order() + h]
    }

    /// The exponent table at modulus `m`, which must be a multiple of
    /// [`Cocycle::modulus`].
    pub fn values_at(&self, m: u64) -> Option<Vec<u64>> {
        (m % self.modulus == 0).then(|| {
            let s = m / self.modulus;
            self.values.iter().map(|&v| v * s).collect()
        })
    }

    pub fn table(&self) -> Vec<Vec<u64>> {
        self.values.chunks(self.group.order()).map(<[u64]>::to_vec).collect()
    }

    /// `λ(g, h)` as a fraction of a full turn.
    pub fn turn(&self, g: usize, h: usize) -> f64 {
        self.value(g, h) as f64 / self.modulus as f64
    }

    pub fn is_trivial(&self) -> bool {
        self.modulus == 1
    }

    /// Pointwise product with `other`.
    pub fn product(&self, other: &Cocycle) -> Result<Cocycle> {
        cocycle_product(self, other)
    }

    pub fn inverse(&self) -> Cocycle {
        cocycle_inverse(self)
    }

    pub fn pow(&self, k: i64) -> Cocycle {
        let m = self.modulus as i128;
        let vals = self
            .values
            .iter()
            .map(|&v| ((v as i128 * k as i128).rem_euclid(m)) as u64)
            .collect();
        Self::from_flat(self.group.clone(), self.modulus, vals)
    }

    /// `λ(g, h) = λ(h, g)` for every `h` commuting with `g`.
    pub fn is_regular(&self, g: usize) -> bool {
        self.group
            .elements()
            .filter(|&h| self.group.commutes(g, h))
            .all(|h| self.value(g, h) == self.value(h, g))
    }
}

/// Checks normalization and the cocycle identity
/// `λ(g,h) λ(gh,k) = λ(g,hk) λ(h,k)`.
pub fn validate_cocycle(c: &Cocycle) -> Result<()> {
    let g = &c.group;
    let n = g.order();
    for x in 0..n {
        if c.value(x, 0) != 0 {
            return Err(Error::InvalidCocycle(x, 0, 0));
        }
        if c.value(0, x) != 0 {
            return Err(Error::InvalidCocycle(0, x, 0));
        }
    }
    let m = c.modulus;
    for a in 1..n {
        for b in 1..n {
            let ab = g.mul(a, b);
            for k in 1..n {
                let l = (c.value(a, b) + c.value(ab, k)) % m;
                let r = (c.value(a, g.mul(b, k)) + c.value(b, k)) % m;
                if l != r {
                    return Err(Error::InvalidCocycle(a, b, k));
                }
            }
        }
    }
    Ok(())
}

/// A function `μ: G → μ_M` with `μ(1) = 1`, stored as exponents modulo `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoboundaryWitness {
    pub modulus: u64,
    pub mu: Vec<u64>,
}

impl CoboundaryWitness {
    pub fn zero(order: usize) -> Self {
        Self { modulus: 1, mu: vec![0; order] }
    }

    pub fn inverse(&self) -> Self {
        let m = self.modulus;
        Self { modulus: m, mu: self.mu.iter().map(|&v| (m - v % m) % m).collect() }
    }

    /// `μ(g)` as a fraction of a full turn.
    pub fn turn(&self, g: usize) -> f64 {
        self.mu[g] as f64 / self.modulus as f64
    }
}

/// `dμ(g, h) = μ(g) μ(h) / μ(gh)`.
pub fn coboundary(group: &Arc<FiniteGroup>, mu: &CoboundaryWitness) -> Cocycle {
    let n = group.order();
    assert_eq!(mu.mu.len(), n, "witness length must equal the group order");
    let m = mu.modulus as i64;
    let mut flat = vec![0u64; n * n];
    for g in 0..n {
        for h in 0..n {
            let v = mu.mu[g] as i64 + mu.mu[h] as i64 - mu.mu[group.mul(g, h)] as i64;
            flat[g * n + h] = v.rem_euclid(m) as u64;
        }
    }
    Cocycle::from_flat(group.clone(), mu.modulus, flat)
}

pub fn cocycle_product(a: &Cocycle, b: &Cocycle) -> Result<Cocycle> {
    if !same_group(&a.group, &b.group) {
        return Err(Error::GroupMismatch);
    }
    let l = a.modulus.lcm(&b.modulus);
    let (sa, sb) = (l / a.modulus, l / b.modulus);
    let vals = a.values.iter().zip(&b.values).map(|(&x, &y)| (x * sa + y * sb) % l).collect();
    Ok(Cocycle::from_flat(a.group.clone(), l, vals))
}

pub fn cocycle_inverse(a: &Cocycle) -> Cocycle {
    a.pow(-1)
}

/// The linear map `μ ↦ dμ` on exponent vectors, restricted to normalized
/// functions: columns are `μ(g)` for `g ≠ 1`, rows are pairs `(g, h)` with
/// `g, h ≠ 1`, and an exact Smith form solves `dμ ≡ b` modulo anything.
#[derive(Clone, Debug)]
pub struct CoboundarySolver {
    group: Arc<FiniteGroup>,
    snf: SmithForm,
}

impl CoboundarySolver {
    pub fn new(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let k = n.saturating_sub(1);
        let mut a = IntMatrix::zeros(k * k, k);
        for g in 1..n {
            for h in 1..n {
                let r = (g - 1) * k + (h - 1);
                a.set(r, g - 1, a.get(r, g - 1) + 1);
                a.set(r, h - 1, a.get(r, h - 1) + 1);
                let gh = group.mul(g, h);
                if gh != 0 {
                    a.set(r, gh - 1, a.get(r, gh - 1) - 1);
                }
            }
        }
        let snf = smith_normal_form(&a, SmithOptions { modulus: None, track_left: true, track_right: true });
        Self { group, snf }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Finds `μ` of modulus `k` with `dμ ≡ b (mod k)`, where `b` is a full
    /// `|G| × |G|` exponent table.
    pub fn solve(&self, b: &[i128], k: u64) -> Option<CoboundaryWitness> {
        let n = self.group.order();
        if n == 1 {
            return Some(CoboundaryWitness { modulus: k, mu: vec![0] });
        }
        let rhs: Vec<i128> = (1..n)
            .flat_map(|g| (1..n).map(move |h| (g, h)))
            .map(|(g, h)| b[g * n + h])
            .collect();
        let x = solve_mod(&self.snf, &rhs, k as i128)?;
        let mut mu = vec![0u64; n];
        for g in 1..n {
            mu[g] = x[g - 1] as u64;
        }
        Some(CoboundaryWitness { modulus: k, mu })
    }

    /// Returns `μ` with `dμ = c` over `T`, if `c` is a coboundary.
    pub fn trivialize(&self, c: &Cocycle) -> Option<CoboundaryWitness> {
        if c.is_trivial() {
            return Some(CoboundaryWitness::zero(self.group.order()));
        }
        let n = self.group.order() as u64;
        let k = c.modulus * n;
        let b: Vec<i128> = c.values_at(k)?.into_iter().map(|v| v as i128).collect();
        self.solve(&b, k)
    }
}

/// `H²(G, T)` with representative cocycles, one per invariant factor, and the
/// data needed to read off the class of any cocycle.
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    group: Arc<FiniteGroup>,
    invariants: AbelianInvariants,
    representatives: Vec<Cocycle>,
    modulus: u64,
    kernel: Option<ModKernel>,
    /// Right transform of the relation lattice, columns matching the
    /// invariant factors (after dropping trivial ones).
    coord_map: IntMatrix,
    coord_cols: Vec<usize>,
    solver: CoboundarySolver,
}

impl CohomologyBasis {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn invariant_factors(&self) -> &AbelianInvariants {
        &self.invariants
    }

    pub fn representatives(&self) -> &[Cocycle] {
        &self.representatives
    }

    /// The value modulus `|G|` of the representatives.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn solver(&self) -> &CoboundarySolver {
        &self.solver
    }

    pub fn num_classes(&self) -> usize {
        self.invariants.order() as usize
    }

    /// All coordinate vectors, in lexicographic order (index 0 is the zero
    /// class).
    pub fn all_classes(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.invariants.factors {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// Position of a coordinate vector in [`CohomologyBasis::all_classes`].
    pub fn class_index(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.invariants.factors)
            .fold(0, |acc, (&c, &d)| acc * d as usize + (c % d) as usize)
    }

    pub fn class_at(&self, index: usize) -> Vec<u64> {
        let mut rest = index;
        let mut out = vec![0; self.invariants.factors.len()];
        for (slot, &d) in out.iter_mut().zip(&self.invariants.factors).rev() {
            *slot = (rest % d as usize) as u64;
            rest /= d as usize;
        }
        out
    }

    pub fn add_classes(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.invariants.factors).map(|((x, y), d)| (x + y) % d).collect()
    }

    pub fn neg_class(&self, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.invariants.factors).map(|(x, d)| (d - x % d) % d).collect()
    }

    /// The representative `∏ gen_i^{c_i}`; the zero class gives the trivial
    /// cocycle exactly.
    pub fn representative(&self, coords: &[u64]) -> Cocycle {
        let mut acc = Cocycle::trivial(self.group.clone());
        for (gen, &c) in self.representatives.iter().zip(coords) {
            acc = cocycle_product(&acc, &gen.pow(c as i64)).expect("same group");
        }
        acc
    }

    /// Coordinates of `[c]` in the basis.
    pub fn class_coordinates(&self, c: &Cocycle) -> Result<Vec<u64>> {
        if !same_group(&self.group, &c.group) {
            return Err(Error::GroupMismatch);
        }
        let r = self.invariants.factors.len();
        if c.is_trivial() || r == 0 {
            return Ok(vec![0; r]);
        }
        let v = self.reduce_to_base_modulus(c)?;
        let kernel = self.kernel.as_ref().expect("nontrivial multiplier has a kernel");
        let x: Vec<i128> = v.iter().enumerate().filter(|&(i, _)| {
            let n = self.group.order();
            i / n != 0 && i % n != 0
        }).map(|(_, &e)| e as i128).collect();
        let kc = kernel
            .coordinates(&x)
            .ok_or_else(|| Error::ModulusNotEmbeddable(c.modulus))?;
        let y = self.coord_map.vec_mul(&kc);
        Ok(self
            .coord_cols
            .iter()
            .zip(&self.invariants.factors)
            .map(|(&col, &d)| y[col].rem_euclid(d as i128) as u64)
            .collect())
    }

    /// A cohomologous exponent table with values in `μ_N`, `N = |G|`.
    fn reduce_to_base_modulus(&self, c: &Cocycle) -> Result<Vec<u64>> {
        let n = self.modulus;
        if n % c.modulus == 0 {
            return Ok(c.values_at(n).expect("divides"));
        }
        let l = c.modulus.lcm(&n);
        let cl = c.values_at(l).expect("divides lcm");
        // c^N is a coboundary dν with ν in μ_{LN}; then ω = ν^{1/N} has
        // values in μ_{LN²} and c·dω^{-1} lies in μ_N.
        let big = l * n;
        let rhs: Vec<i128> = cl.iter().map(|&v| (v as i128 * (n * n) as i128) % big as i128).collect();
        let nu = self.solver.solve(&rhs, big).ok_or(Error::ModulusNotEmbeddable(c.modulus))?;
        let top = (l * n * n) as i128;
        let omega = CoboundaryWitness { modulus: top as u64, mu: nu.mu.clone() };
        let d_omega = coboundary(&self.group, &omega);
        let dw = d_omega.values_at(top as u64).expect("modulus divides");
        let mut out = Vec::with_capacity(cl.len());
        for (&v, &w) in cl.iter().zip(&dw) {
            let e = (v as i128 * (n * n) as i128 - w as i128).rem_euclid(top);
            let step = (l * n) as i128;
            if e % step != 0 {
                return Err(Error::ModulusNotEmbeddable(c.modulus));
            }
            out.push((e / step) as u64 % n);
        }
        Ok(out)
    }

    /// Returns `μ` with `a · b⁻¹ = dμ`, or `None` when `[a] ≠ [b]`.
    pub fn trivialize(&self, a: &Cocycle, b: &Cocycle) -> Option<CoboundaryWitness> {
        let c = cocycle_product(a, &b.inverse()).ok()?;
        self.solver.trivialize(&c)
    }
}

pub fn class_coordinates(c: &Cocycle, basis: &CohomologyBasis) -> Result<Vec<u64>> {
    basis.class_coordinates(c)
}

/// Returns `μ` with `a · b⁻¹ = dμ` exactly, or `None` when `a` and `b` are
/// not cohomologous.
pub fn trivialize(a: &Cocycle, b: &Cocycle) -> Option<CoboundaryWitness> {
    let c = cocycle_product(a, &b.inverse()).ok()?;
    CoboundarySolver::new(a.group.clone()).trivialize(&c)
}

/// Computes `H²(G, T)` with representatives of modulus `|G|`.
pub fn schur_multiplier(group: &Arc<FiniteGroup>) -> CohomologyBasis {
    let n = group.order();
    let nn = n as i128;
    let solver = CoboundarySolver::new(group.clone());
    let empty = |solver| CohomologyBasis {
        group: group.clone(),
        invariants: AbelianInvariants::trivial(),
        representatives: Vec::new(),
        modulus: n as u64,
        kernel: None,
        coord_map: IntMatrix::zeros(0, 0),
        coord_cols: Vec::new(),
        solver,
    };
    if n <= 2 {
        return empty(solver);
    }
    let k = n - 1;
    let pair = |g: usize, h: usize| (g - 1) * k + (h - 1);

    // Z²(G, Z/N) as the kernel of the cocycle identity on normalized tables.
    let mut rows = Vec::new();
    for g in 1..n {
        for h in 1..n {
            let gh = group.mul(g, h);
            for l in 1..n {
                let hl = group.mul(h, l);
                let mut row = vec![0i128; k * k];
                row[pair(g, h)] += 1;
                if gh != 0 {
                    row[pair(gh, l)] += 1;
                }
                if hl != 0 {
                    row[pair(g, hl)] -= 1;
                }
                row[pair(h, l)] -= 1;
                if row.iter().any(|&x| x != 0) {
                    rows.push(row);
                }
            }
        }
    }
    let identity = IntMatrix::from_rows(&rows);
    let kernel = kernel_mod(&identity, nn);
    let gens = &kernel.generators;
    let orders = &kernel.orders;
    let r = gens.len();

    // Which combinations Σ c_i z_i satisfy N·z ≡ dμ (mod N²)?
    let n2 = nn * nn;
    let left = solver.snf.left.as_ref().expect("tracked");
    let mut constraint_cols: Vec<Vec<i128>> = Vec::with_capacity(r);
    for z in gens {
        let scaled: Vec<i128> = z.iter().map(|&v| v * nn).collect();
        constraint_cols.push(left.mul_vec(&scaled));
    }
    let m_rows = left.rows();
    let mut constraint = IntMatrix::zeros(m_rows, r);
    for j in 0..m_rows {
        let d = if j < solver.snf.diagonal.len() { solver.snf.diag(j) } else { 0 };
        let e = d.gcd(&n2);
        let scale = n2 / e;
        for (i, col) in constraint_cols.iter().enumerate() {
            constraint.set(j, i, (col[j].rem_euclid(n2) * scale).rem_euclid(n2));
        }
    }
    let dead = kernel_mod(&constraint, n2);
    let mut relations: Vec<Vec<i128>> = dead.generators.clone();
    for (i, &o) in orders.iter().enumerate() {
        let mut row = vec![0i128; r];
        row[i] = o;
        relations.push(row);
    }
    let rel = IntMatrix::from_rows(&relations);
    let snf = smith_normal_form(&rel, SmithOptions { modulus: None, track_left: false, track_right: true });
    let v = snf.right.clone().expect("tracked");
    let v_inv = snf.right_inv.clone().expect("tracked");

    let mut factors = Vec::new();
    let mut coord_cols = Vec::new();
    let mut representatives = Vec::new();
    for i in 0..r {
        let d = snf.diag(i);
        assert!(d != 0, "relation lattice has full rank");
        if d == 1 {
            continue;
        }
        factors.push(d as u64);
        coord_cols.push(i);
        let c = v_inv.row(i);
        let mut flat = vec![0u64; n * n];
        for g in 1..n {
            for h in 1..n {
                let p = pair(g, h);
                let s: i128 = c.iter().zip(gens).map(|(&ci, z)| ci * z[p]).sum();
                flat[g * n + h] = s.rem_euclid(nn) as u64;
            }
        }
        representatives.push(Cocycle::from_flat(group.clone(), n as u64, flat));
    }
    let invariants = AbelianInvariants { factors };
    debug_assert!(invariants.is_canonical());
    CohomologyBasis {
        group: group.clone(),
        invariants,
        representatives,
        modulus: n as u64,
        kernel: Some(kernel),
        coord_map: v,
        coord_cols,
        solver,
    }
}
