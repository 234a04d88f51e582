//! Spectrally trivial actions on finite-dimensional C*-algebras and their
//! twisted equivariant K-theory.
//!
//! An action on `A = ⊕_j M_{m_j}` is `α_g = ⊕_j Ad π_j(g)` for projective
//! representations `π_j` with cocycles `λ_j`. Then
//! `K^λ(α) = ⊕_j R^{λλ_j}(G)`, with `[1_α] = ⊕_j [π_j]` in the trivial class
//! and the partial actions given by tensor products. The invariant is stored
//! over the fixed representatives `λ_c` of `H²(G, T)`; every cocycle that
//! appears as a component table is an exact product such as `λ_c λ_j`, so
//! tables are shared through the [`RepContext`] cache.
//!
//! Homomorphisms of invariants are integer matrices per class. A compatible
//! homomorphism is determined by labels `x_ik ∈ R^{λ̄_i λ_k}(G)` (one per
//! source/target summand pair), acting blockwise by `τ ↦ τ ⊗ x_ik`.

use std::sync::Arc;

use crate::cohomology::{cocycle_product, same_group, CoboundaryWitness, Cocycle};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::intlin::IntMatrix;
use crate::numeric::{self, c, dist, identity, turn_to_phase, CMat};
use crate::projrep::{self, decompose_with, phase, shift_by_mu, IrrepTable, ProjRep, RLambdaElement, RepContext};

/// `G ↷ ⊕_j M_{m_j}` by `Ad π_j`.
#[derive(Clone, Debug)]
pub struct FDAction {
    group: Arc<FiniteGroup>,
    summands: Vec<ProjRep>,
    unital: bool,
}

impl FDAction {
    pub fn new(group: Arc<FiniteGroup>, summands: Vec<ProjRep>, unital: bool) -> Result<Self> {
        if summands.is_empty() {
            return Err(Error::InvalidInput("an action needs at least one summand".into()));
        }
        if summands.iter().any(|p| !same_group(p.group(), &group)) {
            return Err(Error::GroupMismatch);
        }
        Ok(Self { group, summands, unital })
    }

    /// `Ad π` on `M_{dim π}`.
    pub fn single(pi: ProjRep) -> Self {
        Self { group: pi.group().clone(), summands: vec![pi], unital: true }
    }

    /// The trivial action on `C`.
    pub fn trivial_on_c(group: Arc<FiniteGroup>) -> Self {
        Self::single(ProjRep::trivial(group))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn summands(&self) -> &[ProjRep] {
        &self.summands
    }

    pub fn summand(&self, j: usize) -> &ProjRep {
        &self.summands[j]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.summands.iter().map(ProjRep::dim).collect()
    }

    pub fn cocycles(&self) -> Vec<Cocycle> {
        self.summands.iter().map(|p| p.cocycle().clone()).collect()
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn with_unital(mut self, unital: bool) -> Self {
        self.unital = unital;
        self
    }

    pub fn direct_sum(&self, other: &FDAction) -> Result<FDAction> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        Ok(Self { group: self.group.clone(), summands, unital: self.unital && other.unital })
    }

    /// `α ⊗ Ad ρ`, summandwise.
    pub fn tensor_rep(&self, rho: &ProjRep) -> Result<FDAction> {
        let summands = self.summands.iter().map(|p| projrep::tensor(p, rho)).collect::<Result<_>>()?;
        Ok(Self { group: self.group.clone(), summands, unital: self.unital })
    }

    /// `α_g(a)` for `a` given summandwise.
    pub fn act(&self, g: usize, a: &[CMat]) -> Vec<CMat> {
        self.summands
            .iter()
            .zip(a)
            .map(|(p, x)| p.matrix(g) * x * p.matrix(g).adjoint())
            .collect()
    }

    /// The matrix unit `E_ab` in summand `j`, as a summandwise element.
    pub fn matrix_unit(&self, j: usize, a: usize, b: usize) -> Vec<CMat> {
        self.summands
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut m = CMat::zeros(p.dim(), p.dim());
                if i == j {
                    m[(a, b)] = c(1.0, 0.0);
                }
                m
            })
            .collect()
    }

    pub fn unit(&self) -> Vec<CMat> {
        self.summands.iter().map(|p| identity(p.dim())).collect()
    }
}

/// `K^λ(α)`: one free ordered group `R^{λλ_j}(G)` per summand.
#[derive(Clone, Debug)]
pub struct TwistedKGroup {
    cocycle: Cocycle,
    components: Vec<Arc<IrrepTable>>,
    unit: Option<Vec<i64>>,
}

impl TwistedKGroup {
    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn components(&self) -> &[Arc<IrrepTable>] {
        &self.components
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|t| t.len()).sum()
    }

    pub fn component_ranks(&self) -> Vec<usize> {
        self.components.iter().map(|t| t.len()).collect()
    }

    /// Offset of component `j` in flat coordinates.
    pub fn offset(&self, j: usize) -> usize {
        self.components[..j].iter().map(|t| t.len()).sum()
    }

    /// Coordinates of `[1_α]` (or its image under the change of cocycle)
    /// when the cocycle is cohomologically trivial.
    pub fn unit(&self) -> Option<&[i64]> {
        self.unit.as_deref()
    }

    /// `(component, irrep)` of a flat coordinate.
    pub fn locate(&self, flat: usize) -> (usize, usize) {
        let mut rest = flat;
        for (j, t) in self.components.iter().enumerate() {
            if rest < t.len() {
                return (j, rest);
            }
            rest -= t.len();
        }
        panic!("coordinate {flat} out of range");
    }
}

/// `K^λ(α)` for an arbitrary cocycle `λ`.
pub fn k0_lambda(ctx: &RepContext, alpha: &FDAction, lambda: &Cocycle) -> Result<TwistedKGroup> {
    if !same_group(ctx.group(), alpha.group()) || !same_group(ctx.group(), lambda.group()) {
        return Err(Error::GroupMismatch);
    }
    let components = alpha
        .summands
        .iter()
        .map(|p| ctx.irrep_table(&cocycle_product(lambda, p.cocycle())?))
        .collect::<Result<Vec<_>>>()?;
    let unit = if lambda.is_trivial() {
        let mut flat = Vec::new();
        for (p, t) in alpha.summands.iter().zip(&components) {
            flat.extend(decompose_with(p, t, ctx.tolerances())?.coeffs().iter().copied());
        }
        Some(flat)
    } else if let Some(mu) = ctx.basis().solver().trivialize(lambda) {
        let mut flat = Vec::new();
        for (p, t) in alpha.summands.iter().zip(&components) {
            flat.extend(decompose_with(&shift_by_mu(p, &mu), t, ctx.tolerances())?.coeffs().iter().copied());
        }
        Some(flat)
    } else {
        None
    };
    Ok(TwistedKGroup { cocycle: lambda.clone(), components, unit })
}

/// An element of `K^{λ_c}` for a representative class `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KElement {
    pub class: usize,
    pub coords: Vec<i64>,
}

/// `Ell(α)` over the representatives of `H²(G, T)`.
#[derive(Clone, Debug)]
pub struct EllInvariant {
    ctx: Arc<RepContext>,
    cocycles: Vec<Cocycle>,
    groups: Vec<TwistedKGroup>,
    unital: bool,
}

pub fn ell_invariant(ctx: &Arc<RepContext>, alpha: &FDAction) -> Result<EllInvariant> {
    let basis = ctx.basis();
    let groups = basis
        .all_classes()
        .iter()
        .map(|coords| k0_lambda(ctx, alpha, &basis.representative(coords)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EllInvariant { ctx: ctx.clone(), cocycles: alpha.cocycles(), groups, unital: alpha.unital })
}

/// `Ell` of the action whose summand `j` carries `⊕ units[j]`, without
/// building matrices.
pub fn ell_from_multiplicities(ctx: &Arc<RepContext>, units: &[RLambdaElement], unital: bool) -> Result<EllInvariant> {
    if units.is_empty() {
        return Err(Error::InvalidInput("an action needs at least one summand".into()));
    }
    let basis = ctx.basis();
    let cocycles: Vec<Cocycle> = units.iter().map(|u| u.cocycle().clone()).collect();
    let mut groups = Vec::with_capacity(basis.num_classes());
    for (idx, coords) in basis.all_classes().iter().enumerate() {
        let lambda = basis.representative(coords);
        let components = cocycles
            .iter()
            .map(|l| ctx.irrep_table(&cocycle_product(&lambda, l)?))
            .collect::<Result<Vec<_>>>()?;
        let unit = (idx == 0).then(|| units.iter().flat_map(|u| u.coeffs().iter().copied()).collect());
        groups.push(TwistedKGroup { cocycle: lambda, components, unit });
    }
    Ok(EllInvariant { ctx: ctx.clone(), cocycles, groups, unital })
}

impl EllInvariant {
    pub fn context(&self) -> &Arc<RepContext> {
        &self.ctx
    }

    pub fn num_classes(&self) -> usize {
        self.groups.len()
    }

    pub fn num_summands(&self) -> usize {
        self.cocycles.len()
    }

    pub fn summand_cocycles(&self) -> &[Cocycle] {
        &self.cocycles
    }

    pub fn group_at(&self, class: usize) -> &TwistedKGroup {
        &self.groups[class]
    }

    pub fn groups(&self) -> &[TwistedKGroup] {
        &self.groups
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.groups.iter().map(TwistedKGroup::rank).collect()
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    /// `[1_α]` in the trivial class (the top of the scale when non-unital).
    pub fn unit(&self) -> &[i64] {
        self.groups[0].unit().expect("trivial class carries the unit")
    }

    /// Class index of a summand cocycle.
    pub fn summand_class(&self, j: usize) -> Result<usize> {
        let b = self.ctx.basis();
        Ok(b.class_index(&b.class_coordinates(&self.cocycles[j])?))
    }

    pub fn representative(&self, class: usize) -> &Cocycle {
        &self.groups[class].cocycle
    }

    /// Summandwise sum of two invariants, as for `α ⊕ β`.
    pub fn direct_sum(&self, other: &EllInvariant) -> Result<EllInvariant> {
        if !same_group(self.ctx.group(), other.ctx.group()) {
            return Err(Error::GroupMismatch);
        }
        let mut cocycles = self.cocycles.clone();
        cocycles.extend(other.cocycles.iter().cloned());
        let groups = self
            .groups
            .iter()
            .zip(&other.groups)
            .map(|(a, b)| {
                let mut components = a.components.clone();
                components.extend(b.components.iter().cloned());
                let unit = match (&a.unit, &b.unit) {
                    (Some(x), Some(y)) => Some(x.iter().chain(y).copied().collect()),
                    _ => None,
                };
                TwistedKGroup { cocycle: a.cocycle.clone(), components, unit }
            })
            .collect();
        Ok(EllInvariant { ctx: self.ctx.clone(), cocycles, groups, unital: self.unital && other.unital })
    }

    /// Matrix of the partial action of `x` from `K^{λ_from}` to `K^{λ_to}`.
    /// When `λ_x λ_from` differs from `λ_to` by a coboundary `dμ`, the image
    /// is transported along `f_{μ⁻¹}`.
    pub fn action_matrix(&self, x: &RLambdaElement, from: usize, to: usize) -> Result<IntMatrix> {
        let ctx = &self.ctx;
        let basis = ctx.basis();
        let lx = basis.class_coordinates(x.cocycle())?;
        let expected = basis.add_classes(&lx, &basis.class_at(from));
        if basis.class_index(&expected) != to {
            return Err(Error::ClassMismatch(format!(
                "element of class {lx:?} maps class {from} to {expected:?}, not class {to}"
            )));
        }
        let src = &self.groups[from];
        let dst = &self.groups[to];
        let prod = cocycle_product(x.cocycle(), &src.cocycle)?;
        let shift = if prod == dst.cocycle {
            None
        } else {
            Some(basis.trivialize(&prod, &dst.cocycle).expect("classes agree").inverse())
        };
        let mut m = IntMatrix::zeros(dst.rank(), src.rank());
        for (j, table) in src.components.iter().enumerate() {
            let s = ctx.structure_constants(x.cocycle(), table.cocycle())?;
            let mid = cocycle_product(x.cocycle(), table.cocycle())?;
            let transport = match &shift {
                None => None,
                Some(mu) => Some(shift_matrix(ctx, &mid, mu)?.0),
            };
            let (r0, c0) = (dst.offset(j), src.offset(j));
            for a in 0..table.len() {
                let mut col = vec![0i64; ctx.irrep_table(&mid)?.len()];
                for (i, &xi) in x.coeffs().iter().enumerate() {
                    if xi != 0 {
                        for (t, &v) in s[i][a].iter().enumerate() {
                            col[t] += xi * v;
                        }
                    }
                }
                let col: Vec<i128> = match &transport {
                    None => col.iter().map(|&v| v as i128).collect(),
                    Some(tm) => tm.mul_vec(&col.iter().map(|&v| v as i128).collect::<Vec<_>>()),
                };
                for (t, v) in col.into_iter().enumerate() {
                    m.set(r0 + t, c0 + a, v);
                }
            }
        }
        Ok(m)
    }

    pub fn apply_partial_action(&self, x: &RLambdaElement, k: &KElement, target: usize) -> Result<KElement> {
        let m = self.action_matrix(x, k.class, target)?;
        let v = m.mul_vec(&k.coords.iter().map(|&v| v as i128).collect::<Vec<_>>());
        Ok(KElement { class: target, coords: v.into_iter().map(|x| x as i64).collect() })
    }

    /// `K^ω(α)` for an arbitrary cocycle, with the transport matrices
    /// `f_μ: K^{λ_c} → K^ω` and `f_{μ⁻¹}` back, where `ω = dμ·λ_c`. Also
    /// returns the largest multiplicity rounding residual.
    pub fn change_of_cocycle(&self, omega: &Cocycle) -> Result<CocycleChange> {
        let basis = self.ctx.basis();
        let class = basis.class_index(&basis.class_coordinates(omega)?);
        let rep = &self.groups[class].cocycle;
        let mu = basis.trivialize(omega, rep).expect("same class");
        let src = &self.groups[class];
        let rank = src.rank();
        let mut forward = IntMatrix::zeros(rank, rank);
        let mut backward = IntMatrix::zeros(rank, rank);
        let mut residual = 0.0f64;
        for (j, table) in src.components.iter().enumerate() {
            let (f, r1) = shift_matrix(&self.ctx, table.cocycle(), &mu)?;
            let shifted = cocycle_product(omega, &self.cocycles[j])?;
            let (b, r2) = shift_matrix(&self.ctx, &shifted, &mu.inverse())?;
            residual = residual.max(r1).max(r2);
            let o = src.offset(j);
            forward.set_block(o, o, &f);
            backward.set_block(o, o, &b);
        }
        Ok(CocycleChange { class, mu, forward, backward, residual })
    }
}

/// Transport between `K^{λ_c}` and `K^ω` along `f_μ`.
#[derive(Clone, Debug)]
pub struct CocycleChange {
    pub class: usize,
    pub mu: CoboundaryWitness,
    pub forward: IntMatrix,
    pub backward: IntMatrix,
    pub residual: f64,
}

/// The bijection of irreps `τ ↦ μτ` from `table(σ)` to `table(dμ·σ)`, with
/// the largest rounding residual seen while decomposing.
pub fn shift_matrix(ctx: &RepContext, sigma: &Cocycle, mu: &CoboundaryWitness) -> Result<(IntMatrix, f64)> {
    let from = ctx.irrep_table(sigma)?;
    let target_cocycle = cocycle_product(&crate::cohomology::coboundary(ctx.group(), mu), sigma)?;
    let to = ctx.irrep_table(&target_cocycle)?;
    let mut m = IntMatrix::zeros(to.len(), from.len());
    let mut residual = 0.0f64;
    for (a, tau) in from.irreps().iter().enumerate() {
        let shifted = shift_by_mu(tau, mu);
        let (d, r) = projrep::decompose_detailed(&shifted, &to, ctx.tolerances())?;
        residual = residual.max(r);
        for (b, &v) in d.coeffs().iter().enumerate() {
            m.set(b, a, v as i128);
        }
    }
    Ok((m, residual))
}

/// A homomorphism `Ell(α) → Ell(β)`: one integer matrix per class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantHom {
    pub matrices: Vec<IntMatrix>,
    pub positive: bool,
    pub contractive: bool,
    pub unital: bool,
}

impl InvariantHom {
    fn with_flags(matrices: Vec<IntMatrix>, src: &EllInvariant, dst: &EllInvariant) -> Self {
        let positive = matrices.iter().all(IntMatrix::is_nonnegative);
        let image = matrices[0].mul_vec(&src.unit().iter().map(|&v| v as i128).collect::<Vec<_>>());
        let unit: Vec<i128> = dst.unit().iter().map(|&v| v as i128).collect();
        let contractive = image.iter().zip(&unit).all(|(a, b)| a <= b);
        let unital = image == unit;
        Self { matrices, positive, contractive, unital }
    }

    pub fn from_matrices(matrices: Vec<IntMatrix>, src: &EllInvariant, dst: &EllInvariant) -> Result<Self> {
        if matrices.len() != src.num_classes() || dst.num_classes() != src.num_classes() {
            return Err(Error::InvalidInput("one matrix per cohomology class is required".into()));
        }
        for (c, m) in matrices.iter().enumerate() {
            if m.rows() != dst.groups[c].rank() || m.cols() != src.groups[c].rank() {
                return Err(Error::InvalidInput(format!("matrix for class {c} has the wrong shape")));
            }
        }
        Ok(Self::with_flags(matrices, src, dst))
    }

    pub fn identity(e: &EllInvariant) -> Self {
        let matrices = e.groups.iter().map(|g| IntMatrix::identity(g.rank())).collect();
        Self::with_flags(matrices, e, e)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &InvariantHom) -> InvariantHom {
        let matrices: Vec<IntMatrix> = self.matrices.iter().zip(&other.matrices).map(|(a, b)| b.mul(a)).collect();
        InvariantHom {
            positive: matrices.iter().all(IntMatrix::is_nonnegative),
            contractive: self.contractive && other.contractive,
            unital: self.unital && other.unital,
            matrices,
        }
    }

    pub fn transpose(&self) -> InvariantHom {
        InvariantHom { matrices: self.matrices.iter().map(IntMatrix::transpose).collect(), ..self.clone() }
    }
}

/// `labels[i][k] ∈ R^{λ̄_i λ_k}(G)` for source summand `i`, target `k`.
pub type Labels = Vec<Vec<RLambdaElement>>;

fn label_table(ctx: &RepContext, src: &EllInvariant, dst: &EllInvariant, i: usize, k: usize) -> Result<Arc<IrrepTable>> {
    ctx.irrep_table(&cocycle_product(&src.cocycles[i].inverse(), &dst.cocycles[k])?)
}

/// The homomorphism acting blockwise by `τ ↦ τ ⊗ x_ik`.
pub fn hom_from_labels(src: &EllInvariant, dst: &EllInvariant, labels: &Labels) -> Result<InvariantHom> {
    let ctx = &src.ctx;
    let mut matrices = Vec::with_capacity(src.num_classes());
    for cls in 0..src.num_classes() {
        let (gs, gd) = (&src.groups[cls], &dst.groups[cls]);
        let mut m = IntMatrix::zeros(gd.rank(), gs.rank());
        for (i, ts) in gs.components.iter().enumerate() {
            for (k, td) in gd.components.iter().enumerate() {
                let x = &labels[i][k];
                if x.coeffs().iter().all(|&v| v == 0) {
                    continue;
                }
                let s = ctx.structure_constants(ts.cocycle(), x.cocycle())?;
                debug_assert_eq!(cocycle_product(ts.cocycle(), x.cocycle())?, *td.cocycle());
                for a in 0..ts.len() {
                    for (l, &xl) in x.coeffs().iter().enumerate() {
                        if xl == 0 {
                            continue;
                        }
                        for (b, &v) in s[a][l].iter().enumerate() {
                            let (r, col) = (gd.offset(k) + b, gs.offset(i) + a);
                            m.set(r, col, m.get(r, col) + (xl * v) as i128);
                        }
                    }
                }
            }
        }
        matrices.push(m);
    }
    Ok(InvariantHom::with_flags(matrices, src, dst))
}

/// Reads the labels of `Γ` off the images of the trivial representation,
/// viewed in `K^{λ̄_i}` of each source summand.
pub fn labels_of(gamma: &InvariantHom, src: &EllInvariant, dst: &EllInvariant) -> Result<Labels> {
    let ctx = &src.ctx;
    let basis = ctx.basis();
    let mut labels = Vec::with_capacity(src.num_summands());
    for i in 0..src.num_summands() {
        let ci = basis.class_coordinates(&src.cocycles[i])?;
        let cls = basis.class_index(&basis.neg_class(&ci));
        let gs = &src.groups[cls];
        let sigma = gs.components[i].cocycle().clone();
        let mu = basis.solver().trivialize(&sigma).expect("λ_c λ_i is cohomologically trivial");
        let n = ctx.group().order();
        let nu: Vec<CMat> = (0..n).map(|g| CMat::from_element(1, 1, turn_to_phase(mu.turn(g)))).collect();
        let nu = ProjRep::from_parts_unchecked(sigma.clone(), nu);
        let e = decompose_with(&nu, &gs.components[i], ctx.tolerances())?;
        let a = e.coeffs().iter().position(|&v| v == 1).expect("one-dimensional");
        let col = gamma.matrices[cls].column(gs.offset(i) + a);
        let gd = &dst.groups[cls];
        let mut row = Vec::with_capacity(dst.num_summands());
        for (k, td) in gd.components.iter().enumerate() {
            let y: Vec<i128> = col[gd.offset(k)..gd.offset(k) + td.len()].to_vec();
            let (tm, _) = shift_matrix(ctx, td.cocycle(), &mu.inverse())?;
            let x = tm.mul_vec(&y);
            let table = label_table(ctx, src, dst, i, k)?;
            row.push(RLambdaElement::new(table, x.into_iter().map(|v| v as i64).collect())?);
        }
        labels.push(row);
    }
    Ok(labels)
}

/// Checks every square `Γ^{c'} ∘ [x] = [x] ∘ Γ^c` for `x` ranging over the
/// irreps of `R^{λ̄_c λ_{c'}}(G)`.
pub fn check_compatible(gamma: &InvariantHom, src: &EllInvariant, dst: &EllInvariant) -> Result<()> {
    let ctx = &src.ctx;
    let nc = src.num_classes();
    for from in 0..nc {
        for to in 0..nc {
            let psi = cocycle_product(&src.groups[from].cocycle.inverse(), &src.groups[to].cocycle)?;
            let table = ctx.irrep_table(&psi)?;
            for idx in 0..table.len() {
                let x = RLambdaElement::basis(table.clone(), idx);
                let lhs = gamma.matrices[to].mul(&src.action_matrix(&x, from, to)?);
                let rhs = dst.action_matrix(&x, from, to)?.mul(&gamma.matrices[from]);
                if lhs != rhs {
                    return Err(Error::NotCompatible(format!(
                        "square for irrep {idx} of the class {from} -> {to} action"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Validates `Γ` for realization and returns its labels.
pub fn validate_hom(gamma: &InvariantHom, src: &EllInvariant, dst: &EllInvariant) -> Result<Labels> {
    if gamma.matrices.len() != src.num_classes() {
        return Err(Error::InvalidInput("one matrix per cohomology class is required".into()));
    }
    if let Some((c, m)) = gamma.matrices.iter().enumerate().find(|(_, m)| !m.is_nonnegative()) {
        let (i, j) = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .find(|&(i, j)| m.get(i, j) < 0)
            .expect("negative entry");
        return Err(Error::NotPositive(format!("class {c}, entry ({i}, {j}) = {}", m.get(i, j))));
    }
    check_compatible(gamma, src, dst)?;
    let labels = labels_of(gamma, src, dst)?;
    if hom_from_labels(src, dst, &labels)?.matrices != gamma.matrices {
        return Err(Error::NotCompatible("not induced by tensoring with its labels".into()));
    }
    let flags = InvariantHom::with_flags(gamma.matrices.clone(), src, dst);
    if !flags.contractive {
        return Err(Error::NotContractive("image of the unit exceeds the target unit".into()));
    }
    Ok(labels)
}

/// A concrete equivariant homomorphism
/// `T(a)_k = W_k (⊕_{(i,d)} a_i ⊗ I_d) W_k*`.
#[derive(Clone, Debug)]
pub struct EquivariantHom {
    source: Arc<FDAction>,
    target: Arc<FDAction>,
    parts: Vec<HomPart>,
}

#[derive(Clone, Debug)]
struct HomPart {
    w: CMat,
    blocks: Vec<(usize, usize)>,
}

impl EquivariantHom {
    pub fn source(&self) -> &Arc<FDAction> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FDAction> {
        &self.target
    }

    /// The isometry into target summand `k`.
    pub fn isometry(&self, k: usize) -> &CMat {
        &self.parts[k].w
    }

    /// `(source summand, multiplicity)` blocks feeding target summand `k`.
    pub fn blocks(&self, k: usize) -> &[(usize, usize)] {
        &self.parts[k].blocks
    }

    pub fn identity(alpha: Arc<FDAction>) -> Self {
        let parts = alpha
            .summands
            .iter()
            .enumerate()
            .map(|(j, p)| HomPart { w: identity(p.dim()), blocks: vec![(j, 1)] })
            .collect();
        Self { source: alpha.clone(), target: alpha, parts }
    }

    /// Builds a homomorphism from explicit isometries, checking shapes.
    pub fn from_parts(
        source: Arc<FDAction>,
        target: Arc<FDAction>,
        parts: Vec<(CMat, Vec<(usize, usize)>)>,
    ) -> Result<Self> {
        if parts.len() != target.summands.len() {
            return Err(Error::InvalidInput("one part per target summand".into()));
        }
        let sizes = source.sizes();
        let mut out = Vec::with_capacity(parts.len());
        for (k, (w, blocks)) in parts.into_iter().enumerate() {
            let used: usize = blocks.iter().map(|&(i, d)| sizes.get(i).copied().unwrap_or(0) * d).sum();
            if w.nrows() != target.summands[k].dim() || w.ncols() != used || blocks.iter().any(|&(i, _)| i >= sizes.len()) {
                return Err(Error::DimensionOverflow(format!("part {k} has inconsistent dimensions")));
            }
            out.push(HomPart { w, blocks });
        }
        Ok(Self { source, target, parts: out })
    }

    pub fn apply(&self, a: &[CMat]) -> Vec<CMat> {
        self.parts
            .iter()
            .map(|part| {
                let inner: Vec<CMat> = part
                    .blocks
                    .iter()
                    .map(|&(i, d)| numeric::kron(&a[i], &identity(d)))
                    .collect();
                if inner.is_empty() {
                    let n = part.w.nrows();
                    return CMat::zeros(n, n);
                }
                &part.w * numeric::block_diag(&inner) * part.w.adjoint()
            })
            .collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &EquivariantHom) -> Result<EquivariantHom> {
        if !Arc::ptr_eq(&self.target, &other.source) && self.target.sizes() != other.source.sizes() {
            return Err(Error::InvalidInput("homomorphisms are not composable".into()));
        }
        let parts = other
            .parts
            .iter()
            .map(|p2| {
                let mut lifts = Vec::new();
                let mut blocks = Vec::new();
                for &(k, d2) in &p2.blocks {
                    lifts.push(numeric::kron(&self.parts[k].w, &identity(d2)));
                    blocks.extend(self.parts[k].blocks.iter().map(|&(i, d1)| (i, d1 * d2)));
                }
                let w = if lifts.is_empty() {
                    CMat::zeros(p2.w.nrows(), 0)
                } else {
                    &p2.w * numeric::block_diag(&lifts)
                };
                HomPart { w, blocks }
            })
            .collect();
        Ok(EquivariantHom { source: self.source.clone(), target: other.target.clone(), parts })
    }

    /// Relative deviation from equivariance and multiplicativity on random
    /// elements. Cheaper than [`Self::defect`] for large summands.
    pub fn sampled_defect(&self, seed: u64, samples: usize) -> f64 {
        let src = &self.source;
        let mut rng = numeric::rng_from(numeric::mix_all(seed, [0x5341_4d50]));
        let mut worst = 0.0f64;
        let rel = |x: &[CMat], y: &[CMat]| -> f64 {
            let scale: f64 = y.iter().map(|m| m.norm()).fold(1.0, f64::max);
            x.iter().zip(y).map(|(a, b)| dist(a, b)).fold(0.0, f64::max) / scale
        };
        for _ in 0..samples {
            let a: Vec<CMat> = src.summands.iter().map(|p| numeric::random_matrix(p.dim(), p.dim(), &mut rng)).collect();
            let b: Vec<CMat> = src.summands.iter().map(|p| numeric::random_matrix(p.dim(), p.dim(), &mut rng)).collect();
            let ab: Vec<CMat> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
            let (ta, tb) = (self.apply(&a), self.apply(&b));
            let prod: Vec<CMat> = ta.iter().zip(&tb).map(|(x, y)| x * y).collect();
            worst = worst.max(rel(&self.apply(&ab), &prod));
            let adj: Vec<CMat> = a.iter().map(|x| x.adjoint()).collect();
            let tadj: Vec<CMat> = ta.iter().map(|x| x.adjoint()).collect();
            worst = worst.max(rel(&self.apply(&adj), &tadj));
            for g in src.group.elements() {
                worst = worst.max(rel(&self.apply(&src.act(g, &a)), &self.target.act(g, &ta)));
            }
        }
        worst
    }

    /// Largest deviation from equivariance and from being a
    /// *-homomorphism, over matrix units and group elements.
    pub fn defect(&self) -> f64 {
        let src = &self.source;
        let mut worst = 0.0f64;
        let units: Vec<(usize, usize, usize)> = src
            .summands
            .iter()
            .enumerate()
            .flat_map(|(j, p)| (0..p.dim()).flat_map(move |a| (0..p.dim()).map(move |b| (j, a, b))))
            .collect();
        let images: Vec<Vec<CMat>> = units.iter().map(|&(j, a, b)| self.apply(&src.matrix_unit(j, a, b))).collect();
        for (u, &(j, a, b)) in units.iter().enumerate() {
            for g in src.group.elements() {
                let lhs = self.apply(&src.act(g, &src.matrix_unit(j, a, b)));
                let rhs = self.target.act(g, &images[u]);
                for (x, y) in lhs.iter().zip(&rhs) {
                    worst = worst.max(dist(x, y));
                }
            }
            for (v, &(j2, a2, b2)) in units.iter().enumerate() {
                if j2 != j {
                    continue;
                }
                for k in 0..images[u].len() {
                    let prod = &images[u][k] * &images[v][k];
                    let want = if b == a2 {
                        images[units.iter().position(|&t| t == (j, a, b2)).expect("unit")][k].clone()
                    } else {
                        CMat::zeros(prod.nrows(), prod.ncols())
                    };
                    worst = worst.max(dist(&prod, &want));
                }
            }
            for k in 0..images[u].len() {
                let adj = &images[units.iter().position(|&t| t == (j, b, a)).expect("unit")][k];
                worst = worst.max(dist(&images[u][k].adjoint(), adj));
            }
        }
        worst
    }
}

/// Realizes a positive, compatible, contractive `Γ` by block embeddings
/// `a ↦ W(a ⊗ 1)W*` with `W` an isometric intertwiner.
pub fn realize_hom(
    gamma: &InvariantHom,
    src: &EllInvariant,
    dst: &EllInvariant,
    alpha: &Arc<FDAction>,
    beta: &Arc<FDAction>,
    seed: u64,
) -> Result<EquivariantHom> {
    let labels = validate_hom(gamma, src, dst)?;
    realize_labels(&labels, alpha, beta, src.context(), seed)
}

/// Realizes labels directly, without re-validating an invariant hom.
pub fn realize_labels(
    labels: &Labels,
    alpha: &Arc<FDAction>,
    beta: &Arc<FDAction>,
    ctx: &RepContext,
    seed: u64,
) -> Result<EquivariantHom> {
    let tol = ctx.tolerances();
    let n = ctx.group().order();
    let mut rng = numeric::rng_from(numeric::mix_all(seed, [0x5245_414c, alpha.sizes().len() as u64]));
    let mut parts = Vec::with_capacity(beta.summands.len());
    for (k, pb) in beta.summands.iter().enumerate() {
        let mut reps = Vec::new();
        let mut blocks = Vec::new();
        for (i, pa) in alpha.summands.iter().enumerate() {
            let x = &labels[i][k];
            if x.dim() == 0 {
                continue;
            }
            let gamma_rep = x.realize()?;
            reps.push(projrep::tensor(pa, &gamma_rep)?);
            blocks.push((i, gamma_rep.dim()));
        }
        let used: usize = reps.iter().map(ProjRep::dim).sum();
        if used > pb.dim() {
            return Err(Error::DimensionOverflow(format!(
                "target summand {k} has dimension {} but {used} is required",
                pb.dim()
            )));
        }
        if reps.is_empty() {
            parts.push(HomPart { w: CMat::zeros(pb.dim(), 0), blocks });
            continue;
        }
        let sigma = projrep::direct_sum(&reps)?;
        if sigma.cocycle() != pb.cocycle() {
            return Err(Error::CocycleMismatch);
        }
        let mut found = None;
        for _ in 0..=tol.max_retries {
            let x = numeric::random_matrix(pb.dim(), used, &mut rng);
            let mut avg = CMat::zeros(pb.dim(), used);
            for g in 0..n {
                avg += pb.matrix(g) * &x * sigma.matrix(g).adjoint();
            }
            avg /= c(n as f64, 0.0);
            let (w, smin) = numeric::polar_unitary(&avg);
            if smin > 1e-6 {
                found = Some(w);
                break;
            }
        }
        let w = found.ok_or_else(|| {
            Error::NotContractive(format!("no isometric intertwiner into target summand {k}"))
        })?;
        parts.push(HomPart { w, blocks });
    }
    Ok(EquivariantHom { source: alpha.clone(), target: beta.clone(), parts })
}

/// The labels of a concrete homomorphism, read off from the range of
/// `(id ⊗ T)(e)` where `e` projects onto the invariant vector of `ρ̄ ⊗ ρ`.
pub fn induced_labels(t: &EquivariantHom, src: &EllInvariant, dst: &EllInvariant) -> Result<Labels> {
    let ctx = src.context();
    let alpha = &t.source;
    let beta = &t.target;
    let mut labels = Vec::with_capacity(alpha.summands.len());
    for (i, rho) in alpha.summands.iter().enumerate() {
        let m = rho.dim();
        let rho_bar = projrep::contragredient(rho);
        let mut row = Vec::with_capacity(beta.summands.len());
        // range(e) is spanned by (1/√m) Σ_a e_a ⊗ T(E_a0) y for y in range T(E_00)
        let columns: Vec<Vec<CMat>> = (0..m).map(|a| t.apply(&alpha.matrix_unit(i, a, 0))).collect();
        for (k, pb) in beta.summands.iter().enumerate() {
            let table = label_table(ctx, src, dst, i, k)?;
            let nk = pb.dim();
            let (vals, vecs) = numeric::hermitian_eigen(&columns[0][k]);
            if vals.iter().any(|&v| v.abs() > 1e-6 && (v - 1.0).abs() > 1e-6) {
                return Err(Error::NumericalDegeneracy(format!("T(e_00) is not a projection on summand {k}")));
            }
            let scale = c(1.0 / (m as f64).sqrt(), 0.0);
            let ys: Vec<CMat> = (0..nk)
                .filter(|&r| vals[r] > 0.5)
                .map(|r| {
                    let y = vecs.column(r).into_owned();
                    let mut big = CMat::zeros(nk, m);
                    for a in 0..m {
                        big.set_column(a, &(&columns[a][k] * &y * scale));
                    }
                    big
                })
                .collect();
            if ys.is_empty() {
                row.push(RLambdaElement::zero(table));
                continue;
            }
            let d = ys.len();
            let mats: Vec<CMat> = (0..ctx.group().order())
                .map(|g| {
                    let rt = rho_bar.matrix(g).transpose();
                    let moved: Vec<CMat> = ys.iter().map(|y| pb.matrix(g) * y * &rt).collect();
                    CMat::from_fn(d, d, |s, t| ys[s].zip_fold(&moved[t], c(0.0, 0.0), |acc, a, b| acc + a.conj() * b))
                })
                .collect();
            let gamma = ProjRep::new(table.cocycle().clone(), mats, &projrep::Tolerances {
                unitary: 1e-7,
                mult: 1e-7,
                ..*ctx.tolerances()
            })?;
            row.push(decompose_with(&gamma, &table, ctx.tolerances())?);
        }
        labels.push(row);
    }
    Ok(labels)
}

pub fn induced_hom(t: &EquivariantHom, src: &EllInvariant, dst: &EllInvariant) -> Result<InvariantHom> {
    hom_from_labels(src, dst, &induced_labels(t, src, dst)?)
}

/// A unitary `u` commuting with the target action with `Ad u ∘ T₁ = T₂`,
/// together with the residual.
pub fn unitary_intertwiner(t1: &EquivariantHom, t2: &EquivariantHom, ctx: &RepContext, seed: u64) -> Result<(Vec<CMat>, f64)> {
    let alpha = &t1.source;
    let beta = &t1.target;
    let tol = ctx.tolerances();
    let n = ctx.group().order();
    let mut rng = numeric::rng_from(numeric::mix_all(seed, [0x554e_4954]));
    // E_a0 and E_0a generate, and Σ_ab E_ab ⊗ E_ba factors through them
    let gens = |t: &EquivariantHom, col: bool| -> Vec<Vec<Vec<CMat>>> {
        alpha
            .summands
            .iter()
            .enumerate()
            .map(|(j, p)| {
                (0..p.dim())
                    .map(|a| t.apply(&if col { alpha.matrix_unit(j, a, 0) } else { alpha.matrix_unit(j, 0, a) }))
                    .collect()
            })
            .collect()
    };
    let (col1, rowv1) = (gens(t1, true), gens(t1, false));
    let (col2, rowv2) = (gens(t2, true), gens(t2, false));
    let p1 = t1.apply(&alpha.unit());
    let p2 = t2.apply(&alpha.unit());
    let mut out = Vec::with_capacity(beta.summands.len());
    let mut worst = 0.0f64;
    for (k, pb) in beta.summands.iter().enumerate() {
        let nk = pb.dim();
        let mut best: Option<(CMat, f64)> = None;
        for _ in 0..=tol.max_retries {
            let x = numeric::random_matrix(nk, nk, &mut rng);
            let mut phi = (identity(nk) - &p2[k]) * &x * (identity(nk) - &p1[k]);
            for j in 0..alpha.summands.len() {
                let mut inner = CMat::zeros(nk, nk);
                for b in 0..col1[j].len() {
                    inner += &rowv2[j][b][k] * &x * &col1[j][b][k];
                }
                for a in 0..col1[j].len() {
                    phi += &col2[j][a][k] * &inner * &rowv1[j][a][k];
                }
            }
            let mut avg = CMat::zeros(nk, nk);
            for g in 0..n {
                avg += pb.matrix(g) * &phi * pb.matrix(g).adjoint();
            }
            avg /= c(n as f64, 0.0);
            let (u, smin) = numeric::polar_unitary(&avg);
            if smin < 1e-6 {
                continue;
            }
            let mut res = 0.0f64;
            for j in 0..alpha.summands.len() {
                for a in 0..col1[j].len() {
                    res = res.max(dist(&(&u * &col1[j][a][k] * u.adjoint()), &col2[j][a][k]));
                    res = res.max(dist(&(&u * &rowv1[j][a][k] * u.adjoint()), &rowv2[j][a][k]));
                }
            }
            for g in 0..n {
                res = res.max(dist(&(pb.matrix(g) * &u), &(&u * pb.matrix(g))));
            }
            if res <= 1e-8 {
                best = Some((u, res));
                break;
            }
        }
        let (u, res) = best.ok_or_else(|| Error::NoUnitary(format!("target summand {k}")))?;
        worst = worst.max(res);
        out.push(u);
    }
    Ok((out, worst))
}

/// Block sizes, largest first, of the twisted crossed product `A ⋊_{α,ω} G`
/// realized on `C^{Σm} ⊗ ℓ²(G)` by `(π(a)ξ)(g) = α_{g⁻¹}(a)ξ(g)` and
/// `u_h(ξ ⊗ δ_g) = ω(h, g) ξ ⊗ δ_{hg}`.
pub fn twisted_crossed_product(alpha: &FDAction, omega: &Cocycle, seed: u64) -> Result<Vec<usize>> {
    twisted_crossed_product_with(alpha, omega, seed, &projrep::Tolerances::default())
}

pub fn twisted_crossed_product_with(
    alpha: &FDAction,
    omega: &Cocycle,
    seed: u64,
    tol: &projrep::Tolerances,
) -> Result<Vec<usize>> {
    let g = alpha.group().clone();
    if !same_group(&g, omega.group()) {
        return Err(Error::GroupMismatch);
    }
    let n = g.order();
    let sizes = alpha.sizes();
    let s: usize = sizes.iter().sum();
    let dim = s * n;
    let offsets: Vec<usize> = sizes.iter().scan(0, |acc, &m| {
        let o = *acc;
        *acc += m;
        Some(o)
    }).collect();

    let embed = |a: &[CMat]| -> CMat { numeric::block_diag(a) };
    let pi_of = |a: &[CMat]| -> CMat {
        let blocks: Vec<CMat> = (0..n).map(|x| embed(&alpha.act(g.inv(x), a))).collect();
        numeric::block_diag(&blocks)
    };
    let u: Vec<CMat> = (0..n)
        .map(|h| {
            let mut m = CMat::zeros(dim, dim);
            for x in 0..n {
                let hx = g.mul(h, x);
                let w = phase(omega, h, x);
                for r in 0..s {
                    m[(hx * s + r, x * s + r)] = w;
                }
            }
            m
        })
        .collect();

    let units: Vec<(usize, usize, usize)> = sizes
        .iter()
        .enumerate()
        .flat_map(|(j, &m)| (0..m).flat_map(move |a| (0..m).map(move |b| (j, a, b))))
        .collect();
    let pis: Vec<CMat> = units.iter().map(|&(j, a, b)| pi_of(&alpha.matrix_unit(j, a, b))).collect();

    let check = 1e-8 * (dim as f64).max(1.0);
    for (idx, &(j, a, b)) in units.iter().enumerate() {
        for h in 0..n {
            let lhs = &u[h] * &pis[idx] * u[h].adjoint();
            let rhs = pi_of(&alpha.act(h, &alpha.matrix_unit(j, a, b)));
            if dist(&lhs, &rhs) > check {
                return Err(Error::CovarianceCheckFailed(format!("u_{h} π(a) u_{h}* ≠ π(α_{h}(a))")));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if dist(&(&u[x] * &u[y]), &(&u[g.mul(x, y)] * phase(omega, x, y))) > check {
                return Err(Error::CovarianceCheckFailed(format!("u_{x} u_{y} ≠ ω({x},{y}) u_{{{x}{y}}}")));
            }
        }
    }

    let index = |t: (usize, usize, usize)| units.iter().position(|&v| v == t).expect("unit");
    let commutant = |x: &CMat| -> CMat {
        let mut e = CMat::zeros(dim, dim);
        for (idx, &(j, a, b)) in units.iter().enumerate() {
            let back = index((j, b, a));
            e += &pis[idx] * x * &pis[back] * c(1.0 / sizes[j] as f64, 0.0);
        }
        let mut f = CMat::zeros(dim, dim);
        for uh in &u {
            f += uh * &e * uh.adjoint();
        }
        f / c(n as f64, 0.0)
    };
    let _ = offsets;

    let mut rng = numeric::rng_from(numeric::mix_all(seed, [0x4352_4f53, dim as u64]));
    for _ in 0..=tol.max_retries {
        let c1 = commutant(&numeric::random_hermitian(dim, &mut rng));
        let c2 = commutant(&numeric::random_hermitian(dim, &mut rng));
        let (vals, vecs) = numeric::hermitian_eigen(&c1);
        let Some(clusters) = numeric::cluster_sorted(&vals, tol.gap * 1e-2, tol.gap) else {
            continue;
        };
        let projs: Vec<CMat> = clusters.iter().map(|r| numeric::columns(&vecs, r.clone())).collect();
        // each eigenspace must be a minimal projection of the commutant
        let minimal = projs.iter().all(|p| {
            let block = p.adjoint() * &c2 * p;
            let scalar = block.trace() / c(block.nrows() as f64, 0.0);
            dist(&block, &(identity(block.nrows()) * scalar)) < tol.gap
        });
        if !minimal {
            continue;
        }
        let k = projs.len();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for a in 0..k {
            for b in a + 1..k {
                let link = (projs[b].adjoint() * &c2 * &projs[a]).norm();
                if link > tol.gap {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut seen = std::collections::BTreeMap::new();
        for a in 0..k {
            let r = find(&mut parent, a);
            seen.entry(r).or_insert(projs[a].ncols());
        }
        let mut blocks: Vec<usize> = seen.into_values().collect();
        let total: usize = blocks.iter().map(|b| b * b).sum();
        if total != n * sizes.iter().map(|m| m * m).sum::<usize>() {
            continue;
        }
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        return Ok(blocks);
    }
    Err(Error::NumericalDegeneracy("crossed product blocks could not be separated".into()))
}

/// A witness for existence: `π_β ⊇ π_α ⊗ π_γ` with `π_γ` of
/// the largest possible dimension.
#[derive(Clone, Debug)]
pub struct HomWitness {
    pub label: RLambdaElement,
    pub dim: usize,
}

/// Searches `x ∈ R^{λ̄_α λ_β}` with `π_α ⊗ x ≤ π_β`, maximizing `dim x`.
pub fn hom_exists(ctx: &RepContext, alpha: &ProjRep, beta: &ProjRep) -> Result<Option<HomWitness>> {
    let table = ctx.irrep_table(&cocycle_product(&alpha.cocycle().inverse(), beta.cocycle())?)?;
    let tb = ctx.irrep_table(beta.cocycle())?;
    let target = decompose_with(beta, &tb, ctx.tolerances())?;
    let images: Vec<Vec<i64>> = table
        .irreps()
        .iter()
        .map(|x| Ok(decompose_with(&projrep::tensor(alpha, x)?, &tb, ctx.tolerances())?.coeffs().to_vec()))
        .collect::<Result<_>>()?;
    let dims = table.dims();
    let budget = beta.dim() / alpha.dim();
    let mut best: Option<(usize, Vec<i64>)> = None;
    let mut current = vec![0i64; table.len()];
    let mut room: Vec<i64> = target.coeffs().to_vec();
    fn search(
        pos: usize,
        dims: &[usize],
        images: &[Vec<i64>],
        room: &mut Vec<i64>,
        current: &mut Vec<i64>,
        left: usize,
        best: &mut Option<(usize, Vec<i64>)>,
    ) {
        if pos == dims.len() {
            let d: usize = current.iter().zip(dims).map(|(&c, &d)| c as usize * d).sum();
            if d > 0 && best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                *best = Some((d, current.clone()));
            }
            return;
        }
        let max = left / dims[pos];
        let mut taken = 0;
        loop {
            search(pos + 1, dims, images, room, current, left - taken * dims[pos], best);
            if taken == max || images[pos].iter().zip(room.iter()).any(|(&a, &r)| a > r) {
                break;
            }
            for (r, &a) in room.iter_mut().zip(&images[pos]) {
                *r -= a;
            }
            current[pos] += 1;
            taken += 1;
        }
        for (r, &a) in room.iter_mut().zip(&images[pos]) {
            *r += a * taken as i64;
        }
        current[pos] -= taken as i64;
    }
    search(0, &dims, &images, &mut room, &mut current, budget, &mut best);
    let Some((d, coeffs)) = best else {
        return Ok(None);
    };
    // prefer the trivial character among equally large witnesses
    if d == 1 {
        if let Some(t) = table.trivial_index() {
            let fits = images[t].iter().zip(target.coeffs()).all(|(&a, &r)| a <= r);
            if fits {
                return Ok(Some(HomWitness { label: RLambdaElement::basis(table, t), dim: 1 }));
            }
        }
    }
    Ok(Some(HomWitness { label: RLambdaElement::new(table, coeffs)?, dim: d }))
}

/// Searches for mutually inverse homomorphisms `E₁ ⇄ E₂` preserving the
/// distinguished element. An isomorphism of cones is a permutation in every
/// class, so its labels are single irreps along a bijection of summands.
pub fn iso_invariants(e1: &EllInvariant, e2: &EllInvariant) -> Result<Option<(InvariantHom, InvariantHom)>> {
    if e1.num_summands() != e2.num_summands() || e1.ranks() != e2.ranks() || e1.unital != e2.unital {
        return Ok(None);
    }
    let ctx = e1.context().clone();
    let s = e1.num_summands();
    let mut perm: Vec<usize> = (0..s).collect();
    let mut result = None;
    permutations(&mut perm, 0, &mut |p| {
        if result.is_some() {
            return Ok(());
        }
        let mut choices: Vec<Arc<IrrepTable>> = Vec::with_capacity(s);
        for (i, &k) in p.iter().enumerate() {
            let t = label_table(&ctx, e1, e2, i, k)?;
            if t.dims()[0] != 1 {
                return Ok(());
            }
            choices.push(t);
        }
        // one-dimensional irreps come first in a table; try the trivial one first
        let orders: Vec<Vec<usize>> = choices
            .iter()
            .map(|t| {
                let ones = t.dims().iter().take_while(|&&d| d == 1).count();
                let mut o: Vec<usize> = t.trivial_index().into_iter().collect();
                o.extend((0..ones).filter(|&j| Some(j) != t.trivial_index()));
                o
            })
            .collect();
        let counts: Vec<usize> = orders.iter().map(Vec::len).collect();
        let mut pick = vec![0usize; s];
        loop {
            let labels: Labels = (0..s)
                .map(|i| {
                    (0..s)
                        .map(|k| {
                            let t = label_table(&ctx, e1, e2, i, k)?;
                            Ok(if p[i] == k {
                                RLambdaElement::basis(t, orders[i][pick[i]])
                            } else {
                                RLambdaElement::zero(t)
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            let h = hom_from_labels(e1, e2, &labels)?;
            if h.unital && h.matrices.iter().all(IntMatrix::is_permutation) {
                let inv = InvariantHom::from_matrices(h.matrices.iter().map(IntMatrix::transpose).collect(), e2, e1)?;
                result = Some((h, inv));
                return Ok(());
            }
            let mut pos = 0;
            loop {
                if pos == s {
                    return Ok(());
                }
                pick[pos] += 1;
                if pick[pos] < counts[pos] {
                    break;
                }
                pick[pos] = 0;
                pos += 1;
            }
        }
    })?;
    Ok(result)
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k == p.len() {
        return f(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f)?;
        p.swap(k, i);
    }
    Ok(())
}

/// An ordered `R(G)`-module isomorphism between the trivial-class groups,
/// as a permutation of basis elements (`perm[i]` is the image of `i`).
pub fn trivial_component_module_iso(e1: &EllInvariant, e2: &EllInvariant) -> Result<Option<Vec<usize>>> {
    let (g1, g2) = (e1.group_at(0), e2.group_at(0));
    if g1.rank() != g2.rank() {
        return Ok(None);
    }
    let ctx = e1.context();
    let table = ctx.irrep_table(&Cocycle::trivial(ctx.group().clone()))?;
    let mut acts = Vec::with_capacity(table.len());
    for idx in 0..table.len() {
        let x = RLambdaElement::basis(table.clone(), idx);
        acts.push((e1.action_matrix(&x, 0, 0)?, e2.action_matrix(&x, 0, 0)?));
    }
    let n = g1.rank();
    let mut assign: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    fn extend(
        i: usize,
        n: usize,
        acts: &[(IntMatrix, IntMatrix)],
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == n {
            return true;
        }
        for t in 0..n {
            if used[t] {
                continue;
            }
            assign[i] = Some(t);
            let consistent = (0..=i).all(|j| {
                let s = assign[j].expect("assigned");
                acts.iter().all(|(m1, m2)| m2.get(t, s) == m1.get(i, j) && m2.get(s, t) == m1.get(j, i))
            });
            if consistent {
                used[t] = true;
                if extend(i + 1, n, acts, assign, used) {
                    return true;
                }
                used[t] = false;
            }
            assign[i] = None;
        }
        false
    }
    if extend(0, n, &acts, &mut assign, &mut used) {
        Ok(Some(assign.into_iter().map(|x| x.expect("complete")).collect()))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projrep::{cocycle_of_rep, RepContext};
    use nalgebra::DVector;

    fn z3z3() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(3), &FiniteGroup::cyclic(3)))
    }

    fn example_rep(g: &Arc<FiniteGroup>, second: bool) -> ProjRep {
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
        cocycle_of_rep(g, mats).unwrap().1
    }

    fn setup() -> (Arc<RepContext>, FDAction, FDAction) {
        let g = z3z3();
        let ctx = Arc::new(RepContext::new(g.clone(), 0));
        (ctx, FDAction::single(example_rep(&g, false)), FDAction::single(example_rep(&g, true)))
    }

    fn class_of(ctx: &RepContext, c: &Cocycle) -> usize {
        let b = ctx.basis();
        b.class_index(&b.class_coordinates(c).unwrap())
    }

    #[test]
    fn k0_examples() {
        let (ctx, a1, _) = setup();
        let triv = Cocycle::trivial(ctx.group().clone());
        let k = k0_lambda(&ctx, &a1, &triv).unwrap();
        assert_eq!(k.rank(), 1);
        assert_eq!(k.unit(), Some(&[1][..]));
        let lam1 = a1.summand(0).cocycle().clone();
        assert_eq!(k0_lambda(&ctx, &a1, &lam1.inverse()).unwrap().rank(), 9);
        let c = FDAction::trivial_on_c(ctx.group().clone());
        assert_eq!(k0_lambda(&ctx, &c, &lam1).unwrap().rank(), 1);
        assert_eq!(k0_lambda(&ctx, &c, &triv).unwrap().rank(), 9);
    }

    #[test]
    fn ell_ranks_and_direct_sums() {
        let (ctx, a1, a2) = setup();
        let e1 = ell_invariant(&ctx, &a1).unwrap();
        let mut ranks = e1.ranks();
        ranks.sort_unstable();
        assert_eq!(ranks, vec![1, 1, 9]);
        let bar = class_of(&ctx, &a1.summand(0).cocycle().inverse());
        assert_eq!(e1.group_at(bar).rank(), 9);
        assert_eq!(e1.unit(), &[1]);
        let e2 = ell_invariant(&ctx, &a2).unwrap();
        assert_eq!(e2.group_at(bar).rank(), 1);
        let sum = ell_invariant(&ctx, &a1.direct_sum(&a2).unwrap()).unwrap();
        let both = e1.direct_sum(&e2).unwrap();
        assert_eq!(sum.ranks(), both.ranks());
        assert_eq!(sum.unit(), both.unit());
    }

    #[test]
    fn partial_action_examples() {
        let (ctx, a1, _) = setup();
        let e1 = ell_invariant(&ctx, &a1).unwrap();
        let g = ctx.group().clone();
        let t0 = ctx.irrep_table(&Cocycle::trivial(g.clone())).unwrap();
        let one = RLambdaElement::basis(t0.clone(), t0.trivial_index().unwrap());
        for cls in 0..3 {
            let m = e1.action_matrix(&one, cls, cls).unwrap();
            assert_eq!(m, IntMatrix::identity(e1.group_at(cls).rank()));
        }
        // [π₁] acting on the unit of the trivial class
        let lam1 = a1.summand(0).cocycle().clone();
        let p1 = ctx.decompose(a1.summand(0)).unwrap();
        let to = class_of(&ctx, &lam1);
        let k = KElement { class: 0, coords: e1.unit().to_vec() };
        let img = e1.apply_partial_action(&p1, &k, to).unwrap();
        assert_eq!(img.coords.iter().sum::<i64>(), 3);
        assert!(matches!(e1.apply_partial_action(&p1, &k, 0), Err(Error::ClassMismatch(_))));
    }

    #[test]
    fn crossed_products_of_the_example() {
        let (ctx, a1, a2) = setup();
        for a in [&a1, &a2] {
            let omega = a.summand(0).cocycle().inverse();
            assert_eq!(twisted_crossed_product(a, &omega, 0).unwrap(), vec![9]);
        }
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let c = FDAction::trivial_on_c(z2.clone());
        assert_eq!(twisted_crossed_product(&c, &Cocycle::trivial(z2), 0).unwrap(), vec![1, 1]);
        let _ = ctx;
    }

    #[test]
    fn hom_exists_examples() {
        let (ctx, a1, a2) = setup();
        let p1 = a1.summand(0);
        let w = hom_exists(&ctx, p1, p1).unwrap().unwrap();
        assert_eq!(w.dim, 1);
        assert_eq!(Some(w.label.coeffs().iter().position(|&v| v == 1).unwrap()), w.label.table().trivial_index());
        assert!(hom_exists(&ctx, p1, a2.summand(0)).unwrap().is_none());
        let t0 = ctx.irrep_table(&Cocycle::trivial(ctx.group().clone())).unwrap();
        let rho = RLambdaElement::new(t0.clone(), vec![1, 1, 1, 0, 0, 0, 0, 0, 0]).unwrap().realize().unwrap();
        let big = projrep::tensor(p1, &rho).unwrap();
        let w = hom_exists(&ctx, p1, &big).unwrap().unwrap();
        assert_eq!(w.dim, 3);
    }

    #[test]
    fn iso_examples() {
        let (ctx, a1, a2) = setup();
        let e1 = ell_invariant(&ctx, &a1).unwrap();
        let e2 = ell_invariant(&ctx, &a2).unwrap();
        let (f, g) = iso_invariants(&e1, &e1).unwrap().unwrap();
        assert_eq!(f, InvariantHom::identity(&e1));
        assert_eq!(g.matrices, f.matrices);
        assert!(iso_invariants(&e1, &e2).unwrap().is_none());
        assert!(trivial_component_module_iso(&e1, &e2).unwrap().is_some());
    }

    #[test]
    fn realize_and_induce_identity() {
        let (ctx, a1, _) = setup();
        let a = Arc::new(a1);
        let e = ell_invariant(&ctx, &a).unwrap();
        let id = InvariantHom::identity(&e);
        let t = realize_hom(&id, &e, &e, &a, &a, 3).unwrap();
        assert!(t.defect() < 1e-9);
        assert_eq!(induced_hom(&t, &e, &e).unwrap(), id);
        let x = CMat::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, i as f64));
        let y = t.apply(&[x.clone()]);
        // T is conjugation by a unitary commuting with the action up to scalar
        assert!((y[0].trace() - x.trace()).norm() < 1e-9);
        let (u, res) = unitary_intertwiner(&t, &EquivariantHom::identity(a.clone()), &ctx, 1).unwrap();
        assert!(res < 1e-8);
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn tensor_embedding_realizes_pairing() {
        let (ctx, a1, _) = setup();
        let t0 = ctx.irrep_table(&Cocycle::trivial(ctx.group().clone())).unwrap();
        let rho_el = RLambdaElement::new(t0.clone(), vec![0, 1, 0, 0, 1, 0, 0, 0, 1]).unwrap();
        let rho = rho_el.realize().unwrap();
        let a = Arc::new(a1.clone());
        let b = Arc::new(a1.tensor_rep(&rho).unwrap());
        let ea = ell_invariant(&ctx, &a).unwrap();
        let eb = ell_invariant(&ctx, &b).unwrap();
        let labels = vec![vec![rho_el.clone()]];
        let gamma = hom_from_labels(&ea, &eb, &labels).unwrap();
        assert!(gamma.unital);
        let t = realize_hom(&gamma, &ea, &eb, &a, &b, 5).unwrap();
        assert!(t.defect() < 1e-9);
        assert_eq!(induced_hom(&t, &ea, &eb).unwrap(), gamma);
        let mut bad = gamma.clone();
        bad.matrices[0].set(0, 0, -1);
        assert!(matches!(realize_hom(&bad, &ea, &eb, &a, &b, 5), Err(Error::NotPositive(_))));
    }

    #[test]
    fn trivial_group_blocks() {
        let g = Arc::new(FiniteGroup::trivial());
        let ctx = Arc::new(RepContext::new(g.clone(), 0));
        let triv = Cocycle::trivial(g.clone());
        let m3 = ProjRep::from_parts_unchecked(triv.clone(), vec![identity(3)]);
        let m6 = ProjRep::from_parts_unchecked(triv.clone(), vec![identity(6)]);
        let a = Arc::new(FDAction::single(m3));
        let b = Arc::new(FDAction::single(m6));
        let ea = ell_invariant(&ctx, &a).unwrap();
        let eb = ell_invariant(&ctx, &b).unwrap();
        let t1 = ctx.irrep_table(&triv).unwrap();
        let gamma = hom_from_labels(&ea, &eb, &vec![vec![RLambdaElement::new(t1, vec![2]).unwrap()]]).unwrap();
        assert_eq!(gamma.matrices[0], IntMatrix::from_rows(&[vec![2]]));
        let t = realize_hom(&gamma, &ea, &eb, &a, &b, 0).unwrap();
        assert_eq!(induced_hom(&t, &ea, &eb).unwrap().matrices, gamma.matrices);
    }
}
