//! Acceptance suite. Each test prints one PASS/FAIL line with its pinned
//! tolerance, then asserts.

use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tek::cohomology::{cocycle_product, coboundary, schur_multiplier, CoboundaryWitness, Cocycle};
use tek::group::{small_group_corpus, FiniteGroup};
use tek::intlin::IntMatrix;
use tek::kaction::{
    ell_invariant, hom_from_labels, induced_hom, iso_invariants, k0_lambda, realize_hom, trivial_component_module_iso,
    twisted_crossed_product, unitary_intertwiner, EllInvariant, FDAction, Labels,
};
use tek::limits::{
    decide_conjugacy, stable_rank_per_class, telescope, ConjugacyVerdict, DecoratedBratteli, EdgeSpec, Obstruction,
    Stationary, SummandSpec,
};
use tek::numeric::{polar_unitary, random_matrix, rng_from, CMat};
use tek::projrep::{
    cocycle_of_rep, decompose, direct_sum, phase, shift_by_mu, tensor, ProjRep, RLambdaElement,
    RepContext,
};

fn report(n: usize, pass: bool, what: &str, detail: &str) {
    let line = format!("acceptance criterion {n}: {} | {what} | {detail}\n", if pass { "PASS" } else { "FAIL" });
    // bypasses the harness capture so the line lands in the test log
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(pass, "criterion {n} failed: {what} | {detail}");
}

fn z3z3() -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(3), &FiniteGroup::cyclic(3)))
}

/// The representations with `A = diag(1, ω, ω²)` or `diag(1, ω², ω)` and
/// `B` the cyclic shift, written out entry by entry.
fn example_matrices(second: bool) -> Vec<CMat> {
    let w = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    let one = Complex64::new(1.0, 0.0);
    let diag = if second { [one, w * w, w] } else { [one, w, w * w] };
    let a = CMat::from_fn(3, 3, |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) });
    let b = CMat::from_fn(3, 3, |i, j| if j == (i + 1) % 3 { one } else { Complex64::new(0.0, 0.0) });
    let pow = |m: &CMat, k: usize| (0..k).fold(CMat::identity(3, 3), |acc, _| acc * m);
    (0..9).map(|x| pow(&a, x / 3) * pow(&b, x % 3)).collect()
}

fn example_rep(second: bool) -> ProjRep {
    cocycle_of_rep(&z3z3(), example_matrices(second)).unwrap().1
}

/// `λ(g,h)/λ(h,g)` at the two generators, read off the matrices themselves:
/// `U_g U_h U_g* U_h*` is this scalar times the identity.
fn commutator_scalar(mats: &[CMat], g: usize, h: usize) -> Complex64 {
    let m = &mats[g] * &mats[h] * mats[g].adjoint() * mats[h].adjoint();
    m[(0, 0)]
}

#[test]
fn criterion_1_schur_multiplier() {
    let start = Instant::now();
    let g = z3z3();
    let basis = schur_multiplier(&g);
    let factors = basis.invariant_factors().factors.clone();
    let c1 = basis.class_coordinates(example_rep(false).cocycle()).unwrap();
    let c2 = basis.class_coordinates(example_rep(true).cocycle()).unwrap();
    let elapsed = start.elapsed();

    // Oracle: the commutator pairing at (a, b) = ((1,0), (0,1)) is a class
    // invariant; nontrivial classes give a nontrivial root of unity.
    let (x, y) = (3, 1);
    let s1 = commutator_scalar(&example_matrices(false), x, y);
    let s2 = commutator_scalar(&example_matrices(true), x, y);
    let oracle_nonzero = (s1 - 1.0).norm() > 0.5 && (s2 - 1.0).norm() > 0.5;
    let oracle_distinct = (s1 - s2).norm() > 0.5;

    let pass = factors == vec![3]
        && c1 != vec![0]
        && c2 != vec![0]
        && c1 != c2
        && oracle_nonzero
        && oracle_distinct
        && elapsed < Duration::from_secs(5);
    report(
        1,
        pass,
        "H2(Z/3 + Z/3) = Z/3, classes of the two examples nonzero and distinct",
        &format!("factors {factors:?}, classes {c1:?} {c2:?}, exact integers, runtime {elapsed:.2?} < 5s"),
    );
}

#[test]
fn criterion_2_projective_irreps() {
    let ctx = RepContext::new(z3z3(), 0);
    let mut ok = true;
    let mut detail = Vec::new();
    for second in [false, true] {
        let pi = example_rep(second);
        let table = ctx.irrep_table(pi.cocycle()).unwrap();
        let x = decompose(&pi, &table).unwrap();
        ok &= table.dims() == vec![3] && x.coeffs() == [1];
        detail.push(format!("dims {:?}, [pi] = {:?}", table.dims(), x.coeffs()));
    }
    report(2, ok, "one irrep of dim 3 per class, generated by [pi_i]", &format!("{}; integer rounding at 1e-6", detail.join("; ")));
}

#[test]
fn criterion_3_crossed_products() {
    let start = Instant::now();
    let mut results = Vec::new();
    for second in [false, true] {
        let pi = example_rep(second);
        let omega = pi.cocycle().inverse();
        results.push(twisted_crossed_product(&FDAction::single(pi), &omega, 0).unwrap());
    }
    let elapsed = start.elapsed();
    let pass = results.iter().all(|r| r == &vec![9]) && elapsed < Duration::from_secs(10);
    report(
        3,
        pass,
        "M_3 crossed by conj(lambda_i) is M_9 for both actions",
        &format!("blocks {results:?}, block tolerance 1e-6, runtime {elapsed:.2?} < 10s"),
    );
}

/// Small groups with at most 8 elements from the shipped corpus.
fn small_groups() -> Vec<(String, FiniteGroup)> {
    small_group_corpus().into_iter().filter(|(_, g)| g.order() <= 8).collect()
}

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    polar_unitary(&random_matrix(n, n, rng)).0
}

/// A random positive element of `table(λ)` of dimension at most `budget`.
fn random_positive(ctx: &RepContext, lambda: &Cocycle, budget: usize, rng: &mut ChaCha8Rng) -> Option<RLambdaElement> {
    let table = ctx.irrep_table(lambda).unwrap();
    let mut coeffs = vec![0i64; table.len()];
    let mut left = budget;
    loop {
        let fits: Vec<usize> = (0..table.len()).filter(|&i| table.dims()[i] <= left).collect();
        if fits.is_empty() || (coeffs.iter().any(|&c| c > 0) && rng.random_bool(0.4)) {
            break;
        }
        let i = *fits.choose(rng).unwrap();
        coeffs[i] += 1;
        left -= table.dims()[i];
    }
    coeffs.iter().any(|&c| c > 0).then(|| RLambdaElement::new(table, coeffs).unwrap())
}

fn random_action(ctx: &RepContext, max_summands: usize, max_dim: usize, rng: &mut ChaCha8Rng) -> FDAction {
    let basis = ctx.basis();
    let classes = basis.all_classes();
    let count = rng.random_range(1..=max_summands);
    let mut reps = Vec::new();
    while reps.len() < count {
        let lambda = basis.representative(classes.choose(rng).unwrap());
        if let Some(x) = random_positive(ctx, &lambda, max_dim, rng) {
            let p = x.realize().unwrap();
            let u = random_unitary(p.dim(), rng);
            reps.push(p.conjugated_by(&u));
        }
    }
    FDAction::new(ctx.group().clone(), reps, true).unwrap()
}

#[test]
fn criterion_4_julg_suite() {
    let groups = small_groups();
    let mut rng = rng_from(4);
    let mut checked = 0;
    let mut failures = Vec::new();
    for instance in 0..20 {
        let (name, g) = groups[instance % groups.len()].clone();
        let ctx = RepContext::new(Arc::new(g), instance as u64);
        let alpha = random_action(&ctx, 3, 4, &mut rng);
        let basis = ctx.basis();
        for coords in basis.all_classes() {
            let lambda = basis.representative(&coords);
            let rank = k0_lambda(&ctx, &alpha, &lambda).unwrap().rank();
            let blocks = twisted_crossed_product(&alpha, &lambda.inverse(), instance as u64).unwrap();
            checked += 1;
            if rank != blocks.len() {
                failures.push(format!("{name} sizes {:?} class {coords:?}: rank {rank} vs blocks {blocks:?}", alpha.sizes()));
            }
        }
    }
    report(
        4,
        failures.is_empty(),
        "rank K0^lambda = number of blocks of the crossed product by conj(lambda)",
        &format!("20 instances, {checked} (instance, class) pairs, exact integers, |G| <= 8, <= 3 summands, dims <= 4; {failures:?}"),
    );
}

/// Number of `λ`-regular conjugacy classes, straight from the definition
/// `λ(g,h) = λ(h,g)` for every `h` commuting with `g`.
fn regular_count_oracle(lambda: &Cocycle) -> usize {
    let g = lambda.group();
    g.conjugacy_classes()
        .iter()
        .filter(|class| {
            let x = class[0];
            (0..g.order())
                .filter(|&h| g.mul(x, h) == g.mul(h, x))
                .all(|h| (phase(lambda, x, h) - phase(lambda, h, x)).norm() < 1e-9)
        })
        .count()
}

#[test]
fn criterion_5_separation() {
    let g = z3z3();
    let ctx = Arc::new(RepContext::new(g.clone(), 0));
    let pi1 = example_rep(false);
    let pi2 = example_rep(true);
    let e1 = ell_invariant(&ctx, &FDAction::single(pi1.clone())).unwrap();
    let e2 = ell_invariant(&ctx, &FDAction::single(pi2.clone())).unwrap();
    let module = trivial_component_module_iso(&e1, &e2).unwrap();
    let iso = iso_invariants(&e1, &e2).unwrap();
    let basis = ctx.basis();
    let bar = pi1.cocycle().inverse();
    let idx = basis.class_index(&basis.class_coordinates(&bar).unwrap());
    let (r1, r2) = (e1.group_at(idx).rank(), e2.group_at(idx).rank());

    // By hand: K^{λ̄₁}(α₁) = R^{λ̄₁λ₁}, K^{λ̄₁}(α₂) = R^{λ̄₁λ₂}; each has as
    // many generators as regular classes of the product cocycle.
    let o1 = regular_count_oracle(&cocycle_product(&bar, pi1.cocycle()).unwrap());
    let o2 = regular_count_oracle(&cocycle_product(&bar, pi2.cocycle()).unwrap());

    let pass = module.is_some() && iso.is_none() && (r1, r2) == (9, 1) && (o1, o2) == (9, 1);
    report(
        5,
        pass,
        "trivial-class modules isomorphic, full invariants not",
        &format!("module iso {module:?}, iso_invariants {}, ranks at conj(lambda_1) {r1} vs {r2}, oracle {o1} vs {o2}, exact", if iso.is_some() { "found" } else { "none" }),
    );
}

#[test]
fn criterion_6_representation_laws() {
    let mut tables = 0;
    let mut failures = Vec::new();
    let mut worst_gram = 0.0f64;
    for (name, g) in small_group_corpus() {
        let g = Arc::new(g);
        let ctx = RepContext::new(g.clone(), 0);
        let n = g.order();
        for coords in ctx.basis().all_classes() {
            let lambda = ctx.basis().representative(&coords);
            let table = ctx.irrep_table(&lambda).unwrap();
            tables += 1;
            let square_sum: usize = table.dims().iter().map(|d| d * d).sum();
            // characters recomputed from the irrep matrices
            let chars: Vec<Vec<Complex64>> =
                table.irreps().iter().map(|p| p.matrices().iter().map(|m| m.trace()).collect()).collect();
            for (i, a) in chars.iter().enumerate() {
                for (j, b) in chars.iter().enumerate() {
                    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() / n as f64;
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst_gram = worst_gram.max((ip - want).norm());
                }
            }
            let regular = regular_count_oracle(&lambda);
            if square_sum != n || table.len() != regular {
                failures.push(format!("{name} {coords:?}: dims {:?}, regular {regular}", table.dims()));
            }
        }
    }
    let pass = failures.is_empty() && worst_gram < 1e-8;
    report(
        6,
        pass,
        "sum d^2 = |G|, orthonormal characters, #irreps = #regular classes",
        &format!("{tables} tables over the full corpus, Gram deviation {worst_gram:.1e} < 1e-8, counts exact; {failures:?}"),
    );
}

/// A random target built from random labels, so that the labels define a
/// positive, compatible, contractive homomorphism by construction.
fn random_hom_instance(
    ctx: &Arc<RepContext>,
    rng: &mut ChaCha8Rng,
) -> (Arc<FDAction>, Arc<FDAction>, EllInvariant, EllInvariant, Labels) {
    let basis = ctx.basis();
    let classes = basis.all_classes();
    let alpha = Arc::new(random_action(ctx, 2, 3, rng));
    let nb = rng.random_range(1..=2);
    let mut targets = Vec::new();
    let mut columns = Vec::new();
    let unital = rng.random_bool(0.5);
    while targets.len() < nb {
        let lk = basis.representative(classes.choose(rng).unwrap());
        let mut parts = Vec::new();
        let mut labels = Vec::new();
        for pi in alpha.summands() {
            let lt = cocycle_product(&pi.cocycle().inverse(), &lk).unwrap();
            let x = if rng.random_bool(0.7) { random_positive(ctx, &lt, 2, rng) } else { None };
            let x = x.unwrap_or_else(|| RLambdaElement::zero(ctx.irrep_table(&lt).unwrap()));
            if x.dim() > 0 {
                parts.push(tensor(pi, &x.realize().unwrap()).unwrap());
            }
            labels.push(x);
        }
        if !unital || parts.is_empty() {
            if let Some(pad) = random_positive(ctx, &lk, 2, rng) {
                parts.push(pad.realize().unwrap());
            }
        }
        if parts.is_empty() {
            continue;
        }
        let p = direct_sum(&parts).unwrap();
        let u = random_unitary(p.dim(), rng);
        targets.push(p.conjugated_by(&u));
        columns.push(labels);
    }
    let beta = Arc::new(FDAction::new(ctx.group().clone(), targets, true).unwrap());
    let labels: Labels = (0..alpha.summands().len()).map(|i| columns.iter().map(|col| col[i].clone()).collect()).collect();
    let src = ell_invariant(ctx, &alpha).unwrap();
    let dst = ell_invariant(ctx, &beta).unwrap();
    (alpha, beta, src, dst, labels)
}

#[test]
fn criterion_7_existence_and_uniqueness() {
    let groups = small_groups();
    let mut rng = rng_from(7);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for instance in 0..50 {
        let (name, g) = groups[(instance * 5) % groups.len()].clone();
        let ctx = Arc::new(RepContext::new(Arc::new(g), instance as u64));
        let (alpha, beta, src, dst, labels) = random_hom_instance(&ctx, &mut rng);
        let gamma = hom_from_labels(&src, &dst, &labels).unwrap();
        let t1 = realize_hom(&gamma, &src, &dst, &alpha, &beta, 2 * instance as u64).unwrap();
        let t2 = realize_hom(&gamma, &src, &dst, &alpha, &beta, 2 * instance as u64 + 1).unwrap();
        let back = match induced_hom(&t1, &src, &dst) { Ok(b) => b, Err(e) => panic!("instance {instance} {name} {:?}->{:?} defect {:.1e} labels {:?}: {e}", alpha.sizes(), beta.sizes(), t1.defect(), labels.iter().map(|r| r.iter().map(|x| x.coeffs().to_vec()).collect::<Vec<_>>()).collect::<Vec<_>>()) };
        let (_, residual) = unitary_intertwiner(&t1, &t2, &ctx, instance as u64).unwrap();
        worst = worst.max(residual);
        if back != gamma || residual >= 1e-8 {
            failures.push(format!("{name} {:?} -> {:?}: residual {residual:.1e}", alpha.sizes(), beta.sizes()));
        }
    }
    report(
        7,
        failures.is_empty(),
        "induced_hom(realize_hom(G)) = G, realizations from two seeds are unitarily equivalent",
        &format!("50 instances, exact equality, worst intertwiner residual {worst:.1e} < 1e-8; {failures:?}"),
    );
}

fn random_mu(g: &FiniteGroup, modulus: u64, rng: &mut ChaCha8Rng) -> CoboundaryWitness {
    let mut mu: Vec<u64> = (0..g.order()).map(|_| rng.random_range(0..modulus)).collect();
    mu[0] = 0;
    CoboundaryWitness { modulus, mu }
}

/// Column of `Σ x ⊗ τ` decomposed over `table(target)`.
fn decompose_into(ctx: &RepContext, p: &ProjRep, target: &Cocycle) -> (Vec<i64>, f64) {
    let table = ctx.irrep_table(target).unwrap();
    let (x, r) = tek::projrep::decompose_detailed(p, &table, ctx.tolerances()).unwrap();
    (x.coeffs().to_vec(), r)
}

/// `τ ↦ μτ` from `table(σ)` to `table(dμ·σ)`, by decomposing each shifted irrep.
fn shift_block(ctx: &RepContext, sigma: &Cocycle, mu: &CoboundaryWitness) -> (IntMatrix, f64) {
    let from = ctx.irrep_table(sigma).unwrap();
    let target = cocycle_product(&coboundary(ctx.group(), mu), sigma).unwrap();
    let to = ctx.irrep_table(&target).unwrap();
    let mut m = IntMatrix::zeros(to.len(), from.len());
    let mut worst = 0.0f64;
    for (a, tau) in from.irreps().iter().enumerate() {
        let (col, r) = decompose_into(ctx, &shift_by_mu(tau, mu), &target);
        worst = worst.max(r);
        for (b, v) in col.into_iter().enumerate() {
            m.set(b, a, v as i128);
        }
    }
    (m, worst)
}

fn multiply_witnesses(a: &CoboundaryWitness, b: &CoboundaryWitness) -> CoboundaryWitness {
    let m = num_integer::lcm(a.modulus, b.modulus);
    let mu = a.mu.iter().zip(&b.mu).map(|(x, y)| (x * (m / a.modulus) + y * (m / b.modulus)) % m).collect();
    CoboundaryWitness { modulus: m, mu }
}

fn zero_dim(p: &RLambdaElement) -> bool {
    p.dim() == 0
}

#[test]
fn criterion_8_change_of_cocycle_cube() {
    let mut rng = rng_from(8);
    let mut faces = 0;
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (gi, g) in [
        Arc::new(FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))),
        z3z3(),
    ]
    .into_iter()
    .enumerate()
    {
        let n = g.order() as u64;
        for instance in 0..6 {
            let ctx = Arc::new(RepContext::new(g.clone(), instance));
            let basis = ctx.basis();
            let (_, _, src, dst, labels) = random_hom_instance(&ctx, &mut rng);
            let gamma = hom_from_labels(&src, &dst, &labels).unwrap();
            for c in 0..basis.num_classes() {
                let lc = basis.representative(&basis.class_at(c));
                let mu = random_mu(&g, n * n, &mut rng);
                let omega = cocycle_product(&coboundary(&g, &mu), &lc).unwrap();
                let cs = src.change_of_cocycle(&omega).unwrap();
                let cd = dst.change_of_cocycle(&omega).unwrap();
                worst = worst.max(cs.residual).max(cd.residual);

                // Face 1: the homomorphism computed directly at ω, by tensoring
                // the irreps of ω·λ_i with the labels.
                let (ks, kd) = (src.group_at(c), dst.group_at(c));
                let mut direct = IntMatrix::zeros(kd.rank(), ks.rank());
                for (i, li) in src.summand_cocycles().iter().enumerate() {
                    let wi = cocycle_product(&omega, li).unwrap();
                    let ti = ctx.irrep_table(&wi).unwrap();
                    for (k, lk) in dst.summand_cocycles().iter().enumerate() {
                        let x = &labels[i][k];
                        if zero_dim(x) {
                            continue;
                        }
                        let xr = x.realize().unwrap();
                        let wk = cocycle_product(&omega, lk).unwrap();
                        for (a, tau) in ti.irreps().iter().enumerate() {
                            let (col, r) = decompose_into(&ctx, &tensor(tau, &xr).unwrap(), &wk);
                            worst = worst.max(r);
                            for (b, v) in col.into_iter().enumerate() {
                                let (row, cc) = (kd.offset(k) + b, ks.offset(i) + a);
                                direct.set(row, cc, direct.get(row, cc) + v as i128);
                            }
                        }
                    }
                }
                let via_rep = cd.forward.mul(&gamma.matrices[c]);
                let via_direct = direct.mul(&cs.forward);
                faces += 1;
                if via_rep != via_direct || cs.backward.mul(&cs.forward) != IntMatrix::identity(ks.rank()) {
                    failures.push(format!("group {gi} instance {instance} class {c}: hom face"));
                }

                // Face 2: a partial action by every irrep x of a representative
                // λ_s, directly on K^ω against the artifact's matrix transported
                // by f_μ.
                for s in 0..basis.num_classes() {
                    let ls = basis.representative(&basis.class_at(s));
                    let tx = ctx.irrep_table(&ls).unwrap();
                    let to = basis.class_index(&basis.add_classes(&basis.class_at(s), &basis.class_at(c)));
                    let omega2 = cocycle_product(&ls, &omega).unwrap();
                    let c2 = src.change_of_cocycle(&omega2).unwrap();
                    let ld = src.representative(to).clone();
                    let nu = basis.trivialize(&cocycle_product(&ls, &lc).unwrap(), &ld).unwrap();
                    for xi in 0..tx.len() {
                        let x = RLambdaElement::basis(tx.clone(), xi);
                        let artifact = src.action_matrix(&x, c, to).unwrap();
                        // direct at ω: x ⊗ τ for τ irreducible over ω·λ_j
                        let kt = src.group_at(to);
                        let mut at_omega = IntMatrix::zeros(kt.rank(), ks.rank());
                        // direct at λ_c then along ν⁻¹ into λ_to, then along the
                        // change of the target
                        let mut at_rep = IntMatrix::zeros(kt.rank(), ks.rank());
                        for (j, lj) in src.summand_cocycles().iter().enumerate() {
                            let wj = cocycle_product(&omega, lj).unwrap();
                            let tj = ctx.irrep_table(&wj).unwrap();
                            let target = cocycle_product(&omega2, lj).unwrap();
                            for (a, tau) in tj.irreps().iter().enumerate() {
                                let (col, r) = decompose_into(&ctx, &tensor(&x.realize().unwrap(), tau).unwrap(), &target);
                                worst = worst.max(r);
                                for (b, v) in col.into_iter().enumerate() {
                                    at_omega.set(kt.offset(j) + b, ks.offset(j) + a, v as i128);
                                }
                            }
                            let rj = ctx.irrep_table(&cocycle_product(&lc, lj).unwrap()).unwrap();
                            let mid = cocycle_product(&ls, &cocycle_product(&lc, lj).unwrap()).unwrap();
                            let back_to = cocycle_product(&ld, lj).unwrap();
                            for (a, tau) in rj.irreps().iter().enumerate() {
                                let prod = tensor(&x.realize().unwrap(), tau).unwrap();
                                let moved = if mid == back_to { prod } else { shift_by_mu(&prod, &nu.inverse()) };
                                let (col, r) = decompose_into(&ctx, &moved, &back_to);
                                worst = worst.max(r);
                                for (b, v) in col.into_iter().enumerate() {
                                    at_rep.set(kt.offset(j) + b, ks.offset(j) + a, v as i128);
                                }
                            }
                        }
                        faces += 2;
                        if at_rep != artifact {
                            failures.push(format!("group {gi} class {c} by {s}/{xi}: representative face"));
                        }
                        // at_omega ∘ f_μ = f_{μν} ∘ artifact, both sides landing in K^{λ_s ω}
                        let munu = multiply_witnesses(&cs.mu, &nu);
                        let mut transport = IntMatrix::zeros(kt.rank(), kt.rank());
                        for (j, lj) in src.summand_cocycles().iter().enumerate() {
                            let (m, r) = shift_block(&ctx, &cocycle_product(&ld, lj).unwrap(), &munu);
                            worst = worst.max(r);
                            transport.set_block(kt.offset(j), kt.offset(j), &m);
                        }
                        faces += 1;
                        if at_omega.mul(&cs.forward) != transport.mul(&artifact) {
                            failures.push(format!("group {gi} class {c} by {s}/{xi}: omega face"));
                        }
                        // the target's own change differs from f_{μν} by a character
                        if !transport.mul(&c2.backward).is_permutation() {
                            failures.push(format!("group {gi} class {c} by {s}/{xi}: change is not a permutation"));
                        }
                    }
                }
            }
        }
    }
    let pass = failures.is_empty() && worst < 1e-8;
    report(
        8,
        pass,
        "changes of cocycle commute with homomorphisms and partial actions",
        &format!("{faces} squares over Z/2+Z/2 and Z/3+Z/3, integer squares exact, worst residual {worst:.1e} < 1e-8; {failures:?}"),
    );
}

fn tower(ctx: &RepContext, second: bool) -> DecoratedBratteli {
    let class = ctx.basis().class_coordinates(example_rep(second).cocycle()).unwrap();
    DecoratedBratteli {
        group: ctx.group().clone(),
        levels: vec![vec![SummandSpec { class, multiplicities: vec![1] }]],
        edges: vec![vec![EdgeSpec { from: 0, to: 0, class: None, label: vec![1, 1, 1, 0, 0, 0, 0, 0, 0] }]],
        stationary: Some(Stationary { from: 0, period: 1 }),
        unital: true,
    }
}

/// Rank over Q by fraction-free elimination.
fn rank_oracle(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let (nr, nc) = (m.len(), m.first().map_or(0, Vec::len));
    let mut rank = 0;
    for col in 0..nc {
        let Some(p) = (rank..nr).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, p);
        for r in 0..nr {
            if r != rank && m[r][col] != 0 {
                let (a, b) = (m[rank][col], m[r][col]);
                for k in 0..nc {
                    m[r][k] = m[r][k] * a - m[rank][k] * b;
                }
                let gcd = m[r].iter().fold(0i128, |g, &v| num_integer::gcd(g, v));
                if gcd > 1 {
                    m[r].iter_mut().for_each(|v| *v /= gcd);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    (0..a.len()).map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn other_diagrams() -> Vec<DecoratedBratteli> {
    let trivial = Arc::new(FiniteGroup::trivial());
    let z2 = Arc::new(FiniteGroup::cyclic(2));
    vec![
        DecoratedBratteli {
            group: trivial.clone(),
            levels: vec![vec![SummandSpec { class: vec![], multiplicities: vec![1] }]],
            edges: vec![vec![EdgeSpec { from: 0, to: 0, class: None, label: vec![2] }]],
            stationary: Some(Stationary { from: 0, period: 1 }),
            unital: true,
        },
        // the flip on C ⊕ C embedded in M_2, then doubled
        DecoratedBratteli {
            group: z2.clone(),
            levels: vec![
                vec![
                    SummandSpec { class: vec![], multiplicities: vec![1, 0] },
                    SummandSpec { class: vec![], multiplicities: vec![0, 1] },
                ],
                vec![SummandSpec { class: vec![], multiplicities: vec![1, 1] }],
            ],
            edges: vec![
                vec![
                    EdgeSpec { from: 0, to: 0, class: None, label: vec![1, 0] },
                    EdgeSpec { from: 1, to: 0, class: None, label: vec![1, 0] },
                ],
                vec![EdgeSpec { from: 0, to: 0, class: None, label: vec![1, 1] }],
            ],
            stationary: Some(Stationary { from: 1, period: 1 }),
            unital: true,
        },
        // a finite diagram
        DecoratedBratteli {
            group: z2,
            levels: vec![
                vec![SummandSpec { class: vec![], multiplicities: vec![1, 0] }],
                vec![SummandSpec { class: vec![], multiplicities: vec![1, 1] }],
            ],
            edges: vec![vec![EdgeSpec { from: 0, to: 0, class: None, label: vec![1, 0] }]],
            stationary: None,
            unital: false,
        },
    ]
}

#[test]
fn criterion_9_conjugacy_decider() {
    let start = Instant::now();
    let ctx = Arc::new(RepContext::new(z3z3(), 0));
    let g1 = tower(&ctx, false);
    let g2 = tower(&ctx, true);

    // (a) every diagram against its telescope
    let mut a_results = Vec::new();
    let mut diagrams: Vec<(Arc<RepContext>, DecoratedBratteli)> = vec![(ctx.clone(), g1.clone()), (ctx.clone(), g2.clone())];
    for d in other_diagrams() {
        diagrams.push((Arc::new(RepContext::new(d.group.clone(), 0)), d));
    }
    let mut a_ok = true;
    for (c, d) in &diagrams {
        let t = telescope(c, d, 2).unwrap();
        let v = decide_conjugacy(c, d, &t, 3, 0).unwrap();
        a_ok &= matches!(v, ConjugacyVerdict::ConjugateCertified(_));
        a_results.push(v.tag());
    }

    // (b) the two towers, with stable ranks checked by hand: on K^{λ̄₁} the
    // first tower tensors the 9 characters with the 3 characters trivial on
    // the second factor, the second one multiplies the single generator by 3.
    let basis = ctx.basis();
    let bar = basis.neg_class(&basis.class_coordinates(example_rep(false).cocycle()).unwrap());
    let idx = basis.class_index(&bar);
    let s1 = stable_rank_per_class(&ctx, &g1).unwrap()[idx].rank;
    let s2 = stable_rank_per_class(&ctx, &g2).unwrap()[idx].rank;
    let chars = ctx.irrep_table(&Cocycle::trivial(ctx.group().clone())).unwrap().characters().to_vec();
    let find = |v: &[Complex64]| chars.iter().position(|c| c.iter().zip(v).all(|(a, b)| (a - b).norm() < 1e-9)).unwrap();
    let mut m = vec![vec![0i128; 9]; 9];
    for (phi, cphi) in chars.iter().enumerate() {
        for l in 0..3 {
            let prod: Vec<Complex64> = cphi.iter().zip(&chars[l]).map(|(a, b)| a * b).collect();
            m[find(&prod)][phi] += 1;
        }
    }
    let power = (0..8).fold(m.clone(), |acc, _| mat_mul(&acc, &m));
    let oracle1 = rank_oracle(&power);
    let oracle2 = rank_oracle(&[vec![3]]);
    let depth8 = Instant::now();
    let verdict = decide_conjugacy(&ctx, &g1, &g2, 8, 0).unwrap();
    let depth8 = depth8.elapsed();
    let b_ok = matches!(verdict, ConjugacyVerdict::NotConjugateCertified(Obstruction::StableRank { .. }))
        && s1 != s2
        && (s1, s2) == (oracle1, oracle2);

    // (c) determinism
    let runs: Vec<String> = (0..3)
        .map(|_| {
            let c = Arc::new(RepContext::new(z3z3(), 0));
            let t = telescope(&c, &g1, 2).unwrap();
            format!("{:?} {:?}", decide_conjugacy(&c, &g1, &g2, 8, 0).unwrap(), decide_conjugacy(&c, &g1, &t, 3, 0).unwrap())
        })
        .collect();
    let c_ok = runs.iter().all(|r| r == &runs[0]);
    let elapsed = start.elapsed();

    let pass = a_ok && b_ok && c_ok && elapsed < Duration::from_secs(60);
    report(
        9,
        pass,
        "telescopes certified, the two towers refuted by stable rank, deterministic",
        &format!(
            "(a) {a_results:?} at depth 3; (b) {} with stable ranks at conj(lambda_1) {s1} vs {s2}, oracle {oracle1} vs {oracle2}, depth 8 in {depth8:.2?}; (c) 3 runs identical: {c_ok}; total {elapsed:.2?} < 60s; lift residual 1e-8",
            verdict.tag()
        ),
    );
}
