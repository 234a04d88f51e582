//! Irreducible projective representations for every class of a few groups,
//! checked against the dimension and regular-class counts, followed by a
//! decomposition of a tensor product.

use std::sync::Arc;

use tek::group::FiniteGroup;
use tek::projrep::{clock_and_shift, contragredient, regular_class_count, tensor, RepContext};

fn main() -> tek::error::Result<()> {
    let groups = [
        ("Z2xZ2", FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))),
        ("D4", FiniteGroup::dihedral(4)),
        ("Z3xZ3", FiniteGroup::direct_product(&FiniteGroup::cyclic(3), &FiniteGroup::cyclic(3))),
        ("S4", FiniteGroup::symmetric(4)),
    ];
    for (name, g) in groups {
        let ctx = RepContext::new(Arc::new(g), 0);
        let basis = ctx.basis();
        println!("{name}: H2 = {}", basis.invariant_factors());
        for coords in basis.all_classes() {
            let lambda = basis.representative(&coords);
            let table = ctx.irrep_table(&lambda)?;
            let square_sum: usize = table.dims().iter().map(|d| d * d).sum();
            println!(
                "  class {coords:?}: dims {:?}, sum of squares {square_sum}, regular classes {}",
                table.dims(),
                regular_class_count(&lambda)
            );
        }
    }

    let pi1 = clock_and_shift(3, 1)?;
    let ctx = RepContext::new(pi1.group().clone(), 0);
    let square = tensor(&pi1, &contragredient(&pi1))?;
    let x = ctx.decompose(&square)?;
    println!("pi1 (x) conj(pi1) = {:?} over the linear characters", x.coeffs());
    Ok(())
}
