//! Twisted K_0 groups and the full invariant of the two inner actions of
//! Z/3 ⊕ Z/3 on M_3, with a partial action by a projective representation.

use std::sync::Arc;

use tek::kaction::{ell_invariant, k0_lambda, FDAction, KElement};
use tek::projrep::{clock_and_shift, RepContext};

fn main() -> tek::error::Result<()> {
    let pi1 = clock_and_shift(3, 1)?;
    let pi2 = clock_and_shift(3, 2)?;
    let ctx = Arc::new(RepContext::new(pi1.group().clone(), 0));
    let basis = ctx.basis();

    for (name, pi) in [("alpha1", &pi1), ("alpha2", &pi2)] {
        let alpha = FDAction::single(pi.clone());
        println!("{name} = Ad pi on M_{}", pi.dim());
        for coords in basis.all_classes() {
            let k = k0_lambda(&ctx, &alpha, &basis.representative(&coords))?;
            println!("  K0 at class {coords:?}: Z^{} (unit {:?})", k.rank(), k.unit());
        }
    }

    let alpha1 = FDAction::single(pi1.clone());
    let e = ell_invariant(&ctx, &alpha1)?;
    let x = ctx.decompose(&pi1)?;
    let to = basis.class_index(&basis.class_coordinates(pi1.cocycle())?);
    let unit = KElement { class: 0, coords: e.unit().to_vec() };
    let image = e.apply_partial_action(&x, &unit, to)?;
    println!("[pi1] . [1] lands in class {:?} with coordinates {:?}", basis.class_at(to), image.coords);
    Ok(())
}
