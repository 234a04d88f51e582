//! Two actions whose trivial-class K-theory agrees as modules over the
//! representation ring, but whose full invariants are not isomorphic.

use std::sync::Arc;

use tek::kaction::{ell_invariant, iso_invariants, trivial_component_module_iso, FDAction};
use tek::projrep::{clock_and_shift, RepContext};

fn main() -> tek::error::Result<()> {
    let pi1 = clock_and_shift(3, 1)?;
    let pi2 = clock_and_shift(3, 2)?;
    let ctx = Arc::new(RepContext::new(pi1.group().clone(), 0));
    let e1 = ell_invariant(&ctx, &FDAction::single(pi1.clone()))?;
    let e2 = ell_invariant(&ctx, &FDAction::single(pi2))?;

    let module = trivial_component_module_iso(&e1, &e2)?;
    println!("trivial-class modules isomorphic: {}", module.is_some());
    println!("full invariants isomorphic: {}", iso_invariants(&e1, &e2)?.is_some());

    let basis = ctx.basis();
    let bar = basis.class_index(&basis.class_coordinates(&pi1.cocycle().inverse())?);
    println!(
        "rank at the conjugate class of pi1: {} vs {}",
        e1.group_at(bar).rank(),
        e2.group_at(bar).rank()
    );
    Ok(())
}
