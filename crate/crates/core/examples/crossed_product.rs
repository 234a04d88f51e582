//! Twisted crossed products computed by block decomposition, compared with
//! the rank of the matching twisted K_0 group.

use std::sync::Arc;

use tek::cohomology::Cocycle;
use tek::group::FiniteGroup;
use tek::kaction::{k0_lambda, twisted_crossed_product, FDAction};
use tek::projrep::{clock_and_shift, RepContext};

fn main() -> tek::error::Result<()> {
    let pi1 = clock_and_shift(3, 1)?;
    let ctx = RepContext::new(pi1.group().clone(), 0);
    let alpha = FDAction::single(pi1.clone());
    for coords in ctx.basis().all_classes() {
        let lambda = ctx.basis().representative(&coords);
        let blocks = twisted_crossed_product(&alpha, &lambda.inverse(), 0)?;
        let rank = k0_lambda(&ctx, &alpha, &lambda)?.rank();
        println!("M_3 x| conj(lambda_{coords:?}) Z3xZ3 = {blocks:?}; K0 rank {rank}");
    }

    let z2 = Arc::new(FiniteGroup::cyclic(2));
    let flip = FDAction::trivial_on_c(z2.clone());
    let blocks = twisted_crossed_product(&flip, &Cocycle::trivial(z2), 0)?;
    println!("C x| Z2 = {blocks:?}");
    Ok(())
}
