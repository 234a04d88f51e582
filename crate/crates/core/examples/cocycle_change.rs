//! Changing cocycle representatives within a class: the shift by a
//! trivializing function permutes irreps and commutes with partial actions.

use std::sync::Arc;

use tek::cohomology::{cocycle_product, coboundary, CoboundaryWitness};
use tek::kaction::{ell_invariant, FDAction};
use tek::projrep::{clock_and_shift, RepContext};

fn main() -> tek::error::Result<()> {
    let pi1 = clock_and_shift(3, 1)?;
    let g = pi1.group().clone();
    let ctx = Arc::new(RepContext::new(g.clone(), 0));
    let e = ell_invariant(&ctx, &FDAction::single(pi1.clone()))?;

    let mu = CoboundaryWitness { modulus: 9, mu: (0..g.order() as u64).map(|x| (x * x * 7 + 3 * (x % 3)) % 9).collect() };
    let omega = cocycle_product(&coboundary(&g, &mu), &pi1.cocycle().inverse())?;
    let change = e.change_of_cocycle(&omega)?;
    println!("class index {}, residual {:.2e}", change.class, change.residual);
    let images: Vec<usize> = (0..change.forward.cols())
        .map(|j| (0..change.forward.rows()).find(|&i| change.forward.get(i, j) == 1).expect("a permutation"))
        .collect();
    println!("irrep j goes to {images:?}");
    let round_trip = change.forward.mul(&change.backward);
    println!("forward * backward is the identity: {}", round_trip == tek::intlin::IntMatrix::identity(round_trip.rows()));
    Ok(())
}
