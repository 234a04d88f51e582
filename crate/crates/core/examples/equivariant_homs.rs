//! Existence and uniqueness of equivariant homomorphisms: realize an
//! invariant map by block embeddings, read it back, and compare two
//! realizations by a unitary intertwiner.

use std::sync::Arc;

use tek::kaction::{ell_invariant, hom_exists, hom_from_labels, induced_hom, realize_hom, unitary_intertwiner, FDAction};
use tek::projrep::{clock_and_shift, tensor, RepContext};

fn main() -> tek::error::Result<()> {
    let pi1 = clock_and_shift(3, 1)?;
    let ctx = Arc::new(RepContext::new(pi1.group().clone(), 0));

    let big = tensor(&pi1, &clock_and_shift(3, 0)?)?;
    match hom_exists(&ctx, &pi1, &big)? {
        Some(w) => println!("M_3 -> M_9: label {:?} of dim {}", w.label.coeffs(), w.dim),
        None => println!("M_3 -> M_9: none"),
    }

    let alpha = Arc::new(FDAction::single(pi1.clone()));
    let beta = Arc::new(FDAction::single(big));
    let src = ell_invariant(&ctx, &alpha)?;
    let dst = ell_invariant(&ctx, &beta)?;
    let w = hom_exists(&ctx, &pi1, beta.summand(0))?.expect("an embedding exists");
    let gamma = hom_from_labels(&src, &dst, &vec![vec![w.label]])?;

    let t1 = realize_hom(&gamma, &src, &dst, &alpha, &beta, 1)?;
    let t2 = realize_hom(&gamma, &src, &dst, &alpha, &beta, 2)?;
    println!("equivariance defect: {:.2e}", t1.defect());
    println!("read back equals input: {}", induced_hom(&t1, &src, &dst)? == gamma);
    let (_, residual) = unitary_intertwiner(&t1, &t2, &ctx, 0)?;
    println!("intertwiner residual between seeds 1 and 2: {residual:.2e}");
    Ok(())
}
