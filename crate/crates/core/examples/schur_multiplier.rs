//! Schur multipliers of the shipped small groups, and the cohomology classes
//! of the two clock-and-shift representations of Z/3 ⊕ Z/3.

use std::sync::Arc;

use tek::cohomology::schur_multiplier;
use tek::group::small_group_corpus;
use tek::projrep::clock_and_shift;

fn main() -> tek::error::Result<()> {
    for (name, g) in small_group_corpus() {
        let g = Arc::new(g);
        let basis = schur_multiplier(&g);
        println!("{name:>10}  |G| = {:>2}  H2 = {}", g.order(), basis.invariant_factors());
    }

    let pi1 = clock_and_shift(3, 1)?;
    let pi2 = clock_and_shift(3, 2)?;
    let basis = schur_multiplier(pi1.group());
    let c1 = basis.class_coordinates(pi1.cocycle())?;
    let c2 = basis.class_coordinates(pi2.cocycle())?;
    println!("class of pi1 = {c1:?}, class of pi2 = {c2:?}");
    println!("class of pi1 + pi2 = {:?}", basis.add_classes(&c1, &c2));
    Ok(())
}
