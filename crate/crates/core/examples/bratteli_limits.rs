//! Decorated Bratteli diagrams of inductive limit actions: the two
//! stationary M_3 towers, their stable ranks, a telescope, the conjugacy
//! decider, and a dot rendering.

use std::sync::Arc;

use tek::limits::{decide_conjugacy, stable_rank_per_class, telescope, to_dot, DecoratedBratteli, EdgeSpec, Stationary, SummandSpec};
use tek::projrep::{clock_and_shift, RepContext};

fn tower(ctx: &RepContext, k: usize) -> tek::error::Result<DecoratedBratteli> {
    let pi = clock_and_shift(3, k)?;
    let class = ctx.basis().class_coordinates(pi.cocycle())?;
    // the three characters trivial on the second factor, tensored on each step
    let rho = vec![1, 1, 1, 0, 0, 0, 0, 0, 0];
    Ok(DecoratedBratteli {
        group: ctx.group().clone(),
        levels: vec![vec![SummandSpec { class, multiplicities: vec![1] }]],
        edges: vec![vec![EdgeSpec { from: 0, to: 0, class: None, label: rho }]],
        stationary: Some(Stationary { from: 0, period: 1 }),
        unital: true,
    })
}

fn main() -> tek::error::Result<()> {
    let g = clock_and_shift(3, 1)?.group().clone();
    let ctx = Arc::new(RepContext::new(g, 0));
    let g1 = tower(&ctx, 1)?;
    let g2 = tower(&ctx, 2)?;

    for (name, d) in [("gamma1", &g1), ("gamma2", &g2)] {
        let ranks: Vec<String> = stable_rank_per_class(&ctx, d)?.iter().map(|s| format!("{:?}: {}", s.class, s.rank)).collect();
        println!("{name} stable ranks {}", ranks.join(", "));
    }
    println!("gamma1 vs gamma2: {:?}", decide_conjugacy(&ctx, &g1, &g2, 8, 0)?);

    let t = telescope(&ctx, &g1, 2)?;
    println!("gamma1 vs its telescope: {}", decide_conjugacy(&ctx, &g1, &t, 3, 0)?.tag());
    print!("{}", to_dot(&ctx, &g1, 2)?);
    Ok(())
}
