//! p = 150 with n = 58: timing single posterior evaluations and a short chain.

use std::time::Instant;

use permsym::perm::Permutation;
use permsym::posterior::{log_posterior_quotient, GipsModel};
use permsym::search::{metropolis_hastings, MhOptions};
use permsym::simulate::simulate_scenario;

fn main() -> permsym::Result<()> {
    let p = 150;
    let planted = Permutation::from_image((1..p).chain([0]).collect())?;
    let scenario = simulate_scenario(&planted, 58, 1, None)?;
    let model = GipsModel::from_data(&scenario.data, false)?;
    // n_eff = 57 < p: the unconstrained MLE does not exist, the Bayesian quotient still does
    println!("n = {}, n_eff = {}", model.n(), model.n_eff());

    for sigma in [Permutation::identity(p), planted.clone()] {
        let started = Instant::now();
        let e = log_posterior_quotient(&model, &sigma)?;
        println!(
            "order {:>4}: log quotient {:>12.3}, n0 {:>3}, MLE exists {:<5} ({:.2?})",
            e.subgroup.order(),
            e.log_quotient,
            e.n0,
            e.mle_exists,
            started.elapsed()
        );
    }

    let chain = metropolis_hastings(&model, &MhOptions::new(500, 7))?;
    println!(
        "500 MH steps: best order {} with log quotient {:.3}, acceptance {:.3}, {:.2?}",
        chain.best.subgroup.order(),
        chain.best.log_quotient,
        chain.acceptance_rate.unwrap_or(0.0),
        chain.wall_time
    );
    Ok(())
}
