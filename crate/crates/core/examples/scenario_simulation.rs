//! A planted full 8-cycle: simulate, then check how often exhaustive search recovers a
//! low-dimensional model.

use permsym::perm::Permutation;
use permsym::posterior::GipsModel;
use permsym::search::brute_force;
use permsym::simulate::simulate_scenario;

fn main() -> permsym::Result<()> {
    let planted = Permutation::from_image((1..8).chain([0]).collect())?;
    for seed in 1..=5 {
        let scenario = simulate_scenario(&planted, 30, seed, None)?;
        let model = GipsModel::from_data(&scenario.data, false)?;
        let result = brute_force(&model, false)?;
        println!(
            "seed {seed}: MAP {:<22} dim {:>2} (planted dim 5)",
            result.best.subgroup.to_string(),
            result.best.dim
        );
    }
    Ok(())
}
