//! Steepest-ascent hill climbing from the identity on a simulated 7-variable scenario,
//! printing the accepted path.

use permsym::perm::Permutation;
use permsym::posterior::GipsModel;
use permsym::search::{brute_force, hill_climb};
use permsym::simulate::simulate_scenario;

fn main() -> permsym::Result<()> {
    let planted = Permutation::parse("(1,2,3)(4,5,6)", 7)?;
    let scenario = simulate_scenario(&planted, 40, 11, None)?;
    let model = GipsModel::from_data(&scenario.data, false)?;

    let climb = hill_climb(&model, None, None)?;
    for (step, e) in climb.path.iter().flatten().enumerate() {
        println!("{step:>2}: {:<20} {:.3}", e.subgroup.to_string(), e.log_quotient);
    }
    println!("{} evaluations", climb.evaluations);

    let exact = brute_force(&model, false)?;
    println!(
        "brute force MAP {} ({:.3}) over {} subgroups",
        exact.best.subgroup, exact.best.log_quotient, exact.evaluations
    );
    Ok(())
}
