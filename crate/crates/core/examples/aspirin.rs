//! Exhaustive search on the aspirin meta-analysis table: MAP subgroup, posterior odds and
//! the exact probability table.

use std::path::Path;

use permsym::io::read_table;
use permsym::perm::{enumerate_cyclic_subgroups, Permutation};
use permsym::posterior::{compare_posteriors, exact_posterior_probabilities, GipsModel};
use permsym::search::brute_force;

fn main() -> permsym::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/aspirin.csv");
    let table = read_table(&path)?;
    let model = GipsModel::from_data(&table.values, false)?;

    let result = brute_force(&model, false)?;
    let map = result.best.subgroup.generator();
    println!("MAP {map} after {} evaluations", result.evaluations);
    for other in ["()", "(3,4)", "(1,2)"] {
        let odds = compare_posteriors(&model, map, &Permutation::parse(other, 4)?)?;
        println!("  {odds:.3} times more likely than {other}");
    }

    let mut probs = exact_posterior_probabilities(&model, &enumerate_cyclic_subgroups(4)?)?;
    probs.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (g, p) in probs.iter().take(5) {
        println!("{:<14} {p:.6}", g.to_string());
    }
    Ok(())
}
