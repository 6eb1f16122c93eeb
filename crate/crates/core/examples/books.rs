//! The books data with height rescaled by 1/√2: thickness and breadth turn out
//! exchangeable, height does not.

use std::path::Path;

use permsym::io::read_table;
use permsym::perm::enumerate_cyclic_subgroups;
use permsym::posterior::{exact_posterior_probabilities, GipsModel};

fn main() -> permsym::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/books_scaled.csv");
    let table = read_table(&path)?;
    let names = table.header.clone().unwrap_or_default();
    let model = GipsModel::from_data(&table.values, false)?;
    println!("variables {names:?}, n = {}, n_eff = {}", model.n(), model.n_eff());

    let mut probs = exact_posterior_probabilities(&model, &enumerate_cyclic_subgroups(3)?)?;
    probs.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (g, p) in &probs {
        println!("{:<10} {p:.7}", g.to_string());
    }
    Ok(())
}
