//! Fifty standard-normal draws in four variables: the evidence points at full exchangeability
//! even though only cyclic subgroups are scored, so the three 4-cycles lead and the identity
//! trails.

use std::path::Path;

use permsym::io::read_table;
use permsym::perm::enumerate_cyclic_subgroups;
use permsym::posterior::{exact_posterior_probabilities, GipsModel};

fn main() -> permsym::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/normal_50x4.csv");
    let model = GipsModel::from_data(&read_table(&path)?.values, false)?;
    let mut probs = exact_posterior_probabilities(&model, &enumerate_cyclic_subgroups(4)?)?;
    probs.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (rank, (g, p)) in probs.iter().enumerate() {
        println!("{:>2}. {:<14} order {}  {p:.3e}", rank + 1, g.to_string(), g.order());
    }
    Ok(())
}
