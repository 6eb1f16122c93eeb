//! Metropolis–Hastings on the aspirin data and the totient-corrected visit-frequency
//! estimate, compared with the exact probabilities.

use std::path::Path;

use permsym::io::read_table;
use permsym::perm::enumerate_cyclic_subgroups;
use permsym::posterior::{exact_posterior_probabilities, GipsModel};
use permsym::search::{estimate_probabilities, metropolis_hastings, MhOptions};

fn main() -> permsym::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/aspirin.csv");
    let model = GipsModel::from_data(&read_table(&path)?.values, false)?;

    let mut options = MhOptions::new(20_000, 20_000);
    options.save_all = true;
    let chain = metropolis_hastings(&model, &options)?;
    println!(
        "best {} (log quotient {:.4}), acceptance rate {:.3}",
        chain.best.subgroup,
        chain.best.log_quotient,
        chain.acceptance_rate.unwrap_or(0.0)
    );
    for note in &chain.diagnostics {
        println!("note: {note}");
    }

    let estimate = estimate_probabilities(chain.trace.as_deref().unwrap_or_default())?;
    let exact = exact_posterior_probabilities(&model, &enumerate_cyclic_subgroups(4)?)?;
    let mut tv = 0.0;
    println!("{:<14} {:>9} {:>9}", "subgroup", "exact", "chain");
    for (g, p) in &exact {
        let q = estimate.get(g);
        tv += 0.5 * (p - q).abs();
        println!("{:<14} {p:>9.5} {q:>9.5}", g.to_string());
    }
    println!("total variation {tv:.4}");
    Ok(())
}
