//! Constrained MLE followed by partial-correlation thresholding, on simulated data with a
//! planted (1,2)(3,4) symmetry.

use permsym::estimate::{adjacency, edges_to_csv, mle_covariance, threshold_partial_correlations};
use permsym::perm::Permutation;
use permsym::posterior::GipsModel;
use permsym::search::brute_force;
use permsym::simulate::simulate_scenario;

fn main() -> permsym::Result<()> {
    let planted = Permutation::parse("(1,2)(3,4)", 5)?;
    let scenario = simulate_scenario(&planted, 25, 4, None)?;
    let model = GipsModel::from_data(&scenario.data, false)?;
    let map = brute_force(&model, false)?.best.subgroup;

    let report = mle_covariance(model.s(), map.generator(), model.sample_size())?;
    println!("MAP {map}: {} free parameters, MLE exists: {}", report.dim, report.mle_exists);
    if let Some(c) = report.criteria {
        println!("log-likelihood {:.3}, BIC {:.3}, AIC {:.3}", c.log_lik, c.bic, c.aic);
    }

    let edges = threshold_partial_correlations(&report.sigma_hat, 0.2)?;
    print!("{}", edges_to_csv(&edges));
    println!("neighbours {:?}", adjacency(5, 0.2, &edges).neighbours);
    Ok(())
}
