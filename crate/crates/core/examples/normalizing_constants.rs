//! Structure constants and log normalizing constants for a few subgroups of 𝔖₆.

use permsym::colored::{dimension, n0, structure_constants};
use permsym::linalg::SymMatrix;
use permsym::perm::{canonical_generator, Permutation};
use permsym::posterior::log_norm_constant;

fn main() -> permsym::Result<()> {
    let d = SymMatrix::identity(6);
    for text in ["()", "(1,2)", "(1,2,3)(4,5)", "(1,2,3,4,5,6)", "(1,2)(3,4)(5,6)"] {
        let sigma = Permutation::parse(text, 6)?;
        let c = structure_constants(&sigma);
        println!(
            "{text:<18} canonical {:<16} dim {:>2}  n0 {}  r {:?}  d {:?}  log I(3, I) = {:.6}",
            canonical_generator(&sigma).to_string(),
            dimension(&sigma),
            n0(&sigma),
            c.r,
            c.d,
            log_norm_constant(&sigma, 3.0, &d)?
        );
    }
    Ok(())
}
