//! Bayesian discovery of cyclic permutation symmetries in Gaussian covariance structure.
//!
//! A model is a cyclic subgroup `⟨σ⟩` of the symmetric group on the `p` variables; the
//! covariance is assumed invariant under simultaneous permutation of rows and columns by
//! every element of the group. Subgroups are compared through a conjugate
//! Diaconis–Ylvisaker prior whose normalising constants have a closed form, and the model
//! space is explored by brute force, Metropolis–Hastings or hill climbing.
//!
//! ```
//! use permsym::{linalg::SymMatrix, perm::Permutation, posterior::*};
//!
//! let s = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
//! let model = GipsModel::with_defaults(s, SampleSize::new(20, true)).unwrap();
//! let swap = Permutation::parse("(1,2)", 2).unwrap();
//! let odds = compare_posteriors(&model, &swap, &Permutation::identity(2)).unwrap();
//! assert!(odds > 1.0);
//! ```

pub mod cli;
pub mod colored;
pub mod error;
pub mod estimate;
pub mod io;
pub mod linalg;
pub mod perm;
pub mod posterior;
pub mod search;
pub mod simulate;

pub use error::{Error, Result};
