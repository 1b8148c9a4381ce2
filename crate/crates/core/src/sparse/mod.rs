//! Sparse collections and forms, the universal dominating form, the
//! Hardy–Littlewood maximal function, sparse-ratio estimates and modulation
//! projections onto rational frequency windows.

mod collection;
mod form;
mod maximal;
mod modulation;
mod ratio;

pub use collection::{verify_sparse, SparseCollection, SparseEntry, SparseReport};
pub use form::{build_universal_sparse, build_universal_sparse_on, eval_sparse_form, SparseFormParams};
pub use maximal::mhl;
pub use modulation::{major_transfer_check, modulation_projection, projection_grid, ModulationFamily, TransferReport};
pub use ratio::{estimate_sparse_ratio, random_sparse_collection, trial_rng, truncated_kernel_estimate, Ensemble};
