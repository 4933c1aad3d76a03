//! Band-limited maximum-likelihood density estimation in one and two dimensions.

mod gram;
mod points;
mod solver;

pub use gram::{gram_matrix, DENSE_GRAM_LIMIT};
pub use points::{bin_1d, bin_2d, bin_width, merge_duplicates_1d, merge_duplicates_2d, Binned, SupportPoints};
pub use solver::{pdf_eval, pdf_integral, solve_blml, BlmlFit};
