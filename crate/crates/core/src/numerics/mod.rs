//! Self-contained numerical kernels.

mod bspline;
mod matrix;
mod penalized;
mod special;
mod svd;

pub use bspline::{bspline_design, BsplineBasis};
pub use matrix::Matrix;
pub use penalized::{difference_matrix, solve_penalized_ls, Cholesky, PenalizedSystem};
pub use special::{
    beta_inc, erf, erfc, ln_gamma, normal_cdf, normal_pdf, normal_quantile, student_t_two_sided,
};
pub use svd::{svd_thin, SvdResult};

