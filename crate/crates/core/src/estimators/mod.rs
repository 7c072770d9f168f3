//! Moment estimation, log-log slope fitting, Kozachenko–Leonenko entropy,
//! PCA and standardization.

mod entropy;
mod moments;
mod pca;
mod standardize;

pub use entropy::{kl_entropy, EntropyReport};
pub use moments::{moment_estimate, slope_fit, SlopeFit};
pub use pca::{jacobi_eigen, pca_fit, pca_project, pca_reconstruct, PcaModel};
pub use standardize::{standardize, Standardized, Standardizer};
