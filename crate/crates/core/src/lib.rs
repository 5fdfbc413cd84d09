//! Poisson kernels, Poisson semigroups and Dirichlet-to-Normal maps for
//! second-order constant-coefficient strongly elliptic systems in the upper
//! half-space `R^n_+`.

pub mod elliptic;
pub mod error;
pub mod fields;
pub mod fundsol;
pub mod generator;
pub mod linalg;
pub mod poisson;
pub mod quadrature;

pub use error::{Error, Result};
