//! Fourier coefficients of stochastic block models, signed subgraph counts
//! and the hypothesis tests built from them.

pub mod cli;
pub mod counts;
pub mod fourier;
pub mod graphs;
pub mod mc;
pub mod sbm;
pub mod scaling;
pub mod verify;
