//! Eigen-bouquet analysis of polynomial families of normal matrices.

pub mod algebra;
pub mod bouquet;
pub mod cli;
pub mod family;
pub mod frames;
pub mod oracle;
pub mod realnormal;
pub mod resolve;
pub mod sampling;
