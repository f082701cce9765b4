pub mod bounds;
pub mod cli;
pub mod error;
pub mod figures;
pub mod gaussian;
pub mod output;
pub mod protocol;
pub mod solvers;
