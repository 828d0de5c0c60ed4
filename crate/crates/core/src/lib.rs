pub mod cli;
pub mod closed_form;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod solver;
pub mod sweep;
