//! Numerical complex Finsler geometry: jets and Wirtinger derivatives, exterior forms,
//! the Chern–Finsler connection, indicatrix volumes, transgression forms and
//! Gauss–Bonnet–Chern checks on small compact manifolds.

pub mod atlas;
pub mod connection;
pub mod error;
pub mod field;
pub mod forms;
pub mod gbc;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod quadrature;
pub mod report;
pub mod scenario;
pub mod transgression;
pub mod volume;

pub use error::{Error, Result};
