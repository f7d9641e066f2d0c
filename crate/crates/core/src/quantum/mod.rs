//! Quantum tori, the q-exponential Ψ^q, quantum mutations of the X- and
//! D-tori as μ♯ ∘ μ′, and exact and numeric relation oracles.

pub mod coef;
pub mod local;
pub mod matrix_model;
pub mod mutation;
pub mod series;
pub mod relations;
pub mod torus;

pub use coef::QCoef;
pub use local::{Factor, QLocal};
pub use matrix_model::{MatrixModel, Rep};
pub use mutation::{quantum_mu_prime, quantum_mu_sharp, quantum_mutation, QuantumMap};
pub use series::{psi_q, psi_q_difference_check, QSeries};
pub use torus::{QTorus, QTorusElem};
