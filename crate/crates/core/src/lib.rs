//! Guessing number, public entropy, stability, instability, guessing
//! dimension and coset dimension of finite dynamical systems on digraphs.

pub mod bitset;
pub mod coding;
pub mod construct;
pub mod digraph;
pub mod error;
pub mod fds;
pub mod ffield;
pub mod guessgraph;
pub mod optimize;
pub mod report;
pub mod ugraph;
pub mod verify;

pub use coding::{ball_volume, check_bounds, BoundReport, Code, InstanceQuantities, LinearCode};
pub use digraph::Digraph;
pub use error::{Error, Result};
pub use fds::{AffineFds, Fds, LogCount};
pub use ffield::{Field, FieldElement, Matrix};
pub use guessgraph::GuessingGraph;
pub use optimize::{Certificate, ExtremalResult, Mode, Quantity, SearchBudget, Value, Witness};
pub use report::Report;
