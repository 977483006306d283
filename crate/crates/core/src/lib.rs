//! Finite-dimensional quantum hypothesis testing.
//!
//! * [`operator`]: Hermitian and density operators, spectral projectors
//!   `{A > 0}` and friends, block-diagonal constructions.
//! * [`binary`]: Neyman–Pearson tests, the tradeoff `α_β(ρ0‖ρ1)`, the
//!   Helstrom error and a threshold lower bound on `α_β`.
//! * [`mary`]: certified minimum-error discrimination of `M` states and the
//!   two exact reformulations of the minimum error: a binary test between
//!   block-diagonal states, and an information-spectrum maximization.
//! * [`channel`]: one-shot classical-quantum codes and the converse bounds
//!   that the reformulations show to be tight.
//! * [`cli`]: the `qht` command-line front end.

pub mod binary;
pub mod channel;
pub mod cli;
mod eigen;
pub mod error;
pub mod io;
pub mod mary;
pub mod operator;
pub mod random;

pub use error::{QhtError, Result};
