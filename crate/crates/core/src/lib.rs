//! Positive-partial-transpose entangled symmetric multi-qubit states.
//!
//! Modules:
//! - [`hilbert`]: Dicke basis, symmetric projector, partial transposes, ranks.
//! - [`horodecki`]: the qubit–qudit family `ρ_{d,b}` and its certificates.
//! - [`construct`]: filter pipeline producing symmetric PPT states.
//! - [`extremal`]: fixed-point extremality test and rank-reduction search.
//! - [`classify`]: rank rules, edge tests and separable decompositions.
//! - [`io`] and [`cli`]: state files, run logs and the command-line front end.

pub mod classify;
pub mod cli;
pub mod construct;
pub mod error;
pub mod extremal;
pub mod hilbert;
pub mod io;
pub mod horodecki;
pub mod linalg;
pub mod optim;
pub mod poly;

pub use error::{Error, Result};
pub use hilbert::{Alpha, SymmetricState, ThreeRank, Tolerances};
