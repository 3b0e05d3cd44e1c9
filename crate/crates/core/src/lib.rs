//! Exact computations in the odd Contact superalgebra `KO(n,n+1)` over `F_p`,
//! `p > 2`, through its truncated finite-dimensional models.
//!
//! Layers, bottom up: [`scalars`] (prime fields), [`superalg`] (divided-power
//! superalgebras `O(n,n+1;t)`), [`witt`] (super derivations), [`ko`] (the
//! superalgebra itself, stored by potentials), [`linalg`] (subspaces, closures,
//! nilpotency), [`invariants`] (invariant subspaces and automorphisms) and
//! [`verify`] (the suites run by the `kolab` binary).

pub mod error;
pub mod invariants;
pub mod ko;
pub mod linalg;
pub mod scalars;
pub mod superalg;
pub mod syntax;
pub mod verify;
pub mod witt;

pub use error::{Error, Result};
