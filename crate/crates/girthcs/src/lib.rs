//! Analysis toolkit for binary 0-1 compressed-sensing measurement matrices.
//!
//! The crate answers four questions about a 0-1 matrix H used to take
//! measurements y = Hx of a sparse signal x:
//!
//! * What does its Tanner graph look like? ([`tanner`]: girth, column
//!   weights, maximum column inner product, local tree expansions.)
//! * What does the girth guarantee about basis pursuit? ([`bounds`]: the
//!   coordinate-bound constant C0, the sparse-approximation constants, the
//!   largest recoverable sparsity, and comparison bounds.)
//! * Is a claimed extremal nullspace vector genuine? ([`certify`]: exact
//!   rational verification of membership, balance, pseudoweights, and bound
//!   tightness.)
//! * Does the matrix actually behave as promised? ([`lpsolve`]: a built-in
//!   two-phase simplex for basis pursuit, the empirically best coordinate
//!   bound, and brute-force nullspace-property constants.)
//!
//! [`binmat`] supplies the matrix type, the alist and dense text formats,
//! five small reference matrices whose bounds are met with equality, and a
//! girth-aware column-regular generator.

pub mod binmat;
pub mod bounds;
pub mod certify;
pub mod lpsolve;
pub mod tanner;

pub use binmat::{BinaryMatrix, BuiltinMatrix};
pub use bounds::{GuaranteeBundle, Rational};
pub use tanner::{Girth, Profile};
