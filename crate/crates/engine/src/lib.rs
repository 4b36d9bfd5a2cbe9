//! Exact arithmetic for truncated p-adic integers and for power operations
//! on Morava E-theory coefficient rings at heights 1 and 2.
//!
//! The crate has four layers:
//!
//! * [`padic`]: truncated p-adic integers with explicit precision tracking,
//!   theta, Hensel lifting of unit roots, and the Rezk logarithm with its
//!   division-free series;
//! * [`howell`]: canonical (Howell) bases of row spans over Z/p^N, with
//!   relative kernels and tagged-row canonicalization;
//! * [`rings`] and [`powerops`]: the coefficient ring Z/p^N[a]/(a^K), the
//!   quotient E0[z]/f(z) described by a presentation file, window matrices,
//!   and the total power operation P with its transfer;
//! * [`saturate`]: the relation-saturation engine that closes an ideal of
//!   relations under the power-operation level rules and reports a
//!   replayable trace.
//!
//! All arithmetic is exact: every residue is canonical and every precision
//! drop is explicit in the types and function contracts.

pub mod howell;
pub mod padic;
pub mod powerops;
pub mod rings;
pub mod saturate;

pub use powerops::ExecMode;
