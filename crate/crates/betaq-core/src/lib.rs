//! betaq-core: exact q-series arithmetic and the modular-form machinery built
//! on top of it.
//!
//! The crate is organised bottom-up:
//!
//! * [`qseries`] — truncated formal power series over exact big rationals
//! * [`etaq`] — Dedekind eta quotients: expansion and modularity bookkeeping
//! * [`eisenstein`] — real Dirichlet characters, twisted divisor sums, and
//!   the weight-(2k+1) Eisenstein series attached to them
//! * [`lambert`] — Eulerian polynomials and Lambert-series expansions
//! * [`basis`] — the eta-quotient basis of M_{2k+1}(8, χ₋₄) and exact
//!   decomposition in it
//! * [`cm`] — high-precision evaluation at the CM points τ = 2^r i
//! * [`analytics`] — Euler numbers, Dirichlet beta values, radial limits,
//!   representation counts and asymptotics
//! * [`suite`] — the end-to-end verification battery used by the CLI and the
//!   acceptance tests

pub mod analytics;
pub mod basis;
mod bigfloat;
pub mod cm;
pub mod eisenstein;
pub mod etaq;
pub mod lambert;
pub mod qseries;
pub mod suite;

pub use rug::{Integer, Rational};

/// Default series truncation used by the CLI when `--trunc` is not given.
pub const DEFAULT_TRUNC: i64 = 200;

/// Default float precision (bits) used by the CLI when `--prec` is not given.
pub const DEFAULT_PREC: u32 = 256;
