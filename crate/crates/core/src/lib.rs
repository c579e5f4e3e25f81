//! Computational checks around abelian quotients of finite groups.
//!
//! * [`number_theory`]: exact factorization, multiplicative orders, Zsigmondy
//!   primes and the large-Zsigmondy exception tables, with window scans.
//! * [`simple_groups`]: orders and outer automorphism group orders of the
//!   finite simple groups.
//! * [`case_audit`]: per-group certificates of two coprime abelian subgroup
//!   orders dominating every abelian section of `Out(G)`.
//! * [`group_engine`]: matrix groups over prime fields, their orbits on the
//!   natural module and the bound `|G/G'| <= M`.

pub mod case_audit;
pub mod error;
pub mod group_engine;
pub mod number_theory;
pub mod simple_groups;

pub use error::{Error, Result};
