//! Exact arithmetic for ℤ-graded products on Witt-type index lattices.
//!
//! A graded product is described by a structure function φ with
//! `W_a ∘ W_b = φ(a,b) W_{a+b}`. This crate provides the rational/polynomial
//! substrate, a small expression grammar, law checkers (windowed and
//! symbolic), weight modules with intertwiner search, two independent
//! structure solvers, and the central-extension layer with exact
//! infeasibility certificates.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion CLI.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod expr;
pub mod poly;
pub mod rational;
pub mod report;
pub mod solver;
pub mod virasoro;
pub mod weight;
pub mod witt;

pub use expr::{format_canonical, parse_expression, ParseError};
pub use poly::MultiPoly;
pub use rational::Rational;
pub use report::{Law, LawReport, Violation, Window};
pub use virasoro::{CentralOutcome, CentralStructure, Certificate};
pub use weight::{ModuleSource, WeightModule};
pub use witt::GradedStructure;
