//! Desk-scale recovery of all graded structures satisfying the two defining
//! laws, two independent ways: polynomial ansatz elimination and windowed
//! table propagation. The solvers share no machinery and serve as mutual
//! oracles; every solution either one returns is re-verified by the law
//! checkers before it is reported.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{sqrt_exact, Rational};
use crate::witt::GradedStructure;

mod ansatz;
mod table;

pub use ansatz::solve_ansatz;
pub use table::solve_table;

/// Default branch bound for both solvers.
pub const DEFAULT_BUDGET: u64 = 10_000;

/// Ansatz-search request: maximum total degree of the candidate polynomial
/// and an optional pinned value for `φ(0,0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsatzProblem {
    pub max_total_degree: u32,
    pub pinned: Option<Rational>,
}

/// How a solver run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Every branch was explored; the solution list is exhaustive at this
    /// scale.
    Complete,
    /// The branch bound was hit; the solution list may be incomplete.
    BudgetExceeded,
    /// Some branch admitted no elimination or branching step; the solution
    /// list may be incomplete.
    Stalled,
}

impl SolveStatus {
    pub fn name(&self) -> &'static str {
        match self {
            SolveStatus::Complete => "complete",
            SolveStatus::BudgetExceeded => "budget-exceeded",
            SolveStatus::Stalled => "stalled",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Branch accounting for a solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchLog {
    /// Branches explored, the root included.
    pub branches: u64,
    /// Branches that died on a contradiction.
    pub pruned: u64,
}

/// Solutions plus the run's status and accounting. Solutions are sorted
/// canonically and deduplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solutions: Vec<GradedStructure>,
    pub status: SolveStatus,
    pub log: SearchLog,
}

/// Rational roots of `a·x² + b·x + c = 0` (with `a ≠ 0`), or `None` when the
/// discriminant is negative or not a perfect square.
pub(crate) fn rational_roots(a: &Rational, b: &Rational, c: &Rational) -> Option<Vec<Rational>> {
    let disc = b * b - Rational::from_integer(4.into()) * a * c;
    if disc.is_negative() {
        return None;
    }
    let root = Rational::new_raw(sqrt_exact(disc.numer())?, sqrt_exact(disc.denom())?);
    let two_a = a + a;
    if root.is_zero() {
        Some(vec![-b / &two_a])
    } else {
        Some(vec![(&root - b) / &two_a, (-(&root) - b) / &two_a])
    }
}

/// Rejection of a solver request before any search starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    /// Table propagation needs radius ≥ 3 to reproduce the defining
    /// contradictions; smaller windows under-constrain.
    WindowTooSmall { radius: i64 },
    /// A degree-0 ansatz cannot satisfy the commutator law.
    DegreeTooSmall,
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::WindowTooSmall { radius } => {
                write!(f, "table solving needs window radius >= 3, got {radius}")
            }
            SolverError::DegreeTooSmall => {
                f.write_str("ansatz degree must be at least 1")
            }
        }
    }
}
