//! Windows, law names, and the report type shared by every checker.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::poly::MultiPoly;
use crate::rational::Rational;

/// Symmetric index range `{-N, …, N}`.
///
/// An equation instance is *in window* iff every grading index appearing in
/// it — including sums such as `m+n` and `m+n+l` — lies in the range;
/// instances that leave the window are skipped and counted, never failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    radius: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowError(pub i64);

impl fmt::Display for WindowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "window radius must be positive, got {}", self.0)
    }
}

impl Window {
    pub fn new(radius: i64) -> Result<Window, WindowError> {
        if radius < 1 {
            Err(WindowError(radius))
        } else {
            Ok(Window { radius })
        }
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn contains(&self, idx: i64) -> bool {
        idx.abs() <= self.radius
    }

    /// Ascending iteration over `-N..=N`.
    pub fn iter(&self) -> impl Iterator<Item = i64> {
        -self.radius..=self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    WittCommutator,
    Jacobi,
    AntiPreLie,
    PreLie,
    RightCommutative,
    Novikov,
    AdmissibleNovikov,
    ModuleAxiom,
    Central,
}

impl Law {
    pub fn name(&self) -> &'static str {
        match self {
            Law::WittCommutator => "witt-commutator",
            Law::Jacobi => "jacobi",
            Law::AntiPreLie => "anti-pre-lie",
            Law::PreLie => "pre-lie",
            Law::RightCommutative => "right-commutative",
            Law::Novikov => "novikov",
            Law::AdmissibleNovikov => "admissible-novikov",
            Law::ModuleAxiom => "module-axiom",
            Law::Central => "central",
        }
    }

    /// The laws `check_law` accepts (products on the graded algebra itself).
    pub const PRODUCT_LAWS: [Law; 7] = [
        Law::WittCommutator,
        Law::Jacobi,
        Law::AntiPreLie,
        Law::PreLie,
        Law::RightCommutative,
        Law::Novikov,
        Law::AdmissibleNovikov,
    ];
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLaw(pub String);

impl fmt::Display for UnknownLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown law `{}`", self.0)
    }
}

impl FromStr for Law {
    type Err = UnknownLaw;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "witt-commutator" => Ok(Law::WittCommutator),
            "jacobi" => Ok(Law::Jacobi),
            "anti-pre-lie" => Ok(Law::AntiPreLie),
            "pre-lie" => Ok(Law::PreLie),
            "right-commutative" => Ok(Law::RightCommutative),
            "novikov" => Ok(Law::Novikov),
            "admissible-novikov" => Ok(Law::AdmissibleNovikov),
            "module-axiom" => Ok(Law::ModuleAxiom),
            "central" => Ok(Law::Central),
            other => Err(UnknownLaw(other.into())),
        }
    }
}

/// One failed equation instance: the clause it came from, the instance's
/// named indices in clause order, and the exact residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: &'static str,
    pub at: Vec<(&'static str, i64)>,
    pub residual: Rational,
}

/// One clause of a symbolic check; pass requires the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicResidual {
    pub clause: &'static str,
    pub residual: MultiPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub law: Law,
    /// Window radius for windowed checks; `None` for symbolic ones.
    pub window: Option<i64>,
    pub checked: u64,
    pub skipped: u64,
    pub violations: Vec<Violation>,
    pub symbolic_residuals: Option<Vec<SymbolicResidual>>,
    pub pass: bool,
}

impl LawReport {
    pub fn windowed(
        law: Law,
        window: Window,
        checked: u64,
        skipped: u64,
        violations: Vec<Violation>,
    ) -> LawReport {
        let pass = violations.is_empty();
        LawReport {
            law,
            window: Some(window.radius()),
            checked,
            skipped,
            violations,
            symbolic_residuals: None,
            pass,
        }
    }

    pub fn symbolic(law: Law, residuals: Vec<SymbolicResidual>) -> LawReport {
        let pass = residuals.iter().all(|r| r.residual.is_zero());
        LawReport {
            law,
            window: None,
            checked: 0,
            skipped: 0,
            violations: Vec::new(),
            symbolic_residuals: Some(residuals),
            pass,
        }
    }

    /// Merge clause reports of an aggregate law (e.g. novikov = pre-lie +
    /// right-commutative).
    pub fn merge(law: Law, parts: Vec<LawReport>) -> LawReport {
        let window = parts.first().and_then(|p| p.window);
        let mut checked = 0;
        let mut skipped = 0;
        let mut violations = Vec::new();
        let mut residuals: Option<Vec<SymbolicResidual>> = None;
        let mut pass = true;
        for part in parts {
            checked += part.checked;
            skipped += part.skipped;
            violations.extend(part.violations);
            if let Some(rs) = part.symbolic_residuals {
                residuals.get_or_insert_with(Vec::new).extend(rs);
            }
            pass &= part.pass;
        }
        LawReport {
            law,
            window,
            checked,
            skipped,
            violations,
            symbolic_residuals: residuals,
            pass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn law_names_round_trip() {
        for law in Law::PRODUCT_LAWS {
            assert_eq!(law.name().parse::<Law>().unwrap(), law);
        }
        assert!("no-such-law".parse::<Law>().is_err());
    }

    #[test]
    fn window_guards() {
        assert!(Window::new(0).is_err());
        let w = Window::new(3).unwrap();
        assert!(w.contains(-3) && w.contains(3) && !w.contains(4));
        assert_eq!(w.iter().count(), 7);
    }

    #[test]
    fn report_pass_semantics() {
        let w = Window::new(2).unwrap();
        let ok = LawReport::windowed(Law::WittCommutator, w, 10, 2, Vec::new());
        assert!(ok.pass);
        let bad = LawReport::windowed(
            Law::WittCommutator,
            w,
            10,
            2,
            alloc::vec![Violation {
                clause: "commutator",
                at: alloc::vec![("m", 1), ("n", 0)],
                residual: rat(2),
            }],
        );
        assert!(!bad.pass);
        let merged = LawReport::merge(Law::Novikov, alloc::vec![ok, bad]);
        assert!(!merged.pass);
        assert_eq!(merged.checked, 20);
        assert_eq!(merged.violations.len(), 1);
    }
}
