//! The central-extension layer: candidate products on the centrally extended
//! algebra, the three clauses tying the central coefficients `ψ_m = φ(m,−m)`
//! to the cocycle, and exact infeasibility certificates for the resulting
//! linear systems.
//!
//! Clause vocabulary (also the wire tags): `Vir-3` is the cocycle
//! normalization `ψ_m − ψ_{−m} = (m³−m)/12`, `Vir-4` the shifted-pair
//! relation `(γ+m−n)ψ_n − (γ+n−m)ψ_m = (m−n)ψ_{m+n}`, and `Vir-5` the axis
//! relation `(γ+m)ψ_0 = γψ_m`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::rational::{rat, ratio, Rational};
use crate::report::{Law, LawReport, Violation, Window};
use crate::solver::SolverError;
use crate::witt::{check_anti_pre_lie_symbolic, family_structure, CheckError};

/// A candidate central extension: the product's `W`-part is the structure
/// family at `gamma` by construction (`None` keeps it formal), so only the
/// central coefficients `ψ_m` carry data. The central element itself acts
/// trivially — there is nothing to store for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralStructure {
    gamma: Option<Rational>,
    psi: BTreeMap<i64, Rational>,
    window: Window,
}

/// Rejection of a central-structure candidate or check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CentralError {
    /// `ψ` lacks an in-window coefficient.
    MissingPsi { m: i64 },
    /// `ψ` carries a coefficient outside the window.
    PsiOutOfWindow { m: i64 },
    /// A residual depends on the formal `γ`, so it has no rational value.
    UnboundGamma,
}

impl fmt::Display for CentralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CentralError::MissingPsi { m } => {
                write!(f, "psi is missing the in-window coefficient at m = {m}")
            }
            CentralError::PsiOutOfWindow { m } => {
                write!(f, "psi coefficient at m = {m} lies outside the window")
            }
            CentralError::UnboundGamma => {
                f.write_str("a residual depends on the formal gamma; bind gamma to a rational")
            }
        }
    }
}

impl CentralStructure {
    /// Validate totality of `ψ` on the window.
    pub fn new(
        gamma: Option<Rational>,
        psi: BTreeMap<i64, Rational>,
        window: Window,
    ) -> Result<CentralStructure, CentralError> {
        for &m in psi.keys() {
            if !window.contains(m) {
                return Err(CentralError::PsiOutOfWindow { m });
            }
        }
        for m in window.iter() {
            if !psi.contains_key(&m) {
                return Err(CentralError::MissingPsi { m });
            }
        }
        Ok(CentralStructure { gamma, psi, window })
    }

    pub fn gamma(&self) -> Option<&Rational> {
        self.gamma.as_ref()
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn psi(&self, m: i64) -> Result<&Rational, CentralError> {
        self.psi.get(&m).ok_or(CentralError::MissingPsi { m })
    }

    pub fn psi_map(&self) -> &BTreeMap<i64, Rational> {
        &self.psi
    }
}

/// The cocycle's defining value `(m³−m)/12`.
fn cocycle(m: i64) -> Rational {
    ratio(m * m * m - m, 12)
}

/// Value of `(γ + s)·ψ_a − γ·ψ_b + t`, the shape shared by the γ-dependent
/// clauses, tolerating a formal `γ` as long as it cancels.
fn gamma_affine(
    gamma: Option<&Rational>,
    s: i64,
    psi_a: &Rational,
    psi_b: &Rational,
    t: Rational,
) -> Result<Rational, CentralError> {
    match gamma {
        Some(g) => Ok((g + rat(s)) * psi_a - g * psi_b + t),
        None => {
            if psi_a == psi_b {
                Ok(rat(s) * psi_a + t)
            } else {
                Err(CentralError::UnboundGamma)
            }
        }
    }
}

/// Residuals of the three central clauses: `Vir-3` over positive `m` (the
/// clause is odd in `m`, so positive representatives carry it all), `Vir-4`
/// over in-window pairs with `m+n` in window, `Vir-5` over the axis.
pub fn check_central(c: &CentralStructure, w: Window) -> Result<LawReport, CentralError> {
    if w.radius() > c.window.radius() {
        return Err(CentralError::MissingPsi { m: c.window.radius() + 1 });
    }
    let (mut checked, mut skipped) = (0, 0);
    let mut violations = Vec::new();

    for m in 1..=w.radius() {
        checked += 1;
        let residual = c.psi(m)? - c.psi(-m)? - cocycle(m);
        if !residual.is_zero() {
            violations.push(Violation {
                clause: "Vir-3",
                at: vec![("m", m)],
                residual,
            });
        }
    }

    for m in w.iter() {
        for n in w.iter() {
            if !w.contains(m + n) {
                skipped += 1;
                continue;
            }
            checked += 1;
            // (γ+m−n)ψ_n − (γ+n−m)ψ_m − (m−n)ψ_{m+n}
            let residual = gamma_affine(
                c.gamma(),
                m - n,
                c.psi(n)?,
                c.psi(m)?,
                rat(m - n) * c.psi(m)? - rat(m - n) * c.psi(m + n)?,
            )?;
            if !residual.is_zero() {
                violations.push(Violation {
                    clause: "Vir-4",
                    at: vec![("m", m), ("n", n)],
                    residual,
                });
            }
        }
    }

    for m in w.iter() {
        checked += 1;
        let residual = gamma_affine(c.gamma(), m, c.psi(0)?, c.psi(m)?, Rational::zero())?;
        if !residual.is_zero() {
            violations.push(Violation {
                clause: "Vir-5",
                at: vec![("m", m)],
                residual,
            });
        }
    }

    Ok(LawReport::windowed(
        Law::Central,
        w,
        checked,
        skipped,
        violations,
    ))
}

/// Re-derive that the `W`-part a central structure carries — the family at
/// its `γ` — satisfies the two product laws, symbolically and hence for all
/// indices. The construction fixes this; the diagnostic refuses to assume it.
pub fn check_w_part(c: &CentralStructure) -> Result<LawReport, CheckError> {
    check_anti_pre_lie_symbolic(&family_structure(c.gamma()))
}

/// Identity of one equation in the central linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowId {
    Vir3 { m: i64 },
    Vir4 { m: i64, n: i64 },
    Vir5 { m: i64 },
}

impl RowId {
    pub fn clause(&self) -> &'static str {
        match self {
            RowId::Vir3 { .. } => "Vir-3",
            RowId::Vir4 { .. } => "Vir-4",
            RowId::Vir5 { .. } => "Vir-5",
        }
    }
}

/// One equation `Σ coeffs[m]·ψ_m = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub id: RowId,
    pub coeffs: BTreeMap<i64, Rational>,
    pub rhs: Rational,
}

/// The full system at `gamma` on `w`, in a fixed documented order: the axis
/// rows (`Vir-5`, nonzero `m` ascending from the window's low end), then the
/// cocycle rows (`Vir-3`, `m` from 1), then the shifted-pair rows (`Vir-4`,
/// `(m,n)` lexicographic with `m ≠ n` and `m+n` in window).
pub fn central_system(gamma: &Rational, w: Window, include_cocycle: bool) -> Vec<Row> {
    let mut rows = Vec::new();
    for m in w.iter() {
        if m == 0 {
            continue;
        }
        let mut coeffs = BTreeMap::new();
        *coeffs.entry(0).or_insert_with(Rational::zero) += gamma + rat(m);
        *coeffs.entry(m).or_insert_with(Rational::zero) -= gamma;
        coeffs.retain(|_, c| !c.is_zero());
        rows.push(Row {
            id: RowId::Vir5 { m },
            coeffs,
            rhs: Rational::zero(),
        });
    }
    if include_cocycle {
        for m in 1..=w.radius() {
            let mut coeffs = BTreeMap::new();
            coeffs.insert(m, rat(1));
            coeffs.insert(-m, rat(-1));
            rows.push(Row {
                id: RowId::Vir3 { m },
                coeffs,
                rhs: cocycle(m),
            });
        }
    }
    for m in w.iter() {
        for n in w.iter() {
            if m == n || !w.contains(m + n) {
                continue;
            }
            let mut coeffs = BTreeMap::new();
            *coeffs.entry(n).or_insert_with(Rational::zero) += gamma + rat(m - n);
            *coeffs.entry(m).or_insert_with(Rational::zero) -= gamma + rat(n - m);
            *coeffs.entry(m + n).or_insert_with(Rational::zero) -= rat(m - n);
            coeffs.retain(|_, c| !c.is_zero());
            rows.push(Row {
                id: RowId::Vir4 { m, n },
                coeffs,
                rhs: Rational::zero(),
            });
        }
    }
    rows
}

/// An explicit rational combination of system rows summing to `0 = r` with
/// `r ≠ 0`; re-verifiable by [`verify_certificate`] without trusting the
/// elimination that found it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub rows: Vec<(RowId, Rational)>,
    pub contradiction: Rational,
}

/// Outcome of [`solve_central`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CentralOutcome {
    Feasible(CentralStructure),
    Infeasible(Certificate),
}

/// Recompute the certificate's row combination against a freshly assembled
/// system: it must cancel every unknown and leave exactly the claimed
/// nonzero constant.
pub fn verify_certificate(
    gamma: &Rational,
    w: Window,
    include_cocycle: bool,
    cert: &Certificate,
) -> bool {
    if cert.contradiction.is_zero() {
        return false;
    }
    let rows: BTreeMap<RowId, Row> = central_system(gamma, w, include_cocycle)
        .into_iter()
        .map(|r| (r.id, r))
        .collect();
    let mut combined: BTreeMap<i64, Rational> = BTreeMap::new();
    let mut rhs = Rational::zero();
    for (id, coef) in &cert.rows {
        let Some(row) = rows.get(id) else {
            return false;
        };
        for (m, c) in &row.coeffs {
            *combined.entry(*m).or_insert_with(Rational::zero) += coef * c;
        }
        rhs += coef * &row.rhs;
    }
    combined.values().all(|c| c.is_zero()) && rhs == cert.contradiction
}

/// Exact elimination of the central system: unknowns `ψ_m` are processed in
/// the order `0, 1, −1, 2, −2, …`; the pivot is the first remaining row with
/// a nonzero coefficient, and every row carries the combination of original
/// rows it currently equals, so a `0 = r` row is born holding its own
/// certificate. Feasibility assigns free unknowns zero and re-verifies the
/// solution through [`check_central`].
pub fn solve_central_with(
    gamma: &Rational,
    w: Window,
    include_cocycle: bool,
) -> Result<CentralOutcome, SolverError> {
    if w.radius() < 3 {
        return Err(SolverError::WindowTooSmall { radius: w.radius() });
    }
    let order: Vec<i64> = {
        let mut order = vec![0];
        for k in 1..=w.radius() {
            order.push(k);
            order.push(-k);
        }
        order
    };
    let position: BTreeMap<i64, usize> = order.iter().enumerate().map(|(i, &m)| (m, i)).collect();

    struct WorkRow {
        coeffs: Vec<Rational>,
        rhs: Rational,
        provenance: BTreeMap<RowId, Rational>,
    }
    let mut work: Vec<WorkRow> = central_system(gamma, w, include_cocycle)
        .into_iter()
        .map(|row| {
            let mut coeffs = vec![Rational::zero(); order.len()];
            for (m, c) in row.coeffs {
                coeffs[position[&m]] = c;
            }
            let mut provenance = BTreeMap::new();
            provenance.insert(row.id, rat(1));
            WorkRow {
                coeffs,
                rhs: row.rhs,
                provenance,
            }
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (unknown position, row index)
    let mut used = vec![false; work.len()];
    for col in 0..order.len() {
        let Some(pivot) = (0..work.len()).find(|&r| !used[r] && !work[r].coeffs[col].is_zero())
        else {
            continue;
        };
        used[pivot] = true;
        pivots.push((col, pivot));
        let pivot_coeff = work[pivot].coeffs[col].clone();
        for r in 0..work.len() {
            if r == pivot || work[r].coeffs[col].is_zero() {
                continue;
            }
            let factor = &work[r].coeffs[col] / &pivot_coeff;
            let (pivot_coeffs, pivot_rhs, pivot_prov) = (
                work[pivot].coeffs.clone(),
                work[pivot].rhs.clone(),
                work[pivot].provenance.clone(),
            );
            let row = &mut work[r];
            for c in 0..order.len() {
                let delta = &factor * &pivot_coeffs[c];
                row.coeffs[c] -= delta;
            }
            row.rhs -= &factor * pivot_rhs;
            for (id, coef) in pivot_prov {
                let entry = row
                    .provenance
                    .entry(id)
                    .or_insert_with(Rational::zero);
                *entry -= &factor * coef;
            }
            row.provenance.retain(|_, c| !c.is_zero());
        }
    }

    for row in &work {
        if row.coeffs.iter().all(|c| c.is_zero()) && !row.rhs.is_zero() {
            return Ok(CentralOutcome::Infeasible(Certificate {
                rows: row.provenance.clone().into_iter().collect(),
                contradiction: row.rhs.clone(),
            }));
        }
    }

    let mut psi: BTreeMap<i64, Rational> = order.iter().map(|&m| (m, Rational::zero())).collect();
    for (col, r) in pivots.into_iter().rev() {
        let row = &work[r];
        let mut value = row.rhs.clone();
        for c in (col + 1)..order.len() {
            value -= &row.coeffs[c] * &psi[&order[c]];
        }
        psi.insert(order[col], value / &row.coeffs[col]);
    }
    let solution = CentralStructure::new(Some(gamma.clone()), psi, w)
        .expect("solved psi is total on the window");
    Ok(CentralOutcome::Feasible(solution))
}

/// [`solve_central_with`] over the full clause set.
pub fn solve_central(gamma: &Rational, w: Window) -> Result<CentralOutcome, SolverError> {
    solve_central_with(gamma, w, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn win(n: i64) -> Window {
        Window::new(n).unwrap()
    }

    fn candidate<F: Fn(i64) -> Rational>(gamma: Option<Rational>, n: i64, f: F) -> CentralStructure {
        let psi = (-n..=n).map(|m| (m, f(m))).collect();
        CentralStructure::new(gamma, psi, win(n)).unwrap()
    }

    #[test]
    fn construction_requires_total_psi() {
        let mut psi: BTreeMap<i64, Rational> = (-2..=2).map(|m| (m, rat(0))).collect();
        psi.remove(&1);
        assert_eq!(
            CentralStructure::new(None, psi.clone(), win(2)),
            Err(CentralError::MissingPsi { m: 1 })
        );
        psi.insert(1, rat(0));
        psi.insert(5, rat(0));
        assert_eq!(
            CentralStructure::new(None, psi, win(2)),
            Err(CentralError::PsiOutOfWindow { m: 5 })
        );
    }

    #[test]
    fn cocycle_candidate_fails_only_the_shift_clause() {
        let c = candidate(Some(rat(0)), 4, |m| cocycle(m) / rat(2));
        let report = check_central(&c, win(4)).unwrap();
        assert!(!report.pass);
        assert!(report.violations.iter().all(|v| v.clause != "Vir-3"));
        assert!(report.violations.contains(&Violation {
            clause: "Vir-4",
            at: vec![("m", 1), ("n", 2)],
            residual: ratio(3, 4),
        }));
    }

    #[test]
    fn zero_psi_fails_the_cocycle_for_any_gamma() {
        for gamma in [Some(rat(1)), Some(ratio(-3, 2)), None] {
            let c = candidate(gamma, 4, |_| rat(0));
            let report = check_central(&c, win(4)).unwrap();
            assert!(!report.pass);
            assert!(report.violations.contains(&Violation {
                clause: "Vir-3",
                at: vec![("m", 2)],
                residual: ratio(-1, 2),
            }));
            assert!(report.violations.iter().all(|v| v.clause == "Vir-3"));
        }
    }

    #[test]
    fn formal_gamma_surfaces_when_it_cannot_cancel() {
        let c = candidate(None, 3, rat);
        assert_eq!(check_central(&c, win(3)), Err(CentralError::UnboundGamma));
    }

    #[test]
    fn w_part_recheck_passes() {
        for gamma in [Some(ratio(5, 2)), None] {
            let c = candidate(gamma, 3, |_| rat(0));
            assert!(check_w_part(&c).unwrap().pass);
        }
    }

    #[test]
    fn small_windows_are_rejected() {
        assert_eq!(
            solve_central(&rat(0), win(2)),
            Err(SolverError::WindowTooSmall { radius: 2 })
        );
    }

    #[test]
    fn no_gamma_admits_a_solution() {
        for gamma in [rat(0), rat(1), rat(-1), rat(2), rat(-2), ratio(-3, 2)] {
            let outcome = solve_central(&gamma, win(4)).unwrap();
            let CentralOutcome::Infeasible(cert) = outcome else {
                panic!("expected infeasibility at gamma = {gamma}");
            };
            assert!(
                verify_certificate(&gamma, win(4), true, &cert),
                "certificate fails to re-verify at gamma = {gamma}"
            );
            assert!(!cert.contradiction.is_zero());
        }
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let CentralOutcome::Infeasible(cert) = solve_central(&rat(0), win(4)).unwrap() else {
            panic!("expected infeasibility");
        };
        let mut wrong_value = cert.clone();
        wrong_value.contradiction += rat(1);
        assert!(!verify_certificate(&rat(0), win(4), true, &wrong_value));
        let mut wrong_row = cert.clone();
        wrong_row.rows[0].1 += rat(1);
        assert!(!verify_certificate(&rat(0), win(4), true, &wrong_row));
        let mut wrong_id = cert.clone();
        wrong_id.rows[0].0 = RowId::Vir4 { m: 4, n: 4 }; // not a system row
        assert!(!verify_certificate(&rat(0), win(4), true, &wrong_id));
        assert!(verify_certificate(&rat(0), win(4), true, &cert));
    }

    #[test]
    fn elimination_is_deterministic() {
        // Hand-verified combination: every ψ cancels and the right-hand
        // sides sum to 1/2, so the system at γ = 1 proves 0 = 1/2.
        let CentralOutcome::Infeasible(cert) = solve_central(&rat(1), win(4)).unwrap() else {
            panic!("expected infeasibility");
        };
        assert_eq!(cert.contradiction, ratio(1, 2));
        assert_eq!(
            cert.rows,
            vec![
                (RowId::Vir3 { m: 1 }, rat(-2)),
                (RowId::Vir3 { m: 2 }, rat(1)),
                (RowId::Vir5 { m: -2 }, rat(-1)),
                (RowId::Vir5 { m: -1 }, rat(2)),
                (RowId::Vir5 { m: 1 }, rat(-2)),
                (RowId::Vir5 { m: 2 }, rat(1)),
            ]
        );
    }

    #[test]
    fn dropping_the_cocycle_restores_feasibility_at_zero() {
        let outcome = solve_central_with(&rat(0), win(4), false).unwrap();
        let CentralOutcome::Feasible(solution) = outcome else {
            panic!("expected feasibility without the cocycle clause");
        };
        assert!(solution.psi_map().values().all(|v| v.is_zero()));
        // The full check still pins the failure on the cocycle alone.
        let report = check_central(&solution, win(4)).unwrap();
        assert!(!report.pass);
        assert!(report.violations.iter().all(|v| v.clause == "Vir-3"));
    }
}
