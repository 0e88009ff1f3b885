//! Ansatz elimination: write `φ(m,n) = Σ_{a+b≤D} c_ab·mᵃnᵇ`, impose the two
//! laws as polynomial identities in the grading indices, and solve the
//! resulting coefficient system exactly, branching on factored alternatives.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::expr::format_canonical;
use crate::poly::MultiPoly;
use crate::rational::Rational;
use crate::report::Window;
use crate::solver::{
    rational_roots, AnsatzProblem, SearchLog, SolveOutcome, SolveStatus, SolverError,
};
use crate::witt::{
    anti_pre_lie_poly, check_anti_pre_lie, check_anti_pre_lie_symbolic, commutator_poly,
    GradedStructure,
};

fn coeff_name(a: u32, b: u32) -> String {
    format!("c{a}{b}")
}

/// The coefficients of a polynomial identity in `index_vars`, each of which
/// must vanish.
fn identity_equations(p: &MultiPoly, index_vars: &[&str]) -> Vec<MultiPoly> {
    p.partition_by(index_vars)
        .into_values()
        .filter(|q| !q.is_zero())
        .collect()
}

/// One elimination state: solved coefficients (right-hand sides free of every
/// solved variable) and the remaining normalized equations.
#[derive(Clone)]
struct Branch {
    assignments: BTreeMap<String, MultiPoly>,
    equations: Vec<MultiPoly>,
}

/// Scale each equation monic by its leading coefficient, drop zeros,
/// deduplicate, and sort; `None` when some equation is a nonzero constant.
fn normalize(eqs: Vec<MultiPoly>) -> Option<Vec<MultiPoly>> {
    let mut seen: BTreeMap<String, MultiPoly> = BTreeMap::new();
    for eq in eqs {
        if eq.is_zero() {
            continue;
        }
        if eq.constant_value().is_some() {
            return None;
        }
        let lead = eq.terms().last().map(|(_, c)| c.clone()).unwrap();
        let monic = eq.scale(&(Rational::one() / lead));
        seen.insert(format_canonical(&monic), monic);
    }
    Some(seen.into_values().collect())
}

impl Branch {
    /// Record `var := value` and substitute it everywhere. Returns `false`
    /// when the substitution exposes a contradiction.
    fn assign(&mut self, var: &str, value: MultiPoly) -> bool {
        let mut subs = BTreeMap::new();
        subs.insert(var.to_string(), value.clone());
        for rhs in self.assignments.values_mut() {
            *rhs = rhs.compose(&subs);
        }
        self.assignments.insert(var.to_string(), value);
        let eqs = self.equations.iter().map(|e| e.compose(&subs)).collect();
        match normalize(eqs) {
            Some(eqs) => {
                self.equations = eqs;
                true
            }
            None => false,
        }
    }
}

enum Step {
    Solved,
    Assign(String, MultiPoly),
    BranchOn(Vec<(String, Rational)>),
    Dead,
    Stuck,
}

/// `[constant, linear]` coefficients of an affine polynomial in one variable.
fn affine_parts(p: Option<&MultiPoly>, var: &str) -> (Rational, Rational) {
    let mut out = (Rational::zero(), Rational::zero());
    if let Some(cs) = p.and_then(|p| p.univariate_coeffs(var)) {
        if let Some(c) = cs.first() {
            out.0 = c.clone();
        }
        if let Some(c) = cs.get(1) {
            out.1 = c.clone();
        }
    }
    out
}

/// Pick the next elimination move, deterministically: exhaust pivots that are
/// linear with a constant coefficient, then take the first equation offering
/// a finite set of alternatives (rational quadratic roots, a vanishing
/// monomial, or an affine-times-affine factorization).
fn next_step(eqs: &[MultiPoly]) -> Step {
    if eqs.is_empty() {
        return Step::Solved;
    }
    for eq in eqs {
        for v in eq.vars() {
            if eq.degree_in(&v) != 1 {
                continue;
            }
            let parts = eq.decompose_in(&v);
            if let Some(a) = parts[&1].constant_value() {
                let b = parts.get(&0).cloned().unwrap_or_else(MultiPoly::zero);
                return Step::Assign(v, b.scale(&(-(Rational::one() / a))));
            }
        }
    }
    for eq in eqs {
        let vars: Vec<String> = eq.vars().into_iter().collect();
        if vars.len() == 1 && eq.degree_in(&vars[0]) == 2 {
            let cs = eq.univariate_coeffs(&vars[0]).unwrap();
            return match rational_roots(&cs[2], &cs[1], &cs[0]) {
                Some(roots) => {
                    Step::BranchOn(roots.into_iter().map(|r| (vars[0].clone(), r)).collect())
                }
                None => Step::Dead,
            };
        }
        if eq.num_terms() == 1 {
            let (mono, _) = eq.terms().next().unwrap();
            return Step::BranchOn(
                mono.factors()
                    .iter()
                    .map(|(v, _)| (v.clone(), Rational::zero()))
                    .collect(),
            );
        }
        if vars.len() == 2 && eq.degree_in(&vars[0]) == 1 && eq.degree_in(&vars[1]) == 1 {
            // α·uv + β·u + γ·v + δ factors as (α·u+γ)(α·v+β)/α iff αδ = βγ.
            let (u, v) = (&vars[0], &vars[1]);
            let du = eq.decompose_in(u);
            let (beta, alpha) = affine_parts(du.get(&1), v);
            let (delta, gamma) = affine_parts(du.get(&0), v);
            if !alpha.is_zero() && &alpha * &delta == &beta * &gamma {
                return Step::BranchOn(vec![
                    (u.clone(), -(&gamma / &alpha)),
                    (v.clone(), -(&beta / &alpha)),
                ]);
            }
        }
    }
    Step::Stuck
}

/// Solve the coefficient system for a degree-`D` polynomial ansatz,
/// optionally pinning `φ(0,0)`. The commutator identity is imposed first
/// (it is linear and never branches); the triple-product identity then
/// yields a quadratic system explored by depth-first branching under
/// `budget`. Every emitted solution is re-verified through the law checkers
/// before it is reported.
pub fn solve_ansatz(problem: &AnsatzProblem, budget: u64) -> Result<SolveOutcome, SolverError> {
    let d = problem.max_total_degree;
    if d < 1 {
        return Err(SolverError::DegreeTooSmall);
    }
    let mut template = MultiPoly::zero();
    for a in 0..=d {
        for b in 0..=(d - a) {
            template = template
                + MultiPoly::var(&coeff_name(a, b))
                    * (MultiPoly::var("m").pow(a) * MultiPoly::var("n").pow(b));
        }
    }

    let mut log = SearchLog {
        branches: 1,
        pruned: 0,
    };
    let empty = |status, log| {
        Ok(SolveOutcome {
            solutions: Vec::new(),
            status,
            log,
        })
    };

    let mut root = Branch {
        assignments: BTreeMap::new(),
        equations: match normalize(identity_equations(&commutator_poly(&template), &["m", "n"])) {
            Some(eqs) => eqs,
            None => return empty(SolveStatus::Complete, log),
        },
    };
    loop {
        match next_step(&root.equations) {
            Step::Solved => break,
            Step::Assign(v, p) => {
                if !root.assign(&v, p) {
                    return empty(SolveStatus::Complete, log);
                }
            }
            // The commutator system is linear with unit coefficients.
            _ => return empty(SolveStatus::Stalled, log),
        }
    }

    let constrained = template.compose(&root.assignments);
    root.equations =
        match normalize(identity_equations(&anti_pre_lie_poly(&constrained), &["m", "n", "l"])) {
            Some(eqs) => eqs,
            None => return empty(SolveStatus::Complete, log),
        };
    if let Some(pin) = &problem.pinned {
        if !root.assign("c00", MultiPoly::constant(pin.clone())) {
            return empty(SolveStatus::Complete, log);
        }
    }

    let mut stack = vec![root];
    let mut found: BTreeMap<String, GradedStructure> = BTreeMap::new();
    let (mut budget_hit, mut stalled) = (false, false);
    'search: while let Some(mut branch) = stack.pop() {
        loop {
            match next_step(&branch.equations) {
                Step::Solved => {
                    let phi = template.compose(&branch.assignments);
                    let key = format_canonical(&phi);
                    if !found.contains_key(&key) {
                        let s = GradedStructure::symbolic(phi, BTreeMap::new())
                            .expect("ansatz solutions use only index and coefficient variables");
                        if verified(&s) {
                            found.insert(key, s);
                        } else {
                            log.pruned += 1;
                        }
                    }
                    break;
                }
                Step::Assign(v, p) => {
                    if !branch.assign(&v, p) {
                        log.pruned += 1;
                        break;
                    }
                }
                Step::BranchOn(alternatives) => {
                    if log.branches + alternatives.len() as u64 > budget {
                        budget_hit = true;
                        break 'search;
                    }
                    for (v, value) in alternatives {
                        log.branches += 1;
                        let mut child = branch.clone();
                        if child.assign(&v, MultiPoly::constant(value)) {
                            stack.push(child);
                        } else {
                            log.pruned += 1;
                        }
                    }
                    break;
                }
                Step::Dead => {
                    log.pruned += 1;
                    break;
                }
                Step::Stuck => {
                    stalled = true;
                    break;
                }
            }
        }
    }

    let status = if budget_hit {
        SolveStatus::BudgetExceeded
    } else if stalled {
        SolveStatus::Stalled
    } else {
        SolveStatus::Complete
    };
    // Product-zero alternatives overlap, so a fully bound solution can also
    // surface as a specialization of a parametric one; report only the
    // maximal families.
    let all: Vec<GradedStructure> = found.into_values().collect();
    let solutions = all
        .iter()
        .filter(|s| {
            let GradedStructure::Symbolic { expr, .. } = s else {
                return true;
            };
            !(s.free_params().is_empty()
                && all.iter().any(|other| {
                    let GradedStructure::Symbolic { expr: general, .. } = other else {
                        return false;
                    };
                    !other.free_params().is_empty() && is_instance_of(expr, general)
                }))
        })
        .cloned()
        .collect();
    Ok(SolveOutcome {
        solutions,
        status,
        log,
    })
}

/// Whether binding the free coefficients of `general` can reproduce
/// `concrete` identically in the grading indices. The matching system is
/// affine with constant coefficients, so pivoting alone decides it.
fn is_instance_of(concrete: &MultiPoly, general: &MultiPoly) -> bool {
    let Some(equations) = normalize(identity_equations(&(general - concrete), &["m", "n"]))
    else {
        return false;
    };
    let mut state = Branch {
        assignments: BTreeMap::new(),
        equations,
    };
    loop {
        match next_step(&state.equations) {
            Step::Solved => return true,
            Step::Assign(v, p) => {
                if !state.assign(&v, p) {
                    return false;
                }
            }
            _ => return false,
        }
    }
}

/// Independent acceptance of a candidate: the triple law must hold
/// symbolically, and — when no free parameter remains — on a window as well.
fn verified(s: &GradedStructure) -> bool {
    let Ok(symbolic) = check_anti_pre_lie_symbolic(s) else {
        return false;
    };
    if !symbolic.pass {
        return false;
    }
    if s.free_params().is_empty() {
        let w = Window::new(4).unwrap();
        return check_anti_pre_lie(s, w).map(|r| r.pass).unwrap_or(false);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};
    use crate::witt::{family_structure, phi_eval};

    fn solve(d: u32, pin: Option<Rational>) -> SolveOutcome {
        solve_ansatz(
            &AnsatzProblem {
                max_total_degree: d,
                pinned: pin,
            },
            crate::solver::DEFAULT_BUDGET,
        )
        .unwrap()
    }

    fn agrees_with_family(s: &GradedStructure, gamma: i64) {
        let family = family_structure(Some(&rat(gamma)));
        for a in -4..=4 {
            for b in -4..=4 {
                assert_eq!(
                    phi_eval(s, a, b).unwrap(),
                    phi_eval(&family, a, b).unwrap(),
                    "disagrees at ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn degree_zero_is_rejected() {
        assert_eq!(
            solve_ansatz(
                &AnsatzProblem {
                    max_total_degree: 0,
                    pinned: None
                },
                10
            ),
            Err(SolverError::DegreeTooSmall)
        );
    }

    #[test]
    fn degree_one_pinned_recovers_one_structure() {
        let outcome = solve(1, Some(rat(-1)));
        assert_eq!(outcome.status, SolveStatus::Complete);
        assert_eq!(outcome.solutions.len(), 1);
        agrees_with_family(&outcome.solutions[0], 1);
    }

    #[test]
    fn degree_two_pinned_forces_degree_back_down() {
        let outcome = solve(2, Some(rat(0)));
        assert_eq!(outcome.status, SolveStatus::Complete);
        assert_eq!(outcome.solutions.len(), 1);
        agrees_with_family(&outcome.solutions[0], 0);
    }

    #[test]
    fn unpinned_search_returns_the_parametric_family() {
        let outcome = solve(1, None);
        assert_eq!(outcome.status, SolveStatus::Complete);
        assert_eq!(outcome.solutions.len(), 1);
        let s = &outcome.solutions[0];
        assert_eq!(
            s.free_params().into_iter().collect::<Vec<_>>(),
            vec!["c00".to_string()]
        );
        let GradedStructure::Symbolic { expr, .. } = s else {
            panic!("expected symbolic solution");
        };
        assert_eq!(format_canonical(expr), "c00 - 2*m - n");
    }

    #[test]
    fn fractional_pins_work() {
        let outcome = solve(2, Some(ratio(1, 2)));
        assert_eq!(outcome.status, SolveStatus::Complete);
        assert_eq!(outcome.solutions.len(), 1);
        let family = family_structure(Some(&ratio(-1, 2)));
        for a in -3..=3 {
            for b in -3..=3 {
                assert_eq!(
                    phi_eval(&outcome.solutions[0], a, b).unwrap(),
                    phi_eval(&family, a, b).unwrap()
                );
            }
        }
    }

    #[test]
    fn quadratic_root_extraction() {
        assert_eq!(
            rational_roots(&rat(1), &rat(-5), &rat(6)),
            Some(vec![rat(3), rat(2)])
        );
        assert_eq!(rational_roots(&rat(1), &rat(0), &rat(-2)), None);
        assert_eq!(rational_roots(&rat(1), &rat(0), &rat(2)), None);
        assert_eq!(
            rational_roots(&rat(1), &rat(-2), &rat(1)),
            Some(vec![rat(1)])
        );
        assert_eq!(
            rational_roots(&rat(4), &rat(0), &rat(-1)),
            Some(vec![ratio(1, 2), ratio(-1, 2)])
        );
    }
}
