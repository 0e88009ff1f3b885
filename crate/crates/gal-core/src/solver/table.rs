//! Windowed table propagation: treat every cell `φ(m,n)` on an enlarged
//! internal grid as an unknown, seed `φ(0,0)`, and propagate instances of the
//! two laws to a fixpoint, branching on product-zero alternatives. The
//! internal grid is twice the requested radius so the corner cells of the
//! returned window stay constrained.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::rational::{rat, Rational};
use crate::report::Window;
use crate::solver::{rational_roots, SearchLog, SolveOutcome, SolveStatus, SolverError};
use crate::witt::{check_anti_pre_lie, GradedStructure};

const INTERNAL_FACTOR: i64 = 2;

/// One propagation instance of the triple law at `(m,n,l)`:
/// `(n−m)·φ(m+n,l) − φ(m,l)·φ(n,m+l) + φ(n,l)·φ(m,n+l) = 0`.
/// `cells[0]` is the linear cell; `cells[1]·cells[2]` and `cells[3]·cells[4]`
/// are the two products.
struct Instance {
    factor: Rational,
    cells: [(i64, i64); 5],
}

/// Instances whose five cells all fit the internal grid, ordered by distance
/// from the origin so the small-index dichotomies branch first.
fn instances(internal: i64) -> Vec<Instance> {
    let range = -internal..=internal;
    let mut keys: Vec<(i64, i64, i64, i64)> = Vec::new();
    for m in range.clone() {
        for n in range.clone() {
            if m == n || (m + n).abs() > internal {
                continue;
            }
            for l in range.clone() {
                if (m + l).abs() > internal || (n + l).abs() > internal {
                    continue;
                }
                keys.push((m.abs() + n.abs() + l.abs(), m, n, l));
            }
        }
    }
    keys.sort();
    keys.into_iter()
        .map(|(_, m, n, l)| Instance {
            factor: rat(n - m),
            cells: [(m + n, l), (m, l), (n, m + l), (n, l), (m, n + l)],
        })
        .collect()
}

/// Canonical representative of a cell under the commutator mirror:
/// `φ(a,b) = φ(b,a) + b − a`, keyed by the lexicographically smaller cell.
fn canonical(cell: (i64, i64)) -> ((i64, i64), Rational) {
    let mirror = (cell.1, cell.0);
    if mirror < cell {
        (mirror, rat(cell.1 - cell.0))
    } else {
        (cell, Rational::zero())
    }
}

#[derive(Clone)]
struct State {
    values: BTreeMap<(i64, i64), Rational>,
}

enum SetOutcome {
    Fresh,
    Consistent,
    Conflict,
}

impl State {
    /// Record a cell value together with its commutator mirror, so a cell is
    /// known exactly when its canonical representative is.
    fn set(&mut self, cell: (i64, i64), value: Rational, internal: i64) -> SetOutcome {
        match self.values.get(&cell) {
            Some(v) if *v == value => return SetOutcome::Consistent,
            Some(_) => return SetOutcome::Conflict,
            None => {}
        }
        let mirror_value = &value + rat(cell.0 - cell.1);
        self.values.insert(cell, value);
        let mirror = (cell.1, cell.0);
        if mirror != cell && mirror.0.abs() <= internal && mirror.1.abs() <= internal {
            match self.values.get(&mirror) {
                Some(v) if *v != mirror_value => return SetOutcome::Conflict,
                Some(_) => {}
                None => {
                    self.values.insert(mirror, mirror_value);
                }
            }
        }
        SetOutcome::Fresh
    }
}

/// What one look at an instance concluded.
enum Finding {
    Satisfied,
    Violated,
    Determine((i64, i64), Rational),
    /// Finitely many alternatives: quadratic roots or the two zeros of an
    /// affine-times-affine factorization.
    Branch(Vec<((i64, i64), Rational)>),
    Defer,
}

/// Evaluate an instance against the current assignment, expanding it as an
/// exact quadratic form over the canonical unknown cells it touches.
fn inspect(inst: &Instance, state: &State) -> Finding {
    enum Term {
        Known(Rational),
        Unknown((i64, i64), Rational),
    }
    let term = |cell: (i64, i64)| -> Term {
        match state.values.get(&cell) {
            Some(v) => Term::Known(v.clone()),
            None => {
                let (key, shift) = canonical(cell);
                Term::Unknown(key, shift)
            }
        }
    };

    let mut constant = Rational::zero();
    let mut linear: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
    let mut square: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
    let mut cross: BTreeMap<((i64, i64), (i64, i64)), Rational> = BTreeMap::new();

    match term(inst.cells[0]) {
        Term::Known(v) => constant += &inst.factor * v,
        Term::Unknown(k, s) => {
            constant += &inst.factor * s;
            *linear.entry(k).or_insert_with(Rational::zero) += &inst.factor;
        }
    }
    {
        let mut add_product = |sign: i64, x: (i64, i64), y: (i64, i64)| {
            let s = rat(sign);
            match (term(x), term(y)) {
                (Term::Known(a), Term::Known(b)) => constant += &s * a * b,
                (Term::Known(a), Term::Unknown(k, sh)) | (Term::Unknown(k, sh), Term::Known(a)) => {
                    constant += &s * &a * sh;
                    *linear.entry(k).or_insert_with(Rational::zero) += &s * a;
                }
                (Term::Unknown(k1, s1), Term::Unknown(k2, s2)) => {
                    if k1 == k2 {
                        *square.entry(k1).or_insert_with(Rational::zero) += &s;
                        *linear.entry(k1).or_insert_with(Rational::zero) += &s * (&s1 + &s2);
                    } else {
                        let key = if k1 < k2 { (k1, k2) } else { (k2, k1) };
                        *cross.entry(key).or_insert_with(Rational::zero) += &s;
                        *linear.entry(k1).or_insert_with(Rational::zero) += &s * &s2;
                        *linear.entry(k2).or_insert_with(Rational::zero) += &s * &s1;
                    }
                    constant += &s * s1 * s2;
                }
            }
        };
        add_product(-1, inst.cells[1], inst.cells[2]);
        add_product(1, inst.cells[3], inst.cells[4]);
    }
    linear.retain(|_, c| !c.is_zero());
    square.retain(|_, c| !c.is_zero());
    cross.retain(|_, c| !c.is_zero());

    let mut unknowns: BTreeSet<(i64, i64)> = linear.keys().chain(square.keys()).copied().collect();
    for (u, v) in cross.keys() {
        unknowns.insert(*u);
        unknowns.insert(*v);
    }

    let mut keys = unknowns.into_iter();
    match (keys.next(), keys.next(), keys.next()) {
        (None, _, _) => {
            if constant.is_zero() {
                Finding::Satisfied
            } else {
                Finding::Violated
            }
        }
        (Some(u), None, _) => {
            let b = linear.remove(&u).unwrap_or_else(Rational::zero);
            match square.remove(&u) {
                None => Finding::Determine(u, -(constant / b)),
                Some(a) => match rational_roots(&a, &b, &constant) {
                    None => Finding::Violated,
                    Some(mut roots) => {
                        if roots.len() == 1 {
                            Finding::Determine(u, roots.pop().unwrap())
                        } else {
                            Finding::Branch(roots.into_iter().map(|r| (u, r)).collect())
                        }
                    }
                },
            }
        }
        (Some(u), Some(v), None) => {
            // α·uv + β·u + γ·v + δ factors into affine pieces iff αδ = βγ.
            if !square.is_empty() {
                return Finding::Defer;
            }
            let alpha = cross.remove(&(u, v)).unwrap_or_else(Rational::zero);
            if alpha.is_zero() {
                return Finding::Defer;
            }
            let beta = linear.remove(&u).unwrap_or_else(Rational::zero);
            let gamma = linear.remove(&v).unwrap_or_else(Rational::zero);
            if &alpha * &constant == &beta * &gamma {
                Finding::Branch(vec![(u, -(&gamma / &alpha)), (v, -(&beta / &alpha))])
            } else {
                Finding::Defer
            }
        }
        _ => Finding::Defer,
    }
}

enum Fixpoint {
    Dead,
    Settled,
}

/// Drive one branch to a fixpoint, applying every forced determination until
/// nothing changes.
fn propagate(state: &mut State, instances: &[Instance], internal: i64) -> Fixpoint {
    loop {
        let mut progressed = false;
        for inst in instances {
            match inspect(inst, state) {
                Finding::Satisfied | Finding::Defer | Finding::Branch(_) => {}
                Finding::Violated => return Fixpoint::Dead,
                Finding::Determine(cell, value) => match state.set(cell, value, internal) {
                    SetOutcome::Fresh => progressed = true,
                    SetOutcome::Consistent => {}
                    SetOutcome::Conflict => return Fixpoint::Dead,
                },
            }
        }
        if !progressed {
            return Fixpoint::Settled;
        }
    }
}

fn window_complete(state: &State, w: Window) -> bool {
    w.iter()
        .all(|m| w.iter().all(|n| state.values.contains_key(&(m, n))))
}

/// Recover every consistent table on `w` with `φ(0,0) = phi00`, exploring
/// product-zero dichotomies and quadratic roots depth-first under `budget`.
/// Each completed table is restricted to `w`, re-verified by the independent
/// law checker, and deduplicated; the search is exhaustive when the status is
/// `Complete`.
pub fn solve_table(w: Window, phi00: &Rational, budget: u64) -> Result<SolveOutcome, SolverError> {
    if w.radius() < 3 {
        return Err(SolverError::WindowTooSmall { radius: w.radius() });
    }
    let internal = INTERNAL_FACTOR * w.radius();
    let insts = instances(internal);

    let mut log = SearchLog {
        branches: 1,
        pruned: 0,
    };
    let mut root = State {
        values: BTreeMap::new(),
    };
    root.set((0, 0), phi00.clone(), internal);

    let mut stack = vec![root];
    let mut tables: Vec<BTreeMap<(i64, i64), Rational>> = Vec::new();
    let (mut budget_hit, mut stalled) = (false, false);
    'search: while let Some(mut state) = stack.pop() {
        if let Fixpoint::Dead = propagate(&mut state, &insts, internal) {
            log.pruned += 1;
            continue;
        }
        if window_complete(&state, w) {
            let mut entries = BTreeMap::new();
            for m in w.iter() {
                for n in w.iter() {
                    entries.insert((m, n), state.values[&(m, n)].clone());
                }
            }
            if !tables.contains(&entries) {
                tables.push(entries);
            }
            continue;
        }
        // Branch on the first instance offering finitely many alternatives.
        for inst in &insts {
            if let Finding::Branch(alternatives) = inspect(inst, &state) {
                if log.branches + alternatives.len() as u64 > budget {
                    budget_hit = true;
                    break 'search;
                }
                for (cell, value) in alternatives {
                    log.branches += 1;
                    let mut child = state.clone();
                    match child.set(cell, value, internal) {
                        SetOutcome::Conflict => log.pruned += 1,
                        _ => stack.push(child),
                    }
                }
                continue 'search;
            }
        }
        stalled = true;
    }

    tables.sort();
    let mut solutions = Vec::new();
    for entries in tables {
        let s = GradedStructure::table(w, entries)
            .expect("restricted tables are total on the window");
        if check_anti_pre_lie(&s, w).map(|r| r.pass).unwrap_or(false) {
            solutions.push(s);
        } else {
            log.pruned += 1;
        }
    }
    let status = if budget_hit {
        SolveStatus::BudgetExceeded
    } else if stalled {
        SolveStatus::Stalled
    } else {
        SolveStatus::Complete
    };
    Ok(SolveOutcome {
        solutions,
        status,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::solver::DEFAULT_BUDGET;
    use crate::witt::{family_structure, materialize, phi_eval};

    fn win(n: i64) -> Window {
        Window::new(n).unwrap()
    }

    #[test]
    fn small_windows_are_rejected() {
        assert_eq!(
            solve_table(win(2), &rat(0), 10),
            Err(SolverError::WindowTooSmall { radius: 2 })
        );
    }

    #[test]
    fn pins_recover_exactly_the_family_member() {
        for (n, pin, gamma) in [
            (4, rat(-3), rat(3)),
            (4, rat(0), rat(0)),
            (3, ratio(1, 2), ratio(-1, 2)),
        ] {
            let outcome = solve_table(win(n), &pin, DEFAULT_BUDGET).unwrap();
            assert_eq!(outcome.status, SolveStatus::Complete, "pin {pin}");
            assert_eq!(outcome.solutions.len(), 1, "pin {pin}");
            let family = materialize(&family_structure(Some(&gamma)), win(n)).unwrap();
            for a in -n..=n {
                for b in -n..=n {
                    assert_eq!(
                        phi_eval(&outcome.solutions[0], a, b).unwrap(),
                        phi_eval(&family, a, b).unwrap(),
                        "pin {pin} at ({a}, {b})"
                    );
                }
            }
        }
    }

    #[test]
    fn tiny_budgets_are_reported() {
        let outcome = solve_table(win(3), &rat(0), 2).unwrap();
        assert_eq!(outcome.status, SolveStatus::BudgetExceeded);
    }
}
