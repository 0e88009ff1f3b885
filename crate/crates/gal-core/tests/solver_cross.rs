//! The two solvers never call each other, so their agreement on a shared
//! grid of pins is a genuine cross-check of both.

use gal_core::rational::{rat, ratio, Rational};
use gal_core::report::Window;
use gal_core::solver::{solve_ansatz, solve_table, AnsatzProblem, DEFAULT_BUDGET};
use gal_core::witt::{check_anti_pre_lie, family_structure, phi_eval};

fn pins() -> Vec<Rational> {
    vec![rat(0), rat(-1), rat(3), ratio(1, 2), ratio(-5, 2)]
}

#[test]
fn solvers_agree_on_every_pin() {
    let w = Window::new(4).unwrap();
    for pin in pins() {
        let ansatz = solve_ansatz(
            &AnsatzProblem {
                max_total_degree: 2,
                pinned: Some(pin.clone()),
            },
            DEFAULT_BUDGET,
        )
        .unwrap();
        let table = solve_table(w, &pin, DEFAULT_BUDGET).unwrap();
        assert_eq!(ansatz.solutions.len(), 1, "pin {pin}");
        assert_eq!(table.solutions.len(), 1, "pin {pin}");
        let family = family_structure(Some(&(-&pin)));
        for a in -4..=4 {
            for b in -4..=4 {
                let expected = phi_eval(&family, a, b).unwrap();
                assert_eq!(
                    phi_eval(&ansatz.solutions[0], a, b).unwrap(),
                    expected,
                    "ansatz, pin {pin} at ({a}, {b})"
                );
                assert_eq!(
                    phi_eval(&table.solutions[0], a, b).unwrap(),
                    expected,
                    "table, pin {pin} at ({a}, {b})"
                );
            }
        }
    }
}

#[test]
fn every_solution_passes_the_independent_checker() {
    let w = Window::new(4).unwrap();
    for pin in pins() {
        for s in solve_table(w, &pin, DEFAULT_BUDGET).unwrap().solutions {
            assert!(check_anti_pre_lie(&s, w).unwrap().pass);
        }
        let outcome = solve_ansatz(
            &AnsatzProblem {
                max_total_degree: 2,
                pinned: Some(pin.clone()),
            },
            DEFAULT_BUDGET,
        )
        .unwrap();
        for s in outcome.solutions {
            assert!(check_anti_pre_lie(&s, w).unwrap().pass);
        }
    }
}

#[test]
fn raising_the_ansatz_degree_adds_nothing() {
    for d in [1, 2, 3] {
        let outcome = solve_ansatz(
            &AnsatzProblem {
                max_total_degree: d,
                pinned: None,
            },
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(outcome.solutions.len(), 1, "degree {d}");
        assert_eq!(
            outcome.solutions[0]
                .free_params()
                .into_iter()
                .collect::<Vec<_>>(),
            vec!["c00".to_string()],
            "degree {d}"
        );
    }
}

#[test]
fn uniqueness_already_holds_at_the_smallest_accepted_window() {
    for pin in [rat(-1), ratio(1, 2)] {
        let outcome = solve_table(Window::new(3).unwrap(), &pin, DEFAULT_BUDGET).unwrap();
        assert_eq!(outcome.solutions.len(), 1, "pin {pin}");
    }
}
