//! Output-side JSON: every subcommand emits exactly one document built here.
//! Rationals are canonical `p/q` strings; maps keep deterministic insertion
//! order; expressions are rendered in the wire naming (see `input`).

use serde_json::{json, Map, Value};

use gal_core::rational::{format_rational, Rational};
use gal_core::report::{LawReport, Violation};
use gal_core::solver::SolveOutcome;
use gal_core::virasoro::{CentralOutcome, Certificate, RowId};
use gal_core::weight::{Indecomposability, InfeasibleReason, IntertwinerOutcome};
use gal_core::witt::{Diagnostics, FitOutcome, GradedStructure, IsoOutcome};
use gal_core::format_canonical;

use crate::input::swap_mn;

fn rat_str(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn structure_value(s: &GradedStructure) -> Value {
    match s {
        GradedStructure::Symbolic { expr, bindings } => {
            let mut params = Map::new();
            for (name, value) in bindings {
                params.insert(name.clone(), rat_str(value));
            }
            json!({
                "kind": "symbolic",
                "expr": format_canonical(&swap_mn(expr)),
                "params": params,
            })
        }
        GradedStructure::Table { window, entries } => {
            let rows: Vec<Value> = entries
                .iter()
                .map(|(&(m, n), v)| json!({"m": m, "n": n, "value": format_rational(v)}))
                .collect();
            json!({"kind": "table", "window": window.radius(), "entries": rows})
        }
    }
}

fn violation_value(v: &Violation) -> Value {
    let mut obj = Map::new();
    obj.insert("clause".into(), v.clause.into());
    for &(name, idx) in &v.at {
        obj.insert(name.into(), idx.into());
    }
    obj.insert("residual".into(), rat_str(&v.residual));
    Value::Object(obj)
}

pub fn report_value(r: &LawReport) -> Value {
    let mut obj = Map::new();
    obj.insert("law".into(), r.law.name().into());
    obj.insert("window".into(), r.window.map_or(Value::Null, Into::into));
    obj.insert("checked".into(), r.checked.into());
    obj.insert("skipped".into(), r.skipped.into());
    obj.insert(
        "violations".into(),
        r.violations.iter().map(violation_value).collect(),
    );
    if let Some(residuals) = &r.symbolic_residuals {
        let rows: Vec<Value> = residuals
            .iter()
            .map(|sr| json!({"clause": sr.clause, "residual": format_canonical(&sr.residual)}))
            .collect();
        obj.insert("symbolic_residuals".into(), rows.into());
    }
    obj.insert("pass".into(), r.pass.into());
    Value::Object(obj)
}

pub fn fit_value(outcome: &FitOutcome) -> Value {
    match outcome {
        FitOutcome::Gamma(g) => json!({"gamma": format_rational(g)}),
        FitOutcome::Mismatch { at: (m, n), residual } => json!({
            "gamma": null,
            "mismatch": {"m": m, "n": n, "residual": format_rational(residual)},
        }),
    }
}

pub fn iso_value(outcome: &IsoOutcome) -> Value {
    match outcome {
        IsoOutcome::Yes(eps) => json!({"isomorphic": true, "epsilon": eps.sign()}),
        IsoOutcome::No => json!({"isomorphic": false}),
    }
}

pub fn indecomposability_value(outcome: &Indecomposability, window: i64) -> Value {
    match outcome {
        Indecomposability::Indecomposable => {
            json!({"indecomposable": true, "window": window})
        }
        Indecomposability::Decomposable { components } => json!({
            "indecomposable": false,
            "window": window,
            "components": components,
        }),
    }
}

fn coefficient_map(c: &std::collections::BTreeMap<i64, Rational>) -> Value {
    let mut obj = Map::new();
    for (i, v) in c {
        obj.insert(i.to_string(), rat_str(v));
    }
    Value::Object(obj)
}

pub fn intertwiner_value(outcome: &IntertwinerOutcome) -> Value {
    match outcome {
        IntertwinerOutcome::Witness { k, coefficients } => json!({
            "outcome": "witness",
            "k": k,
            "coefficients": coefficient_map(coefficients),
        }),
        IntertwinerOutcome::Parametric {
            k,
            coefficients,
            free,
        } => json!({
            "outcome": "parametric",
            "k": k,
            "coefficients": coefficient_map(coefficients),
            "free": free,
        }),
        IntertwinerOutcome::Infeasible { k, reason, partial } => {
            let mut obj = Map::new();
            obj.insert("outcome".into(), "infeasible".into());
            obj.insert("k".into(), k.map_or(Value::Null, Into::into));
            match reason {
                InfeasibleReason::NoWeightShift { weight } => {
                    obj.insert("reason".into(), "no-weight-shift".into());
                    obj.insert("weight".into(), rat_str(weight));
                }
                InfeasibleReason::WeightMismatch {
                    index,
                    source,
                    target,
                } => {
                    obj.insert("reason".into(), "weight-mismatch".into());
                    obj.insert("index".into(), (*index).into());
                    obj.insert("source".into(), rat_str(source));
                    obj.insert("target".into(), rat_str(target));
                }
                InfeasibleReason::Contradiction { at: (m, i), lhs, rhs } => {
                    obj.insert("reason".into(), "contradiction".into());
                    obj.insert("m".into(), (*m).into());
                    obj.insert("i".into(), (*i).into());
                    obj.insert("lhs".into(), rat_str(lhs));
                    obj.insert("rhs".into(), rat_str(rhs));
                }
                InfeasibleReason::ForcedZero { index, at: (m, i) } => {
                    obj.insert("reason".into(), "forced-zero".into());
                    obj.insert("index".into(), (*index).into());
                    obj.insert("m".into(), (*m).into());
                    obj.insert("i".into(), (*i).into());
                }
            }
            obj.insert("partial".into(), coefficient_map(partial));
            Value::Object(obj)
        }
    }
}

pub fn solve_value(outcome: &SolveOutcome) -> Value {
    json!({
        "solutions": outcome.solutions.iter().map(structure_value).collect::<Vec<_>>(),
        "count": outcome.solutions.len(),
        "status": outcome.status.name(),
        "search_log": {"branches": outcome.log.branches, "pruned": outcome.log.pruned},
    })
}

fn certificate_value(cert: &Certificate) -> Value {
    let rows: Vec<Value> = cert
        .rows
        .iter()
        .map(|(id, coef)| {
            let mut obj = Map::new();
            obj.insert("eq".into(), id.clause().into());
            match *id {
                RowId::Vir3 { m } | RowId::Vir5 { m } => {
                    obj.insert("m".into(), m.into());
                }
                RowId::Vir4 { m, n } => {
                    obj.insert("m".into(), m.into());
                    obj.insert("n".into(), n.into());
                }
            }
            obj.insert("coef".into(), rat_str(coef));
            Value::Object(obj)
        })
        .collect();
    json!({"rows": rows, "contradiction": format_rational(&cert.contradiction)})
}

pub fn central_outcome_value(outcome: &CentralOutcome) -> Value {
    match outcome {
        CentralOutcome::Feasible(solution) => json!({
            "feasible": true,
            "psi": coefficient_map(solution.psi_map()),
        }),
        CentralOutcome::Infeasible(cert) => json!({
            "feasible": false,
            "certificate": certificate_value(cert),
        }),
    }
}

pub fn diagnostics_value(d: &Diagnostics, window: i64) -> Value {
    let mut specializations = Map::new();
    for (name, list) in &d.specializations {
        specializations.insert(
            (*name).into(),
            list.iter().map(violation_value).collect(),
        );
    }
    json!({
        "window": window,
        "specializations": specializations,
        "gamma1": d.gamma1,
        "gamma2": d.gamma2,
    })
}
