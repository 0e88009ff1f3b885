//! Weight modules over the graded algebra: the three classified families,
//! modules read off a structure function, the module axiom, window-relative
//! indecomposability, and grading-aligned intertwiner search.
//!
//! A module assigns to each pair `(m, i)` the coefficient `a(m, i)` of
//! `W_m · v_i = a(m,i) · v_{m+i}`; the weight of `v_i` is `a(0, i)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::rational::{rat, Rational};
use crate::report::{Law, LawReport, Violation, Window};
use crate::witt::{phi_eval, CheckError, GradedStructure};

/// Recipe for a module's action coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleSource {
    /// `a(m,i) = m+i` for `i ≠ 0`; `a(m,0) = m(α+m)`.
    Valpha { alpha: Rational },
    /// `a(m,i) = i` for `m+i ≠ 0`; `a(m,−m) = −m(β+m)`.
    Vbeta { beta: Rational },
    /// `a(m,i) = α + i + mβ`.
    ValphaBeta { alpha: Rational, beta: Rational },
    /// `a(m,i) = −φ(m,i)` on the basis `u_i := W_i`.
    FromStructure(GradedStructure),
    /// Explicit coefficients, total on the window. Exempt from the
    /// distinct-weight guarantee the named sources carry, so it can encode
    /// counterexamples.
    Tabulated {
        entries: BTreeMap<(i64, i64), Rational>,
    },
}

/// Constructor-time rejection of a module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleError {
    /// Two basis vectors got the same weight.
    WeightCollision { i: i64, j: i64 },
    /// The backing structure could not be evaluated.
    Structure(CheckError),
    /// A tabulated source lacks an in-window coefficient.
    MissingEntry { m: i64, i: i64 },
    /// A tabulated source carries a coefficient outside the window.
    EntryOutOfWindow { m: i64, i: i64 },
}

impl fmt::Display for ModuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleError::WeightCollision { i, j } => {
                write!(f, "weights of indices {i} and {j} coincide")
            }
            ModuleError::Structure(e) => write!(f, "backing structure: {e}"),
            ModuleError::MissingEntry { m, i } => {
                write!(f, "module table is missing the in-window entry ({m}, {i})")
            }
            ModuleError::EntryOutOfWindow { m, i } => {
                write!(f, "module table entry ({m}, {i}) lies outside the window")
            }
        }
    }
}

/// A weight module with all in-window coefficients tabulated up front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightModule {
    window: Window,
    actions: Vec<Rational>,
}

impl WeightModule {
    /// Build a module on `w`, evaluating every coefficient once. Named
    /// sources also get their pairwise-distinct-weight invariant checked
    /// here, so downstream intertwiner search can rely on it.
    pub fn build(source: &ModuleSource, w: Window) -> Result<WeightModule, ModuleError> {
        let side = (2 * w.radius() + 1) as usize;
        let mut actions = Vec::with_capacity(side * side);
        for m in w.iter() {
            for i in w.iter() {
                actions.push(coefficient(source, m, i, w)?);
            }
        }
        let module = WeightModule {
            window: w,
            actions,
        };
        if !matches!(source, ModuleSource::Tabulated { .. }) {
            for i in w.iter() {
                for j in (i + 1)..=w.radius() {
                    if module.weight(i).unwrap() == module.weight(j).unwrap() {
                        return Err(ModuleError::WeightCollision { i, j });
                    }
                }
            }
        }
        Ok(module)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// The coefficient of `W_m · v_i`.
    pub fn action(&self, m: i64, i: i64) -> Result<&Rational, CheckError> {
        if !self.window.contains(m) || !self.window.contains(i) {
            return Err(CheckError::OutOfWindow { m, n: i });
        }
        let side = (2 * self.window.radius() + 1) as usize;
        let r = self.window.radius();
        Ok(&self.actions[(m + r) as usize * side + (i + r) as usize])
    }

    /// The weight of basis vector `i`, i.e. `a(0, i)`.
    pub fn weight(&self, i: i64) -> Result<&Rational, CheckError> {
        self.action(0, i)
    }
}

fn coefficient(
    source: &ModuleSource,
    m: i64,
    i: i64,
    w: Window,
) -> Result<Rational, ModuleError> {
    Ok(match source {
        ModuleSource::Valpha { alpha } => {
            if i != 0 {
                rat(m + i)
            } else {
                rat(m) * (alpha + rat(m))
            }
        }
        ModuleSource::Vbeta { beta } => {
            if m + i != 0 {
                rat(i)
            } else {
                -(rat(m) * (beta + rat(m)))
            }
        }
        ModuleSource::ValphaBeta { alpha, beta } => alpha + rat(i) + rat(m) * beta,
        ModuleSource::FromStructure(s) => {
            -phi_eval(s, m, i).map_err(ModuleError::Structure)?
        }
        ModuleSource::Tabulated { entries } => {
            for &(em, ei) in entries.keys() {
                if !w.contains(em) || !w.contains(ei) {
                    return Err(ModuleError::EntryOutOfWindow { m: em, i: ei });
                }
            }
            entries
                .get(&(m, i))
                .cloned()
                .ok_or(ModuleError::MissingEntry { m, i })?
        }
    })
}

/// The bracket relation on coefficients:
/// `a(n,i)·a(m,n+i) − a(m,i)·a(n,m+i) = (n−m)·a(m+n,i)`
/// on every in-window triple.
pub fn check_module_axiom(module: &WeightModule, w: Window) -> Result<LawReport, CheckError> {
    let (mut checked, mut skipped) = (0, 0);
    let mut violations = Vec::new();
    for m in w.iter() {
        for n in w.iter() {
            for i in w.iter() {
                if ![m + n, m + i, n + i, m + n + i]
                    .into_iter()
                    .all(|k| w.contains(k))
                {
                    skipped += 1;
                    continue;
                }
                checked += 1;
                let residual = module.action(n, i)? * module.action(m, n + i)?
                    - module.action(m, i)? * module.action(n, m + i)?
                    - rat(n - m) * module.action(m + n, i)?;
                if !residual.is_zero() {
                    violations.push(Violation {
                        clause: "module-axiom",
                        at: vec![("m", m), ("n", n), ("i", i)],
                        residual,
                    });
                }
            }
        }
    }
    Ok(LawReport::windowed(
        Law::ModuleAxiom,
        w,
        checked,
        skipped,
        violations,
    ))
}

/// Window-relative decomposability verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Indecomposability {
    Indecomposable,
    /// Connected components of the weight graph, each sorted ascending.
    Decomposable { components: Vec<Vec<i64>> },
}

/// Connectivity of the undirected graph on window indices with an edge
/// `{i, m+i}` whenever `a(m,i) ≠ 0`. One component means no invariant
/// splitting of the basis exists within the window.
pub fn check_indecomposable(
    module: &WeightModule,
    w: Window,
) -> Result<Indecomposability, CheckError> {
    let r = w.radius();
    let size = (2 * r + 1) as usize;
    let mut parent: Vec<usize> = (0..size).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for m in w.iter() {
        for i in w.iter() {
            if !w.contains(m + i) || module.action(m, i)?.is_zero() {
                continue;
            }
            let (a, b) = (
                find(&mut parent, (i + r) as usize),
                find(&mut parent, (m + i + r) as usize),
            );
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    for i in w.iter() {
        let root = find(&mut parent, (i + r) as usize);
        groups.entry(root).or_default().push(i);
    }
    let mut components: Vec<Vec<i64>> = groups.into_values().collect();
    components.sort_by_key(|c| c[0]);
    if components.len() == 1 {
        Ok(Indecomposability::Indecomposable)
    } else {
        Ok(Indecomposability::Decomposable { components })
    }
}

/// Why no grading-aligned intertwiner exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// No target index carries the source's weight of `v_0`.
    NoWeightShift { weight: Rational },
    /// The shift matches at 0 but some other weight disagrees.
    WeightMismatch {
        index: i64,
        source: Rational,
        target: Rational,
    },
    /// An instance with both sides determined evaluates unequally.
    Contradiction {
        at: (i64, i64),
        lhs: Rational,
        rhs: Rational,
    },
    /// Some coefficient is forced to vanish, ruling out invertibility.
    ForcedZero { index: i64, at: (i64, i64) },
}

/// Result of [`find_intertwiner`]: a full witness, a partially determined
/// family, or an exact obstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntertwinerOutcome {
    /// `f(u_i) = c_i · v_{i+k}` intertwines the actions, every `c_i ≠ 0`.
    Witness {
        k: i64,
        coefficients: BTreeMap<i64, Rational>,
    },
    /// Propagation closed without contradiction but left some coefficients
    /// unconstrained; they are reported free rather than guessed.
    Parametric {
        k: i64,
        coefficients: BTreeMap<i64, Rational>,
        free: Vec<i64>,
    },
    /// No intertwiner in the sought form; `partial` holds the coefficients
    /// determined before the obstruction.
    Infeasible {
        k: Option<i64>,
        reason: InfeasibleReason,
        partial: BTreeMap<i64, Rational>,
    },
}

/// Search for a grading-aligned module map `f(u_i) = c_i · v_{i+k}` from `a`
/// to `b`.
///
/// The shift is pinned by weight: `k` is the target index carrying the weight
/// of `u_0`, and all other weights must then agree. Coefficients are
/// propagated from `c_0 := 1` by repeated lexicographic sweeps over the
/// instances `a(m,i)·c_{m+i} = c_i·b(m,i+k)`, deferring instances with two
/// unknowns; a vanishing coefficient on one side forces a zero (ruling the
/// map out as an isomorphism) and a doubly-determined instance that evaluates
/// unequally is an exact contradiction. A successful propagation is
/// re-verified instance by instance before a witness is returned.
pub fn find_intertwiner(
    a: &WeightModule,
    b: &WeightModule,
    w: Window,
) -> Result<IntertwinerOutcome, CheckError> {
    let base_weight = a.weight(0)?.clone();
    let mut shift = None;
    for j in w.iter() {
        if *b.weight(j)? == base_weight {
            shift = Some(j);
            break;
        }
    }
    let Some(k) = shift else {
        return Ok(IntertwinerOutcome::Infeasible {
            k: None,
            reason: InfeasibleReason::NoWeightShift {
                weight: base_weight,
            },
            partial: BTreeMap::new(),
        });
    };
    for i in w.iter() {
        if !w.contains(i + k) {
            continue;
        }
        let (wa, wb) = (a.weight(i)?, b.weight(i + k)?);
        if wa != wb {
            return Ok(IntertwinerOutcome::Infeasible {
                k: Some(k),
                reason: InfeasibleReason::WeightMismatch {
                    index: i,
                    source: wa.clone(),
                    target: wb.clone(),
                },
                partial: BTreeMap::new(),
            });
        }
    }

    // Indices whose image stays inside the window; only these can carry
    // coefficients or constraints.
    let domain: Vec<i64> = w.iter().filter(|&i| w.contains(i + k)).collect();
    let mut c: BTreeMap<i64, Rational> = BTreeMap::new();
    c.insert(0, Rational::one());

    let infeasible = |reason, partial| {
        Ok(IntertwinerOutcome::Infeasible {
            k: Some(k),
            reason,
            partial,
        })
    };

    loop {
        let mut progressed = false;
        for m in w.iter() {
            for i in w.iter() {
                if ![i, m + i, i + k, m + i + k]
                    .into_iter()
                    .all(|x| w.contains(x))
                {
                    continue;
                }
                let lhs_coef = a.action(m, i)?;
                let rhs_coef = b.action(m, i + k)?;
                let (p, q) = (m + i, i);
                if p == q {
                    if lhs_coef == rhs_coef {
                        continue;
                    }
                    match c.get(&p) {
                        Some(v) => {
                            return infeasible(
                                InfeasibleReason::Contradiction {
                                    at: (m, i),
                                    lhs: lhs_coef * v,
                                    rhs: rhs_coef * v,
                                },
                                c,
                            );
                        }
                        None => {
                            return infeasible(
                                InfeasibleReason::ForcedZero { index: p, at: (m, i) },
                                c,
                            );
                        }
                    }
                }
                match (lhs_coef.is_zero(), rhs_coef.is_zero()) {
                    (true, true) => {}
                    (false, true) => match c.get(&p) {
                        Some(v) => {
                            return infeasible(
                                InfeasibleReason::Contradiction {
                                    at: (m, i),
                                    lhs: lhs_coef * v,
                                    rhs: Rational::zero(),
                                },
                                c,
                            );
                        }
                        None => {
                            return infeasible(
                                InfeasibleReason::ForcedZero { index: p, at: (m, i) },
                                c,
                            );
                        }
                    },
                    (true, false) => match c.get(&q) {
                        Some(v) => {
                            return infeasible(
                                InfeasibleReason::Contradiction {
                                    at: (m, i),
                                    lhs: Rational::zero(),
                                    rhs: rhs_coef * v,
                                },
                                c,
                            );
                        }
                        None => {
                            return infeasible(
                                InfeasibleReason::ForcedZero { index: q, at: (m, i) },
                                c,
                            );
                        }
                    },
                    (false, false) => match (c.get(&p).cloned(), c.get(&q).cloned()) {
                        (Some(cp), Some(cq)) => {
                            let (lhs, rhs) = (lhs_coef * &cp, rhs_coef * &cq);
                            if lhs != rhs {
                                return infeasible(
                                    InfeasibleReason::Contradiction { at: (m, i), lhs, rhs },
                                    c,
                                );
                            }
                        }
                        (Some(cp), None) => {
                            c.insert(q, lhs_coef * cp / rhs_coef);
                            progressed = true;
                        }
                        (None, Some(cq)) => {
                            c.insert(p, rhs_coef * cq / lhs_coef);
                            progressed = true;
                        }
                        (None, None) => {}
                    },
                }
            }
        }
        if !progressed {
            break;
        }
    }

    if c.len() < domain.len() {
        let free = domain.into_iter().filter(|i| !c.contains_key(i)).collect();
        return Ok(IntertwinerOutcome::Parametric {
            k,
            coefficients: c,
            free,
        });
    }
    match verify_intertwiner(a, b, w, k, &c)? {
        None => Ok(IntertwinerOutcome::Witness { k, coefficients: c }),
        Some((m, i)) => {
            let lhs = a.action(m, i)? * &c[&(m + i)];
            let rhs = b.action(m, i + k)? * &c[&i];
            infeasible(InfeasibleReason::Contradiction { at: (m, i), lhs, rhs }, c)
        }
    }
}

/// Independent instance-by-instance check of a (possibly partial) coefficient
/// map: returns the first in-window instance whose two sides are both
/// determined yet unequal, or `None` if no such instance exists. A side is
/// determined when its coefficient vanishes or its `c` value is present.
pub fn verify_intertwiner(
    a: &WeightModule,
    b: &WeightModule,
    w: Window,
    k: i64,
    c: &BTreeMap<i64, Rational>,
) -> Result<Option<(i64, i64)>, CheckError> {
    for m in w.iter() {
        for i in w.iter() {
            if ![i, m + i, i + k, m + i + k]
                .into_iter()
                .all(|x| w.contains(x))
            {
                continue;
            }
            let lhs_coef = a.action(m, i)?;
            let rhs_coef = b.action(m, i + k)?;
            let lhs = if lhs_coef.is_zero() {
                Some(Rational::zero())
            } else {
                c.get(&(m + i)).map(|v| lhs_coef * v)
            };
            let rhs = if rhs_coef.is_zero() {
                Some(Rational::zero())
            } else {
                c.get(&i).map(|v| rhs_coef * v)
            };
            if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
                if lhs != rhs {
                    return Ok(Some((m, i)));
                }
            }
        }
    }
    Ok(None)
}
