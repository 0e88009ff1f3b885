//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a canonical graded-lexicographic order with no zero
//! coefficients stored, so structural equality coincides with mathematical
//! equality. Variables are identifiers; the grading indices `m`, `n`, `l`,
//! `i` and declared parameters all live in the same namespace.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, Rational};

/// A power product such as `m^2*n`: variable names sorted ascending, all
/// exponents positive. The empty product is the constant monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(alloc::vec![(name.to_string(), exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(String, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => out.push(b.next().unwrap().clone()),
                (Some((va, _)), Some((vb, _))) => match va.cmp(vb) {
                    Ordering::Less => out.push(a.next().unwrap().clone()),
                    Ordering::Greater => out.push(b.next().unwrap().clone()),
                    Ordering::Equal => {
                        let (v, ea) = a.next().unwrap();
                        let (_, eb) = b.next().unwrap();
                        out.push((v.clone(), ea + eb));
                    }
                },
            }
        }
        Monomial(out)
    }

    /// Split into (factors over `vars`, remaining factors).
    fn split(&self, vars: &BTreeSet<&str>) -> (Monomial, Monomial) {
        let (inside, outside) = self
            .0
            .iter()
            .cloned()
            .partition(|(v, _)| vars.contains(v.as_str()));
        (Monomial(inside), Monomial(outside))
    }
}

/// Graded lex: higher total degree first; on ties, the monomial with the
/// larger exponent on the alphabetically earliest differing variable is the
/// greater. `Display` iterates descending, so e.g. `-g - m - 2*n` prints in
/// that order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut a, mut b) = (self.0.iter(), other.0.iter());
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {}
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    /// A variable had no binding; carries the variable name.
    Unbound(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Unbound(v) => write!(f, "unbound variable `{v}`"),
        }
    }
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        MultiPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MultiPoly { terms }
    }

    pub fn var(name: &str) -> Self {
        MultiPoly::from_terms([(Monomial::var(name, 1), Rational::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(iter: I) -> Self {
        let mut p = MultiPoly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value of a constant polynomial, if it is one.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter())
            .filter(|(v, _)| v == var)
            .map(|(_, e)| *e)
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact evaluation; every variable of the polynomial must be bound.
    pub fn eval(&self, bindings: &BTreeMap<String, Rational>) -> Result<Rational, EvalError> {
        let mut acc = Rational::zero();
        for (mono, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (v, e) in &mono.0 {
                let val = bindings
                    .get(v)
                    .ok_or_else(|| EvalError::Unbound(v.clone()))?;
                for _ in 0..*e {
                    term *= val;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Simultaneous substitution of variables by polynomials; variables not
    /// in the map are kept.
    pub fn compose(&self, subs: &BTreeMap<String, MultiPoly>) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for (mono, coeff) in &self.terms {
            let mut term = MultiPoly::constant(coeff.clone());
            for (v, e) in &mono.0 {
                let base = match subs.get(v) {
                    Some(p) => p.clone(),
                    None => MultiPoly::var(v),
                };
                term = &term * &base.pow(*e);
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Substitute a single variable by a constant.
    pub fn bind(&self, var: &str, value: &Rational) -> MultiPoly {
        let mut subs = BTreeMap::new();
        subs.insert(var.to_string(), MultiPoly::constant(value.clone()));
        self.compose(&subs)
    }

    /// Group terms by their monomial part over `vars`; values are the
    /// coefficient polynomials in the remaining variables.
    pub fn partition_by(&self, vars: &[&str]) -> BTreeMap<Monomial, MultiPoly> {
        let set: BTreeSet<&str> = vars.iter().copied().collect();
        let mut out: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (mono, coeff) in &self.terms {
            let (inside, outside) = mono.split(&set);
            out.entry(inside)
                .or_insert_with(MultiPoly::zero)
                .add_term(outside, coeff.clone());
        }
        out
    }

    /// Decompose as a polynomial in `var`: exponent → coefficient polynomial
    /// (zero coefficients omitted).
    pub fn decompose_in(&self, var: &str) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (mono, coeff) in &self.terms {
            let exp = mono
                .0
                .iter()
                .find(|(v, _)| v == var)
                .map(|(_, e)| *e)
                .unwrap_or(0);
            let rest = Monomial(
                mono.0
                    .iter()
                    .filter(|(v, _)| v != var)
                    .cloned()
                    .collect(),
            );
            out.entry(exp)
                .or_insert_with(MultiPoly::zero)
                .add_term(rest, coeff.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Dense univariate coefficient list `[c_0, …, c_d]` if the polynomial
    /// involves no variable other than `var`.
    pub fn univariate_coeffs(&self, var: &str) -> Option<Vec<Rational>> {
        let vars = self.vars();
        if !vars.is_empty() && !(vars.len() == 1 && vars.contains(var)) {
            return None;
        }
        let deg = self.degree_in(var) as usize;
        let mut out = alloc::vec![Rational::zero(); deg + 1];
        for (mono, coeff) in &self.terms {
            let exp = mono.0.first().map(|(_, e)| *e as usize).unwrap_or(0);
            out[exp] = coeff.clone();
        }
        Some(out)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_value_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                $trait::$method(&self, &rhs)
            }
        }
    )*};
}
forward_value_ops!(Add::add, Sub::sub, Mul::mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Canonical text form: terms in descending graded-lex order, `" + "`/`" - "`
/// separators, unit coefficients omitted, `^` only for exponents ≥ 2.
///
/// One exception keeps the format parseable: a *leading* `-g^2` would read
/// back as `(-g)^2` under the grammar's unary-minus rule, so a leading
/// negative unit coefficient is spelled `-1*g^2` whenever the first factor
/// carries an even exponent. (Later terms use binary `-`, which subtracts
/// the whole term, so they never need this.)
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (mono, coeff)) in self.terms.iter().rev().enumerate() {
            let neg = coeff.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = coeff.abs();
            let leading_even = k == 0
                && neg
                && mono
                    .factors()
                    .first()
                    .is_some_and(|(_, e)| e % 2 == 0);
            if mono.is_one() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() && !leading_even {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn var(n: &str) -> MultiPoly {
        MultiPoly::var(n)
    }

    #[test]
    fn ring_operations() {
        let (m, n) = (var("m"), var("n"));
        assert_eq!(&m + &n, MultiPoly::from_terms([
            (Monomial::var("m", 1), rat(1)),
            (Monomial::var("n", 1), rat(1)),
        ]));
        // (m+n)(m-n) = m^2 - n^2
        let prod = &(&m + &n) * &(&m - &n);
        assert_eq!(prod, &(&m * &m) - &(&n * &n));
        // (m+1)^0 = 1
        assert_eq!((&m + &MultiPoly::one()).pow(0), MultiPoly::one());
    }

    #[test]
    fn eval_exact() {
        // -(g + m + 2n) at g=1, m=2, n=3 → -9
        let p = -&(&(&var("g") + &var("m")) + &var("n").scale(&rat(2)));
        let bind: BTreeMap<String, Rational> = [
            ("g".into(), rat(1)),
            ("m".into(), rat(2)),
            ("n".into(), rat(3)),
        ]
        .into();
        assert_eq!(p.eval(&bind).unwrap(), rat(-9));

        let sq = &(&var("m") * &var("m")) - &(&var("n") * &var("n"));
        let bind2: BTreeMap<String, Rational> =
            [("m".into(), rat(2)), ("n".into(), rat(2))].into();
        assert_eq!(sq.eval(&bind2).unwrap(), rat(0));

        // (1/12)m^3 - (1/12)m at m=3 → 2
        let cubic = &var("m").pow(3).scale(&ratio(1, 12)) - &var("m").scale(&ratio(1, 12));
        let bind3: BTreeMap<String, Rational> = [("m".into(), rat(3))].into();
        assert_eq!(cubic.eval(&bind3).unwrap(), rat(2));
    }

    #[test]
    fn eval_names_unbound_variable() {
        let p = &var("m") + &var("g");
        let bind: BTreeMap<String, Rational> = [("m".into(), rat(1))].into();
        assert_eq!(p.eval(&bind), Err(EvalError::Unbound("g".into())));
    }

    #[test]
    fn monomial_order_is_graded_lex() {
        let g = Monomial::var("g", 1);
        let m = Monomial::var("m", 1);
        let n = Monomial::var("n", 1);
        let m3 = Monomial::var("m", 3);
        let mn = Monomial::var("m", 1).mul(&Monomial::var("n", 1));
        let m2 = Monomial::var("m", 2);
        assert!(m3 > m2 && m2 > mn && mn > Monomial::var("n", 2));
        assert!(g > m && m > n && n > Monomial::one());
    }

    #[test]
    fn compose_substitutes_simultaneously() {
        // p = m - n; swap m and n → n - m
        let p = &var("m") - &var("n");
        let subs: BTreeMap<String, MultiPoly> =
            [("m".into(), var("n")), ("n".into(), var("m"))].into();
        assert_eq!(p.compose(&subs), &var("n") - &var("m"));
    }

    #[test]
    fn partition_groups_index_monomials() {
        // c1*m + c2*m + c1  partitioned by {m}
        let p = MultiPoly::from_terms([
            (Monomial::var("c1", 1).mul(&Monomial::var("m", 1)), rat(1)),
            (Monomial::var("c2", 1).mul(&Monomial::var("m", 1)), rat(1)),
            (Monomial::var("c1", 1), rat(1)),
        ]);
        let parts = p.partition_by(&["m"]);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[&Monomial::one()], var("c1"));
        assert_eq!(parts[&Monomial::var("m", 1)], &var("c1") + &var("c2"));
    }

    #[test]
    fn zero_terms_vanish() {
        let p = &var("m") - &var("m");
        assert!(p.is_zero());
        assert_eq!(p.total_degree(), 0);
    }
}
