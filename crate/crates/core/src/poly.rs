//! Sparse multivariate polynomials in the brane parameters `P_1..P_m`.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is graded
//! lexicographic, so iteration order and serialization are canonical. Zero
//! coefficients are never stored; two polynomials are equal exactly when
//! their term maps are equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;
use crate::rational::Rational;

/// Exponent vector, one entry per parameter symbol.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn unit(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParamPoly {
    arity: usize,
    terms: BTreeMap<Monomial, Rational>,
}

/// One serialized term: `{"coeff": "num/den", "exps": [..]}`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: Rational,
    pub exps: Vec<u32>,
}

impl ParamPoly {
    pub fn zero(arity: usize) -> Self {
        ParamPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = ParamPoly::zero(arity);
        p.add_term(Monomial::unit(arity), c);
        p
    }

    pub fn one(arity: usize) -> Self {
        ParamPoly::constant(arity, Rational::one())
    }

    /// The lone symbol `P_{index+1}`.
    pub fn var(arity: usize, index: usize) -> Self {
        assert!(index < arity, "symbol index {index} out of range for arity {arity}");
        let mut exps = vec![0; arity];
        exps[index] = 1;
        ParamPoly::term(Rational::one(), exps)
    }

    pub fn term(coeff: Rational, exps: Vec<u32>) -> Self {
        let mut p = ParamPoly::zero(exps.len());
        p.add_term(Monomial(exps), coeff);
        p
    }

    pub fn from_terms(
        arity: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self, AlgebraError> {
        let mut p = ParamPoly::zero(arity);
        for (exps, c) in terms {
            if exps.len() != arity {
                return Err(AlgebraError::ArityMismatch {
                    left: arity,
                    right: exps.len(),
                });
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_term().is_one() && self.terms.len() == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (graded lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.arity])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_arity(&self, other: &ParamPoly) -> Result<(), AlgebraError> {
        if self.arity != other.arity {
            return Err(AlgebraError::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ParamPoly) -> Result<ParamPoly, AlgebraError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &ParamPoly) -> Result<ParamPoly, AlgebraError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &ParamPoly) -> Result<ParamPoly, AlgebraError> {
        self.check_arity(other)?;
        let mut out = ParamPoly::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Rational) -> ParamPoly {
        if k.is_zero() {
            return ParamPoly::zero(self.arity);
        }
        ParamPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> ParamPoly {
        let mut acc = ParamPoly::one(self.arity);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at `P_s = values[s]`.
    pub fn eval(&self, values: &[Rational]) -> Result<Rational, AlgebraError> {
        if values.len() != self.arity {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.arity,
                got: values.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(values)
                    .fold(c.clone(), |acc, (&e, v)| acc * v.powi(e as i32))
            })
            .sum())
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.arity, "parameter count mismatch");
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(values)
                    .fold(c.to_f64(), |acc, (&e, v)| acc * v.powi(e as i32))
            })
            .sum()
    }

    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                coeff: c.clone(),
                exps: m.0.clone(),
            })
            .collect()
    }

    pub fn from_json_terms(arity: usize, terms: &[TermJson]) -> Result<Self, AlgebraError> {
        ParamPoly::from_terms(arity, terms.iter().map(|t| (t.exps.clone(), t.coeff.clone())))
    }
}

impl Serialize for ParamPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_terms().serialize(serializer)
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(s, &e)| {
                    if e == 1 {
                        format!("P{}", s + 1)
                    } else {
                        format!("P{}^{}", s + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamPoly[{}]({})", self.arity, self)
    }
}

// Operator forms panic on arity mismatch; use the `try_*` methods when the
// operands come from different sources.
impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        self.try_add(rhs).expect("ParamPoly addition")
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        self.try_sub(rhs).expect("ParamPoly subtraction")
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        self.try_mul(rhs).expect("ParamPoly multiplication")
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        self.scale(&Rational::from(-1))
    }
}
