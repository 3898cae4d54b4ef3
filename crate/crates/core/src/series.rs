//! Truncated power series in `z` with [`ParamPoly`] coefficients.
//!
//! A series of order `N` stores the coefficients of `z^0..=z^N`; everything
//! above is unknown. Binary operations keep the smaller order, and each
//! operation reports the tightest order it can vouch for instead of failing
//! (differentiation drops one order, multiplication by `z` gains one). A
//! series with no known coefficients is allowed and has `order() == None`.
//!
//! The `*_exact` methods instead treat their operands as finite polynomials
//! (all coefficients above the stored ones are exactly zero) and never
//! truncate.

use serde::Serialize;

use crate::error::AlgebraError;
use crate::poly::ParamPoly;
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    arity: usize,
    coeffs: Vec<ParamPoly>,
}

impl TruncatedSeries {
    pub fn new(arity: usize, coeffs: Vec<ParamPoly>) -> Result<Self, AlgebraError> {
        for c in &coeffs {
            if c.arity() != arity {
                return Err(AlgebraError::ArityMismatch {
                    left: arity,
                    right: c.arity(),
                });
            }
        }
        Ok(TruncatedSeries { arity, coeffs })
    }

    pub fn zero(arity: usize, order: usize) -> Self {
        TruncatedSeries {
            arity,
            coeffs: vec![ParamPoly::zero(arity); order + 1],
        }
    }

    pub fn one(arity: usize, order: usize) -> Self {
        TruncatedSeries::constant(arity, order, ParamPoly::one(arity))
    }

    pub fn constant(arity: usize, order: usize, c: ParamPoly) -> Self {
        let mut s = TruncatedSeries::zero(arity, order);
        s.coeffs[0] = c;
        s
    }

    /// Series with rational coefficients (arity-0 polynomials).
    pub fn from_rationals(coeffs: impl IntoIterator<Item = Rational>) -> Self {
        TruncatedSeries {
            arity: 0,
            coeffs: coeffs.into_iter().map(|c| ParamPoly::constant(0, c)).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Highest known power of `z`, or `None` if nothing is known.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Number of known coefficients, `order + 1`.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[ParamPoly] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ParamPoly> {
        self.coeffs
    }

    /// Coefficient of `z^k`; zero past the known order.
    pub fn coeff(&self, k: usize) -> ParamPoly {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| ParamPoly::zero(self.arity))
    }

    pub fn truncate(&self, order: usize) -> TruncatedSeries {
        let keep = self.coeffs.len().min(order + 1);
        TruncatedSeries {
            arity: self.arity,
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ParamPoly::is_zero)
    }

    /// Lowest power of `z` with a nonzero known coefficient.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Index of the highest nonzero stored coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn check_arity(&self, other: &TruncatedSeries) -> Result<(), AlgebraError> {
        if self.arity != other.arity {
            return Err(AlgebraError::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        self.check_arity(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(TruncatedSeries {
            arity: self.arity,
            coeffs,
        })
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        self.check_arity(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(TruncatedSeries {
            arity: self.arity,
            coeffs,
        })
    }

    /// Cauchy product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        self.check_arity(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![ParamPoly::zero(self.arity); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(TruncatedSeries {
            arity: self.arity,
            coeffs,
        })
    }

    pub fn scale(&self, k: &ParamPoly) -> Result<TruncatedSeries, AlgebraError> {
        if k.arity() != self.arity {
            return Err(AlgebraError::ArityMismatch {
                left: self.arity,
                right: k.arity(),
            });
        }
        Ok(TruncatedSeries {
            arity: self.arity,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        })
    }

    /// Multiplication by `z`; the known order grows by one.
    pub fn shift_up(&self) -> TruncatedSeries {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ParamPoly::zero(self.arity));
        coeffs.extend(self.coeffs.iter().cloned());
        TruncatedSeries {
            arity: self.arity,
            coeffs,
        }
    }

    /// Term-wise derivative; the known order drops by one.
    pub fn d_dz(&self) -> TruncatedSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&Rational::from(k as i64)))
            .collect();
        TruncatedSeries {
            arity: self.arity,
            coeffs,
        }
    }

    /// Formal power `s^alpha` for a series with constant term 1.
    ///
    /// With `g = s^alpha`, the identity `s g' = alpha s' g` gives, at `z^(n-1)`,
    /// `g_n = (1/n) * sum_{j=1..n} (alpha*j - (n-j)) s_j g_{n-j}`.
    pub fn pow(&self, alpha: &Rational) -> Result<TruncatedSeries, AlgebraError> {
        let Some(c0) = self.coeffs.first() else {
            return Ok(self.clone());
        };
        if !c0.is_one() {
            return Err(AlgebraError::NonUnitConstantTerm(c0.to_string()));
        }
        let len = self.coeffs.len();
        let mut g: Vec<ParamPoly> = Vec::with_capacity(len);
        g.push(ParamPoly::one(self.arity));
        for n in 1..len {
            let mut acc = ParamPoly::zero(self.arity);
            for j in 1..=n {
                let s_j = &self.coeffs[j];
                if s_j.is_zero() || g[n - j].is_zero() {
                    continue;
                }
                let weight = alpha * Rational::from(j as i64) - Rational::from((n - j) as i64);
                if weight.is_zero() {
                    continue;
                }
                acc = &acc + &(s_j * &g[n - j]).scale(&weight);
            }
            g.push(acc.scale(&Rational::new(1, n as i64)));
        }
        Ok(TruncatedSeries {
            arity: self.arity,
            coeffs: g,
        })
    }

    /// Product of two finite polynomials in `z`, no truncation.
    pub fn mul_exact(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        self.check_arity(other)?;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(TruncatedSeries::zero(self.arity, 0));
        }
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![ParamPoly::zero(self.arity); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(TruncatedSeries {
            arity: self.arity,
            coeffs,
        })
    }

    /// Sum of two finite polynomials in `z`, padded to the longer one.
    pub fn add_exact(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        self.check_arity(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        Ok(TruncatedSeries {
            arity: self.arity,
            coeffs,
        })
    }

    /// Difference of two finite polynomials in `z`, padded to the longer one.
    pub fn sub_exact(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, AlgebraError> {
        self.check_arity(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) - &other.coeff(k)).collect();
        Ok(TruncatedSeries {
            arity: self.arity,
            coeffs,
        })
    }

    /// Nonnegative integer power of a finite polynomial in `z`, no truncation.
    pub fn pow_exact(&self, exp: u32) -> Result<TruncatedSeries, AlgebraError> {
        let mut acc = TruncatedSeries::one(self.arity, 0);
        for _ in 0..exp {
            acc = acc.mul_exact(self)?;
        }
        Ok(acc)
    }

    /// Substitutes `P_s = values[s]` in every coefficient.
    pub fn bind(&self, values: &[Rational]) -> Result<TruncatedSeries, AlgebraError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.eval(values).map(|r| ParamPoly::constant(0, r)))
            .collect::<Result<_, _>>()?;
        Ok(TruncatedSeries { arity: 0, coeffs })
    }

    /// Evaluates the known part at a rational `z` (arity-0 series only).
    pub fn eval_at(&self, z: &Rational) -> Rational {
        assert_eq!(self.arity, 0, "bind parameters before evaluating");
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * z + c.constant_term())
    }

    /// Evaluates the known part in floating point (arity-0 series only).
    pub fn eval_f64(&self, z: f64) -> f64 {
        assert_eq!(self.arity, 0, "bind parameters before evaluating");
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * z + c.constant_term().to_f64())
    }

    /// First derivative evaluated in floating point (arity-0 series only).
    pub fn eval_derivative_f64(&self, z: f64) -> f64 {
        self.d_dz().eval_f64(z)
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}
