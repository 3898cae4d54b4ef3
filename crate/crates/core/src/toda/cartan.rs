//! Quasi-Cartan matrices and the rank-2 algebra lookup table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, SolverError};
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

/// Square rational matrix with every diagonal entry equal to 2.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RationalMatrix", into = "RationalMatrix")]
pub struct QuasiCartanMatrix(RationalMatrix);

impl QuasiCartanMatrix {
    pub fn new(m: RationalMatrix) -> Result<Self, SolverError> {
        if !m.is_square() {
            return Err(AlgebraError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            }
            .into());
        }
        let two = Rational::from(2);
        for i in 0..m.rows() {
            if m.get(i, i) != &two {
                return Err(SolverError::BadDiagonal {
                    index: i + 1,
                    value: m.get(i, i).to_string(),
                });
            }
        }
        Ok(QuasiCartanMatrix(m))
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self, SolverError> {
        QuasiCartanMatrix::new(RationalMatrix::from_ints(rows))
    }

    pub fn rank(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, s: usize, t: usize) -> &Rational {
        self.0.get(s, t)
    }

    pub fn as_matrix(&self) -> &RationalMatrix {
        &self.0
    }

    /// True when every off-diagonal entry is a non-positive integer, i.e. the
    /// cleared master equation is a finite polynomial identity.
    pub fn has_polynomial_coupling(&self) -> bool {
        let n = self.rank();
        (0..n).all(|s| {
            (0..n).all(|t| s == t || (self.get(s, t).is_integer() && !self.get(s, t).is_positive()))
        })
    }

    /// Label from the rank <= 2 lookup table, if the matrix is listed there.
    pub fn classify(&self) -> Option<&'static str> {
        Algebra::ALL
            .iter()
            .find(|a| &a.cartan_matrix() == self)
            .map(|a| a.label())
            .or_else(|| {
                // Relabeled (transposed) exceptional case.
                (self == &QuasiCartanMatrix::from_ints(&[&[2, -3], &[-1, 2]]).unwrap())
                    .then_some("G2")
            })
    }
}

impl TryFrom<RationalMatrix> for QuasiCartanMatrix {
    type Error = SolverError;
    fn try_from(m: RationalMatrix) -> Result<Self, Self::Error> {
        QuasiCartanMatrix::new(m)
    }
}

impl From<QuasiCartanMatrix> for RationalMatrix {
    fn from(m: QuasiCartanMatrix) -> Self {
        m.0
    }
}

impl fmt::Debug for QuasiCartanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuasiCartanMatrix({})", self.0)
    }
}

impl fmt::Display for QuasiCartanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Rank <= 2 algebras reachable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algebra {
    A1,
    A1xA1,
    A2,
    B2,
    C2,
    G2,
}

impl Algebra {
    pub const ALL: [Algebra; 6] = [
        Algebra::A1,
        Algebra::A1xA1,
        Algebra::A2,
        Algebra::B2,
        Algebra::C2,
        Algebra::G2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algebra::A1 => "A1",
            Algebra::A1xA1 => "A1+A1",
            Algebra::A2 => "A2",
            Algebra::B2 => "B2",
            Algebra::C2 => "C2",
            Algebra::G2 => "G2",
        }
    }

    pub fn cartan_matrix(self) -> QuasiCartanMatrix {
        let rows: &[&[i64]] = match self {
            Algebra::A1 => &[&[2]],
            Algebra::A1xA1 => &[&[2, 0], &[0, 2]],
            Algebra::A2 => &[&[2, -1], &[-1, 2]],
            // B2 is C2 with the two branes swapped.
            Algebra::B2 => &[&[2, -2], &[-1, 2]],
            Algebra::C2 => &[&[2, -1], &[-2, 2]],
            Algebra::G2 => &[&[2, -1], &[-3, 2]],
        };
        QuasiCartanMatrix::from_ints(rows).expect("table entries have diagonal 2")
    }
}

impl FromStr for Algebra {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_uppercase();
        match norm.as_str() {
            "A1" => Ok(Algebra::A1),
            "A1+A1" | "A1XA1" | "A1A1" | "D2" => Ok(Algebra::A1xA1),
            "A2" => Ok(Algebra::A2),
            "B2" => Ok(Algebra::B2),
            "C2" => Ok(Algebra::C2),
            "G2" => Ok(Algebra::G2),
            _ => Err(format!(
                "unknown algebra {s:?}; expected one of A1, A1+A1, A2, B2, C2, G2"
            )),
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Conjectured polynomial degrees `n_s = 2 * sum_t (A^-1)_{st}`, exact.
///
/// Integrality is not assumed; the caller decides what a fractional or
/// negative entry means.
pub fn weyl_degrees(a: &QuasiCartanMatrix) -> Result<Vec<Rational>, AlgebraError> {
    let inv = a.as_matrix().inverse()?;
    let two = Rational::from(2);
    Ok((0..a.rank())
        .map(|s| inv.row(s).iter().sum::<Rational>() * &two)
        .collect())
}
