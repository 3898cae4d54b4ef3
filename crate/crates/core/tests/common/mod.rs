#![allow(dead_code)]

use toda_brane::rational::rat;
use toda_brane::ParamPoly;

/// A coefficient given as a list of `(num, den, [e1, e2])` terms.
pub type Terms = &'static [(i64, i64, [u32; 2])];

pub fn poly(terms: Terms) -> ParamPoly {
    ParamPoly::from_terms(2, terms.iter().map(|&(n, d, e)| (e.to_vec(), rat(n, d)))).unwrap()
}

/// Coefficients of `z^0 .. z^n` for both moduli functions.
pub struct Golden {
    pub h1: &'static [Terms],
    pub h2: &'static [Terms],
}

pub const C2: Golden = Golden {
    h1: &[
        &[(1, 1, [0, 0])],
        &[(1, 1, [1, 0])],
        &[(1, 4, [1, 1])],
        &[(1, 36, [2, 1])],
    ],
    h2: &[
        &[(1, 1, [0, 0])],
        &[(1, 1, [0, 1])],
        &[(1, 2, [1, 1])],
        &[(1, 9, [2, 1])],
        &[(1, 144, [2, 2])],
    ],
};

pub const G2: Golden = Golden {
    h1: &[
        &[(1, 1, [0, 0])],
        &[(1, 1, [1, 0])],
        &[(1, 4, [1, 1])],
        &[(1, 18, [2, 1])],
        &[(1, 144, [3, 1])],
        &[(1, 3600, [3, 2])],
        &[(1, 129600, [4, 2])],
    ],
    h2: &[
        &[(1, 1, [0, 0])],
        &[(1, 1, [0, 1])],
        &[(3, 4, [1, 1])],
        &[(1, 3, [2, 1])],
        &[(1, 48, [2, 2]), (1, 16, [3, 1])],
        &[(7, 600, [3, 2])],
        &[(1, 1600, [3, 3]), (1, 1728, [4, 2])],
        &[(1, 10800, [4, 3])],
        &[(1, 172800, [5, 3])],
        &[(1, 4665600, [6, 3])],
        &[(1, 466560000, [6, 4])],
    ],
};

pub const A2: Golden = Golden {
    h1: &[&[(1, 1, [0, 0])], &[(1, 1, [1, 0])], &[(1, 4, [1, 1])]],
    h2: &[&[(1, 1, [0, 0])], &[(1, 1, [0, 1])], &[(1, 4, [1, 1])]],
};

impl Golden {
    pub fn brane(&self, s: usize) -> Vec<ParamPoly> {
        let rows = if s == 0 { self.h1 } else { self.h2 };
        rows.iter().map(|t| poly(t)).collect()
    }
}
