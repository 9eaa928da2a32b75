//! Graded enumeration of tensor Hermite bases.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::Error;
use crate::poly::MultiIndex;
use crate::scalar::{factorial, Rational};
use crate::Result;

/// Which Hermite family spans the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermiteKind {
    /// `H_a`, orthogonal for `e^{-x^2}`; `x H_a = H_{a+1}/2 + a H_{a-1}`.
    Physicists,
    /// `He_a`, orthogonal for the standard Gaussian; `x He_a = He_{a+1} + a He_{a-1}`.
    Probabilists,
}

impl HermiteKind {
    /// `||u_a||^2` up to the common measure factor.
    pub fn gram_1d(self, a: u32) -> BigInt {
        match self {
            HermiteKind::Physicists => (BigInt::one() << a as usize) * factorial(a),
            HermiteKind::Probabilists => factorial(a),
        }
    }
}

/// The first `size` multi-indices over `vars` coordinates in graded order:
/// lower total degree first, ties in descending lexicographic order (so
/// `q_1` precedes `p_1`).
#[derive(Debug)]
pub struct GradedBasis {
    vars: usize,
    kind: HermiteKind,
    indices: Vec<MultiIndex>,
    positions: BTreeMap<MultiIndex, usize>,
    degrees: Vec<u32>,
    grams: Vec<Rational>,
    full_level: Option<u32>,
}

fn compositions(vars: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == vars {
        prefix.push(total);
        out.push(MultiIndex::from_exponents(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        compositions(vars, total - first, prefix, out);
        prefix.pop();
    }
}

/// Number of multi-indices over `vars` coordinates of total degree at most `level`.
pub fn count_up_to(vars: usize, level: u32) -> usize {
    let mut acc: u128 = 1;
    // C(level + vars, vars)
    for i in 1..=vars as u128 {
        acc = acc * (level as u128 + i) / i;
    }
    acc as usize
}

impl GradedBasis {
    pub fn new(vars: usize, size: usize, kind: HermiteKind) -> Result<Self> {
        if vars == 0 || size == 0 {
            return Err(Error::InvalidConfig("basis needs at least one variable and one element".into()));
        }
        let mut indices = Vec::with_capacity(size);
        let mut full_level = None;
        let mut degree = 0u32;
        while indices.len() < size {
            let mut level = Vec::new();
            compositions(vars, degree, &mut Vec::new(), &mut level);
            let room = size - indices.len();
            if level.len() <= room {
                indices.extend(level);
                full_level = Some(degree);
            } else {
                indices.extend(level.into_iter().take(room));
            }
            degree += 1;
        }
        let positions = indices.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let degrees = indices.iter().map(MultiIndex::degree).collect();
        let grams = indices
            .iter()
            .map(|m| {
                Rational::from_integer(
                    m.exponents().iter().map(|&a| kind.gram_1d(a)).product::<BigInt>(),
                )
            })
            .collect();
        Ok(GradedBasis {
            vars,
            kind,
            indices,
            positions,
            degrees,
            grams,
            full_level,
        })
    }

    /// Smallest basis containing every multi-index of degree at most `level`.
    pub fn with_level(vars: usize, level: u32, kind: HermiteKind) -> Result<Self> {
        GradedBasis::new(vars, count_up_to(vars, level), kind)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn kind(&self) -> HermiteKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn multi_index(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.positions.get(m).copied()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn gram(&self, i: usize) -> &Rational {
        &self.grams[i]
    }

    /// Largest degree `L` such that every multi-index of degree `<= L` is present.
    pub fn full_level(&self) -> Option<u32> {
        self.full_level
    }

    /// Number of leading indices with degree `<= level`.
    pub fn prefix_len(&self, level: Option<u32>) -> usize {
        match level {
            None => 0,
            Some(l) => count_up_to(self.vars, l).min(self.len()),
        }
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, size: self.len() });
        }
        Ok(())
    }
}
