//! Exact polynomial observables on `R^{2n}` with the canonical Poisson bracket.
//!
//! Variables are ordered `q_1..q_n, p_1..p_n`. The bracket convention is
//! `{f, g} = sum_k (d_{q_k} f d_{p_k} g - d_{p_k} f d_{q_k} g)`, so
//! `{q_k, p_k} = 1`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::scalar::{to_f64, Rational};
use crate::Result;

/// Exponent vector over the `2n` canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    pub fn unit(len: usize, var: usize) -> Self {
        let mut exps = vec![0; len];
        exps[var] = 1;
        MultiIndex(exps)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, var: usize) -> u32 {
        self.0[var]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn with(&self, var: usize, exponent: u32) -> MultiIndex {
        let mut exps = self.0.clone();
        exps[var] = exponent;
        MultiIndex(exps)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    dim_n: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(dim_n: usize) -> Self {
        assert!(dim_n > 0, "phase space needs at least one canonical pair");
        Polynomial {
            dim_n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim_n: usize, value: Rational) -> Self {
        let mut p = Polynomial::zero(dim_n);
        p.add_term(MultiIndex::zero(2 * dim_n), value);
        p
    }

    pub fn one(dim_n: usize) -> Self {
        Polynomial::constant(dim_n, Rational::one())
    }

    /// Coordinate `q_k`, `k` 1-based.
    pub fn q(dim_n: usize, k: usize) -> Self {
        assert!((1..=dim_n).contains(&k));
        Polynomial::monomial(dim_n, MultiIndex::unit(2 * dim_n, k - 1), Rational::one())
    }

    /// Coordinate `p_k`, `k` 1-based.
    pub fn p(dim_n: usize, k: usize) -> Self {
        assert!((1..=dim_n).contains(&k));
        Polynomial::monomial(
            dim_n,
            MultiIndex::unit(2 * dim_n, dim_n + k - 1),
            Rational::one(),
        )
    }

    pub fn monomial(dim_n: usize, exps: MultiIndex, coeff: Rational) -> Self {
        assert_eq!(exps.len(), 2 * dim_n, "multi-index length must be 2n");
        let mut p = Polynomial::zero(dim_n);
        p.add_term(exps, coeff);
        p
    }

    pub fn from_terms<I>(dim_n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Polynomial::zero(dim_n);
        for (m, c) in terms {
            assert_eq!(m.len(), 2 * dim_n, "multi-index length must be 2n");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, exps: MultiIndex, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps.clone()).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &MultiIndex) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    /// The polynomial is a single term.
    pub fn as_monomial(&self) -> Option<(&MultiIndex, &Rational)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    fn check_dim(&self, other: &Polynomial) -> Result<()> {
        if self.dim_n != other.dim_n {
            return Err(Error::DimensionMismatch {
                left: self.dim_n,
                right: other.dim_n,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.checked_add(&other.scaled(&-Rational::one()))
    }

    pub fn scaled(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim_n);
        }
        Polynomial {
            dim_n: self.dim_n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = Polynomial::zero(self.dim_n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.add(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exponent: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.dim_n);
        for _ in 0..exponent {
            acc = acc.checked_mul(self).expect("same dimension");
        }
        acc
    }

    /// Partial derivative in coordinate `var` (0-based over `q..., p...`).
    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.dim_n);
        for (m, c) in &self.terms {
            let e = m.get(var);
            if e > 0 {
                out.add_term(m.with(var, e - 1), c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Canonical Poisson bracket `{self, other}`.
    pub fn poisson_bracket(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let n = self.dim_n;
        let mut out = Polynomial::zero(n);
        for k in 0..n {
            let a = self.derivative(k).checked_mul(&other.derivative(n + k))?;
            let b = self.derivative(n + k).checked_mul(&other.derivative(k))?;
            out = out.checked_add(&a)?.checked_sub(&b)?;
        }
        Ok(out)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), 2 * self.dim_n);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(point)
                    .fold(to_f64(c), |acc, (&e, &x)| acc * libm::pow(x, e as f64))
            })
            .sum()
    }

    pub fn eval_exact(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), 2 * self.dim_n);
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (&e, x) in m.exponents().iter().zip(point) {
                for _ in 0..e {
                    term *= x;
                }
            }
            total += term;
        }
        total
    }

    /// Name of coordinate `var` in the text format (`q1`, `p2`, ...).
    pub fn variable_name(dim_n: usize, var: usize) -> (char, usize) {
        if var < dim_n {
            ('q', var + 1)
        } else {
            ('p', var - dim_n + 1)
        }
    }
}

impl fmt::Display for Polynomial {
    /// Writes the polynomial in the parser's input syntax, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
        for (idx, (m, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mut factors: Vec<alloc::string::String> = Vec::new();
            if !mag.is_one() || m.degree() == 0 {
                factors.push(alloc::format!("{mag}"));
            }
            for (var, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let (sym, k) = Polynomial::variable_name(self.dim_n, var);
                if e == 1 {
                    factors.push(alloc::format!("{sym}{k}"));
                } else {
                    factors.push(alloc::format!("{sym}{k}^{e}"));
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}
