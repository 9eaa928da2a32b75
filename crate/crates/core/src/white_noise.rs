//! Finite truncation of the white-noise Poisson algebra.
//!
//! `K` field modes each carry two Gaussian coordinates `q_n`, `p_n`, giving
//! `2K` coordinates ordered `q_1..q_K, p_1..p_K`. A [`ChaosPoly`] is a finite
//! sum of Wick monomials `:xi^alpha:` (tensor probabilists' Hermite
//! polynomials), orthogonal with `<<:xi^alpha:, :xi^alpha:>> = alpha!`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::graded::{GradedBasis, HermiteKind};
use crate::hermite::{self, RawVec};
use crate::poly::MultiIndex;
use crate::quantizer::{build_q, build_qhat, build_r, QuantizationSetting};
use crate::report::Check;
use crate::scalar::{factorial, to_f64, Rational};
use crate::sparse::CoeffMatrix;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct WhiteNoiseConfig {
    modes: usize,
    cap: u32,
    lambda: Vec<Rational>,
    a_spectrum: Vec<f64>,
}

impl WhiteNoiseConfig {
    /// `a_spectrum` defaults to `a_n = 2n + 2` for 0-based `n`.
    pub fn new(modes: usize, cap: u32, lambda: Vec<Rational>, a_spectrum: Option<Vec<f64>>) -> Result<Self> {
        if modes == 0 || cap == 0 {
            return Err(Error::InvalidConfig("K and C must be positive".into()));
        }
        if lambda.len() != modes {
            return Err(Error::InvalidConfig(format!("expected {modes} lambda values, got {}", lambda.len())));
        }
        let a_spectrum = a_spectrum.unwrap_or_else(|| (0..modes).map(|n| 2.0 * n as f64 + 2.0).collect());
        if a_spectrum.len() != modes {
            return Err(Error::InvalidConfig(format!(
                "expected {modes} A-eigenvalues, got {}",
                a_spectrum.len()
            )));
        }
        if a_spectrum.iter().any(|&a| !(a > 1.0) || !a.is_finite()) {
            return Err(Error::InvalidConfig("A-eigenvalues must exceed 1".into()));
        }
        if a_spectrum.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidConfig("A-eigenvalues must be non-decreasing".into()));
        }
        Ok(WhiteNoiseConfig {
            modes,
            cap,
            lambda,
            a_spectrum,
        })
    }

    /// `lambda_n = 1` for every mode.
    pub fn unit_weights(modes: usize, cap: u32) -> Result<Self> {
        WhiteNoiseConfig::new(modes, cap, alloc::vec![Rational::one(); modes], None)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Cap on intermediate chaos orders.
    pub fn internal_cap(&self) -> u32 {
        2 * self.cap
    }

    pub fn lambda(&self) -> &[Rational] {
        &self.lambda
    }

    pub fn a_spectrum(&self) -> &[f64] {
        &self.a_spectrum
    }

    /// `||A^{-1}||` in operator norm.
    pub fn rho(&self) -> f64 {
        1.0 / self.a_spectrum.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `||A^{-1}||` in Hilbert-Schmidt norm.
    pub fn delta(&self) -> f64 {
        libm::sqrt(self.a_spectrum.iter().map(|a| 1.0 / (a * a)).sum())
    }

    /// Eigenvalue of `A` on coordinate `v`.
    fn a_of(&self, v: usize) -> f64 {
        self.a_spectrum[v % self.modes]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaosPoly {
    modes: usize,
    terms: RawVec,
}

fn accumulate(terms: &mut RawVec, key: MultiIndex, value: Rational) {
    if value.is_zero() {
        return;
    }
    let slot = terms.entry(key.clone()).or_insert_with(Rational::zero);
    *slot += value;
    if slot.is_zero() {
        terms.remove(&key);
    }
}

fn multi_factorial(m: &MultiIndex) -> BigInt {
    m.exponents().iter().map(|&a| factorial(a)).product()
}

impl ChaosPoly {
    pub fn zero(modes: usize) -> Self {
        ChaosPoly {
            modes,
            terms: RawVec::new(),
        }
    }

    pub fn constant(modes: usize, c: Rational) -> Self {
        ChaosPoly::wick_monomial(modes, MultiIndex::zero(2 * modes), c)
    }

    pub fn one(modes: usize) -> Self {
        ChaosPoly::constant(modes, Rational::one())
    }

    /// `c :xi^alpha:`.
    pub fn wick_monomial(modes: usize, alpha: MultiIndex, c: Rational) -> Self {
        assert_eq!(alpha.len(), 2 * modes, "multi-index length");
        let mut terms = RawVec::new();
        accumulate(&mut terms, alpha, c);
        ChaosPoly { modes, terms }
    }

    /// First-chaos coordinate `xi_v` (0-based over `2K`).
    pub fn coordinate(modes: usize, v: usize) -> Self {
        ChaosPoly::wick_monomial(modes, MultiIndex::unit(2 * modes, v), Rational::one())
    }

    /// `xi_{q_n}`, `n` 1-based.
    pub fn q(modes: usize, n: usize) -> Self {
        ChaosPoly::coordinate(modes, n - 1)
    }

    /// `xi_{p_n}`, `n` 1-based.
    pub fn p(modes: usize, n: usize) -> Self {
        ChaosPoly::coordinate(modes, modes + n - 1)
    }

    pub fn from_terms<I>(modes: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut out = ChaosPoly::zero(modes);
        for (m, c) in terms {
            assert_eq!(m.len(), 2 * modes, "multi-index length");
            accumulate(&mut out.terms, m, c);
        }
        out
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> &RawVec {
        &self.terms
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Highest chaos order present (0 for the zero element).
    pub fn order(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    fn check_modes(&self, other: &ChaosPoly) -> Result<()> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch {
                left: self.modes,
                right: other.modes,
            });
        }
        Ok(())
    }

    fn check_order(self, cap: u32) -> Result<ChaosPoly> {
        let order = self.order();
        if order > cap {
            return Err(Error::OrderOverflow { order, cap });
        }
        Ok(self)
    }

    pub fn checked_add(&self, other: &ChaosPoly) -> Result<ChaosPoly> {
        self.check_modes(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            accumulate(&mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &ChaosPoly) -> Result<ChaosPoly> {
        self.checked_add(&other.scaled(&-Rational::one()))
    }

    pub fn scaled(&self, c: &Rational) -> ChaosPoly {
        let mut out = ChaosPoly::zero(self.modes);
        for (m, v) in &self.terms {
            accumulate(&mut out.terms, m.clone(), v * c);
        }
        out
    }

    /// `d/d xi_v`, acting as `alpha_v :xi^{alpha - e_v}:`.
    pub fn derivative(&self, v: usize) -> ChaosPoly {
        let mut out = ChaosPoly::zero(self.modes);
        for (m, c) in &self.terms {
            let a = m.get(v);
            if a > 0 {
                accumulate(&mut out.terms, m.with(v, a - 1), c * Rational::from_integer(a.into()));
            }
        }
        out
    }

    /// `d_u Phi` for a direction `u` over the `2K` coordinates.
    pub fn directional_derivative(&self, u: &[Rational]) -> Result<ChaosPoly> {
        if u.len() != 2 * self.modes {
            return Err(Error::DimensionMismatch {
                left: u.len(),
                right: 2 * self.modes,
            });
        }
        let mut out = ChaosPoly::zero(self.modes);
        for (v, c) in u.iter().enumerate() {
            if !c.is_zero() {
                out = out.checked_add(&self.derivative(v).scaled(c))?;
            }
        }
        Ok(out)
    }

    fn product_uncapped(&self, other: &ChaosPoly) -> Result<ChaosPoly> {
        self.check_modes(other)?;
        Ok(ChaosPoly {
            modes: self.modes,
            terms: hermite::mul_raw(HermiteKind::Probabilists, &self.terms, &other.terms),
        })
    }

    /// Pointwise product, a result order above `cap` is an error.
    pub fn pointwise_product(&self, other: &ChaosPoly, cap: u32) -> Result<ChaosPoly> {
        self.product_uncapped(other)?.check_order(cap)
    }

    /// `:xi^alpha: <> :xi^beta: = :xi^{alpha+beta}:`.
    pub fn wick_product(&self, other: &ChaosPoly, cap: u32) -> Result<ChaosPoly> {
        self.check_modes(other)?;
        let mut out = ChaosPoly::zero(self.modes);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                accumulate(&mut out.terms, a.add(b), c * d);
            }
        }
        out.check_order(cap)
    }

    /// `S(Phi)(xi) = sum_alpha c_alpha xi^alpha`.
    pub fn s_transform(&self, xi: &[Rational]) -> Result<Rational> {
        if xi.len() != 2 * self.modes {
            return Err(Error::DimensionMismatch {
                left: xi.len(),
                right: 2 * self.modes,
            });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    term *= &xi[v];
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn s_transform_f64(&self, xi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(xi)
                    .fold(to_f64(c), |acc, (&e, &x)| acc * libm::pow(x, e as f64))
            })
            .sum()
    }

    /// `<<Phi, Psi>> = sum_alpha alpha! c_alpha d_alpha`.
    pub fn duality(&self, other: &ChaosPoly) -> Result<Rational> {
        self.check_modes(other)?;
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            if let Some(d) = other.terms.get(m) {
                acc += c * d * Rational::from_integer(multi_factorial(m));
            }
        }
        Ok(acc)
    }

    /// `||Phi||_{p,beta}^2 = sum_alpha (|alpha|!)^beta alpha! prod_v a_v^{2 p alpha_v} c_alpha^2`.
    pub fn hida_norm(&self, p: f64, beta: f64, cfg: &WhiteNoiseConfig) -> f64 {
        let sum: f64 = self
            .terms
            .iter()
            .map(|(m, c)| {
                let order_fact = factorial(m.degree()).to_f64().unwrap_or(f64::INFINITY);
                let weight: f64 = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .map(|(v, &e)| libm::pow(cfg.a_of(v), 2.0 * p * e as f64))
                    .product();
                let c = to_f64(c);
                libm::pow(order_fact, beta) * multi_factorial(m).to_f64().unwrap_or(f64::INFINITY) * weight * c * c
            })
            .sum();
        libm::sqrt(sum)
    }
}

impl fmt::Display for ChaosPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (t, (m, c)) in self.terms.iter().rev().enumerate() {
            if t == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            let factors: Vec<alloc::string::String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    let (name, idx) = if v < self.modes { ('q', v + 1) } else { ('p', v - self.modes + 1) };
                    if e == 1 {
                        format!("{name}{idx}")
                    } else {
                        format!("{name}{idx}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", c.abs())?;
            } else {
                write!(f, "{} * :{}:", c.abs(), factors.join(" "))?;
            }
        }
        Ok(())
    }
}

fn bracket_with(phi: &ChaosPoly, psi: &ChaosPoly, cfg: &WhiteNoiseConfig, cap: Option<u32>) -> Result<ChaosPoly> {
    phi.check_modes(psi)?;
    if phi.modes != cfg.modes {
        return Err(Error::DimensionMismatch {
            left: phi.modes,
            right: cfg.modes,
        });
    }
    let k = cfg.modes;
    let mut out = ChaosPoly::zero(k);
    for n in 0..k {
        let lam = &cfg.lambda[n];
        if lam.is_zero() {
            continue;
        }
        let a = phi.derivative(n).product_uncapped(&psi.derivative(k + n))?;
        let b = phi.derivative(k + n).product_uncapped(&psi.derivative(n))?;
        out = out.checked_add(&a.checked_sub(&b)?.scaled(lam))?;
    }
    match cap {
        Some(c) => out.check_order(c),
        None => Ok(out),
    }
}

/// `{Phi, Psi}_Q = sum_n lambda_n (d_{q_n} Phi d_{p_n} Psi - d_{p_n} Phi d_{q_n} Psi)`,
/// capped at the internal order.
pub fn wn_bracket(phi: &ChaosPoly, psi: &ChaosPoly, cfg: &WhiteNoiseConfig) -> Result<ChaosPoly> {
    bracket_with(phi, psi, cfg, Some(cfg.internal_cap()))
}

/// Ratio of the bracket's first half in `||.||_p` to
/// `max_n a_n^{-q} sum_n |lambda_n| ||Phi||_{p+q} ||Psi||_{p+q}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `None` when the estimate is vacuous (a constant argument).
    pub ratio: Option<f64>,
    pub check: Check,
}

pub fn estimate_check(phi: &ChaosPoly, psi: &ChaosPoly, p: f64, q: f64, cfg: &WhiteNoiseConfig) -> Result<EstimateReport> {
    if !(q > 0.0) || !(p >= 0.0) {
        return Err(Error::InvalidConfig("estimate needs q > 0 and p >= 0".into()));
    }
    let k = cfg.modes;
    let mut first = ChaosPoly::zero(k);
    for n in 0..k {
        let term = phi.derivative(n).pointwise_product(&psi.derivative(k + n), cfg.internal_cap())?;
        first = first.checked_add(&term.scaled(&cfg.lambda[n]))?;
    }
    let lhs = first.hida_norm(p, 0.0, cfg);
    let max_e = cfg.a_spectrum.iter().map(|&a| libm::pow(a, -q)).fold(0.0, f64::max);
    let lambda_sum: f64 = cfg.lambda.iter().map(|l| to_f64(&l.abs())).sum();
    let rhs = max_e * lambda_sum * phi.hida_norm(p + q, 0.0, cfg) * psi.hida_norm(p + q, 0.0, cfg);
    let vacuous = phi.is_constant() || psi.is_constant() || rhs == 0.0;
    let ratio = (!vacuous).then(|| lhs / rhs);
    let finite = ratio.is_none_or(f64::is_finite);
    let check = Check {
        identity: "bracket-estimate.ratio-finite".into(),
        n: k,
        size: 0,
        window: 0,
        max_abs_deviation: ratio.unwrap_or(0.0),
        exact: false,
        pass: finite,
        asserted: true,
    };
    Ok(EstimateReport { lhs, rhs, ratio, check })
}

/// The white-noise algebra with basis `b_alpha = :xi^alpha: / sqrt(alpha!)`.
#[derive(Clone, Debug)]
pub struct WhiteNoiseSpace {
    cfg: WhiteNoiseConfig,
    graded: Arc<GradedBasis>,
}

impl WhiteNoiseSpace {
    /// `size` basis elements in graded order.
    pub fn new(cfg: WhiteNoiseConfig, size: usize) -> Result<Self> {
        let graded = GradedBasis::new(2 * cfg.modes, size, HermiteKind::Probabilists)?;
        Ok(WhiteNoiseSpace {
            cfg,
            graded: Arc::new(graded),
        })
    }

    /// Smallest basis holding every Wick monomial of order at most `level`.
    pub fn with_level(cfg: WhiteNoiseConfig, level: u32) -> Result<Self> {
        let size = crate::graded::count_up_to(2 * cfg.modes, level);
        WhiteNoiseSpace::new(cfg, size)
    }

    pub fn config(&self) -> &WhiteNoiseConfig {
        &self.cfg
    }

    fn element(&self, j: usize) -> Result<ChaosPoly> {
        self.graded.check_index(j)?;
        Ok(ChaosPoly::wick_monomial(self.cfg.modes, self.graded.multi_index(j).clone(), Rational::one()))
    }
}

impl QuantizationSetting for WhiteNoiseSpace {
    type Observable = ChaosPoly;
    type Prepared = ChaosPoly;

    fn graded(&self) -> &Arc<GradedBasis> {
        &self.graded
    }

    fn pairs(&self) -> usize {
        self.cfg.modes
    }

    fn degree(&self, h: &ChaosPoly) -> u32 {
        h.order()
    }

    fn prepare(&self, h: &ChaosPoly) -> Result<ChaosPoly> {
        if h.modes != self.cfg.modes {
            return Err(Error::DimensionMismatch {
                left: h.modes,
                right: self.cfg.modes,
            });
        }
        let level = self.graded.full_level().unwrap_or(0);
        if h.order() > level {
            return Err(Error::TruncationOverflow {
                degree: h.order(),
                cap: level,
            });
        }
        h.clone().check_order(self.cfg.internal_cap())
    }

    // Column assembly multiplies by basis elements of any order, so these
    // two skip the chaos cap; rows outside the basis are dropped afterward.
    fn bracket_column(&self, h: &ChaosPoly, j: usize) -> Result<RawVec> {
        Ok(bracket_with(h, &self.element(j)?, &self.cfg, None)?.terms)
    }

    fn product_column(&self, h: &ChaosPoly, j: usize) -> Result<RawVec> {
        Ok(h.product_uncapped(&self.element(j)?)?.terms)
    }

    fn one(&self) -> ChaosPoly {
        ChaosPoly::one(self.cfg.modes)
    }

    fn coordinate(&self, a: usize) -> ChaosPoly {
        ChaosPoly::coordinate(self.cfg.modes, a)
    }

    fn add(&self, a: &ChaosPoly, b: &ChaosPoly) -> Result<ChaosPoly> {
        a.checked_add(b)
    }

    fn scale(&self, a: &ChaosPoly, c: &Rational) -> ChaosPoly {
        a.scaled(c)
    }

    fn mul(&self, a: &ChaosPoly, b: &ChaosPoly) -> Result<ChaosPoly> {
        a.pointwise_product(b, self.cfg.internal_cap())
    }

    fn bracket(&self, a: &ChaosPoly, b: &ChaosPoly) -> Result<ChaosPoly> {
        wn_bracket(a, b, &self.cfg)
    }
}

/// `Q(Phi)`, `R(Phi)` and `Qhat(Phi)` on the first `size` basis elements.
pub fn wn_quantize(phi: &ChaosPoly, cfg: &WhiteNoiseConfig, size: usize) -> Result<(CoeffMatrix, CoeffMatrix, CoeffMatrix)> {
    if phi.order() > cfg.cap {
        return Err(Error::OrderOverflow {
            order: phi.order(),
            cap: cfg.cap,
        });
    }
    let space = WhiteNoiseSpace::new(cfg.clone(), size)?;
    Ok((build_q(&space, phi)?, build_r(&space, phi)?, build_qhat(&space, phi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Weight;
    use crate::quantizer::{check_ccr_analogue, check_identity, check_lie_bracket, verify_lemma, Arithmetic};
    use crate::scalar::{int, rat};
    use crate::testkit;
    use alloc::vec;
    use proptest::prelude::*;

    const K: usize = 4;
    const C: u32 = 3;

    fn cfg() -> WhiteNoiseConfig {
        WhiteNoiseConfig::new(K, C, vec![int(1), rat(1, 2), rat(1, 3), rat(2, 5)], None).unwrap()
    }

    fn mono(e: &[u32], c: Rational) -> ChaosPoly {
        let mut full = e.to_vec();
        full.resize(2 * K, 0);
        ChaosPoly::wick_monomial(K, MultiIndex::from_exponents(full), c)
    }

    #[test]
    fn derivative_examples() {
        assert!(ChaosPoly::one(K).derivative(0).is_zero());
        let x = mono(&[2], int(1));
        assert_eq!(x.derivative(0), mono(&[1], int(2)));
    }

    #[test]
    fn bracket_examples() {
        let c = cfg();
        let b = wn_bracket(&ChaosPoly::q(K, 1), &ChaosPoly::p(K, 1), &c).unwrap();
        assert_eq!(b, ChaosPoly::constant(K, int(1)));
        let phi = mono(&[1, 1, 0, 0, 1, 0, 0, 1], rat(3, 2));
        assert!(wn_bracket(&phi, &phi, &c).unwrap().is_zero());
        // {xi_q1 xi_q2, xi_p2} = lambda_2 xi_q1
        let q1q2 = ChaosPoly::q(K, 1).pointwise_product(&ChaosPoly::q(K, 2), 6).unwrap();
        let b = wn_bracket(&q1q2, &ChaosPoly::p(K, 2), &c).unwrap();
        assert_eq!(b, ChaosPoly::q(K, 1).scaled(&rat(1, 2)));
        let zero = WhiteNoiseConfig::new(K, C, vec![int(0); K], None).unwrap();
        assert!(wn_bracket(&phi, &ChaosPoly::p(K, 1), &zero).unwrap().is_zero());
    }

    #[test]
    fn product_examples() {
        let x = ChaosPoly::q(K, 1);
        let xx = x.pointwise_product(&x, 6).unwrap();
        assert_eq!(xx, mono(&[2], int(1)).checked_add(&ChaosPoly::one(K)).unwrap());
        assert_eq!(x.wick_product(&x, 6).unwrap(), mono(&[2], int(1)));
        let phi = mono(&[1, 0, 2], rat(-2, 3));
        assert_eq!(phi.pointwise_product(&ChaosPoly::one(K), 6).unwrap(), phi);
        assert_eq!(phi.wick_product(&ChaosPoly::one(K), 6).unwrap(), phi);
        let odd = mono(&[1, 0, 2], int(1)).pointwise_product(&mono(&[0, 2], int(1)), 6).unwrap();
        assert!(odd.terms().keys().all(|m| m.degree() % 2 == 1));
        assert_eq!(
            mono(&[3], int(1)).pointwise_product(&mono(&[4], int(1)), 6).unwrap_err(),
            Error::OrderOverflow { order: 7, cap: 6 }
        );
    }

    #[test]
    fn hermite_product_by_quadrature() {
        // He_1 He_1 = He_2 + 1 and He_2 He_3 against the standard Gaussian
        let one_d = |a: u32, x: f64| -> f64 {
            let coeffs = hermite::hermite_1d(HermiteKind::Probabilists, a);
            coeffs.iter().enumerate().map(|(d, c)| to_f64(c) * x.powi(d as i32)).sum()
        };
        let prod = mono(&[2], int(1)).pointwise_product(&mono(&[3], int(1)), 6).unwrap();
        for (m, c) in prod.terms() {
            let k = m.get(0);
            let oracle = testkit::quad(1, Weight::StandardGaussian, &|x| one_d(2, x[0]) * one_d(3, x[0]) * one_d(k, x[0]))
                / factorial(k).to_f64().unwrap();
            assert!(testkit::rel_close(to_f64(c), oracle, 1e-9));
        }
    }

    #[test]
    fn s_transform_and_norms() {
        let c = cfg();
        let xi: Vec<Rational> = (0..2 * K).map(|v| rat(v as i64 + 1, 3)).collect();
        assert_eq!(ChaosPoly::one(K).s_transform(&xi).unwrap(), int(1));
        assert_eq!(ChaosPoly::q(K, 2).s_transform(&xi).unwrap(), xi[1].clone());
        assert_eq!(mono(&[2], int(1)).s_transform(&xi).unwrap(), &xi[0] * &xi[0]);
        assert_eq!(ChaosPoly::one(K).hida_norm(1.5, 0.5, &c), 1.0);
        assert_eq!(ChaosPoly::q(K, 1).hida_norm(0.0, 0.0, &c), 1.0);
        assert!((ChaosPoly::q(K, 1).hida_norm(1.5, 0.0, &c) - 2f64.powf(1.5)).abs() < 1e-12);
        assert!((c.rho() - 0.5).abs() < 1e-15);
        let d: f64 = [2.0f64, 4.0, 6.0, 8.0].iter().map(|a| a.powi(-2)).sum::<f64>().sqrt();
        assert!((c.delta() - d).abs() < 1e-15);
        // L^2 norm matches the duality pairing
        let phi = mono(&[2, 1], int(3)).checked_add(&mono(&[0, 0, 1], rat(1, 2))).unwrap();
        let l2 = to_f64(&phi.duality(&phi).unwrap()).sqrt();
        assert!((phi.hida_norm(0.0, 0.0, &c) - l2).abs() < 1e-12);
    }

    #[test]
    fn duality_orthonormal() {
        let space = WhiteNoiseSpace::with_level(cfg(), 2).unwrap();
        let g = space.graded().clone();
        for i in 0..g.len() {
            for j in 0..g.len() {
                let a = space.element(i).unwrap();
                let b = space.element(j).unwrap();
                // squared pairing of the normalized elements
                let normalized = a.duality(&b).unwrap() * a.duality(&b).unwrap() / (g.gram(i) * g.gram(j));
                assert_eq!(normalized, if i == j { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn estimate() {
        let c = cfg();
        let phi = mono(&[1, 1, 0, 0, 1], int(1));
        let vac = estimate_check(&ChaosPoly::one(K), &phi, 0.0, 1.0, &c).unwrap();
        assert!(vac.ratio.is_none() && vac.check.pass);
        let rep = estimate_check(&phi, &mono(&[0, 0, 0, 0, 2, 1], int(1)), 0.0, 1.0, &c).unwrap();
        assert!(rep.ratio.unwrap().is_finite() && rep.check.pass);
    }

    #[test]
    fn quantization_identities() {
        let c = cfg();
        let space = WhiteNoiseSpace::with_level(c.clone(), 3).unwrap();
        assert!(check_identity(&space, Arithmetic::Exact).unwrap().pass);
        let f = ChaosPoly::q(K, 1).checked_add(&mono(&[0, 0, 0, 0, 0, 1], int(2))).unwrap();
        let g = ChaosPoly::p(K, 1);
        for check in verify_lemma(&space, &f, &g, Arithmetic::Exact).unwrap() {
            assert!(check.pass, "{check:?}");
        }
        let lie = check_lie_bracket(&space, &f, &g, Arithmetic::Exact).unwrap();
        assert!(lie[1].pass);
        let ccr = check_ccr_analogue(&space, Arithmetic::Exact).unwrap();
        assert!(ccr.iter().filter(|c| c.identity.ends_with(".expanded")).all(|c| c.pass));
        let (q, r, qh) = wn_quantize(&ChaosPoly::one(K), &c, 45).unwrap();
        assert_eq!(q.nnz(), 0);
        assert!(r.compare(&qh).unwrap().exact_zero);
    }

    fn arb_chaos(max_order: u32) -> impl Strategy<Value = ChaosPoly> {
        proptest::collection::vec((proptest::collection::vec(0u32..=max_order, 2 * K), -3i64..=3, 1i64..=2), 1..4)
            .prop_map(move |terms| {
                ChaosPoly::from_terms(
                    K,
                    terms.into_iter().map(|(mut e, a, b)| {
                        while e.iter().sum::<u32>() > max_order {
                            let k = e.iter().position(|&x| x > 0).unwrap();
                            e[k] -= 1;
                        }
                        (MultiIndex::from_exponents(e), rat(a, b))
                    }),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn poisson_axioms(a in arb_chaos(2), b in arb_chaos(2), d in arb_chaos(2)) {
            let c = cfg();
            let ab = wn_bracket(&a, &b, &c).unwrap();
            prop_assert_eq!(ab.scaled(&int(-1)), wn_bracket(&b, &a, &c).unwrap());
            let sum = a.checked_add(&d.scaled(&rat(2, 3))).unwrap();
            let lin = wn_bracket(&sum, &b, &c).unwrap();
            prop_assert_eq!(lin, ab.checked_add(&wn_bracket(&d, &b, &c).unwrap().scaled(&rat(2, 3))).unwrap());
            // Leibniz with the uncapped product
            let bd = b.product_uncapped(&d).unwrap();
            let lhs = bracket_with(&a, &bd, &c, None).unwrap();
            let rhs = bracket_with(&a, &b, &c, None).unwrap().product_uncapped(&d).unwrap()
                .checked_add(&b.product_uncapped(&bracket_with(&a, &d, &c, None).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            // Jacobi
            let j = bracket_with(&a, &bracket_with(&b, &d, &c, None).unwrap(), &c, None).unwrap()
                .checked_add(&bracket_with(&b, &bracket_with(&d, &a, &c, None).unwrap(), &c, None).unwrap()).unwrap()
                .checked_add(&bracket_with(&d, &bracket_with(&a, &b, &c, None).unwrap(), &c, None).unwrap()).unwrap();
            prop_assert!(j.is_zero());
        }

        #[test]
        fn derivative_is_a_derivation(a in arb_chaos(3), b in arb_chaos(3), v in 0usize..2 * K) {
            let ab = a.pointwise_product(&b, 6).unwrap();
            let rhs = a.derivative(v).pointwise_product(&b, 6).unwrap()
                .checked_add(&a.pointwise_product(&b.derivative(v), 6).unwrap()).unwrap();
            prop_assert_eq!(ab.derivative(v), rhs);
        }

        #[test]
        fn wick_and_s_transform(a in arb_chaos(3), b in arb_chaos(3), seed in proptest::collection::vec(-20i64..20, 2 * K)) {
            let xi: Vec<Rational> = seed.iter().map(|&s| rat(s, 7)).collect();
            let w = a.wick_product(&b, 6).unwrap();
            prop_assert_eq!(w.s_transform(&xi).unwrap(), a.s_transform(&xi).unwrap() * b.s_transform(&xi).unwrap());
        }

        #[test]
        fn product_associative_commutative(a in arb_chaos(2), b in arb_chaos(2), d in arb_chaos(2)) {
            let ab = a.pointwise_product(&b, 6).unwrap();
            prop_assert_eq!(&ab, &b.pointwise_product(&a, 6).unwrap());
            prop_assert_eq!(ab.pointwise_product(&d, 6).unwrap(), a.pointwise_product(&b.pointwise_product(&d, 6).unwrap(), 6).unwrap());
        }

        #[test]
        fn hida_monotone(a in arb_chaos(3), p in 0.0f64..2.0, dp in 0.0f64..2.0, beta in 0.0f64..0.99) {
            let c = cfg();
            prop_assert!(a.hida_norm(p, beta, &c) <= a.hida_norm(p + dp, beta, &c) * (1.0 + 1e-14));
        }
    }
}
