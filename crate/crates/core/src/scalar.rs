//! Exact and floating scalars.
//!
//! Matrices are stored in the frame of the *raw* (unnormalized) Hermite basis
//! `u_a`, where every entry is a complex rational. The orthonormal basis is
//! `e_a = u_a / sqrt(g_a)` for the Gram diagonal `g`, so an orthonormal entry is
//! `sqrt(g_i / g_j) * K_ij`. The map `K -> D K D^{-1}` is an algebra
//! isomorphism, which is why identities among products can be decided on the
//! raw rationals with zero tolerance. [`Scalar`] abstracts over this exact
//! storage and a float mode that stores orthonormal entries directly.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = BigRational;
pub type CRational = Complex<Rational>;
pub type Complex64 = Complex<f64>;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn real(value: Rational) -> CRational {
    Complex::new(value, Rational::zero())
}

pub fn complex_to_f64(value: &CRational) -> Complex64 {
    Complex::new(to_f64(&value.re), to_f64(&value.im))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Splits `n = s^2 * f` by trial division. `f` is square-free whenever `n`
/// has no repeated prime factor above the trial bound, which holds for the
/// factorial-and-power-of-two radicands produced by Hermite normalizations.
fn square_part(n: &BigUint) -> (BigUint, BigUint) {
    const TRIAL_BOUND: u32 = 100_000;
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    if rest.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut p: u32 = 2;
    while p <= TRIAL_BOUND {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut count = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            count += 1;
        }
        for _ in 0..count / 2 {
            square *= &pb;
        }
        if count % 2 == 1 {
            free *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        square *= root;
    } else {
        free *= rest;
    }
    (square, free)
}

/// An exact scalar `coeff * sqrt(radicand) * sqrt(pi)^sqrt_pi`.
///
/// The radicand is kept as a square-free positive integer so equal values
/// have equal representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    coeff: CRational,
    radicand: BigInt,
    sqrt_pi: i32,
}

impl Surd {
    pub fn zero() -> Self {
        Surd {
            coeff: <CRational as Zero>::zero(),
            radicand: BigInt::one(),
            sqrt_pi: 0,
        }
    }

    pub fn from_rational(value: Rational) -> Self {
        Surd::new(real(value), Rational::one(), 0)
    }

    /// `coeff * sqrt(radicand) * sqrt(pi)^sqrt_pi`; `radicand` must be
    /// non-negative.
    pub fn new(coeff: CRational, radicand: Rational, sqrt_pi: i32) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        if Zero::is_zero(&coeff) || radicand.is_zero() {
            return Surd::zero();
        }
        // sqrt(a/b) = sqrt(a*b) / b
        let numer = radicand.numer().magnitude() * radicand.denom().magnitude();
        let (square, free) = square_part(&numer);
        let factor = Rational::new(BigInt::from(square), radicand.denom().clone());
        Surd {
            coeff: coeff.scale(factor),
            radicand: BigInt::from(free),
            sqrt_pi,
        }
    }

    pub fn coeff(&self) -> &CRational {
        &self.coeff
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn sqrt_pi_power(&self) -> i32 {
        self.sqrt_pi
    }

    pub fn is_zero(&self) -> bool {
        Zero::is_zero(&self.coeff)
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        Surd::new(
            &self.coeff * &other.coeff,
            Rational::from_integer(&self.radicand * &other.radicand),
            self.sqrt_pi + other.sqrt_pi,
        )
    }

    pub fn checked_add(&self, other: &Surd) -> Result<Surd, Error> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.radicand != other.radicand || self.sqrt_pi != other.sqrt_pi {
            return Err(Error::IncommensurableSurds);
        }
        let coeff = &self.coeff + &other.coeff;
        if Zero::is_zero(&coeff) {
            return Ok(Surd::zero());
        }
        Ok(Surd {
            coeff,
            radicand: self.radicand.clone(),
            sqrt_pi: self.sqrt_pi,
        })
    }

    /// The value as a rational, if no radical or power of `pi` remains.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        (self.radicand.is_one() && self.sqrt_pi == 0 && self.coeff.im.is_zero())
            .then(|| self.coeff.re.clone())
    }

    pub fn to_complex64(&self) -> Complex64 {
        let scale = libm::sqrt(self.radicand.to_f64().unwrap_or(f64::NAN))
            * libm::pow(libm::sqrt(core::f64::consts::PI), self.sqrt_pi as f64);
        complex_to_f64(&self.coeff) * scale
    }

    pub fn to_f64(&self) -> f64 {
        self.to_complex64().re
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts: Vec<String> = Vec::new();
        if self.coeff.im.is_zero() {
            parts.push(alloc::format!("{}", self.coeff.re));
        } else if self.coeff.re.is_zero() {
            parts.push(alloc::format!("{}i", self.coeff.im));
        } else {
            parts.push(alloc::format!("({} + {}i)", self.coeff.re, self.coeff.im));
        }
        if !self.radicand.is_one() {
            parts.push(alloc::format!("sqrt({})", self.radicand));
        }
        if self.sqrt_pi != 0 {
            parts.push(alloc::format!("pi^({}/2)", self.sqrt_pi));
        }
        f.write_str(&parts.join("*"))
    }
}

/// Matrix scalar: exact raw-frame rationals or orthonormal-frame floats.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self);
    fn scaled(&self, c: &CRational) -> Self;
    /// Converts a raw-frame entry at `(i, j)` with Gram values `g_i`, `g_j`.
    fn from_raw(raw: &CRational, gram_row: &Rational, gram_col: &Rational) -> Self;
    /// Entry `(i, j)` of the adjoint, given entry `(j, i)` of the operator.
    fn adjoint_entry(value_ji: &Self, gram_i: &Rational, gram_j: &Rational) -> Self;
    /// The orthonormal-frame value of an entry stored at `(i, j)`.
    fn orthonormal(&self, gram_row: &Rational, gram_col: &Rational) -> Complex64;
}

fn gram_ratio_sqrt(gram_row: &Rational, gram_col: &Rational) -> f64 {
    libm::sqrt(to_f64(&(gram_row / gram_col)))
}

impl Scalar for CRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if b.im.is_zero() && a.im.is_zero() {
            self.re += &a.re * &b.re;
        } else {
            *self += a * b;
        }
    }
    fn scaled(&self, c: &CRational) -> Self {
        self * c
    }
    fn from_raw(raw: &CRational, _gram_row: &Rational, _gram_col: &Rational) -> Self {
        raw.clone()
    }
    fn adjoint_entry(value_ji: &Self, gram_i: &Rational, gram_j: &Rational) -> Self {
        value_ji.conj().scale(gram_j / gram_i)
    }
    fn orthonormal(&self, gram_row: &Rational, gram_col: &Rational) -> Complex64 {
        complex_to_f64(self) * gram_ratio_sqrt(gram_row, gram_col)
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn scaled(&self, c: &CRational) -> Self {
        self * complex_to_f64(c)
    }
    fn from_raw(raw: &CRational, gram_row: &Rational, gram_col: &Rational) -> Self {
        complex_to_f64(raw) * gram_ratio_sqrt(gram_row, gram_col)
    }
    fn adjoint_entry(value_ji: &Self, _gram_i: &Rational, _gram_j: &Rational) -> Self {
        value_ji.conj()
    }
    fn orthonormal(&self, _gram_row: &Rational, _gram_col: &Rational) -> Complex64 {
        *self
    }
}

/// `|z|` without relying on `std` floats.
pub fn abs64(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Absolute tolerance for float-mode identity checks.
pub const FLOAT_TOLERANCE: f64 = 1e-12;
