//! Exact arithmetic on vectors in raw Hermite coordinates.
//!
//! A [`RawVec`] maps multi-indices `a` to the coefficient of the tensor
//! Hermite polynomial `u_a = prod_v H_{a_v}(x_v)`. Multiplication by a
//! coordinate and differentiation act through the three-term recurrences, so
//! no quadrature or monomial re-expansion is involved.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::graded::HermiteKind;
use crate::poly::{MultiIndex, Polynomial};
use crate::scalar::{binomial, factorial, rat, Rational};

pub type RawVec = BTreeMap<MultiIndex, Rational>;

fn accumulate(out: &mut RawVec, key: MultiIndex, value: Rational) {
    if value.is_zero() {
        return;
    }
    match out.get_mut(&key) {
        Some(slot) => {
            *slot += value;
            if slot.is_zero() {
                out.remove(&key);
            }
        }
        None => {
            out.insert(key, value);
        }
    }
}

pub fn unit(index: &MultiIndex) -> RawVec {
    let mut v = RawVec::new();
    v.insert(index.clone(), Rational::one());
    v
}

pub fn add_scaled(acc: &mut RawVec, other: &RawVec, scale: &Rational) {
    for (k, c) in other {
        accumulate(acc, k.clone(), c * scale);
    }
}

/// `x_var * v`.
pub fn mul_var(kind: HermiteKind, v: &RawVec, var: usize) -> RawVec {
    let up = match kind {
        HermiteKind::Physicists => rat(1, 2),
        HermiteKind::Probabilists => Rational::one(),
    };
    let mut out = RawVec::new();
    for (m, c) in v {
        let a = m.get(var);
        accumulate(&mut out, m.with(var, a + 1), c * &up);
        if a > 0 {
            accumulate(&mut out, m.with(var, a - 1), c * Rational::from_integer(BigInt::from(a)));
        }
    }
    out
}

/// `d/dx_var v`.
pub fn diff(kind: HermiteKind, v: &RawVec, var: usize) -> RawVec {
    let factor = match kind {
        HermiteKind::Physicists => 2u32,
        HermiteKind::Probabilists => 1u32,
    };
    let mut out = RawVec::new();
    for (m, c) in v {
        let a = m.get(var);
        if a > 0 {
            accumulate(
                &mut out,
                m.with(var, a - 1),
                c * Rational::from_integer(BigInt::from(factor * a)),
            );
        }
    }
    out
}

/// `f * v` for a monomial-form polynomial `f`.
pub fn mul_poly(kind: HermiteKind, v: &RawVec, f: &Polynomial) -> RawVec {
    let mut out = RawVec::new();
    // Terms sharing a prefix of variable powers reuse the partial products.
    let mut cache: BTreeMap<MultiIndex, RawVec> = BTreeMap::new();
    for (m, c) in f.terms() {
        let part = cache.entry(m.clone()).or_insert_with(|| {
            let mut acc = v.clone();
            for (var, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    acc = mul_var(kind, &acc, var);
                }
            }
            acc
        });
        add_scaled(&mut out, part, c);
    }
    out
}

/// Linearization `u_a u_b = sum_c w_c u_c` of 1D Hermite polynomials:
/// `H_a H_b = sum_r 2^r r! C(a,r) C(b,r) H_{a+b-2r}`, and the same without
/// the `2^r` for `He`.
pub fn product_1d(kind: HermiteKind, a: u32, b: u32) -> Vec<(u32, Rational)> {
    (0..=a.min(b))
        .map(|r| {
            let mut w = factorial(r) * binomial(a, r) * binomial(b, r);
            if kind == HermiteKind::Physicists {
                w <<= r as usize;
            }
            (a + b - 2 * r, Rational::from_integer(w))
        })
        .collect()
}

/// `x * y` for two raw-coordinate vectors, through tensor linearization.
pub fn mul_raw(kind: HermiteKind, x: &RawVec, y: &RawVec) -> RawVec {
    let mut out = RawVec::new();
    for (mx, cx) in x {
        for (my, cy) in y {
            let mut partial: Vec<(Vec<u32>, Rational)> = vec![(Vec::with_capacity(mx.len()), cx * cy)];
            for v in 0..mx.len() {
                let lin = product_1d(kind, mx.get(v), my.get(v));
                let mut next = Vec::with_capacity(partial.len() * lin.len());
                for (e, c) in &partial {
                    for (d, w) in &lin {
                        let mut e2 = e.clone();
                        e2.push(*d);
                        next.push((e2, c * w));
                    }
                }
                partial = next;
            }
            for (e, c) in partial {
                accumulate(&mut out, MultiIndex::from_exponents(e), c);
            }
        }
    }
    out
}

/// Monomial coefficients of the 1D Hermite polynomial of degree `a`.
pub fn hermite_1d(kind: HermiteKind, a: u32) -> Vec<Rational> {
    // H_{k+1} = 2x H_k - 2k H_{k-1};  He_{k+1} = x He_k - k He_{k-1}
    let (lead, lower) = match kind {
        HermiteKind::Physicists => (2i64, 2i64),
        HermiteKind::Probabilists => (1, 1),
    };
    let mut prev: Vec<Rational> = vec![];
    let mut cur: Vec<Rational> = vec![Rational::one()];
    for k in 0..a {
        let mut next = vec![Rational::zero(); cur.len() + 1];
        for (d, c) in cur.iter().enumerate() {
            next[d + 1] += c * Rational::from_integer(BigInt::from(lead));
        }
        for (d, c) in prev.iter().enumerate() {
            next[d] -= c * Rational::from_integer(BigInt::from(lower * k as i64));
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// The raw tensor Hermite polynomial `u_index` in monomial form.
pub fn to_polynomial(kind: HermiteKind, dim_n: usize, index: &MultiIndex) -> Polynomial {
    let mut acc = Polynomial::one(dim_n);
    for (var, &a) in index.exponents().iter().enumerate() {
        let coeffs = hermite_1d(kind, a);
        let factor = Polynomial::from_terms(
            dim_n,
            coeffs.into_iter().enumerate().map(|(d, c)| {
                (MultiIndex::zero(2 * dim_n).with(var, d as u32), c)
            }),
        );
        acc = acc.checked_mul(&factor).expect("same dimension");
    }
    acc
}

/// Monomial form of a raw-coordinate vector.
pub fn raw_to_polynomial(kind: HermiteKind, dim_n: usize, v: &RawVec) -> Polynomial {
    let mut acc = Polynomial::zero(dim_n);
    for (m, c) in v {
        acc = acc
            .checked_add(&to_polynomial(kind, dim_n, m).scaled(c))
            .expect("same dimension");
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn hermite_polynomials() {
        // H_2 = 4x^2 - 2, H_3 = 8x^3 - 12x; He_3 = x^3 - 3x
        assert_eq!(hermite_1d(HermiteKind::Physicists, 2), vec![int(-2), int(0), int(4)]);
        assert_eq!(
            hermite_1d(HermiteKind::Physicists, 3),
            vec![int(0), int(-12), int(0), int(8)]
        );
        assert_eq!(
            hermite_1d(HermiteKind::Probabilists, 3),
            vec![int(0), int(-3), int(0), int(1)]
        );
    }

    #[test]
    fn recurrences_agree_with_monomial_products() {
        for kind in [HermiteKind::Physicists, HermiteKind::Probabilists] {
            let idx = MultiIndex::from_exponents(vec![2, 1]);
            let v = unit(&idx);
            let f = Polynomial::q(1, 1)
                .pow(2)
                .checked_add(&Polynomial::p(1, 1).scaled(&int(3)))
                .unwrap();
            let prod = mul_poly(kind, &v, &f);
            let direct = to_polynomial(kind, 1, &idx).checked_mul(&f).unwrap();
            assert_eq!(raw_to_polynomial(kind, 1, &prod), direct);
            let d = diff(kind, &v, 0);
            assert_eq!(raw_to_polynomial(kind, 1, &d), to_polynomial(kind, 1, &idx).derivative(0));
        }
    }

    #[test]
    fn linearization_matches_monomial_products() {
        for kind in [HermiteKind::Physicists, HermiteKind::Probabilists] {
            let a = MultiIndex::from_exponents(vec![3, 1, 0, 2]);
            let b = MultiIndex::from_exponents(vec![2, 0, 1, 2]);
            let prod = mul_raw(kind, &unit(&a), &unit(&b));
            let direct = to_polynomial(kind, 2, &a).checked_mul(&to_polynomial(kind, 2, &b)).unwrap();
            assert_eq!(raw_to_polynomial(kind, 2, &prod), direct);
        }
    }
}
