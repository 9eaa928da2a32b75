//! Canonical commutation relations from the Hermite-basis quantization.
//!
//! Slots `a = 2i` carry `(Q(q_i), R(p_i))` and slots `a = 2i + 1` carry
//! `(Q(p_i), R(q_i))` for `i = 1..=n`. With the Gram-normalized adjoint,
//! `R` of a coordinate is `kappa (-1)^a (Q_a + Q_a^*)` where `kappa = 1`
//! for the standard Gaussian and `kappa = 1/2` for `e^{-|x|^2}`, and
//! `[Q_a, Q_b^*] = delta_ab / kappa`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::basis::Weight;
use crate::error::Error;
use crate::poly::Polynomial;
use crate::quantizer::{build_q, build_r, PhaseSpace, QuantizationSetting};
use crate::report::Check;
use crate::scalar::{int, rat, real, Rational};
use crate::sparse::CoeffMatrix;
use crate::Result;

#[derive(Clone, Debug)]
pub struct CCRFamily {
    space: PhaseSpace,
    kappa: Rational,
    /// Indexed by `a - 2`.
    q_ops: Vec<CoeffMatrix>,
    q_stars: Vec<CoeffMatrix>,
    p_ops: Vec<CoeffMatrix>,
}

fn slot_observables(n: usize, a: usize) -> (Polynomial, Polynomial) {
    let i = a / 2;
    if a % 2 == 0 {
        (Polynomial::q(n, i), Polynomial::p(n, i))
    } else {
        (Polynomial::p(n, i), Polynomial::q(n, i))
    }
}

fn sign(a: usize) -> Rational {
    if a % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn build_ccr(space: &PhaseSpace) -> Result<CCRFamily> {
    let level = space.graded().full_level().unwrap_or(0);
    if level < 1 {
        return Err(Error::EmptyWindow { shortfall: 1 - level });
    }
    let n = space.pairs();
    let kappa = match space.basis().spec().weight {
        Weight::StandardGaussian => Rational::one(),
        Weight::Unnormalized => rat(1, 2),
    };
    let mut q_ops = Vec::new();
    let mut q_stars = Vec::new();
    let mut p_ops = Vec::new();
    for a in 2..=2 * n + 1 {
        let (qo, po) = slot_observables(n, a);
        let q = build_q(space, &qo)?;
        q_stars.push(q.adjoint());
        q_ops.push(q);
        p_ops.push(build_r(space, &po)?);
    }
    Ok(CCRFamily {
        space: space.clone(),
        kappa,
        q_ops,
        q_stars,
        p_ops,
    })
}

impl CCRFamily {
    pub fn n(&self) -> usize {
        self.space.pairs()
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }

    /// Slot numbers `2..=2n+1`.
    pub fn slots(&self) -> core::ops::RangeInclusive<usize> {
        2..=2 * self.n() + 1
    }

    pub fn q_op(&self, a: usize) -> &CoeffMatrix {
        &self.q_ops[a - 2]
    }

    pub fn q_star(&self, a: usize) -> &CoeffMatrix {
        &self.q_stars[a - 2]
    }

    pub fn p_op(&self, a: usize) -> &CoeffMatrix {
        &self.p_ops[a - 2]
    }

    fn identity(&self) -> CoeffMatrix {
        CoeffMatrix::identity(self.space.graded().clone())
    }

    fn scaled_identity(&self, c: Rational) -> CoeffMatrix {
        self.identity().scaled(&real(c))
    }

    fn check(&self, lhs: &CoeffMatrix, rhs: &CoeffMatrix, name: String) -> Result<Check> {
        Ok(Check::from_deviation(name, self.n(), lhs.size(), &lhs.compare(rhs)?))
    }
}

/// `[Q_a, P_b] = (-1)^a delta_ab`, `[Q_a, Q_b] = 0` and `[P_a, P_b] = 0`.
pub fn verify_relations(fam: &CCRFamily) -> Result<Vec<Check>> {
    let zero = CoeffMatrix::zero(fam.space.graded().clone());
    let mut checks = Vec::new();
    for a in fam.slots() {
        for b in fam.slots() {
            let expected = if a == b { fam.scaled_identity(sign(a)) } else { zero.clone() };
            checks.push(fam.check(&fam.q_op(a).commutator(fam.p_op(b))?, &expected, format!("CCR.[Q{a},P{b}]"))?);
            checks.push(fam.check(&fam.q_op(a).commutator(fam.q_op(b))?, &zero, format!("CCR.[Q{a},Q{b}]"))?);
            checks.push(fam.check(&fam.p_op(a).commutator(fam.p_op(b))?, &zero, format!("CCR.[P{a},P{b}]"))?);
        }
    }
    Ok(checks)
}

/// `P_a = (-1)^a (Q_a + Q_a^*)` on the window, with the measure factor
/// `kappa` reported separately when it differs from 1.
pub fn verify_adjoint_relation(fam: &CCRFamily) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for a in fam.slots() {
        let sum = fam.q_op(a).plus(fam.q_star(a))?;
        let literal = sum.scaled(&real(sign(a)));
        checks.push(fam.check(fam.p_op(a), &literal, format!("CCR.P{a}=(-1)^a(Q{a}+Q{a}^*)"))?);
        if !fam.kappa.is_one() {
            let scaled = sum.scaled(&real(sign(a) * &fam.kappa));
            checks.push(
                fam.check(fam.p_op(a), &scaled, format!("CCR.P{a}=kappa(-1)^a(Q{a}+Q{a}^*)"))?
                    .informational(),
            );
        }
        // (Q^*)^* = Q
        checks.push(fam.check(&fam.q_star(a).adjoint(), fam.q_op(a), format!("CCR.adjoint-involution[Q{a}]"))?);
    }
    Ok(checks)
}

/// `[Q_a, Q_b] = [Q_a^*, Q_b^*] = 0`, `[Q_a, Q_b^*] = delta_ab` and the
/// consequence `[Q_a^* Q_a, Q_a] = -Q_a`.
pub fn verify_ccr_starred(fam: &CCRFamily) -> Result<Vec<Check>> {
    let zero = CoeffMatrix::zero(fam.space.graded().clone());
    let inv_kappa = fam.kappa.recip();
    let mut checks = Vec::new();
    for a in fam.slots() {
        for b in fam.slots() {
            checks.push(fam.check(&fam.q_star(a).commutator(fam.q_star(b))?, &zero, format!("CCR.[Q{a}^*,Q{b}^*]"))?);
            let mixed = fam.q_op(a).commutator(fam.q_star(b))?;
            let expected = if a == b { fam.identity() } else { zero.clone() };
            checks.push(fam.check(&mixed, &expected, format!("CCR.[Q{a},Q{b}^*]"))?);
            if a == b && !fam.kappa.is_one() {
                checks.push(
                    fam.check(&mixed, &fam.scaled_identity(inv_kappa.clone()), format!("CCR.[Q{a},Q{b}^*]=1/kappa"))?
                        .informational(),
                );
            }
        }
        let number = fam.q_star(a).product(fam.q_op(a))?;
        let lhs = number.commutator(fam.q_op(a))?;
        checks.push(fam.check(&lhs, &fam.q_op(a).scaled(&real(int(-1))), format!("CCR.[Q{a}^*Q{a},Q{a}]=-Q{a}"))?);
        if !fam.kappa.is_one() {
            let scaled = fam.q_op(a).scaled(&real(-inv_kappa.clone()));
            checks.push(
                fam.check(&lhs, &scaled, format!("CCR.[Q{a}^*Q{a},Q{a}]=-Q{a}/kappa"))?.informational(),
            );
        }
    }
    Ok(checks)
}

/// A normal-ordered polynomial in `Q_a^*` and `Q_a`: each word lists its
/// starred slots, then its plain slots, both sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NcPoly {
    terms: BTreeMap<(Vec<usize>, Vec<usize>), Rational>,
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = NcPoly::zero();
        p.add_term(Vec::new(), Vec::new(), c);
        p
    }

    pub fn letter(slot: usize, star: bool) -> Self {
        let mut p = NcPoly::zero();
        if star {
            p.add_term(alloc::vec![slot], Vec::new(), Rational::one());
        } else {
            p.add_term(Vec::new(), alloc::vec![slot], Rational::one());
        }
        p
    }

    fn add_term(&mut self, starred: Vec<usize>, plain: Vec<usize>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (starred, plain);
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &[usize], &Rational)> {
        self.terms.iter().map(|((s, p), c)| (s.as_slice(), p.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Longest word.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|(s, p)| s.len() + p.len()).max().unwrap_or(0)
    }

    pub fn plus(&self, other: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for ((s, p), c) in &other.terms {
            out.add_term(s.clone(), p.clone(), c.clone());
        }
        out
    }

    pub fn scaled(&self, c: &Rational) -> NcPoly {
        let mut out = NcPoly::zero();
        for ((s, p), v) in &self.terms {
            out.add_term(s.clone(), p.clone(), v * c);
        }
        out
    }

    /// Product, re-normal-ordered with `Q_a Q_b^* = Q_b^* Q_a + delta_ab / kappa`.
    pub fn mul(&self, other: &NcPoly, kappa: &Rational) -> NcPoly {
        let contraction = kappa.recip();
        let mut out = NcPoly::zero();
        for ((s1, p1), c1) in &self.terms {
            for ((s2, p2), c2) in &other.terms {
                for ((s, p), w) in normal_order(p1, s2, &contraction) {
                    out.add_term(sorted_union(s1, &s), sorted_union(&p, p2), c1 * c2 * w);
                }
            }
        }
        out
    }
}

/// `plain * starred` rewritten as `sum w * starred' * plain'`.
fn normal_order(plain: &[usize], starred: &[usize], contraction: &Rational) -> Vec<((Vec<usize>, Vec<usize>), Rational)> {
    let Some((&last, rest)) = plain.split_last() else {
        return alloc::vec![((starred.to_vec(), Vec::new()), Rational::one())];
    };
    // rest * last * starred, moving `last` rightwards through `starred`
    let mut out = Vec::new();
    for ((s, p), w) in normal_order(rest, starred, contraction) {
        out.push(((s, sorted_union(&p, &[last])), w));
    }
    for t in 0..starred.len() {
        if starred[t] == last {
            let mut fewer = starred.to_vec();
            fewer.remove(t);
            out.extend(normal_order(rest, &fewer, contraction).into_iter().map(|(k, w)| (k, w * contraction)));
        }
    }
    out
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (t, ((s, p), c)) in self.terms.iter().enumerate() {
            let word: Vec<String> = s
                .iter()
                .map(|a| format!("Q{a}^*"))
                .chain(p.iter().map(|a| format!("Q{a}")))
                .collect();
            let magnitude = c.abs();
            if t == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            match (word.is_empty(), magnitude.is_one()) {
                (true, _) => write!(f, "{magnitude}")?,
                (false, true) => f.write_str(&word.join(" "))?,
                (false, false) => write!(f, "{magnitude} {}", word.join(" "))?,
            }
        }
        Ok(())
    }
}

/// Symbolic `Q(f)` and `R(f)` in the family's generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcrQuantization {
    pub q: NcPoly,
    pub r: NcPoly,
}

/// `(Q(ab), R(ab))` from the parts of `a` and `b`:
/// `Q(ab) = Q(b)R(a) + Q(a)R(b)`, `R(ab) = R(a)R(b)`.
pub fn combine(a: &CcrQuantization, b: &CcrQuantization, kappa: &Rational) -> CcrQuantization {
    CcrQuantization {
        q: b.q.mul(&a.r, kappa).plus(&a.q.mul(&b.r, kappa)),
        r: a.r.mul(&b.r, kappa),
    }
}

/// `Q` and `R` of the coordinate `var` (0-based: `q_1..q_n`, `p_1..p_n`).
pub fn coordinate_quantization(n: usize, var: usize, kappa: &Rational) -> CcrQuantization {
    let (q_slot, p_slot, p_sign) = if var < n {
        // q_i: Q slot 2i, R(q_i) = P_{2i+1}
        let i = var + 1;
        (2 * i, 2 * i + 1, -Rational::one())
    } else {
        let i = var - n + 1;
        (2 * i + 1, 2 * i, Rational::one())
    };
    let r = NcPoly::letter(p_slot, false)
        .plus(&NcPoly::letter(p_slot, true))
        .scaled(&(p_sign * kappa));
    CcrQuantization {
        q: NcPoly::letter(q_slot, false),
        r,
    }
}

/// `Q(f)` and `R(f)`, factoring each monomial on its leftmost variable.
pub fn quantize_via_ccr(f: &Polynomial, fam: &CCRFamily) -> Result<CcrQuantization> {
    let n = fam.n();
    if f.dim_n() != n {
        return Err(Error::DimensionMismatch { left: f.dim_n(), right: n });
    }
    let mut total = CcrQuantization {
        q: NcPoly::zero(),
        r: NcPoly::zero(),
    };
    for (m, c) in f.terms() {
        let mut letters = Vec::new();
        for (v, &e) in m.exponents().iter().enumerate() {
            letters.extend(core::iter::repeat_n(v, e as usize));
        }
        let mut acc = CcrQuantization {
            q: NcPoly::zero(),
            r: NcPoly::constant(Rational::one()),
        };
        // x_1 (x_2 (... x_d)): build from the right
        for &v in letters.iter().rev() {
            acc = combine(&coordinate_quantization(n, v, &fam.kappa), &acc, &fam.kappa);
        }
        total.q = total.q.plus(&acc.q.scaled(c));
        total.r = total.r.plus(&acc.r.scaled(c));
    }
    Ok(total)
}

/// Windowed matrix of a generator expression.
pub fn evaluate(expr: &NcPoly, fam: &CCRFamily) -> Result<CoeffMatrix> {
    let mut parts = Vec::new();
    for (s, p, c) in expr.terms() {
        let mut word = fam.identity();
        for &a in s {
            word = word.product(fam.q_star(a))?;
        }
        for &a in p {
            word = word.product(fam.q_op(a))?;
        }
        parts.push((real(c.clone()), word));
    }
    if parts.is_empty() {
        return Ok(CoeffMatrix::zero(fam.space.graded().clone()));
    }
    let refs: Vec<_> = parts.iter().map(|(c, m)| (c.clone(), m)).collect();
    CoeffMatrix::lin_comb(&refs)
}

/// Compares the generator expressions of `f` with the direct builds.
pub fn verify_quantize_via_ccr(f: &Polynomial, fam: &CCRFamily) -> Result<Vec<Check>> {
    let expr = quantize_via_ccr(f, fam)?;
    let q = evaluate(&expr.q, fam)?;
    let r = evaluate(&expr.r, fam)?;
    Ok(alloc::vec![
        fam.check(&q, &build_q(&fam.space, f)?, "Leibnitzf_1.via-CCR.Q".into())?,
        fam.check(&r, &build_r(&fam.space, f)?, "Leibnitzf_1.via-CCR.R".into())?,
    ])
}
