//! A representation of the Cuntz generators on a truncation of `l^2(N)`.
//!
//! `S_k delta_m = delta_{pi(k-1, m)}` with the Cantor pairing
//! `pi(k, m) = (k+m)(k+m+1)/2 + m`. Since `pi` is a bijection
//! `N x N -> N`, the `S_k` are isometries with disjoint ranges that together
//! cover every coordinate, so `sum_k S_k S_k^* = Id` holds exactly.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use rand::Rng;

use crate::error::Error;
use crate::graded::GradedBasis;
use crate::quantizer::{build_qhat, build_r, QuantizationSetting};
use crate::report::Check;
use crate::scalar::{abs64, CRational, Complex64, Rational, Scalar};
use crate::sparse::{CoeffMatrix, Deviation};
use crate::Result;

/// `pi(k, m)` on 0-based arguments, `None` on `u64` overflow.
pub fn pair(k: u64, m: u64) -> Option<u64> {
    let s = k.checked_add(m)?;
    let tri = if s % 2 == 0 {
        (s / 2).checked_mul(s.checked_add(1)?)?
    } else {
        s.checked_mul(s.div_ceil(2))?
    };
    tri.checked_add(m)
}

/// Inverse of [`pair`].
pub fn unpair(z: u64) -> (u64, u64) {
    let root = (8u128 * z as u128 + 1).isqrt() as u64;
    let w = (root - 1) / 2;
    let t = w * (w + 1) / 2;
    let m = z - t;
    (w - m, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CuntzRep {
    alphabet: usize,
    dim: u64,
}

/// The ranges of the materialized generators inside `0..M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceDecomposition {
    /// `ranges[k]` lists the coordinates in the range of `S_{k+1}`.
    pub ranges: Vec<Vec<u64>>,
    /// Coordinates covered only by generators beyond the alphabet.
    pub residual: Vec<u64>,
}

impl SubspaceDecomposition {
    pub fn pairwise_disjoint(&self) -> bool {
        let mut seen = BTreeMap::new();
        for (k, r) in self.ranges.iter().enumerate() {
            for &m in r {
                if seen.insert(m, k).is_some() {
                    return false;
                }
            }
        }
        self.residual.iter().all(|m| !seen.contains_key(m))
    }
}

impl CuntzRep {
    pub fn new(alphabet: usize, dim: u64) -> Result<Self> {
        if alphabet == 0 || dim == 0 {
            return Err(Error::InvalidConfig("alphabet and dimension must be positive".into()));
        }
        Ok(CuntzRep { alphabet, dim })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// `S_k delta_m`; `k` is 1-based. The result may lie outside `0..M`.
    pub fn s_apply(&self, k: usize, m: u64) -> u64 {
        assert!(k >= 1, "generators are numbered from 1");
        pair(k as u64 - 1, m).expect("pairing overflows u64")
    }

    /// `S_k^* delta_m`, or `None` when `m` is not in the range of `S_k`.
    pub fn s_star_apply(&self, k: usize, m: u64) -> Option<u64> {
        let (g, inner) = unpair(m);
        (k >= 1 && g == k as u64 - 1).then_some(inner)
    }

    pub fn decomposition(&self) -> SubspaceDecomposition {
        let mut ranges = vec![Vec::new(); self.alphabet];
        let mut residual = Vec::new();
        for m in 0..self.dim {
            let (g, _) = unpair(m);
            match ranges.get_mut(g as usize) {
                Some(r) => r.push(m),
                None => residual.push(m),
            }
        }
        SubspaceDecomposition { ranges, residual }
    }

    fn check(&self, identity: &str, violations: usize) -> Check {
        Check::scalar(identity, 0, self.dim as usize, self.dim as usize, violations as f64, 0.0, true)
    }

    /// Isometry, orthogonality, range partition, the matrix-unit law for
    /// `i, j, k, l <= 4` and projection orthogonality for `i, j <= 6`.
    /// Deviations count violating coordinates.
    pub fn verify_cuntz(&self) -> Vec<Check> {
        let d = self.alphabet;
        let mut isometry = 0;
        let mut orthogonality = 0;
        let mut partition = 0;
        for m in 0..self.dim {
            // S_k^* S_k = Id on coordinates whose image is materialized
            for k in 1..=d {
                let image = self.s_apply(k, m);
                if image < self.dim && self.s_star_apply(k, image) != Some(m) {
                    isometry += 1;
                }
            }
            // S_i^* S_j = 0: at most one generator maps onto m
            let hits = (1..=d).filter(|&k| self.s_star_apply(k, m).is_some()).count();
            if hits > 1 {
                orthogonality += hits - 1;
            }
            // exactly one generator over all of N reaches m
            let (g, inner) = unpair(m);
            if pair(g, inner) != Some(m) {
                partition += 1;
            }
        }

        let small = d.min(4);
        let mut matrix_units = 0;
        for i in 1..=small {
            for j in 1..=small {
                for k in 1..=small {
                    for l in 1..=small {
                        for x in 0..self.dim {
                            let lhs = self
                                .s_star_apply(l, x)
                                .map(|y| self.s_apply(k, y))
                                .filter(|&z| z < self.dim)
                                .map(|z| self.s_star_apply(j, z).map(|w| self.s_apply(i, w)));
                            let Some(lhs) = lhs else { continue };
                            let rhs = if j == k {
                                self.s_star_apply(l, x).map(|y| self.s_apply(i, y))
                            } else {
                                None
                            };
                            if lhs != rhs {
                                matrix_units += 1;
                            }
                        }
                    }
                }
            }
        }

        let mut projections = 0;
        let proj = |k: usize, x: u64| self.s_star_apply(k, x).is_some();
        for i in 1..=d.min(6) {
            for j in 1..=d.min(6) {
                for x in 0..self.dim {
                    let lhs = proj(j, x) && proj(i, x);
                    let rhs = i == j && proj(i, x);
                    if lhs != rhs {
                        projections += 1;
                    }
                }
            }
        }

        vec![
            self.check("Cuntz.isometry", isometry),
            self.check("Cuntz.orthogonality", orthogonality),
            self.check("Cuntz.range-partition", partition),
            self.check("Cuntz.matrix-unit-law", matrix_units),
            self.check("Cuntz.projection-orthogonality", projections),
        ]
    }

    /// Number of `m` with `pi(N-1, m) < M`: the common fiber on which every
    /// `S_i S_j^*`, `i, j <= N`, stays inside the truncation.
    pub fn fiber(&self, generators: usize) -> Result<u64> {
        if generators > self.alphabet {
            return Err(Error::AlphabetTooSmall {
                needed: generators,
                available: self.alphabet,
            });
        }
        let top = generators as u64 - 1;
        let first = pair(top, 0).ok_or(Error::PairingOverflow { required_dim: u64::MAX })?;
        if first >= self.dim {
            return Err(Error::PairingOverflow {
                required_dim: first + 1,
            });
        }
        let mut m = 0;
        while pair(top, m + 1).is_some_and(|z| z < self.dim) {
            m += 1;
        }
        Ok(m + 1)
    }
}

/// `T = sum_{i,j <= N} C[i,j] S_i S_j^*` on the coordinates of `H_1..H_N`
/// whose fiber index lies below the common fiber.
#[derive(Clone, Debug)]
pub struct LiftedOperator<S: Scalar = CRational> {
    basis: Arc<GradedBasis>,
    dim: u64,
    fiber: u64,
    /// Column coordinate -> nonzero `(row coordinate, value)` pairs.
    columns: BTreeMap<u64, Vec<(u64, S)>>,
}

pub fn lift<S: Scalar>(c: &CoeffMatrix<S>, rep: &CuntzRep) -> Result<LiftedOperator<S>> {
    let n = c.size();
    let fiber = rep.fiber(n)?;
    let mut columns = BTreeMap::new();
    for j in 0..n {
        for m in 0..fiber {
            let x = rep.s_apply(j + 1, m);
            let col = c
                .column(j)
                .iter()
                .map(|(i, v)| (rep.s_apply(i + 1, m), v.clone()))
                .collect();
            columns.insert(x, col);
        }
    }
    Ok(LiftedOperator {
        basis: c.basis().clone(),
        dim: rep.dim(),
        fiber,
        columns,
    })
}

impl<S: Scalar> LiftedOperator<S> {
    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn fiber(&self) -> u64 {
        self.fiber
    }

    /// Coordinates on which the operator is materialized.
    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.columns.keys().copied()
    }

    /// `T delta_x`, or `None` outside the materialized domain.
    pub fn apply_basis(&self, x: u64) -> Option<&[(u64, S)]> {
        self.columns.get(&x).map(Vec::as_slice)
    }

    /// `self o other` on `other`'s domain.
    pub fn compose(&self, other: &LiftedOperator<S>) -> Result<LiftedOperator<S>> {
        let mut columns = BTreeMap::new();
        for (x, col) in &other.columns {
            let mut acc: BTreeMap<u64, S> = BTreeMap::new();
            for (y, b) in col {
                let Some(inner) = self.columns.get(y) else {
                    return Err(Error::PairingOverflow { required_dim: *y + 1 });
                };
                for (z, a) in inner {
                    acc.entry(*z).or_insert_with(S::zero).mul_add_assign(a, b);
                }
            }
            columns.insert(*x, acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        }
        Ok(LiftedOperator {
            basis: self.basis.clone(),
            dim: self.dim,
            fiber: self.fiber.min(other.fiber),
            columns,
        })
    }

    pub fn minus(&self, other: &LiftedOperator<S>) -> LiftedOperator<S> {
        let mut columns = self.columns.clone();
        for (x, col) in &other.columns {
            let mut acc: BTreeMap<u64, S> = columns.remove(x).unwrap_or_default().into_iter().collect();
            for (z, v) in col {
                let slot = acc.entry(*z).or_insert_with(S::zero);
                *slot = slot.minus(v);
            }
            columns.insert(*x, acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        }
        LiftedOperator {
            basis: self.basis.clone(),
            dim: self.dim,
            fiber: self.fiber.min(other.fiber),
            columns,
        }
    }

    /// Orthonormal-frame value of a stored entry.
    fn orthonormal(&self, row: u64, col: u64, v: &S) -> Complex64 {
        let (i, _) = unpair(row);
        let (j, _) = unpair(col);
        v.orthonormal(self.basis.gram(i as usize), self.basis.gram(j as usize))
    }

    /// Entries `(row, col, value)` in the orthonormal frame, sorted by column.
    pub fn entries(&self) -> Vec<(u64, u64, Complex64)> {
        self.columns
            .iter()
            .flat_map(|(x, col)| col.iter().map(move |(z, v)| (*z, *x, self.orthonormal(*z, *x, v))))
            .collect()
    }

    /// Entrywise comparison restricted to `S_i S_j^*` blocks with both
    /// generator indices among the first `window_len` basis indices.
    pub fn compare_on(&self, other: &LiftedOperator<S>, window_len: usize) -> Deviation {
        let inside = |z: u64| (unpair(z).0 as usize) < window_len;
        let mut max_abs = 0.0f64;
        let mut exact_zero = true;
        let diff = self.minus(other);
        for (x, col) in &diff.columns {
            if !inside(*x) {
                continue;
            }
            for (z, v) in col {
                if inside(*z) && !v.is_zero() {
                    exact_zero = false;
                    max_abs = max_abs.max(abs64(self.orthonormal(*z, *x, v)));
                }
            }
        }
        Deviation {
            window_len,
            max_abs,
            exact: S::EXACT,
            exact_zero,
        }
    }
}

/// Outcome of the `H_k` norm computation for `Q(h)`.
#[derive(Clone, Debug)]
pub struct BoundReport {
    /// `B = sum_l <{h, e_k}, e_l>^2`, exact.
    pub bound: Rational,
    /// `||Q(h) psi||^2` for each random unit `psi` in `H_k`.
    pub measured: Vec<f64>,
    pub checks: Vec<Check>,
}

/// Checks `||Q(h) P_k psi||^2 = ||P_k psi||^2 B` and `<= B` on random unit
/// vectors of `H_k`, for `q_h = Q(h)` assembled from an observable of degree
/// `degree`. `k` is a 0-based basis index.
pub fn bound_check<R: Rng + ?Sized>(
    q_h: &CoeffMatrix,
    degree: u32,
    k: usize,
    n: usize,
    rep: &CuntzRep,
    samples: usize,
    rng: &mut R,
) -> Result<BoundReport> {
    let basis = q_h.basis().clone();
    basis.check_index(k)?;
    // the whole column must be inside the basis for B to be the full sum
    if basis.degree(k) + degree > basis.full_level().unwrap_or(0) {
        return Err(Error::ColumnOutsideWindow { column: k });
    }
    let mut bound = Rational::zero();
    for (l, v) in q_h.column(k) {
        let sq = &v.re * &v.re + &v.im * &v.im;
        bound += sq * basis.gram(*l) / basis.gram(k);
    }
    let bound_f64 = crate::scalar::to_f64(&bound);
    let lifted = lift(&q_h.to_float(), rep)?;
    let tol = 1e-12 * bound_f64.max(1.0);
    let mut measured = Vec::with_capacity(samples);
    let mut eq_dev = 0.0f64;
    let mut excess = 0.0f64;
    for _ in 0..samples {
        // random unit vector on the fiber coordinates of H_k
        let coeffs: Vec<Complex64> = (0..lifted.fiber())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = libm::sqrt(coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>());
        let mut image: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (m, c) in coeffs.iter().enumerate() {
            let x = rep.s_apply(k + 1, m as u64);
            for (z, v) in lifted.apply_basis(x).unwrap_or(&[]) {
                *image.entry(*z).or_insert(Complex64::new(0.0, 0.0)) += v * (c / norm);
            }
        }
        let value: f64 = image.values().map(|v| v.norm_sqr()).sum();
        eq_dev = eq_dev.max(libm::fabs(value - bound_f64));
        excess = excess.max(value - bound_f64);
        measured.push(value);
    }
    let size = basis.len();
    let fiber = lifted.fiber() as usize;
    Ok(BoundReport {
        bound,
        measured,
        checks: vec![
            Check::scalar("H_k-norm-equality", n, size, fiber, eq_dev, tol, false),
            Check::scalar("H_k-norm-bound", n, size, fiber, excess.max(0.0), tol, false),
        ],
    })
}

/// `[T_a, T_b] = -2i {x_a, x_b} Id` for the lifts `T` of `Qhat(x_a)`,
/// `Qhat(x_b)`, compared on the commutator's window; the expanded value
/// `-4i {x_a, x_b} Id` is reported for information.
pub fn check_lifted_ccr<T: QuantizationSetting>(setting: &T, a: usize, b: usize, rep: &CuntzRep) -> Result<Vec<Check>> {
    let xa = setting.coordinate(a);
    let xb = setting.coordinate(b);
    let qa = build_qhat(setting, &xa)?;
    let qb = build_qhat(setting, &xb)?;
    let window_len = qa.commutator(&qb)?.window_len();
    let c = build_r(setting, &setting.bracket(&xa, &xb)?)?.get(0, 0);
    let la = lift(&qa, rep)?;
    let lb = lift(&qb, rep)?;
    let comm = la.compose(&lb)?.minus(&lb.compose(&la)?);
    let id = CoeffMatrix::identity(setting.graded().clone());
    let name = format!("CCRAnalogueProp.lifted[{},{}]", setting.coordinate_name(a), setting.coordinate_name(b));
    let mut checks = Vec::new();
    for (factor, suffix, asserted) in [(-2, "", true), (-4, ".expanded", false)] {
        let expected = lift(&id.scaled(&(&c * CRational::new(Rational::zero(), Rational::from_integer(factor.into())))), rep)?;
        let check = Check::from_deviation(format!("{name}{suffix}"), setting.pairs(), setting.graded().len(), &comm.compare_on(&expected, window_len));
        checks.push(if asserted { check } else { check.informational() });
    }
    Ok(checks)
}
