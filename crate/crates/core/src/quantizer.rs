//! The maps `Q`, `R` and `Qhat = R - 2i Q` into coefficient matrices, and
//! verification of their commutation identities on certified windows.
//!
//! The construction only needs a Poisson algebra whose observables act on a
//! graded biorthogonal basis; [`QuantizationSetting`] captures that, and
//! [`PhaseSpace`] is the polynomial instance on `R^{2n}`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_traits::One;

use crate::basis::{BasisSpec, HermiteBasis};
use crate::error::Error;
use crate::graded::{GradedBasis, HermiteKind};
use crate::hermite::{self, RawVec};
use crate::poly::{MultiIndex, Polynomial};
use crate::report::Check;
use crate::scalar::{int, real, CRational, Complex64, Rational, Scalar};
use crate::sparse::CoeffMatrix;
use crate::Result;

/// A Poisson algebra with a graded biorthogonal basis `u_j` in which
/// brackets and products with basis elements can be expanded exactly.
pub trait QuantizationSetting {
    type Observable: Clone + fmt::Debug;
    /// Observable data precomputed once per matrix assembly.
    type Prepared;

    fn graded(&self) -> &Arc<GradedBasis>;
    /// Number of canonical pairs `(q_k, p_k)`.
    fn pairs(&self) -> usize;
    fn degree(&self, h: &Self::Observable) -> u32;
    fn prepare(&self, h: &Self::Observable) -> Result<Self::Prepared>;
    /// Raw coordinates of `{h, u_j}`.
    fn bracket_column(&self, h: &Self::Prepared, j: usize) -> Result<RawVec>;
    /// Raw coordinates of `h u_j`.
    fn product_column(&self, h: &Self::Prepared, j: usize) -> Result<RawVec>;

    fn one(&self) -> Self::Observable;
    /// Coordinate `a` (0-based): `q_1..q_n` then `p_1..p_n`.
    fn coordinate(&self, a: usize) -> Self::Observable;
    fn add(&self, a: &Self::Observable, b: &Self::Observable) -> Result<Self::Observable>;
    fn scale(&self, a: &Self::Observable, c: &Rational) -> Self::Observable;
    fn mul(&self, a: &Self::Observable, b: &Self::Observable) -> Result<Self::Observable>;
    fn bracket(&self, a: &Self::Observable, b: &Self::Observable) -> Result<Self::Observable>;

    fn coordinate_name(&self, a: usize) -> String {
        let n = self.pairs();
        if a < n {
            format!("q{}", a + 1)
        } else {
            format!("p{}", a - n + 1)
        }
    }

    fn pow(&self, a: &Self::Observable, m: u32) -> Result<Self::Observable> {
        let mut acc = self.one();
        for _ in 0..m {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }
}

/// Which arithmetic the identity checks run in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Exact,
    /// Orthonormal `f64` entries, compared at [`crate::scalar::FLOAT_TOLERANCE`].
    Float,
}

fn to_column(graded: &GradedBasis, raw: RawVec) -> Vec<(usize, CRational)> {
    raw.into_iter()
        .filter_map(|(m, c)| graded.position(&m).map(|i| (i, real(c))))
        .collect()
}

fn assemble<T: QuantizationSetting>(
    setting: &T,
    h: &T::Observable,
    column: impl Fn(&T, &T::Prepared, usize) -> Result<RawVec>,
) -> Result<CoeffMatrix> {
    let graded = setting.graded().clone();
    let prepared = setting.prepare(h)?;
    let columns = (0..graded.len())
        .map(|j| column(setting, &prepared, j).map(|raw| to_column(&graded, raw)))
        .collect::<Result<Vec<_>>>()?;
    let window = graded.full_level().unwrap_or(0);
    CoeffMatrix::from_columns(graded, columns, setting.degree(h), window)
}

/// `Q(h)`, entry `(i, j) = <{h, e_j}, e_i>`.
pub fn build_q<T: QuantizationSetting>(setting: &T, h: &T::Observable) -> Result<CoeffMatrix> {
    assemble(setting, h, T::bracket_column)
}

/// `R(h)`, entry `(i, j) = <h e_j, e_i>`.
pub fn build_r<T: QuantizationSetting>(setting: &T, h: &T::Observable) -> Result<CoeffMatrix> {
    assemble(setting, h, T::product_column)
}

pub fn qhat_of(q: &CoeffMatrix, r: &CoeffMatrix) -> Result<CoeffMatrix> {
    CoeffMatrix::lin_comb(&[(real(int(1)), r), (CRational::new(int(0), int(-2)), q)])
}

/// `Qhat(h) = R(h) - 2i Q(h)`.
pub fn build_qhat<T: QuantizationSetting>(setting: &T, h: &T::Observable) -> Result<CoeffMatrix> {
    qhat_of(&build_q(setting, h)?, &build_r(setting, h)?)
}

pub fn commutator<S: Scalar>(a: &CoeffMatrix<S>, b: &CoeffMatrix<S>) -> Result<CoeffMatrix<S>> {
    a.commutator(b)
}

fn convert(m: &CoeffMatrix, arith: Arithmetic) -> MatrixIn {
    match arith {
        Arithmetic::Exact => MatrixIn::Exact(m.clone()),
        Arithmetic::Float => MatrixIn::Float(m.to_float()),
    }
}

/// A matrix in either arithmetic, so check bodies can be written once.
#[derive(Clone, Debug)]
enum MatrixIn {
    Exact(CoeffMatrix<CRational>),
    Float(CoeffMatrix<Complex64>),
}

macro_rules! both {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (MatrixIn::Exact($x), MatrixIn::Exact($y)) => $body.map(MatrixIn::Exact),
            (MatrixIn::Float($x), MatrixIn::Float($y)) => $body.map(MatrixIn::Float),
            _ => unreachable!("mixed arithmetic"),
        }
    };
}

impl MatrixIn {
    fn product(&self, other: &MatrixIn) -> Result<MatrixIn> {
        both!(self, other, |x, y| x.product(y))
    }
    fn commutator(&self, other: &MatrixIn) -> Result<MatrixIn> {
        both!(self, other, |x, y| x.commutator(y))
    }
    fn plus(&self, other: &MatrixIn) -> Result<MatrixIn> {
        both!(self, other, |x, y| x.plus(y))
    }
    fn scaled(&self, c: &CRational) -> MatrixIn {
        match self {
            MatrixIn::Exact(x) => MatrixIn::Exact(x.scaled(c)),
            MatrixIn::Float(x) => MatrixIn::Float(x.scaled(c)),
        }
    }
    fn adjoint(&self) -> MatrixIn {
        match self {
            MatrixIn::Exact(x) => MatrixIn::Exact(x.adjoint()),
            MatrixIn::Float(x) => MatrixIn::Float(x.adjoint()),
        }
    }
    fn check(&self, other: &MatrixIn, identity: String, n: usize) -> Result<Check> {
        let (dev, size) = match (self, other) {
            (MatrixIn::Exact(x), MatrixIn::Exact(y)) => (x.compare(y)?, x.size()),
            (MatrixIn::Float(x), MatrixIn::Float(y)) => (x.compare(y)?, x.size()),
            _ => unreachable!("mixed arithmetic"),
        };
        Ok(Check::from_deviation(identity, n, size, &dev))
    }
}

fn identity_matrix<T: QuantizationSetting>(setting: &T) -> CoeffMatrix {
    CoeffMatrix::identity(setting.graded().clone())
}

fn minus_two_i() -> CRational {
    CRational::new(int(0), int(-2))
}

/// The four identities
/// `[Q(f),Q(g)] = Q({f,g})`, `[Q(f),R(g)] = R({f,g})`,
/// `Q(g)R(f) + Q(f)R(g) = Q(fg)` and `R(f)R(g) = R(fg)`.
pub fn verify_lemma<T: QuantizationSetting>(
    setting: &T,
    f: &T::Observable,
    g: &T::Observable,
    arith: Arithmetic,
) -> Result<Vec<Check>> {
    let n = setting.pairs();
    let fg_bracket = setting.bracket(f, g)?;
    let fg = setting.mul(f, g)?;
    let qf = convert(&build_q(setting, f)?, arith);
    let qg = convert(&build_q(setting, g)?, arith);
    let rf = convert(&build_r(setting, f)?, arith);
    let rg = convert(&build_r(setting, g)?, arith);
    let q_br = convert(&build_q(setting, &fg_bracket)?, arith);
    let r_br = convert(&build_r(setting, &fg_bracket)?, arith);
    let q_fg = convert(&build_q(setting, &fg)?, arith);
    let r_fg = convert(&build_r(setting, &fg)?, arith);

    let leibniz = qg.product(&rf)?.plus(&qf.product(&rg)?)?;
    Ok(alloc::vec![
        qf.commutator(&qg)?.check(&q_br, "Quantizationf_1.Q-bracket".into(), n)?,
        qf.commutator(&rg)?.check(&r_br, "Quantizationf_1.QR-bracket".into(), n)?,
        leibniz.check(&q_fg, "Leibnitzf_1.Q-Leibniz".into(), n)?,
        rf.product(&rg)?.check(&r_fg, "Leibnitzf_1.R-multiplicativity".into(), n)?,
    ])
}

/// `Qhat(1) = Id`.
pub fn check_identity<T: QuantizationSetting>(setting: &T, arith: Arithmetic) -> Result<Check> {
    let qhat = convert(&build_qhat(setting, &setting.one())?, arith);
    let id = convert(&identity_matrix(setting), arith);
    qhat.check(&id, "IdProp".into(), setting.pairs())
}

/// `[Qhat(f), Qhat(g)] = -2i Qhat({f,g})` as asserted, plus the expanded
/// form `-4i R({f,g}) - 4 Q({f,g})` that the definitions produce, reported
/// for information.
pub fn check_lie_bracket<T: QuantizationSetting>(
    setting: &T,
    f: &T::Observable,
    g: &T::Observable,
    arith: Arithmetic,
) -> Result<Vec<Check>> {
    let n = setting.pairs();
    let br = setting.bracket(f, g)?;
    let lhs = convert(&build_qhat(setting, f)?, arith).commutator(&convert(&build_qhat(setting, g)?, arith))?;
    let q_br = build_q(setting, &br)?;
    let r_br = build_r(setting, &br)?;
    let claimed = convert(&qhat_of(&q_br, &r_br)?.scaled(&minus_two_i()), arith);
    let expanded = CoeffMatrix::lin_comb(&[
        (CRational::new(int(0), int(-4)), &r_br),
        (real(int(-4)), &q_br),
    ])?;
    Ok(alloc::vec![
        lhs.check(&claimed, "LieBracketProp".into(), n)?,
        lhs.check(&convert(&expanded, arith), "LieBracketProp.expanded".into(), n)?
            .informational(),
    ])
}

/// `[Qhat(x_a), Qhat(x_b)] = -2i {x_a, x_b} Id` for every ordered pair of
/// coordinates, each with the informational expanded value `-4i {x_a, x_b} Id`.
pub fn check_ccr_analogue<T: QuantizationSetting>(setting: &T, arith: Arithmetic) -> Result<Vec<Check>> {
    let n = setting.pairs();
    let id = identity_matrix(setting);
    let qhats = (0..2 * n)
        .map(|a| build_qhat(setting, &setting.coordinate(a)).map(|m| convert(&m, arith)))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for a in 0..2 * n {
        for b in 0..2 * n {
            let br = setting.bracket(&setting.coordinate(a), &setting.coordinate(b))?;
            // {x_a, x_b} is a constant c, so Qhat({x_a, x_b}) = c Id
            let c = build_r(setting, &br)?.get(0, 0);
            let lhs = qhats[a].commutator(&qhats[b])?;
            let name = format!("CCRAnalogueProp[{},{}]", setting.coordinate_name(a), setting.coordinate_name(b));
            let claimed = convert(&id.scaled(&(&c * minus_two_i())), arith);
            let expanded = convert(&id.scaled(&(&c * CRational::new(int(0), int(-4)))), arith);
            checks.push(lhs.check(&claimed, name.clone(), n)?);
            checks.push(lhs.check(&expanded, format!("{name}.expanded"), n)?.informational());
        }
    }
    Ok(checks)
}

/// The von Neumann rule for `phi(x) = x^m`, asserted on the R-component
/// (`R(f^m) = R(f)^m`) and reported for the hermitian part
/// `(T + T^*)/2` of `Qhat`.
pub fn check_von_neumann<T: QuantizationSetting>(
    setting: &T,
    f: &T::Observable,
    m: u32,
    arith: Arithmetic,
) -> Result<Vec<Check>> {
    let n = setting.pairs();
    if m == 0 {
        return Err(Error::InvalidConfig("phi degree must be positive".into()));
    }
    let fm = setting.pow(f, m)?;
    let rf = convert(&build_r(setting, f)?, arith);
    let mut power = rf.clone();
    for _ in 1..m {
        power = power.product(&rf)?;
    }
    let r_fm = convert(&build_r(setting, &fm)?, arith);

    let half = real(Rational::new(1.into(), 2.into()));
    let herm = |x: &MatrixIn| x.plus(&x.adjoint()).map(|s| s.scaled(&half));
    let hf = herm(&convert(&build_qhat(setting, f)?, arith))?;
    let mut hpower = hf.clone();
    for _ in 1..m {
        hpower = hpower.product(&hf)?;
    }
    let h_fm = herm(&convert(&build_qhat(setting, &fm)?, arith))?;
    Ok(alloc::vec![
        power.check(&r_fm, format!("vonNeumannRuleProp.R-component[m={m}]"), n)?,
        hpower
            .check(&h_fm, format!("vonNeumannRuleProp.hermitian-part[m={m}]"), n)?
            .informational(),
    ])
}

/// Every displayed property of `Qhat` for one pair `(f, g)` and `phi(x) = x^m`.
pub fn verify_theorem<T: QuantizationSetting>(
    setting: &T,
    f: &T::Observable,
    g: &T::Observable,
    phi_degree: u32,
    arith: Arithmetic,
) -> Result<Vec<Check>> {
    let mut checks = alloc::vec![check_identity(setting, arith)?];
    checks.extend(check_lie_bracket(setting, f, g, arith)?);
    checks.extend(check_ccr_analogue(setting, arith)?);
    checks.extend(check_von_neumann(setting, f, phi_degree, arith)?);
    Ok(checks)
}

/// The polynomial phase space `R^{2n}` with a Hermite basis.
#[derive(Clone, Debug)]
pub struct PhaseSpace {
    basis: HermiteBasis,
}

/// Raw Hermite coordinates of an observable and of its partial derivatives.
#[derive(Clone, Debug)]
pub struct PreparedPolynomial {
    raw: RawVec,
    gradient: Vec<RawVec>,
}

impl PhaseSpace {
    pub fn new(spec: BasisSpec) -> Result<Self> {
        Ok(PhaseSpace {
            basis: HermiteBasis::new(spec)?,
        })
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    fn kind(&self) -> HermiteKind {
        self.basis.kind()
    }

    fn unit(&self, j: usize) -> Result<RawVec> {
        self.basis.graded().check_index(j)?;
        Ok(hermite::unit(self.basis.graded().multi_index(j)))
    }
}

impl QuantizationSetting for PhaseSpace {
    type Observable = Polynomial;
    type Prepared = PreparedPolynomial;

    fn graded(&self) -> &Arc<GradedBasis> {
        self.basis.graded()
    }

    fn pairs(&self) -> usize {
        self.basis.dim_n()
    }

    fn degree(&self, h: &Polynomial) -> u32 {
        h.degree()
    }

    fn prepare(&self, h: &Polynomial) -> Result<PreparedPolynomial> {
        let raw = self.basis.raw_coordinates(h)?;
        let cap = self.graded().full_level().unwrap_or(0);
        if h.degree() > cap {
            return Err(Error::TruncationOverflow {
                degree: h.degree(),
                cap,
            });
        }
        let gradient = (0..2 * self.pairs()).map(|v| hermite::diff(self.kind(), &raw, v)).collect();
        Ok(PreparedPolynomial { raw, gradient })
    }

    fn bracket_column(&self, h: &PreparedPolynomial, j: usize) -> Result<RawVec> {
        let n = self.pairs();
        let u = self.unit(j)?;
        let mut out = RawVec::new();
        for k in 0..n {
            let dq = hermite::diff(self.kind(), &u, k);
            let dp = hermite::diff(self.kind(), &u, n + k);
            hermite::add_scaled(&mut out, &hermite::mul_raw(self.kind(), &h.gradient[k], &dp), &Rational::one());
            hermite::add_scaled(&mut out, &hermite::mul_raw(self.kind(), &h.gradient[n + k], &dq), &-Rational::one());
        }
        Ok(out)
    }

    fn product_column(&self, h: &PreparedPolynomial, j: usize) -> Result<RawVec> {
        Ok(hermite::mul_raw(self.kind(), &h.raw, &self.unit(j)?))
    }

    fn one(&self) -> Polynomial {
        Polynomial::one(self.pairs())
    }

    fn coordinate(&self, a: usize) -> Polynomial {
        Polynomial::monomial(self.pairs(), MultiIndex::unit(2 * self.pairs(), a), Rational::one())
    }

    fn add(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        a.checked_add(b)
    }

    fn scale(&self, a: &Polynomial, c: &Rational) -> Polynomial {
        a.scaled(c)
    }

    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        a.checked_mul(b)
    }

    fn bracket(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        a.poisson_bracket(b)
    }
}
