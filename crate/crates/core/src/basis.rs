//! The Hermite biorthogonal system on `L^2(R^{2n}, mu)`, paired with itself.
//!
//! Two Gaussian weights are supported. [`Weight::Unnormalized`] is
//! `d mu = e^{-sum(q_i^2 + p_i^2)} dq dp` with total mass `pi^n`, spanned by
//! physicists' Hermite polynomials; [`Weight::StandardGaussian`] is the
//! probability measure with unit variance per coordinate, spanned by
//! probabilists' Hermite polynomials.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;

use num_traits::One;

use crate::error::Error;
use crate::graded::{GradedBasis, HermiteKind};
use crate::hermite::{self, RawVec};
use crate::poly::{MultiIndex, Polynomial};
use crate::scalar::{real, Rational, Surd};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Weight {
    /// `e^{-|x|^2}`, mass `pi^n`.
    #[default]
    Unnormalized,
    /// `(2 pi)^{-n} e^{-|x|^2 / 2}`, mass 1.
    StandardGaussian,
}

impl Weight {
    pub fn hermite_kind(self) -> HermiteKind {
        match self {
            Weight::Unnormalized => HermiteKind::Physicists,
            Weight::StandardGaussian => HermiteKind::Probabilists,
        }
    }

    /// Power of `sqrt(pi)` in the total mass on `R^{2n}`.
    fn mass_sqrt_pi(self, dim_n: usize) -> i32 {
        match self {
            Weight::Unnormalized => 2 * dim_n as i32,
            Weight::StandardGaussian => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `e_a = u_a / ||u_a||`.
    #[default]
    Orthonormal,
    /// Raw Hermite polynomials `u_a`; the Gram diagonal is reported separately.
    RawWithGram,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisSpec {
    pub dim_n: usize,
    /// Number of basis elements `N`.
    pub size: usize,
    pub weight: Weight,
    pub normalization: Normalization,
}

impl BasisSpec {
    pub fn new(dim_n: usize, size: usize) -> Self {
        BasisSpec {
            dim_n,
            size,
            weight: Weight::default(),
            normalization: Normalization::default(),
        }
    }

    /// Smallest spec holding every element of degree at most `level`.
    pub fn with_level(dim_n: usize, level: u32) -> Self {
        BasisSpec::new(dim_n, crate::graded::count_up_to(2 * dim_n, level))
    }

    pub fn weight(mut self, weight: Weight) -> Self {
        self.weight = weight;
        self
    }

    pub fn normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }
}

/// `scale * raw`, where `raw` is a tensor Hermite polynomial.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub index: usize,
    pub multi_index: MultiIndex,
    pub scale: Surd,
    pub raw: Polynomial,
}

/// Finitely supported coefficients over basis indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisCoeffs {
    entries: BTreeMap<usize, Surd>,
    normalization: Normalization,
}

impl BasisCoeffs {
    pub fn get(&self, i: usize) -> Surd {
        self.entries.get(&i).cloned().unwrap_or_else(Surd::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Surd)> {
        self.entries.iter().map(|(&i, s)| (i, s))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }
}

#[derive(Clone, Debug)]
pub struct HermiteBasis {
    spec: BasisSpec,
    graded: Arc<GradedBasis>,
}

impl HermiteBasis {
    pub fn new(spec: BasisSpec) -> Result<Self> {
        if spec.dim_n == 0 {
            return Err(Error::InvalidConfig("phase-space dimension must be positive".into()));
        }
        let graded = GradedBasis::new(2 * spec.dim_n, spec.size, spec.weight.hermite_kind())?;
        Ok(HermiteBasis {
            spec,
            graded: Arc::new(graded),
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn graded(&self) -> &Arc<GradedBasis> {
        &self.graded
    }

    pub fn kind(&self) -> HermiteKind {
        self.graded.kind()
    }

    pub fn len(&self) -> usize {
        self.graded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graded.is_empty()
    }

    pub fn dim_n(&self) -> usize {
        self.spec.dim_n
    }

    /// `||u_i||^2` including the measure's mass factor.
    pub fn gram(&self, i: usize) -> Result<Surd> {
        self.graded.check_index(i)?;
        Ok(Surd::new(
            real(self.graded.gram(i).clone()),
            Rational::one(),
            self.spec.weight.mass_sqrt_pi(self.spec.dim_n),
        ))
    }

    pub fn basis_element(&self, i: usize) -> Result<BasisElement> {
        self.graded.check_index(i)?;
        let multi_index = self.graded.multi_index(i).clone();
        let raw = hermite::to_polynomial(self.kind(), self.spec.dim_n, &multi_index);
        let scale = match self.spec.normalization {
            Normalization::RawWithGram => Surd::from_rational(Rational::one()),
            Normalization::Orthonormal => Surd::new(
                real(Rational::one()),
                self.graded.gram(i).recip(),
                -self.spec.weight.mass_sqrt_pi(self.spec.dim_n) / 2,
            ),
        };
        Ok(BasisElement {
            index: i,
            multi_index,
            scale,
            raw,
        })
    }

    /// Raw Hermite coordinates of `f`, computed through the multiplication
    /// recurrence applied to `u_0 = 1`.
    pub fn raw_coordinates(&self, f: &Polynomial) -> Result<RawVec> {
        if f.dim_n() != self.spec.dim_n {
            return Err(Error::DimensionMismatch {
                left: f.dim_n(),
                right: self.spec.dim_n,
            });
        }
        let origin = hermite::unit(&MultiIndex::zero(2 * self.spec.dim_n));
        Ok(hermite::mul_poly(self.kind(), &origin, f))
    }

    /// Coefficients of `f` in this basis, so `f = sum_i c_i * element_i`.
    pub fn expand(&self, f: &Polynomial) -> Result<BasisCoeffs> {
        let raw = self.raw_coordinates(f)?;
        let half_mass = self.spec.weight.mass_sqrt_pi(self.spec.dim_n) / 2;
        let mut entries = BTreeMap::new();
        for (m, c) in raw {
            let i = self.graded.position(&m).ok_or(Error::TruncationOverflow {
                degree: f.degree(),
                cap: self.graded.full_level().unwrap_or(0),
            })?;
            let value = match self.spec.normalization {
                // <f, e_i> = K_i ||u_i||
                Normalization::Orthonormal => {
                    Surd::new(real(c), self.graded.gram(i).clone(), half_mass)
                }
                Normalization::RawWithGram => Surd::from_rational(c),
            };
            entries.insert(i, value);
        }
        Ok(BasisCoeffs {
            entries,
            normalization: self.spec.normalization,
        })
    }

    /// `<f, e_i>` in `L^2(mu)` (with `u_i` in place of `e_i` for raw bases).
    pub fn pair(&self, f: &Polynomial, i: usize) -> Result<Surd> {
        self.graded.check_index(i)?;
        let coeffs = self.expand(f)?;
        let c = coeffs.get(i);
        Ok(match self.spec.normalization {
            Normalization::Orthonormal => c,
            Normalization::RawWithGram => c.mul(&self.gram(i)?),
        })
    }

    /// Rebuilds a polynomial from coefficients; the inverse of [`Self::expand`].
    pub fn resum(&self, coeffs: &BasisCoeffs) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(self.spec.dim_n);
        for (i, c) in coeffs.iter() {
            let e = self.basis_element(i)?;
            let factor = c
                .mul(&e.scale)
                .as_rational()
                .ok_or(Error::IncommensurableSurds)?;
            acc = acc.checked_add(&e.raw.scaled(&factor))?;
        }
        Ok(acc)
    }
}
