//! Column-sparse banded coefficient matrices with certified windows.
//!
//! A matrix holds a *band* `b`: entries between indices whose total degrees
//! differ by more than `b` vanish in the untruncated operator. Its *window*
//! is a degree level `W`: every entry with row and column of degree `<= W`
//! equals the corresponding entry of the untruncated operator. Products
//! shrink the window by the band of the right factor, because column `k` of
//! `B` reaches rows up to degree `deg k + b`, all of which have to be
//! certified in both factors.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::graded::GradedBasis;
use crate::scalar::{abs64, int, real, CRational, Complex64, Scalar, Surd, FLOAT_TOLERANCE};
use crate::Result;

#[derive(Clone, Debug)]
pub struct CoeffMatrix<S: Scalar = CRational> {
    basis: Arc<GradedBasis>,
    /// Per column, nonzero `(row, value)` pairs sorted by row.
    columns: Vec<Vec<(usize, S)>>,
    band: u32,
    window: u32,
}

/// Outcome of an entrywise comparison on a window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Deviation {
    /// Number of basis indices compared.
    pub window_len: usize,
    /// Largest orthonormal-frame entry difference.
    pub max_abs: f64,
    /// The comparison was carried out in exact arithmetic.
    pub exact: bool,
    /// Every difference was exactly zero (meaningful in exact mode only).
    pub exact_zero: bool,
}

impl Deviation {
    pub fn pass(&self) -> bool {
        if self.exact {
            self.exact_zero
        } else {
            self.max_abs <= FLOAT_TOLERANCE
        }
    }
}

fn same_basis(a: &GradedBasis, b: &GradedBasis) -> Result<()> {
    if a.len() != b.len() || a.vars() != b.vars() || a.kind() != b.kind() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

fn merge_add<S: Scalar>(acc: &[(usize, S)], other: &[(usize, S)], scale: &CRational) -> Vec<(usize, S)> {
    let mut out = Vec::with_capacity(acc.len() + other.len());
    let (mut x, mut y) = (0, 0);
    while x < acc.len() || y < other.len() {
        let take_left = y >= other.len() || (x < acc.len() && acc[x].0 < other[y].0);
        let take_right = x >= acc.len() || (y < other.len() && other[y].0 < acc[x].0);
        if take_left {
            out.push(acc[x].clone());
            x += 1;
        } else if take_right {
            let v = other[y].1.scaled(scale);
            if !v.is_zero() {
                out.push((other[y].0, v));
            }
            y += 1;
        } else {
            let v = acc[x].1.plus(&other[y].1.scaled(scale));
            if !v.is_zero() {
                out.push((acc[x].0, v));
            }
            x += 1;
            y += 1;
        }
    }
    out
}

impl<S: Scalar> CoeffMatrix<S> {
    /// Assembles a matrix from its columns; zero entries are dropped.
    pub fn from_columns(
        basis: Arc<GradedBasis>,
        columns: Vec<Vec<(usize, S)>>,
        band: u32,
        window: u32,
    ) -> Result<Self> {
        if columns.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                left: columns.len(),
                right: basis.len(),
            });
        }
        let mut cleaned = Vec::with_capacity(columns.len());
        for mut col in columns {
            col.retain(|(_, v)| !v.is_zero());
            col.sort_by_key(|(i, _)| *i);
            if let Some((i, _)) = col.iter().find(|(i, _)| *i >= basis.len()) {
                return Err(Error::IndexOutOfRange {
                    index: *i,
                    size: basis.len(),
                });
            }
            cleaned.push(col);
        }
        let full = basis.full_level().unwrap_or(0);
        Ok(CoeffMatrix {
            basis,
            columns: cleaned,
            band,
            window: window.min(full),
        })
    }

    pub fn zero(basis: Arc<GradedBasis>) -> Self {
        let window = basis.full_level().unwrap_or(0);
        CoeffMatrix {
            columns: vec![Vec::new(); basis.len()],
            basis,
            band: 0,
            window,
        }
    }

    pub fn identity(basis: Arc<GradedBasis>) -> Self {
        let window = basis.full_level().unwrap_or(0);
        CoeffMatrix {
            columns: (0..basis.len()).map(|j| vec![(j, S::one())]).collect(),
            basis,
            band: 0,
            window,
        }
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn band(&self) -> u32 {
        self.band
    }

    /// Degree level of the certified window.
    pub fn window(&self) -> u32 {
        self.window
    }

    /// Number of basis indices inside the window.
    pub fn window_len(&self) -> usize {
        self.basis.prefix_len(Some(self.window))
    }

    /// Narrows the certified window.
    pub fn restrict_window(mut self, level: u32) -> Self {
        self.window = self.window.min(level);
        self
    }

    pub fn column(&self, j: usize) -> &[(usize, S)] {
        &self.columns[j]
    }

    /// Stored value at `(i, j)`: the raw-frame entry in exact mode, the
    /// orthonormal entry in float mode.
    pub fn get(&self, i: usize, j: usize) -> S {
        let col = &self.columns[j];
        match col.binary_search_by_key(&i, |(r, _)| *r) {
            Ok(pos) => col[pos].1.clone(),
            Err(_) => S::zero(),
        }
    }

    /// Entry `(i, j)` in the orthonormal basis.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.get(i, j).orthonormal(self.basis.gram(i), self.basis.gram(j))
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// All stored nonzero entries as `(row, col, value)`, column-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i, j, v)))
    }

    /// Largest degree gap between the row and column of a stored nonzero.
    pub fn observed_band(&self) -> u32 {
        self.iter()
            .map(|(i, j, _)| self.basis.degree(i).abs_diff(self.basis.degree(j)))
            .max()
            .unwrap_or(0)
    }

    /// `sum_t c_t * M_t`; window is the minimum, band the maximum.
    pub fn lin_comb(terms: &[(CRational, &CoeffMatrix<S>)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidConfig("empty linear combination".into()))?;
        let basis = first.1.basis.clone();
        let mut columns: Vec<Vec<(usize, S)>> = vec![Vec::new(); basis.len()];
        let mut band = 0;
        let mut window = u32::MAX;
        for (c, m) in terms {
            same_basis(&basis, &m.basis)?;
            band = band.max(m.band);
            window = window.min(m.window);
            for (j, col) in m.columns.iter().enumerate() {
                columns[j] = merge_add(&columns[j], col, c);
            }
        }
        Ok(CoeffMatrix {
            basis,
            columns,
            band,
            window,
        })
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        Self::lin_comb(&[(real(int(1)), self), (real(int(1)), other)])
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        Self::lin_comb(&[(real(int(1)), self), (real(int(-1)), other)])
    }

    pub fn scaled(&self, c: &CRational) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(i, v)| (*i, v.scaled(c)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        CoeffMatrix {
            basis: self.basis.clone(),
            columns,
            band: self.band,
            window: self.window,
        }
    }

    /// `self * other` on the shrunk window; only in-window entries are kept.
    pub fn product(&self, other: &Self) -> Result<Self> {
        same_basis(&self.basis, &other.basis)?;
        let reach = self.window.min(other.window);
        if reach < other.band {
            return Err(Error::EmptyWindow {
                shortfall: other.band - reach,
            });
        }
        let window = reach - other.band;
        let p = self.basis.prefix_len(Some(window));
        let mut columns: Vec<Vec<(usize, S)>> = vec![Vec::new(); self.basis.len()];
        let mut dense: Vec<S> = vec![S::zero(); p];
        let mut touched: Vec<bool> = vec![false; p];
        for (k, out) in columns.iter_mut().enumerate().take(p) {
            for (j, b) in &other.columns[k] {
                for (i, a) in &self.columns[*j] {
                    if *i >= p {
                        break;
                    }
                    dense[*i].mul_add_assign(a, b);
                    touched[*i] = true;
                }
            }
            for i in 0..p {
                if touched[i] {
                    let v = core::mem::replace(&mut dense[i], S::zero());
                    if !v.is_zero() {
                        out.push((i, v));
                    }
                    touched[i] = false;
                }
            }
        }
        Ok(CoeffMatrix {
            basis: self.basis.clone(),
            columns,
            band: self.band + other.band,
            window,
        })
    }

    /// `AB - BA` on the common shrunk window.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.product(other)?;
        let ba = other.product(self)?;
        ab.minus(&ba)
    }

    /// Adjoint in the orthonormal frame (conjugate transpose of entries).
    pub fn adjoint(&self) -> Self {
        let mut columns: Vec<Vec<(usize, S)>> = vec![Vec::new(); self.basis.len()];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                // adjoint entry (j, i) from entry (i, j)
                columns[*i].push((j, S::adjoint_entry(v, self.basis.gram(j), self.basis.gram(*i))));
            }
        }
        CoeffMatrix {
            basis: self.basis.clone(),
            columns,
            band: self.band,
            window: self.window,
        }
    }

    /// Entrywise comparison on the common window.
    pub fn compare(&self, other: &Self) -> Result<Deviation> {
        same_basis(&self.basis, &other.basis)?;
        let window = self.window.min(other.window);
        let p = self.basis.prefix_len(Some(window));
        let mut max_abs = 0.0f64;
        let mut exact_zero = true;
        let minus_one = real(int(-1));
        for j in 0..p {
            let a: Vec<_> = self.columns[j].iter().filter(|(i, _)| *i < p).cloned().collect();
            let b: Vec<_> = other.columns[j].iter().filter(|(i, _)| *i < p).cloned().collect();
            for (i, d) in merge_add(&a, &b, &minus_one) {
                if d.is_zero() {
                    continue;
                }
                exact_zero = false;
                let value = abs64(d.orthonormal(self.basis.gram(i), self.basis.gram(j)));
                max_abs = if value.is_nan() { f64::NAN } else { max_abs.max(value) };
            }
        }
        Ok(Deviation {
            window_len: p,
            max_abs,
            exact: S::EXACT,
            exact_zero,
        })
    }
}

impl CoeffMatrix<CRational> {
    /// Entry `(i, j)` in the orthonormal basis as an exact surd.
    pub fn entry_surd(&self, i: usize, j: usize) -> Surd {
        Surd::new(self.get(i, j), self.basis.gram(i) / self.basis.gram(j), 0)
    }

    /// Converts to float mode with orthonormal entries.
    pub fn to_float(&self) -> CoeffMatrix<Complex64> {
        let columns = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, col)| {
                col.iter()
                    .map(|(i, v)| (*i, Complex64::from_raw(v, self.basis.gram(*i), self.basis.gram(j))))
                    .collect()
            })
            .collect();
        CoeffMatrix {
            basis: self.basis.clone(),
            columns,
            band: self.band,
            window: self.window,
        }
    }
}
