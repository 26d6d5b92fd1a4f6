//! Dense complex linear algebra over truncated Fock spaces.
//!
//! Everything here is deliberately small and explicit: the spaces in play are
//! at most 9-dimensional (two cavities with three Fock levels each), so plain
//! row-major `Vec<Complex64>` storage is all that is needed. This module is the
//! independent numerical path that the closed-form observables are checked
//! against.
//!
//! Tensor products always place the first operand as the slow (leftmost)
//! index, so `|m⟩ ⊗ |n⟩` lives at position `m * dim_b + n`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for unit-norm and Hermiticity checks.
pub const NORM_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Amplitudes over a truncated Fock basis.
///
/// `dims` records the per-cavity dimensions: one entry for a single cavity,
/// two for a cavity pair. The total dimension is their product.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Single-cavity state from raw amplitudes.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            dims: vec![amps.len()],
            amps,
        })
    }

    /// State with an explicit per-cavity layout.
    pub fn with_dims(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total == 0 {
            return Err(Error::ZeroDimension);
        }
        if total != amps.len() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: amps.len(),
            });
        }
        Ok(Self { dims, amps })
    }

    /// Fock state `|n⟩` in a space of dimension `dim`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if n >= dim {
            return Err(Error::CutoffTooSmall {
                required: n + 1,
                dim,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[n] = ONE;
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORM_TOL
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        for c in &mut self.amps {
            *c /= n;
        }
        Ok(self)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|c| c * k).collect(),
        }
    }

    /// Component-wise sum; the layouts must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            dims: self.dims.clone(),
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product with `self` as the slow index.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, amps }
    }

    /// `⟨ψ|M|ψ⟩`.
    pub fn expectation(&self, op: &LinearOperator) -> Result<Complex64> {
        let applied = op.apply(self)?;
        self.inner(&applied)
    }

    /// Reduced density matrix of the first cavity of a two-cavity state.
    pub fn reduced_first(&self) -> Result<LinearOperator> {
        let (da, db) = self.two_cavity_dims()?;
        let mut rho = vec![ZERO; da * da];
        for i in 0..da {
            for j in 0..da {
                rho[i * da + j] = (0..db)
                    .map(|k| self.amps[i * db + k] * self.amps[j * db + k].conj())
                    .sum();
            }
        }
        LinearOperator::from_entries(da, rho, true)
    }

    /// Reduced density matrix of the second cavity of a two-cavity state.
    pub fn reduced_second(&self) -> Result<LinearOperator> {
        let (da, db) = self.two_cavity_dims()?;
        let mut rho = vec![ZERO; db * db];
        for i in 0..db {
            for j in 0..db {
                rho[i * db + j] = (0..da)
                    .map(|k| self.amps[k * db + i] * self.amps[k * db + j].conj())
                    .sum();
            }
        }
        LinearOperator::from_entries(db, rho, true)
    }

    /// Human-readable basis label for component `index`, e.g. `|2,0⟩`.
    pub fn basis_label(&self, index: usize) -> String {
        let mut rem = index;
        let mut digits = vec![0; self.dims.len()];
        for (slot, d) in digits.iter_mut().zip(&self.dims).rev() {
            *slot = rem % d;
            rem /= d;
        }
        let inner: Vec<String> = digits.iter().map(|n| n.to_string()).collect();
        format!("|{}⟩", inner.join(","))
    }

    fn two_cavity_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(Error::NotTwoCavity(self.dims.len())),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    dim: usize,
    entries: Vec<Complex64>,
    hermitian: bool,
}

impl LinearOperator {
    /// Builds an operator from row-major entries.
    ///
    /// When `hermitian` is asserted the entries are checked against their
    /// conjugate transpose.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>, hermitian: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let op = Self {
            dim,
            entries,
            hermitian,
        };
        if hermitian {
            let dev = op.hermitian_deviation();
            if dev >= NORM_TOL {
                return Err(Error::NotHermitian(dev));
            }
        }
        Ok(op)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_entries(dim, vec![ZERO; dim * dim], true)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for i in 0..dim {
            op.entries[i * dim + i] = ONE;
        }
        Ok(op)
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        if ket.dim() != bra.dim() {
            return Err(Error::DimensionMismatch {
                expected: ket.dim(),
                found: bra.dim(),
            });
        }
        let dim = ket.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for k in ket.amplitudes() {
            for b in bra.amplitudes() {
                entries.push(k * b.conj());
            }
        }
        Self::from_entries(dim, entries, false)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Largest entrywise `|M - M†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let dev = (self.entries[i * d + j] - self.entries[j * d + i].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Re-asserts the Hermitian flag after checking it holds.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let dev = self.hermitian_deviation();
        if dev >= NORM_TOL {
            return Err(Error::NotHermitian(dev));
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        Self {
            dim: d,
            entries,
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|c| c * k).collect(),
            hermitian: self.hermitian && k.im == 0.0,
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: state.dim(),
            });
        }
        let d = self.dim;
        let x = state.amplitudes();
        let amps = (0..d)
            .map(|i| (0..d).map(|j| self.entries[i * d + j] * x[j]).sum())
            .collect();
        StateVector::with_dims(state.dims().to_vec(), amps)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        Ok(Self {
            dim: d,
            entries,
            hermitian: false,
        })
    }

    /// Kronecker product with `self` as the slow index.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut entries = vec![ZERO; d * d];
        for i in 0..da {
            for j in 0..da {
                let a = self.entries[i * da + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        entries[(i * db + k) * d + (j * db + l)] = a * other.entries[k * db + l];
                    }
                }
            }
        }
        Self {
            dim: d,
            entries,
            hermitian: self.hermitian && other.hermitian,
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            hermitian: self.hermitian && other.hermitian,
        }
    }
}

impl Add for &LinearOperator {
    type Output = Result<LinearOperator>;

    fn add(self, rhs: Self) -> Self::Output {
        self.check_dim(rhs)?;
        Ok(self.zip_with(rhs, |a, b| a + b))
    }
}

impl Sub for &LinearOperator {
    type Output = Result<LinearOperator>;

    fn sub(self, rhs: Self) -> Self::Output {
        self.check_dim(rhs)?;
        Ok(self.zip_with(rhs, |a, b| a - b))
    }
}

impl Mul for &LinearOperator {
    type Output = Result<LinearOperator>;

    fn mul(self, rhs: Self) -> Self::Output {
        self.matmul(rhs)
    }
}

impl fmt::Display for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let c = self.get(i, j);
                    format!("{:+.6}{:+.6}i", c.re, c.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Lowering operator with `⟨n-1|a|n⟩ = √n` on a `dim`-level space.
pub fn annihilation_op(dim: usize) -> Result<LinearOperator> {
    let mut op = LinearOperator::zeros(dim)?;
    op.hermitian = false;
    for n in 1..dim {
        op.entries[(n - 1) * dim + n] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(op)
}

pub fn creation_op(dim: usize) -> Result<LinearOperator> {
    Ok(annihilation_op(dim)?.adjoint())
}

/// `a†a`, diagonal `(0, 1, ..., dim-1)`.
pub fn number_op(dim: usize) -> Result<LinearOperator> {
    let mut op = LinearOperator::zeros(dim)?;
    for n in 0..dim {
        op.entries[n * dim + n] = Complex64::new(n as f64, 0.0);
    }
    Ok(op)
}

/// Connected correlation `⟨A⊗B⟩ - ⟨A⊗I⟩⟨I⊗B⟩` on a two-cavity state.
pub fn connected_correlation(
    state: &StateVector,
    first: &LinearOperator,
    second: &LinearOperator,
) -> Result<Complex64> {
    let id_a = LinearOperator::identity(first.dim())?;
    let id_b = LinearOperator::identity(second.dim())?;
    let joint = state.expectation(&first.tensor(second))?;
    let ma = state.expectation(&first.tensor(&id_b))?;
    let mb = state.expectation(&id_a.tensor(second))?;
    Ok(joint - ma * mb)
}
