//! Dense complex linear algebra over `3^n`-dimensional spaces.
//!
//! Basis states are indexed big-endian: for qutrits `q_0 … q_{n-1}` the index
//! is `Σ_k 3^{n-1-k} q_k`, so `|m, A⟩` of a two-qutrit register sits at `3m + A`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Structural invariants (unitarity, Hermiticity, trace).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Norm drift beyond which `apply` reports a non-unitary operator.
pub const NORM_DRIFT_TOL: f64 = 1e-8;
/// Smallest eigenvalue still counted by the entropy sum.
pub const EIGEN_FLOOR: f64 = 1e-12;
/// Most negative eigenvalue tolerated for a positive semidefinite matrix.
pub const PSD_TOL: f64 = 1e-9;

/// `3^n`.
pub fn pow3(n: usize) -> usize {
    3usize.pow(n as u32)
}

/// Returns `Some(n)` when `dim == 3^n`.
pub fn log3(dim: usize) -> Option<usize> {
    let mut n = 0;
    let mut d = 1;
    while d < dim {
        d *= 3;
        n += 1;
    }
    (d == dim).then_some(n)
}

/// Big-endian base-3 digits of `index` for an `n`-qutrit register.
pub fn digits(index: usize, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    let mut rest = index;
    for slot in out.iter_mut().rev() {
        *slot = (rest % 3) as u8;
        rest /= 3;
    }
    out
}

/// Inverse of [`digits`].
pub fn index_of(digits: &[u8]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * 3 + d as usize)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "CMat::from_vec: wrong entry count");
        CMat { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Permutation matrix sending `|k⟩` to `|images[k]⟩`.
    pub fn permutation(images: &[usize]) -> Self {
        let d = images.len();
        let mut m = Self::zeros(d, d);
        for (k, &img) in images.iter().enumerate() {
            m[(img, k)] = ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat::from_vec(
            self.rows,
            self.cols,
            self.data.iter().map(|&x| x * s).collect(),
        )
    }

    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`; `∞` on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.dagger() * self).max_abs_diff(&CMat::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.dagger()) <= tol
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "CMat::mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &CMat) -> CMat {
        &(u * self) * &u.dagger()
    }

    /// Exact permutation image table when every column holds a single `1`
    /// and zeros elsewhere (no tolerance).
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        if !self.is_square() {
            return None;
        }
        let mut images = Vec::with_capacity(self.cols);
        for k in 0..self.cols {
            let mut hit = None;
            for i in 0..self.rows {
                let x = self[(i, k)];
                if x == ONE {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some(i);
                } else if x != ZERO {
                    return None;
                }
            }
            images.push(hit?);
        }
        Some(images)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMat {
    type Output = CMat;

    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "CMat product: inner dimensions differ");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Mul for CMat {
    type Output = CMat;

    fn mul(self, rhs: CMat) -> CMat {
        &self * &rhs
    }
}

impl Add for &CMat {
    type Output = CMat;

    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_vec(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &CMat {
    type Output = CMat;

    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_vec(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Tensor product; block `(i, j)` of the result is `a[i, j] · b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMat::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let s = a[(ai, aj)];
            if s == ZERO {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out[(ai * b.rows + bi, aj * b.cols + bj)] = s * b[(bi, bj)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence, left factor most significant.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMat>) -> CMat {
    factors
        .into_iter()
        .fold(CMat::identity(1), |acc, f| kron(&acc, f))
}

pub fn dagger(a: &CMat) -> CMat {
    a.dagger()
}

/// Pure state of `n` qutrits.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    n: usize,
    amps: Vec<C64>,
}

impl QState {
    /// Validates length `3^n` and unit norm within [`STRUCTURAL_TOL`].
    pub fn new(n: usize, amps: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a state needs at least one qutrit"));
        }
        if amps.len() != pow3(n) {
            return Err(Error::DimensionMismatch {
                expected: pow3(n),
                found: amps.len(),
            });
        }
        let norm = norm2(&amps);
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::invalid(format!("state norm {norm} is not 1")));
        }
        Ok(QState { n, amps })
    }

    /// Rescales to unit norm; rejects the zero vector.
    pub fn normalized(n: usize, mut amps: Vec<C64>) -> Result<Self> {
        if amps.len() != pow3(n) {
            return Err(Error::DimensionMismatch {
                expected: pow3(n),
                found: amps.len(),
            });
        }
        let norm = norm2(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid(
                "cannot normalize a zero or non-finite vector",
            ));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        QState::new(n, amps)
    }

    /// Computational basis state `|q_0 q_1 … q_{n-1}⟩`.
    pub fn basis(qutrits: &[u8]) -> Result<Self> {
        if let Some(&bad) = qutrits.iter().find(|&&q| q > 2) {
            return Err(Error::invalid(format!(
                "qutrit level {bad} is not in {{0,1,2}}"
            )));
        }
        Self::from_index(qutrits.len(), index_of(qutrits))
    }

    pub fn from_index(n: usize, index: usize) -> Result<Self> {
        let dim = pow3(n);
        if index >= dim {
            return Err(Error::invalid(format!("basis index {index} out of range")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        QState::new(n, amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QState) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &QState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &QState) -> f64 {
        if self.amps.len() != other.amps.len() {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), pow3(n));
        QState { n, amps }
    }

    pub(crate) fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `u · s`. The result is not renormalized: a norm drift above
/// [`NORM_DRIFT_TOL`] means `u` was not unitary and is reported as an error.
pub fn apply(u: &CMat, s: &QState) -> Result<QState> {
    if !u.is_square() || u.cols() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: u.cols(),
        });
    }
    let amps = u.mul_vec(s.amplitudes());
    let drift = (norm2(&amps) - s.norm()).abs();
    if drift > NORM_DRIFT_TOL {
        return Err(Error::NotUnitary { drift });
    }
    Ok(QState::from_raw(s.n(), amps))
}

/// Density matrix of `n` qutrits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: CMat,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(mat: CMat) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidDensity("matrix is not square".into()));
        }
        let n = log3(mat.rows())
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidDensity(format!("dimension {} is not 3^n", mat.rows())))?;
        if !mat.is_hermitian(STRUCTURAL_TOL) {
            return Err(Error::InvalidDensity("matrix is not Hermitian".into()));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > STRUCTURAL_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let rho = DensityMatrix { n, mat };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(rho)
    }

    pub fn from_pure(s: &QState) -> Self {
        let d = s.dim();
        let a = s.amplitudes();
        let mut mat = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                mat[(i, j)] = a[i] * a[j].conj();
            }
        }
        DensityMatrix { n: s.n(), mat }
    }

    /// `I / 3^n`.
    pub fn maximally_mixed(n: usize) -> Self {
        let d = pow3(n);
        DensityMatrix {
            n,
            mat: CMat::identity(d).scale(C64::new(1.0 / d as f64, 0.0)),
        }
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid("empty mixture"))?
            .1;
        let mut acc = CMat::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: rho.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::invalid("negative mixture weight"));
            }
            acc = &acc + &rho.mat.scale(C64::new(*w, 0.0));
        }
        DensityMatrix::new(acc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// `U ρ U†` for a unitary `U` of matching dimension.
    pub fn evolve(&self, u: &CMat) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.rows(),
            });
        }
        Ok(DensityMatrix {
            n: self.n,
            mat: self.mat.conjugate_by(u),
        })
    }

    /// Ascending eigenvalues of the Hermitian matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    pub(crate) fn from_parts(n: usize, mat: CMat) -> Self {
        DensityMatrix { n, mat }
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = m
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `½ Σ |λ_i(p − q)|`.
pub fn trace_distance(p: &DensityMatrix, q: &DensityMatrix) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let diff = &p.mat - &q.mat;
    let sum: f64 = hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

/// Von Neumann entropy with base-3 logarithm: one unit per maximally mixed qutrit.
pub fn von_neumann_entropy(p: &DensityMatrix) -> Result<f64> {
    let ev = p.eigenvalues();
    if let Some(&min) = ev.first() {
        if min < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
    }
    let ln3 = 3f64.ln();
    Ok(ev
        .iter()
        .filter(|&&l| l > EIGEN_FLOOR)
        .map(|&l| -l * l.ln() / ln3)
        .sum::<f64>()
        .max(0.0))
}
