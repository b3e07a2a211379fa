//! Small dense complex linear algebra.
//!
//! Every operator in this crate lives on at most three qubits, so matrices
//! are at most 8x8 and a plain row-major `Vec<Complex64>` is all we need.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical tolerances used by the checked operations of this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-abs entrywise bound on `m - m†` for a matrix to count as Hermitian.
    pub hermitian: f64,
    /// Jacobi iteration stops once the largest off-diagonal modulus is below this.
    pub eig_off_diagonal: f64,
    pub eig_max_sweeps: usize,
    /// Eigenvalues at or above `-psd` are accepted as non-negative.
    pub psd: f64,
    /// Allowed deviation of a density operator's trace (and of a state vector's norm) from one.
    pub unit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            eig_off_diagonal: 1e-12,
            eig_max_sweeps: 64,
            psd: 1e-8,
            unit: 1e-8,
        }
    }
}

/// Dense complex matrix stored in row-major order.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixJson", try_from = "MatrixJson")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from rows; all rows must have the same non-zero length.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::invalid("matrix must have at least one row and column"));
        }
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// The 1x1 unit; neutral element of [`tensor`].
    pub fn unit() -> Self {
        Self::identity(1)
    }

    /// Projector `|psi><psi|`.
    pub fn projector(psi: &[C64]) -> Self {
        let n = psi.len();
        Self::from_fn(n, n, |r, c| psi[r] * psi[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// `<psi| self |psi>`.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let m_psi = self.mat_vec(psi);
        psi.iter().zip(&m_psi).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dims(), other.dims(), "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `u u†` is the identity within `tol` (max-abs).
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (self * &self.adjoint()).max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn real_part(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)].re).collect())
            .collect()
    }

    pub fn imag_part(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)].im).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dims(), rhs.dims(), "matrix sum dimension mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dims(), rhs.dims(), "matrix difference dimension mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Wire form: `{"dims":[r,c],"re":[[..]],"im":[[..]]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dims: [usize; 2],
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson {
            dims: [m.rows, m.cols],
            re: m.real_part(),
            im: m.imag_part(),
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        let [r, c] = j.dims;
        if j.re.len() != r || j.im.len() != r {
            return Err(Error::invalid("matrix json: row count does not match dims"));
        }
        let rows = j
            .re
            .iter()
            .zip(&j.im)
            .map(|(re, im)| {
                if re.len() != c || im.len() != c {
                    return Err(Error::invalid("matrix json: column count does not match dims"));
                }
                Ok(re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect())
            })
            .collect::<Result<Vec<Vec<C64>>>>()?;
        ComplexMatrix::from_rows(rows)
    }
}

/// Kronecker product with `a`'s indices outermost.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// Kronecker product of a sequence, left factor outermost.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::unit(), |acc, f| tensor(&acc, f))
}

/// Reduced matrix on the `keep` slots (0-based, returned in original order).
pub fn partial_trace(m: &ComplexMatrix, slot_dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::invalid("partial trace needs a square matrix"));
    }
    if slot_dims.is_empty() || slot_dims.contains(&0) {
        return Err(Error::invalid("slot dimensions must be positive"));
    }
    let total: usize = slot_dims.iter().product();
    if total != m.rows {
        return Err(Error::invalid(format!(
            "slot dimensions {slot_dims:?} multiply to {total}, matrix is {}x{}",
            m.rows, m.cols
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= slot_dims.len()) {
        return Err(Error::invalid(format!("slot {bad} out of range")));
    }
    let is_kept: Vec<bool> = (0..slot_dims.len()).map(|s| kept.contains(&s)).collect();
    let out_dim: usize = kept.iter().map(|&s| slot_dims[s]).product();

    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; slot_dims.len()];
        for s in (0..slot_dims.len()).rev() {
            d[s] = idx % slot_dims[s];
            idx /= slot_dims[s];
        }
        d
    };
    // Mixed-radix index over the kept slots, and over the traced ones.
    let split = |d: &[usize]| -> (usize, usize) {
        let (mut k, mut t) = (0, 0);
        for (s, &x) in d.iter().enumerate() {
            if is_kept[s] {
                k = k * slot_dims[s] + x;
            } else {
                t = t * slot_dims[s] + x;
            }
        }
        (k, t)
    };

    let split_idx: Vec<(usize, usize)> = (0..total).map(|i| split(&digits(i))).collect();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for r in 0..total {
        let (kr, tr) = split_idx[r];
        for c in 0..total {
            let (kc, tc) = split_idx[c];
            if tr == tc {
                out[(kr, kc)] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Spectrum of a Hermitian matrix: eigenvalues ascending, eigenvectors
/// orthonormal and stored as columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows()).map(|r| self.vectors[(r, k)]).collect()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| v[(r, k)] * self.values[k] * v[(c, k)].conj())
                .sum()
        })
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    hermitian_eig_with(m, &Tolerances::default())
}

/// Cyclic complex Jacobi diagonalisation.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the real symmetric Jacobi rotation, so the
/// combined 2x2 block is `G = D R`.
pub fn hermitian_eig_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::invalid("eigendecomposition needs a square matrix"));
    }
    let defect = m.hermitian_defect();
    if defect > tol.hermitian {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (max |m - m†| = {defect:.3e})"
        )));
    }
    let n = m.rows();
    let mut a = m.clone();
    // Symmetrise exactly so rounding in the input cannot leak into the spectrum.
    for r in 0..n {
        a[(r, r)] = C64::new(a[(r, r)].re, 0.0);
        for c in (r + 1)..n {
            let avg = (a[(r, c)] + a[(c, r)].conj()) * 0.5;
            a[(r, c)] = avg;
            a[(c, r)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let off_diagonal = |a: &ComplexMatrix| -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in (r + 1)..n {
                worst = worst.max(a[(r, c)].norm());
            }
        }
        worst
    };

    let mut sweeps = 0;
    while off_diagonal(&a) >= tol.eig_off_diagonal {
        if sweeps == tol.eig_max_sweeps {
            return Err(Error::NoConvergence {
                sweeps,
                off_diagonal: off_diagonal(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cos = 1.0 / (t * t + 1.0).sqrt();
                let sin = t * cos;
                // G restricted to the (p, q) plane.
                let gpp = C64::new(cos, 0.0);
                let gpq = C64::new(sin, 0.0);
                let gqp = -phase.conj() * sin;
                let gqq = phase.conj() * cos;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * gpp + akq * gqp;
                    a[(k, q)] = akp * gpq + akq * gqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

pub fn norm(psi: &[C64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|<a|b>|²` for unit vectors.
pub fn overlap(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
}

/// Fidelity of a density operator with a pure target, `<psi|rho|psi>`.
pub fn fidelity_pure(rho: &ComplexMatrix, psi: &[C64]) -> Result<f64> {
    fidelity_pure_with(rho, psi, &Tolerances::default())
}

pub fn fidelity_pure_with(rho: &ComplexMatrix, psi: &[C64], tol: &Tolerances) -> Result<f64> {
    if !rho.is_square() || rho.rows() != psi.len() {
        return Err(Error::invalid("state vector and operator dimensions differ"));
    }
    if (norm(psi) - 1.0).abs() > tol.unit {
        return Err(Error::invalid("target state is not normalised"));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol.unit || tr.im.abs() > tol.unit {
        return Err(Error::invalid(format!("operator trace is {tr}, expected 1")));
    }
    let eig = hermitian_eig_with(rho, tol)?;
    if eig.min() < -tol.psd {
        return Err(Error::NotDensityOperator {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(rho.expectation(psi).re.clamp(0.0, 1.0))
}
