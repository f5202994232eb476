//! Dense complex linear algebra for operators on at most six qubits.
//!
//! Everything here works on small square matrices (dimension ≤ 64), so the
//! storage is a flat row-major `Vec` and the eigensolver is a cyclic complex
//! Jacobi iteration. Qubit 0 is the leftmost (most significant) tensor factor:
//! in an `n`-qubit basis index, qubit `q` is bit `n - 1 - q`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance used to decide whether an input counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIGEN_CLAMP, 0]` are treated as round-off and clamped to zero.
pub const EIGEN_CLAMP: f64 = 1e-10;
/// Eigenvalues below `-NEGATIVE_EIGEN_LIMIT` are genuine negativity.
pub const NEGATIVE_EIGEN_LIMIT: f64 = 1e-8;

const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row-major storage of length `dim²`.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return invalid(format!(
                "storage of length {} does not describe a {dim}x{dim} matrix",
                data.len()
            ));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return invalid("rows do not form a square matrix");
        }
        Ok(Self { dim, data: rows.iter().flat_map(|r| r.iter().copied()).collect() })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len(), "outer product of vectors with different lengths");
        Self::from_fn(a.len(), |r, c| a[r] * b[c].conj())
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        (0..self.dim).all(|r| {
            (r..self.dim).all(|c| (self[(r, c)] - self[(c, r)].conj()).norm() <= tol * scale)
        })
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length does not match matrix dimension");
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// `Re Tr[self · other]`, computed without forming the product.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += (self[(r, c)] * other[(c, r)]).re;
            }
        }
        acc
    }

    fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[r * n..(r + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "inner product of vectors with different lengths");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A qubit register's density operator. Holds a Hermitian, unit-trace matrix
/// of dimension `2^qubits`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Accepts a Hermitian, unit-trace matrix whose dimension is a power of two.
    /// Positivity is not checked here; see [`DensityMatrix::min_eigenvalue`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if !dim.is_power_of_two() || dim < 2 {
            return invalid(format!("dimension {dim} is not a qubit register"));
        }
        if !matrix.is_hermitian(HERMITIAN_TOL) {
            return invalid("density matrix must be Hermitian");
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > 1e-8 {
            return invalid(format!("density matrix must have unit trace, got {tr}"));
        }
        Ok(Self { qubits: dim.trailing_zeros() as usize, matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.dim().is_power_of_two());
        Self { qubits: matrix.dim().trailing_zeros() as usize, matrix }
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1 << qubits;
        Self::from_matrix_unchecked(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product_re(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        herm_eig(&self.matrix).map(|e| e.values[0]).unwrap_or(f64::NEG_INFINITY)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(kron(&self.matrix, &other.matrix))
    }
}

fn check_qubit(qubits: usize, q: usize) -> Result<()> {
    if q >= qubits {
        return invalid(format!("qubit index {q} out of range for {qubits} qubits"));
    }
    Ok(())
}

/// Reduces `rho` to the qubits listed in `keep`, tracing out the rest. The
/// kept qubits appear in ascending index order in the result.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.qubits;
    if keep.is_empty() {
        return invalid("partial trace must keep at least one qubit");
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return invalid("duplicate qubit index in partial trace");
    }
    for &q in &kept {
        check_qubit(n, q)?;
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    let bit = |q: usize| 1usize << (n - 1 - q);
    let compress = |idx: usize, qs: &[usize]| {
        qs.iter().fold(0usize, |acc, &q| (acc << 1) | usize::from(idx & bit(q) != 0))
    };
    let expand = |sub: usize, qs: &[usize]| {
        qs.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
            if sub & (1 << (qs.len() - 1 - pos)) != 0 {
                acc | bit(q)
            } else {
                acc
            }
        })
    };

    let kd = 1usize << kept.len();
    let td = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..kd).map(|s| expand(s, &kept)).collect();
    let traced_idx: Vec<usize> = (0..td).map(|s| expand(s, &traced)).collect();
    debug_assert!(kept_idx.iter().enumerate().all(|(s, &i)| compress(i, &kept) == s));

    let m = &rho.matrix;
    let out = ComplexMatrix::from_fn(kd, |r, c| {
        traced_idx.iter().map(|&t| m[(kept_idx[r] | t, kept_idx[c] | t)]).sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Transposes the factor belonging to qubit `part` of an `n`-qubit operator.
pub fn partial_transpose_matrix(m: &ComplexMatrix, qubits: usize, part: usize) -> Result<ComplexMatrix> {
    if m.dim() != 1 << qubits {
        return invalid(format!("matrix of dimension {} is not a {qubits}-qubit operator", m.dim()));
    }
    check_qubit(qubits, part)?;
    let b = 1usize << (qubits - 1 - part);
    Ok(ComplexMatrix::from_fn(m.dim(), |r, c| {
        let (rb, cb) = (r & b, c & b);
        m[((r & !b) | cb, (c & !b) | rb)]
    }))
}

pub fn partial_transpose(rho: &DensityMatrix, part: usize) -> Result<ComplexMatrix> {
    partial_transpose_matrix(&rho.matrix, rho.qubits, part)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        let n = self.vectors.dim();
        (0..n).map(|r| self.vectors[(r, k)]).collect()
    }

    /// `V f(Λ) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        ComplexMatrix::from_fn(n, |r, c| {
            (0..n)
                .filter(|&k| fv[k] != 0.0)
                .map(|k| self.vectors[(r, k)] * self.vectors[(c, k)].conj() * fv[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|v| v)
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn herm_eig(a: &ComplexMatrix) -> Result<EigDecomposition> {
    if !a.is_hermitian(HERMITIAN_TOL) {
        return invalid("herm_eig requires a Hermitian matrix");
    }
    let n = a.dim();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let tol = JACOBI_OFF_TOL * m.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| m[(r, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off < tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(EigDecomposition { values, vectors })
}

/// Annihilates `m[p,q]` with the unitary `G = diag(1, e^{-iφ}) · R(θ)` acting
/// on the `(p, q)` plane, where `φ = arg m[p,q]`; accumulates `v ← v G`.
fn jacobi_rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = m.dim();
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * gpp + akq * gqp;
        m[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        m[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

fn clamp_eigenvalue(v: f64) -> Result<f64> {
    if v < -NEGATIVE_EIGEN_LIMIT {
        return Err(Error::Domain(format!("matrix has negative eigenvalue {v:e}")));
    }
    Ok(v.max(0.0))
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    for &v in &eig.values {
        clamp_eigenvalue(v)?;
    }
    Ok(eig.map_values(|v| if v <= EIGEN_CLAMP { 0.0 } else { v.sqrt() }))
}

/// `Tr √(A A†)`.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    if let Ok(eig) = herm_eig(a) {
        return eig.values.iter().map(|v| v.abs()).sum();
    }
    let gram = a * &a.adjoint();
    let eig = herm_eig(&gram).expect("A A† is Hermitian");
    eig.values.iter().map(|&v| v.max(0.0).sqrt()).sum()
}

pub mod pauli {
    //! Single-qubit Pauli matrices.
    use super::{ComplexMatrix, C64, I, ONE, ZERO};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, C64::new(-1.0, 0.0)]]).unwrap()
    }
}
