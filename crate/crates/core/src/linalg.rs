//! Dense complex linear algebra.
//!
//! Everything in the toolkit is carried by [`ComplexMatrix`], a row-major
//! dense matrix of `Complex64`. Sizes stay small (at most a few hundred rows),
//! so all kernels are plain loops with explicit dimension checks.
//!
//! Tensor products follow the usual convention: in `kron(a, b)` the factor `a`
//! is the most significant index, so qubit 0 is the leftmost factor.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Fails if the entry count does
    /// not match or any entry is not finite.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(
                "ComplexMatrix::new",
                format!("{} entries for a {rows}x{cols} matrix", data.len()),
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
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

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Row-major construction from nested slices; panics on ragged input.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|row| row.iter().copied()).collect(),
        }
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count");
        Self {
            rows,
            cols,
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                m[(i, j)] = x * y.conj();
            }
        }
        m
    }

    /// Elementary matrix |i⟩⟨j| of size n×n.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    /// Rank-one projector onto the computational basis state |i⟩.
    pub fn basis_projector(n: usize, i: usize) -> Self {
        Self::unit(n, i, i)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Dimension of a square matrix, or an error naming `op`.
    pub fn square_dim(&self, op: &'static str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                op,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(c, r)] = self[(r, c)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(c, r)] = self[(r, c)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    /// Checked product; the operator form `&a * &b` panics instead.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dims(
                "matmul",
                format!(
                    "{}x{} times {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let n = other.cols;
        for r in 0..self.rows {
            let out_row = &mut out.data[r * n..(r + 1) * n];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(C64, C64) -> C64,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                op,
                format!(
                    "{}x{} vs {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Trace of a square matrix (panics otherwise).
    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius (Hilbert–Schmidt) norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Hermitian part (A + A†)/2, used to scrub rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// Column-stacked vectorization |A⟩⟩.
    pub fn vec_columns(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for c in 0..self.cols {
            for r in 0..self.rows {
                v.push(self[(r, c)]);
            }
        }
        v
    }

    /// Inverse of [`vec_columns`](Self::vec_columns).
    pub fn from_vec_columns(rows: usize, cols: usize, v: &[C64]) -> Result<Self> {
        if v.len() != rows * cols {
            return Err(Error::dims(
                "from_vec_columns",
                format!("vector of length {} for {rows}x{cols}", v.len()),
            ));
        }
        let mut m = Self::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m[(r, c)] = v[c * rows + r];
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::dims(
                "mul_vec",
                format!(
                    "{}x{} times vector of length {}",
                    self.rows,
                    self.cols,
                    v.len()
                ),
            ));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Conjugation U·A·U†.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    #[cfg(test)]
    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out[(r, c)] = m[(r, c)];
            }
        }
        out
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// Kronecker product; `a` carries the most significant index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                let row = ar * b.rows + br;
                for bc in 0..b.cols {
                    out.data[row * cols + ac * b.cols + bc] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Tr[A†B].
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::dims(
            "hs_inner",
            format!("{}x{} vs {}x{}", a.rows, a.cols, b.rows, b.cols),
        ));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// Tr[AB] without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.cols != b.rows || a.rows != b.cols {
        return Err(Error::dims(
            "trace_product",
            format!("{}x{} vs {}x{}", a.rows, a.cols, b.rows, b.cols),
        ));
    }
    let mut acc = ZERO;
    for r in 0..a.rows {
        for k in 0..a.cols {
            acc += a[(r, k)] * b[(k, r)];
        }
    }
    Ok(acc)
}

/// Partial trace of `m` over every subsystem not listed in `keep`.
///
/// `dims` lists subsystem dimensions, most significant first. The kept
/// subsystems stay in their original relative order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = m.square_dim("partial_trace")?;
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::dims(
            "partial_trace",
            format!("subsystem dims {dims:?} multiply to {total}, matrix is {n}x{n}"),
        ));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::dims(
                "partial_trace",
                format!(
                    "subsystem index {k} out of range for {} subsystems",
                    dims.len()
                ),
            ));
        }
        kept[k] = true;
    }

    let kept_dims: Vec<usize> = (0..dims.len())
        .filter(|&i| kept[i])
        .map(|i| dims[i])
        .collect();
    let traced_dims: Vec<usize> = (0..dims.len())
        .filter(|&i| !kept[i])
        .map(|i| dims[i])
        .collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced: usize = traced_dims.iter().product();

    // Splits a full multi-index into (kept index, traced index).
    let split = |mut idx: usize| -> (usize, usize) {
        let mut digits = vec![0usize; dims.len()];
        for s in (0..dims.len()).rev() {
            digits[s] = idx % dims[s];
            idx /= dims[s];
        }
        let (mut k, mut t) = (0usize, 0usize);
        for s in 0..dims.len() {
            if kept[s] {
                k = k * dims[s] + digits[s];
            } else {
                t = t * dims[s] + digits[s];
            }
        }
        (k, t)
    };
    let parts: Vec<(usize, usize)> = (0..n).map(split).collect();

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for r in 0..n {
        let (kr, tr) = parts[r];
        for c in 0..n {
            let (kc, tc) = parts[c];
            if tr == tc {
                out[(kr, kc)] += m[(r, c)];
            }
        }
    }
    debug_assert!(traced * out_dim == n);
    Ok(out)
}

/// Hermitian eigendecomposition. Eigenvalues ascend; eigenvectors are the
/// columns of the returned matrix.
pub fn eigh(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = a.square_dim("eigh")?;
    if !a.is_hermitian(1e-8 * (1.0 + a.norm())) {
        return Err(Error::InvalidInput(
            "eigh requires a Hermitian matrix".into(),
        ));
    }
    let eig = a.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_c)] = eig.eigenvectors[(r, old_c)];
        }
    }
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigh(a)?.0.first().copied().unwrap_or(0.0))
}

/// f(A) = V f(Λ) V† for Hermitian A.
pub fn hermitian_function(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = eigh(a)?;
    let n = vals.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let fl = f(lam);
        if fl == 0.0 {
            continue;
        }
        for r in 0..n {
            let vr = vecs[(r, k)] * fl;
            for c in 0..n {
                out[(r, c)] += vr * vecs[(c, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Square root of a positive semidefinite matrix (negative rounding noise is
/// clipped to zero).
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    hermitian_function(a, |x| x.max(0.0).sqrt())
}

/// Solves A X = B by LU decomposition with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.square_dim("solve")?;
    if b.rows != n {
        return Err(Error::dims(
            "solve",
            format!("{n}x{n} system with {} rhs rows", b.rows),
        ));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = b.cols;
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|r| (r, lu[(r, k)].norm()))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if pmax == 0.0 {
            return Err(Error::Numerical("singular matrix in solve".into()));
        }
        if piv != k {
            for c in 0..n {
                lu.data.swap(k * n + c, piv * n + c);
            }
            for c in 0..m {
                x.data.swap(k * m + c, piv * m + c);
            }
        }
        let d = lu[(k, k)];
        for r in (k + 1)..n {
            let f = lu[(r, k)] / d;
            if f == ZERO {
                continue;
            }
            for c in k..n {
                let v = lu[(k, c)];
                lu[(r, c)] -= f * v;
            }
            for c in 0..m {
                let v = x[(k, c)];
                x[(r, c)] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        let d = lu[(k, k)];
        for c in 0..m {
            let mut s = x[(k, c)];
            for j in (k + 1)..n {
                s -= lu[(k, j)] * x[(j, c)];
            }
            x[(k, c)] = s / d;
        }
    }
    Ok(x)
}

// Degree-13 Padé coefficients and the matching scaling threshold (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn matexp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.square_dim("matexp")?;
    let norm = a.norm_one();
    if !norm.is_finite() {
        return Err(Error::InvalidInput("matexp of non-finite matrix".into()));
    }
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale_real(0.5f64.powi(s));
    let id = ComplexMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> ComplexMatrix {
        let mut m = a6.scale_real(c6);
        m = &m + &a4.scale_real(c4);
        m = &m + &a2.scale_real(c2);
        &m + &id.scale_real(c0)
    };
    let u_inner = &a6 * &lin(b[13], b[11], b[9], 0.0);
    let u = &a * &(&u_inner + &lin(b[7], b[5], b[3], b[1]));
    let v_inner = &a6 * &lin(b[12], b[10], b[8], 0.0);
    let v = &v_inner + &lin(b[6], b[4], b[2], b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve(&q, &p)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Standard gates and helpers for embedding them into qubit registers.
pub mod gates {
    use super::*;

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]])
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    pub fn hadamard() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(2, 2, &[h, h, h, -h])
    }

    /// σ⁺ = (X + iY)/2 = |0⟩⟨1|, the decay jump used throughout.
    pub fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }

    pub fn sigma_minus() -> ComplexMatrix {
        sigma_plus().adjoint()
    }

    /// SWAP = Σ |i⟩⟨j| ⊗ |j⟩⟨i| on two d-level systems.
    pub fn swap(d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                m[(i * d + j, j * d + i)] = ONE;
            }
        }
        m
    }

    /// `g` applied to every one of `n` qubits.
    pub fn tensor_power(g: &ComplexMatrix, n: usize) -> ComplexMatrix {
        kron_all(std::iter::repeat_n(g, n))
    }

    /// Single-qubit operator `g` on qubit `q` of an `n`-qubit register.
    pub fn on_qubit(g: &ComplexMatrix, q: usize, n: usize) -> ComplexMatrix {
        let id = ComplexMatrix::identity(2);
        kron_all((0..n).map(|i| if i == q { g } else { &id }))
    }

    /// CNOT with the given control and target qubits in an `n`-qubit register.
    pub fn cnot(control: usize, target: usize, n: usize) -> ComplexMatrix {
        let dim = 1usize << n;
        let cbit = 1usize << (n - 1 - control);
        let tbit = 1usize << (n - 1 - target);
        let mut m = ComplexMatrix::zeros(dim, dim);
        for x in 0..dim {
            let y = if x & cbit != 0 { x ^ tbit } else { x };
            m[(y, x)] = ONE;
        }
        m
    }
}
