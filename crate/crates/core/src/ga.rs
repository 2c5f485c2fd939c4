//! Real-vector geometric algebra restricted to grades 0, 1 and 2.
//!
//! Bivectors are stored as their strictly upper-triangular coefficients
//! `b_ij = x_i y_j - y_i x_j` (`i < j`, zero-based), ordered row by row:
//! `(0,1), (0,2), .., (0,n-1), (1,2), ..`. The dense skew-symmetric matrix is
//! available through [`Bivector::to_matrix`].

use std::fmt;
use std::ops::{Index, Neg};

use crate::error::{Error, Result};

/// Max-abs deviation of `Q^T Q` from the identity accepted as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// An n-dimensional real vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct VecN(Vec<f64>);

impl VecN {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = components.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(VecN(components))
    }

    pub fn from_slice(components: &[f64]) -> Result<Self> {
        Self::new(components.to_vec())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    /// Unit basis vector `e_index` (zero-based).
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::param(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut c = vec![0.0; dim];
        c[index] = 1.0;
        Self::new(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Euclidean magnitude `sqrt(x . x)`.
    pub fn magnitude(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn scale(&self, a: f64) -> VecN {
        VecN(self.0.iter().map(|x| a * x).collect())
    }

    pub fn add(&self, other: &VecN) -> Result<VecN> {
        check_dims(self, other)?;
        Ok(VecN(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &VecN) -> Result<VecN> {
        check_dims(self, other)?;
        Ok(VecN(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }
}

impl Index<usize> for VecN {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for VecN {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        VecN::new(v)
    }
}

fn check_dims(x: &VecN, y: &VecN) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() });
    }
    Ok(())
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { left: n, right: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    /// 2-D counter-clockwise rotation.
    pub fn rotation2(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Matrix { n: 2, data: vec![c, -s, s, c] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut t = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &VecN) -> Result<VecN> {
        if self.n != x.dim() {
            return Err(Error::DimensionMismatch { left: self.n, right: x.dim() });
        }
        let out = self.data.chunks(self.n).map(|row| row.iter().zip(x.iter()).map(|(a, b)| a * b).sum()).collect();
        VecN::new(out)
    }

    /// Max-abs entry of `Q^T Q - I`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.get(k, i) * self.get(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonality_defect() <= ORTHOGONALITY_TOL
    }
}

/// Grade-2 element stored as upper-triangular coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivector {
    dim: usize,
    coeffs: Vec<f64>,
}

/// Number of independent coefficients of a bivector in `dim` dimensions.
pub fn bivector_len(dim: usize) -> usize {
    dim * dim.saturating_sub(1) / 2
}

impl Bivector {
    pub fn zero(dim: usize) -> Self {
        Bivector { dim, coeffs: vec![0.0; bivector_len(dim)] }
    }

    /// Builds from coefficients in storage order.
    pub fn from_coeffs(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = bivector_len(dim);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { left: expected, right: coeffs.len() });
        }
        Ok(Bivector { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Pairs `(i, j)`, `i < j`, in storage order.
    pub fn index_pairs(dim: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..dim).flat_map(move |i| (i + 1..dim).map(move |j| (i, j)))
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        // row i starts after sum_{r<i} (dim - 1 - r) entries
        i * (2 * self.dim - i - 1) / 2 + (j - i - 1)
    }

    /// Signed coefficient for any ordered pair: `get(j, i) == -get(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.dim && j < self.dim, "bivector index out of range");
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coeffs[self.offset(i, j)],
            std::cmp::Ordering::Greater => -self.coeffs[self.offset(j, i)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// `sqrt(sum_{i<j} b_ij^2)`.
    pub fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(|b| b * b).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&b| b == 0.0)
    }

    pub fn scale(&self, a: f64) -> Bivector {
        Bivector { dim: self.dim, coeffs: self.coeffs.iter().map(|b| a * b).collect() }
    }

    /// Skew-symmetric matrix `B[i][j] = b_ij`, `B[j][i] = -b_ij`.
    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim);
        for (k, (i, j)) in Self::index_pairs(self.dim).enumerate() {
            m.data[i * self.dim + j] = self.coeffs[k];
            m.data[j * self.dim + i] = -self.coeffs[k];
        }
        m
    }

    /// `(b_12, b_23, b_31)` in one-based cyclic order, for 3-D bivectors.
    pub fn cyclic_triple(&self) -> Option<(f64, f64, f64)> {
        (self.dim == 3).then(|| (self.get(0, 1), self.get(1, 2), self.get(2, 0)))
    }
}

impl Neg for Bivector {
    type Output = Bivector;

    fn neg(self) -> Bivector {
        self.scale(-1.0)
    }
}

impl fmt::Display for Bivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((i, j), b) in Self::index_pairs(self.dim).zip(&self.coeffs) {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{b} e{}^e{}", i + 1, j + 1)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Scalar plus bivector, the result of a geometric product of two vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    pub scalar: f64,
    pub bivector: Bivector,
}

impl Multivector {
    pub fn new(scalar: f64, bivector: Bivector) -> Self {
        Multivector { scalar, bivector }
    }

    pub fn scale(&self, a: f64) -> Multivector {
        Multivector { scalar: a * self.scalar, bivector: self.bivector.scale(a) }
    }
}

pub fn inner(x: &VecN, y: &VecN) -> Result<f64> {
    check_dims(x, y)?;
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a * b).sum())
}

pub fn magnitude(x: &VecN) -> f64 {
    x.magnitude()
}

/// `M[i][j] = x_i y_j`.
pub fn outer(x: &VecN, y: &VecN) -> Result<Matrix> {
    check_dims(x, y)?;
    let n = x.dim();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.data[i * n + j] = x[i] * y[j];
        }
    }
    Ok(m)
}

pub fn wedge(x: &VecN, y: &VecN) -> Result<Bivector> {
    check_dims(x, y)?;
    let n = x.dim();
    let coeffs = Bivector::index_pairs(n).map(|(i, j)| x[i] * y[j] - y[i] * x[j]).collect();
    Ok(Bivector { dim: n, coeffs })
}

pub fn bivector_magnitude(b: &Bivector) -> f64 {
    b.magnitude()
}

/// `xy = x . y + x ^ y`.
pub fn geometric_product(x: &VecN, y: &VecN) -> Result<Multivector> {
    Ok(Multivector { scalar: inner(x, y)?, bivector: wedge(x, y)? })
}

/// `Q x` for an orthogonal `Q`.
pub fn apply_orthogonal(x: &VecN, q: &Matrix) -> Result<VecN> {
    if q.size() != x.dim() {
        return Err(Error::DimensionMismatch { left: q.size(), right: x.dim() });
    }
    let deviation = q.orthogonality_defect();
    if deviation > ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal { deviation });
    }
    q.mul_vec(x)
}
