//! Value matrices, fractional allocations and instance descriptions.

use std::fmt;
use std::ops::{Deref, DerefMut};

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column sums of an allocation must be within this of 1.
pub const COLUMN_SUM_TOL: f64 = 1e-9;
/// Rows of a normalized value matrix must sum to 1 within this.
pub const NORMALIZATION_TOL: f64 = 1e-12;
const ENTRY_SLACK: f64 = 1e-12;

/// Dense row-major `n x m` matrix of reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize, m: usize) -> Self {
        Matrix::filled(n, m, 0.0)
    }

    pub fn filled(n: usize, m: usize, value: f64) -> Self {
        Matrix {
            n,
            m,
            data: vec![value; n * m],
        }
    }

    pub fn from_vec(n: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * m {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {n}x{m} matrix",
                data.len()
            )));
        }
        Ok(Matrix { n, m, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Matrix::from_vec(n, m, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.m + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, v: f64) {
        self.data[i * self.m + k] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn col_sum(&self, k: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, k)).sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            n: self.n,
            m: self.m,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        check_shape(self, other)?;
        Ok(Matrix {
            n: self.n,
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Frobenius inner product. Products with a zero factor count as zero, so an
    /// infinite entry facing a zero contributes nothing.
    pub fn frobenius(&self, other: &Matrix) -> Result<f64> {
        check_shape(self, other)?;
        Ok(frobenius_unchecked(&self.data, &other.data))
    }

    /// Entrywise 1-norm of `self - other`.
    pub fn l1_distance(&self, other: &Matrix) -> Result<f64> {
        check_shape(self, other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .sum())
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> Result<f64> {
        check_shape(self, other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs())))
    }
}

pub(crate) fn frobenius_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| if x == 0.0 || y == 0.0 { 0.0 } else { x * y })
        .sum()
}

pub(crate) fn check_shape(a: &Matrix, b: &Matrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "{}x{} vs {}x{}",
            a.n, a.m, b.n, b.m
        )));
    }
    Ok(())
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Per-(player, item type) mean values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueMatrix(Matrix);

impl ValueMatrix {
    pub fn new(matrix: Matrix) -> Self {
        ValueMatrix(matrix)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Matrix::from_rows(rows).map(ValueMatrix)
    }

    pub fn players(&self) -> usize {
        self.0.rows()
    }

    pub fn item_types(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn is_normalized(&self) -> bool {
        (0..self.players()).all(|i| (self.row_sum(i) - 1.0).abs() <= NORMALIZATION_TOL)
    }

    pub fn within_bounds(&self, a: f64, b: f64) -> bool {
        self.as_slice().iter().all(|&v| a <= v && v <= b)
    }

    /// Bit pattern of the entries, usable as a hash key.
    pub fn key(&self) -> Vec<u64> {
        self.as_slice().iter().map(|v| v.to_bits()).collect()
    }
}

impl Deref for ValueMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl DerefMut for ValueMatrix {
    fn deref_mut(&mut self) -> &mut Matrix {
        &mut self.0
    }
}

/// Column-stochastic `n x m` matrix: column `k` is the distribution over players for an
/// arriving item of type `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(Matrix);

impl Allocation {
    /// Validates entries and column sums.
    pub fn new(matrix: Matrix) -> Result<Self> {
        for (idx, &v) in matrix.as_slice().iter().enumerate() {
            if !(-ENTRY_SLACK..=1.0 + ENTRY_SLACK).contains(&v) {
                return Err(Error::InvalidAllocation(format!(
                    "entry ({}, {}) = {v} outside [0, 1]",
                    idx / matrix.cols(),
                    idx % matrix.cols()
                )));
            }
        }
        for k in 0..matrix.cols() {
            let s = matrix.col_sum(k);
            if (s - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(Error::InvalidAllocation(format!(
                    "column {k} sums to {s}"
                )));
            }
        }
        Ok(Allocation(matrix))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Allocation::new(Matrix::from_rows(rows)?)
    }

    /// Clamps negatives to zero and rescales each column to sum exactly to one.
    /// Used to strip rounding noise from LP solutions.
    pub fn renormalized(mut matrix: Matrix) -> Result<Self> {
        let (n, m) = matrix.shape();
        for k in 0..m {
            let mut s = 0.0;
            for i in 0..n {
                let v = matrix.get(i, k).max(0.0);
                matrix.set(i, k, v);
                s += v;
            }
            if (s - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidAllocation(format!(
                    "column {k} sums to {s} before renormalization"
                )));
            }
            for i in 0..n {
                matrix.set(i, k, matrix.get(i, k) / s);
            }
        }
        Ok(Allocation(matrix))
    }

    pub fn players(&self) -> usize {
        self.0.rows()
    }

    pub fn item_types(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn is_valid(&self) -> bool {
        Allocation::new(self.0.clone()).is_ok()
    }
}

impl Deref for Allocation {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// Every entry `1/n`: each item goes to a uniformly random player.
pub fn uar_allocation(n: usize, m: usize) -> Allocation {
    assert!(n >= 1 && m >= 1, "uar allocation needs n, m >= 1");
    Allocation(Matrix::filled(n, m, 1.0 / n as f64))
}

/// `<X, mu>_F`, the sum of players' values for `X` (the expected per-item welfare is
/// this divided by `m`; the divisor is dropped everywhere).
pub fn frobenius_welfare(x: &Allocation, mu: &ValueMatrix) -> Result<f64> {
    x.frobenius(mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Proportionality,
    EnvyFreeness,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::Proportionality => "proportionality",
            ConstraintKind::EnvyFreeness => "envy_freeness",
        })
    }
}

/// The public parameters every policy may see.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PublicSpec {
    pub n: usize,
    pub m: usize,
    pub horizon: usize,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub m: usize,
    pub horizon: usize,
    pub a: f64,
    pub b: f64,
    pub mu_star: ValueMatrix,
    pub noise_sigma: f64,
    pub seed: u64,
    pub constraint_kind: ConstraintKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Shape { expected: (usize, usize), got: (usize, usize) },
    EmptyDimension,
    ZeroHorizon,
    BadBounds { a: f64, b: f64 },
    BadNoise(f64),
    Normalization { row: usize, sum: f64 },
    Bound { i: usize, k: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { expected, got } => write!(
                f,
                "mu_star is {}x{}, expected {}x{}",
                got.0, got.1, expected.0, expected.1
            ),
            Violation::EmptyDimension => write!(f, "n and m must be at least 1"),
            Violation::ZeroHorizon => write!(f, "T must be at least 1"),
            Violation::BadBounds { a, b } => write!(f, "bounds must satisfy 0 < a <= b, got a={a}, b={b}"),
            Violation::BadNoise(s) => write!(f, "noise_sigma must be nonnegative, got {s}"),
            Violation::Normalization { row, sum } => write!(f, "row {row} of mu_star sums to {sum}"),
            Violation::Bound { i, k, value } => {
                write!(f, "mu_star[{i}][{k}] = {value} is outside [a, b]")
            }
        }
    }
}

impl InstanceSpec {
    pub fn public(&self) -> PublicSpec {
        PublicSpec {
            n: self.n,
            m: self.m,
            horizon: self.horizon,
            a: self.a,
            b: self.b,
        }
    }

    /// Every violated invariant, with indices. Empty means valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n == 0 || self.m == 0 {
            out.push(Violation::EmptyDimension);
        }
        if self.horizon == 0 {
            out.push(Violation::ZeroHorizon);
        }
        if !(self.a > 0.0 && self.a <= self.b && self.b.is_finite()) {
            out.push(Violation::BadBounds { a: self.a, b: self.b });
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            out.push(Violation::BadNoise(self.noise_sigma));
        }
        if self.mu_star.shape() != (self.n, self.m) {
            out.push(Violation::Shape {
                expected: (self.n, self.m),
                got: self.mu_star.shape(),
            });
            return out;
        }
        for i in 0..self.n {
            let sum = self.mu_star.row_sum(i);
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                out.push(Violation::Normalization { row: i, sum });
            }
        }
        for i in 0..self.n {
            for k in 0..self.m {
                let value = self.mu_star.get(i, k);
                if !(self.a <= value && value <= self.b) {
                    out.push(Violation::Bound { i, k, value });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

/// Draws a normalized `n x m` value matrix with entries in `[a, b]`.
///
/// Each row is a symmetric Dirichlet(`concentration`) draw mapped affinely onto
/// `{x >= a, sum x = 1}`; rows with an entry above `b` are rejected and redrawn.
pub fn random_normalized<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    a: f64,
    b: f64,
    concentration: f64,
    rng: &mut R,
) -> Result<ValueMatrix> {
    let mf = m as f64;
    if !(a > 0.0 && a <= b && mf * a <= 1.0 + NORMALIZATION_TOL && mf * b >= 1.0 - NORMALIZATION_TOL) {
        return Err(Error::InvalidArgument(format!(
            "no normalized {m}-vector fits in [{a}, {b}]"
        )));
    }
    let gamma = Gamma::new(concentration, 1.0)
        .map_err(|e| Error::InvalidArgument(format!("dirichlet concentration: {e}")))?;
    let spare = 1.0 - mf * a;
    let mut data = Vec::with_capacity(n * m);
    for _ in 0..n {
        let mut accepted = None;
        for _ in 0..100_000 {
            let draws: Vec<f64> = (0..m).map(|_| gamma.sample(rng)).collect();
            let total: f64 = draws.iter().sum();
            if total <= 0.0 {
                continue;
            }
            let mut row: Vec<f64> = draws.iter().map(|g| a + spare * g / total).collect();
            // Absorb rounding so the row sums to one.
            let s: f64 = row.iter().sum();
            let last = m - 1;
            row[last] += 1.0 - s;
            if row.iter().all(|&v| v >= a - NORMALIZATION_TOL && v <= b) {
                accepted = Some(row);
                break;
            }
        }
        let row = accepted.ok_or_else(|| {
            Error::InvalidArgument(format!("rejection sampling into [{a}, {b}] did not converge"))
        })?;
        data.extend(row);
    }
    Ok(ValueMatrix(Matrix::from_vec(n, m, data)?))
}
