//! Exact rational scalars and dense matrices.
//!
//! Every linear-algebraic computation in the crate (restriction maps,
//! coboundaries, boundary operators, marginalization) runs over
//! arbitrary-precision rationals so that kernel membership and section
//! checks are exact equalities.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Canonical arbitrary-precision rational (denominator positive, reduced).
pub type Rational = BigRational;

/// A column vector of rationals.
pub type Vector = Vec<Rational>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn vector(values: &[i64]) -> Vector {
    values.iter().map(|&v| int(v)).collect()
}

/// Parses `"-3"`, `"1/2"`, `"7.5"`, `"-0.125"` or `"1e-3"`-free decimal
/// literals into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num).ok_or_else(bad)?;
        let den = parse_integer(den).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numerator: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let denominator = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numerator, denominator);
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.trim_start_matches('+').parse().ok()
}

/// Renders a rational as `"-3"` or `"1/2"`.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Dense row-major matrix of exact rationals. Zero-row and zero-column
/// matrices are valid and represent maps to or from the zero space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// Result of exact Gauss-Jordan elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub rank: usize,
    /// Basis of the null space, one vector per free column.
    pub kernel_basis: Vec<Vector>,
    /// Pivot columns of the original matrix; a basis of the column space.
    pub image_basis: Vec<Vector>,
    pub pivots: Vec<usize>,
    pub rref: RationalMatrix,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims("matrix entries", rows * cols, entries.len()));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    /// Builds a matrix from rows; `cols` is needed to express `m × 0` shapes.
    pub fn from_rows(rows: Vec<Vector>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::dims(format!("matrix row {i}"), cols, row.len()));
            }
            entries.extend(row);
        }
        Ok(RationalMatrix {
            rows: n,
            cols,
            entries,
        })
    }

    /// Convenience constructor for integer literals. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vector> = rows.iter().map(|r| vector(r)).collect();
        Self::from_rows(rows, cols).expect("ragged integer matrix literal")
    }

    pub fn column(v: &[Rational]) -> Self {
        RationalMatrix {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dims(
                "matrix sum",
                format!("{:?}", self.shape()),
                format!("{:?}", other.shape()),
            ));
        }
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dims(
                "matrix product",
                format!("{} rows on the right", self.cols),
                other.rows,
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.entries[r * other.cols + c] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::dims("matrix-vector product", self.cols, v.len()));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Reduced row echelon form with the list of pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(lead, p);
            let inv = m.get(lead, c).recip();
            for k in c..m.cols {
                let v = m.get(lead, k) * &inv;
                m.set(lead, k, v);
            }
            for r in 0..m.rows {
                if r == lead || m.get(r, c).is_zero() {
                    continue;
                }
                let factor = m.get(r, c).clone();
                for k in c..m.cols {
                    let v = m.get(r, k) - &factor * m.get(lead, k);
                    m.set(r, k, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn decompose(&self) -> Decomposition {
        let (rref, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let kernel_basis = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -rref.get(row, f).clone();
                }
                v
            })
            .collect();
        let image_basis = pivots
            .iter()
            .map(|&p| (0..self.rows).map(|r| self.get(r, p).clone()).collect())
            .collect();
        Decomposition {
            rank: pivots.len(),
            kernel_basis,
            image_basis,
            pivots,
            rref,
        }
    }

    /// One solution of `self · x = rhs` (free variables set to zero), or
    /// `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Option<Vector>> {
        if rhs.len() != self.rows {
            return Err(Error::dims("linear system right-hand side", self.rows, rhs.len()));
        }
        let mut augmented = Self::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                augmented.set(r, c, self.get(r, c).clone());
            }
            augmented.set(r, self.cols, rhs[r].clone());
        }
        let (rref, pivots) = augmented.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = rref.get(row, self.cols).clone();
        }
        Ok(Some(x))
    }

    /// Stacks rows of `blocks` into one matrix. `blocks[i][j]`, when present,
    /// must have shape `row_dims[i] × col_dims[j]`; absent blocks are zero.
    pub fn block_assemble(
        blocks: &[Vec<Option<RationalMatrix>>],
        row_dims: &[usize],
        col_dims: &[usize],
    ) -> Result<Self> {
        if blocks.len() != row_dims.len() {
            return Err(Error::dims("block rows", row_dims.len(), blocks.len()));
        }
        let total_rows: usize = row_dims.iter().sum();
        let total_cols: usize = col_dims.iter().sum();
        let mut out = Self::zeros(total_rows, total_cols);
        let mut r0 = 0;
        for (i, block_row) in blocks.iter().enumerate() {
            if block_row.len() != col_dims.len() {
                return Err(Error::dims(
                    format!("block row {i}"),
                    col_dims.len(),
                    block_row.len(),
                ));
            }
            let mut c0 = 0;
            for (j, block) in block_row.iter().enumerate() {
                if let Some(b) = block {
                    if b.shape() != (row_dims[i], col_dims[j]) {
                        return Err(Error::dims(
                            format!("block ({i}, {j})"),
                            format!("{}x{}", row_dims[i], col_dims[j]),
                            format!("{}x{}", b.rows, b.cols),
                        ));
                    }
                    for r in 0..b.rows {
                        for c in 0..b.cols {
                            out.set(r0 + r, c0 + c, b.get(r, c).clone());
                        }
                    }
                }
                c0 += col_dims[j];
            }
            r0 += row_dims[i];
        }
        Ok(out)
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let blocks = vec![
            vec![Some(self.clone()), None],
            vec![None, Some(other.clone())],
        ];
        Self::block_assemble(&blocks, &[self.rows, other.rows], &[self.cols, other.cols])
            .expect("direct sum blocks are conformable by construction")
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::dims("vertical stack", self.cols, other.cols));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(RationalMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }
}

/// Scales a vector so its entries are coprime integers with a positive
/// leading nonzero entry. Leaves the zero vector alone.
pub fn primitive(v: &[Rational]) -> Vector {
    let Some(lead) = v.iter().find(|x| !x.is_zero()) else {
        return v.to_vec();
    };
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = if lead.is_negative() { -BigInt::one() } else { BigInt::one() };
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd * &sign))
        .collect()
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(format_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
