//! Dense integer matrices over arbitrary-precision integers, with Smith and
//! Hermite normal forms and exact integer linear system solving.
//!
//! Column-vector convention throughout: a homomorphism `Z^a -> Z^b` is a
//! `b x a` matrix acting on the left.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An integer column vector.
pub type IntVector = Vec<BigInt>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Square diagonal matrix.
    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone().into();
        }
        m
    }

    /// Builds a matrix from row-major data. Fails if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(
                "IntMatrix::from_vec",
                rows * cols,
                data.len(),
            ));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// Builds a matrix from rows of machine integers. Panics on ragged input;
    /// meant for literals in code and tests.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged matrix literal");
            data.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Builds a `rows x columns.len()` matrix from its columns.
    pub fn from_columns(rows: usize, columns: &[IntVector]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::dims("IntMatrix::from_columns", rows, col.len()));
            }
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
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

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> IntVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<IntVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::dims(
                "matrix product",
                format!("{} rows on the right", self.cols),
                other.rows,
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<IntVector> {
        if self.cols != v.len() {
            return Err(Error::dims("matrix-vector product", self.cols, v.len()));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, "matrix sum", |a, b| a + b)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, "matrix difference", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &IntMatrix,
        context: &str,
        f: impl Fn(&BigInt, &BigInt) -> BigInt,
    ) -> Result<IntMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::dims(
                context,
                format!("{:?}", self.shape()),
                format!("{:?}", other.shape()),
            ));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(&BigInt::from(-1))
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::dims("horizontal concatenation", self.rows, other.rows));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        Ok(out)
    }

    /// `[self ; other]`.
    pub fn vconcat(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(Error::dims("vertical concatenation", self.cols, other.cols));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn block_diagonal(blocks: &[IntMatrix]) -> IntMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Overwrites the block starting at `(r0, c0)` with `block`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &IntMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> IntMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (oi, i) in rows.clone().enumerate() {
            for (oj, j) in cols.clone().enumerate() {
                out[(oi, oj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (oj, &j) in idx.iter().enumerate() {
                out[(i, oj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        IntMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Drops all-zero columns.
    pub fn nonzero_columns(&self) -> IntMatrix {
        let keep: Vec<usize> = (0..self.cols)
            .filter(|&j| (0..self.rows).any(|i| !self[(i, j)].is_zero()))
            .collect();
        self.select_columns(&keep)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::dims("determinant", "square matrix", format!("{:?}", self.shape())));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * a[(n - 1, n - 1)].clone())
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.determinant().map_or(false, |d| d.abs().is_one())
    }

    pub(crate) fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub(crate) fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i += k * row_j
    pub(crate) fn add_row_multiple(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[j * self.cols + c] * k;
            self.data[i * self.cols + c] += v;
        }
    }

    /// col_i += k * col_j
    pub(crate) fn add_col_multiple(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + j] * k;
            self.data[r * self.cols + i] += v;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + c]);
            self.data[i * self.cols + c] = v;
        }
    }

    pub(crate) fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let v = -std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = v;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}{:?}", self.rows, self.cols, self.to_rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 0 || self.cols == 0 {
            return write!(f, "[] ({}x{})", self.rows, self.cols);
        }
        let width = self.data.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", x.to_string())?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// `u * m * v = d` with `u`, `v` unimodular and `d` diagonal with
/// `d_1 | d_2 | ... | d_rank`, all nonnegative, followed by zeros.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// The diagonal entries `d[(i, i)]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Working state for the Smith reduction: every operation on `m` is mirrored
/// into the transforms and their inverses.
struct SmithCalc {
    m: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SmithCalc {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.m.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.m.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    // row_i += k row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        self.m.add_row_multiple(i, j, k);
        self.u.add_row_multiple(i, j, k);
        self.u_inv.add_col_multiple(j, i, &-k);
    }

    // col_i += k col_j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        self.m.add_col_multiple(i, j, k);
        self.v.add_col_multiple(i, j, k);
        self.v_inv.add_row_multiple(j, i, &-k);
    }

    fn negate_row(&mut self, i: usize) {
        self.m.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Position of the smallest nonzero |entry| in rows/cols `t..`.
    fn min_in_submatrix(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m.rows() {
            for j in t..self.m.cols() {
                let x = &self.m[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| x.abs() < self.m[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Smallest nonzero |entry| in row t and column t (beyond the pivot).
    fn min_in_cross(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        let cells = (t + 1..self.m.rows())
            .map(|i| (i, t))
            .chain((t + 1..self.m.cols()).map(|j| (t, j)));
        for (i, j) in cells {
            let x = &self.m[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| x.abs() < self.m[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
        best
    }

    fn run(&mut self) {
        let (rows, cols) = self.m.shape();
        let mut t = 0;
        while t < rows.min(cols) {
            let Some((i, j)) = self.min_in_submatrix(t) else {
                break;
            };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            loop {
                let pivot = self.m[(t, t)].clone();
                for i in t + 1..rows {
                    let q = self.m[(i, t)].div_floor(&pivot);
                    self.add_row(i, t, &-q);
                }
                for j in t + 1..cols {
                    let q = self.m[(t, j)].div_floor(&pivot);
                    self.add_col(j, t, &-q);
                }
                if let Some((i, j)) = self.min_in_cross(t) {
                    // a remainder is smaller than the pivot; make it the pivot
                    self.swap_rows(t, i);
                    self.swap_cols(t, j);
                    continue;
                }
                // row and column t are clear; enforce divisibility
                let pivot = self.m[(t, t)].clone();
                let bad = (t + 1..rows).find(|&i| {
                    (t + 1..cols).any(|j| !self.m[(i, j)].is_multiple_of(&pivot))
                });
                match bad {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.m[(t, t)].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
    }
}

/// Smith normal form. Total on every shape, including empty matrices.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = m.shape();
    let mut calc = SmithCalc {
        m: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    calc.run();
    let rank = (0..rows.min(cols))
        .take_while(|&i| !calc.m[(i, i)].is_zero())
        .count();
    SmithForm {
        d: calc.m,
        u: calc.u,
        v: calc.v,
        u_inv: calc.u_inv,
        v_inv: calc.v_inv,
        rank,
    }
}

/// `m * u = h` with `h` in column Hermite normal form.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Number of nonzero (pivot) columns; they come first in `h`.
    pub rank: usize,
}

/// Column-style Hermite normal form: rows are scanned top to bottom, each
/// pivot is positive, the entries to its left are reduced into `[0, pivot)`,
/// and the entries to its right vanish.
pub fn hermite_normal_form(m: &IntMatrix) -> HermiteForm {
    let (rows, cols) = m.shape();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(cols);
    let mut c = 0;
    for r in 0..rows {
        if c == cols {
            break;
        }
        loop {
            // smallest nonzero entry of row r among columns c..
            let best = (c..cols)
                .filter(|&j| !h[(r, j)].is_zero())
                .min_by_key(|&j| h[(r, j)].abs());
            let Some(j) = best else {
                break;
            };
            h.swap_cols(c, j);
            u.swap_cols(c, j);
            let pivot = h[(r, c)].clone();
            let mut clean = true;
            for j in c + 1..cols {
                let q = h[(r, j)].div_floor(&pivot);
                h.add_col_multiple(j, c, &-&q);
                u.add_col_multiple(j, c, &-q);
                if !h[(r, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_col(c);
            u.negate_col(c);
        }
        let pivot = h[(r, c)].clone();
        for j in 0..c {
            let q = h[(r, j)].div_floor(&pivot);
            h.add_col_multiple(j, c, &-&q);
            u.add_col_multiple(j, c, &-q);
        }
        c += 1;
    }
    HermiteForm { h, u, rank: c }
}

/// A basis (as columns) of the integer kernel lattice `{x : m x = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let hf = hermite_normal_form(m);
    let idx: Vec<usize> = (hf.rank..m.cols()).collect();
    hf.u.select_columns(&idx)
}

/// A basis (as columns) of the lattice spanned by the columns of `m`.
pub fn image_basis(m: &IntMatrix) -> IntMatrix {
    let hf = hermite_normal_form(m);
    let idx: Vec<usize> = (0..hf.rank).collect();
    hf.h.select_columns(&idx)
}

/// Finds an integer `x` with `m x = b`, if one exists.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Result<Option<IntVector>> {
    if b.len() != m.rows() {
        return Err(Error::dims("solve_integer right-hand side", m.rows(), b.len()));
    }
    let snf = smith_normal_form(m);
    Ok(solve_with_smith(&snf, b))
}

/// Solves using a precomputed Smith form of the coefficient matrix.
pub(crate) fn solve_with_smith(snf: &SmithForm, b: &[BigInt]) -> Option<IntVector> {
    // u m v = d, so m x = b  <=>  d y = u b  with  x = v y
    let c = snf.u.mul_vec(b).expect("dimensions checked by caller");
    let mut y = vec![BigInt::zero(); snf.v.rows()];
    for (i, ci) in c.iter().enumerate() {
        if i < snf.rank {
            let (q, r) = ci.div_rem(&snf.d[(i, i)]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y).expect("square transform"))
}

/// Finds `x` with `m x - b` in the integer column span of `rel`, if one exists.
pub fn solve_modulo(m: &IntMatrix, rel: &IntMatrix, b: &[BigInt]) -> Result<Option<IntVector>> {
    if rel.rows() != m.rows() {
        return Err(Error::dims("solve_modulo relation rows", m.rows(), rel.rows()));
    }
    if b.len() != m.rows() {
        return Err(Error::dims("solve_modulo right-hand side", m.rows(), b.len()));
    }
    let aug = m.hconcat(rel)?;
    Ok(solve_integer(&aug, b)?.map(|mut x| {
        x.truncate(m.cols());
        x
    }))
}

/// Reusable solver for `m x ≡ b (mod span rel)` against many right-hand sides.
#[derive(Clone, Debug)]
pub struct ModularSolver {
    vars: usize,
    snf: SmithForm,
}

impl ModularSolver {
    pub fn new(m: &IntMatrix, rel: &IntMatrix) -> Result<Self> {
        let aug = m.hconcat(rel)?;
        Ok(ModularSolver {
            vars: m.cols(),
            snf: smith_normal_form(&aug),
        })
    }

    pub fn solve(&self, b: &[BigInt]) -> Result<Option<IntVector>> {
        if b.len() != self.snf.u.rows() {
            return Err(Error::dims("ModularSolver right-hand side", self.snf.u.rows(), b.len()));
        }
        Ok(solve_with_smith(&self.snf, b).map(|mut x| {
            x.truncate(self.vars);
            x
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> IntVector {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_smith(m: &IntMatrix, s: &SmithForm) {
        let prod = s.u.mul(m).unwrap().mul(&s.v).unwrap();
        assert_eq!(prod, s.d);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(m.cols()));
        let diag = s.diagonal();
        for i in 0..diag.len() {
            for j in 0..diag.len() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
            assert!(!diag[i].is_negative());
            if i + 1 < diag.len() && !diag[i + 1].is_zero() {
                assert!(diag[i + 1].is_multiple_of(&diag[i]));
            }
        }
    }

    #[test]
    fn smith_identity() {
        let m = IntMatrix::identity(3);
        let s = smith_normal_form(&m);
        check_smith(&m, &s);
        assert_eq!(s.d, IntMatrix::identity(3));
        assert_eq!(s.rank, 3);
    }

    #[test]
    fn smith_empty() {
        let m = IntMatrix::zeros(0, 0);
        let s = smith_normal_form(&m);
        assert_eq!(s.rank, 0);
        assert!(s.d.is_empty());
        let wide = IntMatrix::zeros(0, 3);
        let s = smith_normal_form(&wide);
        assert_eq!(s.v, IntMatrix::identity(3));
    }

    #[test]
    fn smith_two_by_two() {
        let m = IntMatrix::from_rows(&[[2, 4], [6, 8]]);
        let s = smith_normal_form(&m);
        check_smith(&m, &s);
        assert_eq!(s.d, IntMatrix::diagonal(&[2, 4]));
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn smith_needs_divisibility_fix() {
        let m = IntMatrix::diagonal(&[2, 3]);
        let s = smith_normal_form(&m);
        check_smith(&m, &s);
        assert_eq!(s.diagonal(), big(&[1, 6]));
    }

    #[test]
    fn determinant_small() {
        let m = IntMatrix::from_rows(&[[0, 2, 1], [3, 1, 0], [1, 1, 1]]);
        // expansion along the first row: -2*(3-0) + 1*(3-1) = -4
        assert_eq!(m.determinant().unwrap(), BigInt::from(-4));
        assert_eq!(IntMatrix::zeros(0, 0).determinant().unwrap(), BigInt::one());
    }

    #[test]
    fn hermite_examples() {
        let id = IntMatrix::identity(3);
        let hf = hermite_normal_form(&id);
        assert_eq!(hf.h, id);
        assert_eq!(hf.u, id);

        let m = IntMatrix::from_rows(&[[2, 4]]);
        let hf = hermite_normal_form(&m);
        assert_eq!(hf.h, IntMatrix::from_rows(&[[2, 0]]));
        assert_eq!(m.mul(&hf.u).unwrap(), hf.h);
        assert!(hf.u.is_unimodular());

        let z = IntMatrix::zeros(2, 3);
        let hf = hermite_normal_form(&z);
        assert_eq!(hf.h, z);
        assert_eq!(hf.u, IntMatrix::identity(3));
    }

    #[test]
    fn hermite_reduces_left_entries() {
        let m = IntMatrix::from_rows(&[[1, 0], [5, 3]]);
        let hf = hermite_normal_form(&m);
        assert_eq!(hf.h, IntMatrix::from_rows(&[[1, 0], [2, 3]]));
        assert_eq!(hermite_normal_form(&hf.h).h, hf.h);
    }

    #[test]
    fn solve_integer_examples() {
        let m = IntMatrix::from_rows(&[[2]]);
        assert_eq!(solve_integer(&m, &big(&[4])).unwrap(), Some(big(&[2])));
        assert_eq!(solve_integer(&m, &big(&[3])).unwrap(), None);

        let m = IntMatrix::from_rows(&[[1, 1], [0, 2]]);
        assert_eq!(solve_integer(&m, &big(&[3, 4])).unwrap(), Some(big(&[1, 2])));

        assert!(matches!(
            solve_integer(&m, &big(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_modulo_examples() {
        let m = IntMatrix::from_rows(&[[2]]);
        let x = solve_modulo(&m, &IntMatrix::from_rows(&[[3]]), &big(&[1])).unwrap().unwrap();
        // any solution works: 2x - 1 must be a multiple of 3
        assert!((BigInt::from(2) * &x[0] - BigInt::one()).is_multiple_of(&BigInt::from(3)));

        let x = solve_modulo(&IntMatrix::from_rows(&[[1]]), &IntMatrix::zeros(1, 0), &big(&[5]))
            .unwrap();
        assert_eq!(x, Some(big(&[5])));

        let x = solve_modulo(&m, &IntMatrix::from_rows(&[[4]]), &big(&[1])).unwrap();
        assert_eq!(x, None);

        assert!(solve_modulo(&m, &IntMatrix::zeros(2, 0), &big(&[1])).is_err());
    }

    #[test]
    fn kernel_of_row() {
        let m = IntMatrix::from_rows(&[[2, 4]]);
        let k = kernel_basis(&m);
        assert_eq!(k.shape(), (2, 1));
        assert!(m.mul(&k).unwrap().is_zero());
        // generator is ±(−2, 1)
        assert_eq!(k[(1, 0)].abs(), BigInt::one());
        assert_eq!(k[(0, 0)], BigInt::from(-2) * &k[(1, 0)]);
    }
}
