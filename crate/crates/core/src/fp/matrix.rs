use super::Field;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use std::fmt;

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl FpMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> FpMatrix {
        let mut m = FpMatrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows(field: Field, rows: &[Vec<i64>]) -> Result<FpMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| field.reduce(v)).collect();
        Ok(FpMatrix {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, f: impl Fn(usize, usize) -> u8) -> FpMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % field.p());
            }
        }
        FpMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v % self.field.p();
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    fn check_field(&self, other: &FpMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.p(), other.field.p()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.field.p() as u32;
        let n = other.cols;
        let mut acc = vec![0u32; n];
        let mut out = FpMatrix::zeros(self.field, self.rows, n);
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let a = a as u32;
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot += a * b as u32;
                }
                // Keep the accumulators far from overflow.
                if k % 4096 == 4095 {
                    acc.iter_mut().for_each(|s| *s %= p);
                }
            }
            for (j, s) in acc.iter().enumerate() {
                out.data[i * n + j] = (s % p) as u8;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    fn zip_with(&self, other: &FpMatrix, op: impl Fn(Field, u8, u8) -> u8) -> Result<FpMatrix> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("shapes differ".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| op(self.field, a, b))
            .collect();
        Ok(FpMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: u8) -> FpMatrix {
        let f = self.field;
        FpMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c % f.p())).collect(),
        }
    }

    /// In-place `self += c * other` for equal shapes.
    pub fn add_scaled(&mut self, c: u8, other: &FpMatrix) {
        let f = self.field;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, f.mul(c, b));
        }
    }

    pub fn transpose(&self) -> FpMatrix {
        FpMatrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Top-left `rows x cols` corner.
    pub fn submatrix(&self, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix::from_fn(self.field, rows, cols, |i, j| self.get(i, j))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == (i == j) as u8))
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| self.get(i, i) == 1 && (0..i).all(|j| self.get(i, j) == 0))
    }

    pub fn pow(&self, mut e: u64) -> Result<FpMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut acc = FpMatrix::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<FpMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let f = self.field;
        let mut a = self.clone();
        let mut inv = FpMatrix::identity(f, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != 0).ok_or(Error::Singular)?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let s = f.inv(a.get(col, col)).expect("nonzero pivot");
            a.scale_row(col, s);
            inv.scale_row(col, s);
            for r in 0..n {
                let c = a.get(r, col);
                if r != col && c != 0 {
                    let c = f.neg(c);
                    a.add_row_multiple(r, col, c);
                    inv.add_row_multiple(r, col, c);
                }
            }
        }
        Ok(inv)
    }

    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| a.get(r, col) != 0) else {
                continue;
            };
            a.swap_rows(pivot, rank);
            let s = f.inv(a.get(rank, col)).expect("nonzero pivot");
            a.scale_row(rank, s);
            for r in rank + 1..self.rows {
                let c = a.get(r, col);
                if c != 0 {
                    a.add_row_multiple(r, rank, f.neg(c));
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, s: u8) {
        let f = self.field;
        for j in 0..self.cols {
            let v = &mut self.data[r * self.cols + j];
            *v = f.mul(*v, s);
        }
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, c: u8) {
        let f = self.field;
        for j in 0..self.cols {
            let s = self.data[source * self.cols + j];
            let t = &mut self.data[target * self.cols + j];
            *t = f.add(*t, f.mul(c, s));
        }
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix(p={}, {}x{})", self.field.p(), self.rows, self.cols)?;
        for i in 0..self.rows.min(32) {
            let row: Vec<String> = self.row(i).iter().take(32).map(u8::to_string).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Kronecker product: `(A⊗B)[i·rB+k][j·cB+l] = A[i][j]·B[k][l]`.
pub fn kron(a: &FpMatrix, b: &FpMatrix) -> Result<FpMatrix> {
    a.check_field(b)?;
    let f = a.field;
    Ok(FpMatrix::from_fn(f, a.rows * b.rows, a.cols * b.cols, |r, c| {
        f.mul(a.get(r / b.rows, c / b.cols), b.get(r % b.rows, c % b.cols))
    }))
}

/// Transition matrix to the binomial basis and its inverse.
///
/// `T[i][j] = C(p-1-i, j)`; the inverse is `T` transposed about the secondary diagonal.
pub fn binomial_transition(p: u64) -> Result<(FpMatrix, FpMatrix)> {
    let f = Field::new(p)?;
    let n = p as usize;
    let t = FpMatrix::from_fn(f, n, n, |i, j| f.binomial((n - 1 - i) as u64, j as u64));
    let tinv = FpMatrix::from_fn(f, n, n, |i, j| t.get(n - 1 - j, n - 1 - i));
    Ok((t, tinv))
}

/// Dense matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<IntMatrix> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols: c,
            data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn kron(&self, other: &IntMatrix) -> IntMatrix {
        let (rows, cols) = (self.rows * other.rows, self.cols * other.cols);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(
                    self.get(r / other.rows, c / other.cols) * other.get(r % other.rows, c % other.cols),
                );
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension("inner dimensions differ".into()));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = BigInt::from(0);
                for k in 0..self.cols {
                    s += self.get(i, k) * other.get(k, j);
                }
                data.push(s);
            }
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

/// Un-normalized Sylvester–Hadamard matrix `H_n = [[H, H], [H, -H]]`, `H_0 = [[1]]`.
pub fn sylvester(n: u32) -> IntMatrix {
    let h1 = IntMatrix::from_rows(&[vec![1, 1], vec![1, -1]]).expect("square");
    let mut h = IntMatrix::from_rows(&[vec![1]]).expect("square");
    for _ in 0..n {
        h = h1.kron(&h);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::new(2).unwrap()
    }

    #[test]
    fn kron_identity() {
        let i2 = FpMatrix::identity(f2(), 2);
        assert_eq!(kron(&i2, &i2).unwrap(), FpMatrix::identity(f2(), 4));
    }

    #[test]
    fn kron_binomial_p2() {
        let (t, _) = binomial_transition(2).unwrap();
        // hand expansion of the definition
        let want = FpMatrix::from_rows(
            f2(),
            &[vec![1, 1, 1, 1], vec![1, 0, 1, 0], vec![1, 1, 0, 0], vec![1, 0, 0, 0]],
        )
        .unwrap();
        assert_eq!(kron(&t, &t).unwrap(), want);
        let left = kron(&t, &kron(&t, &t).unwrap()).unwrap();
        let right = kron(&kron(&t, &t).unwrap(), &t).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn kron_modulus_mismatch() {
        let a = FpMatrix::identity(f2(), 2);
        let b = FpMatrix::identity(Field::new(3).unwrap(), 2);
        assert_eq!(kron(&a, &b), Err(Error::ModulusMismatch(2, 3)));
    }

    #[test]
    fn binomial_transition_small() {
        let (t, tinv) = binomial_transition(2).unwrap();
        assert_eq!(t.to_rows(), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(tinv.to_rows(), vec![vec![0, 1], vec![1, 1]]);
        let (t3, _) = binomial_transition(3).unwrap();
        assert_eq!(t3.to_rows(), vec![vec![1, 2, 1], vec![1, 1, 0], vec![1, 0, 0]]);
        assert_eq!(binomial_transition(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn binomial_transition_inverts() {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
            let (t, tinv) = binomial_transition(p).unwrap();
            assert!(t.mul(&tinv).unwrap().is_identity(), "p={p}");
            assert_eq!(t.inverse().unwrap(), tinv);
        }
    }

    #[test]
    fn sylvester_small() {
        assert_eq!(sylvester(0), IntMatrix::from_rows(&[vec![1]]).unwrap());
        assert_eq!(sylvester(1), IntMatrix::from_rows(&[vec![1, 1], vec![1, -1]]).unwrap());
    }

    #[test]
    fn sylvester_rows_orthogonal() {
        let h = sylvester(3);
        let g = h.mul(&h.transpose()).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 8 } else { 0 };
                assert_eq!(*g.get(i, j), BigInt::from(want));
            }
        }
    }

    #[test]
    fn inverse_and_rank() {
        let f = Field::new(5).unwrap();
        let m = FpMatrix::from_rows(f, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert!(m.mul(&m.inverse().unwrap()).unwrap().is_identity());
        let s = FpMatrix::from_rows(f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(s.inverse(), Err(Error::Singular));
        assert_eq!(s.rank(), 1);
    }
}
