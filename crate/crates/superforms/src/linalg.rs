//! Exact dense linear algebra over the rationals: reduced row echelon form,
//! rank, kernels and subspace arithmetic for the truncated-homology and
//! spectral-sequence computations.

use num::Zero;

use crate::scalar::{self, Scalar};

/// Dense rational matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Scalar>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, scalar::one());
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zero(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = scalar::zero();
                for j in 0..self.cols {
                    if !self.get(i, j).is_zero() && !x[j].is_zero() {
                        acc += self.get(i, j) * &x[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k).is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if other.get(k, j).is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + self.get(i, k) * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// In-place Gauss-Jordan; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pivot_row) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if pivot_row != row {
                for j in 0..self.cols {
                    self.data
                        .swap(pivot_row * self.cols + j, row * self.cols + j);
                }
            }
            let inv = self.get(row, col).clone();
            for j in col..self.cols {
                let v = self.get(row, j) / &inv;
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r != row && !self.get(r, col).is_zero() {
                    let factor = self.get(r, col).clone();
                    for j in col..self.cols {
                        let v = self.get(r, j) - &factor * self.get(row, j);
                        self.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![scalar::zero(); self.cols];
            v[free] = scalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(r, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `A x = b`; `None` when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![scalar::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMatrix::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, scalar::one());
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let mut inv = QMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

/// A subspace of `Q^n`, kept as a reduced basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: Vec<Vec<Scalar>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let mut basis = Vec::new();
        for i in 0..ambient {
            let mut v = vec![scalar::zero(); ambient];
            v[i] = scalar::one();
            basis.push(v);
        }
        Subspace { ambient, basis }
    }

    /// Builds a subspace from spanning vectors, reducing to a basis.
    pub fn span(ambient: usize, vectors: &[Vec<Scalar>]) -> Self {
        let nonzero: Vec<Vec<Scalar>> = vectors
            .iter()
            .filter(|v| v.iter().any(|c| !c.is_zero()))
            .cloned()
            .collect();
        if nonzero.is_empty() {
            return Self::zero(ambient);
        }
        // row-reduce the stack of vectors to pick an independent set
        let mut m = QMatrix::zero(nonzero.len(), ambient);
        for (i, v) in nonzero.iter().enumerate() {
            for (j, c) in v.iter().enumerate() {
                m.set(i, j, c.clone());
            }
        }
        m.rref();
        let mut basis = Vec::new();
        for i in 0..m.rows {
            let row: Vec<Scalar> = (0..ambient).map(|j| m.get(i, j).clone()).collect();
            if row.iter().any(|c| !c.is_zero()) {
                basis.push(row);
            }
        }
        Subspace { ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        if v.iter().all(|c| c.is_zero()) {
            return true;
        }
        if self.basis.is_empty() {
            return false;
        }
        let m = QMatrix::from_columns(self.ambient, &self.basis);
        m.solve(v).is_some()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vectors = self.basis.clone();
        vectors.extend(other.basis.clone());
        Subspace::span(self.ambient, &vectors)
    }

    /// `{x in self : M x in target}` for `M` out of this ambient space.
    pub fn preimage_in(&self, m: &QMatrix, target: &Subspace) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::zero(self.ambient);
        }
        // solve M B a = C b, i.e. [M B | -C] (a; b) = 0
        let mb: Vec<Vec<Scalar>> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        let mut sys = QMatrix::zero(target.ambient, self.basis.len() + target.basis.len());
        for (j, col) in mb.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                sys.set(i, j, v.clone());
            }
        }
        for (j, col) in target.basis.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                sys.set(i, self.basis.len() + j, -v.clone());
            }
        }
        let kernel = sys.kernel_basis();
        let vectors: Vec<Vec<Scalar>> = kernel
            .iter()
            .map(|k| {
                let mut x = vec![scalar::zero(); self.ambient];
                for (j, b) in self.basis.iter().enumerate() {
                    if k[j].is_zero() {
                        continue;
                    }
                    for (i, c) in b.iter().enumerate() {
                        x[i] += &k[j] * c;
                    }
                }
                x
            })
            .collect();
        Subspace::span(self.ambient, &vectors)
    }

    /// Image of this subspace under `M`.
    pub fn image(&self, m: &QMatrix) -> Subspace {
        let vectors: Vec<Vec<Scalar>> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Subspace::span(m.rows, &vectors)
    }

    /// Representatives of `self / sub` for a contained subspace `sub`.
    pub fn quotient_representatives(&self, sub: &Subspace) -> Vec<Vec<Scalar>> {
        let mut reps = Vec::new();
        let mut accumulated = sub.clone();
        for v in &self.basis {
            if !accumulated.contains(v) {
                reps.push(v.clone());
                let mut vectors = accumulated.basis.clone();
                vectors.push(v.clone());
                accumulated = Subspace::span(self.ambient, &vectors);
            }
        }
        reps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn v(values: &[i64]) -> Vec<Scalar> {
        values.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let m = QMatrix::from_columns(2, &[v(&[1, 0]), v(&[0, 1]), v(&[1, 1])]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn solve_and_inverse() {
        let m = QMatrix::from_columns(2, &[v(&[2, 1]), v(&[1, 1])]);
        let x = m.solve(&v(&[3, 2])).unwrap();
        assert_eq!(m.mul_vec(&x), v(&[3, 2]));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        let sing = QMatrix::from_columns(2, &[v(&[1, 2]), v(&[2, 4])]);
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn subspace_arithmetic() {
        let s = Subspace::span(3, &[v(&[1, 0, 0]), v(&[1, 1, 0]), v(&[2, 1, 0])]);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&v(&[5, -3, 0])));
        assert!(!s.contains(&v(&[0, 0, 1])));
        let t = Subspace::span(3, &[v(&[0, 0, 1])]);
        assert_eq!(s.sum(&t).dim(), 3);
        let reps = s.quotient_representatives(&Subspace::span(3, &[v(&[1, 0, 0])]));
        assert_eq!(reps.len(), 1);
    }

    #[test]
    fn preimage() {
        // M projects (x,y,z) -> (x,y); preimage of span{(1,0)} is the xz-plane
        let mut m = QMatrix::zero(2, 3);
        m.set(0, 0, int(1));
        m.set(1, 1, int(1));
        let pre = Subspace::full(3).preimage_in(&m, &Subspace::span(2, &[v(&[1, 0])]));
        assert_eq!(pre.dim(), 2);
        assert!(pre.contains(&v(&[7, 0, 3])));
        assert!(!pre.contains(&v(&[0, 1, 0])));
    }
}
