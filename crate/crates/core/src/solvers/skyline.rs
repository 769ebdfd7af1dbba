//! Symmetric matrices in skyline (variable band) storage and their Cholesky
//! factorization. Only the upper triangle is stored, column by column, from
//! the first structurally nonzero row down to the diagonal.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Pivots below this fraction of the original diagonal count as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct SkylineMatrix {
    n: usize,
    first_row: Vec<usize>,
    col_start: Vec<usize>,
    values: Vec<f64>,
}

impl SkylineMatrix {
    /// Zero matrix whose column `j` holds rows `first_row[j]..=j`.
    pub fn from_profile(first_row: Vec<usize>) -> Self {
        let n = first_row.len();
        let mut col_start = Vec::with_capacity(n + 1);
        col_start.push(0);
        for (j, &f) in first_row.iter().enumerate() {
            assert!(f <= j, "profile row {f} below the diagonal of column {j}");
            col_start.push(col_start[j] + j - f + 1);
        }
        let values = vec![0.0; col_start[n]];
        Self {
            n,
            first_row,
            col_start,
            values,
        }
    }

    /// Profile that covers every pair of equations appearing together in `groups`.
    pub fn profile_of<'a>(n: usize, groups: impl IntoIterator<Item = &'a [usize]>) -> Vec<usize> {
        let mut first: Vec<usize> = (0..n).collect();
        for g in groups {
            if let Some(&lo) = g.iter().min() {
                for &j in g {
                    first[j] = first[j].min(lo);
                }
            }
        }
        first
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let first_row = (0..n)
            .map(|j| (0..j).find(|&i| a[(i, j)] != 0.0).unwrap_or(j))
            .collect();
        let mut s = Self::from_profile(first_row);
        for j in 0..n {
            for i in s.first_row[j]..=j {
                *s.entry_mut(i, j).unwrap() = a[(i, j)];
            }
        }
        s
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn first_row(&self) -> &[usize] {
        &self.first_row
    }

    /// Number of stored coefficients.
    pub fn stored(&self) -> usize {
        self.values.len()
    }

    fn column(&self, j: usize) -> &[f64] {
        &self.values[self.col_start[j]..self.col_start[j + 1]]
    }

    fn entry_mut(&mut self, i: usize, j: usize) -> Option<&mut f64> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if i < self.first_row[j] {
            return None;
        }
        Some(&mut self.values[self.col_start[j] + i - self.first_row[j]])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if i < self.first_row[j] {
            0.0
        } else {
            self.values[self.col_start[j] + i - self.first_row[j]]
        }
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    ///
    /// Panics if the entry lies outside the profile.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        match self.entry_mut(i, j) {
            Some(e) => *e += v,
            None => panic!("entry ({i}, {j}) outside the skyline profile"),
        }
    }

    pub fn diagonal(&self) -> DVector<f64> {
        DVector::from_fn(self.n, |j, _| self.get(j, j))
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.n);
        for j in 0..self.n {
            let f = self.first_row[j];
            let col = self.column(j);
            let (upper, diag) = col.split_at(col.len() - 1);
            let mut acc = diag[0] * x[j];
            for (k, &a) in upper.iter().enumerate() {
                let i = f + k;
                acc += a * x[i];
                y[i] += a * x[j];
            }
            y[j] += acc;
        }
        y
    }

    pub fn mul_mat(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, x.ncols());
        for c in 0..x.ncols() {
            out.set_column(c, &self.mul_vec(&x.column(c).into_owned()));
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Largest absolute stored coefficient.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Upper-triangle nonzeros as `row col value` lines, 0-based, after a
    /// `# n stored` header.
    pub fn write_triplets(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "# {} {}", self.n, self.values.len())?;
        for j in 0..self.n {
            for (k, &v) in self.column(j).iter().enumerate() {
                if v != 0.0 {
                    writeln!(w, "{} {} {:.16e}", self.first_row[j] + k, j, v)?;
                }
            }
        }
        Ok(())
    }

    /// Cholesky factor `A = UᵀU` sharing this profile.
    pub fn cholesky(&self) -> Result<SkylineCholesky> {
        let mut u = self.clone();
        for j in 0..self.n {
            let fj = u.first_row[j];
            let sj = u.col_start[j];
            for i in fj..j {
                let fi = u.first_row[i];
                let si = u.col_start[i];
                let start = fi.max(fj);
                let mut s = u.values[sj + i - fj];
                let ci = &u.values[si + start - fi..si + i - fi];
                let cj = &u.values[sj + start - fj..sj + i - fj];
                s -= dot(ci, cj);
                let uii = u.values[si + i - fi];
                u.values[sj + i - fj] = s / uii;
            }
            let cj = &u.values[sj..sj + j - fj];
            let original = self.values[sj + j - fj];
            let d = original - dot(cj, cj);
            if !(d > SINGULAR_PIVOT_RATIO * original.abs()) || !d.is_finite() {
                return Err(Error::Singular {
                    equation: j,
                    pivot: d,
                    node_dof: format!("equation {j}"),
                });
            }
            u.values[sj + j - fj] = d.sqrt();
        }
        Ok(SkylineCholesky { u })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    u: SkylineMatrix,
}

impl SkylineCholesky {
    pub fn size(&self) -> usize {
        self.u.n
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let u = &self.u;
        let mut y = b.clone();
        for j in 0..u.n {
            let f = u.first_row[j];
            let col = u.column(j);
            let (upper, diag) = col.split_at(col.len() - 1);
            let s: f64 = upper.iter().enumerate().map(|(k, a)| a * y[f + k]).sum();
            y[j] = (y[j] - s) / diag[0];
        }
        for j in (0..u.n).rev() {
            let f = u.first_row[j];
            let col = u.column(j);
            let (upper, diag) = col.split_at(col.len() - 1);
            y[j] /= diag[0];
            let xj = y[j];
            for (k, a) in upper.iter().enumerate() {
                y[f + k] -= a * xj;
            }
        }
        y
    }

    pub fn solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(b.nrows(), b.ncols());
        for c in 0..b.ncols() {
            out.set_column(c, &self.solve(&b.column(c).into_owned()));
        }
        out
    }

    /// Natural log of the determinant of the factored matrix.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.u.n).map(|j| self.u.get(j, j).ln()).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn banded_spd(n: usize, seed: u64) -> DMatrix<f64> {
        // Deterministic pseudo-random SPD matrix with a ragged profile.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            let band = 1 + (j * 7 + 3) % 5;
            for i in j.saturating_sub(band)..j {
                let v = next();
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        for j in 0..n {
            a[(j, j)] = a.column(j).abs().sum() + 1.0 + next().abs();
        }
        a
    }

    #[test]
    fn factor_and_solve_match_dense_oracle() {
        let a = banded_spd(40, 3);
        let s = SkylineMatrix::from_dense(&a);
        assert_eq!(s.to_dense(), a);
        let b = DVector::from_fn(40, |i, _| (i as f64).sin());
        let x = s.cholesky().unwrap().solve(&b);
        let oracle = a.clone().cholesky().unwrap().solve(&b);
        assert!((&x - &oracle).amax() <= 1e-12 * oracle.amax());
        let det = a.clone().cholesky().unwrap().determinant().ln();
        assert!((s.cholesky().unwrap().log_det() - det).abs() <= 1e-10 * det.abs());
    }

    #[test]
    fn matvec_matches_dense() {
        let a = banded_spd(25, 9);
        let s = SkylineMatrix::from_dense(&a);
        let x = DVector::from_fn(25, |i, _| 1.0 + i as f64);
        assert!((s.mul_vec(&x) - &a * &x).amax() <= 1e-12 * (&a * &x).amax());
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let s = SkylineMatrix::from_dense(&DMatrix::identity(6, 6));
        let b = DVector::from_vec(vec![1.0, -2.0, 3.0, 0.0, 5.0, 6.0]);
        assert_eq!(s.cholesky().unwrap().solve(&b), b);
    }

    #[test]
    fn singular_matrix_names_the_equation() {
        let mut a = DMatrix::identity(4, 4);
        a[(1, 1)] = 1.0;
        a[(2, 2)] = 1.0;
        a[(1, 2)] = 1.0;
        a[(2, 1)] = 1.0;
        match SkylineMatrix::from_dense(&a).cholesky() {
            Err(Error::Singular { equation, .. }) => assert_eq!(equation, 2),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn profile_covers_groups() {
        let first = SkylineMatrix::profile_of(6, [&[1usize, 4][..], &[3, 5][..]]);
        assert_eq!(first, vec![0, 1, 2, 3, 1, 3]);
    }

    #[test]
    fn triplets_round_trip_nonzeros() {
        let a = banded_spd(5, 1);
        let mut buf = Vec::new();
        SkylineMatrix::from_dense(&a).write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut b = DMatrix::zeros(5, 5);
        for line in text.lines().skip(1) {
            let p: Vec<&str> = line.split_whitespace().collect();
            let (i, j, v): (usize, usize, f64) = (p[0].parse().unwrap(), p[1].parse().unwrap(), p[2].parse().unwrap());
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn solve_residual_is_small(n in 2usize..30, seed in 0u64..1000) {
            let a = banded_spd(n, seed);
            let b = DVector::from_fn(n, |i, _| ((i + 1) as f64 * 0.37).cos());
            let x = SkylineMatrix::from_dense(&a).cholesky().unwrap().solve(&b);
            prop_assert!((&a * &x - &b).norm() <= 1e-12 * b.norm() * a.norm());
        }
    }
}
