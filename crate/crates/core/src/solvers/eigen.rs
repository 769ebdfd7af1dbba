//! Lowest eigenpairs of `K φ = λ M φ` by subspace iteration on the factored `K`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::solvers::skyline::{SkylineCholesky, SkylineMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub max_iterations: usize,
    /// Relative eigenvalue change required to stop.
    pub tolerance: f64,
    /// `‖Kφ − λMφ‖ / ‖Kφ‖` required of every retained mode to stop.
    pub residual_tolerance: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-13,
            residual_tolerance: 1e-10,
        }
    }
}

/// Ascending eigenvalues with M-orthonormal vectors (columns).
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub iterations: usize,
    /// `‖Kφ − λMφ‖ / ‖Kφ‖` per mode.
    pub residuals: Vec<f64>,
}

pub fn lowest_modes(
    k: &SkylineMatrix,
    factor: &SkylineCholesky,
    m: &SkylineMatrix,
    count: usize,
    opts: &EigenOptions,
) -> Result<EigenPairs> {
    let n = k.size();
    if count == 0 || count > n {
        return Err(Error::Domain(format!("cannot extract {count} modes from {n} equations")));
    }
    let q = (2 * count).max(count + 8).min(n);
    let mut x = starting_vectors(k, m, q);
    let mut previous = vec![f64::INFINITY; count];
    let mut max_change = f64::INFINITY;
    for iteration in 1..=opts.max_iterations {
        let y = m.mul_mat(&x);
        let xb = factor.solve_mat(&y);
        let kr = symmetric(xb.transpose() * &y);
        let mr = symmetric(xb.transpose() * m.mul_mat(&xb));
        let (values, vectors) = reduced_eigen(&kr, &mr)?;
        x = &xb * &vectors;
        max_change = values[..count]
            .iter()
            .zip(&previous)
            .map(|(l, p)| ((l - p) / l).abs())
            .fold(0.0, f64::max);
        previous.copy_from_slice(&values[..count]);
        if max_change < opts.tolerance {
            let pairs = finish(k, m, values, x.clone(), count, iteration);
            if pairs.residuals.iter().all(|r| *r <= opts.residual_tolerance) {
                return Ok(pairs);
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        max_change,
    })
}

fn finish(k: &SkylineMatrix, m: &SkylineMatrix, values: Vec<f64>, x: DMatrix<f64>, count: usize, iterations: usize) -> EigenPairs {
    let mut vectors = x.columns(0, count).into_owned();
    let mut residuals = Vec::with_capacity(count);
    for c in 0..count {
        let mut phi = vectors.column(c).into_owned();
        let scale = phi.amax();
        if let Some(first) = phi.iter().find(|v| v.abs() > 1e-8 * scale) {
            if *first < 0.0 {
                phi.neg_mut();
            }
        }
        let kp = k.mul_vec(&phi);
        let r = &kp - m.mul_vec(&phi) * values[c];
        residuals.push(r.norm() / kp.norm());
        vectors.set_column(c, &phi);
    }
    EigenPairs {
        values: values[..count].to_vec(),
        vectors,
        iterations,
        residuals,
    }
}

/// Deterministic start: the mass diagonal, unit vectors at the smallest
/// `k_ii / m_ii` ratios, and one smooth trigonometric vector.
fn starting_vectors(k: &SkylineMatrix, m: &SkylineMatrix, q: usize) -> DMatrix<f64> {
    let n = k.size();
    let (kd, md) = (k.diagonal(), m.diagonal());
    let mut x = DMatrix::zeros(n, q);
    x.set_column(0, &md);
    let mut order: Vec<usize> = (0..n).filter(|&i| md[i] > 0.0).collect();
    order.sort_by(|&i, &j| (kd[i] / md[i]).total_cmp(&(kd[j] / md[j])).then(i.cmp(&j)));
    let mut used = 0;
    for c in 1..q.saturating_sub(1) {
        if let Some(&i) = order.get(used) {
            x[(i, c)] = 1.0;
            used += 1;
        } else {
            x[(c % n, c)] = 1.0;
        }
    }
    if q > 1 {
        let last = DVector::from_fn(n, |i, _| ((i + 1) as f64 * 0.618_033_988_75).sin());
        x.set_column(q - 1, &last);
    }
    x
}

fn symmetric(a: DMatrix<f64>) -> DMatrix<f64> {
    (&a + a.transpose()) * 0.5
}

/// Solves the projected problem `Kr v = λ Mr v` with `vᵀ Mr v = 1`, ascending.
fn reduced_eigen(kr: &DMatrix<f64>, mr: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = mr
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Domain("projected mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("projected mass factor is singular".into()))?;
    let a = symmetric(&l_inv * kr * l_inv.transpose());
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let z = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, l_inv.transpose() * z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
        // Fixed-free spring chain with varied masses.
        let mut k = DMatrix::zeros(n, n);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = if i + 1 < n { 2.0 } else { 1.0 } * (1.0 + 0.1 * i as f64);
            if i + 1 < n {
                k[(i, i + 1)] = -(1.0 + 0.1 * i as f64);
                k[(i + 1, i)] = k[(i, i + 1)];
            }
            m[(i, i)] = 1.0 + 0.3 * ((i * 7) % 5) as f64;
            if i + 1 < n {
                m[(i, i + 1)] = 0.1;
                m[(i + 1, i)] = 0.1;
            }
        }
        (k, m)
    }

    fn dense_oracle(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Vec<f64> {
        let l = m.clone().cholesky().unwrap().l();
        let li = l.try_inverse().unwrap();
        let mut v: Vec<f64> = SymmetricEigen::new(&li * k * li.transpose()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn matches_dense_oracle() {
        let (k, m) = chain(60);
        let (ks, ms) = (SkylineMatrix::from_dense(&k), SkylineMatrix::from_dense(&m));
        let pairs = lowest_modes(&ks, &ks.cholesky().unwrap(), &ms, 6, &EigenOptions::default()).unwrap();
        let oracle = dense_oracle(&k, &m);
        for i in 0..6 {
            assert!(((pairs.values[i] - oracle[i]) / oracle[i]).abs() <= 1e-9, "mode {i}");
            assert!(pairs.residuals[i] <= 1e-8);
        }
        let g = pairs.vectors.transpose() * &m * &pairs.vectors;
        assert!((g - DMatrix::identity(6, 6)).amax() <= 1e-8);
    }

    #[test]
    fn identical_matrices_give_unit_eigenvalues() {
        let (k, _) = chain(20);
        let ks = SkylineMatrix::from_dense(&k);
        let pairs = lowest_modes(&ks, &ks.cholesky().unwrap(), &ks, 4, &EigenOptions::default()).unwrap();
        for v in pairs.values {
            assert!((v - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn single_degree_of_freedom() {
        let ks = SkylineMatrix::from_dense(&DMatrix::from_element(1, 1, 9.0));
        let ms = SkylineMatrix::from_dense(&DMatrix::from_element(1, 1, 4.0));
        let pairs = lowest_modes(&ks, &ks.cholesky().unwrap(), &ms, 1, &EigenOptions::default()).unwrap();
        assert!((pairs.values[0].sqrt() - 1.5).abs() <= 1e-14);
        assert!(pairs.vectors[(0, 0)] > 0.0);
    }

    #[test]
    fn too_many_modes_is_an_error() {
        let ks = SkylineMatrix::from_dense(&DMatrix::identity(3, 3));
        assert!(lowest_modes(&ks, &ks.cholesky().unwrap(), &ks, 4, &EigenOptions::default()).is_err());
    }
}
