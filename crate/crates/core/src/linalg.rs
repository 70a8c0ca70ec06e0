//! Dense helpers on top of `faer`, a CSR sparse matrix and a conjugate
//! gradient solver.

use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Symmetric eigendecomposition with ascending eigenvalues.
pub fn sym_eigen(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let e = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::NonConvergence {
        stage: "symmetric eigensolver",
        detail: format!("{e:?}"),
    })?;
    let vals: Vec<f64> = (0..a.nrows()).map(|i| e.S().column_vector()[i]).collect();
    Ok((vals, e.U().to_owned()))
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues(a: &Mat<f64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::NonConvergence {
        stage: "symmetric eigensolver",
        detail: format!("{e:?}"),
    })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn herm_eigenvalues(a: &Mat<faer::c64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::NonConvergence {
        stage: "hermitian eigensolver",
        detail: format!("{e:?}"),
    })
}

/// Descending singular values.
pub fn singular_values(a: &Mat<f64>) -> Result<Vec<f64>> {
    a.singular_values().map_err(|e| Error::NonConvergence {
        stage: "singular value decomposition",
        detail: format!("{e:?}"),
    })
}

/// Largest entry of `|A - A^T|`.
pub fn symmetry_defect(a: &Mat<f64>) -> f64 {
    let n = a.nrows();
    let mut d: f64 = 0.0;
    for j in 0..n {
        for i in 0..j {
            d = d.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    d
}

/// Largest entry of `|A - A^*|`.
pub fn hermitian_defect(a: &Mat<faer::c64>) -> f64 {
    let n = a.nrows();
    let mut d: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            d = d.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    d
}

fn one_norm(a: &Mat<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor polynomial.
pub fn expm(a: &Mat<f64>) -> Mat<f64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let b = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);
    // ||b|| <= 1/2, so 18 Taylor terms reach double precision.
    let mut term = Mat::<f64>::identity(n, n);
    let mut sum = Mat::<f64>::identity(n, n);
    for k in 1..=18 {
        term = &term * &b;
        let inv = 1.0 / k as f64;
        for j in 0..n {
            for i in 0..n {
                term[(i, j)] *= inv;
                sum[(i, j)] += term[(i, j)];
            }
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Determinant through LU with partial pivoting.
pub fn det(a: &Mat<f64>) -> f64 {
    let n = a.nrows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    d
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Assembles from triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet out of range");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            col_idx.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yr = s;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec(x, &mut y);
        y
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let cols = &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]];
        match cols.binary_search(&c) {
            Ok(k) => self.values[self.row_ptr[r] + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[k])] += self.values[k];
            }
        }
        m
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                t.push((self.col_idx[k], r, self.values[k]));
            }
        }
        CsrMatrix::from_triplets(self.ncols, self.nrows, t)
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                d = d.max((self.values[k] - self.get(c, r)).abs());
            }
        }
        d
    }

    /// `shift I + A`.
    pub fn shifted(&self, shift: f64) -> CsrMatrix {
        let mut t = Vec::with_capacity(self.nnz() + self.nrows);
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                t.push((r, self.col_idx[k], self.values[k]));
            }
            t.push((r, r, shift));
        }
        CsrMatrix::from_triplets(self.nrows, self.ncols, t)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for symmetric positive definite `A` given by its action,
/// with Jacobi preconditioning from `diag`.
pub fn conjugate_gradient(
    apply: &dyn Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Indefinite { eigenvalue: pap / dot(&p, &p) });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= rel_tol * bnorm {
            return Ok((x, it + 1));
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NonConvergence {
        stage: "conjugate gradient",
        detail: format!("residual above {rel_tol:e} after {max_iter} iterations"),
    })
}

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
pub struct SparseCholesky {
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
    n: usize,
}

impl SparseCholesky {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
        use faer::sparse::{SparseColMat, Triplet};
        let mut trip = Vec::with_capacity(a.nnz());
        for r in 0..a.nrows {
            for k in a.row_ptr[r]..a.row_ptr[r + 1] {
                let c = a.col_idx[k];
                if c <= r {
                    trip.push(Triplet::new(r, c, a.values[k]));
                }
            }
        }
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(a.nrows, a.ncols, &trip)
            .map_err(|e| Error::InvalidInput(format!("sparse assembly: {e:?}")))?;
        let sym = SymbolicLlt::try_new(m.symbolic(), Side::Lower)
            .map_err(|e| Error::NonConvergence { stage: "sparse Cholesky", detail: format!("{e:?}") })?;
        let llt = Llt::try_new_with_symbolic(sym, m.as_ref(), Side::Lower).map_err(|_| Error::Indefinite { eigenvalue: f64::NAN })?;
        Ok(SparseCholesky { llt, n: a.nrows })
    }

    /// Overwrites the columns of `rhs` with the solutions.
    pub fn solve_in_place(&self, rhs: &mut Mat<f64>) {
        use faer::linalg::solvers::Solve;
        assert_eq!(rhs.nrows(), self.n, "right-hand side has wrong size");
        self.llt.solve_in_place(rhs.as_mut());
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut m = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.solve_in_place(&mut m);
        (0..self.n).map(|i| m[(i, 0)]).collect()
    }
}

/// Lowest `k` eigenvalues of a sparse symmetric positive semidefinite
/// matrix by block subspace iteration on `(A + I)^{-1}` with Rayleigh-Ritz
/// on `A`. The block is wider than `k`, so repeated eigenvalues are found.
pub fn sparse_lowest_eigenvalues(a: &CsrMatrix, k: usize, rel_tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let n = a.nrows;
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("cannot compute {k} eigenvalues of a size {n} matrix")));
    }
    let b = (2 * k + 8).min(n);
    let chol = SparseCholesky::new(&a.shifted(1.0))?;
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut x = Mat::from_fn(n, b, |_, _| rng.random::<f64>() - 0.5);
    let mut prev: Option<Vec<f64>> = None;
    for _ in 0..max_iter {
        chol.solve_in_place(&mut x);
        let q = x.qr().compute_thin_Q();
        let mut aq = Mat::<f64>::zeros(n, b);
        let mut col = vec![0.0; n];
        for j in 0..b {
            let qj: Vec<f64> = (0..n).map(|i| q[(i, j)]).collect();
            a.matvec(&qj, &mut col);
            for i in 0..n {
                aq[(i, j)] = col[i];
            }
        }
        let h = q.transpose() * &aq;
        let h = Mat::from_fn(b, b, |i, j| 0.5 * (h[(i, j)] + h[(j, i)]));
        let (theta, v) = sym_eigen(&h)?;
        x = &q * &v;
        let cur = theta[..k].to_vec();
        if let Some(p) = &prev {
            if cur.iter().zip(p).all(|(c, o)| (c - o).abs() <= rel_tol * c.abs().max(1e-300)) {
                return Ok(cur);
            }
        }
        prev = Some(cur);
    }
    Err(Error::NonConvergence { stage: "subspace iteration", detail: format!("{max_iter} iterations") })
}

/// Extreme eigenvalue estimates `(min, max)` of a symmetric operator from
/// `steps` Lanczos iterations with full reorthogonalization.
pub fn lanczos_extremes(apply: &dyn Fn(&[f64], &mut [f64]), n: usize, steps: usize, seed: u64) -> Result<(f64, f64)> {
    use rand::{Rng, SeedableRng};
    let k = steps.min(n).max(1);
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    for j in 0..k {
        apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        for b in &basis {
            let c = dot(&w, b);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let nb = dot(&w, &w).sqrt();
        if j + 1 == k || nb < 1e-13 * a.abs().max(1.0) {
            break;
        }
        beta.push(nb);
        basis.push(w.iter().map(|x| x / nb).collect());
    }
    let m = alpha.len();
    let t = Mat::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let ev = sym_eigenvalues(&t)?;
    Ok((ev[0], ev[m - 1]))
}
