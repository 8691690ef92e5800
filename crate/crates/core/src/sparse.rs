//! Compressed sparse row matrices and the two solver backends used by the
//! elliptic and parabolic solves: a banded LU factorization (the default;
//! the five-point operators are narrow-banded and diagonally dominant, so
//! elimination without pivoting is stable) and ILU(0)-preconditioned
//! BiCGSTAB as an independent iterative route.

use crate::error::{Error, Result};

/// Square sparse matrix in CSR form with sorted, deduplicated columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> CsrMatrix {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            rows[i].push((j, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == j {
                    v += row[k].1;
                    k += 1;
                }
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    pub fn identity(n: usize) -> CsrMatrix {
        CsrMatrix {
            n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![1.0; n],
        }
    }

    pub fn diagonal(diag: &[f64]) -> CsrMatrix {
        let n = diag.len();
        CsrMatrix {
            n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: diag.to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.cols[lo..hi].iter().copied().zip(self.vals[lo..hi].iter().copied())
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.n)
            .map(|i| self.row_ptr[i + 1] - self.row_ptr[i])
            .max()
            .unwrap_or(0)
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// a*I + b*A
    pub fn scaled_identity_plus(&self, a: f64, b: f64) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(self.nnz() + self.n);
        for i in 0..self.n {
            triplets.push((i, i, a));
            for (j, v) in self.row(i) {
                triplets.push((i, j, b * v));
            }
        }
        CsrMatrix::from_triplets(self.n, &triplets)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                triplets.push((j, i, v));
            }
        }
        CsrMatrix::from_triplets(self.n, &triplets)
    }

    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                bw = bw.max(i.abs_diff(j));
            }
        }
        bw
    }

    /// Relative residual ||A x - b|| / ||b|| in the 2-norm.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.matvec_alloc(x);
        let num: f64 = ax
            .iter()
            .zip(b)
            .map(|(a, bb)| (a - bb) * (a - bb))
            .sum::<f64>()
            .sqrt();
        let den: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }
}

/// LU factorization of a banded matrix, no pivoting.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    bw: usize,
    /// Row-major band storage, width 2*bw+1; entry (i, j) at [i][bw + j - i].
    band: Vec<f64>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<BandedLu> {
        let n = a.n();
        let bw = a.bandwidth();
        let width = 2 * bw + 1;
        let mut band = vec![0.0; n * width];
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for (j, v) in a.row(i) {
                band[i * width + (bw + j - i)] = v;
                scale = scale.max(v.abs());
            }
        }
        if scale == 0.0 {
            return Err(Error::SingularOperator("matrix is zero".into()));
        }
        let tiny = scale * 1e-14 * n as f64;
        for k in 0..n {
            let pivot = band[k * width + bw];
            if pivot.abs() <= tiny {
                return Err(Error::SingularOperator(format!(
                    "near-zero pivot {pivot:e} at row {k}"
                )));
            }
            let i_max = (k + bw).min(n - 1);
            for i in (k + 1)..=i_max {
                // Column k sits at offset bw + k - i in row i.
                let off = bw + k - i;
                let l = band[i * width + off] / pivot;
                if l != 0.0 {
                    band[i * width + off] = l;
                    let j_max = (k + bw).min(n - 1);
                    for j in (k + 1)..=j_max {
                        let u_kj = band[k * width + (bw + j - k)];
                        if u_kj != 0.0 {
                            band[i * width + (bw + j - i)] -= l * u_kj;
                        }
                    }
                }
            }
        }
        Ok(BandedLu { n, bw, band })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        debug_assert_eq!(b.len(), self.n);
        let width = 2 * self.bw + 1;
        // Forward: L y = b, unit lower triangular.
        for i in 0..self.n {
            let j_min = i.saturating_sub(self.bw);
            let mut acc = b[i];
            for j in j_min..i {
                let l = self.band[i * width + (self.bw + j - i)];
                if l != 0.0 {
                    acc -= l * b[j];
                }
            }
            b[i] = acc;
        }
        // Backward: U x = y.
        for i in (0..self.n).rev() {
            let j_max = (i + self.bw).min(self.n - 1);
            let mut acc = b[i];
            for j in (i + 1)..=j_max {
                let u = self.band[i * width + (self.bw + j - i)];
                if u != 0.0 {
                    acc -= u * b[j];
                }
            }
            b[i] = acc / self.band[i * width + self.bw];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Zero-fill incomplete LU factorization on the sparsity pattern of A.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag_idx: Vec<usize>,
}

impl Ilu0 {
    pub fn factor(a: &CsrMatrix) -> Result<Ilu0> {
        let n = a.n();
        let row_ptr = a.row_ptr.clone();
        let cols = a.cols.clone();
        let mut vals = a.vals.clone();
        let mut diag_idx = vec![usize::MAX; n];
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                if cols[k] == i {
                    diag_idx[i] = k;
                }
            }
            if diag_idx[i] == usize::MAX {
                return Err(Error::SingularOperator(format!("row {i} has no diagonal entry")));
            }
        }
        let mut col_pos = vec![usize::MAX; n];
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                col_pos[cols[k]] = k;
            }
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = cols[k];
                if j >= i {
                    break;
                }
                let piv = vals[diag_idx[j]];
                if piv == 0.0 {
                    return Err(Error::SingularOperator(format!("zero ILU pivot at row {j}")));
                }
                let l = vals[k] / piv;
                vals[k] = l;
                for kk in (diag_idx[j] + 1)..row_ptr[j + 1] {
                    let pos = col_pos[cols[kk]];
                    if pos != usize::MAX {
                        vals[pos] -= l * vals[kk];
                    }
                }
            }
            for k in row_ptr[i]..row_ptr[i + 1] {
                col_pos[cols[k]] = usize::MAX;
            }
        }
        Ok(Ilu0 { n, row_ptr, cols, vals, diag_idx })
    }

    /// x = (LU)^{-1} r
    pub fn apply(&self, r: &[f64], x: &mut [f64]) {
        x.copy_from_slice(r);
        for i in 0..self.n {
            let mut acc = x[i];
            for k in self.row_ptr[i]..self.diag_idx[i] {
                acc -= self.vals[k] * x[self.cols[k]];
            }
            x[i] = acc;
        }
        for i in (0..self.n).rev() {
            let mut acc = x[i];
            for k in (self.diag_idx[i] + 1)..self.row_ptr[i + 1] {
                acc -= self.vals[k] * x[self.cols[k]];
            }
            x[i] = acc / self.vals[self.diag_idx[i]];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Right-preconditioned BiCGSTAB; the recurrence residual is then the true
/// residual of the original system. Deterministic for fixed inputs.
pub fn bicgstab_ilu(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, usize, f64)> {
    let n = a.n();
    let ilu = Ilu0::factor(a)?;
    let norm_b = norm2(b);
    if norm_b == 0.0 {
        return Ok((vec![0.0; n], 0, 0.0));
    }
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    let mut r = {
        let ax = a.matvec_alloc(&x);
        b.iter().zip(&ax).map(|(bb, aa)| bb - aa).collect::<Vec<_>>()
    };
    let r0 = r.clone();
    let mut rho = dot(&r0, &r);
    let mut p = r.clone();
    let mut phat = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut res = norm2(&r) / norm_b;
    if res <= tol {
        return Ok((x, 0, res));
    }
    for it in 1..=max_iters {
        ilu.apply(&p, &mut phat);
        a.matvec(&phat, &mut v);
        let denom = dot(&r0, &v);
        if denom == 0.0 {
            return Err(Error::SolveFailure(format!(
                "BiCGSTAB breakdown (rho' = 0) at iteration {it}, residual {res:e}"
            )));
        }
        let alpha = rho / denom;
        let s: Vec<f64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        let s_norm = norm2(&s) / norm_b;
        if s_norm <= tol {
            for i in 0..n {
                x[i] += alpha * phat[i];
            }
            return Ok((x, it, s_norm));
        }
        ilu.apply(&s, &mut shat);
        a.matvec(&shat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return Err(Error::SolveFailure(format!(
                "BiCGSTAB breakdown (t = 0) at iteration {it}, residual {res:e}"
            )));
        }
        let omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        res = norm2(&r) / norm_b;
        if res <= tol {
            return Ok((x, it, res));
        }
        let rho_next = dot(&r0, &r);
        if rho_next == 0.0 || omega == 0.0 {
            return Err(Error::SolveFailure(format!(
                "BiCGSTAB breakdown (rho = 0 or omega = 0) at iteration {it}, residual {res:e}"
            )));
        }
        let beta = (rho_next / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_next;
    }
    Err(Error::SolveFailure(format!(
        "BiCGSTAB did not converge in {max_iters} iterations, residual {res:e}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Random diagonally dominant five-point system on an n x n grid.
    fn random_five_point(n: usize, seed: u64) -> CsrMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dim = n * n;
        let mut trip = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let row = j * n + i;
                let mut offsum = 0.0;
                let mut neighbors = Vec::new();
                if i > 0 {
                    neighbors.push(row - 1);
                }
                if i + 1 < n {
                    neighbors.push(row + 1);
                }
                if j > 0 {
                    neighbors.push(row - n);
                }
                if j + 1 < n {
                    neighbors.push(row + n);
                }
                for nb in neighbors {
                    let v: f64 = rng.gen_range(0.1..2.0);
                    trip.push((row, nb, v));
                    offsum += v;
                }
                trip.push((row, row, -(offsum + rng.gen_range(0.5..1.5))));
            }
        }
        // Symmetrize: (A + A^T)/2 keeps dominance.
        let a = CsrMatrix::from_triplets(dim, &trip);
        let at = a.transpose();
        let mut trip2 = Vec::new();
        for i in 0..dim {
            for (j, v) in a.row(i) {
                trip2.push((i, j, 0.5 * v));
            }
            for (j, v) in at.row(i) {
                trip2.push((i, j, 0.5 * v));
            }
        }
        CsrMatrix::from_triplets(dim, &trip2)
    }

    #[test]
    fn banded_lu_matches_dense_oracle() {
        let a = random_five_point(8, 42);
        let dim = a.n();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();

        // Dense reference solve.
        let mut dense = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for (j, v) in a.row(i) {
                dense[(i, j)] = v;
            }
        }
        let rhs = nalgebra::DVector::from_column_slice(&b);
        let x_ref = dense.lu().solve(&rhs).unwrap();

        let lu = BandedLu::factor(&a).unwrap();
        let x = lu.solve(&b);
        let err: f64 = x
            .iter()
            .zip(x_ref.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "banded vs dense mismatch {err:e}");
    }

    #[test]
    fn bicgstab_matches_banded() {
        let a = random_five_point(8, 7);
        let dim = a.n();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lu = BandedLu::factor(&a).unwrap();
        let x_direct = lu.solve(&b);
        let (x_iter, iters, res) = bicgstab_ilu(&a, &b, None, 1e-12, 10 * dim).unwrap();
        assert!(res <= 1e-12);
        assert!(iters > 0);
        let err: f64 = x_iter
            .iter()
            .zip(&x_direct)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-9, "iterative vs direct mismatch {err:e}");
    }

    #[test]
    fn transpose_round_trip() {
        let a = random_five_point(5, 3);
        let att = a.transpose().transpose();
        assert_eq!(a, att);
    }

    #[test]
    fn scaled_identity_plus_shifts_diagonal() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 1, 3.0)]);
        let m = a.scaled_identity_plus(-0.5, 1.0);
        let y = m.matvec_alloc(&[1.0, 1.0]);
        assert_eq!(y, vec![2.5, 2.5]);
    }

    #[test]
    fn zero_matrix_rejected() {
        let a = CsrMatrix::from_triplets(3, &[]);
        assert!(matches!(BandedLu::factor(&a), Err(Error::SingularOperator(_))));
    }

    #[test]
    fn singular_matrix_rejected() {
        // Row 1 is a copy of row 0.
        let a = CsrMatrix::from_triplets(
            2,
            &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 1.0), (1, 1, 2.0)],
        );
        assert!(matches!(BandedLu::factor(&a), Err(Error::SingularOperator(_))));
    }
}
