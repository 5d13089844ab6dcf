//! Minimal dense linear algebra: a row-major matrix, Cholesky, Jacobi
//! eigenvalues, and a symmetric indefinite LDL^T factorization.
//!
//! Everything here is sized for the small systems this crate solves
//! directly (covariance matrices, QP KKT systems); the simplex keeps its
//! own vector arithmetic.

use serde::{Deserialize, Serialize};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// x^T A x for square A.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(self.rows, self.cols);
        self.matvec(x).iter().zip(x).map(|(ax, xi)| ax * xi).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..i {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Lower-triangular Cholesky factor; `None` when a pivot falls below
    /// `-tol` or the matrix cannot be factored even after treating small
    /// negative pivots as zero.
    pub fn cholesky(&self, tol: f64) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut l = Mat::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d < -tol {
                return None;
            }
            let d = d.max(0.0).sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut v = self[(i, j)];
                for k in 0..j {
                    v -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = if d > 0.0 { v / d } else { 0.0 };
            }
        }
        Some(l)
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &Mat) -> Vec<f64> {
    assert!(m.is_symmetric(1e-9), "jacobi_eigenvalues needs a symmetric matrix");
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Symmetric indefinite factorization P A P^T = L D L^T with 1x1 and 2x2
/// pivots (Bunch-Parlett full pivoting).
pub struct LdlFactor {
    n: usize,
    // Unit lower-triangular multipliers in the permuted ordering.
    l: Mat,
    // Pivot blocks along the diagonal.
    blocks: Vec<PivotBlock>,
    // perm[k] = original index occupying permuted position k.
    perm: Vec<usize>,
}

enum PivotBlock {
    One { k: usize, d: f64 },
    Two { k: usize, a: f64, b: f64, c: f64 }, // [[a, b], [b, c]] at rows k, k+1
}

#[derive(Debug, thiserror::Error)]
#[error("symmetric factorization failed: matrix is singular to working precision")]
pub struct SingularMatrix;

impl LdlFactor {
    pub fn new(m: &Mat) -> Result<Self, SingularMatrix> {
        assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut l = Mat::identity(n);
        let mut blocks = Vec::new();
        let alpha = (1.0 + 17.0f64.sqrt()) / 8.0;
        let scale = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].abs())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let tiny = 1e-14 * scale;

        let mut k = 0;
        while k < n {
            // Largest diagonal and off-diagonal magnitudes in the trailing block.
            let (mut mu0, mut r) = (0.0f64, k);
            for i in k..n {
                if a[(i, i)].abs() > mu0 {
                    mu0 = a[(i, i)].abs();
                    r = i;
                }
            }
            let (mut mu1, mut s, mut t) = (0.0f64, k, k);
            for i in k..n {
                for j in k..i {
                    if a[(i, j)].abs() > mu1 {
                        mu1 = a[(i, j)].abs();
                        s = i;
                        t = j;
                    }
                }
            }
            if mu0.max(mu1) <= tiny {
                return Err(SingularMatrix);
            }

            if mu0 >= alpha * mu1 {
                swap_sym(&mut a, &mut l, &mut perm, k, r, k);
                let d = a[(k, k)];
                if d.abs() <= tiny {
                    return Err(SingularMatrix);
                }
                for i in k + 1..n {
                    let lik = a[(i, k)] / d;
                    l[(i, k)] = lik;
                    for j in k + 1..=i {
                        let upd = lik * a[(j, k)];
                        a[(i, j)] -= upd;
                        a[(j, i)] = a[(i, j)];
                    }
                }
                blocks.push(PivotBlock::One { k, d });
                k += 1;
            } else {
                swap_sym(&mut a, &mut l, &mut perm, k, t, k);
                let s = if s == k { t } else { s };
                swap_sym(&mut a, &mut l, &mut perm, k + 1, s, k);
                let (pa, pb, pc) = (a[(k, k)], a[(k + 1, k)], a[(k + 1, k + 1)]);
                let det = pa * pc - pb * pb;
                if det.abs() <= tiny * tiny {
                    return Err(SingularMatrix);
                }
                for i in k + 2..n {
                    let (b1, b2) = (a[(i, k)], a[(i, k + 1)]);
                    let l1 = (pc * b1 - pb * b2) / det;
                    let l2 = (pa * b2 - pb * b1) / det;
                    l[(i, k)] = l1;
                    l[(i, k + 1)] = l2;
                    for j in k + 2..=i {
                        let upd = l1 * a[(j, k)] + l2 * a[(j, k + 1)];
                        a[(i, j)] -= upd;
                        a[(j, i)] = a[(i, j)];
                    }
                }
                blocks.push(PivotBlock::Two { k, a: pa, b: pb, c: pc });
                k += 2;
            }
        }
        Ok(LdlFactor { n, l, blocks, perm })
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        // y = P b
        let mut y: Vec<f64> = (0..n).map(|k| b[self.perm[k]]).collect();
        // L z = y (unit lower triangular)
        for i in 0..n {
            for j in 0..i {
                let lij = self.l[(i, j)];
                if lij != 0.0 {
                    y[i] -= lij * y[j];
                }
            }
        }
        // D w = z
        for block in &self.blocks {
            match *block {
                PivotBlock::One { k, d } => y[k] /= d,
                PivotBlock::Two { k, a, b, c } => {
                    let det = a * c - b * b;
                    let (y1, y2) = (y[k], y[k + 1]);
                    y[k] = (c * y1 - b * y2) / det;
                    y[k + 1] = (a * y2 - b * y1) / det;
                }
            }
        }
        // L^T v = w
        for i in (0..n).rev() {
            for j in i + 1..n {
                let lji = self.l[(j, i)];
                if lji != 0.0 {
                    y[i] -= lji * y[j];
                }
            }
        }
        // x = P^T v
        let mut x = vec![0.0; n];
        for k in 0..n {
            x[self.perm[k]] = y[k];
        }
        x
    }
}

fn swap_sym(a: &mut Mat, l: &mut Mat, perm: &mut [usize], i: usize, j: usize, k_done: usize) {
    if i == j {
        return;
    }
    let n = a.nrows();
    for c in 0..n {
        let (x, y) = (a[(i, c)], a[(j, c)]);
        a[(i, c)] = y;
        a[(j, c)] = x;
    }
    for r in 0..n {
        let (x, y) = (a[(r, i)], a[(r, j)]);
        a[(r, i)] = y;
        a[(r, j)] = x;
    }
    // Only the already-computed multiplier columns move with the rows.
    for c in 0..k_done {
        let (x, y) = (l[(i, c)], l[(j, c)]);
        l[(i, c)] = y;
        l[(j, c)] = x;
    }
    perm.swap(i, j);
}
