//! Small dense linear algebra: exact Gauss-Jordan over the rationals for
//! root-system data, and f64 routines for the cone geometry. Everything
//! here works at rank <= 9, so simplicity beats asymptotics.

use crate::places::Rational;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

/// Row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rational>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        RatMat {
            rows: r,
            cols: c,
            data: rows.into_concat(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Rational> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> RatMat {
        let mut out = RatMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, rhs: &RatMat) -> RatMat {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = RatMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc = &acc + &(self.get(i, k) * rhs.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Exact inverse by Gauss-Jordan with exact pivoting.
    pub fn inverse(&self) -> Result<RatMat, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Shape("inverse of non-square".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMat::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(LinalgError::Singular)?;
            if pivot != col {
                for j in 0..n {
                    let tmp = a.get(pivot, j).clone();
                    a.set(pivot, j, a.get(col, j).clone());
                    a.set(col, j, tmp);
                    let tmp = inv.get(pivot, j).clone();
                    inv.set(pivot, j, inv.get(col, j).clone());
                    inv.set(col, j, tmp);
                }
            }
            let p = a.get(col, col).clone();
            let pinv = p.recip().expect("pivot nonzero");
            for j in 0..n {
                a.set(col, j, &(a.get(col, j).clone()) * &pinv);
                inv.set(col, j, &(inv.get(col, j).clone()) * &pinv);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let an = &(a.get(r, j).clone()) - &(&factor * a.get(col, j));
                    a.set(r, j, an);
                    let bn = &(inv.get(r, j).clone()) - &(&factor * inv.get(col, j));
                    inv.set(r, j, bn);
                }
            }
        }
        Ok(inv)
    }

    /// Solve the square system self * x = b exactly.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        let inv = self.inverse()?;
        if b.len() != self.rows {
            return Err(LinalgError::Shape("rhs length".into()));
        }
        Ok((0..inv.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..inv.cols {
                    acc = &acc + &(inv.get(i, j) * &b[j]);
                }
                acc
            })
            .collect())
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_f64()).collect())
            .collect()
    }
}

trait ConcatRows {
    fn into_concat(self) -> Vec<Rational>;
}

impl ConcatRows for Vec<Vec<Rational>> {
    fn into_concat(self) -> Vec<Rational> {
        self.into_iter().flatten().collect()
    }
}

pub fn rat_dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len());
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}

/// Row-major 2x2 rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat2(pub [Rational; 4]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([
            Rational::one(),
            Rational::zero(),
            Rational::zero(),
            Rational::one(),
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            &(&a[0] * &b[0]) + &(&a[1] * &b[2]),
            &(&a[0] * &b[1]) + &(&a[1] * &b[3]),
            &(&a[2] * &b[0]) + &(&a[3] * &b[2]),
            &(&a[2] * &b[1]) + &(&a[3] * &b[3]),
        ])
    }

    pub fn det(&self) -> Rational {
        let a = &self.0;
        &(&a[0] * &a[3]) - &(&a[1] * &a[2])
    }

    /// Inverse of a determinant-1 matrix.
    pub fn inv_unimodular(&self) -> Mat2 {
        let a = &self.0;
        Mat2([a[3].clone(), -&a[1], -&a[2], a[0].clone()])
    }

    /// General inverse; errors on zero determinant.
    pub fn inverse(&self) -> Result<Mat2, LinalgError> {
        let det = self.det();
        if det.is_zero() {
            return Err(LinalgError::Singular);
        }
        let inv = det.recip().expect("nonzero determinant");
        let a = &self.0;
        Ok(Mat2([
            &a[3] * &inv,
            &(-&a[1]) * &inv,
            &(-&a[2]) * &inv,
            &a[0] * &inv,
        ]))
    }
}

// --- f64 routines ---

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Solve a square f64 system with partial pivoting.
pub fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(LinalgError::Shape("square solve".into()));
    }
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-12 {
            return Err(LinalgError::Singular);
        }
        m.swap(col, pivot);
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col] / m[col][col];
            for j in col..=n {
                m[r][j] -= f * m[col][j];
            }
        }
    }
    Ok((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Gram matrix of a list of vectors.
pub fn gram(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    vectors
        .iter()
        .map(|u| vectors.iter().map(|v| dot(u, v)).collect())
        .collect()
}

/// Rank of a set of vectors, by Gaussian elimination with a pivot floor.
pub fn rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    let mut rows: Vec<Vec<f64>> = vectors.to_vec();
    let mut rank = 0;
    let dim = rows.first().map_or(0, |r| r.len());
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len())
            .filter(|&i| rows[i][col].abs() > tol)
            .max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs()))
        else {
            continue;
        };
        rows.swap(rank, pivot);
        for i in 0..rows.len() {
            if i == rank {
                continue;
            }
            let f = rows[i][col] / rows[rank][col];
            for j in 0..dim {
                rows[i][j] -= f * rows[rank][j];
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Minimum-norm solution x of the (possibly underdetermined) system
/// `rows[i] . x = rhs[i]`, for linearly independent rows. The solution lies
/// in the span of the rows: x = rows^T (rows rows^T)^{-1} rhs.
pub fn min_norm_solution(rows: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if rows.len() != rhs.len() {
        return Err(LinalgError::Shape("min-norm rhs".into()));
    }
    let g = gram(rows);
    let mu = solve_f64(&g, rhs)?;
    let dim = rows[0].len();
    let mut x = vec![0.0; dim];
    for (m, row) in mu.iter().zip(rows) {
        axpy(&mut x, *m, row);
    }
    Ok(x)
}

/// Coefficients lambda with x ~ sum_i lambda_i v_i for independent v_i,
/// together with the residual norm of x off the span.
pub fn span_coefficients(
    vectors: &[Vec<f64>],
    x: &[f64],
) -> Result<(Vec<f64>, f64), LinalgError> {
    let g = gram(vectors);
    let rhs: Vec<f64> = vectors.iter().map(|v| dot(v, x)).collect();
    let lambda = solve_f64(&g, &rhs)?;
    let mut recon = vec![0.0; x.len()];
    for (l, v) in lambda.iter().zip(vectors) {
        axpy(&mut recon, *l, v);
    }
    let residual = x
        .iter()
        .zip(&recon)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok((lambda, residual))
}

/// Nonnegative least squares by the classic active-set iteration.
/// Returns (lambda >= 0, residual norm) minimizing |sum lambda_i v_i - x|.
pub fn nnls(vectors: &[Vec<f64>], x: &[f64], tol: f64) -> (Vec<f64>, f64) {
    let n = vectors.len();
    let mut passive: Vec<usize> = Vec::new();
    let mut lambda = vec![0.0; n];
    let residual_of = |lambda: &[f64]| {
        let mut r = x.to_vec();
        for (l, v) in lambda.iter().zip(vectors) {
            axpy(&mut r, -*l, v);
        }
        r
    };
    for _ in 0..(4 * n + 8) {
        let r = residual_of(&lambda);
        // most positive gradient among the zero set
        let candidate = (0..n)
            .filter(|i| !passive.contains(i))
            .map(|i| (i, dot(&vectors[i], &r)))
            .filter(|&(_, w)| w > tol)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((enter, _)) = candidate else {
            break;
        };
        passive.push(enter);
        // inner loop: solve on the passive set, clip negatives back out
        loop {
            let sub: Vec<Vec<f64>> = passive.iter().map(|&i| vectors[i].clone()).collect();
            let sol = match span_coefficients(&sub, x) {
                Ok((s, _)) => s,
                Err(_) => {
                    // dependent column; drop the entering index and give up on it
                    passive.pop();
                    break;
                }
            };
            if sol.iter().all(|&s| s > -tol) {
                lambda = vec![0.0; n];
                for (&i, &s) in passive.iter().zip(&sol) {
                    lambda[i] = s.max(0.0);
                }
                break;
            }
            // step toward sol until the first coefficient hits zero
            let mut alpha = f64::INFINITY;
            for (&i, &s) in passive.iter().zip(&sol) {
                if s <= tol {
                    let cur = lambda[i];
                    if cur - s > 0.0 {
                        alpha = alpha.min(cur / (cur - s));
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (&i, &s) in passive.iter().zip(&sol) {
                lambda[i] += alpha * (s - lambda[i]);
            }
            let keep: Vec<usize> = passive
                .iter()
                .copied()
                .filter(|&i| lambda[i] > tol)
                .collect();
            if keep.len() == passive.len() {
                // numerical stall; accept the clipped solution
                for l in lambda.iter_mut() {
                    if *l < 0.0 {
                        *l = 0.0;
                    }
                }
                break;
            }
            passive = keep;
        }
    }
    let r = residual_of(&lambda);
    (lambda, norm(&r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn exact_inverse_round_trips() {
        let m = RatMat::from_rows(vec![
            vec![r(2, 1), r(-1, 1)],
            vec![r(-1, 1), r(2, 1)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMat::identity(2));
        assert_eq!(*inv.get(0, 0), r(2, 3));
        assert_eq!(*inv.get(0, 1), r(1, 3));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = RatMat::from_rows(vec![vec![r(1, 1), r(2, 1)], vec![r(2, 1), r(4, 1)]]);
        assert_eq!(m.inverse(), Err(LinalgError::Singular));
    }

    #[test]
    fn min_norm_solution_hits_constraints() {
        // single row in R^3: x + y + z = 3, min-norm solution (1,1,1)
        let rows = vec![vec![1.0, 1.0, 1.0]];
        let x = min_norm_solution(&rows, &[3.0]).unwrap();
        for c in x {
            assert!((c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nnls_detects_membership_and_rejects_outsiders() {
        let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let (lam, res) = nnls(&gens, &[2.0, 3.0], 1e-10);
        assert!(res < 1e-9);
        assert!((lam[0] - 2.0).abs() < 1e-9 && (lam[1] - 3.0).abs() < 1e-9);
        let (_, res) = nnls(&gens, &[-1.0, 1.0], 1e-10);
        assert!(res > 0.5);
    }

    #[test]
    fn nnls_handles_dependent_generators() {
        let gens = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![2.0, 1.0]];
        let (_, res) = nnls(&gens, &[3.0, 1.0], 1e-10);
        assert!(res < 1e-9);
        let (_, res) = nnls(&gens, &[0.0, -1.0], 1e-10);
        assert!(res > 0.5);
    }

    #[test]
    fn rank_with_tolerance() {
        let vs = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 1e-14],
        ];
        assert_eq!(rank(&vs, 1e-9), 2);
    }
}
