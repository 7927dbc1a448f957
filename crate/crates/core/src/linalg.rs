//! Small dense linear algebra: Householder least squares and singular values.
//!
//! Everything here works on column-major buffers because the callers slice
//! column subsets out of a measurement matrix.

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ColMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl ColMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_columns<'a, I>(rows: usize, columns: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut data = Vec::new();
        let mut cols = 0;
        for c in columns {
            debug_assert_eq!(c.len(), rows);
            data.extend_from_slice(c);
            cols += 1;
        }
        Self { rows, cols, data }
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm, scaled to avoid overflow on large entries.
pub fn norm2(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * s.sqrt()
}

/// Compensated (Neumaier) summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Householder QR, stored compactly: the upper triangle of `qr` holds R and
/// the reflectors live in `qr` below the diagonal plus `tau`.
struct HouseholderQr {
    qr: ColMatrix,
    tau: Vec<f64>,
    diag: Vec<f64>,
}

fn householder_qr(a: &ColMatrix) -> HouseholderQr {
    let (m, n) = (a.rows, a.cols);
    let mut qr = a.clone();
    let steps = m.min(n);
    let mut tau = vec![0.0; steps];
    let mut diag = vec![0.0; steps];
    for k in 0..steps {
        let alpha = norm2(&qr.col(k)[k..]);
        if alpha == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let x0 = qr.get(k, k);
        let beta = if x0 >= 0.0 { -alpha } else { alpha };
        // v = x - beta e1, normalized so v[0] = 1
        let v0 = x0 - beta;
        {
            let c = qr.col_mut(k);
            for x in &mut c[k + 1..] {
                *x /= v0;
            }
            c[k] = 1.0;
        }
        tau[k] = (beta - x0) / beta;
        diag[k] = beta;
        for j in k + 1..n {
            let mut s = 0.0;
            for i in k..m {
                s += qr.get(i, k) * qr.get(i, j);
            }
            s *= tau[k];
            for i in k..m {
                let vik = qr.get(i, k);
                qr.data[j * m + i] -= s * vik;
            }
        }
    }
    HouseholderQr { qr, tau, diag }
}

impl HouseholderQr {
    /// Applies Q^T to `b` in place.
    fn apply_qt(&self, b: &mut [f64]) {
        let m = self.qr.rows;
        for k in 0..self.tau.len() {
            if self.tau[k] == 0.0 {
                continue;
            }
            let v = self.qr.col(k);
            let mut s = b[k];
            for i in k + 1..m {
                s += v[i] * b[i];
            }
            s *= self.tau[k];
            b[k] -= s;
            for i in k + 1..m {
                b[i] -= s * v[i];
            }
        }
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else {
            self.qr.get(i, j)
        }
    }
}

/// Relative threshold on |R_ii| below which a column set is treated as
/// rank deficient by [`least_squares`].
pub const RANK_TOL: f64 = 1e-12;

/// Least-squares solution of `min ||a x - b||` for a tall or square `a`
/// with full column rank. Returns `None` when R has a diagonal entry
/// below `RANK_TOL` relative to the largest one.
pub fn least_squares(a: &ColMatrix, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.rows, b.len());
    let n = a.cols;
    if n == 0 {
        return Some(Vec::new());
    }
    if n > a.rows {
        return None;
    }
    let f = householder_qr(a);
    let rmax = f.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if rmax == 0.0 || f.diag.iter().any(|d| d.abs() <= RANK_TOL * rmax) {
        return None;
    }
    let mut qtb = b.to_vec();
    f.apply_qt(&mut qtb);
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = qtb[i];
        for j in i + 1..n {
            s -= f.r(i, j) * x[j];
        }
        x[i] = s / f.r(i, i);
    }
    Some(x)
}

/// Orthogonal factor of a square matrix's Householder QR, with column signs
/// fixed so that R has a non-negative diagonal.
pub fn orthogonal_factor(a: &ColMatrix) -> ColMatrix {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let f = householder_qr(a);
    let mut q = ColMatrix::zeros(n, n);
    for j in 0..n {
        // Q e_j = H_0 H_1 ... e_j; apply reflectors in reverse.
        let c = q.col_mut(j);
        c[j] = 1.0;
        for k in (0..f.tau.len()).rev() {
            if f.tau[k] == 0.0 {
                continue;
            }
            let v = f.qr.col(k);
            let mut s = c[k];
            for i in k + 1..n {
                s += v[i] * c[i];
            }
            s *= f.tau[k];
            c[k] -= s;
            for i in k + 1..n {
                c[i] -= s * v[i];
            }
        }
    }
    for (j, d) in f.diag.iter().enumerate() {
        if *d < 0.0 {
            for x in q.col_mut(j) {
                *x = -*x;
            }
        }
    }
    q
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// Singular values in descending order via one-sided (Hestenes) Jacobi.
///
/// Works for any shape; a matrix with more columns than rows yields
/// `cols - rows` (numerically) zero values.
pub fn singular_values(a: &ColMatrix) -> Vec<f64> {
    let m = a.rows;
    let n = a.cols;
    let mut w = a.data.clone();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let (ci, cj) = {
                    let (lo, hi) = w.split_at_mut(j * m);
                    (&mut lo[i * m..(i + 1) * m], &mut hi[..m])
                };
                let alpha = dot(ci, ci);
                let beta = dot(cj, cj);
                let gamma = dot(ci, cj);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let xi = *x;
                    let yj = *y;
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| norm2(&w[j * m..(j + 1) * m])).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: usize, cols_data: &[&[f64]]) -> ColMatrix {
        ColMatrix::from_columns(rows, cols_data.iter().copied())
    }

    #[test]
    fn solves_square_system() {
        let a = cm(2, &[&[2.0, 1.0], &[1.0, 3.0]]);
        let x = least_squares(&a, &[3.0, 5.0]).unwrap();
        // 2x + y = 3, x + 3y = 5  =>  x = 0.8, y = 1.4
        assert!((x[0] - 0.8).abs() < 1e-14);
        assert!((x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn overdetermined_fit_matches_projection() {
        // Fit a constant to [1, 2, 6]: the mean.
        let a = cm(3, &[&[1.0, 1.0, 1.0]]);
        let x = least_squares(&a, &[1.0, 2.0, 6.0]).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let a = cm(3, &[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        assert!(least_squares(&a, &[1.0, 1.0, 1.0]).is_none());
        let z = cm(2, &[&[0.0, 0.0]]);
        assert!(least_squares(&z, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn singular_values_of_diagonal_and_rank_one() {
        let a = cm(2, &[&[1.0, 0.0], &[0.0, 2.0]]);
        assert_eq!(singular_values(&a), vec![2.0, 1.0]);
        let r1 = cm(2, &[&[1.0, 1.0], &[2.0, 2.0]]);
        let sv = singular_values(&r1);
        assert!((sv[0] - 10f64.sqrt()).abs() < 1e-14);
        assert!(sv[1] < 1e-15);
    }

    #[test]
    fn wide_matrix_has_zero_trailing_values() {
        let a = cm(2, &[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let sv = singular_values(&a);
        assert!((sv[0] - 3f64.sqrt()).abs() < 1e-14);
        assert!((sv[1] - 1.0).abs() < 1e-14);
        assert!(sv[2] < 1e-15);
    }

    #[test]
    fn orthogonal_factor_is_orthonormal() {
        let a = cm(3, &[&[4.0, 1.0, -2.0], &[0.5, 3.0, 1.0], &[1.0, -1.0, 2.0]]);
        let q = orthogonal_factor(&a);
        for i in 0..3 {
            for j in 0..3 {
                let d = dot(q.col(i), q.col(j));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-14, "{i},{j}: {d}");
            }
        }
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let vals = std::iter::once(1.0).chain(std::iter::repeat(1e-16).take(10_000));
        assert!((compensated_sum(vals) - (1.0 + 1e-12)).abs() < 1e-16);
    }
}
