//! Dense real matrices at working precision: pivoted elimination for
//! determinants, linear solves, and inversion. Row-major storage.

use crate::error::{LqError, Result};
use rug::Float;

#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Float>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        DenseMatrix {
            rows,
            cols,
            entries: vec![Float::new(prec); rows * cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Float>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, entries }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Float::with_val(prec, 1)
            } else {
                Float::new(prec)
            }
        })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &Float {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Float) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let prec = self.entries[0].prec();
        DenseMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Float::new(prec);
            for k in 0..self.cols {
                acc += Float::with_val(prec, self.at(i, k) * other.at(k, j));
            }
            acc
        })
    }

    /// Determinant via partial-pivoted Gaussian elimination. A singular
    /// matrix yields (to rounding) zero rather than an error.
    pub fn determinant(&self) -> Float {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Float::with_val(64, 1);
        }
        let prec = self.entries[0].prec();
        let mut a = self.entries.clone();
        let mut det = Float::with_val(prec, 1);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].clone().abs();
            for r in (col + 1)..n {
                let mag = a[r * n + col].clone().abs();
                if mag > best {
                    best = mag;
                    piv = r;
                }
            }
            if best.is_zero() {
                return Float::new(prec);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[col * n + col].clone();
            det *= &pivot;
            for r in (col + 1)..n {
                let factor = Float::with_val(prec, &a[r * n + col] / &pivot);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = Float::with_val(prec, &factor * &a[col * n + j]);
                    a[r * n + j] -= sub;
                }
            }
        }
        det
    }

    /// Solve A x = b in place of a copy; returns x.
    pub fn solve(&self, b: &[Float]) -> Result<Vec<Float>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let prec = if n > 0 { self.entries[0].prec() } else { 64 };
        let mut a = self.entries.clone();
        let mut x: Vec<Float> = b.to_vec();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].clone().abs();
            for r in (col + 1)..n {
                let mag = a[r * n + col].clone().abs();
                if mag > best {
                    best = mag;
                    piv = r;
                }
            }
            if best.is_zero() {
                return Err(LqError::JacobianSingular(col));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let pivot = a[col * n + col].clone();
            for r in (col + 1)..n {
                let factor = Float::with_val(prec, &a[r * n + col] / &pivot);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = Float::with_val(prec, &factor * &a[col * n + j]);
                    a[r * n + j] -= sub;
                }
                let sub = Float::with_val(prec, &factor * &x[col]);
                x[r] -= sub;
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col].clone();
            for j in (col + 1)..n {
                acc -= Float::with_val(prec, &a[col * n + j] * &x[j]);
            }
            x[col] = acc / &a[col * n + col];
        }
        Ok(x)
    }

    /// Inverse via n solves against unit vectors; also returns the pivot
    /// ratio max|pivot|/min|pivot| as a conditioning proxy.
    pub fn inverse(&self) -> Result<(DenseMatrix, Float)> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let prec = if n > 0 { self.entries[0].prec() } else { 64 };
        let mut cols: Vec<Vec<Float>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Float::new(prec); n];
            e[j] = Float::with_val(prec, 1);
            cols.push(self.solve(&e)?);
        }
        let inv = DenseMatrix::from_fn(n, n, |i, j| cols[j][i].clone());
        // pivot ratio from a fresh elimination pass
        let mut a = self.entries.clone();
        let mut maxp = Float::new(prec);
        let mut minp = Float::new(prec);
        let mut first = true;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].clone().abs();
            for r in (col + 1)..n {
                let mag = a[r * n + col].clone().abs();
                if mag > best {
                    best = mag;
                    piv = r;
                }
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
            }
            let pabs = a[col * n + col].clone().abs();
            if first {
                maxp = pabs.clone();
                minp = pabs.clone();
                first = false;
            } else {
                if pabs > maxp {
                    maxp = pabs.clone();
                }
                if pabs < minp {
                    minp = pabs.clone();
                }
            }
            let pivot = a[col * n + col].clone();
            for r in (col + 1)..n {
                let factor = Float::with_val(prec, &a[r * n + col] / &pivot);
                for j in col..n {
                    let sub = Float::with_val(prec, &factor * &a[col * n + j]);
                    a[r * n + j] -= sub;
                }
            }
        }
        let ratio = if n == 0 { Float::with_val(64, 1) } else { maxp / minp };
        Ok((inv, ratio))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PrecisionCtx;

    #[test]
    fn identity_determinant() {
        let m = DenseMatrix::identity(3, 256);
        assert_eq!(m.determinant(), 1);
    }

    #[test]
    fn two_by_two_hankel_expansion() {
        let c = PrecisionCtx::new(256).unwrap();
        // [[a, b], [b, d]] -> a d - b^2
        let a = c.real(7) / 3u32;
        let b = c.real(-2) / 5u32;
        let d = c.real(11) / 7u32;
        let m = DenseMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => a.clone(),
            (1, 1) => d.clone(),
            _ => b.clone(),
        });
        let det = m.determinant();
        let expect = a.clone() * &d - b.clone() * &b;
        let err = crate::numerics::rel_err(&det, &expect, &c.one());
        assert!(err < c.eps_pow(2));
    }

    #[test]
    fn determinant_from_constructed_lu_factors() {
        // Build L (unit lower) and U (upper, known diagonal) from a fixed
        // LCG stream; det(LU) must equal the product of U's diagonal.
        let c = PrecisionCtx::new(256).unwrap();
        let n = 6;
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        let mut l = DenseMatrix::identity(n, c.work_bits);
        let mut u = DenseMatrix::zeros(n, n, c.work_bits);
        let mut diag_prod = c.one();
        for i in 0..n {
            for j in 0..i {
                l.set(i, j, c.real(next()));
            }
            let d = c.real(next() + 2.0);
            diag_prod *= &d;
            u.set(i, i, d);
            for j in (i + 1)..n {
                u.set(i, j, c.real(next()));
            }
        }
        let a = l.mul(&u);
        let det = a.determinant();
        let err = crate::numerics::rel_err(&det, &diag_prod, &c.one());
        assert!(err < c.eps_pow(2), "err = {err}");
    }

    #[test]
    fn product_determinant_is_product_of_determinants() {
        let c = PrecisionCtx::new(256).unwrap();
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        for _ in 0..4 {
            let a = DenseMatrix::from_fn(5, 5, |_, _| c.real(next()));
            let b = DenseMatrix::from_fn(5, 5, |_, _| c.real(next()));
            let lhs = a.mul(&b).determinant();
            let rhs = a.determinant() * b.determinant();
            let err = crate::numerics::rel_err(&lhs, &rhs, &c.eps_pow(1));
            assert!(err < c.eps_pow(2), "err = {err}");
        }
    }

    #[test]
    fn solve_roundtrip() {
        let c = PrecisionCtx::new(256).unwrap();
        let a = DenseMatrix::from_fn(4, 4, |i, j| c.real((i * 7 + j * 3 + 1) as u32) / c.real(2 + ((i + j) % 3) as u32));
        let x_true: Vec<Float> = (0..4).map(|i| c.real(i as u32 + 1) / 3u32).collect();
        let b: Vec<Float> = (0..4)
            .map(|i| {
                let mut acc = c.zero();
                for j in 0..4 {
                    acc += Float::with_val(c.work_bits, a.at(i, j) * &x_true[j]);
                }
                acc
            })
            .collect();
        let x = a.solve(&b).unwrap();
        for (xi, ti) in x.iter().zip(x_true.iter()) {
            let err = crate::numerics::rel_err(xi, ti, &c.one());
            assert!(err < c.eps_pow(2));
        }
    }
}
