//! Extended-precision substrate shared by every other module: the precision
//! context, real/complex scalar helpers, quadrature kernels, dense linear
//! algebra, a damped Newton solver, and a real-root finder.
//!
//! All arithmetic flows through [`rug::Float`] / [`rug::Complex`] values
//! carrying `work_bits` of binary precision. Leaf values must be created
//! through the context so that precision propagates through owned operator
//! chains.

pub mod chebyshev;
pub mod matrix;
pub mod newton;
pub mod quad;
pub mod roots;

use crate::error::{LqError, Result};
use rug::float::Constant;
use rug::{Complex, Float};

pub use matrix::DenseMatrix;

/// Working precision and tolerance policy for a whole run.
#[derive(Debug, Clone)]
pub struct PrecisionCtx {
    /// Binary precision of every real; at least 128.
    pub work_bits: u32,
    /// Relative tolerance targeted by the adaptive quadratures.
    pub quad_rel_tol: Float,
    /// Panel budget for the adaptive real-line integrator.
    pub max_panels: usize,
    /// Truncation tolerance for Riemann theta lattice sums.
    pub theta_tail_tol: Float,
}

fn pow2(bits: u32, e: i64) -> Float {
    let mut f = Float::with_val(bits, 1);
    f <<= e as i32;
    f
}

impl PrecisionCtx {
    /// Context with the default tolerance policy: quadratures aim at
    /// `2^(-3/4 work_bits)` relative error and theta tails at
    /// `2^(-work_bits/2)`.
    pub fn new(work_bits: u32) -> Result<Self> {
        if work_bits < 128 {
            return Err(LqError::ConfigError(format!(
                "work_bits must be >= 128, got {work_bits}"
            )));
        }
        Ok(Self::new_unchecked(work_bits))
    }

    /// Same defaults without the floor on `work_bits`; used by tests that
    /// deliberately starve the precision.
    pub fn new_unchecked(work_bits: u32) -> Self {
        PrecisionCtx {
            work_bits,
            quad_rel_tol: pow2(64, -((work_bits as i64 * 3) / 4)),
            max_panels: 1 << 14,
            theta_tail_tol: pow2(64, -(work_bits as i64 / 2)),
        }
    }

    /// Copy of `self` running at `factor` times the precision with the
    /// quadrature tolerance multiplied by `tol_factor`.
    pub fn scaled(&self, factor: u32, tol_factor: f64) -> Self {
        let mut c = Self::new_unchecked(self.work_bits * factor);
        c.quad_rel_tol = self.quad_rel_tol.clone() * tol_factor;
        c.max_panels = self.max_panels * 2;
        c
    }

    #[inline]
    pub fn real<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.work_bits, v)
    }

    #[inline]
    pub fn zero(&self) -> Float {
        Float::new(self.work_bits)
    }

    #[inline]
    pub fn one(&self) -> Float {
        self.real(1)
    }

    #[inline]
    pub fn pi(&self) -> Float {
        self.real(Constant::Pi)
    }

    #[inline]
    pub fn cplx(&self, re: Float, im: Float) -> Complex {
        Complex::with_val(self.work_bits, (re, im))
    }

    #[inline]
    pub fn creal(&self, re: &Float) -> Complex {
        Complex::with_val(self.work_bits, (re, &Float::new(self.work_bits)))
    }

    #[inline]
    pub fn czero(&self) -> Complex {
        Complex::new(self.work_bits)
    }

    #[inline]
    pub fn i(&self) -> Complex {
        Complex::with_val(self.work_bits, (0, 1))
    }

    /// 2πi at working precision.
    pub fn two_pi_i(&self) -> Complex {
        self.cplx(self.zero(), self.pi() * 2u32)
    }

    /// `2^e` at working precision.
    pub fn exp2i(&self, e: i64) -> Float {
        pow2(self.work_bits, e)
    }

    /// `2^(-work_bits/d)`, the usual relative threshold scale.
    pub fn eps_pow(&self, d: u32) -> Float {
        self.exp2i(-((self.work_bits / d) as i64))
    }
}

/// Relative discrepancy `|a-b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: &Float, b: &Float, floor: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    let ma = a.clone().abs();
    let mb = b.clone().abs();
    let mut den = if ma > mb { ma } else { mb };
    if den < *floor {
        den = floor.clone();
    }
    diff / den
}

/// Relative discrepancy for complex values.
pub fn rel_err_c(a: &Complex, b: &Complex, floor: &Float) -> Float {
    let prec = a.prec().0.max(b.prec().0);
    let diff = Complex::with_val(prec, a - b);
    let dabs = cabs(&diff);
    let ma = cabs(a);
    let mb = cabs(b);
    let mut den = if ma > mb { ma } else { mb };
    if den < *floor {
        den = floor.clone();
    }
    dabs / den
}

/// |z| as a Float.
pub fn cabs(z: &Complex) -> Float {
    let prec = z.prec().0;
    let re2 = Float::with_val(prec, z.real() * z.real());
    let im2 = Float::with_val(prec, z.imag() * z.imag());
    (re2 + im2).sqrt()
}
