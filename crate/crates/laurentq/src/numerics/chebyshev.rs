//! Gauss–Chebyshev quadrature over a single band with inverse-square-root or
//! square-root endpoint behaviour, with node doubling until two successive
//! levels agree.

use super::PrecisionCtx;
use crate::error::{LqError, Result};
use rug::Float;

/// Endpoint weight carried by the band integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandWeight {
    /// integrand = g(s) / sqrt((s-lo)(hi-s))
    InverseSqrt,
    /// integrand = g(s) * sqrt((s-lo)(hi-s))
    Sqrt,
}

/// Fixed-m Gauss–Chebyshev sum for the given weight.
pub fn band_quad_fixed<F: Fn(&Float) -> Float>(
    g: &F,
    lo: &Float,
    hi: &Float,
    mode: BandWeight,
    m: usize,
    prec: u32,
) -> Float {
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let rad = Float::with_val(prec, hi - lo) / 2u32;
    let mid = Float::with_val(prec, hi + lo) / 2u32;
    let mut acc = Float::new(prec);
    match mode {
        BandWeight::InverseSqrt => {
            // nodes cos((2k-1)pi/2m), weight pi/m
            for k in 1..=m {
                let theta = pi.clone() * Float::with_val(prec, 2 * k as u32 - 1)
                    / Float::with_val(prec, 2 * m as u32);
                let x = mid.clone() + rad.clone() * theta.cos();
                acc += g(&x);
            }
            acc * pi / Float::with_val(prec, m as u32)
        }
        BandWeight::Sqrt => {
            // second kind: nodes cos(k pi/(m+1)), weight pi/(m+1) sin^2
            for k in 1..=m {
                let theta = pi.clone() * Float::with_val(prec, k as u32)
                    / Float::with_val(prec, m as u32 + 1);
                let (sin, cos) = theta.sin_cos(Float::new(prec));
                let x = mid.clone() + rad.clone() * cos;
                acc += sin.square() * g(&x);
            }
            acc * pi * rad.square() / Float::with_val(prec, m as u32 + 1)
        }
    }
}

/// Band integral with node doubling until successive values agree to the
/// context's relative tolerance.
pub fn integrate_band<F: Fn(&Float) -> Float>(
    g: &F,
    lo: &Float,
    hi: &Float,
    mode: BandWeight,
    m_start: usize,
    ctx: &PrecisionCtx,
) -> Result<Float> {
    if lo >= hi {
        return Err(LqError::DomainError(format!(
            "band bounds out of order: [{lo}, {hi}]"
        )));
    }
    let mut m = m_start.max(8);
    let mut prev = band_quad_fixed(g, lo, hi, mode, m, ctx.work_bits);
    let cap = 1usize << 22;
    loop {
        m *= 2;
        if m > cap {
            return Err(LqError::NonConvergent(format!(
                "band quadrature node budget exceeded at m={m}"
            )));
        }
        let next = band_quad_fixed(g, lo, hi, mode, m, ctx.work_bits);
        let diff = Float::with_val(ctx.work_bits, &next - &prev).abs();
        let scale = next.clone().abs().max(&prev.clone().abs());
        if diff <= ctx.quad_rel_tol.clone() * scale.max(&tiny_scale(ctx)) {
            return Ok(next);
        }
        prev = next;
    }
}

fn tiny_scale(ctx: &PrecisionCtx) -> Float {
    ctx.exp2i(-2 * ctx.work_bits as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(256).unwrap()
    }

    #[test]
    fn unit_inverse_sqrt_mass_is_pi() {
        let c = ctx();
        let one = |_: &Float| c.one();
        let v = integrate_band(&one, &c.real(-1), &c.real(1), BandWeight::InverseSqrt, 8, &c).unwrap();
        let err = super::super::rel_err(&v, &c.pi(), &c.one());
        assert!(err < c.quad_rel_tol);
    }

    #[test]
    fn semicircle_area_is_half_pi() {
        let c = ctx();
        let one = |_: &Float| c.one();
        let v = integrate_band(&one, &c.real(-1), &c.real(1), BandWeight::Sqrt, 8, &c).unwrap();
        let expect = c.pi() / 2u32;
        let err = super::super::rel_err(&v, &expect, &c.one());
        assert!(err < c.quad_rel_tol);
    }

    #[test]
    fn linear_moment_on_shifted_band() {
        // g(s) = s on [1,2] with inverse-sqrt weight: closed form pi*(lo+hi)/2 = 3pi/2.
        let c = ctx();
        let g = |s: &Float| s.clone();
        let v = integrate_band(&g, &c.real(1), &c.real(2), BandWeight::InverseSqrt, 8, &c).unwrap();
        let expect = c.pi() * 3u32 / 2u32;
        let err = super::super::rel_err(&v, &expect, &c.one());
        assert!(err < c.quad_rel_tol, "err = {err}");
        // Brute-force oracle: substitute s = 3/2 + sin(u)/2, which turns the
        // weighted integral into a plain panel integral of s(u).
        let brute = {
            let g2 = |u: &Float| {
                let prec = u.prec();
                let sin = u.clone().sin();
                Float::with_val(prec, 1.5) + Float::with_val(prec, 0.5) * sin
            };
            let half_pi = c.pi() / 2u32;
            let neg = -half_pi.clone();
            crate::numerics::quad::adaptive_gl(&g2, &neg, &half_pi, &(c.quad_rel_tol.clone() * 4u32), &c).unwrap()
        };
        let err2 = super::super::rel_err(&v, &brute, &c.one());
        assert!(err2 < c.quad_rel_tol.clone() * 100u32, "err2 = {err2}");
    }
}
