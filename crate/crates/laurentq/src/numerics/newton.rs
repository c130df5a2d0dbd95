//! Damped Newton iteration with central finite-difference Jacobians.
//!
//! Residuals are themselves quadratures elsewhere in the crate, so the
//! Jacobian is never available in closed form; the finite-difference step is
//! `2^(-work_bits/3)` scaled by the coordinate magnitude.

use super::{DenseMatrix, PrecisionCtx};
use crate::error::{LqError, Result};
use rug::Float;

fn inf_norm(v: &[Float]) -> Float {
    let prec = v.first().map(|f| f.prec()).unwrap_or(64);
    let mut m = Float::new(prec);
    for x in v {
        let a = x.clone().abs();
        if a > m {
            m = a;
        }
    }
    m
}

/// Solve F(x) = 0 from `x0`. Steps are halved while the residual fails to
/// decrease or while `valid` rejects the trial point (e.g. endpoint
/// interlacing). `valid` receives candidate iterates.
pub fn solve_newton_guarded<F, V>(
    f: &F,
    x0: &[Float],
    tol: &Float,
    max_iter: usize,
    valid: &V,
    ctx: &PrecisionCtx,
) -> Result<Vec<Float>>
where
    F: Fn(&[Float]) -> Result<Vec<Float>>,
    V: Fn(&[Float]) -> bool,
{
    let prec = ctx.work_bits;
    let d = x0.len();
    if !valid(x0) {
        return Err(LqError::InterlacingViolated);
    }
    let mut x: Vec<Float> = x0.to_vec();
    let mut fx = f(&x)?;
    let mut res = inf_norm(&fx);
    let h0 = ctx.exp2i(-(ctx.work_bits as i64 / 3));
    for iter in 0..max_iter {
        if res <= *tol {
            return Ok(x);
        }
        // Central-difference Jacobian, column by column.
        let mut jac = DenseMatrix::zeros(d, d, prec);
        for j in 0..d {
            let scale = x[j].clone().abs().max(&ctx.one());
            let h = h0.clone() * scale;
            let mut xp = x.clone();
            xp[j] += &h;
            let mut xm = x.clone();
            xm[j] -= &h;
            let fp = f(&xp)?;
            let fm = f(&xm)?;
            for i in 0..d {
                let diff = Float::with_val(prec, &fp[i] - &fm[i]);
                jac.set(i, j, diff / (h.clone() * 2u32));
            }
        }
        let step = jac.solve(&fx)?;
        // Damped update: halve until the residual decreases and the iterate
        // stays admissible.
        let mut lambda = ctx.one();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<Float> = x
                .iter()
                .zip(step.iter())
                .map(|(xi, si)| xi.clone() - lambda.clone() * si)
                .collect();
            if !valid(&trial) {
                lambda /= 2u32;
                continue;
            }
            // an unevaluable trial point is treated like an inadmissible one
            let Ok(ftrial) = f(&trial) else {
                lambda /= 2u32;
                continue;
            };
            let rtrial = inf_norm(&ftrial);
            if rtrial.is_finite() && (rtrial < res || rtrial <= *tol) {
                x = trial;
                fx = ftrial;
                res = rtrial;
                accepted = true;
                break;
            }
            lambda /= 2u32;
        }
        if !accepted {
            return Err(LqError::NoConvergence {
                iters: iter + 1,
                residual: format!("{:.6e}", res.to_f64()),
            });
        }
    }
    if res <= *tol {
        Ok(x)
    } else {
        Err(LqError::NoConvergence {
            iters: max_iter,
            residual: format!("{:.6e}", res.to_f64()),
        })
    }
}

/// Unguarded Newton.
pub fn solve_newton<F>(
    f: &F,
    x0: &[Float],
    tol: &Float,
    max_iter: usize,
    ctx: &PrecisionCtx,
) -> Result<Vec<Float>>
where
    F: Fn(&[Float]) -> Result<Vec<Float>>,
{
    solve_newton_guarded(f, x0, tol, max_iter, &|_: &[Float]| true, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_equation() {
        let c = PrecisionCtx::new(256).unwrap();
        let f = |x: &[Float]| Ok(vec![x[0].clone() - 1u32]);
        let x = solve_newton(&f, &[c.zero()], &c.eps_pow(2), 50, &c).unwrap();
        let err = crate::numerics::rel_err(&x[0], &c.one(), &c.one());
        assert!(err < c.eps_pow(2));
    }

    #[test]
    fn scalar_sqrt_two() {
        let c = PrecisionCtx::new(256).unwrap();
        let f = |x: &[Float]| Ok(vec![x[0].clone().square() - 2u32]);
        let x = solve_newton(&f, &[c.one()], &c.eps_pow(2), 80, &c).unwrap();
        let expect = c.real(2).sqrt();
        let err = crate::numerics::rel_err(&x[0], &expect, &c.one());
        assert!(err < c.eps_pow(2) * 16u32, "err = {err}");
    }

    #[test]
    fn coupled_system_with_guard() {
        // x^2 + y^2 = 5, x y = 2 with x > y > 0 enforced -> (2, 1)
        let c = PrecisionCtx::new(256).unwrap();
        let f = |x: &[Float]| {
            Ok(vec![
                x[0].clone().square() + x[1].clone().square() - 5u32,
                x[0].clone() * &x[1] - 2u32,
            ])
        };
        let guard = |x: &[Float]| x[0] > x[1] && x[1] > 0u32;
        let x = solve_newton_guarded(&f, &[c.real(2.5), c.real(0.5)], &c.eps_pow(2), 80, &guard, &c).unwrap();
        let e0 = crate::numerics::rel_err(&x[0], &c.real(2), &c.one());
        let e1 = crate::numerics::rel_err(&x[1], &c.real(1), &c.one());
        assert!(e0 < c.eps_pow(2) * 16u32 && e1 < c.eps_pow(2) * 16u32);
    }
}
