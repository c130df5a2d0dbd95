//! All-real-root isolation for polynomials whose roots are known (by theory)
//! to be real and simple: the critical points of p interlace its roots, so
//! recursing on derivatives yields brackets, bisection isolates sign changes,
//! and Newton polishes to working precision.
//!
//! The derivative chain runs at a reduced bracket precision; only the final
//! polish runs at `work_bits`.

use super::PrecisionCtx;
use crate::error::{LqError, Result};
use rug::Float;

/// Horner evaluation; coefficients ascending by degree.
pub fn poly_eval(coeffs: &[Float], x: &Float) -> Float {
    let prec = x.prec();
    let mut acc = Float::new(prec);
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_derivative(coeffs: &[Float]) -> Vec<Float> {
    let prec = coeffs.first().map(|c| c.prec()).unwrap_or(64);
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| Float::with_val(prec, c * Float::with_val(prec, k as u32)))
        .collect()
}

fn to_prec(coeffs: &[Float], prec: u32) -> Vec<Float> {
    coeffs.iter().map(|c| Float::with_val(prec, c)).collect()
}

/// Cauchy bound: all roots lie in [-B, B] with B = 1 + max |c_i/c_n|.
fn root_bound(coeffs: &[Float]) -> Float {
    let prec = coeffs[0].prec();
    let lead = coeffs.last().unwrap();
    let mut m = Float::new(prec);
    for c in &coeffs[..coeffs.len() - 1] {
        let r = Float::with_val(prec, c / lead).abs();
        if r > m {
            m = r;
        }
    }
    m + 1u32
}

/// Bisection until the bracket is tight enough for Newton, then Newton.
fn refine_root(coeffs: &[Float], dcoeffs: &[Float], lo: &Float, hi: &Float, prec: u32) -> Float {
    let mut a = lo.clone();
    let mut b = hi.clone();
    let mut fa = poly_eval(coeffs, &a);
    // ~60 bisections put us safely in the Newton basin for simple roots.
    for _ in 0..64 {
        let mid = Float::with_val(prec, &a + &b) / 2u32;
        let fm = poly_eval(coeffs, &mid);
        if fm.is_zero() {
            return mid;
        }
        if (fa.is_sign_negative()) == (fm.is_sign_negative()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mut x = Float::with_val(prec, &a + &b) / 2u32;
    let mut last_step = Float::with_val(prec, 1e30);
    for _ in 0..200 {
        let p = poly_eval(coeffs, &x);
        let dp = poly_eval(dcoeffs, &x);
        if dp.is_zero() {
            break;
        }
        let step = p / dp;
        let mag = step.clone().abs();
        x -= step;
        if mag.is_zero() {
            break;
        }
        if mag >= last_step {
            break;
        }
        last_step = mag;
        // keep inside the bracket
        if x < a || x > b {
            x = Float::with_val(prec, &a + &b) / 2u32;
            break;
        }
    }
    x
}

fn roots_recursive(coeffs: &[Float], prec: u32) -> Vec<Float> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return vec![];
    }
    if deg == 1 {
        let r = Float::with_val(prec, -Float::with_val(prec, &coeffs[0] / &coeffs[1]));
        return vec![r];
    }
    let dcoeffs = poly_derivative(coeffs);
    let crit = roots_recursive(&dcoeffs, prec);
    let bound = root_bound(coeffs);
    let mut cuts: Vec<Float> = Vec::with_capacity(crit.len() + 2);
    cuts.push(-bound.clone());
    cuts.extend(crit.into_iter());
    cuts.push(bound);
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if lo >= hi {
            continue;
        }
        let flo = poly_eval(coeffs, lo);
        let fhi = poly_eval(coeffs, hi);
        if flo.is_zero() {
            continue; // exact critical-point root: simple-root precondition violated upstream
        }
        if (flo.is_sign_negative()) != (fhi.is_sign_negative()) {
            roots.push(refine_root(coeffs, &dcoeffs, lo, hi, prec));
        }
    }
    roots
}

/// All roots of a polynomial with real simple roots, ascending.
///
/// Brackets are isolated at a reduced precision; each root is then polished
/// by Newton at full working precision. Errors with `RootCountMismatch` when
/// fewer sign changes than `deg` are located (violated precondition or
/// precision loss).
pub fn real_poly_roots(coeffs: &[Float], ctx: &PrecisionCtx) -> Result<Vec<Float>> {
    // strip trailing zero coefficients (degree overstatement)
    let mut c: Vec<Float> = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().is_zero() {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(vec![]);
    }
    let deg = c.len() - 1;
    let bracket_prec = ctx.work_bits.min(256);
    let low = to_prec(&c, bracket_prec);
    let coarse = roots_recursive(&low, bracket_prec);
    if coarse.len() != deg {
        return Err(LqError::RootCountMismatch {
            expected: deg,
            found: coarse.len(),
        });
    }
    // Polish at working precision.
    let full = to_prec(&c, ctx.work_bits);
    let dfull = poly_derivative(&full);
    let mut out = Vec::with_capacity(deg);
    for r in coarse {
        let mut x = Float::with_val(ctx.work_bits, &r);
        let mut last_step = Float::with_val(ctx.work_bits, 1e30);
        for _ in 0..300 {
            let p = poly_eval(&full, &x);
            let dp = poly_eval(&dfull, &x);
            if dp.is_zero() {
                break;
            }
            let step = p / dp;
            let mag = step.clone().abs();
            x -= step;
            if mag.is_zero() || mag >= last_step {
                break;
            }
            last_step = mag;
        }
        out.push(x);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // simple-root sanity: strictly increasing
    for w in out.windows(2) {
        if w[0] >= w[1] {
            return Err(LqError::RootCountMismatch {
                expected: deg,
                found: deg - 1,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_pm_one() {
        let c = PrecisionCtx::new(256).unwrap();
        // z^2 - 1
        let coeffs = vec![c.real(-1), c.zero(), c.one()];
        let roots = real_poly_roots(&coeffs, &c).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(crate::numerics::rel_err(&roots[0], &c.real(-1), &c.one()) < c.eps_pow(2));
        assert!(crate::numerics::rel_err(&roots[1], &c.real(1), &c.one()) < c.eps_pow(2));
    }

    #[test]
    fn cubic_with_zero_root() {
        let c = PrecisionCtx::new(256).unwrap();
        // z^3 - z
        let coeffs = vec![c.zero(), c.real(-1), c.zero(), c.one()];
        let roots = real_poly_roots(&coeffs, &c).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots[1].clone().abs() < c.eps_pow(2));
    }

    #[test]
    fn reconstruction_from_roots() {
        // Monic polynomial from spread-out roots; roots -> coefficients ->
        // roots must reproduce the inputs to 2^(-work_bits/2).
        let c = PrecisionCtx::new(256).unwrap();
        let targets: Vec<Float> = [-2.25f64, -0.5, 0.125, 1.0, 3.75]
            .iter()
            .map(|&v| c.real(v))
            .collect();
        let mut coeffs = vec![c.one()];
        for r in &targets {
            let mut next = vec![c.zero(); coeffs.len() + 1];
            for (k, ck) in coeffs.iter().enumerate() {
                next[k + 1] += ck;
                let t = Float::with_val(c.work_bits, ck * r);
                next[k] -= t;
            }
            coeffs = next;
        }
        let roots = real_poly_roots(&coeffs, &c).unwrap();
        assert_eq!(roots.len(), targets.len());
        for (r, t) in roots.iter().zip(targets.iter()) {
            let err = crate::numerics::rel_err(r, t, &c.one());
            assert!(err < c.eps_pow(2), "err = {err}");
        }
    }
}
