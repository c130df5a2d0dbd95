//! Gauss–Legendre panels and the adaptive integrator over the punctured real
//! line.
//!
//! The weight functions in play decay essentially (super-polynomially) both at
//! the origin and at infinity, so each half-line is mapped by `x = ±e^t`; the
//! transformed integrand decays doubly exponentially in `t` and a window
//! `[t_lo, t_hi]` containing all mass above the cutoff is located by coarse
//! scanning before adaptive bisection refines panels inside it.

use super::PrecisionCtx;
use crate::error::{LqError, Result};
use rug::Float;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the `m`-point Gauss–Legendre rule on [-1, 1].
pub struct GlRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

static GL_CACHE: OnceLock<Mutex<HashMap<(u32, usize), Arc<GlRule>>>> = OnceLock::new();

/// Legendre P_m(x) and its derivative by the three-term recurrence.
fn legendre(m: usize, x: &Float, prec: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    if m == 0 {
        return (p0, Float::new(prec));
    }
    for k in 1..m {
        let kf = Float::with_val(prec, k as u32);
        let a = Float::with_val(prec, 2 * k as u32 + 1) * x * &p1;
        let p2 = (a - &kf * &p0) / Float::with_val(prec, k as u32 + 1);
        p0 = p1;
        p1 = p2;
    }
    // P'_m(x) = m (x P_m - P_{m-1}) / (x^2 - 1)
    let mf = Float::with_val(prec, m as u32);
    let num = mf * (x.clone() * &p1 - &p0);
    let den = x.clone() * x - 1u32;
    (p1, num / den)
}

/// Gauss–Legendre rule at the requested precision, cached per (prec, m).
pub fn gl_rule(prec: u32, m: usize) -> Arc<GlRule> {
    let cache = GL_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&(prec, m)) {
        return r.clone();
    }
    let guard_prec = prec + 32;
    let pi = Float::with_val(guard_prec, rug::float::Constant::Pi);
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    let half = (m + 1) / 2;
    for k in 0..half {
        // Chebyshev-like initial guess, then Newton to full precision.
        let mut x = Float::with_val(
            guard_prec,
            (&pi * Float::with_val(guard_prec, k as f64 + 0.75)) / (m as f64 + 0.5),
        )
        .cos();
        let mut last = Float::with_val(guard_prec, 2);
        for _ in 0..200 {
            let (p, dp) = legendre(m, &x, guard_prec);
            let step = p / dp;
            x -= &step;
            let now = step.abs();
            if now.is_zero() || now > last {
                break;
            }
            last = now;
        }
        let (_, dp) = legendre(m, &x, guard_prec);
        let one_minus = Float::with_val(guard_prec, 1) - x.clone() * &x;
        let w = Float::with_val(guard_prec, 2) / (one_minus * dp.clone() * dp);
        nodes.push(Float::with_val(prec, &x));
        weights.push(Float::with_val(prec, &w));
    }
    // Mirror to the negative half; node ordering is descending then ascending
    // mirrored, which keeps summation order fixed.
    let mut all_nodes = Vec::with_capacity(m);
    let mut all_weights = Vec::with_capacity(m);
    for k in (0..half).rev() {
        all_nodes.push(-nodes[k].clone());
        all_weights.push(weights[k].clone());
    }
    let start = if m % 2 == 1 { 1 } else { 0 };
    for k in start..half {
        all_nodes.push(nodes[k].clone());
        all_weights.push(weights[k].clone());
    }
    let rule = Arc::new(GlRule {
        nodes: all_nodes,
        weights: all_weights,
    });
    cache
        .lock()
        .unwrap()
        .insert((prec, m), rule.clone());
    rule
}

/// Fixed Gauss–Legendre panel over [a, b].
pub fn gl_panel<F: Fn(&Float) -> Float>(f: &F, a: &Float, b: &Float, m: usize, prec: u32) -> Float {
    let rule = gl_rule(prec, m);
    let half = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let mut acc = Float::new(prec);
    for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let s = mid.clone() + half.clone() * x;
        acc += w * f(&s);
    }
    acc * half
}

const PANEL_ORDER: usize = 64;

/// Adaptive Gauss–Legendre on [a, b]: bisect until panel-pair agreement,
/// depth-first left to right (deterministic summation).
pub fn adaptive_gl<F: Fn(&Float) -> Float>(
    f: &F,
    a: &Float,
    b: &Float,
    abs_tol: &Float,
    ctx: &PrecisionCtx,
) -> Result<Float> {
    let prec = ctx.work_bits;
    let mut total = Float::new(prec);
    let mut stack: Vec<(Float, Float, Float, usize)> = Vec::new();
    let i0 = gl_panel(f, a, b, PANEL_ORDER, prec);
    stack.push((a.clone(), b.clone(), i0, 0));
    let mut panels = 0usize;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        panels += 1;
        if panels > ctx.max_panels {
            return Err(LqError::NonConvergent(format!(
                "panel budget {} exhausted",
                ctx.max_panels
            )));
        }
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        let left = gl_panel(f, &lo, &mid, PANEL_ORDER, prec);
        let right = gl_panel(f, &mid, &hi, PANEL_ORDER, prec);
        let fine = left.clone() + &right;
        let err = Float::with_val(prec, &fine - &coarse).abs();
        let width_frac = (Float::with_val(prec, &hi - &lo) / Float::with_val(prec, b - a)).abs();
        // roundoff floor: below this the subdivision only shuffles noise
        let floor = fine.clone().abs() << (8i32 - prec as i32);
        if err <= width_frac * abs_tol || err <= floor || depth > 60 {
            total += fine;
        } else {
            // Push right first so the left half is processed next (L-to-R).
            stack.push((mid.clone(), hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}

/// As [`adaptive_gl`], but returning the accepted panel bounds instead of the
/// integral; used to freeze a refinement shared by a family of integrands.
pub fn adaptive_panels<F: Fn(&Float) -> Float>(
    f: &F,
    a: &Float,
    b: &Float,
    abs_tol: &Float,
    ctx: &PrecisionCtx,
) -> Result<Vec<(Float, Float)>> {
    let prec = ctx.work_bits;
    let mut out = Vec::new();
    let mut stack: Vec<(Float, Float, Float, usize)> = Vec::new();
    let i0 = gl_panel(f, a, b, PANEL_ORDER, prec);
    stack.push((a.clone(), b.clone(), i0, 0));
    let mut panels = 0usize;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        panels += 1;
        if panels > ctx.max_panels {
            return Err(LqError::NonConvergent(format!(
                "panel budget {} exhausted",
                ctx.max_panels
            )));
        }
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        let left = gl_panel(f, &lo, &mid, PANEL_ORDER, prec);
        let right = gl_panel(f, &mid, &hi, PANEL_ORDER, prec);
        let fine = left.clone() + &right;
        let err = Float::with_val(prec, &fine - &coarse).abs();
        let width_frac = (Float::with_val(prec, &hi - &lo) / Float::with_val(prec, b - a)).abs();
        let floor = fine.clone().abs() << (8i32 - prec as i32);
        if err <= width_frac * abs_tol || err <= floor || depth > 60 {
            out.push((lo.clone(), mid.clone()));
            out.push((mid, hi));
        } else {
            stack.push((mid.clone(), hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    out.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Ok(out)
}

/// Gauss–Legendre nodes and weights over a list of panels, in order.
pub fn panel_nodes(panels: &[(Float, Float)], prec: u32) -> Vec<(Float, Float)> {
    let rule = gl_rule(prec, PANEL_ORDER);
    let mut out = Vec::with_capacity(panels.len() * PANEL_ORDER);
    for (a, b) in panels {
        let half = Float::with_val(prec, b - a) / 2u32;
        let mid = Float::with_val(prec, a + b) / 2u32;
        for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let s = mid.clone() + half.clone() * x;
            let wt = Float::with_val(prec, w * &half);
            out.push((s, wt));
        }
    }
    out
}

/// Find `[t_lo, t_hi]` containing all mass of `g` above the relative cutoff.
pub fn mass_window<F: Fn(&Float) -> Float>(
    g: &F,
    ctx: &PrecisionCtx,
) -> Option<(Float, Float, Float)> {
    let prec = ctx.work_bits;
    let mut tmax = Float::new(prec);
    let mut gmax = Float::new(prec);
    let mut k = -160i64;
    while k <= 160 {
        let t = ctx.real(k) / 2u32;
        let val = g(&t).abs();
        if val > gmax {
            gmax = val;
            tmax = t;
        }
        k += 1;
    }
    if gmax.is_zero() {
        return None;
    }
    let cutoff = gmax.clone() * ctx.exp2i(-(ctx.work_bits as i64) - 64);
    let expand = |dir: i32| -> Float {
        let mut t = tmax.clone();
        let mut step = ctx.real(1);
        loop {
            let t_next = t.clone() + step.clone() * dir;
            if g(&t_next).abs() < cutoff {
                return t_next;
            }
            t = t_next;
            step *= 2u32;
            if step > 1e6 {
                return t;
            }
        }
    };
    Some((expand(-1), expand(1), gmax))
}

/// Integral of `f` over the punctured real line for integrands decaying
/// essentially at 0 and at infinity.
pub fn integrate_real_line<F: Fn(&Float) -> Float>(f: &F, ctx: &PrecisionCtx) -> Result<Float> {
    let pos = integrate_half_line(f, 1, ctx)?;
    let neg = integrate_half_line(f, -1, ctx)?;
    Ok(pos + neg)
}

/// One half-line via the substitution x = sign * e^t.
fn integrate_half_line<F: Fn(&Float) -> Float>(
    f: &F,
    sign: i32,
    ctx: &PrecisionCtx,
) -> Result<Float> {
    let prec = ctx.work_bits;
    let g = |t: &Float| -> Float {
        let x = t.clone().exp();
        let fx = if sign > 0 {
            f(&x)
        } else {
            let xn = -x.clone();
            f(&xn)
        };
        fx * x
    };
    let Some((t_lo, t_hi, gmax)) = mass_window(&g, ctx) else {
        return Ok(Float::new(prec));
    };
    // Scale for the absolute tolerance: coarse whole-window estimate.
    let coarse = gl_panel(&g, &t_lo, &t_hi, PANEL_ORDER, prec)
        .abs()
        .max(&(gmax * Float::with_val(prec, 0.01)));
    let abs_tol = coarse * &ctx.quad_rel_tol;
    adaptive_gl(&g, &t_lo, &t_hi, &abs_tol, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(256).unwrap()
    }

    #[test]
    fn gl_rule_integrates_polynomials_exactly() {
        let c = ctx();
        // x^6 over [-1,1] = 2/7 with an 8-point rule (exact to degree 15)
        let f = |x: &Float| {
            let mut p = x.clone();
            p.square_mut();
            let p3 = p.clone() * &p * &p;
            p3
        };
        let v = gl_panel(&f, &c.real(-1), &c.real(1), 8, c.work_bits);
        let expect = c.real(2) / c.real(7);
        let err = super::super::rel_err(&v, &expect, &c.eps_pow(1));
        assert!(err < c.eps_pow(2), "err = {err}");
    }

    #[test]
    fn even_integrand_matches_twice_half_line() {
        // f(x) = exp(-x^2 - x^-2): even, so the full-line integral must be
        // twice the positive half-line value.
        let c = ctx();
        let f = |x: &Float| {
            let x2 = x.clone().square();
            let inv2 = x.clone().square().recip();
            (-(x2 + inv2)).exp()
        };
        let full = integrate_real_line(&f, &c).unwrap();
        let half = integrate_half_line(&f, 1, &c).unwrap();
        let err = Float::with_val(c.work_bits, &full - Float::with_val(c.work_bits, &half * 2u32)).abs();
        let bound = c.quad_rel_tol.clone() * 10u32 * full.clone().abs();
        assert!(err < bound, "full={full} half2={}", half * 2u32);
        assert!(full > 0u32);
    }

    #[test]
    fn odd_integrand_vanishes() {
        let c = ctx();
        let f = |x: &Float| {
            let x2 = x.clone().square();
            let inv2 = x.clone().square().recip();
            x.clone() * (-(x2 + inv2)).exp()
        };
        let full = integrate_real_line(&f, &c).unwrap();
        let even_part = |x: &Float| {
            let x2 = x.clone().square();
            let inv2 = x.clone().square().recip();
            (-(x2 + inv2)).exp()
        };
        let scale = integrate_real_line(&even_part, &c).unwrap();
        assert!(full.abs() < c.quad_rel_tol.clone() * 10u32 * scale);
    }

    #[test]
    fn offset_gaussian_with_origin_barrier_agrees_with_high_precision_rerun() {
        // Oracle: recompute at 4x work_bits and 1e-3x tolerance.
        let c = ctx();
        let f = |x: &Float| {
            let prec = x.prec();
            let d = Float::with_val(prec, x - 3u32);
            let inv2 = x.clone().square().recip();
            (-(d.square() + inv2 * Float::with_val(prec, 0.01))).exp()
        };
        let v = integrate_real_line(&f, &c).unwrap();
        let oracle_ctx = c.scaled(4, 1e-3);
        let oracle = integrate_real_line(&f, &oracle_ctx).unwrap();
        let err = super::super::rel_err(&v, &oracle, &c.eps_pow(1));
        assert!(err < c.quad_rel_tol, "err = {err}");
    }
}
