//! Bi-infinite strong moment sequence `c_k = int s^k exp(-N V(s)) ds` and the
//! Hankel determinants built from it.
//!
//! Moments are memoized per (field, n); Hankel matrices are rebuilt per call,
//! which is cheap next to the quadratures. Determinants are taken in raw
//! extended precision -- no log-domain tricks -- so that the signed ratios
//! keep consistent signs.

use crate::error::{LqError, Result};
use crate::numerics::quad::integrate_real_line;
use crate::numerics::{DenseMatrix, PrecisionCtx};
use crate::potential::ScaledField;
use rug::Float;
use std::collections::BTreeMap;

/// Cached strong moments for one scaled field.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub field: ScaledField,
    c: BTreeMap<i64, Float>,
    pub k_min: i64,
    pub k_max: i64,
}

/// One row of a positivity report.
#[derive(Debug, Clone)]
pub struct PositivityRow {
    pub m: i64,
    pub h_even: Float,
    pub h_odd: Float,
}

impl MomentTable {
    /// Compute and cache every moment with `k_min <= k <= k_max`.
    ///
    /// All integrands share the weight `exp(-N V)` and differ only by the
    /// power `s^k`, so one adaptive refinement (driven by the envelope of
    /// the extreme powers) is frozen into a node grid and every moment is a
    /// weighted sum over it. A once-bisected copy of the grid re-evaluates
    /// each moment as a consistency check; disagreements fall back to the
    /// direct adaptive integrator.
    pub fn build(field: ScaledField, k_min: i64, k_max: i64, ctx: &PrecisionCtx) -> Result<Self> {
        if k_min > 0 || k_max < 0 {
            return Err(LqError::ConfigError(format!(
                "moment range [{k_min}, {k_max}] must straddle 0"
            )));
        }
        let prec = ctx.work_bits;
        let n_k = (k_max - k_min + 1) as usize;
        let mut acc: Vec<Float> = vec![Float::new(prec); n_k];
        let mut acc_check: Vec<Float> = vec![Float::new(prec); n_k];
        for sign in [1i32, -1] {
            let weight = |t: &Float| -> Float {
                let x = t.clone().exp();
                let xs = if sign > 0 { x.clone() } else { -x.clone() };
                match field.eval_unscaled(&xs, ctx) {
                    Ok(v) => (-(v * ctx.real(field.cal_n))).exp() * x,
                    Err(_) => Float::new(prec),
                }
            };
            // Envelope integrand: weight times (e^{k_min t} + 1 + e^{k_max t});
            // refining it resolves every power in between.
            let envelope = |t: &Float| -> Float {
                let w = weight(t);
                if w.is_zero() {
                    return w;
                }
                let lo = (t.clone() * ctx.real(k_min)).exp();
                let hi = (t.clone() * ctx.real(k_max)).exp();
                w * (lo + hi + 1u32)
            };
            let Some((t_lo, t_hi, gmax)) = crate::numerics::quad::mass_window(&envelope, ctx)
            else {
                continue;
            };
            let coarse = crate::numerics::quad::gl_panel(&envelope, &t_lo, &t_hi, 64, prec)
                .abs()
                .max(&(gmax * Float::with_val(prec, 0.01)));
            let abs_tol = coarse * &ctx.quad_rel_tol;
            let panels = crate::numerics::quad::adaptive_panels(&envelope, &t_lo, &t_hi, &abs_tol, ctx)?;
            // doubled grid for verification
            let mut panels2 = Vec::with_capacity(panels.len() * 2);
            for (a, b) in &panels {
                let mid = Float::with_val(prec, a + b) / 2u32;
                panels2.push((a.clone(), mid.clone()));
                panels2.push((mid, b.clone()));
            }
            for (grid, dst) in [(&panels, &mut acc), (&panels2, &mut acc_check)] {
                let nodes = crate::numerics::quad::panel_nodes(grid, prec);
                for (t, w) in &nodes {
                    let wv = weight(t);
                    if wv.is_zero() {
                        continue;
                    }
                    let base = Float::with_val(prec, &wv * w);
                    let x = t.clone().exp();
                    let u = x.clone().recip();
                    // ascending powers from k_min
                    let mut p = Float::with_val(prec, 1);
                    for _ in 0..(-k_min) {
                        p *= &u;
                    }
                    let parity = |k: i64| -> bool { sign < 0 && k.rem_euclid(2) == 1 };
                    for (idx, k) in (k_min..=k_max).enumerate() {
                        let term = Float::with_val(prec, &base * &p);
                        if parity(k) {
                            dst[idx] -= term;
                        } else {
                            dst[idx] += term;
                        }
                        p *= &x;
                    }
                }
            }
        }
        let mut c = BTreeMap::new();
        for (idx, k) in (k_min..=k_max).enumerate() {
            let v = acc[idx].clone();
            let vc = acc_check[idx].clone();
            let diff = Float::with_val(prec, &v - &vc).abs();
            let scale = v.clone().abs().max(&vc.clone().abs());
            if diff <= ctx.quad_rel_tol.clone() * 64u32 * scale {
                c.insert(k, vc);
            } else {
                // grid did not resolve this power: integrate it directly
                c.insert(k, strong_moment(&field, k, ctx)?);
            }
        }
        let c0 = c.get(&0).unwrap();
        if !(c0.is_finite() && c0.is_sign_positive() && !c0.is_zero()) {
            return Err(LqError::PrecisionLoss(format!("c_0 = {c0} not positive")));
        }
        Ok(MomentTable {
            field,
            c,
            k_min,
            k_max,
        })
    }

    pub fn get(&self, k: i64) -> Result<&Float> {
        self.c.get(&k).ok_or(LqError::MissingMoment(k))
    }

    /// Inner product `<z^i, z^j> = c_(i+j)`.
    pub fn gram(&self, i: i64, j: i64) -> Result<&Float> {
        self.get(i + j)
    }

    /// Hankel determinant `H^(m)_k`: the k x k determinant with entries
    /// `c_(m+i+j)`, 0-based `i, j`; `H^(m)_0 = 1`.
    pub fn hankel(&self, m: i64, k: usize, ctx: &PrecisionCtx) -> Result<Float> {
        if k == 0 {
            return Ok(ctx.one());
        }
        let mat = self.hankel_matrix(m, k)?;
        Ok(mat.determinant())
    }

    pub fn hankel_matrix(&self, m: i64, k: usize) -> Result<DenseMatrix> {
        let mut entries: Vec<Float> = Vec::with_capacity(k * k);
        for i in 0..k as i64 {
            for j in 0..k as i64 {
                entries.push(self.get(m + i + j)?.clone());
            }
        }
        Ok(DenseMatrix::from_fn(k, k, |i, j| entries[i * k + j].clone()))
    }

    /// Asserts `H^(-2m)_(2m) > 0` and `H^(-2m)_(2m+1) > 0` for
    /// `0 <= m <= m_max`; the inner-product property of the bilinear form.
    pub fn hankel_positivity_check(
        &self,
        m_max: i64,
        ctx: &PrecisionCtx,
    ) -> Result<Vec<PositivityRow>> {
        let mut rows = Vec::new();
        for m in 0..=m_max {
            let h_even = self.hankel(-2 * m, (2 * m) as usize, ctx)?;
            let h_odd = self.hankel(-2 * m, (2 * m + 1) as usize, ctx)?;
            if !(h_even.is_sign_positive() && !h_even.is_zero()) {
                return Err(LqError::PositivityViolation {
                    m,
                    value: format!("H^(-2m)_2m = {:.6e}", h_even.to_f64()),
                });
            }
            if !(h_odd.is_sign_positive() && !h_odd.is_zero()) {
                return Err(LqError::PositivityViolation {
                    m,
                    value: format!("H^(-2m)_(2m+1) = {:.6e}", h_odd.to_f64()),
                });
            }
            rows.push(PositivityRow { m, h_even, h_odd });
        }
        Ok(rows)
    }
}

/// `c_k = int s^k exp(-N V(s)) ds` by the adaptive real-line quadrature.
pub fn strong_moment(field: &ScaledField, k: i64, ctx: &PrecisionCtx) -> Result<Float> {
    let f = |x: &Float| -> Float {
        let prec = x.prec();
        let v = match field.eval_unscaled(x, ctx) {
            Ok(v) => v,
            Err(_) => return Float::new(prec),
        };
        let expo = (-(v * ctx.real(field.cal_n))).exp();
        let mut p = Float::with_val(prec, 1);
        if k >= 0 {
            for _ in 0..k {
                p *= x;
            }
        } else {
            let u = x.clone().recip();
            for _ in 0..(-k) {
                p *= &u;
            }
        }
        p * expo
    };
    integrate_real_line(&f, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_err;
    use crate::potential::{fields, ScaledField};

    fn table(n: u64, lo: i64, hi: i64, bits: u32) -> (MomentTable, PrecisionCtx) {
        let ctx = PrecisionCtx::new(bits).unwrap();
        let field = ScaledField::new(fields::f1(&ctx), n, n);
        (MomentTable::build(field, lo, hi, &ctx).unwrap(), ctx)
    }

    #[test]
    fn even_field_odd_moments_vanish() {
        let ctx = PrecisionCtx::new(256).unwrap();
        let field = ScaledField::new(fields::f2(&ctx), 3, 3);
        let t = MomentTable::build(field, -3, 3, &ctx).unwrap();
        let scale = t.get(0).unwrap().clone();
        for k in [-3i64, -1, 1, 3] {
            let c = t.get(k).unwrap();
            assert!(
                c.clone().abs() < ctx.quad_rel_tol.clone() * 100u32 * scale.clone(),
                "c_{k} = {c}"
            );
        }
    }

    #[test]
    fn zeroth_moment_positive() {
        let (t, _ctx) = table(3, -2, 2, 256);
        assert!(*t.get(0).unwrap() > 0u32);
    }

    #[test]
    fn negative_moment_agrees_with_high_precision_oracle() {
        // c_{-1} at n = 4 against a 4x-precision re-run.
        let ctx = PrecisionCtx::new(256).unwrap();
        let field = ScaledField::new(fields::f1(&ctx), 4, 4);
        let v = strong_moment(&field, -1, &ctx).unwrap();
        let octx = ctx.scaled(4, 1e-3);
        let field_hi = ScaledField::new(fields::f1(&octx), 4, 4);
        let oracle = strong_moment(&field_hi, -1, &octx).unwrap();
        let err = rel_err(&v, &oracle, &ctx.eps_pow(1));
        assert!(err < ctx.quad_rel_tol, "err = {err}");
    }

    #[test]
    fn hankel_basics() {
        let (t, ctx) = table(3, -4, 4, 256);
        // k = 0 -> 1 by definition
        assert_eq!(t.hankel(-2, 0, &ctx).unwrap(), 1);
        // k = 1 -> c_m
        let h1 = t.hankel(2, 1, &ctx).unwrap();
        assert_eq!(&h1, t.get(2).unwrap());
        // H^(-2)_2 = c_-2 c_0 - c_-1^2
        let h = t.hankel(-2, 2, &ctx).unwrap();
        let expect = t.get(-2).unwrap().clone() * t.get(0).unwrap()
            - t.get(-1).unwrap().clone().square();
        let err = rel_err(&h, &expect, &ctx.eps_pow(1));
        assert!(err < ctx.eps_pow(2));
    }

    #[test]
    fn positivity_holds_at_adequate_precision() {
        let (t, ctx) = table(4, -18, 18, 512);
        let rows = t.hankel_positivity_check(8, &ctx).unwrap();
        assert_eq!(rows.len(), 9);
    }

    #[test]
    fn positivity_breaks_at_starved_precision() {
        // 64-bit arithmetic cannot resolve the exponentially small Hankel
        // determinants at m = 12: the check must report the violation.
        let ctx = PrecisionCtx::new_unchecked(64);
        let field = ScaledField::new(fields::f1(&ctx), 4, 4);
        let t = MomentTable::build(field, -26, 26, &ctx).unwrap();
        match t.hankel_positivity_check(12, &ctx) {
            Err(LqError::PositivityViolation { .. }) => {}
            other => panic!("expected PositivityViolation, got {other:?}"),
        }
    }
}
