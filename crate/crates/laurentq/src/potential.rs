//! Laurent-rational external fields `V(z) = sum rho_k z^k`, k in
//! [-2 m1, 2 m2], and the scaled field `Vt = z_o V` with `z_o = N/n`.
//!
//! Only this class is supported: growth at 0 and infinity is forced by
//! positive extreme coefficients, derivatives are exact term by term, and
//! analyticity off the origin is automatic for the contour integrals
//! downstream.

use crate::error::{LqError, Result};
use crate::numerics::PrecisionCtx;
use rug::Float;

/// External field as a coefficient table over z-powers.
#[derive(Debug, Clone)]
pub struct Potential {
    /// Positive integers: lowest power is -2*m1, highest 2*m2.
    pub m1: u32,
    pub m2: u32,
    /// Coefficients for powers -2*m1 ..= 2*m2 (dense, ascending).
    pub rho: Vec<Float>,
}

/// Validation report for the admissibility conditions.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub pass: bool,
    pub reasons: Vec<String>,
}

impl Potential {
    /// Build from sparse (power, coefficient) pairs.
    pub fn from_pairs(pairs: &[(i64, Float)], ctx: &PrecisionCtx) -> Result<Self> {
        if pairs.is_empty() {
            return Err(LqError::ConfigError("empty potential".into()));
        }
        let min_k = pairs.iter().map(|(k, _)| *k).min().unwrap();
        let max_k = pairs.iter().map(|(k, _)| *k).max().unwrap();
        if min_k >= 0 || max_k <= 0 || min_k % 2 != 0 || max_k % 2 != 0 {
            return Err(LqError::ConfigError(format!(
                "potential must span negative and positive even extreme powers, got [{min_k}, {max_k}]"
            )));
        }
        let m1 = (-min_k / 2) as u32;
        let m2 = (max_k / 2) as u32;
        let len = (max_k - min_k + 1) as usize;
        let mut rho = vec![ctx.zero(); len];
        for (k, c) in pairs {
            rho[(k - min_k) as usize] = ctx.real(c);
        }
        Ok(Potential { m1, m2, rho })
    }

    #[inline]
    pub fn min_power(&self) -> i64 {
        -(2 * self.m1 as i64)
    }

    #[inline]
    pub fn coeff(&self, k: i64) -> &Float {
        &self.rho[(k - self.min_power()) as usize]
    }

    /// Confirms the growth conditions at 0 and infinity and coefficient
    /// finiteness; failures are reported, not raised.
    pub fn validate(&self) -> ValidationReport {
        let mut reasons = Vec::new();
        let lo = &self.rho[0];
        let hi = self.rho.last().unwrap();
        if !(lo.is_finite() && lo.is_sign_positive() && !lo.is_zero()) {
            reasons.push(format!(
                "rho_(-2 m1) = {lo} must be positive for growth at the origin"
            ));
        }
        if !(hi.is_finite() && hi.is_sign_positive() && !hi.is_zero()) {
            reasons.push(format!(
                "rho_(2 m2) = {hi} must be positive for growth at infinity"
            ));
        }
        for (i, c) in self.rho.iter().enumerate() {
            if !c.is_finite() {
                reasons.push(format!("coefficient #{i} is not finite"));
            }
        }
        ValidationReport {
            pass: reasons.is_empty(),
            reasons,
        }
    }
}

/// `Vt = z_o V` with `z_o = N/n`; the large parameter enters the weight as
/// `exp(-n Vt) = exp(-N V)`.
#[derive(Debug, Clone)]
pub struct ScaledField {
    pub base: Potential,
    /// The fixed weight parameter `N` (script N).
    pub cal_n: u64,
    /// The running index `n`.
    pub n: u64,
}

impl ScaledField {
    pub fn new(base: Potential, cal_n: u64, n: u64) -> Self {
        ScaledField { base, cal_n, n }
    }

    /// Same weight, shifted index `n + delta` (so `z_o` changes).
    pub fn shifted(&self, delta: i64) -> Result<Self> {
        let n = self.n as i64 + delta;
        if n < 1 {
            return Err(LqError::Unsolvable(n));
        }
        Ok(ScaledField {
            base: self.base.clone(),
            cal_n: self.cal_n,
            n: n as u64,
        })
    }

    pub fn z_o(&self, ctx: &PrecisionCtx) -> Float {
        ctx.real(self.cal_n) / ctx.real(self.n)
    }

    fn check_x(x: &Float) -> Result<()> {
        if x.is_zero() {
            return Err(LqError::DomainError("field evaluated at x = 0".into()));
        }
        Ok(())
    }

    /// `Vt(x)`: Horner over nonnegative powers plus Horner in 1/x over the
    /// principal part.
    pub fn eval(&self, x: &Float, ctx: &PrecisionCtx) -> Result<Float> {
        Self::check_x(x)?;
        Ok(self.eval_unscaled(x, ctx)? * self.z_o(ctx))
    }

    /// `V(x)` without the `z_o` scaling.
    pub fn eval_unscaled(&self, x: &Float, ctx: &PrecisionCtx) -> Result<Float> {
        Self::check_x(x)?;
        let p = &self.base;
        let prec = ctx.work_bits;
        // nonnegative part: rho_0 + rho_1 x + ...
        let mut pos = ctx.zero();
        for k in (0..=(2 * p.m2 as i64)).rev() {
            pos = pos * x + p.coeff(k);
        }
        // principal part in u = 1/x: rho_{-1} u + ... + rho_{-2m1} u^{2m1}
        let u = Float::with_val(prec, x.clone().recip());
        let mut neg = ctx.zero();
        for k in (1..=(2 * p.m1 as i64)).rev() {
            neg = neg * &u + p.coeff(-k);
        }
        neg *= &u;
        Ok(pos + neg)
    }

    /// Exact term-by-term derivative `Vt'(x) = z_o sum k rho_k x^(k-1)`.
    pub fn eval_derivative(&self, x: &Float, ctx: &PrecisionCtx) -> Result<Float> {
        Self::check_x(x)?;
        let p = &self.base;
        let mut pos = ctx.zero();
        for k in (1..=(2 * p.m2 as i64)).rev() {
            let term = ctx.real(k) * p.coeff(k);
            pos = pos * x + term;
        }
        // derivative of principal part: sum_{k>=1} (-k) rho_{-k} x^(-k-1)
        let u = x.clone().recip();
        let mut neg = ctx.zero();
        for k in (1..=(2 * p.m1 as i64)).rev() {
            let term = ctx.real(-k) * p.coeff(-k);
            neg = (neg + term) * &u;
        }
        neg *= &u; // extra 1/x for the (k+1) exponent
        Ok((pos + neg) * self.z_o(ctx))
    }

    /// `Vt` and `Vt'` on complex arguments (needed on contours).
    pub fn eval_complex(&self, z: &rug::Complex, ctx: &PrecisionCtx) -> rug::Complex {
        let p = &self.base;
        let mut pos = ctx.czero();
        for k in (0..=(2 * p.m2 as i64)).rev() {
            pos = pos * z + p.coeff(k);
        }
        let u = z.clone().recip();
        let mut neg = ctx.czero();
        for k in (1..=(2 * p.m1 as i64)).rev() {
            neg = neg * &u + p.coeff(-k);
        }
        neg *= &u;
        (pos + neg) * self.z_o(ctx)
    }

    pub fn eval_derivative_complex(&self, z: &rug::Complex, ctx: &PrecisionCtx) -> rug::Complex {
        let p = &self.base;
        let mut pos = ctx.czero();
        for k in (1..=(2 * p.m2 as i64)).rev() {
            let term = ctx.real(k) * p.coeff(k);
            pos = pos * z + term;
        }
        let u = z.clone().recip();
        let mut neg = ctx.czero();
        for k in (1..=(2 * p.m1 as i64)).rev() {
            let term = ctx.real(-k) * p.coeff(-k);
            neg = (neg + term) * &u;
        }
        neg *= &u;
        (pos + neg) * self.z_o(ctx)
    }
}

/// The two acceptance fields used throughout the test suites.
pub mod fields {
    use super::*;

    /// F1: one-cut `V = (z-3)^2 + 0.01 z^-2` (written out as coefficients).
    pub fn f1(ctx: &PrecisionCtx) -> Potential {
        let pairs = vec![
            (-2i64, ctx.real(1) / 100u32),
            (0, ctx.real(9)),
            (1, ctx.real(-6)),
            (2, ctx.real(1)),
        ];
        Potential::from_pairs(&pairs, ctx).unwrap()
    }

    /// F2: symmetric two-cut `V = z^2 + z^-2`.
    pub fn f2(ctx: &PrecisionCtx) -> Potential {
        let pairs = vec![(-2i64, ctx.one()), (2, ctx.one())];
        Potential::from_pairs(&pairs, ctx).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_err;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(256).unwrap()
    }

    #[test]
    fn eval_simple_fields() {
        let c = ctx();
        // V = z^2 + z^-2 at x = 1 -> 2 z_o
        let f = ScaledField::new(fields::f2(&c), 3, 2);
        let v = f.eval(&c.one(), &c).unwrap();
        let expect = c.real(2) * f.z_o(&c);
        assert!(rel_err(&v, &expect, &c.one()) < c.eps_pow(2));
        // V = z^2 at x = 2 with z_o = 1 -> 4
        let p = Potential::from_pairs(&[(-2, c.real(0.0)), (2, c.one())], &c);
        // zero low coefficient fails validation but still evaluates
        let p = p.unwrap();
        let f2 = ScaledField::new(p, 5, 5);
        let v = f2.eval(&c.real(2), &c).unwrap();
        assert!(rel_err(&v, &c.real(4), &c.one()) < c.eps_pow(2));
    }

    #[test]
    fn vanishing_square_term_leaves_origin_part() {
        // V = (z-3)^2 + eps z^-2 at x = 3 -> z_o * eps / 9
        let c = ctx();
        let f = ScaledField::new(fields::f1(&c), 7, 7);
        let v = f.eval(&c.real(3), &c).unwrap();
        let expect = c.real(1) / 100u32 / 9u32;
        assert!(rel_err(&v, &expect, &c.one()) < c.eps_pow(2) * 8u32, "v = {v}");
    }

    #[test]
    fn derivative_matches_central_differences() {
        let c = ctx();
        let f = ScaledField::new(fields::f1(&c), 4, 4);
        let h = c.eps_pow(3);
        // 20 spread-out abscissae from a fixed stream, both signs
        let mut state = 0xDEADBEEFu64;
        for i in 0..20 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let mag = 0.05 + ((state >> 40) as f64) / (1u64 << 24) as f64 * 4.0;
            let x = if i % 2 == 0 { c.real(mag) } else { c.real(-mag) };
            let exact = f.eval_derivative(&x, &c).unwrap();
            let xp = x.clone() + &h;
            let xm = x.clone() - &h;
            let fd = (f.eval(&xp, &c).unwrap() - f.eval(&xm, &c).unwrap()) / (h.clone() * 2u32);
            // O(h^2) agreement
            let tol = h.clone().square() * 1000u32 * (c.one() + exact.clone().abs());
            let diff = Float::with_val(c.work_bits, &exact - &fd).abs();
            assert!(diff < tol, "x={x} exact={exact} fd={fd}");
        }
    }

    #[test]
    fn even_field_has_odd_derivative() {
        let c = ctx();
        let f = ScaledField::new(fields::f2(&c), 4, 4);
        for v in [0.3f64, 1.1, 2.7] {
            let x = c.real(v);
            let xn = -x.clone();
            let dp = f.eval_derivative(&x, &c).unwrap();
            let dn = f.eval_derivative(&xn, &c).unwrap();
            let sum = Float::with_val(c.work_bits, &dp + &dn).abs();
            assert!(sum < c.eps_pow(2) * (c.one() + dp.abs()));
        }
    }

    #[test]
    fn validation_flags_bad_extremes() {
        let c = ctx();
        let bad_inf = Potential {
            m1: 1,
            m2: 1,
            rho: vec![c.one(), c.zero(), c.zero(), c.zero(), c.real(-1)],
        };
        assert!(!bad_inf.validate().pass);
        let bad_zero = Potential {
            m1: 1,
            m2: 1,
            rho: vec![c.zero(), c.zero(), c.zero(), c.zero(), c.one()],
        };
        assert!(!bad_zero.validate().pass);
        assert!(fields::f1(&c).validate().pass);
        assert!(fields::f2(&c).validate().pass);
    }

    #[test]
    fn domain_error_at_origin() {
        let c = ctx();
        let f = ScaledField::new(fields::f1(&c), 2, 2);
        assert!(f.eval(&c.zero(), &c).is_err());
    }
}
