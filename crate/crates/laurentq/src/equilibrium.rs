//! The `even` and `odd` equilibrium-measure problems for the scaled field:
//! support endpoints from the 2(N+1) moment conditions, the edge-factor
//! function `h_V`, the density, variational constants, band masses, and
//! regularity diagnostics.
//!
//! Conventions. Endpoints are stored interlaced `b_0 < a_1 < ... < b_N <
//! a_(N+1)`; band j = (b_(j-1), a_j), gap j = (a_j, b_j). The square-root
//! branch is the product of per-factor principal roots, which is analytic
//! off the bands and behaves like `+z^(N+1)` at infinity; its boundary value
//! from above on band m is `i (-1)^(N+1-m) |R|^(1/2)`.
//!
//! `h_V` on the real axis is computed without contours: collapsing the
//! defining contour integral gives, for x off the support,
//! `h(x) = T(x)/(2 pi) + F(x) / (2 sqrt(R(x)))` and, for x inside a band,
//! the principal-value form `h(x) = T(x)/(2 pi)`, where `T` sums band
//! integrals of `F(s) / (|R(s)|^(1/2) (s - x))` with alternating signs and
//! `F(s) = 2/s + Vt'(s)`. Each band integral is evaluated by Gauss-Chebyshev
//! after subtracting the Cauchy kernel's closed form, so accuracy is uniform
//! in the distance to the band. The circular-contour evaluation (trapezoid
//! on two circles) is kept for complex arguments and as an independent
//! cross-check.

use crate::error::{LqError, Result};
use crate::numerics::newton::solve_newton_guarded;
use crate::numerics::quad::adaptive_gl;
use crate::numerics::PrecisionCtx;
use crate::potential::ScaledField;
use rug::{Complex, Float};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn tag(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Geometry helpers over an interlaced endpoint vector.
#[derive(Debug, Clone)]
pub struct BandGeometry {
    /// `b_0 < a_1 < b_1 < ... < b_N < a_(N+1)`, length 2(N+1).
    pub endpoints: Vec<Float>,
}

impl BandGeometry {
    pub fn new(endpoints: Vec<Float>) -> Self {
        BandGeometry { endpoints }
    }

    pub fn genus(&self) -> usize {
        self.endpoints.len() / 2 - 1
    }

    /// Band j (1-based) as (b_(j-1), a_j).
    pub fn band(&self, j: usize) -> (&Float, &Float) {
        (&self.endpoints[2 * (j - 1)], &self.endpoints[2 * j - 1])
    }

    /// Gap j (1-based) as (a_j, b_j).
    pub fn gap(&self, j: usize) -> (&Float, &Float) {
        (&self.endpoints[2 * j - 1], &self.endpoints[2 * j])
    }

    pub fn n_bands(&self) -> usize {
        self.genus() + 1
    }

    /// `(-1)^(N+1-m)`: sign of `-i R_+^(1/2)` on band m relative to
    /// `|R|^(1/2)`.
    pub fn band_sign(&self, m: usize) -> i32 {
        if (self.genus() + 1 - m) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `prod_(c not in band m) |s - c|^(-1/2)` for s anywhere off the other
    /// endpoints.
    pub fn other_factor_inv_sqrt(&self, m: usize, s: &Float, prec: u32) -> Float {
        let mut acc = Float::with_val(prec, 1);
        for (i, c) in self.endpoints.iter().enumerate() {
            if i == 2 * (m - 1) || i == 2 * m - 1 {
                continue;
            }
            acc *= Float::with_val(prec, s - c).abs();
        }
        acc.sqrt().recip()
    }

    /// `|R(x)|^(1/2)`.
    pub fn abs_r_sqrt(&self, x: &Float, prec: u32) -> Float {
        let mut acc = Float::with_val(prec, 1);
        for c in &self.endpoints {
            acc *= Float::with_val(prec, x - c).abs();
        }
        acc.sqrt()
    }

    /// Real branch value of `R^(1/2)` off the support: `(-1)^(k/2) |R|^(1/2)`
    /// with k the number of endpoints to the right of x (always even there).
    pub fn r_sqrt_off_support(&self, x: &Float, prec: u32) -> Float {
        let count = self.endpoints.iter().filter(|c| *c > x).count();
        debug_assert!(count % 2 == 0);
        let sign = if (count / 2) % 2 == 0 { 1 } else { -1 };
        let v = self.abs_r_sqrt(x, prec);
        if sign > 0 {
            v
        } else {
            -v
        }
    }

    /// Principal-branch `R^(1/2)(z)` for complex z (analytic off the bands,
    /// `~ +z^(N+1)` at infinity in both half-planes).
    pub fn r_sqrt_complex(&self, z: &Complex, prec: u32) -> Complex {
        let mut acc = Complex::with_val(prec, (1, 0));
        for c in &self.endpoints {
            let f = Complex::with_val(prec, z - c).sqrt();
            acc *= f;
        }
        acc
    }

    /// Which band (1-based) strictly contains x, if any.
    pub fn band_containing(&self, x: &Float) -> Option<usize> {
        for j in 1..=self.n_bands() {
            let (lo, hi) = self.band(j);
            if x > lo && x < hi {
                return Some(j);
            }
        }
        None
    }

    fn interlaced_ok(endpoints: &[Float]) -> bool {
        if endpoints.len() < 2 || endpoints.len() % 2 != 0 {
            return false;
        }
        for w in endpoints.windows(2) {
            if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
                return false;
            }
        }
        // no closed band may contain the origin
        let n_bands = endpoints.len() / 2;
        for j in 0..n_bands {
            let lo = &endpoints[2 * j];
            let hi = &endpoints[2 * j + 1];
            if !(lo.is_sign_positive() == hi.is_sign_positive()) || lo.is_zero() || hi.is_zero() {
                return false;
            }
        }
        true
    }
}

/// Solved equilibrium problem: endpoints plus every derived scalar the
/// downstream surface/asymptotics stages consume.
#[derive(Debug, Clone)]
pub struct EquilibriumData {
    pub parity: Parity,
    pub n: u64,
    pub geom: BandGeometry,
    pub field: ScaledField,
    /// Residual vector of the moment conditions at the solution.
    pub residuals: Vec<Float>,
    /// Variational constant (ell_e or ell_o), from the Euler-Lagrange
    /// equality at an interior point.
    pub ell: Float,
    /// `int ln|s| psi ds`.
    pub q_log_abs: Float,
    /// Mass on the negative / positive half-lines.
    pub mass_neg: Float,
    pub mass_pos: Float,
    pub band_masses: Vec<Float>,
    /// `Omega_j = 4 pi int_(b_j)^(a_(N+1)) psi`, j = 1..N.
    pub omega: Vec<Float>,
    /// `int s^j psi ds` for j in -2..=2.
    pub s_moment_m2: Float,
    pub s_moment_m1: Float,
    pub s_moment_p1: Float,
    pub s_moment_p2: Float,
}

/// Diagnostic record from `regularity_check`.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub regular: bool,
    pub min_abs_h_on_bands: Float,
    pub min_density_interior: Float,
    pub exterior_margin: Float,
    pub notes: Vec<String>,
}

/// The weight-prefactor kappa: 2 for the even problem, 2 + 1/n for the odd.
fn kappa(parity: Parity, n: u64, ctx: &PrecisionCtx) -> Float {
    match parity {
        Parity::Even => ctx.real(2),
        Parity::Odd => ctx.real(2) + ctx.one() / ctx.real(n),
    }
}

/// Chebyshev interpolant on an interval, built by node doubling until the
/// coefficient tail drops below tolerance.
#[derive(Debug, Clone)]
pub struct ChebInterp {
    pub lo: Float,
    pub hi: Float,
    pub coeffs: Vec<Float>,
}

impl ChebInterp {
    pub fn build<F: Fn(&[Float]) -> Result<Vec<Float>>>(
        f_multi: &F,
        lo: &Float,
        hi: &Float,
        tol: &Float,
        ctx: &PrecisionCtx,
    ) -> Result<Self> {
        let prec = ctx.work_bits;
        let pi = ctx.pi();
        let rad = Float::with_val(prec, hi - lo) / 2u32;
        let mid = Float::with_val(prec, hi + lo) / 2u32;
        // 48 * 2^k samples: never coincident with the 32 * 2^k Cauchy-sweep
        // nodes (odd vs even multiples), so subtraction kernels stay finite
        let mut m = 48usize;
        loop {
            // Chebyshev points of the first kind
            let thetas: Vec<Float> = (0..m)
                .map(|k| pi.clone() * Float::with_val(prec, 2 * k as u32 + 1) / (2 * m as u32))
                .collect();
            let xs: Vec<Float> = thetas
                .iter()
                .map(|t| mid.clone() + rad.clone() * t.clone().cos())
                .collect();
            let vals = f_multi(&xs)?;
            for v in &vals {
                if !v.is_finite() {
                    return Err(LqError::PrecisionLoss(
                        "non-finite sample while interpolating".into(),
                    ));
                }
            }
            // coefficients by the discrete cosine transform (naive)
            let mut coeffs = Vec::with_capacity(m);
            for j in 0..m {
                let mut acc = Float::new(prec);
                for (k, v) in vals.iter().enumerate() {
                    acc += v * Float::with_val(prec, &thetas[k] * Float::with_val(prec, j as u32)).cos();
                }
                acc *= Float::with_val(prec, 2) / Float::with_val(prec, m as u32);
                if j == 0 {
                    acc /= 2u32;
                }
                coeffs.push(acc);
            }
            let mut max_c = Float::new(prec);
            for c in &coeffs {
                let a = c.clone().abs();
                if a > max_c {
                    max_c = a;
                }
            }
            let tail_max = coeffs[m - m / 8..]
                .iter()
                .fold(Float::new(prec), |acc, c| acc.max(&c.clone().abs()));
            if tail_max <= tol.clone() * &max_c || m >= (1 << 14) {
                // drop negligible high coefficients
                let cutoff = tol.clone() * &max_c;
                let mut keep = coeffs.len();
                while keep > 8 && coeffs[keep - 1].clone().abs() < cutoff {
                    keep -= 1;
                }
                coeffs.truncate(keep);
                return Ok(ChebInterp {
                    lo: lo.clone(),
                    hi: hi.clone(),
                    coeffs,
                });
            }
            m *= 2;
        }
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: &Float) -> Float {
        let prec = x.prec();
        let t = (Float::with_val(prec, x * 2u32) - &self.lo - &self.hi)
            / Float::with_val(prec, &self.hi - &self.lo);
        let mut b1 = Float::new(prec);
        let mut b2 = Float::new(prec);
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = t.clone() * 2u32 * &b1 - &b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * &b1 - &b2 + &self.coeffs[0]
    }
}

/// Shared machinery bound to one endpoint configuration.
///
/// Band sweeps (Chebyshev nodes with the `F * edge-factor` values) are cached
/// per refinement level, and `h_V` is interpolated per band after first use,
/// so repeated density evaluations cost a Clenshaw sum.
pub struct EqEngine<'a> {
    pub geom: BandGeometry,
    pub field: &'a ScaledField,
    pub parity: Parity,
    pub ctx: &'a PrecisionCtx,
    /// Gauss-Chebyshev tolerance for band integrals.
    tol: Float,
    /// Tighter tolerance for the inner Cauchy sweeps so their noise stays
    /// below every consumer's convergence check.
    tol_inner: Float,
    sweeps: std::cell::RefCell<std::collections::HashMap<(usize, usize), std::sync::Arc<BandSweep>>>,
    h_interp: std::cell::RefCell<Option<std::sync::Arc<Vec<ChebInterp>>>>,
}

/// Gauss-Chebyshev nodes on one band together with the shared integrand
/// factor `F(xi) * prod_other |xi - c|^(-1/2)`.
struct BandSweep {
    nodes: Vec<Float>,
    gvals: Vec<Float>,
    weight: Float,
}

impl<'a> EqEngine<'a> {
    pub fn new(
        geom: BandGeometry,
        field: &'a ScaledField,
        parity: Parity,
        ctx: &'a PrecisionCtx,
    ) -> Self {
        let bits = ctx.work_bits as i64;
        let tol = ctx.exp2i(-(bits * 5 / 8).max(200.min(bits - 40)));
        let tol_inner = tol.clone() * ctx.exp2i(-24);
        EqEngine {
            geom,
            field,
            parity,
            ctx,
            tol,
            tol_inner,
            sweeps: std::cell::RefCell::new(std::collections::HashMap::new()),
            h_interp: std::cell::RefCell::new(None),
        }
    }

    fn sweep(&self, band: usize, m: usize) -> std::sync::Arc<BandSweep> {
        if let Some(s) = self.sweeps.borrow().get(&(band, m)) {
            return s.clone();
        }
        let prec = self.ctx.work_bits;
        let pi = self.ctx.pi();
        let (lo, hi) = self.geom.band(band);
        let rad = Float::with_val(prec, hi - lo) / 2u32;
        let mid = Float::with_val(prec, hi + lo) / 2u32;
        let mut nodes = Vec::with_capacity(m);
        let mut gvals = Vec::with_capacity(m);
        for k in 1..=m {
            let theta = pi.clone() * Float::with_val(prec, 2 * k as u32 - 1)
                / Float::with_val(prec, 2 * m as u32);
            let x = mid.clone() + rad.clone() * theta.cos();
            let g = self.f_kernel(&x) * self.geom.other_factor_inv_sqrt(band, &x, prec);
            nodes.push(x);
            gvals.push(g);
        }
        let s = std::sync::Arc::new(BandSweep {
            nodes,
            gvals,
            weight: pi / Float::with_val(prec, m as u32),
        });
        self.sweeps.borrow_mut().insert((band, m), s.clone());
        s
    }

    /// `F(s) = 2/s + Vt'(s)`.
    fn f_kernel(&self, s: &Float) -> Float {
        let two_over = self.ctx.real(2) / s;
        two_over + self.field.eval_derivative(s, self.ctx).unwrap_or_else(|_| self.ctx.zero())
    }

    /// Closed form of `int_band dxi / (sqrt((xi-b)(a-xi)) (xi - s))` for s
    /// outside the open band; zero (principal value) inside.
    fn cauchy_closed_form(&self, m: usize, s: &Float) -> Float {
        let prec = self.ctx.work_bits;
        let (lo, hi) = self.geom.band(m);
        if s > lo && s < hi {
            return Float::new(prec);
        }
        let num = Float::with_val(prec, s - lo) * Float::with_val(prec, s - hi);
        let root = num.sqrt();
        let mid = Float::with_val(prec, lo + hi) / 2u32;
        let pi = self.ctx.pi();
        if *s > mid {
            -(pi / root)
        } else {
            pi / root
        }
    }

    /// Single-level evaluation of the signed Cauchy sums at many points.
    fn t_sum_multi_at(&self, xs: &[Float], m: usize) -> Vec<Float> {
        let prec = self.ctx.work_bits;
        let mut totals = vec![Float::new(prec); xs.len()];
        for band in 1..=self.geom.n_bands() {
            let sweep = self.sweep(band, m);
            let sign = self.geom.band_sign(band);
            for (xi, x) in xs.iter().enumerate() {
                let gx = self.f_kernel(x) * self.geom.other_factor_inv_sqrt(band, x, prec);
                let mut acc = Float::new(prec);
                for (k, (node, gval)) in sweep.nodes.iter().zip(sweep.gvals.iter()).enumerate() {
                    let den = Float::with_val(prec, node - x);
                    if den.is_zero() {
                        // difference-quotient limit: central estimate of g'
                        let (kl, kr) = (k.saturating_sub(1), (k + 1).min(sweep.nodes.len() - 1));
                        if kl != kr {
                            let dg = Float::with_val(prec, &sweep.gvals[kr] - &sweep.gvals[kl]);
                            let dx = Float::with_val(prec, &sweep.nodes[kr] - &sweep.nodes[kl]);
                            acc += dg / dx;
                        }
                        continue;
                    }
                    acc += (gval.clone() - &gx) / den;
                }
                acc *= &sweep.weight;
                acc += gx * self.cauchy_closed_form(band, x);
                if sign > 0 {
                    totals[xi] += acc;
                } else {
                    totals[xi] -= acc;
                }
            }
        }
        totals
    }

    /// `Tsum(x) = sum_m (-1)^(N+1-m) int_band_m F(xi) dxi / (|R(xi)|^(1/2) (xi - x))`
    /// at many points, principal value where x lies inside a band, sharing
    /// one node sweep per band and doubling until every point settles. The
    /// Cauchy transform is `T(x) = -i Tsum(x)`.
    pub fn t_sum_multi(&self, xs: &[Float]) -> Result<Vec<Float>> {
        let prec = self.ctx.work_bits;
        let eval_level = |m: usize| -> Vec<Float> { self.t_sum_multi_at(xs, m) };
        let mut m = 32usize;
        let mut prev = eval_level(m);
        loop {
            m *= 2;
            if m > (1 << 18) {
                return Err(LqError::NonConvergent(
                    "t_sum node budget exceeded".into(),
                ));
            }
            let next = eval_level(m);
            let mut scale = Float::new(prec);
            for v in &next {
                let a = v.clone().abs();
                if a > scale {
                    scale = a;
                }
            }
            let mut ok = true;
            for (p, q) in prev.iter().zip(next.iter()) {
                let diff = Float::with_val(prec, p - q).abs();
                if !diff.is_finite()
                    || diff > self.tol_inner.clone() * (scale.clone() + self.ctx.exp2i(-(prec as i64)))
                {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(next);
            }
            prev = next;
        }
    }

    /// Fixed-level `h_V` values (no convergence control); traversal-safe for
    /// coarse scans at arbitrary endpoint configurations.
    fn h_multi_at(&self, xs: &[Float], m: usize) -> Vec<Float> {
        let prec = self.ctx.work_bits;
        let two_pi = self.ctx.pi() * 2u32;
        let kap = kappa(self.parity, self.field.n, self.ctx);
        let scale = self.ctx.real(2) / kap;
        let tsums = self.t_sum_multi_at(xs, m);
        xs.iter()
            .zip(tsums)
            .map(|(x, t)| {
                let mut h = t / &two_pi;
                if self.geom.band_containing(x).is_none() && !x.is_zero() {
                    let r = self.geom.r_sqrt_off_support(x, prec);
                    h += self.f_kernel(x) / (r * 2u32);
                }
                h * &scale
            })
            .collect()
    }

    /// Fixed-level total mass: sqrt-weight Chebyshev of `h` per band.
    fn mass_at(&self, m_quad: usize, m_h: usize) -> Float {
        let prec = self.ctx.work_bits;
        let ctx = self.ctx;
        let pi = ctx.pi();
        let two_pi = pi.clone() * 2u32;
        let mut total = Float::new(prec);
        for band in 1..=self.geom.n_bands() {
            let (lo, hi) = self.geom.band(band);
            let rad = Float::with_val(prec, hi - lo) / 2u32;
            let mid = Float::with_val(prec, hi + lo) / 2u32;
            let mut xs = Vec::with_capacity(m_quad);
            let mut sins = Vec::with_capacity(m_quad);
            for k in 1..=m_quad {
                let theta = pi.clone() * Float::with_val(prec, k as u32)
                    / Float::with_val(prec, m_quad as u32 + 1);
                let (sin, cos) = theta.sin_cos(Float::new(prec));
                xs.push(mid.clone() + rad.clone() * cos);
                sins.push(sin);
            }
            let hs = self.h_multi_at(&xs, m_h);
            let mut acc = Float::new(prec);
            for ((x, sin), h) in xs.iter().zip(sins).zip(hs) {
                let other = self.geom.other_factor_inv_sqrt(band, x, prec).recip();
                acc += sin.square() * other * h;
            }
            acc *= pi.clone() * rad.square() / Float::with_val(prec, m_quad as u32 + 1);
            let sign = self.geom.band_sign(band);
            if sign > 0 {
                total += acc / &two_pi;
            } else {
                total -= acc / &two_pi;
            }
        }
        total
    }

    /// Traversal-safe fixed-node residual with the total-mass normalization
    /// in place of the `s^(N+1)` condition; same zero set, smooth in the
    /// endpoints, and evaluable far from the solution.
    pub fn residuals_coarse_mass(&self, m: usize) -> Vec<Float> {
        let ctx = self.ctx;
        let genus = self.geom.genus();
        let n_pow = genus + 2;
        let sums = self.moment_sums_at(m);
        let mut res = Vec::with_capacity(2 * (genus + 1));
        for item in sums.iter().take(n_pow - 1) {
            res.push(item.clone());
        }
        res.push(self.mass_at(m / 2, m) - 1u32);
        for j in 1..=genus {
            res.push(self.gap_condition_at(j, 48, m).unwrap_or_else(|_| ctx.real(1e9)));
        }
        res
    }

    /// `h_V` at many real points away from 0 and the endpoints.
    pub fn h_multi(&self, xs: &[Float]) -> Result<Vec<Float>> {
        let prec = self.ctx.work_bits;
        let two_pi = self.ctx.pi() * 2u32;
        let kap = kappa(self.parity, self.field.n, self.ctx);
        let scale = self.ctx.real(2) / kap;
        let tsums = self.t_sum_multi(xs)?;
        let mut out = Vec::with_capacity(xs.len());
        for (x, t) in xs.iter().zip(tsums) {
            if x.is_zero() {
                return Err(LqError::DomainError("h_V at x = 0".into()));
            }
            let mut h = t / &two_pi;
            if self.geom.band_containing(x).is_none() {
                let r = self.geom.r_sqrt_off_support(x, prec);
                h += self.f_kernel(x) / (r * 2u32);
            }
            out.push(h * &scale);
        }
        Ok(out)
    }

    /// `h_V` at a single real point (no interpolation).
    pub fn h_real(&self, x: &Float) -> Result<Float> {
        Ok(self.h_multi(std::slice::from_ref(x))?.pop().unwrap())
    }

    /// Per-band interpolants of `h_V`, built on first use.
    fn h_interpolants(&self) -> Result<std::sync::Arc<Vec<ChebInterp>>> {
        if let Some(v) = self.h_interp.borrow().as_ref() {
            return Ok(v.clone());
        }
        let mut interps = Vec::with_capacity(self.geom.n_bands());
        // tighter than the band-integral tolerance so interpolation noise
        // stays below the integral convergence checks
        let tol = self.tol.clone() * self.ctx.exp2i(-16);
        for band in 1..=self.geom.n_bands() {
            let (lo, hi) = self.geom.band(band);
            let f_multi = |xs: &[Float]| self.h_multi(xs);
            interps.push(ChebInterp::build(&f_multi, lo, hi, &tol, self.ctx)?);
        }
        let arc = std::sync::Arc::new(interps);
        *self.h_interp.borrow_mut() = Some(arc.clone());
        Ok(arc)
    }

    /// `h_V(x)` through the per-band interpolants when x lies in a band.
    pub fn h_cached(&self, x: &Float) -> Result<Float> {
        match self.geom.band_containing(x) {
            Some(m) => Ok(self.h_interpolants()?[m - 1].eval(x)),
            None => self.h_real(x),
        }
    }

    /// `h_V(z)` for complex z by the two-circle contour trapezoid; the
    /// independent cross-check path. Radii are derived from the endpoint
    /// hull and must strictly separate `{0} | J | {z, infinity}`.
    pub fn h_contour(&self, z: &Complex, nodes: usize) -> Result<Complex> {
        let prec = self.ctx.work_bits;
        let ctx = self.ctx;
        let zabs = crate::numerics::cabs(z);
        let mut min_e = self.geom.endpoints[0].clone().abs();
        let mut max_e = ctx.zero();
        for c in &self.geom.endpoints {
            let a = c.clone().abs();
            if a < min_e {
                min_e = a.clone();
            }
            if a > max_e {
                max_e = a;
            }
        }
        let r_in = min_e.clone().min(&zabs) * Float::with_val(prec, 0.5);
        let r_out = max_e.clone().max(&zabs) * Float::with_val(prec, 2);
        if r_in.is_zero() || !(zabs > r_in) || !(zabs < r_out) {
            return Err(LqError::ContourViolation(format!(
                "z = {z} not strictly inside the annulus"
            )));
        }
        let kap = kappa(self.parity, self.field.n, ctx);
        let pref = ctx.i() / (ctx.pi() * 2u32 * kap);
        let mut acc = Complex::new(prec);
        // integrand F(s)/(sqrt(R)(s - z)); outer circle clockwise plus inner
        // counter-clockwise
        let mut add_circle = |radius: &Float, clockwise: bool| {
            let m = nodes;
            let two_pi = ctx.pi() * 2u32;
            for k in 0..m {
                let theta = two_pi.clone() * Float::with_val(prec, k as u32)
                    / Float::with_val(prec, m as u32);
                let (sin, cos) = theta.sin_cos(Float::new(prec));
                let s = Complex::with_val(prec, (radius.clone() * &cos, radius.clone() * &sin));
                let f = {
                    let two_over = Complex::with_val(prec, (2, 0)) / &s;
                    two_over + self.field.eval_derivative_complex(&s, ctx)
                };
                let rs = self.geom.r_sqrt_complex(&s, prec);
                let den = rs * Complex::with_val(prec, &s - z);
                // ds = i s dtheta; clockwise flips the sign
                let ds = ctx.i() * &s * two_pi.clone() / Float::with_val(prec, m as u32);
                let term = f / den * ds;
                if clockwise {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
        };
        add_circle(&r_out, true);
        add_circle(&r_in, false);
        Ok(pref * acc)
    }

    /// Single-level moment-condition sums for powers `s^0 .. s^(N+1)`.
    fn moment_sums_at(&self, m: usize) -> Vec<Float> {
        let prec = self.ctx.work_bits;
        let n_pow = self.geom.genus() + 2;
        let mut sums = vec![Float::new(prec); n_pow];
        for band in 1..=self.geom.n_bands() {
            let sweep = self.sweep(band, m);
            let sign = self.geom.band_sign(band);
            for (node, gval) in sweep.nodes.iter().zip(sweep.gvals.iter()) {
                let mut p = Float::with_val(prec, gval * &sweep.weight);
                for acc in sums.iter_mut() {
                    if sign > 0 {
                        *acc += &p;
                    } else {
                        *acc -= &p;
                    }
                    p *= node;
                }
            }
        }
        sums
    }

    /// Fixed-node residual vector for coarse scans: no node doubling, fixed
    /// quadrature orders everywhere.
    pub fn residuals_coarse(&self, m: usize) -> Vec<Float> {
        let ctx = self.ctx;
        let genus = self.geom.genus();
        let n_pow = genus + 2;
        let sums = self.moment_sums_at(m);
        let kap = kappa(self.parity, self.field.n, ctx);
        let mut res = Vec::with_capacity(2 * (genus + 1));
        for item in sums.iter().take(n_pow - 1) {
            res.push(item.clone());
        }
        res.push(sums[n_pow - 1].clone() - ctx.pi() * 2u32 * kap);
        for j in 1..=genus {
            res.push(self.gap_condition_at(j, 24, m).unwrap_or_else(|_| ctx.real(1e9)));
        }
        res
    }

    /// Residual vector of the 2(N+1) moment conditions.
    pub fn residuals(&self) -> Result<Vec<Float>> {
        let prec = self.ctx.work_bits;
        let ctx = self.ctx;
        let genus = self.geom.genus();
        let n_pow = genus + 2; // powers s^0 .. s^(N+1)
        let eval_level = |m: usize| -> Vec<Float> { self.moment_sums_at(m) };
        let mut m = 32usize;
        let mut prev = eval_level(m);
        let sums = loop {
            m *= 2;
            if m > (1 << 18) {
                return Err(LqError::NonConvergent(
                    "moment-condition node budget exceeded".into(),
                ));
            }
            let next = eval_level(m);
            let mut scale = ctx.one();
            for v in &next {
                let a = v.clone().abs();
                if a > scale {
                    scale = a;
                }
            }
            let mut ok = true;
            for (p, q) in prev.iter().zip(next.iter()) {
                let diff = Float::with_val(prec, p - q).abs();
                if !diff.is_finite() || diff > self.tol.clone() * &scale {
                    ok = false;
                    break;
                }
            }
            if ok {
                break next;
            }
            prev = next;
        };
        let kap = kappa(self.parity, self.field.n, ctx);
        let mut res = Vec::with_capacity(2 * (genus + 1));
        for item in sums.iter().take(n_pow - 1) {
            res.push(item.clone());
        }
        res.push(sums[n_pow - 1].clone() - ctx.pi() * 2u32 * kap);
        // gap-bridge conditions
        for j in 1..=genus {
            res.push(self.gap_condition(j)?);
        }
        Ok(res)
    }

    /// `int_gap_j (i R^(1/2)(s)/(2 pi)) T(s) ds - ln|a_j/b_j| - (Vt(a_j)-Vt(b_j))/2`.
    ///
    /// The substitution `s = end -+ w^2` at each gap end makes the integrand
    /// analytic in `w`, so a fixed Gauss-Legendre rule with order doubling
    /// converges spectrally; all T evaluations per level share band sweeps.
    fn gap_condition(&self, j: usize) -> Result<Float> {
        let prec = self.ctx.work_bits;
        let ctx = self.ctx;
        let mut order = 32usize;
        let mut m_t = 64usize;
        let mut prev = self.gap_condition_at(j, order, m_t)?;
        loop {
            order *= 2;
            m_t *= 2;
            if order > (1 << 12) || m_t > (1 << 17) {
                return Err(LqError::NonConvergent("gap condition node budget".into()));
            }
            let next = self.gap_condition_at(j, order, m_t)?;
            let diff = Float::with_val(prec, &next - &prev).abs();
            let scale = next.clone().abs() + ctx.one();
            if diff.is_finite() && diff <= self.tol.clone() * scale {
                return Ok(next);
            }
            prev = next;
        }
    }

    /// Single-level gap-bridge residual with fixed outer Gauss-Legendre
    /// order and fixed Cauchy-sweep level.
    fn gap_condition_at(&self, j: usize, order: usize, m_t: usize) -> Result<Float> {
        let prec = self.ctx.work_bits;
        let ctx = self.ctx;
        let (a_j, b_j) = self.geom.gap(j);
        let sign = self.geom.band_sign(j); // branch sign of R^(1/2) on gap j
        let two_pi = ctx.pi() * 2u32;
        let mid = Float::with_val(prec, a_j + b_j) / 2u32;
        let wmax_l = Float::with_val(prec, &mid - a_j).sqrt();
        let wmax_r = Float::with_val(prec, b_j - &mid).sqrt();
        let rule = crate::numerics::quad::gl_rule(prec, order);
        let mut pts: Vec<Float> = Vec::with_capacity(2 * order);
        let mut jacs: Vec<Float> = Vec::with_capacity(2 * order);
        for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let wl = (x.clone() + 1u32) / 2u32 * &wmax_l;
            pts.push(a_j.clone() + wl.clone().square());
            jacs.push(Float::with_val(prec, w * &wmax_l) * wl);
        }
        for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let wr = (x.clone() + 1u32) / 2u32 * &wmax_r;
            pts.push(b_j.clone() - wr.clone().square());
            jacs.push(Float::with_val(prec, w * &wmax_r) * wr);
        }
        let tsums = self.t_sum_multi_at(&pts, m_t);
        let mut acc = Float::new(prec);
        for ((s, t), jac) in pts.iter().zip(tsums).zip(jacs) {
            let r = self.geom.abs_r_sqrt(s, prec);
            acc += r * t * jac;
        }
        acc /= &two_pi;
        let lhs = if sign > 0 { acc } else { -acc };
        let rhs = Float::with_val(prec, a_j / b_j).abs().ln()
            + (self.field.eval(a_j, ctx)? - self.field.eval(b_j, ctx)?) / 2u32;
        Ok(lhs - rhs)
    }

    /// Density `psi(x)` for x strictly inside a band.
    pub fn density(&self, x: &Float) -> Result<Float> {
        let prec = self.ctx.work_bits;
        let Some(m) = self.geom.band_containing(x) else {
            return Err(LqError::OutsideSupport(format!("{x}")));
        };
        let h = self.h_cached(x)?;
        let sign = self.geom.band_sign(m);
        let v = self.geom.abs_r_sqrt(x, prec) * h / (self.ctx.pi() * 2u32);
        Ok(if sign > 0 { v } else { -v })
    }

    /// `sum_bands (sign/2 pi) int w(s) |R|^(1/2) h(s) ds`: the psi-weighted
    /// integral of `w`.
    pub fn psi_integral<W: Fn(&Float) -> Float>(&self, w: &W) -> Result<Float> {
        let mut total = self.ctx.zero();
        for m in 1..=self.geom.n_bands() {
            total += self.psi_integral_on_band(w, m)?;
        }
        Ok(total)
    }

    /// Same restricted to band m.
    pub fn psi_integral_on_band<W: Fn(&Float) -> Float>(&self, w: &W, m: usize) -> Result<Float> {
        let prec = self.ctx.work_bits;
        let ctx = self.ctx;
        let (lo, hi) = self.geom.band(m);
        let sign = self.geom.band_sign(m);
        let two_pi = ctx.pi() * 2u32;
        let mut mm = 16usize;
        let eval = |mm: usize| -> Result<Float> {
            let g = |s: &Float| -> Result<Float> {
                let other = self.geom.other_factor_inv_sqrt(m, s, prec).recip();
                Ok(w(s) * other * self.h_cached(s)?)
            };
            let pi = ctx.pi();
            let rad = Float::with_val(prec, hi - lo) / 2u32;
            let mid = Float::with_val(prec, hi + lo) / 2u32;
            let mut acc = Float::new(prec);
            for k in 1..=mm {
                let theta = pi.clone() * Float::with_val(prec, k as u32)
                    / Float::with_val(prec, mm as u32 + 1);
                let (sin, cos) = theta.sin_cos(Float::new(prec));
                let x = mid.clone() + rad.clone() * cos;
                acc += sin.square() * g(&x)?;
            }
            Ok(acc * pi * rad.square() / Float::with_val(prec, mm as u32 + 1))
        };
        let mut prev = eval(mm)?;
        loop {
            mm *= 2;
            if mm > (1 << 18) {
                return Err(LqError::NonConvergent(
                    "psi integral node budget exceeded".into(),
                ));
            }
            let next = eval(mm)?;
            let diff = Float::with_val(prec, &next - &prev).abs();
            let scale = next.clone().abs().max(&prev.clone().abs());
            if diff.is_finite() && diff <= self.tol.clone() * (scale + ctx.exp2i(-(prec as i64))) {
                let v = next / &two_pi;
                return Ok(if sign > 0 { v } else { -v });
            }
            prev = next;
        }
    }

    /// `4 int ln|x-s| psi ds - 2 ln|x| - Vt(x)` in the even normalization or
    /// `2 kappa (int ln|x-s| psi - q_log) - 2 ln|x| - Vt(x)` in the odd one:
    /// equals `ell` on the support, strictly below off it (regular case).
    pub fn variational_value(&self, x: &Float, q_log_abs: &Float) -> Result<Float> {
        let ctx = self.ctx;
        let prec = ctx.work_bits;
        let kap = kappa(self.parity, self.field.n, ctx);
        let mut log_int = ctx.zero();
        for m in 1..=self.geom.n_bands() {
            let (lo, hi) = self.geom.band(m);
            // integrate ln|x-s| psi(s) over the band, splitting at x when it
            // lies inside
            let f = |s: &Float| -> Float {
                let d = Float::with_val(prec, x - s).abs();
                if d.is_zero() {
                    return Float::new(prec);
                }
                let psi = match self.density(s) {
                    Ok(v) => v,
                    Err(_) => return Float::new(prec),
                };
                d.ln() * psi
            };
            let tol = self.tol.clone();
            if x > lo && x < hi {
                let l = adaptive_gl(&f, lo, x, &tol, ctx)?;
                let r = adaptive_gl(&f, x, hi, &tol, ctx)?;
                log_int += l + r;
            } else {
                log_int += adaptive_gl(&f, lo, hi, &tol, ctx)?;
            }
        }
        let x_abs_ln = x.clone().abs().ln();
        let v = self.field.eval(x, ctx)?;
        match self.parity {
            Parity::Even => Ok(log_int * 4u32 - x_abs_ln * 2u32 - v),
            Parity::Odd => {
                Ok((log_int - q_log_abs) * 2u32 * kap - x_abs_ln * 2u32 - v)
            }
        }
    }
}

/// Endpoint seed at reduced precision by a nested one-dimensional search:
/// for each candidate inner edge the outer edge is matched to total mass 1
/// by bisection (mass grows with the band), and the remaining moment
/// condition changes sign at the solution. Genus 0 searches (b_0, a_1) on
/// either half-line; genus 1 searches the symmetric ansatz (-c, -d, d, c).
/// Genus >= 2 needs a user-provided guess.
pub fn auto_seed(
    field: &ScaledField,
    parity: Parity,
    genus: usize,
    ctx: &PrecisionCtx,
) -> Result<Vec<Float>> {
    let scan_ctx = PrecisionCtx::new(192)?;
    let scan_field = ScaledField::new(field.base.clone(), field.cal_n, field.n);
    let m_fixed = 256usize;
    let make = |inner: &Float, outer: &Float| -> Option<Vec<Float>> {
        let pts = match genus {
            0 => {
                if inner.is_sign_positive() {
                    vec![inner.clone(), outer.clone()]
                } else {
                    vec![outer.clone(), inner.clone()]
                }
            }
            1 => vec![-outer.clone(), -inner.clone(), inner.clone(), outer.clone()],
            _ => return None,
        };
        if BandGeometry::interlaced_ok(&pts) {
            Some(pts)
        } else {
            None
        }
    };
    let coarse = |pts: &[Float]| -> Vec<Float> {
        let geom = BandGeometry::new(pts.to_vec());
        let engine = EqEngine::new(geom, &scan_field, parity, &scan_ctx);
        engine.residuals_coarse_mass(m_fixed)
    };
    // mass - 1 at (inner, outer); None when the configuration is inadmissible
    let mass_def = |inner: &Float, outer: &Float| -> Option<Float> {
        let pts = make(inner, outer)?;
        let r = coarse(&pts);
        let v = r[genus + 1].clone();
        if v.is_finite() {
            Some(v)
        } else {
            None
        }
    };
    let s0_at = |inner: &Float, outer: &Float| -> Option<Float> {
        let pts = make(inner, outer)?;
        let r = coarse(&pts);
        if r[0].is_finite() {
            Some(r[0].clone())
        } else {
            None
        }
    };
    // outer edge matching mass = 1 for a given inner edge
    let match_outer = |inner: &Float| -> Option<Float> {
        let step = scan_ctx.real(0.05) * (inner.clone().abs() + 1u32);
        let mut lo = inner.clone().abs() + step.clone() / 64u32;
        let mut flo = mass_def(inner, &lo)?;
        if flo > 0u32 {
            return None; // already too much mass at the smallest band
        }
        let mut hi = lo.clone();
        let mut fhi = flo.clone();
        for _ in 0..200 {
            let cand = hi.clone() + &step;
            let Some(f) = mass_def(inner, &cand) else { break };
            hi = cand;
            fhi = f;
            if fhi > 0u32 {
                break;
            }
            lo = hi.clone();
            flo = fhi.clone();
        }
        if !(fhi > 0u32) {
            return None;
        }
        for _ in 0..24 {
            let mid = Float::with_val(scan_ctx.work_bits, &lo + &hi) / 2u32;
            let fm = mass_def(inner, &mid)?;
            if fm.clone().abs() < 1e-5 {
                return Some(mid);
            }
            if fm.is_sign_negative() == flo.is_sign_negative() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        Some((lo + hi) / 2u32)
    };
    if genus > 1 {
        return Err(LqError::ConfigError(format!(
            "no automatic seed for genus {genus}; provide endpoint guesses"
        )));
    }
    // walk inner-edge candidates on both half-lines (genus 0) or the
    // positive one (symmetric genus 1), looking for an S0 sign change along
    // the mass-matched curve
    let half_lines: &[f64] = if genus == 0 { &[1.0, -1.0] } else { &[1.0] };
    let mut best: Option<(Float, Vec<Float>)> = None;
    for &sgn in half_lines {
        let mut prev: Option<(Float, Float, Float)> = None; // (inner, outer, s0)
        let mut candidates: Vec<Float> = (0..40)
            .map(|k| scan_ctx.real(sgn * 0.004 * 1.45f64.powi(k)))
            .collect();
        let mut idx = 0usize;
        while idx < candidates.len() {
            let inner = candidates[idx].clone();
            idx += 1;
            let matched = match_outer(&inner).and_then(|outer| {
                s0_at(&inner, &outer).map(|s0| (outer, s0))
            });
            if std::env::var("LQ_SEED_DEBUG").is_ok() {
                match &matched {
                    Some((o, s)) => eprintln!("seed walk inner={:.6} outer={:.4} s0={:+.4e}", inner.to_f64(), o.to_f64(), s.to_f64()),
                    None => eprintln!("seed walk inner={:.6} UNMATCHED", inner.to_f64()),
                }
            }
            let Some((outer, s0)) = matched else {
                // the matchable curve may end just past a sign change:
                // refine between the last success and this failure once
                if let Some((pin, _pout, _ps0)) = prev.clone() {
                    let gap = Float::with_val(scan_ctx.work_bits, &inner - &pin).abs();
                    if gap < pin.clone().abs() * scan_ctx.real(0.01) {
                        prev = None;
                        continue;
                    }
                    let mut refined = Vec::new();
                    for j in 1..12 {
                        let frac = j as f64 / 12.0;
                        let cand = pin.clone()
                            + Float::with_val(scan_ctx.work_bits, &inner - &pin)
                                * scan_ctx.real(frac);
                        refined.push(cand);
                    }
                    refined.reverse();
                    for r in refined {
                        candidates.insert(idx, r);
                    }
                    // keep prev: the crossing may sit right at the start of
                    // the refined stretch
                    continue;
                }
                prev = None;
                continue;
            };
            if let Some((pin, _pout, ps0)) = prev.clone() {
                if s0.is_sign_negative() != ps0.is_sign_negative() {
                    // bisect the inner edge over [pin, inner]
                    let mut lo = pin.clone();
                    let mut flo = ps0.clone();
                    let mut hi = inner.clone();
                    for _ in 0..30 {
                        let mid = Float::with_val(scan_ctx.work_bits, &lo + &hi) / 2u32;
                        let fm = match_outer(&mid).and_then(|om| s0_at(&mid, &om));
                        match fm {
                            Some(fm) if fm.is_sign_negative() == flo.is_sign_negative() => {
                                lo = mid;
                                flo = fm;
                            }
                            Some(_) => hi = mid,
                            // unevaluable midpoints are pushed toward hi
                            None => lo = mid,
                        }
                    }
                    let inner_star = Float::with_val(scan_ctx.work_bits, &lo + &hi) / 2u32;
                    if let Some(outer_star) = match_outer(&inner_star) {
                        if let Some(pts) = make(&inner_star, &outer_star) {
                            let r = coarse(&pts);
                            let mut norm = scan_ctx.zero();
                            for v in &r {
                                norm += v.clone().square();
                            }
                            let replace = match &best {
                                None => true,
                                Some((bn, _)) => norm < *bn,
                            };
                            if replace {
                                best = Some((norm, pts));
                            }
                        }
                    }
                }
            }
            prev = Some((inner, outer, s0));
        }
    }
    let (_, pts) = best.ok_or_else(|| {
        LqError::ConfigError("endpoint scan found no admissible configuration".into())
    })?;
    Ok(pts.iter().map(|p| ctx.real(p)).collect())
}

/// Solve the endpoint system for the requested parity and genus.
pub fn solve_endpoints(
    field: &ScaledField,
    parity: Parity,
    genus: usize,
    x0: &[Float],
    ctx: &PrecisionCtx,
) -> Result<EquilibriumData> {
    if x0.len() != 2 * (genus + 1) {
        return Err(LqError::ConfigError(format!(
            "initial guess must have {} endpoints, got {}",
            2 * (genus + 1),
            x0.len()
        )));
    }
    let residual = |pts: &[Float]| -> Result<Vec<Float>> {
        let geom = BandGeometry::new(pts.to_vec());
        let engine = EqEngine::new(geom, field, parity, ctx);
        engine.residuals()
    };
    // Stage 1: fixed-node residual with the total-mass normalization in
    // place of the s^(N+1) condition. Fixed nodes keep the map smooth in the
    // endpoints and evaluable far from the solution, where the adaptive
    // quadratures would stall against the origin pole.
    let residual_mass = |pts: &[Float]| -> Result<Vec<Float>> {
        let geom = BandGeometry::new(pts.to_vec());
        let engine = EqEngine::new(geom, field, parity, ctx);
        Ok(engine.residuals_coarse_mass(768))
    };
    let guard = |pts: &[Float]| BandGeometry::interlaced_ok(pts);
    let tol = ctx.exp2i(-((ctx.work_bits / 2) as i64).max(100));
    let loose = ctx.real(1e-12);
    let stage1 = solve_newton_guarded(&residual_mass, x0, &loose, 200, &guard, ctx)?;
    // Stage 2: polish against the verbatim moment conditions.
    let solution = solve_newton_guarded(&residual, &stage1, &tol, 60, &guard, ctx)?;
    let geom = BandGeometry::new(solution.clone());
    let engine = EqEngine::new(geom.clone(), field, parity, ctx);
    let residuals = engine.residuals()?;
    // derived quantities
    let one = |_: &Float| ctx.one();
    let mut band_masses = Vec::new();
    for m in 1..=geom.n_bands() {
        band_masses.push(engine.psi_integral_on_band(&one, m)?);
    }
    let mut omega = Vec::new();
    for j in 1..=genus {
        let mut acc = ctx.zero();
        for item in band_masses.iter().take(geom.n_bands()).skip(j) {
            acc += item;
        }
        omega.push(acc * ctx.pi() * 4u32);
    }
    let q_log_abs = engine.psi_integral(&|s: &Float| s.clone().abs().ln())?;
    let mut mass_neg = ctx.zero();
    let mut mass_pos = ctx.zero();
    for m in 1..=geom.n_bands() {
        let (lo, _hi) = geom.band(m);
        if lo.is_sign_positive() {
            mass_pos += &band_masses[m - 1];
        } else {
            mass_neg += &band_masses[m - 1];
        }
    }
    let s_moment_m2 = engine.psi_integral(&|s: &Float| s.clone().square().recip())?;
    let s_moment_m1 = engine.psi_integral(&|s: &Float| s.clone().recip())?;
    let s_moment_p1 = engine.psi_integral(&|s: &Float| s.clone())?;
    let s_moment_p2 = engine.psi_integral(&|s: &Float| s.clone().square())?;
    // ell from the Euler-Lagrange equality at an interior point of band 1
    let (lo, hi) = geom.band(1);
    let x_probe = Float::with_val(ctx.work_bits, lo + hi) / 2u32;
    let ell = engine.variational_value(&x_probe, &q_log_abs)?;
    Ok(EquilibriumData {
        parity,
        n: field.n,
        geom,
        field: field.clone(),
        residuals,
        ell,
        q_log_abs,
        mass_neg,
        mass_pos,
        band_masses,
        omega,
        s_moment_m2,
        s_moment_m1,
        s_moment_p1,
        s_moment_p2,
    })
}

impl EquilibriumData {
    pub fn engine<'a>(&'a self, ctx: &'a PrecisionCtx) -> EqEngine<'a> {
        EqEngine::new(self.geom.clone(), &self.field, self.parity, ctx)
    }

    /// Total mass (must be 1).
    pub fn total_mass(&self, ctx: &PrecisionCtx) -> Float {
        let mut acc = ctx.zero();
        for m in &self.band_masses {
            acc += m;
        }
        acc
    }

    /// `Q` of the variational theory: `int ln s dmu` with the imaginary part
    /// `i pi * mass_neg` tracked separately as (real, mass_neg).
    pub fn q_complex_parts(&self) -> (Float, Float) {
        (self.q_log_abs.clone(), self.mass_neg.clone())
    }

    /// Spread of the variational constant over 3 interior points per band.
    pub fn ell_spread(&self, ctx: &PrecisionCtx) -> Result<Float> {
        let engine = self.engine(ctx);
        let mut values = Vec::new();
        for m in 1..=self.geom.n_bands() {
            let (lo, hi) = self.geom.band(m);
            for frac in [0.23f64, 0.5, 0.81] {
                let x = lo.clone() + Float::with_val(ctx.work_bits, hi - lo) * ctx.real(frac);
                values.push(engine.variational_value(&x, &self.q_log_abs)?);
            }
        }
        let mut min_v = values[0].clone();
        let mut max_v = values[0].clone();
        for v in &values[1..] {
            if *v < min_v {
                min_v = v.clone();
            }
            if *v > max_v {
                max_v = v.clone();
            }
        }
        Ok(max_v - min_v)
    }

    /// Regularity diagnostics: h away from zero on the support, positive
    /// interior density, strictly negative variational margin outside.
    pub fn regularity_check(&self, ctx: &PrecisionCtx) -> Result<RegularityReport> {
        let engine = self.engine(ctx);
        let mut notes = Vec::new();
        let mut min_h: Option<Float> = None;
        let mut min_psi: Option<Float> = None;
        for m in 1..=self.geom.n_bands() {
            let (lo, hi) = self.geom.band(m);
            for k in 1..20 {
                let x = lo.clone()
                    + Float::with_val(ctx.work_bits, hi - lo) * ctx.real(k as f64 / 20.0);
                let h = engine.h_real(&x)?.abs();
                min_h = Some(match min_h {
                    None => h.clone(),
                    Some(v) => {
                        if h < v {
                            h
                        } else {
                            v
                        }
                    }
                });
                let psi = engine.density(&x)?;
                min_psi = Some(match min_psi {
                    None => psi.clone(),
                    Some(v) => {
                        if psi < v {
                            psi
                        } else {
                            v
                        }
                    }
                });
            }
        }
        // exterior margin on a log-spaced grid away from the endpoints
        let mut margin: Option<Float> = None;
        let b0 = &self.geom.endpoints[0];
        let a_top = self.geom.endpoints.last().unwrap();
        let width = Float::with_val(ctx.work_bits, a_top - b0);
        let mut probes: Vec<Float> = Vec::new();
        for k in 1..=6 {
            let off = width.clone() * ctx.real(0.08 * k as f64 * k as f64);
            probes.push(a_top.clone() + off.clone());
            let left = b0.clone() - off;
            if !left.is_zero() {
                probes.push(left);
            }
        }
        for j in 1..=self.geom.genus() {
            let (a_j, b_j) = self.geom.gap(j);
            for frac in [0.31f64, 0.63] {
                let x = a_j.clone() + Float::with_val(ctx.work_bits, b_j - a_j) * ctx.real(frac);
                if !x.is_zero() {
                    probes.push(x);
                }
            }
        }
        for x in probes {
            let v = engine.variational_value(&x, &self.q_log_abs)? - &self.ell;
            // margin is -v, required positive
            let m = -v;
            margin = Some(match margin {
                None => m.clone(),
                Some(old) => {
                    if m < old {
                        m
                    } else {
                        old
                    }
                }
            });
        }
        let min_h = min_h.unwrap();
        let min_psi = min_psi.unwrap();
        let margin = margin.unwrap();
        let regular = min_h > 0u32 && min_psi > 0u32 && margin > 0u32;
        if !regular {
            notes.push(format!(
                "min|h|={:.3e} min psi={:.3e} exterior margin={:.3e}",
                min_h.to_f64(),
                min_psi.to_f64(),
                margin.to_f64()
            ));
        }
        Ok(RegularityReport {
            regular,
            min_abs_h_on_bands: min_h,
            min_density_interior: min_psi,
            exterior_margin: margin,
            notes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{fields, ScaledField};

    fn f1_even(n: u64, bits: u32) -> (EquilibriumData, PrecisionCtx) {
        let ctx = PrecisionCtx::new(bits).unwrap();
        let field = ScaledField::new(fields::f1(&ctx), n, n);
        let x0 = auto_seed(&field, Parity::Even, 0, &ctx).unwrap();
        let data = solve_endpoints(&field, Parity::Even, 0, &x0, &ctx).unwrap();
        (data, ctx)
    }

    #[test]
    fn one_cut_even_solves_with_small_residuals() {
        let (data, ctx) = f1_even(8, 320);
        for r in &data.residuals {
            assert!(r.clone().abs() < ctx.exp2i(-100), "residual {r}");
        }
        let b0 = data.geom.endpoints[0].to_f64();
        let a1 = data.geom.endpoints[1].to_f64();
        assert!(1.5 < b0 && b0 < 3.0 && 3.0 < a1 && a1 < 4.5, "({b0}, {a1})");
        // total mass 1
        let mass = data.total_mass(&ctx);
        let err = (mass - 1u32).abs();
        assert!(err < ctx.exp2i(-120), "mass err {err}");
    }

    #[test]
    fn one_cut_matches_bisection_oracle() {
        // Oracle: nested bisection on the two one-cut conditions
        //   S0(b,a) = int F/|R|^(1/2) = 0,  S1(b,a) = int F s/|R|^(1/2) = 4 pi
        // (see the residual definition). For fixed a, S0 is monotone in b
        // near the solution, so solve S0 = 0 by bisection in b inside a
        // bracket, then drive S1 - 4 pi to zero by bisection in a.
        let ctx = PrecisionCtx::new(256).unwrap();
        let field = ScaledField::new(fields::f1(&ctx), 8, 8);
        let eval_s = |b: &Float, a: &Float| -> (Float, Float) {
            let geom = BandGeometry::new(vec![b.clone(), a.clone()]);
            let engine = EqEngine::new(geom, &field, Parity::Even, &ctx);
            let r = engine.residuals().unwrap();
            (r[0].clone(), r[1].clone())
        };
        let solve_b = |a: &Float| -> Float {
            let mut lo = ctx.real(1.2);
            let mut hi = a.clone() - ctx.real(0.05);
            let (slo, _) = eval_s(&lo, a);
            for _ in 0..(ctx.work_bits / 2) {
                let mid = Float::with_val(ctx.work_bits, &lo + &hi) / 2u32;
                let (sm, _) = eval_s(&mid, a);
                if sm.is_sign_negative() == slo.is_sign_negative() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo + hi) / 2u32
        };
        let mut alo = ctx.real(3.4);
        let mut ahi = ctx.real(5.0);
        let f_of_a = |a: &Float| -> Float {
            let b = solve_b(a);
            let (_, s1) = eval_s(&b, a);
            s1
        };
        let flo = f_of_a(&alo);
        for _ in 0..90 {
            let mid = Float::with_val(ctx.work_bits, &alo + &ahi) / 2u32;
            let fm = f_of_a(&mid);
            if fm.is_sign_negative() == flo.is_sign_negative() {
                alo = mid;
            } else {
                ahi = mid;
            }
        }
        let a_star = (alo + ahi) / 2u32;
        let b_star = solve_b(&a_star);
        let (data, _c2) = f1_even(8, 256);
        let db = (data.geom.endpoints[0].clone() - &b_star).abs();
        let da = (data.geom.endpoints[1].clone() - &a_star).abs();
        assert!(db < ctx.real(1e-20) && da < ctx.real(1e-20), "db={db} da={da}");
    }

    #[test]
    fn density_positive_and_edge_order() {
        let (data, ctx) = f1_even(8, 320);
        let engine = data.engine(&ctx);
        let (lo, hi) = data.geom.band(1);
        for k in 1..50 {
            let x = lo.clone() + Float::with_val(ctx.work_bits, hi - lo) * ctx.real(k as f64 / 50.0);
            let psi = engine.density(&x).unwrap();
            assert!(psi > 0u32, "psi({x}) = {psi}");
        }
        // psi(x)/sqrt(x - b0) stays bounded near the left edge
        let mut prev: Option<Float> = None;
        for e in [1e-4f64, 1e-6, 1e-8] {
            let x = lo.clone() + ctx.real(e);
            let psi = engine.density(&x).unwrap();
            let ratio = psi / ctx.real(e).sqrt();
            if let Some(p) = prev.clone() {
                let rel = crate::numerics::rel_err(&ratio, &p, &ctx.one());
                assert!(rel < 0.05, "edge ratio drift {rel}");
            }
            prev = Some(ratio);
        }
        assert!(engine.density(&ctx.real(100)).is_err());
    }

    #[test]
    fn h_real_matches_contour_route() {
        let (data, ctx) = f1_even(4, 256);
        let engine = data.engine(&ctx);
        let (lo, hi) = data.geom.band(1);
        let probes = [
            lo.clone() + Float::with_val(ctx.work_bits, hi - lo) * ctx.real(0.37),
            lo.clone() - ctx.real(0.4),
            hi.clone() + ctx.real(0.6),
        ];
        for x in probes {
            let fast = engine.h_real(&x).unwrap();
            let z = ctx.creal(&x);
            let slow = engine.h_contour(&z, 512).unwrap();
            let im = slow.imag().clone().abs();
            assert!(im < ctx.exp2i(-60) * (fast.clone().abs() + 1u32), "Im h = {im}");
            let err = crate::numerics::rel_err(&fast, &slow.real().clone(), &ctx.one());
            assert!(err < ctx.exp2i(-60), "x={x} fast={fast} slow={slow} err={err}");
        }
    }

    #[test]
    fn contour_doubling_converges() {
        let (data, ctx) = f1_even(4, 256);
        let engine = data.engine(&ctx);
        let z = Complex::with_val(ctx.work_bits, (3.0, 0.2));
        let h1 = engine.h_contour(&z, 256).unwrap();
        let h2 = engine.h_contour(&z, 512).unwrap();
        let diff = crate::numerics::cabs(&Complex::with_val(ctx.work_bits, &h1 - &h2));
        assert!(diff < ctx.exp2i(-80), "contour drift {diff}");
    }

    #[test]
    fn two_cut_even_is_symmetric() {
        let ctx = PrecisionCtx::new(320).unwrap();
        let field = ScaledField::new(fields::f2(&ctx), 8, 8);
        let x0 = auto_seed(&field, Parity::Even, 1, &ctx).unwrap();
        let data = solve_endpoints(&field, Parity::Even, 1, &x0, &ctx).unwrap();
        for r in &data.residuals {
            assert!(r.clone().abs() < ctx.exp2i(-100), "residual {r}");
        }
        // symmetric endpoints: b0 = -a2, a1 = -b1
        let e = &data.geom.endpoints;
        let s1 = Float::with_val(ctx.work_bits, &e[0] + &e[3]).abs();
        let s2 = Float::with_val(ctx.work_bits, &e[1] + &e[2]).abs();
        assert!(s1 < ctx.exp2i(-90) && s2 < ctx.exp2i(-90), "asymmetry {s1} {s2}");
        // equal band masses summing to 1
        let mass = data.total_mass(&ctx);
        assert!((mass - 1u32).abs() < ctx.exp2i(-110));
        let dm = Float::with_val(
            ctx.work_bits,
            &data.band_masses[0] - &data.band_masses[1],
        )
        .abs();
        assert!(dm < ctx.exp2i(-90), "band mass asymmetry {dm}");
        assert_eq!(data.omega.len(), 1);
        // Omega_1 = 4 pi * mass of band 2 = 2 pi
        let expect = ctx.pi() * 2u32;
        let err = crate::numerics::rel_err(&data.omega[0], &expect, &ctx.one());
        assert!(err < ctx.exp2i(-90), "Omega err {err}");
    }

    #[test]
    fn ell_constant_across_bands_and_negative_outside() {
        let ctx = PrecisionCtx::new(320).unwrap();
        let field = ScaledField::new(fields::f2(&ctx), 8, 8);
        let x0 = auto_seed(&field, Parity::Even, 1, &ctx).unwrap();
        let data = solve_endpoints(&field, Parity::Even, 1, &x0, &ctx).unwrap();
        let spread = data.ell_spread(&ctx).unwrap();
        assert!(spread.clone().abs() < ctx.real(1e-16), "ell spread {spread}");
        let report = data.regularity_check(&ctx).unwrap();
        assert!(report.regular, "notes: {:?}", report.notes);
    }

    #[test]
    fn odd_problem_solves_and_approaches_even() {
        let ctx = PrecisionCtx::new(320).unwrap();
        let mut gaps = Vec::new();
        for n in [8u64, 16, 32] {
            let field = ScaledField::new(fields::f1(&ctx), n, n);
            let x0 = auto_seed(&field, Parity::Even, 0, &ctx).unwrap();
            let even = solve_endpoints(&field, Parity::Even, 0, &x0, &ctx).unwrap();
            let x1 = auto_seed(&field, Parity::Odd, 0, &ctx).unwrap();
            let odd = solve_endpoints(&field, Parity::Odd, 0, &x1, &ctx).unwrap();
            let mut gap = ctx.zero();
            for (e, o) in even.geom.endpoints.iter().zip(odd.geom.endpoints.iter()) {
                let d = Float::with_val(ctx.work_bits, e - o).abs();
                if d > gap {
                    gap = d;
                }
            }
            gaps.push(gap);
            let mass = odd.total_mass(&ctx);
            assert!((mass - 1u32).abs() < ctx.exp2i(-110));
        }
        assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "gaps: {gaps:?}");
    }

    #[test]
    fn perturbed_start_returns_to_same_endpoints() {
        let (data, ctx) = f1_even(8, 256);
        let field = &data.field;
        let mut x0 = data.geom.endpoints.clone();
        x0[0] *= ctx.real(1.01);
        x0[1] *= ctx.real(0.99);
        let again = solve_endpoints(field, Parity::Even, 0, &x0, &ctx).unwrap();
        for (p, q) in data.geom.endpoints.iter().zip(again.geom.endpoints.iter()) {
            let d = Float::with_val(ctx.work_bits, p - q).abs();
            assert!(d < ctx.exp2i(-90), "endpoint drift {d}");
        }
    }
}
