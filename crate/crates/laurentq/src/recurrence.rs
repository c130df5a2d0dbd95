//! The pair of three- and five-term recurrence relations satisfied by the
//! orthonormal OLPs, their coefficient sequences, the banded Laurent-Jacobi
//! matrices for multiplication by `z` and `z^-1`, and the expansion
//! coefficients of the Riemann-Hilbert solutions at 0 and infinity computed
//! directly as weighted moments.
//!
//! Coefficients come from exact ratios within the coefficient table (no
//! extra quadratures); inner products serve only as residual tests.

use crate::error::{LqError, Result};
use crate::moments::MomentTable;
use crate::numerics::{DenseMatrix, PrecisionCtx};
use crate::olp::OlpFamily;
use rug::{Complex, Float};

/// The eight coefficient sequences indexed by subscript; entry `j` of each
/// vector is the coefficient with that subscript.
#[derive(Debug, Clone)]
pub struct RecurrenceSet {
    pub a: Vec<Float>,
    pub b: Vec<Float>,
    pub c: Vec<Float>,
    pub alpha: Vec<Float>,
    pub beta: Vec<Float>,
    pub gamma: Vec<Float>,
    /// Largest valid subscript.
    pub max_index: usize,
}

impl RecurrenceSet {
    /// Solve the coefficient relations from the family's coefficient table.
    ///
    /// Requires the family through L-degree `2 n_max + 3`; fills subscripts
    /// through `2 n_max + 1` for `a`/`alpha`, `2 n_max + 2` for `b`/`beta`/`c`,
    /// and `2 n_max + 3` for `gamma`. When the interlocking closure for
    /// `a_2n` or `alpha_(2n+1)` degenerates (vanishing trailing coefficients,
    /// e.g. for even weights) the coefficient is taken from the moment-exact
    /// inner product instead.
    pub fn extract(
        fam: &OlpFamily,
        table: &MomentTable,
        n_max: usize,
        ctx: &PrecisionCtx,
    ) -> Result<Self> {
        if fam.m_max < 2 * n_max + 3 {
            return Err(LqError::ConfigError(format!(
                "family m_max {} too small for n_max {n_max}",
                fam.m_max
            )));
        }
        let len = 2 * n_max + 4;
        let mut a = vec![ctx.zero(); len];
        let mut b = vec![ctx.zero(); len];
        let mut c = vec![ctx.zero(); len];
        let mut alpha = vec![ctx.zero(); len];
        let mut beta = vec![ctx.zero(); len];
        let mut gamma = vec![ctx.zero(); len];
        let xi = |m: usize, k: i64| fam.xi(m, k);
        let nonzero = |v: &Float, idx: i64| -> Result<()> {
            if v.is_zero() {
                Err(LqError::ZeroDivision(idx))
            } else {
                Ok(())
            }
        };
        for k in 0..=n_max {
            let kk = k as i64;
            let xi_e = xi(2 * k, kk);
            let xi_e_up = xi(2 * k + 2, kk + 1);
            let xi_o = xi(2 * k + 1, -kk - 1);
            nonzero(&xi_e_up, 2 * kk + 2)?;
            nonzero(&xi_o, 2 * kk + 1)?;
            // five-term (z) family
            c[2 * k + 2] = xi_e.clone() / &xi_e_up;
            b[2 * k + 2] = xi(2 * k + 1, kk) / &xi_e_up;
            b[2 * k + 1] = -(c[2 * k + 2].clone() * xi(2 * k + 2, -kk - 1) / &xi_o);
            // a_(2k+1) = -nu^(2k+1)_k * nu^(2k+2)_(-k-1)
            a[2 * k + 1] = -(fam.nu_trailing(2 * k + 1) * fam.nu_trailing(2 * k + 2));
            // five-term (1/z) family
            beta[2 * k + 1] = xi(2 * k, -kk) / &xi_o;
            if 2 * k + 3 <= fam.m_max {
                let xi_o_up = xi(2 * k + 3, -kk - 2);
                nonzero(&xi_o_up, 2 * kk + 3)?;
                gamma[2 * k + 3] = xi_o.clone() / &xi_o_up;
                beta[2 * k + 2] = -(gamma[2 * k + 3].clone() * xi(2 * k + 3, kk + 1) / &xi_e_up);
            }
            alpha[2 * k] = -(fam.nu_trailing(2 * k) * fam.nu_trailing(2 * k + 1));
        }
        // closures of the interlocked relations; degenerate cases fall back
        // to <z phi, phi> / <z^-1 phi, phi>
        let shifted_inner = |m: usize, j: i64| -> Result<Float> {
            let mut shifted = fam.phi[m].clone();
            shifted.min_deg += j;
            shifted.inner(&fam.phi[m], table)
        };
        for k in 0..=n_max {
            let alpha_scale = (fam.nu_trailing(2 * k).abs() + 1u32)
                * (fam.nu_trailing(2 * k + 1).abs() + 1u32);
            if alpha[2 * k].clone().abs() > ctx.eps_pow(2) * alpha_scale {
                let cross =
                    b[2 * k].clone() * &beta[2 * k] + b[2 * k + 1].clone() * &beta[2 * k + 1];
                a[2 * k] = (ctx.one() - cross) / &alpha[2 * k];
            } else {
                a[2 * k] = shifted_inner(2 * k, 1)?;
            }
            nonzero(&b[2 * k + 1], 2 * k as i64 + 1)?;
            let num = b[2 * k].clone() * &gamma[2 * k + 1]
                + a[2 * k].clone() * &beta[2 * k + 1]
                + c[2 * k + 2].clone() * &beta[2 * k + 2];
            let cand = -(num / &b[2 * k + 1]);
            // the (3.36)-style closure needs beta_(2k+2), valid only while
            // gamma_(2k+3) is inside the table
            if 2 * k + 3 <= fam.m_max {
                alpha[2 * k + 1] = cand;
            } else {
                alpha[2 * k + 1] = shifted_inner(2 * k + 1, -1)?;
            }
        }
        Ok(RecurrenceSet {
            a,
            b,
            c,
            alpha,
            beta,
            gamma,
            max_index: 2 * n_max + 3,
        })
    }

    /// K x K leading truncations of the Laurent-Jacobi matrices for
    /// multiplication by z (F) and by 1/z (G).
    pub fn assemble_jacobi(&self, size: usize, ctx: &PrecisionCtx) -> (DenseMatrix, DenseMatrix) {
        let f = DenseMatrix::from_fn(size, size, |i, j| {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            if i == j {
                self.a[i].clone()
            } else if hi == lo + 1 {
                self.b[hi].clone()
            } else if hi == lo + 2 && lo % 2 == 0 {
                self.c[hi].clone()
            } else {
                ctx.zero()
            }
        });
        let g = DenseMatrix::from_fn(size, size, |i, j| {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            if i == j {
                self.alpha[i].clone()
            } else if hi == lo + 1 {
                self.beta[hi].clone()
            } else if hi == lo + 2 && lo % 2 == 1 {
                self.gamma[hi].clone()
            } else {
                ctx.zero()
            }
        });
        (f, g)
    }

    /// Max residual of the four recurrences on a logarithmic grid in
    /// `[-R, -1/R] U [1/R, R]`, each normalized by the local term scale.
    pub fn residual_on_grid(
        &self,
        fam: &OlpFamily,
        n: usize,
        r_outer: f64,
        points: usize,
        ctx: &PrecisionCtx,
    ) -> Result<Float> {
        let mut worst = ctx.zero();
        let phi = |m: i64, x: &Float| -> Float {
            if m < 0 {
                Float::new(ctx.work_bits)
            } else {
                fam.phi[m as usize].eval(x)
            }
        };
        let ln_r = ctx.real(r_outer).ln();
        for p in 0..points {
            // log-spaced |x| in [1/R, R], alternating signs
            let frac = ctx.real(2 * p as u32 + 1) / ctx.real(2 * points as u32);
            let lx = (frac * 2u32 - 1u32) * &ln_r;
            let mut x = lx.exp();
            if p % 2 == 1 {
                x = -x;
            }
            let nn = n as i64;
            let checks: [(Float, Vec<(Float, i64)>); 4] = [
                // z phi_(2n+1) = b phi_2n + a phi_(2n+1) + b' phi_(2n+2)
                (
                    x.clone() * phi(2 * nn + 1, &x),
                    vec![
                        (self.b[2 * n + 1].clone(), 2 * nn),
                        (self.a[2 * n + 1].clone(), 2 * nn + 1),
                        (self.b[2 * n + 2].clone(), 2 * nn + 2),
                    ],
                ),
                // z phi_2n = c phi_(2n-2) + b phi_(2n-1) + a phi_2n + b phi_(2n+1) + c phi_(2n+2)
                (
                    x.clone() * phi(2 * nn, &x),
                    vec![
                        (self.c[2 * n].clone(), 2 * nn - 2),
                        (self.b[2 * n].clone(), 2 * nn - 1),
                        (self.a[2 * n].clone(), 2 * nn),
                        (self.b[2 * n + 1].clone(), 2 * nn + 1),
                        (self.c[2 * n + 2].clone(), 2 * nn + 2),
                    ],
                ),
                // z^-1 phi_2n = beta phi_(2n-1) + alpha phi_2n + beta phi_(2n+1)
                (
                    phi(2 * nn, &x) / &x,
                    vec![
                        (self.beta[2 * n].clone(), 2 * nn - 1),
                        (self.alpha[2 * n].clone(), 2 * nn),
                        (self.beta[2 * n + 1].clone(), 2 * nn + 1),
                    ],
                ),
                // z^-1 phi_(2n+1) = gamma phi_(2n-1) + beta phi_2n + alpha phi_(2n+1)
                //                  + beta phi_(2n+2) + gamma phi_(2n+3)
                (
                    phi(2 * nn + 1, &x) / &x,
                    vec![
                        (self.gamma[2 * n + 1].clone(), 2 * nn - 1),
                        (self.beta[2 * n + 1].clone(), 2 * nn),
                        (self.alpha[2 * n + 1].clone(), 2 * nn + 1),
                        (self.beta[2 * n + 2].clone(), 2 * nn + 2),
                        (self.gamma[2 * n + 3].clone(), 2 * nn + 3),
                    ],
                ),
            ];
            for (lhs, rhs_terms) in checks {
                let mut rhs = ctx.zero();
                let mut scale = lhs.clone().abs();
                for (coef, m) in rhs_terms {
                    let term = coef * phi(m, &x);
                    let t_abs = term.clone().abs();
                    if t_abs > scale {
                        scale = t_abs;
                    }
                    rhs += term;
                }
                if scale.is_zero() {
                    continue;
                }
                let res = Float::with_val(ctx.work_bits, &lhs - &rhs).abs() / scale;
                if res > worst {
                    worst = res;
                }
            }
        }
        Ok(worst)
    }
}

/// Expansion coefficients of the even/odd Riemann-Hilbert solutions around
/// infinity and the origin, computed as weighted moments of the monic OLPs;
/// `(1,2)` entries carry the `1/(2 pi i)` factor, `(1,1)` entries are the
/// plain coefficient ratios.
#[derive(Debug, Clone)]
pub struct YExpansionCoeffs {
    pub n: usize,
    pub y_e_inf_1_12: Complex,
    pub y_e_inf_2_12: Complex,
    pub y_e_0_0_12: Complex,
    pub y_e_0_1_12: Complex,
    pub y_o_0_1_12: Complex,
    pub y_o_0_2_12: Complex,
    pub y_o_inf_0_12: Complex,
    pub y_o_inf_1_12: Complex,
    pub y_e_inf_1_11: Float,
    pub y_e_inf_2_11: Float,
    pub y_e_0_0_11: Float,
    pub y_e_0_1_11: Float,
    pub y_e_0_2_11: Float,
    pub y_o_inf_0_11: Float,
    pub y_o_inf_1_11: Float,
    pub y_o_inf_2_11: Float,
    pub y_o_0_1_11: Float,
    pub y_o_0_2_11: Float,
}

/// Build the Y-expansion coefficients at index n from moments.
pub fn y_expansion_from_integrals(
    fam: &OlpFamily,
    table: &MomentTable,
    n: usize,
    ctx: &PrecisionCtx,
) -> Result<YExpansionCoeffs> {
    let nn = n as i64;
    let two_pi_i = ctx.two_pi_i();
    let over = |v: Float| -> Complex { ctx.creal(&v) / &two_pi_i };
    let pi_e = &fam.pi[2 * n];
    let pi_o = &fam.pi[2 * n + 1];
    let xi_e = fam.xi_leading(2 * n);
    let xi_o = fam.xi_leading(2 * n + 1);
    Ok(YExpansionCoeffs {
        n,
        // z^n Y^e_12 ~ sum z^-k <pi_2n, z^(n+k-1)> / (-2 pi i)
        y_e_inf_1_12: -over(pi_e.inner_monomial(nn, table)?),
        y_e_inf_2_12: -over(pi_e.inner_monomial(nn + 1, table)?),
        // z^-n Y^e_12 ~ sum z^k <pi_2n, z^(-n-k-1)> / (2 pi i)
        y_e_0_0_12: over(pi_e.inner_monomial(-nn - 1, table)?),
        y_e_0_1_12: over(pi_e.inner_monomial(-nn - 2, table)?),
        // odd family
        y_o_0_1_12: over(pi_o.inner_monomial(-nn - 1, table)?),
        y_o_0_2_12: over(pi_o.inner_monomial(-nn - 2, table)?),
        y_o_inf_0_12: -over(pi_o.inner_monomial(nn + 1, table)?),
        y_o_inf_1_12: -over(pi_o.inner_monomial(nn + 2, table)?),
        // (1,1) entries read off the monic coefficient tables
        y_e_inf_1_11: fam.xi(2 * n, nn - 1) / &xi_e,
        y_e_inf_2_11: fam.xi(2 * n, nn - 2) / &xi_e,
        y_e_0_0_11: fam.nu_trailing(2 * n),
        y_e_0_1_11: fam.xi(2 * n, -nn + 1) / &xi_e,
        y_e_0_2_11: fam.xi(2 * n, -nn + 2) / &xi_e,
        y_o_inf_0_11: fam.nu_trailing(2 * n + 1),
        y_o_inf_1_11: fam.xi(2 * n + 1, nn - 1) / &xi_o,
        y_o_inf_2_11: fam.xi(2 * n + 1, nn - 2) / &xi_o,
        y_o_0_1_11: fam.xi(2 * n + 1, -nn) / &xi_o,
        y_o_0_2_11: fam.xi(2 * n + 1, -nn + 1) / &xi_o,
    })
}

/// Both sides of the finite-n identity suite at index n: the norming-constant
/// and coefficient identities linking the recurrence set to the Y-expansion
/// coefficients, plus the parity-bridging identity. Labels are stable for
/// reports.
pub fn finite_n_identities(
    fam: &OlpFamily,
    table: &MomentTable,
    rec: &RecurrenceSet,
    n: usize,
    ctx: &PrecisionCtx,
) -> Result<Vec<(String, Complex, Complex)>> {
    let y = y_expansion_from_integrals(fam, table, n, ctx)?;
    let two_pi_i = ctx.two_pi_i();
    let nn = n;
    let re = |v: Float| ctx.creal(&v);
    let xi = |m: usize, k: i64| fam.xi(m, k);
    let xi_e = xi(2 * nn, nn as i64);
    let xi_o = xi(2 * nn + 1, -(nn as i64) - 1);
    let nu_e = fam.nu_trailing(2 * nn);
    let nu_o = fam.nu_trailing(2 * nn + 1);
    let mut out: Vec<(String, Complex, Complex)> = Vec::new();
    // xi^(2n)_n^(-2) = -2 pi i (Y^e,inf_1)_12
    out.push((
        format!("norm-even n={n}"),
        re(xi_e.clone().square().recip()),
        -(two_pi_i.clone() * &y.y_e_inf_1_12),
    ));
    // beta_2n / (xi^(2n)_n xi^(2n-1)_(-n)) = 2 pi i (Y^e,0_0)_12
    if n >= 1 {
        out.push((
            format!("beta-even-origin n={n}"),
            re(rec.beta[2 * nn].clone() / (xi_e.clone() * xi(2 * nn - 1, -(nn as i64)))),
            two_pi_i.clone() * &y.y_e_0_0_12,
        ));
    }
    // xi^(2n+1)_(-n-1)^(-2) = 2 pi i (Y^o,0_1)_12
    out.push((
        format!("norm-odd n={n}"),
        re(xi_o.clone().square().recip()),
        two_pi_i.clone() * &y.y_o_0_1_12,
    ));
    // b_(2n+1)/(xi^(2n+1)_(-n-1) xi^(2n)_n) = -2 pi i (Y^o,inf_0)_12
    out.push((
        format!("b-odd-inf n={n}"),
        re(rec.b[2 * nn + 1].clone() / (xi_o.clone() * &xi_e)),
        -(two_pi_i.clone() * &y.y_o_inf_0_12),
    ));
    if n >= 1 {
        // -2 pi i (Y^e,inf_2)_12 = a_2n/xi^2 - (1/xi)(b_2n nu_e/xi^(2n-1)_(-n)
        //   + c_2n/xi^(2n-2)_(n-1) (xi^(2n)_(n-1)/xi - nu_e xi^(2n-1)_(n-1)/xi^(2n-1)_(-n)))
        let term = rec.a[2 * nn].clone() / xi_e.clone().square()
            - (rec.b[2 * nn].clone() * &nu_e / xi(2 * nn - 1, -(nn as i64))
                + rec.c[2 * nn].clone() / xi(2 * nn - 2, nn as i64 - 1)
                    * (xi(2 * nn, nn as i64 - 1) / &xi_e
                        - nu_e.clone() * xi(2 * nn - 1, nn as i64 - 1)
                            / xi(2 * nn - 1, -(nn as i64))))
                / &xi_e;
        out.push((
            format!("a-even-second n={n}"),
            re(term),
            -(two_pi_i.clone() * &y.y_e_inf_2_12),
        ));
        // 2 pi i (Y^e,0_1)_12 = (1/xi_e)(beta_(2n+1)/xi_o - alpha_2n nu_o/xi_e
        //   + beta_2n/xi^(2n-1)_(-n) (nu_o nu_e - xi^(2n+1)_(-n)/xi_o))
        let term = (rec.beta[2 * nn + 1].clone() / &xi_o
            - rec.alpha[2 * nn].clone() * &nu_o / &xi_e
            + rec.beta[2 * nn].clone() / xi(2 * nn - 1, -(nn as i64))
                * (nu_o.clone() * &nu_e - xi(2 * nn + 1, -(nn as i64)) / &xi_o))
            / &xi_e;
        out.push((
            format!("beta-even-second n={n}"),
            re(term),
            two_pi_i.clone() * &y.y_e_0_1_12,
        ));
        // 2 pi i (Y^o,0_2)_12 = alpha_(2n+1)/xi_o^2 - (1/xi_o)(beta_(2n+1) nu_o/xi_e
        //   + gamma_(2n+1)/xi^(2n-1)_(-n) (xi^(2n+1)_(-n)/xi_o - nu_o nu_e))
        let term = rec.alpha[2 * nn + 1].clone() / xi_o.clone().square()
            - (rec.beta[2 * nn + 1].clone() * &nu_o / &xi_e
                + rec.gamma[2 * nn + 1].clone() / xi(2 * nn - 1, -(nn as i64))
                    * (xi(2 * nn + 1, -(nn as i64)) / &xi_o - nu_o.clone() * &nu_e))
                / &xi_o;
        out.push((
            format!("alpha-odd-second n={n}"),
            re(term),
            two_pi_i.clone() * &y.y_o_0_2_12,
        ));
    }
    // -2 pi i (Y^o,inf_1)_12 = (1/xi_o)(b_(2n+2)/xi^(2n+2)_(n+1)
    //   - a_(2n+1)/xi_o xi^(2n+2)_(-(n+1))/xi^(2n+2)_(n+1)
    //   + b_(2n+1)/xi_e (nu_o xi^(2n+2)_(-(n+1))/xi^(2n+2)_(n+1) - xi^(2n+2)_n/xi^(2n+2)_(n+1)))
    let xi_e_up = xi(2 * nn + 2, nn as i64 + 1);
    let term = (rec.b[2 * nn + 2].clone() / &xi_e_up
        - rec.a[2 * nn + 1].clone() / &xi_o * xi(2 * nn + 2, -(nn as i64) - 1) / &xi_e_up
        + rec.b[2 * nn + 1].clone() / &xi_e
            * (nu_o.clone() * xi(2 * nn + 2, -(nn as i64) - 1) / &xi_e_up
                - xi(2 * nn + 2, nn as i64) / &xi_e_up))
        / &xi_o;
    out.push((
        format!("b-odd-second n={n}"),
        re(term),
        -(two_pi_i.clone() * &y.y_o_inf_1_12),
    ));
    // interlocking closures tested against inner products
    if n >= 1 {
        let z_phi = |m: usize, j: i64| -> Result<Float> {
            // <z phi_m, phi_m'> realized as sum over coefficient table
            let mut shifted = fam.phi[m].clone();
            shifted.min_deg += j;
            shifted.inner(&fam.phi[m], table)
        };
        let a2n_ip = z_phi(2 * nn, 1)?;
        out.push((
            format!("a-even-closure n={n}"),
            re(a2n_ip),
            re(rec.a[2 * nn].clone()),
        ));
        let alpha_odd_ip = z_phi(2 * nn + 1, -1)?;
        out.push((
            format!("alpha-odd-closure n={n}"),
            re(alpha_odd_ip),
            re(rec.alpha[2 * nn + 1].clone()),
        ));
    }
    // ratio identities for the essential building blocks
    let h_up_nu_e = fam.nu_trailing(2 * nn + 2);
    out.push((
        format!("a-odd-ratio n={n}"),
        re(rec.a[2 * nn + 1].clone()),
        -(ctx.creal(&nu_o) * (y.y_o_inf_0_12.clone() / &y.y_o_0_1_12)),
    ));
    out.push((
        format!("b-odd-product n={n}"),
        re(rec.b[2 * nn + 1].clone()),
        -(two_pi_i.clone() * xi_e.clone() * &xi_o * &y.y_o_inf_0_12),
    ));
    // b_(2n+2) = nu_o sqrt(-2 pi i h+[Y^e,inf_1] / (2 pi i Y^o,0_1)); both
    // arguments are positive reals after the 2 pi i normalization.
    let y_up = y_expansion_from_integrals(fam, table, n + 1, ctx);
    if let Ok(y_up) = y_up {
        let num = -(two_pi_i.clone() * &y_up.y_e_inf_1_12);
        let den = two_pi_i.clone() * &y.y_o_0_1_12;
        let ratio = (num / den).sqrt();
        out.push((
            format!("b-even-up n={n}"),
            re(rec.b[2 * nn + 2].clone()),
            ctx.creal(&nu_o) * &ratio,
        ));
        out.push((
            format!("c-even-up n={n}"),
            re(rec.c[2 * nn + 2].clone()),
            {
                let num = -(two_pi_i.clone() * &y_up.y_e_inf_1_12);
                let den = -(two_pi_i.clone() * &y.y_e_inf_1_12);
                (num / den).sqrt()
            },
        ));
        // beta_(2n+2) = -h+[nu_o] sqrt(same even/odd ratio)
        let num = -(two_pi_i.clone() * &y_up.y_e_inf_1_12);
        let den = two_pi_i.clone() * &y.y_o_0_1_12;
        let ratio = (num / den).sqrt();
        out.push((
            format!("beta-even-up n={n}"),
            re(rec.beta[2 * nn + 2].clone()),
            -(ctx.creal(&fam.nu_trailing(2 * nn + 3)) * &ratio),
        ));
        // gamma_(2n+3) = sqrt(2 pi i h+[Y^o,0_1] / 2 pi i Y^o,0_1)
        let num = two_pi_i.clone() * &y_up.y_o_0_1_12;
        let den = two_pi_i.clone() * &y.y_o_0_1_12;
        out.push((
            format!("gamma-odd-up n={n}"),
            re(rec.gamma[2 * nn + 3].clone()),
            (num / den).sqrt(),
        ));
        // parity bridge: h+[nu^(2n)_(-n)] = (Y^o,inf_0)_12 / (Y^o,0_1)_12
        out.push((
            format!("parity-bridge n={n}"),
            re(h_up_nu_e.clone()),
            y.y_o_inf_0_12.clone() / &y.y_o_0_1_12,
        ));
    }
    // alpha_2n = -nu_e nu_o
    out.push((
        format!("alpha-even-product n={n}"),
        re(rec.alpha[2 * nn].clone()),
        re(-(nu_e.clone() * &nu_o)),
    ));
    // beta_(2n+1) = nu_e xi_e/xi_o
    out.push((
        format!("beta-odd-ratio n={n}"),
        re(rec.beta[2 * nn + 1].clone()),
        re(nu_e.clone() * &xi_e / &xi_o),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::MomentTable;
    use crate::numerics::{rel_err, rel_err_c};
    use crate::olp::needed_moment_range;
    use crate::potential::{fields, ScaledField};

    fn setup(n_max: usize, bits: u32, even_field: bool) -> (OlpFamily, MomentTable, PrecisionCtx) {
        let ctx = PrecisionCtx::new(bits).unwrap();
        let pot = if even_field {
            fields::f2(&ctx)
        } else {
            fields::f1(&ctx)
        };
        let field = ScaledField::new(pot, 3, 3);
        let m_max = 2 * n_max + 3;
        let (lo, hi) = needed_moment_range(m_max);
        let table = MomentTable::build(field, lo, hi, &ctx).unwrap();
        let fam = OlpFamily::build_gram_schmidt(&table, m_max, &ctx).unwrap();
        (fam, table, ctx)
    }

    #[test]
    fn signs_and_boundary_values() {
        let (fam, t, ctx) = setup(3, 512, false);
        let rec = RecurrenceSet::extract(&fam, &t, 3, &ctx).unwrap();
        assert!(rec.c[0].is_zero() && rec.b[0].is_zero());
        assert!(rec.beta[0].is_zero() && rec.gamma[1].is_zero());
        assert!(rec.beta[1] > 0u32, "beta_1 = {}", rec.beta[1]);
        for k in 1..=4usize {
            assert!(rec.c[2 * k] > 0u32, "c_2k must be positive");
        }
        for l in 1..=3usize {
            assert!(rec.gamma[2 * l + 1] > 0u32, "gamma_(2l+1) must be positive");
        }
    }

    #[test]
    fn recurrence_residuals_small() {
        let (fam, t, ctx) = setup(2, 512, false);
        let rec = RecurrenceSet::extract(&fam, &t, 2, &ctx).unwrap();
        let worst = rec.residual_on_grid(&fam, 1, 8.0, 64, &ctx).unwrap();
        assert!(worst < ctx.eps_pow(4), "worst residual {worst}");
    }

    #[test]
    fn jacobi_matrices_symmetric_and_inverse_on_interior() {
        let (fam, t, ctx) = setup(4, 512, false);
        let rec = RecurrenceSet::extract(&fam, &t, 4, &ctx).unwrap();
        let k = 9usize;
        let (f, g) = rec.assemble_jacobi(k, &ctx);
        for i in 0..k {
            for j in 0..k {
                assert_eq!(f.at(i, j), f.at(j, i));
                assert_eq!(g.at(i, j), g.at(j, i));
            }
        }
        let prod = f.mul(&g);
        for i in 0..k - 3 {
            for j in 0..k - 3 {
                let target = if i == j { ctx.one() } else { ctx.zero() };
                let diff = Float::with_val(ctx.work_bits, prod.at(i, j) - &target).abs();
                assert!(diff < ctx.eps_pow(4), "FG[{i}][{j}] = {}", prod.at(i, j));
            }
        }
    }

    #[test]
    fn one_by_one_truncation() {
        let (fam, t, ctx) = setup(1, 320, false);
        let rec = RecurrenceSet::extract(&fam, &t, 1, &ctx).unwrap();
        let (f, g) = rec.assemble_jacobi(1, &ctx);
        // a_0 alpha_0 = 1 - b_1 beta_1 per the interlocking relation
        let prod = f.at(0, 0).clone() * g.at(0, 0);
        let expect = ctx.one() - rec.b[1].clone() * &rec.beta[1];
        let err = rel_err(&prod, &expect, &ctx.one());
        assert!(err < ctx.eps_pow(3), "prod={prod} expect={expect}");
    }

    #[test]
    fn finite_n_identity_suite_f1() {
        let (fam, t, ctx) = setup(3, 512, false);
        let rec = RecurrenceSet::extract(&fam, &t, 3, &ctx).unwrap();
        for n in 1..=2usize {
            let ids = finite_n_identities(&fam, &t, &rec, n, &ctx).unwrap();
            let mut floor = ctx.zero();
            for (_, l, r) in &ids {
                let m = crate::numerics::cabs(l).max(&crate::numerics::cabs(r));
                if m > floor {
                    floor = m;
                }
            }
            floor *= ctx.eps_pow(4);
            for (label, lhs, rhs) in &ids {
                let err = rel_err_c(lhs, rhs, &floor);
                assert!(err < ctx.eps_pow(4), "{label}: lhs={lhs} rhs={rhs} err={err}");
            }
        }
    }

    #[test]
    fn finite_n_identity_suite_f2_with_singular_indices() {
        let (fam, t, ctx) = setup(2, 512, true);
        let rec = RecurrenceSet::extract(&fam, &t, 2, &ctx).unwrap();
        let ids = finite_n_identities(&fam, &t, &rec, 1, &ctx).unwrap();
        let mut floor = ctx.zero();
        for (_, l, r) in &ids {
            let m = crate::numerics::cabs(l).max(&crate::numerics::cabs(r));
            if m > floor {
                floor = m;
            }
        }
        floor *= ctx.eps_pow(4);
        for (label, lhs, rhs) in &ids {
            let err = rel_err_c(lhs, rhs, &floor);
            assert!(err < ctx.eps_pow(4), "{label}: lhs={lhs} rhs={rhs} err={err}");
        }
    }
}
