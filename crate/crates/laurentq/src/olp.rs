//! Orthonormal and monic orthogonal Laurent polynomials over the cyclic base
//! `{1, z^-1, z, z^-2, z^2, ...}`, their coefficient tables, and the
//! root-product / singularity classification.
//!
//! Gram-Schmidt over exact moment inner products (`<z^i, z^j> = c_(i+j)`) is
//! the primary constructor; the bordered-determinant representation is kept
//! as an independent verification path since it needs a k x k determinant per
//! coefficient.

use crate::error::{LqError, Result};
use crate::moments::MomentTable;
use crate::numerics::{roots::real_poly_roots, DenseMatrix, PrecisionCtx};
use rug::Float;

/// Real Laurent polynomial on powers `min_deg ..= min_deg + coeffs.len() - 1`.
#[derive(Debug, Clone)]
pub struct LaurentPoly {
    pub min_deg: i64,
    pub coeffs: Vec<Float>,
}

impl LaurentPoly {
    pub fn max_deg(&self) -> i64 {
        self.min_deg + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> Option<&Float> {
        if k < self.min_deg || k > self.max_deg() {
            None
        } else {
            Some(&self.coeffs[(k - self.min_deg) as usize])
        }
    }

    /// Evaluate at a nonzero real point.
    pub fn eval(&self, x: &Float) -> Float {
        let prec = x.prec();
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        let mut p = Float::with_val(prec, 1);
        let e = self.min_deg;
        if e >= 0 {
            for _ in 0..e {
                p *= x;
            }
        } else {
            let u = x.clone().recip();
            for _ in 0..(-e) {
                p *= &u;
            }
        }
        acc * p
    }

    /// Moment-exact inner product with another Laurent polynomial.
    pub fn inner(&self, other: &LaurentPoly, table: &MomentTable) -> Result<Float> {
        let prec = self.coeffs[0].prec();
        let mut acc = Float::new(prec);
        for (ia, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let pa = self.min_deg + ia as i64;
            for (ib, b) in other.coeffs.iter().enumerate() {
                let pb = other.min_deg + ib as i64;
                let c = table.get(pa + pb)?;
                acc += Float::with_val(prec, a * b) * c;
            }
        }
        Ok(acc)
    }

    /// Inner product with a monomial `z^j`.
    pub fn inner_monomial(&self, j: i64, table: &MomentTable) -> Result<Float> {
        let prec = self.coeffs[0].prec();
        let mut acc = Float::new(prec);
        for (ia, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let pa = self.min_deg + ia as i64;
            acc += Float::with_val(prec, a * table.get(pa + j)?);
        }
        Ok(acc)
    }

    fn axpy(&mut self, alpha: &Float, other: &LaurentPoly) {
        for (ib, b) in other.coeffs.iter().enumerate() {
            let p = other.min_deg + ib as i64;
            let idx = (p - self.min_deg) as usize;
            let t = Float::with_val(alpha.prec(), alpha * b);
            self.coeffs[idx] += t;
        }
    }
}

/// Base power of the m-th element of `{1, z^-1, z, z^-2, z^2, ...}`.
pub fn base_power(m: usize) -> i64 {
    if m % 2 == 0 {
        (m / 2) as i64
    } else {
        -((m as i64 + 1) / 2)
    }
}

/// Leading power per the L-degree convention.
pub fn leading_power(m: usize) -> i64 {
    base_power(m)
}

/// Trailing power per the L-degree convention.
pub fn trailing_power(m: usize) -> i64 {
    if m % 2 == 0 {
        -((m / 2) as i64)
    } else {
        (m as i64 - 1) / 2
    }
}

/// The OLP family through L-degree `m_max`: monic `pi`, orthonormal `phi`,
/// and the norms linking them.
#[derive(Debug)]
pub struct OlpFamily {
    pub m_max: usize,
    pub pi: Vec<LaurentPoly>,
    pub phi: Vec<LaurentPoly>,
    /// `norm[m] = ||pi_m||`, so `xi_leading(m) = 1/norm[m]`.
    pub norms: Vec<Float>,
}

/// Two-sided record from the norming-constant identities: each entry is
/// (label, from-family, from-Hankel).
#[derive(Debug)]
pub struct RatioRecord {
    pub entries: Vec<(String, Float, Float)>,
}

/// Classification and root data for one monic OLP.
#[derive(Debug)]
pub struct RootProductRecord {
    pub m: usize,
    pub singular: bool,
    pub tc: Float,
    pub roots: Vec<Float>,
    /// Product of located roots.
    pub root_product: Float,
    /// The coefficient-ratio value the product must match: trailing-ratio
    /// based for the non-singular cases, next-coefficient based when
    /// singular.
    pub expected_product: Float,
}

impl OlpFamily {
    /// Gram-Schmidt over the ordered base with a re-orthogonalization pass;
    /// the result at each degree is monic by construction, so the
    /// orthonormal element is `pi_m / ||pi_m||` with positive leading
    /// coefficient.
    pub fn build_gram_schmidt(
        table: &MomentTable,
        m_max: usize,
        ctx: &PrecisionCtx,
    ) -> Result<Self> {
        let mut pi: Vec<LaurentPoly> = Vec::with_capacity(m_max + 1);
        let mut phi: Vec<LaurentPoly> = Vec::with_capacity(m_max + 1);
        let mut norms: Vec<Float> = Vec::with_capacity(m_max + 1);
        for m in 0..=m_max {
            let lo = -(((m + 1) / 2) as i64);
            let hi = (m / 2) as i64;
            let len = (hi - lo + 1) as usize;
            let mut v = LaurentPoly {
                min_deg: lo,
                coeffs: vec![ctx.zero(); len],
            };
            let bp = base_power(m);
            v.coeffs[(bp - lo) as usize] = ctx.one();
            // two projection sweeps (classical "twice is enough")
            for _pass in 0..2 {
                for k in 0..m {
                    let proj = v.inner(&phi[k], table)?;
                    let neg = -proj;
                    v.axpy(&neg, &phi[k]);
                }
            }
            let norm2 = v.inner(&v, table)?;
            if !(norm2.is_sign_positive() && !norm2.is_zero()) {
                return Err(LqError::PrecisionLoss(format!(
                    "nonpositive norm^2 at degree {m}: {norm2}"
                )));
            }
            let norm = norm2.sqrt();
            let inv = norm.clone().recip();
            let mut unit = v.clone();
            for c in unit.coeffs.iter_mut() {
                *c *= &inv;
            }
            pi.push(v);
            phi.push(unit);
            norms.push(norm);
        }
        Ok(OlpFamily {
            m_max,
            pi,
            phi,
            norms,
        })
    }

    /// Orthonormal coefficient `xi^(m)_k`.
    pub fn xi(&self, m: usize, k: i64) -> Float {
        let prec = self.norms[m].prec();
        self.phi[m]
            .coeff(k)
            .cloned()
            .unwrap_or_else(|| Float::new(prec))
    }

    /// Leading coefficient `xi^(2n)_n` or `xi^(2n+1)_(-n-1)`.
    pub fn xi_leading(&self, m: usize) -> Float {
        self.xi(m, leading_power(m))
    }

    /// Monic trailing coefficient: `nu^(2n)_(-n)` (m even) or `nu^(2n+1)_n`
    /// (m odd).
    pub fn nu_trailing(&self, m: usize) -> Float {
        self.nu(m, trailing_power(m))
    }

    /// Monic coefficient at an arbitrary power.
    pub fn nu(&self, m: usize, k: i64) -> Float {
        let prec = self.norms[m].prec();
        self.pi[m]
            .coeff(k)
            .cloned()
            .unwrap_or_else(|| Float::new(prec))
    }

    /// Both sides of the norming-constant identities at index n.
    pub fn xi_ratios(
        &self,
        table: &MomentTable,
        n: usize,
        ctx: &PrecisionCtx,
    ) -> Result<RatioRecord> {
        let mut entries = Vec::new();
        let h_2n = table.hankel(-2 * n as i64, 2 * n, ctx)?;
        let h_2np1 = table.hankel(-2 * n as i64, 2 * n + 1, ctx)?;
        let h_2np2 = table.hankel(-2 * n as i64 - 2, 2 * n + 2, ctx)?;
        let h_up = table.hankel(-2 * n as i64 + 1, 2 * n, ctx)?;
        let h_dn = table.hankel(-2 * n as i64 - 1, 2 * n + 1, ctx)?;
        entries.push((
            format!("xi^(2n)_n, n={n}"),
            self.xi_leading(2 * n),
            (h_2n.clone() / &h_2np1).sqrt(),
        ));
        entries.push((
            format!("xi^(2n+1)_(-n-1), n={n}"),
            self.xi_leading(2 * n + 1),
            (h_2np1.clone() / &h_2np2).sqrt(),
        ));
        entries.push((
            format!("nu^(2n)_(-n), n={n}"),
            self.nu_trailing(2 * n),
            h_up / &h_2n,
        ));
        entries.push((
            format!("nu^(2n+1)_n, n={n}"),
            self.nu_trailing(2 * n + 1),
            -(h_dn / &h_2np1),
        ));
        Ok(RatioRecord { entries })
    }

    /// Classify `pi_m` and compare its located root product with the
    /// coefficient-ratio prediction.
    pub fn classify_and_root_products(
        &self,
        m: usize,
        ctx: &PrecisionCtx,
    ) -> Result<RootProductRecord> {
        let p = &self.pi[m];
        let tc = self.nu_trailing(m);
        let mut max_c = ctx.zero();
        for c in &p.coeffs {
            let a = c.clone().abs();
            if a > max_c {
                max_c = a;
            }
        }
        let singular = tc.clone().abs() <= ctx.eps_pow(2) * &max_c;
        // roots of z^n pi_2n or z^(n+1) pi_2n+1: the shifted coefficient
        // vector is already plain-polynomial; vanishing low coefficients in
        // the singular case would fake a root at 0, so deflate them
        let thresh = ctx.eps_pow(2) * &max_c;
        let mut coeffs = p.coeffs.clone();
        let mut start = 0usize;
        while start < coeffs.len() && coeffs[start].clone().abs() <= thresh {
            start += 1;
        }
        let coeffs: Vec<Float> = coeffs.drain(start..).collect();
        let roots = real_poly_roots(&coeffs, ctx)?;
        let expected_count = if singular { m - 1 } else { m };
        if roots.len() != expected_count {
            return Err(LqError::RootCountMismatch {
                expected: expected_count,
                found: roots.len(),
            });
        }
        let mut root_product = ctx.one();
        for r in &roots {
            root_product *= r;
        }
        let n = m / 2;
        let expected_product = if m % 2 == 0 {
            if !singular {
                self.nu_trailing(m)
            } else {
                -self.nu(m, -(n as i64) + 1)
            }
        } else if !singular {
            let nu = self.nu_trailing(m);
            -(nu.recip())
        } else {
            let nu = self.nu(m, n as i64 - 1);
            nu.recip()
        };
        Ok(RootProductRecord {
            m,
            singular,
            tc,
            roots,
            root_product,
            expected_product,
        })
    }
}

/// Monic OLP by the bordered-determinant representation: each coefficient is
/// a signed minor over the Hankel block divided by the normalizing Hankel
/// determinant. Verification path only (O(m) determinants of size ~2m).
pub fn build_monic_determinantal(
    table: &MomentTable,
    m: usize,
    ctx: &PrecisionCtx,
) -> Result<LaurentPoly> {
    let half = m / 2;
    let mm = half as i64;
    if m % 2 == 0 {
        let size = 2 * half + 1;
        let h = table.hankel(-2 * mm, 2 * half, ctx)?;
        if h.is_zero() {
            return Err(LqError::SingularHankel {
                m: -2 * mm,
                k: 2 * half,
            });
        }
        let mut coeffs = Vec::with_capacity(size);
        for i in 1..=size {
            let minor = DenseMatrix::from_fn(size - 1, size - 1, |r, c| {
                let row = if r + 1 >= i { r + 1 } else { r };
                table
                    .get(-2 * mm + row as i64 + c as i64)
                    .expect("moment range")
                    .clone()
            });
            let det = minor.determinant();
            let signed = if (i + size) % 2 == 0 { det } else { -det };
            coeffs.push(signed / &h);
        }
        Ok(LaurentPoly {
            min_deg: -mm,
            coeffs,
        })
    } else {
        let size = 2 * half + 2;
        let h = table.hankel(-2 * mm, 2 * half + 1, ctx)?;
        if h.is_zero() {
            return Err(LqError::SingularHankel {
                m: -2 * mm,
                k: 2 * half + 1,
            });
        }
        let mut coeffs = Vec::with_capacity(size);
        for i in 1..=size {
            let minor = DenseMatrix::from_fn(size - 1, size - 1, |r, c| {
                let row = if r + 1 >= i { r + 1 } else { r };
                table
                    .get(-2 * mm - 1 + row as i64 + c as i64)
                    .expect("moment range")
                    .clone()
            });
            let det = minor.determinant();
            let signed = if (i + size) % 2 == 0 { det } else { -det };
            coeffs.push(-(signed / &h));
        }
        Ok(LaurentPoly {
            min_deg: -mm - 1,
            coeffs,
        })
    }
}

/// Moment range that safely covers family construction to `m_max` plus the
/// Hankel/ratio/Y-expansion consumers.
pub fn needed_moment_range(m_max: usize) -> (i64, i64) {
    let r = m_max as i64 + 6;
    (-r, r)
}

/// Left/right sides of the product identities linking Hankel determinants to
/// norming constants at index n (the (1.14)-(1.19)-style suite).
pub fn hankel_identities(
    fam: &OlpFamily,
    table: &MomentTable,
    n: usize,
    ctx: &PrecisionCtx,
) -> Result<Vec<(String, Float, Float)>> {
    let mut p_xi = ctx.one();
    for j in 0..=n {
        p_xi *= fam.xi_leading(2 * j).square();
        p_xi *= fam.xi_leading(2 * j + 1).square();
    }
    let xi_e = fam.xi_leading(2 * n);
    let xi_o = fam.xi_leading(2 * n + 1);
    let nu_e = fam.nu_trailing(2 * n);
    let nu_o = fam.nu_trailing(2 * n + 1);
    let h_2n = table.hankel(-2 * n as i64, 2 * n, ctx)?;
    let h_2np1 = table.hankel(-2 * n as i64, 2 * n + 1, ctx)?;
    let h_up = table.hankel(-2 * n as i64 + 1, 2 * n, ctx)?;
    let h_dn = table.hankel(-2 * n as i64 - 1, 2 * n + 1, ctx)?;
    let h_2np2 = table.hankel(-2 * n as i64 - 2, 2 * n + 2, ctx)?;
    let h_2np3 = table.hankel(-2 * n as i64 - 2, 2 * n + 3, ctx)?;
    let mut out = Vec::new();
    out.push((
        format!("H^(-2n)_2n vs xi products, n={n}"),
        h_2n.clone(),
        xi_e.clone().square() * xi_o.clone().square() / &p_xi,
    ));
    out.push((
        format!("H^(-2n)_(2n+1) vs xi products, n={n}"),
        h_2np1.clone(),
        xi_o.clone().square() / &p_xi,
    ));
    out.push((
        format!("H^(-2n+1)_2n vs nu xi products, n={n}"),
        h_up,
        nu_e * xi_e.clone().square() * xi_o.clone().square() / &p_xi,
    ));
    out.push((
        format!("H^(-2n-1)_(2n+1) vs nu xi products, n={n}"),
        h_dn,
        -(nu_o * xi_o.clone().square() / &p_xi),
    ));
    out.push((
        format!("H-ratio even, n={n}"),
        h_2np2.clone() / &h_2n,
        (xi_e.clone().square() * xi_o.clone().square()).recip(),
    ));
    if fam.m_max >= 2 * n + 2 {
        let xi_e_up = fam.xi_leading(2 * n + 2);
        out.push((
            format!("H-ratio odd, n={n}"),
            h_2np3 / &h_2np1,
            (xi_e_up.square() * xi_o.clone().square()).recip(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::MomentTable;
    use crate::numerics::rel_err;
    use crate::potential::{fields, ScaledField};

    fn setup(n: u64, m_max: usize, bits: u32) -> (OlpFamily, MomentTable, PrecisionCtx) {
        let ctx = PrecisionCtx::new(bits).unwrap();
        let field = ScaledField::new(fields::f1(&ctx), n, n);
        let (lo, hi) = needed_moment_range(m_max);
        let table = MomentTable::build(field, lo, hi, &ctx).unwrap();
        let fam = OlpFamily::build_gram_schmidt(&table, m_max, &ctx).unwrap();
        (fam, table, ctx)
    }

    #[test]
    fn pi0_is_one() {
        let (fam, _t, ctx) = setup(2, 2, 256);
        assert_eq!(fam.pi[0].coeffs.len(), 1);
        let err = rel_err(&fam.pi[0].coeffs[0], &ctx.one(), &ctx.one());
        assert!(err < ctx.eps_pow(2));
    }

    #[test]
    fn orthonormality_small_family() {
        let (fam, t, ctx) = setup(3, 8, 320);
        for j in 0..=8usize {
            for k in 0..=j {
                let ip = fam.phi[j].inner(&fam.phi[k], &t).unwrap();
                let target = if j == k { ctx.one() } else { ctx.zero() };
                let diff = Float::with_val(ctx.work_bits, &ip - &target).abs();
                assert!(diff < ctx.eps_pow(4), "<phi_{j}, phi_{k}> = {ip}");
            }
        }
    }

    #[test]
    fn pi1_constant_term_is_minus_first_inverse_moment_ratio() {
        // pi_1(z) = z^-1 + xi^(1)_0/xi^(1)_(-1); the ratio equals
        // -c_(-1)/c_0, the weight-normalized Lemma-style constant.
        let (fam, t, ctx) = setup(3, 2, 256);
        let ratio = fam.xi(1, 0) / fam.xi(1, -1);
        let expect = -(t.get(-1).unwrap().clone() / t.get(0).unwrap());
        let err = rel_err(&ratio, &expect, &ctx.one());
        assert!(err < ctx.eps_pow(3), "ratio={ratio} expect={expect}");
    }

    #[test]
    fn pi2_orthogonal_to_low_monomials() {
        let (fam, t, ctx) = setup(3, 4, 256);
        for j in [-1i64, 0] {
            let ip = fam.pi[2].inner_monomial(j, &t).unwrap();
            let scale = fam.norms[2].clone();
            assert!(
                ip.clone().abs() < ctx.eps_pow(4) * scale,
                "<pi_2, z^{j}> = {ip}"
            );
        }
    }

    #[test]
    fn determinantal_matches_gram_schmidt() {
        let (fam, t, ctx) = setup(2, 5, 512);
        for m in 0..=5usize {
            let det_poly = build_monic_determinantal(&t, m, &ctx).unwrap();
            let gs = &fam.pi[m];
            assert_eq!(det_poly.min_deg, gs.min_deg);
            let mut scale = ctx.zero();
            for c in &gs.coeffs {
                let a = c.clone().abs();
                if a > scale {
                    scale = a;
                }
            }
            for (k, c) in det_poly.coeffs.iter().enumerate() {
                let g = &gs.coeffs[k];
                let diff = Float::with_val(ctx.work_bits, c - g).abs();
                assert!(
                    diff < ctx.eps_pow(3) * scale.clone(),
                    "m={m} power={} det={c} gs={g}",
                    det_poly.min_deg + k as i64
                );
            }
        }
    }

    #[test]
    fn xi_ratio_record_sides_agree() {
        let (fam, t, ctx) = setup(3, 8, 512);
        for n in 0..=3usize {
            let rec = fam.xi_ratios(&t, n, &ctx).unwrap();
            for (label, lhs, rhs) in &rec.entries {
                let err = rel_err(lhs, rhs, &ctx.eps_pow(1));
                assert!(err < ctx.eps_pow(4), "{label}: lhs={lhs} rhs={rhs}");
            }
        }
    }

    #[test]
    fn root_products_match_coefficient_ratios() {
        let (fam, _t, ctx) = setup(2, 5, 320);
        let r0 = fam.classify_and_root_products(0, &ctx).unwrap();
        assert!(!r0.singular);
        assert!(rel_err(&r0.root_product, &ctx.one(), &ctx.one()) < ctx.eps_pow(2));
        for m in 1..=5usize {
            let r = fam.classify_and_root_products(m, &ctx).unwrap();
            assert!(!r.singular, "F1 indices should be non-singular");
            let err = rel_err(&r.root_product, &r.expected_product, &ctx.one());
            assert!(
                err < ctx.eps_pow(3),
                "m={m}: product={} expected={}",
                r.root_product,
                r.expected_product
            );
        }
    }

    #[test]
    fn even_weight_gives_singular_odd_indices() {
        let ctx = PrecisionCtx::new(320).unwrap();
        let field = ScaledField::new(fields::f2(&ctx), 3, 3);
        let (lo, hi) = needed_moment_range(5);
        let t = MomentTable::build(field, lo, hi, &ctx).unwrap();
        let fam = OlpFamily::build_gram_schmidt(&t, 5, &ctx).unwrap();
        let r3 = fam.classify_and_root_products(3, &ctx).unwrap();
        assert!(r3.singular, "odd indices of an even weight are singular");
        let err = rel_err(&r3.root_product, &r3.expected_product, &ctx.one());
        assert!(
            err < ctx.eps_pow(3),
            "product={} expected={}",
            r3.root_product,
            r3.expected_product
        );
        let r2 = fam.classify_and_root_products(2, &ctx).unwrap();
        assert!(!r2.singular);
    }
}
