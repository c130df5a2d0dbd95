use laurentq::numerics::quad::{adaptive_gl, gl_panel};
use laurentq::PrecisionCtx;
use rug::Float;

fn main() {
    let ctx = PrecisionCtx::new(1024).unwrap();
    // the k=0 moment integrand on the positive half-line, t = log x
    let n = 20u32;
    let g = |t: &Float| {
        let x = t.clone().exp();
        let prec = x.prec();
        let d = Float::with_val(prec, &x - 3u32);
        let v = d.square() + Float::with_val(prec, 0.01) * x.clone().square().recip();
        (-(v * Float::with_val(prec, n))).exp() * x
    };
    let a = ctx.real(-6);
    let b = ctx.real(3);
    // try a sequence of tolerances and report panel counts via timing
    for tol_bits in [200i64, 400, 600, 768] {
        let tol = ctx.exp2i(-tol_bits);
        let t0 = std::time::Instant::now();
        match adaptive_gl(&g, &a, &b, &tol, &ctx) {
            Ok(v) => println!("tol=2^-{tol_bits}: ok {:?} val={:.6e}", t0.elapsed(), v.to_f64()),
            Err(e) => println!("tol=2^-{tol_bits}: ERR {e} after {:?}", t0.elapsed()),
        }
    }
    // single-panel convergence study around the peak
    let lo = ctx.real(1.0);
    let hi = ctx.real(1.2);
    let mut prev = gl_panel(&g, &lo, &hi, 24, ctx.work_bits);
    for m in [48usize, 96, 192] {
        let cur = gl_panel(&g, &lo, &hi, m, ctx.work_bits);
        let diff = Float::with_val(1024, &cur - &prev).abs();
        println!("m={m}: diff from previous = {:.3e}", diff.to_f64());
        prev = cur;
    }
}
