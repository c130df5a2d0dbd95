use laurentq::equilibrium::{BandGeometry, EqEngine, Parity};
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;
use rug::Float;

fn main() {
    let ctx = PrecisionCtx::new(192).unwrap();
    let field = ScaledField::new(fields::f1(&ctx), 8, 8);
    let geom = BandGeometry::new(vec![ctx.real(0.8), ctx.real(4.3)]);
    let engine = EqEngine::new(geom.clone(), &field, Parity::Even, &ctx);
    // direct psi values near the edges via h_real vs h_cached
    for xv in [0.800001f64, 0.81, 0.9, 4.29, 4.299999] {
        let x = ctx.real(xv);
        let hd = engine.h_real(&x).unwrap();
        let hc = engine.h_cached(&x).unwrap();
        let diff = Float::with_val(ctx.work_bits, &hd - &hc).abs();
        println!("x={xv}: h={:.6e} interp diff={:.3e}", hd.to_f64(), diff.to_f64());
    }
    // manual sqrt-mode doubling trace for mass
    let one = |_: &Float| ctx.one();
    match engine.psi_integral_on_band(&one, 1) {
        Ok(v) => println!("mass = {}", v.to_f64()),
        Err(e) => println!("mass failed: {e}"),
    }
}
