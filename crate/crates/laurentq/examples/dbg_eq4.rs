use laurentq::equilibrium::{BandGeometry, EqEngine, Parity};
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;
use rug::Complex;

fn main() {
    let ctx = PrecisionCtx::new(192).unwrap();
    let field = ScaledField::new(fields::f1(&ctx), 8, 8);
    let geom = BandGeometry::new(vec![ctx.real(0.8), ctx.real(4.3)]);
    let engine = EqEngine::new(geom, &field, Parity::Even, &ctx);
    for xv in [0.9f64, 1.5, 2.5, 3.5, 4.2] {
        let x = ctx.real(xv);
        let fast = engine.h_real(&x).unwrap();
        let z = Complex::with_val(ctx.work_bits, (xv, 0.0));
        let slow = engine.h_contour(&z, 1024).unwrap();
        println!("x={xv}: h_pv={:.12e}  h_contour=({:.12e}, {:.2e})", fast.to_f64(), slow.real().to_f64(), slow.imag().to_f64());
    }
}
