use laurentq::equilibrium::{BandGeometry, EqEngine, Parity};
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;

fn main() {
    let ctx = PrecisionCtx::new(192).unwrap();
    let field = ScaledField::new(fields::f1(&ctx), 8, 8);
    for (b, a) in [(0.55f64, 4.658), (0.0785, 4.649), (0.3, 4.6), (0.15, 4.62)] {
        let geom = BandGeometry::new(vec![ctx.real(b), ctx.real(a)]);
        let engine = EqEngine::new(geom, &field, Parity::Even, &ctx);
        let r = engine.residuals_coarse_mass(768);
        println!("({b},{a}): S0={:+.4e} mass-1={:+.4e}", r[0].to_f64(), r[1].to_f64());
    }
}
