use laurentq::equilibrium::{BandGeometry, EqEngine, Parity};
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;

fn main() {
    let ctx = PrecisionCtx::new(192).unwrap();
    let field = ScaledField::new(fields::f1(&ctx), 8, 8);
    let mut best = (1e9, 0.0, 0.0);
    for bi in 0..25 {
        let b = 0.30 + 0.03 * bi as f64;
        for ai in 0..25 {
            let a = 4.2 + 0.04 * ai as f64;
            let geom = BandGeometry::new(vec![ctx.real(b), ctx.real(a)]);
            let engine = EqEngine::new(geom, &field, Parity::Even, &ctx);
            let r = engine.residuals_coarse(128);
            let n = r[0].to_f64().powi(2) + r[1].to_f64().powi(2);
            if n < best.0 { best = (n, b, a); }
        }
    }
    println!("best norm2 {:.3e} at ({}, {})", best.0, best.1, best.2);
    // local refined Newton trace by hand
    let geom = BandGeometry::new(vec![ctx.real(best.1), ctx.real(best.2)]);
    let engine = EqEngine::new(geom, &field, Parity::Even, &ctx);
    let r = engine.residuals().unwrap();
    println!("residuals at best: {:?}", r.iter().map(|f| f.to_f64()).collect::<Vec<_>>());
}
