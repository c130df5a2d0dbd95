use laurentq::equilibrium::{BandGeometry, EqEngine, Parity};
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;
use rug::Float;

fn main() {
    let ctx = PrecisionCtx::new(192).unwrap();
    let field = ScaledField::new(fields::f1(&ctx), 8, 8);
    let geom = BandGeometry::new(vec![ctx.real(0.8), ctx.real(4.3)]);
    let engine = EqEngine::new(geom, &field, Parity::Even, &ctx);
    let pi = ctx.pi();
    let m = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(64usize);
    let mut xs = Vec::new();
    for k in 0..m {
        let theta = pi.clone() * Float::with_val(192, 2*k as u32 + 1) / (2*m as u32);
        let x = ctx.real(2.55) + ctx.real(1.75) * theta.cos();
        xs.push(x);
    }
    let hs = engine.h_multi(&xs).unwrap();
    for (x, h) in xs.iter().zip(hs.iter()) {
        if !h.is_finite() {
            println!("NaN at x = {:.20}", x.to_f64());
        }
    }
    println!("checked {} pts, h[0]={:.6e} h[last]={:.6e}", m, hs[0].to_f64(), hs[m-1].to_f64());
}
