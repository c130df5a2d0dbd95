use laurentq::equilibrium::{BandGeometry, EqEngine, Parity};
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;
use rug::Float;

fn main() {
    let ctx = PrecisionCtx::new(192).unwrap();
    let field = ScaledField::new(fields::f2(&ctx), 8, 8);
    let coarse = |dd: &Float, cc: &Float| -> Option<Vec<Float>> {
        let pts = vec![-cc.clone(), -dd.clone(), dd.clone(), cc.clone()];
        if pts[0] >= pts[1] || pts[1] >= pts[2] || pts[2] >= pts[3] { return None; }
        let geom = BandGeometry::new(pts);
        let engine = EqEngine::new(geom, &field, Parity::Even, &ctx);
        Some(engine.residuals_coarse_mass(256))
    };
    for k in 0..14 {
        let d = 0.45 + 0.06 * k as f64;
        let dd = ctx.real(d);
        // fine walk in c
        let mut found = false;
        let mut prev: Option<(f64, f64)> = None;
        for j in 1..160 {
            let c = d + 0.02 * j as f64;
            let cc = ctx.real(c);
            if let Some(r) = coarse(&dd, &cc) {
                let m = r[2].to_f64();
                if let Some((pc, pm)) = prev {
                    if pm < 0.0 && m >= 0.0 {
                        // mass crossing
                        let r2 = coarse(&dd, &ctx.real((pc + c) / 2.0)).unwrap();
                        println!("d={d:.3}: mass crossing at c~{:.3}, S0={:+.4e}", (pc+c)/2.0, r2[0].to_f64());
                        found = true;
                        break;
                    }
                }
                prev = Some((c, m));
            }
        }
        if !found { println!("d={d:.3}: no mass crossing (last mass-1 = {:?})", prev.map(|p| p.1)); }
    }
}
