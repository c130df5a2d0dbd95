use laurentq::equilibrium::{BandGeometry, EqEngine, Parity};
use laurentq::numerics::newton::solve_newton;
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;
use rug::Float;

fn main() {
    let ctx = PrecisionCtx::new(192).unwrap();
    let field = ScaledField::new(fields::f1(&ctx), 8, 8);
    // Solve (S0 = 0, mass - 1 = 0); then report S1 / pi.
    let res = |pts: &[Float]| -> laurentq::Result<Vec<Float>> {
        let geom = BandGeometry::new(pts.to_vec());
        let engine = EqEngine::new(geom, &field, Parity::Even, &ctx);
        let r = engine.residuals_coarse(256);
        let one = |_: &Float| ctx.one();
        let mass = engine.psi_integral_on_band(&one, 1)?;
        Ok(vec![r[0].clone(), mass - 1u32])
    };
    let x0 = vec![ctx.real(0.8), ctx.real(4.3)];
    match solve_newton(&res, &x0, &ctx.real(1e-30), 60, &ctx) {
        Ok(sol) => {
            println!("endpoints ({}, {})", sol[0].to_f64(), sol[1].to_f64());
            let geom = BandGeometry::new(sol.clone());
            let engine = EqEngine::new(geom, &field, Parity::Even, &ctx);
            let r = engine.residuals_coarse(512);
            let s1 = r[1].clone() + ctx.pi() * 4u32; // undo "-2 pi kappa"
            println!("S1/pi = {}", (s1 / ctx.pi()).to_f64());
        }
        Err(e) => println!("failed: {e}"),
    }
}
