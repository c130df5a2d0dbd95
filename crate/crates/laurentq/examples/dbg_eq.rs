use laurentq::equilibrium::{auto_seed, solve_endpoints, Parity};
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;

fn main() {
    let ctx = PrecisionCtx::new(320).unwrap();
    for n in [8u64, 16] {
        let field = ScaledField::new(fields::f1(&ctx), n, n);
        let x0 = auto_seed(&field, Parity::Even, 0, &ctx).unwrap();
        println!("n={n} seed: {:?}", x0.iter().map(|f| f.to_f64()).collect::<Vec<_>>());
        match solve_endpoints(&field, Parity::Even, 0, &x0, &ctx) {
            Ok(d) => {
                println!("  endpoints: {:?}", d.geom.endpoints.iter().map(|f| f.to_f64()).collect::<Vec<_>>());
                println!("  mass = {:.20}", d.total_mass(&ctx).to_f64());
                println!("  ell  = {:.8}", d.ell.to_f64());
                let r: Vec<f64> = d.residuals.iter().map(|f| f.to_f64()).collect();
                println!("  residuals: {r:?}");
            }
            Err(e) => println!("  SOLVE FAILED: {e}"),
        }
    }
    // two-cut F2
    let field = ScaledField::new(fields::f2(&ctx), 8, 8);
    let x0 = auto_seed(&field, Parity::Even, 1, &ctx).unwrap();
    println!("F2 seed: {:?}", x0.iter().map(|f| f.to_f64()).collect::<Vec<_>>());
    match solve_endpoints(&field, Parity::Even, 1, &x0, &ctx) {
        Ok(d) => {
            println!("  endpoints: {:?}", d.geom.endpoints.iter().map(|f| f.to_f64()).collect::<Vec<_>>());
            println!("  mass = {:.20}", d.total_mass(&ctx).to_f64());
        }
        Err(e) => println!("  SOLVE FAILED: {e}"),
    }
}
