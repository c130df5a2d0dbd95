use laurentq::equilibrium::{auto_seed, solve_endpoints, Parity};
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;
use std::time::Instant;

fn main() {
    let ctx = PrecisionCtx::new(320).unwrap();
    for (name, pot, genus) in [("F1", fields::f1(&ctx), 0usize), ("F2", fields::f2(&ctx), 1)] {
        let field = ScaledField::new(pot, 8, 8);
        let t0 = Instant::now();
        match auto_seed(&field, Parity::Even, genus, &ctx) {
            Ok(x0) => {
                println!("{name} seed in {:?}: {:?}", t0.elapsed(), x0.iter().map(|f| f.to_f64()).collect::<Vec<_>>());
                let t1 = Instant::now();
                match solve_endpoints(&field, Parity::Even, genus, &x0, &ctx) {
                    Ok(d) => {
                        println!("  solved in {:?}: {:?}", t1.elapsed(), d.geom.endpoints.iter().map(|f| f.to_f64()).collect::<Vec<_>>());
                        println!("  mass-1 = {:.3e}, ell = {:.10}", (d.total_mass(&ctx) - 1u32).to_f64(), d.ell.to_f64());
                        let worst = d.residuals.iter().fold(ctx.zero(), |acc, r| acc.max(&r.clone().abs()));
                        println!("  worst residual = {:.3e}", worst.to_f64());
                    }
                    Err(e) => println!("  SOLVE FAILED: {e}"),
                }
            }
            Err(e) => println!("{name} seed failed: {e}"),
        }
    }
}
