use laurentq::equilibrium::{auto_seed, Parity};
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;
fn main() {
    let ctx = PrecisionCtx::new(192).unwrap();
    let field = ScaledField::new(fields::f2(&ctx), 8, 8);
    match auto_seed(&field, Parity::Even, 1, &ctx) {
        Ok(x) => println!("OK {:?}", x.iter().map(|f| f.to_f64()).collect::<Vec<_>>()),
        Err(e) => println!("ERR {e}"),
    }
}
