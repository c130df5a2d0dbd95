use laurentq::moments::MomentTable;
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;
use std::time::Instant;

fn main() {
    let ctx = PrecisionCtx::new(1024).unwrap();
    let field = ScaledField::new(fields::f1(&ctx), 20, 20);
    let t0 = Instant::now();
    let t = MomentTable::build(field, -46, 46, &ctx).unwrap();
    println!("93 moments at 1024 bits in {:?}", t0.elapsed());
    // spot-check three against direct integration
    for k in [-45i64, -1, 44] {
        let direct = laurentq::moments::strong_moment(&t.field, k, &ctx).unwrap();
        let e = laurentq::numerics::rel_err(t.get(k).unwrap(), &direct, &ctx.eps_pow(1));
        println!("k={k}: rel err vs direct = {:.3e}", e.to_f64());
    }
}
