use laurentq::moments::strong_moment;
use laurentq::potential::{fields, ScaledField};
use laurentq::PrecisionCtx;
use std::time::Instant;

fn main() {
    for bits in [512u32, 1024] {
        let ctx = PrecisionCtx::new(bits).unwrap();
        let field = ScaledField::new(fields::f1(&ctx), 20, 20);
        let t0 = Instant::now();
        let mut last = ctx.zero();
        for k in [-40i64, -10, 0, 10, 40] {
            last = match strong_moment(&field, k, &ctx) { Ok(v) => v, Err(e) => { println!("k={k}: {e}"); ctx.zero() } };
        }
        println!("bits={bits}: 5 moments in {:?} (c_40 ~ {:.3e})", t0.elapsed(), last.to_f64());
    }
}
