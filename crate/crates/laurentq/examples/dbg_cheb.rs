use laurentq::equilibrium::ChebInterp;
use laurentq::PrecisionCtx;
use rug::Float;

fn main() {
    let ctx = PrecisionCtx::new(192).unwrap();
    let f = |xs: &[Float]| -> laurentq::Result<Vec<Float>> {
        Ok(xs.iter().map(|x| x.clone().sin()).collect())
    };
    let interp = ChebInterp::build(&f, &ctx.real(0.8), &ctx.real(4.3), &ctx.real(1e-40), &ctx).unwrap();
    println!("m = {}", interp.coeffs.len());
    for (i, c) in interp.coeffs.iter().enumerate().take(5) {
        println!("c[{i}] = {:.6e}", c.to_f64());
    }
    let x = ctx.real(2.0);
    let v = interp.eval(&x);
    println!("interp(2.0) = {:.12e} vs sin(2) = {:.12e}", v.to_f64(), ctx.real(2).sin().to_f64());
}
