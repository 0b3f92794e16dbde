use grushin_core::potential::*;
use grushin_core::profiles::RadialProfile;

fn main() {
    let k = PsiKernel::build(1.0).unwrap();
    let z = RadialProfile::bump(1.0, 0.5).unwrap().scale(0.0);
    // replicate the integrand manually at suspicious points
    let zy = 1.0 + 2.0 * grushin_core::reductions::w_map(1.0);
    println!("zy = {zy}");
    for &(x, y) in &[(5.838244e-38f64, 0.5f64), (0.0, 5.838244e-38), (1.7e37, 0.5), (f64::MAX, 0.5)] {
        let dx = x - 0.0;
        let dy = y - zy;
        let d2 = (dx * dx + dy * dy) / (4.0 * y * zy);
        let ux = x * x + (y - 1.0) * (y - 1.0);
        let uw = ux / (4.0 * y);
        let p = k.eval(d2);
        let g = z.eval(uw);
        println!("x={x:.3e} y={y:.3e} d2={d2:.3e} uw={uw:.3e} psi={p:.3e} g={g:.3e} num={:.3e}", p*g);
    }
    match fractional_integral(&k, &z, 1.0, 1e-7) {
        Ok(v) => println!("I = {v}"),
        Err(e) => println!("ERR: {e}"),
    }
}
