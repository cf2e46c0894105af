//! The growing kernel `lambda |x|^gamma` split into a smooth divergent
//! part `V` and a bounded remainder `R`, and the boundedness of the
//! remainder kernel `K~(x, y) = |x-y|^g - |x|^g + g |x|^{g-2} x.y` that
//! makes the modified equation tractable.

use nhsim::kernels::{
    audit_assumptions, audit_kernel_bound, eval_k_tilde, kernel_bound_constant, PotentialSpec,
};

fn main() {
    let spec = PotentialSpec::power(1.5, 1.0).unwrap();
    let kernel = spec.tabulated().unwrap();

    println!("V / R split at gamma = 1.5 (cutoff ramp on [1, 2]):");
    println!("{:>8} {:>12} {:>12} {:>12}", "x", "V", "R", "V+R");
    for x in [0.5, 1.0, 1.5, 2.0, 3.0, 10.0] {
        let p = [x, 0.0];
        println!(
            "{x:>8.2} {:>12.6} {:>12.6} {:>12.6}",
            kernel.eval_v(p),
            kernel.eval_r(p),
            kernel.eval_full(p)
        );
    }

    println!("\nK~ stays of size |y|^gamma even where the kernel diverges:");
    println!(
        "{:>8} {:>8} {:>14} {:>12}",
        "x", "y", "K~(x,y)", "|K~|/|y|^g"
    );
    for (x, y) in [(10.0, 1.0), (100.0, 1.0), (100.0, 5.0), (-50.0, 2.0)] {
        let kt = eval_k_tilde([x, 0.0], [y, 0.0], 1.5).unwrap();
        println!(
            "{x:>8.1} {y:>8.1} {kt:>14.8} {:>12.8}",
            kt.abs() / f64::powf(f64::abs(y), 1.5)
        );
    }

    println!();
    for gamma in [1.1, 1.5, 2.0] {
        let audit = audit_kernel_bound(gamma, 100.0, 10.0, 200, 200).unwrap();
        println!("{}", audit.summary());
        assert!(audit.max_ratio.unwrap() <= kernel_bound_constant(gamma));
    }

    println!("\nstructural assumptions at gamma = 1.5:");
    let audit = audit_assumptions(&spec, 100.0, 10.0, 401).unwrap();
    print!("{}", audit.render());
}
