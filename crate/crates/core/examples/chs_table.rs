//! Prints the maximized Clauser–Horne sum against the attenuation factor.

use qnd_core::bell::{chs_optimum, fixed_angle_chs, gradient_norm, maximize_chs};

fn main() {
    println!(
        "{:>5} {:>14} {:>14} {:>12} {:>10}",
        "phi", "optimized", "closed form", "fixed", "|grad|"
    );
    for phi in [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0] {
        let r = maximize_chs(phi).expect("phi in range");
        println!(
            "{phi:>5.2} {:>14.10} {:>14.10} {:>12.6} {:>10.2e}",
            r.chs,
            chs_optimum(phi),
            fixed_angle_chs(phi).chs,
            gradient_norm(&r.angles.as_array(), phi)
        );
    }
}
