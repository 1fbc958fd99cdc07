//! Prints the contracted Bianchi defects of finite-difference geometry on
//! seeded polynomial charts as the step shrinks, with and without
//! Richardson extrapolation.
//!
//! ```text
//! cargo run --release -p nkgeom-core --example fd_scaling
//! ```

use nkgeom_core::chart::{
    grad_ricci_identities_with, seeded_points, Chart, GeometryOptions, PolynomialHermitianChart,
};

fn main() {
    for richardson in [false, true] {
        println!("richardson = {richardson}");
        for seed in 0..5u64 {
            let chart = Chart::parametric(PolynomialHermitianChart::new(
                2,
                PolynomialHermitianChart::DEFAULT_EPS,
                seed,
            ));
            let u = &seeded_points(&chart, 1, seed, 0.15).unwrap()[0];
            let mut line = format!("  seed {seed}:");
            for h in [0.04, 0.02, 0.01, 0.005, 0.0025] {
                let opts = GeometryOptions::finite_difference(richardson);
                let d = grad_ricci_identities_with(&chart, u, h, opts).unwrap();
                line += &format!("  h={h} {:.2e}/{:.2e}", d.eq1_defect, d.eq2_defect);
            }
            println!("{line}");
        }
    }
}
