//! Orthodox collapse: sample outcome pairs and compare with the exact law,
//! measuring either photon first.
//!
//! cargo run --example collapse_sampling

use bellsim::orthodox::{run_trials, sequential_distribution, MeasurementOrder};
use bellsim::polarization::{twin_state, Angle};
use bellsim::stats::joint_gof;

fn main() {
    let twin = twin_state();
    let n = 200_000;
    for (a, b) in [(0.0, 0.0), (0.0, 30.0), (-30.0, 30.0), (10.0, 100.0)] {
        let (t1, t2) = (Angle::from_degrees(a), Angle::from_degrees(b));
        for order in [MeasurementOrder::Photon1First, MeasurementOrder::Photon2First] {
            let exact = sequential_distribution(&twin, t1, t2, order);
            let counts = run_trials(&twin, t1, t2, order, n, 42);
            let gof = joint_gof(&counts, &exact);
            println!(
                "({a:>5}°, {b:>5}°) {order:<13}  exact mismatch {:.4}  sampled {:.4}  χ² {:.2} (dof {}, {})",
                exact.mismatch(),
                counts.mismatches() as f64 / n as f64,
                gof.statistic,
                gof.dof,
                if gof.passed { "fits" } else { "REJECTED" }
            );
        }
    }
}
