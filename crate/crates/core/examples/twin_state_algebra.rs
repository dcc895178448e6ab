//! Twin-state algebra: rotation symmetry, the cos² coincidence law, and the
//! state left behind when both photons pass their filters.
//!
//! cargo run --example twin_state_algebra

use bellsim::polarization::{
    expand_in_basis, joint_distribution, project, rotate_basis, twin_state, Angle, Outcome, Photon,
};

fn main() {
    let twin = twin_state();
    println!("twin state [xx, xy, yx, yy] = {:?}", twin.amplitudes());
    for rot in [17.0, 45.0, 123.0] {
        println!("  rotated by {rot:>5}°       = {:?}", rotate_basis(&twin, Angle::from_degrees(rot)).amplitudes());
    }

    println!("\n  Δ   P(same)   P(differ)");
    for delta in (0..=90).step_by(15) {
        let j = joint_distribution(&twin, Angle::from_degrees(0.0), Angle::from_degrees(delta as f64));
        println!("{delta:>3}   {:.6}  {:.6}", j.coincidence(), j.mismatch());
    }

    let (t1, t2) = (Angle::from_degrees(30.0), Angle::from_degrees(-30.0));
    let after = project(&twin, Photon::First, t1, Outcome::Transmitted)
        .and_then(|s| project(&s, Photon::Second, t2, Outcome::Transmitted))
        .expect("both transmissions are possible");
    let e = expand_in_basis(&after, Angle::from_degrees(0.0));
    println!("\nboth transmitted at (30°, −30°), on the 0° basis [bb, b⊥, ⊥b, ⊥⊥]:");
    println!("  {e:?}");
    println!("  weight on differing outcomes at 0°: {:.4}", e[1] * e[1] + e[2] * e[2]);
}
