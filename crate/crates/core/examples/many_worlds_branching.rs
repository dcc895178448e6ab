//! Many-worlds bookkeeping: branches split only where a measurement happens,
//! and the distant observer's records change only when a message arrives.
//!
//! cargo run --example many_worlds_branching

use bellsim::many_worlds::{
    branch_statistics, communicate, distinguishable_records, initial_state, local_measure, locality_audit,
    per_branch_expansion, BranchState,
};
use bellsim::polarization::{Angle, Photon};

fn show(label: &str, s: &BranchState) {
    println!(
        "{label:<26} branches {}  records {}/{}  weight {:.12}",
        s.branches().len(),
        distinguishable_records(s, Photon::First),
        distinguishable_records(s, Photon::Second),
        s.total_weight()
    );
}

fn main() {
    let (t1, t2) = (Angle::from_degrees(30.0), Angle::from_degrees(-30.0));
    let s0 = initial_state();
    let s1 = local_measure(&s0, Photon::First, t1).unwrap();
    let s2 = local_measure(&s1, Photon::Second, t2).unwrap();
    let s3 = communicate(&s2, Photon::First, Photon::Second).unwrap();
    let s4 = communicate(&s3, Photon::Second, Photon::First).unwrap();
    for (label, s) in [
        ("source", &s0),
        ("observer 1 measures", &s1),
        ("observer 2 measures", &s2),
        ("1 tells 2", &s3),
        ("2 tells 1", &s4),
    ] {
        show(label, s);
    }

    println!("\nbranch weights vs the Born rule: {:?}", branch_statistics(&s4).unwrap().to_array());
    for b in s4.branches() {
        let e = per_branch_expansion(b, Angle::from_degrees(0.0)).unwrap();
        println!("  branch {:?}: weight {:.4}, 0° basis {:?}", b.joint_outcome().unwrap(), b.weight(), e);
    }
    println!("locality audit: {:?}", locality_audit(&s4));
    println!("\nJSON trace:\n{}", serde_json::to_string_pretty(&s4.trace()).unwrap());
}
