//! Seeded outcome sequences: the same seed gives the same table no matter how
//! many worker threads sample it.
//!
//! cargo run --example reproducible_sequences

use bellsim::analysis::{generate_sequence, mismatch_rate, Model};
use bellsim::cli::render_sequence_rows;
use bellsim::polarization::Angle;

fn main() {
    let model = Model::parse("qm").unwrap();
    let (t1, t2) = (Angle::from_degrees(0.0), Angle::from_degrees(30.0));
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| generate_sequence(&model, t1, t2, 64, 2024))
    };
    let one = run(1);
    let four = run(4);
    print!("{}", render_sequence_rows(&one.pairs));
    let rate = mismatch_rate(&one).unwrap();
    println!("mismatches {} of {} ({:.3} ± {:.3})", rate.mismatches, rate.trials, rate.rate, rate.ci_halfwidth);
    println!("identical with 4 threads: {}", one == four);
}
