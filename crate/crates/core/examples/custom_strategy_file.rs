//! Build a table-driven strategy, save it in the strategy file format, load it
//! back and put it through the Bell test.
//!
//! cargo run --example custom_strategy_file

use bellsim::analysis::{bell_report, Model};
use bellsim::lhv::{bell_triple, exact_mismatch, LambdaLaw, LocalStrategy, Response, ResponseTable};
use bellsim::polarization::Angle;

fn main() {
    // transmit when the filter is within 30° of λ
    let table = ResponseTable::from_fn(36, 36, |filter, lambda| {
        let d = (filter - lambda).rem_euclid(180.0);
        (d.min(180.0 - d) < 30.0) as u8 as f64
    })
    .unwrap();
    let strategy = LocalStrategy {
        name: "narrow-window".into(),
        lambda_law: LambdaLaw::Uniform,
        response1: Response::Table(table.clone()),
        response2: Response::Table(table),
    };

    let path = std::env::temp_dir().join("narrow-window.json");
    std::fs::write(&path, strategy.to_json()).unwrap();
    let loaded = LocalStrategy::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    println!("saved and reloaded {}", path.display());

    let zero = Angle::from_degrees(0.0);
    for delta in [0.0, 30.0, 60.0, 90.0] {
        let m = exact_mismatch(&loaded, zero, Angle::from_degrees(delta)).unwrap();
        println!("  exact mismatch at Δ = {delta:>4}°: {:.6}", m.mismatch);
    }
    println!("exact triple at α = 30°: {:?}", bell_triple(&loaded, 30.0).unwrap());
    let r = bell_report(&Model::Lhv(loaded), 30.0, 100_000, 3).unwrap();
    println!("sampled Bell test: violated = {}, margin {:+.5}", r.violated, r.margin());
    println!("\nrun the same file through the CLI with --model lhv:{}", path.display());
}
