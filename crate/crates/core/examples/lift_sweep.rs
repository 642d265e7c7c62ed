//! Lift convergence sweep on a small configuration: rough path convergence
//! rates of the coupled lifts with bootstrap intervals.

use roughflow::experiment::{run_theorem_a, ExperimentConfig};

fn main() -> roughflow::Result<()> {
    let cfg = ExperimentConfig { replicas: 8, ..Default::default() };
    let rec = run_theorem_a(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&rec.summary)?);
    println!("pass: {}", rec.pass);
    Ok(())
}
