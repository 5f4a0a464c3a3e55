//! Hadamard fidelity under white Gaussian amplitude noise (power ratio 15).

use std::f64::consts::PI;

use nhqc::analysis::{awgn_monte_carlo, GateProblem, NoiseConfig};
use nhqc::codes::GateSpec;
use nhqc::dynamics::PropagationOptions;
use nhqc::rabi::RabiModel;

fn main() -> nhqc::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let wc = 2.0 * PI * 6.25;
    let model = RabiModel::single_mode(wc, wc, 0.8 * wc, 20)?.tuned(2, 4)?;
    let problem = GateProblem::single_qubit(model, GateSpec::hadamard(), 2, 150.0)?;
    let cfg = NoiseConfig { delta_i: 0.0, snr: 15.0, snr_db: false, samples, seed: 7 };
    let report = awgn_monte_carlo(&problem, &cfg, &PropagationOptions::pure())?;
    for (i, f) in report.fidelities.iter().enumerate() {
        println!("sample {i:2}: F = {f:.6}");
    }
    println!("mean {:.6} +- {:.6}", report.mean, report.stddev);
    Ok(())
}
