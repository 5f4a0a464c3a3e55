//! Average fidelity of the Hadamard gate under the full Hamiltonian, clean
//! and with a 10% amplitude error.

use std::f64::consts::PI;

use nhqc::analysis::GateProblem;
use nhqc::codes::GateSpec;
use nhqc::dynamics::PropagationOptions;
use nhqc::rabi::RabiModel;

fn main() -> nhqc::Result<()> {
    let t_f: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(150.0);
    let wc = 2.0 * PI * 6.25;
    let model = RabiModel::single_mode(wc, wc, 0.8 * wc, 20)?.tuned(2, 4)?;
    let problem = GateProblem::single_qubit(model, GateSpec::hadamard(), 2, t_f)?;
    let opts = PropagationOptions::pure();
    for delta in [0.0, 0.1] {
        let r = problem.fidelity_of(&problem.schedule.with_error(delta), &opts)?;
        println!("T = {t_f} ns, delta = {delta}: F = {:.6}, leakage = {:.2e}", r.f_bar, r.leakage);
    }
    Ok(())
}
