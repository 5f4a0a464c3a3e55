//! Output-state fidelity of the Hadamard gate acting on |0~> with
//! superconducting decoherence rates and a 10% amplitude error.

use std::f64::consts::PI;

use nhqc::analysis::GateProblem;
use nhqc::codes::GateSpec;
use nhqc::dynamics::{DecoherenceRates, PropagationOptions};
use nhqc::linalg::{c64, CVector};
use nhqc::rabi::RabiModel;

fn main() -> nhqc::Result<()> {
    let wc = 2.0 * PI * 6.25;
    let model = RabiModel::single_mode(wc, wc, 0.8 * wc, 20)?.tuned(2, 4)?;
    let problem = GateProblem::single_qubit(model, GateSpec::hadamard(), 2, 150.0)?;
    let input = CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
    let opts = PropagationOptions::master();
    for (label, rates) in [("closed", DecoherenceRates::zero()), ("open", DecoherenceRates::superconducting())] {
        let f = problem.output_fidelity(&input, &rates, 0.1, &opts)?;
        println!("{label:6} F_out = {f:.5}");
    }
    Ok(())
}
