//! F(delta) for a global amplitude error, and the single-qubit infidelity map
//! on a small (theta_s, theta) grid.

use std::f64::consts::PI;

use nhqc::analysis::{error_sensitivity, infidelity_map, systematic_error_sweep, GateProblem};
use nhqc::codes::GateSpec;
use nhqc::dynamics::PropagationOptions;
use nhqc::pulse::AuxiliarySchedule;
use nhqc::rabi::RabiModel;

fn main() -> nhqc::Result<()> {
    let wc = 2.0 * PI * 6.25;
    let model = RabiModel::single_mode(wc, wc, 0.8 * wc, 20)?.tuned(2, 4)?;
    let opts = PropagationOptions::pure();
    let t_f = 150.0;

    let problem = GateProblem::single_qubit(model.clone(), GateSpec::hadamard(), 2, t_f)?;
    for p in systematic_error_sweep(&problem, &[-0.1, 0.0, 0.1], &opts)? {
        println!("delta = {:+.2}: F = {:.6}", p.delta, p.f_bar);
    }

    println!("q_i shaped   = {:.2e}", error_sensitivity(&AuxiliarySchedule::gate(PI / 2.0, t_f)?)?);
    println!("q_i stepped  = {:.3}", error_sensitivity(&AuxiliarySchedule::stepped(PI / 2.0, t_f)?)?);

    let specs: Vec<GateSpec> = [PI / 4.0, PI / 2.0]
        .iter()
        .map(|&theta| GateSpec::single(PI / 2.0, theta, 0.0))
        .collect::<nhqc::Result<_>>()?;
    for e in infidelity_map(&model, &specs, 2, t_f, 0.1, &opts)? {
        println!("{:?}: 1-F clean {:.2e}, with error {:.2e}", e.spec, e.clean, e.with_error);
    }
    Ok(())
}
