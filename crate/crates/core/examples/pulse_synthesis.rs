//! Hadamard drive at T = 35 ns: tone frequencies and peaks, phases at t_f,
//! error sensitivity and the rotating-wave check.

use std::f64::consts::PI;

use nhqc::codes::GateSpec;
use nhqc::pulse::{lewis_riesenfeld_phases, rwa_check_scoped, sensitivity_integral, synthesize_single_qubit, RwaScope};
use nhqc::rabi::{dressed_spectrum, RabiModel};

fn main() -> nhqc::Result<()> {
    let wc = 2.0 * PI * 6.25;
    let model = RabiModel::single_mode(wc, wc, 0.8 * wc, 20)?.tuned(2, 4)?;
    let spectrum = dressed_spectrum(&model)?;
    let schedule = synthesize_single_qubit(&GateSpec::hadamard(), &spectrum, 2, 35.0)?;

    for (tone, peak) in schedule.tones.iter().zip(schedule.peak_amplitudes()) {
        println!("tone k={}  omega = {:8.3} rad/ns  peak = {:.3} rad/ns", tone.label(), tone.omega, peak);
    }
    let xi_max = schedule.traces().xi.iter().cloned().fold(0.0, f64::max);
    println!("max Xi = {xi_max:.3} rad/ns = 2pi x {:.3} GHz", xi_max / (2.0 * PI));

    let phases = lewis_riesenfeld_phases(&schedule.aux, 4001)?;
    println!("dynamic phase {:.2e}, geometric phase {:.6}", phases.final_dynamic(), phases.final_geometric());
    println!("q_i = {:.2e}", sensitivity_integral(&schedule.aux)?.norm_sqr());

    let rwa = rwa_check_scoped(&schedule, &spectrum, 0.1, usize::MAX, RwaScope::Populated);
    println!("RWA pass = {} (worst ratio {:.4})", rwa.pass, rwa.worst_ratio);
    Ok(())
}
