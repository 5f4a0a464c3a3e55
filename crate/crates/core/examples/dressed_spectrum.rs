//! Dressed spectrum of the Rabi model: energies, c coefficients, the
//! avoided crossing of level 2 and the anharmonicity at g = 0.5 ω_c.

use nhqc::rabi::{dressed_spectrum, locate_coefficient_jump, spectrum_sweep, RabiModel};

fn main() -> nhqc::Result<()> {
    let model = RabiModel::single_mode(1.0, 1.0, 0.0, 20)?;

    let g: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).collect();
    let sweep = spectrum_sweep(&model, &g)?;
    println!("g/wc   E0      E1      E2      E3");
    for (gi, e) in g.iter().zip(&sweep.energies) {
        println!("{gi:.1}  {:+.4} {:+.4} {:+.4} {:+.4}", e[0], e[1], e[2], e[3]);
    }

    let g_jump = locate_coefficient_jump(&model, 2, 2, 0.3, 0.6, 0.1, 1e-4)?;
    println!("c_2^2 switches on at g/wc = {g_jump:.4}");

    let s = dressed_spectrum(&model.with_coupling(0.5))?;
    let e = &s.energies;
    let anh = ((e[3] - e[2]) - (e[4] - e[3])).abs();
    println!("|dE23 - dE34| at g = 0.5 wc: {anh:.3} wc");
    Ok(())
}
