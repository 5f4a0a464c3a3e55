//! The binomial code: Knill-Laflamme values and recovery of the logical
//! amplitudes after a single photon loss.

use nhqc::codes::{apply_photon_loss, binomial_codewords, knill_laflamme_check};
use nhqc::linalg::{c64, inner, CVector};

fn main() -> nhqc::Result<()> {
    let code = binomial_codewords(8)?;
    let kl = knill_laflamme_check(&code);
    println!("<0|n|0> = {:.3}, <1|n|1> = {:.3}, <0|n|1> = {:.3}, pass = {}",
        kl.values[0][0].re, kl.values[1][1].re, kl.values[0][1].norm(), kl.pass);

    let logical = CVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
    let lost = apply_photon_loss(&code.encode(&logical))?;
    // after a loss the words map to |3> and |1>
    let e0 = CVector::from_fn(8, |n, _| c64(if n == 3 { 1.0 } else { 0.0 }, 0.0));
    let e1 = CVector::from_fn(8, |n, _| c64(if n == 1 { 1.0 } else { 0.0 }, 0.0));
    println!("amplitudes after loss: {:.3} {:.3}", inner(&e0, &lost), inner(&e1, &lost));
    Ok(())
}
