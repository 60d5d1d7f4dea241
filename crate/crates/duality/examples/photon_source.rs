//! Coherent multi-photon source and wave division at the source.
//!
//! One high-frequency photon is repeatedly down-converted (type I and
//! type II alternating) into n photons of distinct frequencies, all
//! horizontally polarized. Splitting the pump photon on a beamsplitter
//! BEFORE the cascade divides the whole n-photon wave into two coherent
//! sub-waves — the wave division a multi-photon register needs, done
//! where the register is still one photon.

use duality::optics::{cascade_source, source_qwd, source_qwd_recombine, OpticalSubWave};

fn main() -> duality::Result<()> {
    for n in 1..=4 {
        let state = cascade_source(n)?;
        let (ket, amp) = state.single_term().expect("single product ket");
        println!("cascade n={n}: {ket} with amplitude {:.3}", amp.re);
    }

    let n = 4;
    let (upper, lower) = source_qwd(n)?;
    println!("\nsource-level wave division at n={n}:");
    for (name, sub) in [("upper", &upper), ("lower", &lower)] {
        let (ket, _) = sub.state.single_term().expect("single ket");
        println!("  {name}: coeff {:.6} × {ket}", sub.coeff);
    }

    let combined = source_qwd_recombine(n, &upper, &lower)?;
    let (ket, amp) = combined.single_term().expect("constructive recombination");
    println!("recombined: {ket} with amplitude {:.6}", amp.re);

    // A π phase on one arm turns the combiner's bright port dark.
    let shifted = OpticalSubWave {
        spatial_phase: std::f64::consts::PI,
        ..lower
    };
    let dark = source_qwd_recombine(n, &upper, &shifted)?;
    println!(
        "with a π phase on the lower arm: norm² = {:.2e}",
        dark.norm_sq()
    );
    Ok(())
}
