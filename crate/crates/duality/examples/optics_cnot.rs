//! Two-dubit CNOT from nonlinear frequency conversion.
//!
//! Two photons at ω₁ and ω₂ carry the dubits in their polarizations.
//! Four up-conversion crystals merge each polarization component into a
//! single summed-frequency photon on its own rail, half-wave plates flip
//! the two components whose target must toggle, and four down-conversion
//! crystals split everything back into two photons. The assembled matrix
//! is exactly the CNOT permutation.

use duality::optics::cnot_construction;

fn main() -> duality::Result<()> {
    let matrix = cnot_construction()?;
    println!("assembled matrix over basis HH, HV, VH, VV:");
    for r in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|c| format!("{:.0}", matrix.get(r, c).re))
            .collect();
        println!("  [{}]", row.join(" "));
    }
    let squared = matrix.mul(&matrix);
    println!(
        "matrix² deviation from identity: {} (exact involution)",
        squared.max_abs_diff(&duality::matrix::CMatrix::identity(4))
    );
    println!("control dubit is the ω₁ photon: V on it flips the ω₂ photon's polarization");
    Ok(())
}
