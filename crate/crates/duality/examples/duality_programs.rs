//! Programs whose effective operation is a linear combination of
//! unitaries.
//!
//! A divider node splits the wave with weights pᵢ, each branch applies
//! its own circuit Uᵢ, and the combiner realizes Σᵢ pᵢUᵢ — generally not
//! unitary, which is exactly the extra power over a plain circuit.

use duality::amplitude::StateVector;
use duality::engine::{effective_operator, run_program, DividerSpec, DualityProgram};
use duality::gates::{Circuit, Gate};
use duality::matrix::CMatrix;
use duality::randgen;
use duality::rng::SplitMix64;

fn single_gate(n: usize, gate: Gate, target: usize) -> DualityProgram {
    let mut circuit = Circuit::new(n);
    circuit.add_gate(gate, &[target]).unwrap();
    DualityProgram::leaf(circuit)
}

fn main() -> duality::Result<()> {
    // (I + Z)/2 is the projector onto |0⟩: it keeps the |0⟩ component and
    // eats the |1⟩ component outright.
    let projector = DualityProgram::divider(
        DividerSpec::symmetric(2)?,
        vec![
            DualityProgram::leaf(Circuit::new(1)),
            single_gate(1, Gate::pauli_z(), 0),
        ],
    )?;
    let op = effective_operator(&projector)?;
    println!("(I+Z)/2 =");
    for r in 0..2 {
        println!(
            "  [{:+.3} {:+.3}]",
            op.matrix().get(r, 0).re,
            op.matrix().get(r, 1).re
        );
    }

    let kept = run_program(&StateVector::basis_state(1, 0)?, &projector)?;
    let eaten = run_program(&StateVector::basis_state(1, 1)?, &projector)?;
    println!("norm² of projected |0⟩: {}", kept.norm_sq());
    println!("norm² of projected |1⟩: {}", eaten.norm_sq());

    // (X + Z)/2 on |0⟩ spreads weight evenly but sub-normalized.
    let half_sum = DualityProgram::divider(
        DividerSpec::symmetric(2)?,
        vec![
            single_gate(1, Gate::pauli_x(), 0),
            single_gate(1, Gate::pauli_z(), 0),
        ],
    )?;
    let out = run_program(&StateVector::basis_state(1, 0)?, &half_sum)?;
    println!(
        "(X+Z)/2 |0⟩ = [{:.3}, {:.3}], norm² = {}",
        out.amp(0).re,
        out.amp(1).re,
        out.norm_sq()
    );

    // The half-sum of two random unitaries fails unitarity by a
    // measurable margin unless the two coincide.
    let mut rng = SplitMix64::new(5);
    let u1 = randgen::random_unitary(&mut rng, 4);
    let u2 = randgen::random_unitary(&mut rng, 4);
    let m = u1.add(&u2).scale(num_complex::Complex64::new(0.5, 0.0));
    let gram = m.dagger().mul(&m);
    println!(
        "‖M†M − I‖_max for M = (U₁+U₂)/2 of random U: {:.3}",
        gram.max_abs_diff(&CMatrix::identity(4))
    );
    Ok(())
}
