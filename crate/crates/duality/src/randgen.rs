//! Seeded synthesis of random states, unitaries, circuits, programs and
//! CNF formulas.
//!
//! Everything here draws from a caller-supplied [`SplitMix64`] stream, so
//! the verification suites and tests that use it are reproducible runs,
//! not fresh randomness.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::algorithms::CnfFormula;
use crate::amplitude::StateVector;
use crate::engine::{DividerSpec, DualityProgram};
use crate::gates::{Circuit, Gate, Oracle, OracleConvention};
use crate::matrix::CMatrix;
use crate::rng::SplitMix64;

/// Random sub-normalized state; squared norm lands in roughly [0.25, 1].
pub fn random_state(rng: &mut SplitMix64, n_dubits: usize) -> StateVector {
    let scale = 0.5 + 0.5 * rng.next_f64();
    scaled_random_state(rng, n_dubits, scale)
}

/// Random state of unit norm.
pub fn random_unit_state(rng: &mut SplitMix64, n_dubits: usize) -> StateVector {
    scaled_random_state(rng, n_dubits, 1.0)
}

fn scaled_random_state(rng: &mut SplitMix64, n_dubits: usize, norm: f64) -> StateVector {
    let dim = 1usize << n_dubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.next_gaussian(), rng.next_gaussian()))
        .collect();
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let factor = norm / total.sqrt();
    for a in amps.iter_mut() {
        *a *= factor;
    }
    StateVector::new(n_dubits, amps).expect("normalized construction")
}

/// Haar-ish random unitary: complex Gaussian matrix orthonormalized by
/// modified Gram-Schmidt with a re-orthogonalization pass.
pub fn random_unitary(rng: &mut SplitMix64, dim: usize) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.next_gaussian(), rng.next_gaussian()))
                .collect()
        })
        .collect();
    for k in 0..dim {
        for _pass in 0..2 {
            for j in 0..k {
                let proj: Complex64 = cols[j]
                    .iter()
                    .zip(cols[k].iter())
                    .map(|(q, v)| q.conj() * v)
                    .sum();
                let qj = cols[j].clone();
                for (v, q) in cols[k].iter_mut().zip(qj.iter()) {
                    *v -= proj * q;
                }
            }
        }
        let norm: f64 = cols[k].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[k].iter_mut() {
            *v /= norm;
        }
    }
    let mut m = CMatrix::zeros(dim);
    for (c, col) in cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            m.set(r, c, v);
        }
    }
    m
}

/// Random circuit over the gate catalog, with occasional query steps.
pub fn random_circuit(rng: &mut SplitMix64, n_dubits: usize, max_steps: usize) -> Circuit {
    let mut circuit = Circuit::new(n_dubits);
    if n_dubits == 0 {
        return circuit;
    }
    let steps = rng.next_below(max_steps + 1);
    for _ in 0..steps {
        let target = rng.next_below(n_dubits);
        match rng.next_below(8) {
            0 => circuit.add_gate(Gate::hadamard(), &[target]),
            1 => circuit.add_gate(Gate::pauli_x(), &[target]),
            2 => circuit.add_gate(Gate::pauli_z(), &[target]),
            3 => circuit.add_gate(
                Gate::rotation(rng.next_f64() * std::f64::consts::TAU),
                &[target],
            ),
            4 => circuit.add_gate(
                Gate::phase(rng.next_f64() * std::f64::consts::TAU),
                &[target],
            ),
            5 | 6 if n_dubits >= 2 => {
                let mut other = rng.next_below(n_dubits);
                if other == target {
                    other = (other + 1) % n_dubits;
                }
                circuit.add_gate(Gate::cnot(), &[target, other])
            }
            5 | 6 => circuit.add_gate(Gate::hadamard(), &[target]),
            _ => {
                let dim = 1usize << n_dubits;
                let marked: BTreeSet<usize> = (0..dim).filter(|_| rng.next_below(4) == 0).collect();
                let oracle = Oracle::from_marked(n_dubits, &marked, OracleConvention::FlipUnmarked)
                    .expect("valid oracle");
                circuit.add_oracle(oracle)
            }
        }
        .expect("targets in range");
    }
    circuit
}

/// Random program tree: single-class dividers (so coherent recombination
/// is defined), random branch counts, occasional spatial phases and
/// sequential segments.
pub fn random_program(
    rng: &mut SplitMix64,
    n_dubits: usize,
    max_depth: usize,
    max_branches: usize,
) -> DualityProgram {
    if max_depth == 0 || rng.next_below(5) < 2 {
        return DualityProgram::leaf(random_circuit(rng, n_dubits, 8));
    }
    if rng.next_below(4) == 0 {
        let items = (0..2 + rng.next_below(2))
            .map(|_| random_program(rng, n_dubits, max_depth - 1, max_branches))
            .collect();
        return DualityProgram::sequence(items).expect("non-empty sequence");
    }
    let branches = 2 + rng.next_below(max_branches.max(2) - 1);
    let spec = if rng.next_below(2) == 0 {
        DividerSpec::symmetric(branches).expect("d ≥ 2")
    } else {
        // Random positive coefficients summing to one, single class.
        let mut coeffs: Vec<f64> = (0..branches).map(|_| 0.1 + rng.next_f64()).collect();
        let total: f64 = coeffs.iter().sum();
        for c in coeffs.iter_mut() {
            *c /= total;
        }
        DividerSpec::new(
            coeffs
                .into_iter()
                .map(|c| (c, crate::engine::CoherenceTag::new("class0")))
                .collect(),
        )
        .expect("normalized single class")
    };
    let phases: Vec<f64> = (0..branches)
        .map(|_| {
            if rng.next_below(3) == 0 {
                rng.next_f64() * std::f64::consts::TAU
            } else {
                0.0
            }
        })
        .collect();
    let subtrees: Vec<DualityProgram> = (0..branches)
        .map(|_| random_program(rng, n_dubits, max_depth - 1, max_branches))
        .collect();
    DualityProgram::divider_with_phases(spec, phases, subtrees).expect("matching arity")
}

/// Random CNF formula with 1..=max_vars variables and 1..=max_clauses
/// clauses of 1..=3 distinct literals each.
pub fn random_cnf(rng: &mut SplitMix64, max_vars: usize, max_clauses: usize) -> CnfFormula {
    let n_vars = 1 + rng.next_below(max_vars);
    let n_clauses = 1 + rng.next_below(max_clauses);
    let mut clauses = Vec::with_capacity(n_clauses);
    for _ in 0..n_clauses {
        let width = 1 + rng.next_below(3.min(n_vars));
        let mut vars = BTreeSet::new();
        while vars.len() < width {
            vars.insert(1 + rng.next_below(n_vars));
        }
        let clause: Vec<i32> = vars
            .into_iter()
            .map(|v| {
                if rng.next_below(2) == 0 {
                    v as i32
                } else {
                    -(v as i32)
                }
            })
            .collect();
        clauses.push(clause);
    }
    CnfFormula::new(n_vars, clauses).expect("literals in range")
}
