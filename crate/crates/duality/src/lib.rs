//! State-vector simulator for wave-division computing.
//!
//! The register's wave can be divided into weighted sub-waves, each path
//! evolved by its own unitary circuit, and the paths recombined into a
//! generally sub-normalized linear combination of unitaries acting on the
//! input. On top of that engine sit the single-query unsorted search, a
//! satisfiability solver with solution-deletion enumeration, three
//! read-out models for sub-normalized states, and an exact algebra of
//! photonic components (beamsplitters, modulators, frequency
//! conversions) that realizes the same machinery optically.
//!
//! Start with the runnable examples (`cargo run --example
//! single_query_search`), or the [`engine`] module for the core
//! divide/evolve/combine semantics. The `duality` binary exposes program
//! files, the built-in algorithms and the verification suites on the
//! command line.
//!
//! ```
//! use duality::amplitude::StateVector;
//! use duality::engine::{self, DividerSpec, DualityProgram};
//! use duality::gates::{Circuit, Gate};
//!
//! // (I + Z)/2 on |1⟩: total cancellation.
//! let mut z = Circuit::new(1);
//! z.add_gate(Gate::pauli_z(), &[0]).unwrap();
//! let program = DualityProgram::divider(
//!     DividerSpec::symmetric(2).unwrap(),
//!     vec![
//!         DualityProgram::leaf(Circuit::new(1)),
//!         DualityProgram::leaf(z),
//!     ],
//! )
//! .unwrap();
//! let input = StateVector::basis_state(1, 1).unwrap();
//! let out = engine::run_program(&input, &program).unwrap();
//! assert_eq!(out.norm_sq(), 0.0);
//! ```

pub mod algorithms;
pub mod amplitude;
pub mod engine;
pub mod error;
pub mod gates;
pub mod matrix;
pub mod measurement;
pub mod optics;
pub mod program;
pub mod randgen;
pub mod report;
pub mod rng;

pub use amplitude::StateVector;
pub use engine::{DividerSpec, DualityProgram, SubWave};
pub use error::{Error, Result};
pub use gates::{Circuit, Gate};
pub use measurement::{MeasurementOutcome, MeasurementPolicy};
