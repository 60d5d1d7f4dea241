//! Unitary gate catalog and circuit evaluation on dubit registers.
//!
//! Gates are small (one- or two-dubit) unitaries checked at construction;
//! they are embedded into the full register by index arithmetic, so
//! non-adjacent two-dubit targets cost the same as adjacent ones. Query
//! oracles are kept as diagonal ±1 sign sequences rather than dense
//! matrices.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;

use crate::amplitude::StateVector;
use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Gate matrices must satisfy ‖M†M − I‖_max below this at construction.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Dense-matrix verification paths refuse registers above this size.
pub const MATRIX_DUBIT_CAP: usize = 10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A one- or two-dubit unitary with a display label.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    label: String,
    arity: usize,
    matrix: CMatrix,
}

impl Gate {
    /// Checks arity ∈ {1, 2}, matrix dimension 2^arity, and unitarity.
    pub fn new(label: impl Into<String>, arity: usize, matrix: CMatrix) -> Result<Self> {
        let label = label.into();
        if !(1..=2).contains(&arity) {
            return Err(Error::InvalidGate(format!(
                "gate {label}: arity must be 1 or 2"
            )));
        }
        if matrix.dim() != 1 << arity {
            return Err(Error::InvalidGate(format!(
                "gate {label}: matrix dimension {} does not match arity {arity}",
                matrix.dim()
            )));
        }
        let deviation = matrix.unitarity_deviation();
        // NaN must land in the error branch too.
        if deviation.is_nan() || deviation >= UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Gate {
            label,
            arity,
            matrix,
        })
    }

    pub fn hadamard() -> Gate {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m =
            CMatrix::from_rows(&[vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]]).unwrap();
        Gate::new("H", 1, m).unwrap()
    }

    pub fn pauli_x() -> Gate {
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        Gate::new("X", 1, m).unwrap()
    }

    pub fn pauli_z() -> Gate {
        let m = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        Gate::new("Z", 1, m).unwrap()
    }

    /// Real rotation: |0⟩ ↦ cosθ|0⟩ + sinθ|1⟩, |1⟩ ↦ −sinθ|0⟩ + cosθ|1⟩.
    pub fn rotation(theta: f64) -> Gate {
        let (s, co) = theta.sin_cos();
        let m = CMatrix::from_rows(&[vec![c(co, 0.0), c(-s, 0.0)], vec![c(s, 0.0), c(co, 0.0)]])
            .unwrap();
        Gate::new(format!("R({theta})"), 1, m).unwrap()
    }

    /// Phase modulator: multiplies the state by e^{iλ}.
    pub fn phase(lambda: f64) -> Gate {
        let p = Complex64::from_polar(1.0, lambda);
        let m = CMatrix::from_rows(&[vec![p, c(0.0, 0.0)], vec![c(0.0, 0.0), p]]).unwrap();
        Gate::new(format!("P({lambda})"), 1, m).unwrap()
    }

    /// Controlled NOT; the first target is the control.
    pub fn cnot() -> Gate {
        let rows = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ];
        let m = CMatrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        Gate::new("CNOT", 2, m).unwrap()
    }

    /// Catalog lookup by mnemonic, for the program text format.
    /// `R` takes θ, `P` takes λ; the others take no parameters.
    pub fn by_name(name: &str, params: &[f64]) -> Result<Gate> {
        let expect = |k: usize| -> Result<()> {
            if params.len() != k {
                Err(Error::InvalidGate(format!(
                    "gate {name} takes {k} parameter(s), got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        match name {
            "H" => expect(0).map(|_| Gate::hadamard()),
            "X" => expect(0).map(|_| Gate::pauli_x()),
            "Z" => expect(0).map(|_| Gate::pauli_z()),
            "CNOT" => expect(0).map(|_| Gate::cnot()),
            "R" => expect(1).map(|_| Gate::rotation(params[0])),
            "P" => expect(1).map(|_| Gate::phase(params[0])),
            other => Err(Error::InvalidGate(format!("unknown gate name {other}"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// A gate bound to concrete target dubits.
#[derive(Clone, Debug)]
pub struct GateInstance {
    gate: Gate,
    targets: Vec<usize>,
}

impl GateInstance {
    pub fn new(gate: Gate, targets: &[usize]) -> Result<Self> {
        if targets.len() != gate.arity() {
            return Err(Error::InvalidGate(format!(
                "gate {} expects {} target(s), got {}",
                gate.label(),
                gate.arity(),
                targets.len()
            )));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::InvalidGate(format!(
                "gate {} targets collide on dubit {}",
                gate.label(),
                targets[0]
            )));
        }
        Ok(GateInstance {
            gate,
            targets: targets.to_vec(),
        })
    }

    pub fn gate(&self) -> &Gate {
        &self.gate
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
}

/// Which diagonal entries the query negates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleConvention {
    /// Negate every basis state except the marked ones (the query used by
    /// the single-query search).
    FlipUnmarked,
    /// Negate exactly the marked basis states (the form used to delete a
    /// found solution).
    FlipMarked,
}

/// Declarative marked-set oracle description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSpec {
    pub n_dubits: usize,
    pub marked: BTreeSet<usize>,
    pub convention: OracleConvention,
}

impl OracleSpec {
    pub fn new(
        n_dubits: usize,
        marked: impl IntoIterator<Item = usize>,
        convention: OracleConvention,
    ) -> Self {
        OracleSpec {
            n_dubits,
            marked: marked.into_iter().collect(),
            convention,
        }
    }

    pub fn operator(&self) -> Result<Oracle> {
        oracle_gate(self)
    }
}

/// Diagonal ±1 operator stored as a sign sequence; unitary and
/// self-inverse by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Oracle {
    n_dubits: usize,
    signs: Arc<Vec<i8>>,
    marked_count: usize,
}

impl Oracle {
    pub fn from_marked(
        n_dubits: usize,
        marked: &BTreeSet<usize>,
        convention: OracleConvention,
    ) -> Result<Self> {
        let dim = oracle_dim(n_dubits)?;
        if let Some(&bad) = marked.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        Self::from_predicate(n_dubits, convention, |i| marked.contains(&i))
    }

    /// Builds the diagonal by evaluating `is_marked` once per basis index;
    /// no marked set is materialized.
    pub fn from_predicate(
        n_dubits: usize,
        convention: OracleConvention,
        is_marked: impl Fn(usize) -> bool,
    ) -> Result<Self> {
        let dim = oracle_dim(n_dubits)?;
        let mut signs = Vec::with_capacity(dim);
        let mut marked_count = 0usize;
        for i in 0..dim {
            let m = is_marked(i);
            marked_count += m as usize;
            let sign = match convention {
                OracleConvention::FlipUnmarked => {
                    if m {
                        1
                    } else {
                        -1
                    }
                }
                OracleConvention::FlipMarked => {
                    if m {
                        -1
                    } else {
                        1
                    }
                }
            };
            signs.push(sign);
        }
        Ok(Oracle {
            n_dubits,
            signs: Arc::new(signs),
            marked_count,
        })
    }

    pub fn n_dubits(&self) -> usize {
        self.n_dubits
    }

    pub fn marked_count(&self) -> usize {
        self.marked_count
    }

    pub fn sign(&self, index: usize) -> f64 {
        f64::from(self.signs[index])
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_dubits() != self.n_dubits {
            return Err(Error::DimensionMismatch {
                left: self.n_dubits,
                right: state.n_dubits(),
            });
        }
        let amps = state
            .amplitudes()
            .iter()
            .zip(self.signs.iter())
            .map(|(a, &s)| a * f64::from(s))
            .collect();
        Ok(StateVector::from_amps_unchecked(self.n_dubits, amps))
    }

    pub fn matrix(&self) -> CMatrix {
        let dim = self.signs.len();
        let mut m = CMatrix::zeros(dim);
        for (i, &s) in self.signs.iter().enumerate() {
            m.set(i, i, c(f64::from(s), 0.0));
        }
        m
    }
}

fn oracle_dim(n_dubits: usize) -> Result<usize> {
    if n_dubits == 0 {
        return Err(Error::EmptyRegister);
    }
    if n_dubits > crate::amplitude::DEFAULT_DUBIT_CAP {
        return Err(Error::RegisterTooLarge {
            n_dubits,
            cap: crate::amplitude::DEFAULT_DUBIT_CAP,
        });
    }
    Ok(1usize << n_dubits)
}

/// The marked-set query operator. The default paper convention is
/// `FlipUnmarked`; `FlipMarked` differs from it only by a global −1.
pub fn oracle_gate(spec: &OracleSpec) -> Result<Oracle> {
    Oracle::from_marked(spec.n_dubits, &spec.marked, spec.convention)
}

/// One circuit step: an embedded small unitary or a full-register query.
#[derive(Clone, Debug)]
pub enum Step {
    Gate(GateInstance),
    Oracle(Oracle),
}

/// A sequence of steps on a fixed-size register, applied first to last.
#[derive(Clone, Debug, Default)]
pub struct Circuit {
    n_dubits: usize,
    steps: Vec<Step>,
}

impl Circuit {
    pub fn new(n_dubits: usize) -> Self {
        Circuit {
            n_dubits,
            steps: Vec::new(),
        }
    }

    pub fn n_dubits(&self) -> usize {
        self.n_dubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn add_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<&mut Self> {
        let inst = GateInstance::new(gate, targets)?;
        self.check_targets(inst.targets())?;
        self.steps.push(Step::Gate(inst));
        Ok(self)
    }

    pub fn add_oracle(&mut self, oracle: Oracle) -> Result<&mut Self> {
        if oracle.n_dubits() != self.n_dubits {
            return Err(Error::DimensionMismatch {
                left: self.n_dubits,
                right: oracle.n_dubits(),
            });
        }
        self.steps.push(Step::Oracle(oracle));
        Ok(self)
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for &t in targets {
            if t >= self.n_dubits {
                return Err(Error::IndexOutOfRange {
                    index: t,
                    dim: self.n_dubits,
                });
            }
        }
        Ok(())
    }

    /// H on every dubit: |0…0⟩ ↦ 2^{-n/2} Σ|i⟩.
    pub fn walsh_hadamard(n_dubits: usize) -> Circuit {
        let mut circuit = Circuit::new(n_dubits);
        for t in 0..n_dubits {
            circuit
                .add_gate(Gate::hadamard(), &[t])
                .expect("targets in range");
        }
        circuit
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        apply_circuit(state, self)
    }
}

/// Embeds `inst`'s matrix at its targets and applies it. Dubit 0 is the
/// most significant index bit.
pub fn apply_gate(state: &StateVector, inst: &GateInstance) -> Result<StateVector> {
    apply_gate_threaded(state, inst, 1)
}

pub(crate) fn apply_gate_threaded(
    state: &StateVector,
    inst: &GateInstance,
    threads: usize,
) -> Result<StateVector> {
    let n = state.n_dubits();
    for &t in inst.targets() {
        if t >= n {
            return Err(Error::IndexOutOfRange { index: t, dim: n });
        }
    }
    let m = inst.gate().matrix();
    let amps = state.amplitudes();
    let out = match inst.targets() {
        [t] => {
            let mask = 1usize << (n - 1 - t);
            map_indexed(amps, threads, |j, a| {
                let row = usize::from(j & mask != 0);
                m.get(row, 0) * a[j & !mask] + m.get(row, 1) * a[j | mask]
            })
        }
        [t0, t1] => {
            let m0 = 1usize << (n - 1 - t0);
            let m1 = 1usize << (n - 1 - t1);
            map_indexed(amps, threads, |j, a| {
                let row = (usize::from(j & m0 != 0) << 1) | usize::from(j & m1 != 0);
                let base = j & !(m0 | m1);
                let mut acc = Complex64::new(0.0, 0.0);
                for col in 0..4 {
                    let src = base
                        | if col & 2 != 0 { m0 } else { 0 }
                        | if col & 1 != 0 { m1 } else { 0 };
                    acc += m.get(row, col) * a[src];
                }
                acc
            })
        }
        other => {
            return Err(Error::InvalidGate(format!(
                "unsupported arity {}",
                other.len()
            )));
        }
    };
    Ok(StateVector::from_amps_unchecked(n, out))
}

/// Computes `f(j, input)` for every output index j, optionally splitting
/// the index space over worker threads. Each output element is produced
/// by the same arithmetic expression regardless of the split, so results
/// are bit-identical for every thread count.
fn map_indexed<F>(amps: &[Complex64], threads: usize, f: F) -> Vec<Complex64>
where
    F: Fn(usize, &[Complex64]) -> Complex64 + Sync,
{
    let len = amps.len();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let threads = threads.max(1).min(len.max(1));
    if threads == 1 || len < 1024 {
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = f(j, amps);
        }
        return out;
    }
    let chunk = len.div_ceil(threads);
    std::thread::scope(|scope| {
        for (idx, slice) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            let start = idx * chunk;
            scope.spawn(move || {
                for (offset, slot) in slice.iter_mut().enumerate() {
                    *slot = f(start + offset, amps);
                }
            });
        }
    });
    out
}

/// Left fold of the steps over the input state.
pub fn apply_circuit(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    apply_circuit_counted(state, circuit, 1, &mut 0)
}

pub(crate) fn apply_circuit_counted(
    state: &StateVector,
    circuit: &Circuit,
    threads: usize,
    oracle_queries: &mut u64,
) -> Result<StateVector> {
    if state.n_dubits() != circuit.n_dubits() {
        return Err(Error::DimensionMismatch {
            left: circuit.n_dubits(),
            right: state.n_dubits(),
        });
    }
    let mut current = state.clone();
    for step in circuit.steps() {
        current = match step {
            Step::Gate(inst) => apply_gate_threaded(&current, inst, threads)?,
            Step::Oracle(oracle) => {
                *oracle_queries += 1;
                oracle.apply(&current)?
            }
        };
    }
    Ok(current)
}

/// Dense 2^n × 2^n product of the embedded step matrices, for
/// verification at small n (≤ `MATRIX_DUBIT_CAP`).
pub fn circuit_matrix(circuit: &Circuit) -> Result<CMatrix> {
    let n = circuit.n_dubits();
    if n > MATRIX_DUBIT_CAP {
        return Err(Error::RegisterTooLarge {
            n_dubits: n,
            cap: MATRIX_DUBIT_CAP,
        });
    }
    let dim = 1usize << n;
    let mut columns = Vec::with_capacity(dim);
    for col in 0..dim {
        let basis = StateVector::basis_state(n, col)?;
        columns.push(apply_circuit(&basis, circuit)?);
    }
    let mut m = CMatrix::zeros(dim);
    for (colno, col) in columns.iter().enumerate() {
        for row in 0..dim {
            m.set(row, colno, col.amp(row));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randgen;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn rotation_by_quarter_turn_maps_zero_to_one() {
        let state = StateVector::basis_state(1, 0).unwrap();
        let inst = GateInstance::new(Gate::rotation(PI / 2.0), &[0]).unwrap();
        let out = apply_gate(&state, &inst).unwrap();
        assert!(out.amp(0).norm() < 1e-12);
        assert!((out.amp(1) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phase_gate_multiplies_by_global_phase() {
        let mut rng = SplitMix64::new(3);
        let state = randgen::random_state(&mut rng, 2);
        let lambda = 0.7;
        let inst = GateInstance::new(Gate::phase(lambda), &[1]).unwrap();
        let out = apply_gate(&state, &inst).unwrap();
        let factor = Complex64::from_polar(1.0, lambda);
        for i in 0..4 {
            assert!((out.amp(i) - factor * state.amp(i)).norm() < 1e-15);
        }
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let state = StateVector::basis_state(2, 2).unwrap(); // |10⟩
        let inst = GateInstance::new(Gate::cnot(), &[0, 1]).unwrap();
        let out = apply_gate(&state, &inst).unwrap();
        assert_eq!(out.amp(3), Complex64::new(1.0, 0.0)); // |11⟩
    }

    #[test]
    fn cnot_on_superposed_control() {
        // (|00⟩+|10⟩)/√2 ↦ (|00⟩+|11⟩)/√2
        let h = FRAC_1_SQRT_2;
        let state = StateVector::new(
            2,
            vec![
                Complex64::new(h, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let inst = GateInstance::new(Gate::cnot(), &[0, 1]).unwrap();
        let out = apply_gate(&state, &inst).unwrap();
        assert!((out.amp(0).re - h).abs() < 1e-15);
        assert!((out.amp(3).re - h).abs() < 1e-15);
        assert!(out.amp(1).norm() < 1e-15);
        assert!(out.amp(2).norm() < 1e-15);
    }

    #[test]
    fn hadamard_on_most_significant_dubit() {
        let state = StateVector::basis_state(2, 0).unwrap();
        let inst = GateInstance::new(Gate::hadamard(), &[0]).unwrap();
        let out = apply_gate(&state, &inst).unwrap();
        assert_eq!(out.amp(0).re, FRAC_1_SQRT_2);
        assert_eq!(out.amp(2).re, FRAC_1_SQRT_2);
        assert_eq!(out.amp(1).norm(), 0.0);
    }

    #[test]
    fn x_on_least_significant_dubit_is_bit_flip() {
        let state = StateVector::basis_state(2, 0).unwrap();
        let inst = GateInstance::new(Gate::pauli_x(), &[1]).unwrap();
        let out = apply_gate(&state, &inst).unwrap();
        assert_eq!(out.amp(1), Complex64::new(1.0, 0.0)); // |01⟩
    }

    #[test]
    fn gate_instance_rejects_colliding_or_missing_targets() {
        assert!(GateInstance::new(Gate::cnot(), &[1, 1]).is_err());
        assert!(GateInstance::new(Gate::cnot(), &[0]).is_err());
        let state = StateVector::basis_state(1, 0).unwrap();
        let inst = GateInstance::new(Gate::pauli_x(), &[3]).unwrap();
        assert!(apply_gate(&state, &inst).is_err());
    }

    #[test]
    fn by_name_rejects_unknown_and_wrong_params() {
        assert!(Gate::by_name("Q", &[]).is_err());
        assert!(Gate::by_name("R", &[]).is_err());
        assert!(Gate::by_name("H", &[1.0]).is_err());
        assert!(Gate::by_name("R", &[0.3]).is_ok());
    }

    #[test]
    fn empty_circuit_is_identity() {
        let mut rng = SplitMix64::new(5);
        let state = randgen::random_state(&mut rng, 3);
        let out = apply_circuit(&state, &Circuit::new(3)).unwrap();
        assert_eq!(out, state);
    }

    #[test]
    fn double_hadamard_restores_input() {
        let mut circuit = Circuit::new(1);
        circuit.add_gate(Gate::hadamard(), &[0]).unwrap();
        circuit.add_gate(Gate::hadamard(), &[0]).unwrap();
        let state = StateVector::basis_state(1, 0).unwrap();
        let out = circuit.apply(&state).unwrap();
        assert!(out.max_abs_diff(&state) < 1e-15);
    }

    #[test]
    fn walsh_hadamard_prepares_uniform_state() {
        let state = StateVector::basis_state(2, 0).unwrap();
        let out = Circuit::walsh_hadamard(2).apply(&state).unwrap();
        for i in 0..4 {
            assert!(
                (out.amp(i).re - 0.5).abs() < 1e-12,
                "amp {i} = {}",
                out.amp(i)
            );
            assert!(out.amp(i).im == 0.0);
        }
    }

    #[test]
    fn oracle_flips_unmarked_coefficients() {
        // Uniform half-weight state over N = 4, marked item 2.
        let s = 0.25;
        let state = StateVector::new(2, vec![Complex64::new(s, 0.0); 4]).unwrap();
        let spec = OracleSpec::new(2, [2], OracleConvention::FlipUnmarked);
        let out = spec.operator().unwrap().apply(&state).unwrap();
        let expect = [-s, -s, s, -s];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(out.amp(i).re, e);
        }
    }

    #[test]
    fn oracle_with_all_indices_marked_is_identity() {
        let spec = OracleSpec::new(2, 0..4, OracleConvention::FlipUnmarked);
        let oracle = spec.operator().unwrap();
        let mut rng = SplitMix64::new(11);
        let state = randgen::random_state(&mut rng, 2);
        assert_eq!(oracle.apply(&state).unwrap(), state);
    }

    #[test]
    fn opposite_conventions_compose_to_global_negation() {
        let unmarked = OracleSpec::new(2, [1], OracleConvention::FlipUnmarked)
            .operator()
            .unwrap();
        let marked = OracleSpec::new(2, [1], OracleConvention::FlipMarked)
            .operator()
            .unwrap();
        let product = unmarked.matrix().mul(&marked.matrix());
        let minus_i = CMatrix::identity(4).scale(Complex64::new(-1.0, 0.0));
        assert!(product.max_abs_diff(&minus_i) == 0.0);
    }

    #[test]
    fn oracle_rejects_empty_register_and_bad_index() {
        assert_eq!(
            OracleSpec::new(0, [0], OracleConvention::FlipUnmarked).operator(),
            Err(Error::EmptyRegister)
        );
        assert!(OracleSpec::new(1, [5], OracleConvention::FlipUnmarked)
            .operator()
            .is_err());
    }

    #[test]
    fn oracle_is_self_inverse_exactly() {
        let oracle = OracleSpec::new(3, [1, 4], OracleConvention::FlipUnmarked)
            .operator()
            .unwrap();
        let mut rng = SplitMix64::new(17);
        let state = randgen::random_state(&mut rng, 3);
        let back = oracle.apply(&oracle.apply(&state).unwrap()).unwrap();
        assert_eq!(back, state);
    }

    #[test]
    fn circuit_matrix_of_empty_circuit_is_identity() {
        let m = circuit_matrix(&Circuit::new(2)).unwrap();
        assert!(m.max_abs_diff(&CMatrix::identity(4)) == 0.0);
    }

    #[test]
    fn circuit_matrix_of_single_cnot_is_cnot() {
        let mut circuit = Circuit::new(2);
        circuit.add_gate(Gate::cnot(), &[0, 1]).unwrap();
        let m = circuit_matrix(&circuit).unwrap();
        assert!(m.max_abs_diff(Gate::cnot().matrix()) == 0.0);
    }

    #[test]
    fn involution_gives_identity_matrix() {
        let mut circuit = Circuit::new(1);
        circuit.add_gate(Gate::pauli_x(), &[0]).unwrap();
        circuit.add_gate(Gate::pauli_x(), &[0]).unwrap();
        let m = circuit_matrix(&circuit).unwrap();
        assert!(m.max_abs_diff(&CMatrix::identity(2)) == 0.0);
    }

    #[test]
    fn circuit_matrix_refuses_large_registers() {
        assert!(matches!(
            circuit_matrix(&Circuit::new(MATRIX_DUBIT_CAP + 1)),
            Err(Error::RegisterTooLarge { .. })
        ));
    }

    #[test]
    fn threaded_application_is_bit_identical() {
        let mut rng = SplitMix64::new(23);
        let state = randgen::random_state(&mut rng, 11);
        let circuit = randgen::random_circuit(&mut rng, 11, 20);
        let seq = apply_circuit_counted(&state, &circuit, 1, &mut 0).unwrap();
        let par = apply_circuit_counted(&state, &circuit, 4, &mut 0).unwrap();
        assert_eq!(seq, par);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn catalog_gates_are_unitary(theta in 0.0..std::f64::consts::TAU, lambda in 0.0..std::f64::consts::TAU) {
            for gate in [
                Gate::hadamard(),
                Gate::pauli_x(),
                Gate::pauli_z(),
                Gate::cnot(),
                Gate::rotation(theta),
                Gate::phase(lambda),
            ] {
                prop_assert!(gate.matrix().unitarity_deviation() < UNITARITY_TOLERANCE);
            }
        }

        #[test]
        fn circuit_application_matches_dense_matrix(seed in any::<u64>()) {
            let mut rng = SplitMix64::new(seed);
            let n = 1 + rng.next_below(4);
            let circuit = randgen::random_circuit(&mut rng, n, 12);
            let state = randgen::random_state(&mut rng, n);
            let via_kernel = apply_circuit(&state, &circuit).unwrap();
            let via_matrix = circuit_matrix(&circuit).unwrap().mul_vec(state.amplitudes());
            for (a, b) in via_kernel.amplitudes().iter().zip(via_matrix.iter()) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }

        #[test]
        fn circuits_preserve_norm(seed in any::<u64>()) {
            let mut rng = SplitMix64::new(seed);
            let n = 1 + rng.next_below(5);
            let circuit = randgen::random_circuit(&mut rng, n, 30);
            let state = randgen::random_state(&mut rng, n);
            let out = apply_circuit(&state, &circuit).unwrap();
            prop_assert!((out.norm_sq() - state.norm_sq()).abs() < 1e-10);
        }
    }
}
