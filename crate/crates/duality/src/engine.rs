//! Wave division, per-path evolution and recombination.
//!
//! The register's wave can be divided into weighted sub-waves that each
//! carry an identical copy of the internal state, evolved by a different
//! circuit per path, and coherently recombined. The net effect on the
//! internal state is Σᵢ pᵢUᵢ — generally non-unitary, so outputs are
//! sub-normalized. Paths that are distinguishable (different coherence
//! tags) do not interfere; their read-out adds as intensities instead,
//! via [`detection_intensity`].

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::amplitude::StateVector;
use crate::error::{Error, Result};
use crate::gates::{self, Circuit};
use crate::matrix::CMatrix;

/// Normalization slack for divider coefficient classes.
pub const DIVIDER_TOLERANCE: f64 = 1e-9;

/// Opaque equality-compared label for a path's distinguishability class.
/// Equal tags interfere coherently; distinct tags add as intensities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoherenceTag(String);

impl CoherenceTag {
    pub fn new(label: impl Into<String>) -> Self {
        CoherenceTag(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for CoherenceTag {
    fn from(s: &str) -> Self {
        CoherenceTag(s.to_string())
    }
}

/// One path's share of the total wave: a non-negative coefficient, the
/// spatial phase it carries at the combiner, its coherence class, and an
/// internal state.
#[derive(Clone, Debug)]
pub struct SubWave {
    pub coeff: f64,
    pub spatial_phase: f64,
    pub tag: CoherenceTag,
    pub state: StateVector,
}

impl SubWave {
    pub fn new(
        coeff: f64,
        spatial_phase: f64,
        tag: CoherenceTag,
        state: StateVector,
    ) -> Result<Self> {
        if !(coeff >= 0.0 && coeff.is_finite()) {
            return Err(Error::InvalidDivider(format!(
                "sub-wave coefficient {coeff} must be ≥ 0"
            )));
        }
        Ok(SubWave {
            coeff,
            spatial_phase: wrap_phase(spatial_phase),
            tag,
            state,
        })
    }

    /// The same sub-wave with its internal state run through `circuit`.
    pub fn evolved(&self, circuit: &Circuit) -> Result<SubWave> {
        Ok(SubWave {
            state: circuit.apply(&self.state)?,
            ..self.clone()
        })
    }

    pub fn with_phase(mut self, spatial_phase: f64) -> SubWave {
        self.spatial_phase = wrap_phase(spatial_phase);
        self
    }

    /// coeff · e^{i·phase}, the spatial factor this path contributes.
    pub fn spatial_factor(&self) -> Complex64 {
        self.coeff * Complex64::from_polar(1.0, self.spatial_phase)
    }
}

fn wrap_phase(phase: f64) -> f64 {
    phase.rem_euclid(std::f64::consts::TAU)
}

/// Weighted branch plan for a divider. Coefficients are grouped into
/// coherence classes; each class g with member coefficients {aᵢ} carries
/// intensity w_g = (Σᵢ aᵢ)², and the classes must satisfy Σ_g w_g = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DividerSpec {
    branches: Vec<(f64, CoherenceTag)>,
}

impl DividerSpec {
    pub fn new(branches: Vec<(f64, CoherenceTag)>) -> Result<Self> {
        if branches.len() < 2 {
            return Err(Error::InvalidDivider(format!(
                "a divider needs at least 2 branches, got {}",
                branches.len()
            )));
        }
        if let Some((bad, _)) = branches.iter().find(|(a, _)| !(*a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidDivider(format!(
                "branch coefficient {bad} must be ≥ 0"
            )));
        }
        let mut class_sums: BTreeMap<&CoherenceTag, f64> = BTreeMap::new();
        for (coeff, tag) in &branches {
            *class_sums.entry(tag).or_insert(0.0) += coeff;
        }
        let total: f64 = class_sums.values().map(|s| s * s).sum();
        if (total - 1.0).abs() > DIVIDER_TOLERANCE {
            return Err(Error::InvalidDivider(format!(
                "normalization violated: Σ_g (Σ_i a_i)² = {total}, expected 1"
            )));
        }
        Ok(DividerSpec { branches })
    }

    /// `d` indistinguishable branches of coefficient 1/d each.
    pub fn symmetric(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDivider(format!(
                "symmetric divider needs d ≥ 2, got {d}"
            )));
        }
        let coeff = 1.0 / d as f64;
        let tag = CoherenceTag::new("class0");
        Self::new(vec![(coeff, tag); d])
    }

    /// Groups of mutually-coherent branches: group g of weight w_g and
    /// path count k_g contributes k_g branches of coefficient √(w_g)/k_g
    /// under a fresh tag. A three-slit wall with one distinguishable slit
    /// is `[(1/3, 1), (2/3, 2)]`.
    pub fn grouped(groups: &[(f64, usize)]) -> Result<Self> {
        let weight_sum: f64 = groups.iter().map(|(w, _)| w).sum();
        if (weight_sum - 1.0).abs() > DIVIDER_TOLERANCE {
            return Err(Error::InvalidDivider(format!(
                "group weights sum to {weight_sum}, expected 1"
            )));
        }
        let mut branches = Vec::new();
        for (g, &(weight, paths)) in groups.iter().enumerate() {
            if paths == 0 {
                return Err(Error::InvalidDivider("group with zero paths".into()));
            }
            if weight < 0.0 {
                return Err(Error::InvalidDivider(format!(
                    "group weight {weight} must be ≥ 0"
                )));
            }
            let coeff = weight.sqrt() / paths as f64;
            let tag = CoherenceTag::new(format!("class{g}"));
            branches.extend(std::iter::repeat_n((coeff, tag), paths));
        }
        Self::new(branches)
    }

    pub fn branches(&self) -> &[(f64, CoherenceTag)] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// True when every branch shares one coherence tag, the condition for
    /// coherent recombination.
    pub fn single_class(&self) -> bool {
        self.branches.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

/// Splits a wave into one sub-wave per branch. Every sub-wave carries an
/// identical copy of the input state, at spatial phase 0.
pub fn divide(state: &StateVector, spec: &DividerSpec) -> Vec<SubWave> {
    spec.branches
        .iter()
        .map(|(coeff, tag)| SubWave {
            coeff: *coeff,
            spatial_phase: 0.0,
            tag: tag.clone(),
            state: state.clone(),
        })
        .collect()
}

/// Coherent recombination: Σᵢ coeffᵢ·e^{i·phaseᵢ}·stateᵢ. All sub-waves
/// must share one coherence tag; mixed-tag sets do not interfere and must
/// be read out through [`detection_intensity`] instead.
pub fn combine(subwaves: &[SubWave]) -> Result<StateVector> {
    if subwaves.is_empty() {
        return Err(Error::InvalidDivider(
            "cannot combine zero sub-waves".into(),
        ));
    }
    let first = &subwaves[0];
    let n = first.state.n_dubits();
    for sub in subwaves {
        if sub.state.n_dubits() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: sub.state.n_dubits(),
            });
        }
        if sub.tag != first.tag {
            return Err(Error::MixedCoherenceTags);
        }
    }
    let dim = first.state.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for sub in subwaves {
        let factor = sub.spatial_factor();
        for (slot, amp) in amps.iter_mut().zip(sub.state.amplitudes()) {
            *slot += factor * amp;
        }
    }
    StateVector::new(n, amps)
}

/// Probability of registering the outcome at one basis index: coherent
/// within each tag class, incoherent across classes —
/// Σ_g |Σ_{i∈g} coeffᵢ·e^{iφᵢ}·stateᵢ\[outcome\]|².
pub fn detection_intensity(subwaves: &[SubWave], outcome: usize) -> Result<f64> {
    if subwaves.is_empty() {
        return Ok(0.0);
    }
    let n = subwaves[0].state.n_dubits();
    let dim = subwaves[0].state.dim();
    if outcome >= dim {
        return Err(Error::IndexOutOfRange {
            index: outcome,
            dim,
        });
    }
    let mut per_class: BTreeMap<&CoherenceTag, Complex64> = BTreeMap::new();
    for sub in subwaves {
        if sub.state.n_dubits() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: sub.state.n_dubits(),
            });
        }
        *per_class
            .entry(&sub.tag)
            .or_insert(Complex64::new(0.0, 0.0)) += sub.spatial_factor() * sub.state.amp(outcome);
    }
    Ok(per_class.values().map(|v| v.norm_sqr()).sum())
}

/// A program tree: leaves are circuit segments, internal nodes divide the
/// wave, evaluate one subtree per branch and recombine.
#[derive(Clone, Debug)]
pub enum DualityProgram {
    Circuit(Circuit),
    Divider {
        spec: DividerSpec,
        /// Spatial phase per branch, applied at the combiner.
        phases: Vec<f64>,
        branches: Vec<DualityProgram>,
    },
    Sequence(Vec<DualityProgram>),
}

impl DualityProgram {
    pub fn leaf(circuit: Circuit) -> Self {
        DualityProgram::Circuit(circuit)
    }

    /// Divider node with all spatial phases zero (equal path lengths).
    pub fn divider(spec: DividerSpec, branches: Vec<DualityProgram>) -> Result<Self> {
        let phases = vec![0.0; spec.len()];
        Self::divider_with_phases(spec, phases, branches)
    }

    pub fn divider_with_phases(
        spec: DividerSpec,
        phases: Vec<f64>,
        branches: Vec<DualityProgram>,
    ) -> Result<Self> {
        if branches.len() != spec.len() || phases.len() != spec.len() {
            return Err(Error::InvalidDivider(format!(
                "divider of {} branches got {} subtrees and {} phases",
                spec.len(),
                branches.len(),
                phases.len()
            )));
        }
        let node = DualityProgram::Divider {
            spec,
            phases,
            branches,
        };
        node.dubit_count()?;
        Ok(node)
    }

    pub fn sequence(items: Vec<DualityProgram>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidDivider("empty program sequence".into()));
        }
        let node = DualityProgram::Sequence(items);
        node.dubit_count()?;
        Ok(node)
    }

    /// Register size, checking that every subtree agrees on it.
    pub fn dubit_count(&self) -> Result<usize> {
        match self {
            DualityProgram::Circuit(c) => Ok(c.n_dubits()),
            DualityProgram::Divider { branches, .. } | DualityProgram::Sequence(branches) => {
                let mut n = None;
                for b in branches {
                    let bn = b.dubit_count()?;
                    match n {
                        None => n = Some(bn),
                        Some(prev) if prev != bn => {
                            return Err(Error::DimensionMismatch {
                                left: prev,
                                right: bn,
                            });
                        }
                        _ => {}
                    }
                }
                n.ok_or_else(|| Error::InvalidDivider("node with no subtrees".into()))
            }
        }
    }

    /// Total number of query-operator steps in the tree (counting each
    /// leaf occurrence once, independent of evaluation).
    pub fn oracle_step_count(&self) -> u64 {
        match self {
            DualityProgram::Circuit(c) => c
                .steps()
                .iter()
                .filter(|s| matches!(s, gates::Step::Oracle(_)))
                .count() as u64,
            DualityProgram::Divider { branches, .. } | DualityProgram::Sequence(branches) => {
                branches.iter().map(|b| b.oracle_step_count()).sum()
            }
        }
    }
}

/// Evaluation settings. `threads` splits gate kernels over disjoint index
/// ranges; the output is bit-identical for every thread count.
#[derive(Clone, Copy, Debug)]
pub struct Evaluation {
    pub threads: usize,
}

impl Default for Evaluation {
    fn default() -> Self {
        Evaluation { threads: 1 }
    }
}

/// Result of a program evaluation with bookkeeping.
#[derive(Clone, Debug)]
pub struct Evaluated {
    pub state: StateVector,
    /// Number of times a query diagonal was applied to a state.
    pub oracle_queries: u64,
}

impl Evaluation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn run(&self, program: &DualityProgram, input: &StateVector) -> Result<Evaluated> {
        let n = program.dubit_count()?;
        if n != input.n_dubits() {
            return Err(Error::DimensionMismatch {
                left: n,
                right: input.n_dubits(),
            });
        }
        let mut oracle_queries = 0u64;
        let state = self.eval(program, input, &mut oracle_queries)?;
        Ok(Evaluated {
            state,
            oracle_queries,
        })
    }

    fn eval(
        &self,
        program: &DualityProgram,
        input: &StateVector,
        oracle_queries: &mut u64,
    ) -> Result<StateVector> {
        match program {
            DualityProgram::Circuit(c) => {
                gates::apply_circuit_counted(input, c, self.threads, oracle_queries)
            }
            DualityProgram::Sequence(items) => {
                let mut current = input.clone();
                for item in items {
                    current = self.eval(item, &current, oracle_queries)?;
                }
                Ok(current)
            }
            DualityProgram::Divider {
                spec,
                phases,
                branches,
            } => {
                let subwaves = divide(input, spec);
                let mut evolved = Vec::with_capacity(subwaves.len());
                for ((sub, branch), &phase) in
                    subwaves.into_iter().zip(branches.iter()).zip(phases.iter())
                {
                    let state = self.eval(branch, &sub.state, oracle_queries)?;
                    evolved.push(SubWave { state, ..sub }.with_phase(phase));
                }
                combine(&evolved)
            }
        }
    }
}

/// Depth-first evaluation: leaves apply their circuit, divider nodes
/// divide, recurse per branch and recombine.
pub fn run_program(input: &StateVector, program: &DualityProgram) -> Result<StateVector> {
    Evaluation::default().run(program, input).map(|e| e.state)
}

/// The program's effective linear operator Σᵢ pᵢe^{iφᵢ}Uᵢ (nested
/// accordingly), as a dense matrix.
#[derive(Clone, Debug)]
pub struct EffectiveOperator(CMatrix);

impl EffectiveOperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// Dense effective operator for verification at small n: leaves map to
/// their circuit matrix, divider nodes to the phase-weighted sum of their
/// branch operators, sequences to the product.
pub fn effective_operator(program: &DualityProgram) -> Result<EffectiveOperator> {
    let n = program.dubit_count()?;
    if n > gates::MATRIX_DUBIT_CAP {
        return Err(Error::RegisterTooLarge {
            n_dubits: n,
            cap: gates::MATRIX_DUBIT_CAP,
        });
    }
    operator_of(program).map(EffectiveOperator)
}

fn operator_of(program: &DualityProgram) -> Result<CMatrix> {
    match program {
        DualityProgram::Circuit(c) => gates::circuit_matrix(c),
        DualityProgram::Sequence(items) => {
            let dim = 1usize << program.dubit_count()?;
            let mut acc = CMatrix::identity(dim);
            for item in items {
                acc = operator_of(item)?.mul(&acc);
            }
            Ok(acc)
        }
        DualityProgram::Divider {
            spec,
            phases,
            branches,
        } => {
            let dim = 1usize << program.dubit_count()?;
            let mut acc = CMatrix::zeros(dim);
            for (((coeff, _), branch), &phase) in spec
                .branches()
                .iter()
                .zip(branches.iter())
                .zip(phases.iter())
            {
                let weight = coeff * Complex64::from_polar(1.0, phase);
                acc = acc.add(&operator_of(branch)?.scale(weight));
            }
            Ok(acc)
        }
    }
}
