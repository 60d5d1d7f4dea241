//! Exact linear-map algebra over labeled photon modes.
//!
//! Photons are labeled by a symbolic frequency (a sum over base tones), a
//! path token and a polarization. States are sparse complex-amplitude
//! maps over kets (sets of photon labels; different kets may hold
//! different photon numbers), and components are sparse linear maps:
//! kets outside a component's domain pass through unchanged.
//!
//! The component catalog: beamsplitters ([`OpticalMap::beam_splitter`]),
//! polarizing beamsplitters, dichroic beamsplitters, phase modulators,
//! polarization rotators, sum-frequency generation ([`OpticalMap::sfg`])
//! and parametric down-conversion ([`OpticalMap::spdc`]), plus exact
//! quarter-turn elements (half-wave plates) for the constructions that
//! are asserted bit-exact.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Symbolic frequency: a non-empty set of base tones ω₁, ω₂, …  encoded
/// as a bitmask. Combining two disjoint sets models up-conversion to the
/// summed frequency; overlapping sums are rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Frequency(u64);

impl Frequency {
    /// Base tone ω_k, 1-based.
    pub fn base(k: usize) -> Frequency {
        assert!((1..=64).contains(&k), "base tone index out of range");
        Frequency(1u64 << (k - 1))
    }

    /// ω_lo + ω_{lo+1} + … + ω_hi.
    pub fn span(lo: usize, hi: usize) -> Frequency {
        assert!(lo >= 1 && hi >= lo && hi <= 64);
        let mut mask = 0u64;
        for k in lo..=hi {
            mask |= 1u64 << (k - 1);
        }
        Frequency(mask)
    }

    pub fn try_sum(self, other: Frequency) -> Result<Frequency> {
        if self.0 & other.0 != 0 {
            return Err(Error::LabelMismatch(format!(
                "frequencies {self} and {other} share base tones"
            )));
        }
        Ok(Frequency(self.0 | other.0))
    }

    pub fn tone_count(self) -> u32 {
        self.0.count_ones()
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w")?;
        let mut first = true;
        for k in 1..=64 {
            if self.0 & (1u64 << (k - 1)) != 0 {
                if !first {
                    write!(f, "+")?;
                }
                write!(f, "{k}")?;
                first = false;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn flipped(self) -> Polarization {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => write!(f, "H"),
            Polarization::V => write!(f, "V"),
        }
    }
}

/// Spatial-mode token.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(String);

impl Path {
    pub fn new(label: impl Into<String>) -> Path {
        Path(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Path {
    fn from(s: &str) -> Path {
        Path(s.to_string())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One photon's mode: frequency × path × polarization.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub frequency: Frequency,
    pub path: Path,
    pub polarization: Polarization,
}

impl ModeLabel {
    pub fn new(frequency: Frequency, path: impl Into<Path>, polarization: Polarization) -> Self {
        ModeLabel {
            frequency,
            path: path.into(),
            polarization,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}@{}]", self.polarization, self.frequency, self.path)
    }
}

/// A basis ket: a set of distinct photon labels, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ket(Vec<ModeLabel>);

impl Ket {
    pub fn new(mut labels: Vec<ModeLabel>) -> Result<Ket> {
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::LabelMismatch(format!(
                "duplicate photon label in ket {}",
                Ket(labels.clone())
            )));
        }
        Ok(Ket(labels))
    }

    pub fn photons(&self) -> &[ModeLabel] {
        &self.0
    }

    pub fn contains(&self, label: &ModeLabel) -> bool {
        self.0.binary_search(label).is_ok()
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "⟩")
    }
}

/// Sparse complex-amplitude map over kets; photon-number sectors may
/// differ across kets. Squared norm may not exceed 1.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OpticalState(BTreeMap<Ket, Complex64>);

impl OpticalState {
    pub fn from_ket(ket: Ket) -> OpticalState {
        let mut map = BTreeMap::new();
        map.insert(ket, c(1.0, 0.0));
        OpticalState(map)
    }

    pub fn amp(&self, ket: &Ket) -> Complex64 {
        self.0.get(ket).copied().unwrap_or(c(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Ket, Complex64)> {
        self.0.iter().map(|(k, &a)| (k, a))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.values().map(|a| a.norm_sqr()).sum()
    }

    /// The single (ket, amplitude) term, if the state has exactly one.
    pub fn single_term(&self) -> Option<(&Ket, Complex64)> {
        if self.0.len() == 1 {
            self.0.iter().next().map(|(k, &a)| (k, a))
        } else {
            None
        }
    }

    fn insert_term(&mut self, ket: Ket, amp: Complex64) {
        use std::collections::btree_map::Entry;
        match self.0.entry(ket) {
            Entry::Vacant(slot) => {
                if amp.norm_sqr() != 0.0 {
                    slot.insert(amp);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += amp;
                if slot.get().norm_sqr() == 0.0 {
                    // Exact cancellation; drop the term.
                    slot.remove();
                }
            }
        }
    }

    fn validated(self) -> Result<OpticalState> {
        let norm_sq = self.norm_sq();
        if !norm_sq.is_finite() {
            return Err(Error::NonFiniteAmplitude);
        }
        if norm_sq > 1.0 + 1e-9 {
            return Err(Error::NormTooLarge { norm_sq });
        }
        Ok(self)
    }
}

/// Matches one photon by path, with optional frequency and polarization
/// filters.
#[derive(Clone, Debug)]
struct PhotonPattern {
    path: Path,
    frequency: Option<Frequency>,
    polarization: Option<Polarization>,
}

impl PhotonPattern {
    fn matches(&self, label: &ModeLabel) -> bool {
        label.path == self.path
            && self.frequency.is_none_or(|f| f == label.frequency)
            && self.polarization.is_none_or(|p| p == label.polarization)
    }
}

/// Rewrites a matched photon's path and/or polarization.
#[derive(Clone, Debug, Default)]
struct LabelEdit {
    path: Option<Path>,
    polarization: Option<Polarization>,
}

impl LabelEdit {
    fn to_path(path: &Path) -> LabelEdit {
        LabelEdit {
            path: Some(path.clone()),
            polarization: None,
        }
    }

    fn apply(&self, label: &ModeLabel) -> ModeLabel {
        ModeLabel {
            frequency: label.frequency,
            path: self.path.clone().unwrap_or_else(|| label.path.clone()),
            polarization: self.polarization.unwrap_or(label.polarization),
        }
    }
}

#[derive(Clone, Debug)]
struct PhotonRule {
    pattern: PhotonPattern,
    outputs: Vec<(LabelEdit, Complex64)>,
}

/// Conversion rule: an exact photon set (one or two labels) rewritten to
/// a superposition of photon sets.
#[derive(Clone, Debug)]
struct RewriteRule {
    from: Vec<ModeLabel>,
    outputs: Vec<(Vec<ModeLabel>, Complex64)>,
}

#[derive(Clone, Debug)]
enum StageKind {
    /// Linear element: acts on every photon independently.
    PerPhoton(Vec<PhotonRule>),
    /// Conversion crystal: rewrites at most one matching photon set per ket.
    Rewrite(Vec<RewriteRule>),
}

#[derive(Clone, Debug)]
struct Stage {
    label: String,
    kind: StageKind,
}

/// A sparse linear map between labeled photon-mode bases, built from one
/// or more component stages applied left to right.
#[derive(Clone, Debug)]
pub struct OpticalMap {
    stages: Vec<Stage>,
}

/// Conversion phase-matching type: I consumes/produces identical
/// polarizations, II opposite ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConversionType {
    TypeI,
    TypeII,
}

/// Wavelength-selective splitter kind: long-wave-pass transmits the
/// longer wavelength; short-wave-pass the shorter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DichroicKind {
    LongPass,
    ShortPass,
}

impl OpticalMap {
    fn single(label: impl Into<String>, kind: StageKind) -> OpticalMap {
        OpticalMap {
            stages: vec![Stage {
                label: label.into(),
                kind,
            }],
        }
    }

    /// Sequential composition, left applied first.
    pub fn compose(maps: impl IntoIterator<Item = OpticalMap>) -> OpticalMap {
        OpticalMap {
            stages: maps.into_iter().flat_map(|m| m.stages).collect(),
        }
    }

    pub fn stage_labels(&self) -> Vec<&str> {
        self.stages.iter().map(|s| s.label.as_str()).collect()
    }

    /// Beamsplitter with input ports a, b and output ports c, d:
    /// |a⟩ ↦ i·cosθ|c⟩ + sinθ|d⟩, |b⟩ ↦ sinθ|c⟩ + i·cosθ|d⟩.
    /// Polarization- and frequency-insensitive.
    pub fn beam_splitter(
        theta: f64,
        in_a: &Path,
        in_b: &Path,
        out_c: &Path,
        out_d: &Path,
    ) -> OpticalMap {
        let (s, co) = theta.sin_cos();
        Self::beam_splitter_amps(c(0.0, co), c(s, 0.0), in_a, in_b, out_c, out_d)
    }

    /// 50-50 beamsplitter: reflection i/√2, transmission 1/√2, with exact
    /// 1/√2 entries.
    pub fn beam_splitter_50_50(in_a: &Path, in_b: &Path, out_c: &Path, out_d: &Path) -> OpticalMap {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::beam_splitter_amps(c(0.0, h), c(h, 0.0), in_a, in_b, out_c, out_d)
    }

    fn beam_splitter_amps(
        reflect: Complex64,
        transmit: Complex64,
        in_a: &Path,
        in_b: &Path,
        out_c: &Path,
        out_d: &Path,
    ) -> OpticalMap {
        let rule = |input: &Path, first: Complex64, second: Complex64| PhotonRule {
            pattern: PhotonPattern {
                path: input.clone(),
                frequency: None,
                polarization: None,
            },
            outputs: vec![
                (LabelEdit::to_path(out_c), first),
                (LabelEdit::to_path(out_d), second),
            ],
        };
        Self::single(
            format!("BS({in_a},{in_b}→{out_c},{out_d})"),
            StageKind::PerPhoton(vec![
                rule(in_a, reflect, transmit),
                rule(in_b, transmit, reflect),
            ]),
        )
    }

    /// Polarizing beamsplitter: reflects H to `h_out`, transmits V to
    /// `v_out`.
    pub fn polarizing_beam_splitter(input: &Path, h_out: &Path, v_out: &Path) -> OpticalMap {
        let rule = |pol, out: &Path| PhotonRule {
            pattern: PhotonPattern {
                path: input.clone(),
                frequency: None,
                polarization: Some(pol),
            },
            outputs: vec![(LabelEdit::to_path(out), c(1.0, 0.0))],
        };
        Self::single(
            format!("PBS({input}→{h_out}|{v_out})"),
            StageKind::PerPhoton(vec![
                rule(Polarization::H, h_out),
                rule(Polarization::V, v_out),
            ]),
        )
    }

    /// Polarizing beamsplitter run in reverse: merges an H beam and a V
    /// beam into one path.
    pub fn pbs_merge(h_in: &Path, v_in: &Path, out: &Path) -> OpticalMap {
        let rule = |pol, input: &Path| PhotonRule {
            pattern: PhotonPattern {
                path: input.clone(),
                frequency: None,
                polarization: Some(pol),
            },
            outputs: vec![(LabelEdit::to_path(out), c(1.0, 0.0))],
        };
        Self::single(
            format!("PBS⁻¹({h_in}|{v_in}→{out})"),
            StageKind::PerPhoton(vec![
                rule(Polarization::H, h_in),
                rule(Polarization::V, v_in),
            ]),
        )
    }

    /// Dichroic beamsplitter separating two declared frequencies; the
    /// caller states which of the two carries the longer wavelength.
    pub fn dichroic(
        kind: DichroicKind,
        longer_wave: Frequency,
        shorter_wave: Frequency,
        input: &Path,
        transmitted: &Path,
        reflected: &Path,
    ) -> OpticalMap {
        let (pass, bounce) = match kind {
            DichroicKind::LongPass => (longer_wave, shorter_wave),
            DichroicKind::ShortPass => (shorter_wave, longer_wave),
        };
        let rule = |freq, out: &Path| PhotonRule {
            pattern: PhotonPattern {
                path: input.clone(),
                frequency: Some(freq),
                polarization: None,
            },
            outputs: vec![(LabelEdit::to_path(out), c(1.0, 0.0))],
        };
        Self::single(
            format!("DICHROIC({input}→{transmitted}|{reflected})"),
            StageKind::PerPhoton(vec![rule(pass, transmitted), rule(bounce, reflected)]),
        )
    }

    /// Phase modulator on one path: multiplies any photon there by e^{iλ}.
    pub fn phase_modulator(path: &Path, lambda: f64) -> OpticalMap {
        Self::scalar_on_path(
            path,
            Complex64::from_polar(1.0, lambda),
            format!("PHASE({lambda})@{path}"),
        )
    }

    /// Exact unit-modulus phase factor on one path; used where a
    /// construction must stay bit-exact (e.g. the −i compensation plate
    /// on a reflected arm).
    pub fn exact_phase(path: &Path, factor: Complex64) -> OpticalMap {
        debug_assert!((factor.norm_sqr() - 1.0).abs() < 1e-12);
        Self::scalar_on_path(path, factor, format!("PHASE*({factor})@{path}"))
    }

    fn scalar_on_path(path: &Path, factor: Complex64, label: String) -> OpticalMap {
        Self::single(
            label,
            StageKind::PerPhoton(vec![PhotonRule {
                pattern: PhotonPattern {
                    path: path.clone(),
                    frequency: None,
                    polarization: None,
                },
                outputs: vec![(LabelEdit::default(), factor)],
            }]),
        )
    }

    /// Polarization rotator through angle θ:
    /// |H⟩ ↦ cosθ|H⟩ + sinθ|V⟩, |V⟩ ↦ −sinθ|H⟩ + cosθ|V⟩.
    pub fn polarization_rotator(path: &Path, theta: f64) -> OpticalMap {
        let (s, co) = theta.sin_cos();
        let rule = |pol, to_h: f64, to_v: f64| PhotonRule {
            pattern: PhotonPattern {
                path: path.clone(),
                frequency: None,
                polarization: Some(pol),
            },
            outputs: vec![
                (
                    LabelEdit {
                        path: None,
                        polarization: Some(Polarization::H),
                    },
                    c(to_h, 0.0),
                ),
                (
                    LabelEdit {
                        path: None,
                        polarization: Some(Polarization::V),
                    },
                    c(to_v, 0.0),
                ),
            ],
        };
        Self::single(
            format!("POLROT({theta})@{path}"),
            StageKind::PerPhoton(vec![
                rule(Polarization::H, co, s),
                rule(Polarization::V, -s, co),
            ]),
        )
    }

    /// Exact polarization flip H↔V (a half-wave plate at 45°); the
    /// quarter-turn rotator with bit-exact unit entries.
    pub fn polarization_flip(path: &Path) -> OpticalMap {
        let rule = |pol: Polarization| PhotonRule {
            pattern: PhotonPattern {
                path: path.clone(),
                frequency: None,
                polarization: Some(pol),
            },
            outputs: vec![(
                LabelEdit {
                    path: None,
                    polarization: Some(pol.flipped()),
                },
                c(1.0, 0.0),
            )],
        };
        Self::single(
            format!("HWP45@{path}"),
            StageKind::PerPhoton(vec![rule(Polarization::H), rule(Polarization::V)]),
        )
    }

    /// Mirror: redirects every photon on `from` to `to`.
    pub fn mirror(from: &Path, to: &Path) -> OpticalMap {
        Self::single(
            format!("MIRROR({from}→{to})"),
            StageKind::PerPhoton(vec![PhotonRule {
                pattern: PhotonPattern {
                    path: from.clone(),
                    frequency: None,
                    polarization: None,
                },
                outputs: vec![(LabelEdit::to_path(to), c(1.0, 0.0))],
            }]),
        )
    }

    /// Frequency-keyed directing mirrors: photon of frequency f on path p
    /// goes to the stated output path, so beams from several rails
    /// coincide in space and time.
    pub fn mirror_network(routes: &[(Frequency, Path, Path)]) -> OpticalMap {
        let rules = routes
            .iter()
            .map(|(freq, from, to)| PhotonRule {
                pattern: PhotonPattern {
                    path: from.clone(),
                    frequency: Some(*freq),
                    polarization: None,
                },
                outputs: vec![(LabelEdit::to_path(to), c(1.0, 0.0))],
            })
            .collect();
        Self::single("MIRRORS", StageKind::PerPhoton(rules))
    }

    /// Sum-frequency generation: merges the photon pair (f1, f2) on
    /// `input` into one photon at f1+f2 on `output`.
    /// Type I: |H₁H₂⟩ ↦ |V₁₂⟩ and |V₁V₂⟩ ↦ |H₁₂⟩.
    /// Type II: |H₁V₂⟩ ↦ |H₁₂⟩ and |V₁H₂⟩ ↦ |V₁₂⟩.
    pub fn sfg(
        typ: ConversionType,
        f1: Frequency,
        f2: Frequency,
        input: &Path,
        output: &Path,
    ) -> Result<OpticalMap> {
        let sum = f1.try_sum(f2)?;
        use Polarization::{H, V};
        let pairs: [(Polarization, Polarization, Polarization); 2] = match typ {
            ConversionType::TypeI => [(H, H, V), (V, V, H)],
            ConversionType::TypeII => [(H, V, H), (V, H, V)],
        };
        let rules = pairs
            .iter()
            .map(|&(p1, p2, out_pol)| RewriteRule {
                from: vec![
                    ModeLabel::new(f1, input.clone(), p1),
                    ModeLabel::new(f2, input.clone(), p2),
                ],
                outputs: vec![(
                    vec![ModeLabel::new(sum, output.clone(), out_pol)],
                    c(1.0, 0.0),
                )],
            })
            .collect();
        Ok(Self::single(
            format!("SFG-{typ:?}@{input}"),
            StageKind::Rewrite(rules),
        ))
    }

    /// Parametric down-conversion of the pump (f1+f2) on `input` into
    /// photons at f1 on `out_1` and f2 on `out_2`; both crystal
    /// orientations.
    /// Type I: |H₁₂⟩ ↦ |V₁V₂⟩ and |V₁₂⟩ ↦ |H₁H₂⟩.
    /// Type II: |H₁₂⟩ ↦ |H₁V₂⟩ and |V₁₂⟩ ↦ |V₁H₂⟩.
    pub fn spdc(
        typ: ConversionType,
        f1: Frequency,
        f2: Frequency,
        input: &Path,
        out_1: &Path,
        out_2: &Path,
    ) -> Result<OpticalMap> {
        let mut map = Self::spdc_oriented(typ, Polarization::H, f1, f2, input, out_1, out_2)?;
        let second = Self::spdc_oriented(typ, Polarization::V, f1, f2, input, out_1, out_2)?;
        map.stages.extend(second.stages);
        Ok(OpticalMap::compose([map]))
    }

    /// Single-orientation down-conversion crystal: phase-matched for one
    /// pump polarization only; the other polarization passes unchanged.
    pub fn spdc_oriented(
        typ: ConversionType,
        pump_pol: Polarization,
        f1: Frequency,
        f2: Frequency,
        input: &Path,
        out_1: &Path,
        out_2: &Path,
    ) -> Result<OpticalMap> {
        let sum = f1.try_sum(f2)?;
        use Polarization::{H, V};
        let (p1, p2) = match (typ, pump_pol) {
            (ConversionType::TypeI, H) => (V, V),
            (ConversionType::TypeI, V) => (H, H),
            (ConversionType::TypeII, H) => (H, V),
            (ConversionType::TypeII, V) => (V, H),
        };
        let rule = RewriteRule {
            from: vec![ModeLabel::new(sum, input.clone(), pump_pol)],
            outputs: vec![(
                vec![
                    ModeLabel::new(f1, out_1.clone(), p1),
                    ModeLabel::new(f2, out_2.clone(), p2),
                ],
                c(1.0, 0.0),
            )],
        };
        Ok(Self::single(
            format!("SPDC-{typ:?}({pump_pol})@{input}"),
            StageKind::Rewrite(vec![rule]),
        ))
    }

    pub fn apply(&self, state: &OpticalState) -> Result<OpticalState> {
        let mut current = state.clone();
        for stage in &self.stages {
            let mut next = OpticalState::default();
            for (ket, amp) in current.terms() {
                for (out_ket, factor) in expand_stage(stage, ket)? {
                    next.insert_term(out_ket, amp * factor);
                }
            }
            current = next.validated()?;
        }
        Ok(current)
    }

    pub fn apply_ket(&self, ket: Ket) -> Result<OpticalState> {
        self.apply(&OpticalState::from_ket(ket))
    }
}

fn expand_stage(stage: &Stage, ket: &Ket) -> Result<Vec<(Ket, Complex64)>> {
    match &stage.kind {
        StageKind::PerPhoton(rules) => {
            let mut terms: Vec<(Vec<ModeLabel>, Complex64)> = vec![(Vec::new(), c(1.0, 0.0))];
            for label in ket.photons() {
                let options: Vec<(ModeLabel, Complex64)> =
                    match rules.iter().find(|r| r.pattern.matches(label)) {
                        Some(rule) => rule
                            .outputs
                            .iter()
                            .map(|(edit, amp)| (edit.apply(label), *amp))
                            .collect(),
                        None => vec![(label.clone(), c(1.0, 0.0))],
                    };
                let mut grown = Vec::with_capacity(terms.len() * options.len());
                for (labels, amp) in &terms {
                    for (out_label, factor) in &options {
                        let mut next = labels.clone();
                        next.push(out_label.clone());
                        grown.push((next, amp * factor));
                    }
                }
                terms = grown;
            }
            terms
                .into_iter()
                .map(|(labels, amp)| {
                    Ket::new(labels)
                        .map(|k| (k, amp))
                        .map_err(|_| stage_collision(stage, ket))
                })
                .collect()
        }
        StageKind::Rewrite(rules) => {
            let matches: Vec<&RewriteRule> = rules
                .iter()
                .filter(|rule| rule.from.iter().all(|l| ket.contains(l)))
                .collect();
            match matches.len() {
                0 => Ok(vec![(ket.clone(), c(1.0, 0.0))]),
                1 => {
                    let rule = matches[0];
                    let remaining: Vec<ModeLabel> = ket
                        .photons()
                        .iter()
                        .filter(|l| !rule.from.contains(l))
                        .cloned()
                        .collect();
                    rule.outputs
                        .iter()
                        .map(|(labels, amp)| {
                            let mut all = remaining.clone();
                            all.extend(labels.iter().cloned());
                            Ket::new(all)
                                .map(|k| (k, *amp))
                                .map_err(|_| stage_collision(stage, ket))
                        })
                        .collect()
                }
                _ => Err(Error::LabelMismatch(format!(
                    "stage {} matches {} photon sets in {ket}; ambiguous conversion",
                    stage.label,
                    matches.len()
                ))),
            }
        }
    }
}

fn stage_collision(stage: &Stage, ket: &Ket) -> Error {
    Error::LabelMismatch(format!(
        "stage {} steered two photons of {ket} into one mode",
        stage.label
    ))
}

/// Composed two-beamsplitter interferometer with a phase modulator λ in
/// the reflected arm. Returns the amplitudes at the bright port f and the
/// complementary port e; algebraically i(1+e^{iλ})/2 and (1−e^{iλ})/2,
/// but computed here by running the component pipeline.
pub fn mach_zehnder(lambda: f64) -> (Complex64, Complex64) {
    let (a, b) = (Path::new("a"), Path::new("b"));
    let (arm_c, arm_d) = (Path::new("c"), Path::new("d"));
    let (arm_c2, arm_d2) = (Path::new("c2"), Path::new("d2"));
    let (port_f, port_e) = (Path::new("f"), Path::new("e"));
    let pipeline = OpticalMap::compose([
        OpticalMap::beam_splitter_50_50(&a, &b, &arm_c, &arm_d),
        OpticalMap::mirror(&arm_c, &arm_c2),
        OpticalMap::mirror(&arm_d, &arm_d2),
        OpticalMap::phase_modulator(&arm_c2, lambda),
        OpticalMap::beam_splitter_50_50(&arm_d2, &arm_c2, &port_f, &port_e),
    ]);
    let photon = |path: &Path| {
        Ket::new(vec![ModeLabel::new(
            Frequency::base(1),
            path.clone(),
            Polarization::H,
        )])
        .unwrap()
    };
    let out = pipeline
        .apply_ket(photon(&a))
        .expect("interferometer pipeline");
    (out.amp(&photon(&port_f)), out.amp(&photon(&port_e)))
}

/// Basis order for two-photon polarization states: HH, HV, VH, VV with
/// photon 1 at frequency ω₁ and photon 2 at ω₂.
fn two_photon_basis(f1: Frequency, f2: Frequency, p1: &Path, p2: &Path) -> [Ket; 4] {
    use Polarization::{H, V};
    let ket = |q1, q2| {
        Ket::new(vec![
            ModeLabel::new(f1, p1.clone(), q1),
            ModeLabel::new(f2, p2.clone(), q2),
        ])
        .unwrap()
    };
    [ket(H, H), ket(H, V), ket(V, H), ket(V, V)]
}

/// Controlled-NOT from nonlinear conversions: four up-conversion (SFG)
/// stages sort the four polarization components onto labeled rails, the
/// flip components pass through exact half-wave plates, four
/// down-conversion (SPDC) stages restore two photons, and directing
/// mirrors recombine the rails. Asserts that the assembled 4×4 matrix
/// over {HH, HV, VH, VV} equals the CNOT permutation exactly and returns
/// it.
pub fn cnot_construction() -> Result<CMatrix> {
    let f1 = Frequency::base(1);
    let f2 = Frequency::base(2);

    let source = Path::new("s");
    let unprimed = Path::new("u");
    let primed = Path::new("p");
    let (rail_uh, rail_uv) = (Path::new("uh"), Path::new("uv"));
    let (rail_ph, rail_pv) = (Path::new("ph"), Path::new("pv"));
    let (out_1, out_2) = (Path::new("t1"), Path::new("t2"));

    use Polarization::{H, V};
    let pipeline = OpticalMap::compose([
        // Up-conversion: HH → V₁₂ and VV → H₁₂ on the unprimed beam,
        // HV → H'₁₂ and VH → V'₁₂ on the primed beam.
        OpticalMap::sfg(ConversionType::TypeI, f1, f2, &source, &unprimed)?,
        OpticalMap::sfg(ConversionType::TypeII, f1, f2, &source, &primed)?,
        // Separate the four components onto their own rails.
        OpticalMap::polarizing_beam_splitter(&unprimed, &rail_uh, &rail_uv),
        OpticalMap::polarizing_beam_splitter(&primed, &rail_ph, &rail_pv),
        // The two target-flipping components pass half-wave plates.
        OpticalMap::polarization_flip(&rail_uh),
        OpticalMap::polarization_flip(&rail_pv),
        // Down-conversion back to two photons, one crystal orientation per rail.
        OpticalMap::spdc_oriented(
            ConversionType::TypeI,
            V,
            f1,
            f2,
            &rail_uv,
            &rail_uv,
            &rail_uv,
        )?,
        OpticalMap::spdc_oriented(
            ConversionType::TypeII,
            V,
            f1,
            f2,
            &rail_uh,
            &rail_uh,
            &rail_uh,
        )?,
        OpticalMap::spdc_oriented(
            ConversionType::TypeII,
            H,
            f1,
            f2,
            &rail_ph,
            &rail_ph,
            &rail_ph,
        )?,
        OpticalMap::spdc_oriented(
            ConversionType::TypeI,
            H,
            f1,
            f2,
            &rail_pv,
            &rail_pv,
            &rail_pv,
        )?,
        // Directing mirrors: ω₁ photons to t1, ω₂ photons to t2.
        OpticalMap::mirror_network(&[
            (f1, rail_uv.clone(), out_1.clone()),
            (f2, rail_uv.clone(), out_2.clone()),
            (f1, rail_uh.clone(), out_1.clone()),
            (f2, rail_uh.clone(), out_2.clone()),
            (f1, rail_ph.clone(), out_1.clone()),
            (f2, rail_ph.clone(), out_2.clone()),
            (f1, rail_pv.clone(), out_1.clone()),
            (f2, rail_pv.clone(), out_2.clone()),
        ]),
    ]);

    let input_basis = two_photon_basis(f1, f2, &source, &source);
    let output_basis = two_photon_basis(f1, f2, &out_1, &out_2);
    let mut matrix = CMatrix::zeros(4);
    for (col, in_ket) in input_basis.iter().enumerate() {
        let out = pipeline.apply_ket(in_ket.clone())?;
        let mut seen = 0usize;
        for (row, out_ket) in output_basis.iter().enumerate() {
            let amp = out.amp(out_ket);
            if amp != c(0.0, 0.0) {
                seen += 1;
            }
            matrix.set(row, col, amp);
        }
        if seen != out.len() {
            return Err(Error::LabelMismatch(format!(
                "column {col}: output state left the two-photon polarization basis"
            )));
        }
    }

    let expected = crate::gates::Gate::cnot();
    if matrix.max_abs_diff(expected.matrix()) != 0.0 {
        return Err(Error::Internal(
            "assembled matrix is not exactly CNOT".into(),
        ));
    }
    Ok(matrix)
}

fn photon_path(prefix: &str, k: usize) -> Path {
    Path::new(format!("{prefix}{k}"))
}

/// The alternating down-conversion chain that turns one high-frequency
/// photon on `source` into n photons at ω₁…ω_n on paths `prefix1…prefixn`,
/// all horizontally polarized. Odd stages are type I, even stages type
/// II; a final half-wave plate normalizes the last photon when the chain
/// leaves it vertical.
fn cascade_pipeline(n: usize, source: &Path, prefix: &str) -> Result<OpticalMap> {
    let mut maps = Vec::new();
    for k in 1..n {
        let typ = if k % 2 == 1 {
            ConversionType::TypeI
        } else {
            ConversionType::TypeII
        };
        let pump_remainder = Frequency::span(k + 1, n);
        maps.push(OpticalMap::spdc(
            typ,
            Frequency::base(k),
            pump_remainder,
            source,
            &photon_path(prefix, k),
            source,
        )?);
    }
    maps.push(OpticalMap::mirror(source, &photon_path(prefix, n)));
    if n % 2 == 1 {
        maps.push(OpticalMap::polarization_flip(&photon_path(prefix, n)));
    }
    Ok(OpticalMap::compose(maps))
}

fn all_h_ket(n: usize, prefix: &str) -> Ket {
    Ket::new(
        (1..=n)
            .map(|k| ModeLabel::new(Frequency::base(k), photon_path(prefix, k), Polarization::H))
            .collect(),
    )
    .unwrap()
}

/// Coherent n-photon source: a single vertical photon at ω₁+…+ω_n runs
/// the alternating down-conversion chain, producing |H₁H₂…H_n⟩ with unit
/// amplitude.
pub fn cascade_source(n: usize) -> Result<OpticalState> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    let source = Path::new("src");
    let pipeline = cascade_pipeline(n, &source, "m")?;
    let pump = Ket::new(vec![ModeLabel::new(
        Frequency::span(1, n),
        source.clone(),
        Polarization::V,
    )])?;
    let out = pipeline.apply_ket(pump)?;
    match out.single_term() {
        Some((ket, amp)) if *ket == all_h_ket(n, "m") && (amp.norm() - 1.0).abs() < 1e-12 => {
            Ok(out)
        }
        _ => Err(Error::Internal(format!(
            "cascade of {n} photons produced {out:?}"
        ))),
    }
}

/// One branch of a source-divided wave: a coefficient, a spatial phase
/// and an n-photon optical state. The two branches produced by
/// [`source_qwd`] are mutually coherent.
#[derive(Clone, Debug)]
pub struct OpticalSubWave {
    pub coeff: f64,
    pub spatial_phase: f64,
    pub state: OpticalState,
}

/// Wave division performed at the source: a 50-50 beamsplitter splits the
/// pump photon before any down-conversion, a half-wave plate compensates
/// the reflected arm's i, and the cascade runs once per arm. Each branch
/// carries (1/√2)|H₁…H_n⟩ on its own path set.
pub fn source_qwd(n: usize) -> Result<(OpticalSubWave, OpticalSubWave)> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    let source = Path::new("src");
    let unused = Path::new("src-b");
    let (arm_u, arm_d) = (Path::new("srcu"), Path::new("srcd"));
    let pipeline = OpticalMap::compose([
        OpticalMap::beam_splitter_50_50(&source, &unused, &arm_u, &arm_d),
        // The reflected arm carries a factor i; the compensation plate
        // multiplies by −i exactly.
        OpticalMap::exact_phase(&arm_u, c(0.0, -1.0)),
        cascade_pipeline(n, &arm_u, "u")?,
        cascade_pipeline(n, &arm_d, "d")?,
    ]);
    let pump = Ket::new(vec![ModeLabel::new(
        Frequency::span(1, n),
        source.clone(),
        Polarization::V,
    )])?;
    let out = pipeline.apply(&OpticalState::from_ket(pump))?;

    let expected_coeff = std::f64::consts::FRAC_1_SQRT_2;
    let branch = |prefix: &str| -> Result<OpticalSubWave> {
        let ket = all_h_ket(n, prefix);
        let amp = out.amp(&ket);
        if (amp.norm() - expected_coeff).abs() > 1e-12 || amp.im.abs() > 1e-12 {
            return Err(Error::Internal(format!(
                "source division branch {prefix} has amplitude {amp}, expected 1/√2"
            )));
        }
        Ok(OpticalSubWave {
            coeff: expected_coeff,
            spatial_phase: 0.0,
            state: OpticalState::from_ket(ket),
        })
    };
    Ok((branch("u")?, branch("d")?))
}

/// Recombines the two source-divided branches: directing mirrors steer
/// photon k of either arm onto a common path, and the combiner carries
/// the path-level 1/√2, so equal in-phase branches restore unit
/// amplitude.
pub fn source_qwd_recombine(
    n: usize,
    upper: &OpticalSubWave,
    lower: &OpticalSubWave,
) -> Result<OpticalState> {
    let routes: Vec<(Frequency, Path, Path)> = (1..=n)
        .flat_map(|k| {
            [
                (Frequency::base(k), photon_path("u", k), photon_path("c", k)),
                (Frequency::base(k), photon_path("d", k), photon_path("c", k)),
            ]
        })
        .collect();
    let mirrors = OpticalMap::mirror_network(&routes);
    let weight = std::f64::consts::FRAC_1_SQRT_2;
    let mut combined = OpticalState::default();
    for sub in [upper, lower] {
        let steered = mirrors.apply(&sub.state)?;
        let factor = weight * sub.coeff * Complex64::from_polar(1.0, sub.spatial_phase);
        for (ket, amp) in steered.terms() {
            combined.insert_term(ket.clone(), amp * factor);
        }
    }
    combined.validated()
}
