//! Machine-readable text reports for the command-line front end.
//!
//! Every report echoes the parameters that produced it (policy, seed,
//! thread count), prints floats at fixed precision independent of locale,
//! and is byte-identical across reruns with the same seed and thread
//! count; the trailing `wall_time_ms` line is the one exception.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use crate::algorithms::{
    brute_force_solutions, enumerate_solutions, parse_dimacs, single_query_search,
};
use crate::amplitude::StateVector;
use crate::engine::{
    combine, detection_intensity, divide, effective_operator, run_program, DividerSpec,
    DualityProgram, Evaluation,
};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::measurement::{measure, MeasurementModel, MeasurementOutcome, MeasurementPolicy};
use crate::optics;
use crate::program::parse_program;
use crate::randgen;
use crate::rng::SplitMix64;

/// Seed used when the command line does not provide one; reports never
/// draw ambient entropy.
pub const DEFAULT_SEED: u64 = 42;

/// Variable count above which the SAT cross-check is skipped.
pub const CROSSCHECK_VAR_CAP: usize = 20;

/// Which sections a run report includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Amplitudes,
    Outcome,
    Both,
}

impl Emit {
    fn amplitudes(self) -> bool {
        matches!(self, Emit::Amplitudes | Emit::Both)
    }

    fn outcome(self) -> bool {
        matches!(self, Emit::Outcome | Emit::Both)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub policy: MeasurementPolicy,
    pub seed: u64,
    pub threads: usize,
    pub emit: Emit,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            policy: MeasurementPolicy::default(),
            seed: DEFAULT_SEED,
            threads: 1,
            emit: Emit::Both,
        }
    }
}

/// Outcome flags that the command line surfaces through its exit status.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReportStatus {
    /// An enumeration ended with weight still unread, or a cross-check
    /// against the exhaustive solver failed.
    pub verification_failed: bool,
}

/// Fixed-precision decimal text: 15 significant digits, locale-free.
pub fn fmt_float(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.14e}")
}

fn bits(index: usize, n: usize) -> String {
    (0..n)
        .map(|k| {
            if index >> (n - 1 - k) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn io_err(e: std::io::Error) -> Error {
    Error::Internal(format!("report output failed: {e}"))
}

fn model_number(policy: &MeasurementPolicy) -> u8 {
    match policy.model {
        MeasurementModel::Born => 1,
        MeasurementModel::CertainSlow => 2,
        MeasurementModel::Thresholded => 3,
    }
}

fn write_policy_echo(out: &mut impl Write, opts: &RunOptions) -> Result<()> {
    writeln!(
        out,
        "policy: model={} epsilon={} t0={}",
        model_number(&opts.policy),
        fmt_float(opts.policy.epsilon),
        fmt_float(opts.policy.t0)
    )
    .map_err(io_err)?;
    writeln!(out, "seed: {}", opts.seed).map_err(io_err)?;
    writeln!(out, "threads: {}", opts.threads).map_err(io_err)?;
    Ok(())
}

fn write_amplitude_table(out: &mut impl Write, state: &StateVector) -> Result<()> {
    let n = state.n_dubits();
    let nonzero: Vec<usize> = (0..state.dim())
        .filter(|&i| state.amp(i).norm_sqr() > 0.0)
        .collect();
    writeln!(
        out,
        "amplitudes: {} nonzero of {}",
        nonzero.len(),
        state.dim()
    )
    .map_err(io_err)?;
    writeln!(out, "index bits re im prob").map_err(io_err)?;
    for i in nonzero {
        let a = state.amp(i);
        writeln!(
            out,
            "{i} {} {} {} {}",
            bits(i, n),
            fmt_float(a.re),
            fmt_float(a.im),
            fmt_float(a.norm_sqr())
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn write_outcome(out: &mut impl Write, n: usize, measurement: &MeasurementOutcome) -> Result<()> {
    match measurement.outcome {
        Some(i) => writeln!(
            out,
            "outcome: click index={i} bits={} time={}",
            bits(i, n),
            fmt_float(measurement.time_cost)
        ),
        None => writeln!(
            out,
            "outcome: no-click time={}",
            fmt_float(measurement.time_cost)
        ),
    }
    .map_err(io_err)
}

fn write_wall_time(out: &mut impl Write, started: Instant) -> Result<()> {
    writeln!(
        out,
        "wall_time_ms: {:.3}",
        started.elapsed().as_secs_f64() * 1e3
    )
    .map_err(io_err)
}

/// Evaluates a program file on |0…0⟩ and reports amplitudes and/or one
/// sampled read-out.
pub fn run_report(source: &str, name: &str, opts: &RunOptions, out: &mut impl Write) -> Result<()> {
    let started = Instant::now();
    let parsed = parse_program(source)?;
    let input = StateVector::basis_state(parsed.n_dubits, 0)?;
    let evaluated = Evaluation::new()
        .threads(opts.threads)
        .run(&parsed.program, &input)?;

    writeln!(out, "run: {name}").map_err(io_err)?;
    writeln!(out, "dubits: {}", parsed.n_dubits).map_err(io_err)?;
    write_policy_echo(out, opts)?;
    writeln!(out, "oracle_queries: {}", evaluated.oracle_queries).map_err(io_err)?;
    writeln!(out, "norm_sq: {}", fmt_float(evaluated.state.norm_sq())).map_err(io_err)?;
    if opts.emit.amplitudes() {
        write_amplitude_table(out, &evaluated.state)?;
    }
    if opts.emit.outcome() {
        let measurement = measure(&evaluated.state, &opts.policy, opts.seed);
        write_outcome(out, parsed.n_dubits, &measurement)?;
    }
    write_wall_time(out, started)
}

/// Runs the single-query search and reports the final state, the query
/// count and the sampled read-out.
pub fn search_report(
    n_dubits: usize,
    tau: usize,
    opts: &RunOptions,
    out: &mut impl Write,
) -> Result<()> {
    let started = Instant::now();
    let result = single_query_search(n_dubits, tau, &opts.policy, opts.seed)?;
    writeln!(out, "search: n={n_dubits} tau={tau}").map_err(io_err)?;
    write_policy_echo(out, opts)?;
    writeln!(out, "queries_used: {}", result.queries_used).map_err(io_err)?;
    writeln!(out, "norm_sq: {}", fmt_float(result.final_state.norm_sq())).map_err(io_err)?;
    if opts.emit.amplitudes() {
        write_amplitude_table(out, &result.final_state)?;
    }
    if opts.emit.outcome() {
        write_outcome(out, n_dubits, &result.measurement)?;
    }
    write_wall_time(out, started)
}

/// Solves or enumerates a DIMACS formula. With `enumerate`, the found
/// assignments are printed one per line, variable 1 leftmost, and checked
/// against exhaustive evaluation unless `crosscheck` is off or the
/// formula is too large.
pub fn sat_report(
    dimacs: &str,
    enumerate: bool,
    crosscheck: bool,
    opts: &RunOptions,
    out: &mut impl Write,
) -> Result<ReportStatus> {
    let started = Instant::now();
    let formula = parse_dimacs(dimacs)?;
    let n = formula.n_vars();
    writeln!(out, "sat: vars={} clauses={}", n, formula.clauses().len()).map_err(io_err)?;
    write_policy_echo(out, opts)?;

    let mut status = ReportStatus::default();
    if enumerate {
        let result = enumerate_solutions(&formula, &opts.policy, opts.seed)?;
        writeln!(out, "satisfiable: {}", result.satisfiable).map_err(io_err)?;
        writeln!(out, "passes: {}", result.passes).map_err(io_err)?;
        writeln!(out, "incomplete: {}", result.incomplete).map_err(io_err)?;
        writeln!(out, "solutions: {}", result.solutions.len()).map_err(io_err)?;
        for &s in &result.solutions {
            writeln!(out, "{}", bits(s, n)).map_err(io_err)?;
        }
        if result.incomplete {
            status.verification_failed = true;
        }
        if crosscheck && n <= CROSSCHECK_VAR_CAP {
            let truth = brute_force_solutions(&formula)?;
            let found: BTreeSet<usize> = result.solutions.iter().copied().collect();
            if found == truth {
                writeln!(out, "crosscheck: match ({} solutions)", truth.len()).map_err(io_err)?;
            } else {
                status.verification_failed = true;
                writeln!(
                    out,
                    "crosscheck: MISMATCH (found {}, exhaustive {})",
                    found.len(),
                    truth.len()
                )
                .map_err(io_err)?;
            }
        } else {
            writeln!(out, "crosscheck: skipped").map_err(io_err)?;
        }
    } else {
        let state = crate::algorithms::duality_sat_state(&formula)?;
        writeln!(out, "norm_sq: {}", fmt_float(state.norm_sq())).map_err(io_err)?;
        let measurement = measure(&state, &opts.policy, opts.seed);
        match measurement.outcome {
            Some(i) => {
                writeln!(
                    out,
                    "outcome: click index={i} assignment={} time={}",
                    bits(i, n),
                    fmt_float(measurement.time_cost)
                )
                .map_err(io_err)?;
            }
            None => {
                writeln!(
                    out,
                    "outcome: no-click time={}",
                    fmt_float(measurement.time_cost)
                )
                .map_err(io_err)?;
                writeln!(out, "unsat_indication: no satisfying assignment observed")
                    .map_err(io_err)?;
            }
        }
    }
    write_wall_time(out, started)?;
    Ok(status)
}

/// Two-column sweep of the interferometer bright port: λ against
/// intensity, K points uniform on [0, 2π].
pub fn mz_sweep_report(points: usize, out: &mut impl Write) -> Result<()> {
    if points < 2 {
        return Err(Error::InvalidPolicy(format!(
            "sweep needs at least 2 points, got {points}"
        )));
    }
    for k in 0..points {
        let lambda = std::f64::consts::TAU * k as f64 / (points - 1) as f64;
        let (amp_f, _) = optics::mach_zehnder(lambda);
        writeln!(out, "{} {}", fmt_float(lambda), fmt_float(amp_f.norm_sqr())).map_err(io_err)?;
    }
    Ok(())
}

/// Named invariant batteries runnable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifySuite {
    OpticsCnot,
    Lcu,
    Dividers,
    All,
}

impl VerifySuite {
    pub fn parse(name: &str) -> Result<VerifySuite> {
        match name {
            "optics-cnot" => Ok(VerifySuite::OpticsCnot),
            "lcu" => Ok(VerifySuite::Lcu),
            "dividers" => Ok(VerifySuite::Dividers),
            "all" => Ok(VerifySuite::All),
            other => Err(Error::InvalidPolicy(format!(
                "unknown suite `{other}`; expected optics-cnot, lcu, dividers or all"
            ))),
        }
    }
}

struct SuiteReport<'w, W: Write> {
    out: &'w mut W,
    all_passed: bool,
}

impl<'w, W: Write> SuiteReport<'w, W> {
    fn check(&mut self, name: &str, result: std::result::Result<(), String>) -> Result<()> {
        match result {
            Ok(()) => writeln!(self.out, "{name}: PASS").map_err(io_err),
            Err(detail) => {
                self.all_passed = false;
                writeln!(self.out, "{name}: FAIL ({detail})").map_err(io_err)
            }
        }
    }
}

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

/// Runs the named invariant battery; returns whether everything passed.
pub fn verify_report(suite: VerifySuite, seed: u64, out: &mut impl Write) -> Result<bool> {
    let mut report = SuiteReport {
        out,
        all_passed: true,
    };
    if matches!(suite, VerifySuite::Dividers | VerifySuite::All) {
        verify_dividers(&mut report)?;
    }
    if matches!(suite, VerifySuite::Lcu | VerifySuite::All) {
        verify_lcu(&mut report, seed)?;
    }
    if matches!(suite, VerifySuite::OpticsCnot | VerifySuite::All) {
        verify_optics(&mut report)?;
    }
    Ok(report.all_passed)
}

fn verify_dividers<W: Write>(report: &mut SuiteReport<'_, W>) -> Result<()> {
    report.check(
        "symmetric divider normalization",
        (2..=6usize).try_for_each(|d| {
            let spec = DividerSpec::symmetric(d).map_err(|e| e.to_string())?;
            let total: f64 = spec.branches().iter().map(|(a, _)| a).sum();
            ensure((total - 1.0).abs() < 1e-12, || {
                format!("d={d}: Σa = {total}")
            })
        }),
    )?;
    report.check("grouped divider three-slit coefficients", {
        DividerSpec::grouped(&[(1.0 / 3.0, 1), (2.0 / 3.0, 2)])
            .map_err(|e| e.to_string())
            .and_then(|spec| {
                let coeffs: Vec<f64> = spec.branches().iter().map(|(a, _)| *a).collect();
                ensure(
                    (coeffs[0] - (1.0f64 / 3.0).sqrt()).abs() < 1e-12
                        && (coeffs[1] - 0.5 * (2.0f64 / 3.0).sqrt()).abs() < 1e-12
                        && (coeffs[2] - coeffs[1]).abs() < 1e-12,
                    || format!("coefficients {coeffs:?}"),
                )
            })
    })?;
    report.check(
        "three-slit intensity split",
        (|| {
            let unit = StateVector::basis_state(0, 0).map_err(|e| e.to_string())?;
            let spec = DividerSpec::grouped(&[(1.0 / 3.0, 1), (2.0 / 3.0, 2)])
                .map_err(|e| e.to_string())?;
            let subs = divide(&unit, &spec);
            let lone = detection_intensity(&subs[..1], 0).map_err(|e| e.to_string())?;
            let pair = detection_intensity(&subs[1..], 0).map_err(|e| e.to_string())?;
            let total = detection_intensity(&subs, 0).map_err(|e| e.to_string())?;
            ensure(
                (lone - 1.0 / 3.0).abs() < 1e-12
                    && (pair - 2.0 / 3.0).abs() < 1e-12
                    && (total - 1.0).abs() < 1e-12,
                || format!("split {lone} + {pair} = {total}"),
            )
        })(),
    )?;
    report.check(
        "orthogonal tags add as intensities",
        (|| {
            let unit = StateVector::basis_state(0, 0).map_err(|e| e.to_string())?;
            let spec = DividerSpec::grouped(&[(0.5, 1), (0.5, 1)]).map_err(|e| e.to_string())?;
            (0..8).try_for_each(|k| {
                let lambda = k as f64 * std::f64::consts::PI / 4.0;
                let subs = divide(&unit, &spec);
                let shifted = vec![subs[0].clone(), subs[1].clone().with_phase(lambda)];
                let intensity = detection_intensity(&shifted, 0).map_err(|e| e.to_string())?;
                ensure((intensity - 1.0).abs() < 1e-12, || {
                    format!("phase {lambda}: intensity {intensity}")
                })
            })
        })(),
    )?;
    report.check(
        "divide then combine restores the wave",
        (|| {
            let state = StateVector::basis_state(1, 0).map_err(|e| e.to_string())?;
            let spec = DividerSpec::symmetric(3).map_err(|e| e.to_string())?;
            let back = combine(&divide(&state, &spec)).map_err(|e| e.to_string())?;
            ensure(back.max_abs_diff(&state) < 1e-12, || {
                "round trip drifted".to_string()
            })
        })(),
    )?;
    Ok(())
}

fn verify_lcu<W: Write>(report: &mut SuiteReport<'_, W>, seed: u64) -> Result<()> {
    report.check("program evaluation matches effective operator", {
        let mut rng = SplitMix64::new(seed);
        (0..50).try_for_each(|_| {
            let n = 1 + rng.next_below(4);
            let prog = randgen::random_program(&mut rng, n, 3, 3);
            let op = effective_operator(&prog).map_err(|e| e.to_string())?;
            for col in 0..(1usize << n) {
                let basis = StateVector::basis_state(n, col).map_err(|e| e.to_string())?;
                let run = run_program(&basis, &prog).map_err(|e| e.to_string())?;
                let col_vec = op.matrix().mul_vec(basis.amplitudes());
                for (a, b) in run.amplitudes().iter().zip(col_vec.iter()) {
                    ensure((a - b).norm() < 1e-10, || format!("column {col} drifted"))?;
                }
            }
            Ok(())
        })
    })?;
    report.check("half-sum Gram identity", {
        let mut rng = SplitMix64::new(seed ^ 0x9E37_79B9);
        (0..50).try_for_each(|_| {
            let dim = 1usize << (1 + rng.next_below(3));
            let u1 = randgen::random_unitary(&mut rng, dim);
            let u2 = randgen::random_unitary(&mut rng, dim);
            let m = u1.add(&u2).scale(num_complex::Complex64::new(0.5, 0.0));
            let two_i = CMatrix::identity(dim).scale(num_complex::Complex64::new(2.0, 0.0));
            let quarter = num_complex::Complex64::new(0.25, 0.0);
            let outer = m.mul(&m.dagger());
            let outer_rhs = two_i
                .add(&u1.mul(&u2.dagger()))
                .add(&u2.mul(&u1.dagger()))
                .scale(quarter);
            let gram = m.dagger().mul(&m);
            let gram_rhs = two_i
                .add(&u1.dagger().mul(&u2))
                .add(&u2.dagger().mul(&u1))
                .scale(quarter);
            ensure(
                outer.max_abs_diff(&outer_rhs) < 1e-12 && gram.max_abs_diff(&gram_rhs) < 1e-12,
                || "identity drifted".to_string(),
            )
        })
    })?;
    report.check("identical branches reduce to the plain circuit", {
        let mut rng = SplitMix64::new(seed ^ 0x1234_5678);
        (0..25).try_for_each(|_| {
            let n = 1 + rng.next_below(3);
            let circuit = randgen::random_circuit(&mut rng, n, 8);
            let prog = DualityProgram::divider(
                DividerSpec::symmetric(2).map_err(|e| e.to_string())?,
                vec![
                    DualityProgram::leaf(circuit.clone()),
                    DualityProgram::leaf(circuit.clone()),
                ],
            )
            .map_err(|e| e.to_string())?;
            let state = randgen::random_unit_state(&mut rng, n);
            let via = run_program(&state, &prog).map_err(|e| e.to_string())?;
            let direct = circuit.apply(&state).map_err(|e| e.to_string())?;
            ensure(via.max_abs_diff(&direct) < 1e-12, || {
                "reduction drifted".to_string()
            })
        })
    })?;
    Ok(())
}

fn verify_optics<W: Write>(report: &mut SuiteReport<'_, W>) -> Result<()> {
    report.check("CNOT matrix exact", {
        optics::cnot_construction()
            .map(|_| ())
            .map_err(|e| e.to_string())
    })?;
    report.check("CNOT squares to identity", {
        optics::cnot_construction()
            .map_err(|e| e.to_string())
            .and_then(|m| {
                let prod = m.mul(&m);
                ensure(prod.max_abs_diff(&CMatrix::identity(4)) == 0.0, || {
                    "square drifted".into()
                })
            })
    })?;
    report.check("interferometer matches closed form", {
        (0..100).try_for_each(|k| {
            let lambda = std::f64::consts::TAU * k as f64 / 99.0;
            let (amp_f, amp_e) = optics::mach_zehnder(lambda);
            let expect = (lambda / 2.0).cos().powi(2);
            ensure(
                (amp_f.norm_sqr() - expect).abs() < 1e-12
                    && (amp_f.norm_sqr() + amp_e.norm_sqr() - 1.0).abs() < 1e-12,
                || format!("λ = {lambda}"),
            )
        })
    })?;
    report.check("cascade source emits all-H photons", {
        (1..=4usize).try_for_each(|n| {
            optics::cascade_source(n)
                .map(|_| ())
                .map_err(|e| e.to_string())
        })
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_fixed_precision() {
        assert_eq!(fmt_float(0.5), "5.00000000000000e-1");
        assert_eq!(fmt_float(1.0), "1.00000000000000e0");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
    }

    #[test]
    fn bits_render_variable_one_leftmost() {
        assert_eq!(bits(2, 2), "10");
        assert_eq!(bits(1, 3), "001");
        assert_eq!(bits(0, 0), "");
    }

    #[test]
    fn run_report_is_reproducible_modulo_wall_time() {
        let source = "DUBITS 2\nH 0\nH 1\nDIVIDE 0.5 0.5\nPATH 1\nEND\nPATH 2\nORACLE marked=2\nEND\nCOMBINE\n";
        let opts = RunOptions::default();
        let render = || {
            let mut buf = Vec::new();
            run_report(source, "search4", &opts, &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            text.lines()
                .filter(|l| !l.starts_with("wall_time_ms"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let first = render();
        assert_eq!(first, render());
        assert!(first.contains("oracle_queries: 1"), "{first}");
        assert!(first.contains("norm_sq: 2.50000000000000e-1"), "{first}");
        assert!(first.contains("2 10 5.00000000000000e-1"), "{first}");
    }

    #[test]
    fn search_report_shows_single_query() {
        let mut buf = Vec::new();
        search_report(2, 2, &RunOptions::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("queries_used: 1"), "{text}");
    }

    #[test]
    fn sat_report_enumerates_and_crosschecks() {
        let opts = RunOptions {
            policy: MeasurementPolicy::certain_slow(1.0).unwrap(),
            ..RunOptions::default()
        };
        let mut buf = Vec::new();
        let status = sat_report("p cnf 2 1\n1 2 0\n", true, true, &opts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!status.verification_failed, "{text}");
        assert!(text.contains("solutions: 3"), "{text}");
        assert!(text.contains("crosscheck: match"), "{text}");
        for row in ["01", "10", "11"] {
            assert!(text.lines().any(|l| l == row), "{text}");
        }
    }

    #[test]
    fn sat_report_indicates_unsat() {
        let opts = RunOptions {
            policy: MeasurementPolicy::certain_slow(1.0).unwrap(),
            ..RunOptions::default()
        };
        let mut buf = Vec::new();
        sat_report("p cnf 1 2\n1 0\n-1 0\n", false, true, &opts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("unsat_indication"), "{text}");
    }

    #[test]
    fn mz_sweep_endpoints() {
        let mut buf = Vec::new();
        mz_sweep_report(3, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 3);
        let intensity = |row: &str| row.split(' ').nth(1).unwrap().parse::<f64>().unwrap();
        assert!((intensity(rows[0]) - 1.0).abs() < 1e-12);
        assert!(intensity(rows[1]) < 1e-12);
        assert!((intensity(rows[2]) - 1.0).abs() < 1e-12);
        assert!(mz_sweep_report(1, &mut Vec::new()).is_err());
    }

    #[test]
    fn verify_all_passes() {
        let mut buf = Vec::new();
        let ok = verify_report(VerifySuite::All, DEFAULT_SEED, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(ok, "{text}");
        assert!(text.contains("CNOT matrix exact: PASS"), "{text}");
        assert!(!text.contains("FAIL"), "{text}");
    }
}
