//! Satisfiability as unsorted search, with full solution enumeration.
//!
//! The clause predicate itself is the query: satisfying assignments keep
//! their sign on the lower path and survive recombination with amplitude
//! 1/√N each. Solutions are then read out one at a time; after each
//! click, a deletion pass (divide, negate that one component, recombine)
//! removes it exactly, leaving the rest untouched.

use duality::algorithms::{
    brute_force_solutions, duality_sat_state, enumerate_solutions, parse_dimacs,
};
use duality::measurement::MeasurementPolicy;

const FORMULA: &str = "\
c (x1 or not x3) and (x2 or x3) and (not x1 or not x2)
p cnf 3 3
1 -3 0
2 3 0
-1 -2 0
";

fn main() -> duality::Result<()> {
    let formula = parse_dimacs(FORMULA)?;
    let n = formula.n_vars();

    let state = duality_sat_state(&formula)?;
    println!("pre-measurement state (N = {}):", 1 << n);
    for (i, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() > 1e-20 {
            println!("  {i:0>width$b}: {:+.6}", amp.re, width = n);
        }
    }
    println!("squared norm m/N = {:.6}", state.norm_sq());

    let policy = MeasurementPolicy::certain_slow(1.0)?;
    let result = enumerate_solutions(&formula, &policy, 42)?;
    println!(
        "enumerated {} solutions in {} passes:",
        result.solutions.len(),
        result.passes
    );
    for s in &result.solutions {
        println!("  {s:0>width$b}", width = n);
    }

    let truth = brute_force_solutions(&formula)?;
    let found: std::collections::BTreeSet<usize> = result.solutions.iter().copied().collect();
    println!(
        "exhaustive check: {}",
        if found == truth { "match" } else { "MISMATCH" }
    );
    Ok(())
}
