//! Three read-out models for a sub-normalized state.
//!
//! A combined wave can carry squared norm below one. Whether the missing
//! weight shows up as silent no-clicks (Born), as longer waiting times
//! (certain-but-slow), or not at all above a detector threshold, is a
//! policy choice — all three are available and sampled reproducibly from
//! a seed.

use duality::algorithms::single_query_search;
use duality::measurement::{measure, outcome_distribution, MeasurementPolicy};

fn main() -> duality::Result<()> {
    // The 4-item search state: amplitude 1/2 on the marked index.
    let state = single_query_search(2, 2, &MeasurementPolicy::default(), 0)?.final_state;
    println!("state norm² = {}", state.norm_sq());

    let policies = [
        ("model 1 (Born, may miss)", MeasurementPolicy::born(1.0)?),
        (
            "model 2 (certain, slow)",
            MeasurementPolicy::certain_slow(1.0)?,
        ),
        (
            "model 3 (threshold 0.1)",
            MeasurementPolicy::thresholded(0.1, 1.0)?,
        ),
    ];

    for (name, policy) in &policies {
        let dist = outcome_distribution(&state, policy);
        println!("\n{name}:");
        println!("  P(click at 2) = {:.3}", dist.click_probability(2));
        println!("  P(no click)   = {:.3}", dist.no_click_probability);
        println!("  expected time = {:.4} t0", dist.expected_time);

        let trials = 20_000u64;
        let clicks = (0..trials)
            .filter(|&s| measure(&state, policy, s).clicked())
            .count();
        println!(
            "  observed click rate over {trials} seeded trials: {:.4}",
            clicks as f64 / trials as f64
        );
    }

    // Same seeds, same outcomes: sampling is a pure function.
    let policy = MeasurementPolicy::born(1.0)?;
    assert_eq!(measure(&state, &policy, 123), measure(&state, &policy, 123));
    println!("\nre-measuring with an identical seed reproduces the outcome exactly");
    Ok(())
}
