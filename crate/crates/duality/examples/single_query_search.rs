//! Find a marked item among 2^n with a single query.
//!
//! The register is prepared uniform, the wave is divided in two, only the
//! lower path sees the query (which negates every unmarked basis state),
//! and recombination cancels everything except the marked item. The
//! surviving amplitude is 1/√N, so what a detector reports depends on the
//! read-out model.

use duality::algorithms::single_query_search;
use duality::measurement::MeasurementPolicy;

fn main() -> duality::Result<()> {
    let n = 4;
    let tau = 11;

    let policy = MeasurementPolicy::certain_slow(1.0)?;
    let result = single_query_search(n, tau, &policy, 7)?;

    println!("searching {} items for index {tau}", 1 << n);
    println!("queries used: {}", result.queries_used);
    println!("final squared norm: {:.6}", result.final_state.norm_sq());
    for (i, amp) in result.final_state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() > 1e-20 {
            println!("  amplitude at {i}: {:.6}", amp.re);
        }
    }
    match result.measurement.outcome {
        Some(i) => println!(
            "certain-but-slow read-out clicked at {i} (expected wait {} t0)",
            result.measurement.time_cost
        ),
        None => println!("no click"),
    }

    // The Born read-out clicks with probability 1/N only.
    let born = MeasurementPolicy::born(1.0)?;
    let trials = 10_000;
    let clicks = (0..trials)
        .filter(|&seed| {
            single_query_search(n, tau, &born, seed)
                .unwrap()
                .measurement
                .clicked()
        })
        .count();
    println!(
        "Born read-out clicked in {clicks}/{trials} trials (expect about 1/{})",
        1 << n
    );
    Ok(())
}
