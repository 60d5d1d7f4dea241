//! The line-oriented program format, parsed and evaluated in-process.
//!
//! The same format the `duality run` subcommand reads from a file:
//! `DUBITS` declares the register, gate lines build circuit segments, and
//! `DIVIDE … PATH … END … COMBINE` blocks divide the wave, run one block
//! per path and recombine. `PHASE-PATH` gives a branch a spatial phase.

use duality::amplitude::StateVector;
use duality::engine::run_program;
use duality::program::parse_program;

const SEARCH: &str = "\
# 8-item search for index 5 with one query
DUBITS 3
H 0
H 1
H 2
DIVIDE 0.5 0.5
PATH 1
END
PATH 2
  ORACLE marked=5 conv=unmarked
END
COMBINE
";

const FRINGE: &str = "\
# two equal paths, one phase-shifted by pi/3
DUBITS 1
H 0
DIVIDE 0.5 0.5
PHASE-PATH 2 1.0471975511965976
PATH 1
END
PATH 2
END
COMBINE
";

fn main() -> duality::Result<()> {
    for (name, text) in [("search", SEARCH), ("fringe", FRINGE)] {
        let parsed = parse_program(text)?;
        let input = StateVector::basis_state(parsed.n_dubits, 0)?;
        let out = run_program(&input, &parsed.program)?;
        println!("{name}: norm² = {:.6}", out.norm_sq());
        for (i, amp) in out.amplitudes().iter().enumerate() {
            if amp.norm_sqr() > 1e-20 {
                println!(
                    "  {i:0>width$b}: {:+.6} {:+.6}i",
                    amp.re,
                    amp.im,
                    width = parsed.n_dubits
                );
            }
        }
    }
    Ok(())
}
