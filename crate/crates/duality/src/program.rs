//! Line-oriented program text format.
//!
//! One directive per line; `#` starts a comment. A program declares its
//! register size first, then mixes gate steps with divider blocks:
//!
//! ```text
//! DUBITS 2
//! H 0
//! H 1
//! DIVIDE 0.5 0.5
//! PATH 1
//! END
//! PATH 2
//!   ORACLE marked=2 conv=unmarked
//! END
//! COMBINE
//! ```
//!
//! Gate steps: `H i`, `X i`, `Z i`, `R i θ`, `P i λ`, `CNOT c t`,
//! `ORACLE marked=i[,j…] conv={unmarked|marked}`. A `DIVIDE a₁[:tag₁] …`
//! opens a divider whose branches follow as `PATH k` … `END` blocks in
//! order, closed by `COMBINE`; `PHASE-PATH k φ` between blocks sets a
//! branch's spatial phase. Branch weights not given an explicit `:tag`
//! share one coherence class. Angles and weights are plain decimal
//! numbers. Nesting inside `PATH` blocks is permitted.

use crate::engine::{CoherenceTag, DividerSpec, DualityProgram};
use crate::error::{Error, Result};
use crate::gates::{Circuit, Gate, OracleConvention, OracleSpec};

/// A parsed program: register size plus the evaluation tree.
#[derive(Clone, Debug)]
pub struct ParsedProgram {
    pub n_dubits: usize,
    pub program: DualityProgram,
}

struct Cursor<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(idx, raw)| {
                let body = raw.split('#').next().unwrap_or("").trim();
                if body.is_empty() {
                    None
                } else {
                    Some((idx + 1, body.split_whitespace().collect()))
                }
            })
            .collect();
        Cursor { lines, pos: 0 }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.lines.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let item = self.lines.get(self.pos).cloned();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn last_line(&self) -> usize {
        self.lines.last().map(|(n, _)| *n).unwrap_or(1)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_usize(line: usize, token: &str, what: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("bad {what} `{token}`")))
}

fn parse_f64(line: usize, token: &str, what: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| parse_err(line, format!("bad {what} `{token}`")))
}

/// Parses a complete program file.
pub fn parse_program(text: &str) -> Result<ParsedProgram> {
    let mut cursor = Cursor::new(text);
    let (line, tokens) = cursor
        .next()
        .ok_or_else(|| parse_err(1, "empty program; expected `DUBITS n`"))?;
    if tokens[0] != "DUBITS" || tokens.len() != 2 {
        return Err(parse_err(line, "first directive must be `DUBITS n`"));
    }
    let n_dubits = parse_usize(line, tokens[1], "dubit count")?;
    let program = parse_sequence(&mut cursor, n_dubits, None)?;
    if let Some((line, tokens)) = cursor.peek() {
        return Err(parse_err(
            *line,
            format!("unexpected `{}` after program end", tokens[0]),
        ));
    }
    Ok(ParsedProgram { n_dubits, program })
}

/// Parses directives until EOF (terminator `None`) or a terminator line,
/// which is consumed.
fn parse_sequence(
    cursor: &mut Cursor<'_>,
    n_dubits: usize,
    terminator: Option<&str>,
) -> Result<DualityProgram> {
    let mut items: Vec<DualityProgram> = Vec::new();
    let mut pending = Circuit::new(n_dubits);

    loop {
        let Some((line, tokens)) = cursor.peek().map(|(l, t)| (*l, t.clone())) else {
            if let Some(t) = terminator {
                return Err(parse_err(
                    cursor.last_line(),
                    format!("unclosed block; expected `{t}`"),
                ));
            }
            break;
        };
        match tokens[0] {
            t if Some(t) == terminator => {
                cursor.next();
                break;
            }
            "DIVIDE" => {
                cursor.next();
                flush(&mut items, &mut pending, n_dubits);
                items.push(parse_divider(cursor, n_dubits, line, &tokens[1..])?);
            }
            "DUBITS" => return Err(parse_err(line, "duplicate `DUBITS` directive")),
            "PATH" | "END" | "COMBINE" | "PHASE-PATH" => {
                return Err(parse_err(
                    line,
                    format!("`{}` outside a divider block", tokens[0]),
                ));
            }
            _ => {
                cursor.next();
                add_gate_line(&mut pending, line, &tokens)?;
            }
        }
    }

    flush(&mut items, &mut pending, n_dubits);
    if items.is_empty() {
        items.push(DualityProgram::leaf(Circuit::new(n_dubits)));
    }
    if items.len() == 1 {
        Ok(items.pop().expect("one item"))
    } else {
        DualityProgram::sequence(items)
    }
}

fn flush(items: &mut Vec<DualityProgram>, pending: &mut Circuit, n_dubits: usize) {
    if !pending.is_empty() {
        items.push(DualityProgram::leaf(std::mem::replace(
            pending,
            Circuit::new(n_dubits),
        )));
    }
}

fn add_gate_line(circuit: &mut Circuit, line: usize, tokens: &[&str]) -> Result<()> {
    let wrap = |e: Error| match e {
        Error::Parse { .. } => e,
        other => parse_err(line, other.to_string()),
    };
    match tokens[0] {
        "H" | "X" | "Z" => {
            if tokens.len() != 2 {
                return Err(parse_err(
                    line,
                    format!("`{} i` takes one target", tokens[0]),
                ));
            }
            let target = parse_usize(line, tokens[1], "target")?;
            circuit
                .add_gate(Gate::by_name(tokens[0], &[]).map_err(wrap)?, &[target])
                .map_err(wrap)?;
        }
        "R" | "P" => {
            if tokens.len() != 3 {
                return Err(parse_err(
                    line,
                    format!("`{} i angle` takes a target and an angle", tokens[0]),
                ));
            }
            let target = parse_usize(line, tokens[1], "target")?;
            let angle = parse_f64(line, tokens[2], "angle")?;
            circuit
                .add_gate(Gate::by_name(tokens[0], &[angle]).map_err(wrap)?, &[target])
                .map_err(wrap)?;
        }
        "CNOT" => {
            if tokens.len() != 3 {
                return Err(parse_err(line, "`CNOT c t` takes control and target"));
            }
            let control = parse_usize(line, tokens[1], "control")?;
            let target = parse_usize(line, tokens[2], "target")?;
            circuit
                .add_gate(Gate::cnot(), &[control, target])
                .map_err(wrap)?;
        }
        "ORACLE" => {
            let mut marked: Option<Vec<usize>> = None;
            let mut convention = OracleConvention::FlipUnmarked;
            for field in &tokens[1..] {
                if let Some(list) = field.strip_prefix("marked=") {
                    let indices = list
                        .split(',')
                        .map(|t| parse_usize(line, t, "marked index"))
                        .collect::<Result<Vec<usize>>>()?;
                    marked = Some(indices);
                } else if let Some(conv) = field.strip_prefix("conv=") {
                    convention = match conv {
                        "unmarked" => OracleConvention::FlipUnmarked,
                        "marked" => OracleConvention::FlipMarked,
                        other => {
                            return Err(parse_err(
                                line,
                                format!("conv must be `unmarked` or `marked`, got `{other}`"),
                            ));
                        }
                    };
                } else {
                    return Err(parse_err(line, format!("unknown ORACLE field `{field}`")));
                }
            }
            let marked =
                marked.ok_or_else(|| parse_err(line, "ORACLE requires `marked=i[,j…]`"))?;
            let spec = OracleSpec::new(circuit.n_dubits(), marked, convention);
            circuit
                .add_oracle(spec.operator().map_err(wrap)?)
                .map_err(wrap)?;
        }
        other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
    }
    Ok(())
}

fn parse_divider(
    cursor: &mut Cursor<'_>,
    n_dubits: usize,
    divide_line: usize,
    weight_tokens: &[&str],
) -> Result<DualityProgram> {
    if weight_tokens.len() < 2 {
        return Err(parse_err(
            divide_line,
            "DIVIDE needs at least two branch weights",
        ));
    }
    let mut branches_spec: Vec<(f64, CoherenceTag)> = Vec::new();
    for token in weight_tokens {
        let (weight, tag) = match token.split_once(':') {
            Some((w, tag)) if !tag.is_empty() => (
                parse_f64(divide_line, w, "branch weight")?,
                CoherenceTag::new(tag),
            ),
            Some(_) => return Err(parse_err(divide_line, format!("empty tag in `{token}`"))),
            None => (
                parse_f64(divide_line, token, "branch weight")?,
                CoherenceTag::new("coh"),
            ),
        };
        branches_spec.push((weight, tag));
    }
    let spec =
        DividerSpec::new(branches_spec).map_err(|e| parse_err(divide_line, e.to_string()))?;

    let branch_count = spec.len();
    let mut branches: Vec<DualityProgram> = Vec::with_capacity(branch_count);
    let mut phases = vec![0.0f64; branch_count];

    loop {
        let Some((line, tokens)) = cursor.next() else {
            return Err(parse_err(
                cursor.last_line(),
                "unclosed DIVIDE; expected `COMBINE`",
            ));
        };
        match tokens[0] {
            "PATH" => {
                if tokens.len() != 2 {
                    return Err(parse_err(line, "`PATH k` takes the branch number"));
                }
                let k = parse_usize(line, tokens[1], "branch number")?;
                if k != branches.len() + 1 {
                    return Err(parse_err(
                        line,
                        format!("expected `PATH {}`, got `PATH {k}`", branches.len() + 1),
                    ));
                }
                if k > branch_count {
                    return Err(parse_err(
                        line,
                        format!("divider declares {branch_count} branches"),
                    ));
                }
                branches.push(parse_sequence(cursor, n_dubits, Some("END"))?);
            }
            "PHASE-PATH" => {
                if tokens.len() != 3 {
                    return Err(parse_err(
                        line,
                        "`PHASE-PATH k phase` takes branch and phase",
                    ));
                }
                let k = parse_usize(line, tokens[1], "branch number")?;
                if k == 0 || k > branch_count {
                    return Err(parse_err(line, format!("branch {k} out of range")));
                }
                phases[k - 1] = parse_f64(line, tokens[2], "phase")?;
            }
            "COMBINE" => {
                if branches.len() != branch_count {
                    return Err(parse_err(
                        line,
                        format!(
                            "divider declares {branch_count} branches but {} PATH blocks given",
                            branches.len()
                        ),
                    ));
                }
                return DualityProgram::divider_with_phases(spec, phases, branches)
                    .map_err(|e| parse_err(line, e.to_string()));
            }
            other => {
                return Err(parse_err(
                    line,
                    format!("expected PATH/PHASE-PATH/COMBINE in divider block, got `{other}`"),
                ));
            }
        }
    }
}
