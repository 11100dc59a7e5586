//! Line-oriented text form of models and solutions, used at the boundary
//! with external solvers.
//!
//! ```text
//! lp v1
//! objective max
//! var x 0 inf
//! var y -inf 3
//! obj 0 1 1 -1
//! con le 5 0 1 1 2
//! bin 1
//! end
//! ```
//!
//! `obj` and `con` carry `(index, coefficient)` pairs; `con` takes the sense
//! and right-hand side first. `bin` lines are optional and list binary
//! variable indices. Numbers use `.` as decimal separator and the shortest
//! representation that parses back to the same `f64`; infinities are `inf`
//! and `-inf`. Blank lines and lines starting with `#` are ignored.
//!
//! Solutions:
//!
//! ```text
//! solution v1
//! status optimal
//! objective 5
//! values 5 0
//! end
//! ```
//!
//! `objective` and `values` appear only for `optimal`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use super::{ConstraintSense, LpModel, LpSolution, LpStatus, MipModel, ObjectiveSense};
use crate::error::{Error, Result};

/// Environment variable naming an external solver executable.
pub const SOLVER_ENV: &str = "FAIRMDP_LP_SOLVER";

fn push_pairs(out: &mut String, terms: &[(usize, f64)]) {
    for &(j, c) in terms {
        let _ = write!(out, " {j} {c}");
    }
}

/// Serializes a model; binaries are listed when `binaries` is non-empty.
pub fn write_lp(model: &LpModel, binaries: &[usize]) -> String {
    let mut out = String::from("lp v1\n");
    let sense = match model.objective_sense() {
        ObjectiveSense::Maximize => "max",
        ObjectiveSense::Minimize => "min",
    };
    let _ = writeln!(out, "objective {sense}");
    for v in model.variables() {
        let _ = writeln!(out, "var {} {} {}", v.name, v.lower, v.upper);
    }
    out.push_str("obj");
    push_pairs(&mut out, model.objective());
    out.push('\n');
    for c in model.constraints() {
        let s = match c.sense {
            ConstraintSense::Le => "le",
            ConstraintSense::Ge => "ge",
            ConstraintSense::Eq => "eq",
        };
        let _ = write!(out, "con {s} {}", c.rhs);
        push_pairs(&mut out, &c.terms);
        out.push('\n');
    }
    if !binaries.is_empty() {
        out.push_str("bin");
        for j in binaries {
            let _ = write!(out, " {j}");
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad number '{tok}'")))
}

fn index(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("bad index '{tok}'")))
}

fn pairs(toks: &[&str], line: usize) -> Result<Vec<(usize, f64)>> {
    if !toks.len().is_multiple_of(2) {
        return Err(parse_err(line, "odd number of index/coefficient tokens"));
    }
    toks.chunks(2)
        .map(|p| Ok((index(p[0], line)?, num(p[1], line)?)))
        .collect()
}

/// Content lines with 1-based line numbers, comments and blanks dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

/// Parses `write_lp` output into a model plus its binary indices.
pub fn parse_lp(text: &str) -> Result<MipModel> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, t)) if t == ["lp", "v1"] => {}
        Some((n, _)) => return Err(parse_err(n, "expected header 'lp v1'")),
        None => return Err(parse_err(0, "empty input")),
    }
    let mut model = LpModel::new();
    let mut sense = ObjectiveSense::Minimize;
    let mut objective = Vec::new();
    let mut binaries = Vec::new();
    let mut last = 0;
    for (n, t) in lines {
        last = n;
        match t[0] {
            "objective" => {
                sense = match t.get(1) {
                    Some(&"max") if t.len() == 2 => ObjectiveSense::Maximize,
                    Some(&"min") if t.len() == 2 => ObjectiveSense::Minimize,
                    _ => return Err(parse_err(n, "expected 'objective max|min'")),
                }
            }
            "var" => {
                if t.len() != 4 {
                    return Err(parse_err(n, "expected 'var name lower upper'"));
                }
                model.add_var(t[1], num(t[2], n)?, num(t[3], n)?);
            }
            "obj" => objective = pairs(&t[1..], n)?,
            "con" => {
                if t.len() < 3 {
                    return Err(parse_err(n, "expected 'con sense rhs pairs...'"));
                }
                let s = match t[1] {
                    "le" => ConstraintSense::Le,
                    "ge" => ConstraintSense::Ge,
                    "eq" => ConstraintSense::Eq,
                    other => return Err(parse_err(n, format!("unknown sense '{other}'"))),
                };
                model.add_constraint(pairs(&t[3..], n)?, s, num(t[2], n)?);
            }
            "bin" => {
                for tok in &t[1..] {
                    binaries.push(index(tok, n)?);
                }
            }
            "end" => {
                model.set_objective(sense, objective);
                let mip = MipModel::new(model, binaries);
                mip.validate()
                    .map_err(|e| parse_err(n, format!("invalid model: {e}")))?;
                return Ok(mip);
            }
            other => return Err(parse_err(n, format!("unknown keyword '{other}'"))),
        }
    }
    Err(parse_err(last, "missing 'end'"))
}

pub fn write_solution(sol: &LpSolution) -> String {
    let mut out = String::from("solution v1\n");
    let status = match sol.status {
        LpStatus::Optimal => "optimal",
        LpStatus::Infeasible => "infeasible",
        LpStatus::Unbounded => "unbounded",
    };
    let _ = writeln!(out, "status {status}");
    if sol.is_optimal() {
        let _ = writeln!(out, "objective {}", sol.objective);
        out.push_str("values");
        for v in &sol.values {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

pub fn parse_solution(text: &str) -> Result<LpSolution> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, t)) if t == ["solution", "v1"] => {}
        Some((n, _)) => return Err(parse_err(n, "expected header 'solution v1'")),
        None => return Err(parse_err(0, "empty input")),
    }
    let mut status = None;
    let mut objective = None;
    let mut values = None;
    let mut last = 0;
    for (n, t) in lines {
        last = n;
        match t[0] {
            "status" => {
                status = Some(match t.get(1) {
                    Some(&"optimal") => LpStatus::Optimal,
                    Some(&"infeasible") => LpStatus::Infeasible,
                    Some(&"unbounded") => LpStatus::Unbounded,
                    _ => return Err(parse_err(n, "unknown status")),
                })
            }
            "objective" if t.len() == 2 => objective = Some(num(t[1], n)?),
            "values" => {
                values = Some(
                    t[1..]
                        .iter()
                        .map(|s| num(s, n))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "end" => {
                let status = status.ok_or_else(|| parse_err(n, "missing status"))?;
                if status != LpStatus::Optimal {
                    return Ok(LpSolution::without_point(status));
                }
                return Ok(LpSolution {
                    status,
                    objective: objective.ok_or_else(|| parse_err(n, "missing objective"))?,
                    values: values.ok_or_else(|| parse_err(n, "missing values"))?,
                });
            }
            other => return Err(parse_err(n, format!("unexpected '{other}'"))),
        }
    }
    Err(parse_err(last, "missing 'end'"))
}

/// Runs an external program that reads `write_lp` text on stdin and prints
/// `write_solution` text on stdout.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl ExternalSolver {
    pub fn new(program: impl Into<PathBuf>, args: Vec<String>) -> Self {
        ExternalSolver {
            program: program.into(),
            args,
        }
    }

    /// Reads the program path from `FAIRMDP_LP_SOLVER`, if set and non-empty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(SOLVER_ENV)
            .filter(|v| !v.is_empty())
            .map(|p| ExternalSolver::new(p, Vec::new()))
    }

    pub fn solve_lp(&self, model: &LpModel) -> Result<LpSolution> {
        model.validate()?;
        self.run(&write_lp(model, &[]), model.num_vars())
    }

    pub fn solve_mip(&self, model: &MipModel) -> Result<LpSolution> {
        model.validate()?;
        self.run(
            &write_lp(&model.base, &model.binaries),
            model.base.num_vars(),
        )
    }

    fn run(&self, input: &str, num_vars: usize) -> Result<LpSolution> {
        let ext = |e: std::io::Error| Error::External(format!("{}: {e}", self.program.display()));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(ext)?;
        child
            .stdin
            .take()
            .expect("stdin is piped")
            .write_all(input.as_bytes())
            .map_err(ext)?;
        let output = child.wait_with_output().map_err(ext)?;
        if !output.status.success() {
            return Err(Error::External(format!(
                "{} exited with {}: {}",
                self.program.display(),
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let text = String::from_utf8(output.stdout)
            .map_err(|_| Error::External("solver output is not UTF-8".into()))?;
        let sol = parse_solution(&text)?;
        if sol.is_optimal() && sol.values.len() != num_vars {
            return Err(Error::External(format!(
                "solver returned {} values for {} variables",
                sol.values.len(),
                num_vars
            )));
        }
        Ok(sol)
    }
}
