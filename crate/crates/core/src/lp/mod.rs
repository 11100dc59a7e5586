//! Linear and mixed 0/1 programs.
//!
//! The reference engine is a dense two-phase revised simplex (Dantzig pricing
//! with a Bland's-rule fallback on degenerate stalls) and a depth-first
//! branch-and-bound on top of it. Solves are deterministic: the same model
//! always produces the same status, pivots and objective bits.

mod branch;
mod simplex;
pub mod text;

use std::collections::BTreeSet;

use crate::error::{Error, ResourceKind, Result};

pub use branch::solve_mip_with;
pub use text::ExternalSolver;

/// Default feasibility tolerance for constraints.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Default integrality tolerance for binaries.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Default absolute optimality gap for branch-and-bound.
pub const GAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveSense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// A linear row `sum terms (sense) rhs`; terms are sparse `(variable, coefficient)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective_sense: ObjectiveSense,
    objective: Vec<(usize, f64)>,
}

impl Default for LpModel {
    fn default() -> Self {
        Self::new()
    }
}

impl LpModel {
    /// An empty model minimizing zero.
    pub fn new() -> Self {
        LpModel {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective_sense: ObjectiveSense::Minimize,
            objective: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, sense: ConstraintSense, rhs: f64) {
        self.constraints.push(Constraint { terms, sense, rhs });
    }

    pub fn set_objective(&mut self, sense: ObjectiveSense, terms: Vec<(usize, f64)>) {
        self.objective_sense = sense;
        self.objective = terms;
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        let v = &mut self.variables[var];
        v.lower = lower;
        v.upper = upper;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective_sense(&self) -> ObjectiveSense {
        self.objective_sense
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Checks indices, bounds and finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        for (j, v) in self.variables.iter().enumerate() {
            if v.name.is_empty() || v.name.chars().any(char::is_whitespace) {
                return Err(Error::domain(format!(
                    "variable {j} has an empty or whitespace-containing name"
                )));
            }
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(Error::domain(format!(
                    "variable {} has invalid bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(Error::domain(format!(
                    "variable {} has empty domain",
                    v.name
                )));
            }
        }
        let check_terms = |terms: &[(usize, f64)], what: &str| -> Result<()> {
            for &(j, c) in terms {
                if j >= n {
                    return Err(Error::domain(format!(
                        "{what} references variable {j} of {n}"
                    )));
                }
                if !c.is_finite() {
                    return Err(Error::domain(format!(
                        "{what} has non-finite coefficient {c}"
                    )));
                }
            }
            Ok(())
        };
        for (i, c) in self.constraints.iter().enumerate() {
            check_terms(&c.terms, &format!("constraint {i}"))?;
            if !c.rhs.is_finite() {
                return Err(Error::domain(format!("constraint {i} has non-finite rhs")));
            }
        }
        check_terms(&self.objective, "objective")
    }

    /// Evaluates the objective at `x`.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, c)| c * x[j]).sum()
    }

    /// Largest constraint violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| {
                let lhs: f64 = c.terms.iter().map(|&(j, a)| a * x[j]).sum();
                match c.sense {
                    ConstraintSense::Le => (lhs - c.rhs).max(0.0),
                    ConstraintSense::Ge => (c.rhs - lhs).max(0.0),
                    ConstraintSense::Eq => (lhs - c.rhs).abs(),
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest bound violation at `x`.
    pub fn max_bound_violation(&self, x: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(x)
            .map(|(v, &xj)| (v.lower - xj).max(xj - v.upper).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// An `LpModel` whose `binaries` are restricted to {0, 1}.
#[derive(Debug, Clone, PartialEq)]
pub struct MipModel {
    pub base: LpModel,
    pub binaries: Vec<usize>,
}

impl MipModel {
    pub fn new(base: LpModel, binaries: Vec<usize>) -> Self {
        MipModel { base, binaries }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        let mut seen = BTreeSet::new();
        for &j in &self.binaries {
            let v = self
                .base
                .variables
                .get(j)
                .ok_or_else(|| Error::domain(format!("binary index {j} out of range")))?;
            if v.lower < 0.0 || v.upper > 1.0 {
                return Err(Error::domain(format!(
                    "binary variable {} has bounds [{}, {}] outside [0, 1]",
                    v.name, v.lower, v.upper
                )));
            }
            if !seen.insert(j) {
                return Err(Error::domain(format!("binary index {j} repeated")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve. `values` is empty and `objective` is NaN unless the
/// status is `Optimal`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    pub(crate) fn without_point(status: LpStatus) -> Self {
        LpSolution {
            status,
            values: Vec::new(),
            objective: f64::NAN,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Tolerances and budgets shared by the LP and MIP engines.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    pub gap_tol: f64,
    /// Simplex pivot budget per solve; `None` scales with model size.
    pub max_iterations: Option<usize>,
    pub max_nodes: usize,
    pub max_binaries: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feasibility_tol: FEASIBILITY_TOL,
            integrality_tol: INTEGRALITY_TOL,
            gap_tol: GAP_TOL,
            max_iterations: None,
            max_nodes: 200_000,
            max_binaries: 4096,
        }
    }
}

/// Solves `model` with default tolerances.
pub fn solve_lp(model: &LpModel) -> Result<LpSolution> {
    solve_lp_with(model, &SolverConfig::default())
}

pub fn solve_lp_with(model: &LpModel, config: &SolverConfig) -> Result<LpSolution> {
    model.validate()?;
    simplex::solve(model, config)
}

/// Solves `model` by branch-and-bound with default tolerances.
pub fn solve_mip(model: &MipModel) -> Result<LpSolution> {
    solve_mip_with(model, &SolverConfig::default())
}

pub(crate) fn binary_limit_error(count: usize, limit: usize) -> Error {
    Error::resource(
        ResourceKind::BinaryLimit,
        format!("{count} binaries exceed the configured limit of {limit}"),
    )
}
