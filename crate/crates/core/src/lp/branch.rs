//! Depth-first branch-and-bound for 0/1 programs.

use super::{
    binary_limit_error, simplex, LpModel, LpSolution, LpStatus, MipModel, ObjectiveSense,
    SolverConfig,
};
use crate::error::{Error, ResourceKind, Result};

struct Node {
    fixings: Vec<(usize, f64)>,
}

/// Solves `model` exactly (up to `gap_tol`) by branching on the most
/// fractional binary, exploring the up-branch first.
pub fn solve_mip_with(model: &MipModel, config: &SolverConfig) -> Result<LpSolution> {
    if model.binaries.len() > config.max_binaries {
        return Err(binary_limit_error(
            model.binaries.len(),
            config.max_binaries,
        ));
    }
    model.validate()?;

    // Work in "maximize" orientation for pruning.
    let sign = match model.base.objective_sense() {
        ObjectiveSense::Maximize => 1.0,
        ObjectiveSense::Minimize => -1.0,
    };
    let mut incumbent: Option<LpSolution> = None;
    let mut best = f64::NEG_INFINITY;
    let mut stack = vec![Node {
        fixings: Vec::new(),
    }];
    let mut nodes = 0usize;
    let mut work = model.base.clone();

    while let Some(node) = stack.pop() {
        nodes += 1;
        if nodes > config.max_nodes {
            return Err(Error::resource(
                ResourceKind::NodeLimit,
                format!("branch-and-bound exceeded {} nodes", config.max_nodes),
            ));
        }
        reset_bounds(&mut work, &model.base, &model.binaries);
        for &(j, v) in &node.fixings {
            work.set_bounds(j, v, v);
        }
        let relax = simplex::solve(&work, config)?;
        match relax.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => return Ok(LpSolution::without_point(LpStatus::Unbounded)),
            LpStatus::Optimal => {}
        }
        let bound = sign * relax.objective;
        if incumbent.is_some() && bound <= best + config.gap_tol {
            continue;
        }

        let mut branch_on: Option<(usize, f64)> = None;
        let mut worst = config.integrality_tol;
        for &j in &model.binaries {
            let v = relax.values[j];
            let frac = (v - v.round()).abs();
            if frac > worst {
                worst = frac;
                branch_on = Some((j, v));
            }
        }

        match branch_on {
            None => {
                // Snap binaries and re-solve so the reported point is exact.
                reset_bounds(&mut work, &model.base, &model.binaries);
                for &j in &model.binaries {
                    let v = relax.values[j].round().clamp(0.0, 1.0);
                    work.set_bounds(j, v, v);
                }
                let polished = simplex::solve(&work, config)?;
                let candidate = if polished.is_optimal() {
                    polished
                } else {
                    relax
                };
                let value = sign * candidate.objective;
                if incumbent.is_none() || value > best {
                    best = value;
                    incumbent = Some(candidate);
                }
            }
            Some((j, _)) => {
                let mut down = node.fixings.clone();
                down.push((j, 0.0));
                let mut up = node.fixings;
                up.push((j, 1.0));
                stack.push(Node { fixings: down });
                stack.push(Node { fixings: up });
            }
        }
    }

    Ok(incumbent.unwrap_or_else(|| LpSolution::without_point(LpStatus::Infeasible)))
}

fn reset_bounds(work: &mut LpModel, base: &LpModel, binaries: &[usize]) {
    for &j in binaries {
        let v = &base.variables()[j];
        work.set_bounds(j, v.lower, v.upper);
    }
}
