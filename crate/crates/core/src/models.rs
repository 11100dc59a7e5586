//! Builders turning a `Momdp` and a query into an `LpModel` / `MipModel`.
//!
//! Value components are never LP variables: `z_i` is kept as a linear
//! expression over the occupation variables `x_sa` and substituted wherever
//! a constraint or objective mentions it.

use crate::error::{Error, Result};
use crate::lp::{ConstraintSense, LpModel, LpSolution, MipModel, ObjectiveSense};
use crate::momdp::{occupation_to_policy, occupation_value, Momdp, OccupationMeasure, Policy};
use crate::vector::ValueVector;

/// Which dominance relation a query is phrased in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Pareto,
    Lorenz,
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Space::Pareto => "pareto",
            Space::Lorenz => "lorenz",
        })
    }
}

/// The flow polytope over `x_sa` plus whatever a builder added on top.
#[derive(Debug, Clone)]
pub struct OccupationLpHandle {
    pub model: LpModel,
    num_states: usize,
    num_actions: usize,
    x_index: Vec<usize>,
    z_expr: Vec<Vec<(usize, f64)>>,
}

impl OccupationLpHandle {
    pub fn x_var(&self, s: usize, a: usize) -> usize {
        self.x_index[s * self.num_actions + a]
    }

    pub fn x_vars(&self) -> &[usize] {
        &self.x_index
    }

    /// `z_i` as sparse terms over the model's variables.
    pub fn z_expr(&self, i: usize) -> &[(usize, f64)] {
        &self.z_expr[i]
    }

    pub fn num_objectives(&self) -> usize {
        self.z_expr.len()
    }

    /// `sum_i w_i z_i` with duplicate variables merged.
    pub fn weighted_z(&self, weights: &[f64]) -> Vec<(usize, f64)> {
        let mut acc = vec![0.0; self.model.num_vars()];
        for (expr, &w) in self.z_expr.iter().zip(weights) {
            for &(j, c) in expr {
                acc[j] += w * c;
            }
        }
        acc.into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0.0)
            .collect()
    }

    /// `z_i` plus `extra`, for constraints mixing values and auxiliaries.
    fn z_with(&self, i: usize, scale: f64, extra: &[(usize, f64)]) -> Vec<(usize, f64)> {
        let mut terms: Vec<(usize, f64)> = self.z_expr[i]
            .iter()
            .map(|&(j, c)| (j, scale * c))
            .collect();
        terms.extend_from_slice(extra);
        terms
    }
}

/// Flow constraints `sum_a x_sa - gamma sum_{s',a} p(s',a,s) x_s'a = mu_s`
/// with `x >= 0` and no objective.
pub fn build_occupation_lp(m: &Momdp) -> OccupationLpHandle {
    let (ns, na, n) = (m.num_states(), m.num_actions(), m.num_objectives());
    let mut model = LpModel::new();
    let mut x_index = Vec::with_capacity(ns * na);
    for s in 0..ns {
        for a in 0..na {
            x_index.push(model.add_var(format!("x_{s}_{a}"), 0.0, f64::INFINITY));
        }
    }
    let gamma = m.discount();
    let mut rows = vec![vec![0.0; ns * na]; ns];
    for s in 0..ns {
        for a in 0..na {
            rows[s][s * na + a] += 1.0;
            for (next, p) in m.transition_row(s, a).iter().enumerate() {
                if *p != 0.0 {
                    rows[next][s * na + a] -= gamma * p;
                }
            }
        }
    }
    for (s, row) in rows.into_iter().enumerate() {
        let terms = row
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0.0)
            .map(|(k, c)| (x_index[k], c))
            .collect();
        model.add_constraint(terms, ConstraintSense::Eq, m.initial()[s]);
    }
    let z_expr = (0..n)
        .map(|i| {
            (0..ns * na)
                .filter_map(|k| {
                    let r = m.reward(k / na, k % na)[i];
                    (r != 0.0).then_some((x_index[k], r))
                })
                .collect()
        })
        .collect();
    OccupationLpHandle {
        model,
        num_states: ns,
        num_actions: na,
        x_index,
        z_expr,
    }
}

/// Binaries `d_sa` with `sum_a d_sa <= 1` and `(1 - gamma) x_sa <= d_sa`.
#[derive(Debug, Clone)]
pub struct DeterministicExtension {
    pub mip: MipModel,
    pub d_index: Vec<usize>,
}

pub fn add_deterministic_constraints(h: &OccupationLpHandle, m: &Momdp) -> DeterministicExtension {
    let mut model = h.model.clone();
    let (ns, na) = (h.num_states, h.num_actions);
    let mut d_index = Vec::with_capacity(ns * na);
    for s in 0..ns {
        for a in 0..na {
            d_index.push(model.add_var(format!("d_{s}_{a}"), 0.0, 1.0));
        }
    }
    let one_minus_gamma = 1.0 - m.discount();
    for s in 0..ns {
        let row = (0..na).map(|a| (d_index[s * na + a], 1.0)).collect();
        model.add_constraint(row, ConstraintSense::Le, 1.0);
        for a in 0..na {
            let k = s * na + a;
            model.add_constraint(
                vec![(h.x_index[k], one_minus_gamma), (d_index[k], -1.0)],
                ConstraintSense::Le,
                0.0,
            );
        }
    }
    DeterministicExtension {
        mip: MipModel::new(model, d_index.clone()),
        d_index,
    }
}

/// The threshold LP maximizing `L_n(z) = sum_i z_i` subject to
/// `L_k(z) >= eta_k` for `k < n`, each `L_k` written through its dual
/// `max k t_k - sum_i b_ik` s.t. `t_k - b_ik <= z_i`, `b >= 0`.
#[derive(Debug, Clone)]
pub struct LorenzTestHandle {
    pub base: OccupationLpHandle,
    /// `t_k` for `k = 1..n-1` (index `k - 1`).
    pub t_index: Vec<usize>,
    /// `b_ik` stored as `b_index[k - 1][i]`.
    pub b_index: Vec<Vec<usize>>,
    pub eta: Vec<f64>,
}

/// Adds `t_k`, `b_ik` for one `k` and the rows `t_k - b_ik - z_i <= 0`.
/// Returns `(t, b)`.
fn add_lorenz_component(h: &mut OccupationLpHandle, k: usize) -> (usize, Vec<usize>) {
    let n = h.num_objectives();
    let t = h
        .model
        .add_var(format!("t_{k}"), f64::NEG_INFINITY, f64::INFINITY);
    let b: Vec<usize> = (0..n)
        .map(|i| h.model.add_var(format!("b_{i}_{k}"), 0.0, f64::INFINITY))
        .collect();
    for (i, &bi) in b.iter().enumerate() {
        let terms = h.z_with(i, -1.0, &[(t, 1.0), (bi, -1.0)]);
        h.model.add_constraint(terms, ConstraintSense::Le, 0.0);
    }
    (t, b)
}

fn lorenz_dual_terms(k: usize, t: usize, b: &[usize]) -> Vec<(usize, f64)> {
    let mut terms = vec![(t, k as f64)];
    terms.extend(b.iter().map(|&bi| (bi, -1.0)));
    terms
}

pub fn build_lorenz_test_lp(m: &Momdp, eta: &[f64]) -> Result<LorenzTestHandle> {
    let n = m.num_objectives();
    if eta.len() != n - 1 {
        return Err(Error::domain(format!(
            "expected {} Lorenz thresholds, got {}",
            n - 1,
            eta.len()
        )));
    }
    if let Some(e) = eta.iter().find(|e| !e.is_finite()) {
        return Err(Error::domain(format!("threshold {e} is not finite")));
    }
    let mut h = build_occupation_lp(m);
    let mut t_index = Vec::with_capacity(n - 1);
    let mut b_index = Vec::with_capacity(n - 1);
    for (k0, &e) in eta.iter().enumerate() {
        let k = k0 + 1;
        let (t, b) = add_lorenz_component(&mut h, k);
        h.model
            .add_constraint(lorenz_dual_terms(k, t, &b), ConstraintSense::Ge, e);
        t_index.push(t);
        b_index.push(b);
    }
    let obj = h.weighted_z(&vec![1.0; n]);
    h.model.set_objective(ObjectiveSense::Maximize, obj);
    Ok(LorenzTestHandle {
        base: h,
        t_index,
        b_index,
        eta: eta.to_vec(),
    })
}

/// Maximizes `z_n` subject to `z_i >= eta_i` for `i < n`.
pub fn build_pareto_threshold_lp(m: &Momdp, eta: &[f64]) -> Result<OccupationLpHandle> {
    let n = m.num_objectives();
    if eta.len() != n - 1 {
        return Err(Error::domain(format!(
            "expected {} thresholds, got {}",
            n - 1,
            eta.len()
        )));
    }
    if let Some(e) = eta.iter().find(|e| !e.is_finite()) {
        return Err(Error::domain(format!("threshold {e} is not finite")));
    }
    let mut h = build_occupation_lp(m);
    for (i, &e) in eta.iter().enumerate() {
        let terms = h.z_expr[i].clone();
        h.model.add_constraint(terms, ConstraintSense::Ge, e);
    }
    let obj = h.z_expr[n - 1].clone();
    h.model.set_objective(ObjectiveSense::Maximize, obj);
    Ok(h)
}

/// A Restrict-i query together with the expression of its objective, so that
/// callers can add a tie-breaking stage.
#[derive(Debug, Clone)]
pub struct RestrictHandle {
    pub base: OccupationLpHandle,
    /// Expression of the constrained side (`z_i` or `L_i`).
    pub constrained: Vec<(usize, f64)>,
    /// Expression of the maximized side.
    pub maximized: Vec<(usize, f64)>,
}

/// Restrict-i for a biobjective model: maximize the other coordinate (or
/// Lorenz component) subject to coordinate (component) `i >= alpha`.
pub fn build_restrict_lp(m: &Momdp, i: usize, alpha: f64, space: Space) -> Result<RestrictHandle> {
    if m.num_objectives() != 2 {
        return Err(Error::domain(format!(
            "restrict queries need 2 objectives, model has {}",
            m.num_objectives()
        )));
    }
    if i != 1 && i != 2 {
        return Err(Error::domain(format!(
            "restrict index must be 1 or 2, got {i}"
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::domain(format!("threshold {alpha} is not finite")));
    }
    let mut h = build_occupation_lp(m);
    let (constrained, maximized) = match space {
        Space::Pareto => (h.z_expr[i - 1].clone(), h.z_expr[2 - i].clone()),
        Space::Lorenz => {
            let (t, b) = add_lorenz_component(&mut h, 1);
            let l1 = lorenz_dual_terms(1, t, &b);
            let l2 = h.weighted_z(&[1.0, 1.0]);
            if i == 1 {
                (l1, l2)
            } else {
                (l2, l1)
            }
        }
    };
    h.model
        .add_constraint(constrained.clone(), ConstraintSense::Ge, alpha);
    h.model
        .set_objective(ObjectiveSense::Maximize, maximized.clone());
    Ok(RestrictHandle {
        base: h,
        constrained,
        maximized,
    })
}

/// LP whose optimum is `L_k(z)` for a fixed vector `z`:
/// `max k t - sum_i b_i` s.t. `t - b_i <= z_i`, `b >= 0`.
pub fn lorenz_component_dual(z: &[f64], k: usize) -> Result<LpModel> {
    if k == 0 || k > z.len() {
        return Err(Error::domain(format!(
            "component {k} out of range 1..={}",
            z.len()
        )));
    }
    let mut model = LpModel::new();
    let t = model.add_var("t", f64::NEG_INFINITY, f64::INFINITY);
    let b: Vec<usize> = (0..z.len())
        .map(|i| model.add_var(format!("b_{i}"), 0.0, f64::INFINITY))
        .collect();
    for (i, &bi) in b.iter().enumerate() {
        model.add_constraint(vec![(t, 1.0), (bi, -1.0)], ConstraintSense::Le, z[i]);
    }
    model.set_objective(ObjectiveSense::Maximize, lorenz_dual_terms(k, t, &b));
    Ok(model)
}

/// Reads `x` back out of a solution and recomputes value and policy from it.
pub fn extract_solution(
    h: &OccupationLpHandle,
    sol: &LpSolution,
    m: &Momdp,
) -> Result<(ValueVector, OccupationMeasure, Policy)> {
    if !sol.is_optimal() {
        return Err(Error::domain(format!(
            "cannot extract a point from a {:?} solution",
            sol.status
        )));
    }
    let x: Vec<f64> = h.x_index.iter().map(|&j| sol.values[j]).collect();
    let occ = OccupationMeasure::new(m, x)?;
    let value = occupation_value(m, &occ)?;
    let policy = occupation_to_policy(&occ);
    Ok((value, occ, policy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_lp, solve_mip, LpStatus};
    use crate::momdp::policy_value;

    fn single_state() -> Momdp {
        Momdp::new(1, 1, 2, vec![1.0], vec![2.0, 4.0], 0.9, vec![1.0]).unwrap()
    }

    fn two_by_two() -> Momdp {
        // State 0: action 0 stays, action 1 moves; state 1 mirrors.
        let transition = vec![1.0, 0.0, 0.0, 1.0, 0.5, 0.5, 1.0, 0.0];
        let reward = vec![3.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 5.0];
        Momdp::new(2, 2, 2, transition, reward, 0.8, vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn occupation_lp_single_state() {
        let m = single_state();
        let mut h = build_occupation_lp(&m);
        assert_eq!(h.model.constraints().len(), 1);
        let c = &h.model.constraints()[0];
        assert_eq!(c.terms.len(), 1);
        assert!((c.terms[0].1 - 0.1).abs() < 1e-15);
        let obj = h.weighted_z(&[1.0, 0.0]);
        h.model.set_objective(ObjectiveSense::Maximize, obj);
        let sol = solve_lp(&h.model).unwrap();
        let (z, x, policy) = extract_solution(&h, &sol, &m).unwrap();
        assert!((x.get(0, 0) - 10.0).abs() < 1e-9);
        assert!((z[0] - 20.0).abs() < 1e-9 && (z[1] - 40.0).abs() < 1e-9);
        assert_eq!(policy, Policy::Deterministic(vec![0]));
    }

    #[test]
    fn total_mass_is_geometric() {
        let m = two_by_two();
        let mut h = build_occupation_lp(&m);
        let obj = h.x_vars().iter().map(|&j| (j, 1.0)).collect();
        h.model.set_objective(ObjectiveSense::Maximize, obj);
        let sol = solve_lp(&h.model).unwrap();
        assert!((sol.objective - 5.0).abs() < 1e-9);
    }

    #[test]
    fn mip_matches_enumerated_deterministic_optimum() {
        let m = two_by_two();
        let h = build_occupation_lp(&m);
        let mut ext = add_deterministic_constraints(&h, &m);
        let w = [1.0, 0.3];
        ext.mip
            .base
            .set_objective(ObjectiveSense::Maximize, h.weighted_z(&w));
        let sol = solve_mip(&ext.mip).unwrap();
        let (z, x, policy) = extract_solution(&h, &sol, &m).unwrap();
        assert!(policy.is_deterministic());
        for s in 0..2 {
            assert!(x.state_row(s).iter().filter(|v| **v > 1e-6).count() <= 1);
        }
        let mut best = f64::NEG_INFINITY;
        for a0 in 0..2 {
            for a1 in 0..2 {
                let v = policy_value(&m, &Policy::Deterministic(vec![a0, a1])).unwrap();
                best = best.max(w[0] * v[0] + w[1] * v[1]);
            }
        }
        assert!((w[0] * z[0] + w[1] * z[1] - best).abs() < 1e-6);
    }

    #[test]
    fn all_binaries_off_is_infeasible() {
        let m = two_by_two();
        let h = build_occupation_lp(&m);
        let mut ext = add_deterministic_constraints(&h, &m);
        for &d in &ext.d_index {
            ext.mip.base.set_bounds(d, 0.0, 0.0);
        }
        assert_eq!(solve_mip(&ext.mip).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn lorenz_test_single_policy() {
        let m = single_state();
        let h = build_lorenz_test_lp(&m, &[10.0]).unwrap();
        let sol = solve_lp(&h.base.model).unwrap();
        assert!((sol.objective - 60.0).abs() < 1e-9);
        let h = build_lorenz_test_lp(&m, &[25.0]).unwrap();
        assert_eq!(
            solve_lp(&h.base.model).unwrap().status,
            LpStatus::Infeasible
        );
        assert!(build_lorenz_test_lp(&m, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn restrict_single_policy() {
        let m = single_state();
        let h = build_restrict_lp(&m, 1, 15.0, Space::Pareto).unwrap();
        let sol = solve_lp(&h.base.model).unwrap();
        let (z, _, _) = extract_solution(&h.base, &sol, &m).unwrap();
        assert!((z[0] - 20.0).abs() < 1e-9 && (z[1] - 40.0).abs() < 1e-9);
        let h = build_restrict_lp(&m, 1, 25.0, Space::Pareto).unwrap();
        assert_eq!(
            solve_lp(&h.base.model).unwrap().status,
            LpStatus::Infeasible
        );
        let h = build_restrict_lp(&m, 2, 61.0, Space::Lorenz).unwrap();
        assert_eq!(
            solve_lp(&h.base.model).unwrap().status,
            LpStatus::Infeasible
        );
        let h = build_restrict_lp(&m, 2, 60.0, Space::Lorenz).unwrap();
        assert!((solve_lp(&h.base.model).unwrap().objective - 20.0).abs() < 1e-9);
    }

    #[test]
    fn component_dual_matches_sorting() {
        let z = [5.0, 1.0, 3.0, 3.0];
        let expect = [1.0, 4.0, 7.0, 12.0];
        for k in 1..=4 {
            let sol = solve_lp(&lorenz_component_dual(&z, k).unwrap()).unwrap();
            assert!((sol.objective - expect[k - 1]).abs() < 1e-9);
        }
        assert!(lorenz_component_dual(&z, 0).is_err());
    }

    #[test]
    fn extract_rejects_non_optimal() {
        let m = single_state();
        let h = build_occupation_lp(&m);
        let sol = LpSolution {
            status: LpStatus::Infeasible,
            values: vec![],
            objective: f64::NAN,
        };
        assert!(extract_solution(&h, &sol, &m).is_err());
    }
}
