//! Minimal ε-coverings of biobjective sets by alternating Restrict calls.

use crate::backend::{Candidate, FeasibilityBackend, Threshold};
use crate::error::{Error, ResourceKind, Result};
use crate::grid::{CellIndex, CoverEntry, CoverSet, CoverStats};
use crate::models::Space;
use crate::vector::ValueVector;

/// Iteration cap on the alternation.
pub const LOOP_GUARD: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// A point not yet covered, maximizing the first coordinate.
    V,
    /// A cover member.
    U,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub kind: StepKind,
    pub value: ValueVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyStatus {
    /// The first Restrict-2 call found nothing.
    EmptySet,
    /// A Restrict-2 call found no uncovered point.
    Covered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    /// `v0, u1, v1, u2, ...`
    pub steps: Vec<TraceStep>,
    pub restrict_calls: usize,
    pub status: GreedyStatus,
}

fn space_coords(space: Space, v: &ValueVector) -> [f64; 2] {
    match space {
        Space::Pareto => [v[0], v[1]],
        Space::Lorenz => [v[0].min(v[1]), v[0] + v[1]],
    }
}

/// Restrict-i on `backend` (i is 1 or 2).
pub fn restrict(
    backend: &FeasibilityBackend,
    i: usize,
    t: Threshold,
    space: Space,
) -> Result<Option<Candidate>> {
    backend.restrict(i, t, space)
}

/// Runs `v0 = R2(>= 0)`, then `u_n = R1(>= c1(v_{n-1}) / (1+ε))` and
/// `v_n = R2(> (1+ε) c2(u_n))` until a Restrict-2 call comes back empty.
/// `c1`, `c2` are the coordinates of `space` (`L_1`, `L_2` for Lorenz).
pub fn greedy_min_cover(
    backend: &FeasibilityBackend,
    epsilon: f64,
    space: Space,
) -> Result<(CoverSet, GreedyTrace)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if backend.num_objectives() != 2 {
        return Err(Error::domain("the greedy cover is biobjective"));
    }
    let scale = 1.0 + epsilon;
    let mut steps = Vec::new();
    let mut entries = Vec::new();
    let mut calls = 1;
    let Some(mut v) = restrict(backend, 2, Threshold::at_least(0.0), space)? else {
        return Ok((
            cover(space, epsilon, entries, calls),
            GreedyTrace {
                steps,
                restrict_calls: calls,
                status: GreedyStatus::EmptySet,
            },
        ));
    };
    loop {
        if entries.len() >= LOOP_GUARD {
            return Err(Error::resource(
                ResourceKind::LoopGuard,
                format!("greedy cover exceeded {LOOP_GUARD} members"),
            ));
        }
        steps.push(TraceStep {
            kind: StepKind::V,
            value: v.value.clone(),
        });
        let alpha = space_coords(space, &v.value)[0] / scale;
        calls += 1;
        // v itself meets the bound, so only numerical trouble returns None.
        let u = restrict(backend, 1, Threshold::at_least(alpha), space)?.unwrap_or(v);
        steps.push(TraceStep {
            kind: StepKind::U,
            value: u.value.clone(),
        });
        let beta = scale * space_coords(space, &u.value)[1];
        entries.push(u);
        calls += 1;
        match restrict(backend, 2, Threshold::above(beta), space)? {
            Some(next) => v = next,
            None => break,
        }
    }
    Ok((
        cover(space, epsilon, entries, calls),
        GreedyTrace {
            steps,
            restrict_calls: calls,
            status: GreedyStatus::Covered,
        },
    ))
}

fn cover(space: Space, epsilon: f64, members: Vec<Candidate>, calls: usize) -> CoverSet {
    let entries = members
        .into_iter()
        .enumerate()
        .map(|(k, c)| CoverEntry::from_candidate(c, CellIndex(vec![k as i64])))
        .collect();
    CoverSet {
        space,
        epsilon,
        entries,
        stats: CoverStats {
            queries: calls,
            ..CoverStats::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::Progression;

    fn vv(v: &[f64]) -> ValueVector {
        ValueVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn call_accounting_and_alternation() {
        let set: Vec<ValueVector> = (0..12)
            .map(|k| vv(&[k as f64, (24 - 2 * k) as f64]))
            .collect();
        let b = FeasibilityBackend::explicit(set).unwrap();
        for space in [Space::Pareto, Space::Lorenz] {
            let (c, t) = greedy_min_cover(&b, 0.1, space).unwrap();
            assert_eq!(t.restrict_calls, 2 * c.len() + 1);
            assert_eq!(t.steps.len(), 2 * c.len());
            assert!(t.steps.iter().step_by(2).all(|s| s.kind == StepKind::V));
        }
    }

    #[test]
    fn progression_and_finite_agree() {
        let p = Progression {
            start: [0.0, 96.0],
            step: [1.0, -2.0],
            count: 16,
        };
        let fin = FeasibilityBackend::explicit((0..16).map(|k| vv(&p.point(k))).collect()).unwrap();
        let prog = FeasibilityBackend::progression(p).unwrap();
        for space in [Space::Pareto, Space::Lorenz] {
            for eps in [0.05, 0.1, 0.2, 0.5] {
                let a = greedy_min_cover(&fin, eps, space).unwrap().0;
                let b = greedy_min_cover(&prog, eps, space).unwrap().0;
                assert_eq!(a.values(), b.values());
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let b = FeasibilityBackend::explicit(vec![vv(&[1.0, 2.0, 3.0])]).unwrap();
        assert!(greedy_min_cover(&b, 0.1, Space::Pareto).is_err());
        let b = FeasibilityBackend::explicit(vec![vv(&[1.0, 2.0])]).unwrap();
        assert!(greedy_min_cover(&b, 0.0, Space::Pareto).is_err());
    }
}
