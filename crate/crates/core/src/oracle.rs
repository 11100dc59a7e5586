//! Exact ground truth at desk scale.

use std::cmp::Ordering;

use crate::backend::{FeasibilityBackend, Progression, Threshold, ValueSet};
use crate::error::{Error, ResourceKind, Result};
use crate::models::Space;
use crate::momdp::{policy_value, Momdp, Policy};
use crate::vector::{lnd_filter, lorenz_of_slice, pnd_filter, ValueVector};

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1_000_000;
pub const DEFAULT_BRUTEFORCE_LIMIT: usize = 20;
/// Absolute tolerance under which two policy values count as one.
pub const DEDUP_TOL: f64 = 1e-9;
/// Relative slack on ε-dominance checks in `verify_cover`.
pub const COVER_TOL: f64 = 1e-9;

/// A value with the deterministic policy that attains it.
type Valued = (ValueVector, Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct ExactFrontier {
    /// Distinct values, sorted lexicographically.
    pub values: Vec<ValueVector>,
    /// One deterministic policy attaining each entry of `values`.
    pub policies: Vec<Policy>,
    pub pnd: Vec<ValueVector>,
    pub lnd: Vec<ValueVector>,
    pub policy_count: u64,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn decode(mut index: u64, num_states: usize, num_actions: usize) -> Vec<usize> {
    let mut actions = vec![0; num_states];
    for a in actions.iter_mut() {
        *a = (index % num_actions as u64) as usize;
        index /= num_actions as u64;
    }
    actions
}

/// Evaluates every deterministic stationary policy of `m`.
pub fn enumerate_deterministic_values(m: &Momdp, limit: u64) -> Result<ExactFrontier> {
    let count = m.deterministic_policy_count();
    if count > limit {
        return Err(Error::resource(
            ResourceKind::EnumerationLimit,
            format!("{count} deterministic policies exceed the limit of {limit}"),
        ));
    }
    let jobs = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(8)
        .min(count.max(1) as usize);
    let chunk = count.div_ceil(jobs as u64);
    let parts: Vec<Result<Vec<Valued>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs as u64)
            .map(|j| {
                s.spawn(move || {
                    let lo = j * chunk;
                    let hi = ((j + 1) * chunk).min(count);
                    (lo..hi)
                        .map(|idx| {
                            let actions = decode(idx, m.num_states(), m.num_actions());
                            let v = policy_value(m, &Policy::Deterministic(actions.clone()))?;
                            Ok((v, actions))
                        })
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("enumeration thread panicked"))
            .collect()
    });
    let mut all = Vec::with_capacity(count as usize);
    for p in parts {
        all.extend(p?);
    }
    // Stable sort keeps the lowest policy index first among equal values.
    all.sort_by(|a, b| lex_cmp(a.0.as_slice(), b.0.as_slice()));
    let mut values: Vec<ValueVector> = Vec::new();
    let mut policies = Vec::new();
    for (v, actions) in all {
        let dup = values.last().is_some_and(|last: &ValueVector| {
            last.as_slice()
                .iter()
                .zip(v.as_slice())
                .all(|(a, b)| (a - b).abs() <= DEDUP_TOL)
        });
        if !dup {
            values.push(v);
            policies.push(Policy::Deterministic(actions));
        }
    }
    let pnd = pnd_filter(&values)?;
    let lnd = lnd_filter(&values)?;
    Ok(ExactFrontier {
        values,
        policies,
        pnd,
        lnd,
        policy_count: count,
    })
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 || n > 52 {
        return Err(Error::domain(format!(
            "N must be in 1..=52 for exact arithmetic, got {n}"
        )));
    }
    Ok(())
}

/// `{(x, 2^N - 1 - x) : x = 0 .. 2^N - 1}`.
pub fn example1_values(n: u32) -> Result<ValueSet> {
    check_n(n)?;
    let top = 2f64.powi(n as i32);
    Ok(ValueSet::Progression(Progression {
        start: [0.0, top - 1.0],
        step: [1.0, -1.0],
        count: 1u64 << n,
    }))
}

/// `{(x, 3 * 2^N - 2x) : x = 0 .. 2^(N-1) - 1}`.
pub fn example2_values(n: u32) -> Result<ValueSet> {
    check_n(n)?;
    Ok(ValueSet::Progression(Progression {
        start: [0.0, 3.0 * 2f64.powi(n as i32)],
        step: [1.0, -2.0],
        count: 1u64 << (n - 1),
    }))
}

/// Outcome of `verify_cover`; `witness` is an uncovered nondominated point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverVerdict {
    pub covered: bool,
    pub witness: Option<ValueVector>,
}

fn coords(space: Space, v: &[f64]) -> Vec<f64> {
    match space {
        Space::Pareto => v.to_vec(),
        Space::Lorenz => lorenz_of_slice(v).as_slice().to_vec(),
    }
}

fn within(x: f64, cap: f64) -> bool {
    x <= cap + COVER_TOL * x.abs().max(1.0)
}

fn eps_covers(y: &[f64], x: &[f64], eps: f64) -> bool {
    y.iter().zip(x).all(|(a, b)| within(*b, (1.0 + eps) * a))
}

/// True iff every point of `exact` (equivalently every nondominated one) is
/// ε-dominated in `space` by some member of `cover`.
pub fn verify_cover(
    cover: &[ValueVector],
    exact: &ValueSet,
    eps: f64,
    space: Space,
) -> Result<CoverVerdict> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!(
            "epsilon must be nonnegative, got {eps}"
        )));
    }
    let n = exact.num_objectives();
    if let Some(bad) = cover.iter().find(|c| c.len() != n) {
        return Err(Error::domain(format!(
            "cover entry of length {} against {n}-objective set",
            bad.len()
        )));
    }
    let caps: Vec<Vec<f64>> = cover.iter().map(|c| coords(space, c.as_slice())).collect();
    match exact {
        ValueSet::Finite(set) => {
            let pts: Vec<Vec<f64>> = set.iter().map(|v| coords(space, v.as_slice())).collect();
            let Some(miss) = pts
                .iter()
                .position(|x| !caps.iter().any(|y| eps_covers(y, x, eps)))
            else {
                return Ok(CoverVerdict {
                    covered: true,
                    witness: None,
                });
            };
            // The lexicographic maximum of the points dominating the miss is
            // nondominated and, like the miss, uncovered.
            let lift = (0..pts.len())
                .filter(|&j| pts[j].iter().zip(&pts[miss]).all(|(a, b)| a >= b))
                .max_by(|&a, &b| lex_cmp(&pts[a], &pts[b]))
                .unwrap_or(miss);
            Ok(CoverVerdict {
                covered: false,
                witness: Some(set[lift].clone()),
            })
        }
        ValueSet::Progression(p) => {
            let mut runs: Vec<(u64, u64)> = Vec::new();
            for y in &caps {
                let c0 = (1.0 + eps) * y[0];
                let c1 = (1.0 + eps) * y[1];
                match space {
                    Space::Pareto => {
                        let a = p.run_where(|x| within(x[0], c0));
                        let b = p.run_where(|x| within(x[1], c1));
                        if let (Some(a), Some(b)) = (a, b) {
                            runs.push((a.0.max(b.0), a.1.min(b.1)));
                        }
                    }
                    Space::Lorenz => {
                        let s = p.run_where(|x| within(x[0] + x[1], c1));
                        for j in 0..2 {
                            let a = p.run_where(|x| within(x[j], c0));
                            if let (Some(a), Some(s)) = (a, s) {
                                runs.push((a.0.max(s.0), a.1.min(s.1)));
                            }
                        }
                    }
                }
            }
            runs.retain(|r| r.0 <= r.1);
            runs.sort_unstable();
            let mut next = 0u64;
            for (lo, hi) in runs {
                if lo > next {
                    break;
                }
                next = next.max(hi.saturating_add(1));
            }
            if next >= p.count {
                return Ok(CoverVerdict {
                    covered: true,
                    witness: None,
                });
            }
            let miss = ValueVector::new(p.point(next).to_vec())?;
            let backend = FeasibilityBackend::Explicit(exact.clone());
            let c = coords(space, miss.as_slice());
            let lift = backend
                .restrict(1, Threshold::at_least(c[0]), space)?
                .map_or(miss, |cand| cand.value);
            Ok(CoverVerdict {
                covered: false,
                witness: Some(lift),
            })
        }
    }
}

/// Smallest subset of `set` that ε-covers it in `space`, found by trying
/// subsets in increasing size.
pub fn min_cover_bruteforce(
    set: &[ValueVector],
    eps: f64,
    space: Space,
    limit: usize,
) -> Result<(usize, Vec<ValueVector>)> {
    if set.len() > limit.min(63) {
        return Err(Error::resource(
            ResourceKind::EnumerationLimit,
            format!(
                "{} points exceed the brute-force limit of {limit}",
                set.len()
            ),
        ));
    }
    let m = set.len();
    if m == 0 {
        return Ok((0, Vec::new()));
    }
    let pts: Vec<Vec<f64>> = set.iter().map(|v| coords(space, v.as_slice())).collect();
    let masks: Vec<u64> = pts
        .iter()
        .map(|y| {
            (0..m)
                .filter(|&j| eps_covers(y, &pts[j], eps))
                .fold(0u64, |acc, j| acc | (1 << j))
        })
        .collect();
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    for size in 1..=m {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if combo.iter().fold(0u64, |acc, &i| acc | masks[i]) == full {
                return Ok((size, combo.iter().map(|&i| set[i].clone()).collect()));
            }
            // Next combination in lexicographic order.
            let mut i = size;
            while i > 0 && combo[i - 1] == m - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    unreachable!("the whole set covers itself")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vv(v: &[f64]) -> ValueVector {
        ValueVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_action_single_state() {
        let m = Momdp::new(
            1,
            2,
            2,
            vec![1.0, 1.0],
            vec![1.0, 0.0, 0.0, 1.0],
            0.9,
            vec![1.0],
        )
        .unwrap();
        let f = enumerate_deterministic_values(&m, 10).unwrap();
        assert_eq!(f.policy_count, 2);
        assert_eq!(f.values.len(), 2);
        assert!((f.values[0][1] - 10.0).abs() < 1e-9 && f.values[0][0].abs() < 1e-12);
        assert!((f.values[1][0] - 10.0).abs() < 1e-9);
        assert!(enumerate_deterministic_values(&m, 1)
            .unwrap_err()
            .is_resource());
    }

    #[test]
    fn example_sets() {
        let e1 = example1_values(2).unwrap().materialize(100).unwrap();
        assert_eq!(
            e1,
            vec![
                vv(&[0.0, 3.0]),
                vv(&[1.0, 2.0]),
                vv(&[2.0, 1.0]),
                vv(&[3.0, 0.0])
            ]
        );
        assert_eq!(
            lnd_filter(&e1).unwrap(),
            vec![vv(&[1.0, 2.0]), vv(&[2.0, 1.0])]
        );
        let e2 = example2_values(3).unwrap().materialize(100).unwrap();
        assert_eq!(
            e2,
            vec![
                vv(&[0.0, 24.0]),
                vv(&[1.0, 22.0]),
                vv(&[2.0, 20.0]),
                vv(&[3.0, 18.0])
            ]
        );
        assert!(example1_values(53).is_err());
        assert!(example2_values(0).is_err());
    }

    #[test]
    fn verify_basic_cases() {
        let set = example2_values(3).unwrap();
        let pts = set.materialize(10).unwrap();
        for space in [Space::Pareto, Space::Lorenz] {
            assert!(verify_cover(&pts, &set, 0.0, space).unwrap().covered);
            let v = verify_cover(&[], &set, 0.1, space).unwrap();
            assert!(!v.covered);
            assert!(v.witness.is_some());
            let fin = ValueSet::Finite(pts.clone());
            assert_eq!(
                verify_cover(&pts[..1], &set, 0.1, space).unwrap(),
                verify_cover(&pts[..1], &fin, 0.1, space).unwrap()
            );
        }
        // Uncovered witness is nondominated: (0,24) is the top of the Pareto order.
        let v = verify_cover(&[], &set, 0.1, Space::Pareto).unwrap();
        assert_eq!(v.witness, Some(vv(&[0.0, 24.0])));
        let v = verify_cover(&[vv(&[0.0, 24.0])], &set, 0.1, Space::Lorenz).unwrap();
        assert_eq!(v.witness, Some(vv(&[1.0, 22.0])));
    }

    #[test]
    fn bruteforce_small() {
        assert_eq!(
            min_cover_bruteforce(&[vv(&[1.0, 1.0])], 0.1, Space::Pareto, 20)
                .unwrap()
                .0,
            1
        );
        let set = vec![vv(&[10.0, 10.0]), vv(&[9.5, 9.6]), vv(&[9.0, 10.5])];
        assert_eq!(
            min_cover_bruteforce(&set, 0.1, Space::Pareto, 20)
                .unwrap()
                .0,
            1
        );
        let set = vec![vv(&[0.0, 10.0]), vv(&[10.0, 0.0])];
        let (k, w) = min_cover_bruteforce(&set, 0.1, Space::Pareto, 20).unwrap();
        assert_eq!((k, w.len()), (2, 2));
        assert_eq!(
            min_cover_bruteforce(&set, 0.1, Space::Lorenz, 20)
                .unwrap()
                .0,
            1
        );
        assert!(min_cover_bruteforce(&vec![vv(&[1.0, 1.0]); 21], 0.1, Space::Pareto, 20).is_err());
    }
}
