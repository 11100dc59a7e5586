//! Threshold and Restrict queries answered either by LPs over a `Momdp` or
//! by scanning an explicit value set.

use crate::error::{Error, Result};
use crate::lp::{
    solve_lp_with, solve_mip_with, ConstraintSense, ExternalSolver, LpSolution, MipModel,
    ObjectiveSense, SolverConfig,
};
use crate::models::{
    add_deterministic_constraints, build_lorenz_test_lp, build_pareto_threshold_lp,
    build_restrict_lp, extract_solution, OccupationLpHandle, Space,
};
use crate::momdp::{Momdp, OccupationMeasure, Policy};
use crate::vector::{lorenz_of_slice, ValueVector};

/// A lower bound `>= value`, or `> value` when `strict`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub value: f64,
    pub strict: bool,
}

impl Threshold {
    pub fn at_least(value: f64) -> Self {
        Threshold {
            value,
            strict: false,
        }
    }

    pub fn above(value: f64) -> Self {
        Threshold {
            value,
            strict: true,
        }
    }

    pub fn admits(&self, x: f64) -> bool {
        if self.strict {
            x > self.value
        } else {
            x >= self.value
        }
    }
}

/// A point returned by a query, with the policy that attains it when the
/// backend knows one.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub value: ValueVector,
    pub policy: Option<Policy>,
    pub occupation: Option<OccupationMeasure>,
}

impl Candidate {
    fn bare(value: ValueVector) -> Self {
        Candidate {
            value,
            policy: None,
            occupation: None,
        }
    }
}

/// Biobjective points `start + k * step` for `k = 0..count`, evaluated in
/// exact integer arithmetic while components stay below 2^53.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progression {
    pub start: [f64; 2],
    pub step: [f64; 2],
    pub count: u64,
}

impl Progression {
    pub fn point(&self, k: u64) -> [f64; 2] {
        let k = k as f64;
        [
            self.start[0] + k * self.step[0],
            self.start[1] + k * self.step[1],
        ]
    }

    /// Smallest and largest `k` in `[lo, hi]` where `pred` holds, assuming
    /// `pred` is monotone (false then true, or true then false) on it.
    fn monotone_run(lo: u64, hi: u64, pred: impl Fn(u64) -> bool) -> Option<(u64, u64)> {
        if lo > hi {
            return None;
        }
        let (pl, ph) = (pred(lo), pred(hi));
        match (pl, ph) {
            (true, true) => Some((lo, hi)),
            (false, false) => None,
            (false, true) => {
                // First true.
                let (mut a, mut b) = (lo, hi);
                while b - a > 1 {
                    let mid = a + (b - a) / 2;
                    if pred(mid) {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                Some((b, hi))
            }
            (true, false) => {
                // Last true.
                let (mut a, mut b) = (lo, hi);
                while b - a > 1 {
                    let mid = a + (b - a) / 2;
                    if pred(mid) {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                Some((lo, a))
            }
        }
    }

    pub(crate) fn run_where(&self, pred: impl Fn([f64; 2]) -> bool) -> Option<(u64, u64)> {
        let hi = self.count.checked_sub(1)?;
        Self::monotone_run(0, hi, |k| pred(self.point(k)))
    }

    /// Indices in `[lo, hi]` where component `j` satisfies `t`.
    pub(crate) fn component_run(
        &self,
        j: usize,
        t: Threshold,
        lo: u64,
        hi: u64,
    ) -> Option<(u64, u64)> {
        Self::monotone_run(lo, hi, |k| t.admits(self.point(k)[j]))
    }

    pub(crate) fn sum_run(&self, t: Threshold, lo: u64, hi: u64) -> Option<(u64, u64)> {
        Self::monotone_run(lo, hi, |k| {
            let p = self.point(k);
            t.admits(p[0] + p[1])
        })
    }

    /// Indices where the space's coordinate `c` (0 or 1) satisfies `t`.
    /// In Lorenz space `L_1 = min` is handled as both components admitting.
    fn coordinate_run(&self, space: Space, c: usize, t: Threshold) -> Option<(u64, u64)> {
        let hi = self.count.checked_sub(1)?;
        match (space, c) {
            (Space::Pareto, j) => self.component_run(j, t, 0, hi),
            (Space::Lorenz, 0) => {
                let (a, b) = self.component_run(0, t, 0, hi)?;
                self.component_run(1, t, a, b)
            }
            (Space::Lorenz, _) => self.sum_run(t, 0, hi),
        }
    }

    /// Maximizer of `key` over `[lo, hi]` where `key` is lexicographic in
    /// functions that are linear in `k` or the minimum of the two
    /// components; such maxima sit at an end or next to the crossing point.
    fn best_in(&self, lo: u64, hi: u64, key: impl Fn([f64; 2]) -> [f64; 4]) -> u64 {
        let mut cands = vec![lo, hi];
        let dd = self.step[0] - self.step[1];
        if dd != 0.0 {
            let cross = (self.start[1] - self.start[0]) / dd;
            if cross.is_finite() {
                let f = cross.floor();
                for c in [f - 1.0, f, f + 1.0, f + 2.0] {
                    if c >= lo as f64 && c <= hi as f64 {
                        cands.push(c as u64);
                    }
                }
            }
        }
        cands.sort_unstable();
        cands.dedup();
        let mut best = cands[0];
        let mut best_key = key(self.point(best));
        for &k in &cands[1..] {
            let kk = key(self.point(k));
            if kk > best_key {
                best = k;
                best_key = kk;
            }
        }
        best
    }
}

/// An explicitly known set of value vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueSet {
    Finite(Vec<ValueVector>),
    Progression(Progression),
}

impl ValueSet {
    pub fn len(&self) -> u64 {
        match self {
            ValueSet::Finite(v) => v.len() as u64,
            ValueSet::Progression(p) => p.count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_objectives(&self) -> usize {
        match self {
            ValueSet::Finite(v) => v.first().map_or(0, ValueVector::len),
            ValueSet::Progression(_) => 2,
        }
    }

    /// Largest component over the set.
    pub fn max_component(&self) -> f64 {
        match self {
            ValueSet::Finite(v) => v
                .iter()
                .flat_map(|x| x.as_slice().iter().copied())
                .fold(0.0, f64::max),
            ValueSet::Progression(p) => {
                if p.count == 0 {
                    return 0.0;
                }
                let a = p.point(0);
                let b = p.point(p.count - 1);
                a.into_iter().chain(b).fold(0.0, f64::max)
            }
        }
    }

    /// All points, refusing sets larger than `limit`.
    pub fn materialize(&self, limit: u64) -> Result<Vec<ValueVector>> {
        if self.len() > limit {
            return Err(Error::resource(
                crate::error::ResourceKind::EnumerationLimit,
                format!("set has {} points, limit is {limit}", self.len()),
            ));
        }
        match self {
            ValueSet::Finite(v) => Ok(v.clone()),
            ValueSet::Progression(p) => (0..p.count)
                .map(|k| ValueVector::new(p.point(k).to_vec()))
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ValueSet::Finite(v) => {
                if v.is_empty() {
                    return Err(Error::domain("explicit value set is empty"));
                }
                let n = self.num_objectives();
                if v.iter().any(|x| x.len() != n) {
                    return Err(Error::domain("value set mixes dimensions"));
                }
            }
            ValueSet::Progression(p) => {
                if p.count == 0 {
                    return Err(Error::domain("explicit value set is empty"));
                }
                {
                    let ends = [p.point(0), p.point(p.count - 1)];
                    for e in ends.iter().flatten() {
                        if !(e.is_finite() && *e >= 0.0) {
                            return Err(Error::domain("progression leaves the nonnegative range"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Queries answered by LPs (or MIPs in deterministic mode) over a model.
#[derive(Debug, Clone)]
pub struct LpBackend {
    pub momdp: Momdp,
    pub deterministic: bool,
    pub config: SolverConfig,
    pub external: Option<ExternalSolver>,
}

impl LpBackend {
    pub fn new(momdp: Momdp, deterministic: bool) -> Self {
        LpBackend {
            momdp,
            deterministic,
            config: SolverConfig::default(),
            external: None,
        }
    }

    fn solve_handle(&self, h: &OccupationLpHandle) -> Result<LpSolution> {
        if self.deterministic {
            let ext = add_deterministic_constraints(h, &self.momdp);
            self.solve_mip(&ext.mip)
        } else {
            match &self.external {
                Some(s) => s.solve_lp(&h.model),
                None => solve_lp_with(&h.model, &self.config),
            }
        }
    }

    fn solve_mip(&self, mip: &MipModel) -> Result<LpSolution> {
        match &self.external {
            Some(s) => s.solve_mip(mip),
            None => solve_mip_with(mip, &self.config),
        }
    }

    fn candidate(&self, h: &OccupationLpHandle, sol: &LpSolution) -> Result<Option<Candidate>> {
        if !sol.is_optimal() {
            return Ok(None);
        }
        let (value, occ, policy) = extract_solution(h, sol, &self.momdp)?;
        Ok(Some(Candidate {
            value,
            policy: Some(policy),
            occupation: Some(occ),
        }))
    }
}

#[derive(Debug, Clone)]
pub enum FeasibilityBackend {
    Lp(LpBackend),
    Explicit(ValueSet),
}

/// Slack standing in for a strict inequality in LP constraints.
fn strict_slack(alpha: f64) -> f64 {
    1e-9 * alpha.abs().max(1.0)
}

fn lex_key(primary: f64, secondary: f64, v: &[f64]) -> [f64; 4] {
    [primary, secondary, v[0], v.get(1).copied().unwrap_or(0.0)]
}

impl FeasibilityBackend {
    pub fn explicit(set: Vec<ValueVector>) -> Result<Self> {
        let s = ValueSet::Finite(set);
        s.validate()?;
        Ok(FeasibilityBackend::Explicit(s))
    }

    pub fn progression(p: Progression) -> Result<Self> {
        let s = ValueSet::Progression(p);
        s.validate()?;
        Ok(FeasibilityBackend::Explicit(s))
    }

    pub fn num_objectives(&self) -> usize {
        match self {
            FeasibilityBackend::Lp(b) => b.momdp.num_objectives(),
            FeasibilityBackend::Explicit(s) => s.num_objectives(),
        }
    }

    /// Upper bound `K` on value components.
    pub fn default_bound(&self) -> f64 {
        match self {
            FeasibilityBackend::Lp(b) => b.momdp.value_bound(),
            FeasibilityBackend::Explicit(s) => s.max_component(),
        }
    }

    /// Maximizes `L_n(z)` subject to `L_k(z) >= eta_k` for `k < n`.
    pub fn lorenz_query(&self, eta: &[f64]) -> Result<Option<Candidate>> {
        match self {
            FeasibilityBackend::Lp(b) => {
                let h = build_lorenz_test_lp(&b.momdp, eta)?;
                let sol = b.solve_handle(&h.base)?;
                b.candidate(&h.base, &sol)
            }
            FeasibilityBackend::Explicit(ValueSet::Finite(set)) => {
                let mut best: Option<(&ValueVector, Vec<f64>)> = None;
                for v in set {
                    let l = lorenz_of_slice(v.as_slice()).as_slice().to_vec();
                    if l.iter().zip(eta).any(|(lk, e)| lk < e) {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some((bv, bl)) => {
                            let n = l.len();
                            (l[n - 1], &l[..], v.as_slice()) > (bl[n - 1], &bl[..], bv.as_slice())
                        }
                    };
                    if better {
                        best = Some((v, l));
                    }
                }
                Ok(best.map(|(v, _)| Candidate::bare(v.clone())))
            }
            FeasibilityBackend::Explicit(ValueSet::Progression(p)) => {
                if eta.len() != 1 {
                    return Err(Error::domain("progressions are biobjective"));
                }
                let Some((lo, hi)) =
                    p.coordinate_run(Space::Lorenz, 0, Threshold::at_least(eta[0]))
                else {
                    return Ok(None);
                };
                let k = p.best_in(lo, hi, |x| lex_key(x[0] + x[1], x[0].min(x[1]), &x));
                Ok(Some(Candidate::bare(ValueVector::new(
                    p.point(k).to_vec(),
                )?)))
            }
        }
    }

    /// Maximizes `z_n` subject to `z_i >= eta_i` for `i < n`.
    pub fn pareto_query(&self, eta: &[f64]) -> Result<Option<Candidate>> {
        match self {
            FeasibilityBackend::Lp(b) => {
                let h = build_pareto_threshold_lp(&b.momdp, eta)?;
                let sol = b.solve_handle(&h)?;
                b.candidate(&h, &sol)
            }
            FeasibilityBackend::Explicit(ValueSet::Finite(set)) => {
                let best = set
                    .iter()
                    .filter(|v| v.as_slice().iter().zip(eta).all(|(x, e)| x >= e))
                    .max_by(|a, b| {
                        let n = a.len();
                        (a[n - 1], a.as_slice())
                            .partial_cmp(&(b[n - 1], b.as_slice()))
                            .expect("finite values")
                    });
                Ok(best.map(|v| Candidate::bare(v.clone())))
            }
            FeasibilityBackend::Explicit(ValueSet::Progression(p)) => {
                if eta.len() != 1 {
                    return Err(Error::domain("progressions are biobjective"));
                }
                let Some((lo, hi)) =
                    p.coordinate_run(Space::Pareto, 0, Threshold::at_least(eta[0]))
                else {
                    return Ok(None);
                };
                let k = p.best_in(lo, hi, |x| lex_key(x[1], x[0], &x));
                Ok(Some(Candidate::bare(ValueVector::new(
                    p.point(k).to_vec(),
                )?)))
            }
        }
    }

    /// Restrict-i: maximize the other coordinate of `space` subject to
    /// coordinate `i` (1 or 2) meeting `t`. Ties go to the larger
    /// constrained coordinate, so the answer is nondominated.
    pub fn restrict(&self, i: usize, t: Threshold, space: Space) -> Result<Option<Candidate>> {
        if i != 1 && i != 2 {
            return Err(Error::domain(format!(
                "restrict index must be 1 or 2, got {i}"
            )));
        }
        if self.num_objectives() != 2 {
            return Err(Error::domain("restrict queries need 2 objectives"));
        }
        let ci = i - 1;
        let other = 1 - ci;
        let coords = |v: &[f64]| -> [f64; 2] {
            match space {
                Space::Pareto => [v[0], v[1]],
                Space::Lorenz => [v[0].min(v[1]), v[0] + v[1]],
            }
        };
        match self {
            FeasibilityBackend::Lp(b) => {
                let alpha = if t.strict {
                    t.value + strict_slack(t.value)
                } else {
                    t.value
                };
                let h = build_restrict_lp(&b.momdp, i, alpha, space)?;
                let first = b.solve_handle(&h.base)?;
                if !first.is_optimal() {
                    return Ok(None);
                }
                // Tie-break: hold the optimum and push the constrained side.
                let opt = h
                    .maximized
                    .iter()
                    .map(|&(j, c)| c * first.values[j])
                    .sum::<f64>();
                let mut second = h.base.clone();
                second.model.add_constraint(
                    h.maximized.clone(),
                    ConstraintSense::Ge,
                    opt - 1e-9 * opt.abs().max(1.0),
                );
                second
                    .model
                    .set_objective(ObjectiveSense::Maximize, h.constrained.clone());
                let sol = b.solve_handle(&second)?;
                if sol.is_optimal() {
                    b.candidate(&second, &sol)
                } else {
                    b.candidate(&h.base, &first)
                }
            }
            FeasibilityBackend::Explicit(ValueSet::Finite(set)) => {
                let best = set
                    .iter()
                    .filter(|v| t.admits(coords(v.as_slice())[ci]))
                    .max_by(|a, b| {
                        let ca = coords(a.as_slice());
                        let cb = coords(b.as_slice());
                        (ca[other], ca[ci], a.as_slice())
                            .partial_cmp(&(cb[other], cb[ci], b.as_slice()))
                            .expect("finite values")
                    });
                Ok(best.map(|v| Candidate::bare(v.clone())))
            }
            FeasibilityBackend::Explicit(ValueSet::Progression(p)) => {
                let Some((lo, hi)) = p.coordinate_run(space, ci, t) else {
                    return Ok(None);
                };
                let k = p.best_in(lo, hi, |x| {
                    let c = coords(&x);
                    lex_key(c[other], c[ci], &x)
                });
                Ok(Some(Candidate::bare(ValueVector::new(
                    p.point(k).to_vec(),
                )?)))
            }
        }
    }
}
