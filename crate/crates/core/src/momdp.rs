//! Discounted multiobjective MDPs, stationary policies and occupation measures.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::vector::ValueVector;

const PROB_TOL: f64 = 1e-9;

/// Above this many states `evaluate_policy` switches from a dense solve to
/// fixed-point iteration.
pub const DENSE_EVAL_MAX_STATES: usize = 512;

/// Sup-norm change at which fixed-point policy evaluation stops.
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// A finite discounted MDP with vector-valued nonnegative rewards.
///
/// Transitions are stored densely as `p[(s * A + a) * S + s']` and rewards as
/// `r[(s * A + a) * n + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Momdp {
    num_states: usize,
    num_actions: usize,
    num_objectives: usize,
    transition: Vec<f64>,
    reward: Vec<f64>,
    discount: f64,
    initial: Vec<f64>,
}

impl Momdp {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        num_objectives: usize,
        transition: Vec<f64>,
        reward: Vec<f64>,
        discount: f64,
        initial: Vec<f64>,
    ) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::Validation(
                "num_states and num_actions must be positive".into(),
            ));
        }
        if num_objectives < 2 {
            return Err(Error::Validation(format!(
                "num_objectives must be at least 2, got {num_objectives}"
            )));
        }
        let pairs = num_states * num_actions;
        if transition.len() != pairs * num_states {
            return Err(Error::Validation(format!(
                "transition table has {} entries, expected {}",
                transition.len(),
                pairs * num_states
            )));
        }
        if reward.len() != pairs * num_objectives {
            return Err(Error::Validation(format!(
                "reward table has {} entries, expected {}",
                reward.len(),
                pairs * num_objectives
            )));
        }
        if initial.len() != num_states {
            return Err(Error::Validation(format!(
                "initial distribution has {} entries, expected {num_states}",
                initial.len()
            )));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::Validation(format!(
                "discount must lie in (0, 1), got {discount}"
            )));
        }
        for (k, row) in transition.chunks(num_states).enumerate() {
            let (s, a) = (k / num_actions, k % num_actions);
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::Validation(format!(
                    "transition probabilities of (s={s}, a={a}) must be nonnegative"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::Validation(format!(
                    "transition probabilities of (s={s}, a={a}) sum to {sum}, not 1"
                )));
            }
        }
        if initial.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Validation(
                "initial distribution must be nonnegative".into(),
            ));
        }
        let mass: f64 = initial.iter().sum();
        if (mass - 1.0).abs() > PROB_TOL {
            return Err(Error::Validation(format!(
                "initial distribution sums to {mass}, not 1"
            )));
        }
        if let Some(r) = reward.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(Error::Validation(format!(
                "rewards must be finite and nonnegative, got {r}"
            )));
        }
        Ok(Momdp {
            num_states,
            num_actions,
            num_objectives,
            transition,
            reward,
            discount,
            initial,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Next-state distribution of `(s, a)`.
    pub fn transition_row(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.num_actions + a) * self.num_states;
        &self.transition[start..start + self.num_states]
    }

    pub fn prob(&self, s: usize, a: usize, next: usize) -> f64 {
        self.transition_row(s, a)[next]
    }

    pub fn reward(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.num_actions + a) * self.num_objectives;
        &self.reward[start..start + self.num_objectives]
    }

    /// Largest single reward component over all pairs and objectives.
    pub fn max_reward(&self) -> f64 {
        self.reward.iter().copied().fold(0.0, f64::max)
    }

    /// Upper bound on any value component: `max r / (1 - gamma)`.
    pub fn value_bound(&self) -> f64 {
        self.max_reward() / (1.0 - self.discount)
    }

    /// Number of deterministic stationary policies, saturating at `u64::MAX`.
    pub fn deterministic_policy_count(&self) -> u64 {
        let mut count: u64 = 1;
        for _ in 0..self.num_states {
            count = count.saturating_mul(self.num_actions as u64);
        }
        count
    }

    /// Aggregates a per-state value table by the initial distribution.
    pub fn expected_value(&self, table: &[ValueVector]) -> Result<ValueVector> {
        let mut out = vec![0.0; self.num_objectives];
        for (mu, v) in self.initial.iter().zip(table) {
            for (o, x) in out.iter_mut().zip(v.as_slice()) {
                *o += mu * x;
            }
        }
        ValueVector::from_numeric(out, 1e-9)
    }
}

/// A stationary policy.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// One action per state.
    Deterministic(Vec<usize>),
    /// A distribution over actions per state.
    Randomized(Vec<Vec<f64>>),
}

impl Policy {
    pub fn num_states(&self) -> usize {
        match self {
            Policy::Deterministic(actions) => actions.len(),
            Policy::Randomized(rows) => rows.len(),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Policy::Deterministic(_))
    }

    /// Probability of `a` in state `s`.
    pub fn prob(&self, s: usize, a: usize) -> f64 {
        match self {
            Policy::Deterministic(actions) => {
                if actions[s] == a {
                    1.0
                } else {
                    0.0
                }
            }
            Policy::Randomized(rows) => rows[s][a],
        }
    }

    pub fn validate(&self, m: &Momdp) -> Result<()> {
        if self.num_states() != m.num_states() {
            return Err(Error::domain(format!(
                "policy covers {} states, model has {}",
                self.num_states(),
                m.num_states()
            )));
        }
        match self {
            Policy::Deterministic(actions) => {
                if let Some(a) = actions.iter().find(|a| **a >= m.num_actions()) {
                    return Err(Error::domain(format!("action {a} out of range")));
                }
            }
            Policy::Randomized(rows) => {
                for (s, row) in rows.iter().enumerate() {
                    if row.len() != m.num_actions() {
                        return Err(Error::domain(format!(
                            "policy row {s} has {} entries, expected {}",
                            row.len(),
                            m.num_actions()
                        )));
                    }
                    let sum: f64 = row.iter().sum();
                    if row.iter().any(|p| *p < 0.0) || (sum - 1.0).abs() > PROB_TOL {
                        return Err(Error::domain(format!(
                            "policy row {s} is not a distribution (sum {sum})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Discounted state-action frequencies `x_sa`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationMeasure {
    num_states: usize,
    num_actions: usize,
    x: Vec<f64>,
}

impl OccupationMeasure {
    /// Wraps raw frequencies laid out as `x[s * A + a]`. Tiny negative
    /// round-off (down to -1e-9) is clamped to zero.
    pub fn new(m: &Momdp, mut x: Vec<f64>) -> Result<Self> {
        if x.len() != m.num_states() * m.num_actions() {
            return Err(Error::domain(format!(
                "occupation measure has {} entries, expected {}",
                x.len(),
                m.num_states() * m.num_actions()
            )));
        }
        for v in x.iter_mut() {
            if !v.is_finite() || *v < -1e-9 {
                return Err(Error::domain(format!("occupation entry {v} is negative")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(OccupationMeasure {
            num_states: m.num_states(),
            num_actions: m.num_actions(),
            x,
        })
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.x[s * self.num_actions + a]
    }

    pub fn state_row(&self, s: usize) -> &[f64] {
        &self.x[s * self.num_actions..(s + 1) * self.num_actions]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn total_mass(&self) -> f64 {
        self.x.iter().sum()
    }

    /// Largest violation of the flow equations over all states.
    pub fn flow_residual(&self, m: &Momdp) -> f64 {
        let gamma = m.discount();
        let mut inflow = vec![0.0; self.num_states];
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                let x = self.get(s, a);
                if x == 0.0 {
                    continue;
                }
                for (next, p) in m.transition_row(s, a).iter().enumerate() {
                    inflow[next] += x * p;
                }
            }
        }
        (0..self.num_states)
            .map(|s| {
                let out: f64 = self.state_row(s).iter().sum();
                (out - gamma * inflow[s] - m.initial()[s]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Per-state value vectors of `policy`, solving the discounted evaluation
/// equations for all objectives at once.
pub fn evaluate_policy(m: &Momdp, policy: &Policy) -> Result<Vec<ValueVector>> {
    policy.validate(m)?;
    let (ns, na, n) = (m.num_states(), m.num_actions(), m.num_objectives());
    let gamma = m.discount();

    let mut p_pi = DMatrix::<f64>::zeros(ns, ns);
    let mut r_pi = DMatrix::<f64>::zeros(ns, n);
    for s in 0..ns {
        for a in 0..na {
            let w = policy.prob(s, a);
            if w == 0.0 {
                continue;
            }
            for (next, p) in m.transition_row(s, a).iter().enumerate() {
                p_pi[(s, next)] += w * p;
            }
            for (i, r) in m.reward(s, a).iter().enumerate() {
                r_pi[(s, i)] += w * r;
            }
        }
    }

    let values = if ns <= DENSE_EVAL_MAX_STATES {
        let system = DMatrix::<f64>::identity(ns, ns) - p_pi * gamma;
        system
            .lu()
            .solve(&r_pi)
            .ok_or_else(|| Error::domain("policy evaluation system is singular"))?
    } else {
        fixed_point(&p_pi, &r_pi, gamma)?
    };

    (0..ns)
        .map(|s| ValueVector::from_numeric(values.row(s).iter().copied().collect(), 1e-9))
        .collect()
}

fn fixed_point(p_pi: &DMatrix<f64>, r_pi: &DMatrix<f64>, gamma: f64) -> Result<DMatrix<f64>> {
    let mut v = r_pi.clone();
    // Contraction factor gamma: this bounds the number of sweeps.
    let max_sweeps = 100_000;
    for _ in 0..max_sweeps {
        let next = r_pi + p_pi * &v * gamma;
        let change = (&next - &v).amax();
        v = next;
        if change <= FIXED_POINT_TOL {
            return Ok(v);
        }
    }
    Err(Error::resource(
        crate::error::ResourceKind::IterationLimit,
        "fixed-point policy evaluation did not converge",
    ))
}

/// Value of `policy` aggregated by the initial distribution.
pub fn policy_value(m: &Momdp, policy: &Policy) -> Result<ValueVector> {
    let table = evaluate_policy(m, policy)?;
    m.expected_value(&table)
}

/// `pi(s, a) = x_sa / sum_a x_sa`. States whose mass is at most 1e-9 get the
/// lowest-indexed action. Entries at most 1e-9 of their state's mass are
/// treated as zero; a policy whose rows are all one-hot is returned as
/// deterministic.
pub fn occupation_to_policy(x: &OccupationMeasure) -> Policy {
    let mut rows = Vec::with_capacity(x.num_states);
    let mut one_hot = Vec::with_capacity(x.num_states);
    for s in 0..x.num_states {
        let row = x.state_row(s);
        let mass: f64 = row.iter().sum();
        let mut probs = vec![0.0; x.num_actions];
        if mass <= 1e-9 {
            probs[0] = 1.0;
        } else {
            let kept: f64 = row.iter().filter(|v| **v > 1e-9 * mass).sum();
            for (p, v) in probs.iter_mut().zip(row) {
                if *v > 1e-9 * mass {
                    *p = v / kept;
                }
            }
        }
        let support: Vec<usize> = (0..x.num_actions).filter(|&a| probs[a] > 0.0).collect();
        one_hot.push((support.len() == 1).then(|| support[0]));
        rows.push(probs);
    }
    if one_hot.iter().all(Option::is_some) {
        Policy::Deterministic(one_hot.into_iter().map(Option::unwrap).collect())
    } else {
        Policy::Randomized(rows)
    }
}

/// `z_i = sum_sa r_i(s, a) x_sa`.
pub fn occupation_value(m: &Momdp, x: &OccupationMeasure) -> Result<ValueVector> {
    if x.num_states != m.num_states() || x.num_actions != m.num_actions() {
        return Err(Error::domain("occupation measure does not match model"));
    }
    let mut z = vec![0.0; m.num_objectives()];
    for s in 0..m.num_states() {
        for a in 0..m.num_actions() {
            let xs = x.get(s, a);
            for (zi, r) in z.iter_mut().zip(m.reward(s, a)) {
                *zi += r * xs;
            }
        }
    }
    ValueVector::from_numeric(z, 1e-9)
}

/// Occupation measure induced by `policy`: `x_sa = pi(s,a) * d(s)` where `d`
/// solves `d = mu + gamma P_pi^T d`.
pub fn policy_occupation(m: &Momdp, policy: &Policy) -> Result<OccupationMeasure> {
    policy.validate(m)?;
    let (ns, na) = (m.num_states(), m.num_actions());
    let mut system = DMatrix::<f64>::identity(ns, ns);
    for s in 0..ns {
        for a in 0..na {
            let w = policy.prob(s, a);
            if w == 0.0 {
                continue;
            }
            for (next, p) in m.transition_row(s, a).iter().enumerate() {
                system[(next, s)] -= m.discount() * w * p;
            }
        }
    }
    let mu = nalgebra::DVector::from_column_slice(m.initial());
    let d = system
        .lu()
        .solve(&mu)
        .ok_or_else(|| Error::domain("occupation system is singular"))?;
    let mut x = vec![0.0; ns * na];
    for s in 0..ns {
        for a in 0..na {
            x[s * na + a] = policy.prob(s, a) * d[s];
        }
    }
    OccupationMeasure::new(m, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_state(r: [f64; 2], gamma: f64) -> Momdp {
        Momdp::new(1, 1, 2, vec![1.0], r.to_vec(), gamma, vec![1.0]).unwrap()
    }

    #[test]
    fn geometric_series() {
        let m = single_state([2.0, 4.0], 0.9);
        let v = policy_value(&m, &Policy::Deterministic(vec![0])).unwrap();
        assert!((v[0] - 20.0).abs() < 1e-9 && (v[1] - 40.0).abs() < 1e-9);
    }

    #[test]
    fn two_state_chain_matches_hand_solution() {
        // s0 -a0-> s1 (r=(1,0)), s1 -a0-> s0 (r=(0,3)), gamma=0.5.
        // V0 = (1,0) + 0.5 V1, V1 = (0,3) + 0.5 V0
        // => V0 = ((1,0) + 0.5 (0,3)) / 0.75 = (4/3, 2), V1 = (2/3, 4).
        let m = Momdp::new(
            2,
            1,
            2,
            vec![0.0, 1.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 3.0],
            0.5,
            vec![1.0, 0.0],
        )
        .unwrap();
        let table = evaluate_policy(&m, &Policy::Deterministic(vec![0, 0])).unwrap();
        let expect = [[4.0 / 3.0, 2.0], [2.0 / 3.0, 4.0]];
        for (row, e) in table.iter().zip(expect) {
            assert!((row[0] - e[0]).abs() < 1e-12 && (row[1] - e[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn randomizing_identical_actions_changes_nothing() {
        let m = Momdp::new(
            1,
            2,
            2,
            vec![1.0, 1.0],
            vec![1.0, 2.0, 1.0, 2.0],
            0.8,
            vec![1.0],
        )
        .unwrap();
        let det = policy_value(&m, &Policy::Deterministic(vec![1])).unwrap();
        let mix = policy_value(&m, &Policy::Randomized(vec![vec![0.3, 0.7]])).unwrap();
        assert!((det[0] - mix[0]).abs() < 1e-12 && (det[1] - mix[1]).abs() < 1e-12);
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(Momdp::new(1, 1, 2, vec![0.9], vec![0.0, 0.0], 0.9, vec![1.0]).is_err());
        assert!(Momdp::new(1, 1, 2, vec![1.0], vec![-1.0, 0.0], 0.9, vec![1.0]).is_err());
        assert!(Momdp::new(1, 1, 2, vec![1.0], vec![0.0, 0.0], 1.0, vec![1.0]).is_err());
        assert!(Momdp::new(1, 1, 2, vec![1.0], vec![0.0, 0.0], 0.9, vec![0.5]).is_err());
        assert!(Momdp::new(1, 1, 1, vec![1.0], vec![0.0], 0.9, vec![1.0]).is_err());
    }

    #[test]
    fn occupation_policy_mapping() {
        let m = Momdp::new(
            2,
            2,
            2,
            vec![0.5, 0.5, 1.0, 0.0, 0.0, 1.0, 0.2, 0.8],
            vec![1.0; 8],
            0.9,
            vec![0.5, 0.5],
        )
        .unwrap();
        let x = OccupationMeasure::new(&m, vec![1.0, 1.0, 10.0, 0.0]).unwrap();
        match occupation_to_policy(&x) {
            Policy::Randomized(rows) => {
                assert_eq!(rows[0], vec![0.5, 0.5]);
                assert_eq!(rows[1], vec![1.0, 0.0]);
            }
            p => panic!("expected randomized policy, got {p:?}"),
        }
        let x = OccupationMeasure::new(&m, vec![0.0, 0.0, 10.0, 0.0]).unwrap();
        assert_eq!(occupation_to_policy(&x), Policy::Deterministic(vec![0, 0]));
    }

    #[test]
    fn occupation_value_examples() {
        let m = single_state([2.0, 4.0], 0.9);
        let x = OccupationMeasure::new(&m, vec![10.0]).unwrap();
        assert!(x.flow_residual(&m) < 1e-12);
        let z = occupation_value(&m, &x).unwrap();
        assert_eq!(z.as_slice(), &[20.0, 40.0]);

        let zero = single_state([0.0, 0.0], 0.9);
        let z =
            occupation_value(&zero, &OccupationMeasure::new(&zero, vec![10.0]).unwrap()).unwrap();
        assert_eq!(z.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn large_models_use_fixed_point() {
        let ns = DENSE_EVAL_MAX_STATES + 1;
        let mut transition = vec![0.0; ns * ns];
        for s in 0..ns {
            transition[s * ns + (s + 1) % ns] = 1.0;
        }
        let reward: Vec<f64> = (0..ns).flat_map(|s| [1.0, (s % 3) as f64]).collect();
        let mut initial = vec![0.0; ns];
        initial[0] = 1.0;
        let m = Momdp::new(ns, 1, 2, transition, reward, 0.9, initial).unwrap();
        let table = evaluate_policy(&m, &Policy::Deterministic(vec![0; ns])).unwrap();
        assert!((table[0][0] - 10.0).abs() < 1e-8);
        // Residual of the evaluation equations.
        for s in 0..ns {
            let next = (s + 1) % ns;
            for i in 0..2 {
                let rhs = m.reward(s, 0)[i] + 0.9 * table[next][i];
                assert!((table[s][i] - rhs).abs() <= 1e-8);
            }
        }
    }
}
