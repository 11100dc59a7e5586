//! Instance files, seeded random instances and the chain MDPs behind the
//! two worked examples.
//!
//! ```text
//! momdp 1
//! name tiny
//! seed 7
//! states 1
//! actions 1
//! objectives 2
//! discount 0.9
//! initial 1
//! reward 0 0 2 4
//! transition 0 0 0:1
//! end
//! ```
//!
//! `name` and `seed` are optional. Every `(state, action)` pair needs one
//! `reward` line and one `transition` line listing `next:probability`
//! pairs; omitted next-states have probability 0. Numbers are written in
//! the shortest form that parses back to the same `f64`.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::momdp::Momdp;

pub const FORMAT_VERSION: u32 = 1;
/// Discount used by `random_instance`.
pub const RANDOM_DISCOUNT: f64 = 0.9;
/// Next-state support size per `(s, a)` in `random_instance`, capped by `|S|`.
pub const RANDOM_SUPPORT: usize = 4;

/// A model plus optional metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub momdp: Momdp,
    pub name: Option<String>,
    pub seed: Option<u64>,
}

pub fn write_instance(m: &Momdp) -> String {
    write_instance_file(&InstanceFile {
        momdp: m.clone(),
        name: None,
        seed: None,
    })
}

pub fn write_instance_file(f: &InstanceFile) -> String {
    let m = &f.momdp;
    let mut out = format!("momdp {FORMAT_VERSION}\n");
    if let Some(name) = &f.name {
        let _ = writeln!(out, "name {name}");
    }
    if let Some(seed) = f.seed {
        let _ = writeln!(out, "seed {seed}");
    }
    let _ = writeln!(out, "states {}", m.num_states());
    let _ = writeln!(out, "actions {}", m.num_actions());
    let _ = writeln!(out, "objectives {}", m.num_objectives());
    let _ = writeln!(out, "discount {}", m.discount());
    out.push_str("initial");
    for p in m.initial() {
        let _ = write!(out, " {p}");
    }
    out.push('\n');
    for s in 0..m.num_states() {
        for a in 0..m.num_actions() {
            let _ = write!(out, "reward {s} {a}");
            for r in m.reward(s, a) {
                let _ = write!(out, " {r}");
            }
            out.push('\n');
        }
    }
    for s in 0..m.num_states() {
        for a in 0..m.num_actions() {
            let _ = write!(out, "transition {s} {a}");
            for (next, p) in m.transition_row(s, a).iter().enumerate() {
                if *p != 0.0 {
                    let _ = write!(out, " {next}:{p}");
                }
            }
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| perr(line, format!("bad {what} '{tok}'")))
}

pub fn parse_instance(text: &str) -> Result<Momdp> {
    parse_instance_file(text).map(|f| f.momdp)
}

pub fn parse_instance_file(text: &str) -> Result<InstanceFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((n, l)) => {
            let mut t = l.split_whitespace();
            if t.next() != Some("momdp") {
                return Err(perr(n, "expected header 'momdp <version>'"));
            }
            let v: u32 = field(t.next(), n, "format version")?;
            if v != FORMAT_VERSION {
                return Err(perr(n, format!("unsupported format version {v}")));
            }
        }
        None => return Err(perr(0, "empty instance file")),
    }

    let mut name = None;
    let mut seed = None;
    let mut dims: [Option<usize>; 3] = [None; 3];
    let mut discount = None;
    let mut initial: Option<Vec<f64>> = None;
    let mut rewards: Vec<Option<Vec<f64>>> = Vec::new();
    let mut transitions: Vec<Option<Vec<f64>>> = Vec::new();
    let mut last = 0;

    let need_dims = |dims: &[Option<usize>; 3], n: usize| -> Result<(usize, usize, usize)> {
        match dims {
            [Some(s), Some(a), Some(k)] => Ok((*s, *a, *k)),
            _ => Err(perr(n, "states, actions and objectives must come first")),
        }
    };

    for (n, l) in lines {
        last = n;
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let mut t = rest.split_whitespace();
        match key {
            "name" => name = Some(rest.trim().to_string()),
            "seed" => seed = Some(field(t.next(), n, "seed")?),
            "states" | "actions" | "objectives" => {
                let idx = ["states", "actions", "objectives"]
                    .iter()
                    .position(|k| *k == key)
                    .expect("matched above");
                let v: usize = field(t.next(), n, key)?;
                if v == 0 {
                    return Err(perr(n, format!("{key} must be positive")));
                }
                dims[idx] = Some(v);
                if let [Some(s), Some(a), Some(_)] = dims {
                    rewards = vec![None; s * a];
                    transitions = vec![None; s * a];
                }
            }
            "discount" => discount = Some(field::<f64>(t.next(), n, "discount")?),
            "initial" => {
                initial = Some(
                    t.map(|x| field(Some(x), n, "probability"))
                        .collect::<Result<_>>()?,
                )
            }
            "reward" | "transition" => {
                let (ns, na, k) = need_dims(&dims, n)?;
                let s: usize = field(t.next(), n, "state")?;
                let a: usize = field(t.next(), n, "action")?;
                if s >= ns || a >= na {
                    return Err(perr(n, format!("pair ({s}, {a}) out of range")));
                }
                if key == "reward" {
                    let r: Vec<f64> = t
                        .map(|x| field(Some(x), n, "reward"))
                        .collect::<Result<_>>()?;
                    if r.len() != k {
                        return Err(perr(
                            n,
                            format!("expected {k} reward components, got {}", r.len()),
                        ));
                    }
                    if rewards[s * na + a].replace(r).is_some() {
                        return Err(perr(n, format!("duplicate reward for ({s}, {a})")));
                    }
                } else {
                    let mut row = vec![0.0; ns];
                    for pair in t {
                        let (next, p) = pair.split_once(':').ok_or_else(|| {
                            perr(n, format!("expected next:probability, got '{pair}'"))
                        })?;
                        let next: usize = field(Some(next), n, "next state")?;
                        if next >= ns {
                            return Err(perr(n, format!("next state {next} out of range")));
                        }
                        row[next] += field::<f64>(Some(p), n, "probability")?;
                    }
                    if transitions[s * na + a].replace(row).is_some() {
                        return Err(perr(n, format!("duplicate transition for ({s}, {a})")));
                    }
                }
            }
            "end" => {
                let (ns, na, k) = need_dims(&dims, n)?;
                let discount = discount.ok_or_else(|| perr(n, "missing discount"))?;
                let initial = initial.ok_or_else(|| perr(n, "missing initial distribution"))?;
                let mut reward = Vec::with_capacity(ns * na * k);
                let mut transition = Vec::with_capacity(ns * na * ns);
                for pair in 0..ns * na {
                    let (s, a) = (pair / na, pair % na);
                    reward.extend(
                        rewards[pair]
                            .take()
                            .ok_or_else(|| perr(n, format!("missing reward for ({s}, {a})")))?,
                    );
                    transition.extend(
                        transitions[pair]
                            .take()
                            .ok_or_else(|| perr(n, format!("missing transition for ({s}, {a})")))?,
                    );
                }
                let momdp = Momdp::new(ns, na, k, transition, reward, discount, initial)?;
                return Ok(InstanceFile { momdp, name, seed });
            }
            other => return Err(perr(n, format!("unknown keyword '{other}'"))),
        }
    }
    Err(perr(last, "truncated instance: missing 'end'"))
}

/// Seeded instance: integer rewards uniform on 0..=99, each `(s, a)` moving
/// to `min(|S|, 4)` distinct random next-states with normalized positive
/// random weights, discount 0.9 and a uniform initial distribution.
pub fn random_instance(
    seed: u64,
    num_states: usize,
    num_actions: usize,
    num_objectives: usize,
) -> Result<Momdp> {
    if num_states == 0 || num_actions == 0 || num_objectives < 2 {
        return Err(Error::domain(
            "random instances need positive states and actions and at least 2 objectives",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = RANDOM_SUPPORT.min(num_states);
    let mut reward = Vec::with_capacity(num_states * num_actions * num_objectives);
    let mut transition = vec![0.0; num_states * num_actions * num_states];
    for s in 0..num_states {
        for a in 0..num_actions {
            for _ in 0..num_objectives {
                reward.push(rng.gen_range(0..=99u32) as f64);
            }
            let next = sample(&mut rng, num_states, support);
            let weights: Vec<f64> = (0..support).map(|_| 1.0 - rng.gen::<f64>()).collect();
            let total: f64 = weights.iter().sum();
            let row = &mut transition[(s * num_actions + a) * num_states..][..num_states];
            for (j, w) in next.iter().zip(weights) {
                row[j] = w / total;
            }
        }
    }
    let initial = vec![1.0 / num_states as f64; num_states];
    Momdp::new(
        num_states,
        num_actions,
        num_objectives,
        transition,
        reward,
        RANDOM_DISCOUNT,
        initial,
    )
}

/// Chain `0 -> 1 -> ... -> N` where state `i < N` offers rewards
/// `(2^i, 0)` and `(0, 2^i)`; `N` is absorbing with zero reward.
pub fn example1_mdp(n: u32, discount: f64) -> Result<Momdp> {
    if n == 0 || n > 52 {
        return Err(Error::domain(format!("N must be in 1..=52, got {n}")));
    }
    let bits: Vec<[f64; 2]> = (0..n).map(|i| [2f64.powi(i as i32); 2]).collect();
    chain(&bits, None, discount)
}

/// Chain whose first state pays `(0, 2^(N+1) + 2)` under both actions,
/// followed by `N - 1` states offering `(2^j, 0)` or `(0, 2^(j+1))`.
pub fn example2_mdp(n: u32, discount: f64) -> Result<Momdp> {
    if !(2..=52).contains(&n) {
        return Err(Error::domain(format!("N must be in 2..=52, got {n}")));
    }
    let bits: Vec<[f64; 2]> = (0..n - 1)
        .map(|j| [2f64.powi(j as i32), 2f64.powi(j as i32 + 1)])
        .collect();
    chain(&bits, Some(2f64.powi(n as i32 + 1) + 2.0), discount)
}

fn chain(bits: &[[f64; 2]], lead: Option<f64>, discount: f64) -> Result<Momdp> {
    let mut rewards: Vec<[[f64; 2]; 2]> = Vec::new();
    if let Some(r) = lead {
        rewards.push([[0.0, r], [0.0, r]]);
    }
    for b in bits {
        rewards.push([[b[0], 0.0], [0.0, b[1]]]);
    }
    rewards.push([[0.0, 0.0], [0.0, 0.0]]);
    let ns = rewards.len();
    let mut transition = vec![0.0; ns * 2 * ns];
    let mut reward = Vec::with_capacity(ns * 4);
    for (s, r) in rewards.iter().enumerate() {
        let next = (s + 1).min(ns - 1);
        for (a, ra) in r.iter().enumerate() {
            transition[(s * 2 + a) * ns + next] = 1.0;
            reward.extend_from_slice(ra);
        }
    }
    let mut initial = vec![0.0; ns];
    initial[0] = 1.0;
    Momdp::new(ns, 2, 2, transition, reward, discount, initial)
}
