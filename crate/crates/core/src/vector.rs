//! Value vectors, Lorenz vectors and the dominance relations between them.
//!
//! All relations are defined on the nonnegative orthant. Strict dominance of
//! two equal vectors is always false.

use std::fmt;

use crate::error::{Error, Result};

/// An n-dimensional nonnegative tradeoff, one component per objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector(Vec<f64>);

impl ValueVector {
    /// Builds a value vector, rejecting negative or non-finite components.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain(
                "value vector must have at least one component",
            ));
        }
        if let Some(c) = components.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::domain(format!(
                "value vector components must be finite and nonnegative, got {c}"
            )));
        }
        Ok(ValueVector(components))
    }

    /// Builds a value vector from solver output, clamping round-off below zero.
    ///
    /// Components below `-tol` are still rejected.
    pub fn from_numeric(mut components: Vec<f64>, tol: f64) -> Result<Self> {
        for c in components.iter_mut() {
            if *c < 0.0 && *c >= -tol {
                *c = 0.0;
            }
        }
        Self::new(components)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn lorenz(&self) -> LorenzVector {
        lorenz_of_slice(&self.0)
    }
}

impl std::ops::Index<usize> for ValueVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for ValueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// Cumulative sums of the ascending-sorted components of a value vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzVector(Vec<f64>);

impl LorenzVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The last component, equal to the sum of the source vector.
    pub fn total(&self) -> f64 {
        *self.0.last().expect("lorenz vectors are nonempty")
    }
}

impl std::ops::Index<usize> for LorenzVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for LorenzVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, xs: &[f64]) -> fmt::Result {
    f.write_str("(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(")")
}

pub(crate) fn lorenz_of_slice(v: &[f64]) -> LorenzVector {
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    for x in sorted.iter_mut() {
        acc += *x;
        *x = acc;
    }
    LorenzVector(sorted)
}

/// Lorenz vector of `v`: the k-th component is the sum of the k smallest
/// components of `v`.
pub fn lorenz_vector(v: &ValueVector) -> LorenzVector {
    v.lorenz()
}

/// Lorenz vector of raw components; negative input is a domain error.
pub fn lorenz_of(components: &[f64]) -> Result<LorenzVector> {
    Ok(ValueVector::new(components.to_vec())?.lorenz())
}

/// Componentwise `a >= b`, and with `strict` additionally `a != b`.
pub(crate) fn dominates_slice(a: &[f64], b: &[f64], strict: bool) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut better = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            better = true;
        }
    }
    !strict || better
}

/// `(1+eps) * a_i >= b_i` for all i.
pub(crate) fn eps_dominates_slice(a: &[f64], b: &[f64], eps: f64) -> bool {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).all(|(x, y)| (1.0 + eps) * x >= *y)
}

fn check_lengths(v: &ValueVector, w: &ValueVector) -> Result<()> {
    if v.len() != w.len() {
        return Err(Error::domain(format!(
            "length mismatch: {} vs {}",
            v.len(),
            w.len()
        )));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::domain(format!(
            "epsilon must be a nonnegative real, got {eps}"
        )));
    }
    Ok(())
}

/// Weak (`strict == false`) or strict Pareto dominance of `v` over `w`.
pub fn pareto_dominates(v: &ValueVector, w: &ValueVector, strict: bool) -> Result<bool> {
    check_lengths(v, w)?;
    Ok(dominates_slice(v.as_slice(), w.as_slice(), strict))
}

/// `v` epsilon-dominates `w` when `(1+eps) v_i >= w_i` for every i.
pub fn eps_pareto_dominates(v: &ValueVector, w: &ValueVector, eps: f64) -> Result<bool> {
    check_eps(eps)?;
    check_lengths(v, w)?;
    Ok(eps_dominates_slice(v.as_slice(), w.as_slice(), eps))
}

/// Pareto dominance between the Lorenz vectors of `v` and `w`.
pub fn lorenz_dominates(v: &ValueVector, w: &ValueVector, strict: bool) -> Result<bool> {
    check_lengths(v, w)?;
    Ok(dominates_slice(
        v.lorenz().as_slice(),
        w.lorenz().as_slice(),
        strict,
    ))
}

/// Epsilon-dominance between the Lorenz vectors of `v` and `w`.
pub fn eps_lorenz_dominates(v: &ValueVector, w: &ValueVector, eps: f64) -> Result<bool> {
    check_eps(eps)?;
    check_lengths(v, w)?;
    Ok(eps_dominates_slice(
        v.lorenz().as_slice(),
        w.lorenz().as_slice(),
        eps,
    ))
}

/// Indices of the points not strictly dominated by any other point. O(m^2).
pub(crate) fn nondominated_indices(points: &[&[f64]]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .enumerate()
                .any(|(j, p)| j != i && dominates_slice(p, points[i], true))
        })
        .collect()
}

fn check_same_dimension(set: &[ValueVector]) -> Result<()> {
    if let Some(first) = set.first() {
        if let Some(bad) = set.iter().find(|v| v.len() != first.len()) {
            return Err(Error::domain(format!(
                "mixed dimensions in set: {} vs {}",
                first.len(),
                bad.len()
            )));
        }
    }
    Ok(())
}

/// Pareto-nondominated subset, in input order.
pub fn pnd_filter(set: &[ValueVector]) -> Result<Vec<ValueVector>> {
    check_same_dimension(set)?;
    let points: Vec<&[f64]> = set.iter().map(|v| v.as_slice()).collect();
    Ok(nondominated_indices(&points)
        .into_iter()
        .map(|i| set[i].clone())
        .collect())
}

/// Lorenz-nondominated subset, in input order.
pub fn lnd_filter(set: &[ValueVector]) -> Result<Vec<ValueVector>> {
    check_same_dimension(set)?;
    let lorenz: Vec<LorenzVector> = set.iter().map(|v| v.lorenz()).collect();
    let points: Vec<&[f64]> = lorenz.iter().map(|l| l.as_slice()).collect();
    Ok(nondominated_indices(&points)
        .into_iter()
        .map(|i| set[i].clone())
        .collect())
}

/// Moves `amount` from component `i` to component `j` (0-based).
///
/// Requires `v_i > v_j` and `0 < amount <= v_i - v_j`.
pub fn pigou_dalton_transfer(
    v: &ValueVector,
    i: usize,
    j: usize,
    amount: f64,
) -> Result<ValueVector> {
    let n = v.len();
    if i >= n || j >= n || i == j {
        return Err(Error::domain(format!(
            "transfer indices ({i}, {j}) invalid for length {n}"
        )));
    }
    let (vi, vj) = (v[i], v[j]);
    if vi <= vj {
        return Err(Error::domain(format!(
            "transfer requires v[{i}] > v[{j}], got {vi} <= {vj}"
        )));
    }
    if !(amount > 0.0) || amount > vi - vj {
        return Err(Error::domain(format!(
            "transfer amount {amount} outside (0, {}]",
            vi - vj
        )));
    }
    let mut out = v.as_slice().to_vec();
    out[i] -= amount;
    out[j] += amount;
    ValueVector::new(out)
}
