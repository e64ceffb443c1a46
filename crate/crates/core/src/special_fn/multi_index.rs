use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::factorial;

/// Tuple of nonnegative exponents `(α_1, …, α_n)`.
///
/// Ordered graded-lexicographically: first by total degree `|α|`, then
/// lexicographically with larger leading exponents first, so that for
/// `n = 2` the degree-one indices come out as `(1,0), (0,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// Unit index `e_axis` scaled by `k`.
    pub fn axis(dim: usize, axis: usize, k: u32) -> Self {
        let mut v = vec![0; dim];
        v[axis] = k;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if !other.le(self) {
            return None;
        }
        Some(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: u32) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }

    pub fn all_even(&self) -> bool {
        self.0.iter().all(|a| a % 2 == 0)
    }

    /// `α / 2` when every component is even.
    pub fn half(&self) -> Option<Self> {
        self.all_even()
            .then(|| Self(self.0.iter().map(|a| a / 2).collect()))
    }

    /// `α! = Π α_j!`.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// Every `γ ≤ self`, in graded-lex order.
    pub fn lower_set(&self) -> Vec<Self> {
        let mut out = vec![Self::zeros(self.dim())];
        for (axis, &a) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
            for base in &out {
                for k in 0..=a {
                    let mut v = base.0.clone();
                    v[axis] = k;
                    next.push(Self(v));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// `t^α` for a real point.
    pub fn monomial<R: crate::Real>(&self, t: &[R]) -> R {
        self.0
            .iter()
            .zip(t)
            .fold(R::one(), |acc, (&a, &x)| acc * x.powi(a as i32))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = Error;

    /// Parses `"(1,0,2)"` or `"1,0,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Format(format!("bad multi-index component in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        Self(v.to_vec())
    }
}

/// All multi-indices of dimension `n` with `|α| ≤ max_degree`, graded-lex.
#[derive(Debug, Clone)]
pub struct IndexSet {
    dim: usize,
    max_degree: u32,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl IndexSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.indices.iter()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.position.get(alpha).copied()
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a MultiIndex;
    type IntoIter = std::slice::Iter<'a, MultiIndex>;

    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}

/// Enumerates every multi-index of dimension `n` and total degree `≤ d`.
pub fn enumerate_indices(n: usize, d: u32) -> Result<IndexSet> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut indices = Vec::new();
    for degree in 0..=d {
        let mut current = vec![0u32; n];
        compositions(degree, 0, &mut current, &mut indices);
    }
    let position = indices
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();
    Ok(IndexSet {
        dim: n,
        max_degree: d,
        indices,
        position,
    })
}

// Emits the compositions of `remaining` into the axes `axis..` with the
// leading axis taking its largest value first.
fn compositions(remaining: u32, axis: usize, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if axis == n - 1 {
        current[axis] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for k in (0..=remaining).rev() {
        current[axis] = k;
        compositions(remaining - k, axis + 1, current, out);
    }
    current[axis] = 0;
}
