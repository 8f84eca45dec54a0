//! Integer points on spheres `|x|^2 = lambda` in `Z^dim`.
//!
//! Shells are enumerated exactly by recursive descent over coordinates,
//! pruning each coordinate to values whose square fits the remaining budget.
//! Points are kept in lexicographic order and indexed by a hash set.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 16;
pub const MAX_LAMBDA: u64 = 1 << 40;

/// An integer vector in `Z^dim`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn zero(dim: usize) -> Self {
        LatticePoint(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|&c| c * c).sum()
    }

    pub fn dot(&self, other: &LatticePoint) -> i64 {
        dot(&self.0, &other.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `self - other`, componentwise.
    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|c| -c).collect())
    }

    /// True when the first nonzero coordinate is positive.
    pub fn is_sign_canonical(&self) -> bool {
        self.0.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
    }

    /// Representative of `{self, -self}` whose first nonzero coordinate is positive.
    /// The zero vector maps to itself.
    pub fn sign_canonical(&self) -> LatticePoint {
        if self.is_zero() || self.is_sign_canonical() {
            self.clone()
        } else {
            self.neg()
        }
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl std::borrow::Borrow<[i64]> for LatticePoint {
    fn borrow(&self) -> &[i64] {
        &self.0
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All lattice points of squared norm `lambda` in dimension `dim`.
#[derive(Clone, Debug)]
pub struct SphereShell {
    dim: usize,
    lambda: u64,
    points: Vec<LatticePoint>,
    index: HashMap<LatticePoint, usize>,
}

#[derive(Serialize, Deserialize)]
struct ShellJson {
    dim: usize,
    lambda: u64,
    count: usize,
    points: Vec<LatticePoint>,
}

impl SphereShell {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Position of `p` in the canonical point order.
    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Membership test; errors if `p` has the wrong dimension.
    pub fn contains(&self, p: &LatticePoint) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(Error::Contract(format!(
                "point of dimension {} queried against shell of dimension {}",
                p.dim(),
                self.dim
            )));
        }
        Ok(self.index.contains_key(p.coords()))
    }

    pub fn contains_coords(&self, p: &[i64]) -> bool {
        self.index.contains_key(p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ShellJson {
            dim: self.dim,
            lambda: self.lambda,
            count: self.points.len(),
            points: self.points.clone(),
        })
        .expect("shell serializes")
    }
}

/// Enumerate the shell `{x in Z^dim : |x|^2 = lambda}` in lexicographic order.
pub fn enumerate_shell(dim: usize, lambda: u64) -> Result<SphereShell> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(Error::Range(format!(
            "dim must lie in [{MIN_DIM}, {MAX_DIM}], got {dim}"
        )));
    }
    if lambda > MAX_LAMBDA {
        return Err(Error::Range(format!(
            "lambda must be at most 2^40, got {lambda}"
        )));
    }

    let mut points = Vec::new();
    let mut current = vec![0i64; dim];
    descend(&mut current, 0, lambda as i64, &mut points);

    let index = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    Ok(SphereShell {
        dim,
        lambda,
        points,
        index,
    })
}

// Visiting coordinate values in increasing order at every depth yields
// lexicographic output without a final sort.
fn descend(current: &mut [i64], pos: usize, budget: i64, out: &mut Vec<LatticePoint>) {
    let dim = current.len();
    if pos == dim - 1 {
        if budget == 0 {
            current[pos] = 0;
            out.push(LatticePoint(current.to_vec()));
        } else if let Some(r) = exact_sqrt(budget) {
            current[pos] = -r;
            out.push(LatticePoint(current.to_vec()));
            current[pos] = r;
            out.push(LatticePoint(current.to_vec()));
        }
        return;
    }
    let bound = isqrt(budget);
    for x in -bound..=bound {
        current[pos] = x;
        descend(current, pos + 1, budget - x * x, out);
    }
}

pub(crate) fn isqrt(n: i64) -> i64 {
    debug_assert!(n >= 0);
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn exact_sqrt(n: i64) -> Option<i64> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}
