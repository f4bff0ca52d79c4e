use serde::{Deserialize, Serialize};
use std::fmt;

/// A multi-index over at most two spatial components.
///
/// Components beyond the ambient dimension are always zero.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct MultiIndex(pub [u32; 2]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0, 0]);

    pub fn new(parts: [u32; 2]) -> Self {
        MultiIndex(parts)
    }

    /// One-dimensional multi-index `k`.
    pub fn d1(k: u32) -> Self {
        MultiIndex([k, 0])
    }

    /// Unit multi-index along `axis`.
    pub fn unit(axis: usize) -> Self {
        let mut parts = [0, 0];
        parts[axis] = 1;
        MultiIndex(parts)
    }

    pub fn order(&self) -> usize {
        (self.0[0] + self.0[1]) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.order() == 0
    }

    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&k| (1..=k).map(f64::from).product::<f64>())
            .product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex([self.0[0] + other.0[0], self.0[1] + other.0[1]])
    }

    /// Component-wise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0[0] <= other.0[0] && self.0[1] <= other.0[1]
    }

    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex([self.0[0] - other.0[0], self.0[1] - other.0[1]])
    }

    /// Product of binomial coefficients `binom(self_i, other_i)`.
    pub fn binomial(&self, other: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&n, &k)| binomial(n, k))
            .product()
    }

    /// All multi-indices of dimension `dim` with total order exactly `order`.
    pub fn of_order(dim: usize, order: usize) -> Vec<MultiIndex> {
        let order = order as u32;
        match dim {
            1 => vec![MultiIndex([order, 0])],
            _ => (0..=order)
                .rev()
                .map(|a| MultiIndex([a, order - a]))
                .collect(),
        }
    }

    /// All multi-indices of dimension `dim` with total order at most `max_order`.
    pub fn up_to(dim: usize, max_order: usize) -> Vec<MultiIndex> {
        (0..=max_order)
            .flat_map(|k| MultiIndex::of_order(dim, k))
            .collect()
    }

    /// All multi-indices `beta <= self` component-wise.
    pub fn below(&self) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for a in 0..=self.0[0] {
            for b in 0..=self.0[1] {
                out.push(MultiIndex([a, b]));
            }
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0[0], self.0[1])
    }
}

/// All triples `(alpha, beta, gamma)` with `|alpha|+|beta|+|gamma| <= max_order`.
pub fn triples_up_to(dim: usize, max_order: usize) -> Vec<(MultiIndex, MultiIndex, MultiIndex)> {
    let all = MultiIndex::up_to(dim, max_order);
    let mut out = Vec::new();
    for a in &all {
        for b in &all {
            for c in &all {
                if a.order() + b.order() + c.order() <= max_order {
                    out.push((*a, *b, *c));
                }
            }
        }
    }
    out
}
