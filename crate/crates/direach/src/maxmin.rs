//! The max-min (bottleneck) semiring: values in {−∞} ∪ ℕ ∪ {+∞} and the
//! matrix product C[i,j] = max_k min{B[i,k], A[k,j]}.
//!
//! The one-hop sequence-reachability step encodes position labels as finite
//! values on the left and adjacency as ±∞ on the right; one shared scalar
//! domain keeps a single product kernel.

use std::fmt;

use rayon::prelude::*;

/// Scalar of the max-min semiring. The derived ordering is the semiring
/// order: NegInf < Finite(a) < Finite(b) < PosInf for a < b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaxMinValue {
    NegInf,
    Finite(u64),
    PosInf,
}

impl MaxMinValue {
    pub fn is_finite(self) -> bool {
        matches!(self, MaxMinValue::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            MaxMinValue::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for MaxMinValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxMinValue::NegInf => write!(f, "-inf"),
            MaxMinValue::Finite(v) => write!(f, "{v}"),
            MaxMinValue::PosInf => write!(f, "+inf"),
        }
    }
}

/// Dense row-major matrix over the max-min scalar domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxMinMatrix {
    rows: usize,
    cols: usize,
    data: Vec<MaxMinValue>,
}

impl MaxMinMatrix {
    /// New matrix filled with −∞, the additive identity of max.
    pub fn neg_inf(rows: usize, cols: usize) -> Self {
        MaxMinMatrix { rows, cols, data: vec![MaxMinValue::NegInf; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> MaxMinValue {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: MaxMinValue) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        self.data[r * self.cols + c] = v;
    }

    fn row(&self, r: usize) -> &[MaxMinValue] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Max-min matrix product by direct evaluation, output rows in parallel.
///
/// −∞ entries of `b` are skipped: min(−∞, x) = −∞ never raises a maximum.
pub fn maxmin_product(b: &MaxMinMatrix, a: &MaxMinMatrix) -> MaxMinMatrix {
    assert_eq!(
        b.cols, a.rows,
        "maxmin_product: inner dimensions differ ({} vs {})",
        b.cols, a.rows
    );
    let mut c = MaxMinMatrix::neg_inf(b.rows, a.cols);
    if c.data.is_empty() {
        return c;
    }
    let cols = c.cols;
    c.data.par_chunks_mut(cols).enumerate().for_each(|(i, dst)| {
        for (t, &bit) in b.row(i).iter().enumerate() {
            if bit == MaxMinValue::NegInf {
                continue;
            }
            for (d, &ait) in dst.iter_mut().zip(a.row(t)) {
                let candidate = bit.min(ait);
                if candidate > *d {
                    *d = candidate;
                }
            }
        }
    });
    c
}
