//! Packed Boolean matrices, the rectangular Boolean product, and the
//! closure-by-squaring baseline.
//!
//! The product kernel is word-parallel schoolbook: for each set bit (i,t) of
//! the left matrix, OR row t of the right matrix into output row i. No
//! subcubic kernel is attempted; the exponent arithmetic the theory cares
//! about lives in the planner module.

use rayon::prelude::*;

use crate::graph::DiGraph;

const WORD_BITS: usize = 64;

/// Row-major bit matrix, one bit per entry, rows padded to whole 64-bit words.
///
/// Trailing pad bits are always zero, so semantic equality is word-wise
/// equality and the derived `PartialEq` is correct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD_BITS);
        BitMatrix { rows, cols, words_per_row, data: vec![0; rows * words_per_row] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        let w = self.row(r)[c / WORD_BITS];
        (w >> (c % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        let wpr = self.words_per_row;
        self.data[r * wpr + c / WORD_BITS] |= 1u64 << (c % WORD_BITS);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// Column indices of the set bits in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(r).iter().enumerate().flat_map(|(wi, &w)| {
            let base = wi * WORD_BITS;
            std::iter::successors(Some(w), |&rest| (rest != 0).then(|| rest & (rest - 1)))
                .take_while(|&rest| rest != 0)
                .map(move |rest| base + rest.trailing_zeros() as usize)
        })
    }

    pub fn row_count_ones(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bytes of row `r` in column order: bit j of the row is bit (j mod 8) of
    /// byte (j / 8). Pad bits beyond `cols` are zero.
    pub fn row_bytes(&self, r: usize) -> impl Iterator<Item = u8> + '_ {
        let n_bytes = self.cols.div_ceil(8);
        self.row(r).iter().flat_map(|w| w.to_le_bytes()).take(n_bytes)
    }

    /// Builds a matrix row by row, rows computed in parallel. `row_bits(i)`
    /// returns the dense Boolean row i.
    pub fn from_parallel_rows<F>(rows: usize, cols: usize, row_bits: F) -> Self
    where
        F: Fn(usize) -> Vec<bool> + Sync,
    {
        let mut m = BitMatrix::zeros(rows, cols);
        if m.data.is_empty() {
            return m;
        }
        let wpr = m.words_per_row;
        m.data.par_chunks_mut(wpr).enumerate().for_each(|(i, dst)| {
            let bits = row_bits(i);
            debug_assert_eq!(bits.len(), cols);
            for (j, &b) in bits.iter().enumerate() {
                if b {
                    dst[j / WORD_BITS] |= 1u64 << (j % WORD_BITS);
                }
            }
        });
        m
    }
}

/// Boolean matrix product C[i,j] = OR over t of (B[i,t] AND A[t,j]).
///
/// Output rows are sharded across threads; each row is an OR-accumulation of
/// the rows of `a` selected by the bits of `b`, so the result does not depend
/// on the thread count.
pub fn bmm(b: &BitMatrix, a: &BitMatrix) -> BitMatrix {
    assert_eq!(b.cols, a.rows, "bmm: inner dimensions differ ({} vs {})", b.cols, a.rows);
    let mut c = BitMatrix::zeros(b.rows, a.cols);
    if c.data.is_empty() {
        return c;
    }
    let wpr = c.words_per_row;
    c.data.par_chunks_mut(wpr).enumerate().for_each(|(i, dst)| {
        for t in b.row_ones(i) {
            for (d, s) in dst.iter_mut().zip(a.row(t)) {
                *d |= s;
            }
        }
    });
    c
}

/// Copy of a square matrix with the diagonal forced to ones.
pub fn add_identity(a: &BitMatrix) -> BitMatrix {
    assert_eq!(a.rows, a.cols, "add_identity needs a square matrix");
    let mut m = a.clone();
    for i in 0..m.rows {
        m.set(i, i);
    }
    m
}

/// The |S|×n matrix whose row i is row s_i of `a`, in source order.
pub fn restrict_rows(a: &BitMatrix, s: &crate::graph::SourceSet) -> BitMatrix {
    let mut m = BitMatrix::zeros(s.len(), a.cols);
    for (i, &src) in s.ids().iter().enumerate() {
        assert!(src < a.rows, "source {src} out of range for {} rows", a.rows);
        let (dst_row, src_row) = (i * m.words_per_row, src * a.words_per_row);
        m.data[dst_row..dst_row + m.words_per_row]
            .copy_from_slice(&a.data[src_row..src_row + a.words_per_row]);
    }
    m
}

/// n×n adjacency matrix of `g`: bit (u,v) set iff the edge (u,v) exists.
pub fn adjacency_matrix(g: &DiGraph) -> BitMatrix {
    let mut m = BitMatrix::zeros(g.n(), g.n());
    for (u, v) in g.edges() {
        m.set(u, v);
    }
    m
}

/// Transitive closure with reflexive diagonal, by squaring A+I ⌈log₂ n⌉
/// times. Squaring stops early once a fixpoint is reached; the fixpoint is
/// the same matrix the full count would produce.
pub fn transitive_closure(g: &DiGraph) -> BitMatrix {
    let n = g.n();
    let mut m = add_identity(&adjacency_matrix(g));
    let rounds = if n <= 1 { 0 } else { (usize::BITS - (n - 1).leading_zeros()) as usize };
    for _ in 0..rounds {
        let next = bmm(&m, &m);
        if next == m {
            break;
        }
        m = next;
    }
    m
}
