//! Expanded parity-check matrix stored as row and column adjacency lists.

use crate::codebook::ModelMatrix;
use crate::error::{Error, Result};

/// Sparse binary `H` with both adjacency directions in compressed form.
///
/// `row(m)` is `N(m)`, the ascending column indices of ones in row `m`;
/// `col(n)` is `M(n)`, the ascending row indices of ones in column `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseParityCheck {
    n: usize,
    k: usize,
    z: usize,
    row_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    col_ptr: Vec<usize>,
    col_idx: Vec<u32>,
}

impl SparseParityCheck {
    /// Builds `H` from per-row column lists. Rows are sorted and deduplicated.
    ///
    /// `k` is the number of systematic bits and `z` the tier height used by the
    /// layered decoder (`m` must be a multiple of `z`; use 1 for unstructured codes).
    pub fn from_rows(n: usize, k: usize, z: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let m = rows.len();
        if z == 0 || m % z != 0 {
            return Err(Error::InvalidConfig(format!(
                "{m} rows cannot be split into tiers of {z}"
            )));
        }
        if k > n {
            return Err(Error::InvalidConfig(format!("k={k} exceeds n={n}")));
        }
        let mut row_ptr = Vec::with_capacity(m + 1);
        let mut row_idx = Vec::new();
        row_ptr.push(0);
        for (r, cols) in rows.iter().enumerate() {
            let mut cols = cols.clone();
            cols.sort_unstable();
            cols.dedup();
            if let Some(&c) = cols.last() {
                if c >= n {
                    return Err(Error::InvalidConfig(format!(
                        "row {r} references column {c} >= {n}"
                    )));
                }
            }
            row_idx.extend(cols.iter().map(|&c| c as u32));
            row_ptr.push(row_idx.len());
        }

        // Transpose by counting; iterating rows in order keeps every column list ascending.
        let mut col_ptr = vec![0usize; n + 1];
        for &c in &row_idx {
            col_ptr[c as usize + 1] += 1;
        }
        for i in 0..n {
            col_ptr[i + 1] += col_ptr[i];
        }
        let mut fill = col_ptr.clone();
        let mut col_idx = vec![0u32; row_idx.len()];
        for r in 0..m {
            for &c in &row_idx[row_ptr[r]..row_ptr[r + 1]] {
                col_idx[fill[c as usize]] = r as u32;
                fill[c as usize] += 1;
            }
        }

        Ok(Self {
            n,
            k,
            z,
            row_ptr,
            row_idx,
            col_ptr,
            col_idx,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// Rows per decoder tier.
    pub fn z(&self) -> usize {
        self.z
    }

    pub fn tiers(&self) -> usize {
        self.m() / self.z
    }

    pub fn edges(&self) -> usize {
        self.row_idx.len()
    }

    pub fn row(&self, m: usize) -> &[u32] {
        &self.row_idx[self.row_ptr[m]..self.row_ptr[m + 1]]
    }

    pub fn col(&self, n: usize) -> &[u32] {
        &self.col_idx[self.col_ptr[n]..self.col_ptr[n + 1]]
    }

    /// `g(m)`
    pub fn row_degree(&self, m: usize) -> usize {
        self.row_ptr[m + 1] - self.row_ptr[m]
    }

    /// `f(n)`
    pub fn col_degree(&self, n: usize) -> usize {
        self.col_ptr[n + 1] - self.col_ptr[n]
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        (0..self.m()).map(|m| self.row_degree(m)).collect()
    }

    pub fn col_degrees(&self) -> Vec<usize> {
        (0..self.n).map(|n| self.col_degree(n)).collect()
    }

    pub fn max_row_degree(&self) -> usize {
        (0..self.m()).map(|m| self.row_degree(m)).max().unwrap_or(0)
    }

    pub fn max_col_degree(&self) -> usize {
        (0..self.n).map(|n| self.col_degree(n)).max().unwrap_or(0)
    }

    /// Row offsets into the flat edge list; edge `e` of row `m` is `row_ptr[m] + e`.
    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    /// Number of unsatisfied parity checks for a hard-decision word (one bit per byte).
    pub fn unsatisfied_checks(&self, bits: &[u8]) -> usize {
        (0..self.m())
            .filter(|&m| {
                self.row(m)
                    .iter()
                    .fold(0u8, |acc, &c| acc ^ (bits[c as usize] & 1))
                    != 0
            })
            .count()
    }

    /// True iff `H · bitsᵀ = 0` over GF(2).
    pub fn syndrome_ok(&self, bits: &[u8]) -> bool {
        (0..self.m()).all(|m| {
            self.row(m)
                .iter()
                .fold(0u8, |acc, &c| acc ^ (bits[c as usize] & 1))
                == 0
        })
    }
}

/// Expands a model matrix: entry `e ≥ 0` at block `(i, j)` puts a one at
/// row `i·Z + r`, column `j·Z + (r + e) mod Z` for every `r < Z`.
pub fn expand(mb: &ModelMatrix) -> SparseParityCheck {
    let z = mb.z;
    let mut rows = Vec::with_capacity(mb.m());
    for i in 0..mb.mb() {
        for r in 0..z {
            let cols = mb
                .row(i)
                .iter()
                .enumerate()
                .filter(|(_, &e)| e >= 0)
                .map(|(j, &e)| j * z + (r + e as usize) % z)
                .collect();
            rows.push(cols);
        }
    }
    SparseParityCheck::from_rows(mb.n(), mb.k(), z, &rows)
        .expect("model matrix expansion is always in range")
}
