//! MacKay alist text format for exchanging parity-check matrices with other LDPC tools.
//!
//! ```text
//! N M
//! max_col_degree max_row_degree
//! f(0) ... f(N-1)
//! g(0) ... g(M-1)
//! N lines: 1-based row indices of each column, zero padded to max_col_degree
//! M lines: 1-based column indices of each row, zero padded to max_row_degree
//! ```

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::sparse::SparseParityCheck;

fn join_padded(items: impl Iterator<Item = u32>, width: usize) -> String {
    let mut parts: Vec<String> = items.map(|i| (i + 1).to_string()).collect();
    parts.resize(width, "0".to_string());
    parts.join(" ")
}

pub fn export_alist(h: &SparseParityCheck) -> String {
    let mut out = String::new();
    let (n, m) = (h.n(), h.m());
    let (max_col, max_row) = (h.max_col_degree(), h.max_row_degree());
    writeln!(out, "{n} {m}").unwrap();
    writeln!(out, "{max_col} {max_row}").unwrap();
    let degs: Vec<String> = h.col_degrees().iter().map(|d| d.to_string()).collect();
    writeln!(out, "{}", degs.join(" ")).unwrap();
    let degs: Vec<String> = h.row_degrees().iter().map(|d| d.to_string()).collect();
    writeln!(out, "{}", degs.join(" ")).unwrap();
    for c in 0..n {
        writeln!(out, "{}", join_padded(h.col(c).iter().copied(), max_col)).unwrap();
    }
    for r in 0..m {
        writeln!(out, "{}", join_padded(h.row(r).iter().copied(), max_row)).unwrap();
    }
    out
}

/// Parses an alist file. Zero padding is optional. The row lists are authoritative;
/// the column lists are checked against them.
///
/// The result has `k = n - m` and tier height 1 unless the caller rebuilds it with
/// different parameters.
pub fn parse_alist(text: &str) -> Result<SparseParityCheck> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut numbers = |what: &str| -> Result<Vec<usize>> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("alist truncated before {what}")))?;
        line.split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad integer '{t}' in {what}")))
            })
            .collect()
    };
    let dims = numbers("dimensions")?;
    let [n, m] = dims[..] else {
        return Err(Error::Parse("first line must be 'N M'".into()));
    };
    let maxes = numbers("max degrees")?;
    if maxes.len() != 2 {
        return Err(Error::Parse("second line must hold two max degrees".into()));
    }
    let col_deg = numbers("column degrees")?;
    let row_deg = numbers("row degrees")?;
    if col_deg.len() != n || row_deg.len() != m {
        return Err(Error::Parse("degree list length mismatch".into()));
    }
    let mut cols = Vec::with_capacity(n);
    for (c, &d) in col_deg.iter().enumerate() {
        let list: Vec<usize> = numbers("column list")?.into_iter().filter(|&i| i > 0).collect();
        if list.len() != d {
            return Err(Error::Parse(format!("column {c} lists {} entries, degree {d}", list.len())));
        }
        cols.push(list);
    }
    let mut rows = Vec::with_capacity(m);
    for (r, &d) in row_deg.iter().enumerate() {
        let list: Vec<usize> = numbers("row list")?
            .into_iter()
            .filter(|&i| i > 0)
            .map(|i| i - 1)
            .collect();
        if list.len() != d {
            return Err(Error::Parse(format!("row {r} lists {} entries, degree {d}", list.len())));
        }
        rows.push(list);
    }
    let h = SparseParityCheck::from_rows(n, n.saturating_sub(m), 1, &rows)?;
    for (c, list) in cols.iter().enumerate() {
        let mut list: Vec<u32> = list.iter().map(|&i| (i - 1) as u32).collect();
        list.sort_unstable();
        if h.col(c) != list.as_slice() {
            return Err(Error::Parse(format!("column {c} disagrees with the row lists")));
        }
    }
    Ok(h)
}
