//! Reading and writing parity-check matrices in the alist text format.
//!
//! Layout:
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! <n column degrees>
//! <m row degrees>
//! <n lines: 1-based row indices of each column>
//! <m lines: 1-based column indices of each row>
//! ```
//!
//! Adjacency lines carry exactly as many entries as the declared degree; zero
//! padding is not accepted.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::SparseParityCheck;

pub fn export_alist(h: &SparseParityCheck) -> String {
    let mut out = String::new();
    let max_col = h.cols().map(<[usize]>::len).max().unwrap_or(0);
    let max_row = h.rows().map(<[usize]>::len).max().unwrap_or(0);
    writeln!(out, "{} {}", h.n_cols(), h.n_rows()).unwrap();
    writeln!(out, "{max_col} {max_row}").unwrap();
    write_list(&mut out, h.cols().map(<[usize]>::len));
    write_list(&mut out, h.rows().map(<[usize]>::len));
    for col in h.cols() {
        write_list(&mut out, col.iter().map(|j| j + 1));
    }
    for row in h.rows() {
        write_list(&mut out, row.iter().map(|i| i + 1));
    }
    out
}

fn write_list(out: &mut String, items: impl Iterator<Item = usize>) {
    let mut first = true;
    for x in items {
        if !first {
            out.push(' ');
        }
        write!(out, "{x}").unwrap();
        first = false;
    }
    out.push('\n');
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line parsed as whitespace-separated integers, with its
    /// 1-based line number.
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (idx, line) in self.inner.by_ref() {
            self.last = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Error::Alist {
                        line: idx + 1,
                        msg: format!("'{tok}' is not a non-negative integer"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, nums));
        }
        Err(Error::Alist {
            line: self.last + 1,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }

    fn expect_len(&mut self, what: &str, len: usize) -> Result<(usize, Vec<usize>)> {
        // Empty adjacency lists are written as blank lines, which are skipped.
        if len == 0 {
            return Ok((self.last, Vec::new()));
        }
        let (line, nums) = self.next_numbers(what)?;
        if nums.len() != len {
            return Err(Error::Alist {
                line,
                msg: format!("expected {len} values for {what}, found {}", nums.len()),
            });
        }
        Ok((line, nums))
    }
}

pub fn import_alist(text: &str) -> Result<SparseParityCheck> {
    let mut lines = Lines::new(text);
    let (_, dims) = lines.expect_len("dimensions 'n m'", 2)?;
    let (n, m) = (dims[0], dims[1]);
    let (max_line, maxes) = lines.expect_len("maximum degrees", 2)?;
    let (_, col_deg) = lines.expect_len("column degrees", n)?;
    let (row_line, row_deg) = lines.expect_len("row degrees", m)?;

    if col_deg.iter().copied().max().unwrap_or(0) != maxes[0]
        || row_deg.iter().copied().max().unwrap_or(0) != maxes[1]
    {
        return Err(Error::Alist {
            line: max_line,
            msg: "maximum degrees disagree with the degree lists".into(),
        });
    }
    let edges: usize = col_deg.iter().sum();
    if edges != row_deg.iter().sum::<usize>() {
        return Err(Error::Alist {
            line: row_line,
            msg: format!(
                "column degrees sum to {edges} but row degrees sum to {}",
                row_deg.iter().sum::<usize>()
            ),
        });
    }

    let mut cols = Vec::with_capacity(n);
    for (i, &d) in col_deg.iter().enumerate() {
        let (line, entries) = lines.expect_len(&format!("adjacency of column {}", i + 1), d)?;
        cols.push(one_based(line, entries, m)?);
    }
    let mut rows = Vec::with_capacity(m);
    for (j, &d) in row_deg.iter().enumerate() {
        let (line, entries) = lines.expect_len(&format!("adjacency of row {}", j + 1), d)?;
        rows.push((line, one_based(line, entries, n)?));
    }

    let row_lines: Vec<usize> = rows.iter().map(|(l, _)| *l).collect();
    let h = SparseParityCheck::from_rows(n, rows.into_iter().map(|(_, r)| r).collect()).map_err(
        |e| Error::Alist {
            line: row_lines.first().copied().unwrap_or(row_line),
            msg: e.to_string(),
        },
    )?;

    for (i, mut col) in cols.into_iter().enumerate() {
        col.sort_unstable();
        if h.col(i) != col.as_slice() {
            // Point at the first row line that disagrees with this column.
            let line = h
                .col(i)
                .iter()
                .chain(col.iter())
                .find(|j| h.col(i).contains(j) != col.contains(j))
                .map(|&j| row_lines[j])
                .unwrap_or(row_line);
            return Err(Error::Alist {
                line,
                msg: format!("column {} adjacency disagrees with the row lists", i + 1),
            });
        }
    }
    Ok(h)
}

fn one_based(line: usize, entries: Vec<usize>, bound: usize) -> Result<Vec<usize>> {
    entries
        .into_iter()
        .map(|x| {
            if x == 0 || x > bound {
                Err(Error::Alist {
                    line,
                    msg: format!("index {x} out of range 1..={bound}"),
                })
            } else {
                Ok(x - 1)
            }
        })
        .collect()
}

pub fn write_alist_file(h: &SparseParityCheck, path: &Path) -> Result<()> {
    std::fs::write(path, export_alist(h)).map_err(|e| Error::io(path, e))
}

pub fn read_alist_file(path: &Path) -> Result<SparseParityCheck> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    import_alist(&text)
}
