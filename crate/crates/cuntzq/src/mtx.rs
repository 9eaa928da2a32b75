//! Matrix Market `coordinate complex general` files, 1-based indices.

use std::io::{self, Write};

use cuntzq_core::{CoeffMatrix, Complex64};

use crate::parse::ParseError;

const HEADER: &str = "%%MatrixMarket matrix coordinate complex general";

/// A coordinate matrix with 0-based indices.
#[derive(Clone, Debug, PartialEq)]
pub struct MtxMatrix {
    pub rows: u64,
    pub cols: u64,
    pub entries: Vec<(u64, u64, Complex64)>,
    pub comments: Vec<String>,
}

impl MtxMatrix {
    /// Orthonormal-frame entries of a coefficient matrix.
    pub fn from_coeff(c: &CoeffMatrix, comments: Vec<String>) -> Self {
        let mut entries: Vec<(u64, u64, Complex64)> =
            c.iter().map(|(i, j, _)| (i as u64, j as u64, c.entry(i, j))).collect();
        entries.sort_by_key(|&(i, j, _)| (j, i));
        MtxMatrix {
            rows: c.size() as u64,
            cols: c.size() as u64,
            entries,
            comments,
        }
    }

    pub fn get(&self, i: u64, j: u64) -> Complex64 {
        self.entries
            .iter()
            .filter(|(a, b, _)| *a == i && *b == j)
            .map(|(_, _, v)| *v)
            .sum()
    }
}

fn clean(x: f64) -> f64 {
    // no negative zeros in the output
    x + 0.0
}

pub fn write<W: Write>(out: &mut W, m: &MtxMatrix) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for c in &m.comments {
        writeln!(out, "% {c}")?;
    }
    writeln!(out, "{} {} {}", m.rows, m.cols, m.entries.len())?;
    for (i, j, v) in &m.entries {
        writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, clean(v.re), clean(v.im))?;
    }
    Ok(())
}

pub fn to_string(m: &MtxMatrix) -> String {
    let mut buf = Vec::new();
    write(&mut buf, m).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn fail<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        column,
        message: message.into(),
    })
}

/// Splits a line into whitespace-separated fields with their 1-based columns.
fn fields(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Reads `coordinate complex general` or `coordinate real general`.
pub fn read(text: &str) -> Result<MtxMatrix, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let Some((_, header)) = lines.next() else {
        return fail(1, 1, "empty file");
    };
    let head = fields(header);
    let words: Vec<String> = head.iter().map(|(_, w)| w.to_ascii_lowercase()).collect();
    if words.first().map(String::as_str) != Some("%%matrixmarket") {
        return fail(1, 1, "first line must start with %%MatrixMarket");
    }
    let expect = ["matrix", "coordinate"];
    for (k, want) in expect.iter().enumerate() {
        if words.get(k + 1).map(String::as_str) != Some(*want) {
            let col = head.get(k + 1).map_or(header.len() + 1, |f| f.0);
            return fail(1, col, format!("expected '{want}'"));
        }
    }
    let complex = match words.get(3).map(String::as_str) {
        Some("complex") => true,
        Some("real") => false,
        _ => return fail(1, head.get(3).map_or(header.len() + 1, |f| f.0), "expected 'complex' or 'real'"),
    };
    if words.get(4).map(String::as_str) != Some("general") {
        return fail(1, head.get(4).map_or(header.len() + 1, |f| f.0), "only 'general' symmetry is supported");
    }

    let mut comments = Vec::new();
    let mut size: Option<(u64, u64, usize)> = None;
    let mut entries = Vec::new();
    let mut last_line = 1;
    for (ln, line) in lines {
        last_line = ln;
        let trimmed = line.trim_start();
        if trimmed.starts_with('%') {
            if size.is_none() {
                comments.push(trimmed.trim_start_matches('%').trim().to_string());
            }
            continue;
        }
        let f = fields(line);
        if f.is_empty() {
            continue;
        }
        let int = |k: usize| -> Result<u64, ParseError> {
            let (col, w) = f[k];
            w.parse().map_err(|_| ParseError {
                line: ln,
                column: col,
                message: format!("expected a non-negative integer, found '{w}'"),
            })
        };
        let real = |k: usize| -> Result<f64, ParseError> {
            let (col, w) = f[k];
            w.parse().map_err(|_| ParseError {
                line: ln,
                column: col,
                message: format!("expected a number, found '{w}'"),
            })
        };
        match size {
            None => {
                if f.len() != 3 {
                    return fail(ln, f[0].0, "size line needs rows, columns and entry count");
                }
                size = Some((int(0)?, int(1)?, int(2)? as usize));
            }
            Some((rows, cols, _)) => {
                let want = if complex { 4 } else { 3 };
                if f.len() != want {
                    return fail(ln, f[0].0, format!("entry line needs {want} fields"));
                }
                let (i, j) = (int(0)?, int(1)?);
                if i == 0 || i > rows {
                    return fail(ln, f[0].0, format!("row index {i} outside 1..={rows}"));
                }
                if j == 0 || j > cols {
                    return fail(ln, f[1].0, format!("column index {j} outside 1..={cols}"));
                }
                let im = if complex { real(3)? } else { 0.0 };
                entries.push((i - 1, j - 1, Complex64::new(real(2)?, im)));
            }
        }
    }
    let Some((rows, cols, nnz)) = size else {
        return fail(last_line + 1, 1, "missing size line");
    };
    if entries.len() != nnz {
        return fail(last_line + 1, 1, format!("expected {nnz} entries, found {}", entries.len()));
    }
    Ok(MtxMatrix {
        rows,
        cols,
        entries,
        comments,
    })
}
