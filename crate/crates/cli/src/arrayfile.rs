//! Plain-text array files.
//!
//! ```text
//! CA N k t v
//! s s s ... s      (N lines of k decimal symbols)
//! # optional comment lines
//! ```

use std::fmt::Write as _;

use ca_forge::Array;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayFile {
    pub t: usize,
    pub array: Array,
}

impl ArrayFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let err = |line: usize, message: String| ParseError { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let fields: Vec<&str> = header.split_ascii_whitespace().collect();
        if fields.len() != 5 || fields[0] != "CA" {
            return Err(err(hline, format!("expected header \"CA N k t v\", found {header:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(hline, format!("{s:?} is not a number")));
        let (n, k, t, v) = (num(fields[1])?, num(fields[2])?, num(fields[3])?, num(fields[4])?);
        if !(2..=256).contains(&v) || t < 1 || t > k {
            return Err(err(hline, format!("bad parameters k={k} t={t} v={v}")));
        }

        let mut rows = Vec::with_capacity(n.min(1 << 20));
        for (lno, line) in lines {
            if rows.len() == n {
                return Err(err(lno, format!("more than {n} rows")));
            }
            let mut row = Vec::with_capacity(k);
            for tok in line.split_ascii_whitespace() {
                let s: usize = tok.parse().map_err(|_| err(lno, format!("{tok:?} is not a symbol")))?;
                if s >= v {
                    return Err(err(lno, format!("symbol {s} is not below v = {v}")));
                }
                row.push(s as u8);
            }
            if row.len() != k {
                return Err(err(lno, format!("{} symbols, expected {k}", row.len())));
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(err(hline, format!("header promises {n} rows, found {}", rows.len())));
        }
        let array = Array::from_rows(k, v, &rows).map_err(|e| err(hline, e.to_string()))?;
        Ok(ArrayFile { t, array })
    }

    pub fn to_text(&self) -> String {
        let a = &self.array;
        let mut out = String::with_capacity(a.rows() * a.cols() * 3 + 32);
        writeln!(out, "CA {} {} {} {}", a.rows(), a.cols(), self.t, a.levels()).unwrap();
        let mut row = Vec::with_capacity(a.cols());
        for r in 0..a.rows() {
            row.clear();
            row.extend((0..a.cols()).map(|c| a.get(r, c)));
            for (i, s) in row.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{s}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}
