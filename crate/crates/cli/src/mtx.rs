//! MatrixMarket text format: `coordinate` and `array` layouts with `real` or
//! `integer` fields and `general`, `symmetric` or `skew-symmetric` storage.

use std::fmt::Write as _;

use spstiefel::DenseMatrix;
use thiserror::Error;

type Mat = DenseMatrix<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum MtxError {
    #[error("malformed banner: {0}")]
    Banner(String),
    #[error("unsupported MatrixMarket format: {0}")]
    Unsupported(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: index ({row}, {col}) outside {rows}x{cols}")]
    OutOfRange {
        line: usize,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("expected {expected} entries, found {found}")]
    Count { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub layout: Layout,
    pub integer: bool,
    pub symmetry: Symmetry,
}

fn parse_banner(line: &str) -> Result<Header, MtxError> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" {
        return Err(MtxError::Banner(line.to_string()));
    }
    if words[1] != "matrix" {
        return Err(MtxError::Unsupported(format!("object {:?}", words[1])));
    }
    let layout = match words[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(MtxError::Unsupported(format!("format {other:?}"))),
    };
    let integer = match words[3].as_str() {
        "real" | "double" => false,
        "integer" => true,
        other => return Err(MtxError::Unsupported(format!("field {other:?}"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(MtxError::Unsupported(format!("symmetry {other:?}"))),
    };
    Ok(Header {
        layout,
        integer,
        symmetry,
    })
}

fn syntax(line: usize, msg: impl Into<String>) -> MtxError {
    MtxError::Syntax { line, msg: msg.into() }
}

fn parse_index(tok: Option<&str>, line: usize) -> Result<usize, MtxError> {
    let tok = tok.ok_or_else(|| syntax(line, "missing index"))?;
    tok.parse().map_err(|_| syntax(line, format!("bad index {tok:?}")))
}

fn parse_value(tok: Option<&str>, integer: bool, line: usize) -> Result<f64, MtxError> {
    let tok = tok.ok_or_else(|| syntax(line, "missing value"))?;
    if integer {
        let v: i64 = tok.parse().map_err(|_| syntax(line, format!("bad integer {tok:?}")))?;
        Ok(v as f64)
    } else {
        tok.parse().map_err(|_| syntax(line, format!("bad real {tok:?}")))
    }
}

/// Stores `v` at `(i, j)` and its mirror according to the storage symmetry.
fn place(a: &mut Mat, sym: Symmetry, i: usize, j: usize, v: f64, line: usize) -> Result<(), MtxError> {
    match sym {
        Symmetry::General => a[(i, j)] = v,
        Symmetry::Symmetric => {
            if i < j {
                return Err(syntax(line, "symmetric storage holds the lower triangle only"));
            }
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        Symmetry::SkewSymmetric => {
            if i <= j {
                return Err(syntax(line, "skew-symmetric storage holds the strict lower triangle only"));
            }
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    }
    Ok(())
}

pub fn parse_matrix_market(text: &str) -> Result<Mat, MtxError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| MtxError::Banner(String::new()))?;
    let header = parse_banner(banner)?;
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = body.next().ok_or_else(|| syntax(1, "missing size line"))?;
    let mut toks = size.split_whitespace();
    let rows = parse_index(toks.next(), size_line)?;
    let cols = parse_index(toks.next(), size_line)?;
    if header.symmetry != Symmetry::General && rows != cols {
        return Err(syntax(size_line, "symmetric storage requires a square matrix"));
    }
    let mut a = Mat::zeros(rows, cols);

    match header.layout {
        Layout::Coordinate => {
            let nnz = parse_index(toks.next(), size_line)?;
            let mut found = 0;
            for (line, l) in body {
                let mut t = l.split_whitespace();
                let i = parse_index(t.next(), line)?;
                let j = parse_index(t.next(), line)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(MtxError::OutOfRange {
                        line,
                        row: i,
                        col: j,
                        rows,
                        cols,
                    });
                }
                let v = parse_value(t.next(), header.integer, line)?;
                place(&mut a, header.symmetry, i - 1, j - 1, v, line)?;
                found += 1;
            }
            if found != nnz {
                return Err(MtxError::Count { expected: nnz, found });
            }
        }
        Layout::Array => {
            // Column-major; symmetric layouts list the (strict) lower triangle.
            let slots: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| (0..rows).map(move |i| (i, j)))
                .filter(|&(i, j)| match header.symmetry {
                    Symmetry::General => true,
                    Symmetry::Symmetric => i >= j,
                    Symmetry::SkewSymmetric => i > j,
                })
                .collect();
            let mut found = 0;
            for (line, l) in body {
                for tok in l.split_whitespace() {
                    let v = parse_value(Some(tok), header.integer, line)?;
                    if let Some(&(i, j)) = slots.get(found) {
                        place(&mut a, header.symmetry, i, j, v, line)?;
                    }
                    found += 1;
                }
            }
            if found != slots.len() {
                return Err(MtxError::Count {
                    expected: slots.len(),
                    found,
                });
            }
        }
    }
    Ok(a)
}

/// `array real general` text with 17 significant digits per entry.
pub fn write_matrix_market(a: &Mat) -> String {
    let mut s = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} {}", a.rows(), a.cols());
    for &v in a.as_slice() {
        let _ = writeln!(s, "{v:.16e}");
    }
    s
}
