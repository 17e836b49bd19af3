//! Matrix Market exchange format, dense complex matrices only.
//!
//! Reads `array` and `coordinate` files with `real`, `integer` or `complex`
//! fields and `general`, `symmetric`, `skew-symmetric` or `hermitian`
//! storage; symmetric storage is expanded on read. `pattern` files carry no
//! values and are rejected.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{DecayError, Result};
use crate::linalg::{cplx, CMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

fn parse_err(line: usize, message: impl Into<String>) -> DecayError {
    DecayError::Parse { line, message: message.into() }
}

fn parse_header(line: &str) -> Result<(Layout, Field, Symmetry)> {
    let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_err(1, "header must start with %%MatrixMarket"));
    }
    if tokens.len() != 5 {
        return Err(parse_err(1, "header must read: %%MatrixMarket matrix <format> <field> <symmetry>"));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(1, format!("unsupported object '{}'", tokens[1])));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(parse_err(1, format!("unknown format '{other}'"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => return Err(parse_err(1, "pattern matrices carry no values and are not supported")),
        other => return Err(parse_err(1, format!("unknown field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(1, format!("unknown symmetry '{other}'"))),
    };
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(parse_err(1, "hermitian storage requires the complex field"));
    }
    Ok((layout, field, symmetry))
}

fn parse_usize(token: &str, line: usize, what: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("invalid {what} '{token}'")))
}

fn parse_value(tokens: &[&str], field: Field, line: usize) -> Result<num_complex::Complex64> {
    let expected = if field == Field::Complex { 2 } else { 1 };
    if tokens.len() != expected {
        return Err(parse_err(line, format!("expected {expected} value token(s), found {}", tokens.len())));
    }
    let num = |t: &str| -> Result<f64> {
        let v = match field {
            Field::Integer => t.parse::<i64>().map(|v| v as f64).map_err(|_| ()),
            _ => t.parse::<f64>().map_err(|_| ()),
        }
        .map_err(|_| parse_err(line, format!("invalid number '{t}'")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(parse_err(line, format!("non-finite value '{t}'")))
        }
    };
    Ok(match field {
        Field::Complex => cplx(num(tokens[0])?, num(tokens[1])?),
        _ => cplx(num(tokens[0])?, 0.0),
    })
}

/// Places a stored entry and its mirror image.
fn store(m: &mut CMat, i: usize, j: usize, v: num_complex::Complex64, symmetry: Symmetry) {
    m[(i, j)] += v;
    if i != j {
        match symmetry {
            Symmetry::General => {}
            Symmetry::Symmetric => m[(j, i)] += v,
            Symmetry::SkewSymmetric => m[(j, i)] -= v,
            Symmetry::Hermitian => m[(j, i)] += v.conj(),
        }
    }
}

/// Parses a Matrix Market stream into a dense complex matrix.
pub fn parse_matrix_market(reader: impl BufRead) -> Result<CMat> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let (layout, field, symmetry) = parse_header(&header?)?;

    // data lines: skip comments and blank lines
    let mut data = lines.filter_map(|(no, l)| match l {
        Ok(text) => {
            let trimmed = text.trim().to_string();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                None
            } else {
                Some(Ok((no, trimmed)))
            }
        }
        Err(e) => Some(Err(DecayError::from(e))),
    });

    let (size_line, size) = data.next().ok_or_else(|| parse_err(1, "missing size line"))??;
    let size_tokens: Vec<&str> = size.split_whitespace().collect();
    let expected_tokens = if layout == Layout::Coordinate { 3 } else { 2 };
    if size_tokens.len() != expected_tokens {
        return Err(parse_err(size_line, format!("size line needs {expected_tokens} integers")));
    }
    let rows = parse_usize(size_tokens[0], size_line, "row count")?;
    let cols = parse_usize(size_tokens[1], size_line, "column count")?;
    if symmetry != Symmetry::General && rows != cols {
        return Err(parse_err(size_line, "symmetric storage requires a square matrix"));
    }
    let mut m = CMat::zeros(rows, cols);

    match layout {
        Layout::Array => {
            // column-major; symmetric kinds store the lower triangle,
            // skew-symmetric the strictly lower triangle
            let positions: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| (0..rows).map(move |i| (i, j)))
                .filter(|&(i, j)| match symmetry {
                    Symmetry::General => true,
                    Symmetry::Symmetric | Symmetry::Hermitian => i >= j,
                    Symmetry::SkewSymmetric => i > j,
                })
                .collect();
            for &(i, j) in &positions {
                let (no, text) = data
                    .next()
                    .ok_or_else(|| parse_err(size_line, format!("expected {} entries", positions.len())))??;
                let tokens: Vec<&str> = text.split_whitespace().collect();
                let v = parse_value(&tokens, field, no)?;
                if symmetry == Symmetry::Hermitian && i == j && v.im != 0.0 {
                    return Err(parse_err(no, "hermitian diagonal entries must be real"));
                }
                store(&mut m, i, j, v, symmetry);
            }
        }
        Layout::Coordinate => {
            let nnz = parse_usize(size_tokens[2], size_line, "entry count")?;
            for _ in 0..nnz {
                let (no, text) = data
                    .next()
                    .ok_or_else(|| parse_err(size_line, format!("expected {nnz} entries")))??;
                let tokens: Vec<&str> = text.split_whitespace().collect();
                if tokens.len() < 2 {
                    return Err(parse_err(no, "entry needs row and column indices"));
                }
                let i = parse_usize(tokens[0], no, "row index")?;
                let j = parse_usize(tokens[1], no, "column index")?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(no, format!("index ({i}, {j}) outside {rows}x{cols}")));
                }
                let (i, j) = (i - 1, j - 1);
                match symmetry {
                    Symmetry::General => {}
                    Symmetry::SkewSymmetric if i <= j => {
                        return Err(parse_err(no, "skew-symmetric storage holds strictly lower entries only"));
                    }
                    _ if i < j => return Err(parse_err(no, "symmetric storage holds lower-triangle entries only")),
                    _ => {}
                }
                let v = parse_value(&tokens[2..], field, no)?;
                if symmetry == Symmetry::Hermitian && i == j && v.im != 0.0 {
                    return Err(parse_err(no, "hermitian diagonal entries must be real"));
                }
                store(&mut m, i, j, v, symmetry);
            }
        }
    }
    if let Some(extra) = data.next() {
        let (no, _) = extra?;
        return Err(parse_err(no, "unexpected data after the last entry"));
    }
    Ok(m)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<CMat> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| DecayError::Io(format!("{}: {e}", path.display())))?;
    parse_matrix_market(BufReader::new(file))
}

/// Writes `array complex general` with shortest round-trip floats.
pub fn write_matrix_market(m: &CMat, mut out: impl Write) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix array complex general")?;
    writeln!(out, "{} {}", m.nrows(), m.ncols())?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            writeln!(out, "{:?} {:?}", z.re, z.im)?;
        }
    }
    Ok(())
}

pub fn save_matrix(m: &CMat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| DecayError::Io(format!("{}: {e}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    write_matrix_market(m, &mut out)?;
    out.flush()?;
    Ok(())
}
