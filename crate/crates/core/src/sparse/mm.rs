//! Matrix Market coordinate format.
//!
//! Reads `real`, `integer` and `pattern` fields with `general`, `symmetric`
//! or `skew-symmetric` symmetry; symmetric files are mirrored on read.
//! Writing always produces `real general` with round-trip exact values.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{CooBuilder, CsrMatrix, SparseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CooBuilder, SparseError> {
    let path = path.as_ref();
    let io = |source| SparseError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io)?;
    read_from(BufReader::new(file), path)
}

fn read_from<R: BufRead>(reader: R, path: &Path) -> Result<CooBuilder, SparseError> {
    let fail = |line: usize, msg: String| SparseError::MatrixMarket {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| fail(1, "empty file".into()))?;
    let header = header.map_err(|e| fail(1, e.to_string()))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(fail(1, format!("bad header '{header}'")));
    }
    if tokens[2] != "coordinate" {
        return Err(fail(1, format!("unsupported layout '{}'", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(fail(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(fail(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut builder = CooBuilder::new(0, 0);
    let mut seen = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| fail(lineno, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        let Some((n_rows, n_cols, _)) = size else {
            if parts.len() != 3 {
                return Err(fail(lineno, "size line needs 'rows cols nnz'".into()));
            }
            let p = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| fail(lineno, format!("bad size value '{s}'")))
            };
            let dims = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
            builder = CooBuilder::with_capacity(dims.0, dims.1, dims.2 * 2);
            size = Some(dims);
            continue;
        };
        let want = if field == Field::Pattern { 2 } else { 3 };
        if parts.len() != want {
            return Err(fail(lineno, format!("expected {want} fields, found {}", parts.len())));
        }
        let idx1 = |s: &str, bound: usize| -> Result<usize, SparseError> {
            let v = s
                .parse::<usize>()
                .map_err(|_| fail(lineno, format!("bad index '{s}'")))?;
            if v == 0 || v > bound {
                return Err(fail(lineno, format!("index {v} outside 1..={bound}")));
            }
            Ok(v - 1)
        };
        let i = idx1(parts[0], n_rows)?;
        let j = idx1(parts[1], n_cols)?;
        let v = match field {
            Field::Pattern => 1.0,
            Field::Integer => parts[2]
                .parse::<i64>()
                .map_err(|_| fail(lineno, format!("bad integer '{}'", parts[2])))? as f64,
            Field::Real => parts[2]
                .parse::<f64>()
                .map_err(|_| fail(lineno, format!("bad value '{}'", parts[2])))?,
        };
        builder.push(i, j, v);
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => builder.push(j, i, v),
                Symmetry::SkewSymmetric => builder.push(j, i, -v),
            }
        }
        seen += 1;
    }
    match size {
        None => Err(fail(0, "missing size line".into())),
        Some((_, _, nnz)) if nnz != seen => Err(fail(0, format!("header announces {nnz} entries, found {seen}"))),
        Some(_) => Ok(builder),
    }
}

pub fn write_matrix_market(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<(), SparseError> {
    let path = path.as_ref();
    let io = |source| SparseError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    write_to(a, &mut w).map_err(io)?;
    w.flush().map_err(io)
}

fn write_to<W: Write>(a: &CsrMatrix, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for i in 0..a.n_rows() {
        for (j, v) in a.row(i) {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}
