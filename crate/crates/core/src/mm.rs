//! Matrix Market text I/O: coordinate and array variants, real field,
//! general or symmetric symmetry. Values are written in scientific notation
//! with the shortest representation that parses back to the identical f64,
//! so a write-read round trip is bit-exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::csr::CsrMatrix;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmSymmetry {
    General,
    Symmetric,
}

fn parse_err(path: &Path, line: usize, detail: impl Into<String>) -> Error {
    Error::MatrixMarketParse {
        path: path.display().to_string(),
        line,
        detail: detail.into(),
    }
}

/// Reads a Matrix Market file into CSR form. Symmetric files are expanded to
/// full storage; duplicate coordinates are summed.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_from(BufReader::new(file), path)
}

fn read_from<R: BufRead>(reader: R, path: &Path) -> Result<CsrMatrix> {
    let mut lines = reader.lines().enumerate();

    let (header_no, header) = loop {
        match lines.next() {
            Some((no, line)) => {
                let line = line.map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                if !line.trim().is_empty() {
                    break (no + 1, line);
                }
            }
            None => return Err(parse_err(path, 0, "empty file")),
        }
    };

    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(
            path,
            header_no,
            format!("malformed header: {header:?}"),
        ));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => MmFormat::Coordinate,
        "array" => MmFormat::Array,
        other => return Err(parse_err(path, header_no, format!("unknown format {other:?}"))),
    };
    if tokens[3] != "real" {
        return Err(parse_err(
            path,
            header_no,
            format!("unsupported field {:?}: only \"real\" is handled", tokens[3]),
        ));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        other => {
            return Err(parse_err(
                path,
                header_no,
                format!("unsupported symmetry {other:?}: only general/symmetric are handled"),
            ))
        }
    };

    // Size line: first non-comment, non-blank line after the header.
    let (size_no, size_line) = loop {
        match lines.next() {
            Some((no, line)) => {
                let line = line.map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                break (no + 1, line);
            }
            None => return Err(parse_err(path, 0, "missing size line")),
        }
    };
    let sizes: Vec<&str> = size_line.split_whitespace().collect();

    let parse_usize = |s: &str, no: usize| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| parse_err(path, no, format!("invalid integer {s:?}")))
    };

    match format {
        MmFormat::Coordinate => {
            if sizes.len() != 3 {
                return Err(parse_err(path, size_no, "coordinate size line needs rows cols nnz"));
            }
            let rows = parse_usize(sizes[0], size_no)?;
            let cols = parse_usize(sizes[1], size_no)?;
            let nnz = parse_usize(sizes[2], size_no)?;
            if symmetry == MmSymmetry::Symmetric && rows != cols {
                return Err(parse_err(path, size_no, "symmetric matrix must be square"));
            }
            let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(nnz);
            let mut seen = 0usize;
            for (no, line) in lines {
                let line = line.map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                let parts: Vec<&str> = t.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(parse_err(path, no + 1, format!("expected \"i j value\", got {t:?}")));
                }
                let i = parse_usize(parts[0], no + 1)?;
                let j = parse_usize(parts[1], no + 1)?;
                if i < 1 || i > rows || j < 1 || j > cols {
                    return Err(parse_err(
                        path,
                        no + 1,
                        format!("index ({i}, {j}) outside declared {rows}x{cols}"),
                    ));
                }
                let v: f64 = parts[2]
                    .parse()
                    .map_err(|_| parse_err(path, no + 1, format!("invalid value {:?}", parts[2])))?;
                if !v.is_finite() {
                    return Err(parse_err(path, no + 1, format!("non-finite value {v}")));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetry == MmSymmetry::Symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(
                    path,
                    size_no,
                    format!("declared {nnz} entries but found {seen}"),
                ));
            }
            CsrMatrix::from_triplets(rows, cols, triplets)
        }
        MmFormat::Array => {
            if sizes.len() != 2 {
                return Err(parse_err(path, size_no, "array size line needs rows cols"));
            }
            let rows = parse_usize(sizes[0], size_no)?;
            let cols = parse_usize(sizes[1], size_no)?;
            if symmetry == MmSymmetry::Symmetric && rows != cols {
                return Err(parse_err(path, size_no, "symmetric matrix must be square"));
            }
            let expected = match symmetry {
                MmSymmetry::General => rows * cols,
                MmSymmetry::Symmetric => rows * (rows + 1) / 2,
            };
            let mut values = Vec::with_capacity(expected);
            for (no, line) in lines {
                let line = line.map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                for tok in t.split_whitespace() {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| parse_err(path, no + 1, format!("invalid value {tok:?}")))?;
                    if !v.is_finite() {
                        return Err(parse_err(path, no + 1, format!("non-finite value {v}")));
                    }
                    values.push(v);
                }
            }
            if values.len() != expected {
                return Err(parse_err(
                    path,
                    size_no,
                    format!("declared {expected} array values but found {}", values.len()),
                ));
            }
            let mut triplets = Vec::with_capacity(values.len());
            match symmetry {
                MmSymmetry::General => {
                    // Column-major order.
                    let mut it = values.into_iter();
                    for j in 0..cols {
                        for i in 0..rows {
                            triplets.push((i, j, it.next().unwrap()));
                        }
                    }
                }
                MmSymmetry::Symmetric => {
                    // Lower triangle, column-major.
                    let mut it = values.into_iter();
                    for j in 0..cols {
                        for i in j..rows {
                            let v = it.next().unwrap();
                            triplets.push((i, j, v));
                            if i != j {
                                triplets.push((j, i, v));
                            }
                        }
                    }
                }
            }
            CsrMatrix::from_triplets(rows, cols, triplets)
        }
    }
}

fn open_writer(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(BufWriter::new(file))
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes CSR storage as a general coordinate file.
pub fn write_coordinate(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = open_writer(path)?;
    writeln!(w, "%%MatrixMarket matrix coordinate real general").map_err(|e| io_err(path, e))?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz()).map_err(|e| io_err(path, e))?;
    for i in 0..m.rows() {
        for (j, v) in m.row_iter(i) {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v).map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes a dense matrix as a general array file (column-major values).
pub fn write_array(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = open_writer(path)?;
    writeln!(w, "%%MatrixMarket matrix array real general").map_err(|e| io_err(path, e))?;
    writeln!(w, "{} {}", m.rows(), m.cols()).map_err(|e| io_err(path, e))?;
    for v in m.as_vec() {
        writeln!(w, "{v:e}").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Reads a file and densifies it; convenience for right-hand sides.
pub fn read_dense(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    Ok(read_matrix_market(path)?.to_dense())
}
