//! Dense row-major matrix carrier with an on-demand compressed-sparse view
//! and the coordinate text format used by the CLI.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use crate::error::Error;
use crate::Result;

/// Compressed sparse row companion view: `(row_ptr, col_idx, values)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub rows: usize,
    pub cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for i in 0..self.rows {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    /// `y = A^T x`.
    pub fn matvec_transpose(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        y.fill(0.0);
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.col_idx[k]] += self.values[k] * xi;
            }
        }
    }

    /// Number of structurally empty rows.
    pub fn zero_row_count(&self) -> usize {
        (0..self.rows).filter(|&i| self.row_ptr[i] == self.row_ptr[i + 1]).count()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Column Euclidean norms.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols];
        for (k, &v) in self.values.iter().enumerate() {
            sq[self.col_idx[k]] += v * v;
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Row Euclidean norms.
    pub fn row_norms(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.values[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// Dense row-major real matrix.
///
/// The compressed-sparse companion is built lazily by [`Matrix::csr`] and
/// reproduces exactly the nonzero pattern and values of the dense data.
#[derive(Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    sparse_view: OnceLock<CsrMatrix>,
}

impl Clone for Matrix {
    fn clone(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
            sparse_view: OnceLock::new(),
        }
    }
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols], sparse_view: OnceLock::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.into_iter().flatten().collect();
        Matrix { rows: r, cols: c, data, sparse_view: OnceLock::new() }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data, sparse_view: OnceLock::new() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0.0).count()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            y[i] = acc;
        }
    }

    /// `y = A^T x`.
    pub fn matvec_transpose(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        y.fill(0.0);
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a * xi;
            }
        }
    }

    /// The compressed-sparse companion view, built on first use.
    pub fn csr(&self) -> &CsrMatrix {
        self.sparse_view.get_or_init(|| {
            let mut row_ptr = Vec::with_capacity(self.rows + 1);
            let mut col_idx = Vec::new();
            let mut values = Vec::new();
            row_ptr.push(0);
            for i in 0..self.rows {
                for (j, &v) in self.row(i).iter().enumerate() {
                    if v != 0.0 {
                        col_idx.push(j);
                        values.push(v);
                    }
                }
                row_ptr.push(values.len());
            }
            CsrMatrix { rows: self.rows, cols: self.cols, row_ptr, col_idx, values }
        })
    }

    /// Serializes in the coordinate text format:
    /// a `%%`-prefixed header line, a `rows cols nnz` line, then one
    /// 1-based `i j value` triple per nonzero with 17 significant digits.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> Result<()> {
        let csr = self.csr();
        let mut buf = String::new();
        buf.push_str("%%MatrixMarket-compatible coordinate real general\n");
        writeln!(buf, "{} {} {}", self.rows, self.cols, csr.nnz()).unwrap();
        for i in 0..self.rows {
            for k in csr.row_ptr[i]..csr.row_ptr[i + 1] {
                writeln!(buf, "{} {} {:.16e}", i + 1, csr.col_idx[k] + 1, csr.values[k]).unwrap();
            }
        }
        w.write_all(buf.as_bytes())?;
        Ok(())
    }

    pub fn write_coordinate_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_coordinate(std::io::BufWriter::new(file))
    }

    /// Parses the coordinate text format. Accepts arbitrary whitespace
    /// between tokens and `%`-prefixed comment lines before the size line.
    pub fn read_coordinate<R: Read>(r: R) -> Result<Matrix> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines().enumerate();

        let (size_line_no, size_line) = loop {
            match lines.next() {
                Some((idx, line)) => {
                    let line = line.map_err(Error::Io)?;
                    let trimmed = line.trim();
                    if trimmed.is_empty() || trimmed.starts_with('%') {
                        continue;
                    }
                    break (idx + 1, line);
                }
                None => {
                    return Err(Error::Parse { line: 1, msg: "empty matrix file".into() });
                }
            }
        };

        let dims: Vec<&str> = size_line.split_whitespace().collect();
        if dims.len() != 3 {
            return Err(Error::Parse {
                line: size_line_no,
                msg: format!("expected 'rows cols nnz', got {dims:?}"),
            });
        }
        let parse_dim = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line: size_line_no,
                msg: format!("bad dimension '{s}'"),
            })
        };
        let rows = parse_dim(dims[0])?;
        let cols = parse_dim(dims[1])?;
        let nnz = parse_dim(dims[2])?;

        let mut m = Matrix::zeros(rows, cols);
        let mut seen = 0usize;
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.map_err(Error::Io)?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                continue;
            }
            let toks: Vec<&str> = trimmed.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 'i j value', got '{trimmed}'"),
                });
            }
            let i: usize = toks[0].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad row index '{}'", toks[0]),
            })?;
            let j: usize = toks[1].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad column index '{}'", toks[1]),
            })?;
            let v: f64 = toks[2].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad value '{}'", toks[2]),
            })?;
            if i == 0 || i > rows || j == 0 || j > cols {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("index ({i}, {j}) outside {rows}x{cols}"),
                });
            }
            m[(i - 1, j - 1)] = v;
            seen += 1;
        }
        if seen != nnz {
            return Err(Error::Parse {
                line: size_line_no,
                msg: format!("header declares {nnz} entries, file has {seen}"),
            });
        }
        Ok(m)
    }

    pub fn read_coordinate_file(path: &Path) -> Result<Matrix> {
        let file = std::fs::File::open(path)?;
        Matrix::read_coordinate(file)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(self.sparse_view.get().is_none(), "mutating a matrix with a live CSR view");
        &mut self.data[i * self.cols + j]
    }
}
