//! Dense matrices of arbitrary-precision integers and the plain-text
//! matrix format shared by every tool in the crate.
//!
//! The text format is: a header line `m n`, followed by `m` lines of `n`
//! whitespace-separated decimal integers. Everything after a `#` on a line
//! is a comment; blank lines are ignored.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Builds a `Vec<BigInt>` from machine integers.
pub fn int_vec(values: &[i64]) -> Vec<BigInt> {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::EntryCount {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(IntegerMatrix { rows, cols, data })
    }

    /// Convenience constructor from machine-integer rows. Panics on ragged or
    /// empty input; intended for literals in tests and examples.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        assert!(
            rows.iter().all(|r| r.as_ref().len() == cols),
            "ragged matrix literal"
        );
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().map(|&v| BigInt::from(v)))
            .collect();
        IntegerMatrix::new(rows.len(), cols, data).expect("empty matrix literal")
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let mut data = vec![BigInt::zero(); rows * columns.len()];
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for (i, v) in col.iter().enumerate() {
                data[i * columns.len() + j] = v.clone();
            }
        }
        IntegerMatrix::new(rows, columns.len(), data)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<Self> {
        let cols: Vec<Vec<BigInt>> = idx.iter().map(|&j| self.column(j)).collect();
        IntegerMatrix::from_columns(self.rows, &cols)
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntegerMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `A Aᵀ`.
    pub fn gram(&self) -> Self {
        self.mul(&self.transpose())
            .expect("A·Aᵀ dimensions always agree")
    }

    /// Scales every entry by `k`.
    pub fn scaled(&self, k: &BigInt) -> Self {
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    /// Serializes into the shared text format.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the shared text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header line `m n`".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header must be `m n`, found `{header}`"),
            });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: hline,
                msg: format!("bad dimension `{s}`: {e}"),
            })
        };
        let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        if rows == 0 || cols == 0 {
            return Err(Error::Parse {
                line: hline,
                msg: "dimensions must be positive".into(),
            });
        }

        let mut data = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for (lno, line) in lines {
            if seen == rows {
                return Err(Error::Parse {
                    line: lno,
                    msg: format!("unexpected extra row (header declares {rows})"),
                });
            }
            let before = data.len();
            for tok in line.split_whitespace() {
                let v = BigInt::from_str(tok).map_err(|_| Error::Parse {
                    line: lno,
                    msg: format!("not an integer: `{tok}`"),
                })?;
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(Error::Parse {
                    line: lno,
                    msg: format!("expected {cols} entries, found {}", data.len() - before),
                });
            }
            seen += 1;
        }
        if seen != rows {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                msg: format!("expected {rows} rows, found {seen}"),
            });
        }
        IntegerMatrix::new(rows, cols, data)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.to_string()).collect())
            .collect();
        write!(f, "IntegerMatrix{rows:?}")
    }
}

impl FromStr for IntegerMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IntegerMatrix::parse(s)
    }
}

/// Parses a comma- or whitespace-separated integer vector such as `5,-2`.
pub fn parse_vector(s: &str) -> Result<Vec<BigInt>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            BigInt::from_str(t).map_err(|_| Error::Parse {
                line: 1,
                msg: format!("not an integer: `{t}`"),
            })
        })
        .collect()
}

pub fn format_vector(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_with_comments_and_blank_lines() {
        let text = "# stacked\n2 4\n\n1 0 0 0  # first\n0 3 2 -6\n";
        let m = IntegerMatrix::parse(text).unwrap();
        assert_eq!(m, IntegerMatrix::from_rows(&[[1, 0, 0, 0], [0, 3, 2, -6]]));
        assert_eq!(m.to_text(), "2 4\n1 0 0 0\n0 3 2 -6\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match IntegerMatrix::parse("2 2\n1 2\n3 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match IntegerMatrix::parse("2 2\n1 2 3\n3 4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(IntegerMatrix::parse("2 2\n1 2\n").is_err());
        assert!(IntegerMatrix::parse("").is_err());
        assert!(IntegerMatrix::parse("0 3\n").is_err());
    }

    #[test]
    fn gram_and_products() {
        let a = IntegerMatrix::from_rows(&[[1, 0, 0, 0], [0, 3, 2, -6]]);
        assert_eq!(a.gram(), IntegerMatrix::from_rows(&[[1, 0], [0, 49]]));
        assert_eq!(a.mul_vec(&int_vec(&[5, 4, 0, 0])).unwrap(), int_vec(&[5, 12]));
        assert!(a.mul_vec(&int_vec(&[1])).is_err());
    }

    #[test]
    fn vector_parsing() {
        assert_eq!(parse_vector("5,-2").unwrap(), int_vec(&[5, -2]));
        assert_eq!(parse_vector(" -5 ").unwrap(), int_vec(&[-5]));
        assert!(parse_vector("1,a").is_err());
    }
}
