//! Dense GF(2) vectors and matrices.
//!
//! GF(2) is the two-element field {0, 1}: addition is XOR, multiplication is
//! AND. This module provides the mod-2 linear algebra the rest of the crate
//! is built on — matrix-vector products, rank and inversion by Gauss–Jordan
//! elimination — plus the real-arithmetic expansion of a GF(2) sum that the
//! error-probability analysis relies on.
//!
//! Storage is dense and row-major with one byte per entry. Matrices here are
//! tiny ((N−1)×N for N users), so there is nothing to gain from bit packing.

use std::fmt;

/// Errors from GF(2) operations and the matrix text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    /// Operand shapes do not conform.
    DimensionMismatch { expected: String, got: String },
    /// An entry was not 0 or 1.
    NonBinary,
    /// Empty vector or matrix where at least one element is required.
    Empty,
    /// The matrix is square but singular over GF(2).
    NotInvertible,
    /// `xor_expansion` called with more than [`XOR_EXPANSION_MAX_TERMS`] terms.
    TooManyTerms { got: usize },
    /// Matrix text format violation.
    Parse(String),
}

impl fmt::Display for Gf2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gf2Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Gf2Error::NonBinary => write!(f, "entries must be 0 or 1"),
            Gf2Error::Empty => write!(f, "vector or matrix must have at least one element"),
            Gf2Error::NotInvertible => write!(f, "matrix is not invertible over GF(2)"),
            Gf2Error::TooManyTerms { got } => write!(
                f,
                "xor_expansion supports at most {XOR_EXPANSION_MAX_TERMS} terms, got {got}"
            ),
            Gf2Error::Parse(msg) => write!(f, "matrix text format: {msg}"),
        }
    }
}

impl std::error::Error for Gf2Error {}

/// Cost guard for [`xor_expansion`]: the subset sum enumerates 2^Q terms.
pub const XOR_EXPANSION_MAX_TERMS: usize = 32;

fn check_binary(bits: &[u8]) -> Result<(), Gf2Error> {
    if bits.iter().any(|&b| b > 1) {
        Err(Gf2Error::NonBinary)
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// BitVector
// ---------------------------------------------------------------------------

/// A column vector over GF(2). Every element is 0 or 1 and the length is ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    bits: Vec<u8>,
}

impl BitVector {
    /// Build from raw bits, validating that all entries are 0/1.
    pub fn new(bits: Vec<u8>) -> Result<Self, Gf2Error> {
        if bits.is_empty() {
            return Err(Gf2Error::Empty);
        }
        check_binary(&bits)?;
        Ok(Self { bits })
    }

    /// All-zeros vector.
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "BitVector length must be at least 1");
        Self { bits: vec![0; len] }
    }

    /// All-ones vector.
    pub fn ones(len: usize) -> Self {
        assert!(len >= 1, "BitVector length must be at least 1");
        Self { bits: vec![1; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length ≥ 1 by construction
    }

    pub fn get(&self, k: usize) -> u8 {
        self.bits[k]
    }

    pub fn set(&mut self, k: usize, value: u8) {
        assert!(value <= 1, "entries must be 0 or 1");
        self.bits[k] = value;
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// Component-wise XOR.
    pub fn xor(&self, other: &BitVector) -> Result<BitVector, Gf2Error> {
        if self.len() != other.len() {
            return Err(Gf2Error::DimensionMismatch {
                expected: format!("length {}", self.len()),
                got: format!("length {}", other.len()),
            });
        }
        Ok(BitVector {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }
}

/// Element-wise (Hadamard) product of two equal-length vectors.
pub fn elementwise_product(a: &BitVector, b: &BitVector) -> Result<BitVector, Gf2Error> {
    if a.len() != b.len() {
        return Err(Gf2Error::DimensionMismatch {
            expected: format!("length {}", a.len()),
            got: format!("length {}", b.len()),
        });
    }
    Ok(BitVector {
        bits: a.bits.iter().zip(&b.bits).map(|(x, y)| x & y).collect(),
    })
}

/// Real-arithmetic expansion of a GF(2) sum.
///
/// Evaluates Σ_q (−2)^{q−1} Σ_{|S|=q} Π_{j∈S} a_j over all nonempty subsets
/// S of the inputs, entirely in real arithmetic. The result always lands on
/// 0.0 or 1.0 and equals the XOR fold of the inputs; the function exists as
/// an independently checkable route to that value, not as a fast path.
///
/// Subsets containing a zero input contribute nothing, so only subsets of
/// the support are enumerated; cost is O(2^w) for w ones.
pub fn xor_expansion(bits: &[u8]) -> Result<f64, Gf2Error> {
    if bits.is_empty() {
        return Err(Gf2Error::Empty);
    }
    if bits.len() > XOR_EXPANSION_MAX_TERMS {
        return Err(Gf2Error::TooManyTerms { got: bits.len() });
    }
    check_binary(bits)?;
    let support = bits.iter().filter(|&&b| b == 1).count() as u32;
    let mut total = 0.0_f64;
    for mask in 1u64..(1u64 << support) {
        let q = mask.count_ones();
        // Every product over a subset of the support is 1.
        total += (-2.0_f64).powi(q as i32 - 1);
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// BitMatrix
// ---------------------------------------------------------------------------

/// A dense matrix over GF(2), row-major, one byte per entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl BitMatrix {
    /// Build from a row-major entry list.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<u8>) -> Result<Self, Gf2Error> {
        if rows == 0 || cols == 0 {
            return Err(Gf2Error::Empty);
        }
        if entries.len() != rows * cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                got: format!("{}", entries.len()),
            });
        }
        check_binary(&entries)?;
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Build from a slice of equal-length rows.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, Gf2Error> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Gf2Error::Empty);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch {
                expected: format!("{cols} columns in every row"),
                got: "ragged rows".to_string(),
            });
        }
        let entries = rows.iter().flatten().copied().collect();
        Self::from_entries(rows.len(), cols, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1);
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: u8) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        assert!(value <= 1, "entries must be 0 or 1");
        self.entries[r * self.cols + c] = value;
    }

    /// Row `r` as a slice.
    pub fn row(&self, r: usize) -> &[u8] {
        assert!(r < self.rows, "row index out of range");
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// Column `c` as a vector.
    pub fn column(&self, c: usize) -> BitVector {
        assert!(c < self.cols, "column index out of range");
        BitVector {
            bits: (0..self.rows).map(|r| self.get(r, c)).collect(),
        }
    }

    /// Copy of this matrix with column `c` deleted, column order preserved.
    pub fn delete_column(&self, c: usize) -> BitMatrix {
        assert!(c < self.cols, "column index out of range");
        assert!(self.cols >= 2, "cannot delete the only column");
        let mut entries = Vec::with_capacity(self.rows * (self.cols - 1));
        for r in 0..self.rows {
            for k in 0..self.cols {
                if k != c {
                    entries.push(self.get(r, k));
                }
            }
        }
        BitMatrix {
            rows: self.rows,
            cols: self.cols - 1,
            entries,
        }
    }

    /// Matrix-vector product mod 2: result[j] = XOR_k M[j,k]·v[k].
    pub fn mat_vec(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: format!("vector of length {}", self.cols),
                got: format!("length {}", v.len()),
            });
        }
        let bits = (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v.bits())
                    .fold(0u8, |acc, (m, x)| acc ^ (m & x))
            })
            .collect();
        Ok(BitVector { bits })
    }

    /// Matrix product mod 2.
    pub fn mat_mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                got: format!("{} rows", other.rows),
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0u8;
                for k in 0..self.cols {
                    acc ^= self.get(r, k) & other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Rank over GF(2) by Gaussian elimination. Pivot choice is the first
    /// nonzero entry in column order.
    pub fn rank(&self) -> usize {
        let mut work = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            let pivot = (rank..rows).find(|&r| work[r * cols + c] == 1);
            let Some(p) = pivot else { continue };
            work.swap_chunks(p, rank, cols);
            for r in 0..rows {
                if r != rank && work[r * cols + c] == 1 {
                    for k in 0..cols {
                        work[r * cols + k] ^= work[rank * cols + k];
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// Inverse over GF(2) by Gauss–Jordan elimination on [M | I].
    pub fn inverse(&self) -> Result<BitMatrix, Gf2Error> {
        if self.rows != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: "square matrix".to_string(),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        let n = self.rows;
        // Augmented [M | I], width 2n.
        let width = 2 * n;
        let mut aug = vec![0u8; n * width];
        for r in 0..n {
            aug[r * width..r * width + n].copy_from_slice(self.row(r));
            aug[r * width + n + r] = 1;
        }
        for c in 0..n {
            let pivot = (c..n).find(|&r| aug[r * width + c] == 1);
            let Some(p) = pivot else {
                return Err(Gf2Error::NotInvertible);
            };
            aug.swap_chunks(p, c, width);
            for r in 0..n {
                if r != c && aug[r * width + c] == 1 {
                    for k in 0..width {
                        aug[r * width + k] ^= aug[c * width + k];
                    }
                }
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            entries.extend_from_slice(&aug[r * width + n..(r + 1) * width]);
        }
        Ok(BitMatrix {
            rows: n,
            cols: n,
            entries,
        })
    }

    // -----------------------------------------------------------------------
    // Shared matrix text format: first line "rows cols", then `rows` lines of
    // space-separated 0/1 entries. Anything else is rejected.
    // -----------------------------------------------------------------------

    /// Render in the matrix text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|b| b.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the matrix text format.
    pub fn parse_text(text: &str) -> Result<BitMatrix, Gf2Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::Parse("missing header line".to_string()))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Gf2Error::Parse(format!(
                "header must be `rows cols`, got {header:?}"
            )));
        }
        let rows: usize = dims[0]
            .parse()
            .map_err(|_| Gf2Error::Parse(format!("invalid row count {:?}", dims[0])))?;
        let cols: usize = dims[1]
            .parse()
            .map_err(|_| Gf2Error::Parse(format!("invalid column count {:?}", dims[1])))?;
        if rows == 0 || cols == 0 {
            return Err(Gf2Error::Parse("rows and cols must be positive".to_string()));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Gf2Error::Parse(format!("expected {rows} rows")))?;
            let mut count = 0;
            for tok in line.split_whitespace() {
                match tok {
                    "0" => entries.push(0),
                    "1" => entries.push(1),
                    other => {
                        return Err(Gf2Error::Parse(format!("invalid token {other:?}")));
                    }
                }
                count += 1;
            }
            if count != cols {
                return Err(Gf2Error::Parse(format!(
                    "expected {cols} entries per row, got {count}"
                )));
            }
        }
        if lines.next().is_some() {
            return Err(Gf2Error::Parse("trailing content after matrix".to_string()));
        }
        BitMatrix::from_entries(rows, cols, entries)
    }
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize);
}

impl SwapChunks for Vec<u8> {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize) {
        if a == b {
            return;
        }
        for k in 0..width {
            self.swap(a * width + k, b * width + k);
        }
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
