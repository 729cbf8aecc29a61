//! BMNC encoding matrices.
//!
//! An N-user relay round broadcasts N−1 coded bits r = (F x̃) mod 2, where F
//! is an (N−1)×N matrix over GF(2). User i can recover the other users' bits
//! iff the sub-matrix F_i (F with column i removed) is invertible; a matrix
//! is *valid* when that holds for every user. Validity is equivalent to each
//! column being the XOR of all the others, which also makes every valid
//! matrix reachable by appending an XOR column to an invertible (N−1)×(N−1)
//! block — that is how [`enumerate_valid`] walks the whole family.
//!
//! The *designed* matrix ([`EncodingMatrix::design`]) puts row j's ones in
//! columns 1 and j+1. It minimizes the SEP upper bound under the ladder
//! SNR ordering (see the `optimizer` module for the exhaustive check).

use std::fmt;

use crate::gf2::{BitMatrix, BitVector, Gf2Error};

/// Errors from encoding-matrix construction and use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    /// Fewer than two users.
    TooFewUsers { got: usize },
    /// Matrix shape is not (N−1)×N.
    BadShape { rows: usize, cols: usize },
    /// The matrix fails the full-rank validity condition.
    Invalid(ValidityReport),
    /// User index outside 1..=N.
    UserOutOfRange { user: usize, n_users: usize },
    /// Enumeration requested beyond the cost guard.
    TooManyUsers { got: usize, max: usize },
    /// Underlying GF(2) failure (conformance, parse, ...).
    Gf2(Gf2Error),
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::TooFewUsers { got } => {
                write!(f, "need at least 2 users, got {got}")
            }
            MatrixError::BadShape { rows, cols } => {
                write!(f, "encoding matrix must be (N-1)xN, got {rows}x{cols}")
            }
            MatrixError::Invalid(report) => {
                write!(f, "matrix is not a valid BMNC encoding matrix: ")?;
                let failing: Vec<String> = report
                    .failing_users()
                    .iter()
                    .map(|u| u.to_string())
                    .collect();
                write!(f, "sub-matrix rank deficient for users [{}]", failing.join(", "))
            }
            MatrixError::UserOutOfRange { user, n_users } => {
                write!(f, "user index {user} out of range 1..={n_users}")
            }
            MatrixError::TooManyUsers { got, max } => {
                write!(f, "enumeration supports at most {max} users, got {got}")
            }
            MatrixError::Gf2(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for MatrixError {}

impl From<Gf2Error> for MatrixError {
    fn from(e: Gf2Error) -> Self {
        MatrixError::Gf2(e)
    }
}

/// Cost guard for [`enumerate_valid`]: 2^{(N−1)²} candidate blocks.
pub const ENUMERATE_MAX_USERS: usize = 6;

// ---------------------------------------------------------------------------
// Validity
// ---------------------------------------------------------------------------

/// Structured outcome of validating a candidate (N−1)×N matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    n_users: usize,
    full_rank: Vec<bool>,
    column_sum_ok: Vec<bool>,
    valid: bool,
    anchor_equivalence_ok: bool,
}

impl ValidityReport {
    pub fn n_users(&self) -> usize {
        self.n_users
    }

    /// Whether every sub-matrix F_i is full rank.
    pub fn is_valid(&self) -> bool {
        self.valid
    }

    /// Per-user full-rank flags, index 0 is user 1.
    pub fn full_rank(&self) -> &[bool] {
        &self.full_rank
    }

    /// Per-user column-sum flags: entry i−1 says whether f_i equals the XOR
    /// of all other columns.
    pub fn column_sum_ok(&self) -> &[bool] {
        &self.column_sum_ok
    }

    /// 1-based indices of users whose sub-matrix is rank deficient.
    pub fn failing_users(&self) -> Vec<usize> {
        self.full_rank
            .iter()
            .enumerate()
            .filter(|(_, ok)| !**ok)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Consistency of the anchored validity criterion on this matrix: when
    /// F_N is full rank, overall validity must coincide with f_N being the
    /// XOR of columns 1..N−1. Vacuously true when F_N is rank deficient.
    pub fn anchor_equivalence_ok(&self) -> bool {
        self.anchor_equivalence_ok
    }
}

/// Validate a candidate encoding matrix: shape (N−1)×N with every sub-matrix
/// full rank. The report also carries the per-user column-sum checks.
pub fn validate(f: &BitMatrix) -> Result<ValidityReport, MatrixError> {
    let n_users = f.cols();
    if n_users < 2 {
        return Err(MatrixError::TooFewUsers { got: n_users });
    }
    if f.rows() != n_users - 1 {
        return Err(MatrixError::BadShape {
            rows: f.rows(),
            cols: f.cols(),
        });
    }
    let dim = n_users - 1;
    let mut full_rank = Vec::with_capacity(n_users);
    let mut column_sum_ok = Vec::with_capacity(n_users);
    for i in 0..n_users {
        let sub = f.delete_column(i);
        full_rank.push(sub.rank() == dim);
        // f_i = XOR of all other columns <=> XOR of *all* columns is zero on
        // every row where f_i participates; check directly.
        let mut xor_others = BitVector::zeros(dim);
        for k in 0..n_users {
            if k != i {
                xor_others = xor_others.xor(&f.column(k)).expect("equal lengths");
            }
        }
        column_sum_ok.push(xor_others == f.column(i));
    }
    let valid = full_rank.iter().all(|&b| b);
    let anchor_equivalence_ok = if full_rank[n_users - 1] {
        valid == column_sum_ok[n_users - 1]
    } else {
        true
    };
    Ok(ValidityReport {
        n_users,
        full_rank,
        column_sum_ok,
        valid,
        anchor_equivalence_ok,
    })
}

// ---------------------------------------------------------------------------
// EncodingMatrix
// ---------------------------------------------------------------------------

/// A validated BMNC encoding matrix for N users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingMatrix {
    n_users: usize,
    f: BitMatrix,
}

impl EncodingMatrix {
    /// Wrap a raw matrix after validating it.
    pub fn from_matrix(f: BitMatrix) -> Result<Self, MatrixError> {
        let report = validate(&f)?;
        if !report.is_valid() {
            return Err(MatrixError::Invalid(report));
        }
        Ok(Self {
            n_users: f.cols(),
            f,
        })
    }

    /// The designed matrix: row j has ones in columns 1 and j+1.
    ///
    /// The N−1-user designed matrix is the upper-left (N−2)×(N−1) block of
    /// the N-user one, so a relay only needs the largest size it supports.
    pub fn design(n_users: usize) -> Result<Self, MatrixError> {
        if n_users < 2 {
            return Err(MatrixError::TooFewUsers { got: n_users });
        }
        let mut f = BitMatrix::zeros(n_users - 1, n_users);
        for j in 0..n_users - 1 {
            f.set(j, 0, 1);
            f.set(j, j + 1, 1);
        }
        Ok(Self { n_users, f })
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.f
    }

    /// Column vector f_i, `user` 1-based.
    pub fn column(&self, user: usize) -> Result<BitVector, MatrixError> {
        self.check_user(user)?;
        Ok(self.f.column(user - 1))
    }

    /// Sub-encoding matrix F_i: F with user i's column deleted, order kept.
    pub fn submatrix_excluding(&self, user: usize) -> Result<BitMatrix, MatrixError> {
        self.check_user(user)?;
        Ok(self.f.delete_column(user - 1))
    }

    /// Relay encoding r = (F x̃) mod 2 of the N detected source bits.
    pub fn encode(&self, detected_bits: &BitVector) -> Result<BitVector, MatrixError> {
        Ok(self.f.mat_vec(detected_bits)?)
    }

    /// All per-user decoding matrices, computed once.
    pub fn decoding_matrices(&self) -> DecodingSet {
        let subs: Vec<BitMatrix> = (1..=self.n_users)
            .map(|i| self.submatrix_excluding(i).expect("index in range"))
            .collect();
        let inverses: Vec<BitMatrix> = subs
            .iter()
            .map(|s| s.inverse().expect("validated matrix has invertible subs"))
            .collect();
        let column_weights = inverses
            .iter()
            .map(|inv| {
                (0..inv.cols())
                    .map(|c| inv.column(c).weight())
                    .collect::<Vec<usize>>()
            })
            .collect();
        DecodingSet {
            n_users: self.n_users,
            subs,
            inverses,
            column_weights,
        }
    }

    fn check_user(&self, user: usize) -> Result<(), MatrixError> {
        if user == 0 || user > self.n_users {
            return Err(MatrixError::UserOutOfRange {
                user,
                n_users: self.n_users,
            });
        }
        Ok(())
    }
}

impl fmt::Display for EncodingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.f.to_text())
    }
}

/// Per-user sub-matrices F_i, their inverses, and the inverse column weights
/// |G_{i,k}| that drive the SEP upper bound.
#[derive(Debug, Clone)]
pub struct DecodingSet {
    n_users: usize,
    subs: Vec<BitMatrix>,
    inverses: Vec<BitMatrix>,
    column_weights: Vec<Vec<usize>>,
}

impl DecodingSet {
    pub fn n_users(&self) -> usize {
        self.n_users
    }

    /// F_i, `user` 1-based.
    pub fn sub(&self, user: usize) -> &BitMatrix {
        &self.subs[user - 1]
    }

    /// F_i^{-1}, `user` 1-based.
    pub fn inverse(&self, user: usize) -> &BitMatrix {
        &self.inverses[user - 1]
    }

    /// Hamming weight of column k (1-based) of F_i^{-1}.
    pub fn column_weight(&self, user: usize, k: usize) -> usize {
        self.column_weights[user - 1][k - 1]
    }
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

/// Network decoding at user i: x̂_i = { F_i^{-1} ( r̃_i ⊕ (f_i x_i mod 2) ) } mod 2.
///
/// `detected_broadcast` is the user's detected copy of the N−1 relay bits;
/// `own_bit` is the user's own (exactly known) source bit. The result lists
/// the decoded bits of the other users in user order.
pub fn decode_user(
    f: &EncodingMatrix,
    user: usize,
    detected_broadcast: &BitVector,
    own_bit: u8,
) -> Result<BitVector, MatrixError> {
    assert!(own_bit <= 1, "bits must be 0 or 1");
    let n = f.n_users();
    if detected_broadcast.len() != n - 1 {
        return Err(MatrixError::Gf2(Gf2Error::DimensionMismatch {
            expected: format!("broadcast vector of length {}", n - 1),
            got: format!("length {}", detected_broadcast.len()),
        }));
    }
    let f_i = f.column(user)?;
    let own_contrib = BitVector::new(f_i.bits().iter().map(|&b| b & own_bit).collect())
        .expect("length >= 1");
    let folded = detected_broadcast.xor(&own_contrib)?;
    let inv = f
        .submatrix_excluding(user)?
        .inverse()
        .expect("validated matrix has invertible subs");
    Ok(inv.mat_vec(&folded)?)
}

/// The error vector user i is left with after a full round:
/// x̂_{e,i} = (x_i ⊕ x̃_i) ⊕ ((x_i ⊕ x̃_i)·1) ⊕ { F_i^{-1}(r ⊕ r̃_i) } mod 2,
/// where the first term is over the other users' bits and the second spreads
/// the relay's detection error on user i's own bit across all components.
///
/// Equals x_i ⊕ decode_user(..) when `broadcast` is the relay's actual
/// encoding of `detected_at_relay`.
pub fn error_vector(
    f: &EncodingMatrix,
    user: usize,
    source_bits: &BitVector,
    detected_at_relay: &BitVector,
    broadcast: &BitVector,
    detected_at_user: &BitVector,
) -> Result<BitVector, MatrixError> {
    let n = f.n_users();
    for (v, len, what) in [
        (source_bits, n, "source bits"),
        (detected_at_relay, n, "relay detections"),
        (broadcast, n - 1, "broadcast bits"),
        (detected_at_user, n - 1, "user detections"),
    ] {
        if v.len() != len {
            return Err(MatrixError::Gf2(Gf2Error::DimensionMismatch {
                expected: format!("{what} of length {len}"),
                got: format!("length {}", v.len()),
            }));
        }
    }
    f.check_user(user)?;

    let others: Vec<usize> = (0..n).filter(|&k| k != user - 1).collect();
    let uplink_others = BitVector::new(
        others
            .iter()
            .map(|&k| source_bits.get(k) ^ detected_at_relay.get(k))
            .collect(),
    )
    .expect("length >= 1");
    let own_err = source_bits.get(user - 1) ^ detected_at_relay.get(user - 1);
    let own_spread = if own_err == 1 {
        BitVector::ones(n - 1)
    } else {
        BitVector::zeros(n - 1)
    };
    let downlink_err = broadcast.xor(detected_at_user)?;
    let inv = f
        .submatrix_excluding(user)?
        .inverse()
        .expect("validated matrix has invertible subs");
    let propagated = inv.mat_vec(&downlink_err)?;
    Ok(uplink_others.xor(&own_spread)?.xor(&propagated)?)
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Every valid N-user encoding matrix, exactly once.
///
/// Anchored on the last column: each full-rank (N−1)×(N−1) block serves as
/// F_N and the appended column f_N is the XOR of its columns. Guarded to
/// N ≤ [`ENUMERATE_MAX_USERS`].
pub fn enumerate_valid(
    n_users: usize,
) -> Result<impl Iterator<Item = EncodingMatrix>, MatrixError> {
    if n_users < 2 {
        return Err(MatrixError::TooFewUsers { got: n_users });
    }
    if n_users > ENUMERATE_MAX_USERS {
        return Err(MatrixError::TooManyUsers {
            got: n_users,
            max: ENUMERATE_MAX_USERS,
        });
    }
    let dim = n_users - 1;
    let total: u64 = 1u64 << (dim * dim);
    let iter = (0..total).filter_map(move |pattern| {
        let entries: Vec<u8> = (0..dim * dim).map(|k| ((pattern >> k) & 1) as u8).collect();
        let block = BitMatrix::from_entries(dim, dim, entries).expect("shape is fixed");
        if block.rank() != dim {
            return None;
        }
        let mut f = BitMatrix::zeros(dim, n_users);
        for r in 0..dim {
            let mut parity = 0u8;
            for c in 0..dim {
                let v = block.get(r, c);
                f.set(r, c, v);
                parity ^= v;
            }
            f.set(r, dim, parity);
        }
        Some(EncodingMatrix {
            n_users,
            f,
        })
    });
    Ok(iter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &[u8]) -> BitVector {
        BitVector::new(bits.to_vec()).unwrap()
    }

    fn mat(rows: &[Vec<u8>]) -> BitMatrix {
        BitMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn design_small_cases() {
        assert_eq!(
            EncodingMatrix::design(3).unwrap().matrix(),
            &mat(&[vec![1, 1, 0], vec![1, 0, 1]])
        );
        assert_eq!(
            EncodingMatrix::design(4).unwrap().matrix(),
            &mat(&[vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1]])
        );
        assert_eq!(
            EncodingMatrix::design(2).unwrap().matrix(),
            &mat(&[vec![1, 1]])
        );
        assert!(matches!(
            EncodingMatrix::design(1),
            Err(MatrixError::TooFewUsers { .. })
        ));
    }

    #[test]
    fn design_passes_validation() {
        for n in 2..=8 {
            let f = EncodingMatrix::design(n).unwrap();
            let report = validate(f.matrix()).unwrap();
            assert!(report.is_valid(), "design({n}) must validate");
            assert!(report.column_sum_ok().iter().all(|&b| b));
            assert!(report.anchor_equivalence_ok());
        }
    }

    #[test]
    fn design_puncturing_property() {
        for n in 3..=12 {
            let big = EncodingMatrix::design(n).unwrap();
            let small = EncodingMatrix::design(n - 1).unwrap();
            for r in 0..n - 2 {
                for c in 0..n - 1 {
                    assert_eq!(big.matrix().get(r, c), small.matrix().get(r, c));
                }
            }
        }
    }

    #[test]
    fn submatrix_excluding_cases() {
        let f3 = EncodingMatrix::design(3).unwrap();
        assert_eq!(f3.submatrix_excluding(1).unwrap(), BitMatrix::identity(2));
        assert_eq!(
            f3.submatrix_excluding(3).unwrap(),
            mat(&[vec![1, 1], vec![1, 0]])
        );
        let f4 = EncodingMatrix::design(4).unwrap();
        let sub1 = f4.submatrix_excluding(1).unwrap();
        assert_eq!(sub1, BitMatrix::identity(3));
        assert_eq!(sub1.rank(), 3);
        assert!(matches!(
            f4.submatrix_excluding(0),
            Err(MatrixError::UserOutOfRange { .. })
        ));
        assert!(matches!(
            f4.submatrix_excluding(5),
            Err(MatrixError::UserOutOfRange { .. })
        ));
    }

    #[test]
    fn designed_f1_of_five_users_is_identity() {
        let f5 = EncodingMatrix::design(5).unwrap();
        let sub = f5.submatrix_excluding(1).unwrap();
        assert_eq!(sub, BitMatrix::identity(4));
        assert_eq!(sub.rank(), 4);
    }

    #[test]
    fn validate_fig4_matrix_and_rank_deficient() {
        let m1 = mat(&[vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![1, 0, 0, 1]]);
        assert!(validate(&m1).unwrap().is_valid());

        let bad = mat(&[vec![1, 1, 0], vec![1, 1, 0]]);
        let report = validate(&bad).unwrap();
        assert!(!report.is_valid());
        // F_3 = [[1,1],[1,1]] has rank 1.
        assert!(!report.full_rank()[2]);
        assert!(report.failing_users().contains(&3));
    }

    #[test]
    fn validate_rejects_bad_shape() {
        let square = BitMatrix::identity(3);
        assert!(matches!(
            validate(&square),
            Err(MatrixError::BadShape { .. })
        ));
    }

    #[test]
    fn decoding_matrices_match_closed_forms() {
        // Designed matrix closed forms (all free coefficients zero):
        // F_1^{-1} = I, F_2^{-1} has an all-ones first column, F_N^{-1} has
        // an all-ones last column with a lone 1 in the bottom-right.
        let f4 = EncodingMatrix::design(4).unwrap();
        let ds = f4.decoding_matrices();
        assert_eq!(ds.inverse(1), &BitMatrix::identity(3));
        assert_eq!(
            ds.inverse(2),
            &mat(&[vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]])
        );
        assert_eq!(
            ds.inverse(4),
            &mat(&[vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1]])
        );
        for n in 2..=7 {
            let f = EncodingMatrix::design(n).unwrap();
            let ds = f.decoding_matrices();
            assert_eq!(ds.inverse(1), &BitMatrix::identity(n - 1));
            for i in 1..=n {
                assert_eq!(
                    ds.sub(i).mat_mul(ds.inverse(i)).unwrap(),
                    BitMatrix::identity(n - 1)
                );
                // Column weights: user 1 sees all ones; user i ≥ 2 has one
                // heavy column of weight N−1 at position i−1.
                for k in 1..=n - 1 {
                    let w = ds.column_weight(i, k);
                    assert!(w >= 1);
                    if i == 1 {
                        assert_eq!(w, 1);
                    } else if k == i - 1 {
                        assert_eq!(w, n - 1);
                    } else {
                        assert_eq!(w, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn decode_noiseless_round_trip() {
        for n in 2..=5 {
            let f = EncodingMatrix::design(n).unwrap();
            for word in 0..(1u32 << n) {
                let x = bv(&(0..n).map(|k| ((word >> k) & 1) as u8).collect::<Vec<_>>());
                let r = f.encode(&x).unwrap();
                for user in 1..=n {
                    let decoded = decode_user(&f, user, &r, x.get(user - 1)).unwrap();
                    let expect: Vec<u8> = (0..n)
                        .filter(|&k| k != user - 1)
                        .map(|k| x.get(k))
                        .collect();
                    assert_eq!(decoded.bits(), expect.as_slice());
                }
            }
        }
    }

    #[test]
    fn decode_example_three_users() {
        let f = EncodingMatrix::design(3).unwrap();
        let x = bv(&[1, 0, 1]);
        let r = f.encode(&x).unwrap();
        assert_eq!(r, bv(&[1, 0]));
        let decoded = decode_user(&f, 1, &r, 1).unwrap();
        assert_eq!(decoded, bv(&[0, 1]));
    }

    #[test]
    fn single_broadcast_error_flips_inverse_column() {
        let f = EncodingMatrix::design(4).unwrap();
        let ds = f.decoding_matrices();
        let x = bv(&[1, 0, 1, 1]);
        let r = f.encode(&x).unwrap();
        for user in 1..=4 {
            let clean = decode_user(&f, user, &r, x.get(user - 1)).unwrap();
            for slot in 0..3 {
                let mut corrupted = r.clone();
                corrupted.set(slot, corrupted.get(slot) ^ 1);
                let decoded = decode_user(&f, user, &corrupted, x.get(user - 1)).unwrap();
                let flips = decoded.xor(&clean).unwrap();
                assert_eq!(flips, ds.inverse(user).column(slot));
            }
        }
    }

    #[test]
    fn error_vector_no_errors_is_zero() {
        let f = EncodingMatrix::design(4).unwrap();
        let x = bv(&[1, 1, 0, 1]);
        let r = f.encode(&x).unwrap();
        for user in 1..=4 {
            let ev = error_vector(&f, user, &x, &x, &r, &r).unwrap();
            assert_eq!(ev, BitVector::zeros(3));
        }
    }

    #[test]
    fn error_vector_single_relay_error_is_unit() {
        let f = EncodingMatrix::design(4).unwrap();
        let x = bv(&[0, 1, 1, 0]);
        for j in 0..4 {
            let mut xt = x.clone();
            xt.set(j, xt.get(j) ^ 1);
            let r = f.encode(&xt).unwrap();
            for user in 1..=4 {
                if user - 1 == j {
                    continue;
                }
                let ev = error_vector(&f, user, &x, &xt, &r, &r).unwrap();
                // Unit vector at the position of x_j among the other users.
                let pos = if j < user - 1 { j } else { j - 1 };
                assert_eq!(ev.weight(), 1, "user {user} relay error {j}");
                assert_eq!(ev.get(pos), 1);
            }
        }
    }

    #[test]
    fn error_vector_agrees_with_decode_exhaustively() {
        // N=3: all inputs x all relay errors x all broadcast errors.
        let f = EncodingMatrix::design(3).unwrap();
        for word in 0..8u32 {
            let x = bv(&[(word & 1) as u8, ((word >> 1) & 1) as u8, ((word >> 2) & 1) as u8]);
            for rel in 0..8u32 {
                let xt = bv(&[
                    x.get(0) ^ (rel & 1) as u8,
                    x.get(1) ^ ((rel >> 1) & 1) as u8,
                    x.get(2) ^ ((rel >> 2) & 1) as u8,
                ]);
                let r = f.encode(&xt).unwrap();
                for bc in 0..4u32 {
                    let rt = bv(&[
                        r.get(0) ^ (bc & 1) as u8,
                        r.get(1) ^ ((bc >> 1) & 1) as u8,
                    ]);
                    for user in 1..=3 {
                        let decoded = decode_user(&f, user, &rt, x.get(user - 1)).unwrap();
                        let truth: Vec<u8> = (0..3)
                            .filter(|&k| k != user - 1)
                            .map(|k| x.get(k))
                            .collect();
                        let observed = decoded.xor(&bv(&truth)).unwrap();
                        let ev = error_vector(&f, user, &x, &xt, &r, &rt).unwrap();
                        assert_eq!(ev, observed);
                    }
                }
            }
        }
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate_valid(2).unwrap().count(), 1);
        assert_eq!(enumerate_valid(3).unwrap().count(), 6);
        assert_eq!(enumerate_valid(4).unwrap().count(), 168);
        assert!(matches!(
            enumerate_valid(7),
            Err(MatrixError::TooManyUsers { .. })
        ));
    }

    #[test]
    fn enumerate_two_users_is_all_ones() {
        let only: Vec<EncodingMatrix> = enumerate_valid(2).unwrap().collect();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].matrix(), &mat(&[vec![1, 1]]));
    }

    #[test]
    fn enumerate_yields_valid_and_distinct() {
        for n in 2..=4 {
            let all: Vec<EncodingMatrix> = enumerate_valid(n).unwrap().collect();
            for f in &all {
                assert!(validate(f.matrix()).unwrap().is_valid());
            }
            for a in 0..all.len() {
                for b in a + 1..all.len() {
                    assert_ne!(all[a], all[b]);
                }
            }
        }
    }

    #[test]
    fn validity_equivalence_exhaustive() {
        // Over all binary (N−1)×N matrices: all sub-matrices full rank
        // <=> (F_1 full rank and f_1 = XOR of the other columns).
        for n in 2..=4usize {
            let dim = n - 1;
            let cells = dim * n;
            for pattern in 0..(1u64 << cells) {
                let entries: Vec<u8> =
                    (0..cells).map(|k| ((pattern >> k) & 1) as u8).collect();
                let f = BitMatrix::from_entries(dim, n, entries).unwrap();
                let report = validate(&f).unwrap();
                let all_full = report.is_valid();
                let f1_full = report.full_rank()[0];
                let f1_is_xor = report.column_sum_ok()[0];
                assert_eq!(all_full, f1_full && f1_is_xor, "pattern {pattern:b} n {n}");
                assert!(report.anchor_equivalence_ok());
            }
        }
    }

    #[test]
    fn column_xor_reorder_preserves_rank() {
        // For valid F and users i != j: XOR all other columns of F_j onto the
        // slot where f_i sat, then reorder; the result has F_i's rank.
        for f in enumerate_valid(4).unwrap() {
            let n = f.n_users();
            for i in 1..=n {
                let rank_i = f.submatrix_excluding(i).unwrap().rank();
                for j in 1..=n {
                    if j == i {
                        continue;
                    }
                    let sub_j = f.submatrix_excluding(j).unwrap();
                    // Column index of f_i inside F_j.
                    let idx_i = if i < j { i - 1 } else { i - 2 };
                    let mut replaced = sub_j.clone();
                    let mut acc = BitVector::zeros(n - 1);
                    for c in 0..n - 1 {
                        if c != idx_i {
                            acc = acc.xor(&sub_j.column(c)).unwrap();
                        }
                    }
                    acc = acc.xor(&sub_j.column(idx_i)).unwrap();
                    for r in 0..n - 1 {
                        replaced.set(r, idx_i, acc.get(r));
                    }
                    assert_eq!(replaced.rank(), rank_i);
                }
            }
        }
    }

    #[test]
    fn column_equals_submatrix_times_ones() {
        // f_i = (F_i · 1) mod 2 for every user of a valid matrix.
        for f in enumerate_valid(4).unwrap() {
            for i in 1..=f.n_users() {
                let prod = f
                    .submatrix_excluding(i)
                    .unwrap()
                    .mat_vec(&BitVector::ones(f.n_users() - 1))
                    .unwrap();
                assert_eq!(prod, f.column(i).unwrap());
            }
        }
    }

    #[test]
    fn from_matrix_rejects_invalid() {
        let bad = mat(&[vec![1, 1, 0], vec![1, 1, 0]]);
        assert!(matches!(
            EncodingMatrix::from_matrix(bad),
            Err(MatrixError::Invalid(_))
        ));
    }
}
