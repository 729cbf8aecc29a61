//! Closed-form symbol error probability and throughput.
//!
//! The exact per-user SEP sums, over the N−1 decoded components, the
//! probability that an odd number of the N+1 contributing detection-error
//! events land on that component: the other users' uplink errors, the user's
//! own uplink error (which the decoder spreads over every component), and
//! the broadcast-slot errors propagated through the columns of F_i^{-1}.
//! The sum is evaluated by the alternating subset expansion of the GF(2)
//! fold, with each subset's probability the product of its members'
//! (independent) error probabilities.
//!
//! Two conventions are exposed side by side everywhere: the *literal* value,
//! which sums N−1 per-component probabilities per user and so can exceed 1,
//! and the *per-symbol* value normalized by N−1 (and by N(N−1) for the
//! scheme without network coding) so that probabilities stay in [0, 1] and
//! the throughput formulas reach their high-SNR limits. Throughput always
//! consumes per-symbol values.

use crate::channel::{bpsk_rayleigh_sep, NoNcProfile, SnrProfile};
use crate::matrix::{DecodingSet, EncodingMatrix};

/// Exact enumeration guard: the subset expansion walks 2^{N+1} index sets.
pub const EXACT_SEP_MAX_TERMS: usize = 24;

/// A probability reported in both the literal (as-derived) and per-symbol
/// (normalized) conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SepValue {
    /// As the derivation writes it: a sum of per-component probabilities.
    pub literal: f64,
    /// Normalized per delivered symbol; always in [0, 1].
    pub per_symbol: f64,
}

/// Per-component expected values of the N+1 error terms seen by one user.
///
/// Rows are the term index n = 1..N+1, columns the decoded component
/// k = 1..N−1:
/// - n = 1: uplink detection error of the other user sitting at component k;
/// - n = 2: uplink detection error of this user's own bit;
/// - n = l ≥ 3: broadcast error of slot l−2, masked by (F_i^{-1})_{k,l−2}.
#[derive(Debug, Clone)]
pub struct ErrorTermTable {
    n_users: usize,
    user: usize,
    terms: Vec<Vec<f64>>,
}

impl ErrorTermTable {
    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn user(&self) -> usize {
        self.user
    }

    /// E[(a_{i,n})_k]; `n` in 1..=N+1, `k` in 1..=N−1, both 1-based.
    pub fn term(&self, n: usize, k: usize) -> f64 {
        self.terms[n - 1][k - 1]
    }
}

/// Populate the error-term table for one user from the link SEPs.
pub fn error_terms(f: &EncodingMatrix, user: usize, profile: &SnrProfile) -> ErrorTermTable {
    let ds = f.decoding_matrices();
    error_terms_with(f, &ds, user, profile)
}

fn error_terms_with(
    f: &EncodingMatrix,
    ds: &DecodingSet,
    user: usize,
    profile: &SnrProfile,
) -> ErrorTermTable {
    let n = f.n_users();
    assert!(user >= 1 && user <= n, "user index out of range");
    let inv = ds.inverse(user);
    let others: Vec<usize> = (1..=n).filter(|&k| k != user).collect();
    let mut terms = Vec::with_capacity(n + 1);
    terms.push(
        others
            .iter()
            .map(|&other| bpsk_rayleigh_sep(profile.uplink(other)))
            .collect::<Vec<f64>>(),
    );
    terms.push(vec![bpsk_rayleigh_sep(profile.uplink(user)); n - 1]);
    for l in 3..=n + 1 {
        let slot = l - 2;
        let p_slot = bpsk_rayleigh_sep(profile.downlink(user, slot));
        terms.push(
            (1..=n - 1)
                .map(|k| p_slot * inv.get(k - 1, slot - 1) as f64)
                .collect(),
        );
    }
    ErrorTermTable {
        n_users: n,
        user,
        terms,
    }
}

/// Exact SEP of one user: the alternating subset expansion of the XOR of the
/// N+1 error terms, evaluated per component and summed.
pub fn exact_user_sep(f: &EncodingMatrix, user: usize, profile: &SnrProfile) -> SepValue {
    let ds = f.decoding_matrices();
    exact_user_sep_with(f, &ds, user, profile)
}

fn exact_user_sep_with(
    f: &EncodingMatrix,
    ds: &DecodingSet,
    user: usize,
    profile: &SnrProfile,
) -> SepValue {
    let n = f.n_users();
    assert!(
        n + 1 <= EXACT_SEP_MAX_TERMS,
        "exact SEP enumeration supports at most {} users",
        EXACT_SEP_MAX_TERMS - 1
    );
    let table = error_terms_with(f, ds, user, profile);
    let terms = n + 1;
    let mut literal = 0.0_f64;
    for k in 1..=n - 1 {
        let mut component = 0.0_f64;
        for mask in 1u32..(1u32 << terms) {
            let mut product = 1.0_f64;
            for t in 0..terms {
                if mask >> t & 1 == 1 {
                    product *= table.term(t + 1, k);
                    if product == 0.0 {
                        break;
                    }
                }
            }
            if product != 0.0 {
                component += (-2.0_f64).powi(mask.count_ones() as i32 - 1) * product;
            }
        }
        literal += component;
    }
    SepValue {
        literal,
        per_symbol: literal / (n - 1) as f64,
    }
}

/// Exact SEP of the system: the mean over users of [`exact_user_sep`].
pub fn exact_system_sep(f: &EncodingMatrix, profile: &SnrProfile) -> SepValue {
    let ds = f.decoding_matrices();
    exact_system_sep_with(f, &ds, profile)
}

fn exact_system_sep_with(f: &EncodingMatrix, ds: &DecodingSet, profile: &SnrProfile) -> SepValue {
    let n = f.n_users();
    let mut literal = 0.0;
    for user in 1..=n {
        literal += exact_user_sep_with(f, ds, user, profile).literal;
    }
    literal /= n as f64;
    SepValue {
        literal,
        per_symbol: literal / (n - 1) as f64,
    }
}

/// Upper bound on one user's SEP: other users' uplink errors, the own-bit
/// error counted once per component, and each broadcast-slot error weighted
/// by the Hamming weight |G_{i,k}| of the matching inverse column.
pub fn bound_user_sep(f: &EncodingMatrix, user: usize, profile: &SnrProfile) -> SepValue {
    let ds = f.decoding_matrices();
    bound_user_sep_with(f, &ds, user, profile)
}

fn bound_user_sep_with(
    f: &EncodingMatrix,
    ds: &DecodingSet,
    user: usize,
    profile: &SnrProfile,
) -> SepValue {
    let n = f.n_users();
    let mut literal = 0.0;
    for k in 1..=n {
        if k != user {
            literal += bpsk_rayleigh_sep(profile.uplink(k));
        }
    }
    literal += (n - 1) as f64 * bpsk_rayleigh_sep(profile.uplink(user));
    for slot in 1..=n - 1 {
        literal += bpsk_rayleigh_sep(profile.downlink(user, slot))
            * ds.column_weight(user, slot) as f64;
    }
    SepValue {
        literal,
        per_symbol: literal / (n - 1) as f64,
    }
}

/// Upper bound on the system SEP: the mean over users of [`bound_user_sep`].
pub fn sep_upper_bound(f: &EncodingMatrix, profile: &SnrProfile) -> SepValue {
    let ds = f.decoding_matrices();
    sep_upper_bound_with(f, &ds, profile)
}

pub(crate) fn sep_upper_bound_with(
    f: &EncodingMatrix,
    ds: &DecodingSet,
    profile: &SnrProfile,
) -> SepValue {
    let n = f.n_users();
    let mut literal = 0.0;
    for user in 1..=n {
        literal += bound_user_sep_with(f, ds, user, profile).literal;
    }
    literal /= n as f64;
    SepValue {
        literal,
        per_symbol: literal / (n - 1) as f64,
    }
}

/// Exact and bound SEPs for every user and the system, computed in one pass.
#[derive(Debug, Clone)]
pub struct SepReport {
    pub per_user_exact: Vec<SepValue>,
    pub system_exact: SepValue,
    pub per_user_bound: Vec<SepValue>,
    pub system_bound: SepValue,
}

pub fn sep_report(f: &EncodingMatrix, profile: &SnrProfile) -> SepReport {
    let ds = f.decoding_matrices();
    let n = f.n_users();
    let per_user_exact: Vec<SepValue> = (1..=n)
        .map(|u| exact_user_sep_with(f, &ds, u, profile))
        .collect();
    let per_user_bound: Vec<SepValue> = (1..=n)
        .map(|u| bound_user_sep_with(f, &ds, u, profile))
        .collect();
    let mean = |vals: &[SepValue]| {
        let literal = vals.iter().map(|v| v.literal).sum::<f64>() / n as f64;
        SepValue {
            literal,
            per_symbol: literal / (n - 1) as f64,
        }
    };
    SepReport {
        system_exact: mean(&per_user_exact),
        system_bound: mean(&per_user_bound),
        per_user_exact,
        per_user_bound,
    }
}

/// SEP of the detect-and-forward scheme without network coding.
///
/// Per source i, the expected number of failed deliveries is
/// (N−1)·P(relay errs) + (1 − P(relay errs))·Σ_j P(user j errs on the
/// forwarded bit); summed over sources this is the literal value, and the
/// per-symbol value divides by the N(N−1) deliveries.
pub fn sep_no_nc(n_users: usize, profile: &SnrProfile) -> SepValue {
    assert!(n_users >= 2, "need at least 2 users");
    assert_eq!(n_users, profile.n_users(), "profile size mismatch");
    sep_no_nc_from(&profile.no_nc())
}

/// Same as [`sep_no_nc`] but on an already-derived no-NC profile.
pub fn sep_no_nc_from(no_nc: &NoNcProfile) -> SepValue {
    let n = no_nc.n_users();
    let mut literal = 0.0;
    for source in 1..=n {
        let relay_err = bpsk_rayleigh_sep(no_nc.uplink(source));
        let mut forward_err_sum = 0.0;
        for user in 1..=n {
            if user != source {
                forward_err_sum += bpsk_rayleigh_sep(no_nc.downlink(user, source));
            }
        }
        literal += (n - 1) as f64 * relay_err + (1.0 - relay_err) * forward_err_sum;
    }
    SepValue {
        literal,
        per_symbol: literal / (n * (n - 1)) as f64,
    }
}

/// Throughput in correctly delivered symbols per time slot, with and without
/// network coding, plus the high-SNR limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputReport {
    pub nc: f64,
    pub no_nc: f64,
    pub nc_asymptotic: f64,
    pub no_nc_asymptotic: f64,
    pub delta_asymptotic: f64,
}

/// Evaluate the throughput formulas from per-symbol error probabilities:
/// N(N−1)(1−pe)/(2N−1) with coding (2N−1 slots per round) and
/// (N−1)(1−pe')/2 without (2N slots).
pub fn throughput(n_users: usize, pe_nc: f64, pe_no_nc: f64) -> ThroughputReport {
    assert!(n_users >= 2, "need at least 2 users");
    assert!((0.0..=1.0).contains(&pe_nc), "pe_nc must be a probability");
    assert!(
        (0.0..=1.0).contains(&pe_no_nc),
        "pe_no_nc must be a probability"
    );
    let n = n_users as f64;
    let nc_asymptotic = n * (n - 1.0) / (2.0 * n - 1.0);
    let no_nc_asymptotic = (n - 1.0) / 2.0;
    ThroughputReport {
        nc: nc_asymptotic * (1.0 - pe_nc),
        no_nc: no_nc_asymptotic * (1.0 - pe_no_nc),
        nc_asymptotic,
        no_nc_asymptotic,
        delta_asymptotic: 0.25 * (1.0 - 1.0 / (2.0 * n - 1.0)),
    }
}
