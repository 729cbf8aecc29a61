//! Monte Carlo engine for full two-phase exchange rounds.
//!
//! Each round draws a fresh source word, sends every bit over its uplink,
//! encodes (or forwards) at the relay, sends the broadcast bits over every
//! user's downlink, decodes, and tallies the N(N−1) delivered symbols. SEP
//! and throughput estimates come with binomial standard errors.
//!
//! Rounds are pre-partitioned into one contiguous block per worker with a
//! seed derived from (master seed, block index), so a result depends only on
//! the (seed, workers) pair and never on thread scheduling. Re-running a
//! config replays bit-identically.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{transmit_detect, NoNcProfile, SnrProfile};
use crate::gf2::BitVector;
use crate::matrix::{error_vector, DecodingSet, EncodingMatrix};

/// Which transmission scheme a simulation runs.
#[derive(Debug, Clone)]
pub enum Scheme {
    /// Network coding with the given encoding matrix: 2N−1 slots per round.
    Nc(EncodingMatrix),
    /// Detect-and-forward without coding: 2N slots per round.
    NoNc,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Nc(_) => "nc",
            Scheme::NoNc => "no-nc",
        }
    }
}

/// A full simulation request.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub profile: SnrProfile,
    pub rounds: u64,
    pub seed: u64,
    pub workers: usize,
    /// Check the error-vector identity against the decode chain every round.
    pub check_error_identity: bool,
}

impl SimConfig {
    pub fn new(scheme: Scheme, profile: SnrProfile, rounds: u64, seed: u64) -> Self {
        Self {
            scheme,
            profile,
            rounds,
            seed,
            workers: 1,
            check_error_identity: false,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_identity_check(mut self, on: bool) -> Self {
        self.check_error_identity = on;
        self
    }

    pub fn n_users(&self) -> usize {
        self.profile.n_users()
    }
}

/// Monte Carlo estimates with their standard errors and the seed that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub sep: f64,
    pub sep_stderr: f64,
    pub throughput: f64,
    pub throughput_stderr: f64,
    pub rounds: u64,
    pub seed: u64,
}

impl fmt::Display for SimResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sep={} (±{}) throughput={} (±{}) rounds={} seed={}",
            self.sep, self.sep_stderr, self.throughput, self.throughput_stderr, self.rounds,
            self.seed
        )
    }
}

/// Correctness of every delivered (receiving user, source user) symbol in
/// one round. `table[i][p]` is user i+1's p-th decoded bit (source order,
/// own user skipped).
pub type CorrectnessTable = Vec<Vec<bool>>;

fn derive_block_seed(master: u64, block: u64) -> u64 {
    // splitmix64 over the master seed xored with a spread block index.
    let mut z = master ^ block.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One network-coded round: uplink detections, relay encode, per-user
/// downlink detections and decode. Returns the N×(N−1) correctness table.
pub fn run_round_nc<R: Rng + ?Sized>(
    f: &EncodingMatrix,
    profile: &SnrProfile,
    rng: &mut R,
) -> CorrectnessTable {
    let ds = f.decoding_matrices();
    round_nc(f, &ds, profile, rng, true)
}

fn round_nc<R: Rng + ?Sized>(
    f: &EncodingMatrix,
    ds: &DecodingSet,
    profile: &SnrProfile,
    rng: &mut R,
    check_identity: bool,
) -> CorrectnessTable {
    let n = f.n_users();
    let source: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();
    let x = BitVector::new(source).expect("n >= 2");

    // First phase: the relay detects every user's bit.
    let detected = BitVector::new(
        (1..=n)
            .map(|k| transmit_detect(x.get(k - 1), profile.uplink(k), rng))
            .collect(),
    )
    .expect("n >= 2");
    let broadcast = f.encode(&detected).expect("dimensions fixed");

    // Second phase: each user detects the N−1 broadcast bits and decodes
    // with its precomputed inverse.
    let mut table = Vec::with_capacity(n);
    for user in 1..=n {
        let received = BitVector::new(
            (1..=n - 1)
                .map(|slot| {
                    transmit_detect(broadcast.get(slot - 1), profile.downlink(user, slot), rng)
                })
                .collect(),
        )
        .expect("n >= 2");
        let own = x.get(user - 1);
        let f_col = f.column(user).expect("user in range");
        let folded = BitVector::new(
            (0..n - 1)
                .map(|j| received.get(j) ^ (f_col.get(j) & own))
                .collect(),
        )
        .expect("n >= 2");
        let decoded = ds.inverse(user).mat_vec(&folded).expect("conforming");
        let mut row = Vec::with_capacity(n - 1);
        for (pos, k) in (0..n).filter(|&k| k != user - 1).enumerate() {
            row.push(decoded.get(pos) == x.get(k));
        }
        if check_identity {
            let ev = error_vector(f, user, &x, &detected, &broadcast, &received)
                .expect("conforming");
            for (pos, &correct) in row.iter().enumerate() {
                assert_eq!(
                    ev.get(pos) == 0,
                    correct,
                    "error-vector identity violated at user {user} component {pos}"
                );
            }
        }
        table.push(row);
    }
    table
}

/// One detect-and-forward round: the relay detects each bit and re-sends it
/// on its own downlink slot; a delivery is correct iff the two hops compose
/// to the true bit.
pub fn run_round_no_nc<R: Rng + ?Sized>(no_nc: &NoNcProfile, rng: &mut R) -> CorrectnessTable {
    let n = no_nc.n_users();
    let source: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();

    let forwarded: Vec<u8> = (1..=n)
        .map(|k| transmit_detect(source[k - 1], no_nc.uplink(k), rng))
        .collect();

    let mut table = Vec::with_capacity(n);
    for user in 1..=n {
        let mut row = Vec::with_capacity(n - 1);
        for k in 1..=n {
            if k == user {
                continue;
            }
            let got = transmit_detect(forwarded[k - 1], no_nc.downlink(user, k), rng);
            row.push(got == source[k - 1]);
        }
        table.push(row);
    }
    table
}

/// Run the full simulation described by `config`.
pub fn simulate(config: &SimConfig) -> SimResult {
    let n = config.n_users();
    assert!(config.rounds >= 1, "need at least one round");
    if let Scheme::Nc(f) = &config.scheme {
        assert_eq!(f.n_users(), n, "matrix and profile disagree on N");
    }
    let workers = config.workers.min(config.rounds.max(1) as usize).max(1);

    // Contiguous block per worker; block sizes depend only on (rounds, workers).
    let base = config.rounds / workers as u64;
    let extra = config.rounds % workers as u64;
    let block_rounds: Vec<u64> = (0..workers as u64)
        .map(|w| base + if w < extra { 1 } else { 0 })
        .collect();

    let no_nc_profile = match &config.scheme {
        Scheme::NoNc => Some(config.profile.no_nc()),
        Scheme::Nc(_) => None,
    };
    let decoding = match &config.scheme {
        Scheme::Nc(f) => Some(f.decoding_matrices()),
        Scheme::NoNc => None,
    };

    let run_block = |block: u64, rounds: u64| -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_block_seed(config.seed, block));
        let mut wrong: u64 = 0;
        for _ in 0..rounds {
            let table = match &config.scheme {
                Scheme::Nc(f) => round_nc(
                    f,
                    decoding.as_ref().expect("set for NC"),
                    &config.profile,
                    &mut rng,
                    config.check_error_identity,
                ),
                Scheme::NoNc => {
                    run_round_no_nc(no_nc_profile.as_ref().expect("set for no-NC"), &mut rng)
                }
            };
            for row in &table {
                for &ok in row {
                    if !ok {
                        wrong += 1;
                    }
                }
            }
        }
        wrong
    };

    let total_wrong: u64 = if workers == 1 {
        run_block(0, block_rounds[0])
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = block_rounds
                .iter()
                .enumerate()
                .map(|(w, &rounds)| scope.spawn(move || run_block(w as u64, rounds)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker")).sum()
        })
    };

    let deliveries = (n * (n - 1)) as u64 * config.rounds;
    let slots_per_round = match &config.scheme {
        Scheme::Nc(_) => 2 * n - 1,
        Scheme::NoNc => 2 * n,
    } as u64;
    let sep = total_wrong as f64 / deliveries as f64;
    let sep_stderr = (sep * (1.0 - sep) / deliveries as f64).sqrt();
    let correct = deliveries - total_wrong;
    let slots = slots_per_round * config.rounds;
    let throughput = correct as f64 / slots as f64;
    // Same binomial count, rescaled from deliveries to slots.
    let throughput_stderr = sep_stderr * deliveries as f64 / slots as f64;

    SimResult {
        sep,
        sep_stderr,
        throughput,
        throughput_stderr,
        rounds: config.rounds,
        seed: config.seed,
    }
}
