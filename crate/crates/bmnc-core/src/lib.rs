//! Binary multi-user network coding (BMNC) for N-way single-relay networks.
//!
//! N users exchange one bit each per round through a relay. With network
//! coding the relay detects the N uplink bits, combines them into N−1
//! broadcast bits r = (F x̃) mod 2 through a GF(2) encoding matrix F, and
//! every user recovers the other N−1 bits from its own bit and the inverse
//! of its sub-matrix — 2N−1 slots per round instead of the 2N a plain
//! detect-and-forward relay needs.
//!
//! The crate provides:
//!
//! - [`gf2`]: dense GF(2) vectors/matrices, rank, inversion, and the
//!   real-arithmetic expansion of a GF(2) sum;
//! - [`matrix`]: encoding-matrix construction, validation, decoding, the
//!   per-round error-vector identity, and exhaustive enumeration of all
//!   valid matrices;
//! - [`channel`]: Rayleigh/BPSK links, analytic link SEP, and the 3 dB
//!   ladder SNR profiles;
//! - [`analysis`]: exact and upper-bound system SEP, the no-coding baseline,
//!   and throughput;
//! - [`sim`]: a seedable, reproducible, parallel Monte Carlo engine;
//! - [`optimizer`]: exhaustive verification that the designed matrix
//!   minimizes the SEP bound.

pub mod analysis;
pub mod channel;
pub mod gf2;
pub mod matrix;
pub mod optimizer;
pub mod sim;

pub use analysis::{
    error_terms, exact_system_sep, exact_user_sep, sep_no_nc, sep_report, sep_upper_bound,
    throughput, SepReport, SepValue, ThroughputReport,
};
pub use channel::{bpsk_rayleigh_sep, transmit_detect, ChannelError, NoNcProfile, SnrProfile};
pub use gf2::{elementwise_product, xor_expansion, BitMatrix, BitVector, Gf2Error};
pub use matrix::{
    decode_user, enumerate_valid, error_vector, validate, DecodingSet, EncodingMatrix,
    MatrixError, ValidityReport,
};
pub use optimizer::{bound_gap, search_optimal, verify_three_user_orderings, Objective, SearchResult};
pub use sim::{simulate, Scheme, SimConfig, SimResult};
