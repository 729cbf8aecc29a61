//! Rayleigh-fading BPSK links and SNR profiles.
//!
//! Every hop is a flat Rayleigh-fading BPSK link with coherent detection and
//! perfect receiver CSI: the transmitter sends ±√γ scaled by a unit-mean
//! complex fading coefficient, unit-variance complex AWGN is added, and the
//! receiver decides on the sign of Re(h* y). Averaged over the fading, the
//! flip probability is 1/2 − (1/2)√(γ/(1+γ)).
//!
//! An [`SnrProfile`] holds the per-user uplink SNRs and per-user-per-slot
//! downlink SNRs in linear scale. [`SnrProfile::ladder`] builds the standard
//! arrangement: uplink SNRs ascend 3 dB per user (user N anchored at
//! Es/N0 + offset), relay slot powers descend 3 dB per slot with the weakest
//! slot at user 1 anchored at Es/N0. How the downlink varies across users is
//! a modeling choice: here user i's downlink gains sit 3 dB above user
//! i−1's, mirroring the uplink distance ordering. Load a profile file to
//! model anything else.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;

/// Errors from profile construction and parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    TooFewUsers { got: usize },
    NonPositiveSnr,
    Parse(String),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::TooFewUsers { got } => write!(f, "need at least 2 users, got {got}"),
            ChannelError::NonPositiveSnr => write!(f, "all SNRs must be positive"),
            ChannelError::Parse(msg) => write!(f, "profile file: {msg}"),
        }
    }
}

impl std::error::Error for ChannelError {}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Average BPSK symbol error probability over Rayleigh fading at linear SNR γ:
/// 1/2 − (1/2)√(γ/(1+γ)).
pub fn bpsk_rayleigh_sep(gamma: f64) -> f64 {
    assert!(gamma >= 0.0, "SNR must be nonnegative, got {gamma}");
    if gamma.is_infinite() {
        return 0.0;
    }
    0.5 - 0.5 * (gamma / (1.0 + gamma)).sqrt()
}

/// BPSK mapping: 0 → +1, 1 → −1.
pub fn modulate(bit: u8) -> f64 {
    assert!(bit <= 1, "bits must be 0 or 1");
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Hard decision back to a bit: nonnegative → 0, negative → 1.
pub fn demap(symbol: f64) -> u8 {
    if symbol >= 0.0 {
        0
    } else {
        1
    }
}

/// One CN(0,1) draw via the Box–Muller construction: exponential magnitude
/// squared, uniform phase.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let radius = (-u.ln()).sqrt();
    let theta = 2.0 * PI * rng.gen::<f64>();
    (radius * theta.cos(), radius * theta.sin())
}

/// Send one bit over a Rayleigh BPSK link at average SNR `gamma` and return
/// the coherently detected bit.
///
/// Draws fresh fading and noise each call (fast-fading idealization), so the
/// long-run flip rate equals [`bpsk_rayleigh_sep`].
pub fn transmit_detect<R: Rng + ?Sized>(bit: u8, gamma: f64, rng: &mut R) -> u8 {
    assert!(gamma > 0.0, "SNR must be positive, got {gamma}");
    let symbol = modulate(bit);
    let (h_re, h_im) = complex_gaussian(rng);
    let (n_re, n_im) = complex_gaussian(rng);
    let amp = gamma.sqrt();
    let y_re = h_re * symbol * amp + n_re;
    let y_im = h_im * symbol * amp + n_im;
    // Matched filter: Re(conj(h) · y).
    let metric = h_re * y_re + h_im * y_im;
    demap(metric)
}

// ---------------------------------------------------------------------------
// SNR profiles
// ---------------------------------------------------------------------------

/// Per-link average SNRs, linear scale.
///
/// `uplink[k]` is user k+1's SNR at the relay; `downlink[i][k]` is the SNR at
/// user i+1 during broadcast slot k+1.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrProfile {
    uplink: Vec<f64>,
    downlink: Vec<Vec<f64>>,
}

impl SnrProfile {
    /// Build from explicit linear SNRs. `downlink` must be N rows of N−1
    /// slots each; everything must be positive.
    pub fn new(uplink: Vec<f64>, downlink: Vec<Vec<f64>>) -> Result<Self, ChannelError> {
        let n = uplink.len();
        if n < 2 {
            return Err(ChannelError::TooFewUsers { got: n });
        }
        if downlink.len() != n || downlink.iter().any(|row| row.len() != n - 1) {
            return Err(ChannelError::Parse(format!(
                "downlink must be {n} users x {} slots",
                n - 1
            )));
        }
        let positive = |v: f64| !v.is_nan() && v > 0.0;
        if !uplink.iter().copied().all(positive)
            || !downlink.iter().flatten().copied().all(positive)
        {
            return Err(ChannelError::NonPositiveSnr);
        }
        Ok(Self { uplink, downlink })
    }

    /// The 3 dB ladder arrangement anchored at `esn0_db`, the weakest
    /// second-phase SNR at user 1. `uplink_offset_db` shifts every uplink SNR;
    /// 20 reproduces the asymmetric scenario where the source-to-relay links
    /// are 20 dB better.
    pub fn ladder(n_users: usize, esn0_db: f64, uplink_offset_db: f64) -> Result<Self, ChannelError> {
        if n_users < 2 {
            return Err(ChannelError::TooFewUsers { got: n_users });
        }
        let uplink = (1..=n_users)
            .map(|k| db_to_linear(esn0_db + uplink_offset_db + 3.0 * (k as f64 - n_users as f64)))
            .collect();
        let downlink = (1..=n_users)
            .map(|i| {
                (1..=n_users - 1)
                    .map(|k| {
                        db_to_linear(
                            esn0_db
                                + 3.0 * (n_users as f64 - 1.0 - k as f64)
                                + 3.0 * (i as f64 - 1.0),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(Self { uplink, downlink })
    }

    pub fn n_users(&self) -> usize {
        self.uplink.len()
    }

    /// Uplink SNR of `user` (1-based) at the relay, linear.
    pub fn uplink(&self, user: usize) -> f64 {
        self.uplink[user - 1]
    }

    /// Downlink SNR at `user` in broadcast `slot` (both 1-based), linear.
    pub fn downlink(&self, user: usize, slot: usize) -> f64 {
        self.downlink[user - 1][slot - 1]
    }

    /// The detect-and-forward comparison profile under the shared power
    /// budget: the relay keeps its descending slot sequence and continues it
    /// one more 3 dB step for the extra slot (N downlink slots total), and
    /// every per-slot power — uplink and downlink — is scaled by
    /// (2N−1)/(2N), the slot-count ratio of the two schemes.
    pub fn no_nc(&self) -> NoNcProfile {
        let n = self.n_users();
        let scale = (2 * n - 1) as f64 / (2 * n) as f64;
        let uplink: Vec<f64> = self.uplink.iter().map(|g| g * scale).collect();
        // One more slot at the bottom of each user's ladder: slot N sits one
        // step (the profile's own last-step ratio, 3 dB for ladder profiles)
        // below slot N−1.
        let downlink: Vec<Vec<f64>> = self
            .downlink
            .iter()
            .map(|row| {
                let mut slots: Vec<f64> = row.iter().map(|g| g * scale).collect();
                let last = row[n - 2];
                let ratio = if n >= 3 { row[n - 3] / row[n - 2] } else { f64::NAN };
                let step = if ratio.is_finite() && ratio > 0.0 {
                    ratio
                } else {
                    db_to_linear(3.0)
                };
                slots.push(last / step * scale);
                slots
            })
            .collect();
        NoNcProfile { uplink, downlink }
    }

    // -----------------------------------------------------------------------
    // Key/value text format: `n_users=`, `uplink_db=` (comma list),
    // `downlink_db_user_i=` per user. Values in dB.
    // -----------------------------------------------------------------------

    pub fn to_text(&self) -> String {
        let n = self.n_users();
        let mut out = format!("n_users={n}\n");
        let ups: Vec<String> = self.uplink.iter().map(|g| linear_to_db(*g).to_string()).collect();
        out.push_str(&format!("uplink_db={}\n", ups.join(",")));
        for i in 1..=n {
            let downs: Vec<String> = self.downlink[i - 1]
                .iter()
                .map(|g| linear_to_db(*g).to_string())
                .collect();
            out.push_str(&format!("downlink_db_user_{i}={}\n", downs.join(",")));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, ChannelError> {
        let mut n_users: Option<usize> = None;
        let mut uplink_db: Option<Vec<f64>> = None;
        let mut downlink_db: Vec<Option<Vec<f64>>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ChannelError::Parse(format!("expected key=value, got {line:?}")))?;
            let key = key.trim();
            let value = value.trim();
            if key == "n_users" {
                let n: usize = value
                    .parse()
                    .map_err(|_| ChannelError::Parse(format!("bad n_users {value:?}")))?;
                if n < 2 {
                    return Err(ChannelError::TooFewUsers { got: n });
                }
                n_users = Some(n);
                downlink_db.resize(n, None);
            } else if key == "uplink_db" {
                uplink_db = Some(parse_db_list(value)?);
            } else if let Some(idx) = key.strip_prefix("downlink_db_user_") {
                let user: usize = idx
                    .parse()
                    .map_err(|_| ChannelError::Parse(format!("bad user index in {key:?}")))?;
                let n = n_users
                    .ok_or_else(|| ChannelError::Parse("n_users must come first".to_string()))?;
                if user == 0 || user > n {
                    return Err(ChannelError::Parse(format!("user index {user} out of range")));
                }
                downlink_db[user - 1] = Some(parse_db_list(value)?);
            } else {
                return Err(ChannelError::Parse(format!("unknown key {key:?}")));
            }
        }
        let n = n_users.ok_or_else(|| ChannelError::Parse("missing n_users".to_string()))?;
        let uplink_db =
            uplink_db.ok_or_else(|| ChannelError::Parse("missing uplink_db".to_string()))?;
        if uplink_db.len() != n {
            return Err(ChannelError::Parse(format!(
                "uplink_db must list {n} values, got {}",
                uplink_db.len()
            )));
        }
        let mut downlink = Vec::with_capacity(n);
        for (i, row) in downlink_db.into_iter().enumerate() {
            let row = row.ok_or_else(|| {
                ChannelError::Parse(format!("missing downlink_db_user_{}", i + 1))
            })?;
            if row.len() != n - 1 {
                return Err(ChannelError::Parse(format!(
                    "downlink_db_user_{} must list {} values, got {}",
                    i + 1,
                    n - 1,
                    row.len()
                )));
            }
            downlink.push(row.into_iter().map(db_to_linear).collect());
        }
        Self::new(uplink_db.into_iter().map(db_to_linear).collect(), downlink)
    }
}

fn parse_db_list(value: &str) -> Result<Vec<f64>, ChannelError> {
    value
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| ChannelError::Parse(format!("bad dB value {tok:?}")))
        })
        .collect()
}

/// SNRs for the detect-and-forward scheme: N uplink slots and N downlink
/// slots per round (slot i carries user i's bit).
#[derive(Debug, Clone, PartialEq)]
pub struct NoNcProfile {
    uplink: Vec<f64>,
    downlink: Vec<Vec<f64>>,
}

impl NoNcProfile {
    pub fn n_users(&self) -> usize {
        self.uplink.len()
    }

    pub fn uplink(&self, user: usize) -> f64 {
        self.uplink[user - 1]
    }

    /// SNR at `user` during the forwarding slot for `source`'s bit.
    pub fn downlink(&self, user: usize, source: usize) -> f64 {
        self.downlink[user - 1][source - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sep_endpoints_and_reference_value() {
        assert_eq!(bpsk_rayleigh_sep(0.0), 0.5);
        assert!(bpsk_rayleigh_sep(1e12) < 1e-6);
        // γ = 10 dB.
        let p = bpsk_rayleigh_sep(10.0);
        assert!((p - 0.023268).abs() < 1e-5, "got {p}");
    }

    #[test]
    fn sep_strictly_decreasing() {
        let mut prev = bpsk_rayleigh_sep(db_to_linear(-10.0));
        for step in 1..=60 {
            let cur = bpsk_rayleigh_sep(db_to_linear(-10.0 + step as f64));
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn modulate_demap_round_trip() {
        assert_eq!(modulate(0), 1.0);
        assert_eq!(modulate(1), -1.0);
        for bit in 0..=1u8 {
            assert_eq!(demap(modulate(bit)), bit);
        }
    }

    #[test]
    fn ladder_matches_reference_points() {
        let p = SnrProfile::ladder(4, 0.0, 0.0).unwrap();
        // Downlink slot SNRs at user 1: {6, 3, 0} dB.
        for (slot, want_db) in [(1, 6.0), (2, 3.0), (3, 0.0)] {
            assert!((linear_to_db(p.downlink(1, slot)) - want_db).abs() < 1e-9);
        }
        // Uplink: {-9, -6, -3, 0} dB.
        for (user, want_db) in [(1, -9.0), (2, -6.0), (3, -3.0), (4, 0.0)] {
            assert!((linear_to_db(p.uplink(user)) - want_db).abs() < 1e-9);
        }
    }

    #[test]
    fn ladder_uplink_offset_is_additive() {
        let base = SnrProfile::ladder(5, 7.0, 0.0).unwrap();
        let shifted = SnrProfile::ladder(5, 7.0, 20.0).unwrap();
        for user in 1..=5 {
            let delta = linear_to_db(shifted.uplink(user)) - linear_to_db(base.uplink(user));
            assert!((delta - 20.0).abs() < 1e-9);
            for slot in 1..=4 {
                assert_eq!(base.downlink(user, slot), shifted.downlink(user, slot));
            }
        }
    }

    #[test]
    fn ladder_orderings_for_optimizer_assumptions() {
        let p = SnrProfile::ladder(5, 10.0, 0.0).unwrap();
        for k in 1..5 {
            assert!(p.uplink(k) < p.uplink(k + 1));
        }
        for i in 1..=5 {
            for k in 1..4 {
                assert!(p.downlink(i, k) > p.downlink(i, k + 1));
            }
        }
        // Cross-user ordering behind the bound-gap inequality: user 1's
        // downlink error rate in slot k exceeds user k+1's.
        for k in 1..=3 {
            assert!(
                bpsk_rayleigh_sep(p.downlink(1, k)) > bpsk_rayleigh_sep(p.downlink(k + 1, k))
            );
        }
    }

    #[test]
    fn ladder_rejects_single_user() {
        assert!(matches!(
            SnrProfile::ladder(1, 0.0, 0.0),
            Err(ChannelError::TooFewUsers { .. })
        ));
    }

    #[test]
    fn no_nc_extends_and_scales() {
        let n = 4;
        let p = SnrProfile::ladder(n, 0.0, 0.0).unwrap();
        let q = p.no_nc();
        let scale = (2 * n - 1) as f64 / (2 * n) as f64;
        for user in 1..=n {
            assert!((q.uplink(user) - p.uplink(user) * scale).abs() < 1e-12);
            for slot in 1..=n - 1 {
                assert!((q.downlink(user, slot) - p.downlink(user, slot) * scale).abs() < 1e-12);
            }
            // Extra slot continues the 3 dB descent.
            let want = p.downlink(user, n - 1) / db_to_linear(3.0) * scale;
            assert!((q.downlink(user, n) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn profile_text_round_trip() {
        let p = SnrProfile::ladder(3, 5.0, 20.0).unwrap();
        let text = p.to_text();
        let back = SnrProfile::parse_text(&text).unwrap();
        for user in 1..=3 {
            assert!((back.uplink(user) - p.uplink(user)).abs() / p.uplink(user) < 1e-12);
            for slot in 1..=2 {
                let (a, b) = (back.downlink(user, slot), p.downlink(user, slot));
                assert!((a - b).abs() / b < 1e-12);
            }
        }
        assert!(SnrProfile::parse_text("n_users=2\nuplink_db=0").is_err());
        assert!(SnrProfile::parse_text("nonsense").is_err());
        assert!(SnrProfile::parse_text("n_users=2\nuplink_db=0,3\nbogus_key=1").is_err());
    }

    #[test]
    fn transmit_detect_noiseless_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut flips = 0u32;
        for trial in 0..100_000u32 {
            let bit = (trial & 1) as u8;
            if transmit_detect(bit, 1e9, &mut rng) != bit {
                flips += 1;
            }
        }
        assert!((flips as f64) < 10.0, "flip rate too high: {flips}");
    }

    #[test]
    fn transmit_detect_matches_analytic_sep_at_unit_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 1_000_000u32;
        let mut flips = 0u32;
        for trial in 0..trials {
            let bit = (trial & 1) as u8;
            if transmit_detect(bit, 1.0, &mut rng) != bit {
                flips += 1;
            }
        }
        let p_hat = flips as f64 / trials as f64;
        let p = bpsk_rayleigh_sep(1.0); // 1/2 − 1/(2√2) ≈ 0.14645
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (p_hat - p).abs() < 3.0 * sigma,
            "p_hat {p_hat} vs {p} (3σ = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn transmit_detect_matches_analytic_sep_on_grid() {
        for (idx, db) in [-5.0, 0.0, 5.0, 10.0, 15.0, 20.0].into_iter().enumerate() {
            let gamma = db_to_linear(db);
            let p = bpsk_rayleigh_sep(gamma);
            let trials = 1_000_000u32;
            let mut rng = ChaCha8Rng::seed_from_u64(100 + idx as u64);
            let mut flips = 0u32;
            for trial in 0..trials {
                let bit = (trial & 1) as u8;
                if transmit_detect(bit, gamma, &mut rng) != bit {
                    flips += 1;
                }
            }
            let p_hat = flips as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (p_hat - p).abs() < 3.0 * sigma,
                "{db} dB: p_hat {p_hat} vs {p}"
            );
        }
    }

    #[test]
    fn transmit_detect_replays_identically() {
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..1000u32 {
            let bit = (trial % 2) as u8;
            assert_eq!(
                transmit_detect(bit, 2.5, &mut a),
                transmit_detect(bit, 2.5, &mut b)
            );
        }
    }
}
