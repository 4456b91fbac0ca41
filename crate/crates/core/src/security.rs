//! Key-guessing and ciphertext-mixedness experiments for the one-time pad.
//!
//! Trace distance to `I/3^n` and base-3 entropy of the key-averaged ciphertext
//! are reported as proxies for how much a ciphertext reveals; no threshold is
//! imposed on them.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{trace_distance, von_neumann_entropy, CMat, DensityMatrix, QState, C64};
use crate::otp::{enc_operator, key_probability, key_space_size, keygen, Key};
use crate::sampling::random_state;

/// Largest register for exhaustive key enumeration.
pub const MAX_EXHAUSTIVE_QUTRITS: usize = 2;
pub const MIN_TRIALS: usize = 1000;

fn check_small(n: usize) -> Result<()> {
    if n == 0 || n > MAX_EXHAUSTIVE_QUTRITS {
        return Err(Error::invalid(format!(
            "exhaustive key enumeration supports 1..={MAX_EXHAUSTIVE_QUTRITS} qutrits, got {n}"
        )));
    }
    Ok(())
}

/// `3^(−3n) Σ_k U_k ρ U_k†` over every key.
pub fn average_ciphertext(plaintext: &DensityMatrix) -> Result<DensityMatrix> {
    let n = plaintext.n();
    check_small(n)?;
    let dim = plaintext.dim();
    let mut acc = CMat::zeros(dim, dim);
    for key in Key::enumerate(n)? {
        acc = &acc + &plaintext.matrix().conjugate_by(&enc_operator(&key));
    }
    let avg = acc.scale(C64::new(key_probability(n), 0.0));
    DensityMatrix::new(avg)
}

/// Who the adversary guesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adversary {
    Uniform,
    /// Always guesses the key with this index.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuessEstimate {
    pub trials: usize,
    pub hits: usize,
    pub rate: f64,
    /// Standard error of `rate`.
    pub stderr: f64,
    /// `3^(−3n)`.
    pub expected: f64,
}

impl GuessEstimate {
    /// Standard deviation of the rate under the uniform-key hypothesis.
    pub fn sigma(&self) -> f64 {
        (self.expected * (1.0 - self.expected) / self.trials as f64).sqrt()
    }

    /// `|rate − expected| ≤ k·σ`.
    pub fn within_sigmas(&self, k: f64) -> bool {
        (self.rate - self.expected).abs() <= k * self.sigma()
    }
}

/// Draws uniform keys and counts how often the adversary's guess is correct.
pub fn guess_experiment<R: Rng + ?Sized>(
    n: usize,
    trials: usize,
    adversary: Adversary,
    rng: &mut R,
) -> Result<GuessEstimate> {
    check_small(n)?;
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!(
            "at least {MIN_TRIALS} trials are required, got {trials}"
        )));
    }
    let space = key_space_size(n).expect("small register") as usize;
    if let Adversary::Fixed(g) = adversary {
        if g >= space {
            return Err(Error::invalid(format!(
                "guess index {g} outside key space of {space}"
            )));
        }
    }
    let mut hits = 0;
    for _ in 0..trials {
        let key = keygen(n, rng)?.index();
        let guess = match adversary {
            Adversary::Uniform => rng.random_range(0..space),
            Adversary::Fixed(g) => g,
        };
        hits += usize::from(key == guess);
    }
    let rate = hits as f64 / trials as f64;
    Ok(GuessEstimate {
        trials,
        hits,
        rate,
        stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
        expected: key_probability(n),
    })
}

/// Trials used by [`security_report`].
pub fn default_trials(n: usize) -> usize {
    match n {
        1 => 270_000,
        _ => 1_000_000,
    }
}

#[derive(Debug, Clone)]
pub struct SecurityReport {
    pub n: usize,
    pub key_space: u128,
    pub p_k: f64,
    pub guess: GuessEstimate,
    /// Computed for `|0…0⟩`.
    pub basis_trace_distance: f64,
    pub basis_entropy: f64,
    pub samples: usize,
    /// Means over the sampled pure plaintexts.
    pub avg_ciphertext_trace_distance: f64,
    pub avg_ciphertext_entropy: f64,
}

fn mixedness(plain: &DensityMatrix) -> Result<(f64, f64)> {
    let avg = average_ciphertext(plain)?;
    let td = trace_distance(&avg, &DensityMatrix::maximally_mixed(plain.n()))?;
    Ok((td, von_neumann_entropy(&avg)?))
}

pub fn security_report<R: Rng + ?Sized>(
    n: usize,
    sample_plaintexts: usize,
    rng: &mut R,
) -> Result<SecurityReport> {
    check_small(n)?;
    if sample_plaintexts == 0 {
        return Err(Error::invalid("at least one plaintext sample is required"));
    }
    let guess = guess_experiment(n, default_trials(n), Adversary::Uniform, rng)?;
    let (basis_td, basis_s) = mixedness(&DensityMatrix::from_pure(&QState::basis(&vec![0; n])?))?;
    let (mut td_sum, mut s_sum) = (0.0, 0.0);
    for _ in 0..sample_plaintexts {
        let (td, s) = mixedness(&DensityMatrix::from_pure(&random_state(n, rng)))?;
        td_sum += td;
        s_sum += s;
    }
    let k = sample_plaintexts as f64;
    Ok(SecurityReport {
        n,
        key_space: key_space_size(n).expect("small register"),
        p_k: key_probability(n),
        guess,
        basis_trace_distance: basis_td,
        basis_entropy: basis_s,
        samples: sample_plaintexts,
        avg_ciphertext_trace_distance: td_sum / k,
        avg_ciphertext_entropy: s_sum / k,
    })
}

impl fmt::Display for SecurityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zeros = "0".repeat(self.n);
        let rows = [
            ("qutrits".to_string(), self.n.to_string()),
            ("key space".to_string(), self.key_space.to_string()),
            (
                format!("p_k = 1/{}", self.key_space),
                format!("{:.6e} ({:.4}%)", self.p_k, 100.0 * self.p_k),
            ),
            (
                "empirical guess rate".to_string(),
                format!(
                    "{:.6e} ± {:.2e} ({} trials, {:+.2}σ from p_k)",
                    self.guess.rate,
                    self.guess.stderr,
                    self.guess.trials,
                    (self.guess.rate - self.guess.expected) / self.guess.sigma()
                ),
            ),
            (
                format!("trace distance to I, |{zeros}>"),
                format!("{:.6}", self.basis_trace_distance),
            ),
            (
                format!("entropy (base 3), |{zeros}>"),
                format!("{:.6}", self.basis_entropy),
            ),
            (
                "mean trace distance to I".to_string(),
                format!(
                    "{:.6} ({} random plaintexts)",
                    self.avg_ciphertext_trace_distance, self.samples
                ),
            ),
            (
                "mean entropy (base 3)".to_string(),
                format!("{:.6} (maximum {})", self.avg_ciphertext_entropy, self.n),
            ),
        ];
        for (i, (label, value)) in rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{label:<32} {value}")?;
        }
        Ok(())
    }
}
