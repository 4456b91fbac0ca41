//! The ternary quantum one-time pad.
//!
//! Each qutrit carries a key triple `(α, β, δ)` selecting the gates
//! `X^(α) H^(β) Z^(δ)`, where the superscript picks a level pair (`0 → 01`,
//! `1 → 02`, `2 → 12`) or, for `Z`, the phased level. The superscripts are
//! never exponents. The encryption operator is the tensor product of the
//! per-qutrit operators.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::{th, tx, tz, LevelPair};
use crate::linalg::{apply, kron_all, CMat, DensityMatrix, QState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyTriple {
    pub alpha: u8,
    pub beta: u8,
    pub delta: u8,
}

impl KeyTriple {
    pub fn new(alpha: u8, beta: u8, delta: u8) -> Result<Self> {
        if alpha > 2 || beta > 2 || delta > 2 {
            return Err(Error::invalid(format!(
                "key digits must be in 0..=2, got ({alpha}, {beta}, {delta})"
            )));
        }
        Ok(KeyTriple { alpha, beta, delta })
    }

    /// The 27 triples in lexicographic order.
    pub fn all() -> impl Iterator<Item = KeyTriple> + Clone {
        (0..27u8).map(|i| KeyTriple {
            alpha: i / 9,
            beta: (i / 3) % 3,
            delta: i % 3,
        })
    }

    pub fn index(&self) -> usize {
        9 * self.alpha as usize + 3 * self.beta as usize + self.delta as usize
    }

    fn pairs(&self) -> (LevelPair, LevelPair) {
        let p = |d: u8| LevelPair::from_index(d).expect("validated digit");
        (p(self.alpha), p(self.beta))
    }

    /// `X^(α)·H^(β)·Z^(δ)`.
    pub fn operator(&self) -> CMat {
        let (xp, hp) = self.pairs();
        &(&tx(xp) * &th(hp)) * &tz(self.delta)
    }

    /// `Z^(δ)·H^(β)·X^(α)`, the inverse of [`KeyTriple::operator`].
    pub fn inverse_operator(&self) -> CMat {
        let (xp, hp) = self.pairs();
        &(&tz(self.delta) * &th(hp)) * &tx(xp)
    }
}

impl fmt::Display for KeyTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.alpha, self.beta, self.delta)
    }
}

/// One triple per qutrit, first qutrit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Key {
    triples: Vec<KeyTriple>,
}

impl Key {
    pub fn new(triples: Vec<KeyTriple>) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::invalid("a key needs at least one qutrit"));
        }
        Ok(Key { triples })
    }

    pub fn single(alpha: u8, beta: u8, delta: u8) -> Result<Self> {
        Key::new(vec![KeyTriple::new(alpha, beta, delta)?])
    }

    pub fn from_digits(digits: &[(u8, u8, u8)]) -> Result<Self> {
        let triples = digits
            .iter()
            .map(|&(a, b, d)| KeyTriple::new(a, b, d))
            .collect::<Result<_>>()?;
        Key::new(triples)
    }

    pub fn n(&self) -> usize {
        self.triples.len()
    }

    pub fn triples(&self) -> &[KeyTriple] {
        &self.triples
    }

    /// Mixed-radix index in `0..27^n`, first qutrit most significant.
    pub fn index(&self) -> usize {
        self.triples.iter().fold(0, |acc, t| acc * 27 + t.index())
    }

    /// All `27^n` keys in index order.
    pub fn enumerate(n: usize) -> Result<impl Iterator<Item = Key>> {
        if n == 0 {
            return Err(Error::invalid("a key needs at least one qutrit"));
        }
        let total = key_space_size(n)
            .filter(|&s| s <= usize::MAX as u128)
            .ok_or_else(|| Error::invalid(format!("key space for {n} qutrits is too large")))?
            as usize;
        let all: Vec<KeyTriple> = KeyTriple::all().collect();
        Ok((0..total).map(move |mut idx| {
            let mut triples = vec![all[0]; n];
            for slot in triples.iter_mut().rev() {
                *slot = all[idx % 27];
                idx /= 27;
            }
            Key { triples }
        }))
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.triples {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `n` independent uniform triples.
pub fn keygen<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Key> {
    if n == 0 {
        return Err(Error::invalid("a key needs at least one qutrit"));
    }
    let triples = (0..n)
        .map(|_| KeyTriple {
            alpha: rng.random_range(0..3),
            beta: rng.random_range(0..3),
            delta: rng.random_range(0..3),
        })
        .collect();
    Ok(Key { triples })
}

/// `U_k`, the tensor product of the per-qutrit operators.
pub fn enc_operator(k: &Key) -> CMat {
    let ops: Vec<CMat> = k.triples.iter().map(KeyTriple::operator).collect();
    kron_all(&ops)
}

/// `U_k†` built from the reversed gate order.
pub fn dec_operator(k: &Key) -> CMat {
    let ops: Vec<CMat> = k.triples.iter().map(KeyTriple::inverse_operator).collect();
    kron_all(&ops)
}

fn check_width(k: &Key, n: usize) -> Result<()> {
    if k.n() != n {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: n,
        });
    }
    Ok(())
}

pub fn encrypt(k: &Key, s: &QState) -> Result<QState> {
    check_width(k, s.n())?;
    apply(&enc_operator(k), s)
}

pub fn decrypt(k: &Key, s: &QState) -> Result<QState> {
    check_width(k, s.n())?;
    apply(&dec_operator(k), s)
}

pub fn encrypt_density(k: &Key, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_width(k, rho.n())?;
    rho.evolve(&enc_operator(k))
}

pub fn decrypt_density(k: &Key, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_width(k, rho.n())?;
    rho.evolve(&dec_operator(k))
}

/// `27^n`, or `None` past `u128`.
pub fn key_space_size(n: usize) -> Option<u128> {
    27u128.checked_pow(u32::try_from(n).ok()?)
}

/// Probability of guessing a uniformly drawn `n`-qutrit key: `3^(−3n)`.
pub fn key_probability(n: usize) -> f64 {
    3f64.powi(-3 * n as i32)
}
