//! Homomorphic evaluation on one-time-pad ciphertexts.
//!
//! Every scheme evaluates a target operation `T` on a ciphertext by applying the
//! key-conjugated operator `U_k·T·U_k†`; decrypting the result yields `T`
//! applied to the plaintext. The four schemes differ in which targets they
//! accept:
//!
//! 1. single rotations `R_y` / `R_z` on levels `01` or `02`;
//! 2. arbitrary one-qutrit unitaries, directly or as a product of eight
//!    scheme-1 operators obtained from a [`cartan`](crate::cartan) fit;
//! 3. a GCX gate on two qutrits, either with the τ correction (which needs the
//!    plaintext control value) or as the full controlled unitary;
//! 4. arbitrary circuits on `n` qutrits.
//!
//! [`evaluate`] sees only the job (key-derived operators) and the ciphertext.

use crate::cartan::{fit, CartanParams, FitConfig, FACTORS};
use crate::circuit::{circuit_unitary, Circuit};
use crate::error::{Error, Result};
use crate::gates::{gcx, rotation, tx, Axis, LevelPair};
use crate::linalg::{apply, kron, CMat, DensityMatrix, QState, C64};
use crate::otp::{
    dec_operator, decrypt, decrypt_density, enc_operator, encrypt, encrypt_density, Key,
};

/// The correction `τ = f(m′, m)` of the GCX scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tau {
    Identity,
    XDagger(LevelPair),
}

impl Tau {
    pub fn new(m_prime: u8, m: u8, pair: LevelPair) -> Self {
        if m_prime == m {
            Tau::Identity
        } else {
            Tau::XDagger(pair)
        }
    }

    pub fn matrix(&self) -> CMat {
        match *self {
            Tau::Identity => CMat::identity(3),
            Tau::XDagger(pair) => tx(pair).dagger(),
        }
    }
}

pub fn tau(m_prime: u8, m: u8, pair: LevelPair) -> Result<CMat> {
    check_level(m_prime)?;
    check_level(m)?;
    Ok(Tau::new(m_prime, m, pair).matrix())
}

#[derive(Debug, Clone)]
pub enum EvalJob {
    Scheme1 {
        key: Key,
        axis: Axis,
        pair: LevelPair,
        theta: f64,
    },
    Scheme2 {
        key: Key,
        target: CMat,
    },
    /// `m = Some(level)` selects the τ-corrected operator, which needs the
    /// plaintext control value; `None` selects the full controlled unitary.
    Scheme3 {
        key: Key,
        m_prime: u8,
        pair: LevelPair,
        m: Option<u8>,
    },
    Scheme4 {
        key: Key,
        circuit: Circuit,
    },
}

fn check_level(l: u8) -> Result<()> {
    if l > 2 {
        return Err(Error::invalid(format!("level {l} is not in 0..=2")));
    }
    Ok(())
}

fn check_key_width(key: &Key, n: usize) -> Result<()> {
    if key.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: key.n(),
        });
    }
    Ok(())
}

fn check_rotation(axis: Axis, pair: LevelPair) -> Result<()> {
    if axis == Axis::X || pair == LevelPair::P12 {
        return Err(Error::invalid(format!(
            "rotation scheme supports axes y, z on levels 01, 02; got {}{}",
            axis.label(),
            pair.label()
        )));
    }
    Ok(())
}

impl EvalJob {
    pub fn key(&self) -> &Key {
        match self {
            EvalJob::Scheme1 { key, .. }
            | EvalJob::Scheme2 { key, .. }
            | EvalJob::Scheme3 { key, .. }
            | EvalJob::Scheme4 { key, .. } => key,
        }
    }

    /// Qutrits acted on.
    pub fn width(&self) -> usize {
        match self {
            EvalJob::Scheme1 { .. } | EvalJob::Scheme2 { .. } => 1,
            EvalJob::Scheme3 { .. } => 2,
            EvalJob::Scheme4 { circuit, .. } => circuit.width(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_key_width(self.key(), self.width())?;
        match self {
            EvalJob::Scheme1 {
                axis, pair, theta, ..
            } => {
                check_rotation(*axis, *pair)?;
                if !theta.is_finite() {
                    return Err(Error::invalid("rotation angle must be finite"));
                }
            }
            EvalJob::Scheme2 { target, .. } => check_one_qutrit_unitary(target)?,
            EvalJob::Scheme3 { m_prime, m, .. } => {
                check_level(*m_prime)?;
                if let Some(m) = m {
                    check_level(*m)?;
                }
            }
            EvalJob::Scheme4 { .. } => {}
        }
        Ok(())
    }
}

fn check_one_qutrit_unitary(u: &CMat) -> Result<()> {
    if u.rows() != 3 || u.cols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: u.rows().max(u.cols()),
        });
    }
    let drift = u.unitarity_defect();
    if drift > 1e-8 {
        return Err(Error::NotUnitary { drift });
    }
    Ok(())
}

/// `U_k · t · U_k†`.
fn conjugate(key: &Key, t: &CMat) -> CMat {
    &(&enc_operator(key) * t) * &dec_operator(key)
}

/// The scheme-1 operator `ℜ = U_k·R(θ)·U_k†`.
pub fn hom_rotation(key: &Key, axis: Axis, pair: LevelPair, theta: f64) -> Result<CMat> {
    check_key_width(key, 1)?;
    check_rotation(axis, pair)?;
    Ok(conjugate(key, &rotation(axis, pair, theta)))
}

/// The scheme-2 operator `ℜ_U = U_k·u·U_k†` by direct conjugation.
pub fn hom_general(key: &Key, u: &CMat) -> Result<CMat> {
    check_key_width(key, 1)?;
    check_one_qutrit_unitary(u)?;
    Ok(conjugate(key, u))
}

/// `e^{iα}` times the product of the eight scheme-1 operators of the factors.
pub fn hom_from_params(key: &Key, p: &CartanParams) -> Result<CMat> {
    let mut acc = CMat::identity(3);
    for (&(axis, pair), theta) in FACTORS.iter().zip(p.angles) {
        acc = &acc * &hom_rotation(key, axis, pair, theta)?;
    }
    Ok(acc.scale(C64::from_polar(1.0, p.phase)))
}

/// Scheme-2 operator assembled from a Cartan fit of `u`.
pub fn hom_general_factored(key: &Key, u: &CMat, cfg: &FitConfig) -> Result<CMat> {
    check_key_width(key, 1)?;
    let f = fit(u, cfg)?;
    hom_from_params(key, &f.params)
}

/// The plaintext operation `I₃ ⊗ X^(ij)·τ` of the τ-corrected GCX scheme.
pub fn gcx_target(m_prime: u8, pair: LevelPair, m: u8) -> Result<CMat> {
    Ok(kron(
        &CMat::identity(3),
        &(&tx(pair) * &tau(m_prime, m, pair)?),
    ))
}

/// The τ-corrected scheme-3 operator `X_(ij) = U_k·(I₃ ⊗ X^(ij)τ)·U_k†`.
pub fn hom_gcx(key: &Key, m_prime: u8, pair: LevelPair, m: u8) -> Result<CMat> {
    check_key_width(key, 2)?;
    Ok(conjugate(key, &gcx_target(m_prime, pair, m)?))
}

/// `U_k·GCX(m′)·U_k†` with the full 9×9 controlled gate.
pub fn hom_gcx_full(key: &Key, m_prime: u8, pair: LevelPair) -> Result<CMat> {
    check_key_width(key, 2)?;
    check_level(m_prime)?;
    Ok(conjugate(key, &gcx(m_prime, pair)))
}

/// The scheme-4 operator `C′ = U_k·C·U_k†`.
pub fn hom_circuit(key: &Key, circuit: &Circuit) -> Result<CMat> {
    check_key_width(key, circuit.width())?;
    Ok(conjugate(key, &circuit_unitary(circuit)?))
}

/// The operation the job asks for on the plaintext.
pub fn target_operator(job: &EvalJob) -> Result<CMat> {
    job.validate()?;
    match job {
        EvalJob::Scheme1 {
            axis, pair, theta, ..
        } => Ok(rotation(*axis, *pair, *theta)),
        EvalJob::Scheme2 { target, .. } => Ok(target.clone()),
        EvalJob::Scheme3 {
            m_prime, pair, m, ..
        } => match m {
            Some(m) => gcx_target(*m_prime, *pair, *m),
            None => Ok(gcx(*m_prime, *pair)),
        },
        EvalJob::Scheme4 { circuit, .. } => circuit_unitary(circuit),
    }
}

/// The operator applied to the ciphertext.
pub fn hom_operator(job: &EvalJob) -> Result<CMat> {
    job.validate()?;
    match job {
        EvalJob::Scheme1 {
            key,
            axis,
            pair,
            theta,
        } => hom_rotation(key, *axis, *pair, *theta),
        EvalJob::Scheme2 { key, target } => hom_general(key, target),
        EvalJob::Scheme3 {
            key,
            m_prime,
            pair,
            m,
        } => match m {
            Some(m) => hom_gcx(key, *m_prime, *pair, *m),
            None => hom_gcx_full(key, *m_prime, *pair),
        },
        EvalJob::Scheme4 { key, circuit } => hom_circuit(key, circuit),
    }
}

pub fn evaluate(job: &EvalJob, ciphertext: &QState) -> Result<QState> {
    apply(&hom_operator(job)?, ciphertext)
}

pub fn evaluate_density(job: &EvalJob, ciphertext: &DensityMatrix) -> Result<DensityMatrix> {
    ciphertext.evolve(&hom_operator(job)?)
}

/// Encrypt, evaluate, decrypt.
pub fn run_pipeline(job: &EvalJob, plaintext: &QState) -> Result<QState> {
    let key = job.key();
    let c = encrypt(key, plaintext)?;
    decrypt(key, &evaluate(job, &c)?)
}

pub fn run_pipeline_density(job: &EvalJob, plaintext: &DensityMatrix) -> Result<DensityMatrix> {
    let key = job.key();
    let c = encrypt_density(key, plaintext)?;
    decrypt_density(key, &evaluate_density(job, &c)?)
}
