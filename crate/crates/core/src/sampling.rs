//! Seeded random sources and random test inputs (states, Haar unitaries,
//! density matrices).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::Circuit;
use crate::gates::{Axis, GateSpec, LevelPair, ShiftKind};
use crate::linalg::{pow3, CMat, DensityMatrix, QState, C64};

/// Deterministic generator: the same seed yields the same stream.
pub type RandomSource = ChaCha8Rng;

pub fn seeded(seed: u64) -> RandomSource {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly random pure state (normalized complex Gaussian vector).
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QState {
    loop {
        let amps: Vec<C64> = (0..pow3(n)).map(|_| gaussian_complex(rng)).collect();
        if let Ok(s) = QState::normalized(n, amps) {
            return s;
        }
    }
}

/// Haar-random unitary: Gram–Schmidt on the columns of a complex Gaussian
/// matrix. The implied R factor has a positive real diagonal, which is the
/// phase correction that makes the distribution Haar.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let mut cols: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..dim).map(|_| gaussian_complex(rng)).collect())
        .collect();
    for k in 0..dim {
        for j in 0..k {
            let (done, rest) = cols.split_at_mut(k);
            let qj = &done[j];
            let proj: C64 = qj.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            for (x, q) in rest[0].iter_mut().zip(qj) {
                *x -= proj * q;
            }
        }
        let norm = cols[k].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols[k].iter_mut().for_each(|x| *x /= norm);
    }
    let mut m = CMat::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    m
}

/// Random full-rank mixed state `G G† / tr(G G†)` with Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let d = pow3(n);
    let g = CMat::from_vec(d, d, (0..d * d).map(|_| gaussian_complex(rng)).collect());
    let mut w = &g * &g.dagger();
    let tr = w.trace().re;
    w = w.scale(C64::new(1.0 / tr, 0.0));
    // Hermitize away rounding so validation always holds.
    let h = (&w + &w.dagger()).scale(C64::new(0.5, 0.0));
    DensityMatrix::from_parts(n, h)
}

/// Angle uniformly distributed in `[-2π, 2π)`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI)
}

/// Random circuit mixing one-qutrit gates with two-qutrit GCX, TKCNOT and
/// TSUM placements.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let pair = LevelPair::ALL[rng.random_range(0..3)];
        let one = rng.random_range(0..3);
        let two_qutrit = n >= 2 && rng.random_bool(0.5);
        if two_qutrit {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let spec = match rng.random_range(0..3) {
                0 => GateSpec::Gcx {
                    control_value: one as u8,
                    pair,
                },
                1 => GateSpec::Tkcnot { controls: 1 },
                _ => GateSpec::Feynman,
            };
            c.add(spec, &[a, b]).unwrap();
        } else {
            let w = rng.random_range(0..n);
            let spec = match rng.random_range(0..5) {
                0 => GateSpec::Tx(pair),
                1 => GateSpec::Th(pair),
                2 => GateSpec::Tz(one as u8),
                3 => GateSpec::Shift(ShiftKind::ALL[rng.random_range(0..6)]),
                _ => GateSpec::Rot([Axis::X, Axis::Y, Axis::Z][one], pair, random_angle(rng)),
            };
            c.add(spec, &[w]).unwrap();
        }
    }
    c
}
