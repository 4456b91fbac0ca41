//! Nine-parameter factorization of a 3×3 unitary,
//!
//! ```text
//! U = e^{iα} R_y01(β) R_y02(γ) R_y01(δ) R_z01(θ) · R_z02(φ) R_y01(β′) R_y02(γ′) R_y01(δ′)
//! ```
//!
//! [`compose`] builds the product. [`fit`] recovers parameters numerically by
//! simplex search over the squared Frobenius residual with seeded random
//! restarts, evaluated in fixed-size parallel batches so the result does not
//! depend on thread scheduling.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gates::{rotation, Axis, LevelPair};
use crate::linalg::{CMat, C64};
use crate::optim::NelderMead;
use crate::sampling::seeded;

/// The eight rotation factors in product order (leftmost first).
pub const FACTORS: [(Axis, LevelPair); 8] = [
    (Axis::Y, LevelPair::P01),
    (Axis::Y, LevelPair::P02),
    (Axis::Y, LevelPair::P01),
    (Axis::Z, LevelPair::P01),
    (Axis::Z, LevelPair::P02),
    (Axis::Y, LevelPair::P01),
    (Axis::Y, LevelPair::P02),
    (Axis::Y, LevelPair::P01),
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartanParams {
    /// Global phase α.
    pub phase: f64,
    /// β, γ, δ, θ, φ, β′, γ′, δ′: one angle per entry of [`FACTORS`].
    pub angles: [f64; 8],
}

impl CartanParams {
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != 9 {
            return Err(Error::invalid(format!(
                "expected 9 parameters, got {}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("parameters must be finite"));
        }
        let mut angles = [0.0; 8];
        angles.copy_from_slice(&v[1..]);
        Ok(CartanParams {
            phase: v[0],
            angles,
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        std::iter::once(self.phase).chain(self.angles).collect()
    }

    /// Phase reduced mod 2π and angles mod 4π, all into `[-2π, 2π)`.
    pub fn normalized(&self) -> Self {
        let wrap = |x: f64, period: f64| {
            let half = period / 2.0;
            (x + half).rem_euclid(period) - half
        };
        CartanParams {
            phase: wrap(self.phase, 2.0 * PI),
            angles: self.angles.map(|a| wrap(a, 4.0 * PI)),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut angles = [0.0; 8];
        for a in &mut angles {
            *a = rng.random_range(-2.0 * PI..2.0 * PI);
        }
        CartanParams {
            phase: rng.random_range(-PI..PI),
            angles,
        }
    }

    /// The eight rotation matrices, leftmost factor first.
    pub fn factors(&self) -> Vec<CMat> {
        FACTORS
            .iter()
            .zip(self.angles)
            .map(|(&(axis, pair), t)| rotation(axis, pair, t))
            .collect()
    }
}

pub fn compose(p: &CartanParams) -> CMat {
    let prod = p
        .factors()
        .iter()
        .fold(CMat::identity(3), |acc, f| &acc * f);
    prod.scale(C64::from_polar(1.0, p.phase))
}

/// `‖compose(p) − u‖_F`.
pub fn residual(p: &CartanParams, u: &CMat) -> f64 {
    (&compose(p) - u).frobenius_norm()
}

/// Search budget and seed for [`fit`].
#[derive(Debug, Clone)]
pub struct FitConfig {
    pub seed: u64,
    /// Maximum number of random starts.
    pub restarts: usize,
    /// Starts evaluated together; the search stops after the first batch
    /// whose best residual meets the tolerance.
    pub batch: usize,
    pub tolerance: f64,
    /// Simplex rebuilds around the incumbent within one start.
    pub polish_rounds: usize,
    pub evals_per_round: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            seed: 0x7174_7269,
            restarts: 32,
            batch: 8,
            tolerance: 1e-8,
            polish_rounds: 40,
            evals_per_round: 3000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fit {
    pub params: CartanParams,
    pub residual: f64,
    /// Starts actually run.
    pub restarts_used: usize,
}

fn single_start(u: &CMat, cfg: &FitConfig, start: usize) -> (CartanParams, f64) {
    let mut rng = seeded(cfg.seed ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let objective = |x: &[f64]| {
        let p = CartanParams {
            phase: x[0],
            angles: x[1..9].try_into().expect("nine parameters"),
        };
        (&compose(&p) - u)
            .entries()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
    };
    let mut x = CartanParams::random(&mut rng).to_vec();
    let mut value = objective(&x);
    let mut step = 1.0;
    let target = cfg.tolerance * cfg.tolerance * 0.01;
    for _ in 0..cfg.polish_rounds {
        let nm = NelderMead {
            step,
            max_evals: cfg.evals_per_round,
            f_tol: target * 1e-3,
        };
        let m = nm.minimize(&objective, &x);
        let improved = m.value < value;
        if improved {
            x = m.x;
            value = m.value;
        }
        if value <= target {
            break;
        }
        // Rebuild the simplex at a scale matched to the remaining residual.
        step = if improved {
            (value.sqrt() * 2.0).clamp(1e-9, 1.0)
        } else {
            (step * 0.25).max(1e-9)
        };
    }
    let params = CartanParams::from_slice(&x)
        .expect("optimizer keeps nine finite parameters")
        .normalized();
    let r = residual(&params, u);
    (params, r)
}

fn lexicographic(a: &CartanParams, b: &CartanParams) -> std::cmp::Ordering {
    a.to_vec()
        .iter()
        .zip(b.to_vec().iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Recovers parameters with `residual(params, u) ≤ cfg.tolerance`, or reports
/// [`Error::NoConvergence`] once the restart budget is spent.
///
/// Among all completed starts the minimal residual wins; exact ties go to the
/// lexicographically smallest parameter vector.
pub fn fit(u: &CMat, cfg: &FitConfig) -> Result<Fit> {
    if u.rows() != 3 || u.cols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: u.rows(),
        });
    }
    let defect = u.unitarity_defect();
    if defect > 1e-8 {
        return Err(Error::NotUnitary { drift: defect });
    }
    let batch = cfg.batch.max(1);
    let mut best: Option<(CartanParams, f64)> = None;
    let mut used = 0;
    while used < cfg.restarts {
        let end = (used + batch).min(cfg.restarts);
        let results: Vec<(CartanParams, f64)> = (used..end)
            .into_par_iter()
            .map(|s| single_start(u, cfg, s))
            .collect();
        used = end;
        for cand in results {
            let better = match &best {
                None => true,
                Some((bp, br)) => {
                    cand.1 < *br || (cand.1 == *br && lexicographic(&cand.0, bp).is_lt())
                }
            };
            if better {
                best = Some(cand);
            }
        }
        if let Some((params, r)) = best {
            if r <= cfg.tolerance {
                return Ok(Fit {
                    params,
                    residual: r,
                    restarts_used: used,
                });
            }
        }
    }
    Err(Error::NoConvergence {
        restarts: used,
        residual: best.map_or(f64::INFINITY, |b| b.1),
    })
}
