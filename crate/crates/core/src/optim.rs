//! Derivative-free simplex minimization (Nelder–Mead with dimension-adaptive
//! coefficients).

pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
}

pub(crate) struct NelderMead {
    pub step: f64,
    pub max_evals: usize,
    /// Stop once the spread of simplex values drops below this.
    pub f_tol: f64,
}

impl NelderMead {
    pub fn minimize(&self, f: &impl Fn(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let nf = n as f64;
        let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
        let (rho, sigma) = (0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.step;
            let v = f(&x);
            simplex.push((x, v));
        }
        let mut evals = n + 1;

        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect()
        };

        while evals < self.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            if (worst - best).abs() <= self.f_tol {
                break;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }

            // centroid + t·(centroid − worst) written as a lerp from the centroid.
            let reflected = lerp(&centroid, &simplex[n].0, -alpha);
            let fr = f(&reflected);
            evals += 1;

            if fr < best {
                let expanded = lerp(&centroid, &simplex[n].0, -gamma);
                let fe = f(&expanded);
                evals += 1;
                simplex[n] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }

            let (contracted, fc) = if fr < worst {
                let x = lerp(&centroid, &reflected, rho);
                let v = f(&x);
                (x, v)
            } else {
                let x = lerp(&centroid, &simplex[n].0, rho);
                let v = f(&x);
                (x, v)
            };
            evals += 1;
            if fc < worst.min(fr) {
                simplex[n] = (contracted, fc);
                continue;
            }

            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x = lerp(&anchor, &vertex.0, sigma);
                let v = f(&x);
                *vertex = (x, v);
            }
            evals += n;
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let nm = NelderMead {
            step: 0.5,
            max_evals: 20_000,
            f_tol: 1e-20,
        };
        let m = nm.minimize(&f, &[-1.2, 1.0]);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadratic_nine_dims() {
        let f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i + 1) as f64 * v * v)
                .sum()
        };
        let nm = NelderMead {
            step: 1.0,
            max_evals: 50_000,
            f_tol: 1e-24,
        };
        let m = nm.minimize(&f, &[1.0; 9]);
        assert!(m.value < 1e-16, "{}", m.value);
    }
}
