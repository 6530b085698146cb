//! Derivative-free local minimisation (Nelder–Mead) inside a box.

/// Outcome of a simplex run.
#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Initial simplex edge, relative to the box width per coordinate.
    pub initial_step: f64,
    /// Stop once the simplex spread in function values falls below this.
    pub f_tol: f64,
    /// Stop once every simplex edge is shorter than this.
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { max_iterations: 200, initial_step: 0.02, f_tol: 1e-24, x_tol: 1e-13 }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    /// Minimise `f` from `start`, projecting trial points onto `[lo, hi]`.
    pub fn minimize<F>(&self, f: F, start: &[f64], lo: &[f64], hi: &[f64]) -> Minimum
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = start.len();
        let project = |p: &mut Vec<f64>| {
            for i in 0..n {
                p[i] = p[i].clamp(lo[i], hi[i]);
            }
        };
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(start.to_vec());
        for i in 0..n {
            let mut p = start.to_vec();
            let step = self.initial_step * (hi[i] - lo[i]);
            p[i] = if p[i] + step <= hi[i] { p[i] + step } else { p[i] - step };
            project(&mut p);
            simplex.push(p);
        }
        let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

        let mut iterations = 0;
        while iterations < self.max_iterations {
            iterations += 1;
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = values[n] - values[0];
            let size = simplex[1..]
                .iter()
                .map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= self.f_tol || size <= self.x_tol {
                break;
            }

            let mut centroid = vec![0.0; n];
            for p in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(p) {
                    *c += v / n as f64;
                }
            }
            let along = |coef: f64| -> Vec<f64> {
                let mut p: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[n])
                    .map(|(c, w)| c + coef * (c - w))
                    .collect();
                project(&mut p);
                p
            };

            let reflected = along(REFLECT);
            let f_r = f(&reflected);
            if f_r < values[0] {
                let expanded = along(EXPAND);
                let f_e = f(&expanded);
                if f_e < f_r {
                    simplex[n] = expanded;
                    values[n] = f_e;
                } else {
                    simplex[n] = reflected;
                    values[n] = f_r;
                }
                continue;
            }
            if f_r < values[n - 1] {
                simplex[n] = reflected;
                values[n] = f_r;
                continue;
            }
            let (contracted, f_c) = if f_r < values[n] {
                let p = along(CONTRACT);
                let v = f(&p);
                (p, v)
            } else {
                let p = along(-CONTRACT);
                let v = f(&p);
                (p, v)
            };
            if f_c < values[n].min(f_r) {
                simplex[n] = contracted;
                values[n] = f_c;
                continue;
            }
            // Stagnation: shrink towards the best vertex.
            let best = simplex[0].clone();
            for i in 1..=n {
                for (v, b) in simplex[i].iter_mut().zip(&best) {
                    *v = b + SHRINK * (*v - b);
                }
                values[i] = f(&simplex[i]);
            }
        }
        let (best, _) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("simplex is nonempty");
        Minimum { x: simplex[best].clone(), value: values[best], iterations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |p: &[f64]| (p[0] - 0.3).powi(2) + 4.0 * (p[1] - 0.7).powi(2);
        let m = NelderMead::default().minimize(f, &[0.5, 0.5], &[0.0, 0.0], &[1.0, 1.0]);
        assert!((m.x[0] - 0.3).abs() < 1e-7 && (m.x[1] - 0.7).abs() < 1e-7, "{m:?}");
    }

    #[test]
    fn respects_bounds() {
        let f = |p: &[f64]| (p[0] + 1.0).powi(2);
        let m = NelderMead::default().minimize(f, &[0.5], &[0.0], &[1.0]);
        assert!(m.x[0] >= 0.0 && m.x[0] < 1e-6);
    }

    #[test]
    fn rosenbrock_progress() {
        let f = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let nm = NelderMead { max_iterations: 2000, ..Default::default() };
        let m = nm.minimize(f, &[-1.2, 1.0], &[-2.0, -2.0], &[2.0, 2.0]);
        assert!(m.value < 1e-10, "{m:?}");
    }
}
