//! Minimizers shared by the measurement search and the tomography fit:
//! Nelder–Mead, and L-BFGS on a central-difference gradient for polishing.

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter (max-norm) falls below this.
    pub x_tol: f64,
    pub max_iterations: usize,
    /// Dimension-adaptive coefficients (Gao & Han); helps above ~5 parameters.
    pub adaptive: bool,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            f_tol: 1e-12,
            x_tol: 1e-8,
            max_iterations: 20_000,
            adaptive: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `f` starting from `x0` with an axis-aligned initial simplex of
/// edge `step`.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(step.len(), n, "step length must match dimension");
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if opts.adaptive && n > 1 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if step[i] != 0.0 { step[i] } else { 2.5e-4 };
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    while iterations < opts.max_iterations {
        // Order vertices by value; ties keep insertion order.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.abs() <= opts.f_tol && diameter <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for p in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / nf;
            }
        }

        let worst = simplex[n].clone();
        for k in 0..n {
            trial[k] = centroid[k] + alpha * (centroid[k] - worst[k]);
        }
        let fr = eval(&trial);

        if fr < values[0] {
            for k in 0..n {
                trial2[k] = centroid[k] + gamma * (trial[k] - centroid[k]);
            }
            let fe = eval(&trial2);
            if fe < fr {
                simplex[n].copy_from_slice(&trial2);
                values[n] = fe;
            } else {
                simplex[n].copy_from_slice(&trial);
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n].copy_from_slice(&trial);
            values[n] = fr;
            continue;
        }

        // Contraction: outside if the reflection improved on the worst point.
        let outside = fr < values[n];
        for k in 0..n {
            trial2[k] = if outside {
                centroid[k] + rho * (trial[k] - centroid[k])
            } else {
                centroid[k] + rho * (worst[k] - centroid[k])
            };
        }
        let fc = eval(&trial2);
        if (outside && fc <= fr) || (!outside && fc < values[n]) {
            simplex[n].copy_from_slice(&trial2);
            values[n] = fc;
            continue;
        }

        let best = simplex[0].clone();
        for i in 1..=n {
            for k in 0..n {
                simplex[i][k] = best[k] + sigma * (simplex[i][k] - best[k]);
            }
            values[i] = eval(&simplex[i]);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

/// Central-difference gradient with steps scaled to each coordinate.
pub fn central_gradient<F>(f: &F, x: &[f64]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = 1e-6 * x[i].abs().max(1.0);
            p[i] = x[i] + h;
            let up = f(&p);
            p[i] = x[i] - h;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct QuasiNewtonOptions {
    /// Converged when the gradient norm at the result is at most this.
    pub grad_tol: f64,
    pub max_iterations: usize,
    /// Number of stored correction pairs.
    pub memory: usize,
}

impl Default for QuasiNewtonOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            max_iterations: 1_000,
            memory: 8,
        }
    }
}

struct Smooth<'a, F> {
    f: &'a F,
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Smooth<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        Ok((self.f)(p))
    }
}

impl<F: Fn(&[f64]) -> f64> Gradient for Smooth<'_, F> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, p: &Self::Param) -> Result<Vec<f64>, argmin::core::Error> {
        Ok(central_gradient(self.f, p))
    }
}

/// L-BFGS from `x0`; falls back to `x0` if the solver gives up without improving.
pub fn quasi_newton<F>(f: F, x0: &[f64], opts: &QuasiNewtonOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let start_value = f(x0);
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), opts.memory)
        .with_tolerance_grad(opts.grad_tol)
        .expect("non-negative tolerance");
    let run = Executor::new(Smooth { f: &f }, solver)
        .configure(|s| s.param(x0.to_vec()).max_iters(opts.max_iterations as u64))
        .run();
    let (x, value, iterations) = match run {
        Ok(r) => {
            let st = r.state();
            match st.get_best_param() {
                Some(p) if st.get_best_cost() <= start_value => {
                    (p.clone(), st.get_best_cost(), st.get_iter() as usize)
                }
                _ => (x0.to_vec(), start_value, st.get_iter() as usize),
            }
        }
        Err(_) => (x0.to_vec(), start_value, 0),
    };
    let grad_norm = central_gradient(&f, &x).iter().map(|g| g * g).sum::<f64>().sqrt();
    Minimum {
        converged: grad_norm <= opts.grad_tol,
        x,
        value,
        iterations,
    }
}
