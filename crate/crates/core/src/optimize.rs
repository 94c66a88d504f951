//! Bounded derivative-free minimization (Nelder–Mead simplex).
//!
//! Used by the GP hyperparameter search, which needs a robust local method
//! in a low-dimensional box without gradient code. Points proposed outside
//! the box are projected back onto it.

/// Options for the simplex search.
#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Stop when the simplex's function-value spread falls below this.
    pub f_tol: f64,
    /// Stop when the simplex collapses below this edge length.
    pub x_tol: f64,
    /// Relative size of the initial simplex within each bound interval.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iters: 400,
            f_tol: 1e-9,
            x_tol: 1e-9,
            initial_step: 0.1,
        }
    }
}

/// Result of a simplex run.
#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iters: usize,
    pub evals: usize,
}

fn clamp_to(bounds: &[(f64, f64)], x: &mut [f64]) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(lo, hi);
    }
}

/// Minimize `f` over a box starting from `x0` (projected into the box).
///
/// Non-finite objective values are treated as +∞, so the search backs away
/// from regions where the objective fails.
pub fn nelder_mead<F>(
    f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    opts: &NelderMeadOptions,
) -> OptimizeResult
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(x0.len(), bounds.len());
    let n = x0.len();
    let sanitize = |v: f64| if v.is_finite() { v } else { f64::INFINITY };
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        sanitize(f(x))
    };

    // Initial simplex: x0 plus one step along each coordinate, flipped when
    // the step would leave the box.
    let mut start = x0.to_vec();
    clamp_to(bounds, &mut start);
    let mut simplex: Vec<Vec<f64>> = vec![start.clone()];
    for i in 0..n {
        let (lo, hi) = bounds[i];
        let step = opts.initial_step * (hi - lo).max(1e-12);
        let mut v = start.clone();
        v[i] = if v[i] + step <= hi { v[i] + step } else { v[i] - step };
        simplex.push(v);
    }
    let mut fvals: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iters = 0;
    while iters < opts.max_iters {
        iters += 1;
        // Order the simplex by objective value.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let spread = fvals[worst] - fvals[best];
        let max_edge = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (spread.is_finite() && spread < opts.f_tol) || max_edge < opts.x_tol {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for (k, v) in simplex.iter().enumerate() {
            if k == worst {
                continue;
            }
            for i in 0..n {
                centroid[i] += v[i] / n as f64;
            }
        }

        let make = |coef: f64| {
            let mut v: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            clamp_to(bounds, &mut v);
            v
        };

        let reflected = make(alpha);
        let f_ref = eval(&reflected);
        if f_ref < fvals[best] {
            let expanded = make(gamma);
            let f_exp = eval(&expanded);
            if f_exp < f_ref {
                simplex[worst] = expanded;
                fvals[worst] = f_exp;
            } else {
                simplex[worst] = reflected;
                fvals[worst] = f_ref;
            }
        } else if f_ref < fvals[second_worst] {
            simplex[worst] = reflected;
            fvals[worst] = f_ref;
        } else {
            let contracted = make(-rho);
            let f_con = eval(&contracted);
            if f_con < fvals[worst] {
                simplex[worst] = contracted;
                fvals[worst] = f_con;
            } else {
                // Shrink toward the best vertex.
                for k in 0..=n {
                    if k == best {
                        continue;
                    }
                    for i in 0..n {
                        simplex[k][i] =
                            simplex[best][i] + sigma * (simplex[k][i] - simplex[best][i]);
                    }
                    fvals[k] = eval(&simplex[k].clone());
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..=n).collect();
    order.sort_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).unwrap());
    OptimizeResult {
        x: simplex[order[0]].clone(),
        f: fvals[order[0]],
        iters,
        evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 2.0 * (x[1] + 0.5).powi(2);
        let r = nelder_mead(f, &[0.0, 0.0], &[(-5.0, 5.0), (-5.0, 5.0)], &Default::default());
        assert!((r.x[0] - 1.5).abs() < 1e-4, "{:?}", r.x);
        assert!((r.x[1] + 0.5).abs() < 1e-4, "{:?}", r.x);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            max_iters: 2000,
            ..Default::default()
        };
        let r = nelder_mead(f, &[-1.2, 1.0], &[(-5.0, 5.0), (-5.0, 5.0)], &opts);
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3, "{:?}", r.x);
    }

    #[test]
    fn respects_bounds() {
        // Unconstrained minimum at 10 sits outside the box.
        let f = |x: &[f64]| (x[0] - 10.0).powi(2);
        let r = nelder_mead(f, &[0.5, 0.0], &[(0.0, 2.0), (-1.0, 1.0)], &Default::default());
        assert!(r.x[0] <= 2.0 + 1e-12);
        assert!((r.x[0] - 2.0).abs() < 1e-3);
    }

    #[test]
    fn survives_infinite_regions() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 0.5).powi(2)
            }
        };
        let r = nelder_mead(f, &[1.8, 0.0], &[(-2.0, 2.0), (-1.0, 1.0)], &Default::default());
        assert!((r.x[0] - 0.5).abs() < 1e-3);
    }
}
