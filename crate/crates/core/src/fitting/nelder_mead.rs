//! Nelder–Mead simplex descent inside a box, with reflection at the walls.

/// Stop once the simplex diameter falls below this, relative to the best
/// vertex.
pub const DIAMETER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_evaluations: usize,
    pub diameter_tol: f64,
    /// Initial edge length as a fraction of each box width.
    pub initial_scale: f64,
    /// Fresh simplices built around the incumbent after a collapse.
    pub restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 20_000,
            diameter_tol: DIAMETER_TOL,
            initial_scale: 0.1,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult<const D: usize> {
    pub x: [f64; D],
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Folds `v` back into `[lo, hi]` by mirror reflection.
pub fn reflect_into(v: f64, lo: f64, hi: f64) -> f64 {
    if !v.is_finite() {
        return 0.5 * (lo + hi);
    }
    let width = hi - lo;
    if width <= 0.0 {
        return lo;
    }
    let r = (v - lo).rem_euclid(2.0 * width);
    if r <= width {
        lo + r
    } else {
        hi - (r - width)
    }
}

fn diameter<const D: usize>(simplex: &[[f64; D]], scale: &[f64; D]) -> f64 {
    let mut d = 0.0_f64;
    for a in simplex {
        for b in simplex {
            for k in 0..D {
                d = d.max((a[k] - b[k]).abs() / scale[k]);
            }
        }
    }
    d
}

/// Minimizes `f` over the box `[lower, upper]` starting from `x0`. Non-finite
/// function values count as `+∞`.
pub fn minimize<const D: usize>(
    mut f: impl FnMut(&[f64; D]) -> f64,
    x0: [f64; D],
    lower: [f64; D],
    upper: [f64; D],
    opts: &SimplexOptions,
) -> SimplexResult<D> {
    let clip = |x: [f64; D]| -> [f64; D] {
        let mut y = x;
        for k in 0..D {
            y[k] = reflect_into(x[k], lower[k], upper[k]);
        }
        y
    };
    let mut evaluations = 0;
    let mut eval = |x: &[f64; D], evaluations: &mut usize| {
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut best = clip(x0);
    let mut best_value = eval(&best, &mut evaluations);
    let mut iterations = 0;
    let mut converged = false;

    for round in 0..=opts.restarts {
        let mut simplex = vec![best];
        let mut values = vec![best_value];
        for k in 0..D {
            let width = upper[k] - lower[k];
            let mut v = best;
            let step = opts.initial_scale * width;
            v[k] = if v[k] + step <= upper[k] {
                v[k] + step
            } else {
                v[k] - step
            };
            simplex.push(clip(v));
            values.push(eval(&simplex[k + 1], &mut evaluations));
        }

        converged = false;
        while evaluations < opts.max_evaluations {
            let mut order: Vec<usize> = (0..=D).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i]).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let mut scale = [0.0; D];
            for k in 0..D {
                scale[k] = simplex[0][k].abs().max(1e-300);
            }
            if diameter(&simplex, &scale) <= opts.diameter_tol {
                converged = true;
                break;
            }
            iterations += 1;

            let mut centroid = [0.0; D];
            for v in &simplex[..D] {
                for k in 0..D {
                    centroid[k] += v[k] / D as f64;
                }
            }
            let along = |t: f64| {
                let mut p = [0.0; D];
                for k in 0..D {
                    p[k] = centroid[k] + t * (simplex[D][k] - centroid[k]);
                }
                clip(p)
            };

            let xr = along(-1.0);
            let fr = eval(&xr, &mut evaluations);
            if fr < values[0] {
                let xe = along(-2.0);
                let fe = eval(&xe, &mut evaluations);
                if fe < fr {
                    simplex[D] = xe;
                    values[D] = fe;
                } else {
                    simplex[D] = xr;
                    values[D] = fr;
                }
                continue;
            }
            if fr < values[D - 1] {
                simplex[D] = xr;
                values[D] = fr;
                continue;
            }
            let (xc, fc) = if fr < values[D] {
                let xc = along(-0.5);
                (xc, eval(&xc, &mut evaluations))
            } else {
                let xc = along(0.5);
                (xc, eval(&xc, &mut evaluations))
            };
            if fc < values[D].min(fr) {
                simplex[D] = xc;
                values[D] = fc;
                continue;
            }
            // shrink toward the best vertex
            for j in 1..=D {
                let mut p = [0.0; D];
                for k in 0..D {
                    p[k] = simplex[0][k] + 0.5 * (simplex[j][k] - simplex[0][k]);
                }
                simplex[j] = clip(p);
                values[j] = eval(&simplex[j], &mut evaluations);
            }
        }

        let k = (0..=D)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .unwrap_or(0);
        let improved = values[k] < best_value;
        if values[k] <= best_value {
            best = simplex[k];
            best_value = values[k];
        }
        // a restart that finds nothing new confirms the minimum
        if round > 0 && !improved && converged {
            break;
        }
        if evaluations >= opts.max_evaluations {
            break;
        }
    }

    SimplexResult {
        x: best,
        value: best_value,
        evaluations,
        iterations,
        converged,
    }
}
