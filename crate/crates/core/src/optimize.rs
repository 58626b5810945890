//! BFGS minimisation with a strong-Wolfe line search.
//!
//! Near the optimum, differences in `f` drop below its rounding error long
//! before the gradient reaches a tight tolerance. The line search therefore
//! also accepts steps satisfying the approximate Wolfe conditions
//! (Hager–Zhang), which only use directional derivatives.

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop when `max |∇f| < gtol`.
    pub gtol: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            max_iter: 500,
            gtol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub message: String,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;
const APPROX_EPS: f64 = 1e-10;

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Point {
    alpha: f64,
    f: f64,
    d: f64,
    x: Vec<f64>,
    g: Vec<f64>,
}

/// Minimises `f` given `fg(x) = (f(x), ∇f(x))`. Non-finite values of `f` are
/// treated as `+∞`.
pub fn minimize<F>(x0: &[f64], mut fg: F, opts: BfgsOptions) -> BfgsOutcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let k = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let (f, g) = fg(x);
        if f.is_finite() && g.iter().all(|v| v.is_finite()) {
            (f, g)
        } else {
            (f64::INFINITY, g)
        }
    };

    let mut x = x0.to_vec();
    let (mut f, mut g) = eval(&x);
    let mut h = identity(k);
    let mut first = true;
    let mut iterations = 0;
    let mut message = String::from("maximum iterations reached");
    let mut converged = false;
    let mut restarts = 0;

    if !f.is_finite() {
        return BfgsOutcome {
            x,
            f,
            grad: g,
            iterations: 0,
            evaluations,
            converged: false,
            message: "objective not finite at the starting point".into(),
        };
    }

    while iterations < opts.max_iter {
        if inf_norm(&g) < opts.gtol {
            converged = true;
            message = "gradient tolerance reached".into();
            break;
        }
        iterations += 1;

        let mut p: Vec<f64> = (0..k).map(|i| -dot(&h[i], &g)).collect();
        let mut d0 = dot(&p, &g);
        if d0 >= 0.0 {
            h = identity(k);
            p = g.iter().map(|v| -v).collect();
            d0 = dot(&p, &g);
        }
        let alpha0 = if first { (1.0 / inf_norm(&g)).min(1.0) } else { 1.0 };

        let found = line_search(&x, f, d0, &p, alpha0, &mut eval);
        let Some(next) = found else {
            if restarts < 2 {
                // Retry along steepest descent with a fresh curvature model.
                restarts += 1;
                h = identity(k);
                first = true;
                continue;
            }
            message = "line search failed to make progress".into();
            break;
        };
        restarts = 0;

        let s: Vec<f64> = next.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if first {
                let scale = sy / dot(&y, &y);
                h.iter_mut()
                    .enumerate()
                    .for_each(|(i, row)| row.iter_mut().enumerate().for_each(|(j, v)| *v = if i == j { scale } else { 0.0 }));
            }
            bfgs_update(&mut h, &s, &y, sy);
            first = false;
        }
        x = next.x;
        f = next.f;
        g = next.g;
    }
    if !converged && inf_norm(&g) < opts.gtol {
        converged = true;
        message = "gradient tolerance reached".into();
    }
    BfgsOutcome {
        x,
        f,
        grad: g,
        iterations,
        evaluations,
        converged,
        message,
    }
}

fn identity(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let k = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..k).map(|i| dot(&h[i], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..k {
        for j in 0..k {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

fn line_search<E>(x: &[f64], f0: f64, d0: f64, p: &[f64], alpha0: f64, eval: &mut E) -> Option<Point>
where
    E: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut probe = |alpha: f64| {
        let xa: Vec<f64> = x.iter().zip(p).map(|(xi, pi)| xi + alpha * pi).collect();
        let (f, g) = eval(&xa);
        let d = dot(&g, p);
        Point { alpha, f, d, x: xa, g }
    };
    let accept = |pt: &Point| {
        if !pt.f.is_finite() {
            return false;
        }
        let wolfe = pt.f <= f0 + C1 * pt.alpha * d0 && pt.d.abs() <= -C2 * d0;
        let approx = pt.f <= f0 + APPROX_EPS * f0.abs()
            && (2.0 * C1 - 1.0) * d0 >= pt.d
            && pt.d.abs() <= -C2 * d0;
        wolfe || approx
    };

    let mut prev = Point {
        alpha: 0.0,
        f: f0,
        d: d0,
        x: x.to_vec(),
        g: Vec::new(),
    };
    let mut alpha = alpha0;
    for i in 0..40 {
        let cur = probe(alpha);
        if accept(&cur) {
            return Some(cur);
        }
        if !cur.f.is_finite() || cur.f > f0 + C1 * alpha * d0 || (i > 0 && cur.f >= prev.f) {
            return zoom(prev, cur, f0, d0, &mut probe, &accept);
        }
        if cur.d >= 0.0 {
            return zoom(cur, prev, f0, d0, &mut probe, &accept);
        }
        prev = cur;
        alpha *= 2.0;
    }
    None
}

fn zoom<P, A>(mut lo: Point, mut hi: Point, f0: f64, d0: f64, probe: &mut P, accept: &A) -> Option<Point>
where
    P: FnMut(f64) -> Point,
    A: Fn(&Point) -> bool,
{
    for _ in 0..60 {
        let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
        let width = b - a;
        if width <= 1e-16 * b.max(1.0) {
            break;
        }
        // Minimiser of the quadratic through lo (value, slope) and hi (value),
        // safeguarded away from the bracket ends.
        let mut trial = f64::NAN;
        if hi.f.is_finite() {
            let dalpha = hi.alpha - lo.alpha;
            let denom = 2.0 * (hi.f - lo.f - lo.d * dalpha);
            if denom > 0.0 {
                trial = lo.alpha - lo.d * dalpha * dalpha / denom;
            }
        }
        if !trial.is_finite() || trial < a + 0.1 * width || trial > b - 0.1 * width {
            trial = 0.5 * (a + b);
        }
        let cur = probe(trial);
        if accept(&cur) {
            return Some(cur);
        }
        if !cur.f.is_finite() || cur.f > f0 + C1 * cur.alpha * d0 || cur.f >= lo.f {
            hi = cur;
        } else {
            if cur.d * (hi.alpha - lo.alpha) >= 0.0 {
                hi = std::mem::replace(&mut lo, cur);
            } else {
                lo = cur;
            }
        }
    }
    // Fall back to the best decreasing point found, if any.
    (lo.alpha > 0.0 && lo.f < f0).then_some(lo)
}
