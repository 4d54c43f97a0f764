//! Deterministic scalar root finding and low-dimensional minimization.
//!
//! Everything here is a pure function of its inputs: no randomness, no
//! shared state, and a fixed evaluation order, so repeated calls return
//! bit-identical results.

use crate::error::{Error, Result};

/// Default absolute tolerance for bracketed root refinement.
pub const ROOT_TOL: f64 = 1e-12;
/// Default final bracket width for golden-section minimization.
pub const SCALAR_MIN_TOL: f64 = 1e-10;
/// Default simplex tolerance (diameter and value spread).
pub const SIMPLEX_TOL: f64 = 1e-12;
/// Default initial simplex edge length.
pub const SIMPLEX_STEP: f64 = 0.02;
/// Default number of grid points for the smallest-positive-root scan.
pub const SCAN_GRID: usize = 10_000;

const ROOT_MAX_ITER: usize = 400;
const GOLDEN_MAX_ITER: usize = 2_000;
/// 1/φ
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// An interval `[lo, hi]` with `lo < hi`.
///
/// The sign-change half of the invariant depends on the function, so it is
/// checked by [`Bracket::checked`] and again by [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Bracket { lo, hi, reason: "endpoints must be finite" });
        }
        if lo >= hi {
            return Err(Error::Bracket { lo, hi, reason: "lo must be below hi" });
        }
        Ok(Self { lo, hi })
    }

    /// Builds a bracket and verifies that `f` changes sign across it.
    pub fn checked<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        let b = Self::new(lo, hi)?;
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 || fhi == 0.0 || opposite_signs(flo, fhi) {
            Ok(b)
        } else {
            Err(Error::Bracket { lo, hi, reason: "no sign change" })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Outcome of a minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn opposite_signs(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Bracketed root refinement: bisection with safeguarded secant steps.
///
/// A secant step is only taken when it lands strictly inside the current
/// bracket and the previous step at least halved the bracket; otherwise the
/// step is a plain bisection. The bracket therefore shrinks by at least a
/// factor of two every other iteration.
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("root tolerance must be positive, got {tol}")));
    }
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !opposite_signs(fa, fb) {
        return Err(Error::Bracket { lo: a, hi: b, reason: "no sign change" });
    }

    let mut best = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    let mut try_secant = true;
    for _ in 0..ROOT_MAX_ITER {
        let width = b - a;
        if width <= tol || best.1.abs() <= tol {
            return Ok(best.0);
        }
        let mid = a + 0.5 * width;
        let x = if try_secant {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        if x <= a || x >= b {
            // The bracket is down to adjacent floating-point numbers.
            return Ok(best.0);
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if opposite_signs(fa, fx) {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
        try_secant = (b - a) <= 0.5 * width;
    }
    Err(Error::Convergence { method: "find_root", iterations: ROOT_MAX_ITER })
}

/// Smallest positive root of `f` on `(0, upper]`.
///
/// Walks a uniform grid of `grid` points, anchored at `f(0)` when that value
/// is finite and nonzero, and refines the first sign change with
/// [`find_root`].
pub fn scan_smallest_positive_root<F: Fn(f64) -> f64>(
    f: F,
    upper: f64,
    grid: usize,
    tol: f64,
) -> Result<f64> {
    if !(upper > 0.0 && upper.is_finite()) {
        return Err(Error::InvalidArgument(format!("scan upper bound must be positive, got {upper}")));
    }
    if grid < 100 {
        return Err(Error::InvalidArgument(format!("scan grid must have at least 100 points, got {grid}")));
    }
    let at = |i: usize| upper * i as f64 / grid as f64;

    let f0 = f(0.0);
    let (mut prev, start) = if f0.is_finite() && f0 != 0.0 {
        ((0.0, f0), 1)
    } else {
        let x1 = at(1);
        let f1 = f(x1);
        if f1 == 0.0 {
            return Ok(x1);
        }
        ((x1, f1), 2)
    };

    for i in start..=grid {
        let x = at(i);
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_nan() {
            continue;
        }
        if prev.1.is_nan() || !opposite_signs(prev.1, fx) {
            prev = (x, fx);
            continue;
        }
        return find_root(&f, Bracket::new(prev.0, x)?, tol);
    }
    Err(Error::NoRoot { upper })
}

/// Golden-section search on `[lo, hi]`.
///
/// The returned argmin is only guaranteed to be the global minimizer when
/// `f` is unimodal on the interval.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<MinimizeResult> {
    Bracket::new(lo, hi)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("minimization tolerance must be positive, got {tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));

    let mut iterations = 0;
    loop {
        let width = b - a;
        let floor = 4.0 * f64::EPSILON * (0.5 * (a + b)).abs();
        if width <= tol || width <= floor {
            break;
        }
        if iterations == GOLDEN_MAX_ITER {
            return Err(Error::Convergence { method: "minimize_scalar", iterations });
        }
        iterations += 1;
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }

    let mid = 0.5 * (a + b);
    let fmid = f(mid);
    let (x, value) = [(c, fc), (d, fd)]
        .into_iter()
        .fold((mid, fmid), |best, cand| if cand.1 < best.1 { cand } else { best });
    Ok(MinimizeResult { argmin: vec![x], value, iterations, converged: true })
}

/// Nelder–Mead simplex descent.
///
/// The initial simplex is `x0` plus `x0 + step * e_i` for each axis. The run
/// stops once the simplex diameter (max-norm distance from the best vertex)
/// and the spread of vertex values are both at most `tol`. Hitting
/// `max_iter` is not an error: the result comes back with
/// `converged == false`.
pub fn minimize_simplex<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> Result<MinimizeResult> {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = x0.len();
    if n == 0 {
        return Err(Error::InvalidArgument("simplex start point is empty".into()));
    }
    if !(step > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("simplex step and tol must be positive, got {step}, {tol}")));
    }

    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    vertices.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        let fv = f(&v);
        vertices.push((v, fv));
    }

    let blend = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };

    let mut iterations = 0;
    let converged = loop {
        // Stable sort keeps tie ordering fixed between runs.
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &vertices[0];
        let diameter = vertices[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0_f64, f64::max);
        let spread = vertices[n].1 - best.1;
        if diameter <= tol && spread <= tol {
            break true;
        }
        if iterations == max_iter {
            break false;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &vertices[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let (worst, f_worst) = vertices[n].clone();
        let f_best = vertices[0].1;
        let f_second = vertices[n - 1].1;

        let reflected = blend(&centroid, &worst, -REFLECT);
        let f_reflected = f(&reflected);

        if f_reflected < f_best {
            let expanded = blend(&centroid, &worst, -EXPAND);
            let f_expanded = f(&expanded);
            vertices[n] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < f_second {
            vertices[n] = (reflected, f_reflected);
            continue;
        }
        if f_reflected < f_worst {
            let outside = blend(&centroid, &reflected, CONTRACT);
            let f_outside = f(&outside);
            if f_outside <= f_reflected {
                vertices[n] = (outside, f_outside);
                continue;
            }
        } else {
            let inside = blend(&centroid, &worst, CONTRACT);
            let f_inside = f(&inside);
            if f_inside < f_worst {
                vertices[n] = (inside, f_inside);
                continue;
            }
        }

        let anchor = vertices[0].0.clone();
        for (v, fv) in vertices[1..].iter_mut() {
            *v = blend(&anchor, v, SHRINK);
            *fv = f(v);
        }
    };

    let (argmin, value) = vertices.swap_remove(0);
    Ok(MinimizeResult { argmin, value, iterations, converged })
}
