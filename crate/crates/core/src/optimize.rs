//! Bounded derivative-free minimization for one or two parameters.
//!
//! Objectives here are piecewise smooth (sums of absolute values) or smooth
//! log-likelihoods, and may be `+∞` or NaN where a trial parameter makes a
//! density vanish; non-finite values are treated as `+∞`.
//!
//! Search happens in transformed coordinates: a positive parameter whose
//! bounds span more than three decades is searched on a log scale.
//!
//! * 1-D: uniform grid scan to bracket the best point, golden-section
//!   refinement, then (for smooth objectives) bisection on the sign of a
//!   central-difference derivative.
//! * 2-D: grid scan for starting points, Nelder–Mead from the best few with
//!   restarts until a restart no longer improves.
//!
//! Both stop once the search bracket (or simplex) is narrower than
//! `tol·(1+|t|)` and the objective varies by at most `tol·(1+|f|)` across it.

const GRID_1D: usize = 241;
const GRID_2D: usize = 17;
const STARTS_2D: usize = 4;
const MAX_GOLDEN: usize = 400;
const MAX_NM_EVALS: usize = 6000;
const MAX_RESTARTS: usize = 25;
const GOLDEN: f64 = 0.381_966_011_250_105_1; // 2 − φ

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    scale: Scale,
}

impl Axis {
    fn new(lo: f64, hi: f64) -> Self {
        let scale = if lo > 0.0 && hi / lo > 1e3 { Scale::Log } else { Scale::Linear };
        Axis { lo, hi, scale }
    }

    fn to_t(self, x: f64) -> f64 {
        match self.scale {
            Scale::Linear => x,
            Scale::Log => x.ln(),
        }
    }

    fn to_x(self, t: f64) -> f64 {
        let x = match self.scale {
            Scale::Linear => t,
            Scale::Log => t.exp(),
        };
        x.clamp(self.lo, self.hi)
    }

    fn t_range(&self) -> (f64, f64) {
        (self.to_t(self.lo), self.to_t(self.hi))
    }

    fn near_bound(&self, t: f64) -> bool {
        let (a, b) = self.t_range();
        let eps = 1e-7 * (b - a);
        t - a <= eps || b - t <= eps
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub tol: f64,
    /// Objective is smooth near its minimum (likelihoods, not `d_v`).
    pub smooth: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub at_boundary: bool,
}

fn clean(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

fn settled(width: f64, t: f64, f_lo: f64, f_hi: f64, tol: f64) -> bool {
    width <= tol * (1.0 + t.abs()) && (f_hi - f_lo).abs() <= tol * (1.0 + f_lo.abs().min(f_hi.abs()))
}

/// Minimizes `f` over the box `bounds` (1 or 2 dimensions). Returns `None`
/// when the objective is non-finite at every point probed.
pub(crate) fn minimize<F>(
    mut f: F,
    bounds: &[(f64, f64)],
    init: Option<&[f64]>,
    settings: Settings,
) -> Option<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    match bounds.len() {
        1 => {
            let axis = Axis::new(bounds[0].0, bounds[0].1);
            minimize_1d(|x| f(&[x]), axis, init.map(|v| v[0]), settings)
        }
        2 => {
            let axes = [Axis::new(bounds[0].0, bounds[0].1), Axis::new(bounds[1].0, bounds[1].1)];
            minimize_2d(|x| f(x), axes, init, settings)
        }
        d => panic!("minimize supports 1 or 2 parameters, got {d}"),
    }
}

fn minimize_1d<F>(mut f: F, axis: Axis, init: Option<f64>, settings: Settings) -> Option<Minimum>
where
    F: FnMut(f64) -> f64,
{
    let (ta, tb) = axis.t_range();
    let mut evals = 0usize;
    let mut g = |t: f64| {
        evals += 1;
        clean(f(axis.to_x(t)))
    };

    let grid: Vec<f64> = (0..GRID_1D)
        .map(|i| {
            if i == GRID_1D - 1 {
                tb
            } else {
                ta + (tb - ta) * i as f64 / (GRID_1D - 1) as f64
            }
        })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&t| g(t)).collect();

    let mut best_i = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v < vals[best_i] {
            best_i = i;
        }
    }
    let (mut best_t, mut best_f) = (grid[best_i], vals[best_i]);
    let (lo_i, hi_i) = (best_i.saturating_sub(1), (best_i + 1).min(GRID_1D - 1));
    let mut bracket = (grid[lo_i], grid[hi_i]);
    let mut bracket_f = (vals[lo_i], vals[hi_i]);

    if let Some(x0) = init.filter(|x| *x >= axis.lo && *x <= axis.hi) {
        let t0 = axis.to_t(x0);
        let f0 = g(t0);
        if f0 < best_f {
            let i = grid.partition_point(|&t| t <= t0).clamp(1, GRID_1D - 1);
            bracket = (grid[i - 1], grid[i]);
            bracket_f = (vals[i - 1], vals[i]);
            best_t = t0;
            best_f = f0;
        }
    }
    if !best_f.is_finite() {
        return None;
    }

    // Golden section inside the bracket. Near a kink the two probes can
    // agree while both sit well above the minimum, so the ends must agree too.
    let (mut a, mut b) = bracket;
    let (mut fa, mut fb) = bracket_f;
    let mut t1 = a + GOLDEN * (b - a);
    let mut t2 = b - GOLDEN * (b - a);
    let mut f1 = g(t1);
    let mut f2 = g(t2);
    for _ in 0..MAX_GOLDEN {
        if f1 < best_f {
            best_t = t1;
            best_f = f1;
        }
        if f2 < best_f {
            best_t = t2;
            best_f = f2;
        }
        let mid = 0.5 * (a + b);
        let lo_f = f1.min(f2).min(fa).min(fb);
        let hi_f = f1.max(f2).max(fa).max(fb);
        if settled(b - a, mid, lo_f, hi_f, settings.tol)
            || b - a <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) + f64::MIN_POSITIVE
        {
            break;
        }
        if f1 <= f2 {
            b = t2;
            fb = f2;
            t2 = t1;
            f2 = f1;
            t1 = a + GOLDEN * (b - a);
            f1 = g(t1);
        } else {
            a = t1;
            fa = f1;
            t1 = t2;
            f1 = f2;
            t2 = b - GOLDEN * (b - a);
            f2 = g(t2);
        }
    }

    if settings.smooth {
        if let Some((t, v)) = refine_by_slope(&mut g, best_t, best_f, ta, tb) {
            best_t = t;
            best_f = v;
        }
    }

    Some(Minimum {
        x: vec![axis.to_x(best_t)],
        fx: best_f,
        evals,
        at_boundary: axis.near_bound(best_t),
    })
}

/// Bisection on the sign of a central-difference derivative around `t0`.
/// Golden section alone only locates a smooth minimum to about √ε.
fn refine_by_slope<G>(g: &mut G, t0: f64, f0: f64, ta: f64, tb: f64) -> Option<(f64, f64)>
where
    G: FnMut(f64) -> f64,
{
    let h = 1e-6 * (1.0 + t0.abs());
    let slope = |t: f64, g: &mut G| (g(t + h) - g(t - h)) / (2.0 * h);

    let mut half = 32.0 * h;
    let (mut lo, mut hi);
    loop {
        lo = (t0 - half).max(ta + h);
        hi = (t0 + half).min(tb - h);
        if lo >= hi {
            return None;
        }
        if slope(lo, g) < 0.0 && slope(hi, g) > 0.0 {
            break;
        }
        half *= 4.0;
        if half > 1e-2 * (1.0 + t0.abs()) {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + mid.abs()) {
            break;
        }
        if slope(mid, g) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let v = g(t);
    // Accept if no worse than the golden point up to rounding noise.
    (v <= f0 + 64.0 * f64::EPSILON * (1.0 + f0.abs())).then_some((t, v))
}

fn minimize_2d<F>(mut f: F, axes: [Axis; 2], init: Option<&[f64]>, settings: Settings) -> Option<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let ranges = [axes[0].t_range(), axes[1].t_range()];
    let mut evals = 0usize;
    let mut g = |t: [f64; 2]| {
        evals += 1;
        clean(f(&[axes[0].to_x(t[0]), axes[1].to_x(t[1])]))
    };

    let at = |r: (f64, f64), i: usize| r.0 + (r.1 - r.0) * i as f64 / (GRID_2D - 1) as f64;
    let mut scored: Vec<([f64; 2], f64)> = Vec::with_capacity(GRID_2D * GRID_2D + 1);
    if let Some(x) = init {
        if x.len() == 2 && (0..2).all(|k| x[k] >= axes[k].lo && x[k] <= axes[k].hi) {
            let t = [axes[0].to_t(x[0]), axes[1].to_t(x[1])];
            scored.push((t, g(t)));
        }
    }
    for i in 0..GRID_2D {
        for j in 0..GRID_2D {
            let t = [at(ranges[0], i), at(ranges[1], j)];
            scored.push((t, g(t)));
        }
    }
    // Stable: the initial guess wins ties.
    scored.sort_by(|a, b| a.1.total_cmp(&b.1));
    if !scored[0].1.is_finite() {
        return None;
    }

    let lo = [ranges[0].0, ranges[1].0];
    let hi = [ranges[0].1, ranges[1].1];
    let width = [hi[0] - lo[0], hi[1] - lo[1]];
    let mut best: Option<([f64; 2], f64)> = None;
    for &(start, f_start) in scored.iter().take(STARTS_2D).filter(|s| s.1.is_finite()) {
        let (mut x, mut fx) = (start, f_start);
        let mut step = [0.05 * width[0], 0.05 * width[1]];
        for restart in 0..MAX_RESTARTS {
            let (nx, nf) = nelder_mead(&mut g, x, step, lo, hi, settings.tol);
            let improved = nf < fx - settings.tol * 1e-3 * (1.0 + fx.abs());
            if nf <= fx {
                x = nx;
                fx = nf;
            }
            if restart > 0 && !improved {
                break;
            }
            step = [
                (1e-3 * width[0]).max(1e-6 * (1.0 + x[0].abs())),
                (1e-3 * width[1]).max(1e-6 * (1.0 + x[1].abs())),
            ];
        }
        if best.is_none_or(|(_, bf)| fx < bf) {
            best = Some((x, fx));
        }
    }
    let (t, fx) = best?;
    Some(Minimum {
        x: vec![axes[0].to_x(t[0]), axes[1].to_x(t[1])],
        fx,
        evals,
        at_boundary: axes[0].near_bound(t[0]) || axes[1].near_bound(t[1]),
    })
}

fn nelder_mead<G>(
    g: &mut G,
    start: [f64; 2],
    step: [f64; 2],
    lo: [f64; 2],
    hi: [f64; 2],
    tol: f64,
) -> ([f64; 2], f64)
where
    G: FnMut([f64; 2]) -> f64,
{
    let clamp = |p: [f64; 2]| [p[0].clamp(lo[0], hi[0]), p[1].clamp(lo[1], hi[1])];
    let offset = |k: usize| {
        let mut p = start;
        p[k] += step[k];
        if p[k] > hi[k] {
            p[k] = start[k] - step[k];
        }
        clamp(p)
    };
    let mut s = [start, offset(0), offset(1)];
    let mut v = [g(s[0]), g(s[1]), g(s[2])];
    let mut used = 3usize;

    while used < MAX_NM_EVALS {
        // Order best → worst.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        s = [s[idx[0]], s[idx[1]], s[idx[2]]];
        v = [v[idx[0]], v[idx[1]], v[idx[2]]];

        let size = (1..3)
            .flat_map(|i| (0..2).map(move |k| (i, k)))
            .map(|(i, k)| (s[i][k] - s[0][k]).abs() / (1.0 + s[0][k].abs()))
            .fold(0.0, f64::max);
        let spread = v[2] - v[0];
        let spread_ok = spread.is_finite() && spread <= tol * (1.0 + v[0].abs());
        if (size <= tol && spread_ok) || size <= 4.0 * f64::EPSILON {
            break;
        }

        let c = [0.5 * (s[0][0] + s[1][0]), 0.5 * (s[0][1] + s[1][1])];
        let along = |a: f64| clamp([c[0] + a * (s[2][0] - c[0]), c[1] + a * (s[2][1] - c[1])]);

        let xr = along(-1.0);
        let fr = g(xr);
        used += 1;
        if fr < v[0] {
            let xe = along(-2.0);
            let fe = g(xe);
            used += 1;
            if fe < fr {
                s[2] = xe;
                v[2] = fe;
            } else {
                s[2] = xr;
                v[2] = fr;
            }
            continue;
        }
        if fr < v[1] {
            s[2] = xr;
            v[2] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < v[2] {
            let xc = along(-0.5);
            let fc = g(xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = along(0.5);
            let fc = g(xc);
            (xc, fc, fc < v[2])
        };
        used += 1;
        if accept {
            s[2] = xc;
            v[2] = fc;
            continue;
        }
        for i in 1..3 {
            s[i] = [0.5 * (s[0][0] + s[i][0]), 0.5 * (s[0][1] + s[i][1])];
            v[i] = g(s[i]);
        }
        used += 2;
    }
    let b = (0..3).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    (s[b], v[b])
}
