//! Adaptive numerical integration and root bracketing.
//!
//! [`integrate`] drives a 7/15-point Gauss-Legendre pair with a global worst-
//! panel-first refinement queue: the panel with the largest error estimate is
//! bisected until the summed estimate meets the requested tolerance. Both
//! rules sample strictly interior points, so integrable endpoint
//! singularities are handled by refinement alone.
//!
//! Semi-infinite integrals come in two independent flavours so callers can
//! cross-check them: [`integrate_to_infinity`] sums panels of doubling width
//! until a panel falls below `tail_cut` of the running total, and
//! [`integrate_to_infinity_mapped`] compresses `[a, inf)` onto `[0, 1)` with
//! `u = a + t/(1-t)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::LazyLock;

use thiserror::Error;

/// Tolerances and budget for every numerical routine in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral value (or root location).
    pub rel_tol: f64,
    /// Absolute tolerance floor; dominates when the value is near zero.
    pub abs_tol: f64,
    /// Panel bisection depth cap.
    pub max_depth: u32,
    /// A doubling panel below this fraction of the running total ends a
    /// semi-infinite integration.
    pub tail_cut: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: 50,
            tail_cut: 1e-10,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) {
        assert!(
            self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.tail_cut > 0.0,
            "quadrature tolerances must be positive"
        );
        assert!(self.max_depth >= 1, "max_depth must be at least 1");
    }
}

/// Failures of the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum QuadratureError {
    #[error("integral did not converge: best estimate {estimate:e}, error bound {error_bound:e}")]
    Convergence { estimate: f64, error_bound: f64 },
    #[error("semi-infinite integrand does not decay: partial sum {estimate:e}")]
    Divergence { estimate: f64 },
    #[error("no sign change on [{lo}, {hi}]: cannot bracket a root")]
    Bracket { lo: f64, hi: f64 },
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed to machine
/// precision by Newton iteration on the Legendre recurrence.
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-style initial guess for the i-th root in decreasing order.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_p_dp(n, x);
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = legendre_p_dp(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term
/// recurrence; valid for interior `|x| < 1`.
fn legendre_p_dp(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

static RULE_LOW: LazyLock<(Vec<f64>, Vec<f64>)> = LazyLock::new(|| legendre_rule(7));
static RULE_HIGH: LazyLock<(Vec<f64>, Vec<f64>)> = LazyLock::new(|| legendre_rule(15));

/// One refinement panel; ordered by error estimate for the worst-first heap.
#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn eval_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (lo_nodes, lo_weights) = &*RULE_LOW;
    let (hi_nodes, hi_weights) = &*RULE_HIGH;
    let mut coarse = 0.0;
    for (x, w) in lo_nodes.iter().zip(lo_weights) {
        coarse += w * f(c + h * x);
    }
    let mut fine = 0.0;
    for (x, w) in hi_nodes.iter().zip(hi_weights) {
        fine += w * f(c + h * x);
    }
    let value = fine * h;
    let error = if value.is_finite() && coarse.is_finite() {
        ((fine - coarse) * h).abs()
    } else {
        f64::INFINITY
    };
    Panel {
        a,
        b,
        value,
        error,
        depth,
    }
}

/// Hard cap on refinement panels per call, independent of `max_depth`.
const MAX_PANELS: usize = 40_000;

/// Integrates `f` over the finite interval `[a, b]`.
///
/// Converges when the summed panel error estimate drops below
/// `max(abs_tol, rel_tol * |integral|)`. A degenerate interval (`b <= a`)
/// integrates to 0. Panels that reach `max_depth` keep their value but can
/// no longer shrink their error; if those alone exceed the tolerance the
/// call fails with the best estimate and its error bound.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    spec.validate();
    assert!(a.is_finite() && b.is_finite(), "bounds must be finite");
    if b <= a {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    let root = eval_panel(&f, a, b, 0);
    let mut total_value = root.value;
    let mut live_error = root.error;
    let mut frozen_error = 0.0;
    heap.push(root);
    let mut panels = 1usize;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total_value.abs());
        if live_error + frozen_error <= tol {
            return Ok(total_value);
        }
        if frozen_error > tol || panels > MAX_PANELS {
            return Err(QuadratureError::Convergence {
                estimate: total_value,
                error_bound: live_error + frozen_error,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(QuadratureError::Convergence {
                estimate: total_value,
                error_bound: frozen_error,
            });
        };
        live_error -= worst.error;
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = !(worst.a < mid && mid < worst.b);
        if worst.depth >= spec.max_depth || too_narrow {
            frozen_error += worst.error;
            continue;
        }
        let left = eval_panel(&f, worst.a, mid, worst.depth + 1);
        let right = eval_panel(&f, mid, worst.b, worst.depth + 1);
        total_value += left.value + right.value - worst.value;
        live_error += left.error + right.error;
        heap.push(left);
        heap.push(right);
        panels += 2;
    }
}

/// Widest doubling ladder explored before declaring divergence; the last
/// panel then ends near `a + 2^96` scale units.
const MAX_TAIL_PANELS: u32 = 96;

/// Integrates `f` over `[a, inf)` by summing panels of doubling width.
///
/// Stops once a panel contributes less than `tail_cut` of the running total
/// in magnitude. Intended for integrands that eventually decay monotonically;
/// panel magnitudes that refuse to shrink for many consecutive doublings are
/// reported as divergence.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    spec.validate();
    assert!(a.is_finite(), "lower bound must be finite");
    let h0 = 1.0f64.max(a.abs());
    let mut total = 0.0;
    let mut lo = a;
    let mut prev_mag = f64::INFINITY;
    let mut non_shrinking = 0u32;
    for k in 0..MAX_TAIL_PANELS {
        let hi = a + h0 * (2f64.powi(k as i32 + 1) - 1.0);
        let panel = integrate(&f, lo, hi, spec)?;
        total += panel;
        let mag = panel.abs();
        if k >= 2 && mag <= spec.tail_cut * total.abs().max(f64::MIN_POSITIVE) {
            return Ok(total);
        }
        if mag >= prev_mag && mag > spec.abs_tol {
            non_shrinking += 1;
            if non_shrinking >= 8 {
                return Err(QuadratureError::Divergence { estimate: total });
            }
        } else {
            non_shrinking = 0;
        }
        prev_mag = mag;
        lo = hi;
    }
    Err(QuadratureError::Divergence { estimate: total })
}

/// Integrates `f` over `[a, inf)` through the substitution `u = a + t/(1-t)`,
/// which maps the tail onto the finite interval `[0, 1)`.
///
/// An independent alternative to [`integrate_to_infinity`]; both must agree
/// on decaying integrands. Requires decay faster than `u^-1` (the transformed
/// integrand must stay integrable at `t = 1`), otherwise the refinement queue
/// exhausts its depth and reports non-convergence.
pub fn integrate_to_infinity_mapped<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    spec.validate();
    assert!(a.is_finite(), "lower bound must be finite");
    let g = |t: f64| {
        let om = 1.0 - t;
        f(a + t / om) / (om * om)
    };
    integrate(g, 0.0, 1.0, spec)
}

/// Finds the root of a monotone function on `[lo, hi]` by bisection with
/// secant acceleration.
///
/// Requires a sign change across the bracket. The bracket shrinks until its
/// width falls below `abs_tol` (or a few ulps for huge roots); the returned
/// point is the secant estimate inside the final bracket.
pub fn solve_monotone_root<F: Fn(f64) -> f64>(
    g: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    spec.validate();
    assert!(
        lo.is_finite() && hi.is_finite() && lo < hi,
        "invalid bracket"
    );
    let mut a = lo;
    let mut b = hi;
    let mut ga = g(a);
    let mut gb = g(b);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if !(ga.is_finite() && gb.is_finite()) || ga.signum() == gb.signum() {
        return Err(QuadratureError::Bracket { lo, hi });
    }
    let mut bisect_next = false;
    for _ in 0..256 {
        let mid = 0.5 * (a + b);
        let width_tol = spec.abs_tol.max(8.0 * f64::EPSILON * mid.abs());
        if b - a <= width_tol {
            break;
        }
        // Secant proposal, forced back to bisection every other step and
        // whenever it leaves the open bracket.
        let secant = (a * gb - b * ga) / (gb - ga);
        let margin = 0.01 * (b - a);
        let x = if !bisect_next && secant > a + margin && secant < b - margin {
            secant
        } else {
            mid
        };
        bisect_next = !bisect_next;
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if !gx.is_finite() {
            return Err(QuadratureError::Bracket { lo, hi });
        }
        if gx.signum() == ga.signum() {
            a = x;
            ga = gx;
        } else {
            b = x;
            gb = gx;
        }
    }
    Ok((a * gb - b * ga) / (gb - ga))
}
