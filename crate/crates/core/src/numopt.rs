//! Deterministic optimization kernels for the curved-manifold projections.
//!
//! - [`golden_section_min`]: bracketed 1-D minimization of unimodal functions.
//! - [`quasi_newton_min`]: BFGS with Armijo backtracking.
//! - [`augmented_lagrangian_min`]: method of multipliers over equality
//!   constraints, with BFGS inner solves.
//! - [`finite_diff_grad_check`]: central-difference check of analytic gradients.
//!
//! None of the kernels draw random numbers; identical inputs give
//! bit-identical outputs.

use thiserror::Error;

use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OptError {
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("objective is not finite at the starting point")]
    NonFiniteStart,

    #[error("line search failed at iteration {iteration} (gradient norm {gradient_norm:e})")]
    LineSearch {
        iteration: usize,
        gradient_norm: f64,
    },

    #[error("constraints infeasible: residual {residual:e} after {rounds} rounds")]
    Infeasible { residual: f64, rounds: usize },
}

/// A smooth objective on `R^dim`. `value` returns `f64::INFINITY` outside
/// the domain; line searches back off from such points.
pub trait VectorObjective {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes the gradient into `grad` and returns the value.
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64;

    /// Optional diagonal guess of the inverse Hessian at `x`, used to seed
    /// quasi-Newton updates. Badly scaled parameterizations (e.g. logits of
    /// near-zero probabilities) need it to make progress.
    fn preconditioner(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// An objective with equality constraints `c(x) = 0`.
pub trait ConstrainedObjective: VectorObjective {
    fn n_constraints(&self) -> usize;

    fn constraints(&self, x: &[f64], out: &mut [f64]);

    /// Row `k` of `jac` receives the gradient of constraint `k`.
    fn constraint_jacobian(&self, x: &[f64], jac: &mut [Vec<f64>]);
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Lower,
    Upper,
}

/// Result of a golden-section search.
#[derive(Debug, Clone)]
pub struct ScalarMinimum {
    pub argmin: f64,
    pub min: f64,
    pub iterations: usize,
    /// Set when the best point is an endpoint of the bracket.
    pub boundary: Option<Boundary>,
    /// Bracket width after each iteration.
    pub widths: Vec<f64>,
}

/// A 1-D problem: minimize `f` over `[lo, hi]` to bracket width `tol`.
pub struct ScalarObjective<F> {
    pub f: F,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search. Ties keep the left sub-bracket, so flat
/// objectives resolve to the lower endpoint.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    obj: ScalarObjective<F>,
) -> Result<ScalarMinimum, OptError> {
    let ScalarObjective { mut f, lo, hi, tol } = obj;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || !(tol > 0.0) {
        return Err(OptError::InvalidBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut widths = Vec::new();
    let mut iterations = 0;
    while b - a > tol {
        if fc <= fd {
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
        widths.push(b - a);
        iterations += 1;
    }
    let (mut argmin, mut min) = if fc <= fd { (c, fc) } else { (d, fd) };
    let mut boundary = None;
    let (flo, fhi) = (f(lo), f(hi));
    if flo <= min && flo <= fhi {
        argmin = lo;
        min = flo;
        boundary = Some(Boundary::Lower);
    } else if fhi < min {
        argmin = hi;
        min = fhi;
        boundary = Some(Boundary::Upper);
    }
    Ok(ScalarMinimum {
        argmin,
        min,
        iterations,
        boundary,
        widths,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct QnOptions {
    pub gradient_tol: f64,
    pub max_iters: usize,
    /// Below this gradient norm a failed line search counts as numerical
    /// stagnation rather than an error.
    pub stall_gradient: f64,
}

impl Default for QnOptions {
    fn default() -> Self {
        QnOptions {
            gradient_tol: Tolerances::DEFAULT.qn_gradient,
            max_iters: Tolerances::DEFAULT.qn_max_iters,
            stall_gradient: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QnStatus {
    Converged,
    /// Iteration cap reached before the gradient tolerance.
    MaxIterations,
    /// No further decrease representable in floating point.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct QnOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub status: QnStatus,
    /// Objective value at every accepted iterate, starting with `x0`.
    pub trace: Vec<f64>,
}

/// BFGS on the inverse Hessian with Armijo backtracking.
pub fn quasi_newton_min<O: VectorObjective + ?Sized>(
    obj: &O,
    x0: &[f64],
    opts: &QnOptions,
) -> Result<QnOutcome, OptError> {
    let dim = obj.dim();
    assert_eq!(x0.len(), dim, "starting point has wrong dimension");
    let mut x = x0.to_vec();
    let mut g = vec![0.0; dim];
    let mut f = obj.value_grad(&x, &mut g);
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(OptError::NonFiniteStart);
    }
    let initial = |x: &[f64]| {
        let diag = obj.preconditioner(x).unwrap_or_else(|| vec![1.0; dim]);
        let mut h = vec![0.0; dim * dim];
        for i in 0..dim {
            h[i * dim + i] = diag[i];
        }
        h
    };
    let mut h = initial(&x);
    let mut h_is_identity = true;
    let mut trace = vec![f];
    let mut x_new = vec![0.0; dim];
    let mut g_new = vec![0.0; dim];
    let mut d = vec![0.0; dim];
    let mut flat_steps = 0;

    for iteration in 0..opts.max_iters {
        let gnorm = inf_norm(&g);
        if gnorm < opts.gradient_tol {
            return Ok(done(x, f, gnorm, iteration, QnStatus::Converged, trace));
        }
        mat_vec_neg(&h, &g, &mut d);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            h = initial(&x);
            h_is_identity = true;
            mat_vec_neg(&h, &g, &mut d);
            slope = dot(&g, &d);
        }
        let mut alpha = if h_is_identity {
            (1.0 / inf_norm(&d)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..80 {
            for i in 0..dim {
                x_new[i] = x[i] + alpha * d[i];
            }
            let f_try = obj.value_grad(&x_new, &mut g_new);
            if f_try.is_finite() {
                let armijo = f_try <= f + 1e-4 * alpha * slope;
                let rounding = f_try <= f && (alpha * slope).abs() <= 1e-15 * (1.0 + f.abs());
                if armijo || rounding {
                    accepted = Some(f_try);
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some(f_next) = accepted else {
            if !h_is_identity {
                h = initial(&x);
                h_is_identity = true;
                continue;
            }
            if gnorm < opts.stall_gradient {
                return Ok(done(x, f, gnorm, iteration, QnStatus::Stalled, trace));
            }
            return Err(OptError::LineSearch {
                iteration,
                gradient_norm: gnorm,
            });
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let yy = dot(&y, &y);
        if sy > 1e-14 * (dot(&s, &s) * yy).sqrt() && sy > 0.0 {
            if h_is_identity {
                let mut hy = vec![0.0; dim];
                mat_vec_neg(&h, &y, &mut hy);
                let scale = sy / -dot(&y, &hy);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            bfgs_update(&mut h, &s, &y, sy);
            h_is_identity = false;
        }

        if (f - f_next).abs() <= 1e-16 * (1.0 + f.abs()) {
            flat_steps += 1;
        } else {
            flat_steps = 0;
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_next;
        trace.push(f);
        if flat_steps >= 5 && inf_norm(&g) < opts.stall_gradient {
            let gnorm = inf_norm(&g);
            return Ok(done(x, f, gnorm, iteration + 1, QnStatus::Stalled, trace));
        }
    }
    let gnorm = inf_norm(&g);
    let status = if gnorm < opts.gradient_tol {
        QnStatus::Converged
    } else {
        QnStatus::MaxIterations
    };
    Ok(done(x, f, gnorm, opts.max_iters, status, trace))
}

fn done(
    x: Vec<f64>,
    value: f64,
    gradient_norm: f64,
    iterations: usize,
    status: QnStatus,
    trace: Vec<f64>,
) -> QnOutcome {
    QnOutcome {
        x,
        value,
        gradient_norm,
        iterations,
        status,
        trace,
    }
}

fn mat_vec_neg(h: &[f64], g: &[f64], out: &mut [f64]) {
    let dim = g.len();
    for i in 0..dim {
        out[i] = -dot(&h[i * dim..(i + 1) * dim], g);
    }
}

/// `H <- (I - r s y') H (I - r y s') + r s s'` with `r = 1 / (s'y)`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let dim = s.len();
    let r = 1.0 / sy;
    let hy: Vec<f64> = (0..dim)
        .map(|i| dot(&h[i * dim..(i + 1) * dim], y))
        .collect();
    let yhy = dot(y, &hy);
    let coef = (1.0 + r * yhy) * r;
    for i in 0..dim {
        for j in 0..dim {
            h[i * dim + j] += coef * s[i] * s[j] - r * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AlOptions {
    pub residual_tol: f64,
    pub lagrangian_gradient_tol: f64,
    pub max_rounds: usize,
    pub penalty_growth: f64,
    pub initial_penalty: f64,
    pub inner: QnOptions,
}

impl Default for AlOptions {
    fn default() -> Self {
        let t = Tolerances::DEFAULT;
        AlOptions {
            residual_tol: t.al_residual,
            lagrangian_gradient_tol: t.al_lagrangian_gradient,
            max_rounds: t.al_max_rounds,
            penalty_growth: t.al_penalty_growth,
            initial_penalty: t.al_initial_penalty,
            inner: QnOptions {
                gradient_tol: 1e-10,
                max_iters: 500,
                stall_gradient: 1e-5,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlOutcome {
    pub x: Vec<f64>,
    /// Objective (not Lagrangian) value at `x`.
    pub value: f64,
    /// Constraint infinity-norm at `x`.
    pub residual: f64,
    /// Infinity-norm of `grad f + J' lambda`.
    pub lagrangian_gradient: f64,
    pub multipliers: Vec<f64>,
    pub penalty: f64,
    pub rounds: usize,
    pub inner_iterations: usize,
}

struct AugmentedLagrangian<'a, O> {
    obj: &'a O,
    lambda: &'a [f64],
    mu: f64,
}

impl<O: ConstrainedObjective> VectorObjective for AugmentedLagrangian<'_, O> {
    fn dim(&self) -> usize {
        self.obj.dim()
    }

    fn preconditioner(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.obj.preconditioner(x)
    }

    fn value(&self, x: &[f64]) -> f64 {
        let f = self.obj.value(x);
        if !f.is_finite() {
            return f;
        }
        let mut c = vec![0.0; self.obj.n_constraints()];
        self.obj.constraints(x, &mut c);
        f + c
            .iter()
            .zip(self.lambda)
            .map(|(ci, li)| li * ci + 0.5 * self.mu * ci * ci)
            .sum::<f64>()
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let f = self.obj.value_grad(x, grad);
        if !f.is_finite() {
            return f;
        }
        let m = self.obj.n_constraints();
        let mut c = vec![0.0; m];
        self.obj.constraints(x, &mut c);
        let mut jac = vec![vec![0.0; x.len()]; m];
        self.obj.constraint_jacobian(x, &mut jac);
        let mut total = f;
        for k in 0..m {
            let w = self.lambda[k] + self.mu * c[k];
            total += self.lambda[k] * c[k] + 0.5 * self.mu * c[k] * c[k];
            for (gi, ji) in grad.iter_mut().zip(&jac[k]) {
                *gi += w * ji;
            }
        }
        total
    }
}

fn lagrangian_gradient<O: ConstrainedObjective>(obj: &O, x: &[f64], lambda: &[f64]) -> f64 {
    let mut g = vec![0.0; x.len()];
    obj.value_grad(x, &mut g);
    let mut jac = vec![vec![0.0; x.len()]; obj.n_constraints()];
    obj.constraint_jacobian(x, &mut jac);
    for (row, l) in jac.iter().zip(lambda) {
        for (gi, ji) in g.iter_mut().zip(row) {
            *gi += l * ji;
        }
    }
    inf_norm(&g)
}

const RESIDUAL_PROGRESS: f64 = 0.25;

/// Method of multipliers. Each round minimizes the augmented Lagrangian by
/// BFGS and updates `lambda += mu c`; the penalty is multiplied by
/// `penalty_growth` whenever the residual fell by less than a factor of 4.
/// Stops once the constraint and Lagrangian-gradient tolerances both hold;
/// fails if still infeasible after `max_rounds`.
pub fn augmented_lagrangian_min<O: ConstrainedObjective>(
    obj: &O,
    x0: &[f64],
    opts: &AlOptions,
) -> Result<AlOutcome, OptError> {
    let m = obj.n_constraints();
    let mut lambda = vec![0.0; m];
    let mut mu = opts.initial_penalty;
    let mut x = x0.to_vec();
    let mut c = vec![0.0; m];
    let mut inner_iterations = 0;
    let mut residual = f64::INFINITY;
    let mut lgrad = f64::INFINITY;
    let mut rounds = 0;
    let mut previous_residual = f64::INFINITY;

    while rounds < opts.max_rounds {
        rounds += 1;
        let inner = {
            let al = AugmentedLagrangian {
                obj,
                lambda: &lambda,
                mu,
            };
            quasi_newton_min(&al, &x, &opts.inner)?
        };
        inner_iterations += inner.iterations;
        x = inner.x;
        obj.constraints(&x, &mut c);
        residual = inf_norm(&c);
        for (l, ci) in lambda.iter_mut().zip(&c) {
            *l += mu * ci;
        }
        lgrad = lagrangian_gradient(obj, &x, &lambda);
        if residual < opts.residual_tol && lgrad < opts.lagrangian_gradient_tol {
            break;
        }
        // Escalate only when the multiplier update alone is not making
        // progress; large penalties make the inner problem ill-conditioned.
        if residual > RESIDUAL_PROGRESS * previous_residual {
            mu *= opts.penalty_growth;
        }
        previous_residual = residual;
    }
    if !(residual < opts.residual_tol) {
        return Err(OptError::Infeasible { residual, rounds });
    }
    Ok(AlOutcome {
        value: obj.value(&x),
        x,
        residual,
        lagrangian_gradient: lgrad,
        multipliers: lambda,
        penalty: mu,
        rounds,
        inner_iterations,
    })
}

/// Max absolute deviation between the analytic gradient and central
/// differences with the given step.
pub fn finite_diff_grad_check<O: VectorObjective + ?Sized>(obj: &O, x: &[f64], step: f64) -> f64 {
    let mut analytic = vec![0.0; x.len()];
    obj.value_grad(x, &mut analytic);
    let mut probe = x.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        probe[i] = x[i] + step;
        let fp = obj.value(&probe);
        probe[i] = x[i] - step;
        let fm = obj.value(&probe);
        probe[i] = x[i];
        let numeric = (fp - fm) / (2.0 * step);
        worst = worst.max((numeric - analytic[i]).abs());
    }
    worst
}
