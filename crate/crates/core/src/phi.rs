//! Integrated-information measures for discrete systems.
//!
//! Each measure is the KL distance from `p(x, y)` to its projection onto a
//! split model:
//!
//! | measure | model | method |
//! |---|---|---|
//! | `I`      | `q(x) q(y)`                        | closed form |
//! | `Phi_FS` | `q(x) prod q(y_i \| x_i)`          | closed form |
//! | `Phi_DS` | `f(x) g(y) prod h(x_i, y_i)`       | IPF |
//! | `Phi_MD` | `q(x, y; beta)`                    | golden section in beta |
//! | `Phi_G`  | `x_i` indep. of `y_j` given rest   | augmented Lagrangian, Newton |
//!
//! `Phi_MD` and `Phi_G` work on interior points: inputs with cells below the
//! smoothing weight are first mixed with the uniform table, and the
//! diagnostics record it. The reported value is always the KL from the raw
//! input to the returned `q_star`.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::discrete::{kl_slices, mutual_information, product_of_marginals, DiscreteJoint, VarSet};
use crate::error::{Error, Result};
use crate::expfam::ipf_project;
use crate::hierarchy::{HierarchyReport, MeasureValues};
use crate::model::SplitModelKind;
use crate::numopt::{
    augmented_lagrangian_min, golden_section_min, AlOptions, Boundary, ConstrainedObjective,
    ScalarObjective, VectorObjective,
};
use crate::random::rng;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy)]
pub struct PhiOptions {
    pub tolerances: Tolerances,
    /// Seed for the perturbed restarts of the geometric projection.
    pub seed: u64,
}

impl Default for PhiOptions {
    fn default() -> Self {
        PhiOptions {
            tolerances: Tolerances::DEFAULT,
            seed: 0,
        }
    }
}

/// Solver diagnostics; fields that do not apply to a measure are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PhiDiagnostics {
    /// `D_KL[p : q_star]` recomputed from the tables.
    pub kl_check: f64,
    /// Max deviation of the defining constraints at `q_star`.
    pub residual: f64,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_bracket: Option<[f64; 2]>,
    /// `dKL/dbeta` at zero; never positive, so the minimum never lies at
    /// negative beta.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_at_zero: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasible_restarts: Option<usize>,
    /// Which candidate won: `fs_start`, `i_start`, `restart_<k>` or
    /// `conditional_newton`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lagrangian_gradient: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PhiResult {
    pub kind: SplitModelKind,
    pub phi: f64,
    pub q_star: DiscreteJoint,
    pub diagnostics: PhiDiagnostics,
}

fn interior(p: &DiscreteJoint, eps: f64) -> (DiscreteJoint, Option<f64>) {
    if p.min_prob() < eps {
        (p.smoothed(eps), Some(eps))
    } else {
        (p.clone(), None)
    }
}

/// `q*_FS(x, y) = p(x) prod_i p(y_i | x_i)`; rows with `p(x_i) = 0` carry
/// no mass.
pub fn fs_projection(p: &DiscreteJoint) -> DiscreteJoint {
    let n = p.n();
    let px = p.marginal_x();
    let pairs: Vec<Vec<f64>> = (0..n)
        .map(|i| p.marginal_unchecked(VarSet::pair(n, i)).probs)
        .collect();
    let x_mask = (1usize << n) - 1;
    let probs = (0..p.len())
        .map(|cell| {
            let x = cell & x_mask;
            let y = cell >> n;
            let mut q = px[x];
            for (i, pair) in pairs.iter().enumerate() {
                let xi = x >> i & 1;
                let yi = y >> i & 1;
                let mass = pair[xi] + pair[xi | 2];
                q *= if mass > 0.0 {
                    pair[xi | yi << 1] / mass
                } else {
                    0.0
                };
            }
            q
        })
        .collect();
    DiscreteJoint::from_normalized(n, probs)
}

/// Max deviation of `q(x, y)` from `q(x) prod q(y_i | x_i)`.
pub fn fs_residual(q: &DiscreteJoint) -> f64 {
    let f = fs_projection(q);
    q.probs()
        .iter()
        .zip(f.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Stochastic interaction: `sum_i H[Y_i|X_i] - H[Y|X]`.
pub fn phi_fs(p: &DiscreteJoint) -> Result<PhiResult> {
    let n = p.n();
    let h_y_given_x = p.entropy() - p.subset_entropy(VarSet::all_x(n));
    let sum_channels: f64 = (0..n)
        .map(|i| p.subset_entropy(VarSet::pair(n, i)) - p.subset_entropy(VarSet::x(n, i)))
        .sum();
    let phi = sum_channels - h_y_given_x;
    let q_star = fs_projection(p);
    let kl = kl_slices(p.probs(), q_star.probs());
    Ok(PhiResult {
        kind: SplitModelKind::FS,
        phi,
        diagnostics: PhiDiagnostics {
            kl_check: kl,
            residual: (phi - kl).abs(),
            ..Default::default()
        },
        q_star,
    })
}

/// Projection onto the diagonally split graphical model: the member that
/// matches `p(x)`, `p(y)` and every `p(x_i, y_i)`.
pub fn phi_ds(p: &DiscreteJoint) -> Result<PhiResult> {
    let cliques = SplitModelKind::DS.cliques(p.n()).expect("DS is e-flat");
    let out = ipf_project(p, &cliques)?;
    let kl = kl_slices(p.probs(), out.joint.probs());
    Ok(PhiResult {
        kind: SplitModelKind::DS,
        phi: kl.max(0.0),
        diagnostics: PhiDiagnostics {
            kl_check: kl,
            residual: out.residual,
            iterations: out.sweeps,
            ..Default::default()
        },
        q_star: out.joint,
    })
}

/// The mismatched-decoding family
/// `q(x, y; beta) = p(x) p(y) prod_i p(y_i|x_i)^beta / Z(y)` with
/// `Z(y) = sum_x' p(x') prod_i p(y_i|x'_i)^beta`. Requires full support.
pub struct DecodingFamily {
    n: usize,
    ln_px: Vec<f64>,
    ln_py: Vec<f64>,
    /// `sum_i ln p(y_i | x_i)` per cell.
    ln_lik: Vec<f64>,
}

impl DecodingFamily {
    pub fn new(p: &DiscreteJoint) -> Result<Self> {
        if let Some(index) = p.probs().iter().position(|&v| v <= 0.0) {
            return Err(Error::ZeroProbability { index });
        }
        let n = p.n();
        let pairs: Vec<Vec<f64>> = (0..n)
            .map(|i| p.marginal_unchecked(VarSet::pair(n, i)).probs)
            .collect();
        let x_mask = (1usize << n) - 1;
        let ln_lik = (0..p.len())
            .map(|cell| {
                let (x, y) = (cell & x_mask, cell >> n);
                pairs
                    .iter()
                    .enumerate()
                    .map(|(i, pair)| {
                        let xi = x >> i & 1;
                        (pair[xi | (y >> i & 1) << 1] / (pair[xi] + pair[xi | 2])).ln()
                    })
                    .sum()
            })
            .collect();
        Ok(DecodingFamily {
            n,
            ln_px: p.marginal_x().iter().map(|v| v.ln()).collect(),
            ln_py: p.marginal_y().iter().map(|v| v.ln()).collect(),
            ln_lik,
        })
    }

    /// `ln q(x, y; beta)` for every cell.
    pub fn log_probs(&self, beta: f64) -> Vec<f64> {
        let states = 1usize << self.n;
        let mut out = vec![0.0; states * states];
        let mut s = vec![0.0; states];
        for y in 0..states {
            for (x, sx) in s.iter_mut().enumerate() {
                *sx = self.ln_px[x] + beta * self.ln_lik[x | y << self.n];
            }
            let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let ln_z = m + s.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            for (x, sx) in s.iter().enumerate() {
                out[x | y << self.n] = sx + self.ln_py[y] - ln_z;
            }
        }
        out
    }

    pub fn joint(&self, beta: f64) -> DiscreteJoint {
        let probs = self.log_probs(beta).into_iter().map(f64::exp).collect();
        DiscreteJoint::from_normalized(self.n, probs)
    }

    /// `D_KL[p : q(beta)]`.
    pub fn kl(&self, p: &DiscreteJoint, beta: f64) -> f64 {
        p.probs()
            .iter()
            .zip(self.log_probs(beta))
            .filter(|(&pv, _)| pv > 0.0)
            .map(|(&pv, lq)| pv * (pv.ln() - lq))
            .sum()
    }

    /// `dKL/dbeta` at `beta = 0`, equal to
    /// `-sum_i (I(X_i;Y_i) + E_{x_i} D[p(y_i) : p(y_i|x_i)])`.
    pub fn slope_at_zero(&self, p: &DiscreteJoint) -> f64 {
        let states = 1usize << self.n;
        let px: Vec<f64> = self.ln_px.iter().map(|v| v.exp()).collect();
        let py: Vec<f64> = self.ln_py.iter().map(|v| v.exp()).collect();
        let mut under_p = 0.0;
        let mut under_product = 0.0;
        for cell in 0..p.len() {
            let (x, y) = (cell % states, cell / states);
            under_p += p.probs()[cell] * self.ln_lik[cell];
            under_product += px[x] * py[y] * self.ln_lik[cell];
        }
        under_product - under_p
    }
}

/// Max deviation of `q` from the decoding family of `p` at `beta`.
pub fn md_residual(p: &DiscreteJoint, q: &DiscreteJoint, beta: f64) -> Result<f64> {
    let fam = DecodingFamily::new(p)?;
    Ok(fam
        .joint(beta)
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Mismatched decoding: minimizes `D_KL[p : q(beta)]` over `beta >= 0`.
pub fn phi_md(p: &DiscreteJoint, opts: &PhiOptions) -> Result<PhiResult> {
    let t = &opts.tolerances;
    let (ps, smoothing) = interior(p, t.smoothing);
    let fam = DecodingFamily::new(&ps)?;
    let mut hi = t.beta_max;
    let mut widened = false;
    let best = loop {
        let res = golden_section_min(ScalarObjective {
            f: |b| fam.kl(&ps, b),
            lo: 0.0,
            hi,
            tol: t.golden_section,
        })?;
        let upper_active =
            res.boundary == Some(Boundary::Upper) || res.argmin >= hi - 10.0 * t.golden_section;
        if !upper_active {
            break res;
        }
        if widened {
            return Err(Error::BoundaryMinimum { beta: res.argmin });
        }
        widened = true;
        hi *= t.beta_widen;
    };
    let q_star = fam.joint(best.argmin);
    let kl = kl_slices(p.probs(), q_star.probs());
    Ok(PhiResult {
        kind: SplitModelKind::MD,
        phi: kl.max(0.0),
        diagnostics: PhiDiagnostics {
            kl_check: kl,
            residual: 0.0,
            iterations: best.iterations,
            smoothing,
            beta_star: Some(best.argmin),
            beta_bracket: Some([0.0, hi]),
            slope_at_zero: Some(fam.slope_at_zero(&ps)),
            ..Default::default()
        },
        q_star,
    })
}

/// One conditional-independence constraint: `q(y_j = 1 | x)` must equal
/// `q(y_j = 1 | r)` where `r` keeps `x_j` and zeroes the other inputs.
#[derive(Debug, Clone, Copy)]
struct MarkovPair {
    a: usize,
    r: usize,
    j: usize,
}

fn markov_pairs(n: usize) -> Vec<MarkovPair> {
    let mut out = Vec::new();
    for j in 0..n {
        let bit = 1usize << j;
        for a in 0..1usize << n {
            if a & !bit != 0 {
                out.push(MarkovPair { a, r: a & bit, j });
            }
        }
    }
    out
}

/// Per output `j`, the masses `q(x, y_j = 1)` and `q(x, y_j = 0)`.
fn markov_sums(n: usize, q: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let states = 1usize << n;
    let mut ones = vec![vec![0.0; states]; n];
    let mut zeros = vec![vec![0.0; states]; n];
    for (cell, &v) in q.iter().enumerate() {
        let (x, y) = (cell % states, cell / states);
        for j in 0..n {
            if y >> j & 1 == 1 {
                ones[j][x] += v;
            } else {
                zeros[j][x] += v;
            }
        }
    }
    (ones, zeros)
}

/// Max over all constraints of `|q(y_j=1|x) - q(y_j=1|r)|`. Zero exactly
/// when every `y_j` is independent of `x_i` (`i != j`) given the other inputs.
pub fn markov_residual(q: &DiscreteJoint) -> f64 {
    let (ones, zeros) = markov_sums(q.n(), q.probs());
    let cond = |j: usize, x: usize| ones[j][x] / (ones[j][x] + zeros[j][x]);
    markov_pairs(q.n())
        .iter()
        .map(|c| {
            let (ca, cr) = (cond(c.j, c.a), cond(c.j, c.r));
            if ca.is_finite() && cr.is_finite() {
                (ca - cr).abs()
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// `D_KL[p : softmax(z)]` subject to the Markov conditions of the
/// geometric model, written as equal log-odds
/// `logit q(y_j=1 | a) - logit q(y_j=1 | r) = 0`. The last logit is pinned
/// to zero.
///
/// Log-odds keep the constraint gradients normalized by the mass of the
/// conditioning row, so the constraints stay well posed when the optimum
/// pushes cells towards zero.
pub struct GeometricProblem {
    n: usize,
    p: Vec<f64>,
    neg_entropy: f64,
    pairs: Vec<MarkovPair>,
}

impl GeometricProblem {
    pub fn new(p: &DiscreteJoint) -> Self {
        let neg_entropy = p
            .probs()
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| v * v.ln())
            .sum();
        GeometricProblem {
            n: p.n(),
            p: p.probs().to_vec(),
            neg_entropy,
            pairs: markov_pairs(p.n()),
        }
    }

    /// `(q, ln q)` for the logits `z`.
    pub fn softmax(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = z.iter().copied().fold(0.0, f64::max);
        let mut e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
        e.push((-m).exp());
        let total: f64 = e.iter().sum();
        let ln_total = total.ln();
        let q = e.iter().map(|v| v / total).collect();
        let lq = z
            .iter()
            .chain(std::iter::once(&0.0))
            .map(|v| v - m - ln_total)
            .collect();
        (q, lq)
    }

    /// Logits reproducing a full-support table.
    pub fn logits(q: &DiscreteJoint) -> Vec<f64> {
        let probs = q.probs();
        let last = probs[probs.len() - 1].ln();
        probs[..probs.len() - 1]
            .iter()
            .map(|v| v.ln() - last)
            .collect()
    }

    /// Infinity-norm of the constraints at `z`.
    pub fn constraint_residual(&self, z: &[f64]) -> f64 {
        let mut c = vec![0.0; self.pairs.len()];
        self.constraints(z, &mut c);
        c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn joint(&self, z: &[f64]) -> DiscreteJoint {
        DiscreteJoint::from_normalized(self.n, self.softmax(z).0)
    }
}

impl VectorObjective for GeometricProblem {
    fn dim(&self) -> usize {
        self.p.len() - 1
    }

    fn value(&self, z: &[f64]) -> f64 {
        let (_, lq) = self.softmax(z);
        self.neg_entropy - self.p.iter().zip(&lq).map(|(p, l)| p * l).sum::<f64>()
    }

    fn value_grad(&self, z: &[f64], grad: &mut [f64]) -> f64 {
        let (q, lq) = self.softmax(z);
        for (k, g) in grad.iter_mut().enumerate() {
            *g = q[k] - self.p[k];
        }
        self.neg_entropy - self.p.iter().zip(&lq).map(|(p, l)| p * l).sum::<f64>()
    }

    /// The softmax Fisher information is roughly `diag(q)`, so a logit of a
    /// cell with mass `q_k` moves on the scale `1 / q_k`.
    fn preconditioner(&self, z: &[f64]) -> Option<Vec<f64>> {
        let (q, _) = self.softmax(z);
        Some(q[..z.len()].iter().map(|v| 1.0 / v.max(1e-300)).collect())
    }
}

impl ConstrainedObjective for GeometricProblem {
    fn n_constraints(&self) -> usize {
        self.pairs.len()
    }

    fn constraints(&self, z: &[f64], out: &mut [f64]) {
        let (q, _) = self.softmax(z);
        let (ones, zeros) = markov_sums(self.n, &q);
        let logit = |j: usize, x: usize| ones[j][x].ln() - zeros[j][x].ln();
        for (o, c) in out.iter_mut().zip(&self.pairs) {
            *o = logit(c.j, c.a) - logit(c.j, c.r);
        }
    }

    fn constraint_jacobian(&self, z: &[f64], jac: &mut [Vec<f64>]) {
        let (q, _) = self.softmax(z);
        let (ones, zeros) = markov_sums(self.n, &q);
        let states = 1usize << self.n;
        // Within a row x, d logit / d z_k = q_k / q(x, y_j=1) or
        // -q_k / q(x, y_j=0); the softmax normalization cancels.
        for (row, c) in jac.iter_mut().zip(&self.pairs) {
            row.iter_mut().for_each(|v| *v = 0.0);
            for (x, sign) in [(c.a, 1.0), (c.r, -1.0)] {
                for y in 0..states {
                    let k = x + y * states;
                    if k < row.len() {
                        let g = if y >> c.j & 1 == 1 {
                            q[k] / ones[c.j][x]
                        } else {
                            -q[k] / zeros[c.j][x]
                        };
                        row[k] = sign * g;
                    }
                }
            }
        }
    }
}

/// The geometric model with the input marginal fixed at `p(x)` is linear in
/// the conditionals `u(y | x)`: each row sums to one and each Markov pair
/// equates two partial row sums. `D_KL[p : p(x) u]` is convex in `u`, so a
/// feasible-start Newton method in the null space of the constraints finds
/// the global optimum, including optima close to the simplex boundary where
/// the logit parameterization stalls.
///
/// Returns the joint table and the number of Newton steps.
fn conditional_newton(p: &DiscreteJoint, pairs: &[MarkovPair]) -> Option<(Vec<f64>, usize)> {
    const MAX_STEPS: usize = 200;
    let n = p.n();
    let states = 1usize << n;
    let dim = states * states;
    let w = p.probs();
    let px = p.marginal_x();
    if px.iter().any(|&v| v <= 0.0) {
        return None;
    }

    let mut cons = DMatrix::<f64>::zeros(states + pairs.len(), dim);
    for x in 0..states {
        for y in 0..states {
            cons[(x, x + y * states)] = 1.0;
        }
    }
    for (row, c) in pairs.iter().enumerate() {
        for y in (0..states).filter(|y| y >> c.j & 1 == 1) {
            cons[(states + row, c.a + y * states)] = 1.0;
            cons[(states + row, c.r + y * states)] = -1.0;
        }
    }
    let fs = fs_projection(p);
    let mut u = DVector::from_iterator(dim, (0..dim).map(|k| fs.probs()[k] / px[k % states]));
    let f = |u: &DVector<f64>| -> f64 {
        w.iter()
            .zip(u.iter())
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, u)| -w * u.ln())
            .sum()
    };
    let mut value = f(&u);
    let mut steps = 0;
    while steps < MAX_STEPS {
        // In the scaled variables `e = H^{1/2} d` the Newton step is the
        // least-squares projection of `-H^{-1/2} g = sqrt(w)` onto the null
        // space of `A H^{-1/2}`, which stays accurate when the Hessian
        // entries `w / u^2` span many orders of magnitude.
        let scale = DVector::from_iterator(dim, (0..dim).map(|k| u[k] / w[k].sqrt()));
        let rhs = DVector::from_iterator(dim, w.iter().map(|v| v.sqrt()));
        let mut bt = cons.transpose();
        for (k, mut row) in bt.row_iter_mut().enumerate() {
            row *= scale[k];
        }
        let svd = bt.svd(true, false);
        let range = svd.u?;
        let cutoff = 1e-12 * svd.singular_values.max();
        let mut e = rhs.clone();
        for (c, &sv) in svd.singular_values.iter().enumerate() {
            if sv > cutoff {
                let col = range.column(c);
                e -= col * col.dot(&rhs);
            }
        }
        let dir = e.component_mul(&scale);
        let decrement = e.norm_squared();
        if !(decrement > 1e-24) {
            break;
        }
        let mut s = 1.0;
        let accepted = loop {
            let trial = &u + s * &dir;
            if trial.iter().all(|&v| v > 0.0) {
                let tv = f(&trial);
                if tv <= value - 0.25 * s * decrement {
                    break Some((trial, tv));
                }
            }
            s *= 0.5;
            if s < 1e-12 {
                break None;
            }
        };
        let Some((trial, tv)) = accepted else { break };
        u = trial;
        value = tv;
        steps += 1;
    }
    let q = (0..dim).map(|k| px[k % states] * u[k]).collect();
    Some((q, steps))
}

/// Projection onto the geometric (causally split) model.
///
/// Candidates: the FS and I projections (both exactly feasible), then
/// augmented-Lagrangian runs started from each of them and from seeded
/// perturbations of the FS logits, and finally the conditional-space Newton
/// solution. The smallest objective wins; ties go to the earliest candidate.
/// Fails if no optimizer run reaches the residual tolerance.
///
/// The reported residual is [`markov_residual`] of `q_star`.
pub fn phi_g(p: &DiscreteJoint, opts: &PhiOptions) -> Result<PhiResult> {
    let t = &opts.tolerances;
    let (ps, smoothing) = interior(p, t.smoothing);
    let problem = GeometricProblem::new(&ps);
    let z_fs = GeometricProblem::logits(&fs_projection(&ps));
    let z_i = GeometricProblem::logits(&product_of_marginals(&ps));

    let mut starts = vec![z_fs.clone(), z_i.clone()];
    let noise = Normal::new(0.0, 0.5).expect("valid normal");
    for k in 2..t.g_restarts.max(2) {
        let mut r = rng(opts.seed.wrapping_add(k as u64));
        starts.push(z_fs.iter().map(|v| v + noise.sample(&mut r)).collect());
    }

    struct Candidate {
        label: String,
        z: Vec<f64>,
        value: f64,
        lagrangian_gradient: f64,
        iterations: usize,
    }
    let mut candidates = vec![
        Candidate {
            label: "fs_start".into(),
            value: problem.value(&z_fs),
            z: z_fs,
            lagrangian_gradient: f64::NAN,
            iterations: 0,
        },
        Candidate {
            label: "i_start".into(),
            value: problem.value(&z_i),
            z: z_i,
            lagrangian_gradient: f64::NAN,
            iterations: 0,
        },
    ];
    let al_opts = AlOptions::default();
    let mut feasible = 0;
    let mut worst_residual: f64 = 0.0;
    for (k, start) in starts.iter().enumerate() {
        match augmented_lagrangian_min(&problem, start, &al_opts) {
            Ok(out) => {
                feasible += 1;
                candidates.push(Candidate {
                    label: format!("restart_{k}"),
                    z: out.x,
                    value: out.value,
                    lagrangian_gradient: out.lagrangian_gradient,
                    iterations: out.inner_iterations,
                });
            }
            Err(e) => {
                log::debug!("geometric projection restart {k} failed: {e}");
                if let crate::numopt::OptError::Infeasible { residual, .. } = e {
                    worst_residual = worst_residual.max(residual);
                }
            }
        }
    }
    if let Some((q, steps)) = conditional_newton(&ps, &problem.pairs) {
        if q.iter().all(|&v| v > 0.0) {
            let q = DiscreteJoint::from_normalized(ps.n(), q);
            if markov_residual(&q) <= al_opts.residual_tol {
                let z = GeometricProblem::logits(&q);
                feasible += 1;
                candidates.push(Candidate {
                    label: "conditional_newton".into(),
                    value: problem.value(&z),
                    z,
                    lagrangian_gradient: f64::NAN,
                    iterations: steps,
                });
            }
        }
    }
    if feasible == 0 {
        return Err(Error::Infeasible {
            residual: worst_residual,
            restarts: starts.len(),
        });
    }
    let mut best = 0;
    for (k, c) in candidates.iter().enumerate() {
        if c.value < candidates[best].value {
            best = k;
        }
    }
    let best = &candidates[best];
    let q_star = problem.joint(&best.z);
    let kl = kl_slices(p.probs(), q_star.probs());
    Ok(PhiResult {
        kind: SplitModelKind::G,
        phi: kl.max(0.0),
        diagnostics: PhiDiagnostics {
            kl_check: kl,
            residual: markov_residual(&q_star),
            iterations: best.iterations,
            smoothing,
            restarts: Some(starts.len()),
            feasible_restarts: Some(feasible),
            selected: Some(best.label.clone()),
            lagrangian_gradient: best
                .lagrangian_gradient
                .is_finite()
                .then_some(best.lagrangian_gradient),
            ..Default::default()
        },
        q_star,
    })
}

/// `I(X;Y)` in nats.
pub fn mutual_information_of(p: &DiscreteJoint) -> f64 {
    mutual_information(p)
}

/// All measures for one system. Failures are kept per measure.
#[derive(Debug)]
pub struct PhiSuite {
    pub mutual_information: f64,
    pub fs: Result<PhiResult>,
    pub ds: Result<PhiResult>,
    pub md: Result<PhiResult>,
    pub g: Result<PhiResult>,
}

impl PhiSuite {
    pub fn values(&self) -> MeasureValues {
        let v = |r: &Result<PhiResult>| r.as_ref().ok().map(|r| r.phi);
        MeasureValues {
            i: self.mutual_information,
            phi_fs: v(&self.fs),
            phi_ds: v(&self.ds),
            phi_md: v(&self.md),
            phi_g: v(&self.g),
        }
    }

    pub fn get(&self, kind: SplitModelKind) -> Option<&Result<PhiResult>> {
        match kind {
            SplitModelKind::I => None,
            SplitModelKind::FS => Some(&self.fs),
            SplitModelKind::DS => Some(&self.ds),
            SplitModelKind::MD => Some(&self.md),
            SplitModelKind::G => Some(&self.g),
        }
    }

    pub fn hierarchy(&self, tol: f64) -> HierarchyReport {
        HierarchyReport::evaluate(&self.values(), tol)
    }
}

pub fn phi_all(p: &DiscreteJoint, opts: &PhiOptions) -> PhiSuite {
    PhiSuite {
        mutual_information: mutual_information(p),
        fs: phi_fs(p),
        ds: phi_ds(p),
        md: phi_md(p, opts),
        g: phi_g(p, opts),
    }
}

/// Runs every measure and checks the orderings and bounds within `tol`.
pub fn verify_hierarchy(p: &DiscreteJoint, tol: f64, opts: &PhiOptions) -> HierarchyReport {
    phi_all(p, opts).hierarchy(tol)
}
