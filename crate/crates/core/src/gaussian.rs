//! Gaussian autoregressive systems `y = A x + e`.
//!
//! Conventions: `Cov(x, y) = Sigma_X A'` and `Cov(y) = A Sigma_X A' + Sigma_E`.
//! The natural parameters are `theta_XX = Sigma_X^-1`,
//! `theta_YY = Sigma_E^-1` and `theta_XY = -A' Sigma_E^-1`; the last two are
//! also the y-block and x/y-block of the joint precision matrix, while its
//! x-block is `theta_XX + A' Sigma_E^-1 A`.
//!
//! Measures:
//! - [`gaussian_mutual_info`] gives `I(X;Y)`.
//! - [`phi_fs_gauss`] uses per-channel regressions, closed form.
//! - [`phi_ds_gauss`] does covariance selection with zero precision between
//!   `x_i` and `y_j`, `i != j`, solved by quasi-Newton over the free
//!   precision entries.
//! - [`phi_g_gauss`] minimizes `1/2 ln det Cov(y - A'x)` over diagonal `A'`
//!   from several starts (the objective is not convex).
//!
//! `Phi_G` is reported as `1/2 ln(det Sigma_E' / det Sigma_E)`, the
//! nonnegative KL distance to the projection.

use nalgebra::{Cholesky, DMatrix, Dyn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::{HierarchyReport, MeasureValues};
use crate::model::SplitModelKind;
use crate::numopt::{
    finite_diff_grad_check, quasi_newton_min, QnOptions, QnStatus, VectorObjective,
};

const SYMMETRY_TOL: f64 = 1e-12;
const MIN_EIGENVALUE: f64 = 1e-10;

fn check_square(m: &DMatrix<f64>, n: usize, name: &str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::BadMatrixShape(name.into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(name.into()));
    }
    Ok(())
}

fn check_spd(m: &DMatrix<f64>, name: &str) -> Result<DMatrix<f64>> {
    let scale = m.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric(name.into()));
            }
        }
    }
    let sym = (m + m.transpose()) * 0.5;
    let min_eig = sym.clone().symmetric_eigen().eigenvalues.min();
    if !(min_eig > MIN_EIGENVALUE) {
        return Err(Error::NotPositiveDefinite(name.into()));
    }
    Ok(sym)
}

pub(crate) fn log_det_spd(m: &DMatrix<f64>) -> Option<f64> {
    let chol = Cholesky::new(m.clone())?;
    let l = chol.l_dirty();
    let mut total = 0.0;
    for i in 0..m.nrows() {
        total += l[(i, i)].ln();
    }
    Some(2.0 * total)
}

fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let inv = Cholesky::new(m.clone())?.inverse();
    Some((&inv + inv.transpose()) * 0.5)
}

/// Zero-mean AR system `(Sigma_X, A, Sigma_E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSystem {
    sigma_x: DMatrix<f64>,
    a: DMatrix<f64>,
    sigma_e: DMatrix<f64>,
}

impl GaussianSystem {
    pub fn new(sigma_x: DMatrix<f64>, a: DMatrix<f64>, sigma_e: DMatrix<f64>) -> Result<Self> {
        let n = sigma_x.nrows();
        if n == 0 {
            return Err(Error::UnsupportedSize(0));
        }
        check_square(&sigma_x, n, "sigma_x")?;
        check_square(&a, n, "a")?;
        check_square(&sigma_e, n, "sigma_e")?;
        let sigma_x = check_spd(&sigma_x, "sigma_x")?;
        let sigma_e = check_spd(&sigma_e, "sigma_e")?;
        Ok(GaussianSystem {
            sigma_x,
            a,
            sigma_e,
        })
    }

    /// System whose input covariance is the stationary covariance of the
    /// process `x_{t+1} = A x_t + e_t`, i.e. the solution of
    /// `S = A S A' + Sigma_E`. Requires spectral radius below one.
    pub fn stationary(a: DMatrix<f64>, sigma_e: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        check_square(&a, n, "a")?;
        check_square(&sigma_e, n, "sigma_e")?;
        let kron = a.kronecker(&a);
        let lhs = DMatrix::<f64>::identity(n * n, n * n) - kron;
        let rhs = DMatrix::from_column_slice(n * n, 1, sigma_e.as_slice());
        let sol = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NotPositiveDefinite("stationary covariance".into()))?;
        let s = DMatrix::from_column_slice(n, n, sol.as_slice());
        Self::new((&s + s.transpose()) * 0.5, a, sigma_e)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn sigma_x(&self) -> &DMatrix<f64> {
        &self.sigma_x
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn sigma_e(&self) -> &DMatrix<f64> {
        &self.sigma_e
    }

    /// `Cov(y) = A Sigma_X A' + Sigma_E`.
    pub fn sigma_y(&self) -> DMatrix<f64> {
        let s = &self.a * &self.sigma_x * self.a.transpose() + &self.sigma_e;
        (&s + s.transpose()) * 0.5
    }

    /// `Cov(y, x) = A Sigma_X` (rows index `y`).
    pub fn cov_yx(&self) -> DMatrix<f64> {
        &self.a * &self.sigma_x
    }

    pub fn theta(&self) -> Result<GaussianThetaCoords> {
        let theta_xx = spd_inverse(&self.sigma_x)
            .ok_or_else(|| Error::NotPositiveDefinite("sigma_x".into()))?;
        let theta_yy = spd_inverse(&self.sigma_e)
            .ok_or_else(|| Error::NotPositiveDefinite("sigma_e".into()))?;
        let theta_xy = -(self.a.transpose() * &theta_yy);
        Ok(GaussianThetaCoords {
            theta_xx,
            theta_yy,
            theta_xy,
        })
    }

    /// Inverse of [`GaussianSystem::theta`]: `A = -(theta_XY theta_YY^-1)'`.
    pub fn from_theta(theta: &GaussianThetaCoords) -> Result<Self> {
        let sigma_x = spd_inverse(&theta.theta_xx)
            .ok_or_else(|| Error::NotPositiveDefinite("theta_xx".into()))?;
        let sigma_e = spd_inverse(&theta.theta_yy)
            .ok_or_else(|| Error::NotPositiveDefinite("theta_yy".into()))?;
        let a = -(&theta.theta_xy * &sigma_e).transpose();
        Self::new(sigma_x, a, sigma_e)
    }
}

/// Natural parameters of the AR system.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianThetaCoords {
    pub theta_xx: DMatrix<f64>,
    pub theta_yy: DMatrix<f64>,
    pub theta_xy: DMatrix<f64>,
}

/// Covariance of the stacked vector `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianJoint {
    cov: DMatrix<f64>,
}

impl GaussianJoint {
    pub fn new(cov: DMatrix<f64>) -> Result<Self> {
        let d = cov.nrows();
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::BadMatrixShape("joint covariance".into()));
        }
        check_square(&cov, d, "joint covariance")?;
        Ok(GaussianJoint {
            cov: check_spd(&cov, "joint covariance")?,
        })
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn n(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn x_block(&self) -> DMatrix<f64> {
        let n = self.n();
        self.cov.view((0, 0), (n, n)).into_owned()
    }

    pub fn y_block(&self) -> DMatrix<f64> {
        let n = self.n();
        self.cov.view((n, n), (n, n)).into_owned()
    }

    /// `Cov(x, y)` (rows index `x`).
    pub fn cross_block(&self) -> DMatrix<f64> {
        let n = self.n();
        self.cov.view((0, n), (n, n)).into_owned()
    }
}

fn assemble_joint(
    sigma_x: &DMatrix<f64>,
    a: &DMatrix<f64>,
    sigma_e: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = sigma_x.nrows();
    let cross = sigma_x * a.transpose();
    let sy = a * sigma_x * a.transpose() + sigma_e;
    let mut cov = DMatrix::zeros(2 * n, 2 * n);
    cov.view_mut((0, 0), (n, n)).copy_from(sigma_x);
    cov.view_mut((0, n), (n, n)).copy_from(&cross);
    cov.view_mut((n, 0), (n, n)).copy_from(&cross.transpose());
    cov.view_mut((n, n), (n, n)).copy_from(&sy);
    (&cov + cov.transpose()) * 0.5
}

/// Joint covariance `[Sx, Sx A'; A Sx, A Sx A' + Se]`.
pub fn joint_covariance(sys: &GaussianSystem) -> Result<GaussianJoint> {
    GaussianJoint::new(assemble_joint(&sys.sigma_x, &sys.a, &sys.sigma_e))
}

/// `D_KL[N(0, p) : N(0, q)]` for covariance matrices of equal size.
pub fn gaussian_kl(p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<f64> {
    let d = p.nrows();
    check_square(p, d, "p")?;
    check_square(q, d, "q")?;
    let p = check_spd(p, "p")?;
    let q = check_spd(q, "q")?;
    Ok(kl_unchecked(&p, &q))
}

fn kl_unchecked(p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let d = p.nrows() as f64;
    let chol = Cholesky::new(q.clone()).expect("q checked positive definite");
    let trace = chol.solve(p).trace();
    let ld_q = log_det_spd(q).expect("q positive definite");
    let ld_p = log_det_spd(p).expect("p positive definite");
    0.5 * (trace - d + ld_q - ld_p)
}

pub fn gaussian_kl_joint(p: &GaussianJoint, q: &GaussianJoint) -> Result<f64> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: q.n(),
        });
    }
    Ok(kl_unchecked(&p.cov, &q.cov))
}

/// `I(X;Y) = 1/2 ln(det Sigma_Y / det Sigma_E)`.
pub fn gaussian_mutual_info(sys: &GaussianSystem) -> f64 {
    let ld_y = log_det_spd(&sys.sigma_y()).expect("sigma_y positive definite");
    let ld_e = log_det_spd(&sys.sigma_e).expect("sigma_e positive definite");
    (0.5 * (ld_y - ld_e)).max(0.0)
}

/// `I(X;Y) = 1/2 ln(det Sigma_X det Sigma_Y / det Sigma_joint)`.
pub fn gaussian_mutual_info_joint(sys: &GaussianSystem) -> Result<f64> {
    let joint = joint_covariance(sys)?;
    let ld_x = log_det_spd(&sys.sigma_x).expect("sigma_x positive definite");
    let ld_y = log_det_spd(&sys.sigma_y()).expect("sigma_y positive definite");
    let ld_j = log_det_spd(&joint.cov).expect("joint positive definite");
    Ok(0.5 * (ld_x + ld_y - ld_j))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GaussianDiagnostics {
    pub iterations: usize,
    pub gradient_norm: f64,
    pub status: Option<QnStatus>,
    /// KL from the input joint to the projected joint, recomputed
    /// independently of the measure's own formula.
    pub kl_check: f64,
    /// Largest moment deviation on the matched entries (DS only).
    pub moment_residual: Option<f64>,
    /// Largest |off-diagonal| of the projected connectivity.
    pub offdiag_max: f64,
}

/// A Gaussian split-model projection.
#[derive(Debug, Clone)]
pub struct GaussianSplitResult {
    pub kind: SplitModelKind,
    /// Connectivity of the projected system (`A*` for DS, `A'` for G).
    pub a: DMatrix<f64>,
    pub sigma_e: DMatrix<f64>,
    pub phi: f64,
    pub diagnostics: GaussianDiagnostics,
}

fn offdiag_max(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].abs());
            }
        }
    }
    worst
}

/// Per-channel regression `y_i = b_i x_i + e_i`: coefficients and residual
/// variances `Var(y_i | x_i)`.
fn channel_regressions(sys: &GaussianSystem) -> (Vec<f64>, Vec<f64>) {
    let sy = sys.sigma_y();
    let cyx = sys.cov_yx();
    (0..sys.n())
        .map(|i| {
            let sxx = sys.sigma_x[(i, i)];
            let c = cyx[(i, i)];
            (c / sxx, sy[(i, i)] - c * c / sxx)
        })
        .unzip()
}

/// `Phi_FS = sum_i H[Y_i|X_i] - H[Y|X]` for Gaussians.
pub fn phi_fs_gauss(sys: &GaussianSystem) -> Result<GaussianSplitResult> {
    let (b, v) = channel_regressions(sys);
    let ld_e = log_det_spd(&sys.sigma_e).expect("sigma_e positive definite");
    let phi = 0.5 * v.iter().map(|vi| vi.ln()).sum::<f64>() - 0.5 * ld_e;
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(b));
    let sigma_e = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v));
    let p = joint_covariance(sys)?;
    let q = GaussianJoint::new(assemble_joint(&sys.sigma_x, &a, &sigma_e))?;
    let kl_check = gaussian_kl_joint(&p, &q)?;
    Ok(GaussianSplitResult {
        kind: SplitModelKind::FS,
        a,
        sigma_e,
        phi: phi.max(0.0),
        diagnostics: GaussianDiagnostics {
            kl_check,
            ..Default::default()
        },
    })
}

/// `1/2 ln det Cov(y - D x)` over the diagonal `D`.
pub struct ResidualLogDet {
    sigma_x: DMatrix<f64>,
    a: DMatrix<f64>,
    sigma_e: DMatrix<f64>,
}

impl ResidualLogDet {
    pub fn new(sys: &GaussianSystem) -> Self {
        ResidualLogDet {
            sigma_x: sys.sigma_x.clone(),
            a: sys.a.clone(),
            sigma_e: sys.sigma_e.clone(),
        }
    }

    fn remainder(&self, d: &[f64]) -> DMatrix<f64> {
        let mut r = self.a.clone();
        for (i, di) in d.iter().enumerate() {
            r[(i, i)] -= di;
        }
        r
    }

    /// `Cov(y - D x) = Sigma_E + (A - D) Sigma_X (A - D)'`.
    pub fn residual_cov(&self, d: &[f64]) -> DMatrix<f64> {
        let r = self.remainder(d);
        let s = &self.sigma_e + &r * &self.sigma_x * r.transpose();
        (&s + s.transpose()) * 0.5
    }
}

impl VectorObjective for ResidualLogDet {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn value(&self, d: &[f64]) -> f64 {
        log_det_spd(&self.residual_cov(d)).map_or(f64::INFINITY, |v| 0.5 * v)
    }

    fn value_grad(&self, d: &[f64], grad: &mut [f64]) -> f64 {
        let r = self.remainder(d);
        let s = self.residual_cov(d);
        let Some(chol) = Cholesky::new(s) else {
            return f64::INFINITY;
        };
        // d/dD_kk of 1/2 ln det S is -(S^-1 (A - D) Sigma_X)_kk.
        let m = chol.solve(&(&r * &self.sigma_x));
        for (k, g) in grad.iter_mut().enumerate() {
            *g = -m[(k, k)];
        }
        let l = chol.l_dirty();
        (0..d.len()).map(|i| l[(i, i)].ln()).sum()
    }
}

impl ResidualLogDet {
    /// Cyclic exact coordinate minimization. For fixed other entries,
    /// `det Cov(y - D x)` is a quadratic in `D_ii`, so each update jumps to
    /// the global minimizer along that axis (interpolated from 3 points).
    fn coordinate_descent(&self, d: &mut [f64], sweeps: usize) {
        let det_at = |d: &[f64]| self.residual_cov(d).determinant();
        for _ in 0..sweeps {
            let mut moved = 0.0f64;
            for i in 0..d.len() {
                let c = d[i];
                let f0 = det_at(d);
                d[i] = c + 1.0;
                let fp = det_at(d);
                d[i] = c - 1.0;
                let fm = det_at(d);
                let curv = 0.5 * (fp + fm - 2.0 * f0);
                let step = if curv > 0.0 {
                    -0.25 * (fp - fm) / curv
                } else {
                    0.0
                };
                d[i] = c + step;
                if !(det_at(d) <= f0) {
                    d[i] = c;
                }
                moved = moved.max((d[i] - c).abs());
            }
            if moved < 1e-12 {
                break;
            }
        }
    }
}

/// Number of seeded random starts for the geometric projection.
const G_RANDOM_STARTS: usize = 16;

/// Projection onto the geometric (causally split) model.
///
/// `1/2 ln det Cov(y - D x)` is not convex in `D` and has separated local
/// minima on a few percent of random systems. Starts: diag(A), the
/// per-channel regressions, zero, and seeded draws around diag(A) with a
/// spread that grows with `|A|`; each start is refined by exact coordinate
/// descent and then polished by BFGS. The lowest value wins.
pub fn phi_g_gauss(sys: &GaussianSystem) -> Result<GaussianSplitResult> {
    use rand_distr::{Distribution, StandardNormal};
    let n = sys.n();
    let obj = ResidualLogDet::new(sys);
    let (b, _) = channel_regressions(sys);
    let diag: Vec<f64> = (0..n).map(|i| sys.a[(i, i)]).collect();
    let mut starts = vec![diag.clone(), b, vec![0.0; n]];
    let spread = 10.0 * (1.0 + sys.a.amax());
    let mut rng = crate::random::rng(0x6a09_e667);
    for _ in 0..G_RANDOM_STARTS {
        starts.push(
            diag.iter()
                .map(|&c| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    c + spread * z
                })
                .collect(),
        );
    }
    let opts = QnOptions::default();
    let mut best: Option<crate::numopt::QnOutcome> = None;
    for mut start in starts {
        obj.coordinate_descent(&mut start, 200);
        let run = quasi_newton_min(&obj, &start, &opts)?;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let a_prime = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(best.x.clone()));
    let sigma_e_prime = obj.residual_cov(&best.x);
    check_spd(&sigma_e_prime, "sigma_e_prime")?;
    let ld_e = log_det_spd(&sys.sigma_e).expect("sigma_e positive definite");
    let phi = (best.value - 0.5 * ld_e).max(0.0);
    let p = joint_covariance(sys)?;
    let q = GaussianJoint::new(assemble_joint(&sys.sigma_x, &a_prime, &sigma_e_prime))?;
    Ok(GaussianSplitResult {
        kind: SplitModelKind::G,
        diagnostics: GaussianDiagnostics {
            iterations: best.iterations,
            gradient_norm: best.gradient_norm,
            status: Some(best.status),
            kl_check: gaussian_kl_joint(&p, &q)?,
            moment_residual: None,
            offdiag_max: offdiag_max(&a_prime),
        },
        a: a_prime,
        sigma_e: sigma_e_prime,
        phi,
    })
}

/// KL from a fixed joint covariance to `N(0, K^-1)` as a function of the
/// precision entries allowed by the diagonally split pattern.
pub struct PatternedPrecisionKl {
    sigma_p: DMatrix<f64>,
    ld_p: f64,
    free: Vec<(usize, usize)>,
}

impl PatternedPrecisionKl {
    /// Free entries `(r, c)`, `r <= c`, of the `2n x 2n` precision matrix:
    /// everything except the pairs `(x_i, y_j)` with `i != j`.
    pub fn diagonal_split(joint: &GaussianJoint) -> Self {
        let n = joint.n();
        let mut free = Vec::new();
        for r in 0..2 * n {
            for c in r..2 * n {
                let crossed = r < n && c >= n && c - n != r;
                if !crossed {
                    free.push((r, c));
                }
            }
        }
        PatternedPrecisionKl {
            ld_p: log_det_spd(joint.cov()).expect("joint positive definite"),
            sigma_p: joint.cov().clone(),
            free,
        }
    }

    pub fn precision(&self, params: &[f64]) -> DMatrix<f64> {
        let d = self.sigma_p.nrows();
        let mut k = DMatrix::zeros(d, d);
        for (&(r, c), &v) in self.free.iter().zip(params) {
            k[(r, c)] = v;
            k[(c, r)] = v;
        }
        k
    }

    pub fn params(&self, k: &DMatrix<f64>) -> Vec<f64> {
        self.free.iter().map(|&(r, c)| k[(r, c)]).collect()
    }
}

impl VectorObjective for PatternedPrecisionKl {
    fn dim(&self) -> usize {
        self.free.len()
    }

    fn value(&self, params: &[f64]) -> f64 {
        let k = self.precision(params);
        match log_det_spd(&k) {
            Some(ld_k) => {
                let d = k.nrows() as f64;
                0.5 * ((&k * &self.sigma_p).trace() - d - ld_k - self.ld_p)
            }
            None => f64::INFINITY,
        }
    }

    fn value_grad(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let k = self.precision(params);
        let Some(chol) = Cholesky::<f64, Dyn>::new(k.clone()) else {
            return f64::INFINITY;
        };
        let cov_q = chol.inverse();
        for (g, &(r, c)) in grad.iter_mut().zip(&self.free) {
            let diff = self.sigma_p[(r, c)] - cov_q[(r, c)];
            *g = if r == c { 0.5 * diff } else { diff };
        }
        let l = chol.l_dirty();
        let ld_k = 2.0 * (0..k.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>();
        let d = k.nrows() as f64;
        0.5 * ((&k * &self.sigma_p).trace() - d - ld_k - self.ld_p)
    }
}

/// Projection onto the diagonally split model. Starts from the fully split
/// projection, which already has the required precision pattern.
pub fn phi_ds_gauss(sys: &GaussianSystem) -> Result<GaussianSplitResult> {
    let n = sys.n();
    let p = joint_covariance(sys)?;
    let fs = phi_fs_gauss(sys)?;
    let fs_joint = assemble_joint(&sys.sigma_x, &fs.a, &fs.sigma_e);
    let k0 = spd_inverse(&fs_joint).ok_or_else(|| Error::NotPositiveDefinite("fs joint".into()))?;
    let obj = PatternedPrecisionKl::diagonal_split(&p);
    let run = quasi_newton_min(&obj, &obj.params(&k0), &QnOptions::default())?;
    let k = obj.precision(&run.x);
    let cov_q =
        spd_inverse(&k).ok_or_else(|| Error::NotPositiveDefinite("projected precision".into()))?;
    let k_yy = k.view((n, n), (n, n)).into_owned();
    let k_yx = k.view((n, 0), (n, n)).into_owned();
    let sigma_e_star =
        spd_inverse(&k_yy).ok_or_else(|| Error::NotPositiveDefinite("sigma_e_star".into()))?;
    let a_star = -(&sigma_e_star * k_yx);
    let moment_residual = obj
        .free
        .iter()
        .map(|&(r, c)| (cov_q[(r, c)] - p.cov()[(r, c)]).abs())
        .fold(0.0, f64::max);
    let q = GaussianJoint::new(cov_q)?;
    let kl = gaussian_kl_joint(&p, &q)?;
    Ok(GaussianSplitResult {
        kind: SplitModelKind::DS,
        diagnostics: GaussianDiagnostics {
            iterations: run.iterations,
            gradient_norm: run.gradient_norm,
            status: Some(run.status),
            kl_check: kl,
            moment_residual: Some(moment_residual),
            offdiag_max: offdiag_max(&a_star),
        },
        a: a_star,
        sigma_e: sigma_e_star,
        phi: run.value.max(0.0),
    })
}

/// `I`, `Phi_FS`, `Phi_DS` and `Phi_G` for one system; failures are kept per
/// measure. The decoding measure has no Gaussian form here.
#[derive(Debug)]
pub struct GaussianSuite {
    pub mutual_information: f64,
    pub fs: Result<GaussianSplitResult>,
    pub ds: Result<GaussianSplitResult>,
    pub g: Result<GaussianSplitResult>,
}

impl GaussianSuite {
    pub fn values(&self) -> MeasureValues {
        let v = |r: &Result<GaussianSplitResult>| r.as_ref().ok().map(|r| r.phi);
        MeasureValues {
            i: self.mutual_information,
            phi_fs: v(&self.fs),
            phi_ds: v(&self.ds),
            phi_md: None,
            phi_g: v(&self.g),
        }
    }

    pub fn hierarchy(&self, tol: f64) -> HierarchyReport {
        HierarchyReport::evaluate(&self.values(), tol)
    }
}

pub fn gaussian_phi_all(sys: &GaussianSystem) -> GaussianSuite {
    GaussianSuite {
        mutual_information: gaussian_mutual_info(sys),
        fs: phi_fs_gauss(sys),
        ds: phi_ds_gauss(sys),
        g: phi_g_gauss(sys),
    }
}

/// Max deviation between the analytic gradient of the residual log-det and
/// central differences at `d`.
pub fn residual_logdet_grad_check(sys: &GaussianSystem, d: &[f64], step: f64) -> f64 {
    finite_diff_grad_check(&ResidualLogDet::new(sys), d, step)
}
