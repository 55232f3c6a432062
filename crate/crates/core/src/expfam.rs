//! Exponential-family coordinates of binary joints and m-projection onto
//! e-flat split models.
//!
//! Every full-support joint expands as
//! `ln p(s) = sum_{m subset of s, m != 0} theta_m - psi`, one coefficient per
//! monomial (variable bitmask `m`). The dual coordinates are the moments
//! `eta_m = E[prod_{v in m} z_v]`. Both transforms are Moebius/zeta
//! transforms over the Boolean lattice of the `2n` variables, so the cell
//! index layout of [`DiscreteJoint`] doubles as the monomial index.
//!
//! An e-flat model generated by variable cliques (e.g. `{x}, {y}, {x_i, y_i}`)
//! splits the monomials in two: those inside some clique form the eta-part
//! of the mixed coordinates, the rest form the theta-part, which the model
//! fixes at zero. The m-projection keeps the eta-part of `p` and zeroes the
//! theta-part; [`ipf_project`] computes it by iterative proportional fitting.

use crate::discrete::{kl_slices, DiscreteJoint, Marginal, VarSet};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

fn subset_zeta(a: &mut [f64], bits: usize) {
    for b in 0..bits {
        let bit = 1 << b;
        for s in 0..a.len() {
            if s & bit != 0 {
                a[s] += a[s ^ bit];
            }
        }
    }
}

fn subset_moebius(a: &mut [f64], bits: usize) {
    for b in 0..bits {
        let bit = 1 << b;
        for s in 0..a.len() {
            if s & bit != 0 {
                a[s] -= a[s ^ bit];
            }
        }
    }
}

fn superset_zeta(a: &mut [f64], bits: usize) {
    for b in 0..bits {
        let bit = 1 << b;
        for s in 0..a.len() {
            if s & bit == 0 {
                a[s] += a[s | bit];
            }
        }
    }
}

fn superset_moebius(a: &mut [f64], bits: usize) {
    for b in 0..bits {
        let bit = 1 << b;
        for s in 0..a.len() {
            if s & bit == 0 {
                a[s] -= a[s | bit];
            }
        }
    }
}

/// Natural parameters of the log-linear expansion, indexed by monomial mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaCoords {
    n: usize,
    coeffs: Vec<f64>,
    psi: f64,
}

impl ThetaCoords {
    /// All-zero coefficients (the uniform table).
    pub fn zeros(n: usize) -> Self {
        let len = 1 << (2 * n);
        ThetaCoords {
            n,
            coeffs: vec![0.0; len],
            psi: (len as f64).ln(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Log-normalizer. Recomputed by [`joint_from_theta`].
    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn coeff(&self, mask: u32) -> f64 {
        self.coeffs[mask as usize]
    }

    /// Sets one coefficient. The constant monomial (mask 0) is not a free
    /// coordinate and is ignored.
    pub fn set_coeff(&mut self, mask: u32, value: f64) {
        if mask != 0 {
            self.coeffs[mask as usize] = value;
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn theta_x(&self, i: usize) -> f64 {
        self.coeff(1 << i)
    }

    pub fn theta_y(&self, j: usize) -> f64 {
        self.coeff(1 << (self.n + j))
    }

    pub fn theta_xx(&self, i: usize, j: usize) -> f64 {
        self.coeff((1 << i) | (1 << j))
    }

    pub fn theta_yy(&self, i: usize, j: usize) -> f64 {
        self.coeff((1 << (self.n + i)) | (1 << (self.n + j)))
    }

    /// Coefficient of `x_i y_j`.
    pub fn theta_xy(&self, i: usize, j: usize) -> f64 {
        self.coeff((1 << i) | (1 << (self.n + j)))
    }

    /// Coefficients of monomials of degree three and up, by ascending mask.
    pub fn higher(&self) -> Vec<(u32, f64)> {
        (0..self.coeffs.len() as u32)
            .filter(|m| m.count_ones() >= 3)
            .map(|m| (m, self.coeffs[m as usize]))
            .collect()
    }
}

/// Log-linear coefficients of a full-support joint.
pub fn theta_from_joint(p: &DiscreteJoint) -> Result<ThetaCoords> {
    let mut logs = Vec::with_capacity(p.len());
    for (index, &v) in p.probs().iter().enumerate() {
        if v <= 0.0 {
            return Err(Error::ZeroProbability { index });
        }
        logs.push(v.ln());
    }
    subset_moebius(&mut logs, 2 * p.n());
    let psi = -logs[0];
    logs[0] = 0.0;
    Ok(ThetaCoords {
        n: p.n(),
        coeffs: logs,
        psi,
    })
}

/// Exponentiates the log-linear form. The returned coordinates carry the
/// recomputed log-normalizer.
pub fn joint_from_theta(theta: &ThetaCoords) -> (DiscreteJoint, ThetaCoords) {
    let n = theta.n;
    let mut u = theta.coeffs.clone();
    u[0] = 0.0;
    subset_zeta(&mut u, 2 * n);
    let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = u.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let psi = max + total.ln();
    let joint = DiscreteJoint::from_normalized(n, weights);
    let mut out = theta.clone();
    out.psi = psi;
    out.coeffs[0] = 0.0;
    (joint, out)
}

/// Moments `eta_m = E[prod_{v in m} z_v]`, indexed by monomial mask
/// (`eta_0 = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct EtaCoords {
    n: usize,
    moments: Vec<f64>,
}

impl EtaCoords {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn moment(&self, mask: u32) -> f64 {
        self.moments[mask as usize]
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    pub fn eta_x(&self, i: usize) -> f64 {
        self.moment(1 << i)
    }

    pub fn eta_y(&self, j: usize) -> f64 {
        self.moment(1 << (self.n + j))
    }

    pub fn eta_xx(&self, i: usize, j: usize) -> f64 {
        self.moment((1 << i) | (1 << j))
    }

    pub fn eta_yy(&self, i: usize, j: usize) -> f64 {
        self.moment((1 << (self.n + i)) | (1 << (self.n + j)))
    }

    /// `E[x_i y_j]`.
    pub fn eta_xy(&self, i: usize, j: usize) -> f64 {
        self.moment((1 << i) | (1 << (self.n + j)))
    }

    pub fn higher(&self) -> Vec<(u32, f64)> {
        (0..self.moments.len() as u32)
            .filter(|m| m.count_ones() >= 3)
            .map(|m| (m, self.moments[m as usize]))
            .collect()
    }
}

pub fn eta_from_joint(p: &DiscreteJoint) -> EtaCoords {
    let mut moments = p.probs().to_vec();
    superset_zeta(&mut moments, 2 * p.n());
    EtaCoords { n: p.n(), moments }
}

/// Recovers the table from its moments by inclusion-exclusion.
pub fn joint_from_eta(eta: &EtaCoords) -> Result<DiscreteJoint> {
    let mut probs = eta.moments.clone();
    superset_moebius(&mut probs, 2 * eta.n);
    for p in probs.iter_mut() {
        if *p < 0.0 && *p > -1e-12 {
            *p = 0.0;
        }
    }
    DiscreteJoint::new(eta.n, probs)
}

/// Mixed coordinates for an e-flat model generated by `cliques`: moments of
/// every monomial inside some clique, and natural parameters of the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedCoords {
    n: usize,
    cliques: Vec<VarSet>,
    pub eta_masks: Vec<u32>,
    pub eta: Vec<f64>,
    pub theta_masks: Vec<u32>,
    pub theta: Vec<f64>,
}

/// Splits the nonzero monomials into (inside some clique, outside every clique).
pub fn partition_monomials(n: usize, cliques: &[VarSet]) -> (Vec<u32>, Vec<u32>) {
    let len = 1u32 << (2 * n);
    (1..len).partition(|&m| cliques.iter().any(|c| c.contains_mask(m)))
}

impl MixedCoords {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cliques(&self) -> &[VarSet] {
        &self.cliques
    }

    /// The same coordinates with the theta-part zeroed: the m-projection.
    pub fn projected(&self) -> MixedCoords {
        let mut out = self.clone();
        out.theta.iter_mut().for_each(|t| *t = 0.0);
        out
    }
}

pub fn mixed_from_joint(p: &DiscreteJoint, cliques: &[VarSet]) -> Result<MixedCoords> {
    validate_cliques(p.n(), cliques)?;
    let theta = theta_from_joint(p)?;
    let eta = eta_from_joint(p);
    let (eta_masks, theta_masks) = partition_monomials(p.n(), cliques);
    Ok(MixedCoords {
        n: p.n(),
        cliques: cliques.to_vec(),
        eta: eta_masks.iter().map(|&m| eta.moment(m)).collect(),
        theta: theta_masks.iter().map(|&m| theta.coeff(m)).collect(),
        eta_masks,
        theta_masks,
    })
}

/// Rebuilds the joint: start from the theta-part alone, then fit the
/// clique marginals implied by the eta-part. Scaling by clique functions
/// only moves coefficients inside the cliques, so the theta-part survives.
pub fn joint_from_mixed(mixed: &MixedCoords) -> Result<DiscreteJoint> {
    let n = mixed.n;
    let mut theta = ThetaCoords::zeros(n);
    for (&m, &t) in mixed.theta_masks.iter().zip(&mixed.theta) {
        theta.set_coeff(m, t);
    }
    let (start, _) = joint_from_theta(&theta);

    let mut all_eta = vec![0.0; 1 << (2 * n)];
    all_eta[0] = 1.0;
    for (&m, &e) in mixed.eta_masks.iter().zip(&mixed.eta) {
        all_eta[m as usize] = e;
    }
    let targets: Vec<Marginal> = mixed
        .cliques
        .iter()
        .map(|&clique| {
            let mut local: Vec<f64> = (0..1 << clique.len())
                .map(|c| all_eta[clique.expand(c)])
                .collect();
            superset_moebius(&mut local, clique.len());
            Marginal {
                vars: clique,
                probs: local,
            }
        })
        .collect();
    let t = Tolerances::DEFAULT;
    Ok(ipf_fit(&start, &targets, t.ipf_marginal, t.ipf_max_sweeps)?.joint)
}

fn validate_cliques(n: usize, cliques: &[VarSet]) -> Result<()> {
    if cliques.is_empty() {
        return Err(Error::InvalidVarSet("no constraints".into()));
    }
    for c in cliques {
        if c.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.n(),
            });
        }
        if c.is_empty() {
            return Err(Error::InvalidVarSet("empty constraint".into()));
        }
    }
    Ok(())
}

/// Result of iterative proportional fitting.
#[derive(Debug, Clone)]
pub struct IpfOutcome {
    pub joint: DiscreteJoint,
    pub sweeps: usize,
    /// Max absolute deviation from any target marginal at exit.
    pub residual: f64,
}

/// m-projection of `p` onto the e-flat model generated by `constraints`:
/// the unique member matching every listed marginal of `p`. Starts from the
/// uniform table, which lies in every such model.
pub fn ipf_project(p: &DiscreteJoint, constraints: &[VarSet]) -> Result<IpfOutcome> {
    validate_cliques(p.n(), constraints)?;
    let targets: Vec<Marginal> = constraints
        .iter()
        .map(|&c| p.marginal_unchecked(c))
        .collect();
    let t = Tolerances::DEFAULT;
    ipf_fit(
        &DiscreteJoint::uniform(p.n())?,
        &targets,
        t.ipf_marginal,
        t.ipf_max_sweeps,
    )
}

/// Cyclic proportional fitting of `start` to `targets`. Cells whose current
/// marginal is zero are left untouched.
pub fn ipf_fit(
    start: &DiscreteJoint,
    targets: &[Marginal],
    tol: f64,
    max_sweeps: usize,
) -> Result<IpfOutcome> {
    let n = start.n();
    let mut q = start.probs().to_vec();
    let mut residual = max_deviation(&q, targets);
    let mut sweeps = 0;
    while residual >= tol {
        if sweeps == max_sweeps {
            return Err(Error::IpfNotConverged { residual, sweeps });
        }
        for target in targets {
            let current = marginal_of(&q, target.vars);
            let factors: Vec<f64> = current
                .iter()
                .zip(&target.probs)
                .map(|(&c, &t)| if c > 0.0 { t / c } else { 1.0 })
                .collect();
            for (cell, v) in q.iter_mut().enumerate() {
                *v *= factors[target.vars.compress(cell)];
            }
        }
        sweeps += 1;
        residual = max_deviation(&q, targets);
    }
    Ok(IpfOutcome {
        joint: DiscreteJoint::from_normalized(n, q),
        sweeps,
        residual,
    })
}

fn marginal_of(q: &[f64], vars: VarSet) -> Vec<f64> {
    let mut out = vec![0.0; 1 << vars.len()];
    for (cell, &v) in q.iter().enumerate() {
        out[vars.compress(cell)] += v;
    }
    out
}

fn max_deviation(q: &[f64], targets: &[Marginal]) -> f64 {
    targets
        .iter()
        .flat_map(|t| {
            marginal_of(q, t.vars)
                .into_iter()
                .zip(t.probs.iter())
                .map(|(a, &b)| (a - b).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

/// `|D(p:q) - D(p:q*) - D(q*:q)|`; `+inf` if any term is infinite.
pub fn pythagorean_check(p: &DiscreteJoint, q_star: &DiscreteJoint, q: &DiscreteJoint) -> f64 {
    let d_pq = kl_slices(p.probs(), q.probs());
    let d_pqs = kl_slices(p.probs(), q_star.probs());
    let d_qsq = kl_slices(q_star.probs(), q.probs());
    if !(d_pq.is_finite() && d_pqs.is_finite() && d_qsq.is_finite()) {
        return f64::INFINITY;
    }
    (d_pq - d_pqs - d_qsq).abs()
}
