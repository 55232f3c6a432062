//! Joint distributions over paired binary state vectors `(x, y)`.
//!
//! A [`DiscreteJoint`] with `n` elements stores `2^(2n)` probabilities. Cell
//! indices double as variable bitmasks: bit `i` holds `x_i` and bit `n + j`
//! holds `y_j`, so `idx = sum_i x_i 2^i + sum_j y_j 2^(n+j)` (x bits first,
//! little-endian). All logarithms are natural; results are in nats.

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

pub const MAX_ELEMENTS: usize = 5;

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ELEMENTS {
        Err(Error::UnsupportedSize(n))
    } else {
        Ok(())
    }
}

/// Validates a probability vector and rescales it to sum to exactly one
/// (up to rounding). Sums off by more than `normalization` are rejected.
pub(crate) fn normalize_checked(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidProbability { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > Tolerances::DEFAULT.normalization {
        return Err(Error::NotNormalized { sum });
    }
    // A sum off by summation rounding only is left alone, so constructing
    // from an already normalized table is the identity.
    let rounding = probs.len() as f64 * f64::EPSILON;
    if (sum - 1.0).abs() > rounding {
        probs.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(probs)
}

/// Sum of `-p ln p` with the convention `0 ln 0 = 0`.
pub(crate) fn shannon(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// A subset of the `2n` variables of a joint, stored as a bitmask in the
/// cell-index layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarSet {
    n: usize,
    mask: u32,
}

impl VarSet {
    pub fn new(n: usize, mask: u32) -> Result<Self> {
        check_n(n)?;
        if mask == 0 {
            return Err(Error::InvalidVarSet("empty subset".into()));
        }
        if mask >> (2 * n) != 0 {
            return Err(Error::InvalidVarSet(format!(
                "mask {mask:#b} has bits beyond 2n = {}",
                2 * n
            )));
        }
        Ok(VarSet { n, mask })
    }

    /// The empty subset. Only valid as the `given` side of a conditional.
    pub fn empty(n: usize) -> Self {
        VarSet { n, mask: 0 }
    }

    pub fn x(n: usize, i: usize) -> Self {
        assert!(i < n, "x index {i} out of range for n = {n}");
        VarSet { n, mask: 1 << i }
    }

    pub fn y(n: usize, j: usize) -> Self {
        assert!(j < n, "y index {j} out of range for n = {n}");
        VarSet {
            n,
            mask: 1 << (n + j),
        }
    }

    /// All sender variables `x_1..x_n`.
    pub fn all_x(n: usize) -> Self {
        VarSet {
            n,
            mask: (1 << n) - 1,
        }
    }

    /// All receiver variables `y_1..y_n`.
    pub fn all_y(n: usize) -> Self {
        VarSet {
            n,
            mask: ((1 << n) - 1) << n,
        }
    }

    /// The pair `{x_i, y_i}`.
    pub fn pair(n: usize, i: usize) -> Self {
        VarSet::x(n, i).union(VarSet::y(n, i))
    }

    pub fn union(self, other: VarSet) -> Self {
        debug_assert_eq!(self.n, other.n);
        VarSet {
            n: self.n,
            mask: self.mask | other.mask,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains_mask(&self, other: u32) -> bool {
        other & !self.mask == 0
    }

    /// Packs the bits of `cell` selected by this subset into a dense index.
    pub fn compress(&self, cell: usize) -> usize {
        let mut out = 0usize;
        let mut k = 0;
        let mut m = self.mask;
        while m != 0 {
            let bit = m.trailing_zeros();
            if cell >> bit & 1 == 1 {
                out |= 1 << k;
            }
            k += 1;
            m &= m - 1;
        }
        out
    }

    /// Inverse of [`VarSet::compress`]: scatters a dense index into cell bits.
    pub fn expand(&self, index: usize) -> usize {
        let mut out = 0usize;
        let mut k = 0;
        let mut m = self.mask;
        while m != 0 {
            let bit = m.trailing_zeros();
            if index >> k & 1 == 1 {
                out |= 1 << bit;
            }
            k += 1;
            m &= m - 1;
        }
        out
    }
}

/// A distribution over the configurations of a variable subset, indexed by
/// [`VarSet::compress`].
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub vars: VarSet,
    pub probs: Vec<f64>,
}

impl Marginal {
    pub fn entropy(&self) -> f64 {
        shannon(&self.probs)
    }
}

/// Conditional table `p(target | given)`. Rows whose conditioning
/// configuration has zero probability are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    pub target: VarSet,
    pub given: VarSet,
    pub rows: Vec<Option<Vec<f64>>>,
}

impl ConditionalTable {
    pub fn row(&self, given_index: usize) -> Option<&[f64]> {
        self.rows[given_index].as_deref()
    }

    pub fn undefined_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.is_none()).count()
    }
}

/// Conditional distribution `p(y | x)` of the next state given the current
/// one. Row `x` holds `2^n` probabilities indexed by `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    n: usize,
    probs: Vec<f64>,
}

impl TransitionKernel {
    pub fn new(n: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        check_n(n)?;
        let states = 1 << n;
        if rows.len() != states {
            return Err(Error::DimensionMismatch {
                expected: states,
                found: rows.len(),
            });
        }
        let mut probs = Vec::with_capacity(states * states);
        for row in rows {
            if row.len() != states {
                return Err(Error::DimensionMismatch {
                    expected: states,
                    found: row.len(),
                });
            }
            probs.extend(normalize_checked(row)?);
        }
        Ok(TransitionKernel { n, probs })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        check_n(n)?;
        let states = 1 << n;
        let rows = (0..states)
            .map(|x| (0..states).map(|y| f(x, y)).collect())
            .collect();
        Self::new(n, rows)
    }

    /// `y = x` with certainty.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |x, y| if x == y { 1.0 } else { 0.0 })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        let states = (1 << n) as f64;
        Self::from_fn(n, |_, _| 1.0 / states)
    }

    /// Each `y_i` copies `x_i` and is flipped independently with probability `flip`.
    pub fn independent_flips(n: usize, flip: f64) -> Result<Self> {
        Self::from_fn(n, |x, y| {
            let d = (x ^ y).count_ones() as i32;
            flip.powi(d) * (1.0 - flip).powi(n as i32 - d)
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[(x << self.n) | y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let states = 1 << self.n;
        &self.probs[x * states..(x + 1) * states]
    }
}

/// Full joint table `p(x, y)` over `{0,1}^n x {0,1}^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    n: usize,
    probs: Vec<f64>,
}

impl DiscreteJoint {
    /// Builds a joint from `2^(2n)` probabilities. Sums within 1e-9 of one are
    /// renormalized; anything else is rejected.
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        let len = 1 << (2 * n);
        if probs.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: probs.len(),
            });
        }
        Ok(DiscreteJoint {
            n,
            probs: normalize_checked(probs)?,
        })
    }

    /// Normalizes arbitrary nonnegative weights.
    pub fn from_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::NotNormalized { sum: total });
        }
        Self::new(n, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_n(n)?;
        let len = 1 << (2 * n);
        Ok(DiscreteJoint {
            n,
            probs: vec![1.0 / len as f64; len],
        })
    }

    pub(crate) fn from_normalized(n: usize, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), 1 << (2 * n));
        let sum: f64 = probs.iter().sum();
        DiscreteJoint {
            n,
            probs: probs.into_iter().map(|p| p / sum).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Number of states of `x` (and of `y`).
    pub fn states(&self) -> usize {
        1 << self.n
    }

    pub fn cell(&self, x: usize, y: usize) -> usize {
        x | (y << self.n)
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[self.cell(x, y)]
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn has_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    /// Mixture `(1 - eps) p + eps uniform`.
    pub fn smoothed(&self, eps: f64) -> Self {
        let u = 1.0 / self.len() as f64;
        let probs = self
            .probs
            .iter()
            .map(|&p| (1.0 - eps) * p + eps * u)
            .collect();
        DiscreteJoint::from_normalized(self.n, probs)
    }

    pub fn marginal(&self, vars: VarSet) -> Result<Marginal> {
        if vars.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: vars.n(),
            });
        }
        if vars.is_empty() {
            return Err(Error::InvalidVarSet("empty subset".into()));
        }
        Ok(self.marginal_unchecked(vars))
    }

    pub(crate) fn marginal_unchecked(&self, vars: VarSet) -> Marginal {
        Marginal {
            vars,
            probs: marginalize(&self.probs, vars),
        }
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        marginalize(&self.probs, VarSet::all_x(self.n))
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        marginalize(&self.probs, VarSet::all_y(self.n))
    }

    /// `p(target | given)`. Targets must be nonempty and disjoint from the
    /// conditioning set; an empty `given` yields the plain marginal as a
    /// single row.
    pub fn conditional(&self, target: VarSet, given: VarSet) -> Result<ConditionalTable> {
        if target.n() != self.n || given.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: target.n().max(given.n()),
            });
        }
        if target.is_empty() {
            return Err(Error::InvalidVarSet("empty target".into()));
        }
        if target.mask() & given.mask() != 0 {
            return Err(Error::InvalidVarSet("target and given overlap".into()));
        }
        let t_size = 1 << target.len();
        let g_size = 1 << given.len();
        let mut joint = vec![0.0; t_size * g_size];
        for (cell, &p) in self.probs.iter().enumerate() {
            joint[given.compress(cell) * t_size + target.compress(cell)] += p;
        }
        let rows = joint
            .chunks(t_size)
            .map(|chunk| {
                let mass: f64 = chunk.iter().sum();
                (mass > 0.0).then(|| chunk.iter().map(|v| v / mass).collect())
            })
            .collect();
        Ok(ConditionalTable {
            target,
            given,
            rows,
        })
    }

    /// Joint entropy of the full table.
    pub fn entropy(&self) -> f64 {
        shannon(&self.probs)
    }

    /// Entropy of the marginal on `vars`; zero for the empty subset.
    pub fn subset_entropy(&self, vars: VarSet) -> f64 {
        if vars.is_empty() {
            0.0
        } else {
            self.marginal_unchecked(vars).entropy()
        }
    }

    /// The kernel `p(y | x)`. Rows with `p(x) = 0` are undefined and are
    /// returned as uniform rows; they carry no weight in any joint built
    /// from the same prior.
    pub fn kernel(&self) -> TransitionKernel {
        let states = self.states();
        let mut probs = Vec::with_capacity(states * states);
        for x in 0..states {
            let mass: f64 = (0..states).map(|y| self.prob(x, y)).sum();
            for y in 0..states {
                probs.push(if mass > 0.0 {
                    self.prob(x, y) / mass
                } else {
                    1.0 / states as f64
                });
            }
        }
        TransitionKernel { n: self.n, probs }
    }
}

fn marginalize(probs: &[f64], vars: VarSet) -> Vec<f64> {
    let mut out = vec![0.0; 1 << vars.len()];
    for (cell, &p) in probs.iter().enumerate() {
        out[vars.compress(cell)] += p;
    }
    out
}

/// `p(x, y) = p(y | x) p(x)`.
pub fn joint_from_transition(prior: &[f64], kernel: &TransitionKernel) -> Result<DiscreteJoint> {
    let n = kernel.n();
    let states = 1 << n;
    if prior.len() != states {
        return Err(Error::DimensionMismatch {
            expected: states,
            found: prior.len(),
        });
    }
    let prior = normalize_checked(prior.to_vec())?;
    let mut probs = vec![0.0; states * states];
    for (x, &px) in prior.iter().enumerate() {
        for y in 0..states {
            probs[x | (y << n)] = px * kernel.prob(x, y);
        }
    }
    Ok(DiscreteJoint::from_normalized(n, probs))
}

/// Shannon entropy in nats of a normalized distribution.
pub fn entropy(dist: &[f64]) -> Result<f64> {
    Ok(shannon(&normalize_checked(dist.to_vec())?))
}

/// `H[target | given] = H[target, given] - H[given]`.
pub fn conditional_entropy(p: &DiscreteJoint, target: VarSet, given: VarSet) -> Result<f64> {
    if target.n() != p.n() || given.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: target.n().max(given.n()),
        });
    }
    if target.is_empty() {
        return Err(Error::InvalidVarSet("empty target".into()));
    }
    let both = VarSet {
        n: p.n(),
        mask: target.mask() | given.mask(),
    };
    Ok(p.subset_entropy(both) - p.subset_entropy(given))
}

/// `sum p ln(p / q)` over slices. Returns `+inf` when `q` vanishes where
/// `p` does not.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(kl_slices(p, q))
}

pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            total += pi * (pi / qi).ln();
        }
    }
    total.max(0.0)
}

/// `D_KL[p : q]` in nats; `+inf` on a support violation.
pub fn kl_divergence(p: &DiscreteJoint, q: &DiscreteJoint) -> Result<f64> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: q.n(),
        });
    }
    Ok(kl_slices(p.probs(), q.probs()))
}

/// The independent product `p(x) p(y)`.
pub fn product_of_marginals(p: &DiscreteJoint) -> DiscreteJoint {
    let px = p.marginal_x();
    let py = p.marginal_y();
    let n = p.n();
    let probs = (0..p.len())
        .map(|cell| px[cell & ((1 << n) - 1)] * py[cell >> n])
        .collect();
    DiscreteJoint::from_normalized(n, probs)
}

/// `I(X;Y)` computed as `D_KL[p(x,y) : p(x) p(y)]`.
pub fn mutual_information(p: &DiscreteJoint) -> f64 {
    kl_slices(p.probs(), product_of_marginals(p).probs())
}

/// `I(X;Y)` computed as `H[Y] - H[Y|X]`.
pub fn mutual_information_entropies(p: &DiscreteJoint) -> f64 {
    let n = p.n();
    let hy = p.subset_entropy(VarSet::all_y(n));
    let hxy = p.entropy();
    let hx = p.subset_entropy(VarSet::all_x(n));
    hy - (hxy - hx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;
    use std::f64::consts::LN_2;

    #[test]
    fn varset_compress_expand_roundtrip() {
        let v = VarSet::new(2, 0b1010).unwrap();
        for i in 0..4 {
            assert_eq!(v.compress(v.expand(i)), i);
        }
        assert_eq!(v.compress(0b1111), 3);
        assert_eq!(v.compress(0b0010), 1);
        assert!(VarSet::new(2, 0).is_err());
        assert!(VarSet::new(2, 0b10000).is_err());
    }

    #[test]
    fn transition_examples() {
        let prior = [0.25; 4];
        let copy = joint_from_transition(&prior, &TransitionKernel::identity(2).unwrap()).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let want = if x == y { 0.25 } else { 0.0 };
                assert_eq!(copy.prob(x, y), want);
            }
        }
        let uni = joint_from_transition(&prior, &TransitionKernel::uniform(2).unwrap()).unwrap();
        assert!(uni.probs().iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));

        let flips = TransitionKernel::independent_flips(2, 0.1).unwrap();
        let j = joint_from_transition(&prior, &flips).unwrap();
        assert!((j.prob(0, 0) - 0.2025).abs() < 1e-15);
    }

    #[test]
    fn transition_errors() {
        let k = TransitionKernel::identity(2).unwrap();
        assert!(matches!(
            joint_from_transition(&[0.5, 0.5], &k),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            joint_from_transition(&[0.3, 0.3, 0.3, 0.3], &k),
            Err(Error::NotNormalized { .. })
        ));
        assert!(TransitionKernel::new(1, vec![vec![0.5, 0.6], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn marginal_examples() {
        let uni = DiscreteJoint::uniform(2).unwrap();
        let m = uni.marginal(VarSet::x(2, 0)).unwrap();
        assert_eq!(m.probs, vec![0.5, 0.5]);

        let copy = systems::copy_system(2).unwrap();
        let my = copy.marginal(VarSet::all_y(2)).unwrap();
        assert!(my.probs.iter().all(|&p| (p - 0.25).abs() < 1e-15));
        let m = copy.marginal(VarSet::pair(2, 0)).unwrap();
        assert_eq!(m.probs, vec![0.5, 0.0, 0.0, 0.5]);
        assert!(copy.marginal(VarSet::empty(2)).is_err());
    }

    #[test]
    fn conditional_examples() {
        let copy = systems::copy_system(2).unwrap();
        let c = copy.conditional(VarSet::y(2, 0), VarSet::x(2, 0)).unwrap();
        assert_eq!(c.row(0).unwrap(), &[1.0, 0.0]);
        assert_eq!(c.row(1).unwrap(), &[0.0, 1.0]);

        let uni = DiscreteJoint::uniform(2).unwrap();
        let c = uni.conditional(VarSet::all_y(2), VarSet::all_x(2)).unwrap();
        for r in &c.rows {
            assert!(r
                .as_ref()
                .unwrap()
                .iter()
                .all(|&v| (v - 0.25).abs() < 1e-15));
        }

        let noise = systems::shared_noise_system().unwrap();
        let c = noise.conditional(VarSet::y(2, 0), VarSet::x(2, 0)).unwrap();
        for r in &c.rows {
            assert_eq!(r.as_deref().unwrap(), &[0.5, 0.5]);
        }
    }

    #[test]
    fn conditional_zero_rows_are_undefined() {
        // x1 is always 0, so rows conditioned on x1 = 1 have no mass.
        let mut probs = vec![0.0; 16];
        probs[0] = 0.5;
        probs[0b0100] = 0.5;
        let p = DiscreteJoint::new(2, probs).unwrap();
        let c = p.conditional(VarSet::y(2, 0), VarSet::x(2, 0)).unwrap();
        assert!(c.row(1).is_none());
        assert_eq!(c.undefined_rows(), 1);
        assert_eq!(c.row(0).unwrap(), &[0.5, 0.5]);
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(&[0.5, 0.5]).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((entropy(&[0.25; 4]).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!(entropy(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn conditional_entropy_examples() {
        let copy = systems::copy_system(2).unwrap();
        let h = conditional_entropy(&copy, VarSet::all_y(2), VarSet::all_x(2)).unwrap();
        assert!(h.abs() < 1e-15);
        let uni = DiscreteJoint::uniform(2).unwrap();
        let h = conditional_entropy(&uni, VarSet::all_y(2), VarSet::all_x(2)).unwrap();
        assert!((h - 4f64.ln()).abs() < 1e-12);
        let noise = systems::shared_noise_system().unwrap();
        let h = conditional_entropy(&noise, VarSet::y(2, 0), VarSet::x(2, 0)).unwrap();
        assert!((h - LN_2).abs() < 1e-12);
    }

    #[test]
    fn kl_examples() {
        let copy = systems::copy_system(2).unwrap();
        let uni = DiscreteJoint::uniform(2).unwrap();
        assert_eq!(kl_divergence(&copy, &copy).unwrap(), 0.0);
        assert!((kl_divergence(&copy, &uni).unwrap() - 4f64.ln()).abs() < 1e-12);
        assert_eq!(kl_divergence(&uni, &copy).unwrap(), f64::INFINITY);
        let d = relative_entropy(&[0.9, 0.1], &[0.5, 0.5]).unwrap();
        assert!((d - 0.368_064).abs() < 1e-6);
        assert!((d - (0.9 * 1.8f64.ln() + 0.1 * 0.2f64.ln())).abs() < 1e-15);
        assert!(relative_entropy(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let uni = DiscreteJoint::uniform(2).unwrap();
        assert!(mutual_information(&uni).abs() < 1e-15);
        let copy = systems::copy_system(2).unwrap();
        assert!((mutual_information(&copy) - 4f64.ln()).abs() < 1e-12);
        let noise = systems::shared_noise_system().unwrap();
        assert!(mutual_information(&noise).abs() < 1e-15);
    }

    #[test]
    fn smoothing_keeps_normalization() {
        let copy = systems::copy_system(2).unwrap();
        let s = copy.smoothed(1e-9);
        assert!(s.has_full_support());
        assert!((s.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            DiscreteJoint::new(2, vec![0.1; 16]),
            Err(Error::NotNormalized { .. })
        ));
        let mut probs = vec![1.0 / 16.0; 16];
        probs[3] = -probs[3];
        assert!(DiscreteJoint::new(2, probs).is_err());
        assert!(matches!(
            DiscreteJoint::new(6, vec![]),
            Err(Error::UnsupportedSize(6))
        ));
    }
}
