//! Independent reference computations used as test oracles.
//!
//! Nothing here calls the projection routines under test; each oracle
//! reaches the same optimum by a different route.
#![allow(dead_code)]

use nalgebra::DMatrix;

/// `sum p ln(p / q)`, `+inf` on support violations.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            total += a * (a / b).ln();
        }
    }
    total
}

fn bit(cell: usize, k: usize) -> usize {
    cell >> k & 1
}

/// `p(x) prod_i p(y_i | x_i)` built by explicit loops.
pub fn fs_projection(n: usize, p: &[f64]) -> Vec<f64> {
    let states = 1 << n;
    let mut px = vec![0.0; states];
    let mut pair = vec![[[0.0; 2]; 2]; n];
    for (cell, &v) in p.iter().enumerate() {
        px[cell % states] += v;
        for (i, t) in pair.iter_mut().enumerate() {
            t[bit(cell, i)][bit(cell, n + i)] += v;
        }
    }
    (0..p.len())
        .map(|cell| {
            let mut q = px[cell % states];
            for (i, t) in pair.iter().enumerate() {
                let xi = bit(cell, i);
                q *= t[xi][bit(cell, n + i)] / (t[xi][0] + t[xi][1]);
            }
            q
        })
        .collect()
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let d = b.len();
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..d {
            let f = a[r][col] / a[col][col];
            for c in col..d {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; d];
    for r in (0..d).rev() {
        let s: f64 = (r + 1..d).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Log-linear model `q ∝ exp(sum_m theta_m [cell ⊇ m])` over the given
/// monomials.
pub fn loglinear(masks: &[usize], theta: &[f64], len: usize) -> Vec<f64> {
    let logits: Vec<f64> = (0..len)
        .map(|cell| {
            masks
                .iter()
                .zip(theta)
                .filter(|(&m, _)| cell & m == m)
                .map(|(_, t)| t)
                .sum()
        })
        .collect();
    let mx = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - mx).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Monomials generated by a list of cliques (bit masks), without the empty one.
pub fn clique_monomials(cliques: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=cliques.iter().fold(0, |a, &c| a | c))
        .filter(|&m| cliques.iter().any(|&c| m & !c == 0))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Maximum-likelihood fit of `p` in the log-linear model by Newton's method
/// on the natural parameters (gradient = model moments - data moments,
/// Hessian = covariance of the sufficient statistics).
pub fn loglinear_ml(p: &[f64], masks: &[usize]) -> Vec<f64> {
    let d = masks.len();
    let feat = |cell: usize, k: usize| {
        if cell & masks[k] == masks[k] {
            1.0
        } else {
            0.0
        }
    };
    let target: Vec<f64> = (0..d)
        .map(|k| p.iter().enumerate().map(|(c, &v)| v * feat(c, k)).sum())
        .collect();
    let mut theta = vec![0.0; d];
    let objective = |theta: &[f64]| {
        let q = loglinear(masks, theta, p.len());
        kl(p, &q)
    };
    for _ in 0..200 {
        let q = loglinear(masks, &theta, p.len());
        let mean: Vec<f64> = (0..d)
            .map(|k| q.iter().enumerate().map(|(c, &v)| v * feat(c, k)).sum())
            .collect();
        let grad: Vec<f64> = mean.iter().zip(&target).map(|(m, t)| m - t).collect();
        if grad.iter().all(|g| g.abs() < 1e-14) {
            break;
        }
        let mut hess = vec![vec![0.0; d]; d];
        for (c, &v) in q.iter().enumerate() {
            for a in 0..d {
                for b in 0..d {
                    hess[a][b] += v * (feat(c, a) - mean[a]) * (feat(c, b) - mean[b]);
                }
            }
        }
        for (a, row) in hess.iter_mut().enumerate() {
            row[a] += 1e-12;
        }
        let step = solve(hess, grad);
        let f0 = objective(&theta);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(th, s)| th - t * s).collect();
            if objective(&trial) <= f0 || t < 1e-10 {
                theta = trial;
                break;
            }
            t *= 0.5;
        }
    }
    loglinear(masks, &theta, p.len())
}

/// Penalty-method projection onto a log-linear model: the saturated model
/// over all `len - 1` monomials, with `mu/2 * theta_m^2` added for every
/// monomial outside `keep`. `mu` is raised by 10x from 1 to 1e12, each stage
/// solved by damped Newton from the previous one.
pub fn loglinear_penalty(p: &[f64], keep: &[usize]) -> Vec<f64> {
    let masks: Vec<usize> = (1..p.len()).collect();
    let d = masks.len();
    let penalized: Vec<f64> = masks
        .iter()
        .map(|m| if keep.contains(m) { 0.0 } else { 1.0 })
        .collect();
    let feat = |cell: usize, k: usize| {
        if cell & masks[k] == masks[k] {
            1.0
        } else {
            0.0
        }
    };
    let target: Vec<f64> = (0..d)
        .map(|k| p.iter().enumerate().map(|(c, &v)| v * feat(c, k)).sum())
        .collect();
    let mut theta = vec![0.0; d];
    let mut mu = 1.0;
    while mu <= 1e12 {
        let objective = |theta: &[f64]| {
            let q = loglinear(&masks, theta, p.len());
            let pen: f64 = theta.iter().zip(&penalized).map(|(t, w)| w * t * t).sum();
            kl(p, &q) + 0.5 * mu * pen
        };
        for _ in 0..100 {
            let q = loglinear(&masks, &theta, p.len());
            let mean: Vec<f64> = (0..d)
                .map(|k| q.iter().enumerate().map(|(c, &v)| v * feat(c, k)).sum())
                .collect();
            let grad: Vec<f64> = (0..d)
                .map(|k| mean[k] - target[k] + mu * penalized[k] * theta[k])
                .collect();
            if grad.iter().all(|g| g.abs() < 1e-15) {
                break;
            }
            let mut hess = vec![vec![0.0; d]; d];
            for (c, &v) in q.iter().enumerate() {
                for a in 0..d {
                    for b in 0..d {
                        hess[a][b] += v * (feat(c, a) - mean[a]) * (feat(c, b) - mean[b]);
                    }
                }
            }
            for (a, row) in hess.iter_mut().enumerate() {
                row[a] += mu * penalized[a] + 1e-14;
            }
            let step = solve(hess, grad);
            let f0 = objective(&theta);
            let mut t = 1.0;
            let mut moved = false;
            while t > 1e-10 {
                let trial: Vec<f64> = theta.iter().zip(&step).map(|(th, s)| th - t * s).collect();
                if objective(&trial) <= f0 {
                    theta = trial;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        mu *= 10.0;
    }
    loglinear(&masks, &theta, p.len())
}

/// Cliques of the diagonally split model as cell masks.
pub fn ds_cliques(n: usize) -> Vec<usize> {
    let all_x = (1 << n) - 1;
    let mut c = vec![all_x, all_x << n];
    c.extend((0..n).map(|i| (1 << i) | (1 << (n + i))));
    c
}

/// 1-D golden-section minimization on `[lo, hi]`.
pub fn golden(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Minimum of `D_KL[p : q]` over the geometric model for `n = 2`, full-support `p`.
///
/// The Markov conditions only restrict `q(y|x)`, so the optimum keeps
/// `q(x) = p(x)`. What remains is convex in the eight numbers
/// `m1(x1) = q(y1=1|x)`, `m2(x2) = q(y2=1|x)`, `t(x) = q(y=11|x)`, which
/// determine `q(y|x)` linearly. Solved by cyclic coordinate descent with
/// exact 1-D golden-section steps.
pub fn geometric_oracle(p: &[f64]) -> (f64, Vec<f64>) {
    assert_eq!(p.len(), 16);
    let px: Vec<f64> = (0..4)
        .map(|x| (0..4).map(|y| p[x | y << 2]).sum())
        .collect();
    let cond = |m1: &[f64; 2], m2: &[f64; 2], t: &[f64; 4], x: usize| -> [f64; 4] {
        let a = m1[x & 1];
        let b = m2[x >> 1];
        // y index: bit 0 = y1, bit 1 = y2
        [1.0 - a - b + t[x], a - t[x], b - t[x], t[x]]
    };
    let obj = |m1: &[f64; 2], m2: &[f64; 2], t: &[f64; 4]| -> f64 {
        let mut total = 0.0;
        for x in 0..4 {
            let q = cond(m1, m2, t, x);
            for y in 0..4 {
                let pv = p[x | y << 2];
                if q[y] <= 0.0 {
                    return f64::INFINITY;
                }
                total -= pv * (q[y] * px[x]).ln();
            }
        }
        total
    };
    // Start at the fully split solution: independent y given x.
    let py_given = |x: usize, j: usize| {
        (0..4)
            .filter(|y| y >> j & 1 == 1)
            .map(|y| p[x | y << 2])
            .sum::<f64>()
            / px[x]
    };
    let mut m1 = [0.0; 2];
    let mut m2 = [0.0; 2];
    for a in 0..2 {
        let w: f64 = (0..4).filter(|x| x & 1 == a).map(|x| px[x]).sum();
        m1[a] = (0..4)
            .filter(|x| x & 1 == a)
            .map(|x| px[x] * py_given(x, 0))
            .sum::<f64>()
            / w;
        let w: f64 = (0..4).filter(|x| x >> 1 == a).map(|x| px[x]).sum();
        m2[a] = (0..4)
            .filter(|x| x >> 1 == a)
            .map(|x| px[x] * py_given(x, 1))
            .sum::<f64>()
            / w;
    }
    let mut t = [0.0; 4];
    for x in 0..4 {
        t[x] = m1[x & 1] * m2[x >> 1];
    }
    let entropy_term: f64 = p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum();
    let mut prev = obj(&m1, &m2, &t);
    let margin = 1e-15;
    for _ in 0..20_000 {
        for x in 0..4 {
            let (a, b) = (m1[x & 1], m2[x >> 1]);
            let lo = (a + b - 1.0).max(0.0) + margin;
            let hi = a.min(b) - margin;
            let best = golden(
                |v| {
                    let mut tt = t;
                    tt[x] = v;
                    obj(&m1, &m2, &tt)
                },
                lo,
                hi,
                1e-13,
            );
            t[x] = best;
        }
        for a in 0..2 {
            let xs: Vec<usize> = (0..4).filter(|x| x & 1 == a).collect();
            let lo = xs.iter().map(|&x| t[x]).fold(0.0, f64::max) + margin;
            let hi = xs
                .iter()
                .map(|&x| 1.0 - m2[x >> 1] + t[x])
                .fold(1.0, f64::min)
                - margin;
            m1[a] = golden(
                |v| {
                    let mut mm = m1;
                    mm[a] = v;
                    obj(&mm, &m2, &t)
                },
                lo,
                hi,
                1e-13,
            );
            let xs: Vec<usize> = (0..4).filter(|x| x >> 1 == a).collect();
            let lo = xs.iter().map(|&x| t[x]).fold(0.0, f64::max) + margin;
            let hi = xs
                .iter()
                .map(|&x| 1.0 - m1[x & 1] + t[x])
                .fold(1.0, f64::min)
                - margin;
            m2[a] = golden(
                |v| {
                    let mut mm = m2;
                    mm[a] = v;
                    obj(&m1, &mm, &t)
                },
                lo,
                hi,
                1e-13,
            );
        }
        let cur = obj(&m1, &m2, &t);
        if prev - cur < 1e-15 {
            break;
        }
        prev = cur;
    }
    let mut q = vec![0.0; 16];
    for x in 0..4 {
        let c = cond(&m1, &m2, &t, x);
        for y in 0..4 {
            q[x | y << 2] = px[x] * c[y];
        }
    }
    (entropy_term + obj(&m1, &m2, &t), q)
}

/// Gradient of `D_KL[p : q]` in the eight free coordinates of the
/// geometric model (`m1`, `m2`, `t` of [`geometric_oracle`]) at `q`, n = 2.
/// `q` must keep `p(x)` as its input marginal and have full support; at an
/// interior optimum every component vanishes.
pub fn geometric_gradient(p: &[f64], q: &[f64]) -> [f64; 8] {
    let px: Vec<f64> = (0..4)
        .map(|x| (0..4).map(|y| p[x | y << 2]).sum())
        .collect();
    let mut g = [0.0; 8];
    for x in 0..4 {
        // d(-sum_y p ln c_y) with c = [1 - a - b + t, a - t, b - t, t].
        let w: Vec<f64> = (0..4)
            .map(|y| -p[x | y << 2] / (q[x | y << 2] / px[x]))
            .collect();
        g[x & 1] += -w[0] + w[1];
        g[2 + (x >> 1)] += -w[0] + w[2];
        g[4 + x] += w[0] - w[1] - w[2] + w[3];
    }
    g
}

/// Direct evaluation of the decoding family at `beta`.
pub fn md_family(n: usize, p: &[f64], beta: f64) -> Vec<f64> {
    let states = 1 << n;
    let mut px = vec![0.0; states];
    let mut py = vec![0.0; states];
    let mut pair = vec![[[0.0; 2]; 2]; n];
    for (cell, &v) in p.iter().enumerate() {
        px[cell % states] += v;
        py[cell / states] += v;
        for (i, t) in pair.iter_mut().enumerate() {
            t[bit(cell, i)][bit(cell, n + i)] += v;
        }
    }
    let lik = |x: usize, y: usize| -> f64 {
        (0..n)
            .map(|i| {
                let row = pair[i][bit(x, i)];
                (row[bit(y, i)] / (row[0] + row[1])).powf(beta)
            })
            .product()
    };
    let mut q = vec![0.0; p.len()];
    for y in 0..states {
        let z: f64 = (0..states).map(|x| px[x] * lik(x, y)).sum();
        for x in 0..states {
            q[x | (y * states)] = px[x] * py[y] * lik(x, y) / z;
        }
    }
    q
}

/// Grid search of `D_KL[p : q(beta)]` over `[0, hi]` at step `1e-3`, then a
/// `1e-6` grid around the best point. Returns `(beta, kl)`.
pub fn md_grid_oracle(n: usize, p: &[f64], hi: f64) -> (f64, f64) {
    let f = |b: f64| kl(p, &md_family(n, p, b));
    let steps = (hi / 1e-3).round() as usize;
    let (mut best_b, mut best) = (0.0, f(0.0));
    for k in 1..=steps {
        let b = k as f64 * 1e-3;
        let v = f(b);
        if v < best {
            best = v;
            best_b = b;
        }
    }
    let center = best_b;
    for k in 0..=2000 {
        let b = center - 1e-3 + k as f64 * 1e-6;
        if !(0.0..=hi).contains(&b) {
            continue;
        }
        let v = f(b);
        if v < best {
            best = v;
            best_b = b;
        }
    }
    (best_b, best)
}

/// `D_KL[N(0, p) : N(0, q)]` via LU determinants.
pub fn gauss_kl(p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let d = p.nrows() as f64;
    let qi = q.clone().try_inverse().unwrap();
    0.5 * ((&qi * p).trace() - d + (q.determinant() / p.determinant()).ln())
}

/// `[Sx, Sx A'; A Sx, A Sx A' + Se]`.
pub fn gauss_joint(sx: &DMatrix<f64>, a: &DMatrix<f64>, se: &DMatrix<f64>) -> DMatrix<f64> {
    let n = sx.nrows();
    let mut c = DMatrix::zeros(2 * n, 2 * n);
    c.view_mut((0, 0), (n, n)).copy_from(sx);
    c.view_mut((0, n), (n, n)).copy_from(&(sx * a.transpose()));
    c.view_mut((n, 0), (n, n)).copy_from(&(a * sx));
    c.view_mut((n, n), (n, n))
        .copy_from(&(a * sx * a.transpose() + se));
    c
}

/// Covariance selection by iterative proportional scaling: the Gaussian
/// with precision zero off the graph that matches `sigma` on every clique.
pub fn gaussian_ips(sigma: &DMatrix<f64>, cliques: &[Vec<usize>], sweeps: usize) -> DMatrix<f64> {
    let mut k = DMatrix::from_diagonal(&sigma.diagonal().map(|v| 1.0 / v));
    let sub =
        |m: &DMatrix<f64>, c: &[usize]| DMatrix::from_fn(c.len(), c.len(), |i, j| m[(c[i], c[j])]);
    for _ in 0..sweeps {
        for c in cliques {
            let cov = k.clone().try_inverse().unwrap();
            let upd = sub(sigma, c).try_inverse().unwrap() - sub(&cov, c).try_inverse().unwrap();
            for (i, &a) in c.iter().enumerate() {
                for (j, &b) in c.iter().enumerate() {
                    k[(a, b)] += upd[(i, j)];
                }
            }
        }
    }
    k.try_inverse().unwrap()
}

/// Cliques of the diagonally split Gaussian graph: all inputs, all outputs,
/// and each `(x_i, y_i)`.
pub fn gaussian_ds_cliques(n: usize) -> Vec<Vec<usize>> {
    let mut c = vec![(0..n).collect::<Vec<_>>(), (n..2 * n).collect()];
    c.extend((0..n).map(|i| vec![i, n + i]));
    c
}
