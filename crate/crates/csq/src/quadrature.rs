//! Gaussian quadrature rules and angular grids.
//!
//! Nodes come from the symmetric tridiagonal (Jacobi) matrix of the
//! orthogonal-polynomial recurrence, then get one round of Newton polishing.
//! Laguerre weights are returned in log form: at several hundred nodes the
//! raw weights underflow while the integrands they multiply overflow, and
//! only the products are representable.

use crate::error::{CsqError, Result};

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL method.
/// `diag` has length n, `off[k]` couples rows k and k+1 (length n-1).
pub(crate) fn tridiag_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n);
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // find a negligible subdiagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(CsqError::NonConvergence(
                    "tridiagonal QL exceeded 50 iterations".into(),
                ));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // rotation annihilated early; restart the QL step
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut vals = diag.to_vec();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

/// Scaled Laguerre values s_k(u) = L_k(u)·e^{-u/2} for k = n-1, n, n+1.
fn scaled_laguerre_triplet(n: usize, u: f64) -> (f64, f64, f64) {
    let mut s_prev = 0.0f64;
    let mut s = (-0.5 * u).exp();
    let mut triple = (0.0, s, 0.0);
    for k in 0..=n {
        let s_next = ((2.0 * k as f64 + 1.0 - u) * s - k as f64 * s_prev) / (k as f64 + 1.0);
        s_prev = s;
        s = s_next;
        if k + 1 == n - 1 {
            triple.0 = s;
        }
        if k + 1 == n {
            triple.1 = s;
        }
        if k + 1 == n + 1 {
            triple.2 = s;
        }
    }
    if n == 1 {
        // loop never hits k+1 == 0; s_0 is the starting value
        triple.0 = (-0.5 * u).exp();
    }
    triple
}

/// Gauss-Laguerre rule for ∫₀^∞ e^{-u} f(u) du ≈ Σ e^{ln_w[k]}·f(u[k]).
///
/// Returns (nodes ascending, log-weights).  Valid for n ≥ 1; the log form
/// keeps rules with hundreds of nodes usable where linear weights underflow.
pub fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(CsqError::Domain("gauss_laguerre: n must be >= 1".into()));
    }
    let mut diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let mut off: Vec<f64> = (1..n).map(|k| k as f64).collect();
    let mut nodes = tridiag_eigenvalues(&mut diag, &mut off)?;

    let mut ln_weights = vec![0.0f64; n];
    for (k, u) in nodes.iter_mut().enumerate() {
        // Newton polish on the scaled polynomial; two steps reach roundoff
        for _ in 0..2 {
            let (s_nm1, s_n, _) = scaled_laguerre_triplet(n, *u);
            // L_n' = n(L_n - L_{n-1})/u, carried over to the scaled form
            let ds = (n as f64) * (s_n - s_nm1) / *u - 0.5 * s_n;
            if ds != 0.0 {
                let step = s_n / ds;
                if step.is_finite() && step.abs() < 1.0 {
                    *u -= step;
                }
            }
        }
        let (_, _, s_np1) = scaled_laguerre_triplet(n, *u);
        let denom = (n as f64 + 1.0) * s_np1.abs();
        ln_weights[k] = u.ln() - 2.0 * denom.ln() - *u;
    }
    Ok((nodes, ln_weights))
}

/// Orthonormal Hermite values p_0..p_n at x (weight e^{-x²}, p_0 = π^{-1/4}).
fn orthonormal_hermite(n: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(std::f64::consts::PI.powf(-0.25));
    if n >= 1 {
        p.push((2.0f64).sqrt() * x * p[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (x * p[k] * (2.0 / (kf + 1.0)).sqrt()) - p[k - 1] * (kf / (kf + 1.0)).sqrt();
        p.push(next);
    }
    p
}

/// Gauss-Hermite rule for ∫ e^{-x²} f(x) dx ≈ Σ w[k]·f(x[k]).
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(CsqError::Domain("gauss_hermite: n must be >= 1".into()));
    }
    let mut diag = vec![0.0f64; n];
    let mut off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let mut nodes = tridiag_eigenvalues(&mut diag, &mut off)?;

    let mut weights = vec![0.0f64; n];
    for (k, x) in nodes.iter_mut().enumerate() {
        for _ in 0..2 {
            let p = orthonormal_hermite(n, *x);
            let dp = (2.0 * n as f64).sqrt() * p[n - 1];
            if dp != 0.0 {
                let step = p[n] / dp;
                if step.is_finite() && step.abs() < 1.0 {
                    *x -= step;
                }
            }
        }
        let p = orthonormal_hermite(n, *x);
        let sum_sq: f64 = p[..n].iter().map(|v| v * v).sum();
        weights[k] = 1.0 / sum_sq;
    }
    // enforce the exact even symmetry of the rule
    for k in 0..n / 2 {
        let mirror = n - 1 - k;
        let x = 0.5 * (nodes[mirror] - nodes[k]);
        nodes[k] = -x;
        nodes[mirror] = x;
        let w = 0.5 * (weights[k] + weights[mirror]);
        weights[k] = w;
        weights[mirror] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Gauss-Legendre rule for ∫_{-1}^{1} f(x) dx ≈ Σ w[k]·f(x[k]).
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(CsqError::Domain("gauss_legendre: n must be >= 1".into()));
    }
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0f64;
            let mut p1 = x;
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Uniform midpoint grid on [0, 2π): θ_j = 2π(j + 1/2)/m.
///
/// Midpoints avoid placing nodes on the jump of a sawtooth-type integrand,
/// which keeps Richardson extrapolation over m, 2m, 4m clean.
pub fn midpoint_angles(m: usize) -> Vec<f64> {
    let step = 2.0 * std::f64::consts::PI / m as f64;
    (0..m).map(|j| (j as f64 + 0.5) * step).collect()
}

/// Gauss-Legendre nodes and weights mapped to [a, b].
pub fn legendre_on_interval(nodes: &[f64], weights: &[f64], a: f64, b: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| (mid + half * x, half * w))
        .collect()
}
