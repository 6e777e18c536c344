//! Noncommutative-plane checks: exponential symbols, the Voros star
//! product, operator-valued plane waves, and smeared resolution-of-identity
//! kernels.
//!
//! The star product f ⋆ g = f e^{←∂_z →∂_z̄} g closes on c·e^{αz+βz̄+γzz̄}:
//! with ∂_z^n f = (α₁+γ₁z̄)^n f and ∂_z̄^n g = (β₂+γ₂z)^n g the series sums
//! to exp((α₁+γ₁z̄)(β₂+γ₂z)), which only reshuffles the exponent.  All star
//! algebra here is therefore exact; quadrature enters only when a kernel is
//! integrated against a test function.

use num_complex::Complex64;

use crate::error::{CsqError, Result};
use crate::quadrature::gauss_hermite;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// c·exp(αz + βz̄ + γ z z̄) with γ ≤ 0 so the symbol stays bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSymbol {
    pub c: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: f64,
}

impl ExpSymbol {
    pub fn new(c: Complex64, alpha: Complex64, beta: Complex64, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma > 0.0 {
            return Err(CsqError::NonIntegrable { gamma });
        }
        Ok(Self { c, alpha, beta, gamma })
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            c,
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
            gamma: 0.0,
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zbar = z.conj();
        self.c * (self.alpha * z + self.beta * zbar + self.gamma * z.norm_sqr()).exp()
    }

    /// Complex conjugate of the symbol, again an ExpSymbol.
    pub fn conjugate(&self) -> Self {
        Self {
            c: self.c.conj(),
            alpha: self.beta.conj(),
            beta: self.alpha.conj(),
            gamma: self.gamma,
        }
    }

    /// Plain pointwise product (no star).
    pub fn pointwise_mul(&self, other: &Self) -> Self {
        Self {
            c: self.c * other.c,
            alpha: self.alpha + other.alpha,
            beta: self.beta + other.beta,
            gamma: self.gamma + other.gamma,
        }
    }

    /// ∫ d²z of the symbol: (π/(-γ)) c e^{-αβ/γ}, defined for γ < 0.
    pub fn integral(&self) -> Result<Complex64> {
        if self.gamma >= 0.0 {
            return Err(CsqError::NonIntegrable { gamma: self.gamma });
        }
        let g = -self.gamma;
        Ok(self.c * (std::f64::consts::PI / g) * (self.alpha * self.beta / g).exp())
    }
}

/// Voros star product of two exponential symbols.  The exponent algebra is
/// exact; the only failure mode is a composed Gaussian that curves upward.
pub fn voros_star(f: &ExpSymbol, g: &ExpSymbol) -> Result<ExpSymbol> {
    let c = f.c * g.c * (f.alpha * g.beta).exp();
    let alpha = f.alpha + g.alpha + f.alpha * g.gamma;
    let beta = f.beta + g.beta + f.gamma * g.beta;
    let mut gamma = f.gamma + g.gamma + f.gamma * g.gamma;
    if gamma > 1e-12 {
        return Err(CsqError::NonIntegrable { gamma });
    }
    gamma = gamma.min(0.0);
    Ok(ExpSymbol { c, alpha, beta, gamma })
}

/// Plane-wave symbol (z,z̄|p) = √(θ/2π) e^{-θ|p|²/4} e^{i√(θ/2)(z̄p + zp̄)}.
pub fn momentum_symbol(p: Complex64, theta_nc: f64) -> Result<ExpSymbol> {
    if !(theta_nc > 0.0) {
        return Err(CsqError::Domain("noncommutativity parameter must be > 0".into()));
    }
    let amp = (theta_nc / (2.0 * std::f64::consts::PI)).sqrt()
        * (-theta_nc * p.norm_sqr() / 4.0).exp();
    let k = (theta_nc / 2.0).sqrt();
    Ok(ExpSymbol {
        c: Complex64::new(amp, 0.0),
        alpha: I * k * p.conj(),
        beta: I * k * p,
        gamma: 0.0,
    })
}

/// The dual wave (p|z,z̄), i.e. the conjugate symbol.
pub fn momentum_dual_symbol(p: Complex64, theta_nc: f64) -> Result<ExpSymbol> {
    Ok(momentum_symbol(p, theta_nc)?.conjugate())
}

/// Two-point overlap (z,z̄|z′,z̄′) = e^{-|z-z′|²}.
pub fn overlap(z: Complex64, z_prime: Complex64) -> f64 {
    (-(z - z_prime).norm_sqr()).exp()
}

/// ∫ g(p) e^{-σ²|p|²} d²p on a tensor Gauss-Hermite grid with n points per
/// axis.  The caller supplies the non-Gaussian factor g.
pub fn gauss_hermite_integral_2d<G>(g: G, sigma: f64, n: usize) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64,
{
    if !(sigma > 0.0) {
        return Err(CsqError::Domain("gaussian scale must be > 0".into()));
    }
    let (nodes, weights) = gauss_hermite(n)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &x) in nodes.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (j, &y) in nodes.iter().enumerate() {
            let p = Complex64::new(x / sigma, y / sigma);
            row += weights[j] * g(p);
        }
        acc += weights[i] * row;
    }
    Ok(acc / (sigma * sigma))
}

/// Quadrature route to ∫ d²p (z′|p)(p|z); the analytic value is
/// e^{-|z-z′|²}.
pub fn momentum_resolution_quadrature(
    z: Complex64,
    z_prime: Complex64,
    theta_nc: f64,
    n: usize,
) -> Result<Complex64> {
    if !(theta_nc > 0.0) {
        return Err(CsqError::Domain("noncommutativity parameter must be > 0".into()));
    }
    let k = (theta_nc / 2.0).sqrt();
    let pref = theta_nc / (2.0 * std::f64::consts::PI);
    let dzbar = (z_prime - z).conj();
    let dz = z_prime - z;
    // (z′|p)(p|z) = pref · e^{-θ|p|²/2} · e^{i√(θ/2)[(z̄′-z̄)p + (z′-z)p̄]}
    let g = |p: Complex64| {
        let phase = I * k * (dzbar * p + dz * p.conj());
        pref * phase.exp()
    };
    gauss_hermite_integral_2d(g, (theta_nc / 2.0).sqrt(), n)
}

/// Both smeared delta-kernels at momentum p against a Gaussian test
/// function of the given width centered at p′₀.
#[derive(Debug, Clone, Copy)]
pub struct StarDeltaPair {
    /// ∫∫ (p′|z)(z|p) g_w(p′-p′₀) d²p′ d²z/π  (pointwise product)
    pub plain: Complex64,
    /// same with the Voros-composed kernel
    pub starred: Complex64,
}

impl StarDeltaPair {
    pub fn ratio(&self) -> Complex64 {
        self.plain / self.starred
    }
}

/// Smear the plain and starred two-wave kernels in p′, then integrate over
/// the plane.  The starred kernel acts as δ²(p-p′), so the starred result
/// reproduces the test function at p while the plain one keeps an extra
/// e^{-θ|p|²/2}.
pub fn star_delta_check(
    p: Complex64,
    p_prime: Complex64,
    theta_nc: f64,
    test_width: f64,
) -> Result<StarDeltaPair> {
    if !(test_width > 0.0) {
        return Err(CsqError::Domain("test width must be > 0".into()));
    }
    if !(theta_nc > 0.0) {
        return Err(CsqError::Domain("noncommutativity parameter must be > 0".into()));
    }
    // The inner rule must resolve the phase e^{-i√(2θ) ξ·z} at the largest
    // outer node: frequencies reach 2·t_max(n_outer)·√(1+θw²/4) in the
    // scaled ξ variable, and an n-point rule is clean up to about 2√n.
    // 28 outer points (t_max ≈ 6.6) against 64 inner points leaves margin
    // for θw² up to order one.
    let n_outer = 28;
    let n_inner = 64;
    let w2 = test_width * test_width;

    // symbols in z for each inner node p′ = p′₀ + ξ
    let (nodes, weights) = gauss_hermite(n_inner)?;
    let sigma_in = 1.0 / test_width;
    let wave_in = momentum_symbol(p, theta_nc)?;
    let mut plain_terms: Vec<(f64, ExpSymbol)> = Vec::with_capacity(n_inner * n_inner);
    let mut star_terms: Vec<(f64, ExpSymbol)> = Vec::with_capacity(n_inner * n_inner);
    for (i, &x) in nodes.iter().enumerate() {
        for (j, &y) in nodes.iter().enumerate() {
            let xi = Complex64::new(x / sigma_in, y / sigma_in);
            let dual = momentum_dual_symbol(p_prime + xi, theta_nc)?;
            let wq = weights[i] * weights[j];
            plain_terms.push((wq, dual.pointwise_mul(&wave_in)));
            star_terms.push((wq, voros_star(&dual, &wave_in)?));
        }
    }
    // test-function normalization and the inner substitution Jacobian
    let inner_scale = 1.0 / (std::f64::consts::PI * w2) / (sigma_in * sigma_in);

    // outer Gaussian rate: the ξ-average decays in z like
    // e^{-(θ/2) w_eff² |z|²} with 1/w_eff² = 1/w² + θ/4
    let w_eff2 = 1.0 / (1.0 / w2 + theta_nc / 4.0);
    let sigma_out = (theta_nc / 2.0 * w_eff2).sqrt();

    let smear = |terms: &[(f64, ExpSymbol)]| -> Result<Complex64> {
        let g = |z: Complex64| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(wq, ref s) in terms {
                acc += wq * s.eval(z);
            }
            // divide out the Gaussian the outer quadrature supplies
            acc * inner_scale * (sigma_out * sigma_out * z.norm_sqr()).exp()
        };
        Ok(gauss_hermite_integral_2d(g, sigma_out, n_outer)? / std::f64::consts::PI)
    };

    Ok(StarDeltaPair {
        plain: smear(&plain_terms)?,
        starred: smear(&star_terms)?,
    })
}

/// Finite-difference witness of z ⋆ z̄ - z̄ ⋆ z = 1, extracted from the
/// exponential rule by a mixed second difference in the parameters of
/// e^{az} and e^{dz̄}.
pub fn noncommutativity_witness(z: Complex64) -> Result<Complex64> {
    let h = 5e-4;
    let zero = Complex64::new(0.0, 0.0);
    let wave = |a: f64, d: f64| -> Result<(Complex64, Complex64)> {
        let f = ExpSymbol::new(Complex64::new(1.0, 0.0), Complex64::new(a, 0.0), zero, 0.0)?;
        let g = ExpSymbol::new(Complex64::new(1.0, 0.0), zero, Complex64::new(d, 0.0), 0.0)?;
        Ok((voros_star(&f, &g)?.eval(z), voros_star(&g, &f)?.eval(z)))
    };
    let (pp_f, pp_g) = wave(h, h)?;
    let (pm_f, pm_g) = wave(h, -h)?;
    let (mp_f, mp_g) = wave(-h, h)?;
    let (mm_f, mm_g) = wave(-h, -h)?;
    let denom = 4.0 * h * h;
    let fd_f = (pp_f - pm_f - mp_f + mm_f) / denom;
    let fd_g = (pp_g - pm_g - mp_g + mm_g) / denom;
    Ok(fd_f - fd_g)
}
