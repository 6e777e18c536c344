//! Lower symbols: expectation values ⟨z|A|z⟩ and their closed-form series.
//!
//! The angle and cotangent operators have symbols that are Fourier series in
//! θ whose radial coefficients combine modified Bessel functions of
//! half-integer order; everything here evaluates those series with the
//! exponentially scaled Bessel values, so no term ever needs e^{r²}.
//! Series are summed to their natural cutoff: coefficients die
//! super-exponentially once the harmonic index passes r².

use num_complex::Complex64;

use crate::error::{CsqError, Result};
use crate::fock::{CoherentVector, FockOperator};
use crate::quadrature::{gauss_hermite, gauss_legendre, legendre_on_interval};
use crate::specfun::{bessel_i_scaled, erf, kummer_1f1_scaled, ln_gamma};

const SQRT_PI: f64 = 1.772_453_850_905_516_1;

/// What to do when a coherent vector does not fit the truncation order.
#[derive(Debug, Clone, Copy)]
pub enum TruncationPolicy {
    /// Refuse when the lost tail weight exceeds `max_loss`.
    Reject { max_loss: f64 },
    /// Accept any loss; the caller owns the interpretation.
    Allow,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy::Reject { max_loss: 1e-6 }
    }
}

/// ⟨z/√ħ | A | z/√ħ⟩.
///
/// The ħ-dependence enters only through the rescaled evaluation point, so an
/// operator built once can be probed across ħ values.
pub fn lower_symbol(
    op: &FockOperator,
    z: Complex64,
    hbar: f64,
    policy: TruncationPolicy,
) -> Result<Complex64> {
    if hbar <= 0.0 {
        return Err(CsqError::Domain(format!("hbar must be > 0, got {hbar}")));
    }
    let state = CoherentVector::new(z / hbar.sqrt(), op.order);
    if let TruncationPolicy::Reject { max_loss } = policy {
        if state.truncation_loss > max_loss {
            return Err(CsqError::TruncationLoss {
                loss: state.truncation_loss,
                limit: max_loss,
            });
        }
    }
    op.expectation(&state)
}

/// Natural summation cutoff: coefficients involving I_ν(r²/2) collapse once
/// the order ν ≈ q/2 clears the argument, i.e. for q ≳ r² + O(r).
fn harmonic_cap(r: f64) -> usize {
    let u = r * r;
    (u + 40.0 * (u + 1.0).sqrt() + 80.0) as usize
}

/// Radial coefficient of the angle-symbol series:
/// c_q(r) = (√π r / q)[I_{(q-1)/2} + I_{(q+1)/2}](r²/2) e^{-r²/2}.
pub fn angle_series_coefficient(q: usize, r: f64) -> Result<f64> {
    if q == 0 {
        return Err(CsqError::Domain("angle coefficient needs q >= 1".into()));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let x = r * r / 2.0;
    let qf = q as f64;
    Ok(SQRT_PI * r / qf
        * (bessel_i_scaled((qf - 1.0) / 2.0, x)? + bessel_i_scaled((qf + 1.0) / 2.0, x)?))
}

/// Radial coefficient of the cotangent-symbol series:
/// c_q(r) = √π r [I_{q-1/2} + I_{q+1/2}](r²/2) e^{-r²/2}; c_q → 2 as r → ∞.
pub fn time_series_coefficient(q: usize, r: f64) -> Result<f64> {
    if q == 0 {
        return Err(CsqError::Domain("time coefficient needs q >= 1".into()));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let x = r * r / 2.0;
    let qf = q as f64;
    Ok(SQRT_PI * r * (bessel_i_scaled(qf - 0.5, x)? + bessel_i_scaled(qf + 0.5, x)?))
}

/// Lower symbol of the angle operator: π - Σ_q c_q(r) sin(qθ).
pub fn angle_symbol_series(r: f64, theta: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(CsqError::Domain("radius must be >= 0".into()));
    }
    let mut acc = std::f64::consts::PI;
    let mut tiny_run = 0;
    for q in 1..=harmonic_cap(r) {
        let c = angle_series_coefficient(q, r)?;
        acc -= c * (q as f64 * theta).sin();
        if c.abs() < 1e-16 {
            tiny_run += 1;
            if tiny_run >= 4 {
                break;
            }
        } else {
            tiny_run = 0;
        }
    }
    Ok(acc)
}

/// Lower symbol of the quantized principal-value cotangent:
/// Σ_q c_q(r) sin(2qθ).  Converges to cot θ pointwise as r grows.
pub fn time_symbol_series(r: f64, theta: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(CsqError::Domain("radius must be >= 0".into()));
    }
    let mut acc = 0.0f64;
    let mut tiny_run = 0;
    for q in 1..=harmonic_cap(r) {
        let c = time_series_coefficient(q, r)?;
        acc += c * (2.0 * q as f64 * theta).sin();
        if c.abs() < 1e-16 {
            tiny_run += 1;
            if tiny_run >= 4 {
                break;
            }
        } else {
            tiny_run = 0;
        }
    }
    Ok(acc)
}

/// Coefficient of the commutator-symbol series for the cotangent pair:
/// e^{-r²} r^{2q} (q!/(2q)!) ₁F₁(q; 2q+1; r²), assembled in log space.
pub fn commutator_time_coefficient(q: usize, r: f64) -> Result<f64> {
    if q == 0 {
        return Err(CsqError::Domain("commutator coefficient needs q >= 1".into()));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let qf = q as f64;
    let ln_pref = 2.0 * qf * r.ln() + ln_gamma(qf + 1.0)? - ln_gamma(2.0 * qf + 1.0)?;
    Ok(ln_pref.exp() * kummer_1f1_scaled(qf, 2.0 * qf + 1.0, r * r)?)
}

/// Lower symbol of the commutator of the cotangent operator with the
/// kinetic Hamiltonian: -i + i Σ_q c_q(r) cos(2qθ).
pub fn commutator_time_symbol_series(r: f64, theta: f64) -> Result<Complex64> {
    if r < 0.0 {
        return Err(CsqError::Domain("radius must be >= 0".into()));
    }
    let mut acc = -1.0f64;
    let mut tiny_run = 0;
    for q in 1..=harmonic_cap(r) {
        let c = commutator_time_coefficient(q, r)?;
        acc += c * (2.0 * q as f64 * theta).cos();
        if c.abs() < 1e-16 {
            tiny_run += 1;
            if tiny_run >= 4 {
                break;
            }
        } else {
            tiny_run = 0;
        }
    }
    Ok(Complex64::new(0.0, acc))
}

/// Lower symbol of the commutator of the angle operator with the number
/// operator: i Σ_q q·c_q(r) cos(qθ), with the angle-series coefficients.
pub fn commutator_angle_number_symbol_series(r: f64, theta: f64) -> Result<Complex64> {
    if r < 0.0 {
        return Err(CsqError::Domain("radius must be >= 0".into()));
    }
    let mut acc = 0.0f64;
    let mut tiny_run = 0;
    for q in 1..=harmonic_cap(r) {
        let c = angle_series_coefficient(q, r)?;
        acc += q as f64 * c * (q as f64 * theta).cos();
        if c.abs() < 1e-16 {
            tiny_run += 1;
            if tiny_run >= 4 {
                break;
            }
        } else {
            tiny_run = 0;
        }
    }
    Ok(Complex64::new(0.0, acc))
}

/// Independent route to any lower symbol: the Gaussian convolution
/// (1/π) ∫ f(w) e^{-|w - z/√ħ|²} d²w on a tensor Gauss-Hermite grid.
pub fn gaussian_convolution_oracle<F>(
    f: F,
    z: Complex64,
    hbar: f64,
    n_nodes: usize,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if hbar <= 0.0 {
        return Err(CsqError::Domain(format!("hbar must be > 0, got {hbar}")));
    }
    let center = z / hbar.sqrt();
    let (nodes, weights) = gauss_hermite(n_nodes)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &x) in nodes.iter().enumerate() {
        for (j, &y) in nodes.iter().enumerate() {
            acc += f(center + Complex64::new(x, y)) * (weights[i] * weights[j]);
        }
    }
    Ok(acc / std::f64::consts::PI)
}

/// Angular smoothing kernel of the lower symbol:
/// K(ψ) = (1/2π)[e^{-r²} + √π r cosψ · e^{-r² sin²ψ} (1 + erf(r cosψ))].
/// Integrates to 1 over one period.
pub fn angular_kernel(r: f64, psi: f64) -> f64 {
    let c = psi.cos();
    let s = psi.sin();
    let rc = r * c;
    (1.0 / (2.0 * std::f64::consts::PI))
        * ((-r * r).exp() + SQRT_PI * rc * (-r * r * s * s).exp() * (1.0 + erf(rc)))
}

/// Third route to the angle symbol: direct convolution of the sawtooth with
/// the angular kernel, ∫₀^{2π} θ'·K(θ'-θ) dθ'.  The integration is split at
/// θ because the sawtooth jump at 0 ≡ 2π makes the integrand only piecewise
/// smooth, and the kernel peak at θ' = θ wants panel boundaries there.
pub fn angle_symbol_integral(r: f64, theta: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(CsqError::Domain("radius must be >= 0".into()));
    }
    let theta = theta.rem_euclid(2.0 * std::f64::consts::PI);
    let (nodes, weights) = gauss_legendre(20)?;
    let nseg = 24 + (3.0 * r) as usize;
    let mut acc = 0.0f64;
    for (a, b) in [(0.0, theta), (theta, 2.0 * std::f64::consts::PI)] {
        if b - a < 1e-300 {
            continue;
        }
        let h = (b - a) / nseg as f64;
        for seg in 0..nseg {
            let lo = a + seg as f64 * h;
            for &(tp, w) in &legendre_on_interval(&nodes, &weights, lo, lo + h) {
                acc += tp * angular_kernel(r, tp - theta) * w;
            }
        }
    }
    Ok(acc)
}

/// Scaled Bessel e^{-x} I_ν(x) extended to the negative orders reachable by
/// differentiating the series coefficients twice.
fn bessel_is_extended(nu: f64, x: f64) -> Result<f64> {
    if nu >= -0.5 {
        return bessel_i_scaled(nu, x);
    }
    let rounded = nu.round();
    if (nu - rounded).abs() < 1e-12 && rounded < 0.0 {
        // integer order: I_{-n} = I_n
        return bessel_i_scaled(-nu, x);
    }
    if (nu + 1.5).abs() < 1e-12 {
        // downward recurrence step from ν = -1/2
        return Ok(bessel_i_scaled(0.5, x)? - bessel_i_scaled(-0.5, x)? / x);
    }
    Err(CsqError::Domain(format!(
        "scaled Bessel: order {nu} below the supported range"
    )))
}

/// d/dx of e^{-x} I_ν(x): (Is_{ν-1} + Is_{ν+1})/2 - Is_ν.
fn bessel_is_dx(nu: f64, x: f64) -> Result<f64> {
    Ok((bessel_is_extended(nu - 1.0, x)? + bessel_is_extended(nu + 1.0, x)?) / 2.0
        - bessel_is_extended(nu, x)?)
}

/// d²/dx² of e^{-x} I_ν(x).
fn bessel_is_dxx(nu: f64, x: f64) -> Result<f64> {
    Ok((bessel_is_extended(nu - 2.0, x)? + 2.0 * bessel_is_extended(nu, x)?
        + bessel_is_extended(nu + 2.0, x)?)
        / 4.0
        - (bessel_is_extended(nu - 1.0, x)? + bessel_is_extended(nu + 1.0, x)?)
        + bessel_is_extended(nu, x)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolFamily {
    Angle,
    Time,
}

/// Termwise θ-derivative of order k of the chosen symbol series.
pub fn symbol_theta_derivative(
    family: SymbolFamily,
    r: f64,
    theta: f64,
    k: usize,
) -> Result<f64> {
    if k == 0 || k > 4 {
        return Err(CsqError::Domain("theta derivative order must be 1..=4".into()));
    }
    let mut acc = 0.0f64;
    let mut tiny_run = 0;
    for q in 1..=harmonic_cap(r) {
        let (c, freq, base_is_sin, sign) = match family {
            // angle symbol: π - Σ c_q sin(qθ)
            SymbolFamily::Angle => (angle_series_coefficient(q, r)?, q as f64, true, -1.0),
            // time symbol: Σ c_q sin(2qθ)
            SymbolFamily::Time => (time_series_coefficient(q, r)?, 2.0 * q as f64, true, 1.0),
        };
        // d^k/dθ^k of sin(fθ) cycles through cos, -sin, -cos, sin
        let arg = freq * theta;
        let wave = if base_is_sin {
            match k % 4 {
                1 => arg.cos(),
                2 => -arg.sin(),
                3 => -arg.cos(),
                _ => arg.sin(),
            }
        } else {
            unreachable!()
        };
        acc += sign * c * freq.powi(k as i32) * wave;
        if c.abs() < 1e-16 {
            tiny_run += 1;
            if tiny_run >= 4 {
                break;
            }
        } else {
            tiny_run = 0;
        }
    }
    Ok(acc)
}

/// Termwise radial derivative (k = 1 or 2) of the chosen symbol series.
///
/// With c(r) = √π·r·T(r²/2) per harmonic (T a sum of scaled Bessel values),
/// c' = √π(T + r²T') and c'' = √π(3rT' + r³T'').
pub fn symbol_radial_derivative(
    family: SymbolFamily,
    r: f64,
    theta: f64,
    k: usize,
) -> Result<f64> {
    if k == 0 || k > 2 {
        return Err(CsqError::Domain("radial derivative order must be 1 or 2".into()));
    }
    if r <= 0.0 {
        return Err(CsqError::Domain("radial derivative needs r > 0".into()));
    }
    let x = r * r / 2.0;
    let mut acc = 0.0f64;
    let mut tiny_run = 0;
    for q in 1..=harmonic_cap(r) {
        let qf = q as f64;
        let (orders, wave, sign, scale): ([f64; 2], f64, f64, f64) = match family {
            SymbolFamily::Angle => (
                [(qf - 1.0) / 2.0, (qf + 1.0) / 2.0],
                (qf * theta).sin(),
                -1.0,
                1.0 / qf,
            ),
            SymbolFamily::Time => (
                [qf - 0.5, qf + 0.5],
                (2.0 * qf * theta).sin(),
                1.0,
                1.0,
            ),
        };
        let t: f64 = bessel_is_extended(orders[0], x)? + bessel_is_extended(orders[1], x)?;
        let tp: f64 = bessel_is_dx(orders[0], x)? + bessel_is_dx(orders[1], x)?;
        let deriv = if k == 1 {
            SQRT_PI * (t + r * r * tp)
        } else {
            let tpp: f64 = bessel_is_dxx(orders[0], x)? + bessel_is_dxx(orders[1], x)?;
            SQRT_PI * (3.0 * r * tp + r * r * r * tpp)
        };
        acc += sign * scale * deriv * wave;
        if (scale * t).abs() < 1e-16 {
            tiny_run += 1;
            if tiny_run >= 4 {
                break;
            }
        } else {
            tiny_run = 0;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct SmoothnessReport {
    /// |termwise - finite difference| for θ-derivatives of order 1..=max_k.
    pub theta_deviations: Vec<f64>,
    /// Same for radial derivatives of order 1..=min(max_k, 2).
    pub radial_deviations: Vec<f64>,
}

/// Cross-validate termwise derivatives of a symbol series against central
/// finite differences of the summed series itself.
pub fn smoothness_probe(
    family: SymbolFamily,
    r: f64,
    theta: f64,
    max_k: usize,
) -> Result<SmoothnessReport> {
    if max_k == 0 || max_k > 4 {
        return Err(CsqError::Domain("smoothness probe supports k = 1..=4".into()));
    }
    let eval = |rr: f64, tt: f64| -> Result<f64> {
        match family {
            SymbolFamily::Angle => angle_symbol_series(rr, tt),
            SymbolFamily::Time => time_symbol_series(rr, tt),
        }
    };

    let mut theta_deviations = Vec::new();
    for k in 1..=max_k {
        let termwise = symbol_theta_derivative(family, r, theta, k)?;
        let fd = match k {
            1 => {
                let h = 1e-4;
                (eval(r, theta + h)? - eval(r, theta - h)?) / (2.0 * h)
            }
            2 => {
                let h = 1e-3;
                (eval(r, theta + h)? - 2.0 * eval(r, theta)? + eval(r, theta - h)?) / (h * h)
            }
            3 => {
                let h = 5e-3;
                (eval(r, theta + 2.0 * h)? - 2.0 * eval(r, theta + h)?
                    + 2.0 * eval(r, theta - h)?
                    - eval(r, theta - 2.0 * h)?)
                    / (2.0 * h * h * h)
            }
            _ => {
                let h = 0.02;
                (eval(r, theta + 2.0 * h)? - 4.0 * eval(r, theta + h)? + 6.0 * eval(r, theta)?
                    - 4.0 * eval(r, theta - h)?
                    + eval(r, theta - 2.0 * h)?)
                    / (h * h * h * h)
            }
        };
        theta_deviations.push((termwise - fd).abs());
    }

    let mut radial_deviations = Vec::new();
    for k in 1..=max_k.min(2) {
        let termwise = symbol_radial_derivative(family, r, theta, k)?;
        let fd = if k == 1 {
            let h = 1e-4;
            (eval(r + h, theta)? - eval(r - h, theta)?) / (2.0 * h)
        } else {
            let h = 1e-3;
            (eval(r + h, theta)? - 2.0 * eval(r, theta)? + eval(r - h, theta)?) / (h * h)
        };
        radial_deviations.push((termwise - fd).abs());
    }

    Ok(SmoothnessReport {
        theta_deviations,
        radial_deviations,
    })
}
