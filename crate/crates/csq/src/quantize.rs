//! Quantization maps: phase-space functions to number-basis operators.
//!
//! The defining integral, matrix element by matrix element, is
//!
//!   (A_f)_{n n'} = (1/π) ∫ f(z) e^{-|z|²} zⁿ z̄^{n'} d²z / √(n! n'!) .
//!
//! In polar form (u = |z|²) it factorizes into a radial Gauss-Laguerre sum
//! against an angular Fourier coefficient, which is how every entry point
//! here is evaluated.  All radial factors are assembled in log space and
//! normalized so no intermediate exceeds the unit scale:
//! Γ((n+n')/2 + 1) ≤ √(n! n'!) keeps the final prefactor in [0, 1].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CsqError, Result};
use crate::fock::FockOperator;
use crate::linalg::ComplexMatrix;
use crate::quadrature::{gauss_laguerre, gauss_legendre, midpoint_angles};
use crate::specfun::{ln_factorial, ln_gamma};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Node counts for the factorized quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub n_radial: usize,
    pub n_angular: usize,
}

impl QuadratureSpec {
    /// Defaults with comfortable margin over the exactness thresholds.
    pub fn for_order(order: usize) -> Self {
        Self {
            n_radial: order + 48,
            n_angular: (4 * order).max(256),
        }
    }

    fn validate(&self, order: usize) -> Result<()> {
        if self.n_radial < order + 8 {
            return Err(CsqError::Domain(format!(
                "quadrature: n_radial {} too small for order {order} (need >= order + 8)",
                self.n_radial
            )));
        }
        if self.n_angular < 4 * order {
            return Err(CsqError::Domain(format!(
                "quadrature: n_angular {} too small for order {order} (need >= 4*order)",
                self.n_angular
            )));
        }
        Ok(())
    }
}

/// ln of the normalized radial factor w_k·u_k^s / Γ(s+1); summing the
/// exponentials over k gives 1 for any s, so terms never overflow.
fn radial_table(nodes: &[f64], ln_weights: &[f64], s2_max: usize) -> Vec<Vec<f64>> {
    nodes
        .iter()
        .zip(ln_weights)
        .map(|(&u, &lw)| {
            let lu = u.ln();
            (0..=s2_max)
                .map(|s2| {
                    let s = s2 as f64 * 0.5;
                    (lw + s * lu - ln_gamma(s + 1.0).unwrap()).exp()
                })
                .collect()
        })
        .collect()
}

/// Γ((n+n')/2 + 1)/√(n!·n'!) in log space; always ≤ 1.
fn entry_prefactor(n: usize, np: usize) -> f64 {
    let s = (n + np) as f64 * 0.5;
    (ln_gamma(s + 1.0).unwrap() - 0.5 * ln_factorial(n) - 0.5 * ln_factorial(np)).exp()
}

fn finish_operator(matrix: ComplexMatrix, provenance: String) -> FockOperator {
    let scale = matrix.max_abs().max(1e-300);
    let hermitian = matrix.hermiticity_residual() <= 1e-10 * scale;
    FockOperator::new(matrix, hermitian, provenance)
}

/// Quantize an arbitrary phase-space function by factorized quadrature:
/// radial Gauss-Laguerre nodes, one angular DFT per node.
pub fn quantize_general<F>(f: F, order: usize, spec: &QuadratureSpec) -> Result<FockOperator>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if order == 0 {
        return Err(CsqError::Domain("quantize: order must be >= 1".into()));
    }
    spec.validate(order)?;
    let (nodes, ln_weights) = gauss_laguerre(spec.n_radial)?;
    let thetas = midpoint_angles(spec.n_angular);
    let m_span = order - 1;
    let m_grid = spec.n_angular;

    // Ĝ_k[m] = (1/M) Σ_j f(√u_k e^{iθ_j}) e^{imθ_j},  m = -m_span..=m_span
    let dfts: Vec<Vec<Complex64>> = (0..spec.n_radial)
        .into_par_iter()
        .map(|k| {
            let radius = nodes[k].sqrt();
            let mut out = vec![czero(); 2 * m_span + 1];
            for &theta in &thetas {
                let val = f(Complex64::from_polar(radius, theta));
                let w = Complex64::from_polar(1.0, theta);
                let mut pw = Complex64::new(1.0, 0.0);
                for m in 0..=m_span {
                    out[m_span + m] += val * pw;
                    if m > 0 {
                        out[m_span - m] += val * pw.conj();
                    }
                    pw *= w;
                }
            }
            let inv = 1.0 / m_grid as f64;
            for v in &mut out {
                *v *= inv;
            }
            out
        })
        .collect();

    let table = radial_table(&nodes, &ln_weights, 2 * m_span);
    let mut matrix = ComplexMatrix::zeros(order);
    for n in 0..order {
        for np in 0..order {
            let mut acc = czero();
            let m_idx = (m_span + n) - np;
            for k in 0..spec.n_radial {
                acc += table[k][n + np] * dfts[k][m_idx];
            }
            matrix[(n, np)] = acc * entry_prefactor(n, np);
        }
    }
    Ok(finish_operator(
        matrix,
        format!(
            "quantize_general(order={order}, n_radial={}, n_angular={})",
            spec.n_radial, spec.n_angular
        ),
    ))
}

/// Quantize a radial function h(u), u = |z|²: the result is diagonal with
/// entries (1/n!)∫ e^{-u} uⁿ h(u) du.
pub fn quantize_isotropic<H>(h: H, order: usize, n_radial: usize) -> Result<FockOperator>
where
    H: Fn(f64) -> f64,
{
    if order == 0 {
        return Err(CsqError::Domain("quantize: order must be >= 1".into()));
    }
    if n_radial < order + 8 {
        return Err(CsqError::Domain(format!(
            "quantize_isotropic: n_radial {n_radial} too small for order {order}"
        )));
    }
    let (nodes, ln_weights) = gauss_laguerre(n_radial)?;
    let values: Vec<f64> = nodes.iter().map(|&u| h(u)).collect();
    let mut matrix = ComplexMatrix::zeros(order);
    for n in 0..order {
        let lnf = ln_factorial(n);
        let mut acc = 0.0f64;
        for k in 0..n_radial {
            acc += (ln_weights[k] + n as f64 * nodes[k].ln() - lnf).exp() * values[k];
        }
        matrix[(n, n)] = Complex64::new(acc, 0.0);
    }
    Ok(finish_operator(
        matrix,
        format!("quantize_isotropic(order={order}, n_radial={n_radial})"),
    ))
}

/// Fourier coefficients c_m = (1/2π)∫ g(θ) e^{-imθ} dθ, m = -m_max..=m_max.
#[derive(Debug, Clone)]
pub struct FourierCoeffs {
    pub m_max: usize,
    coeffs: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn from_vec(m_max: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), 2 * m_max + 1);
        Self { m_max, coeffs }
    }

    pub fn get(&self, m: i64) -> Complex64 {
        if m.unsigned_abs() as usize > self.m_max {
            czero()
        } else {
            self.coeffs[(m + self.m_max as i64) as usize]
        }
    }
}

/// Angular integration strategy for [`fourier_coeffs`].
#[derive(Debug, Clone, Copy)]
pub enum GridRefinement {
    /// One midpoint grid; converges spectrally for smooth periodic g.
    Single { grid: usize },
    /// Midpoint grids at M, 2M, 4M combined to cancel the 1/M² and 1/M⁴
    /// error terms a jump discontinuity leaves behind.
    Extrapolated { base_grid: usize },
}

fn midpoint_fourier<G>(g: &G, m_max: usize, grid: usize) -> Vec<Complex64>
where
    G: Fn(f64) -> f64,
{
    let thetas = midpoint_angles(grid);
    let mut out = vec![czero(); 2 * m_max + 1];
    for &theta in &thetas {
        let val = g(theta);
        // e^{-imθ} accumulated by running powers
        let w = Complex64::from_polar(1.0, -theta);
        let mut pw = Complex64::new(1.0, 0.0);
        for m in 0..=m_max {
            out[m_max + m] += val * pw;
            if m > 0 {
                out[m_max - m] += val * pw.conj();
            }
            pw *= w;
        }
    }
    let inv = 1.0 / grid as f64;
    for v in &mut out {
        *v *= inv;
    }
    out
}

/// Fourier coefficients of a bounded 2π-periodic function.
pub fn fourier_coeffs<G>(g: G, m_max: usize, method: GridRefinement) -> Result<FourierCoeffs>
where
    G: Fn(f64) -> f64,
{
    let coeffs = match method {
        GridRefinement::Single { grid } => {
            if grid < 2 * m_max + 2 {
                return Err(CsqError::Domain(format!(
                    "fourier_coeffs: grid {grid} under the aliasing bound for m_max {m_max}"
                )));
            }
            midpoint_fourier(&g, m_max, grid)
        }
        GridRefinement::Extrapolated { base_grid } => {
            if base_grid < 2 * m_max + 2 {
                return Err(CsqError::Domain(format!(
                    "fourier_coeffs: base grid {base_grid} under the aliasing bound for m_max {m_max}"
                )));
            }
            let a1 = midpoint_fourier(&g, m_max, base_grid);
            let a2 = midpoint_fourier(&g, m_max, 2 * base_grid);
            let a4 = midpoint_fourier(&g, m_max, 4 * base_grid);
            (0..2 * m_max + 1)
                .map(|i| {
                    let b1 = (a2[i] * 4.0 - a1[i]) / 3.0;
                    let b2 = (a4[i] * 4.0 - a2[i]) / 3.0;
                    (b2 * 16.0 - b1) / 15.0
                })
                .collect()
        }
    };
    Ok(FourierCoeffs::from_vec(m_max, coeffs))
}

/// Locate poles of g on [0, 2π) by bisecting sign changes of 1/g.
/// A sign change of 1/g that lands where |g| stays small is a zero crossing
/// of g, not a pole, and is discarded.
fn detect_poles<G>(g: &G) -> Vec<f64>
where
    G: Fn(f64) -> f64,
{
    let n = 8192;
    let thetas = midpoint_angles(n);
    let recip: Vec<f64> = thetas
        .iter()
        .map(|&t| {
            let v = g(t);
            if v == 0.0 {
                f64::INFINITY
            } else {
                1.0 / v
            }
        })
        .collect();
    let step = TWO_PI / n as f64;
    let mut poles = Vec::new();
    for j in 0..n {
        let a = recip[j];
        let b = recip[(j + 1) % n];
        if !(a.is_finite() && b.is_finite()) || a * b >= 0.0 {
            continue;
        }
        let mut lo = thetas[j];
        let mut hi = thetas[j] + step;
        let sign_lo = a.signum();
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let v = g(mid);
            let s = if v == 0.0 { 0.0 } else { (1.0 / v).signum() };
            if s == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = 0.5 * (lo + hi);
        if g(p).abs() > 1e6 {
            poles.push(p.rem_euclid(TWO_PI));
        }
    }
    poles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    poles
}

fn composite_gl<F>(f: &F, a: f64, b: f64, nseg: usize, rule: &[(f64, f64)]) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let mut acc = czero();
    let h = (b - a) / nseg as f64;
    for seg in 0..nseg {
        let lo = a + seg as f64 * h;
        let half = 0.5 * h;
        let mid = lo + half;
        for &(x, w) in rule {
            acc += f(mid + half * x) * (half * w);
        }
    }
    acc
}

/// Principal-value Fourier coefficients for g with simple poles.
///
/// Each coefficient integrates over the pole-free arcs left after a
/// symmetric exclusion of radius ε around every detected pole, at four
/// shrinking values of ε; Richardson steps then cancel the ε, ε³ and ε⁵
/// error terms of the symmetric exclusion.
pub fn fourier_coeffs_pv<G>(g: G, m_max: usize) -> Result<FourierCoeffs>
where
    G: Fn(f64) -> f64 + Sync,
{
    let poles = detect_poles(&g);
    if poles.is_empty() {
        // no poles: a plain composite rule over the full circle suffices
        let rule: Vec<(f64, f64)> = {
            let (n, w) = gauss_legendre(20)?;
            n.into_iter().zip(w).collect()
        };
        let coeffs: Vec<Complex64> = (-(m_max as i64)..=m_max as i64)
            .map(|m| {
                let integrand = |t: f64| {
                    Complex64::from_polar(1.0, -(m as f64) * t) * (g(t) / TWO_PI)
                };
                composite_gl(&integrand, 0.0, TWO_PI, 3 * m.unsigned_abs() as usize + 12, &rule)
            })
            .collect();
        return Ok(FourierCoeffs::from_vec(m_max, coeffs));
    }

    // minimal half-gap between consecutive poles bounds ε from above
    let mut min_gap = f64::INFINITY;
    for i in 0..poles.len() {
        let next = if i + 1 < poles.len() {
            poles[i + 1]
        } else {
            poles[0] + TWO_PI
        };
        min_gap = min_gap.min(next - poles[i]);
    }
    let rule: Vec<(f64, f64)> = {
        let (n, w) = gauss_legendre(20)?;
        n.into_iter().zip(w).collect()
    };

    let ms: Vec<i64> = (-(m_max as i64)..=m_max as i64).collect();
    let coeffs: Vec<Complex64> = ms
        .par_iter()
        .map(|&m| {
            let integrand = |t: f64| {
                Complex64::from_polar(1.0, -(m as f64) * t) * (g(t) / TWO_PI)
            };
            let eps0 = (1.0f64 / 32.0)
                .min(0.25 / (m.unsigned_abs().max(1) as f64))
                .min(min_gap / 8.0);
            let nseg = 3 * m.unsigned_abs() as usize + 12;
            let mut levels = [czero(); 4];
            for (lvl, item) in levels.iter_mut().enumerate() {
                let eps = eps0 / (1 << lvl) as f64;
                let mut total = czero();
                for i in 0..poles.len() {
                    let a = poles[i] + eps;
                    let b = if i + 1 < poles.len() {
                        poles[i + 1]
                    } else {
                        poles[0] + TWO_PI
                    } - eps;
                    total += composite_gl(&integrand, a, b, nseg, &rule);
                }
                *item = total;
            }
            let r: Vec<Complex64> = (0..3)
                .map(|k| levels[k + 1] * 2.0 - levels[k])
                .collect();
            let s: Vec<Complex64> = (0..2).map(|k| (r[k + 1] * 8.0 - r[k]) / 7.0).collect();
            (s[1] * 32.0 - s[0]) / 31.0
        })
        .collect();
    Ok(FourierCoeffs::from_vec(m_max, coeffs))
}

/// Quantize a pure angular function from its Fourier coefficients:
/// (A)_{n n'} = Γ((n+n')/2 + 1)/√(n! n'!) · c_{n'-n}.
pub fn quantize_angular(coeffs: &FourierCoeffs, order: usize) -> Result<FockOperator> {
    if order == 0 {
        return Err(CsqError::Domain("quantize: order must be >= 1".into()));
    }
    if coeffs.m_max + 1 < order {
        return Err(CsqError::Domain(format!(
            "quantize_angular: m_max {} below order-1 = {}",
            coeffs.m_max,
            order - 1
        )));
    }
    let mut matrix = ComplexMatrix::zeros(order);
    for n in 0..order {
        for np in 0..order {
            let c = coeffs.get(np as i64 - n as i64);
            matrix[(n, np)] = c * entry_prefactor(n, np);
        }
    }
    Ok(finish_operator(
        matrix,
        format!("quantize_angular(order={order}, m_max={})", coeffs.m_max),
    ))
}

/// Quantization of z^p z̄^q in closed form: the only nonzero entries sit on
/// the diagonal stripe n' = n + p - q and equal (n+p)!/√(n! n'!).
pub fn quantize_monomial(p: u32, q: u32, order: usize) -> Result<FockOperator> {
    if order == 0 {
        return Err(CsqError::Domain("quantize: order must be >= 1".into()));
    }
    let mut matrix = ComplexMatrix::zeros(order);
    for n in 0..order {
        let np = n as i64 + p as i64 - q as i64;
        if np < 0 || np >= order as i64 {
            continue;
        }
        let np = np as usize;
        let ln_entry =
            ln_factorial(n + p as usize) - 0.5 * ln_factorial(n) - 0.5 * ln_factorial(np);
        matrix[(n, np)] = Complex64::new(ln_entry.exp(), 0.0);
    }
    Ok(finish_operator(
        matrix,
        format!("quantize_monomial(p={p}, q={q}, order={order})"),
    ))
}

/// Operator for the angle function θ (sawtooth on [0, 2π)):
/// π on the diagonal, i·Γ((n+n')/2+1)/(√(n!n'!)(n'-n)) off it.
pub fn build_angle_operator(order: usize) -> Result<FockOperator> {
    if order == 0 {
        return Err(CsqError::Domain("build: order must be >= 1".into()));
    }
    let mut matrix = ComplexMatrix::zeros(order);
    for n in 0..order {
        for np in 0..order {
            matrix[(n, np)] = if n == np {
                Complex64::new(std::f64::consts::PI, 0.0)
            } else {
                let pref = entry_prefactor(n, np);
                Complex64::new(0.0, pref / (np as f64 - n as f64))
            };
        }
    }
    Ok(FockOperator::new(
        matrix,
        true,
        format!("angle(order={order})"),
    ))
}

/// Hermitian operator with entries ±i·(n+k)!/√(n!(n+2k)!) on the even
/// stripes n' = n ± 2k; the quantization of the principal value of -cot θ.
pub fn build_time_operator(order: usize) -> Result<FockOperator> {
    if order == 0 {
        return Err(CsqError::Domain("build: order must be >= 1".into()));
    }
    let mut matrix = ComplexMatrix::zeros(order);
    for n in 0..order {
        let mut k = 1usize;
        while n + 2 * k < order {
            let ln_entry = ln_factorial(n + k)
                - 0.5 * ln_factorial(n)
                - 0.5 * ln_factorial(n + 2 * k);
            let v = ln_entry.exp();
            matrix[(n, n + 2 * k)] = Complex64::new(0.0, v);
            matrix[(n + 2 * k, n)] = Complex64::new(0.0, -v);
            k += 1;
        }
    }
    Ok(FockOperator::new(
        matrix,
        true,
        format!("time(order={order})"),
    ))
}

/// Hamiltonian with diagonal n/2 and stripe entries -√((n+1)(n+2))/4 at
/// n' = n ± 2; its lower symbol is exactly r² sin²θ.
pub fn build_free_hamiltonian(order: usize) -> Result<FockOperator> {
    if order == 0 {
        return Err(CsqError::Domain("build: order must be >= 1".into()));
    }
    let mut matrix = ComplexMatrix::zeros(order);
    for n in 0..order {
        matrix[(n, n)] = Complex64::new(n as f64 / 2.0, 0.0);
        if n + 2 < order {
            let v = -((n as f64 + 1.0) * (n as f64 + 2.0)).sqrt() / 4.0;
            matrix[(n, n + 2)] = Complex64::new(v, 0.0);
            matrix[(n + 2, n)] = Complex64::new(v, 0.0);
        }
    }
    Ok(FockOperator::new(
        matrix,
        true,
        format!("free_hamiltonian(order={order})"),
    ))
}

/// Quantization of |z|² rescaled by ħ: diag(ħ(n+1)).
pub fn build_harmonic_hamiltonian(order: usize, hbar: f64) -> Result<FockOperator> {
    if order == 0 {
        return Err(CsqError::Domain("build: order must be >= 1".into()));
    }
    if hbar <= 0.0 {
        return Err(CsqError::Domain(format!("hbar must be > 0, got {hbar}")));
    }
    let mut matrix = ComplexMatrix::zeros(order);
    for n in 0..order {
        matrix[(n, n)] = Complex64::new(hbar * (n as f64 + 1.0), 0.0);
    }
    Ok(FockOperator::new(
        matrix,
        true,
        format!("harmonic(order={order}, hbar={hbar})"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn op_dev(a: &FockOperator, b: &ComplexMatrix) -> f64 {
        a.matrix.sub(b).unwrap().max_abs()
    }

    #[test]
    fn general_reproduces_ladder_operators() {
        let order = 20;
        let spec = QuadratureSpec::for_order(order);
        let a_z = quantize_general(|z| z, order, &spec).unwrap();
        assert!(op_dev(&a_z, &crate::fock::FockOperator::lowering(order).matrix) < 1e-10);

        let a_zbar = quantize_general(|z| z.conj(), order, &spec).unwrap();
        assert!(op_dev(&a_zbar, &crate::fock::FockOperator::raising(order).matrix) < 1e-10);

        let a_q = quantize_general(|z| Complex64::new(SQRT2 * z.re, 0.0), order, &spec).unwrap();
        assert!(op_dev(&a_q, &crate::fock::FockOperator::position(order).matrix) < 1e-10);
        assert!(a_q.hermitian);

        let a_p = quantize_general(|z| Complex64::new(SQRT2 * z.im, 0.0), order, &spec).unwrap();
        assert!(op_dev(&a_p, &crate::fock::FockOperator::momentum(order).matrix) < 1e-10);
    }

    #[test]
    fn general_on_kinetic_symbol_offsets_the_builder_by_half() {
        // quantizing r²sin²θ = (Im z)² lands exactly I/2 above the builder
        let order = 40;
        let spec = QuadratureSpec::for_order(order);
        let honest =
            quantize_general(|z| Complex64::new(z.im * z.im, 0.0), order, &spec).unwrap();
        let built = build_free_hamiltonian(order).unwrap();
        let shifted = built
            .matrix
            .add(&ComplexMatrix::identity(order).scale(Complex64::new(0.5, 0.0)))
            .unwrap();
        let dev = op_dev(&honest, &shifted);
        assert!(dev < 1e-10, "offset deviation {dev}");
    }

    #[test]
    fn isotropic_gamma_transform_closed_forms() {
        // h(u) = u gives diag(n+1); h(u) = e^{-u/2} gives diag (2/3)^{n+1}
        let order = 60;
        let lin = quantize_isotropic(|u| u, order, order + 48).unwrap();
        for n in 0..order {
            assert_abs_diff_eq!(lin.matrix[(n, n)].re, n as f64 + 1.0, epsilon = 1e-10);
        }
        let gauss = quantize_isotropic(|u| (-0.5 * u).exp(), order, order + 48).unwrap();
        for n in 0..order {
            let want = (2.0f64 / 3.0).powi(n as i32 + 1);
            assert_abs_diff_eq!(gauss.matrix[(n, n)].re, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn monomial_closed_forms() {
        let order = 15;
        assert!(op_dev(
            &quantize_monomial(1, 0, order).unwrap(),
            &crate::fock::FockOperator::lowering(order).matrix
        ) < 1e-13);
        assert!(op_dev(
            &quantize_monomial(0, 1, order).unwrap(),
            &crate::fock::FockOperator::raising(order).matrix
        ) < 1e-13);

        let n_op = quantize_monomial(1, 1, order).unwrap();
        for n in 0..order {
            assert_abs_diff_eq!(n_op.matrix[(n, n)].re, n as f64 + 1.0, epsilon = 1e-11);
        }

        let a = crate::fock::FockOperator::lowering(order).matrix;
        let a2 = a.matmul(&a).unwrap();
        // a² loses nothing to truncation on the surviving stripe
        let m20 = quantize_monomial(2, 0, order).unwrap();
        for n in 0..order - 2 {
            assert!((m20.matrix[(n, n + 2)] - a2[(n, n + 2)]).norm() < 1e-11);
        }
    }

    #[test]
    fn monomial_matches_quadrature() {
        let order = 15;
        let spec = QuadratureSpec::for_order(order);
        let closed = quantize_monomial(3, 2, order).unwrap();
        let quad = quantize_general(|z| z.powu(3) * z.conj().powu(2), order, &spec).unwrap();
        assert!(op_dev(&closed, &quad.matrix) < 1e-9);
    }

    #[test]
    fn fourier_smooth_harmonics() {
        let fc = fourier_coeffs(|t| t.cos(), 8, GridRefinement::Single { grid: 256 }).unwrap();
        assert!((fc.get(1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((fc.get(-1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!(fc.get(0).norm() < 1e-14);
        assert!(fc.get(3).norm() < 1e-14);

        let fs = fourier_coeffs(|t| (3.0 * t).sin(), 8, GridRefinement::Single { grid: 256 }).unwrap();
        assert!((fs.get(3) - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        assert!((fs.get(-3) - Complex64::new(0.0, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn fourier_sawtooth_extrapolated() {
        let fc = fourier_coeffs(|t| t, 60, GridRefinement::Extrapolated { base_grid: 2048 })
            .unwrap();
        assert!((fc.get(0) - Complex64::new(std::f64::consts::PI, 0.0)).norm() < 1e-12);
        for m in 1..=60i64 {
            let want = Complex64::new(0.0, 1.0 / m as f64);
            assert!(
                (fc.get(m) - want).norm() < 1e-12,
                "m={m}: {:?}",
                fc.get(m)
            );
            assert!((fc.get(-m) + want).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_pv_cotangent_pattern() {
        // even m: ∓i by sign of m; odd m and m = 0: zero
        let fc = fourier_coeffs_pv(|t| t.cos() / t.sin(), 30).unwrap();
        for m in -30i64..=30 {
            let want = if m != 0 && m % 2 == 0 {
                Complex64::new(0.0, if m > 0 { -1.0 } else { 1.0 })
            } else {
                czero()
            };
            assert!(
                (fc.get(m) - want).norm() < 1e-9,
                "m={m}: {:?}",
                fc.get(m)
            );
        }
    }

    #[test]
    fn pv_without_poles_reduces_to_plain_integral() {
        let fc = fourier_coeffs_pv(|t| t.cos(), 5).unwrap();
        assert!((fc.get(1) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!(fc.get(2).norm() < 1e-12);
    }

    #[test]
    fn angle_operator_two_paths_agree() {
        let order = 40;
        let fc = fourier_coeffs(|t| t, order - 1, GridRefinement::Extrapolated { base_grid: 2048 })
            .unwrap();
        let quad = quantize_angular(&fc, order).unwrap();
        let built = build_angle_operator(order).unwrap();
        let dev = op_dev(&quad, &built.matrix);
        assert!(dev < 1e-9, "angle two-path deviation {dev}");
    }

    #[test]
    fn time_operator_is_minus_quantized_cotangent() {
        let order = 24;
        let fc = fourier_coeffs_pv(|t| t.cos() / t.sin(), order - 1).unwrap();
        let quad = quantize_angular(&fc, order).unwrap();
        let built = build_time_operator(order).unwrap();
        let dev = op_dev(&quad, &built.matrix.scale(Complex64::new(-1.0, 0.0)));
        assert!(dev < 1e-7, "sign-flip deviation {dev}");
    }

    #[test]
    fn angle_operator_entry_values() {
        let op = build_angle_operator(5).unwrap();
        // (0,1): i·Γ(3/2) = i·0.886226925452758
        assert!((op.matrix[(0, 1)] - Complex64::new(0.0, 0.886_226_925_452_758_01)).norm() < 1e-14);
        assert!((op.matrix[(1, 0)] - Complex64::new(0.0, -0.886_226_925_452_758_01)).norm() < 1e-14);
        assert_eq!(op.matrix[(2, 2)].re, std::f64::consts::PI);
        assert_eq!(op.matrix.hermiticity_residual(), 0.0);
    }

    #[test]
    fn time_operator_entry_values() {
        let op = build_time_operator(6).unwrap();
        // (0,2): +i/√2, (2,0): -i/√2
        assert!((op.matrix[(0, 2)] - Complex64::new(0.0, 1.0 / SQRT2)).norm() < 1e-15);
        assert!((op.matrix[(2, 0)] - Complex64::new(0.0, -1.0 / SQRT2)).norm() < 1e-15);
        // odd stripes vanish
        assert_eq!(op.matrix[(0, 1)], czero());
        assert_eq!(op.matrix[(0, 3)], czero());
        assert_eq!(op.matrix.hermiticity_residual(), 0.0);
    }

    #[test]
    fn free_hamiltonian_entries() {
        let op = build_free_hamiltonian(6).unwrap();
        assert_eq!(op.matrix[(3, 3)].re, 1.5);
        assert_abs_diff_eq!(op.matrix[(0, 2)].re, -SQRT2 / 4.0, epsilon = 1e-15);
        assert_eq!(op.matrix.hermiticity_residual(), 0.0);
    }

    #[test]
    fn harmonic_hamiltonian_diag() {
        let op = build_harmonic_hamiltonian(8, 0.5).unwrap();
        for n in 0..8 {
            assert_eq!(op.matrix[(n, n)].re, 0.5 * (n as f64 + 1.0));
        }
        assert!(build_harmonic_hamiltonian(8, 0.0).is_err());
    }

    #[test]
    fn bounded_symbol_bounds_the_norm() {
        // |cos θ| ≤ 1 forces the operator norm under 1
        let order = 16;
        let spec = QuadratureSpec::for_order(order);
        let op = quantize_general(
            |z| Complex64::new(z.arg().cos(), 0.0),
            order,
            &spec,
        )
        .unwrap();
        let norm = spectral_norm(&op.matrix).unwrap();
        assert!(norm <= 1.0 + 1e-10, "norm {norm}");
    }

    #[test]
    fn quadrature_spec_guardrails() {
        assert!(QuadratureSpec { n_radial: 10, n_angular: 256 }
            .validate(20)
            .is_err());
        assert!(QuadratureSpec { n_radial: 68, n_angular: 20 }
            .validate(20)
            .is_err());
        assert!(QuadratureSpec::for_order(20).validate(20).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn isotropic_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let order = 8;
            let h1 = |u: f64| u;
            let h2 = |u: f64| (-u).exp();
            let lhs = quantize_isotropic(|u| a * h1(u) + b * h2(u), order, 60).unwrap();
            let rhs = quantize_isotropic(h1, order, 60).unwrap().matrix
                .scale(Complex64::new(a, 0.0))
                .add(&quantize_isotropic(h2, order, 60).unwrap().matrix
                    .scale(Complex64::new(b, 0.0)))
                .unwrap();
            prop_assert!(lhs.matrix.sub(&rhs).unwrap().max_abs() < 1e-12);
        }

        #[test]
        fn real_symbols_quantize_hermitian(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0) {
            let order = 8;
            let spec = QuadratureSpec::for_order(order);
            let op = quantize_general(
                |z| {
                    let t = z.arg();
                    Complex64::new(c1 * t.cos() + c2 * (2.0 * t).sin() + z.norm_sqr() * 0.1, 0.0)
                },
                order,
                &spec,
            ).unwrap();
            prop_assert!(op.hermitian);
            prop_assert!(op.matrix.hermiticity_residual() < 1e-10 * op.matrix.max_abs().max(1.0));
        }
    }
}
