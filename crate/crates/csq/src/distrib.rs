//! Distributional symbols and their exact quantization.
//!
//! Basis element U_{a,b} = ∂_z̄^a ∂_z^b δ²(z).  Pairing it with the coherent
//! projector under ∫ · |z⟩⟨z| d²z gives the finite matrix
//!
//!   Σ_{n = max(0, b-a)}^{b} (-1)^{n+a} a! b! / ((b-n)! √(n! n'!)) |n⟩⟨n'| ,
//!
//! with n' = n + a - b.  Everything in this module is triangular algebra
//! over that closed form, so quantize/dequantize invert each other exactly
//! (up to float roundoff) with no quadrature anywhere.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{CsqError, Result};
use crate::fock::FockOperator;
use crate::linalg::ComplexMatrix;
use crate::specfun::ln_factorial;

/// Integration convention carried by a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// ∫ T(z) |z⟩⟨z| d²z
    Plain,
    /// ∫ T(z) |z⟩⟨z| d²z/π
    OverPi,
}

/// Finite combination Σ λ_{ab} U_{a,b}, keyed by (a, b) in a sorted map so
/// iteration order (and thus all arithmetic) is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceDistribution {
    pub terms: BTreeMap<(u32, u32), Complex64>,
    pub measure: Measure,
}

impl PhaseSpaceDistribution {
    pub fn new(measure: Measure) -> Self {
        Self {
            terms: BTreeMap::new(),
            measure,
        }
    }

    pub fn delta(measure: Measure) -> Self {
        let mut d = Self::new(measure);
        d.add_term(0, 0, Complex64::new(1.0, 0.0));
        d
    }

    pub fn add_term(&mut self, a: u32, b: u32, coeff: Complex64) {
        let slot = self
            .terms
            .entry((a, b))
            .or_insert_with(|| Complex64::new(0.0, 0.0));
        *slot += coeff;
        if slot.norm() == 0.0 {
            self.terms.remove(&(a, b));
        }
    }

    /// Adjoint: keys flip (a, b) → (b, a) and coefficients conjugate,
    /// mirroring O → O† on the quantized side.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::new(self.measure);
        for (&(a, b), &c) in &self.terms {
            out.add_term(b, a, c.conj());
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::new(self.measure);
        for (&(a, b), &c) in &self.terms {
            out.add_term(a, b, c * factor);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.measure != other.measure {
            return Err(CsqError::Domain(
                "cannot add distributions carrying different measures".into(),
            ));
        }
        let mut out = self.clone();
        for (&(a, b), &c) in &other.terms {
            out.add_term(a, b, c);
        }
        Ok(out)
    }

    /// Largest derivative order appearing in any term.
    pub fn max_order(&self) -> u32 {
        self.terms
            .keys()
            .map(|&(a, b)| a.max(b))
            .max()
            .unwrap_or(0)
    }
}

/// Matrix of the quantized basis element U_{a,b} at the given truncation.
fn basis_matrix(a: u32, b: u32, order: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(order);
    let start = b.saturating_sub(a);
    for n in start..=b {
        let np = n + a - b; // n >= b - a keeps this nonnegative
        if (n as usize) >= order || (np as usize) >= order {
            continue;
        }
        let ln_mag = ln_factorial(a as usize) + ln_factorial(b as usize)
            - ln_factorial((b - n) as usize)
            - 0.5 * ln_factorial(n as usize)
            - 0.5 * ln_factorial(np as usize);
        let sign = if (n + a) % 2 == 0 { 1.0 } else { -1.0 };
        m[(n as usize, np as usize)] = Complex64::new(sign * ln_mag.exp(), 0.0);
    }
    m
}

/// Quantize a distribution at the given truncation order.
pub fn quantize_distribution(t: &PhaseSpaceDistribution, order: usize) -> Result<FockOperator> {
    if order == 0 {
        return Err(CsqError::Domain("quantize: order must be >= 1".into()));
    }
    let mut matrix = ComplexMatrix::zeros(order);
    let measure_factor = match t.measure {
        Measure::Plain => 1.0,
        Measure::OverPi => 1.0 / std::f64::consts::PI,
    };
    for (&(a, b), &coeff) in &t.terms {
        let basis = basis_matrix(a, b, order);
        let scaled = basis.scale(coeff * measure_factor);
        matrix = matrix.add(&scaled)?;
    }
    let scale = matrix.max_abs().max(1e-300);
    let hermitian = matrix.hermiticity_residual() <= 1e-12 * scale;
    Ok(FockOperator::new(
        matrix,
        hermitian,
        format!("quantize_distribution(order={order}, terms={})", t.terms.len()),
    ))
}

/// Distribution whose plain-measure quantization is exactly |r+s⟩⟨r|:
/// Σ_{p=0}^{r} √(r!(r+s)!) (-1)^s / (p!(s+p)!(r-p)!) · U_{p,p+s}.
pub fn oblique_projector_symbol(r: u32, s: u32) -> PhaseSpaceDistribution {
    let mut t = PhaseSpaceDistribution::new(Measure::Plain);
    let ln_pref = 0.5 * (ln_factorial(r as usize) + ln_factorial((r + s) as usize));
    let sign_s = if s % 2 == 0 { 1.0 } else { -1.0 };
    for p in 0..=r {
        let ln_c = ln_pref
            - ln_factorial(p as usize)
            - ln_factorial((s + p) as usize)
            - ln_factorial((r - p) as usize);
        t.add_term(p, p + s, Complex64::new(sign_s * ln_c.exp(), 0.0));
    }
    t
}

/// Distribution for an arbitrary matrix unit |m⟩⟨n| via the oblique family
/// and its adjoint.
pub fn matrix_unit_symbol(m: u32, n: u32) -> PhaseSpaceDistribution {
    if m >= n {
        oblique_projector_symbol(n, m - n)
    } else {
        oblique_projector_symbol(m, n - m).adjoint()
    }
}

/// Expand the top-left K×K block of an operator over the matrix-unit
/// symbols; quantizing the result reproduces that block exactly.
pub fn dequantize(op: &FockOperator, k: usize) -> Result<PhaseSpaceDistribution> {
    if k == 0 || k > op.order {
        return Err(CsqError::Domain(format!(
            "dequantize: block size {k} outside 1..={}",
            op.order
        )));
    }
    let mut t = PhaseSpaceDistribution::new(Measure::Plain);
    for m in 0..k {
        for n in 0..k {
            let coeff = op.matrix[(m, n)];
            if coeff.norm() == 0.0 {
                continue;
            }
            let unit = matrix_unit_symbol(m as u32, n as u32);
            for (&(a, b), &c) in &unit.terms {
                t.add_term(a, b, c * coeff);
            }
        }
    }
    Ok(t)
}

/// Star product: quantize both factors, multiply the operators, expand the
/// product back into the distribution basis.  `order` bounds the operator
/// workspace and must cover the derivative orders of both factors.
pub fn star_product(
    t1: &PhaseSpaceDistribution,
    t2: &PhaseSpaceDistribution,
    order: usize,
) -> Result<PhaseSpaceDistribution> {
    let needed = (t1.max_order().max(t2.max_order()) as usize) + 1;
    if order < needed {
        return Err(CsqError::Domain(format!(
            "star_product: order {order} below the derivative span {needed}"
        )));
    }
    let a = quantize_distribution(t1, order)?;
    let b = quantize_distribution(t2, order)?;
    let prod = a.matrix.matmul(&b.matrix)?;
    let op = FockOperator::new(prod, false, "star intermediate".to_string());
    dequantize(&op, order)
}
