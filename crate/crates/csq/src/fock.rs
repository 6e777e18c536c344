//! Number-basis operators and coherent vectors at a finite truncation order.
//!
//! An order-N operator acts on span{|0⟩..|N-1⟩}.  Truncation artifacts live
//! in the last row and column (e.g. a·a† gains a spurious zero in the corner
//! while a†·a stays exact), so tests and callers distinguish interior entries
//! from the boundary.

use num_complex::Complex64;

use crate::error::{CsqError, Result};
use crate::linalg::ComplexMatrix;
use crate::specfun::ln_factorial;

/// Coherent-vector overlap loss above this bound sets the `lossy` flag.
pub const COHERENT_LOSS_WARN: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct FockOperator {
    pub matrix: ComplexMatrix,
    pub order: usize,
    pub hermitian: bool,
    /// Human-readable note on how the matrix was produced.
    pub provenance: String,
}

impl FockOperator {
    pub fn new(matrix: ComplexMatrix, hermitian: bool, provenance: impl Into<String>) -> Self {
        let order = matrix.dim();
        Self {
            matrix,
            order,
            hermitian,
            provenance: provenance.into(),
        }
    }

    /// a: entries √(n+1) at (n, n+1).
    pub fn lowering(order: usize) -> Self {
        let m = ComplexMatrix::from_fn(order, |i, j| {
            if j == i + 1 {
                Complex64::new((j as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(m, false, format!("lowering(order={order})"))
    }

    /// a†: entries √(n+1) at (n+1, n).
    pub fn raising(order: usize) -> Self {
        let m = ComplexMatrix::from_fn(order, |i, j| {
            if i == j + 1 {
                Complex64::new((i as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(m, false, format!("raising(order={order})"))
    }

    /// N = diag(0, 1, .., order-1); equals a†·a exactly at every index.
    pub fn number(order: usize) -> Self {
        let m = ComplexMatrix::from_fn(order, |i, j| {
            if i == j {
                Complex64::new(i as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(m, true, format!("number(order={order})"))
    }

    pub fn identity(order: usize) -> Self {
        Self::new(
            ComplexMatrix::identity(order),
            true,
            format!("identity(order={order})"),
        )
    }

    /// Q = (a + a†)/√2.
    pub fn position(order: usize) -> Self {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let m = ComplexMatrix::from_fn(order, |i, j| {
            if j == i + 1 {
                Complex64::new((j as f64).sqrt() * inv_sqrt2, 0.0)
            } else if i == j + 1 {
                Complex64::new((i as f64).sqrt() * inv_sqrt2, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(m, true, format!("position(order={order})"))
    }

    /// P = (a - a†)/(i√2) = i(a† - a)/√2.
    pub fn momentum(order: usize) -> Self {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let m = ComplexMatrix::from_fn(order, |i, j| {
            if j == i + 1 {
                Complex64::new(0.0, -(j as f64).sqrt() * inv_sqrt2)
            } else if i == j + 1 {
                Complex64::new(0.0, (i as f64).sqrt() * inv_sqrt2)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(m, true, format!("momentum(order={order})"))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let m = self.matrix.commutator(&other.matrix)?;
        Ok(Self::new(
            m,
            false,
            format!("[{}, {}]", self.provenance, other.provenance),
        ))
    }

    pub fn apply(&self, vec: &[Complex64]) -> Result<Vec<Complex64>> {
        if vec.len() != self.order {
            return Err(CsqError::DimMismatch(format!(
                "apply: operator order {} vs vector length {}",
                self.order,
                vec.len()
            )));
        }
        let n = self.order;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let row = self.matrix.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += row[j] * vec[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// ⟨state|A|state⟩ with no renormalization of the truncated state.
    pub fn expectation(&self, state: &CoherentVector) -> Result<Complex64> {
        let applied = self.apply(&state.coeffs)?;
        Ok(state
            .coeffs
            .iter()
            .zip(&applied)
            .map(|(c, w)| c.conj() * w)
            .sum())
    }
}

/// Normalized coherent vector truncated to the first `order` components.
///
/// Components are assembled in log space, so |z| in the hundreds neither
/// overflows the numerator nor loses the small-n tail.
#[derive(Debug, Clone)]
pub struct CoherentVector {
    pub z: Complex64,
    pub coeffs: Vec<Complex64>,
    /// 1 - Σ|c_n|²: weight lost to the discarded tail.
    pub truncation_loss: f64,
    /// Set when the loss exceeds [`COHERENT_LOSS_WARN`].
    pub lossy: bool,
}

impl CoherentVector {
    pub fn new(z: Complex64, order: usize) -> Self {
        assert!(order >= 1);
        let r = z.norm();
        let phi = if r == 0.0 { 0.0 } else { z.arg() };
        let mut coeffs = Vec::with_capacity(order);
        let mut norm_sq = 0.0f64;
        for n in 0..order {
            let ln_mag = if r == 0.0 {
                if n == 0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                -0.5 * r * r + n as f64 * r.ln() - 0.5 * ln_factorial(n)
            };
            let mag = ln_mag.exp();
            let phase = n as f64 * phi;
            let c = Complex64::new(mag * phase.cos(), mag * phase.sin());
            norm_sq += mag * mag;
            coeffs.push(c);
        }
        let truncation_loss = (1.0 - norm_sq).max(0.0);
        Self {
            z,
            coeffs,
            truncation_loss,
            lossy: truncation_loss > COHERENT_LOSS_WARN,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// ⟨self|other⟩ over the shared truncation.
    pub fn braket(&self, other: &Self) -> Result<Complex64> {
        if self.order() != other.order() {
            return Err(CsqError::DimMismatch(format!(
                "braket: orders {} vs {}",
                self.order(),
                other.order()
            )));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}
