//! Dense complex matrices and a Hermitian eigensolver.
//!
//! Order ≤ 200 truncations make O(n³) dense algebra trivial, so storage is a
//! flat row-major `Vec<Complex64>` and the eigensolver is a cyclic complex
//! Jacobi iteration with a deterministic sweep order (bit-reproducible runs).
//! Anti-Hermitian matrices are handled by diagonalizing i·A; general
//! nonsymmetric eigenproblems are deliberately out of scope.

use num_complex::Complex64;

use crate::error::{CsqError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be >= 1");
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    fn check_same_dim(&self, other: &Self, op: &str) -> Result<()> {
        if self.dim != other.dim {
            return Err(CsqError::DimMismatch(format!(
                "{op}: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "add")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "sub")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "matmul")?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &other.entries[k * n..(k + 1) * n];
                let orow = &mut out.entries[i * n..(i + 1) * n];
                for j in 0..n {
                    orow[j] += aik * brow[j];
                }
            }
        }
        Ok(out)
    }

    /// AB - BA.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.sub(&ba)
    }

    /// Top-left block truncation to `new_dim`.
    pub fn crop(&self, new_dim: usize) -> Self {
        assert!(new_dim >= 1 && new_dim <= self.dim);
        Self::from_fn(new_dim, |i, j| self[(i, j)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// max |A - A†| entry; 0 for an exactly Hermitian matrix.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

#[derive(Debug, Clone)]
pub struct EigenReport {
    /// Ascending real spectrum.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: Option<ComplexMatrix>,
    /// max_k ‖A v_k - λ_k v_k‖₂ against the input matrix.
    pub residual: f64,
}

const MAX_JACOBI_SWEEPS: usize = 60;

/// Full spectrum of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The caller must supply a matrix that is Hermitian to 1e-10 of its largest
/// entry; the iteration then runs on the symmetrized part.  Row-major sweep
/// order is fixed, so repeated runs give identical bits.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<EigenReport> {
    let n = a.dim();
    let scale = a.max_abs();
    let herm_res = a.hermiticity_residual();
    let tol = 1e-10 * scale.max(1e-300);
    if herm_res > tol {
        return Err(CsqError::NotHermitian {
            residual: herm_res,
            tol,
        });
    }

    // work on the exactly Hermitian average
    let mut m = ComplexMatrix::from_fn(n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let fro = m.fro_norm();
    let off_target = 1e-14 * fro.max(1e-300);

    let mut converged = fro == 0.0 || n == 1;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        if converged {
            break;
        }
        let mut off2 = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off2 += m[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off2).sqrt() <= off_target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        // one final check: the sweep cap only matters if we are still far off
        let mut off2 = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off2 += m[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off2).sqrt() > off_target * 10.0 {
            return Err(CsqError::NonConvergence(format!(
                "Jacobi: off-diagonal norm {:.3e} after {MAX_JACOBI_SWEEPS} sweeps",
                (2.0 * off2).sqrt()
            )));
        }
    }

    // sort ascending, permuting eigenvector columns alongside
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);

    // residual against the original matrix
    let mut residual = 0.0f64;
    for (k, &lam) in values.iter().enumerate() {
        let mut norm2 = 0.0f64;
        for i in 0..n {
            let mut av = Complex64::new(0.0, 0.0);
            for j in 0..n {
                av += a[(i, j)] * vectors[(j, k)];
            }
            norm2 += (av - lam * vectors[(i, k)]).norm_sqr();
        }
        residual = residual.max(norm2.sqrt());
    }

    Ok(EigenReport {
        values,
        vectors: Some(vectors),
        residual,
    })
}

/// One Jacobi rotation zeroing the (p, q) pivot of the Hermitian matrix `m`,
/// accumulating the transform into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let gamma = m[(p, q)];
    let g_abs = gamma.norm();
    if g_abs == 0.0 {
        return;
    }
    let phase = gamma / g_abs;
    let alpha = m[(p, p)].re;
    let beta = m[(q, q)].re;
    let tau = (beta - alpha) / (2.0 * g_abs);
    // smaller root of t² - 2τt - 1 = 0 zeroes the pivot with minimal rotation
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = phase * (t * c);

    let n = m.dim();
    // columns: col_p ← c·col_p + s̄·col_q, col_q ← -s·col_p + c·col_q
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = c * akp + s.conj() * akq;
        m[(k, q)] = -s * akp + c * akq;
    }
    // rows: row_p ← c·row_p + s·row_q, row_q ← -s̄·row_p + c·row_q
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = c * apk + s * aqk;
        m[(q, k)] = -s.conj() * apk + c * aqk;
    }
    // the pivot is zero by construction; enforce exactly
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..v.dim() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp + s.conj() * vkq;
        v[(k, q)] = -s * vkp + c * vkq;
    }
}

/// Largest singular value via the Hermitian spectrum of A†A.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    let ata = a.adjoint().matmul(a)?;
    // A†A is Hermitian up to roundoff; symmetrize before solving
    let report = hermitian_eigen(&ata)?;
    let max_eig = report.values.last().copied().unwrap_or(0.0).max(0.0);
    Ok(max_eig.sqrt())
}
