//! Commutator spectra and truncation diagnostics.
//!
//! The central object is C = [A_t, A_H] built at an enlarged size and then
//! cropped, so every retained entry agrees with the untruncated product
//! (the Hamiltonian couples indices at most two apart, hence padding by two
//! or more already makes the cropped block exact).  D = C + iI measures the
//! departure from the canonical commutator.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CsqError, Result};
use crate::fock::FockOperator;
use crate::linalg::{hermitian_eigen, spectral_norm, ComplexMatrix};
use crate::quantize::{build_angle_operator, build_free_hamiltonian, build_time_operator};
use crate::specfun::{ln_factorial, ln_gamma};
use crate::symbols::commutator_angle_number_symbol_series;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Least-squares line through ln|entry| against the column index:
/// |entry| ≈ amplitude · e^{rate·n}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
}

/// Per-order measurements.  Complex scalars are stored as (re, im) pairs so
/// the report serializes without a custom number type.
#[derive(Debug, Clone, Serialize)]
pub struct OrderRecord {
    pub order: usize,
    /// Indices below this bound are considered free of truncation effects.
    pub interior: usize,
    /// Diagonal of the commutator.
    pub diagonal: Vec<(f64, f64)>,
    /// Eigenvalues of i·(commutator), ascending.
    pub eigenvalues: Vec<f64>,
    /// Spectral norm of the study's residual operator (D for the time study,
    /// the commutator itself for the angle study).
    pub spectral_norm: f64,
    /// Trace of the residual operator.
    pub trace: (f64, f64),
    /// Study-specific worst-case residual: anti-Hermiticity of C for the
    /// time study, two-route disagreement for the angle study.
    pub residual_max: f64,
    /// Running Hilbert–Schmidt sums: (k, Σ_{m,n<k} |D_{mn}|²).
    pub hs_partial_sums: Vec<(usize, f64)>,
}

/// Lower-symbol samples of the angle-number commutator on an (r, θ) grid,
/// showing the drift toward i(1 − 2π·comb) as r grows.
#[derive(Debug, Clone, Serialize)]
pub struct PoissonGrid {
    pub r_values: Vec<f64>,
    pub theta: Vec<f64>,
    /// values[i][j] = Im symbol(r_values[i], theta[j])
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub orders: Vec<usize>,
    pub pad: usize,
    pub records: Vec<OrderRecord>,
    pub decay_fit: Option<DecayFit>,
    pub poisson_grid: Option<PoissonGrid>,
}

impl StudyReport {
    /// Orders strictly increasing and every stored number finite.
    pub fn validate(&self) -> Result<()> {
        if self.orders.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CsqError::Domain(
                "study orders must be strictly increasing".into(),
            ));
        }
        let mut finite = true;
        for r in &self.records {
            finite &= r.diagonal.iter().all(|&(re, im)| re.is_finite() && im.is_finite());
            finite &= r.eigenvalues.iter().all(|v| v.is_finite());
            finite &= r.spectral_norm.is_finite();
            finite &= r.trace.0.is_finite() && r.trace.1.is_finite();
            finite &= r.residual_max.is_finite();
            finite &= r.hs_partial_sums.iter().all(|&(_, v)| v.is_finite());
        }
        if !finite {
            return Err(CsqError::Domain("study report contains non-finite entries".into()));
        }
        Ok(())
    }
}

fn pair(c: Complex64) -> (f64, f64) {
    (c.re, c.im)
}

/// Σ |M_{mn}|² over the leading k×k blocks, k stepping by max(order/8, 1).
fn hs_partial_sums(m: &ComplexMatrix) -> Vec<(usize, f64)> {
    let n = m.dim();
    let step = (n / 8).max(1);
    let mut cuts: Vec<usize> = (1..=8).map(|i| (i * step).min(n)).collect();
    cuts.dedup();
    if *cuts.last().unwrap() != n {
        cuts.push(n);
    }
    let mut out = Vec::with_capacity(cuts.len());
    for &k in &cuts {
        let mut s = 0.0;
        for i in 0..k {
            for j in 0..k {
                s += m[(i, j)].norm_sqr();
            }
        }
        out.push((k, s));
    }
    out
}

/// The time-Hamiltonian commutator at the given order, built with padding so
/// every retained entry matches the untruncated product.
pub fn padded_time_commutator(order: usize, pad_k: usize) -> Result<FockOperator> {
    if order < 8 {
        return Err(CsqError::Domain("commutator study needs order >= 8".into()));
    }
    if pad_k < 2 {
        return Err(CsqError::Domain(
            "padding below 2 leaves cropped entries corrupted".into(),
        ));
    }
    let big = order + pad_k;
    let a_t = build_time_operator(big)?;
    let a_h = build_free_hamiltonian(big)?;
    let c = a_t.matrix.commutator(&a_h.matrix)?.crop(order);
    Ok(FockOperator::new(
        c,
        false,
        format!("[time, free-hamiltonian] order {order}, pad {pad_k}"),
    ))
}

/// Run the commutator diagnostics at each order: diagonal, spectrum of iC,
/// spectral norm and trace of D = C + iI, and Hilbert–Schmidt partial sums.
/// A decay fit of row 0 is attached when the largest order reaches past the
/// fit window.
pub fn time_commutator_study(orders: &[usize], pad_k: usize) -> Result<StudyReport> {
    if orders.is_empty() {
        return Err(CsqError::Domain("study needs at least one order".into()));
    }
    if orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CsqError::Domain("study orders must be strictly increasing".into()));
    }
    let mut records = Vec::with_capacity(orders.len());
    let mut last_c: Option<FockOperator> = None;
    for &n in orders {
        let c_op = padded_time_commutator(n, pad_k)?;
        let c = &c_op.matrix;

        let interior = n.saturating_sub(2 * pad_k);
        let diagonal: Vec<(f64, f64)> = (0..n).map(|i| pair(c[(i, i)])).collect();

        let ic = c.scale(I);
        let eig = hermitian_eigen(&ic)?;

        let d = c.add(&ComplexMatrix::identity(n).scale(I))?;
        let norm_d = spectral_norm(&d)?;
        let trace_d = d.trace();

        let anti_herm = {
            let sym = c.add(&c.adjoint())?.crop(interior.max(1));
            sym.max_abs()
        };

        records.push(OrderRecord {
            order: n,
            interior,
            diagonal,
            eigenvalues: eig.values,
            spectral_norm: norm_d,
            trace: pair(trace_d),
            residual_max: anti_herm,
            hs_partial_sums: hs_partial_sums(&d),
        });
        last_c = Some(c_op);
    }

    let decay_fit = match last_c {
        Some(ref c_op) if c_op.order > 60 => Some(offdiagonal_decay_check(c_op, 0)?),
        _ => None,
    };

    let report = StudyReport {
        orders: orders.to_vec(),
        pad: pad_k,
        records,
        decay_fit,
        poisson_grid: None,
    };
    report.validate()?;
    Ok(report)
}

/// Columns used by the decay fit: even indices from 20 (or just past the
/// row) up to 60, clipped to the matrix.
fn decay_window(order: usize, row: usize) -> Vec<usize> {
    let lo = 20usize.max(row + 2);
    let lo = lo + (lo % 2);
    let hi = 60usize.min(order.saturating_sub(1));
    (lo..=hi).step_by(2).collect()
}

/// Fit ln|⟨row|C|n⟩| over the even-column window and return (rate, amplitude).
pub fn offdiagonal_decay_check(c: &FockOperator, row: usize) -> Result<DecayFit> {
    let order = c.order;
    if row >= order / 2 {
        return Err(CsqError::Domain(format!(
            "decay row {row} must sit below half the order {order}"
        )));
    }
    let cols = decay_window(order, row);
    if cols.len() < 4 {
        return Err(CsqError::Domain(
            "decay fit window has fewer than 4 usable columns".into(),
        ));
    }
    let mut xs = Vec::with_capacity(cols.len());
    let mut ys = Vec::with_capacity(cols.len());
    for &n in &cols {
        let mag = c.matrix[(row, n)].norm();
        if mag == 0.0 {
            return Err(CsqError::Domain(format!(
                "row {row} vanishes at column {n}; nothing to fit"
            )));
        }
        xs.push(n as f64);
        ys.push(mag.ln());
    }
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(CsqError::NonConvergence("degenerate decay fit".into()));
    }
    let rate = (m * sxy - sx * sy) / denom;
    let intercept = (sy - rate * sx) / m;
    Ok(DecayFit {
        rate,
        amplitude: intercept.exp(),
    })
}

/// Reference envelope √((1+12n)·2^{-n}/√n) for the ground-row entries.
pub fn ground_row_envelope(n: usize) -> f64 {
    let nf = n as f64;
    ((1.0 + 12.0 * nf) * (-nf * std::f64::consts::LN_2).exp() / nf.sqrt()).sqrt()
}

/// Worst multiplicative deviation of |⟨0|C|n⟩| from the envelope over the
/// fit window, after absorbing one global constant (geometric mean).
pub fn ground_row_shape_deviation(c: &FockOperator) -> Result<f64> {
    let cols = decay_window(c.order, 0);
    if cols.len() < 4 {
        return Err(CsqError::Domain("shape window has fewer than 4 columns".into()));
    }
    let mut ratios = Vec::with_capacity(cols.len());
    for &n in &cols {
        let mag = c.matrix[(0, n)].norm();
        if mag == 0.0 {
            return Err(CsqError::Domain(format!("ground row vanishes at column {n}")));
        }
        ratios.push(mag / ground_row_envelope(n));
    }
    let geo = (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp();
    let mut worst = 1.0f64;
    for r in ratios {
        worst = worst.max(r / geo).max(geo / r);
    }
    Ok(worst)
}

/// Closed form of the angle-number commutator: zero diagonal and
/// i·Γ((n+n')/2+1)/√(n! n'!) off the diagonal.
pub fn angle_number_commutator_closed(order: usize) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(order);
    for n in 0..order {
        for np in 0..order {
            if n == np {
                continue;
            }
            let ln = ln_gamma((n + np) as f64 / 2.0 + 1.0)?
                - 0.5 * ln_factorial(n)
                - 0.5 * ln_factorial(np);
            m[(n, np)] = I * ln.exp();
        }
    }
    Ok(m)
}

/// Build [A_angle, N] both from the closed form and as an explicit
/// commutator with the number operator, and record their disagreement.
/// The number operator is diagonal, so the commutator never reaches past
/// the truncation and no padding is required.
pub fn angle_number_commutator_study(orders: &[usize]) -> Result<StudyReport> {
    if orders.is_empty() {
        return Err(CsqError::Domain("study needs at least one order".into()));
    }
    if orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CsqError::Domain("study orders must be strictly increasing".into()));
    }
    if orders[0] < 8 {
        return Err(CsqError::Domain("commutator study needs order >= 8".into()));
    }
    let mut records = Vec::with_capacity(orders.len());
    for &n in orders {
        let closed = angle_number_commutator_closed(n)?;
        let a = build_angle_operator(n)?;
        let number = FockOperator::number(n);
        let direct = a.matrix.commutator(&number.matrix)?;
        let disagreement = closed.sub(&direct)?.max_abs();

        let ic = closed.scale(I);
        let eig = hermitian_eigen(&ic)?;

        records.push(OrderRecord {
            order: n,
            interior: n,
            diagonal: (0..n).map(|i| pair(closed[(i, i)])).collect(),
            eigenvalues: eig.values,
            spectral_norm: spectral_norm(&closed)?,
            trace: pair(closed.trace()),
            residual_max: disagreement,
            hs_partial_sums: hs_partial_sums(&closed),
        });
    }

    let r_values = vec![2.0, 5.0, 10.0, 20.0, 40.0];
    let theta: Vec<f64> = (0..73)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / 72.0)
        .collect();
    let mut values = Vec::with_capacity(r_values.len());
    for &r in &r_values {
        let mut row = Vec::with_capacity(theta.len());
        for &t in &theta {
            row.push(commutator_angle_number_symbol_series(r, t)?.im);
        }
        values.push(row);
    }

    let report = StudyReport {
        orders: orders.to_vec(),
        pad: 0,
        records,
        decay_fit: None,
        poisson_grid: Some(PoissonGrid {
            r_values,
            theta,
            values,
        }),
    };
    report.validate()?;
    Ok(report)
}

/// Smallest relative growth of the full Hilbert–Schmidt sum across order
/// pairs (N, 2N) present in the report; None when no such pair exists.
pub fn hs_doubling_growth(report: &StudyReport) -> Option<f64> {
    let full: Vec<(usize, f64)> = report
        .records
        .iter()
        .map(|r| (r.order, r.hs_partial_sums.last().map(|&(_, v)| v).unwrap_or(0.0)))
        .collect();
    let mut best: Option<f64> = None;
    for &(n, base) in &full {
        for &(m, doubled) in &full {
            if m == 2 * n && base > 0.0 {
                let growth = doubled / base - 1.0;
                best = Some(best.map_or(growth, |b: f64| b.min(growth)));
            }
        }
    }
    best
}
