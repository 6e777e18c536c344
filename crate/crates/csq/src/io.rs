//! Operator files, atomic output, and full-precision CSV numbers.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CsqError, Result};
use crate::fock::FockOperator;
use crate::linalg::ComplexMatrix;

pub const FORMAT_VERSION: u32 = 1;

/// On-disk operator: row-major entries as [re, im] pairs.  serde_json emits
/// shortest-round-trip doubles, so save/load is lossless.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub format_version: u32,
    pub order: usize,
    pub hermitian: bool,
    pub provenance: String,
    pub entries: Vec<[f64; 2]>,
}

impl OperatorFile {
    pub fn from_operator(op: &FockOperator) -> Self {
        let entries = op
            .matrix
            .entries()
            .iter()
            .map(|c| [c.re, c.im])
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            order: op.order,
            hermitian: op.hermitian,
            provenance: op.provenance.clone(),
            entries,
        }
    }

    pub fn into_operator(self) -> Result<FockOperator> {
        if self.format_version != FORMAT_VERSION {
            return Err(CsqError::Parse(format!(
                "unsupported operator file version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.order == 0 || self.entries.len() != self.order * self.order {
            return Err(CsqError::Parse(format!(
                "operator file claims order {} but carries {} entries",
                self.order,
                self.entries.len()
            )));
        }
        if self.entries.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CsqError::Parse("operator file contains non-finite entries".into()));
        }
        let order = self.order;
        let mut m = ComplexMatrix::zeros(order);
        for (k, pair) in self.entries.iter().enumerate() {
            m[(k / order, k % order)] = Complex64::new(pair[0], pair[1]);
        }
        if self.hermitian {
            let scale = m.max_abs().max(1e-300);
            let residual = m.hermiticity_residual();
            if residual > 1e-10 * scale {
                return Err(CsqError::NotHermitian {
                    residual,
                    tol: 1e-10 * scale,
                });
            }
        }
        Ok(FockOperator::new(m, self.hermitian, self.provenance))
    }
}

/// Write bytes to `path` through a sibling temp file and rename, so readers
/// never observe a half-written artifact.
pub fn atomic_write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp: PathBuf = path.to_path_buf();
    let mut name = tmp
        .file_name()
        .ok_or_else(|| CsqError::Parse(format!("output path {path:?} has no file name")))?
        .to_os_string();
    name.push(".tmp");
    tmp.set_file_name(name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_operator(path: &Path, op: &FockOperator) -> Result<()> {
    let file = OperatorFile::from_operator(op);
    let mut text = serde_json::to_string(&file)?;
    text.push('\n');
    atomic_write_bytes(path, text.as_bytes())
}

pub fn read_operator(path: &Path) -> Result<FockOperator> {
    let text = fs::read_to_string(path)?;
    let file: OperatorFile = serde_json::from_str(&text)?;
    file.into_operator()
}

/// C's `%.17g`: 17 significant digits, fixed or scientific by exponent,
/// trailing zeros stripped.  17 digits round-trip any double.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf" } else { "inf" }.to_string();
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    let formatted = format!("{:.16e}", x.abs());
    // mantissa "d.dddddddddddddddd", exponent after 'e'
    let (mantissa, exp_str) = formatted
        .split_once('e')
        .expect("LowerExp always carries an exponent");
    let exp: i32 = exp_str.parse().expect("exponent is an integer");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 17);

    if exp < -4 || exp >= 17 {
        let frac = digits[1..].trim_end_matches('0');
        let head = if frac.is_empty() {
            digits[..1].to_string()
        } else {
            format!("{}.{}", &digits[..1], frac)
        };
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{head}e{esign}{:02}", exp.abs())
    } else if exp < 0 {
        // 0.000ddd… with -exp-1 leading zeros
        let zeros = "0".repeat((-exp - 1) as usize);
        let body = format!("0.{zeros}{digits}");
        let body = body.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{body}")
    } else {
        let cut = exp as usize + 1;
        let int_part = &digits[..cut];
        let frac_part = digits[cut..].trim_end_matches('0');
        if frac_part.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

/// Assemble a CSV: comment lines (written verbatim, each prefixed with '#'),
/// one header row, then data rows through fmt_g17.
pub fn csv_document(comments: &[String], header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for line in comments {
        out.push('#');
        out.push(' ');
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt_g17(*v));
            first = false;
        }
        out.push('\n');
    }
    out
}
