//! Kernel property report and table dumps for a [`CoocMatrix`].
//!
//! Nothing here is asserted about a learned table beyond nonnegativity and,
//! for input-pairs tables, symmetry. Positive definiteness and the
//! Cauchy-Schwarz inequality do not hold in general (an alternating
//! two-level image breaks both), so they are measured and reported.

use std::io::{self, Write};

use serde::Serialize;

use crate::cooc::{CoocMatrix, LEVELS};
use crate::error::{Error, Result};
use crate::image::ImagePlane;

/// Relative tolerance of the eigenvalue estimate.
pub const EIGEN_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    pub positivity: bool,
    /// `max |C(a,b) - C(b,a)|`.
    pub symmetry_deviation: u64,
    /// Smallest eigenvalue of the symmetric part of the table restricted to
    /// occupied levels. Zero when no level is occupied.
    pub min_eigenvalue: f64,
    /// Fraction of nonzero entries `(a, b)` with `C(a,b)^2 > C(a,a) C(b,b)`.
    pub cauchy_schwarz_violation_fraction: f64,
    /// Levels with a nonzero row or column.
    pub occupied_levels: usize,
}

impl KernelReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Report(e.to_string()))
    }
}

pub fn kernel_diagnostics(cooc: &CoocMatrix) -> KernelReport {
    let occupied: Vec<u8> = (0..=255u8)
        .filter(|&a| (0..=255u8).any(|b| cooc.get(a, b) > 0 || cooc.get(b, a) > 0))
        .collect();

    let mut symmetry_deviation = 0;
    let mut pairs = 0u64;
    let mut violations = 0u64;
    for &a in &occupied {
        for &b in &occupied {
            let ab = cooc.get(a, b);
            symmetry_deviation = symmetry_deviation.max(ab.abs_diff(cooc.get(b, a)));
            if ab > 0 {
                pairs += 1;
                let lhs = ab as u128 * ab as u128;
                let rhs = cooc.get(a, a) as u128 * cooc.get(b, b) as u128;
                if lhs > rhs {
                    violations += 1;
                }
            }
        }
    }

    KernelReport {
        // counts are unsigned
        positivity: true,
        symmetry_deviation,
        min_eigenvalue: min_eigenvalue(cooc, &occupied),
        cauchy_schwarz_violation_fraction: if pairs == 0 {
            0.0
        } else {
            violations as f64 / pairs as f64
        },
        occupied_levels: occupied.len(),
    }
}

fn min_eigenvalue(cooc: &CoocMatrix, occupied: &[u8]) -> f64 {
    let n = occupied.len();
    if n == 0 {
        return 0.0;
    }
    let scale = cooc.max_count() as f64;
    let mut m = vec![0.0; n * n];
    for (i, &a) in occupied.iter().enumerate() {
        for (j, &b) in occupied.iter().enumerate() {
            m[i * n + j] = (cooc.get(a, b) as f64 + cooc.get(b, a) as f64) / (2.0 * scale);
        }
    }
    let eigenvalues = jacobi_eigenvalues(m, n, EIGEN_TOLERANCE);
    eigenvalues.into_iter().fold(f64::INFINITY, f64::min) * scale
}

/// Eigenvalues of a symmetric `n`x`n` matrix by cyclic Jacobi rotations.
///
/// Sweeps until the off-diagonal Frobenius norm drops below `tolerance`
/// times the matrix norm (squared, which bounds each eigenvalue's error well
/// inside `tolerance`) or a sweep limit is hit.
pub fn jacobi_eigenvalues(mut m: Vec<f64>, n: usize, tolerance: f64) -> Vec<f64> {
    assert_eq!(m.len(), n * n);
    let norm: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; n];
    }
    let threshold = (tolerance * norm).powi(2);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

/// Writes the table as 256 lines of 256 space-separated decimal counts.
pub fn write_counts(cooc: &CoocMatrix, mut out: impl Write) -> io::Result<()> {
    for a in 0..=255u8 {
        let line = cooc
            .row(a)
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Log-scaled 256x256 heatmap: `round(255 ln(1 + c) / ln(1 + max))`, with
/// row `a` and column `b`.
pub fn heatmap(cooc: &CoocMatrix) -> ImagePlane {
    let max = cooc.max_count();
    let denom = (max as f64).ln_1p();
    let values = cooc
        .counts()
        .iter()
        .map(|&c| {
            if max == 0 {
                0.0
            } else {
                (255.0 * (c as f64).ln_1p() / denom).round()
            }
        })
        .collect();
    ImagePlane::from_parts(LEVELS, LEVELS, values)
}
