//! JSON layouts for coefficient files and spectrum reports.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{scatter_pairs, AutocorrelationSpectrum, BoundReport, EigenfunctionCoeffs, NORM_TOL};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_shell, LatticePoint};

/// Deviations of `sum |a|^2` from 1 below this are renormalized on load;
/// larger ones are rejected unless forced.
pub const LOAD_RENORMALIZE_LIMIT: f64 = 1e-3;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CoeffEntry {
    pub point: LatticePoint,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffFile {
    pub dim: usize,
    pub lambda: u64,
    pub coeffs: Vec<CoeffEntry>,
}

/// Nonzero amplitudes in canonical point order.
pub fn coeff_entries(coeffs: &EigenfunctionCoeffs) -> Vec<CoeffEntry> {
    coeffs
        .support()
        .map(|(p, a)| CoeffEntry {
            point: p.clone(),
            re: a.re,
            im: a.im,
        })
        .collect()
}

impl From<&EigenfunctionCoeffs> for CoeffFile {
    fn from(c: &EigenfunctionCoeffs) -> Self {
        CoeffFile {
            dim: c.shell().dim(),
            lambda: c.shell().lambda(),
            coeffs: coeff_entries(c),
        }
    }
}

/// Parses a coefficient file. Extra top-level fields are ignored, so any
/// report carrying `dim`, `lambda` and `coeffs` loads as well.
pub fn parse_coeffs(text: &str, force_normalize: bool) -> Result<EigenfunctionCoeffs> {
    let file: CoeffFile = serde_json::from_str(text)?;
    load_coeffs(&file, force_normalize)
}

pub fn load_coeffs(file: &CoeffFile, force_normalize: bool) -> Result<EigenfunctionCoeffs> {
    let shell = Arc::new(enumerate_shell(file.dim, file.lambda)?);
    let pairs: Vec<(LatticePoint, Complex64)> = file
        .coeffs
        .iter()
        .map(|e| (e.point.clone(), Complex64::new(e.re, e.im)))
        .collect();
    let dense = scatter_pairs(&shell, &pairs)?;

    let mass: f64 = dense.iter().map(|a| a.norm_sqr()).sum();
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::Malformed(format!(
            "coefficient mass sum |a|^2 = {mass} cannot be normalized"
        )));
    }
    let deviation = (mass - 1.0).abs();
    if deviation <= NORM_TOL {
        EigenfunctionCoeffs::from_dense(shell, dense)
    } else if deviation < LOAD_RENORMALIZE_LIMIT || force_normalize {
        EigenfunctionCoeffs::normalized(shell, dense)
    } else {
        Err(Error::Malformed(format!(
            "sum |a|^2 = {mass} is too far from 1 to renormalize silently (pass --force-normalize)"
        )))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectrumEntry {
    pub tau: LatticePoint,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LpValue {
    pub p: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectrumReport {
    pub dim: usize,
    pub lambda: u64,
    pub entries: Vec<SpectrumEntry>,
    pub lp: LpValue,
    pub bound: Option<f64>,
    pub passed: bool,
}

impl SpectrumReport {
    pub fn new(spectrum: &AutocorrelationSpectrum, check: &BoundReport) -> Self {
        SpectrumReport {
            dim: spectrum.dim,
            lambda: spectrum.lambda,
            entries: spectrum
                .entries
                .iter()
                .map(|(tau, b)| SpectrumEntry {
                    tau: tau.clone(),
                    re: b.re,
                    im: b.im,
                })
                .collect(),
            lp: LpValue {
                p: check.p,
                value: check.norm_value,
            },
            bound: check.bound_value,
            passed: check.passed,
        }
    }
}
