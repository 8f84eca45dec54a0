//! Eigenfunction coefficients on a shell, the autocorrelation spectrum of
//! `|phi|^2`, its `l^p` norms, and the uniform `l^n` ceiling `C(n)`.
//!
//! With `phi(x) = sum_xi a_xi e(<xi, x>)` on the unit torus, the Fourier
//! coefficient of `|phi|^2` at frequency `tau` is
//! `b_tau = sum_{xi - eta = tau} a_xi conj(a_eta)`.

mod coeffs;
mod grid;
pub mod io;

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

pub use coeffs::{random_coeffs, CoeffMode, EigenfunctionCoeffs};
pub(crate) use coeffs::scatter as scatter_pairs;
pub use grid::{grid_density, parseval_check, ParsevalReport, MAX_GRID_CELLS};

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

/// Additive slack on every bound comparison.
pub const BOUND_SLACK: f64 = 1e-9;
/// Relative tolerance on `sum |a|^2 = 1`.
pub const NORM_TOL: f64 = 1e-12;
/// Zygmund's `L^4` ceiling on the 2-torus, read through Parseval: `sum |b|^2 <= 5`.
pub const ZYGMUND_L2_CEILING: f64 = 2.23606797749979;

/// Fourier coefficients `b_tau` of `|phi|^2`, keyed by frequency in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct AutocorrelationSpectrum {
    pub dim: usize,
    pub lambda: u64,
    pub entries: BTreeMap<LatticePoint, Complex64>,
}

impl AutocorrelationSpectrum {
    pub fn get(&self, tau: &LatticePoint) -> Option<Complex64> {
        self.entries.get(tau).copied()
    }

    pub fn b0(&self) -> Complex64 {
        self.entries
            .get(&LatticePoint::zero(self.dim))
            .copied()
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Autocorrelation of the amplitudes over the support.
///
/// Only sign-canonical differences are accumulated; the opposite frequency
/// is stored as the exact conjugate and `b_0` as the exact sum of squared
/// moduli. Summation order follows the canonical point order, so the result
/// is bit-stable for fixed input.
pub fn autocorrelation(coeffs: &EigenfunctionCoeffs) -> AutocorrelationSpectrum {
    let shell = coeffs.shell();
    let support: Vec<(&LatticePoint, Complex64)> = coeffs.support().collect();

    let mut slot_of: HashMap<LatticePoint, usize> = HashMap::new();
    let mut sums: Vec<(LatticePoint, Complex64)> = Vec::new();
    let mut tau = vec![0i64; shell.dim()];
    for &(xi, a) in &support {
        for &(eta, b) in &support {
            for ((t, x), y) in tau.iter_mut().zip(xi.coords()).zip(eta.coords()) {
                *t = x - y;
            }
            if !tau.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
                continue;
            }
            let term = a * b.conj();
            match slot_of.get(tau.as_slice()) {
                Some(&i) => sums[i].1 += term,
                None => {
                    slot_of.insert(LatticePoint::from(tau.clone()), sums.len());
                    sums.push((LatticePoint::from(tau.clone()), term));
                }
            }
        }
    }

    let mut entries = BTreeMap::new();
    let b0: f64 = support.iter().map(|(_, a)| a.norm_sqr()).sum();
    entries.insert(LatticePoint::zero(shell.dim()), Complex64::new(b0, 0.0));
    for (tau, b) in sums {
        entries.insert(tau.neg(), b.conj());
        entries.insert(tau, b);
    }
    AutocorrelationSpectrum {
        dim: shell.dim(),
        lambda: shell.lambda(),
        entries,
    }
}

/// `(sum_tau |b_tau|^p)^(1/p)` over every stored entry, `tau = 0` included.
pub fn lp_norm(spectrum: &AutocorrelationSpectrum, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let sum: f64 = spectrum.entries.values().map(|b| b.norm().powf(p)).sum();
    Ok(sum.powf(1.0 / p))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::Contract(format!("exponent p must be >= 1, got {p}")));
    }
    Ok(())
}

/// `C(n) = (2^(2-n) + (5n/4 - 4) 2^n + 5)^(1/n)`, defined for `n >= 5`.
pub fn bound_constant(n: usize) -> Result<f64> {
    if n < 5 {
        return Err(Error::Unsupported(format!(
            "closed-form constant is only available for n >= 5, got {n}"
        )));
    }
    let nf = n as f64;
    // Factor 2^n out of the bracket so large n does not overflow.
    let inner = (-2.0 * nf + 2.0).exp2() + (1.25 * nf - 4.0) + 5.0 * (-nf).exp2();
    Ok(2.0 * inner.powf(1.0 / nf))
}

/// Known uniform ceiling on `l^p` of the spectrum, if any: `C(dim)` for
/// `dim >= 5, p >= dim`, and `sqrt(5)` for `dim = 2, p >= 2`. Both follow
/// from monotonicity of `l^p` norms in `p`.
pub fn known_ceiling(dim: usize, p: f64) -> Option<f64> {
    if dim >= 5 && p >= dim as f64 {
        bound_constant(dim).ok()
    } else if dim == 2 && p >= 2.0 {
        Some(ZYGMUND_L2_CEILING)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub p: f64,
    pub norm_value: f64,
    pub bound_value: Option<f64>,
    pub passed: bool,
}

impl BoundReport {
    pub fn new(p: f64, norm_value: f64, bound_value: Option<f64>) -> Self {
        let passed = bound_value.is_none_or(|c| norm_value <= c + BOUND_SLACK);
        BoundReport {
            p,
            norm_value,
            bound_value,
            passed,
        }
    }
}

/// `l^dim` norm of the spectrum against `C(dim)`. Below dimension 5 no
/// explicit constant is known and only the norm is reported.
pub fn check_theorem(coeffs: &EigenfunctionCoeffs) -> BoundReport {
    let dim = coeffs.shell().dim();
    let p = dim as f64;
    let norm = lp_norm(&autocorrelation(coeffs), p).expect("p = dim >= 2");
    let bound = if dim >= 5 { bound_constant(dim).ok() } else { None };
    BoundReport::new(p, norm, bound)
}
