//! Direct sampling of `|phi|^2` on the uniform grid `(k/M)_k` of the unit torus.

use num_complex::Complex64;

use super::{autocorrelation, EigenfunctionCoeffs};
use crate::error::{Error, Result};
use crate::lattice::isqrt;

pub const MAX_GRID_CELLS: usize = 100_000_000;

fn cell_count(dim: usize, m: usize) -> Result<usize> {
    if m == 0 {
        return Err(Error::Contract("grid size M must be at least 1".into()));
    }
    u32::try_from(dim)
        .ok()
        .and_then(|d| m.checked_pow(d))
        .filter(|&cells| cells <= MAX_GRID_CELLS)
        .ok_or_else(|| {
            Error::Resource(format!(
                "grid {m}^{dim} exceeds the {MAX_GRID_CELLS}-cell limit"
            ))
        })
}

/// Samples of `|phi(k/M)|^2` for `k in {0..M-1}^dim`, last coordinate fastest.
pub fn grid_density(coeffs: &EigenfunctionCoeffs, m: usize) -> Result<Vec<f64>> {
    let dim = coeffs.shell().dim();
    let cells = cell_count(dim, m)?;

    // e(r/M) for r in 0..M; phases are reduced mod M in integers first.
    let roots: Vec<Complex64> = (0..m)
        .map(|r| Complex64::from_polar(1.0, std::f64::consts::TAU * r as f64 / m as f64))
        .collect();
    let support: Vec<(&[i64], Complex64)> =
        coeffs.support().map(|(p, a)| (p.coords(), a)).collect();
    let modulus = m as i64;

    let mut k = vec![0i64; dim];
    let mut out = Vec::with_capacity(cells);
    for _ in 0..cells {
        let phi: Complex64 = support
            .iter()
            .map(|&(xi, a)| {
                let r = crate::lattice::dot(xi, &k).rem_euclid(modulus);
                a * roots[r as usize]
            })
            .sum();
        out.push(phi.norm_sqr());

        for slot in k.iter_mut().rev() {
            *slot += 1;
            if *slot < modulus {
                break;
            }
            *slot = 0;
        }
    }
    Ok(out)
}

/// Both sides of `sum_tau |b_tau|^2 = int |phi|^4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParsevalReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// Smallest grid size that samples `|phi|^4` without aliasing onto the mean:
/// `2 * ceil(2 sqrt(lambda)) + 1`.
pub fn min_alias_free_grid(lambda: u64) -> i64 {
    let four_lambda = 4 * lambda as i64;
    let r = isqrt(four_lambda);
    let ceil = if r * r == four_lambda { r } else { r + 1 };
    2 * ceil + 1
}

pub fn parseval_check(coeffs: &EigenfunctionCoeffs, m: usize) -> Result<ParsevalReport> {
    let shell = coeffs.shell();
    if shell.dim() > 3 {
        return Err(Error::Unsupported(format!(
            "grid quadrature is limited to dim <= 3, got {}",
            shell.dim()
        )));
    }
    let required = min_alias_free_grid(shell.lambda());
    if (m as i64) < required {
        return Err(Error::Aliasing {
            m,
            max_freq: required / 2,
            required: required - 1,
        });
    }

    let lhs: f64 = autocorrelation(coeffs)
        .entries
        .values()
        .map(|b| b.norm_sqr())
        .sum();
    let density = grid_density(coeffs, m)?;
    let rhs = density.iter().map(|g| g * g).sum::<f64>() / density.len() as f64;
    Ok(ParsevalReport {
        lhs,
        rhs,
        rel_err: (lhs - rhs).abs() / lhs.max(1.0),
    })
}
