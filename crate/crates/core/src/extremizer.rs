//! Projected gradient ascent of `f(a) = sum_tau |b_tau(a)|^p` over unit
//! amplitude vectors on a fixed shell.
//!
//! `b` is sesquilinear in `a`, and with `w_tau = |b_tau|^(p-2)` the gradient
//! with respect to `(Re a_i, Im a_i)`, packed as a complex number, is
//! `g_i = 2p sum_j w_{i-j} b_{i-j} a_j`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{LatticePoint, SphereShell};
use crate::spectra::io::{coeff_entries, CoeffEntry};
use crate::spectra::{
    autocorrelation, check_exponent, known_ceiling, lp_norm, random_coeffs, CoeffMode,
    EigenfunctionCoeffs,
};

/// Frequencies with `|b_tau|` below this contribute nothing to the gradient.
pub const GRADIENT_FLOOR: f64 = 1e-14;
/// Largest shell the dense pair table is built for.
pub const MAX_PAIR_TABLE_POINTS: usize = 8192;

/// `lp_norm(autocorrelation(coeffs), p)`.
pub fn objective(coeffs: &EigenfunctionCoeffs, p: f64) -> Result<f64> {
    lp_norm(&autocorrelation(coeffs), p)
}

/// Gradient of `objective^p` with respect to the real and imaginary parts of
/// every amplitude, keyed by shell point.
pub fn gradient(coeffs: &EigenfunctionCoeffs, p: f64) -> Result<BTreeMap<LatticePoint, Complex64>> {
    check_smooth_exponent(p)?;
    let table = PairTable::new(coeffs.shell())?;
    let g = table.gradient(coeffs.amplitudes(), p);
    Ok(coeffs.shell().points().iter().cloned().zip(g).collect())
}

fn check_smooth_exponent(p: f64) -> Result<()> {
    check_exponent(p)?;
    if p < 2.0 {
        return Err(Error::Unsupported(format!(
            "gradient requires p >= 2, got {p}"
        )));
    }
    Ok(())
}

/// Frequency id of every ordered pair of shell points.
struct PairTable {
    n: usize,
    taus: usize,
    ids: Vec<u32>,
}

impl PairTable {
    fn new(shell: &SphereShell) -> Result<Self> {
        let n = shell.len();
        if n > MAX_PAIR_TABLE_POINTS {
            return Err(Error::Resource(format!(
                "shell of {n} points exceeds the {MAX_PAIR_TABLE_POINTS}-point optimizer limit"
            )));
        }
        let points = shell.points();
        let mut lookup: HashMap<LatticePoint, u32> = HashMap::new();
        let mut ids = Vec::with_capacity(n * n);
        for xi in points {
            for eta in points {
                let next = lookup.len() as u32;
                ids.push(*lookup.entry(xi.sub(eta)).or_insert(next));
            }
        }
        Ok(PairTable {
            n,
            taus: lookup.len(),
            ids,
        })
    }

    fn spectrum(&self, a: &[Complex64]) -> Vec<Complex64> {
        let mut b = vec![Complex64::new(0.0, 0.0); self.taus];
        for (i, ai) in a.iter().enumerate() {
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let row = &self.ids[i * self.n..(i + 1) * self.n];
            for (id, aj) in row.iter().zip(a) {
                b[*id as usize] += ai * aj.conj();
            }
        }
        b
    }

    fn power_sum(&self, a: &[Complex64], p: f64) -> f64 {
        self.spectrum(a)
            .iter()
            .map(|b| b.norm_sqr().powf(p / 2.0))
            .sum()
    }

    fn gradient(&self, a: &[Complex64], p: f64) -> Vec<Complex64> {
        let weighted: Vec<Complex64> = self
            .spectrum(a)
            .into_iter()
            .map(|b| {
                let m = b.norm();
                if m < GRADIENT_FLOOR {
                    Complex64::new(0.0, 0.0)
                } else {
                    b * m.powf(p - 2.0)
                }
            })
            .collect();
        (0..self.n)
            .map(|i| {
                let row = &self.ids[i * self.n..(i + 1) * self.n];
                let s: Complex64 = row
                    .iter()
                    .zip(a)
                    .map(|(id, aj)| weighted[*id as usize] * aj)
                    .sum();
                s * (2.0 * p)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExtremizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    /// Threshold on the norm of the projected gradient of `f`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for ExtremizerConfig {
    fn default() -> Self {
        ExtremizerConfig {
            restarts: 1,
            max_iters: 5000,
            step_init: 0.1,
            tol: 1e-8,
            seed: 0,
        }
    }
}

impl ExtremizerConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::Contract("restarts and max_iters must be at least 1".into()));
        }
        if !(self.step_init > 0.0 && self.tol > 0.0) {
            return Err(Error::Contract("step_init and tol must be positive".into()));
        }
        Ok(())
    }
}

/// One ascent run.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub seed: u64,
    pub start_value: f64,
    pub final_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective (`l^p` value) after every accepted step, starting point first.
    pub history: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ExtremalReport {
    pub p: f64,
    pub best_coeffs: EigenfunctionCoeffs,
    pub best_value: f64,
    pub bound_value: Option<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    pub best_restart: usize,
    pub runs: Vec<RunSummary>,
}

#[derive(Serialize)]
pub struct ExtremalJson {
    pub dim: usize,
    pub lambda: u64,
    pub p: f64,
    pub best_value: f64,
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub restarts: usize,
    pub coeffs: Vec<CoeffEntry>,
}

impl ExtremalReport {
    pub fn to_json(&self) -> ExtremalJson {
        let shell = self.best_coeffs.shell();
        ExtremalJson {
            dim: shell.dim(),
            lambda: shell.lambda(),
            p: self.p,
            best_value: self.best_value,
            bound: self.bound_value,
            gap: self.bound_value.map(|c| c - self.best_value),
            converged: self.converged,
            iterations: self.iterations_used,
            restarts: self.runs.len(),
            coeffs: coeff_entries(&self.best_coeffs),
        }
    }
}

/// Best of `config.restarts` ascent runs over the whole shell.
pub fn maximize(shell: &Arc<SphereShell>, p: f64, config: &ExtremizerConfig) -> Result<ExtremalReport> {
    maximize_inner(shell, None, p, config)
}

/// As [`maximize`], with amplitudes outside `support` pinned to zero.
pub fn maximize_on_support(
    shell: &Arc<SphereShell>,
    support: &[LatticePoint],
    p: f64,
    config: &ExtremizerConfig,
) -> Result<ExtremalReport> {
    let mut mask = vec![false; shell.len()];
    for q in support {
        let i = shell
            .index_of(q.coords())
            .ok_or_else(|| Error::OffShell(q.coords().to_vec()))?;
        mask[i] = true;
    }
    if !mask.iter().any(|&m| m) {
        return Err(Error::Contract("support is empty".into()));
    }
    maximize_inner(shell, Some(&mask), p, config)
}

fn maximize_inner(
    shell: &Arc<SphereShell>,
    mask: Option<&[bool]>,
    p: f64,
    config: &ExtremizerConfig,
) -> Result<ExtremalReport> {
    check_smooth_exponent(p)?;
    config.validate()?;
    if shell.is_empty() {
        return Err(Error::Contract("cannot optimize over an empty shell".into()));
    }
    let table = PairTable::new(shell)?;

    let runs: Vec<(RunSummary, Vec<Complex64>)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let seed = config.seed.wrapping_add(r as u64);
            ascend(shell, &table, mask, p, config, seed)
        })
        .collect::<Result<_>>()?;

    // Ties go to the lowest restart index.
    let mut best = 0;
    for (i, (run, _)) in runs.iter().enumerate() {
        if run.final_value > runs[best].0.final_value {
            best = i;
        }
    }
    let best_coeffs = EigenfunctionCoeffs::from_dense(shell.clone(), runs[best].1.clone())?;
    let best_run = &runs[best].0;
    Ok(ExtremalReport {
        p,
        best_value: best_run.final_value,
        bound_value: known_ceiling(shell.dim(), p),
        iterations_used: best_run.iterations,
        converged: best_run.converged,
        best_restart: best,
        best_coeffs,
        runs: runs.into_iter().map(|(s, _)| s).collect(),
    })
}

fn normalize(a: &mut [Complex64]) {
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().recip();
    for z in a {
        *z *= scale;
    }
}

fn ascend(
    shell: &Arc<SphereShell>,
    table: &PairTable,
    mask: Option<&[bool]>,
    p: f64,
    config: &ExtremizerConfig,
    seed: u64,
) -> Result<(RunSummary, Vec<Complex64>)> {
    let mut a = random_coeffs(shell.clone(), seed, CoeffMode::Gaussian)?
        .amplitudes()
        .to_vec();
    if let Some(mask) = mask {
        for (z, &keep) in a.iter_mut().zip(mask) {
            if !keep {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        normalize(&mut a);
    }

    let root = |f: f64| f.powf(1.0 / p);
    let mut f = table.power_sum(&a, p);
    let mut history = vec![root(f)];
    let mut step = config.step_init;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iters {
        let mut g = table.gradient(&a, p);
        if let Some(mask) = mask {
            for (gi, &keep) in g.iter_mut().zip(mask) {
                if !keep {
                    *gi = Complex64::new(0.0, 0.0);
                }
            }
        }
        let radial: f64 = a.iter().zip(&g).map(|(ai, gi)| (ai.conj() * gi).re).sum();
        for (gi, ai) in g.iter_mut().zip(&a) {
            *gi -= ai * radial;
        }
        let gnorm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if gnorm < config.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut accepted = false;
        while step > f64::EPSILON * 1e-4 {
            let mut candidate: Vec<Complex64> =
                a.iter().zip(&g).map(|(ai, gi)| ai + gi * step).collect();
            normalize(&mut candidate);
            let fc = table.power_sum(&candidate, p);
            if fc >= f {
                a = candidate;
                f = fc;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        history.push(root(f));
    }

    Ok((
        RunSummary {
            seed,
            start_value: history[0],
            final_value: root(f),
            iterations,
            converged,
            history,
        },
        a,
    ))
}
