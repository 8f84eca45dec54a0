use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::NORM_TOL;
use crate::error::{Error, Result};
use crate::lattice::{LatticePoint, SphereShell};

/// Normalized amplitudes `a_xi`, one slot per shell point in canonical order.
#[derive(Clone, Debug)]
pub struct EigenfunctionCoeffs {
    shell: Arc<SphereShell>,
    amplitudes: Vec<Complex64>,
}

impl EigenfunctionCoeffs {
    /// Wraps dense amplitudes, checking `sum |a|^2 = 1` to `NORM_TOL`.
    pub fn from_dense(shell: Arc<SphereShell>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != shell.len() {
            return Err(Error::Contract(format!(
                "{} amplitudes for a shell of {} points",
                amplitudes.len(),
                shell.len()
            )));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Contract("non-finite amplitude".into()));
        }
        let mass: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if mass == 0.0 {
            return Err(Error::Contract("all amplitudes are zero".into()));
        }
        if (mass - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!(
                "amplitudes are not normalized: sum |a|^2 = {mass}"
            )));
        }
        Ok(EigenfunctionCoeffs { shell, amplitudes })
    }

    /// Scales arbitrary nonzero amplitudes onto the unit sphere.
    pub fn normalized(shell: Arc<SphereShell>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let mass: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Contract(format!(
                "cannot normalize amplitudes with sum |a|^2 = {mass}"
            )));
        }
        let scale = mass.sqrt().recip();
        for a in &mut amplitudes {
            *a *= scale;
        }
        Self::from_dense(shell, amplitudes)
    }

    /// Amplitudes given as `(point, value)` pairs; unlisted points get zero.
    pub fn from_pairs(shell: Arc<SphereShell>, pairs: &[(LatticePoint, Complex64)]) -> Result<Self> {
        let dense = scatter(&shell, pairs)?;
        Self::from_dense(shell, dense)
    }

    pub fn shell(&self) -> &SphereShell {
        &self.shell
    }

    pub fn shell_arc(&self) -> &Arc<SphereShell> {
        &self.shell
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, p: &LatticePoint) -> Option<Complex64> {
        self.shell.index_of(p.coords()).map(|i| self.amplitudes[i])
    }

    /// Points carrying a nonzero amplitude, in canonical order.
    pub fn support(&self) -> impl Iterator<Item = (&LatticePoint, Complex64)> + '_ {
        self.shell
            .points()
            .iter()
            .zip(&self.amplitudes)
            .filter(|(_, a)| a.norm_sqr() != 0.0)
            .map(|(p, &a)| (p, a))
    }

    pub fn mass(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub(crate) fn scatter(shell: &SphereShell, pairs: &[(LatticePoint, Complex64)]) -> Result<Vec<Complex64>> {
    let mut dense = vec![Complex64::new(0.0, 0.0); shell.len()];
    let mut seen = vec![false; shell.len()];
    for (p, a) in pairs {
        if p.dim() != shell.dim() {
            return Err(Error::Contract(format!(
                "point {p:?} has dimension {}, shell has {}",
                p.dim(),
                shell.dim()
            )));
        }
        let i = shell
            .index_of(p.coords())
            .ok_or_else(|| Error::OffShell(p.coords().to_vec()))?;
        if seen[i] {
            return Err(Error::Malformed(format!("point {p:?} listed twice")));
        }
        seen[i] = true;
        dense[i] = *a;
    }
    Ok(dense)
}

/// How `random_coeffs` draws amplitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffMode {
    /// Equal real mass `1/sqrt(N)` on every point; the seed is unused.
    Uniform,
    /// Independent standard complex Gaussians, then normalized.
    Gaussian,
    /// Gaussian amplitudes on exactly `k` randomly chosen points.
    Sparse(usize),
}

impl fmt::Display for CoeffMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffMode::Uniform => write!(f, "uniform"),
            CoeffMode::Gaussian => write!(f, "gaussian"),
            CoeffMode::Sparse(k) => write!(f, "sparse:{k}"),
        }
    }
}

impl FromStr for CoeffMode {
    type Err = Error;

    /// Accepts `uniform`, `gaussian`, `sparse:K` and `sparse(K)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "uniform" => return Ok(CoeffMode::Uniform),
            "gaussian" => return Ok(CoeffMode::Gaussian),
            _ => {}
        }
        let k = s
            .strip_prefix("sparse:")
            .or_else(|| s.strip_prefix("sparse(").and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| Error::Malformed(format!("unknown coefficient mode {s:?}")))?;
        k.parse()
            .map(CoeffMode::Sparse)
            .map_err(|_| Error::Malformed(format!("bad sparsity in {s:?}")))
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let z = Complex64::new(re, im);
        if z.norm_sqr() > 0.0 {
            return z;
        }
    }
}

/// Deterministic test vectors on a non-empty shell.
pub fn random_coeffs(shell: Arc<SphereShell>, seed: u64, mode: CoeffMode) -> Result<EigenfunctionCoeffs> {
    let n = shell.len();
    if n == 0 {
        return Err(Error::Contract("cannot draw coefficients on an empty shell".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitudes = match mode {
        CoeffMode::Uniform => vec![Complex64::new(1.0, 0.0); n],
        CoeffMode::Gaussian => (0..n).map(|_| complex_gaussian(&mut rng)).collect(),
        CoeffMode::Sparse(k) => {
            if k == 0 || k > n {
                return Err(Error::Contract(format!(
                    "sparsity {k} outside [1, {n}]"
                )));
            }
            let mut picks = rand::seq::index::sample(&mut rng, n, k).into_vec();
            picks.sort_unstable();
            let mut dense = vec![Complex64::new(0.0, 0.0); n];
            for i in picks {
                dense[i] = complex_gaussian(&mut rng);
            }
            dense
        }
    };
    EigenfunctionCoeffs::normalized(shell, amplitudes)
}
