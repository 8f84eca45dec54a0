//! Reference computations kept independent of the library's code paths.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use torus_spectra::lattice::LatticePoint;

/// `b_tau` by the explicit double loop over all ordered pairs.
pub fn brute_spectrum(points: &[Vec<i64>], amps: &[Complex64]) -> BTreeMap<Vec<i64>, Complex64> {
    let mut out = BTreeMap::new();
    for (xi, a) in points.iter().zip(amps) {
        for (eta, b) in points.iter().zip(amps) {
            if a.norm_sqr() == 0.0 || b.norm_sqr() == 0.0 {
                continue;
            }
            let tau: Vec<i64> = xi.iter().zip(eta).map(|(x, y)| x - y).collect();
            *out.entry(tau).or_insert(Complex64::new(0.0, 0.0)) += a * b.conj();
        }
    }
    out
}

pub fn coords(points: &[LatticePoint]) -> Vec<Vec<i64>> {
    points.iter().map(|p| p.coords().to_vec()).collect()
}

/// Dense evaluator of `sum_tau |b_tau|^p` as a function of the `2N` real
/// coordinates `(re_0, im_0, re_1, im_1, ...)`.
pub struct PowerSum {
    n: usize,
    diff: Vec<usize>,
    taus: usize,
    pub p: f64,
}

impl PowerSum {
    pub fn new(points: &[Vec<i64>], p: f64) -> Self {
        let n = points.len();
        let mut ids: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut diff = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let tau: Vec<i64> = points[i].iter().zip(&points[j]).map(|(x, y)| x - y).collect();
                let next = ids.len();
                diff[i * n + j] = *ids.entry(tau).or_insert(next);
            }
        }
        PowerSum {
            n,
            diff,
            taus: ids.len(),
            p,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let a: Vec<Complex64> = x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let mut b = vec![Complex64::new(0.0, 0.0); self.taus];
        for i in 0..self.n {
            for j in 0..self.n {
                b[self.diff[i * self.n + j]] += a[i] * a[j].conj();
            }
        }
        b.iter().map(|z| z.norm().powf(self.p)).sum()
    }

    /// Central differences with step `h`.
    pub fn fd_gradient(&self, x: &[f64], h: f64) -> Vec<f64> {
        let mut x = x.to_vec();
        (0..x.len())
            .map(|k| {
                let orig = x[k];
                x[k] = orig + h;
                let up = self.eval(&x);
                x[k] = orig - h;
                let down = self.eval(&x);
                x[k] = orig;
                (up - down) / (2.0 * h)
            })
            .collect()
    }
}

pub fn interleave(amps: &[Complex64]) -> Vec<f64> {
    amps.iter().flat_map(|a| [a.re, a.im]).collect()
}

/// Maximum over a mass split `t` of the `l^p` value for amplitudes
/// `(sqrt t, sqrt(1-t))` on an antipodal pair, by grid search then
/// golden-section refinement.
pub fn antipodal_split_max(xi: &[i64], p: f64) -> f64 {
    let neg: Vec<i64> = xi.iter().map(|c| -c).collect();
    let points = vec![xi.to_vec(), neg];
    let value = |t: f64| {
        let amps = [Complex64::new(t.sqrt(), 0.0), Complex64::new((1.0 - t).sqrt(), 0.0)];
        brute_spectrum(&points, &amps)
            .values()
            .map(|b| b.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    };
    let steps = 10_000;
    let (mut best_t, mut best) = (0.0, value(0.0));
    for k in 1..=steps {
        let t = k as f64 / steps as f64;
        let v = value(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = ((best_t - 1.0 / steps as f64).max(0.0), (best_t + 1.0 / steps as f64).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if value(m1) < value(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best.max(value(0.5 * (lo + hi)))
}

pub struct Criterion {
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    pub fn new(name: &'static str) -> Self {
        Criterion {
            name,
            failures: Vec::new(),
        }
    }

    pub fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(detail());
        }
    }

    pub fn finish(self) {
        if self.failures.is_empty() {
            println!("[PASS] {}", self.name);
        } else {
            println!("[FAIL] {}", self.name);
            for f in self.failures.iter().take(10) {
                println!("       {f}");
            }
            panic!("{}: {} failing checks", self.name, self.failures.len());
        }
    }
}
