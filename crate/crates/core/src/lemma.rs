//! Translate vectors of lattice simplices on a shell.
//!
//! Given vertices `v_1..v_m` on a shell, a nonzero `tau` is admissible when
//! every vertex has `v_i - tau` or `v_i + tau` on the shell. Admissible
//! vectors are counted once per `{tau, -tau}` class. The count of those that
//! are not edge chords `±(v_i - v_j)` is compared with `2^(dim-1)`.
//!
//! Since shells are complete, `v + s*tau` (with `s = ±1`) lies on the shell
//! exactly when `|tau|^2 = -2 s <v, tau>`, so the per-vertex test reduces to
//! `|tau|^2 = 2 |<v, tau>|`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{dot, LatticePoint, SphereShell};
use crate::rank::integer_rank;

/// Largest subset count accepted by the exhaustive sweep.
pub const EXHAUSTIVE_LIMIT: u128 = 10_000_000;

/// `2^(dim-1)`; depends on the dimension only.
pub fn translate_budget(dim: usize) -> u64 {
    1u64 << (dim - 1)
}

/// Validated vertex set: on the shell, distinct, no antipodal pair, and
/// affine rank at least `dim - 1`.
#[derive(Clone, Debug)]
pub struct Simplex {
    shell: Arc<SphereShell>,
    vertices: Vec<LatticePoint>,
}

impl Simplex {
    pub fn shell(&self) -> &SphereShell {
        &self.shell
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }
}

/// Checks the hypotheses for exactly `dim` vertices.
pub fn validate_simplex(shell: &Arc<SphereShell>, vertices: Vec<LatticePoint>) -> Result<Simplex> {
    if vertices.len() != shell.dim() {
        return Err(Error::Contract(format!(
            "a simplex on a {}-dimensional shell needs {} vertices, got {}",
            shell.dim(),
            shell.dim(),
            vertices.len()
        )));
    }
    validate_point_set(shell, vertices)
}

/// Like [`validate_simplex`] but accepts `m >= dim` points, which must
/// contain a non-degenerate codimension-one simplex.
pub fn validate_point_set(shell: &Arc<SphereShell>, vertices: Vec<LatticePoint>) -> Result<Simplex> {
    let dim = shell.dim();
    if vertices.len() < dim {
        return Err(Error::Contract(format!(
            "need at least {dim} vertices, got {}",
            vertices.len()
        )));
    }
    for v in &vertices {
        if !shell.contains(v)? {
            return Err(Error::OffShell(v.coords().to_vec()));
        }
    }
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            if a == b {
                return Err(Error::Contract(format!("vertex {a:?} repeated")));
            }
        }
    }
    let coords: Vec<&[i64]> = vertices.iter().map(|v| v.coords()).collect();
    match classify(&coords) {
        Validity::Valid => Ok(Simplex {
            shell: shell.clone(),
            vertices,
        }),
        Validity::Antipodal(i, j) => Err(Error::Antipodal(
            vertices[i].coords().to_vec(),
            vertices[j].coords().to_vec(),
        )),
        Validity::Degenerate(rank) => Err(Error::Degenerate {
            rank,
            required: dim - 1,
        }),
    }
}

enum Validity {
    Valid,
    Antipodal(usize, usize),
    Degenerate(usize),
}

fn affine_rank(vertices: &[&[i64]]) -> usize {
    let dim = vertices[0].len();
    let base = vertices[0];
    let diffs: Vec<i64> = vertices[1..]
        .iter()
        .flat_map(|v| v.iter().zip(base).map(|(a, b)| a - b))
        .collect();
    integer_rank(&diffs, vertices.len() - 1, dim)
}

fn classify(vertices: &[&[i64]]) -> Validity {
    for (i, a) in vertices.iter().enumerate() {
        for (j, b) in vertices.iter().enumerate().skip(i + 1) {
            if a.iter().zip(b.iter()).all(|(x, y)| *x == -*y) {
                return Validity::Antipodal(i, j);
            }
        }
    }
    let rank = affine_rank(vertices);
    if rank + 1 < vertices[0].len() {
        Validity::Degenerate(rank)
    } else {
        Validity::Valid
    }
}

/// Admissible translates of one simplex.
#[derive(Clone, Debug, Serialize)]
pub struct TranslateReport {
    pub vertices: Vec<LatticePoint>,
    /// One sign-canonical representative per class, lexicographic.
    pub translates: Vec<LatticePoint>,
    /// The members of `translates` that are edge chords.
    pub edge_translates: Vec<LatticePoint>,
    pub budget: u64,
    pub nonedge_count: usize,
    pub violated: bool,
}

impl TranslateReport {
    pub fn raw_count(&self) -> usize {
        self.translates.len()
    }
}

fn admits(tau: &[i64], tau_sq: i64, v: &[i64]) -> bool {
    2 * dot(v, tau).abs() == tau_sq
}

fn edge_chords(vertices: &[&[i64]]) -> Vec<Vec<i64>> {
    let mut edges = Vec::new();
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            let d: Vec<i64> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
            edges.push(LatticePoint::from(d).sign_canonical().coords().to_vec());
        }
    }
    edges
}

/// Every admissible `tau` moves `v_1` onto the shell, so candidates are the
/// chords `v_1 - eta` for `eta` on the shell.
pub fn find_translates(simplex: &Simplex) -> TranslateReport {
    let shell = simplex.shell();
    let dim = shell.dim();
    let coords: Vec<&[i64]> = simplex.vertices.iter().map(|v| v.coords()).collect();
    let anchor = &simplex.vertices[0];

    let mut translates: Vec<LatticePoint> = shell
        .points()
        .iter()
        .filter(|eta| *eta != anchor)
        .map(|eta| anchor.sub(eta).sign_canonical())
        .filter(|tau| {
            let tau_sq = tau.norm_sq();
            coords.iter().all(|v| admits(tau.coords(), tau_sq, v))
        })
        .collect();
    translates.sort();
    translates.dedup();

    let edges = edge_chords(&coords);
    let edge_translates: Vec<LatticePoint> = translates
        .iter()
        .filter(|t| edges.iter().any(|e| e.as_slice() == t.coords()))
        .cloned()
        .collect();
    let budget = translate_budget(dim);
    let nonedge_count = translates.len() - edge_translates.len();
    TranslateReport {
        vertices: simplex.vertices.clone(),
        translates,
        edge_translates,
        budget,
        nonedge_count,
        violated: nonedge_count as u64 > budget,
    }
}

/// `(raw, nonedge)` translate counts for vertices given by shell index,
/// without allocating per candidate.
fn count_translates(shell: &SphereShell, idx: &[usize], edges: &[Vec<i64>]) -> (usize, usize) {
    let points = shell.points();
    let anchor = points[idx[0]].coords();
    let others: Vec<&[i64]> = idx[1..].iter().map(|&i| points[i].coords()).collect();
    let dim = anchor.len();
    let mut tau = [0i64; crate::lattice::MAX_DIM];
    let mut raw = 0;
    let mut nonedge = 0;
    for (j, eta) in points.iter().enumerate() {
        if j == idx[0] {
            continue;
        }
        let t = &mut tau[..dim];
        for ((slot, a), b) in t.iter_mut().zip(anchor).zip(eta.coords()) {
            *slot = a - b;
        }
        let tau_sq = dot(t, t);
        if !others.iter().all(|v| admits(t, tau_sq, v)) {
            continue;
        }
        raw += 1;
        // Chords from the anchor are pairwise non-opposite, so each class
        // appears once here.
        let negate = t.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0);
        let is_edge = edges.iter().any(|e| {
            e.iter()
                .zip(t.iter())
                .all(|(x, y)| if negate { *x == -*y } else { x == y })
        });
        if !is_edge {
            nonedge += 1;
        }
    }
    (raw, nonedge)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepMode::Exhaustive => write!(f, "exhaustive"),
            SweepMode::Sampled { .. } => write!(f, "sampled"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub mode: SweepMode,
    /// Points beyond `dim` in each checked set.
    pub extra_points: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SkipCounts {
    pub degenerate: u64,
    pub antipodal: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSweepReport {
    pub dim: usize,
    pub lambda: u64,
    pub mode: String,
    pub extra_points: usize,
    pub checked: u64,
    pub skipped: SkipCounts,
    pub budget: u64,
    pub max_nonedge_count: usize,
    /// Largest count with edge chords included.
    pub max_raw_count: usize,
    /// Non-edge count -> number of vertex sets.
    pub histogram: BTreeMap<usize, u64>,
    pub violations: Vec<TranslateReport>,
}

#[derive(Default)]
struct Tally {
    checked: u64,
    skipped: SkipCounts,
    max_nonedge: usize,
    max_raw: usize,
    histogram: BTreeMap<usize, u64>,
    violations: Vec<TranslateReport>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.skipped.degenerate += other.skipped.degenerate;
        self.skipped.antipodal += other.skipped.antipodal;
        self.max_nonedge = self.max_nonedge.max(other.max_nonedge);
        self.max_raw = self.max_raw.max(other.max_raw);
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_default() += v;
        }
        self.violations.extend(other.violations);
    }

    fn skip(&mut self, v: &Validity) {
        match v {
            Validity::Antipodal(..) => self.skipped.antipodal += 1,
            Validity::Degenerate(_) => self.skipped.degenerate += 1,
            Validity::Valid => {}
        }
    }

    fn record(&mut self, shell: &Arc<SphereShell>, idx: &[usize]) {
        let points = shell.points();
        let coords: Vec<&[i64]> = idx.iter().map(|&i| points[i].coords()).collect();
        let edges = edge_chords(&coords);
        let (raw, nonedge) = count_translates(shell, idx, &edges);
        self.checked += 1;
        self.max_nonedge = self.max_nonedge.max(nonedge);
        self.max_raw = self.max_raw.max(raw);
        *self.histogram.entry(nonedge).or_default() += 1;
        if nonedge as u64 > translate_budget(shell.dim()) {
            let simplex = Simplex {
                shell: shell.clone(),
                vertices: idx.iter().map(|&i| points[i].clone()).collect(),
            };
            self.violations.push(find_translates(&simplex));
        }
    }

    fn visit(&mut self, shell: &Arc<SphereShell>, idx: &[usize]) {
        let points = shell.points();
        let coords: Vec<&[i64]> = idx.iter().map(|&i| points[i].coords()).collect();
        match classify(&coords) {
            Validity::Valid => self.record(shell, idx),
            other => self.skip(&other),
        }
    }
}

/// Number of `k`-point subsets of an `n`-point shell, saturating.
pub fn subset_count(n: usize, k: usize) -> u128 {
    binomial(n, k)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Advances `idx` (strictly increasing, values < n) to the next combination
/// in lexicographic order, leaving `idx[..fixed]` untouched.
fn next_combination(idx: &mut [usize], n: usize, fixed: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > fixed {
        i -= 1;
        if idx[i] < n - (k - i) {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Sweeps vertex sets of size `dim + extra_points`, skipping and tallying
/// invalid ones. Output is independent of the rayon pool size.
pub fn verify_lemma(shell: &Arc<SphereShell>, config: &SweepConfig) -> Result<LemmaSweepReport> {
    let dim = shell.dim();
    let m = dim + config.extra_points;
    let n = shell.len();

    let tally = if n < m {
        Tally::default()
    } else {
        match config.mode {
            SweepMode::Exhaustive => {
                let total = binomial(n, m);
                if total > EXHAUSTIVE_LIMIT {
                    return Err(Error::Resource(format!(
                        "{total} vertex sets exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}; use sampled mode"
                    )));
                }
                exhaustive(shell, m)
            }
            SweepMode::Sampled { count, seed } => sampled(shell, m, count, seed),
        }
    };

    Ok(LemmaSweepReport {
        dim,
        lambda: shell.lambda(),
        mode: config.mode.to_string(),
        extra_points: config.extra_points,
        checked: tally.checked,
        skipped: tally.skipped,
        budget: translate_budget(dim),
        max_nonedge_count: tally.max_nonedge,
        max_raw_count: tally.max_raw,
        histogram: tally.histogram,
        violations: tally.violations,
    })
}

fn exhaustive(shell: &Arc<SphereShell>, m: usize) -> Tally {
    let n = shell.len();
    let partials: Vec<Tally> = (0..=n - m)
        .into_par_iter()
        .map(|first| {
            let mut tally = Tally::default();
            let mut idx: Vec<usize> = (0..m).map(|i| first + i).collect();
            loop {
                tally.visit(shell, &idx);
                if !next_combination(&mut idx, n, 1) {
                    break;
                }
            }
            tally
        })
        .collect();
    let mut total = Tally::default();
    for p in partials {
        total.merge(p);
    }
    total
}

const SAMPLE_CHUNK: usize = 256;

/// Draws sets until `count` valid ones are collected, giving up after
/// `100 * count + 1000` draws.
fn sampled(shell: &Arc<SphereShell>, m: usize, count: usize, seed: u64) -> Tally {
    let n = shell.len();
    let points = shell.points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_draws = count.saturating_mul(100).saturating_add(1000);

    let mut total = Tally::default();
    let mut accepted: Vec<Vec<usize>> = Vec::with_capacity(count);
    let mut draws = 0;
    while accepted.len() < count && draws < max_draws {
        draws += 1;
        let mut idx = rand::seq::index::sample(&mut rng, n, m).into_vec();
        idx.sort_unstable();
        let coords: Vec<&[i64]> = idx.iter().map(|&i| points[i].coords()).collect();
        match classify(&coords) {
            Validity::Valid => accepted.push(idx),
            other => total.skip(&other),
        }
    }

    let partials: Vec<Tally> = accepted
        .par_chunks(SAMPLE_CHUNK)
        .map(|chunk| {
            let mut tally = Tally::default();
            for idx in chunk {
                tally.record(shell, idx);
            }
            tally
        })
        .collect();
    for p in partials {
        total.merge(p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_shell;

    fn shell(dim: usize, lambda: u64) -> Arc<SphereShell> {
        Arc::new(enumerate_shell(dim, lambda).unwrap())
    }

    fn pts(v: &[&[i64]]) -> Vec<LatticePoint> {
        v.iter().map(|p| LatticePoint::from(p.to_vec())).collect()
    }

    #[test]
    fn validation_errors() {
        let s = shell(2, 25);
        assert!(validate_simplex(&s, pts(&[&[5, 0], &[4, 3]])).is_ok());
        assert!(matches!(
            validate_simplex(&s, pts(&[&[5, 0], &[-5, 0]])),
            Err(Error::Antipodal(..))
        ));
        assert!(matches!(
            validate_simplex(&s, pts(&[&[5, 0], &[4, 4]])),
            Err(Error::OffShell(_))
        ));
        assert!(matches!(
            validate_simplex(&s, pts(&[&[5, 0]])),
            Err(Error::Contract(_))
        ));

        let c = shell(3, 3);
        match validate_simplex(&c, pts(&[&[1, 1, 1], &[-1, -1, -1], &[1, -1, 1]])) {
            Err(Error::Antipodal(a, b)) => {
                assert_eq!(a, vec![1, 1, 1]);
                assert_eq!(b, vec![-1, -1, -1]);
            }
            other => panic!("expected antipodal error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_triangle() {
        // Collinear input; points on a sphere never are, so exercise the rank path directly.
        let v: [&[i64]; 3] = [&[1, 2, 3], &[2, 4, 6], &[3, 6, 9]];
        assert!(matches!(classify(&v), Validity::Degenerate(1)));
    }

    #[test]
    fn worked_example() {
        let s = shell(2, 25);
        let simplex = validate_simplex(&s, pts(&[&[5, 0], &[4, 3]])).unwrap();
        let r = find_translates(&simplex);
        assert_eq!(r.translates, pts(&[&[1, -3], &[9, 3]]));
        assert_eq!(r.edge_translates, pts(&[&[1, -3]]));
        assert_eq!(r.nonedge_count, 1);
        assert_eq!(r.budget, 2);
        assert!(!r.violated);
    }

    #[test]
    fn fast_count_matches_report() {
        for (dim, lambda) in [(2, 25), (3, 9), (3, 11), (4, 12)] {
            let s = shell(dim, lambda);
            let mut idx: Vec<usize> = (0..dim).collect();
            let mut seen = 0;
            loop {
                let coords: Vec<&[i64]> = idx.iter().map(|&i| s.points()[i].coords()).collect();
                if let Validity::Valid = classify(&coords) {
                    let edges = edge_chords(&coords);
                    let (raw, nonedge) = count_translates(&s, &idx, &edges);
                    let simplex = validate_simplex(
                        &s,
                        idx.iter().map(|&i| s.points()[i].clone()).collect(),
                    )
                    .unwrap();
                    let r = find_translates(&simplex);
                    assert_eq!((raw, nonedge), (r.raw_count(), r.nonedge_count));
                    seen += 1;
                }
                if seen > 300 || !next_combination(&mut idx, s.len(), 0) {
                    break;
                }
            }
            assert!(seen > 0);
        }
    }

    #[test]
    fn combinations_and_binomials() {
        let mut idx = vec![0, 1, 2];
        let mut count = 1;
        while next_combination(&mut idx, 6, 0) {
            count += 1;
        }
        assert_eq!(count, 20);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(12, 2), 66);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn sweeps_small_shells() {
        let cfg = SweepConfig {
            mode: SweepMode::Exhaustive,
            extra_points: 0,
        };
        let r = verify_lemma(&shell(2, 25), &cfg).unwrap();
        assert_eq!(r.checked + r.skipped.antipodal + r.skipped.degenerate, 66);
        assert_eq!(r.skipped.antipodal, 6);
        assert!(r.violations.is_empty());
        assert!(r.max_nonedge_count <= 2);

        let r = verify_lemma(&shell(3, 9), &cfg).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.max_nonedge_count <= 4);

        let empty = verify_lemma(&shell(2, 3), &cfg).unwrap();
        assert_eq!(empty.checked, 0);
        assert!(empty.violations.is_empty());
    }

    #[test]
    fn exhaustive_guard() {
        let cfg = SweepConfig {
            mode: SweepMode::Exhaustive,
            extra_points: 0,
        };
        assert!(matches!(
            verify_lemma(&shell(5, 5), &cfg),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn sampled_is_deterministic() {
        let s = shell(4, 12);
        let cfg = SweepConfig {
            mode: SweepMode::Sampled { count: 500, seed: 9 },
            extra_points: 1,
        };
        let a = verify_lemma(&s, &cfg).unwrap();
        let b = verify_lemma(&s, &cfg).unwrap();
        assert_eq!(a.checked, 500);
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(a.skipped, b.skipped);
        assert_eq!(a.mode, "sampled");
    }
}
