mod common;

use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use torus_spectra::extremizer::{maximize, ExtremizerConfig};
use torus_spectra::lattice::{enumerate_shell, LatticePoint, SphereShell};
use torus_spectra::lemma::{
    find_translates, translate_budget, validate_simplex, verify_lemma, Simplex, SweepConfig,
    SweepMode,
};
use torus_spectra::spectra::{
    autocorrelation, bound_constant, lp_norm, random_coeffs, CoeffMode, EigenfunctionCoeffs,
};

fn shell(dim: usize, lambda: u64) -> Arc<SphereShell> {
    Arc::new(enumerate_shell(dim, lambda).unwrap())
}

fn box_scan(dim: usize, lambda: u64) -> Vec<LatticePoint> {
    let r = (lambda as f64).sqrt().floor() as i64;
    let mut out = Vec::new();
    let mut v = vec![-r; dim];
    loop {
        if v.iter().map(|c| c * c).sum::<i64>() == lambda as i64 {
            out.push(LatticePoint::from(v.clone()));
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if v[k] < r {
                v[k] += 1;
                break;
            }
            v[k] = -r;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shells_are_exact_closed_and_sorted(dim in 2usize..=6, lambda in 0u64..400) {
        let s = enumerate_shell(dim, lambda).unwrap();
        for p in s.points() {
            prop_assert_eq!(p.norm_sq(), lambda as i64);
            prop_assert!(s.contains(&p.neg()).unwrap());
        }
        prop_assert!(s.points().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn shells_match_box_scan(dim in 2usize..=5, lambda in 0u64..=10_000) {
        // Keep the box scan affordable in higher dimensions.
        let lambda = match dim {
            2 => lambda,
            3 => lambda % 2_000,
            4 => lambda % 150,
            _ => lambda % 40,
        };
        let s = enumerate_shell(dim, lambda).unwrap();
        prop_assert_eq!(s.points(), &box_scan(dim, lambda)[..]);
    }

    #[test]
    fn membership_matches_linear_scan(dim in 2usize..=4, lambda in 0u64..60, probe in proptest::collection::vec(-8i64..=8, 4)) {
        let s = enumerate_shell(dim, lambda).unwrap();
        let p = LatticePoint::from(probe[..dim].to_vec());
        prop_assert_eq!(s.contains(&p).unwrap(), s.points().contains(&p));
    }

    #[test]
    fn axis_points_exist(k in 1u64..3000) {
        prop_assert!(enumerate_shell(2, k * k).unwrap().len() >= 4);
    }
}

fn shell_strategy() -> impl Strategy<Value = (usize, u64)> {
    prop_oneof![
        Just((2, 25)),
        Just((2, 65)),
        Just((3, 9)),
        Just((3, 11)),
        Just((4, 12)),
        Just((5, 5)),
        Just((6, 6)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phase_rotation_leaves_spectrum(shape in shell_strategy(), seed in any::<u64>(), angle in 0.0f64..std::f64::consts::TAU) {
        let s = shell(shape.0, shape.1);
        let c = random_coeffs(s.clone(), seed, CoeffMode::Gaussian).unwrap();
        let unit = Complex64::from_polar(1.0, angle);
        let rotated = EigenfunctionCoeffs::from_dense(
            s,
            c.amplitudes().iter().map(|a| a * unit).collect(),
        ).unwrap();
        let (x, y) = (autocorrelation(&c), autocorrelation(&rotated));
        prop_assert_eq!(x.len(), y.len());
        for (tau, b) in &x.entries {
            prop_assert!((y.entries[tau] - b).norm() < 1e-12);
        }
    }

    #[test]
    fn translation_multiplies_by_character(shape in shell_strategy(), seed in any::<u64>(), shift in proptest::collection::vec(-1.0f64..1.0, 6)) {
        let s = shell(shape.0, shape.1);
        let c = random_coeffs(s.clone(), seed, CoeffMode::Gaussian).unwrap();
        let v = &shift[..shape.0];
        let phase = |p: &LatticePoint| {
            let t: f64 = p.coords().iter().zip(v).map(|(x, y)| *x as f64 * y).sum();
            Complex64::from_polar(1.0, std::f64::consts::TAU * t)
        };
        let moved = EigenfunctionCoeffs::from_dense(
            s.clone(),
            s.points().iter().zip(c.amplitudes()).map(|(p, a)| a * phase(p)).collect(),
        ).unwrap();
        let (x, y) = (autocorrelation(&c), autocorrelation(&moved));
        for (tau, b) in &x.entries {
            prop_assert!((y.entries[tau] - b * phase(tau)).norm() < 1e-12);
        }
        for p in [2.0, 3.0, shape.0 as f64] {
            prop_assert!((lp_norm(&x, p).unwrap() - lp_norm(&y, p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn zygmund_holds_on_planar_shells(lambda in 1u64..3000, seed in any::<u64>(), sparse in 0usize..6) {
        let s = shell(2, lambda);
        prop_assume!(!s.is_empty());
        let mode = if sparse == 0 { CoeffMode::Gaussian } else { CoeffMode::Sparse(sparse.min(s.len())) };
        let c = random_coeffs(s, seed, mode).unwrap();
        let sq = lp_norm(&autocorrelation(&c), 2.0).unwrap().powi(2);
        prop_assert!(sq <= 5.0 + 1e-9);
    }

    #[test]
    fn theorem_bound_holds_in_high_dimension(dim in 5usize..=6, lambda in 1u64..12, seed in any::<u64>(), sparse in 0usize..4) {
        let s = shell(dim, lambda);
        prop_assume!(!s.is_empty());
        let mode = if sparse == 0 { CoeffMode::Gaussian } else { CoeffMode::Sparse(sparse.min(s.len())) };
        let c = random_coeffs(s, seed, mode).unwrap();
        let v = lp_norm(&autocorrelation(&c), dim as f64).unwrap();
        prop_assert!(v <= bound_constant(dim).unwrap() + 1e-9);
    }
}

fn first_valid(s: &Arc<SphereShell>, seed: u64) -> Option<Simplex> {
    use rand::{seq::index::sample, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let idx = sample(&mut rng, s.len(), s.dim()).into_vec();
        let verts = idx.iter().map(|&i| s.points()[i].clone()).collect();
        if let Ok(simplex) = validate_simplex(s, verts) {
            return Some(simplex);
        }
    }
    None
}

/// Every nonzero sign-canonical tau with `|tau|^2 <= 4 lambda`, admissible
/// by hash membership.
fn full_scan(simplex: &Simplex) -> Vec<LatticePoint> {
    let s = simplex.shell();
    let dim = s.dim();
    let bound = 4 * s.lambda() as i64;
    let r = (bound as f64).sqrt().floor() as i64;
    let mut found = Vec::new();
    let mut tau = vec![-r; dim];
    'outer: loop {
        let t = LatticePoint::from(tau.clone());
        if t.is_sign_canonical() && t.norm_sq() <= bound {
            let ok = simplex.vertices().iter().all(|v| {
                s.contains(&v.sub(&t)).unwrap() || s.contains(&v.add(&t)).unwrap()
            });
            if ok {
                found.push(t);
            }
        }
        let mut k = dim;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            if tau[k] < r {
                tau[k] += 1;
                break;
            }
            tau[k] = -r;
        }
    }
    found
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn translates_are_sound_complete_and_unique(
        shape in prop_oneof![Just((2, 25)), Just((2, 325)), Just((3, 9)), Just((3, 41)), Just((4, 12)), Just((4, 18))],
        seed in any::<u64>(),
    ) {
        let s = shell(shape.0, shape.1);
        prop_assert!(s.len() <= 500);
        let Some(simplex) = first_valid(&s, seed) else { return Ok(()) };
        let r = find_translates(&simplex);
        for t in &r.translates {
            prop_assert!(!t.is_zero());
            prop_assert!(t.is_sign_canonical());
            for v in simplex.vertices() {
                prop_assert!(s.contains(&v.sub(t)).unwrap() || s.contains(&v.add(t)).unwrap());
            }
        }
        for (i, a) in r.translates.iter().enumerate() {
            for b in &r.translates[i + 1..] {
                prop_assert!(*a != b.neg());
            }
        }
        prop_assert_eq!(&r.translates, &full_scan(&simplex));
        prop_assert_eq!(r.violated, r.nonedge_count as u64 > r.budget);
    }
}

#[test]
fn budget_depends_on_dimension_only() {
    for (dim, lambdas) in [(2usize, vec![5u64, 25, 65, 325]), (3, vec![9, 11, 41])] {
        for lambda in lambdas {
            let r = verify_lemma(
                &shell(dim, lambda),
                &SweepConfig {
                    mode: SweepMode::Exhaustive,
                    extra_points: 0,
                },
            )
            .unwrap();
            assert_eq!(r.budget, translate_budget(dim));
            assert!(r.violations.is_empty(), "dim {dim} lambda {lambda}");
        }
    }
    assert_eq!(translate_budget(5), 16);
}

#[test]
fn extra_points_never_add_translates() {
    let s = shell(3, 41);
    let cfg = |extra| SweepConfig {
        mode: SweepMode::Sampled {
            count: 3000,
            seed: 5,
        },
        extra_points: extra,
    };
    assert_eq!(verify_lemma(&s, &cfg(2)).unwrap().checked, 3000);
    // Each valid 5-point set contains a valid triple, whose translates are a superset.
    let all_triples = verify_lemma(
        &s,
        &SweepConfig {
            mode: SweepMode::Exhaustive,
            extra_points: 0,
        },
    )
    .unwrap();
    let more = verify_lemma(&s, &cfg(2)).unwrap();
    assert!(more.violations.is_empty());
    assert!(more.max_raw_count <= all_triples.max_raw_count);
}

#[test]
fn every_iterate_stays_on_the_sphere() {
    let s = shell(3, 9);
    let r = maximize(
        &s,
        3.0,
        &ExtremizerConfig {
            restarts: 4,
            max_iters: 400,
            seed: 3,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((r.best_coeffs.mass() - 1.0).abs() < 1e-12);
    assert!(r.best_value >= 1.0);
    for run in &r.runs {
        assert!(run.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}

#[test]
fn planar_extremizer_respects_zygmund() {
    for lambda in [1u64, 5, 25, 65] {
        let r = maximize(
            &shell(2, lambda),
            2.0,
            &ExtremizerConfig {
                restarts: 6,
                seed: lambda,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.best_value <= 5f64.sqrt() + 1e-9, "lambda {lambda}: {}", r.best_value);
    }
}
