use proptest::prelude::*;
use stdmap::cocycle::{mu_n_point, Cocycle2, Form};
use stdmap::complex_analysis::{annulus_jensen_difference, arg_change, harnack_bound, jensen_sector, HarnackVariant, Path, Sector};
use stdmap::jacobi::{dense_delta, mat4_to_dense, PeriodicJacobi, ProductOperator};
use stdmap::lax::CubeExchange;
use stdmap::potential::{capacity_energy, EmpiricalMeasure};
use stdmap::{BaseMap, Exec, TorusPoint, C64};

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn tau() -> f64 {
    std::f64::consts::TAU
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn potential_mean_value(atoms in prop::collection::vec(c64(), 1..30), cx in 2.5..4.0f64, cy in -1.0..1.0f64) {
        let dk = EmpiricalMeasure::uniform(&atoms, 1.0);
        let z = C64::new(cx, cy);
        let mean = (0..512).map(|k| dk.potential(z + C64::from_polar(0.8, tau() * k as f64 / 512.0))).sum::<f64>() / 512.0;
        prop_assert!((mean - dk.potential(z)).abs() < 1e-6);
    }

    #[test]
    fn winding_counts_zeros(roots in prop::collection::vec(c64().prop_map(|z| z * 1.8), 1..6)) {
        prop_assume!(roots.iter().all(|r| (r.norm() - 1.0).abs() > 1e-2));
        let g = |z: C64| roots.iter().fold(C64::new(1.0, 0.0), |a, r| a * (z - r));
        let w = arg_change(g, &Path::circle(C64::new(0.0, 0.0), 1.0), 16).unwrap() / tau();
        let inside = roots.iter().filter(|r| r.norm() < 1.0).count() as f64;
        prop_assert!((w - inside).abs() < 1e-6);
    }

    #[test]
    fn sector_partition_is_annulus_jensen(roots in prop::collection::vec(c64().prop_map(|z| z * 1.8), 1..4), k in 1usize..6) {
        prop_assume!(roots.iter().all(|r| r.norm() > 0.05 && (r.norm() - 0.6).abs() > 1e-2 && (r.norm() - 1.5).abs() > 1e-2));
        let g = |z: C64| roots.iter().fold(C64::new(1.0, 0.0), |a, r| a * (z - r));
        let total: f64 = Sector::partition(0.6, 1.5, k).unwrap().iter().map(|s| jensen_sector(g, s, 8).unwrap().difference()).sum();
        let annulus = annulus_jensen_difference(g, 0.6, 1.5, 8).unwrap();
        prop_assert!((total - annulus).abs() < 1e-6);
    }

    #[test]
    fn strip_transfer_is_unimodular(v1 in prop::collection::vec(c64(), 4..12), e in c64(), n in 2isize..8) {
        let v2: Vec<C64> = v1.iter().rev().map(|z| z * 0.7).collect();
        let op = ProductOperator::new(v1, v2).unwrap();
        let d = mat4_to_dense(&op.transfer4(e, n)).det();
        prop_assert!((d - 1.0).norm() < 1e-9);
    }

    #[test]
    fn delta_structure_matches_dense(p in 1usize..7, seed in any::<u64>()) {
        let mut r = stdmap::rng::stream(seed, 0);
        use rand::Rng;
        let mut draw = || C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let a: Vec<C64> = (0..p).map(|_| draw() + 1.5).collect();
        let b: Vec<C64> = (0..p).map(|_| draw()).collect();
        let c: Vec<C64> = (0..p).map(|_| draw() + 1.5).collect();
        let j = PeriodicJacobi::new(a, b, c).unwrap();
        let (z, w) = (draw() * 2.0, C64::from_polar(0.5 + draw().norm(), 3.0 * draw().re));
        let dense = dense_delta(&j, z, w);
        prop_assert!((j.delta_structure().delta_zw(z, w) - dense).norm() / dense.norm().max(1.0) < 1e-9);
    }

    #[test]
    fn cube_exchange_is_a_bijection_of_cells(perm in Just((0..16usize).collect::<Vec<_>>()).prop_shuffle()) {
        let c = CubeExchange::new(4, perm).unwrap();
        let mut seen = [false; 16];
        for i in 0..16 {
            seen[c.cell_of(c.apply(c.cell_center(i)))] = true;
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn harnack_variant_a_holds(coef in prop::collection::vec(c64(), 1..7), r in 1.5..6.0f64) {
        let h = |z: C64| {
            let mut s = C64::new(0.0, 0.0);
            let mut zk = C64::new(1.0, 0.0);
            for c in &coef {
                zk *= z;
                s += c * zk;
            }
            s.re
        };
        let max_r = (0..4096).map(|k| h(C64::from_polar(r, tau() * k as f64 / 4096.0))).fold(f64::NEG_INFINITY, f64::max);
        prop_assume!(max_r > 1e-6);
        let min_1 = (0..1024).map(|k| h(C64::from_polar(1.0, tau() * k as f64 / 1024.0))).fold(f64::INFINITY, f64::min);
        // grid maxima slightly underestimate; allow for it
        prop_assert!(min_1 >= harnack_bound(max_r * 1.001, r, HarnackVariant::A).unwrap());
    }

    #[test]
    fn capacity_is_rotation_invariant(atoms in prop::collection::vec(c64(), 2..40), phi in 0.0..6.0f64) {
        let dk = EmpiricalMeasure::uniform(&atoms, 1.0);
        let rot = EmpiricalMeasure::uniform(&atoms.iter().map(|z| z * C64::from_polar(1.0, phi)).collect::<Vec<_>>(), 1.0);
        let a = capacity_energy(&dk, Exec::Sequential).unwrap().energy;
        let b = capacity_energy(&rot, Exec::Sequential).unwrap().energy;
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn w_phase_is_a_seed_shift(x in 0.0..std::f64::consts::TAU, r in 0.3..1.5f64, phi in -3.0..3.0f64) {
        let cfg = Cocycle2::cos(0.0, 3.0, BaseMap::golden_rotation());
        let a = mu_n_point(&cfg.clone().with_w(C64::from_polar(r, phi)), TorusPoint::new(x, 0.0), 40, Form::A, 0.1).unwrap();
        let b = mu_n_point(&cfg.clone().with_w(C64::new(r, 0.0)), TorusPoint::new(x - phi, 0.0), 40, Form::A, 0.1).unwrap();
        let c = mu_n_point(&cfg.with_w(C64::from_polar(r, -phi)), TorusPoint::new(x - 2.0 * phi, 0.0), 40, Form::A, 0.1).unwrap();
        prop_assert!((a - b).abs() < 1e-9 && (a - c).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectral_measure_is_a_probability(lambda in 0.5..4.0f64, x in 0.0..std::f64::consts::TAU, n in 20usize..120) {
        let cfg = Cocycle2::cos(0.0, lambda, BaseMap::golden_rotation());
        let atoms = stdmap::diagnostics::spectral_measure(&cfg, TorusPoint::new(x, 0.0), n).unwrap();
        let mass: f64 = atoms.iter().map(|a| a.1).sum();
        prop_assert!((mass - 1.0).abs() < 1e-10);
        prop_assert!(atoms.iter().all(|a| a.1 >= -1e-14));
    }

    #[test]
    fn real_truncations_have_real_spectra(v in prop::collection::vec(-3.0..3.0f64, 1..60)) {
        let v: Vec<C64> = v.into_iter().map(|x| C64::new(x, 0.0)).collect();
        let ev = stdmap::jacobi::truncated_eigenvalues(&v).unwrap();
        prop_assert_eq!(ev.len(), v.len());
        prop_assert!(ev.iter().all(|e| e.im.abs() < 1e-12));
        let trace: f64 = v.iter().map(|z| z.re).sum();
        prop_assert!((ev.iter().map(|e| e.re).sum::<f64>() - trace).abs() < 1e-9);
    }
}
