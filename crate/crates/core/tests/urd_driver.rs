use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roughflow::rough::{lift_piecewise_linear, DiscretePath};
use roughflow::spectral::{FourierField, ModeBasis, TorusGrid};
use roughflow::urd::{a1_apply, a2_apply, driver_norm_probe, DriverPair};
use roughflow::TimeGrid;
use rustfft::num_complex::Complex64;

fn random_path(points: usize, dim: usize, seed: u64) -> DiscretePath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0.0; dim];
    for k in 1..points {
        for i in 0..dim {
            let prev = data[(k - 1) * dim + i];
            data.push(prev + rand::Rng::random_range(&mut rng, -0.3..0.3));
        }
    }
    DiscretePath::new(TimeGrid::uniform(0.0, 1.0, points - 1), dim, data).unwrap()
}

fn random_field(grid: &TorusGrid, seed: u64) -> FourierField {
    FourierField::random_band_limited(grid, &mut ChaCha8Rng::seed_from_u64(seed), 1.5)
}

fn translations(grid: &TorusGrid) -> ModeBasis {
    let fields = vec![FourierField::uniform(grid, &[1.0, 0.0]).unwrap(), FourierField::uniform(grid, &[0.0, 1.0]).unwrap()];
    ModeBasis::from_fields(grid, fields).unwrap()
}

#[test]
fn driver_satisfies_chen_relations_on_all_triples() {
    let grid = TorusGrid::new(2, 16, 2.0 / 3.0).unwrap();
    let basis = ModeBasis::lowest(&grid, 6).unwrap();
    for seed in 0..3 {
        let d = DriverPair::new(lift_piecewise_linear(&random_path(7, 6, seed)), basis.clone()).unwrap();
        let (d1, d2) = d.chen_defects(&random_field(&grid, seed + 10)).unwrap();
        assert!(d1 < 1e-10 && d2 < 1e-10, "seed {seed}: {d1:e} {d2:e}");
    }
}

#[test]
fn translation_driver_is_the_second_order_shift() {
    let grid = TorusGrid::default_2d();
    let basis = translations(&grid);
    let u = random_field(&grid, 3);
    let z = [0.013, -0.021];
    let area = [z[0] * z[0] / 2.0, 0.004, z[0] * z[1] - 0.004, z[1] * z[1] / 2.0];
    let mut got = a1_apply(&basis, &z, &u).unwrap();
    got.axpy(1.0, &a2_apply(&basis, &area, &u).unwrap());
    let p = grid.points();
    for flat in 0..p {
        let k = grid.wavevector(flat);
        let theta = k[0] as f64 * z[0] + k[1] as f64 * z[1];
        let sym: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| area[i * 2 + j] * (k[i] * k[j]) as f64).sum();
        let factor = Complex64::new(-sym, -theta);
        for c in 0..2 {
            let want = u.component(c)[flat] * factor;
            assert!((got.component(c)[flat] - want).norm() < 1e-13);
        }
        assert!((sym - theta * theta / 2.0).abs() < 1e-15 * (1.0 + sym.abs()) + 1e-16);
    }
}

#[test]
fn operator_ratios_are_stable_under_grid_refinement() {
    let path = random_path(9, 8, 4);
    let lift = lift_piecewise_linear(&path);
    let mut ratios = Vec::new();
    for n in [16, 32] {
        let grid = TorusGrid::new(2, n, 2.0 / 3.0).unwrap();
        let d = DriverPair::new(lift.clone(), ModeBasis::lowest(&grid, 8).unwrap()).unwrap();
        let r = driver_norm_probe(&d, 1, 32, 1.0, 0.34, 2).unwrap();
        ratios.push((r.a1_ratio, r.a2_ratio));
    }
    let (a, b) = (ratios[0], ratios[1]);
    assert!(a.0 / b.0 < 2.0 && b.0 / a.0 < 2.0, "{ratios:?}");
    assert!(a.1 / b.1 < 2.0 && b.1 / a.1 < 2.0, "{ratios:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn first_level_operator_is_skew(seed in 0u64..10_000, z in prop::collection::vec(-1.0f64..1.0, 8)) {
        let grid = TorusGrid::new(2, 16, 2.0 / 3.0).unwrap();
        let basis = ModeBasis::lowest(&grid, 8).unwrap();
        let (u, v) = (random_field(&grid, seed), random_field(&grid, seed + 1));
        let au = a1_apply(&basis, &z, &u).unwrap();
        let av = a1_apply(&basis, &z, &v).unwrap();
        let scale = au.norm_l2() * v.norm_l2() + u.norm_l2() * av.norm_l2();
        prop_assert!((au.inner(&v) + u.inner(&av)).abs() <= 1e-12 * scale);
        prop_assert!(au.inner(&u).abs() <= 1e-12 * scale);
    }

    #[test]
    fn second_level_is_linear_in_the_area(seed in 0u64..10_000, s in -2.0f64..2.0) {
        let grid = TorusGrid::new(2, 16, 2.0 / 3.0).unwrap();
        let basis = ModeBasis::lowest(&grid, 4).unwrap();
        let u = random_field(&grid, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..16).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
        let b: Vec<f64> = (0..16).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
        let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * y).collect();
        let mut lhs = a2_apply(&basis, &ab, &u).unwrap();
        lhs.axpy(-1.0, &a2_apply(&basis, &a, &u).unwrap());
        lhs.axpy(-s, &a2_apply(&basis, &b, &u).unwrap());
        prop_assert!(lhs.norm_l2() <= 1e-12 * (1.0 + a2_apply(&basis, &ab, &u).unwrap().norm_l2()));
    }
}
