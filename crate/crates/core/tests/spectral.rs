use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roughflow::spectral::{
    heat_propagate, laplacian, leray_project, nonlinearity_b, sobolev_norm, transport_pseudo_spectral, transport_sparse,
    FourierField, ModeBasis, SobolevLevel, TorusGrid,
};

mod common;
use common::convolution_oracle;

fn field(grid: &TorusGrid, seed: u64) -> FourierField {
    FourierField::random_band_limited(grid, &mut ChaCha8Rng::seed_from_u64(seed), 1.0)
}

fn rel_gap(a: &FourierField, b: &FourierField) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    d.norm_l2() / b.norm_l2().max(f64::MIN_POSITIVE)
}

#[test]
fn nonlinearity_matches_convolution_oracle_2d_and_3d() {
    for (dim, seed) in [(2, 1), (2, 2), (3, 3)] {
        let grid = TorusGrid::new(dim, 8, 2.0 / 3.0).unwrap();
        let (u, v) = (field(&grid, seed), field(&grid, seed + 100));
        let got = nonlinearity_b(&u, &v).unwrap();
        let want = convolution_oracle(&u, &v);
        assert!(rel_gap(&got, &want) < 1e-12, "d = {dim}: {}", rel_gap(&got, &want));
        assert!(rel_gap(&transport_sparse(&u, &v).unwrap(), &want) < 1e-12);
    }
}

#[test]
fn sparse_and_pseudo_spectral_transport_agree_for_mode_fields() {
    let grid = TorusGrid::default_2d();
    let basis = ModeBasis::lowest(&grid, 16).unwrap();
    let u = field(&grid, 9);
    for e in basis.fields() {
        let a = transport_sparse(e, &u).unwrap();
        let b = transport_pseudo_spectral(e, &u);
        assert!(rel_gap(&a, &b) < 1e-12);
    }
}

#[test]
fn heat_semigroup_is_exact_per_mode() {
    let grid = TorusGrid::default_2d();
    let u = field(&grid, 4);
    let h = heat_propagate(&u, 0.1, 0.5);
    let p = grid.points();
    for flat in 0..p {
        let f = (-0.1 * grid.k2(flat) * 0.5).exp();
        for c in 0..2 {
            assert!((h.component(c)[flat] - u.component(c)[flat] * f).norm() < 1e-15);
        }
    }
    let lap = laplacian(&u);
    assert!((lap.inner(&u) + sobolev_norm(&u, SobolevLevel(1.0)).powi(2)).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonlinearity_is_skew(seed in 0u64..10_000, dim in 2usize..=3) {
        let grid = TorusGrid::new(dim, if dim == 2 { 16 } else { 8 }, 2.0 / 3.0).unwrap();
        let (u, v, w) = (field(&grid, seed), field(&grid, seed + 1), field(&grid, seed + 2));
        let scale = nonlinearity_b(&u, &v).unwrap().norm_l2() * w.norm_l2();
        let tri = nonlinearity_b(&u, &v).unwrap().inner(&w) + nonlinearity_b(&u, &w).unwrap().inner(&v);
        prop_assert!(tri.abs() <= 1e-10 * scale);
        prop_assert!(nonlinearity_b(&u, &v).unwrap().inner(&v).abs() <= 1e-10 * scale);
    }

    #[test]
    fn leray_projection_is_idempotent_and_divergence_free(seed in 0u64..10_000) {
        let grid = TorusGrid::new(2, 16, 2.0 / 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..grid.points()).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect())
            .collect();
        let f = FourierField::from_physical(&grid, &raw).unwrap();
        let p = leray_project(&f);
        prop_assert!(p.divergence_defect() < 1e-12);
        prop_assert!(rel_gap(&leray_project(&p), &p) < 1e-14);
        prop_assert!(p.norm_l2() <= f.norm_l2() * (1.0 + 1e-14));
    }
}
