use hcf_core::dynamics::default_seed;
use hcf_core::estimator::{
    build_all_regions, build_grid, estimate_coeffs, fit_exponential, BuildMethod, CoeffTable,
    DensityGrids, Smoothing,
};
use hcf_core::regions::{distance_to_boundary, rotate_by_i};
use hcf_core::{Complex, FillStrategy, PixelGrid, RegionId};

fn r(k: u8, l: u8) -> RegionId {
    RegionId::new(k, l).unwrap()
}

fn v11(k: u32) -> PixelGrid {
    build_grid(
        r(1, 1),
        k,
        BuildMethod::Boundary,
        FillStrategy::FloodSymmetry,
        &default_seed(),
        None,
    )
    .unwrap()
}

#[test]
fn grid_survives_save_and_load() {
    let g = v11(7);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v11.grid");
    g.save(&path).unwrap();
    let back = PixelGrid::load(&path).unwrap();
    assert_eq!(back, g);
    assert_eq!(back.symmetric_difference(&g).unwrap(), 0);

    let pbm = dir.path().join("v11.pbm");
    g.export_pbm(&pbm).unwrap();
    let bytes = std::fs::read(&pbm).unwrap();
    assert!(bytes.starts_with(b"P4\n256 256\n"));
}

#[test]
fn builds_are_deterministic() {
    assert_eq!(v11(6), v11(6));
}

#[test]
fn coefficient_table_round_trips_through_csv() {
    let mut table = CoeffTable::new(r(1, 1), (-0.5, -0.5), 3);
    for k in 6..=7 {
        let est = estimate_coeffs(&v11(k), -0.5, -0.5, 3, Smoothing::Neighborhood).unwrap();
        table.insert(k, est.coeffs);
    }
    let mut buf = Vec::new();
    table.write_csv(&mut buf).unwrap();
    let back = CoeffTable::read_csv(buf.as_slice(), r(1, 1), (-0.5, -0.5)).unwrap();
    assert_eq!(back, table);
}

#[test]
fn v11_transpose_symmetry_at_k9() {
    let est = estimate_coeffs(&v11(9), -0.5, -0.5, 4, Smoothing::Neighborhood).unwrap();
    let h = &est.coeffs;
    for m in 0..=4 {
        for n in 0..=4 - m {
            let (a, b) = (h.get(m, n), h.get(n, m));
            assert!((a - b).abs() / a.abs().max(0.01) < 0.05, "h{m}{n}={a} h{n}{m}={b}");
        }
    }
    assert!((h.get(0, 0) - 0.7149).abs() < 0.03);
}

#[test]
fn fit_recovers_its_own_model() {
    let series: Vec<(u32, f64)> = (7..=11).map(|k| (k, 0.7 + 2.0 * 0.55f64.powi(k as i32))).collect();
    let fit = fit_exponential(&series).unwrap();
    assert!((fit.a - 0.7).abs() < 1e-8);
    assert!((fit.c.unwrap() - 0.55).abs() < 1e-6);
}

#[test]
fn density_is_rotation_invariant() {
    let grids = build_all_regions(7, FillStrategy::FloodSymmetry, &default_seed(), None).unwrap();
    assert_eq!(grids.len(), 12);
    let dens = DensityGrids::new(&grids, Smoothing::Neighborhood).unwrap();
    let z = Complex::new(-0.3, -0.3);
    let base = dens.density_at(&z).unwrap();
    assert!(base > 0.0);
    for turns in 1..4 {
        let w = rotate_by_i(&z, turns);
        assert!(distance_to_boundary(&w) > 0.01);
        let v = dens.density_at(&w).unwrap();
        assert!((v - base).abs() / base < 0.02, "{turns} quarter turns: {v} vs {base}");
    }
}
