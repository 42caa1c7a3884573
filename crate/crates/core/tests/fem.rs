mod common;

use common::sphere_ops;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfgm_core::fem::{assemble_mass, assemble_stiffness, integral_functional, mesh_quality_report};
use surfgm_core::linalg::dot;
use surfgm_core::mesh::{build_cubed_sphere, refine, surface_area};
use surfgm_core::sim::{rayleigh_quotients, spatial_study};

#[test]
fn mesh_counts_and_topology() {
    for level in 0..=4u32 {
        let m = build_cubed_sphere(level).unwrap();
        let n = 1usize << level;
        assert_eq!(m.n_vertices(), 6 * n * n + 2);
        assert_eq!(m.n_edges(), 18 * n * n);
        assert_eq!(m.n_triangles(), 12 * n * n);
        assert_eq!(m.euler_characteristic(), 2);
        m.check_closed_surface().unwrap();
        assert!(m.max_radius_deviation() < 1e-15);
    }
}

#[test]
fn refinement_halves_edges_and_area_approaches_the_sphere() {
    let mut prev = build_cubed_sphere(1).unwrap();
    let mut prev_err = 4.0 * std::f64::consts::PI - surface_area(&prev).unwrap();
    for _ in 0..3 {
        let next = refine(&prev).unwrap();
        let ratio = next.max_edge_length() / prev.max_edge_length();
        assert!((0.45..0.7).contains(&ratio), "edge ratio {ratio}");
        let err = 4.0 * std::f64::consts::PI - surface_area(&next).unwrap();
        assert!(err > 0.0 && err < prev_err / 2.5);
        prev = next;
        prev_err = err;
    }
}

#[test]
fn mass_totals_equal_area() {
    for level in 1..=4 {
        let m = build_cubed_sphere(level).unwrap();
        let ops = sphere_ops(level);
        let area = surface_area(&m).unwrap();
        let consistent: f64 = ops.mass.values().iter().sum();
        let lumped: f64 = ops.lumped_mass.iter().sum();
        assert!((consistent - area).abs() <= 1e-12 * area);
        assert!((lumped - area).abs() <= 1e-12 * area);
        let (_, total) = integral_functional(&ops.mass, &vec![1.0; ops.n()]);
        assert!((total - area).abs() <= 1e-12 * area);
    }
}

#[test]
fn stiffness_is_symmetric_positive_semidefinite() {
    let ops = sphere_ops(3);
    let l = &ops.stiffness;
    assert_eq!(l.symmetry_defect(), 0.0);
    let scale = l.max_abs();
    for s in l.row_sums() {
        assert!(s.abs() <= 1e-12 * scale);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let x: Vec<f64> = (0..ops.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let energy = dot(&x, &l.mul_vec(&x));
        assert!(energy >= -1e-12 * scale * dot(&x, &x), "xᵀLx = {energy}");
        let mass = dot(&x, &ops.mass.mul_vec(&x));
        assert!(mass > 0.0);
    }
    assert!(mesh_quality_report(l).is_clean());
}

#[test]
fn operators_on_the_same_pattern() {
    let m = build_cubed_sphere(2).unwrap();
    let mass = assemble_mass(&m).unwrap();
    let stiffness = assemble_stiffness(&m).unwrap();
    assert!(mass.same_pattern(&stiffness));
    assert_eq!(mass.nnz(), m.n_vertices() + 2 * m.n_edges());
}

#[test]
fn coordinate_functions_are_first_eigenfunctions() {
    let tolerances = [(2, 0.08), (4, 0.02)];
    for (level, tol) in tolerances {
        let m = build_cubed_sphere(level).unwrap();
        let ops = sphere_ops(level);
        for q in rayleigh_quotients(&ops, m.vertices()) {
            assert!((q - 2.0).abs() <= tol * 2.0, "level {level}: {q}");
        }
    }
    let study = spatial_study(&[2, 3, 4]).unwrap();
    assert!(study.observed_order >= 1.9, "{study}");
}
