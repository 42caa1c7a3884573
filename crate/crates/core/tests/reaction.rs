mod common;

use common::sphere_ops;
use proptest::prelude::*;
use surfgm_core::reaction::{assemble_reaction, group_matrix, lumped_group, patankar_coefficients};
use surfgm_core::ModelParams;

#[test]
fn group_matrix_matches_entrywise_formula() {
    let ops = sphere_ops(2);
    let n = ops.n();
    let c: Vec<f64> = (0..n).map(|i| (i as f64 * 0.61).cos().abs() + 0.1).collect();
    let g = group_matrix(&ops.mass, &c).to_dense();
    let m = ops.mass.to_dense();
    for i in 0..n {
        for j in 0..n {
            let want = m[i][j] * 0.5 * (c[i] + c[j]);
            assert!((g[i][j] - want).abs() <= 1e-16 * want.abs().max(1.0));
        }
    }
    let lumped = lumped_group(&ops.mass, &ops.lumped_mass, &c);
    for (i, row) in g.iter().enumerate() {
        let s: f64 = row.iter().sum();
        assert!((lumped[i] - s).abs() <= 1e-14 * s);
    }
}

#[test]
fn constant_coefficients_give_scaled_mass() {
    let ops = sphere_ops(2);
    let g = group_matrix(&ops.mass, &vec![3.0; ops.n()]);
    for (a, b) in g.values().iter().zip(ops.mass.values()) {
        assert_eq!(*a, 3.0 * b);
    }
}

#[test]
fn coefficients_follow_closed_forms() {
    let p = ModelParams::standard(5.0, 0.01);
    let u = [0.0, 0.3, 1.5, 4.0];
    let v = [0.2, 0.7, 1.0, 2.5];
    let c = patankar_coefficients(&u, &v, &p).unwrap();
    for i in 0..4 {
        assert_eq!(c.bu[i], 1.0);
        assert!((c.bv[i] - 6.0 / 0.6).abs() < 1e-14);
        let cu = u[i].powf(2.0) / v[i].powf(5.0);
        let cv = u[i].powf(2.0) / (0.1 * 0.6 * v[i].powf(4.0));
        assert!((c.cu[i] - cu).abs() <= 1e-14 * cu.max(1e-300));
        assert!((c.cv[i] - cv).abs() <= 1e-14 * cv.max(1e-300));
    }
    assert!(patankar_coefficients(&[1.0], &[0.0], &p).is_err());
    assert!(patankar_coefficients(&[-1e-300], &[1.0], &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn update_matches_fresh_assembly(
        u1 in proptest::collection::vec(0.0f64..3.0, 98),
        u2 in proptest::collection::vec(0.0f64..3.0, 98),
        v in proptest::collection::vec(0.1f64..3.0, 98),
    ) {
        let ops = sphere_ops(2);
        prop_assume!(ops.n() == 98);
        let p = ModelParams::standard(0.002, 0.01).with_gamma_area(ops.area);
        let c1 = patankar_coefficients(&u1, &v, &p).unwrap();
        let c2 = patankar_coefficients(&u2, &v, &p).unwrap();
        let mut r = assemble_reaction(&c1, &ops, &p);
        r.update(&c2, &ops.mass);
        let fresh = assemble_reaction(&c2, &ops, &p);
        prop_assert_eq!(r.c_u.values(), fresh.c_u.values());
        prop_assert_eq!(r.c_v.values(), fresh.c_v.values());
        prop_assert_eq!(&r.lumped_c_u, &fresh.lumped_c_u);
        prop_assert_eq!(&r.lumped_b_v, &fresh.lumped_b_v);
        for (a, b) in r.lumped_c_v.iter().zip(lumped_group(&ops.mass, &ops.lumped_mass, &c2.cv)) {
            prop_assert!((a - b).abs() <= 1e-13 * b.abs().max(1e-300));
        }
        let e = fresh.e(2.0);
        for (ei, mi) in e.iter().zip(&ops.lumped_mass) {
            prop_assert!((ei - 2.0 * p.bulk_coupling_coeff() * mi).abs() <= 1e-15 * ei.abs());
        }
    }
}
