mod common;

use common::{dense_mul, dense_solve, max_rel_diff, sphere_ops};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfgm_core::linalg::{
    bicgstab, block_gauss_seidel, solve_coupled, solve_spd, BlockSystem, NodeBlockSystem, SolverOptions, SparseMatrix,
};

fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

#[test]
fn spd_solve_matches_dense_elimination() {
    let ops = sphere_ops(1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for dt in [1e-5, 1e-3, 1e-1, 10.0] {
        let a = ops.mass.linear_combination(1.0, &ops.stiffness, dt).unwrap();
        let b = random_vec(&mut rng, ops.n(), -1.0, 1.0);
        let x = solve_spd(&a, &b, 1e-14, 1000).unwrap();
        let reference = dense_solve(&a.to_dense(), &b);
        assert!(max_rel_diff(&x, &reference) < 1e-11, "dt = {dt}");
    }
}

fn coupled_system(rng: &mut ChaCha8Rng, ops: &surfgm_core::Operators, dt: f64) -> BlockSystem {
    let n = ops.n();
    let block = |rng: &mut ChaCha8Rng, d: f64| {
        let mut m = ops.stiffness.with_values(ops.stiffness.values().iter().map(|x| dt * d * x).collect());
        let diag: Vec<f64> = ops.lumped_mass.iter().map(|mi| mi * (1.0 + dt * rng.gen_range(0.0..5.0))).collect();
        m.add_diagonal(&diag).unwrap();
        m
    };
    let coupling = |rng: &mut ChaCha8Rng| {
        let c: Vec<f64> = ops.lumped_mass.iter().map(|mi| -dt * mi * rng.gen_range(0.0..0.9)).collect();
        SparseMatrix::from_diagonal(&c)
    };
    let a = block(rng, 0.01);
    let d = block(rng, 16.0);
    let (b, c) = (coupling(rng), coupling(rng));
    let rhs = [random_vec(rng, n, 0.0, 1.0), random_vec(rng, n, 0.0, 1.0)];
    BlockSystem::new([[a, b], [c, d]], rhs).unwrap()
}

fn stacked_dense(sys: &BlockSystem) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = sys.split();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for (bi, row) in sys.blocks.iter().enumerate() {
        for (bj, m) in row.iter().enumerate() {
            for (i, r) in m.to_dense().into_iter().enumerate() {
                for (j, x) in r.into_iter().enumerate() {
                    a[bi * n + i][bj * n + j] = x;
                }
            }
        }
    }
    let b = sys.rhs[0].iter().chain(&sys.rhs[1]).copied().collect();
    (a, b)
}

#[test]
fn coupled_solvers_match_dense_elimination() {
    let ops = sphere_ops(1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dt in [1e-4, 1e-2, 1.0] {
        let sys = coupled_system(&mut rng, &ops, dt);
        let (a, b) = stacked_dense(&sys);
        let reference = dense_solve(&a, &b);
        let (u, v) = solve_coupled(&sys, 1e-14, 2000).unwrap();
        let x: Vec<f64> = u.iter().chain(&v).copied().collect();
        assert!(max_rel_diff(&x, &reference) < 1e-10, "bicgstab dt = {dt}");

        let n = sys.split();
        let (mut u, mut v) = (vec![0.0; n], vec![0.0; n]);
        block_gauss_seidel(&sys, &mut u, &mut v, SolverOptions { tol: 1e-14, max_iter: 10_000 }).unwrap();
        let x: Vec<f64> = u.iter().chain(&v).copied().collect();
        assert!(max_rel_diff(&x, &reference) < 1e-10, "gauss-seidel dt = {dt}");
        assert!(x.iter().all(|&xi| xi >= 0.0));
    }
}

#[test]
fn node_block_system_residual_matches_dense_product() {
    let ops = sphere_ops(1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sys = coupled_system(&mut rng, &ops, 0.1);
    let nb = NodeBlockSystem::from_block_system(&sys).unwrap();
    let n = sys.split();
    let (u, v) = (random_vec(&mut rng, n, 0.0, 1.0), random_vec(&mut rng, n, 0.0, 1.0));
    let (a, b) = stacked_dense(&sys);
    let x: Vec<f64> = u.iter().chain(&v).copied().collect();
    let ax = dense_mul(&a, &x);
    let r: f64 = ax.iter().zip(&b).map(|(p, q)| (q - p) * (q - p)).sum::<f64>().sqrt();
    assert!((nb.residual_norm(&u, &v) - r).abs() <= 1e-13 * r);
}

#[test]
fn bicgstab_handles_nonsymmetric_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 30;
    let mut dense = vec![vec![0.0; n]; n];
    for (i, row) in dense.iter_mut().enumerate() {
        for j in [i.wrapping_sub(1), i + 1, i + 3] {
            if j < n {
                row[j] = rng.gen_range(-1.0..0.0);
            }
        }
        row[i] = 4.0 + rng.gen_range(0.0..1.0);
    }
    let a = SparseMatrix::from_dense(&dense).unwrap();
    let b = random_vec(&mut rng, n, -1.0, 1.0);
    let mut x = vec![0.0; n];
    bicgstab(&a, &b, &mut x, SolverOptions { tol: 1e-14, max_iter: 500 }).unwrap();
    assert!(max_rel_diff(&x, &dense_solve(&dense, &b)) < 1e-11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_product_matches_dense(
        n in 1usize..12,
        entries in proptest::collection::vec((0usize..12, 0usize..12, -5.0f64..5.0), 0..60),
        x in proptest::collection::vec(-3.0f64..3.0, 12),
    ) {
        let t: Vec<_> = entries.into_iter().filter(|&(i, j, _)| i < n && j < n).collect();
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let mut dense = vec![vec![0.0; n]; n];
        for &(i, j, v) in &t {
            dense[i][j] += v;
        }
        let want = dense_mul(&dense, &x[..n]);
        let got = a.mul_vec(&x[..n]);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()));
        }
        prop_assert_eq!(a.to_dense(), dense.clone());
        let sums = a.row_sums();
        for (s, row) in sums.iter().zip(&dense) {
            prop_assert!((s - row.iter().sum::<f64>()).abs() <= 1e-12);
        }
    }
}
