use mortality::numerics::{
    bspline_design, difference_matrix, normal_cdf, normal_quantile, solve_penalized_ls, svd_thin, BsplineBasis, Matrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

#[test]
fn svd_of_random_matrix_matches_gram_eigenvalues() {
    let a = random_matrix(10, 8, 11);
    let svd = svd_thin(&a).unwrap();

    let na = nalgebra::DMatrix::from_fn(10, 8, |r, c| a[(r, c)]);
    let gram = na.transpose() * &na;
    let mut eig: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    for (s, e) in svd.singular_values.iter().zip(&eig) {
        assert!((s - e).abs() < 1e-10 * eig[0], "{s} vs {e}");
    }

    let r = svd.reconstruct();
    let rel = r.zip_map(&a, |x, y| x - y).frobenius_norm() / a.frobenius_norm();
    assert!(rel <= 1e-10);

    let u = &svd.left_vectors;
    let v = &svd.right_vectors;
    let utu = u.transpose().matmul(u);
    let vtv = v.transpose().matmul(v);
    for i in 0..8 {
        for j in 0..8 {
            let id = if i == j { 1.0 } else { 0.0 };
            assert!((utu[(i, j)] - id).abs() < 1e-10);
            assert!((vtv[(i, j)] - id).abs() < 1e-10);
        }
    }
}

#[test]
fn cubic_basis_at_five_and_a_half_matches_recursion() {
    fn cox_de_boor(knots: &[f64], i: usize, k: usize, x: f64) -> f64 {
        if k == 0 {
            return if knots[i] <= x && x < knots[i + 1] { 1.0 } else { 0.0 };
        }
        let left = if knots[i + k] > knots[i] {
            (x - knots[i]) / (knots[i + k] - knots[i]) * cox_de_boor(knots, i, k - 1, x)
        } else {
            0.0
        };
        let right = if knots[i + k + 1] > knots[i + 1] {
            (knots[i + k + 1] - x) / (knots[i + k + 1] - knots[i + 1]) * cox_de_boor(knots, i + 1, k - 1, x)
        } else {
            0.0
        };
        left + right
    }
    let knots: Vec<f64> = (0..=10).map(f64::from).collect();
    let basis = BsplineBasis::new(knots.clone(), 3).unwrap();
    let row = basis.evaluate(5.5).unwrap();
    for (i, v) in row.iter().enumerate() {
        assert!((v - cox_de_boor(&knots, i, 3, 5.5)).abs() < 1e-14, "basis {i}");
    }
}

fn permuted(a: &Matrix<f64>, rows: &[usize], cols: &[usize]) -> Matrix<f64> {
    Matrix::from_fn(a.rows(), a.cols(), |r, c| a[(rows[r], cols[c])])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_ignore_row_and_column_order(
        seed in any::<u64>(),
        (rows, cols) in (2usize..9, 2usize..9),
        shuffle in any::<u64>(),
    ) {
        let a = random_matrix(rows, cols, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(shuffle);
        let mut rp: Vec<usize> = (0..rows).collect();
        let mut cp: Vec<usize> = (0..cols).collect();
        for i in (1..rows).rev() { rp.swap(i, rng.random_range(0..=i)); }
        for i in (1..cols).rev() { cp.swap(i, rng.random_range(0..=i)); }
        let s1 = svd_thin(&a).unwrap().singular_values;
        let s2 = svd_thin(&permuted(&a, &rp, &cp)).unwrap().singular_values;
        for (x, y) in s1.iter().zip(&s2) {
            prop_assert!((x - y).abs() <= 1e-10 * s1[0].max(1e-300));
        }
    }

    #[test]
    fn larger_penalty_never_roughens_coefficients(
        ys in prop::collection::vec(-3.0f64..3.0, 20),
        l1 in -3.0f64..5.0,
        step in 0.1f64..4.0,
    ) {
        let xs: Vec<f64> = (0..20).map(f64::from).collect();
        let basis = BsplineBasis::uniform(0.0, 19.0, 10, 3).unwrap();
        let b = bspline_design(&basis, &xs).unwrap();
        let d = difference_matrix::<f64>(10, 2);
        let rough = |lambda: f64| {
            let theta = solve_penalized_ls(&b, &ys, &[1.0; 20], lambda, 2).unwrap();
            (0..d.rows()).map(|i| (0..10).map(|j| d[(i, j)] * theta[j]).sum::<f64>().powi(2)).sum::<f64>()
        };
        let (r1, r2) = (rough(10f64.powf(l1)), rough(10f64.powf(l1 + step)));
        prop_assert!(r2 <= r1 * (1.0 + 1e-9) + 1e-20);
    }

    #[test]
    fn cubic_basis_is_a_partition_of_unity(x in 0.0f64..=30.0, n in 5usize..20) {
        let basis = BsplineBasis::uniform(0.0, 30.0, n, 3).unwrap();
        let row = basis.evaluate(x).unwrap();
        prop_assert!(row.iter().all(|&v| v >= 0.0));
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_quantile_is_antisymmetric_and_inverts_the_cdf(p in 1e-9f64..0.5) {
        let lo = normal_quantile(p).unwrap();
        let hi = normal_quantile(1.0 - p).unwrap();
        prop_assert!((lo + hi).abs() < 1e-8);
        prop_assert!((normal_cdf(lo) - p).abs() <= 1e-9 * p.max(1e-3));
    }
}
