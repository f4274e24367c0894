use num_complex::Complex64;
use planewave::bloch::{self, FourierSeriesD, Lattice};
use planewave::fourier::{self, FourierSeries1D};
use planewave::{eigen, linalg};
use proptest::prelude::*;

fn series(max_cutoff: usize) -> impl Strategy<Value = FourierSeries1D> {
    (0..=max_cutoff).prop_flat_map(|n| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * n + 1).prop_map(move |c| {
            FourierSeries1D::new(n, c.into_iter().map(|(r, i)| Complex64::new(r, i)).collect()).unwrap()
        })
    })
}

/// Coefficients of a real-valued function.
fn real_series(max_cutoff: usize) -> impl Strategy<Value = FourierSeries1D> {
    series(max_cutoff).prop_map(|u| {
        let n = u.cutoff() as i64;
        FourierSeries1D::from_fn(n as usize, |k| 0.5 * (u.coeff(k) + u.coeff(-k).conj()))
    })
}

fn lattice_2d() -> impl Strategy<Value = Lattice> {
    (0.5..3.0f64, -1.0..1.0f64, 0.5..3.0f64).prop_map(|(a, b, c)| Lattice::new(&[vec![a, 0.0], vec![b, c]]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(u in series(12)) {
        let m = 4 * u.cutoff() + 3;
        let grid: f64 = u.to_grid(m).iter().map(|z| z.norm_sqr()).sum::<f64>() * 2.0 * std::f64::consts::PI / m as f64;
        let coef = u.l2_norm().powi(2);
        prop_assert!((grid - coef).abs() <= 1e-12 * (1.0 + coef));
    }

    #[test]
    fn projection_is_idempotent_and_contracting(u in series(12), m in 0usize..16, a in 0.1..2.0f64) {
        let p = fourier::project(&u, m);
        prop_assert_eq!(&fourier::project(&p, m), &p);
        prop_assert!(p.l2_norm() <= u.l2_norm() + 1e-15);
        prop_assert!(fourier::norm_a(&p, a).unwrap() <= fourier::norm_a(&u, a).unwrap() * (1.0 + 1e-15));
    }

    #[test]
    fn multiply_matches_grid_product(u in series(8), v in series(8)) {
        let out = u.cutoff() + v.cutoff();
        let m = 2 * out + 1;
        let prod: Vec<Complex64> = u.to_grid(m).iter().zip(v.to_grid(m)).map(|(a, b)| a * b).collect();
        let want = FourierSeries1D::from_grid_samples(&prod, out).unwrap();
        let got = fourier::multiply(&u, &v, out);
        prop_assert!((&got - &want).l2_norm() <= 1e-12 * (1.0 + want.l2_norm()));
    }

    #[test]
    fn strip_norm_grows_with_a(u in series(10), a in 0.05..1.5f64, da in 0.0..1.0f64) {
        let lo = fourier::norm_a(&u, a).unwrap();
        let hi = fourier::norm_a(&u, a + da).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-15));
        prop_assert!(u.l2_norm() <= lo * (1.0 + 1e-15));
    }

    #[test]
    fn galerkin_matrix_is_hermitian_and_eigenvalues_decrease(v in real_series(4), n in 1usize..10) {
        let small = eigen::assemble_hn(&v, n);
        prop_assert!(small.hermitian_defect() <= 1e-14);
        let a = linalg::eigh(small.entries()).values;
        let b = linalg::eigh(eigen::assemble_hn(&v, n + 1).entries()).values;
        // min-max: each Galerkin eigenvalue decreases with the space
        for j in 0..a.len() {
            prop_assert!(b[j] <= a[j] + 1e-10 * (1.0 + a[j].abs()));
        }
    }

    #[test]
    fn reciprocal_is_biorthogonal(l in lattice_2d()) {
        let r = l.reciprocal();
        for m in 0..2 {
            for n in 0..2 {
                let dot: f64 = l.vector(m).iter().zip(r.vector(n)).map(|(x, y)| x * y).sum();
                let want = if m == n { 2.0 * std::f64::consts::PI } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn weight_ignores_basis_labels(l in lattice_2d(), g in prop::collection::vec(-5.0..5.0f64, 2), a in 0.1..1.0f64) {
        let swapped = Lattice::new(&[l.vector(1), l.vector(0)]).unwrap();
        let flipped = Lattice::new(&[l.vector(0).iter().map(|x| -x).collect(), l.vector(1)]).unwrap();
        let w = bloch::weight_multid(a, &l, &g).unwrap();
        prop_assert!((bloch::weight_multid(a, &swapped, &g).unwrap() - w).abs() <= 1e-12 * w);
        prop_assert!((bloch::weight_multid(a, &flipped, &g).unwrap() - w).abs() <= 1e-12 * w);
    }

    #[test]
    fn spectrum_ignores_basis_order(
        l in lattice_2d(),
        k in prop::collection::vec(-0.5..0.5f64, 2),
        seed in any::<u64>(),
    ) {
        let v = bloch::gaussian_potential(&l, &[vec![0.1, 0.2]], &[0.4], &[-2.0], 8.0).unwrap();
        let basis = bloch::basis_set(&l, &k, 5.0).unwrap();
        let mut perm: Vec<usize> = (0..basis.dim()).collect();
        // deterministic shuffle driven by the seed
        let mut s = seed | 1;
        for i in (1..perm.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            perm.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let a = linalg::eigh(&bloch::assemble_bloch(&v, &basis)).values;
        let b = linalg::eigh(&bloch::assemble_bloch(&v, &basis.permuted(&perm).unwrap())).values;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn one_dimensional_lattice_matches_galerkin(v in real_series(5), n in 1usize..12) {
        let vd = FourierSeriesD::from_1d(&v);
        let basis = bloch::basis_set(&vd.lattice, &[0.0], n as f64).unwrap();
        let a = linalg::eigh(&bloch::assemble_bloch(&vd, &basis)).values;
        let b = linalg::eigh(eigen::assemble_hn(&v, n).entries()).values;
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }
}
