//! Independent oracles for the field update and its spectral companion.

use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_ca::analysis::{self, FourierMethod};
use toric_ca::automaton::{field_update, ScalarField};
use toric_ca::{ChargeField, Lattice, SpectralModel, TorusIndex};

/// Dense update matrix built from coordinates, without the neighbor table.
fn dense_g(l: usize, d: usize, eta: f64) -> DMatrix<f64> {
    let n = l.pow(d as u32);
    let coords = |mut i: usize| {
        let mut c = vec![0usize; d];
        for slot in c.iter_mut() {
            *slot = i % l;
            i /= l;
        }
        c
    };
    DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (coords(i), coords(j));
        let dist: usize = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| {
                let m = (x + l - y) % l;
                m.min(l - m)
            })
            .sum();
        match dist {
            0 => 1.0 - eta,
            1 => eta / (2 * d) as f64,
            _ => 0.0,
        }
    })
}

/// Zero-mean solution of `(I - G) phi = rho - mean(rho)` via `(I - G + J/N)`.
fn solve_stationary(g: &DMatrix<f64>, rho: &[f64]) -> DVector<f64> {
    let n = rho.len();
    let mean = rho.iter().sum::<f64>() / n as f64;
    let a = DMatrix::identity(n, n) - g + DMatrix::from_element(n, n, 1.0 / n as f64);
    let b = DVector::from_iterator(n, rho.iter().map(|r| r - mean));
    a.lu()
        .solve(&b)
        .expect("nonsingular on the zero-mean subspace")
}

fn random_charges(l: usize, count: usize, rng: &mut impl Rng) -> ChargeField {
    let cells: Vec<usize> = (0..count).map(|_| rng.gen_range(0..l * l)).collect();
    ChargeField::from_cells(l, &cells)
}

#[test]
fn spectrum_matches_dense_eigendecomposition() {
    for (l, d) in [(4, 2), (6, 2), (8, 2), (4, 3), (5, 3)] {
        for eta in [0.25, 0.5] {
            let model = SpectralModel::new(l, d, eta).unwrap();
            let mut ours: Vec<f64> = (0..model.cells())
                .map(|k| model.eigenvalue_flat(k))
                .collect();
            let mut dense: Vec<f64> = SymmetricEigen::new(dense_g(l, d, eta))
                .eigenvalues
                .iter()
                .copied()
                .collect();
            ours.sort_by(f64::total_cmp);
            dense.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&dense) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn fourier_waves_are_eigenvectors() {
    let (l, d, eta) = (6, 3, 0.5);
    let model = SpectralModel::new(l, d, eta).unwrap();
    let lattice = Lattice::new(l, d).unwrap();
    for k in lattice.iter() {
        let lambda = model.eigenvalue(&k);
        for phase in [0.0, std::f64::consts::FRAC_PI_2] {
            let v: Vec<f64> = lattice
                .iter()
                .map(|x| {
                    let dot: usize = x.coords().iter().zip(k.coords()).map(|(a, b)| a * b).sum();
                    (std::f64::consts::TAU * dot as f64 / l as f64 + phase).cos()
                })
                .collect();
            let gv = model.apply_update_matrix(&v);
            let err: f64 = gv
                .iter()
                .zip(&v)
                .map(|(g, x)| (g - lambda * x).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-10, "k={:?} err={err}", k.coords());
        }
    }
}

#[test]
fn stencil_equals_dense_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (l, d) in [(6, 2), (6, 3), (7, 1)] {
        let g = dense_g(l, d, 0.5);
        let model = SpectralModel::new(l, d, 0.5).unwrap();
        let v: Vec<f64> = (0..model.cells())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let ours = model.apply_update_matrix(&v);
        let dense = &g * DVector::from_vec(v);
        for (a, b) in ours.iter().zip(dense.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }
}

#[test]
fn stationary_field_matches_linear_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (l, d) in [(8, 2), (6, 3), (5, 2)] {
        for eta in [0.25, 0.5] {
            let model = SpectralModel::new(l, d, eta).unwrap();
            let g = dense_g(l, d, eta);
            let q = random_charges(l, 5, &mut rng);
            let rho = model.embed(&q).unwrap();
            let oracle = solve_stationary(&g, &rho);
            for method in [FourierMethod::Direct, FourierMethod::Fft] {
                let ours = model.stationary_density(&rho, method);
                for (a, b) in ours.values().iter().zip(oracle.iter()) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-8);
                }
            }
        }
    }
}

#[test]
fn fixed_point_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (l, d) in [(8, 2), (6, 3)] {
        let model = SpectralModel::new(l, d, 0.5).unwrap();
        let q = random_charges(l, 6, &mut rng);
        let rho = model.embed(&q).unwrap();
        let mean = rho.iter().sum::<f64>() / rho.len() as f64;
        let phi = model.stationary_field(&q).unwrap();
        let next = model.apply_update_matrix(phi.values());
        for ((n, r), p) in next.iter().zip(&rho).zip(phi.values()) {
            assert_abs_diff_eq!(n + r - mean, *p, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(phi.sum(), 0.0, epsilon = 1e-10);
    }
}

#[test]
fn superposition_and_translation() {
    let l = 8;
    let model = SpectralModel::new(l, 2, 0.5).unwrap();
    let a = ChargeField::from_cells(l, &[3, 17]);
    let b = ChargeField::from_cells(l, &[40, 63]);
    let fa = model.stationary_field(&a).unwrap();
    let fb = model.stationary_field(&b).unwrap();
    let fab = model.stationary_field(&a.xor(&b)).unwrap();
    for ((x, y), z) in fa.values().iter().zip(fb.values()).zip(fab.values()) {
        assert_abs_diff_eq!(x + y, *z, epsilon = 1e-10);
    }

    let zero = model.stationary_field(&ChargeField::empty(l)).unwrap();
    assert!(zero.values().iter().all(|v| v.abs() < 1e-15));

    let lattice = Lattice::new(l, 2).unwrap();
    let kernel = model.kernel();
    let y = TorusIndex::from_coords(&[3, 5], l).unwrap();
    let moved = model
        .stationary_field(&ChargeField::from_cells(l, &[lattice.flat(&y)]))
        .unwrap();
    for x in lattice.iter() {
        let back = x.sub(&y).unwrap();
        assert_abs_diff_eq!(
            moved.values()[lattice.flat(&x)],
            kernel.values()[lattice.flat(&back)],
            epsilon = 1e-12
        );
    }
}

#[test]
fn gradient_points_toward_the_charge() {
    for (l, d) in [(8, 2), (12, 2), (8, 3)] {
        let model = SpectralModel::new(l, d, 0.5).unwrap();
        let lattice = model.lattice().clone();
        let kernel = model.kernel();
        for dist in 2..l / 2 {
            // charge at +x: the +x neighbor of the origin is the unique best
            let mut c = vec![0i64; d];
            c[0] = dist as i64;
            let y = TorusIndex::new(&c, l).unwrap();
            let origin = TorusIndex::origin(l, d).unwrap();
            let vals: Vec<f64> = origin
                .neighbors()
                .iter()
                .map(|n| kernel.values()[lattice.flat(&n.sub(&y).unwrap())])
                .collect();
            let best = (1..vals.len()).all(|i| vals[0] > vals[i]);
            assert!(best, "L={l} D={d} dist={dist} {vals:?}");

            let g = model.stationary_gradient_at_origin(&y).unwrap();
            assert!(g[0] < 0.0);
        }
    }
}

#[test]
fn gradient_symmetry_and_decay() {
    let l = 16;
    let model = SpectralModel::new(l, 3, 0.5).unwrap();
    let norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut prev = f64::INFINITY;
    for dist in 2..=l / 4 {
        let y = TorusIndex::new(&[dist as i64, 0, 0], l).unwrap();
        let m = norm(&model.stationary_gradient_at_origin(&y).unwrap());
        assert!(m < prev, "dist={dist}");
        prev = m;
    }

    let half = TorusIndex::new(&[(l / 2) as i64, 0, 0], l).unwrap();
    let a = model.stationary_gradient_at_origin(&half).unwrap();
    let b = model.stationary_gradient_at_origin(&half.neg()).unwrap();
    assert_abs_diff_eq!(a[0].abs(), b[0].abs(), epsilon = 1e-12);

    let origin = TorusIndex::origin(l, 3).unwrap();
    assert!(model.stationary_gradient_at_origin(&origin).is_err());
}

#[test]
fn lambda_max_bound() {
    for d in 2..=3 {
        for l in 4..=40 {
            for eta in [0.1, 0.25, 0.5] {
                let m = SpectralModel::new(l, d, eta).unwrap();
                let bound = 1.0 - eta * std::f64::consts::PI.powi(2) / (d as f64 * (l * l) as f64);
                assert!(m.lambda_max() <= bound, "L={l} D={d} eta={eta}");
                let second = (2..m.cells())
                    .map(|k| m.eigenvalue_flat(k))
                    .fold(f64::MIN, f64::max);
                assert!(second <= m.lambda_max() + 1e-15);
            }
        }
    }
}

#[test]
fn iteration_respects_equilibration_bound() {
    let l = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in [2, 3] {
        let model = SpectralModel::new(l, d, 0.5).unwrap();
        let q = random_charges(l, 4, &mut rng);
        let target = model.stationary_field(&q).unwrap();
        let init: Vec<f64> = (0..model.cells())
            .map(|_| rng.gen_range(-3.0..3.0))
            .collect();
        let mut phi = ScalarField::from_values(l, d, init).unwrap();
        let e0 = analysis::rescale(&phi).distance(&target);
        let charges = q.anyons();
        for t in 1..=400 {
            phi.update(&charges, 0.5);
            let et = analysis::rescale(&phi).distance(&target);
            assert!(
                et <= model.equilibration_bound(t) * e0 + 1e-12,
                "D={d} t={t}"
            );
        }
    }
}

#[test]
fn frozen_field_update_keeps_mean_growth() {
    let l = 6;
    let q = ChargeField::from_cells(l, &[0, 7, 20]);
    let phi = ScalarField::<f64>::zeros(l, 2).unwrap();
    let next = field_update(&phi, &q, 0.3);
    let next2 = field_update(&next, &q, 0.3);
    assert_abs_diff_eq!(next.sum(), 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(next2.sum(), 6.0, epsilon = 1e-12);
}

#[test]
fn self_interaction_bound_after_hop() {
    // charge sits at the origin at equilibrium, then hops to -e0
    let l = 16;
    let model = SpectralModel::new(l, 3, 0.5).unwrap();
    let lattice = model.lattice().clone();
    let before = model.kernel();
    let minus = lattice.flat(&TorusIndex::new(&[-1, 0, 0], l).unwrap());
    let after = model
        .stationary_field(&ChargeField::from_cells(l, &[minus]))
        .unwrap();
    let origin = TorusIndex::origin(l, 3).unwrap();
    for eps in [0.1, 0.05] {
        let t_min = analysis::self_interaction_time(3, 0.5, &origin, eps).unwrap();
        let mut phi = ScalarField::from_values(l, 3, before.values().to_vec()).unwrap();
        for t in 1..=400usize {
            phi.update(&[minus], 0.5);
            if t as f64 >= t_min {
                let gap = (analysis::rescale(&phi).values()[0] - after.values()[0]).abs();
                assert!(gap <= eps, "eps={eps} t={t} gap={gap}");
            }
        }
    }
}

#[test]
fn chi_examples() {
    let o3 = TorusIndex::origin(8, 3).unwrap();
    let o2 = TorusIndex::origin(8, 2).unwrap();
    let c3: f64 = analysis::chi(3, 0.5, &o3).unwrap();
    let c2: f64 = analysis::chi(2, 0.5, &o2).unwrap();
    assert_abs_diff_eq!(
        c3,
        4.0 * std::f64::consts::PI.powi(2) / (3.0 * std::f64::consts::E),
        epsilon = 1e-12
    );
    assert!(c3 <= 5.0 && c2 <= 15.0);
    for x in Lattice::new(8, 3).unwrap().iter() {
        for eta in [0.1, 0.3, 0.5] {
            assert!(
                analysis::chi(3, eta, &x).unwrap()
                    <= analysis::chi_prime(3, eta, &x).unwrap() + 1e-12
            );
        }
    }
}
