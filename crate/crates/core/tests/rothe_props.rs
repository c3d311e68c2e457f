use fracspl_core::rothe::{assemble, run_solver, step_matrix, Mesh1D};
use fracspl_core::{ModelParams, TimeGrid};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (0.1f64..0.95, 0.05f64..2.0, 0.5f64..2.0, 0.5f64..2.0, 0.0f64..2.0)
        .prop_map(|(al, tq, rho, c, a)| ModelParams::new(al, tq, rho, c, a).unwrap())
}

/// Nodal data vanishing at both ends.
fn nodal(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, m - 1).prop_map(|mut v| {
        v.insert(0, 0.0);
        v.push(0.0);
        v
    })
}

fn dense_quadratic(diag: &[f64], off: &[f64], x: &[f64]) -> f64 {
    let mut q = 0.0;
    for i in 0..x.len() {
        q += diag[i] * x[i] * x[i];
        if i + 1 < x.len() {
            q += 2.0 * off[i] * x[i] * x[i + 1];
        }
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_matrix_is_spd_and_factors(p in params(), k in prop::collection::vec(0.1f64..5.0, 2..40),
                                      tau in 1e-4f64..0.5, seed in prop::collection::vec(-1.0f64..1.0, 40)) {
        let mesh = Mesh1D::with_conductivity(1.0, k).unwrap();
        let sys = assemble(&mesh, p.a).unwrap();
        let a = step_matrix(&sys, &p, tau).unwrap();
        let x = &seed[..a.dim()];
        let q = dense_quadratic(&a.diag, &a.off, x);
        prop_assert!(q > 0.0 || x.iter().all(|v| *v == 0.0));
        let b = a.matvec(x);
        let y = a.factor().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&y) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn solution_is_linear_in_data(p in params(), n in 1usize..12,
                                  (u1, v1, u2, v2) in (2usize..12).prop_flat_map(|m| (nodal(m), nodal(m), nodal(m), nodal(m))),
                                  s in -2.0f64..2.0) {
        let mesh = Mesh1D::uniform(1.0, u1.len() - 1, 1.3).unwrap();
        let grid = TimeGrid::new(0.8, n).unwrap();
        let zero = |_: f64, _: f64| 0.0;
        let r1 = run_solver(p, mesh.clone(), grid, &u1, &v1, zero).unwrap();
        let r2 = run_solver(p, mesh.clone(), grid, &u2, &v2, zero).unwrap();
        let u3: Vec<f64> = u1.iter().zip(&u2).map(|(a, b)| a + s * b).collect();
        let v3: Vec<f64> = v1.iter().zip(&v2).map(|(a, b)| a + s * b).collect();
        let r3 = run_solver(p, mesh, grid, &u3, &v3, zero).unwrap();
        for i in 0..=n {
            let (a, b, c) = (r1.u_full(i), r2.u_full(i), r3.u_full(i));
            for j in 0..a.len() {
                prop_assert!((c[j] - a[j] - s * b[j]).abs() < 1e-10 * (1.0 + c[j].abs()));
            }
        }
    }

    #[test]
    fn weak_form_and_estimates_hold(p in params(), u0 in nodal(10), v0 in nodal(10), n in 1usize..30,
                                    amp in -3.0f64..3.0) {
        let mesh = Mesh1D::uniform(2.0, 10, 0.7).unwrap();
        let grid = TimeGrid::new(1.0, n).unwrap();
        let run = run_solver(p, mesh, grid, &u0, &v0, move |x, t| amp * x * (2.0 - x) * (1.0 + t)).unwrap();
        let l = run.ledger();
        prop_assert!(l.max_vfi_residual() <= 1e-10);
        prop_assert!(l.rows().iter().all(|r| r.is_nonnegative()));
        prop_assert!(l.young_holds(1e-12));
        prop_assert!(u0.iter().zip(run.u_full(0)).all(|(a, b)| *a == b));
        prop_assert_eq!(run.u_full(n)[0], 0.0);
        prop_assert_eq!(*run.u_full(n).last().unwrap(), 0.0);
    }
}

#[test]
fn zero_data_stays_zero() {
    let p = ModelParams::new(0.5, 1.0, 1.0, 1.0, 1.0).unwrap();
    let mesh = Mesh1D::uniform(1.0, 8, 1.0).unwrap();
    let grid = TimeGrid::new(1.0, 16).unwrap();
    let z = vec![0.0; 9];
    let run = run_solver(p, mesh, grid, &z, &z, |_, _| 0.0).unwrap();
    for i in 0..=16 {
        assert!(run.u_full(i).iter().all(|v| *v == 0.0));
    }
}

#[test]
fn boundary_data_is_rejected() {
    let p = ModelParams::new(0.5, 1.0, 1.0, 1.0, 1.0).unwrap();
    let mesh = Mesh1D::uniform(1.0, 4, 1.0).unwrap();
    let grid = TimeGrid::new(1.0, 4).unwrap();
    let u0 = vec![1.0, 0.0, 0.0, 0.0, 0.0];
    assert!(run_solver(p, mesh, grid, &u0, &[0.0; 5], |_, _| 0.0).is_err());
}
