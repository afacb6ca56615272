use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rpas_core::control::lqr::{care_residual, is_hurwitz, lqr, solve_care};
use rpas_core::control::{inner_loop, loop_outputs, Integrators, ReferenceVector};
use rpas_core::dynamics::{forces_moments, load_factors};
use rpas_core::mission::{Mission, ScenarioConfig};

fn double_integrator() -> (DMatrix<f64>, DMatrix<f64>) {
    (
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
    )
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_row_slice(v))
}

fn mission() -> Mission {
    Mission::with_defaults(ScenarioConfig::scenario1()).unwrap()
}

#[test]
fn double_integrator_gain() {
    let (a, b) = double_integrator();
    let k = lqr(&a, &b, &DMatrix::identity(2, 2), &DMatrix::identity(1, 1)).unwrap();
    assert!((k[(0, 0)] - 1.0).abs() < 1e-9);
    assert!((k[(0, 1)] - 3f64.sqrt()).abs() < 1e-9);
}

/// The closed-loop poles must be the stable eigenvalues of the Hamiltonian
/// `[[A, -B R^-1 B^T], [-Q, -A^T]]`.
#[test]
fn double_integrator_poles_are_stable_hamiltonian_eigenvalues() {
    let (a, b) = double_integrator();
    let q = DMatrix::identity(2, 2);
    let k = lqr(&a, &b, &q, &DMatrix::identity(1, 1)).unwrap();
    let mut h = DMatrix::<f64>::zeros(4, 4);
    h.view_mut((0, 0), (2, 2)).copy_from(&a);
    h.view_mut((0, 2), (2, 2)).copy_from(&(-&b * b.transpose()));
    h.view_mut((2, 0), (2, 2)).copy_from(&(-&q));
    h.view_mut((2, 2), (2, 2)).copy_from(&(-a.transpose()));
    let hc = h.map(|x| Complex64::new(x, 0.0));

    // s^2 + k2 s + k1 = 0
    let (k1, k2) = (k[(0, 0)], k[(0, 1)]);
    let disc = Complex64::new(k2 * k2 - 4.0 * k1, 0.0).sqrt();
    for s in [(-k2 + disc) / 2.0, (-k2 - disc) / 2.0] {
        assert!(s.re < 0.0);
        let shifted = &hc - DMatrix::<Complex64>::identity(4, 4) * s;
        assert!(shifted.determinant().norm() < 1e-9, "pole {s} is not a Hamiltonian eigenvalue");
    }
}

#[test]
fn aircraft_loops_are_hurwitz_and_solve_the_riccati_equation() {
    let m = mission();
    let lin = &m.design().linearization;
    let g = &m.design().gains;
    assert!(g.long_abscissa < 0.0 && g.lat_abscissa < 0.0);
    for (a, b, q, r) in [
        {
            let (a, b) = lin.augmented_long();
            (a, b, diag(&[1.0, 0.0, 0.01]), DMatrix::identity(1, 1))
        },
        {
            let (a, b) = lin.augmented_lat();
            (a, b, diag(&[1.0, 0.0, 0.0, 0.3, 0.3]), DMatrix::identity(2, 2))
        },
    ] {
        let p = solve_care(&a, &b, &q, &r).unwrap();
        assert!(care_residual(&a, &b, &q, &r, &p) < 1e-8 * p.amax().max(1.0));
        assert!((&p - p.transpose()).amax() < 1e-9 * p.amax());
        let k = r.try_inverse().unwrap() * b.transpose() * &p;
        assert!(is_hurwitz(&(a - b * k)));
    }
}

#[test]
fn gains_are_invariant_to_common_weight_scaling() {
    let m = mission();
    let (a, b) = m.design().linearization.augmented_lat();
    let q = diag(&[1.0, 0.0, 0.0, 0.3, 0.3]);
    let r = DMatrix::identity(2, 2);
    let k = lqr(&a, &b, &q, &r).unwrap();
    let k_scaled = lqr(&a, &b, &(&q * 40.0), &(&r * 40.0)).unwrap();
    assert!((&k - &k_scaled).amax() < 1e-8 * k.amax());
}

#[test]
fn bundled_gains_match_synthesis() {
    let m = mission();
    let (a, b) = m.design().linearization.augmented_long();
    let q = diag(&[1.0, 0.0, 0.01]);
    let k = lqr(&a, &b, &q, &DMatrix::identity(1, 1)).unwrap();
    for j in 0..3 {
        assert!((k[(0, j)] - m.design().gains.k_long[j]).abs() < 1e-9);
    }
}

/// Linear short-period model plus `Nz` integrator under a unit step.
#[test]
fn nz_step_response() {
    let m = mission();
    let lin = &m.design().linearization;
    let k = m.design().gains.k_long;
    let (a, b, c, d) = (&lin.a_long, &lin.b_long, &lin.c_long, &lin.d_long);
    let f = |x: [f64; 3], r: f64| {
        let u = -(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
        let y = c[(0, 0)] * x[0] + c[(0, 1)] * x[1] + d[(0, 0)] * u;
        let dx = [
            a[(0, 0)] * x[0] + a[(0, 1)] * x[1] + b[(0, 0)] * u,
            a[(1, 0)] * x[0] + a[(1, 1)] * x[1] + b[(1, 0)] * u,
            y - r,
        ];
        (dx, y)
    };
    let dt = 1e-3;
    let mut x = [0.0; 3];
    let mut peak: f64 = 0.0;
    let mut y = 0.0;
    for _ in 0..20_000 {
        let step = |x: [f64; 3], h: f64, k: [f64; 3]| std::array::from_fn(|i| x[i] + h * k[i]);
        let (k1, y0) = f(x, 1.0);
        let (k2, _) = f(step(x, dt / 2.0, k1), 1.0);
        let (k3, _) = f(step(x, dt / 2.0, k2), 1.0);
        let (k4, _) = f(step(x, dt, k3), 1.0);
        x = std::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        y = y0;
        peak = peak.max(y);
    }
    assert!(peak < 1.1, "overshoot {}", peak - 1.0);
    assert!((y - 1.0).abs() < 1e-4, "steady-state error {}", y - 1.0);
}

#[test]
fn trim_is_an_equilibrium_of_the_inner_loops() {
    let m = mission();
    let design = m.design();
    let op = &design.operating_point;
    let params = m.params();
    let reference = ReferenceVector::level(op.command.throttle);
    let step = inner_loop(&op.state, &reference, &design.gains, op, &Integrators::default(), &params.limits);
    assert_eq!(step.command, op.command);

    let fm = forces_moments(&op.state, &step.command, params).unwrap();
    let outputs = loop_outputs(&op.state, &load_factors(&fm, params), op);
    let mut integrators = Integrators::default();
    step.integrate(&outputs, &reference, &design.gains, &mut integrators, 1e-3);
    assert!(integrators.nz.abs() < 1e-15);
    assert!(integrators.ps.abs() < 1e-15);
    assert!(integrators.nyr.abs() < 1e-15);
}
