use ddg_core::deform::{check_triangle_compat, conformal_deformation, edge_rates};
use ddg_core::hqd::{hopf_form, hopf_form_cotan, verify_complex};
use ddg_core::laplace::{laplacian, solve_dirichlet};
use ddg_core::moebius::{eta_edge, eta_edge_vector, lift, matrix_to_pauli, pauli_to_matrix, Mobius};
use ddg_core::realization::{check_conformal_equiv, check_pattern, cross_ratios};
use ddg_core::{shapes, Complex64, Gauge, Realization, TriMesh};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn jittered_grid(n: usize, jitter: &[(f64, f64)]) -> (TriMesh, Vec<Complex64>) {
    let (m, z) = shapes::grid(n, n);
    let h = 0.3 / (n - 1) as f64;
    let z = z.iter().zip(jitter.iter().cycle()).map(|(p, (a, b))| p + c(a * h, b * h)).collect();
    (m, z)
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
}

fn jitter() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 7..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cross_ratios_are_moebius_invariant(j in jitter(), a in complex(), b in complex(), cc in complex(), d in complex()) {
        let (m, z) = jittered_grid(5, &j);
        let r = Realization::new(&m, z).unwrap();
        let Some(phi) = Mobius::new(a, b, cc, d) else { return Ok(()) };
        // Keep the pole well away from the mesh.
        let far = r.z().iter().all(|&p| (phi.0 .0[1][0] * p + phi.0 .0[1][1]).norm() > 1e-3 * phi.0.max_abs());
        prop_assume!(far);
        let Ok(w) = phi.push(&r) else { return Ok(()) };
        let (ca, cb) = (cross_ratios(&r).unwrap(), cross_ratios(&w).unwrap());
        for &e in m.interior_edges() {
            prop_assert!((ca[e] - cb[e]).norm() <= 1e-8 * ca[e].norm());
        }
    }

    #[test]
    fn self_equivalence_is_trivial(j in jitter()) {
        let (m, z) = jittered_grid(4, &j);
        let r = Realization::new(&m, z).unwrap();
        let rc = check_conformal_equiv(&r, &r, 1e-9).unwrap();
        prop_assert!(rc.equivalent && rc.vertex_values.unwrap().iter().all(|&u| u == 0.0));
        let rp = check_pattern(&r, &r, 1e-9).unwrap();
        prop_assert!(rp.equivalent && rp.vertex_values.unwrap().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn linear_functions_are_harmonic(j in jitter(), a in -2.0..2.0f64, b in -2.0..2.0f64, k in -2.0..2.0f64) {
        let (m, z) = jittered_grid(6, &j);
        let r = Realization::new(&m, z.clone()).unwrap();
        let h: Vec<f64> = z.iter().map(|p| a * p.re + b * p.im + k).collect();
        for x in laplacian(&r, &h).unwrap() {
            prop_assert!(x.abs() < 1e-11);
        }
    }

    #[test]
    fn hopf_form_is_imaginary_for_any_function(j in jitter(), u in prop::collection::vec(-1.0..1.0f64, 36)) {
        let (m, z) = jittered_grid(6, &j);
        let r = Realization::new(&m, z).unwrap();
        let (a, b) = (hopf_form(&r, &u).unwrap(), hopf_form_cotan(&r, &u).unwrap());
        for &e in m.interior_edges() {
            prop_assert!(a[e].re.abs() < 1e-11);
            prop_assert!((a[e] - b[e]).norm() < 1e-11);
        }
        let lu = laplacian(&r, &u).unwrap();
        for vd in verify_complex(&r, &a, 1e-10).unwrap().vertices {
            prop_assert!(vd.sum_dz.norm() < 1e-10);
            prop_assert!((vd.sum + c(0.0, lu[vd.vertex] / 2.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn eta_eigenvectors_and_pauli(zi in complex(), zj in complex(), mu in complex()) {
        prop_assume!((zi - zj).norm() > 1e-3);
        let m = eta_edge(zi, zj, mu);
        let v = eta_edge_vector(zi, zj, mu);
        prop_assert!((pauli_to_matrix(v) - m).max_abs() <= 1e-12 * m.max_abs().max(1.0));
        prop_assert!((pauli_to_matrix(matrix_to_pauli(&m)) - m).max_abs() <= 1e-12 * m.max_abs().max(1.0));
        let (ei, ej) = (m.apply(lift(zi)), m.apply(lift(zj)));
        let tol = 1e-10 * m.max_abs().max(1.0);
        prop_assert!((ei[0] + mu * zi).norm() < tol && (ei[1] + mu).norm() < tol);
        prop_assert!((ej[0] - mu * zj).norm() < tol && (ej[1] - mu).norm() < tol);
        prop_assert!(m.trace().norm() < tol);
    }

    #[test]
    fn harmonic_deformations_are_compatible(j in jitter(), data in prop::collection::vec(-1.0..1.0f64, 20)) {
        let (m, z) = jittered_grid(6, &j);
        let r = Realization::new(&m, z).unwrap();
        let mut it = data.iter().cycle();
        let b: Vec<Option<f64>> = (0..m.vertex_count())
            .map(|v| if m.is_boundary_vertex(v) { Some(*it.next().unwrap()) } else { None })
            .collect();
        let Ok(sol) = solve_dirichlet(&r, &b) else { return Ok(()) };
        let d = conformal_deformation(&r, &sol.h, Gauge::default()).unwrap();
        let rates = edge_rates(&r, &d.zdot).unwrap();
        for (id, e) in m.edges().iter().enumerate() {
            prop_assert!((rates.sigma[id] - (sol.h[e.v[0]] + sol.h[e.v[1]]) / 2.0).abs() < 1e-10);
        }
        let rep = check_triangle_compat(&r, &rates, 1e-10).unwrap();
        prop_assert!(rep.passed());
        prop_assert!(rep.omega_spread < 1e-9 && rep.sigma_spread < 1e-9);
    }
}

#[test]
fn uniform_scaling_reconstructs_log_factor() {
    let (m, z) = shapes::wheel(6);
    let a = Realization::new(&m, z).unwrap();
    let b = a.mapped(|p| p * 2.5).unwrap();
    let rep = check_conformal_equiv(&a, &b, 1e-9).unwrap();
    for u in rep.vertex_values.unwrap() {
        assert!((u - 2.5f64.ln()).abs() < 1e-13);
    }
}
