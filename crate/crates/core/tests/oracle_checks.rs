mod common;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use redcard::adjoint::{cost_fr, cost_full, Direction};
use redcard::circuits::{build_compressed_tfxy_circuit, build_evolution_circuit, Gate};
use redcard::models::{build, ModelSpec};
use redcard::optimize::{irrational_weights, run_redcard, run_redcard_with, AnsatzKind, SynthesisConfig};
use redcard::oracle::*;
use redcard::qsim::{state_prep_circuit, AncillaMode};
use redcard::{conjugate, inner, Ansatz, PauliString, PauliSum};

fn dense_distance(a: &DenseOperator, b: &DenseOperator) -> f64 {
    a.sub(b).unwrap().frobenius_norm()
}

fn target_unitary(h: &PauliSum, t: f64) -> DenseOperator {
    expm_i(&to_dense(h).unwrap(), t).unwrap()
}

#[test]
fn conjugation_matches_dense() {
    let mut r = rng(11);
    for n in 1..=4 {
        for _ in 0..10 {
            let a = random_ansatz(&mut r, n, 6);
            let op = random_sum(&mut r, n, 5);
            let u = ansatz_unitary(&a, n).unwrap();
            let want = u.mul(&to_dense(&op).unwrap()).unwrap().mul(&u.adjoint()).unwrap();
            let got = to_dense(&conjugate(&a, &op).unwrap()).unwrap();
            assert!(dense_distance(&got, &want) < 1e-10);

            let back = to_dense(&conjugate(&a.dagger(), &op).unwrap()).unwrap();
            let want = u.adjoint().mul(&to_dense(&op).unwrap()).unwrap().mul(&u).unwrap();
            assert!(dense_distance(&back, &want) < 1e-10);
        }
    }
}

#[test]
fn dagger_ansatz_unitary_is_adjoint() {
    let mut r = rng(3);
    let a = random_ansatz(&mut r, 3, 5);
    let u = ansatz_unitary(&a, 3).unwrap();
    let ud = ansatz_unitary(&a.dagger(), 3).unwrap();
    assert_eq!(a.dagger().direction, Direction::Dagger);
    assert!(dense_distance(&u.adjoint(), &ud) < 1e-14);
}

#[test]
fn inner_matches_dense_trace() {
    let mut r = rng(5);
    for _ in 0..20 {
        let a = random_sum(&mut r, 3, 6);
        let b = random_sum(&mut r, 3, 6);
        let da = to_dense(&a).unwrap();
        let db = to_dense(&b).unwrap();
        let want = da.mul(&db).unwrap().trace() / 8.0;
        assert!((inner(&a, &b).unwrap() - want.re).abs() < 1e-12);
        assert!(want.im.abs() < 1e-12);
        // the dense form of Hermitian operators is the same number
        assert!((da.inner(&db).unwrap() - want).norm() < 1e-12);
    }
}

#[test]
fn cost_functions_match_dense() {
    let mut r = rng(8);
    for _ in 0..10 {
        let h = random_sum(&mut r, 3, 6);
        let b = random_nonidentity(&mut r, 3);
        let a = random_ansatz(&mut r, 3, 4);
        let u = ansatz_unitary(&a, 3).unwrap();
        let kb = u.mul(&pauli_matrix(&b).unwrap()).unwrap().mul(&u.adjoint()).unwrap();
        let want = kb.mul(&to_dense(&h).unwrap()).unwrap().trace().re / 8.0;
        assert!((cost_fr(&a, &b, &h, &[]).unwrap() - want).abs() < 1e-12);

        let hb = [b];
        let v = PauliSum::single(b, 0.7);
        assert!((cost_full(&a, &v, &h, &hb).unwrap() - 0.7 * want).abs() < 1e-12);
    }
}

#[test]
fn to_dense_is_linear_and_hermitian() {
    let mut r = rng(21);
    let a = random_sum(&mut r, 4, 8);
    let b = random_sum(&mut r, 4, 8);
    let sum = to_dense(&a.add(&b).unwrap()).unwrap();
    let parts = to_dense(&a).unwrap().matrix() + to_dense(&b).unwrap().matrix();
    assert!((sum.matrix() - parts).norm() < 1e-12);
    assert!(sum.hermitian_deviation() < 1e-12);
    assert!((dense_frobenius_norm(&a) - to_dense(&a).unwrap().frobenius_norm()).abs() < 1e-10);
}

#[test]
fn random_hermitian_exponential_is_unitary() {
    let mut r = rng(2);
    for _ in 0..5 {
        let h = random_sum(&mut r, 3, 10);
        let u = expm_i(&to_dense(&h).unwrap(), r.random_range(-3.0..3.0)).unwrap();
        assert!(u.unitarity_deviation() < 1e-10);
    }
}

#[test]
fn expm_composes_in_time() {
    let h = build(&ModelSpec::tfim(3, 1.0, 0.5)).unwrap();
    let u1 = target_unitary(&h, 0.4);
    let u2 = target_unitary(&h, 0.9);
    assert!(dense_distance(&u1.mul(&u2).unwrap(), &target_unitary(&h, 1.3)) < 1e-10);
}

#[test]
fn rotation_circuit_matches_ansatz_factor() {
    // exp(iαP) is a rotation by -2α
    let p: PauliString = "YXZ".parse().unwrap();
    let mut c = redcard::Circuit::new(3, 0);
    c.push(Gate::PauliRotation { string: p, angle: -2.0 * 0.41 }).unwrap();
    let want = ansatz_unitary(&Ansatz::new(vec![(p, 0.41)]), 3).unwrap();
    assert!(dense_distance(&circuit_unitary(&c).unwrap(), &want) < 1e-12);
}

#[test]
fn tfim_two_site_single_fragment_is_exact() {
    let s = setup(&ModelSpec::tfim(2, 1.0, 0.5));
    let res = run_redcard(&s.h, &SynthesisConfig::default()).unwrap();
    assert_eq!(res.fragments[0].factors.len(), 2);
    assert!(res.residual <= 1e-6, "residual {}", res.residual);
    // K h K† reproduces H
    let k = res.full_ansatz();
    let back = conjugate(&k, &res.h.filtered(|p| res.h_basis.contains(p))).unwrap();
    let d = to_dense(&back).unwrap().sub(&to_dense(&s.h).unwrap()).unwrap().frobenius_norm();
    assert!(d <= 1e-5 * dense_frobenius_norm(&s.h));
}

#[test]
fn zero_time_circuit_is_identity() {
    let s = setup(&ModelSpec::tfim(3, 1.0, 0.5));
    let res = run_redcard_with(&s.h, &s.structure, &SynthesisConfig::default()).unwrap();
    let c = build_evolution_circuit(&res, &s.structure, 0.0, false).unwrap();
    let u = circuit_unitary(&c).unwrap();
    assert!(dense_distance(&u, &DenseOperator::identity(3)) < 1e-10);
}

#[test]
fn tfim_three_sites_evolution_matches_expm() {
    let s = setup(&ModelSpec::tfim(3, 1.0, 0.5));
    let res = run_redcard_with(&s.h, &s.structure, &SynthesisConfig::default().with_seed(4)).unwrap();
    let c = build_evolution_circuit(&res, &s.structure, 1.7, false).unwrap();
    let d = unitary_distance(&circuit_unitary(&c).unwrap(), &target_unitary(&s.h, 1.7)).unwrap();
    assert!(d <= 10.0 * res.residual + 1e-9, "distance {d}, residual {}", res.residual);
}

#[test]
fn tfim_four_site_block_structure() {
    let s = setup(&ModelSpec::tfim(4, 1.0, 0.5));
    let res = run_redcard_with(&s.h, &s.structure, &SynthesisConfig::default()).unwrap();
    let c = build_evolution_circuit(&res, &s.structure, 1.0, false).unwrap();
    let mut blocks = vec![0usize];
    for g in &c.gates {
        match g {
            Gate::Barrier => blocks.push(0),
            _ => *blocks.last_mut().unwrap() += 1,
        }
    }
    blocks.retain(|&b| b > 0);
    assert_eq!(blocks, vec![6, 4, 2, 4, 2, 4, 6]);
}

#[test]
fn center_angles_compose() {
    let s = setup(&ModelSpec::tfxy(3, 1.0, 0.6, 0.5));
    let res = run_redcard_with(&s.h, &s.structure, &SynthesisConfig::default()).unwrap();
    let u = |t: f64| circuit_unitary(&build_evolution_circuit(&res, &s.structure, t, false).unwrap()).unwrap();
    let joint = u(0.8 + 1.9);
    let split = u(0.8).mul(&u(1.9)).unwrap();
    assert!(dense_distance(&joint, &split) < 1e-10);
}

#[test]
fn compressed_three_sites_matches_expm() {
    let s = setup(&ModelSpec::tfim(3, 1.0, 0.5));
    let cfg = SynthesisConfig { ansatz: AnsatzKind::Compressed, ..SynthesisConfig::default() };
    let res = run_redcard_with(&s.h, &s.structure, &cfg).unwrap();
    assert!(res.converged);
    for t in [0.3, 1.7] {
        let c = build_compressed_tfxy_circuit(&res, &s.structure, t, false).unwrap();
        assert!(c.gates.iter().all(|g| match g {
            Gate::PauliRotation { string, .. } => string.weight() <= 2,
            _ => true,
        }));
        let d = unitary_distance(&circuit_unitary(&c).unwrap(), &target_unitary(&s.h, t)).unwrap();
        assert!(d <= 10.0 * res.residual * dense_frobenius_norm(&s.h) * t + 1e-8, "t={t}: {d}");
    }
}

#[test]
fn compressed_and_product_both_reproduce_evolution() {
    for l in 2..=4 {
        let s = setup(&ModelSpec::tfim(l, 1.0, 0.5));
        for kind in [AnsatzKind::Product, AnsatzKind::Compressed] {
            let cfg = SynthesisConfig { ansatz: kind, ..SynthesisConfig::default().with_seed(l as u64) };
            let res = run_redcard_with(&s.h, &s.structure, &cfg).unwrap();
            let c = match kind {
                AnsatzKind::Product => build_evolution_circuit(&res, &s.structure, 1.0, false),
                AnsatzKind::Compressed => build_compressed_tfxy_circuit(&res, &s.structure, 1.0, false),
            }
            .unwrap();
            let d = unitary_distance(&circuit_unitary(&c).unwrap(), &target_unitary(&s.h, 1.0)).unwrap();
            assert!(d <= 10.0 * res.residual * dense_frobenius_norm(&s.h) + 1e-8, "l={l} {kind:?}: {d}");
        }
    }
}

#[test]
fn spectrum_of_h_matches_hamiltonian() {
    for spec in [
        ModelSpec::tfxy(6, 1.0, 0.7, 0.5),
        ModelSpec::tfim(5, 1.0, 0.5),
        ModelSpec::xy(5, 1.0, 0.6),
        ModelSpec::heisenberg(4, 1.0, 0.8, 0.6),
    ] {
        let h = build(&spec).unwrap();
        let res = run_redcard(&h, &SynthesisConfig::default().with_seed(9)).unwrap();
        assert!(res.converged, "{spec:?}");
        let center = res.h.filtered(|p| res.h_basis.contains(p));
        let want = to_dense(&h).unwrap().eigenvalues().unwrap();
        let got = to_dense(&center).unwrap().eigenvalues().unwrap();
        let tol = 10.0 * res.residual * dense_frobenius_norm(&h);
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).abs() <= tol, "{spec:?}: {a} vs {b} (tol {tol})");
        }
    }
}

fn sigma_state(sigma: &PauliString) -> DenseOperator {
    let n = sigma.n_qubits();
    let dim = (1usize << n) as f64;
    let id = DenseOperator::identity(n);
    let s = pauli_matrix(sigma).unwrap();
    DenseOperator::new(n, (id.matrix() + s.matrix()) / Complex64::new(dim, 0.0)).unwrap()
}

#[test]
fn state_prep_examples() {
    for (s, cnots) in [("ZI", 1), ("ZZ", 2), ("XIY", 3)] {
        let sigma: PauliString = s.parse().unwrap();
        for mode in [AncillaMode::Single, AncillaMode::PerQubit] {
            let c = state_prep_circuit(&sigma, mode).unwrap();
            assert_eq!(c.cnot_count(), cnots);
            let rho = simulate_circuit_density(&c).unwrap();
            assert!(dense_distance(&rho, &sigma_state(&sigma)) < 1e-12, "{s} {mode:?}");
        }
    }
}

#[test]
fn statevector_agrees_with_density() {
    let mut c = redcard::Circuit::new(2, 0);
    c.push(Gate::H { qubit: 0 }).unwrap();
    c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
    c.push(Gate::S { qubit: 1 }).unwrap();
    let v = simulate_statevector(&c).unwrap();
    let rho = simulate_circuit_density(&c).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert!((v[i] * v[j].conj() - rho.matrix()[(i, j)]).norm() < 1e-14);
        }
    }
}

#[test]
fn standard_weights_feed_cost_full() {
    let s = setup(&ModelSpec::tfim(2, 1.0, 0.5));
    let w = irrational_weights(s.structure.h_basis.len());
    let v = PauliSum::from_terms(2, s.structure.h_basis.iter().copied().zip(w.iter().copied())).unwrap();
    let f = cost_full(&Ansatz::identity(), &v, &s.h, &s.structure.h_basis).unwrap();
    let want: f64 = s.structure.h_basis.iter().zip(&w).map(|(p, g)| g * s.h.coeff(p)).sum();
    assert!((f - want).abs() < 1e-15);
}
