mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use redcard::adjoint::{conjugate, cost_fr, inner};
use redcard::algebra::{distance2_witness, generate_dla, DEFAULT_MAX_DIM};
use redcard::cartan::{involution_half, k_set_size, Half};
use redcard::models::{build, Family, ModelSpec};
use redcard::optimize::{fit_sinusoid, minimize_fragment, ExactEvaluator, StopRule};
use redcard::oracle::{pauli_matrix, to_dense};
use redcard::qsim::{state_prep_circuit, AncillaMode};
use redcard::{Ansatz, PauliString, PauliSum};

fn string(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u128 << n) - 1;
    (any::<u128>(), any::<u128>()).prop_map(move |(x, z)| PauliString::from_masks(n, x & mask, z & mask).unwrap())
}

fn nonidentity(n: usize) -> impl Strategy<Value = PauliString> {
    string(n).prop_filter("identity", |p| !p.is_identity())
}

fn pair() -> impl Strategy<Value = (PauliString, PauliString)> {
    (1usize..=6).prop_flat_map(|n| (string(n), string(n)))
}

fn sum(n: usize) -> impl Strategy<Value = PauliSum> {
    prop::collection::vec((string(n), -1.0f64..1.0), 1..8).prop_map(move |terms| {
        let mut s = PauliSum::zero(n).unwrap();
        for (p, c) in terms {
            s.add_term(p, c).unwrap();
        }
        s
    })
}

fn ansatz(n: usize) -> impl Strategy<Value = Ansatz> {
    prop::collection::vec((nonidentity(n), 0.0..PI), 0..6).prop_map(Ansatz::new)
}

fn model() -> impl Strategy<Value = ModelSpec> {
    (0usize..4, 2usize..=5, 0.3f64..1.5, 0.3f64..1.5, 0.3f64..1.5).prop_map(|(f, l, a, b, c)| match f {
        0 => ModelSpec::tfim(l, a, b),
        1 => ModelSpec::tfxy(l, a, b, c),
        2 => ModelSpec::xy(l, a, b),
        _ => ModelSpec::heisenberg(l.min(4), a, b, c),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiply_matches_dense((a, b) in pair()) {
        let prod = a.multiply(&b).unwrap();
        let want = pauli_matrix(&a).unwrap().mul(&pauli_matrix(&b).unwrap()).unwrap();
        let got = pauli_matrix(&prod).unwrap();
        prop_assert_eq!(got.matrix(), want.matrix());
    }

    #[test]
    fn commutation_matches_dense((a, b) in pair()) {
        let (da, db) = (pauli_matrix(&a).unwrap(), pauli_matrix(&b).unwrap());
        let ab = da.mul(&db).unwrap();
        let ba = db.mul(&da).unwrap();
        let commutes = ab.sub(&ba).unwrap().frobenius_norm() == 0.0;
        prop_assert_eq!(a.commutes(&b).unwrap(), commutes);
        prop_assert_eq!(a.commutes(&b).unwrap(), b.commutes(&a).unwrap());
        prop_assert!(a.commutes(&a).unwrap());
        match a.commutator_basis(&b).unwrap() {
            None => prop_assert!(commutes),
            Some(c) => {
                // [A, B] = 2AB, and AB is a phase times c
                prop_assert!(!commutes);
                prop_assert_eq!(c.phase(), 0);
                prop_assert_eq!(c.canonical(), a.multiply(&b).unwrap().canonical());
            }
        }
    }

    #[test]
    fn left_multiplication_is_an_involution((a, b) in pair()) {
        let back = a.multiply(&a.multiply(&b).unwrap()).unwrap();
        prop_assert_eq!(back.canonical(), b.canonical());
    }

    #[test]
    fn text_round_trip(p in (1usize..=8).prop_flat_map(string)) {
        let parsed: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(parsed, p);
        let sparse = PauliString::from_sparse(&p.to_sparse_string(), p.n_qubits()).unwrap();
        prop_assert_eq!(sparse, p.canonical());
    }

    #[test]
    fn conjugation_preserves_norm_and_form(a in ansatz(4), x in sum(4), y in sum(4)) {
        let cx = conjugate(&a, &x).unwrap();
        let cy = conjugate(&a, &y).unwrap();
        prop_assert!((cx.norm() - x.norm()).abs() <= 1e-10);
        prop_assert!((inner(&cx, &cy).unwrap() - inner(&x, &y).unwrap()).abs() <= 1e-10);
        let back = conjugate(&a.dagger(), &cx).unwrap();
        prop_assert!(back.add(&x.scaled(-1.0)).unwrap().norm() <= 1e-10);
    }

    #[test]
    fn single_angle_cost_is_a_sinusoid(a in ansatz(3), b in nonidentity(3), h in sum(3), idx in any::<prop::sample::Index>(), probe in 0.0..PI) {
        prop_assume!(!a.is_empty());
        let j = idx.index(a.len());
        let f = |theta: f64| {
            let mut q = a.clone();
            q.set_angle(j, theta);
            cost_fr(&q, &b, &h, &[]).unwrap()
        };
        let (ca, cb, cc) = fit_sinusoid(f(0.0), f(PI / 4.0), f(PI / 2.0));
        let predicted = ca * (2.0 * probe).cos() + cb * (2.0 * probe).sin() + cc;
        prop_assert!((predicted - f(probe)).abs() <= 1e-10);
        prop_assert!((f(probe) - f(probe + PI)).abs() <= 1e-10);
    }

    #[test]
    fn cartan_closure_on_models(spec in model()) {
        let s = setup(&spec);
        for (i, a) in s.dla.basis().iter().enumerate() {
            for b in &s.dla.basis()[i + 1..] {
                if let Some(c) = a.commutator_basis(b).unwrap() {
                    prop_assert!(s.dla.contains(&c));
                    let want = if involution_half(a) == involution_half(b) { Half::K } else { Half::M };
                    prop_assert_eq!(involution_half(&c), want);
                }
            }
        }
        prop_assert!(s.h.strings().all(|p| involution_half(p) == Half::M));
    }

    #[test]
    fn r_symmetric_subspaces_are_cartan(spec in model()) {
        let s = setup(&spec);
        let b = &s.structure.b_basis;
        for r in 0..=b.len() {
            let sym: Vec<PauliString> = s
                .dla
                .basis()
                .iter()
                .copied()
                .filter(|p| b[..r].iter().all(|g| p.commutes(g).unwrap()))
                .collect();
            for (i, x) in sym.iter().enumerate() {
                for y in &sym[i + 1..] {
                    if let Some(c) = x.commutator_basis(y).unwrap() {
                        prop_assert!(sym.contains(&c), "r={} [{}, {}]", r, x, y);
                        let want = if involution_half(x) == involution_half(y) { Half::K } else { Half::M };
                        prop_assert_eq!(involution_half(&c), want);
                    }
                }
            }
        }
    }

    #[test]
    fn closure_is_idempotent(spec in model()) {
        let s = setup(&spec);
        let all = PauliSum::from_terms(s.h.n_qubits(), s.dla.basis().iter().map(|p| (*p, 1.0))).unwrap();
        let again = generate_dla(&all, DEFAULT_MAX_DIM).unwrap();
        prop_assert_eq!(again.basis(), s.dla.basis());
    }

    #[test]
    fn component_invariants(spec in model()) {
        let s = setup(&spec);
        let k = &s.structure.k_basis;
        let b = &s.structure.b_basis;
        for (i, b1) in b.iter().enumerate() {
            for b2 in &b[i + 1..] {
                let (v1, v2) = (s.dla.index_of(b1).unwrap(), s.dla.index_of(b2).unwrap());
                if s.graph.component_of(v1) != s.graph.component_of(v2) {
                    continue;
                }
                let w = distance2_witness(&s.dla, &s.graph, b1, b2).unwrap();
                prop_assert!(!w.commutes(b1).unwrap() && !w.commutes(b2).unwrap());
                // |k¹₂| = |k²₁| and |k¹| = |k²|
                prop_assert_eq!(k_set_size(k, &[*b1], &[*b2]), k_set_size(k, &[*b2], &[*b1]));
                prop_assert_eq!(k_set_size(k, &[*b1], &[]), k_set_size(k, &[*b2], &[]));
            }
        }
        // a non-empty k¹²³ needs b₁b₂b₃ in m
        let m = &s.structure.m_basis;
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                for l in j + 1..b.len() {
                    let trio = [b[i], b[j], b[l]];
                    let prod = b[i].multiply(&b[j]).unwrap().multiply(&b[l]).unwrap().canonical();
                    if !m.contains(&prod) {
                        prop_assert_eq!(k_set_size(k, &trio, &[]), 0);
                    }
                }
            }
        }
        let nonempty = s.structure.fragments.iter().filter(|f| !f.is_empty()).count();
        prop_assert!(nonempty <= s.h.n_qubits());
    }

    #[test]
    fn models_land_in_m(spec in model()) {
        let h = build(&spec).unwrap();
        prop_assert!(h.iter().all(|(p, c)| c.is_finite() && involution_half(p) == Half::M));
        prop_assert!(to_dense(&h).unwrap().hermitian_deviation() < 1e-12);
    }

    #[test]
    fn state_prep_cnot_count(p in (2usize..=6).prop_flat_map(nonidentity)) {
        let c = state_prep_circuit(&p, AncillaMode::Single).unwrap();
        prop_assert_eq!(c.cnot_count(), p.n_qubits() + p.weight() - 2);
    }
}

#[test]
fn exact_sweeps_descend_and_stage() {
    for (seed, spec) in [ModelSpec::tfim(3, 1.0, 0.5), ModelSpec::tfxy(4, 0.8, 1.1, 0.4), ModelSpec::heisenberg(3, 1.0, 0.7, 0.4)]
        .into_iter()
        .enumerate()
    {
        let s = setup(&spec);
        let mut r = rng(seed as u64);
        let mut h_r = s.h.clone();
        let b = &s.structure.b_basis;
        for (i, frag) in s.structure.fragments.iter().enumerate() {
            let init: Vec<f64> = frag.iter().map(|_| rand::Rng::random_range(&mut r, 0.0..PI)).collect();
            let mut ev = ExactEvaluator::new();
            let out = minimize_fragment(
                &mut ev, frag, &init, &b[i], &b[..i], &h_r, &s.structure.h_basis, &StopRule::default(), 100_000,
            )
            .unwrap();
            let trace = &out.sweep.cost_trace;
            assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{spec:?} fragment {i}: {trace:?}");
            assert!(out.staging_residual <= 1e-4, "{spec:?} fragment {i}: {}", out.staging_residual);
            // every surviving term commutes with b₁ … b_r
            let bad: f64 = out
                .h_next
                .iter()
                .filter(|(p, _)| b[..=i].iter().any(|g| !p.commutes(g).unwrap()))
                .map(|(_, c)| c * c)
                .sum();
            assert!(bad.sqrt() <= 1e-4 * s.h.norm());
            h_r = out.h_next;
        }
    }
}

#[test]
fn tfim_dimension_law() {
    for l in 2..=6 {
        let h = build(&ModelSpec::tfim(l, 1.0, 0.5)).unwrap();
        assert_eq!(generate_dla(&h, DEFAULT_MAX_DIM).unwrap().dim(), l * (2 * l - 1));
    }
}

#[test]
fn fragment_shapes_by_family() {
    // TFIM/TFXY: 2(l-r); XY: two components with equal plateaus; Heisenberg: nonlinear
    for l in 2..=6 {
        for fam in [Family::Tfim, Family::Tfxy] {
            let spec = ModelSpec { family: fam, ..ModelSpec::tfxy(l, 1.0, 0.7, 0.5) };
            let sizes = setup(&spec).structure.fragment_sizes();
            assert_eq!(sizes, (1..=l).map(|r| 2 * (l - r)).collect::<Vec<_>>());
        }
        let xy = setup(&ModelSpec::xy(l, 1.0, 0.6));
        assert_eq!(xy.graph.n_components(), 2);
    }
    let heis = setup(&ModelSpec::heisenberg(5, 1.0, 0.8, 0.6)).structure.fragment_sizes();
    assert!(heis.windows(2).all(|w| w[0] > w[1]));
    let steps: Vec<usize> = heis.windows(2).map(|w| w[0] - w[1]).collect();
    assert!(steps.windows(2).any(|w| w[0] != w[1]), "{heis:?}");
}
