#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redcard::algebra::{frustration_components, generate_dla, Dla, FrustrationGraph, DEFAULT_MAX_DIM};
use redcard::cartan::{CartanStructure, DecomposeOptions};
use redcard::models::{build, ModelSpec};
use redcard::{Ansatz, PauliString, PauliSum};

pub struct Setup {
    pub h: PauliSum,
    pub dla: Dla,
    pub graph: FrustrationGraph,
    pub structure: CartanStructure,
}

pub fn setup(spec: &ModelSpec) -> Setup {
    let h = build(spec).unwrap();
    let dla = generate_dla(&h, DEFAULT_MAX_DIM).unwrap();
    let graph = frustration_components(&dla);
    let structure = CartanStructure::build(&dla, &h, &DecomposeOptions::default()).unwrap();
    Setup { h, dla, graph, structure }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_string(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
    let mask = (1u128 << n) - 1;
    PauliString::from_masks(n, rng.random::<u128>() & mask, rng.random::<u128>() & mask).unwrap()
}

pub fn random_nonidentity(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
    loop {
        let p = random_string(rng, n);
        if !p.is_identity() {
            return p;
        }
    }
}

pub fn random_sum(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> PauliSum {
    let mut s = PauliSum::zero(n).unwrap();
    for _ in 0..terms {
        s.add_term(random_string(rng, n), rng.random_range(-1.0..1.0)).unwrap();
    }
    s
}

pub fn random_ansatz(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Ansatz {
    Ansatz::new((0..len).map(|_| (random_nonidentity(rng, n), rng.random_range(0.0..std::f64::consts::PI))).collect())
}

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}
