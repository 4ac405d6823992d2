//! Dynamical Lie algebra generation by commutator closure, and the
//! frustration graph of the resulting Pauli basis.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Default cap on the algebra dimension.
pub const DEFAULT_MAX_DIM: usize = 1 << 16;

/// Pauli-string basis of the algebra generated by a Hamiltonian's terms.
#[derive(Debug, Clone, Serialize)]
pub struct Dla {
    n_qubits: usize,
    basis: Vec<PauliString>,
    /// Position of each Hamiltonian term in `basis`, in the Hamiltonian's
    /// own term order.
    generator_indices: Vec<usize>,
    #[serde(skip)]
    index: HashMap<PauliString, usize>,
}

impl Dla {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Basis strings in canonical order.
    pub fn basis(&self) -> &[PauliString] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }

    pub fn index_of(&self, p: &PauliString) -> Option<usize> {
        self.index.get(&p.canonical()).copied()
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.index.contains_key(&p.canonical())
    }
}

/// Closes the non-identity terms of `hamiltonian` under commutation.
///
/// Each round commutes only the newly found strings against the whole basis,
/// so every pair is evaluated once.
pub fn generate_dla(hamiltonian: &PauliSum, max_dim: usize) -> Result<Dla> {
    let generators: Vec<PauliString> =
        hamiltonian.strings().filter(|p| !p.is_identity()).copied().collect();
    if generators.is_empty() {
        return Err(Error::Precondition("Hamiltonian has no non-identity terms".into()));
    }
    if max_dim < generators.len() {
        return Err(Error::Precondition(format!(
            "max_dim {max_dim} is below the number of Hamiltonian terms {}",
            generators.len()
        )));
    }

    let mut basis: Vec<PauliString> = generators.clone();
    let mut seen: HashSet<PauliString> = basis.iter().copied().collect();
    let mut frontier_start = 0;
    while frontier_start < basis.len() {
        let frontier_end = basis.len();
        let mut found = Vec::new();
        for i in frontier_start..frontier_end {
            let a = basis[i];
            for b in &basis[..frontier_end] {
                if let Some(c) = a.commutator_unchecked(b) {
                    if seen.insert(c) {
                        found.push(c);
                    }
                }
            }
        }
        // Products among this round's discoveries are picked up next round.
        if basis.len() + found.len() > max_dim {
            return Err(Error::Capacity { limit: max_dim, reached: basis.len() + found.len() });
        }
        basis.extend(found);
        frontier_start = frontier_end;
    }

    basis.sort();
    let index: HashMap<PauliString, usize> =
        basis.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let generator_indices = generators.iter().map(|g| index[g]).collect();
    Ok(Dla { n_qubits: hamiltonian.n_qubits(), basis, generator_indices, index })
}

/// Anticommutation graph over the DLA basis with its connected components.
#[derive(Debug, Clone, Serialize)]
pub struct FrustrationGraph {
    adjacency: Vec<Vec<usize>>,
    /// Component id per vertex; ids are numbered by smallest member vertex.
    labels: Vec<usize>,
    n_components: usize,
}

impl FrustrationGraph {
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertices grouped per component, each group ascending.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_components];
        for (v, &c) in self.labels.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

pub fn frustration_components(dla: &Dla) -> FrustrationGraph {
    let basis = dla.basis();
    let n = basis.len();
    let mut adjacency = vec![Vec::new(); n];
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if !basis[i].commutes_unchecked(&basis[j]) {
                adjacency[i].push(j);
                adjacency[j].push(i);
                uf.union(i, j);
            }
        }
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(n);
    for v in 0..n {
        let root = uf.find(v);
        let next = ids.len();
        labels.push(*ids.entry(root).or_insert(next));
    }
    FrustrationGraph { adjacency, labels, n_components: ids.len() }
}

/// A basis string anticommuting with both `b1` and `b2`.
///
/// Two commuting strings in one component are always at distance two, so a
/// witness exists; it is the first such string in canonical order.
pub fn distance2_witness(
    dla: &Dla,
    graph: &FrustrationGraph,
    b1: &PauliString,
    b2: &PauliString,
) -> Result<PauliString> {
    let i1 = dla
        .index_of(b1)
        .ok_or_else(|| Error::Precondition(format!("{b1} is not in the algebra")))?;
    let i2 = dla
        .index_of(b2)
        .ok_or_else(|| Error::Precondition(format!("{b2} is not in the algebra")))?;
    if !b1.commutes(b2)? {
        return Err(Error::Precondition(format!("{b1} and {b2} anticommute")));
    }
    if graph.component_of(i1) != graph.component_of(i2) {
        return Err(Error::WitnessNotGuaranteed(format!(
            "{b1} and {b2} lie in different frustration components"
        )));
    }
    let n2: HashSet<usize> = graph.neighbors(i2).iter().copied().collect();
    graph
        .neighbors(i1)
        .iter()
        .copied()
        .filter(|v| n2.contains(v))
        .min()
        .map(|v| dla.basis()[v])
        .ok_or_else(|| {
            Error::Consistency(format!("no common neighbour of {b1} and {b2} in one component"))
        })
}
