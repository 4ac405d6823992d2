//! Cartan decomposition `g = k ⊕ m`, Cartan subalgebra construction and
//! reduction, and fragmentation of `k` against an ordered generator set.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{Dla, FrustrationGraph};
use crate::error::{Error, Result};
use crate::pauli::{Parity, PauliString, PauliSum};

/// Which half of the decomposition a string belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    K,
    M,
}

/// Default involution: odd number of `Y`s goes to `k`.
pub fn involution_half(p: &PauliString) -> Half {
    match p.y_parity() {
        Parity::Odd => Half::K,
        Parity::Even => Half::M,
    }
}

/// Splits the algebra by Y-parity and validates the Cartan commutation
/// relations together with `iH ∈ m`.
pub fn split_km(dla: &Dla, hamiltonian: &PauliSum) -> Result<(Vec<PauliString>, Vec<PauliString>)> {
    for p in hamiltonian.strings().filter(|p| !p.is_identity()) {
        if involution_half(p) == Half::K {
            return Err(Error::InvolutionIncompatible(p.to_string()));
        }
    }
    let basis = dla.basis();
    for (i, a) in basis.iter().enumerate() {
        let ha = involution_half(a);
        for b in &basis[i + 1..] {
            let Some(c) = a.commutator_unchecked(b) else { continue };
            if !dla.contains(&c) {
                return Err(Error::Consistency(format!("[{a}, {b}] ∝ {c} is outside the algebra")));
            }
            let want = if ha == involution_half(b) { Half::K } else { Half::M };
            if involution_half(&c) != want {
                return Err(Error::Consistency(format!(
                    "[{a}, {b}] ∝ {c} breaks the Cartan relations"
                )));
            }
        }
    }
    let (k, m): (Vec<_>, Vec<_>) = basis.iter().partition(|p| involution_half(p) == Half::K);
    Ok((k, m))
}

/// Greedy maximal commuting subset of `m_basis`.
///
/// The seed (if any) goes first; the remaining candidates are scanned by
/// Pauli weight, then canonical order, so single-site strings are preferred.
pub fn build_cartan_subalgebra(
    m_basis: &[PauliString],
    seed: Option<&PauliString>,
) -> Result<Vec<PauliString>> {
    if m_basis.is_empty() {
        return Err(Error::Precondition("m is empty".into()));
    }
    let mut order: Vec<PauliString> = m_basis.to_vec();
    order.sort_by(|a, b| a.weight().cmp(&b.weight()).then(a.cmp(b)));
    if let Some(s) = seed {
        let s = s.canonical();
        let pos = order
            .iter()
            .position(|p| *p == s)
            .ok_or_else(|| Error::Precondition(format!("seed {s} is not in m")))?;
        let s = order.remove(pos);
        order.insert(0, s);
    }
    let mut h: Vec<PauliString> = Vec::new();
    for p in order {
        if h.iter().all(|q| q.commutes_unchecked(&p)) {
            h.push(p);
        }
    }
    Ok(h)
}

/// Echelon form over GF(2) for commuting strings, whose products are XORs
/// of their symplectic vectors. Each row remembers which inputs it combines.
#[derive(Debug, Clone, Default)]
struct Gf2Echelon {
    rows: Vec<((u128, u128), u128)>,
}

fn leading_bit(v: (u128, u128)) -> Option<u32> {
    if v.1 != 0 {
        Some(128 + 127 - v.1.leading_zeros())
    } else if v.0 != 0 {
        Some(127 - v.0.leading_zeros())
    } else {
        None
    }
}

impl Gf2Echelon {
    /// Reduces `v`, returning the remainder and the combination consumed.
    fn reduce(&self, mut v: (u128, u128)) -> ((u128, u128), u128) {
        let mut combo = 0u128;
        for &(row, c) in &self.rows {
            let lead = leading_bit(row).expect("rows are nonzero");
            let bit = if lead >= 128 { (v.1 >> (lead - 128)) & 1 } else { (v.0 >> lead) & 1 };
            if bit == 1 {
                v = (v.0 ^ row.0, v.1 ^ row.1);
                combo ^= c;
            }
        }
        (v, combo)
    }

    /// Inserts `v` tagged as generator `tag` if it is independent.
    fn insert(&mut self, v: (u128, u128), tag: usize) -> bool {
        let (rem, combo) = self.reduce(v);
        if rem == (0, 0) {
            return false;
        }
        self.rows.push((rem, combo ^ (1u128 << tag)));
        self.rows.sort_by_key(|(r, _)| std::cmp::Reverse(leading_bit(*r)));
        true
    }
}

fn symplectic(p: &PauliString) -> (u128, u128) {
    (p.x_mask(), p.z_mask())
}

/// Independent generating subset `b ⊆ h` with `h ⊆ M(b)`, in `h` order.
pub fn reduce_generators(h_basis: &[PauliString]) -> Result<Vec<PauliString>> {
    for (i, a) in h_basis.iter().enumerate() {
        for b in &h_basis[i + 1..] {
            if !a.commutes(b)? {
                return Err(Error::Precondition(format!("{a} and {b} anticommute")));
            }
        }
    }
    let mut ech = Gf2Echelon::default();
    let mut out = Vec::new();
    for p in h_basis {
        if ech.insert(symplectic(p), out.len()) {
            out.push(*p);
        }
    }
    Ok(out)
}

/// Indices into `generators` whose product equals `target` up to sign, or
/// `None` when `target` is outside their multiplicative closure.
pub fn express_as_product(target: &PauliString, generators: &[PauliString]) -> Option<Vec<usize>> {
    let mut ech = Gf2Echelon::default();
    for (i, g) in generators.iter().enumerate() {
        ech.insert(symplectic(g), i);
    }
    let (rem, combo) = ech.reduce(symplectic(target));
    (rem == (0, 0)).then(|| (0..generators.len()).filter(|i| combo >> i & 1 == 1).collect())
}

/// Number of `k` strings anticommuting with every string in `anti` and
/// commuting with every string in `comm`.
pub fn k_set_size(k_basis: &[PauliString], anti: &[PauliString], comm: &[PauliString]) -> usize {
    k_basis
        .iter()
        .filter(|k| {
            anti.iter().all(|a| !k.commutes_unchecked(a)) && comm.iter().all(|c| k.commutes_unchecked(c))
        })
        .count()
}

/// Fragments of `k` against an ordered generator list, plus the strings that
/// commute with every generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fragmentation {
    pub fragments: Vec<Vec<PauliString>>,
    pub residual: Vec<PauliString>,
}

impl Fragmentation {
    pub fn sizes(&self) -> Vec<usize> {
        self.fragments.iter().map(Vec::len).collect()
    }
}

/// Assigns each `k` string to the first generator it anticommutes with.
/// Fragment contents keep the order of `k_basis`.
pub fn fragment_k(k_basis: &[PauliString], b_basis: &[PauliString]) -> Fragmentation {
    let mut fragments = vec![Vec::new(); b_basis.len()];
    let mut residual = Vec::new();
    for k in k_basis {
        match b_basis.iter().position(|b| !k.commutes_unchecked(b)) {
            Some(r) => fragments[r].push(*k),
            None => residual.push(*k),
        }
    }
    Fragmentation { fragments, residual }
}

/// Moves generators whose fragment is empty behind all others, keeping the
/// relative order within both groups. Every string left over after an empty
/// step already commutes with that generator, so no fragment changes.
pub fn defer_empty(b_basis: &[PauliString], frag: Fragmentation) -> (Vec<PauliString>, Fragmentation) {
    let (full, empty): (Vec<_>, Vec<_>) =
        b_basis.iter().copied().zip(frag.fragments).partition(|(_, f)| !f.is_empty());
    let (b, fragments) = full.into_iter().chain(empty).unzip();
    (b, Fragmentation { fragments, residual: frag.residual })
}

/// The linear size law, when it applies to a component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearLaw {
    /// `|k¹₂…ₙ|`
    pub intercept: usize,
    /// `|k¹²₃…ₙ|`; sizes fall by this much per step.
    pub step: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentOrdering {
    pub component: usize,
    /// Positions in `b` belonging to this component, ascending.
    pub positions: Vec<usize>,
    pub sizes: Vec<usize>,
    pub nonempty_strictly_decreasing: bool,
    pub empties_at_end: bool,
    /// Some product of three generators lies in `m`.
    pub associative: bool,
    pub linear_law: Option<LinearLaw>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub components: Vec<ComponentOrdering>,
    pub nonempty_fragments: usize,
    pub n_qubits: usize,
}

impl OrderingReport {
    pub fn ok(&self) -> bool {
        self.nonempty_fragments <= self.n_qubits
            && self.components.iter().all(|c| {
                c.nonempty_strictly_decreasing
                    && c.empties_at_end
                    && c.linear_law.as_ref().is_none_or(|l| l.holds)
            })
    }
}

/// Checks the fragment size ordering per frustration component: non-empty
/// sizes strictly decrease, empty fragments trail, and when no triple product
/// of generators lies in `m` the sizes follow `A + (n - r)·B`.
pub fn check_ordering(
    fragmentation: &Fragmentation,
    k_basis: &[PauliString],
    dla: &Dla,
    graph: &FrustrationGraph,
    b_basis: &[PauliString],
) -> Result<OrderingReport> {
    if fragmentation.fragments.len() != b_basis.len() {
        return Err(Error::Consistency("fragment count differs from generator count".into()));
    }
    let m_set: HashSet<PauliString> =
        dla.basis().iter().filter(|p| involution_half(p) == Half::M).copied().collect();
    let mut by_component: Vec<(usize, Vec<usize>)> = Vec::new();
    for (pos, b) in b_basis.iter().enumerate() {
        let v = dla
            .index_of(b)
            .ok_or_else(|| Error::Precondition(format!("generator {b} is not in the algebra")))?;
        let c = graph.component_of(v);
        match by_component.iter_mut().find(|(id, _)| *id == c) {
            Some((_, list)) => list.push(pos),
            None => by_component.push((c, vec![pos])),
        }
    }

    let mut components = Vec::new();
    for (component, positions) in by_component {
        let sizes: Vec<usize> = positions.iter().map(|&p| fragmentation.fragments[p].len()).collect();
        let nonempty: Vec<usize> = sizes.iter().copied().filter(|&s| s > 0).collect();
        let nonempty_strictly_decreasing = nonempty.windows(2).all(|w| w[0] > w[1]);
        let first_empty = sizes.iter().position(|&s| s == 0).unwrap_or(sizes.len());
        let empties_at_end = sizes[first_empty..].iter().all(|&s| s == 0);

        let gens: Vec<PauliString> = positions.iter().map(|&p| b_basis[p]).collect();
        let associative = has_triple_in(&gens, &m_set);
        let linear_law = if !associative && gens.len() >= 2 {
            let n = gens.len();
            let intercept = k_set_size(k_basis, &gens[..1], &gens[1..]);
            let step = k_set_size(k_basis, &gens[..2], &gens[2..]);
            let holds = sizes.iter().enumerate().all(|(i, &s)| s == intercept + (n - 1 - i) * step);
            Some(LinearLaw { intercept, step, holds })
        } else {
            None
        };
        components.push(ComponentOrdering {
            component,
            positions,
            sizes,
            nonempty_strictly_decreasing,
            empties_at_end,
            associative,
            linear_law,
        });
    }
    let report = OrderingReport {
        nonempty_fragments: fragmentation.fragments.iter().filter(|f| !f.is_empty()).count(),
        n_qubits: dla.n_qubits(),
        components,
    };
    if !report.ok() {
        return Err(Error::TheoremViolation(format!("{report:?}")));
    }
    Ok(report)
}

fn has_triple_in(gens: &[PauliString], set: &HashSet<PauliString>) -> bool {
    let n = gens.len();
    for i in 0..n {
        for j in i + 1..n {
            let ij = gens[i].mul_unchecked(&gens[j]);
            for g in &gens[j + 1..] {
                if set.contains(&ij.mul_unchecked(g).canonical()) {
                    return true;
                }
            }
        }
    }
    false
}

/// Options for [`CartanStructure::build`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecomposeOptions {
    /// First element of the Cartan subalgebra.
    pub seed: Option<PauliString>,
    /// Permutation of the reduced generators, 0-based.
    pub b_order: Option<Vec<usize>>,
}

/// `(k, m, h, b)` together with the fragmentation of `k` against `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanStructure {
    pub k_basis: Vec<PauliString>,
    pub m_basis: Vec<PauliString>,
    pub h_basis: Vec<PauliString>,
    pub b_basis: Vec<PauliString>,
    pub fragments: Vec<Vec<PauliString>>,
}

impl CartanStructure {
    pub fn build(dla: &Dla, hamiltonian: &PauliSum, opts: &DecomposeOptions) -> Result<Self> {
        let (k_basis, m_basis) = split_km(dla, hamiltonian)?;
        let h_basis = build_cartan_subalgebra(&m_basis, opts.seed.as_ref())?;
        let mut b_basis = reduce_generators(&h_basis)?;
        if let Some(order) = &opts.b_order {
            b_basis = permute(&b_basis, order)?;
        }
        let (b_basis, frag) = defer_empty(&b_basis, fragment_k(&k_basis, &b_basis));
        if !frag.residual.is_empty() {
            return Err(Error::Consistency(format!(
                "{} k elements commute with the whole Cartan subalgebra, e.g. {}",
                frag.residual.len(),
                frag.residual[0]
            )));
        }
        Ok(Self { k_basis, m_basis, h_basis, b_basis, fragments: frag.fragments })
    }

    pub fn fragment_sizes(&self) -> Vec<usize> {
        self.fragments.iter().map(Vec::len).collect()
    }

    pub fn fragmentation(&self) -> Fragmentation {
        Fragmentation { fragments: self.fragments.clone(), residual: Vec::new() }
    }

    /// Same decomposition with the generators reordered, then empty
    /// fragments deferred.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let b_basis = permute(&self.b_basis, order)?;
        let (b_basis, frag) = defer_empty(&b_basis, fragment_k(&self.k_basis, &b_basis));
        Ok(Self { b_basis, fragments: frag.fragments, ..self.clone() })
    }

    pub fn check_ordering(&self, dla: &Dla, graph: &FrustrationGraph) -> Result<OrderingReport> {
        check_ordering(&self.fragmentation(), &self.k_basis, dla, graph, &self.b_basis)
    }
}

fn permute(items: &[PauliString], order: &[usize]) -> Result<Vec<PauliString>> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..items.len()).collect::<Vec<_>>() {
        return Err(Error::Precondition(format!(
            "{order:?} is not a permutation of 0..{}",
            items.len()
        )));
    }
    Ok(order.iter().map(|&i| items[i]).collect())
}
