//! Exact adjoint action of product ansätze on Pauli sums, the normalized
//! trace form, and the cost functions built from them.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum, PRUNE_TOL};

/// Relative weight an operator may carry outside the expected symmetric
/// subspace before cost evaluation refuses it.
pub const STAGING_TOL: f64 = 1e-6;

type DetMap = HashMap<PauliString, f64, BuildHasherDefault<DefaultHasher>>;

/// Which side the ansatz unitary sits on when conjugating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `K A K†`
    #[default]
    Forward,
    /// `K† A K`
    Dagger,
}

/// `K = Π_j exp(i θ_j P_j)` with the product taken in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ansatz {
    pub factors: Vec<(PauliString, f64)>,
    #[serde(default)]
    pub direction: Direction,
}

impl Ansatz {
    pub fn new(factors: Vec<(PauliString, f64)>) -> Self {
        Self { factors, direction: Direction::Forward }
    }

    pub fn from_parts(strings: &[PauliString], angles: &[f64]) -> Self {
        assert_eq!(strings.len(), angles.len(), "one angle per factor");
        Self::new(strings.iter().copied().zip(angles.iter().copied()).collect())
    }

    pub fn identity() -> Self {
        Self::new(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn angles(&self) -> Vec<f64> {
        self.factors.iter().map(|f| f.1).collect()
    }

    pub fn set_angle(&mut self, index: usize, angle: f64) {
        self.factors[index].1 = angle;
    }

    /// The same unitary, conjugating from the other side.
    pub fn dagger(&self) -> Self {
        let direction = match self.direction {
            Direction::Forward => Direction::Dagger,
            Direction::Dagger => Direction::Forward,
        };
        Self { factors: self.factors.clone(), direction }
    }

    /// Concatenation `self · other` (both must conjugate forward).
    pub fn then(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self::new(factors)
    }
}

/// Applies `exp(iθP) · exp(-iθP)` to every term of `terms`.
fn rotate(terms: &DetMap, p: &PauliString, theta: f64) -> DetMap {
    let (s, c) = (2.0 * theta).sin_cos();
    let mut out = DetMap::with_capacity_and_hasher(terms.len() * 2, Default::default());
    for (q, &coeff) in terms {
        if p.commutes_unchecked(q) {
            *out.entry(*q).or_insert(0.0) += coeff;
        } else {
            *out.entry(*q).or_insert(0.0) += coeff * c;
            // i·P·Q is ±R for anticommuting P, Q.
            let pq = p.mul_unchecked(q);
            let sign = if (pq.phase() + 1).is_multiple_of(4) { 1.0 } else { -1.0 };
            *out.entry(pq.canonical()).or_insert(0.0) += sign * coeff * s;
        }
    }
    out.retain(|_, v| v.abs() >= PRUNE_TOL);
    out
}

/// `exp(iθP) A exp(-iθP)` for a single factor.
pub fn conjugate_factor(operand: &PauliSum, p: &PauliString, theta: f64) -> Result<PauliSum> {
    conjugate(&Ansatz::new(vec![(*p, theta)]), operand)
}

/// `K A K†` (forward) or `K† A K` (dagger), one factor at a time.
pub fn conjugate(ansatz: &Ansatz, operand: &PauliSum) -> Result<PauliSum> {
    let n = operand.n_qubits();
    if let Some((p, _)) = ansatz.factors.iter().find(|(p, _)| p.n_qubits() != n) {
        return Err(Error::DimensionMismatch { left: p.n_qubits(), right: n });
    }
    let mut terms: DetMap = operand.iter().map(|(p, c)| (*p, c)).collect();
    match ansatz.direction {
        Direction::Forward => {
            for (p, theta) in ansatz.factors.iter().rev() {
                terms = rotate(&terms, p, *theta);
            }
        }
        Direction::Dagger => {
            for (p, theta) in &ansatz.factors {
                terms = rotate(&terms, p, -*theta);
            }
        }
    }
    let mut out = PauliSum::zero(n)?;
    let mut sorted: Vec<_> = terms.into_iter().collect();
    sorted.sort_by_key(|a| a.0);
    for (p, c) in sorted {
        out.add_canonical(p, c);
    }
    Ok(out)
}

/// `Tr(AB) / 2ⁿ`.
pub fn inner(a: &PauliSum, b: &PauliSum) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::DimensionMismatch { left: a.n_qubits(), right: b.n_qubits() });
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    Ok(small.iter().map(|(p, c)| c * large.coeff(p)).sum())
}

/// Relative weight of `op` on strings anticommuting with any of `strings`.
pub fn anticommuting_weight(op: &PauliSum, strings: &[PauliString]) -> f64 {
    let norm = op.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let outside: f64 = op
        .iter()
        .filter(|(p, _)| strings.iter().any(|s| !s.commutes_unchecked(p)))
        .map(|(_, c)| c * c)
        .sum();
    outside.sqrt() / norm
}

/// `f_r(α) = ⟨K b K†, H_r⟩`. `H_r` must commute with every string in
/// `preceding` up to [`STAGING_TOL`].
pub fn cost_fr(
    ansatz_r: &Ansatz,
    b_r: &PauliString,
    h_r: &PauliSum,
    preceding: &[PauliString],
) -> Result<f64> {
    cost_fr_with_tol(ansatz_r, b_r, h_r, preceding, STAGING_TOL)
}

pub fn cost_fr_with_tol(
    ansatz_r: &Ansatz,
    b_r: &PauliString,
    h_r: &PauliSum,
    preceding: &[PauliString],
    tol: f64,
) -> Result<f64> {
    let weight = anticommuting_weight(h_r, preceding);
    if weight > tol {
        return Err(Error::Staging { weight, tol });
    }
    let rotated = conjugate(&forward(ansatz_r), &PauliSum::single(*b_r, 1.0))?;
    inner(&rotated, h_r)
}

fn forward(a: &Ansatz) -> Ansatz {
    Ansatz { direction: Direction::Forward, ..a.clone() }
}

/// `f(θ) = ⟨K v K†, H⟩` for `v` supported on `h_basis`.
pub fn cost_full(
    ansatz: &Ansatz,
    v: &PauliSum,
    hamiltonian: &PauliSum,
    h_basis: &[PauliString],
) -> Result<f64> {
    if let Some(p) = v.strings().find(|p| !h_basis.contains(p)) {
        return Err(Error::Precondition(format!("v has support on {p}, outside h")));
    }
    inner(&conjugate(&forward(ansatz), v)?, hamiltonian)
}

/// `‖part of H outside span(h_basis)‖ / ‖H‖`. The identity counts as inside.
pub fn residual(transformed: &PauliSum, h_basis: &[PauliString]) -> Result<f64> {
    let total = transformed.norm_sqr();
    if total == 0.0 {
        return Err(Error::UndefinedMetric("operator has zero norm".into()));
    }
    let outside: f64 = transformed
        .iter()
        .filter(|(p, _)| !p.is_identity() && !h_basis.contains(p))
        .map(|(_, c)| c * c)
        .sum();
    Ok((outside / total).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn quarter_rotation_of_z() {
        let a = Ansatz::new(vec![(p("X"), FRAC_PI_4)]);
        let out = conjugate(&a, &PauliSum::single(p("Z"), 1.0)).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.coeff(&p("Y")) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dagger_undoes_forward() {
        let a = Ansatz::new(vec![(p("XY"), 0.3), (p("YX"), -1.1), (p("ZY"), 0.7)]);
        let h = PauliSum::from_text(&[("XX", -1.0), ("ZI", 0.5), ("IZ", 0.25)]).unwrap();
        let back = conjugate(&a.dagger(), &conjugate(&a, &h).unwrap()).unwrap();
        for (q, c) in h.iter() {
            assert!((back.coeff(q) - c).abs() < 1e-12);
        }
        assert_eq!(back.len(), h.len());
    }

    #[test]
    fn zero_angles_are_identity() {
        let a = Ansatz::new(vec![(p("XY"), 0.0), (p("YX"), 0.0)]);
        let h = PauliSum::from_text(&[("XX", -1.0), ("ZI", 0.5)]).unwrap();
        assert_eq!(conjugate(&a, &h).unwrap(), h);
    }

    #[test]
    fn inner_orthonormal() {
        let z = PauliSum::single(p("ZI"), 1.0);
        let x = PauliSum::single(p("XI"), 1.0);
        assert_eq!(inner(&z, &z).unwrap(), 1.0);
        assert_eq!(inner(&z, &x).unwrap(), 0.0);
    }

    #[test]
    fn cost_fr_identity_reads_coefficient() {
        let h = PauliSum::from_text(&[("XX", -1.0), ("ZI", 0.5), ("IZ", 0.25)]).unwrap();
        let a = Ansatz::from_parts(&[p("XY"), p("YX")], &[0.0, 0.0]);
        assert_eq!(cost_fr(&a, &p("ZI"), &h, &[]).unwrap(), 0.5);
        assert!(matches!(cost_fr(&a, &p("IZ"), &h, &[p("ZI")]), Err(Error::Staging { .. })));
    }

    #[test]
    fn cost_full_identity() {
        let h = PauliSum::from_text(&[("XX", -1.0), ("ZI", 0.5), ("IZ", 0.25)]).unwrap();
        let hb = [p("ZI"), p("IZ")];
        let v = PauliSum::from_terms(2, [(hb[0], 0.3), (hb[1], 0.1)]).unwrap();
        let f = cost_full(&Ansatz::identity(), &v, &h, &hb).unwrap();
        assert!((f - (0.3 * 0.5 + 0.1 * 0.25)).abs() < 1e-15);
        let bad = PauliSum::single(p("XX"), 1.0);
        assert!(cost_full(&Ansatz::identity(), &bad, &h, &hb).is_err());
    }

    #[test]
    fn residual_examples() {
        let hb = [p("ZI"), p("IZ")];
        let inside = PauliSum::from_text(&[("ZI", 0.5), ("IZ", 0.25)]).unwrap();
        assert_eq!(residual(&inside, &hb).unwrap(), 0.0);
        let half = PauliSum::from_text(&[("ZI", 1.0), ("XX", 1.0)]).unwrap();
        assert!((residual(&half, &hb).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(residual(&PauliSum::zero(2).unwrap(), &hb), Err(Error::UndefinedMetric(_))));
    }
}
