//! Signed Pauli strings in binary symplectic form and real-coefficient sums
//! of them.
//!
//! Qubit `q` (0-based) is stored in bit `q` of the two masks. In text form
//! qubits are written left to right starting at qubit 1, so `"XZY"` is
//! `X₁Z₂Y₃` and the sparse form `"X1 Z2 Y3"` is the same string.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest qubit count a [`PauliString`] can hold.
pub const MAX_QUBITS: usize = 128;

/// Coefficients below this magnitude are dropped from [`PauliSum`]s.
pub const PRUNE_TOL: f64 = 1e-12;

/// Parity of the number of `Y` factors in a string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// `i^phase · ⊗_q σ(x_q, z_q)` with `σ(1,0)=X`, `σ(0,1)=Z`, `σ(1,1)=Y`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    phase: u8,
    x: u128,
    z: u128,
}

fn mask_for(n: usize) -> u128 {
    if n == MAX_QUBITS {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        Err(Error::QubitCount(n))
    } else {
        Ok(())
    }
}

impl PauliString {
    /// Builds a string from raw masks. Bits beyond `n` must be clear.
    pub fn from_masks(n: usize, x: u128, z: u128) -> Result<Self> {
        check_n(n)?;
        let m = mask_for(n);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::Parse(format!("mask has bits beyond qubit count {n}")));
        }
        Ok(Self { n: (n - 1) as u8, phase: 0, x, z })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_masks(n, 0, 0)
    }

    /// Single-qubit Pauli `letter` on 0-based qubit `q`.
    pub fn single(n: usize, q: usize, letter: char) -> Result<Self> {
        check_n(n)?;
        if q >= n {
            return Err(Error::Parse(format!("qubit {q} out of range for {n} qubits")));
        }
        let (x, z) = letter_bits(letter)?;
        Self::from_masks(n, (x as u128) << q, (z as u128) << q)
    }

    /// Parses the dense form, e.g. `"XIZY"` (an `I`/`_` is identity).
    pub fn from_dense(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.trim().chars().collect();
        check_n(letters.len())?;
        let (mut x, mut z) = (0u128, 0u128);
        for (q, c) in letters.into_iter().enumerate() {
            let (bx, bz) = letter_bits(c)?;
            x |= (bx as u128) << q;
            z |= (bz as u128) << q;
        }
        Self::from_masks(s.trim().chars().count(), x, z)
    }

    /// Parses the sparse form, e.g. `"X1 Z2 Y3"` with 1-indexed qubits;
    /// `"I"` is the identity.
    pub fn from_sparse(s: &str, n: usize) -> Result<Self> {
        check_n(n)?;
        let (mut x, mut z) = (0u128, 0u128);
        if s.trim() == "I" {
            return Self::identity(n);
        }
        for tok in s.split_whitespace() {
            let mut chars = tok.chars();
            let letter = chars.next().ok_or_else(|| Error::Parse("empty token".into()))?;
            let idx: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit index in `{tok}`")))?;
            if idx == 0 || idx > n {
                return Err(Error::Parse(format!("qubit index {idx} out of range 1..={n}")));
            }
            let bit = 1u128 << (idx - 1);
            if (x | z) & bit != 0 {
                return Err(Error::Parse(format!("qubit {idx} given twice")));
            }
            let (bx, bz) = letter_bits(letter)?;
            if bx {
                x |= bit;
            }
            if bz {
                z |= bit;
            }
        }
        Self::from_masks(n, x, z)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n as usize + 1
    }

    #[inline]
    pub fn x_mask(&self) -> u128 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u128 {
        self.z
    }

    /// Power of `i` carried by the string, in `0..4`.
    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// The same string with phase reset to zero.
    #[inline]
    pub fn canonical(&self) -> Self {
        Self { phase: 0, ..*self }
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity sites.
    #[inline]
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Pauli letter on 0-based qubit `q`.
    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    /// 0-based indices of the non-identity sites, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits()).filter(|&q| (self.x | self.z) >> q & 1 == 1).collect()
    }

    fn same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch { left: self.n_qubits(), right: other.n_qubits() })
        } else {
            Ok(())
        }
    }

    /// Product `self · other`, phase accumulated mod 4.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        // σ(x,z) = i^{x·z} XˣZᶻ, and ZᶻXˣ' = (-1)^{z·x'} Xˣ'Zᶻ.
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let ya = (self.x & self.z).count_ones();
        let yb = (other.x & other.z).count_ones();
        let swap = (self.z & other.x).count_ones();
        let yr = (x & z).count_ones();
        let phase = (self.phase as u32 + other.phase as u32 + ya + yb + 2 * swap + 4 * 128 - yr) % 4;
        Self { n: self.n, phase: phase as u8, x, z }
    }

    /// True iff the two strings commute.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.same_n(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Canonical string proportional to `[self, other]`, or `None` when they
    /// commute.
    pub fn commutator_basis(&self, other: &Self) -> Result<Option<Self>> {
        self.same_n(other)?;
        Ok(self.commutator_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutator_unchecked(&self, other: &Self) -> Option<Self> {
        if self.commutes_unchecked(other) {
            None
        } else {
            Some(Self { n: self.n, phase: 0, x: self.x ^ other.x, z: self.z ^ other.z })
        }
    }

    pub fn y_parity(&self) -> Parity {
        if (self.x & self.z).count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Dense text without the phase prefix.
    pub fn to_dense_string(&self) -> String {
        (0..self.n_qubits()).map(|q| self.letter(q)).collect()
    }

    /// Sparse text, e.g. `"X1 Z2"`; the identity is `"I"`.
    pub fn to_sparse_string(&self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        self.support()
            .into_iter()
            .map(|q| format!("{}{}", self.letter(q), q + 1))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn letter_bits(c: char) -> Result<(bool, bool)> {
    match c.to_ascii_uppercase() {
        'I' | '_' => Ok((false, false)),
        'X' => Ok((true, false)),
        'Y' => Ok((true, true)),
        'Z' => Ok((false, true)),
        other => Err(Error::Parse(format!("unknown Pauli letter `{other}`"))),
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.z.cmp(&other.z))
            .then(self.x.cmp(&other.x))
            .then(self.phase.cmp(&other.phase))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}{}", self.to_dense_string())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Dense form with an optional `i`, `-`, `-i` or `+` phase prefix.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else {
            (0, s)
        };
        let mut p = Self::from_dense(body)?;
        p.phase = phase;
        Ok(p)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Real linear combination of canonical Pauli strings; a Hermitian operator.
#[derive(Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n, terms: BTreeMap::new() })
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut sum = Self::zero(n)?;
        for (p, c) in terms {
            sum.add_term(p, c)?;
        }
        Ok(sum)
    }

    /// Convenience constructor from dense text, e.g. `[("XX", -1.0), ("ZI", 0.5)]`.
    pub fn from_text(terms: &[(&str, f64)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Parse("empty term list".into()))?;
        let n = first.0.trim_start_matches(['-', '+', 'i']).chars().count();
        let parsed = terms
            .iter()
            .map(|(s, c)| Ok((s.parse::<PauliString>()?, *c)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, parsed)
    }

    pub fn single(p: PauliString, coeff: f64) -> Self {
        let mut sum = Self { n: p.n_qubits(), terms: BTreeMap::new() };
        sum.add_term(p, coeff).expect("same qubit count");
        sum
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical string order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> + '_ {
        self.terms.iter().map(|(p, c)| (p, *c))
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> + '_ {
        self.terms.keys()
    }

    /// Coefficient of the canonical form of `p` (zero when absent).
    pub fn coeff(&self, p: &PauliString) -> f64 {
        self.terms.get(&p.canonical()).copied().unwrap_or(0.0)
    }

    /// Adds `coeff · p`. A phase of ±1 folds into the coefficient sign; an
    /// odd phase would make the sum anti-Hermitian and is rejected.
    pub fn add_term(&mut self, p: PauliString, coeff: f64) -> Result<()> {
        if p.n_qubits() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: p.n_qubits() });
        }
        let c = match p.phase() {
            0 => coeff,
            2 => -coeff,
            _ => return Err(Error::NonHermitian(coeff.abs())),
        };
        self.add_canonical(p.canonical(), c);
        Ok(())
    }

    #[inline]
    pub(crate) fn add_canonical(&mut self, p: PauliString, c: f64) {
        let entry = self.terms.entry(p).or_insert(0.0);
        *entry += c;
        if entry.abs() < PRUNE_TOL {
            self.terms.remove(&p);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self { n: self.n, terms: BTreeMap::new() };
        for (p, c) in self.iter() {
            out.add_canonical(*p, c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        let mut out = self.clone();
        for (p, c) in other.iter() {
            out.add_canonical(*p, c);
        }
        Ok(out)
    }

    /// `Σ c²`, the squared norm under the normalized trace form.
    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Keeps only terms satisfying `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&PauliString) -> bool) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().filter(|(p, _)| keep(p)).map(|(p, c)| (*p, *c)).collect(),
        }
    }

    /// The `{string, coeff}` list used for JSON.
    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.iter().map(|(p, c)| JsonTerm { string: *p, coeff: c }).collect()
    }

    pub fn from_json_terms(n: usize, terms: &[JsonTerm]) -> Result<Self> {
        Self::from_terms(n, terms.iter().map(|t| (t.string, t.coeff)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_json_terms())?)
    }

    /// Parses the `{string, coeff}` list. The list must be non-empty so the
    /// qubit count can be inferred.
    pub fn from_json(s: &str) -> Result<Self> {
        let terms: Vec<JsonTerm> = serde_json::from_str(s)?;
        let n = terms
            .first()
            .map(|t| t.string.n_qubits())
            .ok_or_else(|| Error::Parse("cannot infer qubit count from an empty list".into()))?;
        Self::from_json_terms(n, &terms)
    }
}

impl fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(p, c)| (p.to_string(), c))).finish()
    }
}

/// One `{string, coeff}` entry of a serialized [`PauliSum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub string: PauliString,
    pub coeff: f64,
}

impl Serialize for PauliSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_terms().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<JsonTerm>::deserialize(d)?;
        let n = terms
            .first()
            .map(|t| t.string.n_qubits())
            .ok_or_else(|| serde::de::Error::custom("empty Pauli sum"))?;
        Self::from_json_terms(n, &terms).map_err(serde::de::Error::custom)
    }
}
