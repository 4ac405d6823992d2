//! Spin-chain Hamiltonians.
//!
//! Sign conventions (fixed, and echoed into every JSON report):
//!
//! * `tfim`: `H = -J Σ XᵢXᵢ₊₁ + g Σ Zᵢ`
//! * `tfxy`: `H = -Jx Σ XᵢXᵢ₊₁ - Jy Σ YᵢYᵢ₊₁ + g Σ Zᵢ`
//! * `xy`: `H = Jx Σ XᵢXᵢ₊₁ + Jy Σ YᵢYᵢ₊₁`
//! * `heisenberg`: `H = Jx Σ XᵢXᵢ₊₁ + Jy Σ YᵢYᵢ₊₁ + Jz Σ ZᵢZᵢ₊₁`
//!
//! Open chains have `l - 1` bonds. Periodic boundaries add the `(l, 1)` bond
//! and are experimental: the closed bond is a non-local string under the
//! default involution and the algebra is generally larger.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Tfim,
    Tfxy,
    Xy,
    Heisenberg,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tfim" => Ok(Self::Tfim),
            "tfxy" => Ok(Self::Tfxy),
            "xy" => Ok(Self::Xy),
            "heisenberg" | "xyz" => Ok(Self::Heisenberg),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Tfim => "tfim",
            Self::Tfxy => "tfxy",
            Self::Xy => "xy",
            Self::Heisenberg => "heisenberg",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub sites: usize,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub g: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl ModelSpec {
    pub fn tfim(sites: usize, j: f64, g: f64) -> Self {
        Self { family: Family::Tfim, sites, jx: j, jy: 0.0, jz: 0.0, g, boundary: Boundary::Open }
    }

    pub fn tfxy(sites: usize, jx: f64, jy: f64, g: f64) -> Self {
        Self { family: Family::Tfxy, sites, jx, jy, jz: 0.0, g, boundary: Boundary::Open }
    }

    pub fn xy(sites: usize, jx: f64, jy: f64) -> Self {
        Self { family: Family::Xy, sites, jx, jy, jz: 0.0, g: 0.0, boundary: Boundary::Open }
    }

    pub fn heisenberg(sites: usize, jx: f64, jy: f64, jz: f64) -> Self {
        Self { family: Family::Heisenberg, sites, jx, jy, jz, g: 0.0, boundary: Boundary::Open }
    }

    pub fn periodic(mut self) -> Self {
        self.boundary = Boundary::Periodic;
        self
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<_> = (0..self.sites - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && self.sites > 2 {
            bonds.push((self.sites - 1, 0));
        }
        bonds
    }
}

fn two_site(n: usize, i: usize, j: usize, a: char, b: char) -> Result<PauliString> {
    PauliString::single(n, i, a)?.multiply(&PauliString::single(n, j, b)?)
}

pub fn build(spec: &ModelSpec) -> Result<PauliSum> {
    let l = spec.sites;
    if l < 2 {
        return Err(Error::Precondition(format!("chains need at least 2 sites, got {l}")));
    }
    let mut h = PauliSum::zero(l)?;
    let (sx, sy, sz, field) = match spec.family {
        Family::Tfim => (-spec.jx, 0.0, 0.0, spec.g),
        Family::Tfxy => (-spec.jx, -spec.jy, 0.0, spec.g),
        Family::Xy => (spec.jx, spec.jy, 0.0, 0.0),
        Family::Heisenberg => (spec.jx, spec.jy, spec.jz, 0.0),
    };
    for (i, j) in spec.bonds() {
        for (c, letter) in [(sx, 'X'), (sy, 'Y'), (sz, 'Z')] {
            if c != 0.0 {
                h.add_term(two_site(l, i, j, letter, letter)?, c)?;
            }
        }
    }
    if field != 0.0 {
        for q in 0..l {
            h.add_term(PauliString::single(l, q, 'Z')?, field)?;
        }
    }
    if h.is_empty() {
        return Err(Error::Precondition("all couplings are zero".into()));
    }
    Ok(h)
}
