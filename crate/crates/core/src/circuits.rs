//! Gate-level circuits: the fixed-depth evolution circuit `K e^{-ith} K†`,
//! the compressed nearest-neighbour ansatz for TFIM/TFXY chains, and a
//! QASM 2 text format.
//!
//! `PauliRotation { string, angle }` is `exp(-i·angle/2·P)`, so an ansatz
//! factor `exp(iαP)` becomes a rotation by `-2α`.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{AnsatzKind, SynthesisResult};
use crate::cartan::CartanStructure;
use crate::pauli::PauliString;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    PauliRotation { string: PauliString, angle: f64 },
    H { qubit: usize },
    S { qubit: usize },
    Sdg { qubit: usize },
    Cnot { control: usize, target: usize },
    Reset { qubit: usize },
    Barrier,
}

/// Qubits `0..n_qubits` are the physical register; ancillas follow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_ancillas: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_ancillas: usize) -> Self {
        Self { n_qubits, n_ancillas, gates: Vec::new() }
    }

    pub fn total_qubits(&self) -> usize {
        self.n_qubits + self.n_ancillas
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let total = self.total_qubits();
        let check = |q: usize| {
            if q < total {
                Ok(())
            } else {
                Err(Error::Precondition(format!("qubit {q} out of range ({total} qubits)")))
            }
        };
        match &gate {
            Gate::PauliRotation { string, .. } => {
                if string.n_qubits() != self.n_qubits {
                    return Err(Error::DimensionMismatch {
                        left: string.n_qubits(),
                        right: self.n_qubits,
                    });
                }
            }
            Gate::H { qubit } | Gate::S { qubit } | Gate::Sdg { qubit } | Gate::Reset { qubit } => {
                check(*qubit)?
            }
            Gate::Cnot { control, target } => {
                check(*control)?;
                check(*target)?;
                if control == target {
                    return Err(Error::Precondition("CNOT control equals target".into()));
                }
            }
            Gate::Barrier => {}
        }
        self.gates.push(match gate {
            Gate::PauliRotation { string, angle } => {
                Gate::PauliRotation { string: string.canonical(), angle }
            }
            g => g,
        });
        Ok(())
    }

    /// Explicit CNOT gates only.
    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    /// CNOTs after lowering each weight-`w` rotation to `2(w-1)` CNOTs.
    pub fn lowered_cnot_count(&self) -> usize {
        self.gates
            .iter()
            .map(|g| match g {
                Gate::Cnot { .. } => 1,
                Gate::PauliRotation { string, .. } => 2 * string.weight().saturating_sub(1),
                _ => 0,
            })
            .sum()
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::PauliRotation { .. })).count()
    }

    /// Gates excluding barriers.
    pub fn gate_count(&self) -> usize {
        self.gates.iter().filter(|g| !matches!(g, Gate::Barrier)).count()
    }
}

/// Factor strings of the compressed TFIM/TFXY ansatz, one list per step.
///
/// Step `r` (1-based) is the descending doublet chain `D_{l-1,l} … D_{r,r+1}`,
/// each doublet contributing `X_{j-1}Y_j` then `Y_{j-1}X_j`.
pub fn compressed_tfxy_factors(structure: &CartanStructure) -> Result<Vec<Vec<PauliString>>> {
    let l = structure
        .b_basis
        .first()
        .map(PauliString::n_qubits)
        .ok_or_else(|| Error::UnsupportedAnsatz("empty Cartan subalgebra".into()))?;
    let z: Vec<PauliString> =
        (0..l).map(|q| PauliString::single(l, q, 'Z')).collect::<Result<_>>()?;
    if structure.b_basis != z {
        return Err(Error::UnsupportedAnsatz(
            "compressed ansatz needs the generators Z₁, …, Z_l in site order".into(),
        ));
    }
    let mut expected = HashSet::new();
    for i in 0..l {
        for j in i + 1..l {
            for (a, b) in [('X', 'Y'), ('Y', 'X')] {
                expected.insert(hat_string(l, i, j, a, b)?);
            }
        }
    }
    let actual: HashSet<PauliString> = structure.k_basis.iter().copied().collect();
    if actual != expected {
        return Err(Error::UnsupportedAnsatz("k is not of the free-fermion chain form".into()));
    }
    (1..=l)
        .map(|r| {
            let mut v = Vec::new();
            for j in (r + 1..=l).rev() {
                // sites j-1, j (1-based) are qubits j-2, j-1
                v.push(hat_string(l, j - 2, j - 1, 'X', 'Y')?);
                v.push(hat_string(l, j - 2, j - 1, 'Y', 'X')?);
            }
            Ok(v)
        })
        .collect()
}

/// `A_i Z_{i+1} … Z_{j-1} B_j` on 0-based sites `i < j`.
fn hat_string(n: usize, i: usize, j: usize, a: char, b: char) -> Result<PauliString> {
    let mut p = PauliString::single(n, i, a)?.multiply(&PauliString::single(n, j, b)?)?;
    for q in i + 1..j {
        p = p.multiply(&PauliString::single(n, q, 'Z')?)?;
    }
    Ok(p.canonical())
}

fn validate(result: &SynthesisResult, structure: &CartanStructure, force: bool) -> Result<()> {
    if !force && !result.converged {
        return Err(Error::Precondition("synthesis did not converge (use force to emit anyway)".into()));
    }
    if result.h_basis != structure.h_basis {
        return Err(Error::Consistency("result and structure have different Cartan subalgebras".into()));
    }
    let k: HashSet<&PauliString> = structure.k_basis.iter().collect();
    for f in &result.fragments {
        if let Some((p, _)) = f.factors.iter().find(|(p, _)| !k.contains(p)) {
            return Err(Error::Consistency(format!("factor {p} is not in k")));
        }
    }
    if result.ansatz == AnsatzKind::Product && result.method == crate::optimize::Method::Redcard {
        let sizes: Vec<usize> = result.fragments.iter().map(|f| f.factors.len()).collect();
        if sizes != structure.fragment_sizes() {
            return Err(Error::Consistency(format!(
                "fragment sizes {sizes:?} differ from {:?}",
                structure.fragment_sizes()
            )));
        }
    }
    Ok(())
}

fn emit(result: &SynthesisResult, t: f64) -> Result<Circuit> {
    let n = result.hamiltonian.n_qubits();
    let mut c = Circuit::new(n, 0);
    // K† blocks: K¹† first in time, each block's factors in list order.
    for f in &result.fragments {
        for &(p, alpha) in &f.factors {
            c.push(Gate::PauliRotation { string: p, angle: 2.0 * alpha })?;
        }
        c.push(Gate::Barrier)?;
    }
    for p in &result.h_basis {
        let coeff = result.h.coeff(p);
        c.push(Gate::PauliRotation { string: *p, angle: 2.0 * t * coeff })?;
    }
    c.push(Gate::Barrier)?;
    for f in result.fragments.iter().rev() {
        for &(p, alpha) in f.factors.iter().rev() {
            c.push(Gate::PauliRotation { string: p, angle: -2.0 * alpha })?;
        }
        c.push(Gate::Barrier)?;
    }
    Ok(c)
}

/// `K¹…K^B · e^{-ith} · K^{B†}…K^{1†}`. Only the centre angles depend on `t`.
pub fn build_evolution_circuit(
    result: &SynthesisResult,
    structure: &CartanStructure,
    t: f64,
    force: bool,
) -> Result<Circuit> {
    validate(result, structure, force)?;
    emit(result, t)
}

/// Evolution circuit for a result optimized with the compressed ansatz; every
/// rotation is a nearest-neighbour weight-2 doublet half.
pub fn build_compressed_tfxy_circuit(
    result: &SynthesisResult,
    structure: &CartanStructure,
    t: f64,
    force: bool,
) -> Result<Circuit> {
    let layout = compressed_tfxy_factors(structure)?;
    validate(result, structure, force)?;
    let got: Vec<Vec<PauliString>> =
        result.fragments.iter().map(|f| f.factors.iter().map(|x| x.0).collect()).collect();
    if got != layout {
        return Err(Error::UnsupportedAnsatz(
            "result was not optimized with the compressed ansatz".into(),
        ));
    }
    emit(result, t)
}

fn qubit_name(c: &Circuit, q: usize) -> String {
    if q < c.n_qubits {
        format!("q[{q}]")
    } else {
        format!("a[{}]", q - c.n_qubits)
    }
}

/// QASM 2 text. Pauli rotations are lowered to basis changes, a CNOT parity
/// ladder, one `rz`, and the mirrored un-ladder.
pub fn export_qasm(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.n_qubits);
    if circuit.n_ancillas > 0 {
        let _ = writeln!(out, "qreg a[{}];", circuit.n_ancillas);
    }
    let name = |q| qubit_name(circuit, q);
    for g in &circuit.gates {
        match g {
            Gate::H { qubit } => writeln!(out, "h {};", name(*qubit)),
            Gate::S { qubit } => writeln!(out, "s {};", name(*qubit)),
            Gate::Sdg { qubit } => writeln!(out, "sdg {};", name(*qubit)),
            Gate::Reset { qubit } => writeln!(out, "reset {};", name(*qubit)),
            Gate::Cnot { control, target } => {
                writeln!(out, "cx {},{};", name(*control), name(*target))
            }
            Gate::Barrier => {
                if circuit.n_ancillas > 0 {
                    writeln!(out, "barrier q,a;")
                } else {
                    writeln!(out, "barrier q;")
                }
            }
            Gate::PauliRotation { string, angle } => {
                lower_rotation(&mut out, string, *angle);
                Ok(())
            }
        }
        .expect("writing to a String cannot fail");
    }
    out
}

fn lower_rotation(out: &mut String, p: &PauliString, angle: f64) {
    let support = p.support();
    let Some(&last) = support.last() else {
        // identity: global phase only
        return;
    };
    for &q in &support {
        match p.letter(q) {
            'X' => out.push_str(&format!("h q[{q}];\n")),
            'Y' => out.push_str(&format!("sdg q[{q}];\nh q[{q}];\n")),
            _ => {}
        }
    }
    for w in support.windows(2) {
        out.push_str(&format!("cx q[{}],q[{}];\n", w[0], w[1]));
    }
    out.push_str(&format!("rz({angle}) q[{last}];\n"));
    for w in support.windows(2).rev() {
        out.push_str(&format!("cx q[{}],q[{}];\n", w[0], w[1]));
    }
    for &q in &support {
        match p.letter(q) {
            'X' => out.push_str(&format!("h q[{q}];\n")),
            'Y' => out.push_str(&format!("h q[{q}];\ns q[{q}];\n")),
            _ => {}
        }
    }
}

/// Parses the dialect written by [`export_qasm`]. Lowered rotations come
/// back as primitive gates, with `rz` as a single-qubit Z rotation.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut n_qubits = None;
    let mut n_ancillas = 0;
    let mut circuit: Option<Circuit> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}: `{line}`", lineno + 1));
        let body = line.strip_suffix(';').ok_or_else(|| err("missing `;`"))?.trim();
        if body.starts_with("OPENQASM") || body.starts_with("include") {
            continue;
        }
        if let Some(decl) = body.strip_prefix("qreg ") {
            let (reg, size) = parse_register(decl).ok_or_else(|| err("bad register"))?;
            match reg {
                "q" => n_qubits = Some(size),
                "a" => n_ancillas = size,
                _ => return Err(err("unknown register")),
            }
            continue;
        }
        let c = match circuit.as_mut() {
            Some(c) => c,
            None => {
                let n = n_qubits.ok_or_else(|| err("gate before `qreg q`"))?;
                circuit.insert(Circuit::new(n, n_ancillas))
            }
        };
        let (op, args) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let qubit = |s: &str| parse_qubit(s.trim(), c.n_qubits, c.n_ancillas).ok_or_else(|| err("bad qubit"));
        let gate = if op == "barrier" {
            Gate::Barrier
        } else if let Some(angle) = op.strip_prefix("rz(").and_then(|s| s.strip_suffix(')')) {
            let angle: f64 = angle.parse().map_err(|_| err("bad angle"))?;
            let q = qubit(args)?;
            if q >= c.n_qubits {
                return Err(err("rz on an ancilla"));
            }
            Gate::PauliRotation { string: PauliString::single(c.n_qubits, q, 'Z')?, angle }
        } else {
            match op {
                "h" => Gate::H { qubit: qubit(args)? },
                "s" => Gate::S { qubit: qubit(args)? },
                "sdg" => Gate::Sdg { qubit: qubit(args)? },
                "reset" => Gate::Reset { qubit: qubit(args)? },
                "cx" => {
                    let (a, b) = args.split_once(',').ok_or_else(|| err("cx needs two qubits"))?;
                    Gate::Cnot { control: qubit(a)?, target: qubit(b)? }
                }
                _ => return Err(err("unknown gate")),
            }
        };
        c.push(gate)?;
    }
    match circuit {
        Some(c) => Ok(c),
        None => {
            let n = n_qubits.ok_or_else(|| Error::Parse("missing `qreg q`".into()))?;
            Ok(Circuit::new(n, n_ancillas))
        }
    }
}

fn parse_register(decl: &str) -> Option<(&str, usize)> {
    let (name, rest) = decl.trim().split_once('[')?;
    let size = rest.strip_suffix(']')?.parse().ok()?;
    Some((name.trim(), size))
}

fn parse_qubit(s: &str, n: usize, m: usize) -> Option<usize> {
    let (reg, size) = parse_register(s)?;
    match reg {
        "q" if size < n => Some(size),
        "a" if size < m => Some(n + size),
        _ => None,
    }
}
