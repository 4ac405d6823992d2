//! Dense-matrix ground truth for small registers.
//!
//! Basis index bit `q` is qubit `q`, matching the bit masks of
//! [`PauliString`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::adjoint::{Ansatz, Direction};
use crate::circuits::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Largest register [`to_dense`] accepts.
pub const DENSE_CAP: usize = 10;
/// Largest physical register for density-matrix simulation.
pub const DENSITY_CAP: usize = 6;
/// Largest register, ancillas included, for density-matrix simulation.
pub const DENSITY_TOTAL_CAP: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: dim });
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self { n_qubits, matrix: DMatrix::identity(dim, dim) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { n_qubits: self.n_qubits, matrix: self.matrix.adjoint() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self { n_qubits: self.n_qubits, matrix: &self.matrix * &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self { n_qubits: self.n_qubits, matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n_qubits: self.n_qubits, matrix: &self.matrix * s }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry of `A - A†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = &self.matrix - self.matrix.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `A†A - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(self.dim(), self.dim());
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Ascending eigenvalues of a Hermitian operator.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.check_hermitian()?;
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// `Tr(A†B) / 2ⁿ`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_shape(other)?;
        let t: Complex64 = self.matrix.iter().zip(other.matrix.iter()).map(|(a, b)| a.conj() * b).sum();
        Ok(t / self.dim() as f64)
    }

    fn check_hermitian(&self) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > 1e-10 {
            return Err(Error::NonHermitian(dev));
        }
        Ok(())
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(())
    }
}

fn phase_unit(k: u32) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// Nonzero entry of column `c` of `P`: `(row, value)`.
#[inline]
fn pauli_entry(p: &PauliString, c: usize) -> (usize, Complex64) {
    let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
    let k = u32::from(p.phase()) + (x & z).count_ones() + 2 * (z & c).count_ones();
    (c ^ x, phase_unit(k))
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::DenseCap { qubits: n, cap });
    }
    Ok(())
}

pub fn pauli_matrix(p: &PauliString) -> Result<DenseOperator> {
    check_cap(p.n_qubits(), DENSE_CAP)?;
    let dim = 1usize << p.n_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let (r, v) = pauli_entry(p, c);
        m[(r, c)] = v;
    }
    Ok(DenseOperator { n_qubits: p.n_qubits(), matrix: m })
}

pub fn to_dense(sum: &PauliSum) -> Result<DenseOperator> {
    to_dense_capped(sum, DENSE_CAP)
}

pub fn to_dense_capped(sum: &PauliSum, cap: usize) -> Result<DenseOperator> {
    let n = sum.n_qubits();
    check_cap(n, cap)?;
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for (p, coeff) in sum.iter() {
        for c in 0..dim {
            let (r, v) = pauli_entry(p, c);
            m[(r, c)] += v * coeff;
        }
    }
    Ok(DenseOperator { n_qubits: n, matrix: m })
}

/// `‖H‖_F` of the dense matrix, computed from the coefficients.
pub fn dense_frobenius_norm(sum: &PauliSum) -> f64 {
    (sum.norm_sqr() * 2f64.powi(sum.n_qubits() as i32)).sqrt()
}

/// `e^{-itH}` via Hermitian eigendecomposition.
pub fn expm_i(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    h.check_hermitian()?;
    let eig = h.matrix.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -t * lam);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    Ok(DenseOperator { n_qubits: h.n_qubits, matrix: scaled * v.adjoint() })
}

/// `K = Π_j exp(iθ_j P_j)` in list order (`K†` for a dagger ansatz).
pub fn ansatz_unitary(ansatz: &Ansatz, n: usize) -> Result<DenseOperator> {
    check_cap(n, DENSE_CAP)?;
    let mut u = DenseOperator::identity(n);
    for (p, theta) in &ansatz.factors {
        if p.n_qubits() != n {
            return Err(Error::DimensionMismatch { left: p.n_qubits(), right: n });
        }
        let e = DenseOperator::identity(n).scale(ONE * theta.cos()).matrix + pauli_matrix(p)?.matrix * (I * theta.sin());
        u.matrix *= e;
    }
    Ok(match ansatz.direction {
        Direction::Forward => u,
        Direction::Dagger => u.adjoint(),
    })
}

/// `min_φ ‖a - e^{iφ} b‖_F = √(‖a‖² + ‖b‖² - 2|Tr(a†b)|)`.
pub fn unitary_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    a.same_shape(b)?;
    let na = a.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let nb = b.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let overlap: Complex64 = a.matrix.iter().zip(b.matrix.iter()).map(|(x, y)| x.conj() * y).sum();
    Ok((na + nb - 2.0 * overlap.norm()).max(0.0).sqrt())
}

/// Left-multiplies every column of `m` by the unitary gate.
fn apply_left(m: &mut DMatrix<Complex64>, gate: &Gate) {
    let dim = m.nrows();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match gate {
        Gate::Barrier | Gate::Reset { .. } => {}
        Gate::H { qubit } => {
            let bit = 1usize << qubit;
            for mut col in m.column_iter_mut() {
                for i in (0..dim).filter(|i| i & bit == 0) {
                    let (a, b) = (col[i], col[i | bit]);
                    col[i] = (a + b) * s;
                    col[i | bit] = (a - b) * s;
                }
            }
        }
        Gate::S { qubit } | Gate::Sdg { qubit } => {
            let bit = 1usize << qubit;
            let ph = if matches!(gate, Gate::S { .. }) { I } else { -I };
            for mut col in m.column_iter_mut() {
                for i in (0..dim).filter(|i| i & bit != 0) {
                    col[i] *= ph;
                }
            }
        }
        Gate::Cnot { control, target } => {
            let (cb, tb) = (1usize << control, 1usize << target);
            for mut col in m.column_iter_mut() {
                for i in (0..dim).filter(|i| i & cb != 0 && i & tb == 0) {
                    col.swap_rows(i, i | tb);
                }
            }
        }
        Gate::PauliRotation { string, angle } => {
            let (c, sn) = ((0.5 * angle).cos(), (0.5 * angle).sin());
            for mut col in m.column_iter_mut() {
                let old: Vec<Complex64> = col.iter().copied().collect();
                for (i, z) in col.iter_mut().enumerate() {
                    *z = old[i] * c;
                }
                for (i, &a) in old.iter().enumerate() {
                    let (r, v) = pauli_entry(string, i);
                    col[r] += -I * sn * v * a;
                }
            }
        }
    }
}

/// The full unitary of a reset-free circuit on all of its qubits.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DenseOperator> {
    let n = circuit.total_qubits();
    check_cap(n, DENSE_CAP)?;
    if circuit.gates.iter().any(|g| matches!(g, Gate::Reset { .. })) {
        return Err(Error::NonUnitary("reset".into()));
    }
    let mut u = DenseOperator::identity(n);
    for g in &circuit.gates {
        apply_left(&mut u.matrix, g);
    }
    Ok(u)
}

/// Final state vector from `|0…0⟩` for a reset-free circuit.
pub fn simulate_statevector(circuit: &Circuit) -> Result<Vec<Complex64>> {
    let n = circuit.total_qubits();
    check_cap(n, DENSE_CAP)?;
    if circuit.gates.iter().any(|g| matches!(g, Gate::Reset { .. })) {
        return Err(Error::NonUnitary("reset".into()));
    }
    let mut v = DMatrix::zeros(1usize << n, 1);
    v[(0, 0)] = ONE;
    for g in &circuit.gates {
        apply_left(&mut v, g);
    }
    Ok(v.iter().copied().collect())
}

fn reset_qubit(rho: &mut DMatrix<Complex64>, q: usize) {
    let bit = 1usize << q;
    let dim = rho.nrows();
    for j in 0..dim {
        for i in 0..dim {
            if i & bit == 0 && j & bit == 0 {
                let moved = rho[(i | bit, j | bit)];
                rho[(i, j)] += moved;
            }
        }
    }
    for j in 0..dim {
        for i in 0..dim {
            if i & bit != 0 || j & bit != 0 {
                rho[(i, j)] = ZERO;
            }
        }
    }
}

/// Runs the circuit on `|0…0⟩⟨0…0|` and traces out the ancillas.
pub fn simulate_circuit_density(circuit: &Circuit) -> Result<DenseOperator> {
    check_cap(circuit.n_qubits, DENSITY_CAP)?;
    let total = circuit.total_qubits();
    check_cap(total, DENSITY_TOTAL_CAP)?;
    let dim = 1usize << total;
    let mut rho = DMatrix::zeros(dim, dim);
    rho[(0, 0)] = ONE;
    for g in &circuit.gates {
        match g {
            Gate::Barrier => {}
            Gate::Reset { qubit } => reset_qubit(&mut rho, *qubit),
            _ => {
                apply_left(&mut rho, g);
                rho.adjoint_mut();
                apply_left(&mut rho, g);
                rho.adjoint_mut();
            }
        }
    }
    let sub = 1usize << circuit.n_qubits;
    let mut out = DMatrix::zeros(sub, sub);
    for a in 0..(dim / sub) {
        let off = a * sub;
        for j in 0..sub {
            for i in 0..sub {
                out[(i, j)] += rho[(i + off, j + off)];
            }
        }
    }
    Ok(DenseOperator { n_qubits: circuit.n_qubits, matrix: out })
}
