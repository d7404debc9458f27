//! Dense n-qubit pure states and density matrices.
//!
//! Qubit 0 is the most significant bit of a basis index, so for `n = 2` the
//! index of `|q0 q1⟩` is `2·q0 + q1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{BlochVector, DampingParameter};
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Diagonal entries down to this value are clamped to zero when read as
/// probabilities; anything more negative is rejected.
pub const NEGATIVE_PROB_SLACK: f64 = 1e-12;

fn bit_mask(n: usize, qubit: usize) -> Result<usize> {
    if qubit >= n {
        return Err(Error::IndexOutOfRange { index: qubit, n });
    }
    Ok(1 << (n - 1 - qubit))
}

fn dagger(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// One layer's gate from the {H, T, CNOT} set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H(usize),
    T(usize),
    Cnot { control: usize, target: usize },
}

impl GateKind {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            GateKind::H(q) | GateKind::T(q) => bit_mask(n, q).map(drop),
            GateKind::Cnot { control, target } => {
                bit_mask(n, control)?;
                bit_mask(n, target)?;
                if control == target {
                    return Err(Error::ControlEqualsTarget(control));
                }
                Ok(())
            }
        }
    }

    pub fn touches(&self, qubit: usize) -> bool {
        match *self {
            GateKind::H(q) | GateKind::T(q) => q == qubit,
            GateKind::Cnot { control, target } => control == qubit || target == qubit,
        }
    }

    /// Qubits not acted on by this gate.
    pub fn idle_qubits(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..n).filter(move |&q| !self.touches(q))
    }

    /// The 2×2 matrix of a single-qubit gate; `None` for CNOT.
    pub fn single_qubit_matrix(&self) -> Option<Mat2> {
        match self {
            GateKind::H(_) => {
                let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Some([[h, h], [h, -h]])
            }
            GateKind::T(_) => Some([[ONE, ZERO], [ZERO, t_phase()]]),
            GateKind::Cnot { .. } => None,
        }
    }
}

fn t_phase() -> C64 {
    C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
}

/// Kraus operators `E₀, E₁` of a single-qubit channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausPair {
    pub e0: Mat2,
    pub e1: Mat2,
}

impl KrausPair {
    /// `E₀†E₀ + E₁†E₁`, which equals the identity for a trace-preserving channel.
    pub fn completeness(&self) -> Mat2 {
        let a = matmul(&dagger(&self.e0), &self.e0);
        let b = matmul(&dagger(&self.e1), &self.e1);
        [
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ]
    }

    /// `E₀E₀† + E₁E₁†`; differs from the identity for non-unital channels.
    pub fn unitality(&self) -> Mat2 {
        let a = matmul(&self.e0, &dagger(&self.e0));
        let b = matmul(&self.e1, &dagger(&self.e1));
        [
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ]
    }

    /// Sparse 4×4 superoperator acting on a 2×2 block in the order
    /// `(00, 01, 10, 11)`: `B'_{ab} = Σ_k Σ_{cd} E_k[a][c] B[c][d] conj(E_k[b][d])`.
    fn superoperator(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        let s = self.e0[a][c] * self.e0[b][d].conj()
                            + self.e1[a][c] * self.e1[b][d].conj();
                        if s != ZERO {
                            out.push((2 * a + b, 2 * c + d, s));
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn kraus_amplitude_damping(g: DampingParameter) -> KrausPair {
    let s = C64::new(g.a().sqrt(), 0.0);
    let k = C64::new(g.gamma().sqrt(), 0.0);
    KrausPair {
        e0: [[ONE, ZERO], [ZERO, s]],
        e1: [[ZERO, k], [ZERO, ZERO]],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    AllZeros,
    AllOnes,
}

impl InitialState {
    pub fn basis_index(&self, n: usize) -> usize {
        match self {
            InitialState::AllZeros => 0,
            InitialState::AllOnes => (1 << n) - 1,
        }
    }
}

/// Operations shared by the pure and mixed representations.
pub trait QuantumState: Clone {
    fn n_qubits(&self) -> usize;
    fn apply_gate(&mut self, gate: GateKind) -> Result<()>;
    /// Computational-basis probabilities, clamped and checked.
    fn diag_probs(&self) -> Result<Vec<f64>>;
}

fn clamp_probs(raw: impl Iterator<Item = f64>) -> Result<Vec<f64>> {
    raw.map(|p| {
        if p >= 0.0 {
            Ok(p)
        } else if p >= -NEGATIVE_PROB_SLACK {
            Ok(0.0)
        } else {
            Err(Error::NotAProbabilityVector(format!("diagonal entry {p}")))
        }
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let d = 1usize << n;
        if index >= d {
            return Err(Error::IndexOutOfRange { index, n: d });
        }
        let mut amplitudes = vec![ZERO; d];
        amplitudes[index] = ONE;
        Ok(Self { n, amplitudes })
    }

    /// Wraps raw amplitudes; the length must be a power of two ≥ 2 and the
    /// vector is rescaled to unit norm.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let d = amplitudes.len();
        if d < 2 || !d.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: d.next_power_of_two().max(2),
                got: d,
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            n: d.trailing_zeros() as usize,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.dim();
        let mut entries = Vec::with_capacity(d * d);
        for a in &self.amplitudes {
            for b in &self.amplitudes {
                entries.push(a * b.conj());
            }
        }
        DensityMatrix { n: self.n, entries }
    }

    fn apply_single(&mut self, mask: usize, u: &Mat2) {
        for i0 in 0..self.dim() {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let (a, b) = (self.amplitudes[i0], self.amplitudes[i1]);
            self.amplitudes[i0] = u[0][0] * a + u[0][1] * b;
            self.amplitudes[i1] = u[1][0] * a + u[1][1] * b;
        }
    }
}

impl QuantumState for PureState {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate(&mut self, gate: GateKind) -> Result<()> {
        gate.validate(self.n)?;
        match gate {
            GateKind::H(q) => {
                let u = gate.single_qubit_matrix().unwrap();
                self.apply_single(bit_mask(self.n, q)?, &u);
            }
            GateKind::T(q) => {
                let mask = bit_mask(self.n, q)?;
                let phase = t_phase();
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *a *= phase;
                    }
                }
            }
            GateKind::Cnot { control, target } => {
                let cm = bit_mask(self.n, control)?;
                let tm = bit_mask(self.n, target)?;
                for i in 0..self.dim() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amplitudes.swap(i, i | tm);
                    }
                }
            }
        }
        Ok(())
    }

    fn diag_probs(&self) -> Result<Vec<f64>> {
        clamp_probs(self.amplitudes.iter().map(|a| a.norm_sqr()))
    }
}

/// Dense `d × d` density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    entries: Vec<C64>,
}

impl DensityMatrix {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Ok(PureState::basis(n, index)?.to_density())
    }

    /// Single-qubit state `(I + r·σ)/2`.
    pub fn from_bloch(r: BlochVector) -> Self {
        let h = 0.5;
        let entries = vec![
            C64::new(h * (1.0 + r.z), 0.0),
            C64::new(h * r.x, -h * r.y),
            C64::new(h * r.x, h * r.y),
            C64::new(h * (1.0 - r.z), 0.0),
        ];
        Self { n: 1, entries }
    }

    /// Bloch vector of a single-qubit density matrix.
    pub fn bloch_vector(&self) -> Result<BlochVector> {
        if self.n != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.n,
            });
        }
        let r01 = self.entries[1];
        Ok(BlochVector::new(
            2.0 * r01.re,
            -2.0 * r01.im,
            (self.entries[0] - self.entries[3]).re,
        ))
    }

    /// Builds from row-major entries of a `2ⁿ × 2ⁿ` matrix, unchecked beyond shape.
    pub fn from_entries(n: usize, entries: Vec<C64>) -> Result<Self> {
        let d = 1usize << n;
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: entries.len(),
            });
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim() + j]
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|i| self.entries[i * d + i]).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// `max |ρ − ρ†|` over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn apply_single_unitary(&mut self, mask: usize, u: &Mat2) {
        let d = self.dim();
        // rows: ρ ← Uρ
        for i0 in (0..d).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            for j in 0..d {
                let a = self.entries[i0 * d + j];
                let b = self.entries[i1 * d + j];
                self.entries[i0 * d + j] = u[0][0] * a + u[0][1] * b;
                self.entries[i1 * d + j] = u[1][0] * a + u[1][1] * b;
            }
        }
        // columns: ρ ← ρU†
        let ud = dagger(u);
        for row in self.entries.chunks_exact_mut(d) {
            for j0 in (0..d).filter(|j| j & mask == 0) {
                let j1 = j0 | mask;
                let (a, b) = (row[j0], row[j1]);
                row[j0] = a * ud[0][0] + b * ud[1][0];
                row[j1] = a * ud[0][1] + b * ud[1][1];
            }
        }
    }

    /// `ρ ↦ Σ_k (I⊗…⊗E_k⊗…⊗I) ρ (…)†` on one qubit, block by block over
    /// the index pairs that differ only in that qubit's bit.
    pub fn apply_kraus(&mut self, qubit: usize, k: &KrausPair) -> Result<()> {
        let mask = bit_mask(self.n, qubit)?;
        let sup = k.superoperator();
        let d = self.dim();
        let idx = |i: usize, j: usize| i * d + j;
        for i0 in (0..d).filter(|i| i & mask == 0) {
            let rows = [i0, i0 | mask];
            for j0 in (0..d).filter(|j| j & mask == 0) {
                let cols = [j0, j0 | mask];
                let block = [
                    self.entries[idx(rows[0], cols[0])],
                    self.entries[idx(rows[0], cols[1])],
                    self.entries[idx(rows[1], cols[0])],
                    self.entries[idx(rows[1], cols[1])],
                ];
                let mut out = [ZERO; 4];
                for &(o, i, s) in &sup {
                    out[o] += s * block[i];
                }
                for (slot, v) in out.into_iter().enumerate() {
                    self.entries[idx(rows[slot / 2], cols[slot % 2])] = v;
                }
            }
        }
        Ok(())
    }
}

/// Out-of-place form of [`DensityMatrix::apply_kraus`].
pub fn apply_kraus_single(
    rho: &DensityMatrix,
    qubit: usize,
    k: &KrausPair,
) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    out.apply_kraus(qubit, k)?;
    Ok(out)
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn apply_gate(&mut self, gate: GateKind) -> Result<()> {
        gate.validate(self.n)?;
        let d = self.dim();
        match gate {
            GateKind::H(q) => {
                let u = gate.single_qubit_matrix().unwrap();
                self.apply_single_unitary(bit_mask(self.n, q)?, &u);
            }
            GateKind::T(q) => {
                // ρ_ij ← t_i ρ_ij conj(t_j), t = e^{iπ/4} on the |1⟩ branch
                let mask = bit_mask(self.n, q)?;
                let phase = t_phase();
                let phase_c = phase.conj();
                for i in 0..d {
                    for j in 0..d {
                        match (i & mask != 0, j & mask != 0) {
                            (true, false) => self.entries[i * d + j] *= phase,
                            (false, true) => self.entries[i * d + j] *= phase_c,
                            _ => {}
                        }
                    }
                }
            }
            GateKind::Cnot { control, target } => {
                let cm = bit_mask(self.n, control)?;
                let tm = bit_mask(self.n, target)?;
                // the permutation is an involution, so swap each orbit once
                let perm = |i: usize| if i & cm != 0 { i ^ tm } else { i };
                for i in 0..d {
                    for j in 0..d {
                        let a = i * d + j;
                        let b = perm(i) * d + perm(j);
                        if b > a {
                            self.entries.swap(a, b);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn diag_probs(&self) -> Result<Vec<f64>> {
        let d = self.dim();
        clamp_probs((0..d).map(|i| self.entries[i * d + i].re))
    }
}

pub fn apply_gate<S: QuantumState>(state: &S, gate: GateKind) -> Result<S> {
    let mut out = state.clone();
    out.apply_gate(gate)?;
    Ok(out)
}

pub fn initial_pure(n: usize, which: InitialState) -> Result<PureState> {
    if n == 0 {
        return Err(Error::TooFewQubits(n));
    }
    PureState::basis(n, which.basis_index(n))
}

pub fn initial_density(n: usize, which: InitialState) -> Result<DensityMatrix> {
    Ok(initial_pure(n, which)?.to_density())
}
