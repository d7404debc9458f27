//! Random {H, T, CNOT} circuits with one gate per layer, evolved either
//! unitarily on pure states or with amplitude damping on idle qubits.
//!
//! Sample `k` of an ensemble always draws its gates from
//! `derive_seed(master, STREAM_CIRCUIT, k)`, so the unitary and noisy runs of
//! the same sample see the same realization and results do not depend on
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bloch::DampingParameter;
use crate::error::{Error, Result};
use crate::quantum::{
    initial_density, initial_pure, kraus_amplitude_damping, DensityMatrix, GateKind, InitialState,
    KrausPair, PureState, QuantumState,
};
use crate::seed::{derive_seed, STREAM_CIRCUIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerEvent {
    pub layer_index: usize,
    pub gate: GateKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitRealization {
    pub n: usize,
    pub seed: u64,
    pub events: Vec<LayerEvent>,
}

impl CircuitRealization {
    pub fn depth(&self) -> usize {
        self.events.len()
    }
}

/// Draws `depth` layers. Each layer is H, T or CNOT with probability 1/3;
/// H and T pick a uniform qubit, CNOT a uniform ordered pair of distinct qubits.
pub fn sample_realization(seed: u64, n: usize, depth: usize) -> Result<CircuitRealization> {
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let events = (0..depth)
        .map(|layer_index| {
            let gate = match rng.gen_range(0..3u8) {
                0 => GateKind::H(rng.gen_range(0..n)),
                1 => GateKind::T(rng.gen_range(0..n)),
                _ => {
                    let control = rng.gen_range(0..n);
                    let mut target = rng.gen_range(0..n - 1);
                    if target >= control {
                        target += 1;
                    }
                    GateKind::Cnot { control, target }
                }
            };
            LayerEvent { layer_index, gate }
        })
        .collect();
    Ok(CircuitRealization { n, seed, events })
}

/// Which qubits are damped after each gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePlacement {
    /// Only qubits the gate does not touch.
    #[default]
    IdleOnly,
    /// Every qubit, including the gate's own.
    AllQubits,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    gamma: DampingParameter,
    placement: NoisePlacement,
    kraus: KrausPair,
}

impl NoiseSpec {
    pub fn new(gamma: DampingParameter, placement: NoisePlacement) -> Self {
        Self {
            gamma,
            placement,
            kraus: kraus_amplitude_damping(gamma),
        }
    }

    pub fn idle(gamma: DampingParameter) -> Self {
        Self::new(gamma, NoisePlacement::IdleOnly)
    }

    pub fn gamma(&self) -> DampingParameter {
        self.gamma
    }

    pub fn placement(&self) -> NoisePlacement {
        self.placement
    }

    /// Qubits that receive damping in a layer carrying `gate`.
    pub fn targets(&self, gate: &GateKind, n: usize) -> Vec<usize> {
        match self.placement {
            NoisePlacement::IdleOnly => gate.idle_qubits(n).collect(),
            NoisePlacement::AllQubits => (0..n).collect(),
        }
    }

    /// Damps the layer's target qubits and returns how many were hit.
    pub fn apply(&self, rho: &mut DensityMatrix, gate: &GateKind) -> Result<usize> {
        let targets = self.targets(gate, rho.n_qubits());
        if self.gamma.gamma() > 0.0 {
            for &q in &targets {
                rho.apply_kraus(q, &self.kraus)?;
            }
        }
        Ok(targets.len())
    }
}

/// Depths `0, stride, 2·stride, …` plus `depth` itself.
pub fn record_depths(depth: usize, stride: usize) -> Vec<usize> {
    let stride = stride.max(1);
    let mut out: Vec<usize> = (0..=depth).step_by(stride).collect();
    if out.last() != Some(&depth) {
        out.push(depth);
    }
    out
}

fn check_record_at(record_at: &[usize], depth: usize) -> Result<()> {
    if record_at.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config(
            "record_at",
            "depths must be strictly increasing",
        ));
    }
    if let Some(&last) = record_at.last() {
        if last > depth {
            return Err(Error::config(
                "record_at",
                format!("depth {last} exceeds circuit depth {depth}"),
            ));
        }
    }
    Ok(())
}

/// Runs `c` on `state`, calling `after_gate` after each gate and `visit` at
/// every recorded depth (depth 0 is the untouched input).
pub(crate) fn drive<S, A, V>(
    state: &mut S,
    c: &CircuitRealization,
    record_at: &[usize],
    mut after_gate: A,
    mut visit: V,
) -> Result<()>
where
    S: QuantumState,
    A: FnMut(&mut S, &GateKind) -> Result<()>,
    V: FnMut(usize, &S) -> Result<()>,
{
    if state.n_qubits() != c.n {
        return Err(Error::DimensionMismatch {
            expected: c.n,
            got: state.n_qubits(),
        });
    }
    check_record_at(record_at, c.depth())?;
    let mut next = record_at.iter().peekable();
    if next.peek() == Some(&&0) {
        visit(0, state)?;
        next.next();
    }
    for (t, ev) in c.events.iter().enumerate() {
        if next.peek().is_none() {
            break;
        }
        state.apply_gate(ev.gate)?;
        after_gate(state, &ev.gate)?;
        if next.peek() == Some(&&(t + 1)) {
            visit(t + 1, state)?;
            next.next();
        }
    }
    Ok(())
}

pub fn evolve_unitary(
    init: &PureState,
    c: &CircuitRealization,
    record_at: &[usize],
) -> Result<Vec<PureState>> {
    let mut state = init.clone();
    let mut out = Vec::with_capacity(record_at.len());
    drive(
        &mut state,
        c,
        record_at,
        |_, _| Ok(()),
        |_, s| {
            out.push(s.clone());
            Ok(())
        },
    )?;
    Ok(out)
}

/// Each layer applies its gate, then damping on the qubits chosen by `noise`.
pub fn evolve_noisy(
    init: &DensityMatrix,
    c: &CircuitRealization,
    noise: &NoiseSpec,
    record_at: &[usize],
) -> Result<Vec<DensityMatrix>> {
    let mut state = init.clone();
    let mut out = Vec::with_capacity(record_at.len());
    drive(
        &mut state,
        c,
        record_at,
        |rho, gate| noise.apply(rho, gate).map(drop),
        |_, s| {
            out.push(s.clone());
            Ok(())
        },
    )?;
    Ok(out)
}

/// Probability vectors at every recorded depth along one circuit.
pub fn unitary_probs(
    init: InitialState,
    c: &CircuitRealization,
    record_at: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let mut state = initial_pure(c.n, init)?;
    let mut out = Vec::with_capacity(record_at.len());
    drive(
        &mut state,
        c,
        record_at,
        |_, _| Ok(()),
        |_, s| {
            out.push(s.diag_probs()?);
            Ok(())
        },
    )?;
    Ok(out)
}

pub fn noisy_probs(
    init: InitialState,
    c: &CircuitRealization,
    noise: &NoiseSpec,
    record_at: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let mut state = initial_density(c.n, init)?;
    let mut out = Vec::with_capacity(record_at.len());
    drive(
        &mut state,
        c,
        record_at,
        |rho, gate| noise.apply(rho, gate).map(drop),
        |_, s| {
            out.push(s.diag_probs()?);
            Ok(())
        },
    )?;
    Ok(out)
}

/// The realization used by sample `index` of an ensemble seeded with `master`.
pub fn ensemble_realization(
    master: u64,
    index: usize,
    n: usize,
    depth: usize,
) -> Result<CircuitRealization> {
    sample_realization(derive_seed(master, STREAM_CIRCUIT, index as u64), n, depth)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub index: usize,
    pub realization: CircuitRealization,
    /// `[record][basis index]` probabilities of the noiseless run.
    pub unitary: Vec<Vec<f64>>,
    pub noisy: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub struct EnsembleShape<'a> {
    pub n: usize,
    pub depth: usize,
    pub init: InitialState,
    pub record_at: &'a [usize],
}

pub fn paired_sample(
    master: u64,
    index: usize,
    shape: EnsembleShape<'_>,
    noise: &NoiseSpec,
) -> Result<PairedSample> {
    let realization = ensemble_realization(master, index, shape.n, shape.depth)?;
    let unitary = unitary_probs(shape.init, &realization, shape.record_at)?;
    let noisy = noisy_probs(shape.init, &realization, noise, shape.record_at)?;
    Ok(PairedSample {
        index,
        realization,
        unitary,
        noisy,
    })
}

/// `m` paired samples in index order. Runs in parallel with the `parallel`
/// feature; the output is identical either way.
pub fn paired_ensemble(
    master: u64,
    m: usize,
    shape: EnsembleShape<'_>,
    noise: &NoiseSpec,
) -> Result<Vec<PairedSample>> {
    if m == 0 {
        return Err(Error::EmptyEnsemble { needed: 1, got: 0 });
    }
    crate::par::map_indices(m, |k| paired_sample(master, k, shape, noise))
}
