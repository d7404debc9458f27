//! Majorization diagnostics: sorted cumulants of measurement probabilities,
//! their ensemble spread (the SDL signature) and the distance of that spread
//! from a Haar-random reference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{PureState, QuantumState, C64};
use crate::seed::{derive_seed, STREAM_HAAR};

/// Tolerance on `Σ p = 1` accepted by [`cumulants`].
pub const PROB_SUM_TOL: f64 = 1e-10;

/// Samples per accumulation chunk. Fixed so that floating-point reduction
/// order, and hence every output bit, is independent of the thread count.
pub const CHUNK: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CumulantVector(Vec<f64>);

impl CumulantVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `C(k) = Σ_{j≤k} P↓(j)` with `P↓` sorted in descending order.
pub fn cumulants(p: &[f64]) -> Result<CumulantVector> {
    if p.is_empty() {
        return Err(Error::NotAProbabilityVector("empty".into()));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::NotAProbabilityVector(format!("entry {bad}")));
    }
    let mut sorted = p.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    for v in sorted.iter_mut() {
        acc += *v;
        *v = acc;
    }
    if (acc - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::NotAProbabilityVector(format!("sums to {acc}")));
    }
    Ok(CumulantVector(sorted))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdlSignature {
    pub depth: usize,
    pub sdl: Vec<f64>,
}

/// Running per-coordinate population statistics, mergeable in any grouping.
///
/// Stores `(count, mean, M2)` rather than raw power sums; the resulting
/// variance `M2 / count` is the same population quantity `E[C²] − E[C]²`
/// without the cancellation that makes identical members come out nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct SdlAccumulator {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl SdlAccumulator {
    pub fn new(d: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; d],
            m2: vec![0.0; d],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// `(count, mean, M2)`, for checkpointing.
    pub fn to_parts(&self) -> (usize, Vec<f64>, Vec<f64>) {
        (self.count, self.mean.clone(), self.m2.clone())
    }

    pub fn from_parts(count: usize, mean: Vec<f64>, m2: Vec<f64>) -> Self {
        assert_eq!(mean.len(), m2.len(), "mean and M2 lengths differ");
        Self { count, mean, m2 }
    }

    pub fn push(&mut self, c: &CumulantVector) -> Result<()> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: c.len(),
            });
        }
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &x) in self.mean.iter_mut().zip(&mut self.m2).zip(c.as_slice()) {
            let delta = x - *m;
            *m += delta / n;
            *s += delta * (x - *m);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &SdlAccumulator) -> Result<()> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if other.count == 0 {
            return Ok(());
        }
        if self.count == 0 {
            *self = other.clone();
            return Ok(());
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for k in 0..self.dim() {
            let delta = other.mean[k] - self.mean[k];
            self.mean[k] += delta * nb / n;
            self.m2[k] += other.m2[k] + delta * delta * na * nb / n;
        }
        self.count += other.count;
        Ok(())
    }

    pub fn signature(&self, depth: usize) -> Result<SdlSignature> {
        if self.count < 2 {
            return Err(Error::EmptyEnsemble {
                needed: 2,
                got: self.count,
            });
        }
        let n = self.count as f64;
        let sdl = self.m2.iter().map(|s| (s / n).max(0.0).sqrt()).collect();
        Ok(SdlSignature { depth, sdl })
    }
}

/// Per-k population standard deviation of the cumulants across the ensemble.
pub fn ensemble_sdl(cs: &[CumulantVector], depth: usize) -> Result<SdlSignature> {
    let d = cs.first().map(CumulantVector::len).unwrap_or(0);
    let mut acc = SdlAccumulator::new(d);
    for c in cs {
        acc.push(c)?;
    }
    acc.signature(depth)
}

/// Haar-random state in dimension `d`: a normalized vector of i.i.d.
/// complex standard normals. `d` must be a power of two.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<PureState> {
    let amps = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::from_amplitudes(amps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarReference {
    pub d: usize,
    pub m_haar: usize,
    pub seed: u64,
    pub sdl: Vec<f64>,
}

/// Haar sample `i` of a reference with seed `seed`.
pub fn haar_sample(seed: u64, i: usize, d: usize) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_HAAR, i as u64));
    haar_state(&mut rng, d)
}

pub fn haar_reference(d: usize, m_haar: usize, seed: u64) -> Result<HaarReference> {
    if m_haar < 2 {
        return Err(Error::EmptyEnsemble {
            needed: 2,
            got: m_haar,
        });
    }
    let chunks = crate::par::map_indices(m_haar.div_ceil(CHUNK), |c| {
        let mut acc = SdlAccumulator::new(d);
        for i in c * CHUNK..((c + 1) * CHUNK).min(m_haar) {
            acc.push(&cumulants(&haar_sample(seed, i, d)?.diag_probs()?)?)?;
        }
        Ok(acc)
    })?;
    let mut total = SdlAccumulator::new(d);
    for c in &chunks {
        total.merge(c)?;
    }
    Ok(HaarReference {
        d,
        m_haar,
        seed,
        sdl: total.signature(0)?.sdl,
    })
}

/// `D(t) = ‖SDL(t) − SDL_Haar‖₂` over all `k = 1..d`.
pub fn distance_to_haar(s: &SdlSignature, reference: &HaarReference) -> Result<f64> {
    if s.sdl.len() != reference.sdl.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.sdl.len(),
            got: s.sdl.len(),
        });
    }
    Ok(s.sdl
        .iter()
        .zip(&reference.sdl)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Delete-one-group jackknife standard error of `D` from disjoint groups of
/// the same ensemble.
pub fn distance_jackknife_se(groups: &[SdlAccumulator], reference: &HaarReference) -> Result<f64> {
    let g = groups.len();
    if g < 2 {
        return Err(Error::EmptyEnsemble { needed: 2, got: g });
    }
    let d = groups[0].dim();
    let leave_out: Vec<f64> = (0..g)
        .map(|skip| {
            let mut acc = SdlAccumulator::new(d);
            for (i, grp) in groups.iter().enumerate() {
                if i != skip {
                    acc.merge(grp)?;
                }
            }
            distance_to_haar(&acc.signature(0)?, reference)
        })
        .collect::<Result<_>>()?;
    let mean = leave_out.iter().sum::<f64>() / g as f64;
    let ss: f64 = leave_out.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(((g - 1) as f64 / g as f64 * ss).sqrt())
}
