//! wasm-bindgen bindings behind `www/index.html`.
//!
//! Three operations are exposed: the area-factor profile of one damping
//! strength, the orbit of a pure state under repeated projected damping, and a
//! small random-circuit run returning `D(t)` with and without noise.

use adgeom::bloch::{f_gamma, lambda_factor, theta_c_search, DampingParameter, PurePoint};
use adgeom::circuits::{
    ensemble_realization, noisy_probs, record_depths, unitary_probs, NoiseSpec,
};
use adgeom::experiment::distance_series;
use adgeom::majorization::haar_reference;
use adgeom::quantum::InitialState;
use wasm_bindgen::prelude::*;

/// Keeps a demo run interactive in a browser tab.
const DEMO_MAX_QUBITS: usize = 7;

fn js(e: adgeom::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn damping(gamma: f64) -> Result<DampingParameter, JsError> {
    DampingParameter::new(gamma).map_err(js)
}

/// `[θ_c or NaN, brackets, Λ(θ_0), …, Λ(θ_{n−1})]` on `n` evenly spaced
/// angles in `[0, π]`. The undefined point is reported as `+∞`.
#[wasm_bindgen]
pub fn lambda_profile(gamma: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let g = damping(gamma)?;
    if n < 2 {
        return Err(JsError::new("need at least two samples"));
    }
    let search = theta_c_search(g);
    let mut out = Vec::with_capacity(n + 2);
    out.push(search.theta_c.unwrap_or(f64::NAN));
    out.push(search.brackets as f64);
    for i in 0..n {
        let theta = std::f64::consts::PI * i as f64 / (n - 1) as f64;
        out.push(lambda_factor(theta, g).unwrap_or(f64::INFINITY));
    }
    Ok(out)
}

/// Polar angles `θ, F(θ), F(F(θ)), …` (`steps + 1` values). The orbit stops
/// early if it lands on the undefined point.
#[wasm_bindgen]
pub fn orbit(theta: f64, gamma: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    let g = damping(gamma)?;
    let mut p = PurePoint::new(theta, 0.0).map_err(js)?;
    let mut out = vec![p.theta()];
    for _ in 0..steps {
        match f_gamma(p, g) {
            Ok(q) => p = q,
            Err(_) => break,
        }
        out.push(p.theta());
    }
    Ok(out)
}

/// `D(t)` for `t = 0..=depth`: the noiseless series followed by the damped
/// one, `2·(depth + 1)` values in total.
#[wasm_bindgen]
pub fn convergence(
    n: usize,
    depth: usize,
    ensemble: usize,
    gamma: f64,
    all_ones: bool,
    seed: u32,
    m_haar: usize,
) -> Result<Vec<f64>, JsError> {
    if !(2..=DEMO_MAX_QUBITS).contains(&n) {
        return Err(JsError::new(&format!(
            "qubits must be between 2 and {DEMO_MAX_QUBITS}"
        )));
    }
    if ensemble < 2 {
        return Err(JsError::new("ensemble must have at least two circuits"));
    }
    let noise = NoiseSpec::idle(damping(gamma)?);
    let init = if all_ones {
        InitialState::AllOnes
    } else {
        InitialState::AllZeros
    };
    let record = record_depths(depth, 1);
    let seed = u64::from(seed);
    let reference = haar_reference(1 << n, m_haar, seed).map_err(js)?;
    let (mut clean, mut noisy) = (Vec::with_capacity(ensemble), Vec::with_capacity(ensemble));
    for k in 0..ensemble {
        let c = ensemble_realization(seed, k, n, depth).map_err(js)?;
        clean.push(unitary_probs(init, &c, &record).map_err(js)?);
        noisy.push(noisy_probs(init, &c, &noise, &record).map_err(js)?);
    }
    let mut out = distance_series(&clean, &reference).map_err(js)?;
    out.extend(distance_series(&noisy, &reference).map_err(js)?);
    Ok(out)
}
