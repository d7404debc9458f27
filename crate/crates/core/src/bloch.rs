//! One-qubit amplitude-damping geometry.
//!
//! Amplitude damping acts affinely on the Bloch ball. Following it with a
//! radial projection back onto the sphere gives a nonlinear, axially
//! symmetric map `F_γ: S² → S²`. This module evaluates that map, its polar
//! Jacobian `dθ'/dθ`, and the local area factor `Λ(θ; γ) = dA'/dA`. It also
//! locates the boundary `θ_c(γ)` between the contracting cap around the
//! north pole and the expanding belt around the south pole.
//!
//! Every function here is pure, so callers may use them from any thread.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on `‖r‖ ≤ 1` for states of the Bloch ball.
pub const BALL_SLACK: f64 = 1e-12;

/// Below this intermediate norm the radial projection is treated as undefined.
/// Only the isolated point `γ = 1/2, θ = π` gets there.
pub const UNDEFINED_NORM: f64 = 1e-12;

/// Number of samples used when bracketing `Λ(θ) = 1`.
const THETA_C_SCAN: usize = 20_001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm_squared(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn in_ball(&self) -> bool {
        self.norm() <= 1.0 + BALL_SLACK
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Direction of a nonzero vector as a point on the sphere.
    pub fn direction(&self) -> Result<PurePoint> {
        let rho = self.x.hypot(self.y);
        if rho == 0.0 && self.z == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let theta = rho.atan2(self.z);
        let phi = self.y.atan2(self.x);
        PurePoint::new(theta, phi)
    }
}

/// A pure qubit state in polar/azimuthal Bloch coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurePoint {
    theta: f64,
    phi: f64,
}

impl PurePoint {
    /// `theta` must lie in `[0, π]`; `phi` is wrapped into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidAngle(theta));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidAngle(phi));
        }
        let mut phi = phi.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2π for tiny negative inputs
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Amplitude-damping strength `γ ∈ [0, 1]` together with `A = 1 − γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DampingParameter {
    gamma: f64,
    a: f64,
}

impl DampingParameter {
    pub const IDENTITY: DampingParameter = DampingParameter { gamma: 0.0, a: 1.0 };

    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidGamma(gamma));
        }
        Ok(Self {
            gamma,
            a: 1.0 - gamma,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `1 − γ`.
    pub fn a(&self) -> f64 {
        self.a
    }
}

impl TryFrom<f64> for DampingParameter {
    type Error = Error;

    fn try_from(gamma: f64) -> Result<Self> {
        Self::new(gamma)
    }
}

impl From<DampingParameter> for f64 {
    fn from(g: DampingParameter) -> f64 {
        g.gamma
    }
}

pub fn bloch_from_angles(p: PurePoint) -> BlochVector {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    BlochVector::new(st * cp, st * sp, ct)
}

/// Bloch-vector action of the amplitude-damping channel.
pub fn ad_affine(r: BlochVector, g: DampingParameter) -> BlochVector {
    let s = g.a.sqrt();
    BlochVector::new(s * r.x, s * r.y, g.a * r.z + g.gamma)
}

/// `Tr ρ²` of the qubit state with Bloch vector `r`.
pub fn purity(r: BlochVector) -> f64 {
    0.5 * (1.0 + r.norm_squared())
}

// Algebraically N² = 1 − γ(1−γ)(1−cosθ)². The sum-of-squares form below
// keeps full relative precision near γ = 1/2, θ = π where the other one
// cancels catastrophically.
fn norm_squared_at(theta: f64, g: DampingParameter) -> f64 {
    let (st, ct) = theta.sin_cos();
    let p = g.a * ct + g.gamma;
    g.a * st * st + p * p
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::InvalidAngle(theta))
    }
}

fn defined_norm_squared(theta: f64, g: DampingParameter) -> Result<f64> {
    check_theta(theta)?;
    let n_sq = norm_squared_at(theta, g);
    if n_sq.sqrt() < UNDEFINED_NORM {
        return Err(Error::UndefinedPoint);
    }
    Ok(n_sq)
}

/// `N(θ) = ‖r'‖`, the Bloch norm after damping a pure state at polar angle θ.
pub fn intermediate_norm(theta: f64, g: DampingParameter) -> Result<f64> {
    check_theta(theta)?;
    Ok(norm_squared_at(theta, g).sqrt())
}

/// Radial projection `r ↦ r / ‖r‖`.
pub fn renormalize(r: BlochVector) -> Result<BlochVector> {
    let n = r.norm();
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(BlochVector::new(r.x / n, r.y / n, r.z / n))
}

/// The renormalized damping map `F_γ`. The azimuth passes through untouched.
pub fn f_gamma(p: PurePoint, g: DampingParameter) -> Result<PurePoint> {
    defined_norm_squared(p.theta, g)?;
    let (st, ct) = p.theta.sin_cos();
    let theta = (g.a.sqrt() * st).atan2(g.a * ct + g.gamma);
    Ok(PurePoint { theta, phi: p.phi })
}

/// Signed `dθ'/dθ`. Negative values mean the map reverses orientation, which
/// happens near the south pole once `γ > 1/2`.
pub fn dtheta_dtheta(theta: f64, g: DampingParameter) -> Result<f64> {
    let n_sq = defined_norm_squared(theta, g)?;
    Ok(g.a.sqrt() * (g.a + g.gamma * theta.cos()) / n_sq)
}

/// `|dθ'/dθ|`, the form used for area bookkeeping.
pub fn dtheta_dtheta_abs(theta: f64, g: DampingParameter) -> Result<f64> {
    dtheta_dtheta(theta, g).map(f64::abs)
}

/// Local area expansion factor
/// `Λ(θ; γ) = (1−γ) |1 − γ(1−cosθ)| / N(θ)³`.
///
/// At θ = 0 this is the continuous limit `1 − γ` of `(sinθ'/sinθ)|dθ'/dθ|`.
pub fn lambda_factor(theta: f64, g: DampingParameter) -> Result<f64> {
    let n_sq = defined_norm_squared(theta, g)?;
    Ok(g.a * (g.a + g.gamma * theta.cos()).abs() / (n_sq * n_sq.sqrt()))
}

/// An expansive region exists iff `0 < γ < 3/4`.
pub fn expansion_exists(g: DampingParameter) -> bool {
    g.gamma > 0.0 && g.gamma < 0.75
}

/// Result of bracketing `Λ(θ; γ) = 1` on a uniform scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaCSearch {
    pub theta_c: Option<f64>,
    /// Number of contractive→expansive transitions seen on the scan grid.
    /// Anything other than 0 or 1 is worth reporting.
    pub brackets: usize,
}

fn lambda_or_infinite(theta: f64, g: DampingParameter) -> f64 {
    lambda_factor(theta, g).unwrap_or(f64::INFINITY)
}

/// Scan `[0, π]`, take the sign change of `Λ − 1` nearest the north pole and
/// bisect it down to machine precision.
pub fn theta_c_search(g: DampingParameter) -> ThetaCSearch {
    if !expansion_exists(g) {
        return ThetaCSearch {
            theta_c: None,
            brackets: 0,
        };
    }
    let step = PI / (THETA_C_SCAN - 1) as f64;
    let mut first = None;
    let mut brackets = 0;
    let mut prev_theta = 0.0;
    let mut prev = lambda_or_infinite(0.0, g) - 1.0;
    for i in 1..THETA_C_SCAN {
        let theta = if i == THETA_C_SCAN - 1 {
            PI
        } else {
            i as f64 * step
        };
        let cur = lambda_or_infinite(theta, g) - 1.0;
        if prev <= 0.0 && cur > 0.0 {
            brackets += 1;
            if first.is_none() {
                first = Some((prev_theta, theta));
            }
        }
        prev = cur;
        prev_theta = theta;
    }
    let theta_c = first.map(|(mut lo, mut hi)| {
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if lambda_or_infinite(mid, g) > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // return whichever endpoint sits closer to Λ = 1
        let dl = (lambda_or_infinite(lo, g) - 1.0).abs();
        let dh = (lambda_or_infinite(hi, g) - 1.0).abs();
        if dl <= dh {
            lo
        } else {
            hi
        }
    });
    ThetaCSearch { theta_c, brackets }
}

/// Boundary angle with `Λ(θ_c; γ) = 1`, present only for `0 < γ < 3/4`.
pub fn theta_c(g: DampingParameter) -> Option<f64> {
    theta_c_search(g).theta_c
}

/// Λ sampled on a uniform θ grid, ready for export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionProfile {
    pub gamma: DampingParameter,
    pub thetas: Vec<f64>,
    /// `+∞` marks the undefined point at `γ = 1/2, θ = π`.
    pub lambdas: Vec<f64>,
    pub log_lambdas: Vec<f64>,
    pub theta_c: Option<f64>,
    pub theta_c_brackets: usize,
}

#[derive(Serialize)]
struct GridPoint {
    theta: f64,
    lambda: Option<f64>,
    log_lambda: Option<f64>,
}

#[derive(Serialize)]
struct ProfileDocument<'a> {
    gamma: f64,
    theta_c: Option<f64>,
    lambda_north: f64,
    lambda_south: Option<f64>,
    grid: Vec<GridPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<&'a serde_json::Value>,
}

pub fn expansion_profile(g: DampingParameter, resolution: usize) -> Result<ExpansionProfile> {
    if resolution < 2 {
        return Err(Error::config("resolution", "need at least 2 grid points"));
    }
    let step = PI / (resolution - 1) as f64;
    let thetas: Vec<f64> = (0..resolution)
        .map(|i| {
            if i == resolution - 1 {
                PI
            } else {
                i as f64 * step
            }
        })
        .collect();
    let lambdas: Vec<f64> = thetas.iter().map(|&t| lambda_or_infinite(t, g)).collect();
    let log_lambdas = lambdas.iter().map(|l| l.ln()).collect();
    let search = theta_c_search(g);
    Ok(ExpansionProfile {
        gamma: g,
        thetas,
        lambdas,
        log_lambdas,
        theta_c: search.theta_c,
        theta_c_brackets: search.brackets,
    })
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ExpansionProfile {
    pub fn max_lambda(&self) -> f64 {
        self.lambdas
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(θ, φ, log Λ)` triples on a `thetas × n_phi` sphere grid. Λ does not
    /// depend on φ, so every azimuth repeats the polar profile.
    pub fn sphere_triples(&self, n_phi: usize) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.thetas.len() * n_phi);
        for j in 0..n_phi {
            let phi = TAU * j as f64 / n_phi as f64;
            for (&t, &l) in self.thetas.iter().zip(&self.log_lambdas) {
                out.push((t, phi, l));
            }
        }
        out
    }

    /// CSV with header `theta,lambda,log_lambda`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["theta", "lambda", "log_lambda"])?;
        for ((t, l), ll) in self.thetas.iter().zip(&self.lambdas).zip(&self.log_lambdas) {
            wtr.write_record([t.to_string(), l.to_string(), ll.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// JSON document `{gamma, theta_c, lambda_north, lambda_south, grid: [...]}`.
    /// Non-finite Λ values are written as `null`.
    pub fn to_json(&self, meta: Option<&serde_json::Value>) -> Result<String> {
        let doc = ProfileDocument {
            gamma: self.gamma.gamma(),
            theta_c: self.theta_c,
            lambda_north: self.lambdas[0],
            lambda_south: finite(*self.lambdas.last().expect("resolution >= 2")),
            grid: self
                .thetas
                .iter()
                .zip(&self.lambdas)
                .zip(&self.log_lambdas)
                .map(|((&theta, &l), &ll)| GridPoint {
                    theta,
                    lambda: finite(l),
                    log_lambda: finite(ll),
                })
                .collect(),
            meta,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}
