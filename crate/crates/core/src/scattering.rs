//! Spin state of two electrons after Coulomb scattering, and sweeps of the
//! entanglement measure over scattering angle and initial spin geometry.
//!
//! Electron 1 is polarized along `z` before the collision; electron 2 is
//! rotated by the polar angle `Ω` and the azimuthal angle `φ`. The
//! center-of-mass amplitude is taken with unit proportionality constant, which
//! the measure does not see.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{c, C64};
use crate::state::{normalize, SpinCoefficients, TwoElectronState};
use crate::tensor::entanglement_measure;

/// Distance kept from the singular forward/backward directions.
pub const THETA_MIN: f64 = 1e-6;

pub const DEFAULT_V_REL: f64 = 1.5;

/// Half-angle sines and cosines smaller than this are snapped to zero, so
/// that `Ω = 2π k` reproduces the vanishing spin-flip amplitudes exactly.
const TRIG_SNAP: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringParams {
    pub theta: f64,
    pub omega: f64,
    pub phi: f64,
    pub v_rel: f64,
}

impl ScatteringParams {
    pub fn new(theta: f64, omega: f64, phi: f64, v_rel: f64) -> Result<Self> {
        let p = ScatteringParams { theta, omega, phi, v_rel };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_theta(self.theta)?;
        if !(self.v_rel > 0.0 && self.v_rel.is_finite()) {
            return Err(Error::Domain(format!("v_rel must be positive, got {}", self.v_rel)));
        }
        if !self.omega.is_finite() || !self.phi.is_finite() {
            return Err(Error::Domain("omega and phi must be finite".into()));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        1.0 / self.v_rel
    }
}

/// `θ` must lie in `[THETA_MIN, π - THETA_MIN]`.
pub fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && (THETA_MIN..=PI - THETA_MIN).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "theta = {theta} is outside the open interval (0, pi); allowed range is [{THETA_MIN}, pi - {THETA_MIN}]"
        )))
    }
}

/// `f(θ) = csc²(θ/2) exp(-iα ln(1 - cos θ))`.
///
/// Defined on `[THETA_MIN, π]`; the amplitude itself is regular at `θ = π`,
/// only the forward direction diverges.
pub fn amplitude(theta: f64, alpha: f64) -> Result<C64> {
    if !(theta.is_finite() && (THETA_MIN..=PI).contains(&theta)) {
        return Err(Error::Domain(format!(
            "amplitude needs theta in [{THETA_MIN}, pi], got {theta}"
        )));
    }
    let csc = 1.0 / (theta / 2.0).sin();
    let phase = -alpha * (1.0 - theta.cos()).ln();
    Ok(C64::from_polar(csc * csc, phase))
}

/// `ψ_s = f(θ) + f(π - θ)`.
pub fn psi_symmetric(theta: f64, alpha: f64) -> Result<C64> {
    Ok(amplitude(theta, alpha)? + amplitude(PI - theta, alpha)?)
}

/// `ψ_a = f(θ) - f(π - θ)`.
pub fn psi_antisymmetric(theta: f64, alpha: f64) -> Result<C64> {
    Ok(amplitude(theta, alpha)? - amplitude(PI - theta, alpha)?)
}

fn snap(x: f64) -> f64 {
    if x.abs() < TRIG_SNAP {
        0.0
    } else {
        x
    }
}

/// Raw amplitudes before normalization.
pub fn scattering_coefficients(params: &ScatteringParams) -> Result<SpinCoefficients> {
    params.validate()?;
    let alpha = params.alpha();
    check_theta(params.theta)?;
    let psi_s = psi_symmetric(params.theta, alpha)?;
    let psi_a = psi_antisymmetric(params.theta, alpha)?;
    let half = params.omega.abs() / 2.0;
    let (sin_h, cos_h) = (snap(half.sin()), snap(half.cos()));
    let flip = C64::from_polar(0.5 * sin_h, params.phi);
    Ok(SpinCoefficients::new(
        psi_a * cos_h,
        flip * (psi_s + psi_a),
        flip * (psi_a - psi_s),
        c(0.0, 0.0),
    ))
}

pub fn scattering_state(params: &ScatteringParams) -> Result<TwoElectronState> {
    normalize(&scattering_coefficients(params)?)
}

pub fn scattering_entanglement(params: &ScatteringParams) -> Result<f64> {
    Ok(entanglement_measure(&scattering_state(params)?)?.value())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub theta_points: Vec<f64>,
    pub omega_points: Vec<f64>,
    pub phi_points: Vec<f64>,
    pub v_rel: f64,
}

impl SweepGrid {
    /// `steps` equally spaced scattering angles from `theta_min` to
    /// `theta_max` inclusive.
    pub fn linspace(
        theta_min: f64,
        theta_max: f64,
        steps: usize,
        omega_points: Vec<f64>,
        phi_points: Vec<f64>,
        v_rel: f64,
    ) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Domain("theta steps must be at least 1".into()));
        }
        if theta_min > theta_max {
            return Err(Error::Domain(format!("theta_min {theta_min} exceeds theta_max {theta_max}")));
        }
        let theta_points = if steps == 1 {
            vec![theta_min]
        } else {
            let h = (theta_max - theta_min) / (steps - 1) as f64;
            (0..steps)
                .map(|k| if k == steps - 1 { theta_max } else { theta_min + k as f64 * h })
                .collect()
        };
        let grid = SweepGrid { theta_points, omega_points, phi_points, v_rel };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        for &t in &self.theta_points {
            check_theta(t)?;
        }
        if self.omega_points.is_empty() || self.phi_points.is_empty() {
            return Err(Error::Domain("omega and phi lists must be non-empty".into()));
        }
        ScatteringParams { theta: PI / 2.0, omega: 0.0, phi: 0.0, v_rel: self.v_rel }.validate()?;
        for &x in self.omega_points.iter().chain(&self.phi_points) {
            if !x.is_finite() {
                return Err(Error::Domain(format!("non-finite angle {x}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.theta_points.len() * self.omega_points.len() * self.phi_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in lexicographic `(omega, phi, theta)` order, one curve per
    /// `(Ω, φ)` pair.
    pub fn points(&self) -> Vec<ScatteringParams> {
        let mut out = Vec::with_capacity(self.len());
        for &omega in &self.omega_points {
            for &phi in &self.phi_points {
                for &theta in &self.theta_points {
                    out.push(ScatteringParams { theta, omega, phi, v_rel: self.v_rel });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub omega: f64,
    pub phi: f64,
    pub v_rel: f64,
    /// `NaN` on degenerate points.
    pub e: f64,
    pub degenerate: bool,
}

/// Evaluates the measure on every grid point. Points where the scattered
/// state vanishes are kept with `e = NaN` and `degenerate = true`.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let rows = grid
        .points()
        .into_par_iter()
        .map(|p| {
            let (e, degenerate) = match scattering_entanglement(&p) {
                Ok(e) => (e, false),
                Err(Error::NullState) => (f64::NAN, true),
                Err(other) => return Err(other),
            };
            Ok(SweepRow { theta: p.theta, omega: p.omega, phi: p.phi, v_rel: p.v_rel, e, degenerate })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows)
}

/// Spread `max - min` of the measure over `samples` equally spaced azimuths in
/// `[0, 2π)`.
pub fn verify_phi_independence(theta: f64, omega: f64, v_rel: f64, samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Domain("need at least one phi sample".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..samples {
        let phi = TAU * k as f64 / samples as f64;
        let e = scattering_entanglement(&ScatteringParams::new(theta, omega, phi, v_rel)?)?;
        lo = lo.min(e);
        hi = hi.max(e);
    }
    Ok(hi - lo)
}
