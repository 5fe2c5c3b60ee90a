//! Casimir-Polder, induced magnetic dipole and decoherence checks that decide
//! whether a parameter set isolates the gravitational interaction.

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::constants::CODATA_2018;
use crate::decoherence::dephasing_budget;
use crate::error::{Error, Result};

/// Largest tolerated ratio of a competing interaction to gravity.
pub const DEFAULT_TARGET_RATIO: f64 = 0.1;
/// Upper end of the separation bracket searched by [`min_separation`], m.
pub const SEPARATION_BRACKET_TOP: f64 = 1.0;

/// Thresholds used by [`feasibility_report_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Limits {
    /// Applies to both the Casimir-Polder and the magnetic ratio.
    pub target_ratio: f64,
    /// Residual field after cancellation, T.
    pub b_residual: f64,
    /// Required tauColl / (tau + 2 tau_acc).
    pub tau_coll_factor: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            target_ratio: DEFAULT_TARGET_RATIO,
            b_residual: 0.0,
            tau_coll_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstraintReport {
    #[serde(rename = "vCP")]
    pub v_cp: f64,
    pub v_grav: f64,
    pub cp_ratio: f64,
    pub mag_ratio: f64,
    pub min_separation: f64,
    pub tau_coll: f64,
    pub feasible: bool,
    pub reasons: Vec<String>,
}

fn clausius_mossotti(eps: f64) -> f64 {
    (eps - 1.0) / (eps + 2.0)
}

fn cp_unchecked(config: &ExperimentConfig, r: f64) -> f64 {
    let k = CODATA_2018;
    let cm = clausius_mossotti(config.eps_rel);
    23.0 * k.hbar * k.c * config.radius.powi(6) / (4.0 * std::f64::consts::PI * r.powi(7)) * cm * cm
}

/// Retarded Casimir-Polder potential between the two spheres, magnitude, J:
/// 23 hbar c R^6 / (4 pi r^7) ((eps - 1)/(eps + 2))^2.
///
/// The SI polarisabilities 4 pi eps0 R^3 (eps-1)/(eps+2) cancel the
/// 1/(4 pi eps0)^2 prefactor of the Gaussian-unit form.
pub fn casimir_polder_potential(config: &ExperimentConfig, r: f64) -> Result<f64> {
    let min = 2.0 * config.radius;
    if !(r > min) {
        return Err(Error::Overlap { separation: r, min });
    }
    Ok(cp_unchecked(config, r))
}

/// G m1 m2 / r, magnitude, J.
pub fn gravitational_potential(config: &ExperimentConfig, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("separation {r:e} must be > 0")));
    }
    Ok(CODATA_2018.g * config.m1 * config.m2 / r)
}

fn cp_ratio_at(config: &ExperimentConfig, r: f64) -> f64 {
    cp_unchecked(config, r) / (CODATA_2018.g * config.m1 * config.m2 / r)
}

/// Casimir-Polder over gravity at the closest approach d - dx.
pub fn cp_ratio(config: &ExperimentConfig) -> Result<f64> {
    let r = config.d - config.split();
    Ok(casimir_polder_potential(config, r)? / gravitational_potential(config, r)?)
}

/// Separation at which the Casimir-Polder ratio equals `target_ratio`.
///
/// The ratio falls as r^-6, so bisection on [2R, 1 m] finds the unique root.
/// Iteration continues to the floating-point limit, well inside 1e-9 m.
pub fn min_separation(config: &ExperimentConfig, target_ratio: f64) -> Result<f64> {
    if !(target_ratio > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "target ratio {target_ratio} must be > 0"
        )));
    }
    let mut lo = 2.0 * config.radius;
    let mut hi = SEPARATION_BRACKET_TOP;
    let f = |r: f64| cp_ratio_at(config, r) - target_ratio;
    if !(f(lo) > 0.0 && f(hi) < 0.0) {
        return Err(Error::Bracket {
            what: "cpRatio - target",
            lo,
            hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Induced-dipole interaction over gravity at closest approach.
///
/// Each sphere acquires mu = chi_m (4/3) pi R^3 B / mu0 in the residual field
/// and the pair interacts with mu0 mu^2 / (4 pi r^3), so the ratio scales as chi_m^2.
pub fn magnetic_interaction_ratio(config: &ExperimentConfig, b_residual: f64) -> Result<f64> {
    if !(b_residual >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "residual field {b_residual} must be >= 0"
        )));
    }
    let k = CODATA_2018;
    let pi = std::f64::consts::PI;
    let r = config.d - config.split();
    let moment = config.chi_m * (4.0 / 3.0) * pi * config.radius.powi(3) * b_residual / k.mu0;
    let u_mag = k.mu0 * moment * moment / (4.0 * pi * r.powi(3));
    Ok(u_mag / gravitational_potential(config, r)?)
}

pub fn feasibility_report(config: &ExperimentConfig, target_ratio: f64, b_residual: f64) -> Result<ConstraintReport> {
    feasibility_report_with(
        config,
        &Limits {
            target_ratio,
            b_residual,
            ..Limits::default()
        },
    )
}

/// Evaluates every constraint; the config is feasible iff no reason is recorded.
pub fn feasibility_report_with(config: &ExperimentConfig, limits: &Limits) -> Result<ConstraintReport> {
    let r = config.d - config.split();
    let v_cp = casimir_polder_potential(config, r)?;
    let v_grav = gravitational_potential(config, r)?;
    let cp_ratio = v_cp / v_grav;
    let mag_ratio = magnetic_interaction_ratio(config, limits.b_residual)?;
    let min_sep = min_separation(config, limits.target_ratio)?;

    let mut reasons = Vec::new();
    if cp_ratio > limits.target_ratio {
        reasons.push(format!(
            "cpRatio > targetRatio ({cp_ratio:.3e} > {:.3e})",
            limits.target_ratio
        ));
    }
    if mag_ratio > limits.target_ratio {
        reasons.push(format!(
            "magRatio > targetRatio ({mag_ratio:.3e} > {:.3e})",
            limits.target_ratio
        ));
    }
    let tau_coll = match dephasing_budget(config) {
        Ok(b) => {
            let need = limits.tau_coll_factor * b.duration;
            if b.tau_coll < need {
                reasons.push(format!(
                    "tauColl < {} x duration ({:.3e} s < {need:.3e} s)",
                    limits.tau_coll_factor, b.tau_coll
                ));
            }
            b.tau_coll
        }
        Err(e) => {
            reasons.push(format!("decoherence model: {e}"));
            f64::NAN
        }
    };
    Ok(ConstraintReport {
        v_cp,
        v_grav,
        cp_ratio,
        mag_ratio,
        min_separation: min_sep,
        tau_coll,
        feasible: reasons.is_empty(),
        reasons,
    })
}
