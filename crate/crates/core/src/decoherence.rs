//! Environmental decoherence budget of the orbital superposition.
//!
//! Collisions with residual gas are treated in the saturated regime (every
//! collision resolves the path), so the rate is the geometric scattering rate
//! n v sigma. Blackbody scattering, emission and absorption use the
//! long-wavelength localisation rates Gamma = Lambda dx^2 of a dielectric
//! sphere (Romero-Isart, PRA 84, 052121 (2011); Schlosshauer, "Decoherence
//! and the quantum-to-classical transition", ch. 3):
//!
//! ```text
//! Lambda_sc  = 8! 8 zeta(9) c R^6 / (9 pi) (kB T_env / hbar c)^9 Re[(e-1)/(e+2)]^2
//! Lambda_em  = 16 pi^5 c R^3 / 189 (kB T_int / hbar c)^6 Im[(e-1)/(e+2)]
//! Lambda_abs = 16 pi^5 c R^3 / 189 (kB T_env / hbar c)^6 Im[(e-1)/(e+2)]
//! ```
//!
//! Only the real permittivity is configured, so |(e-1)/(e+2)| stands in for
//! the imaginary part; that is an upper bound on the emission and absorption
//! rates.

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::constants::CODATA_2018;
use crate::error::{Error, Result};

/// dx must exceed this many gas thermal de Broglie wavelengths.
pub const SATURATION_FACTOR: f64 = 10.0;
/// dx must stay below this fraction of the thermal photon wavelength.
pub const LONG_WAVELENGTH_FRACTION: f64 = 0.1;

const ZETA_9: f64 = 1.002_008_392_826_082_2;
const FACTORIAL_8: f64 = 40_320.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecoherenceRates {
    pub gamma_coll: f64,
    pub gamma_sc: f64,
    pub gamma_em: f64,
    pub gamma_abs: f64,
    /// 1 / gammaColl; infinite without gas.
    pub tau_coll: f64,
    /// Duration the superposition must survive, tau + 2 tau_acc.
    pub duration: f64,
    /// 1 - exp(-Gamma_total * duration).
    pub total_dephasing: f64,
}

impl DecoherenceRates {
    pub fn gamma_thermal(&self) -> f64 {
        self.gamma_sc + self.gamma_em + self.gamma_abs
    }

    pub fn gamma_total(&self) -> f64 {
        self.gamma_coll + self.gamma_thermal()
    }

    /// Phase-flip probability per mass for [`crate::spinstate::apply_dephasing`].
    ///
    /// A channel with flip probability p scales coherences by 1 - 2p; matching
    /// the exp(-Gamma T) decay of the orbital coherence gives p = totalDephasing / 2.
    pub fn channel_probability(&self) -> f64 {
        0.5 * self.total_dephasing
    }

    /// Folds in an independent spin-bath dephasing probability (from dynamical
    /// decoupling estimates; not derived here).
    pub fn with_spin_bath(mut self, extra: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&extra) {
            return Err(Error::InvalidArgument(format!(
                "spin-bath dephasing {extra} outside [0, 1)"
            )));
        }
        self.total_dephasing = 1.0 - (1.0 - self.total_dephasing) * (1.0 - extra);
        Ok(self)
    }
}

/// Ideal-gas number density P / (kB T), m^-3.
pub fn gas_density(pressure: f64, t_env: f64) -> Result<f64> {
    if !(pressure > 0.0 && t_env > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gas density needs P > 0 and T > 0, got P = {pressure:e}, T = {t_env:e}"
        )));
    }
    Ok(pressure / (CODATA_2018.k_b * t_env))
}

/// Thermal de Broglie wavelength h / sqrt(2 pi m kB T) of a gas particle.
pub fn gas_de_broglie_wavelength(m_gas: f64, t_env: f64) -> f64 {
    let k = CODATA_2018;
    2.0 * std::f64::consts::PI * k.hbar / (2.0 * std::f64::consts::PI * m_gas * k.k_b * t_env).sqrt()
}

/// Dominant blackbody wavelength scale 2 pi hbar c / (kB T).
pub fn thermal_photon_wavelength(t: f64) -> f64 {
    let k = CODATA_2018;
    2.0 * std::f64::consts::PI * k.hbar * k.c / (k.k_b * t)
}

fn collisional_rate(config: &ExperimentConfig) -> Result<f64> {
    if config.pressure == 0.0 {
        return Ok(0.0);
    }
    let n = gas_density(config.pressure, config.t_env)?;
    let lambda = gas_de_broglie_wavelength(config.m_gas, config.t_env);
    let dx = config.split();
    if !(dx >= SATURATION_FACTOR * lambda) {
        return Err(Error::Regime {
            model: "saturated collisional decoherence",
            detail: format!("dx = {dx:e} m is not >> gas de Broglie wavelength {lambda:e} m"),
        });
    }
    let k = CODATA_2018;
    let mean_speed = (8.0 * k.k_b * config.t_env / (std::f64::consts::PI * config.m_gas)).sqrt();
    let cross_section = std::f64::consts::PI * config.radius * config.radius;
    Ok(n * mean_speed * cross_section)
}

/// Collisional decoherence time 1 / (n v sigma), s.
pub fn collisional_time(config: &ExperimentConfig) -> Result<f64> {
    Ok(1.0 / collisional_rate(config)?)
}

/// (gammaSc, gammaEm, gammaAbs) at superposition size dx, s^-1.
pub fn thermal_rates(config: &ExperimentConfig) -> Result<(f64, f64, f64)> {
    let k = CODATA_2018;
    let dx = config.split();
    for (label, t) in [("tEnv", config.t_env), ("tInt", config.t_int)] {
        if t < 0.0 {
            return Err(Error::InvalidArgument(format!("{label} = {t} must be >= 0")));
        }
        if t > 0.0 {
            let wl = thermal_photon_wavelength(t);
            if !(dx <= LONG_WAVELENGTH_FRACTION * wl) {
                return Err(Error::Regime {
                    model: "long-wavelength thermal localisation",
                    detail: format!("dx = {dx:e} m is not << thermal wavelength {wl:e} m at {label} = {t} K"),
                });
            }
        }
    }
    let pol = (config.eps_rel - 1.0) / (config.eps_rel + 2.0);
    let r = config.radius;
    let wavenumber = |t: f64| k.k_b * t / (k.hbar * k.c);
    let pi = std::f64::consts::PI;

    let lambda_sc =
        FACTORIAL_8 * 8.0 * ZETA_9 * k.c * r.powi(6) / (9.0 * pi) * wavenumber(config.t_env).powi(9) * pol * pol;
    let dipole = 16.0 * pi.powi(5) * k.c * r.powi(3) / 189.0 * pol.abs();
    let lambda_em = dipole * wavenumber(config.t_int).powi(6);
    let lambda_abs = dipole * wavenumber(config.t_env).powi(6);
    let dx2 = dx * dx;
    Ok((lambda_sc * dx2, lambda_em * dx2, lambda_abs * dx2))
}

/// All channels accumulated over tau + 2 tau_acc.
pub fn dephasing_budget(config: &ExperimentConfig) -> Result<DecoherenceRates> {
    let gamma_coll = collisional_rate(config)?;
    let (gamma_sc, gamma_em, gamma_abs) = thermal_rates(config)?;
    let duration = config.duration();
    let total = gamma_coll + gamma_sc + gamma_em + gamma_abs;
    Ok(DecoherenceRates {
        gamma_coll,
        gamma_sc,
        gamma_em,
        gamma_abs,
        tau_coll: 1.0 / gamma_coll,
        duration,
        total_dephasing: -(-total * duration).exp_m1(),
    })
}
