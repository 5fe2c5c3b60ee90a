//! Newtonian branch phases for two parallel interferometers.
//!
//! Mass 1 is split about x = 0 and mass 2 about x = d, both along the common
//! x axis. Branch L of each mass sits at -dx/2 from its centre, branch R at
//! +dx/2, which gives the separations {LL: d, LR: d + dx, RL: d - dx, RR: d}.

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::constants::{PhysicalConstants, CODATA_2018};
use crate::error::{Error, Result};

/// Upper bound on dx/d for the small-split expansion.
pub const SMALL_SPLIT_LIMIT: f64 = 0.1;

/// Joint path of the two masses: (mass 1 branch, mass 2 branch).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    LL,
    LR,
    RL,
    RR,
}

impl Branch {
    /// Ordered like the spin basis {up-up, up-down, down-up, down-down}.
    pub const ALL: [Branch; 4] = [Branch::LL, Branch::LR, Branch::RL, Branch::RR];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Whether mass 1 and mass 2 take their right-hand path in this branch.
    pub fn sides(self) -> (bool, bool) {
        match self {
            Branch::LL => (false, false),
            Branch::LR => (false, true),
            Branch::RL => (true, false),
            Branch::RR => (true, true),
        }
    }
}

/// Centre-to-centre distance for each branch, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Separations {
    #[serde(rename = "LL")]
    pub ll: f64,
    #[serde(rename = "LR")]
    pub lr: f64,
    #[serde(rename = "RL")]
    pub rl: f64,
    #[serde(rename = "RR")]
    pub rr: f64,
}

impl Separations {
    pub fn get(&self, branch: Branch) -> f64 {
        match branch {
            Branch::LL => self.ll,
            Branch::LR => self.lr,
            Branch::RL => self.rl,
            Branch::RR => self.rr,
        }
    }
}

/// The four branch phases and the two differentials against the common phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseSet {
    #[serde(rename = "phiLL")]
    pub phi_ll: f64,
    #[serde(rename = "phiLR")]
    pub phi_lr: f64,
    #[serde(rename = "phiRL")]
    pub phi_rl: f64,
    #[serde(rename = "phiRR")]
    pub phi_rr: f64,
    pub phi_ref: f64,
    #[serde(rename = "dPhiLR")]
    pub d_phi_lr: f64,
    #[serde(rename = "dPhiRL")]
    pub d_phi_rl: f64,
}

impl PhaseSet {
    fn from_branches(phi_ll: f64, phi_lr: f64, phi_rl: f64, phi_rr: f64) -> Self {
        PhaseSet {
            phi_ll,
            phi_lr,
            phi_rl,
            phi_rr,
            phi_ref: phi_ll,
            d_phi_lr: phi_lr - phi_ll,
            d_phi_rl: phi_rl - phi_ll,
        }
    }

    pub fn get(&self, branch: Branch) -> f64 {
        match branch {
            Branch::LL => self.phi_ll,
            Branch::LR => self.phi_lr,
            Branch::RL => self.phi_rl,
            Branch::RR => self.phi_rr,
        }
    }

    /// dPhiLR + dPhiRL, the quantity that sets the entanglement.
    pub fn entangling_sum(&self) -> f64 {
        self.d_phi_lr + self.d_phi_rl
    }
}

pub fn pairwise_separations(config: &ExperimentConfig) -> Separations {
    let dx = config.split();
    Separations {
        ll: config.d,
        lr: config.d + dx,
        rl: config.d - dx,
        rr: config.d,
    }
}

/// Phases G m1 m2 tau / (hbar r) accumulated while the split is held.
pub fn static_phases(config: &ExperimentConfig) -> PhaseSet {
    static_phases_with(&CODATA_2018, config)
}

pub fn static_phases_with(k: &PhysicalConstants, config: &ExperimentConfig) -> PhaseSet {
    let sep = pairwise_separations(config);
    let phase = |r: f64| k.g * config.m1 * config.m2 * config.tau / (k.hbar * r);
    PhaseSet::from_branches(phase(sep.ll), phase(sep.lr), phase(sep.rl), phase(sep.rr))
}

/// Leading-order dPhiRL + dPhiLR for dx << d: 2 (G m1 m2 tau / hbar d) (dx/d)^2.
///
/// The exact sum is (G m1 m2 tau / hbar d) * 2 x^2 / (1 - x^2) with x = dx/d.
pub fn small_split_phase(config: &ExperimentConfig) -> Result<f64> {
    let k = CODATA_2018;
    let x = config.split() / config.d;
    if x >= SMALL_SPLIT_LIMIT {
        return Err(Error::Regime {
            model: "small-split expansion",
            detail: format!("dx/d = {x:.4} must be below {SMALL_SPLIT_LIMIT}"),
        });
    }
    let base = k.g * config.m1 * config.m2 * config.tau / (k.hbar * config.d);
    Ok(2.0 * base * x * x)
}

/// Stern-Gerlach split after accelerating for tau_acc/2 and decelerating for tau_acc/2:
/// dx = (1/2) (g_e mu_B dB/dx / m) tau_acc^2.
pub fn superposition_size(k: &PhysicalConstants, db_dx: f64, tau_acc: f64, mass: f64) -> f64 {
    0.5 * (k.g_e * k.mu_b * db_dx / mass) * tau_acc * tau_acc
}

/// Acceleration of mass 1 towards mass 2 at the closest branch, m s^-2.
pub fn mutual_acceleration(config: &ExperimentConfig) -> f64 {
    let r = config.d - config.split();
    CODATA_2018.g * config.m2 / (r * r)
}

/// Fraction of the final half-split reached at normalised time u in [0, 1]
/// under constant acceleration then equal deceleration.
fn split_profile(u: f64) -> f64 {
    if u <= 0.5 {
        2.0 * u * u
    } else {
        let v = 1.0 - u;
        1.0 - 2.0 * v * v
    }
}

fn trapezoid(f: impl Fn(f64) -> f64, span: f64, panels: usize) -> f64 {
    let h = span / panels as f64;
    let mut acc = 0.5 * (f(0.0) + f(span));
    for i in 1..panels {
        acc += f(i as f64 * h);
    }
    acc * h
}

/// Branch phases including the split (step 1) and recombination (step 3) stages.
///
/// Each mass's branches leave the centre with a constant spin-dependent
/// acceleration, the spin flips half way, and they arrive at +-dx/2 after
/// tau_acc; step 3 retraces the path. The time integral of 1/r over each
/// stage uses the composite trapezoidal rule with `n_steps` panels.
pub fn dynamic_phases(config: &ExperimentConfig, n_steps: usize) -> Result<PhaseSet> {
    if n_steps < 2 {
        return Err(Error::InvalidArgument(format!("n_steps = {n_steps}, need at least 2")));
    }
    let k = CODATA_2018;
    let stat = static_phases(config);
    let coupling = k.g * config.m1 * config.m2 / k.hbar;
    let half = 0.5 * config.split();
    let d = config.d;
    let ta = config.tau_acc;

    // offset of each branch from its centre during split and recombination
    let split = |t: f64| half * split_profile(t / ta);
    let merge = |t: f64| half * split_profile(1.0 - t / ta);

    let extra = |branch: Branch| -> f64 {
        if ta == 0.0 {
            return 0.0;
        }
        let sep = |s: f64| match branch {
            Branch::LL | Branch::RR => d,
            Branch::LR => d + 2.0 * s,
            Branch::RL => d - 2.0 * s,
        };
        let step1 = trapezoid(|t| 1.0 / sep(split(t)), ta, n_steps);
        let step3 = trapezoid(|t| 1.0 / sep(merge(t)), ta, n_steps);
        coupling * (step1 + step3)
    };

    Ok(PhaseSet::from_branches(
        stat.phi_ll + extra(Branch::LL),
        stat.phi_lr + extra(Branch::LR),
        stat.phi_rl + extra(Branch::RL),
        stat.phi_rr + extra(Branch::RR),
    ))
}
